#include "stratlasso/standardize.hpp"

#include <cmath>

#include "stratlasso/errors.hpp"

namespace stratlasso {

std::pair<Eigen::MatrixXd, StandardizationRecord> standardize(
    const Eigen::MatrixXd& X, const std::vector<int>& columns,
    const std::vector<std::string>& names) {
  Eigen::MatrixXd out = X;
  StandardizationRecord rec;
  rec.columns = columns;
  rec.mean.resize(static_cast<Eigen::Index>(columns.size()));
  rec.scale.resize(static_cast<Eigen::Index>(columns.size()));

  const double n = static_cast<double>(X.rows());
  for (std::size_t k = 0; k < columns.size(); ++k) {
    const int j = columns[k];
    const double mean = X.col(j).sum() / n;
    const double var = (X.col(j).array() - mean).square().sum() / n;
    const double sd = std::sqrt(var);
    if (sd < 1e-12 * std::max(1.0, std::abs(mean))) {
      const std::string name =
          names.empty() ? ("column " + std::to_string(j)) : names[k];
      throw ZeroVarianceColumn(name);
    }
    rec.mean(static_cast<Eigen::Index>(k)) = mean;
    rec.scale(static_cast<Eigen::Index>(k)) = sd;
    out.col(j) = (X.col(j).array() - mean) / sd;
  }
  return {std::move(out), std::move(rec)};
}

void apply_standardization(Eigen::MatrixXd& X, const StandardizationRecord& rec) {
  for (std::size_t k = 0; k < rec.columns.size(); ++k) {
    const int j = rec.columns[k];
    X.col(j) = (X.col(j).array() - rec.mean(static_cast<Eigen::Index>(k))) /
               rec.scale(static_cast<Eigen::Index>(k));
  }
}

void invert_standardization(Eigen::MatrixXd& X, const StandardizationRecord& rec) {
  for (std::size_t k = 0; k < rec.columns.size(); ++k) {
    const int j = rec.columns[k];
    X.col(j) = X.col(j).array() * rec.scale(static_cast<Eigen::Index>(k)) +
               rec.mean(static_cast<Eigen::Index>(k));
  }
}

std::pair<double, Eigen::VectorXd> destandardize_coefficients(
    double intercept, const Eigen::VectorXd& beta, const StandardizationRecord& rec) {
  Eigen::VectorXd raw = beta;
  double mu = intercept;
  for (std::size_t k = 0; k < rec.columns.size(); ++k) {
    const int j = rec.columns[k];
    const double s = rec.scale(static_cast<Eigen::Index>(k));
    const double m = rec.mean(static_cast<Eigen::Index>(k));
    raw(j) = beta(j) / s;
    mu -= beta(j) * m / s;
  }
  return {mu, std::move(raw)};
}

}  // namespace stratlasso
