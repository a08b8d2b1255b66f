#include "stratlasso/kernels.hpp"

#include <cmath>

#include "stratlasso/threading.hpp"

namespace stratlasso::kernels {

namespace {

constexpr double kEtaClamp = 36.0;  // sigmoid(+-36) is ~2e-16 away from {0,1}

inline double row_eta(const Eigen::MatrixXd& X, const Eigen::VectorXd& beta,
                      double mu, const Eigen::VectorXd* offset, Eigen::Index i) {
  double v = mu + X.row(i).dot(beta);
  if (offset != nullptr) v += (*offset)(i);
  return v;
}

inline double loss_term(double y, double eta) {
  // log(1 + e^eta) - y*eta, stable form.
  const double softplus = eta > 0 ? eta + std::log1p(std::exp(-eta))
                                  : std::log1p(std::exp(eta));
  return softplus - y * eta;
}

}  // namespace

double sigmoid(double eta) {
  if (eta > kEtaClamp) eta = kEtaClamp;
  if (eta < -kEtaClamp) eta = -kEtaClamp;
  return 1.0 / (1.0 + std::exp(-eta));
}

void linear_predictor_serial(const Eigen::MatrixXd& X, const Eigen::VectorXd& beta,
                             double mu, const Eigen::VectorXd* offset,
                             Eigen::VectorXd& eta) {
  const Eigen::Index n = X.rows();
  eta.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) eta(i) = row_eta(X, beta, mu, offset, i);
}

void linear_predictor(const Eigen::MatrixXd& X, const Eigen::VectorXd& beta,
                      double mu, const Eigen::VectorXd* offset, Eigen::VectorXd& eta) {
  const Eigen::Index n = X.rows();
  eta.resize(n);
  const int nt = threads_for(static_cast<std::size_t>(n) *
                             static_cast<std::size_t>(X.cols()));
  if (nt <= 1) {
    for (Eigen::Index i = 0; i < n; ++i) eta(i) = row_eta(X, beta, mu, offset, i);
    return;
  }
#pragma omp parallel for num_threads(nt) schedule(static)
  for (Eigen::Index i = 0; i < n; ++i) eta(i) = row_eta(X, beta, mu, offset, i);
}

void column_dots_serial(const Eigen::MatrixXd& X, const Eigen::VectorXd& r,
                        Eigen::VectorXd& out) {
  const Eigen::Index p = X.cols();
  out.resize(p);
  for (Eigen::Index j = 0; j < p; ++j) out(j) = X.col(j).dot(r);
}

void column_dots(const Eigen::MatrixXd& X, const Eigen::VectorXd& r,
                 Eigen::VectorXd& out) {
  const Eigen::Index p = X.cols();
  out.resize(p);
  const int nt = threads_for(static_cast<std::size_t>(X.rows()) *
                             static_cast<std::size_t>(p));
  if (nt <= 1) {
    for (Eigen::Index j = 0; j < p; ++j) out(j) = X.col(j).dot(r);
    return;
  }
#pragma omp parallel for num_threads(nt) schedule(static)
  for (Eigen::Index j = 0; j < p; ++j) out(j) = X.col(j).dot(r);
}

void column_dots_subset_serial(const Eigen::MatrixXd& X, const Eigen::VectorXd& r,
                               const std::vector<int>& cols, Eigen::VectorXd& out) {
  out.resize(static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) out(k) = X.col(cols[k]).dot(r);
}

void column_dots_subset(const Eigen::MatrixXd& X, const Eigen::VectorXd& r,
                        const std::vector<int>& cols, Eigen::VectorXd& out) {
  out.resize(static_cast<Eigen::Index>(cols.size()));
  const int nt = threads_for(static_cast<std::size_t>(X.rows()) * cols.size());
  if (nt <= 1) {
    for (std::size_t k = 0; k < cols.size(); ++k) out(k) = X.col(cols[k]).dot(r);
    return;
  }
  const std::int64_t m = static_cast<std::int64_t>(cols.size());
#pragma omp parallel for num_threads(nt) schedule(static)
  for (std::int64_t k = 0; k < m; ++k) out(k) = X.col(cols[k]).dot(r);
}

double logistic_loss_serial(const Eigen::VectorXd& y, const Eigen::VectorXd& eta) {
  const Eigen::Index n = y.size();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) acc += loss_term(y(i), eta(i));
  return acc / static_cast<double>(n);
}

double logistic_loss(const Eigen::VectorXd& y, const Eigen::VectorXd& eta) {
  const Eigen::Index n = y.size();
  const int nt = threads_for(static_cast<std::size_t>(n) * 8);
  if (nt <= 1) return logistic_loss_serial(y, eta);
  Eigen::VectorXd terms(n);
#pragma omp parallel for num_threads(nt) schedule(static)
  for (Eigen::Index i = 0; i < n; ++i) terms(i) = loss_term(y(i), eta(i));
  // summed in index order so the result matches the serial accumulation
  double acc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) acc += terms(i);
  return acc / static_cast<double>(n);
}

void sigmoid_probs_serial(const Eigen::VectorXd& eta, Eigen::VectorXd& p) {
  const Eigen::Index n = eta.size();
  p.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) p(i) = sigmoid(eta(i));
}

void sigmoid_probs(const Eigen::VectorXd& eta, Eigen::VectorXd& p) {
  const Eigen::Index n = eta.size();
  p.resize(n);
  const int nt = threads_for(static_cast<std::size_t>(n) * 4);
  if (nt <= 1) {
    for (Eigen::Index i = 0; i < n; ++i) p(i) = sigmoid(eta(i));
    return;
  }
#pragma omp parallel for num_threads(nt) schedule(static)
  for (Eigen::Index i = 0; i < n; ++i) p(i) = sigmoid(eta(i));
}

}  // namespace stratlasso::kernels
