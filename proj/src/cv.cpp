#include "stratlasso/cv.hpp"

#include <cmath>
#include <fstream>

#include "stratlasso/csv.hpp"
#include "stratlasso/errors.hpp"
#include "stratlasso/threading.hpp"

namespace stratlasso::cv {

double binomial_deviance(const Eigen::VectorXd& y, const Eigen::VectorXd& p) {
  if (y.size() != p.size()) throw DimensionMismatch("labels vs probabilities");
  const double eps = 1e-12;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double pi = std::min(1.0 - eps, std::max(eps, p(i)));
    acc += y(i) == 1.0 ? -std::log(pi) : -std::log(1.0 - pi);
  }
  return 2.0 * acc / static_cast<double>(y.size());
}

CvCurve cv_deviance(const PathPredictor& fit_fn, const Dataset& dataset,
                    const FoldAssignment& folds, const std::vector<double>& grid) {
  if (grid.empty()) throw InvalidConfig("empty hyperparameter grid");
  if (static_cast<Eigen::Index>(folds.fold_id.size()) != dataset.n_rows())
    throw DimensionMismatch("fold assignment vs dataset rows");

  const int k = folds.k;
  const auto g = grid.size();

  // per fold training parts must carry both classes
  for (int f = 0; f < k; ++f) {
    const auto train_rows = folds.rows_not_in_fold(f);
    if (train_rows.empty()) throw DegenerateFold("fold " + std::to_string(f));
    bool has_pos = false, has_neg = false;
    for (int r : train_rows) (dataset.y(r) == 1.0 ? has_pos : has_neg) = true;
    if (!has_pos || !has_neg)
      throw DegenerateFold("training part of fold " + std::to_string(f) +
                           " is single-class");
  }

  // fold x grid deviance table; fold fits are independent
  std::vector<std::vector<double>> fold_dev(static_cast<std::size_t>(k),
                                            std::vector<double>(g, 0.0));
  std::vector<std::string> fold_error(static_cast<std::size_t>(k));
#ifdef STRATLASSO_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(threads_for(1u << 20))
#endif
  for (int f = 0; f < k; ++f) {
    try {
      const auto train_rows = folds.rows_not_in_fold(f);
      const auto valid_rows = folds.rows_in_fold(f);
      Eigen::VectorXd y_valid(static_cast<Eigen::Index>(valid_rows.size()));
      for (std::size_t i = 0; i < valid_rows.size(); ++i)
        y_valid(static_cast<Eigen::Index>(i)) = dataset.y(valid_rows[i]);
      const auto prob_per_point = fit_fn(train_rows, valid_rows);
      if (prob_per_point.size() != g)
        throw InvalidConfig("fit function returned wrong grid length");
      for (std::size_t t = 0; t < g; ++t)
        fold_dev[static_cast<std::size_t>(f)][t] =
            binomial_deviance(y_valid, prob_per_point[t]);
    } catch (const std::exception& e) {
      fold_error[static_cast<std::size_t>(f)] = e.what();
    }
  }
  for (int f = 0; f < k; ++f)
    if (!fold_error[static_cast<std::size_t>(f)].empty())
      throw DegenerateFold("fold " + std::to_string(f) + ": " +
                           fold_error[static_cast<std::size_t>(f)]);

  CvCurve curve;
  curve.grid = grid;
  curve.n_folds = k;
  curve.mean_deviance.resize(g);
  curve.se.resize(g);
  for (std::size_t t = 0; t < g; ++t) {
    double mean = 0.0;
    for (int f = 0; f < k; ++f) mean += fold_dev[static_cast<std::size_t>(f)][t];
    mean /= k;
    double var = 0.0;
    for (int f = 0; f < k; ++f) {
      const double d = fold_dev[static_cast<std::size_t>(f)][t] - mean;
      var += d * d;
    }
    var /= (k > 1 ? k - 1 : 1);
    curve.mean_deviance[t] = mean;
    curve.se[t] = std::sqrt(var / k);
  }
  return curve;
}

int select_min(const CvCurve& curve) {
  if (curve.mean_deviance.empty()) throw InvalidConfig("empty CV curve");
  int best = 0;
  for (std::size_t t = 1; t < curve.mean_deviance.size(); ++t)
    if (curve.mean_deviance[t] < curve.mean_deviance[static_cast<std::size_t>(best)])
      best = static_cast<int>(t);
  return best;
}

void write_cv_csv(const CvCurve& curve, const std::string& path,
                  const std::string& param_name) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open for writing: " + path);
  out << param_name << ",mean_deviance,se,n_folds\n";
  for (std::size_t t = 0; t < curve.grid.size(); ++t) {
    out << format_double(curve.grid[t]) << ',' << format_double(curve.mean_deviance[t])
        << ',' << format_double(curve.se[t]) << ',' << curve.n_folds << '\n';
  }
}

}  // namespace stratlasso::cv
