#include "stratlasso/pretrained.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stratlasso/errors.hpp"
#include "stratlasso/kernels.hpp"
#include "stratlasso/threading.hpp"

namespace stratlasso::pretrain {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::MatrixXd rows_of(const Eigen::MatrixXd& X, const std::vector<int>& rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), X.cols());
  for (std::size_t i = 0; i < rows.size(); ++i)
    out.row(static_cast<Eigen::Index>(i)) = X.row(rows[i]);
  return out;
}

Eigen::VectorXd entries_of(const Eigen::VectorXd& v, const std::vector<int>& rows) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    out(static_cast<Eigen::Index>(i)) = v(rows[i]);
  return out;
}

bool any_penalized(const Eigen::VectorXd& pf) {
  for (Eigen::Index j = 0; j < pf.size(); ++j)
    if (pf(j) > 0.0 && std::isfinite(pf(j))) return true;
  return false;
}

// CV + final fit for one lasso problem with fixed pf and offset. A zero
// offset is passed to the solver as "no offset" so the alpha = 1 limit is
// exactly a plain lasso.
struct SingleCvFit {
  lasso::PathEntry entry;
  int lambda_index = -1;
  std::vector<double> grid;
  cv::CvCurve curve;
};

SingleCvFit cv_lasso(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                     const Eigen::VectorXd& pf, const Eigen::VectorXd& offset,
                     const Dataset& data_for_cv, const FoldAssignment& folds,
                     int n_lambda) {
  const bool use_offset = offset.size() != 0 && !offset.isZero(0.0);

  SingleCvFit out;
  if (!any_penalized(pf)) {
    // nothing the penalty can act on: intercept (plus offset) only
    lasso::PathEntry entry;
    entry.lambda = 0.0;
    entry.beta = Eigen::VectorXd::Zero(X.cols());
    entry.intercept =
        lasso::intercept_only_fit(y, use_offset ? &offset : nullptr);
    Eigen::VectorXd eta =
        Eigen::VectorXd::Constant(y.size(), entry.intercept);
    if (use_offset) eta += offset;
    entry.deviance = 2.0 * kernels::logistic_loss_serial(y, eta);
    entry.nonzero_count = 0;
    out.entry = std::move(entry);
    out.lambda_index = 0;
    out.grid = {0.0};
    out.curve.grid = out.grid;
    out.curve.mean_deviance = {out.entry.deviance};
    out.curve.se = {0.0};
    out.curve.n_folds = folds.k;
    return out;
  }

  const double lmax =
      lasso::lambda_max(X, y, pf, use_offset ? &offset : nullptr);
  const double eps = (X.rows() < X.cols()) ? 1e-2 : 1e-4;
  out.grid = lasso::default_lambda_path(std::max(lmax, 1e-300), n_lambda, eps);

  auto fit_fn = [&](const std::vector<int>& train_rows,
                    const std::vector<int>& valid_rows) {
    const Eigen::MatrixXd Xt = rows_of(X, train_rows);
    const Eigen::MatrixXd Xv = rows_of(X, valid_rows);
    lasso::PenaltySpec spec;
    spec.lambda_path = out.grid;
    spec.penalty_factors = pf;
    if (use_offset) spec.offset = entries_of(offset, train_rows);
    const auto path = lasso::fit_logistic_lasso(Xt, entries_of(y, train_rows), spec);
    Eigen::VectorXd off_v;
    if (use_offset) off_v = entries_of(offset, valid_rows);
    std::vector<Eigen::VectorXd> probs;
    probs.reserve(path.entries.size());
    for (const auto& e : path.entries)
      probs.push_back(lasso::predict_proba(e, Xv, use_offset ? &off_v : nullptr));
    return probs;
  };
  out.curve = cv::cv_deviance(fit_fn, data_for_cv, folds, out.grid);
  out.lambda_index = cv::select_min(out.curve);

  lasso::PenaltySpec spec;
  spec.lambda_path = out.grid;
  spec.penalty_factors = pf;
  if (use_offset) spec.offset = offset;
  auto path = lasso::fit_logistic_lasso(X, y, spec);
  out.entry = path.entries.at(static_cast<std::size_t>(out.lambda_index));
  return out;
}

}  // namespace

OverallFit fit_overall(const Dataset& train, const FoldAssignment& folds,
                       int n_lambda) {
  OverallFit out;
  auto [X, design] = build_lasso_design(train);
  out.design = std::move(design);

  const Eigen::VectorXd pf = Eigen::VectorXd::Ones(X.cols());
  const Eigen::VectorXd no_offset;
  auto fit = cv_lasso(X, train.y, pf, no_offset, train, folds, n_lambda);

  out.mu0 = fit.entry.intercept;
  out.beta0 = fit.entry.beta;
  out.lambda_index = fit.lambda_index;
  out.lambda_grid = std::move(fit.grid);
  out.curve = std::move(fit.curve);
  for (Eigen::Index j = 0; j < out.beta0.size(); ++j)
    if (out.beta0(j) != 0.0) out.support.push_back(static_cast<int>(j));
  return out;
}

Eigen::VectorXd compute_offset(const Eigen::MatrixXd& Xk, double mu0,
                               const Eigen::VectorXd& beta0, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw InvalidConfig("alpha must lie in [0, 1]");
  if (beta0.size() != Xk.cols())
    throw DimensionMismatch("beta0 length vs X columns");
  if (alpha == 1.0) return Eigen::VectorXd::Zero(Xk.rows());
  return (1.0 - alpha) * ((Xk * beta0).array() + mu0).matrix();
}

Eigen::VectorXd compute_penalty_factors(const std::vector<int>& support, int p,
                                        double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw InvalidConfig("alpha must lie in [0, 1]");
  std::vector<char> in_s(static_cast<std::size_t>(p), 0);
  for (int j : support) {
    if (j < 0 || j >= p) throw InvalidConfig("support index out of range");
    in_s[static_cast<std::size_t>(j)] = 1;
  }
  Eigen::VectorXd pf(p);
  const double out_factor = alpha > 0.0 ? (1.0 - alpha) / alpha : kInf;
  for (int j = 0; j < p; ++j)
    pf(j) = in_s[static_cast<std::size_t>(j)] ? (1.0 - alpha) : out_factor;
  return pf;
}

Eigen::VectorXd normalize_penalty_factors(Eigen::VectorXd pf) {
  double min_finite = kInf;
  bool any_zero = false;
  for (Eigen::Index j = 0; j < pf.size(); ++j) {
    if (pf(j) == 0.0) any_zero = true;
    if (pf(j) > 0.0 && std::isfinite(pf(j))) min_finite = std::min(min_finite, pf(j));
  }
  if (!std::isfinite(min_finite)) {
    // alpha = 1 collapses every factor to zero: plain uniform penalty
    if (any_zero) return Eigen::VectorXd::Ones(pf.size());
    return pf;  // everything excluded (alpha = 0 with empty support)
  }
  for (Eigen::Index j = 0; j < pf.size(); ++j) pf(j) /= min_finite;
  return pf;
}

PretrainedModel fit_group_models(const Dataset& train, const OverallFit& overall,
                                 double alpha, const FoldAssignment& folds,
                                 int n_lambda) {
  PretrainedModel model;
  model.overall = overall;
  model.alpha = alpha;
  model.penalty_factors = normalize_penalty_factors(compute_penalty_factors(
      overall.support, static_cast<int>(overall.beta0.size()), alpha));

  const Eigen::MatrixXd X = apply_lasso_design(train, overall.design);
  const auto by_group = train.rows_by_group();

  struct Task {
    std::string label;
    std::vector<int> rows;
  };
  std::vector<Task> tasks;
  for (const auto& [label, rows] : by_group) tasks.push_back({label, rows});

  for (const auto& task : tasks) {
    bool has_pos = false, has_neg = false;
    for (int r : task.rows) (train.y(r) == 1.0 ? has_pos : has_neg) = true;
    if (!has_pos || !has_neg) throw DegenerateGroup(task.label);
  }

  std::vector<GroupFit> fits(tasks.size());
  std::vector<std::string> errors(tasks.size());
#ifdef STRATLASSO_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(threads_for(1u << 20))
#endif
  for (std::size_t g = 0; g < tasks.size(); ++g) {
    try {
      const auto& rows = tasks[g].rows;
      const Eigen::MatrixXd Xk = rows_of(X, rows);
      const Eigen::VectorXd yk = entries_of(train.y, rows);
      const Eigen::VectorXd off =
          compute_offset(Xk, overall.mu0, overall.beta0, alpha);
      const Dataset dk = train.subset(rows);
      const FoldAssignment fk = folds.restrict_to(rows);
      auto fit = cv_lasso(Xk, yk, model.penalty_factors, off, dk, fk, n_lambda);
      fits[g] = GroupFit{tasks[g].label, std::move(fit.entry), fit.lambda_index,
                         std::move(fit.grid), std::move(fit.curve)};
    } catch (const std::exception& e) {
      errors[g] = e.what();
    }
  }
  for (std::size_t g = 0; g < tasks.size(); ++g) {
    if (!errors[g].empty())
      throw Error("group " + tasks[g].label + ": " + errors[g]);
    model.groups.emplace(tasks[g].label, std::move(fits[g]));
  }
  return model;
}

double select_alpha(const Dataset& train, const OverallFit& overall,
                    const FoldAssignment& folds,
                    const std::vector<double>& alpha_grid, int n_lambda) {
  if (alpha_grid.empty()) throw InvalidConfig("empty alpha grid");
  for (double a : alpha_grid)
    if (!(a >= 0.0 && a <= 1.0)) throw InvalidConfig("alpha grid outside [0, 1]");

  std::vector<double> grid = alpha_grid;
  std::sort(grid.begin(), grid.end());

  double best_alpha = grid.front();
  double best_dev = kInf;
  for (double a : grid) {
    const auto model = fit_group_models(train, overall, a, folds, n_lambda);
    double dev = 0.0;
    double weight = 0.0;
    const auto by_group = train.rows_by_group();
    for (const auto& [label, fit] : model.groups) {
      const double nk = static_cast<double>(by_group.at(label).size());
      dev += nk *
             fit.curve.mean_deviance[static_cast<std::size_t>(fit.lambda_index)];
      weight += nk;
    }
    dev /= weight;
    if (dev <= best_dev) {  // ties go to the larger alpha (ascending scan)
      best_dev = dev;
      best_alpha = a;
    }
  }
  return best_alpha;
}

double select_alpha(const Dataset& train, const FoldAssignment& folds,
                    const std::vector<double>& alpha_grid, int n_lambda) {
  const auto overall = fit_overall(train, folds, n_lambda);
  return select_alpha(train, overall, folds, alpha_grid, n_lambda);
}

Eigen::VectorXd predict(const PretrainedModel& model, const Dataset& rows,
                        bool allow_fallback) {
  const Eigen::MatrixXd X = apply_lasso_design(rows, model.overall.design);
  Eigen::VectorXd out(rows.n_rows());
  for (Eigen::Index i = 0; i < rows.n_rows(); ++i) {
    const auto it = model.groups.find(rows.group[static_cast<std::size_t>(i)]);
    double eta;
    if (it == model.groups.end()) {
      if (!allow_fallback) throw UnknownGroup(rows.group[static_cast<std::size_t>(i)]);
      eta = model.overall.mu0 + X.row(i).dot(model.overall.beta0);
    } else {
      const auto& fit = it->second;
      const double off =
          model.alpha == 1.0
              ? 0.0
              : (1.0 - model.alpha) *
                    (X.row(i).dot(model.overall.beta0) + model.overall.mu0);
      eta = fit.entry.intercept + X.row(i).dot(fit.entry.beta) + off;
    }
    out(i) = kernels::sigmoid(eta);
  }
  return out;
}

}  // namespace stratlasso::pretrain
