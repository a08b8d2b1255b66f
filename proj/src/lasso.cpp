#include "stratlasso/lasso.hpp"

#include <algorithm>
#include <limits>

#include "stratlasso/errors.hpp"
#include "stratlasso/kernels.hpp"

namespace stratlasso::lasso {

namespace {

constexpr double kWeightFloor = 1e-5;
constexpr double kProbClamp = 1e-9;  // IRLS-side clamp against separation
constexpr double kInf = std::numeric_limits<double>::infinity();

void validate_inputs(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                     const PenaltySpec& spec) {
  if (y.size() != X.rows()) throw DimensionMismatch("y length vs X rows");
  for (Eigen::Index i = 0; i < y.size(); ++i)
    if (y(i) != 0.0 && y(i) != 1.0)
      throw NonBinaryOutcome("row " + std::to_string(i));
  if (spec.penalty_factors.size() != 0 && spec.penalty_factors.size() != X.cols())
    throw DimensionMismatch("penalty factor length vs X columns");
  if (spec.offset.size() != 0 && spec.offset.size() != X.rows())
    throw DimensionMismatch("offset length vs X rows");
  for (Eigen::Index j = 0; j < spec.penalty_factors.size(); ++j) {
    const double pf = spec.penalty_factors(j);
    if (std::isnan(pf) || pf < 0.0)
      throw InvalidConfig("penalty factors must be >= 0 (inf allowed)");
  }
  for (std::size_t t = 1; t < spec.lambda_path.size(); ++t)
    if (!(spec.lambda_path[t] < spec.lambda_path[t - 1]))
      throw InvalidConfig("lambda path must be strictly descending");
}

struct Workspace {
  Eigen::VectorXd beta;
  double mu = 0.0;
  Eigen::VectorXd eta;    // mu + X beta + offset, kept exact per outer iter
  Eigen::VectorXd probs;  // sigmoid(eta), unclamped beyond the eta guard
  Eigen::VectorXd w;      // IRLS weights, floored
  Eigen::VectorXd s;      // working residual (y - p)/w, updated by CD
  Eigen::VectorXd grad;   // full gradient (1/n) X^T (p - y)
};

void refresh_eta(const Eigen::MatrixXd& X, const Eigen::VectorXd* offset,
                 Workspace& ws) {
  const Eigen::Index n = X.rows();
  ws.eta.setConstant(n, ws.mu);
  for (Eigen::Index j = 0; j < X.cols(); ++j)
    if (ws.beta(j) != 0.0) ws.eta += X.col(j) * ws.beta(j);
  if (offset != nullptr) ws.eta += *offset;
}

double penalty_value(const Eigen::VectorXd& beta, const Eigen::VectorXd& pf) {
  double acc = 0.0;
  for (Eigen::Index j = 0; j < beta.size(); ++j)
    if (beta(j) != 0.0 && std::isfinite(pf(j))) acc += pf(j) * std::abs(beta(j));
  return acc;
}

void full_gradient(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                   Workspace& ws) {
  const double n = static_cast<double>(X.rows());
  Eigen::VectorXd resid = ws.probs - y;
  kernels::column_dots_serial(X, resid, ws.grad);
  ws.grad /= n;
}

struct KktState {
  bool pass_screen = false;
  double intercept_grad = 0.0;
};

// Stationarity over one index set. Unpenalized coordinates share the
// intercept's absolute tolerance; penalized ones scale with lambda_max * pf.
KktState kkt_on_set(const Workspace& ws, const Eigen::VectorXd& y,
                    const Eigen::VectorXd& pf, const std::vector<int>& set,
                    double lambda, double lmax, double tol) {
  KktState st;
  const double n = static_cast<double>(y.size());
  st.intercept_grad = std::abs((ws.probs - y).sum() / n);
  if (st.intercept_grad > tol) return st;
  for (int j : set) {
    if (!std::isfinite(pf(j))) continue;
    const double g = ws.grad(j);
    if (pf(j) == 0.0 || ws.beta(j) != 0.0) {
      const double thr = pf(j) == 0.0 ? tol : tol * lmax * pf(j);
      const double resid = pf(j) == 0.0
                               ? std::abs(g)
                               : std::abs(g + lambda * pf(j) * (ws.beta(j) > 0 ? 1.0 : -1.0));
      if (resid > thr) return st;
    } else {
      if (std::abs(g) > lambda * pf(j) * (1.0 + tol)) return st;
    }
  }
  st.pass_screen = true;
  return st;
}

double intercept_newton(const Eigen::VectorXd& y, const Eigen::VectorXd* offset) {
  const double n = static_cast<double>(y.size());
  const double ybar = y.sum() / n;
  const double pc = std::min(1.0 - kProbClamp, std::max(kProbClamp, ybar));
  if (offset == nullptr) return std::log(pc / (1.0 - pc));

  double mu = std::log(pc / (1.0 - pc));
  Eigen::VectorXd p(y.size());
  double prev_abs_g = kInf;
  for (int it = 0; it < 200; ++it) {
    for (Eigen::Index i = 0; i < y.size(); ++i)
      p(i) = kernels::sigmoid(mu + (*offset)(i));
    const double g = (p - y).sum() / n;
    if (std::abs(g) <= 1e-13) break;
    double h = (p.array() * (1.0 - p.array())).sum() / n;
    h = std::max(h, 1e-10);
    double step = g / h;
    // damp if the score failed to shrink
    if (std::abs(g) > prev_abs_g) step *= 0.5;
    prev_abs_g = std::abs(g);
    mu -= step;
  }
  return mu;
}

}  // namespace

double intercept_only_fit(const Eigen::VectorXd& y, const Eigen::VectorXd* offset) {
  return intercept_newton(y, offset);
}

double lambda_max(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                  const Eigen::VectorXd& penalty_factors,
                  const Eigen::VectorXd* offset) {
  Eigen::VectorXd pf = penalty_factors.size() == 0
                           ? Eigen::VectorXd::Ones(X.cols())
                           : penalty_factors;
  bool any = false;
  for (Eigen::Index j = 0; j < pf.size(); ++j)
    if (pf(j) > 0.0 && std::isfinite(pf(j))) any = true;
  if (!any) throw NoPenalizedFeatures();

  const double mu0 = intercept_newton(y, offset);
  const double n = static_cast<double>(X.rows());
  Eigen::VectorXd p0(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i)
    p0(i) = kernels::sigmoid(mu0 + (offset ? (*offset)(i) : 0.0));
  Eigen::VectorXd resid = y - p0;

  double lmax = 0.0;
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    if (!(pf(j) > 0.0) || !std::isfinite(pf(j))) continue;
    lmax = std::max(lmax, std::abs(X.col(j).dot(resid)) / (n * pf(j)));
  }
  return lmax;
}

std::vector<double> default_lambda_path(double lmax, int n_lambda, double eps_ratio) {
  if (n_lambda < 2) throw InvalidConfig("lambda path needs >= 2 points");
  if (!(eps_ratio > 0.0 && eps_ratio < 1.0))
    throw InvalidConfig("eps ratio must be in (0, 1)");
  std::vector<double> path(static_cast<std::size_t>(n_lambda));
  const double log_lmax = std::log(lmax);
  const double log_step = std::log(eps_ratio) / (n_lambda - 1);
  path[0] = lmax;
  for (int t = 1; t < n_lambda; ++t)
    path[static_cast<std::size_t>(t)] = std::exp(log_lmax + log_step * t);
  return path;
}

LassoPath fit_logistic_lasso(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                             const PenaltySpec& spec, double tol, int max_iter) {
  validate_inputs(X, y, spec);
  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  const double dn = static_cast<double>(n);
  const Eigen::VectorXd* offset = spec.offset.size() ? &spec.offset : nullptr;

  Eigen::VectorXd pf =
      spec.penalty_factors.size() == 0 ? Eigen::VectorXd::Ones(p) : spec.penalty_factors;

  bool any_penalized = false;
  for (Eigen::Index j = 0; j < p; ++j)
    if (pf(j) > 0.0 && std::isfinite(pf(j))) any_penalized = true;

  double lmax = 0.0;
  std::vector<double> path = spec.lambda_path;
  if (any_penalized) {
    lmax = lambda_max(X, y, pf, offset);
    if (path.empty()) {
      double eps = spec.eps_ratio;
      if (eps <= 0.0) eps = (n < p) ? 1e-2 : 1e-4;
      path = default_lambda_path(std::max(lmax, 1e-300), spec.n_lambda, eps);
    }
  } else if (path.empty()) {
    path = {0.0};  // fully unpenalized: lambda is irrelevant
  }
  // tolerance scale for active-coordinate stationarity
  const double lmax_scale = lmax > 0.0 ? lmax : 1.0;

  Workspace ws;
  ws.beta = Eigen::VectorXd::Zero(p);
  ws.mu = intercept_newton(y, offset);
  refresh_eta(X, offset, ws);
  kernels::sigmoid_probs_serial(ws.eta, ws.probs);
  full_gradient(X, y, ws);

  std::vector<int> finite_pf;
  for (Eigen::Index j = 0; j < p; ++j)
    if (std::isfinite(pf(j))) finite_pf.push_back(static_cast<int>(j));

  LassoPath out;
  out.lambda_max = lmax;
  out.penalty_factors = pf;
  out.entries.reserve(path.size());

  const double inner_thr =
      std::max(1e-26, 1e-6 * tol * tol * lmax_scale * lmax_scale);

  double lambda_prev = lmax > 0.0 ? lmax : path.front();
  for (std::size_t t = 0; t < path.size(); ++t) {
    const double lambda = path[t];

    // Sequential strong rule seeded with the current gradient; verified by
    // the full KKT sweep below, so a miss only costs another pass.
    std::vector<char> in_screen(static_cast<std::size_t>(p), 0);
    std::vector<int> screen;
    auto add_to_screen = [&](int j) {
      if (!in_screen[static_cast<std::size_t>(j)]) {
        in_screen[static_cast<std::size_t>(j)] = 1;
        screen.push_back(j);
      }
    };
    for (int j : finite_pf) {
      if (pf(j) == 0.0 || ws.beta(j) != 0.0 ||
          std::abs(ws.grad(j)) >= pf(j) * (2.0 * lambda - lambda_prev))
        add_to_screen(j);
    }

    double objective = kernels::logistic_loss_serial(y, ws.eta) +
                       lambda * penalty_value(ws.beta, pf);
    int stall_count = 0;
    bool converged = false;

    for (int outer = 0; outer < max_iter && !converged; ++outer) {
      // Stationarity first: a warm start that already satisfies KKT (the
      // all-zero state at lambda >= lambda_max in particular) must be
      // returned untouched, keeping inactive coefficients exactly zero.
      if (kkt_on_set(ws, y, pf, screen, lambda, lmax_scale, tol).pass_screen) {
        bool violations = false;
        for (int j : finite_pf) {
          if (in_screen[static_cast<std::size_t>(j)]) continue;
          if (std::abs(ws.grad(j)) > lambda * pf(j)) {
            add_to_screen(j);
            violations = true;
          }
        }
        if (!violations) {
          converged = true;
          break;
        }
      }

      // IRLS quadratic pieces at the current eta
      ws.w.resize(n);
      ws.s.resize(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        const double pc =
            std::min(1.0 - kProbClamp, std::max(kProbClamp, ws.probs(i)));
        const double wi = std::max(pc * (1.0 - pc), kWeightFloor);
        ws.w(i) = wi;
        ws.s(i) = (y(i) - pc) / wi;
      }
      const double wsum = ws.w.sum();

      Eigen::VectorXd col_curv(screen.size());
      for (std::size_t k = 0; k < screen.size(); ++k)
        col_curv(static_cast<Eigen::Index>(k)) =
            (ws.w.array() * X.col(screen[k]).array().square()).sum() / dn;

      const Eigen::VectorXd beta_before = ws.beta;
      const double mu_before = ws.mu;

      // cyclic coordinate descent on the weighted quadratic
      for (int sweep = 0; sweep < 2000; ++sweep) {
        double max_delta = 0.0;
        for (std::size_t k = 0; k < screen.size(); ++k) {
          const int j = screen[k];
          const double a = col_curv(static_cast<Eigen::Index>(k));
          if (a <= 0.0) continue;
          const double u =
              (ws.w.array() * X.col(j).array() * ws.s.array()).sum() / dn +
              a * ws.beta(j);
          const double bj = soft_threshold(u, lambda * pf(j)) / a;
          const double delta = bj - ws.beta(j);
          if (delta != 0.0) {
            ws.s -= X.col(j) * delta;
            ws.beta(j) = bj;
            max_delta = std::max(max_delta, a * delta * delta);
          }
        }
        const double dmu = (ws.w.array() * ws.s.array()).sum() / wsum;
        if (dmu != 0.0) {
          ws.mu += dmu;
          ws.s.array() -= dmu;
          max_delta = std::max(max_delta, (wsum / dn) * dmu * dmu);
        }
        if (max_delta < inner_thr) break;
      }

      refresh_eta(X, offset, ws);
      kernels::sigmoid_probs_serial(ws.eta, ws.probs);
      double new_objective = kernels::logistic_loss_serial(y, ws.eta) +
                             lambda * penalty_value(ws.beta, pf);
      if (!std::isfinite(new_objective))
        throw Diverged("objective not finite at lambda " + std::to_string(lambda));

      if (new_objective > objective + 1e-14) {
        ++stall_count;
        if (stall_count >= 5) {
          // halve the proximal Newton step until the objective stops rising
          double step = 0.5;
          for (int h = 0; h < 40 && new_objective > objective + 1e-14; ++h) {
            ws.beta = beta_before + step * (ws.beta - beta_before);
            ws.mu = mu_before + step * (ws.mu - mu_before);
            refresh_eta(X, offset, ws);
            kernels::sigmoid_probs_serial(ws.eta, ws.probs);
            new_objective = kernels::logistic_loss_serial(y, ws.eta) +
                            lambda * penalty_value(ws.beta, pf);
            step *= 0.5;
          }
          stall_count = 0;
        }
      } else {
        stall_count = 0;
      }
      objective = new_objective;
      full_gradient(X, y, ws);
    }

    if (!converged)
      throw Diverged("no KKT convergence within " + std::to_string(max_iter) +
                     " iterations at lambda " + std::to_string(lambda));

    PathEntry entry;
    entry.lambda = lambda;
    entry.intercept = ws.mu;
    entry.beta = ws.beta;
    entry.deviance = 2.0 * kernels::logistic_loss_serial(y, ws.eta);
    entry.nonzero_count = static_cast<int>((ws.beta.array() != 0.0).count());
    if (!out.entries.empty() && entry.nonzero_count < out.entries.back().nonzero_count)
      out.warnings.push_back("nonzero count dropped from " +
                             std::to_string(out.entries.back().nonzero_count) +
                             " to " + std::to_string(entry.nonzero_count) +
                             " at lambda index " + std::to_string(t));
    out.entries.push_back(std::move(entry));
    lambda_prev = lambda;
  }

  return out;
}

Eigen::VectorXd predict_proba(const PathEntry& entry, const Eigen::MatrixXd& X,
                              const Eigen::VectorXd* offset) {
  if (entry.beta.size() != X.cols())
    throw DimensionMismatch("coefficient length vs X columns");
  if (offset != nullptr && offset->size() != X.rows())
    throw DimensionMismatch("offset length vs X rows");
  Eigen::VectorXd eta, probs;
  kernels::linear_predictor(X, entry.beta, entry.intercept, offset, eta);
  kernels::sigmoid_probs(eta, probs);
  return probs;
}

KktReport check_kkt(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                    const Eigen::VectorXd& penalty_factors,
                    const Eigen::VectorXd* offset, const PathEntry& entry,
                    double lmax, double tol) {
  const double n = static_cast<double>(X.rows());
  Eigen::VectorXd eta, probs;
  kernels::linear_predictor_serial(X, entry.beta, entry.intercept, offset, eta);
  kernels::sigmoid_probs_serial(eta, probs);
  Eigen::VectorXd resid = probs - y;
  Eigen::VectorXd grad;
  kernels::column_dots_serial(X, resid, grad);
  grad /= n;

  KktReport rep;
  rep.intercept_grad = std::abs(resid.sum() / n);
  bool ok = rep.intercept_grad <= tol;
  const double scale = lmax > 0.0 ? lmax : 1.0;
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    const double pf = penalty_factors(j);
    if (!std::isfinite(pf)) continue;
    if (pf == 0.0 || entry.beta(j) != 0.0) {
      const double resid_j =
          pf == 0.0 ? std::abs(grad(j))
                    : std::abs(grad(j) +
                               entry.lambda * pf * (entry.beta(j) > 0 ? 1.0 : -1.0));
      const double thr = pf == 0.0 ? tol : tol * scale * pf;
      rep.worst_active = std::max(rep.worst_active, thr > 0 ? resid_j / thr : kInf);
      if (resid_j > thr) ok = false;
    } else {
      const double bound = entry.lambda * pf;
      rep.worst_inactive =
          std::max(rep.worst_inactive, bound > 0 ? std::abs(grad(j)) / bound : kInf);
      if (std::abs(grad(j)) > bound * (1.0 + tol)) ok = false;
    }
  }
  rep.pass = ok;
  return rep;
}

}  // namespace stratlasso::lasso
