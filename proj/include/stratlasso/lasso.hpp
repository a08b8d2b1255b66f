#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

namespace stratlasso::lasso {

/// sign(z) * max(|z| - t, 0)
inline double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

/// Penalty configuration for one path fit. Penalty factors may be 0
/// (unpenalized) or +inf (excluded); the offset is a fixed per-row additive
/// term in log-odds units with implicit coefficient 1.
struct PenaltySpec {
  std::vector<double> lambda_path;  // strictly descending; empty = auto grid
  Eigen::VectorXd penalty_factors;  // size p, >= 0, inf allowed; empty = ones
  Eigen::VectorXd offset;           // size n; empty = none
  int n_lambda = 50;                // auto-grid length
  double eps_ratio = 0.0;           // auto-grid floor ratio; 0 = pick by n vs p
};

struct PathEntry {
  double lambda = 0.0;
  double intercept = 0.0;
  Eigen::VectorXd beta;
  double deviance = 0.0;  // 2 * mean binomial log-loss on the training rows
  int nonzero_count = 0;
};

struct LassoPath {
  std::vector<PathEntry> entries;
  double lambda_max = 0.0;
  Eigen::VectorXd penalty_factors;  // as fitted
  std::vector<std::string> warnings;
};

/// Intercept of the no-feature model: solves mean(sigmoid(mu + offset)) =
/// mean(y). Closed form logit(mean(y)) when there is no offset.
double intercept_only_fit(const Eigen::VectorXd& y, const Eigen::VectorXd* offset);

/// Smallest lambda at which every penalized coefficient is zero:
/// max over finite pf_j > 0 of |x_j . (y - p0)| / (n * pf_j), with p0 from
/// the intercept-plus-offset-only fit. Throws NoPenalizedFeatures.
double lambda_max(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                  const Eigen::VectorXd& penalty_factors,
                  const Eigen::VectorXd* offset);

/// Log-linear grid from lmax down to eps_ratio * lmax; front pinned to lmax.
std::vector<double> default_lambda_path(double lmax, int n_lambda, double eps_ratio);

/// L1-penalized logistic regression over a lambda path. Proximal Newton
/// (IRLS) outer loop, cyclic coordinate descent inner loop, warm starts and
/// KKT-verified strong-rule screening. The loss is mean (1/n) log-loss, so
/// lambda is comparable across dataset sizes. Every returned entry satisfies
/// the stationarity conditions checked by check_kkt at `tol`.
LassoPath fit_logistic_lasso(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                             const PenaltySpec& spec, double tol = 1e-7,
                             int max_iter = 1000);

/// sigmoid(intercept + X beta + offset), saturating without NaN.
Eigen::VectorXd predict_proba(const PathEntry& entry, const Eigen::MatrixXd& X,
                              const Eigen::VectorXd* offset = nullptr);

struct KktReport {
  bool pass = false;
  double worst_active = 0.0;      // |g_j + lambda pf_j sign(beta_j)| excess ratio
  double worst_inactive = 0.0;    // |g_j| / (lambda pf_j) max over zero coords
  double intercept_grad = 0.0;
};

/// Stationarity certificate for one path entry. Active coordinates must have
/// |g_j + lambda pf_j sign(beta_j)| <= tol * lambda_max * pf_j (plain tol for
/// unpenalized), inactive ones |g_j| <= lambda pf_j (1 + tol), and the
/// intercept gradient must not exceed tol.
KktReport check_kkt(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                    const Eigen::VectorXd& penalty_factors,
                    const Eigen::VectorXd* offset, const PathEntry& entry,
                    double lmax, double tol);

}  // namespace stratlasso::lasso
