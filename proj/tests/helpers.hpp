#pragma once

// Shared fixtures and independent oracles for the test suites. Everything
// here deliberately avoids the library's solver internals: the Newton oracle,
// the stationarity checker and the pairwise AUC are straight-line
// implementations of the definitions.

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "stratlasso/rng.hpp"
#include "stratlasso/types.hpp"

namespace testhelpers {

struct Instance {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
};

/// Standard-normal features, logits from a sparse coefficient draw; columns
/// centered and scaled so lambda grids are comparable.
inline Instance random_instance(stratlasso::Rng& rng, int n, int p,
                                double signal = 1.0) {
  Instance inst;
  inst.X.resize(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) inst.X(i, j) = rng.normal();
  for (int j = 0; j < p; ++j) {
    const double mean = inst.X.col(j).mean();
    const double sd = std::sqrt((inst.X.col(j).array() - mean).square().mean());
    inst.X.col(j) = (inst.X.col(j).array() - mean) / (sd > 0 ? sd : 1.0);
  }
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  const int k = std::max(1, p / 3);
  for (int j = 0; j < k; ++j) beta(j) = signal * (rng.uniform() - 0.5) * 2.0;
  inst.y.resize(n);
  for (int i = 0; i < n; ++i) {
    const double logit = inst.X.row(i).dot(beta) + 0.3 * rng.normal();
    const double pr = 1.0 / (1.0 + std::exp(-logit));
    inst.y(i) = rng.bernoulli(pr) ? 1.0 : 0.0;
  }
  return inst;
}

inline bool has_both_classes(const Eigen::VectorXd& y) {
  bool pos = false, neg = false;
  for (Eigen::Index i = 0; i < y.size(); ++i) (y(i) == 1.0 ? pos : neg) = true;
  return pos && neg;
}

/// Unpenalized logistic regression by damped Newton with an explicit
/// intercept column. Returns (intercept, beta); fails (returns false) on
/// separation or non-convergence.
inline bool newton_logistic(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                            double& intercept, Eigen::VectorXd& beta,
                            double tol = 1e-12, int max_iter = 200) {
  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  Eigen::MatrixXd Xa(n, p + 1);
  Xa.col(0).setOnes();
  Xa.rightCols(p) = X;

  Eigen::VectorXd coef = Eigen::VectorXd::Zero(p + 1);
  double prev_loss = std::numeric_limits<double>::infinity();
  for (int it = 0; it < max_iter; ++it) {
    Eigen::VectorXd eta = Xa * coef;
    Eigen::VectorXd pr(n), w(n);
    double loss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      pr(i) = 1.0 / (1.0 + std::exp(-eta(i)));
      w(i) = pr(i) * (1.0 - pr(i));
      loss += eta(i) > 0 ? eta(i) + std::log1p(std::exp(-eta(i)))
                         : std::log1p(std::exp(eta(i)));
      loss -= y(i) * eta(i);
    }
    Eigen::VectorXd grad = Xa.transpose() * (pr - y);
    if (grad.lpNorm<Eigen::Infinity>() / n < tol) {
      intercept = coef(0);
      beta = coef.tail(p);
      return coef.lpNorm<Eigen::Infinity>() < 50.0;  // separation guard
    }
    Eigen::MatrixXd H = Xa.transpose() * w.asDiagonal() * Xa;
    H.diagonal().array() += 1e-12;
    Eigen::VectorXd step = H.ldlt().solve(grad);
    double scale = 1.0;
    for (int h = 0; h < 60; ++h) {
      Eigen::VectorXd cand = coef - scale * step;
      Eigen::VectorXd ec = Xa * cand;
      double cl = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        cl += ec(i) > 0 ? ec(i) + std::log1p(std::exp(-ec(i)))
                        : std::log1p(std::exp(ec(i)));
        cl -= y(i) * ec(i);
      }
      if (cl <= loss + 1e-12) {
        coef = cand;
        break;
      }
      scale *= 0.5;
    }
    if (std::abs(prev_loss - loss) < 1e-15 * std::max(1.0, std::abs(loss)) &&
        it > 5) {
      intercept = coef(0);
      beta = coef.tail(p);
      return coef.lpNorm<Eigen::Infinity>() < 50.0;
    }
    prev_loss = loss;
  }
  return false;
}

/// Direct stationarity verification against the definitions, independent of
/// the solver's internal bookkeeping.
inline bool verify_lasso_kkt(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                             const Eigen::VectorXd& pf,
                             const Eigen::VectorXd* offset, double intercept,
                             const Eigen::VectorXd& beta, double lambda,
                             double lmax, double tol) {
  const Eigen::Index n = X.rows();
  Eigen::VectorXd eta = X * beta;
  eta.array() += intercept;
  if (offset != nullptr) eta += *offset;
  Eigen::VectorXd pr(n);
  for (Eigen::Index i = 0; i < n; ++i) pr(i) = 1.0 / (1.0 + std::exp(-eta(i)));
  const Eigen::VectorXd grad = X.transpose() * (pr - y) / static_cast<double>(n);
  if (std::abs((pr - y).sum() / static_cast<double>(n)) > tol) return false;
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    if (std::isinf(pf(j))) {
      if (beta(j) != 0.0) return false;
      continue;
    }
    if (pf(j) == 0.0) {
      if (std::abs(grad(j)) > tol) return false;
    } else if (beta(j) != 0.0) {
      if (std::abs(grad(j) + lambda * pf(j) * (beta(j) > 0 ? 1.0 : -1.0)) >
          tol * lmax * pf(j))
        return false;
    } else {
      if (std::abs(grad(j)) > lambda * pf(j) * (1.0 + tol)) return false;
    }
  }
  return true;
}

/// Pair-counting AUC: mean over (positive, negative) pairs of
/// [score_pos > score_neg] + 0.5 [equal]. Quadratic and unapologetic.
inline double brute_force_auc(const Eigen::VectorXd& scores,
                              const Eigen::VectorXd& labels) {
  double wins = 0.0, pairs = 0.0;
  for (Eigen::Index i = 0; i < scores.size(); ++i) {
    if (labels(i) != 1.0) continue;
    for (Eigen::Index j = 0; j < scores.size(); ++j) {
      if (labels(j) != 0.0) continue;
      pairs += 1.0;
      if (scores(i) > scores(j)) {
        wins += 1.0;
      } else if (scores(i) == scores(j)) {
        wins += 0.5;
      }
    }
  }
  return wins / pairs;
}

}  // namespace testhelpers
