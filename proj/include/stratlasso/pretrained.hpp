#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "stratlasso/cv.hpp"
#include "stratlasso/design.hpp"
#include "stratlasso/lasso.hpp"
#include "stratlasso/types.hpp"

namespace stratlasso::pretrain {

/// Stage one: CV-selected overall lasso on all groups together.
struct OverallFit {
  LassoDesign design;       // shared expansion, fitted on the training rows
  double mu0 = 0.0;
  Eigen::VectorXd beta0;    // selected coefficients, design scale
  std::vector<int> support; // nonzero indices of beta0
  int lambda_index = -1;
  std::vector<double> lambda_grid;
  cv::CvCurve curve;
};

/// Fits the path on the full training data, picks the entry minimizing mean
/// CV deviance over `folds`, and reports its support.
OverallFit fit_overall(const Dataset& train, const FoldAssignment& folds,
                       int n_lambda = 50);

/// (1 - alpha) * (X_k beta0 + mu0), elementwise.
Eigen::VectorXd compute_offset(const Eigen::MatrixXd& Xk, double mu0,
                               const Eigen::VectorXd& beta0, double alpha);

/// Literal transfer penalty factors:
/// pf_j = (1 - alpha) * (1/alpha) outside S, (1 - alpha) inside S.
/// alpha = 0 excludes features outside S (pf = inf); alpha = 1 gives zeros.
Eigen::VectorXd compute_penalty_factors(const std::vector<int>& support, int p,
                                        double alpha);

/// Rescales so the smallest finite positive factor is 1 (a global positive
/// scaling of pf is absorbed by the lambda grid). The all-zero vector from
/// alpha = 1 maps to all-ones, so that limit is an ordinary lasso.
Eigen::VectorXd normalize_penalty_factors(Eigen::VectorXd pf);

struct GroupFit {
  std::string label;
  lasso::PathEntry entry;  // on the shared design scale
  int lambda_index = -1;
  std::vector<double> lambda_grid;
  cv::CvCurve curve;
};

struct PretrainedModel {
  OverallFit overall;
  double alpha = 0.5;
  Eigen::VectorXd penalty_factors;  // normalized, as used by the group fits
  std::map<std::string, GroupFit> groups;
};

/// Stage two: one fine-tuned lasso per group, each with its offset and the
/// shared penalty factors; lambda chosen by CV within that group's rows
/// (global folds restricted to the group).
PretrainedModel fit_group_models(const Dataset& train, const OverallFit& overall,
                                 double alpha, const FoldAssignment& folds,
                                 int n_lambda = 50);

/// Mean CV deviance over groups (row-weighted) per alpha; ties resolve to
/// the larger alpha (less transfer).
double select_alpha(const Dataset& train, const FoldAssignment& folds,
                    const std::vector<double>& alpha_grid, int n_lambda = 50);
double select_alpha(const Dataset& train, const OverallFit& overall,
                    const FoldAssignment& folds,
                    const std::vector<double>& alpha_grid, int n_lambda = 50);

/// Routes each row to its group's fine-tuned fit (offset included).
/// Unknown labels throw unless allow_fallback, which scores them with the
/// overall model instead.
Eigen::VectorXd predict(const PretrainedModel& model, const Dataset& rows,
                        bool allow_fallback = false);

}  // namespace stratlasso::pretrain
