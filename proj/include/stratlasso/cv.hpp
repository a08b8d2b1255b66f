#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "stratlasso/types.hpp"

namespace stratlasso::cv {

struct CvCurve {
  std::vector<double> grid;           // hyperparameter values, caller's order
  std::vector<double> mean_deviance;  // mean over folds of fold-mean deviance
  std::vector<double> se;             // standard error across folds
  int n_folds = 0;
};

/// Fits on the training rows and returns predicted probabilities for the
/// validation rows, one vector per grid point (a warm-started path fit
/// serves the whole grid). Row indices refer to the dataset handed to
/// cv_deviance, so the closure can reuse a prebuilt design matrix.
using PathPredictor = std::function<std::vector<Eigen::VectorXd>(
    const std::vector<int>& train_rows, const std::vector<int>& valid_rows)>;

/// Mean binomial deviance -2/n sum [y log p + (1-y) log(1-p)].
double binomial_deviance(const Eigen::VectorXd& y, const Eigen::VectorXd& p);

/// K-fold validation deviance per grid point. Fold fits are independent and
/// may run in parallel; aggregation is fixed-order, so the curve is a pure
/// function of (data, folds, grid).
CvCurve cv_deviance(const PathPredictor& fit_fn, const Dataset& dataset,
                    const FoldAssignment& folds, const std::vector<double>& grid);

/// Index of the smallest mean deviance; ties resolve to the earliest grid
/// point, which on a descending lambda grid is the more regularized model.
int select_min(const CvCurve& curve);

void write_cv_csv(const CvCurve& curve, const std::string& path,
                  const std::string& param_name = "lambda");

}  // namespace stratlasso::cv
