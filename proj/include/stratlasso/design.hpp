#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "stratlasso/types.hpp"

namespace stratlasso {

/// Numeric design for plain lasso: continuous columns as-is, categoricals
/// reference-coded (first level dropped), every column standardized. The
/// record replays the transform on new rows.
struct LassoDesign {
  std::vector<std::string> col_names;
  std::vector<int> col_feature;  // source feature index per column
  StandardizationRecord record;  // over all columns
};

/// Fits the expansion on `d` (training data). Zero-variance columns throw.
std::pair<Eigen::MatrixXd, LassoDesign> build_lasso_design(const Dataset& d);

/// Applies a fitted expansion to new rows.
Eigen::MatrixXd apply_lasso_design(const Dataset& d, const LassoDesign& design);

}  // namespace stratlasso
