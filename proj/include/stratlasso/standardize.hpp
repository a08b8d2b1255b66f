#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "stratlasso/types.hpp"

namespace stratlasso {

/// Centers and scales the selected columns to mean 0, population sd 1.
/// Throws ZeroVarianceColumn (named by `names` when provided) for columns
/// that are numerically constant.
std::pair<Eigen::MatrixXd, StandardizationRecord> standardize(
    const Eigen::MatrixXd& X, const std::vector<int>& columns,
    const std::vector<std::string>& names = {});

/// Applies a previously computed record to new data (test-time transform).
void apply_standardization(Eigen::MatrixXd& X, const StandardizationRecord& rec);

/// Undoes the transform on a data matrix.
void invert_standardization(Eigen::MatrixXd& X, const StandardizationRecord& rec);

/// Maps (intercept, beta) fitted on standardized columns back to the raw
/// scale: beta_raw_j = beta_j / scale_j, intercept absorbs the means.
std::pair<double, Eigen::VectorXd> destandardize_coefficients(
    double intercept, const Eigen::VectorXd& beta, const StandardizationRecord& rec);

}  // namespace stratlasso
