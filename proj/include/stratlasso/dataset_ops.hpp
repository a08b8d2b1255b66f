#pragma once

#include <cstdint>
#include <utility>

#include "stratlasso/types.hpp"

namespace stratlasso {

/// Filters rows per the data configuration, preserving source row order.
Dataset assemble(const Dataset& dataset, const DataConfig& config);

/// Stratified train/test split on the joint (group, outcome) cell.
/// Each cell contributes round(test_fraction * cell size) rows to the test
/// side; a cell of two or more rows must land on both sides or the split is
/// refused (EmptyStratum). Deterministic given the seed.
std::pair<Dataset, Dataset> split_train_test(const Dataset& dataset,
                                             double test_fraction,
                                             std::uint64_t seed);

/// Same split, but returning row indices into `dataset` (train, test).
std::pair<std::vector<int>, std::vector<int>> split_train_test_indices(
    const Dataset& dataset, double test_fraction, std::uint64_t seed);

/// K folds stratified on the joint (group, outcome) cell: members of each
/// cell are dealt round-robin, so per-cell fold counts differ by at most one
/// from the proportional ideal. Deterministic given the seed.
FoldAssignment make_folds(const Dataset& dataset, int k, std::uint64_t seed);

}  // namespace stratlasso
