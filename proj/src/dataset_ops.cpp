#include "stratlasso/dataset_ops.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "stratlasso/errors.hpp"
#include "stratlasso/rng.hpp"

namespace stratlasso {

namespace {

// (group, outcome) cells with member rows, in sorted cell order.
std::map<std::pair<std::string, int>, std::vector<int>> strata(const Dataset& d) {
  std::map<std::pair<std::string, int>, std::vector<int>> cells;
  for (Eigen::Index i = 0; i < d.n_rows(); ++i)
    cells[{d.group[i], static_cast<int>(d.y(i))}].push_back(static_cast<int>(i));
  return cells;
}

void require_groups_exist(const Dataset& d, const DataConfig& c) {
  std::set<std::string> labels(d.group.begin(), d.group.end());
  if (c.mode == DataConfig::Mode::GroupOnly || c.mode == DataConfig::Mode::Mix) {
    if (!labels.count(c.group_a)) throw UnknownGroup(c.group_a);
  }
  if (c.mode == DataConfig::Mode::Mix) {
    if (!labels.count(c.group_b)) throw UnknownGroup(c.group_b);
  }
}

}  // namespace

Dataset assemble(const Dataset& dataset, const DataConfig& config) {
  require_groups_exist(dataset, config);
  if (config.mode == DataConfig::Mode::All) return dataset;

  std::vector<int> keep;
  for (Eigen::Index i = 0; i < dataset.n_rows(); ++i) {
    const std::string& g = dataset.group[i];
    const bool match = (config.mode == DataConfig::Mode::GroupOnly)
                           ? g == config.group_a
                           : (g == config.group_a || g == config.group_b);
    if (match) keep.push_back(static_cast<int>(i));
  }
  return dataset.subset(keep);
}

std::pair<std::vector<int>, std::vector<int>> split_train_test_indices(
    const Dataset& dataset, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw InvalidConfig("test fraction must be in (0, 1)");

  Rng rng(seed);
  std::vector<int> train, test;
  for (auto& [cell, members] : strata(dataset)) {
    auto rows = members;
    rng.shuffle(rows);
    const auto cell_n = static_cast<long long>(rows.size());
    const long long t = std::llround(test_fraction * static_cast<double>(cell_n));
    if (cell_n >= 2 && (t < 1 || t > cell_n - 1))
      throw EmptyStratum("(" + cell.first + ", y=" + std::to_string(cell.second) +
                         ") cannot reach both sides at fraction " +
                         std::to_string(test_fraction));
    for (long long i = 0; i < cell_n; ++i)
      (i < t ? test : train).push_back(rows[static_cast<std::size_t>(i)]);
  }
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {std::move(train), std::move(test)};
}

std::pair<Dataset, Dataset> split_train_test(const Dataset& dataset,
                                             double test_fraction,
                                             std::uint64_t seed) {
  auto [train_idx, test_idx] = split_train_test_indices(dataset, test_fraction, seed);
  return {dataset.subset(train_idx), dataset.subset(test_idx)};
}

FoldAssignment make_folds(const Dataset& dataset, int k, std::uint64_t seed) {
  if (k < 2) throw InvalidConfig("fold count must be >= 2");
  if (dataset.n_rows() < k)
    throw TooFewRows(std::to_string(dataset.n_rows()) + " rows for " +
                     std::to_string(k) + " folds");

  const auto cells = strata(dataset);

  // Positive cells first, then negative, each in sorted group order; a single
  // cursor deals shuffled members round-robin. Each cell's rows land on
  // consecutive folds mod k, so per-cell fold counts differ by at most one
  // from proportional, and the first k rows dealt cover all folds.
  Rng rng(seed);
  FoldAssignment out;
  out.k = k;
  out.fold_id.assign(static_cast<std::size_t>(dataset.n_rows()), -1);
  int cursor = 0;
  for (int outcome : {1, 0}) {
    for (const auto& [cell, members] : cells) {
      if (cell.second != outcome) continue;
      auto rows = members;
      rng.shuffle(rows);
      for (int r : rows) {
        out.fold_id[static_cast<std::size_t>(r)] = cursor;
        cursor = (cursor + 1) % k;
      }
    }
  }
  return out;
}

}  // namespace stratlasso
