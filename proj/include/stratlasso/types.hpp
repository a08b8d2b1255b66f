#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

namespace stratlasso {

enum class FeatureKind { Continuous, Categorical };

struct FeatureMeta {
  std::string name;
  FeatureKind kind = FeatureKind::Continuous;
  std::vector<std::string> levels;  // categorical only, >= 2 entries
  bool interaction_candidate = false;

  int n_levels() const { return static_cast<int>(levels.size()); }
};

/// Rows of a study cohort: features, binary outcome, group label per row.
/// Categorical columns of X hold level codes (0..L-1) as doubles; one-hot
/// expansion happens at solver boundaries, FeatureMeta stays authoritative.
struct Dataset {
  Eigen::MatrixXd X;               // n x p, p == features.size()
  Eigen::VectorXd y;               // 0/1
  std::vector<std::string> group;  // length n
  std::vector<FeatureMeta> features;

  Eigen::Index n_rows() const { return X.rows(); }
  Eigen::Index n_features() const { return X.cols(); }

  /// Throws on any violated invariant (sizes, binary y, level codes, NaN).
  void validate() const;

  Dataset subset(const std::vector<int>& rows) const;

  /// Distinct group labels in order of first appearance.
  std::vector<std::string> group_labels() const;

  /// Row indices per group label.
  std::map<std::string, std::vector<int>> rows_by_group() const;
};

struct StandardizationRecord {
  std::vector<int> columns;  // which columns were standardized
  Eigen::VectorXd mean;      // per entry of `columns`
  Eigen::VectorXd scale;     // population standard deviation, > 0
};

/// Training-data configuration: a single group, majority + one minority, or
/// every group.
struct DataConfig {
  enum class Mode { All, GroupOnly, Mix };
  Mode mode = Mode::All;
  std::string group_a;  // GroupOnly target, or Mix majority
  std::string group_b;  // Mix minority

  static DataConfig all();
  static DataConfig group_only(std::string g);
  static DataConfig mix(std::string majority, std::string minority);

  /// Parses "all", "group:G", "mix:MAJ,MIN".
  static DataConfig parse(const std::string& text);

  std::string label() const;
};

struct FoldAssignment {
  std::vector<int> fold_id;  // per row, in [0, k)
  int k = 0;

  std::vector<int> rows_in_fold(int f) const;
  std::vector<int> rows_not_in_fold(int f) const;

  /// Restriction to a row subset (fold ids kept, rows renumbered).
  FoldAssignment restrict_to(const std::vector<int>& rows) const;
};

}  // namespace stratlasso
