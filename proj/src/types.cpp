#include "stratlasso/types.hpp"

#include <cmath>
#include <set>

#include "stratlasso/errors.hpp"

namespace stratlasso {

void Dataset::validate() const {
  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  if (n < 1) throw InvalidConfig("dataset has no rows");
  if (y.size() != n) throw DimensionMismatch("y length vs X rows");
  if (static_cast<Eigen::Index>(group.size()) != n)
    throw DimensionMismatch("group length vs X rows");
  if (static_cast<Eigen::Index>(features.size()) != p)
    throw DimensionMismatch("feature metadata length vs X columns");

  std::set<std::string> names;
  for (const auto& f : features) {
    if (!names.insert(f.name).second)
      throw InvalidConfig("duplicate feature name: " + f.name);
    if (f.kind == FeatureKind::Categorical && f.n_levels() < 2)
      throw InvalidConfig("categorical feature needs >= 2 levels: " + f.name);
  }

  for (Eigen::Index i = 0; i < n; ++i) {
    if (y(i) != 0.0 && y(i) != 1.0)
      throw NonBinaryOutcome("row " + std::to_string(i));
    if (group[i].empty())
      throw InvalidConfig("empty group label at row " + std::to_string(i));
    for (Eigen::Index j = 0; j < p; ++j) {
      const double v = X(i, j);
      if (!std::isfinite(v))
        throw InvalidConfig("non-finite value at row " + std::to_string(i) +
                            ", feature " + features[j].name);
      if (features[j].kind == FeatureKind::Categorical) {
        const int code = static_cast<int>(v);
        if (v != code || code < 0 || code >= features[j].n_levels())
          throw InvalidConfig("bad level code at row " + std::to_string(i) +
                              ", feature " + features[j].name);
      }
    }
  }
}

Dataset Dataset::subset(const std::vector<int>& rows) const {
  Dataset out;
  out.features = features;
  out.X.resize(static_cast<Eigen::Index>(rows.size()), X.cols());
  out.y.resize(static_cast<Eigen::Index>(rows.size()));
  out.group.reserve(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    out.X.row(static_cast<Eigen::Index>(k)) = X.row(rows[k]);
    out.y(static_cast<Eigen::Index>(k)) = y(rows[k]);
    out.group.push_back(group[rows[k]]);
  }
  return out;
}

std::vector<std::string> Dataset::group_labels() const {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& g : group) {
    if (seen.insert(g).second) out.push_back(g);
  }
  return out;
}

std::map<std::string, std::vector<int>> Dataset::rows_by_group() const {
  std::map<std::string, std::vector<int>> out;
  for (std::size_t i = 0; i < group.size(); ++i)
    out[group[i]].push_back(static_cast<int>(i));
  return out;
}

DataConfig DataConfig::all() { return DataConfig{Mode::All, "", ""}; }

DataConfig DataConfig::group_only(std::string g) {
  return DataConfig{Mode::GroupOnly, std::move(g), ""};
}

DataConfig DataConfig::mix(std::string majority, std::string minority) {
  return DataConfig{Mode::Mix, std::move(majority), std::move(minority)};
}

DataConfig DataConfig::parse(const std::string& text) {
  if (text == "all") return all();
  if (text.rfind("group:", 0) == 0) {
    const std::string g = text.substr(6);
    if (g.empty()) throw InvalidConfig("group: needs a label");
    return group_only(g);
  }
  if (text.rfind("mix:", 0) == 0) {
    const std::string rest = text.substr(4);
    const auto comma = rest.find(',');
    if (comma == std::string::npos || comma == 0 || comma + 1 == rest.size())
      throw InvalidConfig("mix: needs two labels as mix:MAJ,MIN");
    return mix(rest.substr(0, comma), rest.substr(comma + 1));
  }
  throw InvalidConfig("unrecognized data config: " + text);
}

std::string DataConfig::label() const {
  switch (mode) {
    case Mode::All:
      return "all";
    case Mode::GroupOnly:
      return "group:" + group_a;
    case Mode::Mix:
      return "mix:" + group_a + "," + group_b;
  }
  return "?";
}

std::vector<int> FoldAssignment::rows_in_fold(int f) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < fold_id.size(); ++i)
    if (fold_id[i] == f) out.push_back(static_cast<int>(i));
  return out;
}

std::vector<int> FoldAssignment::rows_not_in_fold(int f) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < fold_id.size(); ++i)
    if (fold_id[i] != f) out.push_back(static_cast<int>(i));
  return out;
}

FoldAssignment FoldAssignment::restrict_to(const std::vector<int>& rows) const {
  FoldAssignment out;
  out.k = k;
  out.fold_id.reserve(rows.size());
  for (int r : rows) out.fold_id.push_back(fold_id[r]);
  return out;
}

}  // namespace stratlasso
