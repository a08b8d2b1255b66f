#include "stratlasso/design.hpp"

#include "stratlasso/errors.hpp"
#include "stratlasso/standardize.hpp"

namespace stratlasso {

namespace {

Eigen::MatrixXd expand(const Dataset& d, std::vector<std::string>* names,
                       std::vector<int>* feats) {
  int q = 0;
  for (const auto& f : d.features)
    q += f.kind == FeatureKind::Continuous ? 1 : f.n_levels() - 1;

  Eigen::MatrixXd X(d.n_rows(), q);
  int col = 0;
  for (std::size_t j = 0; j < d.features.size(); ++j) {
    const auto& f = d.features[j];
    if (f.kind == FeatureKind::Continuous) {
      X.col(col) = d.X.col(static_cast<Eigen::Index>(j));
      if (names) names->push_back(f.name);
      if (feats) feats->push_back(static_cast<int>(j));
      ++col;
      continue;
    }
    for (int l = 1; l < f.n_levels(); ++l) {  // reference level dropped
      X.col(col) = (d.X.col(static_cast<Eigen::Index>(j)).array() ==
                    static_cast<double>(l))
                       .cast<double>();
      if (names) names->push_back(f.name + "=" + f.levels[static_cast<std::size_t>(l)]);
      if (feats) feats->push_back(static_cast<int>(j));
      ++col;
    }
  }
  return X;
}

}  // namespace

std::pair<Eigen::MatrixXd, LassoDesign> build_lasso_design(const Dataset& d) {
  LassoDesign design;
  Eigen::MatrixXd X = expand(d, &design.col_names, &design.col_feature);
  std::vector<int> all_cols(static_cast<std::size_t>(X.cols()));
  for (std::size_t j = 0; j < all_cols.size(); ++j) all_cols[j] = static_cast<int>(j);
  auto [Xs, rec] = standardize(X, all_cols, design.col_names);
  design.record = std::move(rec);
  return {std::move(Xs), std::move(design)};
}

Eigen::MatrixXd apply_lasso_design(const Dataset& d, const LassoDesign& design) {
  if (d.features.empty())
    throw DimensionMismatch("dataset has no features to expand");
  Eigen::MatrixXd X = expand(d, nullptr, nullptr);
  if (X.cols() != static_cast<Eigen::Index>(design.col_names.size()))
    throw DimensionMismatch("expanded columns vs fitted design");
  apply_standardization(X, design.record);
  return X;
}

}  // namespace stratlasso
