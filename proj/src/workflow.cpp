#include "stratlasso/workflow.hpp"

#include <algorithm>

#include "stratlasso/errors.hpp"

namespace stratlasso::workflow {

namespace {

Eigen::MatrixXd rows_of(const Eigen::MatrixXd& X, const std::vector<int>& rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), X.cols());
  for (std::size_t i = 0; i < rows.size(); ++i)
    out.row(static_cast<Eigen::Index>(i)) = X.row(rows[i]);
  return out;
}

Eigen::VectorXd entries_of(const Eigen::VectorXd& v, const std::vector<int>& rows) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    out(static_cast<Eigen::Index>(i)) = v(rows[i]);
  return out;
}

}  // namespace

LassoBundle fit_lasso_bundle(const Dataset& train, const FoldAssignment& folds,
                             const FitSettings& settings) {
  LassoBundle out;
  auto [X, design] = build_lasso_design(train);
  out.design = std::move(design);

  const double lmax =
      lasso::lambda_max(X, train.y, Eigen::VectorXd::Ones(X.cols()), nullptr);
  const double eps = (X.rows() < X.cols()) ? 1e-2 : 1e-4;
  out.lambda_grid =
      lasso::default_lambda_path(std::max(lmax, 1e-300), settings.n_lambda, eps);

  auto fit_fn = [&](const std::vector<int>& train_rows,
                    const std::vector<int>& valid_rows) {
    lasso::PenaltySpec spec;
    spec.lambda_path = out.lambda_grid;
    const auto path =
        lasso::fit_logistic_lasso(rows_of(X, train_rows),
                                  entries_of(train.y, train_rows), spec,
                                  settings.lasso_tol);
    const Eigen::MatrixXd Xv = rows_of(X, valid_rows);
    std::vector<Eigen::VectorXd> probs;
    probs.reserve(path.entries.size());
    for (const auto& e : path.entries) probs.push_back(lasso::predict_proba(e, Xv));
    return probs;
  };
  out.curve = cv::cv_deviance(fit_fn, train, folds, out.lambda_grid);
  out.selected_index = cv::select_min(out.curve);

  lasso::PenaltySpec spec;
  spec.lambda_path = out.lambda_grid;
  out.path = lasso::fit_logistic_lasso(X, train.y, spec, settings.lasso_tol);
  return out;
}

Eigen::VectorXd predict(const LassoBundle& bundle, const Dataset& rows) {
  const Eigen::MatrixXd X = apply_lasso_design(rows, bundle.design);
  return lasso::predict_proba(
      bundle.path.entries.at(static_cast<std::size_t>(bundle.selected_index)), X);
}

GlinternetBundle fit_glinternet_bundle(const Dataset& train,
                                       const FoldAssignment& folds,
                                       const FitSettings& settings) {
  GlinternetBundle out;
  const auto structure = glinternet::build_groups(train.features);

  // shared grid from the full training data
  glinternet::DesignTransform tr;
  const Eigen::MatrixXd Z = glinternet::build_design(train, structure, tr, true);
  const double lmax = glinternet::group_lambda_max(Z, train.y, structure);
  const double eps = (Z.rows() < Z.cols()) ? 1e-2 : 1e-4;
  out.lambda_grid =
      lasso::default_lambda_path(std::max(lmax, 1e-300), settings.n_lambda, eps);

  auto fit_fn = [&](const std::vector<int>& train_rows,
                    const std::vector<int>& valid_rows) {
    const Dataset sub = train.subset(train_rows);
    const auto model = glinternet::fit_glinternet(sub, structure, out.lambda_grid,
                                                  settings.glinternet_tol);
    const Dataset valid = train.subset(valid_rows);
    std::vector<Eigen::VectorXd> probs;
    probs.reserve(model.entries.size());
    for (std::size_t t = 0; t < model.entries.size(); ++t)
      probs.push_back(
          glinternet::predict_proba(model, static_cast<int>(t), valid));
    return probs;
  };
  out.curve = cv::cv_deviance(fit_fn, train, folds, out.lambda_grid);
  out.selected_index = cv::select_min(out.curve);

  out.model = glinternet::fit_glinternet(train, structure, out.lambda_grid,
                                         settings.glinternet_tol);
  return out;
}

Eigen::VectorXd predict(const GlinternetBundle& bundle, const Dataset& rows) {
  return glinternet::predict_proba(bundle.model, bundle.selected_index, rows);
}

PretrainedBundle fit_pretrained_bundle(const Dataset& train,
                                       const FoldAssignment& folds,
                                       const FitSettings& settings) {
  PretrainedBundle out;
  const auto overall = pretrain::fit_overall(train, folds, settings.n_lambda);
  double alpha = settings.alpha;
  if (alpha < 0.0)
    alpha = pretrain::select_alpha(train, overall, folds, settings.alpha_grid,
                                   settings.n_lambda);
  out.model =
      pretrain::fit_group_models(train, overall, alpha, folds, settings.n_lambda);
  return out;
}

Eigen::VectorXd predict(const PretrainedBundle& bundle, const Dataset& rows,
                        bool allow_fallback) {
  return pretrain::predict(bundle.model, rows, allow_fallback);
}

Eigen::VectorXd predict(const ModelFile& model, const Dataset& rows,
                        bool allow_fallback) {
  if (model.meta.model_kind == "lasso") return predict(model.lasso, rows);
  if (model.meta.model_kind == "glinternet") return predict(model.glint, rows);
  if (model.meta.model_kind == "ptlasso")
    return predict(model.pretrained, rows, allow_fallback);
  throw InvalidConfig("unknown model kind: " + model.meta.model_kind);
}

}  // namespace stratlasso::workflow
