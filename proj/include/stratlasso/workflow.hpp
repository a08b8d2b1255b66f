#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "stratlasso/cv.hpp"
#include "stratlasso/design.hpp"
#include "stratlasso/glinternet.hpp"
#include "stratlasso/lasso.hpp"
#include "stratlasso/pretrained.hpp"
#include "stratlasso/types.hpp"

namespace stratlasso::workflow {

struct FitSettings {
  int n_lambda = 50;
  int k_folds = 3;
  std::uint64_t seed = 1;
  double lasso_tol = 1e-7;
  double glinternet_tol = 1e-5;
  double alpha = -1.0;  // pretrained: fixed alpha, or < 0 to select by CV
  std::vector<double> alpha_grid = {0.0, 0.25, 0.5, 0.75, 1.0};
};

/// CV-selected plain lasso on the training rows.
struct LassoBundle {
  LassoDesign design;
  lasso::LassoPath path;
  std::vector<double> lambda_grid;
  cv::CvCurve curve;
  int selected_index = -1;
};

LassoBundle fit_lasso_bundle(const Dataset& train, const FoldAssignment& folds,
                             const FitSettings& settings);
Eigen::VectorXd predict(const LassoBundle& bundle, const Dataset& rows);

/// CV-selected glinternet fit.
struct GlinternetBundle {
  glinternet::GlinternetModel model;
  std::vector<double> lambda_grid;
  cv::CvCurve curve;
  int selected_index = -1;
};

GlinternetBundle fit_glinternet_bundle(const Dataset& train,
                                       const FoldAssignment& folds,
                                       const FitSettings& settings);
Eigen::VectorXd predict(const GlinternetBundle& bundle, const Dataset& rows);

/// Pretrained lasso: overall fit, alpha (fixed or CV-selected), group fits.
struct PretrainedBundle {
  pretrain::PretrainedModel model;
};

PretrainedBundle fit_pretrained_bundle(const Dataset& train,
                                       const FoldAssignment& folds,
                                       const FitSettings& settings);
Eigen::VectorXd predict(const PretrainedBundle& bundle, const Dataset& rows,
                        bool allow_fallback = false);

/// Provenance a fitted model carries for later paired evaluation.
struct RunMeta {
  std::string model_kind;  // lasso | glinternet | ptlasso
  std::string data_config;
  std::string outcome_name = "outcome";
  std::uint64_t seed = 1;
  double test_fraction = 0.2;
  std::vector<int> test_rows;  // indices into the source data file
};

struct ModelFile {
  RunMeta meta;
  // exactly one is populated, per meta.model_kind
  LassoBundle lasso;
  GlinternetBundle glint;
  PretrainedBundle pretrained;
};

Eigen::VectorXd predict(const ModelFile& model, const Dataset& rows,
                        bool allow_fallback = false);

}  // namespace stratlasso::workflow
