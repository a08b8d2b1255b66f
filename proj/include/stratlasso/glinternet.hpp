#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "stratlasso/types.hpp"

namespace stratlasso::glinternet {

/// One group of expanded design columns. Interaction groups carry their own
/// copies of both parents' columns ahead of the crossed columns, which is
/// what makes a selected interaction imply both main effects.
struct Group {
  bool is_interaction = false;
  int feature_i = -1;  // main feature, or the candidate of a pair
  int feature_j = -1;  // pair partner; -1 for main groups
  std::vector<int> cols;
  int interaction_offset = 0;  // position in `cols` where crossed columns begin
  double weight = 1.0;         // gamma_g = sqrt(#cols)
};

struct InteractionGroupStructure {
  int n_features = 0;
  int n_columns = 0;
  std::vector<Group> groups;                  // main groups first, then pairs
  std::vector<std::pair<int, int>> pairs;     // (candidate, partner), deduplicated
};

/// Enumerates main groups and the candidate-restricted interaction pairs
/// {(c, j) : c candidate, j != c}, each unordered pair once.
InteractionGroupStructure build_groups(const std::vector<FeatureMeta>& features);

/// 0 if ||v|| <= t, else v (1 - t/||v||).
Eigen::VectorXd group_soft_threshold(const Eigen::VectorXd& v, double t);

/// Per-column affine transform of the expanded design, recorded at training
/// time and replayed on new data.
struct DesignTransform {
  Eigen::VectorXd mean, scale;
};

/// Expanded design for `structure`: continuous mains standardized, full
/// indicator coding for categoricals, continuous-continuous crossed columns
/// re-standardized, indicator crossings raw.
Eigen::MatrixXd build_design(const Dataset& dataset,
                             const InteractionGroupStructure& structure,
                             DesignTransform& transform, bool fit_transform);

struct GlinternetEntry {
  double lambda = 0.0;
  double intercept = 0.0;
  double deviance = 0.0;
  Eigen::VectorXd theta;  // flat over expanded columns
};

struct GlinternetModel {
  InteractionGroupStructure structure;
  DesignTransform transform;
  std::vector<FeatureMeta> features;
  std::vector<GlinternetEntry> entries;
  double lambda_max = 0.0;
  std::vector<std::string> warnings;
};

/// Group lambda_max: max_g ||Z_g^T (y - p0)||_2 / (n gamma_g).
double group_lambda_max(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y,
                        const InteractionGroupStructure& structure);

/// Overlapped group-lasso logistic fit over a lambda path (empty = automatic
/// n_lambda-point grid). FISTA on the smooth logistic loss with groupwise
/// soft-thresholding, backtracked majorization steps, monotone restarts, and
/// warm starts; every entry satisfies the group stationarity conditions at
/// `tol`, checked on the true gradient.
GlinternetModel fit_glinternet(const Dataset& dataset,
                               const InteractionGroupStructure& structure,
                               std::vector<double> lambda_path, double tol = 1e-5,
                               int max_iter = 20000, int n_lambda = 50);

/// Composite main effect per feature: the sum of that feature's blocks over
/// every group that contains it.
std::vector<Eigen::VectorXd> composite_main_effects(const GlinternetModel& model,
                                                    int lambda_index);

struct InteractionTerm {
  int feature_i = -1;
  int feature_j = -1;
  double strength = 0.0;  // ||crossed-column block||_2 on the fitted scale
};

std::vector<InteractionTerm> extract_interactions(const GlinternetModel& model,
                                                  int lambda_index);

struct PathStats {
  double lambda = 0.0;
  int n_main_effects = 0;
  int n_interactions = 0;
  double cv_error = 0.0;
  bool has_cv = false;
};

std::vector<PathStats> path_statistics(const GlinternetModel& model,
                                       const std::vector<double>* cv_error = nullptr);

void write_path_stats_csv(const std::vector<PathStats>& stats, const std::string& path);

/// Edge list (candidate, partner, strength) sorted by descending strength.
void export_network(const GlinternetModel& model, int lambda_index,
                    const std::string& path);

Eigen::VectorXd predict_proba(const GlinternetModel& model, int lambda_index,
                              const Dataset& rows);

}  // namespace stratlasso::glinternet
