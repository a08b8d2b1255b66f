#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace stratlasso::eval {

/// Mann-Whitney AUC with midpoint handling of ties: the probability that a
/// random positive outscores a random negative, ties counting one half.
double auc(const Eigen::VectorXd& scores, const Eigen::VectorXd& labels);

struct RocCurve {
  std::vector<double> thresholds;  // descending, one per distinct score
  std::vector<double> fpr;         // starts at 0, ends at 1
  std::vector<double> tpr;
  double auc = 0.0;  // trapezoidal area; equals the Mann-Whitney value
};

RocCurve roc_points(const Eigen::VectorXd& scores, const Eigen::VectorXd& labels);

void write_roc_csv(const RocCurve& curve, const std::string& path);

struct RocComparison {
  double auc_base = 0.0;
  double auc_new = 0.0;
  double delta_auc = 0.0;  // auc_new - auc_base
  double variance = 0.0;   // DeLong variance of the difference
  double z = 0.0;
  double p_one_sided = 0.0;  // alternative: new > base
  bool degenerate_variance = false;  // var = 0 with delta != 0
};

/// Paired one-sided DeLong test on the same rows. Placement-value
/// covariances estimate var(delta); p = 1 - Phi(z). Zero variance with zero
/// delta gives p = 0.5; zero variance with nonzero delta is flagged and p
/// snaps to 0 or 1 by the sign.
RocComparison delong_one_sided(const Eigen::VectorXd& scores_base,
                               const Eigen::VectorXd& scores_new,
                               const Eigen::VectorXd& labels);

/// One evaluated (method, data config, outcome) cell.
struct RunResult {
  std::string method;
  std::string data;
  std::string outcome;
  Eigen::VectorXd scores;
  Eigen::VectorXd labels;
};

struct AucRow {
  std::string method, data;
  std::vector<double> auc_per_outcome;
  double avg = 0.0;
  double inc = 0.0;  // avg minus the group-only baseline row's avg
};

struct CompRow {
  std::string method, data;
  std::vector<double> p_value;
  std::vector<double> delta_auc;
  std::vector<bool> significant;
  std::vector<std::string> note;  // e.g. class-count guard warnings
};

struct Report {
  std::vector<std::string> outcomes;
  std::vector<AucRow> auc_rows;
  std::vector<CompRow> comp_rows;
  std::string header_note;
};

/// Assembles the AUC grid (per-method row average and increment over the
/// baseline method's group-only row) and the p/delta grid against the
/// same-data-config baseline. Comparisons with fewer than min_class_count
/// rows in either class are replaced by a warning note.
Report build_report(const std::vector<RunResult>& runs,
                    const std::string& baseline_method,
                    double significance = 0.05, int min_class_count = 10);

void write_report_csv(const Report& report, const std::string& auc_path,
                      const std::string& comparison_path);

/// Aligned plain-text rendering, significant entries starred.
std::string format_report_text(const Report& report);

}  // namespace stratlasso::eval
