#include "stratlasso/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "stratlasso/csv.hpp"
#include "stratlasso/errors.hpp"

namespace stratlasso::eval {

namespace {

void check_labels(const Eigen::VectorXd& scores, const Eigen::VectorXd& labels) {
  if (scores.size() != labels.size())
    throw DimensionMismatch("scores vs labels length");
  bool pos = false, neg = false;
  for (Eigen::Index i = 0; i < labels.size(); ++i) {
    if (labels(i) == 1.0) {
      pos = true;
    } else if (labels(i) == 0.0) {
      neg = true;
    } else {
      throw NonBinaryOutcome("label at row " + std::to_string(i));
    }
  }
  if (!pos || !neg) throw SingleClass();
}

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

}  // namespace

double auc(const Eigen::VectorXd& scores, const Eigen::VectorXd& labels) {
  check_labels(scores, labels);
  const Eigen::Index n = scores.size();
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return scores(a) < scores(b); });

  // midranks over tie blocks
  std::vector<double> rank(static_cast<std::size_t>(n));
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && scores(order[j + 1]) == scores(order[i])) ++j;
    const double mid = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[static_cast<std::size_t>(order[k])] = mid;
    i = j + 1;
  }

  double rank_sum_pos = 0.0;
  double m = 0.0;
  for (Eigen::Index r = 0; r < n; ++r) {
    if (labels(r) == 1.0) {
      rank_sum_pos += rank[static_cast<std::size_t>(r)];
      m += 1.0;
    }
  }
  const double nn = static_cast<double>(n) - m;
  return (rank_sum_pos - m * (m + 1.0) / 2.0) / (m * nn);
}

RocCurve roc_points(const Eigen::VectorXd& scores, const Eigen::VectorXd& labels) {
  check_labels(scores, labels);
  const Eigen::Index n = scores.size();
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (scores(a) != scores(b)) return scores(a) > scores(b);
    return a < b;
  });

  double total_pos = 0.0;
  for (Eigen::Index r = 0; r < n; ++r) total_pos += labels(r);
  const double total_neg = static_cast<double>(n) - total_pos;

  RocCurve curve;
  curve.fpr.push_back(0.0);
  curve.tpr.push_back(0.0);
  double tp = 0.0, fp = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    const double thr = scores(order[i]);
    std::size_t j = i;
    while (j < order.size() && scores(order[j]) == thr) {
      (labels(order[j]) == 1.0 ? tp : fp) += 1.0;
      ++j;
    }
    curve.thresholds.push_back(thr);
    curve.fpr.push_back(fp / total_neg);
    curve.tpr.push_back(tp / total_pos);
    i = j;
  }

  double area = 0.0;
  for (std::size_t k = 1; k < curve.fpr.size(); ++k)
    area += (curve.fpr[k] - curve.fpr[k - 1]) * (curve.tpr[k] + curve.tpr[k - 1]) / 2.0;
  curve.auc = area;
  return curve;
}

void write_roc_csv(const RocCurve& curve, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open for writing: " + path);
  out << "threshold,fpr,tpr\n";
  out << ",0,0\n";
  for (std::size_t k = 0; k < curve.thresholds.size(); ++k)
    out << format_double(curve.thresholds[k]) << ',' << format_double(curve.fpr[k + 1])
        << ',' << format_double(curve.tpr[k + 1]) << '\n';
}

RocComparison delong_one_sided(const Eigen::VectorXd& scores_base,
                               const Eigen::VectorXd& scores_new,
                               const Eigen::VectorXd& labels) {
  if (scores_base.size() != scores_new.size())
    throw DimensionMismatch("paired score vectors differ in length");
  check_labels(scores_base, labels);
  check_labels(scores_new, labels);

  std::vector<int> pos, neg;
  for (Eigen::Index i = 0; i < labels.size(); ++i)
    (labels(i) == 1.0 ? pos : neg).push_back(static_cast<int>(i));
  const double m = static_cast<double>(pos.size());
  const double nn = static_cast<double>(neg.size());

  auto placements = [&](const Eigen::VectorXd& s, std::vector<double>& v10,
                        std::vector<double>& v01) {
    v10.assign(pos.size(), 0.0);
    v01.assign(neg.size(), 0.0);
    for (std::size_t i = 0; i < pos.size(); ++i) {
      for (std::size_t j = 0; j < neg.size(); ++j) {
        const double a = s(pos[i]);
        const double b = s(neg[j]);
        const double psi = a > b ? 1.0 : (a == b ? 0.5 : 0.0);
        v10[i] += psi;
        v01[j] += psi;
      }
    }
    for (auto& v : v10) v /= nn;
    for (auto& v : v01) v /= m;
  };

  std::vector<double> v10_b, v01_b, v10_n, v01_n;
  placements(scores_base, v10_b, v01_b);
  placements(scores_new, v10_n, v01_n);

  RocComparison cmp;
  cmp.auc_base = std::accumulate(v10_b.begin(), v10_b.end(), 0.0) / m;
  cmp.auc_new = std::accumulate(v10_n.begin(), v10_n.end(), 0.0) / m;
  cmp.delta_auc = cmp.auc_new - cmp.auc_base;

  auto cov = [](const std::vector<double>& a, double ma, const std::vector<double>& b,
                double mb) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - ma) * (b[i] - mb);
    return a.size() > 1 ? acc / (static_cast<double>(a.size()) - 1.0) : 0.0;
  };

  const double s10_bb = cov(v10_b, cmp.auc_base, v10_b, cmp.auc_base);
  const double s10_nn = cov(v10_n, cmp.auc_new, v10_n, cmp.auc_new);
  const double s10_bn = cov(v10_b, cmp.auc_base, v10_n, cmp.auc_new);
  const double s01_bb = cov(v01_b, cmp.auc_base, v01_b, cmp.auc_base);
  const double s01_nn = cov(v01_n, cmp.auc_new, v01_n, cmp.auc_new);
  const double s01_bn = cov(v01_b, cmp.auc_base, v01_n, cmp.auc_new);

  cmp.variance = (s10_bb + s10_nn - 2.0 * s10_bn) / m +
                 (s01_bb + s01_nn - 2.0 * s01_bn) / nn;

  if (cmp.variance <= 0.0) {
    if (std::abs(cmp.delta_auc) < 1e-12) {
      cmp.z = 0.0;
      cmp.p_one_sided = 0.5;
    } else {
      cmp.degenerate_variance = true;
      cmp.z = cmp.delta_auc > 0 ? std::numeric_limits<double>::infinity()
                                : -std::numeric_limits<double>::infinity();
      cmp.p_one_sided = cmp.delta_auc > 0 ? 0.0 : 1.0;
    }
    return cmp;
  }
  cmp.z = cmp.delta_auc / std::sqrt(cmp.variance);
  cmp.p_one_sided = normal_sf(cmp.z);
  return cmp;
}

namespace {

struct RowKey {
  std::string method, data;
  bool operator==(const RowKey& o) const {
    return method == o.method && data == o.data;
  }
};

}  // namespace

Report build_report(const std::vector<RunResult>& runs,
                    const std::string& baseline_method, double significance,
                    int min_class_count) {
  if (runs.empty()) throw InvalidConfig("no runs to report");

  Report rep;
  std::vector<RowKey> rows;
  for (const auto& r : runs) {
    if (std::find(rep.outcomes.begin(), rep.outcomes.end(), r.outcome) ==
        rep.outcomes.end())
      rep.outcomes.push_back(r.outcome);
    const RowKey key{r.method, r.data};
    if (std::find(rows.begin(), rows.end(), key) == rows.end()) rows.push_back(key);
  }

  auto find_run = [&](const std::string& method, const std::string& data,
                      const std::string& outcome) -> const RunResult* {
    for (const auto& r : runs)
      if (r.method == method && r.data == data && r.outcome == outcome) return &r;
    return nullptr;
  };

  // AUC grid
  for (const auto& key : rows) {
    AucRow row;
    row.method = key.method;
    row.data = key.data;
    for (const auto& oc : rep.outcomes) {
      const RunResult* r = find_run(key.method, key.data, oc);
      if (r == nullptr)
        throw MissingBaseline("run (" + key.method + ", " + key.data + ", " + oc +
                              ") absent from the grid");
      row.auc_per_outcome.push_back(auc(r->scores, r->labels));
    }
    row.avg = std::accumulate(row.auc_per_outcome.begin(), row.auc_per_outcome.end(),
                              0.0) /
              static_cast<double>(row.auc_per_outcome.size());
    rep.auc_rows.push_back(std::move(row));
  }

  // Increment column: row average minus the baseline method's group-only
  // row average (the paper's zero-increment reference row).
  const AucRow* base_row = nullptr;
  for (const auto& row : rep.auc_rows)
    if (row.method == baseline_method && row.data.rfind("group:", 0) == 0) {
      base_row = &row;
      break;
    }
  if (base_row == nullptr) {
    for (const auto& row : rep.auc_rows)
      if (row.method == baseline_method) {
        base_row = &row;
        break;
      }
  }
  if (base_row == nullptr)
    throw MissingBaseline("no row for baseline method " + baseline_method);
  for (auto& row : rep.auc_rows) row.inc = row.avg - base_row->avg;

  // Comparison grid vs the same-data-config baseline
  for (const auto& key : rows) {
    if (key.method == baseline_method) continue;
    CompRow row;
    row.method = key.method;
    row.data = key.data;
    for (const auto& oc : rep.outcomes) {
      const RunResult* challenger = find_run(key.method, key.data, oc);
      const RunResult* base = find_run(baseline_method, key.data, oc);
      if (base == nullptr)
        throw MissingBaseline("baseline (" + baseline_method + ", " + key.data +
                              ", " + oc + ")");
      if (challenger->labels.size() != base->labels.size() ||
          challenger->labels != base->labels)
        throw DimensionMismatch("unpaired test rows for (" + key.method + ", " +
                                key.data + ", " + oc + ")");
      int n_pos = 0, n_neg = 0;
      for (Eigen::Index i = 0; i < base->labels.size(); ++i)
        (base->labels(i) == 1.0 ? n_pos : n_neg) += 1;
      if (n_pos < min_class_count || n_neg < min_class_count) {
        row.p_value.push_back(std::numeric_limits<double>::quiet_NaN());
        row.delta_auc.push_back(std::numeric_limits<double>::quiet_NaN());
        row.significant.push_back(false);
        row.note.push_back("skipped: class count below " +
                           std::to_string(min_class_count) + " (pos=" +
                           std::to_string(n_pos) + ", neg=" +
                           std::to_string(n_neg) + ")");
        continue;
      }
      const auto cmp =
          delong_one_sided(base->scores, challenger->scores, base->labels);
      row.p_value.push_back(cmp.p_one_sided);
      row.delta_auc.push_back(cmp.delta_auc);
      row.significant.push_back(cmp.p_one_sided < significance);
      row.note.push_back(cmp.degenerate_variance ? "degenerate variance" : "");
    }
    rep.comp_rows.push_back(std::move(row));
  }

  rep.header_note =
      "inc = row average AUC minus the '" + baseline_method +
      "' group-only row average; p-values are one-sided (challenger > baseline) "
      "against the same-data baseline";
  return rep;
}

void write_report_csv(const Report& report, const std::string& auc_path,
                      const std::string& comparison_path) {
  {
    std::ofstream out(auc_path);
    if (!out) throw ParseError("cannot open for writing: " + auc_path);
    out << "# " << report.header_note << '\n';
    out << "method,data";
    for (const auto& oc : report.outcomes) out << ',' << oc;
    out << ",avg,inc\n";
    for (const auto& row : report.auc_rows) {
      out << row.method << ',' << row.data;
      for (double a : row.auc_per_outcome) out << ',' << format_double(a);
      out << ',' << format_double(row.avg) << ',' << format_double(row.inc) << '\n';
    }
  }
  {
    std::ofstream out(comparison_path);
    if (!out) throw ParseError("cannot open for writing: " + comparison_path);
    out << "# " << report.header_note << '\n';
    out << "method,metric,data";
    for (const auto& oc : report.outcomes) out << ',' << oc;
    out << '\n';
    for (const auto& row : report.comp_rows) {
      out << row.method << ",p_value," << row.data;
      for (double p : row.p_value)
        out << ',' << (std::isnan(p) ? std::string() : format_double(p));
      out << '\n';
      out << row.method << ",delta_auc," << row.data;
      for (double d : row.delta_auc)
        out << ',' << (std::isnan(d) ? std::string() : format_double(d));
      out << '\n';
      out << row.method << ",significant," << row.data;
      for (bool s : row.significant) out << ',' << (s ? 1 : 0);
      out << '\n';
      bool any_note = false;
      for (const auto& nt : row.note) any_note = any_note || !nt.empty();
      if (any_note) {
        out << row.method << ",note," << row.data;
        for (const auto& nt : row.note) out << ',' << nt;
        out << '\n';
      }
    }
  }
}

std::string format_report_text(const Report& report) {
  std::ostringstream os;
  os << report.header_note << "\n\n";

  const auto pad = [](const std::string& s, std::size_t w) {
    return s.size() >= w ? s : s + std::string(w - s.size(), ' ');
  };
  auto num = [](double v, bool star) {
    if (std::isnan(v)) return std::string("--");
    std::ostringstream o;
    o.precision(4);
    o << std::fixed << v;
    return star ? o.str() + "*" : o.str();
  };

  std::size_t w = 18;
  os << pad("method", w) << pad("data", w);
  for (const auto& oc : report.outcomes) os << pad(oc, 10);
  os << pad("avg", 10) << pad("inc", 10) << '\n';
  for (const auto& row : report.auc_rows) {
    os << pad(row.method, w) << pad(row.data, w);
    for (double a : row.auc_per_outcome) os << pad(num(a, false), 10);
    os << pad(num(row.avg, false), 10) << pad(num(row.inc, false), 10) << '\n';
  }
  if (!report.comp_rows.empty()) {
    os << '\n'
       << pad("method", w) << pad("metric", 12) << pad("data", w);
    for (const auto& oc : report.outcomes) os << pad(oc, 10);
    os << '\n';
    for (const auto& row : report.comp_rows) {
      os << pad(row.method, w) << pad("p_value", 12) << pad(row.data, w);
      for (std::size_t k = 0; k < row.p_value.size(); ++k)
        os << pad(num(row.p_value[k], row.significant[k]), 10);
      os << '\n';
      os << pad(row.method, w) << pad("delta_auc", 12) << pad(row.data, w);
      for (std::size_t k = 0; k < row.delta_auc.size(); ++k)
        os << pad(num(row.delta_auc[k], row.significant[k]), 10);
      os << '\n';
    }
  }
  return os.str();
}

}  // namespace stratlasso::eval
