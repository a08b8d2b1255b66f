#include "stratlasso/serialize.hpp"

#include <fstream>
#include <limits>

#include <json.hpp>

#include "stratlasso/errors.hpp"

namespace stratlasso::serialize {

namespace {

using nlohmann::json;

json vec_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Eigen::VectorXd vec_from_json(const json& j) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    out(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return out;
}

// JSON has no inf literal; excluded features are stored as the string "inf"
json pf_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::isinf(v(i))) {
      out.push_back("inf");
    } else {
      out.push_back(v(i));
    }
  }
  return out;
}

Eigen::VectorXd pf_from_json(const json& j) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    out(static_cast<Eigen::Index>(i)) =
        j[i].is_string() ? std::numeric_limits<double>::infinity()
                         : j[i].get<double>();
  }
  return out;
}

json sparse_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (v(i) != 0.0) out.push_back(json::array({i, v(i)}));
  return out;
}

Eigen::VectorXd sparse_from_json(const json& j, Eigen::Index size) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(size);
  for (const auto& pair : j)
    out(pair[0].get<Eigen::Index>()) = pair[1].get<double>();
  return out;
}

json record_to_json(const StandardizationRecord& rec) {
  return json{{"columns", rec.columns},
              {"mean", vec_to_json(rec.mean)},
              {"scale", vec_to_json(rec.scale)}};
}

StandardizationRecord record_from_json(const json& j) {
  StandardizationRecord rec;
  rec.columns = j.at("columns").get<std::vector<int>>();
  rec.mean = vec_from_json(j.at("mean"));
  rec.scale = vec_from_json(j.at("scale"));
  return rec;
}

json design_to_json(const LassoDesign& d) {
  return json{{"col_names", d.col_names},
              {"col_feature", d.col_feature},
              {"record", record_to_json(d.record)}};
}

LassoDesign design_from_json(const json& j) {
  LassoDesign d;
  d.col_names = j.at("col_names").get<std::vector<std::string>>();
  d.col_feature = j.at("col_feature").get<std::vector<int>>();
  d.record = record_from_json(j.at("record"));
  return d;
}

json curve_to_json(const cv::CvCurve& c) {
  return json{{"grid", c.grid},
              {"mean_deviance", c.mean_deviance},
              {"se", c.se},
              {"n_folds", c.n_folds}};
}

cv::CvCurve curve_from_json(const json& j) {
  cv::CvCurve c;
  c.grid = j.at("grid").get<std::vector<double>>();
  c.mean_deviance = j.at("mean_deviance").get<std::vector<double>>();
  c.se = j.at("se").get<std::vector<double>>();
  c.n_folds = j.at("n_folds").get<int>();
  return c;
}

json entry_to_json(const lasso::PathEntry& e, Eigen::Index p) {
  (void)p;
  return json{{"lambda", e.lambda},
              {"intercept", e.intercept},
              {"deviance", e.deviance},
              {"nonzero_count", e.nonzero_count},
              {"beta", sparse_to_json(e.beta)}};
}

lasso::PathEntry entry_from_json(const json& j, Eigen::Index p) {
  lasso::PathEntry e;
  e.lambda = j.at("lambda").get<double>();
  e.intercept = j.at("intercept").get<double>();
  e.deviance = j.at("deviance").get<double>();
  e.nonzero_count = j.at("nonzero_count").get<int>();
  e.beta = sparse_from_json(j.at("beta"), p);
  return e;
}

json path_to_json(const lasso::LassoPath& path, Eigen::Index p) {
  json entries = json::array();
  for (const auto& e : path.entries) entries.push_back(entry_to_json(e, p));
  return json{{"lambda_max", path.lambda_max},
              {"penalty_factors", pf_to_json(path.penalty_factors)},
              {"warnings", path.warnings},
              {"entries", entries}};
}

lasso::LassoPath path_from_json(const json& j, Eigen::Index p) {
  lasso::LassoPath path;
  path.lambda_max = j.at("lambda_max").get<double>();
  path.penalty_factors = pf_from_json(j.at("penalty_factors"));
  path.warnings = j.at("warnings").get<std::vector<std::string>>();
  for (const auto& e : j.at("entries")) path.entries.push_back(entry_from_json(e, p));
  return path;
}

json feature_to_json(const FeatureMeta& f) {
  return json{{"name", f.name},
              {"kind", f.kind == FeatureKind::Continuous ? "continuous" : "categorical"},
              {"levels", f.levels},
              {"candidate", f.interaction_candidate}};
}

FeatureMeta feature_from_json(const json& j) {
  FeatureMeta f;
  f.name = j.at("name").get<std::string>();
  f.kind = j.at("kind").get<std::string>() == "continuous"
               ? FeatureKind::Continuous
               : FeatureKind::Categorical;
  f.levels = j.at("levels").get<std::vector<std::string>>();
  f.interaction_candidate = j.at("candidate").get<bool>();
  return f;
}

json lasso_bundle_to_json(const workflow::LassoBundle& b) {
  const auto p = static_cast<Eigen::Index>(b.design.col_names.size());
  return json{{"design", design_to_json(b.design)},
              {"path", path_to_json(b.path, p)},
              {"lambda_grid", b.lambda_grid},
              {"curve", curve_to_json(b.curve)},
              {"selected_index", b.selected_index}};
}

workflow::LassoBundle lasso_bundle_from_json(const json& j) {
  workflow::LassoBundle b;
  b.design = design_from_json(j.at("design"));
  const auto p = static_cast<Eigen::Index>(b.design.col_names.size());
  b.path = path_from_json(j.at("path"), p);
  b.lambda_grid = j.at("lambda_grid").get<std::vector<double>>();
  b.curve = curve_from_json(j.at("curve"));
  b.selected_index = j.at("selected_index").get<int>();
  return b;
}

json glint_bundle_to_json(const workflow::GlinternetBundle& b) {
  const auto& st = b.model.structure;
  json groups = json::array();
  for (const auto& g : st.groups)
    groups.push_back(json{{"is_interaction", g.is_interaction},
                          {"feature_i", g.feature_i},
                          {"feature_j", g.feature_j},
                          {"cols", g.cols},
                          {"interaction_offset", g.interaction_offset},
                          {"weight", g.weight}});
  json pairs = json::array();
  for (const auto& pr : st.pairs) pairs.push_back(json::array({pr.first, pr.second}));
  json features = json::array();
  for (const auto& f : b.model.features) features.push_back(feature_to_json(f));
  json entries = json::array();
  for (const auto& e : b.model.entries)
    entries.push_back(json{{"lambda", e.lambda},
                           {"intercept", e.intercept},
                           {"deviance", e.deviance},
                           {"theta", sparse_to_json(e.theta)}});
  return json{{"structure",
               json{{"n_features", st.n_features},
                    {"n_columns", st.n_columns},
                    {"groups", groups},
                    {"pairs", pairs}}},
              {"transform",
               json{{"mean", vec_to_json(b.model.transform.mean)},
                    {"scale", vec_to_json(b.model.transform.scale)}}},
              {"features", features},
              {"entries", entries},
              {"lambda_max", b.model.lambda_max},
              {"warnings", b.model.warnings},
              {"lambda_grid", b.lambda_grid},
              {"curve", curve_to_json(b.curve)},
              {"selected_index", b.selected_index}};
}

workflow::GlinternetBundle glint_bundle_from_json(const json& j) {
  workflow::GlinternetBundle b;
  const auto& js = j.at("structure");
  b.model.structure.n_features = js.at("n_features").get<int>();
  b.model.structure.n_columns = js.at("n_columns").get<int>();
  for (const auto& jg : js.at("groups")) {
    glinternet::Group g;
    g.is_interaction = jg.at("is_interaction").get<bool>();
    g.feature_i = jg.at("feature_i").get<int>();
    g.feature_j = jg.at("feature_j").get<int>();
    g.cols = jg.at("cols").get<std::vector<int>>();
    g.interaction_offset = jg.at("interaction_offset").get<int>();
    g.weight = jg.at("weight").get<double>();
    b.model.structure.groups.push_back(std::move(g));
  }
  for (const auto& jp : js.at("pairs"))
    b.model.structure.pairs.emplace_back(jp[0].get<int>(), jp[1].get<int>());
  b.model.transform.mean = vec_from_json(j.at("transform").at("mean"));
  b.model.transform.scale = vec_from_json(j.at("transform").at("scale"));
  for (const auto& jf : j.at("features"))
    b.model.features.push_back(feature_from_json(jf));
  const auto P = static_cast<Eigen::Index>(b.model.structure.n_columns);
  for (const auto& je : j.at("entries")) {
    glinternet::GlinternetEntry e;
    e.lambda = je.at("lambda").get<double>();
    e.intercept = je.at("intercept").get<double>();
    e.deviance = je.at("deviance").get<double>();
    e.theta = sparse_from_json(je.at("theta"), P);
    b.model.entries.push_back(std::move(e));
  }
  b.model.lambda_max = j.at("lambda_max").get<double>();
  b.model.warnings = j.at("warnings").get<std::vector<std::string>>();
  b.lambda_grid = j.at("lambda_grid").get<std::vector<double>>();
  b.curve = curve_from_json(j.at("curve"));
  b.selected_index = j.at("selected_index").get<int>();
  return b;
}

json pretrained_bundle_to_json(const workflow::PretrainedBundle& b) {
  const auto& m = b.model;
  const auto p = static_cast<Eigen::Index>(m.overall.design.col_names.size());
  json groups = json::array();
  for (const auto& [label, fit] : m.groups)
    groups.push_back(json{{"label", label},
                          {"entry", entry_to_json(fit.entry, p)},
                          {"lambda_index", fit.lambda_index},
                          {"lambda_grid", fit.lambda_grid},
                          {"curve", curve_to_json(fit.curve)}});
  return json{{"design", design_to_json(m.overall.design)},
              {"mu0", m.overall.mu0},
              {"beta0", sparse_to_json(m.overall.beta0)},
              {"support", m.overall.support},
              {"lambda_index", m.overall.lambda_index},
              {"lambda_grid", m.overall.lambda_grid},
              {"curve", curve_to_json(m.overall.curve)},
              {"alpha", m.alpha},
              {"penalty_factors", pf_to_json(m.penalty_factors)},
              {"groups", groups}};
}

workflow::PretrainedBundle pretrained_bundle_from_json(const json& j) {
  workflow::PretrainedBundle b;
  auto& m = b.model;
  m.overall.design = design_from_json(j.at("design"));
  const auto p = static_cast<Eigen::Index>(m.overall.design.col_names.size());
  m.overall.mu0 = j.at("mu0").get<double>();
  m.overall.beta0 = sparse_from_json(j.at("beta0"), p);
  m.overall.support = j.at("support").get<std::vector<int>>();
  m.overall.lambda_index = j.at("lambda_index").get<int>();
  m.overall.lambda_grid = j.at("lambda_grid").get<std::vector<double>>();
  m.overall.curve = curve_from_json(j.at("curve"));
  m.alpha = j.at("alpha").get<double>();
  m.penalty_factors = pf_from_json(j.at("penalty_factors"));
  for (const auto& jg : j.at("groups")) {
    pretrain::GroupFit fit;
    fit.label = jg.at("label").get<std::string>();
    fit.entry = entry_from_json(jg.at("entry"), p);
    fit.lambda_index = jg.at("lambda_index").get<int>();
    fit.lambda_grid = jg.at("lambda_grid").get<std::vector<double>>();
    fit.curve = curve_from_json(jg.at("curve"));
    m.groups.emplace(fit.label, std::move(fit));
  }
  return b;
}

}  // namespace

void save_model(const workflow::ModelFile& model, const std::string& path) {
  json j;
  j["kind"] = model.meta.model_kind;
  j["meta"] = json{{"data_config", model.meta.data_config},
                   {"outcome", model.meta.outcome_name},
                   {"seed", model.meta.seed},
                   {"test_fraction", model.meta.test_fraction},
                   {"test_rows", model.meta.test_rows}};
  if (model.meta.model_kind == "lasso") {
    j["model"] = lasso_bundle_to_json(model.lasso);
  } else if (model.meta.model_kind == "glinternet") {
    j["model"] = glint_bundle_to_json(model.glint);
  } else if (model.meta.model_kind == "ptlasso") {
    j["model"] = pretrained_bundle_to_json(model.pretrained);
  } else {
    throw InvalidConfig("unknown model kind: " + model.meta.model_kind);
  }
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open for writing: " + path);
  out << j.dump(1) << '\n';
}

workflow::ModelFile load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open model file: " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ParseError("bad model file " + path + ": " + e.what());
  }
  workflow::ModelFile model;
  model.meta.model_kind = j.at("kind").get<std::string>();
  const auto& jm = j.at("meta");
  model.meta.data_config = jm.at("data_config").get<std::string>();
  model.meta.outcome_name = jm.at("outcome").get<std::string>();
  model.meta.seed = jm.at("seed").get<std::uint64_t>();
  model.meta.test_fraction = jm.at("test_fraction").get<double>();
  model.meta.test_rows = jm.at("test_rows").get<std::vector<int>>();
  if (model.meta.model_kind == "lasso") {
    model.lasso = lasso_bundle_from_json(j.at("model"));
  } else if (model.meta.model_kind == "glinternet") {
    model.glint = glint_bundle_from_json(j.at("model"));
  } else if (model.meta.model_kind == "ptlasso") {
    model.pretrained = pretrained_bundle_from_json(j.at("model"));
  } else {
    throw ParseError("unknown model kind in " + path);
  }
  return model;
}

}  // namespace stratlasso::serialize
