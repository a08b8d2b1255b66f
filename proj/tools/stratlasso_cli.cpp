// Command-line front end: generate verification cohorts, fit the three
// model families on a data configuration, evaluate against a baseline, and
// aggregate evaluation outputs into report tables.

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>

#include <CLI11.hpp>
#include <json.hpp>

#include "stratlasso/csv.hpp"
#include "stratlasso/dataset_ops.hpp"
#include "stratlasso/errors.hpp"
#include "stratlasso/evaluation.hpp"
#include "stratlasso/serialize.hpp"
#include "stratlasso/synthdata.hpp"
#include "stratlasso/threading.hpp"
#include "stratlasso/version.hpp"
#include "stratlasso/workflow.hpp"

namespace fs = std::filesystem;
using namespace stratlasso;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitPairing = 4;

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_manifest(const std::string& out_dir, const std::string& command,
                    const std::string& config_digest_source,
                    std::uint64_t seed,
                    const std::vector<std::string>& inputs,
                    const std::vector<std::string>& outputs) {
  nlohmann::json j;
  j["command"] = command;
  char digest[32];
  std::snprintf(digest, sizeof(digest), "%016llx",
                static_cast<unsigned long long>(fnv1a(config_digest_source)));
  j["config_digest"] = digest;
  j["seed"] = seed;
  j["inputs"] = inputs;
  j["outputs"] = outputs;
  j["timestamp"] = static_cast<long long>(
      std::chrono::duration_cast<std::chrono::seconds>(
          std::chrono::system_clock::now().time_since_epoch())
          .count());
  j["version"] = STRATLASSO_VERSION;
  std::ofstream out(out_dir + "/manifest.json");
  out << j.dump(1) << '\n';
}

int classify_data_error(const std::exception& e) {
  std::cerr << "error: " << e.what() << '\n';
  return kExitData;
}

// ---------------------------------------------------------------- synth ---

int cmd_synth(const std::string& preset, const std::string& config_path,
              const std::string& out_dir, long long seed_override) {
  synth::SynthConfig config;
  std::string digest_source;
  try {
    if (!config_path.empty()) {
      config = synth::read_config(config_path);
      digest_source = read_file(config_path);
    } else {
      config = synth::cohort_preset(preset);
      digest_source = "preset:" + preset;
    }
    if (seed_override >= 0) config.seed = static_cast<std::uint64_t>(seed_override);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  fs::create_directories(out_dir);
  const auto result = synth::generate(config);
  write_dataset(result.data, out_dir + "/data.csv");
  write_schema(result.data.features, out_dir + "/schema.txt");
  synth::write_truth_csv(result, out_dir + "/truth.csv");
  synth::write_config(config, out_dir + "/config.txt");
  write_manifest(out_dir, "synth", digest_source, config.seed,
                 config_path.empty() ? std::vector<std::string>{}
                                     : std::vector<std::string>{config_path},
                 {out_dir + "/data.csv", out_dir + "/schema.txt",
                  out_dir + "/truth.csv", out_dir + "/config.txt"});
  return 0;
}

// ------------------------------------------------------------------ fit ---

int cmd_fit(const std::string& data_path, const std::string& schema_path,
            const std::string& model_kind, const std::string& data_config,
            const std::string& outcome_col, const std::string& group_col,
            const std::string& out_dir, std::uint64_t seed, double test_fraction,
            int k_folds, int n_lambda, double alpha, double tol) {
  DataConfig config;
  try {
    config = DataConfig::parse(data_config);
    if (model_kind != "lasso" && model_kind != "glinternet" &&
        model_kind != "ptlasso")
      throw InvalidConfig("model must be lasso, glinternet or ptlasso");
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    const Dataset data = read_dataset(data_path, schema_path, outcome_col, group_col);
    auto [train_rows, test_rows] = split_train_test_indices(data, test_fraction, seed);
    const Dataset train_full = data.subset(train_rows);
    const Dataset train = assemble(train_full, config);
    const FoldAssignment folds = make_folds(train, k_folds, seed);

    workflow::FitSettings settings;
    settings.n_lambda = n_lambda;
    settings.k_folds = k_folds;
    settings.seed = seed;
    settings.alpha = alpha;
    if (model_kind == "glinternet") settings.glinternet_tol = tol;
    if (model_kind == "lasso") settings.lasso_tol = tol;

    workflow::ModelFile model;
    model.meta.model_kind = model_kind;
    model.meta.data_config = config.label();
    model.meta.outcome_name = outcome_col;
    model.meta.seed = seed;
    model.meta.test_fraction = test_fraction;
    model.meta.test_rows = test_rows;

    fs::create_directories(out_dir);
    std::vector<std::string> outputs = {out_dir + "/model.json",
                                        out_dir + "/cv_curve.csv"};
    if (model_kind == "lasso") {
      model.lasso = workflow::fit_lasso_bundle(train, folds, settings);
      cv::write_cv_csv(model.lasso.curve, out_dir + "/cv_curve.csv");
    } else if (model_kind == "glinternet") {
      model.glint = workflow::fit_glinternet_bundle(train, folds, settings);
      cv::write_cv_csv(model.glint.curve, out_dir + "/cv_curve.csv");
      const auto stats = glinternet::path_statistics(
          model.glint.model, &model.glint.curve.mean_deviance);
      glinternet::write_path_stats_csv(stats, out_dir + "/path_stats.csv");
      glinternet::export_network(model.glint.model, model.glint.selected_index,
                                 out_dir + "/network.csv");
      outputs.push_back(out_dir + "/path_stats.csv");
      outputs.push_back(out_dir + "/network.csv");
    } else {
      model.pretrained = workflow::fit_pretrained_bundle(train, folds, settings);
      cv::write_cv_csv(model.pretrained.model.overall.curve,
                       out_dir + "/cv_curve.csv");
    }
    serialize::save_model(model, out_dir + "/model.json");

    const std::string digest_source =
        data_path + "|" + schema_path + "|" + model_kind + "|" + config.label() +
        "|" + std::to_string(seed) + "|" + std::to_string(n_lambda);
    write_manifest(out_dir, "fit", digest_source, seed, {data_path, schema_path},
                   outputs);
    return 0;
  } catch (const InvalidConfig& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    return classify_data_error(e);
  }
}

// ----------------------------------------------------------------- eval ---

int cmd_eval(const std::vector<std::string>& model_paths,
             const std::string& baseline_path, const std::string& data_path,
             const std::string& schema_path, const std::string& group,
             const std::string& out_dir, bool allow_fallback) {
  std::vector<workflow::ModelFile> models;
  workflow::ModelFile baseline;
  try {
    baseline = serialize::load_model(baseline_path);
    for (const auto& p : model_paths) models.push_back(serialize::load_model(p));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitPairing;
  }

  try {
    // paired evaluation requires the identical held-out rows everywhere
    for (const auto& m : models) {
      if (m.meta.test_rows != baseline.meta.test_rows ||
          m.meta.outcome_name != baseline.meta.outcome_name) {
        std::cerr << "error: model test sets are not paired with the baseline\n";
        return kExitPairing;
      }
    }

    const Dataset data = read_dataset(data_path, schema_path,
                                      baseline.meta.outcome_name, "group");
    Dataset test = data.subset(baseline.meta.test_rows);
    if (!group.empty()) {
      const auto cfg = DataConfig::group_only(group);
      test = assemble(test, cfg);
    }

    fs::create_directories(out_dir);
    std::vector<eval::RunResult> runs;
    std::ofstream scores_out(out_dir + "/scores_long.csv");
    scores_out << "outcome,method,data,row,label,score\n";

    auto add_model = [&](const workflow::ModelFile& m, const std::string& path) {
      eval::RunResult run;
      run.method = m.meta.model_kind;
      run.data = m.meta.data_config;
      run.outcome = m.meta.outcome_name;
      run.scores = workflow::predict(m, test, allow_fallback);
      run.labels = test.y;
      const auto roc = eval::roc_points(run.scores, run.labels);
      const std::string stem = fs::path(path).parent_path().filename().string();
      eval::write_roc_csv(roc, out_dir + "/roc_" + run.method + "_" +
                                   (stem.empty() ? "model" : stem) + ".csv");
      for (Eigen::Index i = 0; i < run.scores.size(); ++i)
        scores_out << run.outcome << ',' << run.method << ',' << run.data << ','
                   << i << ',' << static_cast<int>(run.labels(i)) << ','
                   << format_double(run.scores(i)) << '\n';
      runs.push_back(std::move(run));
    };

    add_model(baseline, baseline_path);
    for (std::size_t k = 0; k < models.size(); ++k)
      add_model(models[k], model_paths[k]);

    const auto report = eval::build_report(runs, baseline.meta.model_kind);
    eval::write_report_csv(report, out_dir + "/auc_grid.csv",
                           out_dir + "/comparisons.csv");
    std::ofstream(out_dir + "/report.txt") << eval::format_report_text(report);

    std::string digest_source = baseline_path;
    for (const auto& p : model_paths) digest_source += "|" + p;
    write_manifest(out_dir, "eval", digest_source, baseline.meta.seed,
                   model_paths, {out_dir + "/auc_grid.csv",
                                 out_dir + "/comparisons.csv",
                                 out_dir + "/scores_long.csv"});
    return 0;
  } catch (const MissingBaseline& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitPairing;
  } catch (const DimensionMismatch& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitPairing;
  } catch (const std::exception& e) {
    return classify_data_error(e);
  }
}

// --------------------------------------------------------------- report ---

int cmd_report(const std::vector<std::string>& score_files,
               const std::string& baseline_method, const std::string& out_dir) {
  try {
    struct Key {
      std::string outcome, method, data;
      bool operator<(const Key& o) const {
        return std::tie(outcome, method, data) < std::tie(o.outcome, o.method, o.data);
      }
    };
    std::map<Key, std::vector<std::pair<double, double>>> cells;  // label, score
    std::vector<Key> order;

    for (const auto& file : score_files) {
      std::ifstream in(file);
      if (!in) throw ParseError("cannot open: " + file);
      std::string line;
      if (!std::getline(in, line))
        throw ParseError("empty scores file: " + file);
      while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 6) throw ParseError("bad scores row in " + file);
        const Key key{f[0], f[1], f[2]};
        if (!cells.count(key)) order.push_back(key);
        cells[key].emplace_back(std::stod(f[4]), std::stod(f[5]));
      }
    }

    std::vector<eval::RunResult> runs;
    for (const auto& key : order) {
      const auto& rows = cells.at(key);
      eval::RunResult run;
      run.outcome = key.outcome;
      run.method = key.method;
      run.data = key.data;
      run.labels.resize(static_cast<Eigen::Index>(rows.size()));
      run.scores.resize(static_cast<Eigen::Index>(rows.size()));
      for (std::size_t i = 0; i < rows.size(); ++i) {
        run.labels(static_cast<Eigen::Index>(i)) = rows[i].first;
        run.scores(static_cast<Eigen::Index>(i)) = rows[i].second;
      }
      runs.push_back(std::move(run));
    }

    fs::create_directories(out_dir);
    const auto report = eval::build_report(runs, baseline_method);
    eval::write_report_csv(report, out_dir + "/auc_grid.csv",
                           out_dir + "/comparisons.csv");
    std::ofstream(out_dir + "/report.txt") << eval::format_report_text(report);
    std::string digest_source;
    for (const auto& f : score_files) digest_source += f + "|";
    write_manifest(out_dir, "report", digest_source, 0, score_files,
                   {out_dir + "/auc_grid.csv", out_dir + "/comparisons.csv",
                    out_dir + "/report.txt"});
    return 0;
  } catch (const MissingBaseline& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitPairing;
  } catch (const std::exception& e) {
    return classify_data_error(e);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"penalized logistic model families for stratified cohorts"};
  app.require_subcommand(1);

  int threads = 0;
  app.add_option("--threads", threads, "cap on worker threads (0 = auto)");

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic cohort");
  std::string preset, config_path, out_dir;
  long long seed_override = -1;
  synth_cmd->add_option("--preset", preset,
                        "paperlike_small | transfer | interaction | null");
  synth_cmd->add_option("--config", config_path, "synth config file");
  synth_cmd->add_option("--seed", seed_override, "override the config seed");
  synth_cmd->add_option("--out", out_dir, "output directory")->required();

  // fit
  auto* fit_cmd = app.add_subcommand("fit", "train one model");
  std::string data_path, schema_path, model_kind, data_config;
  std::string outcome_col = "outcome", group_col = "group";
  std::uint64_t seed = 1;
  double test_fraction = 0.2, alpha = -1.0, tol = 0.0;
  int k_folds = 3, n_lambda = 50;
  std::string fit_out;
  fit_cmd->add_option("--data", data_path, "data CSV")->required();
  fit_cmd->add_option("--schema", schema_path, "schema file")->required();
  fit_cmd->add_option("--model", model_kind, "lasso | glinternet | ptlasso")
      ->required();
  fit_cmd->add_option("--data-config", data_config,
                      "all | group:G | mix:MAJ,MIN")
      ->required();
  fit_cmd->add_option("--outcome-col", outcome_col, "outcome column name");
  fit_cmd->add_option("--group-col", group_col, "group column name");
  fit_cmd->add_option("--seed", seed, "split/fold seed");
  fit_cmd->add_option("--test-fraction", test_fraction, "held-out fraction");
  fit_cmd->add_option("--folds", k_folds, "CV folds");
  fit_cmd->add_option("--n-lambda", n_lambda, "lambda grid length");
  fit_cmd->add_option("--alpha", alpha, "ptlasso alpha; omit to CV-select");
  fit_cmd->add_option("--tol", tol, "solver tolerance override");
  fit_cmd->add_option("--out", fit_out, "output directory")->required();

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "evaluate models vs a baseline");
  std::vector<std::string> model_paths;
  std::string baseline_path, eval_data, eval_schema, eval_group, eval_out;
  bool allow_fallback = false;
  eval_cmd->add_option("--models", model_paths, "challenger model.json files");
  eval_cmd->add_option("--baseline", baseline_path, "baseline model.json")
      ->required();
  eval_cmd->add_option("--data", eval_data, "source data CSV")->required();
  eval_cmd->add_option("--schema", eval_schema, "schema file")->required();
  eval_cmd->add_option("--group", eval_group, "restrict test rows to one group");
  eval_cmd->add_flag("--allow-fallback", allow_fallback,
                     "score unknown groups with the overall ptlasso fit");
  eval_cmd->add_option("--out", eval_out, "output directory")->required();

  // report
  auto* report_cmd = app.add_subcommand("report", "combine eval score files");
  std::vector<std::string> score_files;
  std::string report_baseline = "lasso", report_out;
  report_cmd->add_option("--scores", score_files, "scores_long.csv files")
      ->required();
  report_cmd->add_option("--baseline-method", report_baseline, "baseline method");
  report_cmd->add_option("--out", report_out, "output directory")->required();

  CLI11_PARSE(app, argc, argv);
  set_max_threads(threads);

  if (synth_cmd->parsed()) {
    if (preset.empty() == config_path.empty()) {
      std::cerr << "error: give exactly one of --preset or --config\n";
      return kExitConfig;
    }
    return cmd_synth(preset, config_path, out_dir, seed_override);
  }
  if (fit_cmd->parsed()) {
    if (tol <= 0.0) tol = model_kind == "glinternet" ? 1e-5 : 1e-7;
    return cmd_fit(data_path, schema_path, model_kind, data_config, outcome_col,
                   group_col, fit_out, seed, test_fraction, k_folds, n_lambda,
                   alpha, tol);
  }
  if (eval_cmd->parsed())
    return cmd_eval(model_paths, baseline_path, eval_data, eval_schema, eval_group,
                    eval_out, allow_fallback);
  if (report_cmd->parsed())
    return cmd_report(score_files, report_baseline, report_out);
  return kExitConfig;
}
