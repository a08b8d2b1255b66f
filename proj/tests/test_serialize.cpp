#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "helpers.hpp"
#include "stratlasso/dataset_ops.hpp"
#include "stratlasso/serialize.hpp"
#include "stratlasso/synthdata.hpp"
#include "stratlasso/workflow.hpp"

using namespace stratlasso;
namespace fs = std::filesystem;

namespace {

Dataset small_cohort(std::uint64_t seed) {
  auto c = synth::cohort_preset("null");
  c.groups[0].n = 120;
  c.groups[1].n = 120;
  c.p = 6;
  c.shared_effects = {{0, 1.0}, {1, -0.7}};
  c.seed = seed;
  return synth::generate(c).data;
}

}  // namespace

TEST_CASE("lasso model files round-trip to identical predictions") {
  const auto dir = fs::temp_directory_path() / "stratlasso_ser_lasso";
  fs::create_directories(dir);
  const Dataset train = small_cohort(41);
  const auto folds = make_folds(train, 3, 1);
  workflow::FitSettings settings;
  settings.n_lambda = 12;

  workflow::ModelFile m;
  m.meta.model_kind = "lasso";
  m.meta.data_config = "all";
  m.meta.seed = 1;
  m.meta.test_rows = {3, 5, 8};
  m.lasso = workflow::fit_lasso_bundle(train, folds, settings);

  const std::string path = (dir / "model.json").string();
  serialize::save_model(m, path);
  const auto r = serialize::load_model(path);

  CHECK(r.meta.model_kind == "lasso");
  CHECK(r.meta.test_rows == m.meta.test_rows);
  CHECK(r.lasso.selected_index == m.lasso.selected_index);
  CHECK(r.lasso.lambda_grid == m.lasso.lambda_grid);
  REQUIRE(r.lasso.path.entries.size() == m.lasso.path.entries.size());
  for (std::size_t t = 0; t < m.lasso.path.entries.size(); ++t) {
    CHECK(r.lasso.path.entries[t].beta == m.lasso.path.entries[t].beta);
    CHECK(r.lasso.path.entries[t].intercept == m.lasso.path.entries[t].intercept);
    CHECK(r.lasso.path.entries[t].lambda == m.lasso.path.entries[t].lambda);
  }
  CHECK(workflow::predict(r, train) == workflow::predict(m, train));

  // a second save of the loaded model is byte-identical
  const std::string path2 = (dir / "model2.json").string();
  serialize::save_model(r, path2);
  std::ifstream a(path), b(path2);
  std::string sa((std::istreambuf_iterator<char>(a)), {});
  std::string sb((std::istreambuf_iterator<char>(b)), {});
  CHECK(sa == sb);
  fs::remove_all(dir);
}

TEST_CASE("glinternet model files round-trip") {
  const auto dir = fs::temp_directory_path() / "stratlasso_ser_glint";
  fs::create_directories(dir);
  auto c = synth::cohort_preset("interaction");
  c.groups[0].n = 300;
  c.seed = 4;
  const Dataset train = synth::generate(c).data;
  const auto folds = make_folds(train, 3, 2);
  workflow::FitSettings settings;
  settings.n_lambda = 8;

  workflow::ModelFile m;
  m.meta.model_kind = "glinternet";
  m.meta.data_config = "all";
  m.glint = workflow::fit_glinternet_bundle(train, folds, settings);

  const std::string path = (dir / "model.json").string();
  serialize::save_model(m, path);
  const auto r = serialize::load_model(path);
  CHECK(r.glint.model.structure.n_columns == m.glint.model.structure.n_columns);
  CHECK(r.glint.model.structure.pairs == m.glint.model.structure.pairs);
  CHECK(r.glint.model.transform.mean == m.glint.model.transform.mean);
  REQUIRE(r.glint.model.entries.size() == m.glint.model.entries.size());
  for (std::size_t t = 0; t < m.glint.model.entries.size(); ++t)
    CHECK(r.glint.model.entries[t].theta == m.glint.model.entries[t].theta);
  CHECK(workflow::predict(r, train) == workflow::predict(m, train));
  fs::remove_all(dir);
}

TEST_CASE("pretrained model files round-trip, infinities included") {
  const auto dir = fs::temp_directory_path() / "stratlasso_ser_pt";
  fs::create_directories(dir);
  const Dataset train = small_cohort(91);
  const auto folds = make_folds(train, 3, 3);
  workflow::FitSettings settings;
  settings.n_lambda = 10;
  settings.alpha = 0.0;  // exercises the infinite penalty factors

  workflow::ModelFile m;
  m.meta.model_kind = "ptlasso";
  m.meta.data_config = "all";
  m.pretrained = workflow::fit_pretrained_bundle(train, folds, settings);

  const std::string path = (dir / "model.json").string();
  serialize::save_model(m, path);
  const auto r = serialize::load_model(path);
  CHECK(r.pretrained.model.alpha == 0.0);
  CHECK(r.pretrained.model.penalty_factors == m.pretrained.model.penalty_factors);
  CHECK(r.pretrained.model.overall.beta0 == m.pretrained.model.overall.beta0);
  CHECK(r.pretrained.model.overall.support == m.pretrained.model.overall.support);
  REQUIRE(r.pretrained.model.groups.size() == m.pretrained.model.groups.size());
  CHECK(workflow::predict(r, train) == workflow::predict(m, train));
  fs::remove_all(dir);
}
