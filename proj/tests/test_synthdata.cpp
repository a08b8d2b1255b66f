#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "helpers.hpp"
#include "stratlasso/errors.hpp"
#include "stratlasso/evaluation.hpp"
#include "stratlasso/kernels.hpp"
#include "stratlasso/synthdata.hpp"

using namespace stratlasso;
namespace sy = stratlasso::synth;

TEST_CASE("null generator hits the base rate at n = 10000") {
  sy::SynthConfig c;
  c.groups = {{"g", 10000, 0.0, {}}};
  c.p = 3;
  c.seed = 17;
  const auto r = sy::generate(c);
  CHECK(std::abs(r.data.y.mean() - 0.5) < 0.03);
  CHECK(r.true_logit.lpNorm<Eigen::Infinity>() == 0.0);

  c.groups[0].intercept = -3.0;
  c.seed = 18;
  const auto r2 = sy::generate(c);
  CHECK(std::abs(r2.data.y.mean() - kernels::sigmoid(-3.0)) < 0.01);
}

TEST_CASE("same seed reproduces the dataset bit for bit") {
  const auto c = sy::cohort_preset("transfer");
  const auto a = sy::generate(c);
  const auto b = sy::generate(c);
  CHECK(a.data.X == b.data.X);
  CHECK(a.data.y == b.data.y);
  CHECK(a.true_logit == b.true_logit);

  auto c2 = c;
  c2.seed += 1;
  const auto d = sy::generate(c2);
  CHECK(a.data.X != d.data.X);
}

TEST_CASE("presets have the documented shapes") {
  const auto paperlike = sy::cohort_preset("paperlike_small");
  REQUIRE(paperlike.groups.size() == 5);
  int largest = 0, smallest = 1 << 30;
  for (const auto& g : paperlike.groups) {
    largest = std::max(largest, g.n);
    smallest = std::min(smallest, g.n);
  }
  CHECK(largest / smallest == 54);  // mirrors the cohort's 54:1 imbalance
  CHECK(paperlike.p == 50);
  CHECK(paperlike.candidate_indices.size() == 4);

  const auto null_cfg = sy::cohort_preset("null");
  CHECK(null_cfg.shared_effects.empty());
  CHECK(null_cfg.interactions.empty());
  for (const auto& g : null_cfg.groups) CHECK(g.effects.empty());

  const auto inter = sy::cohort_preset("interaction");
  CHECK(inter.interactions.size() == 1);

  const auto transfer = sy::cohort_preset("transfer");
  REQUIRE(transfer.groups.size() == 2);
  CHECK(transfer.groups[1].n == 60);

  CHECK_THROWS_AS(sy::cohort_preset("nope"), UnknownPreset);
}

TEST_CASE("per-group positive rates track the group intercepts") {
  sy::SynthConfig c;
  c.groups = {{"a", 6000, -1.0, {}}, {"b", 6000, 1.0, {}}};
  c.p = 2;
  c.seed = 5;
  const auto r = sy::generate(c);
  double mean_a = 0, mean_b = 0;
  for (int i = 0; i < 6000; ++i) mean_a += r.data.y(i);
  for (int i = 6000; i < 12000; ++i) mean_b += r.data.y(i);
  mean_a /= 6000;
  mean_b /= 6000;
  CHECK(std::abs(mean_a - kernels::sigmoid(-1.0)) < 0.03);
  CHECK(std::abs(mean_b - kernels::sigmoid(1.0)) < 0.03);
}

TEST_CASE("AR(1) correlation shows up in adjacent features") {
  sy::SynthConfig c;
  c.groups = {{"g", 20000, 0.0, {}}};
  c.p = 4;
  c.rho = 0.6;
  c.seed = 8;
  const auto r = sy::generate(c);
  for (int j = 0; j + 1 < 4; ++j) {
    const double corr =
        (r.data.X.col(j).array() * r.data.X.col(j + 1).array()).mean();
    CHECK(corr == doctest::Approx(0.6).epsilon(0.05));
  }
  // marginal variance stays one
  for (int j = 0; j < 4; ++j)
    CHECK(r.data.X.col(j).array().square().mean() == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("the true logit upper-bounds fitted scores as a ranker") {
  // with the generating logit in hand, no score can do better than it
  auto c = sy::cohort_preset("interaction");
  c.groups[0].n = 5000;
  c.seed = 23;
  const auto r = sy::generate(c);
  const double bayes = eval::auc(r.true_logit, r.data.y);
  // any other score, here a single-feature marginal, must not beat it
  const double marginal = eval::auc(r.data.X.col(0), r.data.y);
  CHECK(marginal <= bayes + 0.02);
  CHECK(bayes > 0.7);
}

TEST_CASE("config file round trip") {
  namespace fs = std::filesystem;
  const auto dir = fs::temp_directory_path() / "stratlasso_synth_test";
  fs::create_directories(dir);
  const std::string path = (dir / "c.txt").string();

  auto c = sy::cohort_preset("paperlike_small");
  sy::write_config(c, path);
  const auto r = sy::read_config(path);
  CHECK(r.p == c.p);
  CHECK(r.rho == c.rho);
  CHECK(r.seed == c.seed);
  CHECK(r.candidate_indices == c.candidate_indices);
  CHECK(r.shared_effects == c.shared_effects);
  REQUIRE(r.groups.size() == c.groups.size());
  for (std::size_t g = 0; g < c.groups.size(); ++g) {
    CHECK(r.groups[g].label == c.groups[g].label);
    CHECK(r.groups[g].n == c.groups[g].n);
    CHECK(r.groups[g].intercept == c.groups[g].intercept);
    CHECK(r.groups[g].effects == c.groups[g].effects);
  }
  // generated data from the round-tripped config is identical
  CHECK(sy::generate(c).data.X == sy::generate(r).data.X);

  fs::remove_all(dir);
}

TEST_CASE("invalid configs are rejected") {
  sy::SynthConfig c;
  c.p = 3;
  CHECK_THROWS_AS(sy::generate(c), InvalidConfig);  // no groups

  c.groups = {{"g", 10, 0.0, {}}};
  c.rho = 1.0;
  CHECK_THROWS_AS(sy::generate(c), InvalidConfig);

  c.rho = 0.0;
  c.shared_effects = {{7, 1.0}};
  CHECK_THROWS_AS(sy::generate(c), InvalidConfig);  // index out of range
}
