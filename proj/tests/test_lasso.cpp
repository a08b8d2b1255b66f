#include <doctest.h>

#include <limits>

#include "helpers.hpp"
#include "stratlasso/errors.hpp"
#include "stratlasso/kernels.hpp"
#include "stratlasso/lasso.hpp"

using namespace stratlasso;
namespace th = testhelpers;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("soft threshold") {
  CHECK(lasso::soft_threshold(3.0, 1.0) == 2.0);
  CHECK(lasso::soft_threshold(-0.5, 1.0) == 0.0);
  CHECK(lasso::soft_threshold(-3.0, 1.0) == -2.0);
  CHECK(lasso::soft_threshold(0.0, 0.0) == 0.0);
  CHECK(lasso::soft_threshold(2.5, 0.0) == 2.5);
}

TEST_CASE("default lambda path is log-linear with pinned endpoints") {
  const auto p3 = lasso::default_lambda_path(1.0, 3, 0.01);
  REQUIRE(p3.size() == 3);
  CHECK(p3[0] == 1.0);
  CHECK(p3[1] == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(p3[2] == doctest::Approx(0.01).epsilon(1e-12));

  const auto p2 = lasso::default_lambda_path(2.0, 2, 0.5);
  REQUIRE(p2.size() == 2);
  CHECK(p2[0] == 2.0);
  CHECK(p2[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("lambda_max: closed form for balanced y, centered X, no offset") {
  Rng rng(2);
  const auto inst = th::random_instance(rng, 60, 5);
  Eigen::VectorXd y(60);
  for (int i = 0; i < 60; ++i) y(i) = i % 2 ? 1.0 : 0.0;  // exactly balanced
  const Eigen::VectorXd pf = Eigen::VectorXd::Ones(5);
  const double lmax = lasso::lambda_max(inst.X, y, pf, nullptr);
  const Eigen::VectorXd centered = y.array() - 0.5;
  double expect = 0.0;
  for (int j = 0; j < 5; ++j)
    expect = std::max(expect, std::abs(inst.X.col(j).dot(centered)) / 60.0);
  CHECK(lmax == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("lambda_max requires a penalized feature") {
  Eigen::MatrixXd X(4, 2);
  X << 1, 2, -1, 0, 2, 1, -2, -3;
  Eigen::VectorXd y(4);
  y << 1, 0, 1, 0;
  Eigen::VectorXd pf(2);
  pf << 0.0, kInf;
  CHECK_THROWS_AS(lasso::lambda_max(X, y, pf, nullptr), NoPenalizedFeatures);
}

TEST_CASE("fit at and above lambda_max keeps every penalized coefficient zero") {
  Rng rng(11);
  const auto inst = th::random_instance(rng, 50, 6);
  const Eigen::VectorXd pf = Eigen::VectorXd::Ones(6);
  const double lmax = lasso::lambda_max(inst.X, inst.y, pf, nullptr);

  for (double lambda : {lmax, 1.01 * lmax}) {
    lasso::PenaltySpec spec;
    spec.lambda_path = {lambda};
    const auto path = lasso::fit_logistic_lasso(inst.X, inst.y, spec, 1e-7);
    REQUIRE(path.entries.size() == 1);
    CHECK(path.entries[0].beta.lpNorm<Eigen::Infinity>() == 0.0);
    CHECK(path.entries[0].nonzero_count == 0);
    const double ybar = inst.y.mean();
    CHECK(path.entries[0].intercept ==
          doctest::Approx(std::log(ybar / (1.0 - ybar))).epsilon(1e-9));
  }
}

TEST_CASE("tiny-lambda fit matches the independent unpenalized Newton oracle") {
  int done = 0;
  std::uint64_t seed = 1000;
  while (done < 8) {
    Rng rng(seed++);
    const auto inst = th::random_instance(rng, 40, 3);
    if (!th::has_both_classes(inst.y)) continue;
    double mu_star;
    Eigen::VectorXd beta_star;
    if (!th::newton_logistic(inst.X, inst.y, mu_star, beta_star)) continue;

    const Eigen::VectorXd pf = Eigen::VectorXd::Ones(3);
    const double lmax = lasso::lambda_max(inst.X, inst.y, pf, nullptr);
    lasso::PenaltySpec spec;
    spec.lambda_path = {lmax, lmax * 1e-2, lmax * 1e-5, lmax * 1e-9};
    const auto path = lasso::fit_logistic_lasso(inst.X, inst.y, spec, 1e-8);
    const auto& last = path.entries.back();
    CHECK((last.beta - beta_star).lpNorm<Eigen::Infinity>() < 1e-6);
    CHECK(std::abs(last.intercept - mu_star) < 1e-6);
    ++done;
  }
}

TEST_CASE("infinite penalty factor excludes a coordinate exactly") {
  Rng rng(23);
  const auto inst = th::random_instance(rng, 80, 3, 1.5);
  lasso::PenaltySpec spec;
  spec.penalty_factors.resize(3);
  spec.penalty_factors << 1.0, kInf, 1.0;
  spec.n_lambda = 20;
  const auto path = lasso::fit_logistic_lasso(inst.X, inst.y, spec);
  REQUIRE(path.entries.size() == 20);
  for (const auto& e : path.entries) CHECK(e.beta(1) == 0.0);
}

TEST_CASE("predict_proba: formula, saturation, dimension checks") {
  lasso::PathEntry entry;
  entry.intercept = 0.0;
  entry.beta = Eigen::VectorXd::Zero(2);
  Eigen::MatrixXd X(3, 2);
  X << 1, 2, -1, 0, 5, 5;

  auto p = lasso::predict_proba(entry, X);
  for (int i = 0; i < 3; ++i) CHECK(p(i) == 0.5);

  // mu=0.5, beta=[1,-1], x=[1,2], offset=-0.375 -> sigmoid(-0.875)
  entry.intercept = 0.5;
  entry.beta.resize(2);
  entry.beta << 1.0, -1.0;
  Eigen::MatrixXd X1(1, 2);
  X1 << 1.0, 2.0;
  Eigen::VectorXd off(1);
  off << -0.375;
  p = lasso::predict_proba(entry, X1, &off);
  CHECK(p(0) == doctest::Approx(1.0 / (1.0 + std::exp(0.875))).epsilon(1e-12));

  // saturation without NaN
  Eigen::MatrixXd Xbig(2, 2);
  Xbig << 1e8, 1e8, -1e8, -1e8;
  entry.beta << 10.0, 10.0;
  p = lasso::predict_proba(entry, Xbig);
  CHECK(std::isfinite(p(0)));
  CHECK(std::isfinite(p(1)));
  CHECK(p(0) > 0.0);
  CHECK(p(0) < 1.0);
  CHECK(p(1) > 0.0);
  CHECK(p(1) < 1.0);

  Eigen::MatrixXd Xbad(2, 3);
  Xbad.setZero();
  CHECK_THROWS_AS(lasso::predict_proba(entry, Xbad), DimensionMismatch);
}

TEST_CASE("KKT certificates hold along random warm-started paths") {
  // property over random small instances; the verifier recomputes gradients
  // from scratch rather than trusting the solver
  int checked = 0;
  std::uint64_t seed = 400;
  while (checked < 20) {
    Rng rng(seed++);
    const int n = 20 + static_cast<int>(rng.index(41));
    const int p = 2 + static_cast<int>(rng.index(9));
    const auto inst = th::random_instance(rng, n, p);
    if (!th::has_both_classes(inst.y)) continue;
    lasso::PenaltySpec spec;
    spec.n_lambda = 30;
    const auto path = lasso::fit_logistic_lasso(inst.X, inst.y, spec, 1e-6);
    const Eigen::VectorXd pf = Eigen::VectorXd::Ones(p);
    for (const auto& e : path.entries) {
      CHECK(th::verify_lasso_kkt(inst.X, inst.y, pf, nullptr, e.intercept, e.beta,
                                 e.lambda, path.lambda_max, 1e-6));
    }
    ++checked;
  }
}

TEST_CASE("warm path equals cold fits at matching lambdas") {
  Rng rng(92);
  const auto inst = th::random_instance(rng, 60, 5, 1.2);
  lasso::PenaltySpec spec;
  spec.n_lambda = 12;
  const auto warm = lasso::fit_logistic_lasso(inst.X, inst.y, spec, 1e-8);
  for (std::size_t t = 0; t < warm.entries.size(); t += 3) {
    lasso::PenaltySpec single;
    single.lambda_path = {warm.entries[t].lambda};
    const auto cold = lasso::fit_logistic_lasso(inst.X, inst.y, single, 1e-8);
    CHECK((warm.entries[t].beta - cold.entries[0].beta).lpNorm<Eigen::Infinity>() <
          1e-5);
  }
}

TEST_CASE("returned solution beats random perturbations of itself") {
  Rng rng(55);
  const auto inst = th::random_instance(rng, 50, 4, 1.0);
  lasso::PenaltySpec spec;
  spec.n_lambda = 10;
  const auto path = lasso::fit_logistic_lasso(inst.X, inst.y, spec, 1e-8);
  const auto& e = path.entries[5];
  const Eigen::VectorXd pf = Eigen::VectorXd::Ones(4);

  auto objective = [&](double mu, const Eigen::VectorXd& b) {
    Eigen::VectorXd eta = (inst.X * b).array() + mu;
    double pen = 0.0;
    for (int j = 0; j < 4; ++j) pen += std::abs(b(j));
    return kernels::logistic_loss_serial(inst.y, eta) + e.lambda * pen;
  };
  const double base = objective(e.intercept, e.beta);
  for (int k = 0; k < 100; ++k) {
    Eigen::VectorXd b = e.beta;
    for (int j = 0; j < 4; ++j) b(j) += 1e-3 * rng.normal();
    const double mu = e.intercept + 1e-3 * rng.normal();
    CHECK(objective(mu, b) >= base - 1e-12);
  }
}

TEST_CASE("a constant unpenalized column reproduces the intercept") {
  Rng rng(67);
  const auto inst = th::random_instance(rng, 60, 3, 1.0);

  lasso::PenaltySpec spec;
  spec.n_lambda = 8;
  const auto with_mu = lasso::fit_logistic_lasso(inst.X, inst.y, spec, 1e-9);

  // same data with an explicit all-ones column carrying pf = 0
  Eigen::MatrixXd Xc(60, 4);
  Xc.leftCols(3) = inst.X;
  Xc.col(3).setOnes();
  lasso::PenaltySpec spec2;
  spec2.lambda_path.assign(with_mu.entries.size(), 0.0);
  for (std::size_t t = 0; t < with_mu.entries.size(); ++t)
    spec2.lambda_path[t] = with_mu.entries[t].lambda;
  spec2.penalty_factors.resize(4);
  spec2.penalty_factors << 1, 1, 1, 0;
  const auto with_col = lasso::fit_logistic_lasso(Xc, inst.y, spec2, 1e-9);

  for (std::size_t t = 0; t < with_mu.entries.size(); ++t) {
    const auto& a = with_mu.entries[t];
    const auto& b = with_col.entries[t];
    // total constant term = intercept + coefficient on the ones column
    CHECK(std::abs(a.intercept - (b.intercept + b.beta(3))) < 1e-5);
    CHECK((a.beta - b.beta.head(3)).lpNorm<Eigen::Infinity>() < 1e-5);
  }
}

TEST_CASE("offset shifts the problem the way a fixed coefficient would") {
  Rng rng(71);
  const auto inst = th::random_instance(rng, 70, 4, 1.0);
  Eigen::VectorXd offset = inst.X.col(3) * 0.8;

  lasso::PenaltySpec spec;
  spec.offset = offset;
  spec.n_lambda = 6;
  const auto path = lasso::fit_logistic_lasso(inst.X, inst.y, spec, 1e-7);
  const Eigen::VectorXd pf = Eigen::VectorXd::Ones(4);
  for (const auto& e : path.entries)
    CHECK(th::verify_lasso_kkt(inst.X, inst.y, pf, &offset, e.intercept, e.beta,
                               e.lambda, path.lambda_max, 1e-6));
}

TEST_CASE("nonbinary outcome and bad penalty factors are rejected") {
  Eigen::MatrixXd X(3, 1);
  X << 1, 2, 3;
  Eigen::VectorXd y(3);
  y << 0, 1, 2;
  lasso::PenaltySpec spec;
  CHECK_THROWS_AS(lasso::fit_logistic_lasso(X, y, spec), NonBinaryOutcome);

  y << 0, 1, 0;
  spec.penalty_factors.resize(1);
  spec.penalty_factors << -1.0;
  CHECK_THROWS_AS(lasso::fit_logistic_lasso(X, y, spec), InvalidConfig);

  spec.penalty_factors.resize(2);
  spec.penalty_factors << 1.0, 1.0;
  CHECK_THROWS_AS(lasso::fit_logistic_lasso(X, y, spec), DimensionMismatch);
}

TEST_CASE("all-zero penalty factors mean an unpenalized fit") {
  Rng rng(81);
  const auto inst = th::random_instance(rng, 50, 2, 0.8);
  double mu_star;
  Eigen::VectorXd beta_star;
  REQUIRE(th::newton_logistic(inst.X, inst.y, mu_star, beta_star));

  lasso::PenaltySpec spec;
  spec.penalty_factors = Eigen::VectorXd::Zero(2);
  const auto path = lasso::fit_logistic_lasso(inst.X, inst.y, spec, 1e-8);
  REQUIRE(path.entries.size() == 1);
  CHECK((path.entries[0].beta - beta_star).lpNorm<Eigen::Infinity>() < 1e-6);
}
