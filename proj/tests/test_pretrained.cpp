#include <doctest.h>

#include <limits>
#include <set>

#include "helpers.hpp"
#include "stratlasso/dataset_ops.hpp"
#include "stratlasso/errors.hpp"
#include "stratlasso/pretrained.hpp"

using namespace stratlasso;
namespace pt = stratlasso::pretrain;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Two groups drawing on the same coefficients; minority much smaller.
Dataset two_group_shared_signal(int n_major, int n_minor, std::uint64_t seed,
                                int p = 8) {
  Dataset d;
  Rng rng(seed);
  const int n = n_major + n_minor;
  d.X.resize(n, p);
  d.y.resize(n);
  d.group.resize(static_cast<std::size_t>(n));
  for (int j = 0; j < p; ++j)
    d.features.push_back(
        {"x" + std::to_string(j), FeatureKind::Continuous, {}, j == 0});
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  beta(0) = 1.0;
  beta(1) = -0.8;
  beta(2) = 0.6;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) d.X(i, j) = rng.normal();
    const double logit = d.X.row(i).dot(beta);
    d.y(i) = rng.bernoulli(1.0 / (1.0 + std::exp(-logit))) ? 1.0 : 0.0;
    d.group[static_cast<std::size_t>(i)] = i < n_major ? "maj" : "min";
  }
  return d;
}

}  // namespace

TEST_CASE("compute_offset: limits and the direct formula") {
  Eigen::MatrixXd X(2, 2);
  X << 1, 2, 3, 4;
  Eigen::VectorXd beta(2);
  beta << 1.0, -1.0;

  // alpha = 1 kills the offset entirely
  CHECK(pt::compute_offset(X, 0.5, beta, 1.0).isZero(0.0));
  // zero overall model gives a zero offset
  CHECK(pt::compute_offset(X, 0.0, Eigen::VectorXd::Zero(2), 0.25).isZero(0.0));

  // x = [1,2], beta0 = [1,-1], mu0 = 0.5, alpha = 0.25 -> 0.75*(1-2+0.5)
  Eigen::MatrixXd X1(1, 2);
  X1 << 1, 2;
  const auto off = pt::compute_offset(X1, 0.5, beta, 0.25);
  CHECK(off(0) == doctest::Approx(-0.375).epsilon(1e-12));

  CHECK_THROWS_AS(pt::compute_offset(X1, 0.0, Eigen::VectorXd::Zero(3), 0.5),
                  DimensionMismatch);
  CHECK_THROWS_AS(pt::compute_offset(X1, 0.0, beta, 1.5), InvalidConfig);
}

TEST_CASE("penalty factors: direct substitution at alpha = 0.5") {
  // support {1,3} in 1-indexed terms is {0,2} here
  const auto pf = pt::compute_penalty_factors({0, 2}, 4, 0.5);
  CHECK(pf(0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(pf(1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(pf(2) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(pf(3) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("penalty factors: ratio outside/inside support equals 1/alpha") {
  for (double alpha : {0.1, 0.25, 0.5, 0.75, 0.9}) {
    const auto pf = pt::compute_penalty_factors({1}, 3, alpha);
    CHECK(pf(0) / pf(1) == doctest::Approx(1.0 / alpha).epsilon(1e-12));
    CHECK(pf(2) / pf(1) == doctest::Approx(1.0 / alpha).epsilon(1e-12));
  }
}

TEST_CASE("penalty factor boundaries after normalization") {
  // alpha -> 1: all factors collapse to zero, normalized to uniform ones
  const auto pf1 = pt::normalize_penalty_factors(pt::compute_penalty_factors({0}, 3, 1.0));
  CHECK(pf1 == Eigen::VectorXd::Ones(3));

  // alpha -> 0: outside the support excluded, inside pinned at 1
  const auto pf0 = pt::normalize_penalty_factors(pt::compute_penalty_factors({1}, 3, 0.0));
  CHECK(pf0(0) == kInf);
  CHECK(pf0(1) == 1.0);
  CHECK(pf0(2) == kInf);

  // interior alpha: minimum finite factor is exactly 1
  const auto pfm = pt::normalize_penalty_factors(pt::compute_penalty_factors({0, 2}, 4, 0.25));
  CHECK(pfm(0) == 1.0);
  CHECK(pfm(2) == 1.0);
  CHECK(pfm(1) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("offset scales linearly in (1 - alpha)") {
  Rng rng(3);
  Eigen::MatrixXd X(10, 3);
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 3; ++j) X(i, j) = rng.normal();
  Eigen::VectorXd beta(3);
  beta << 0.5, -1.0, 0.25;
  const auto base = pt::compute_offset(X, 0.4, beta, 0.0);
  for (double alpha : {0.25, 0.5, 0.75}) {
    const auto off = pt::compute_offset(X, 0.4, beta, alpha);
    for (int i = 0; i < 10; ++i)
      CHECK(off(i) == doctest::Approx((1.0 - alpha) * base(i)).epsilon(1e-12));
  }
}

TEST_CASE("fit_overall recovers a planted shared support") {
  const Dataset d = two_group_shared_signal(500, 100, 2024);
  const auto folds = make_folds(d, 3, 1);
  const auto overall = pt::fit_overall(d, folds, 30);
  CHECK(overall.lambda_index >= 0);
  CHECK(overall.curve.mean_deviance.size() == 30);
  // the three true features are in the support
  std::set<int> s(overall.support.begin(), overall.support.end());
  CHECK(s.count(0));
  CHECK(s.count(1));
  CHECK(s.count(2));
}

TEST_CASE("alpha = 1 group model equals an independent per-group lasso") {
  const Dataset d = two_group_shared_signal(300, 80, 7);
  const auto folds = make_folds(d, 3, 2);
  const auto overall = pt::fit_overall(d, folds, 25);
  const auto model = pt::fit_group_models(d, overall, 1.0, folds, 25);

  const auto by_group = d.rows_by_group();
  for (const auto& [label, rows] : by_group) {
    // plain lasso on the same design rows, same folds, same grid length
    const Eigen::MatrixXd X = apply_lasso_design(d, overall.design);
    Eigen::MatrixXd Xk(static_cast<Eigen::Index>(rows.size()), X.cols());
    Eigen::VectorXd yk(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      Xk.row(static_cast<Eigen::Index>(i)) = X.row(rows[i]);
      yk(static_cast<Eigen::Index>(i)) = d.y(rows[i]);
    }
    const double lmax =
        lasso::lambda_max(Xk, yk, Eigen::VectorXd::Ones(X.cols()), nullptr);
    const auto grid = lasso::default_lambda_path(lmax, 25, 1e-4);

    auto fit_fn = [&](const std::vector<int>& tr, const std::vector<int>& va) {
      Eigen::MatrixXd Xt(static_cast<Eigen::Index>(tr.size()), Xk.cols());
      Eigen::VectorXd yt(static_cast<Eigen::Index>(tr.size()));
      for (std::size_t i = 0; i < tr.size(); ++i) {
        Xt.row(static_cast<Eigen::Index>(i)) = Xk.row(tr[i]);
        yt(static_cast<Eigen::Index>(i)) = yk(tr[i]);
      }
      lasso::PenaltySpec spec;
      spec.lambda_path = grid;
      const auto path = lasso::fit_logistic_lasso(Xt, yt, spec);
      Eigen::MatrixXd Xv(static_cast<Eigen::Index>(va.size()), Xk.cols());
      for (std::size_t i = 0; i < va.size(); ++i)
        Xv.row(static_cast<Eigen::Index>(i)) = Xk.row(va[i]);
      std::vector<Eigen::VectorXd> probs;
      for (const auto& e : path.entries)
        probs.push_back(lasso::predict_proba(e, Xv));
      return probs;
    };
    const Dataset dk = d.subset(rows);
    const auto fk = folds.restrict_to(rows);
    const auto curve = cv::cv_deviance(fit_fn, dk, fk, grid);
    const int idx = cv::select_min(curve);
    lasso::PenaltySpec spec;
    spec.lambda_path = grid;
    const auto path = lasso::fit_logistic_lasso(Xk, yk, spec);
    const auto& plain = path.entries[static_cast<std::size_t>(idx)];

    const auto& fit = model.groups.at(label);
    CHECK((fit.entry.beta - plain.beta).lpNorm<Eigen::Infinity>() < 1e-6);
    CHECK(std::abs(fit.entry.intercept - plain.intercept) < 1e-6);
  }
}

TEST_CASE("alpha = 0 with empty support gives intercept-plus-offset only") {
  // labels independent of X: the overall CV minimum lands at a sparse entry;
  // force an empty support by construction
  const Dataset d = two_group_shared_signal(200, 60, 99);
  const auto folds = make_folds(d, 3, 5);
  auto overall = pt::fit_overall(d, folds, 20);
  overall.support.clear();
  overall.beta0.setZero();

  const auto model = pt::fit_group_models(d, overall, 0.0, folds, 20);
  for (const auto& [label, fit] : model.groups) {
    CHECK(fit.entry.beta.lpNorm<Eigen::Infinity>() == 0.0);
    CHECK(fit.entry.nonzero_count == 0);
  }
  // predictions route through sigmoid(mu_k + offset)
  const auto probs = pt::predict(model, d);
  const Eigen::MatrixXd X = apply_lasso_design(d, overall.design);
  for (int i = 0; i < 5; ++i) {
    const auto& fit = model.groups.at(d.group[static_cast<std::size_t>(i)]);
    const double off = 1.0 * (X.row(i).dot(overall.beta0) + overall.mu0);
    const double expect = 1.0 / (1.0 + std::exp(-(fit.entry.intercept + off)));
    CHECK(probs(i) == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("alpha = 0 keeps coefficients outside the support at exact zero") {
  const Dataset d = two_group_shared_signal(400, 120, 15);
  const auto folds = make_folds(d, 3, 3);
  const auto overall = pt::fit_overall(d, folds, 25);
  REQUIRE(!overall.support.empty());
  const auto model = pt::fit_group_models(d, overall, 0.0, folds, 25);
  std::set<int> s(overall.support.begin(), overall.support.end());
  for (const auto& [label, fit] : model.groups) {
    for (Eigen::Index j = 0; j < fit.entry.beta.size(); ++j)
      if (!s.count(static_cast<int>(j))) CHECK(fit.entry.beta(j) == 0.0);
  }
}

TEST_CASE("select_alpha: singleton grid and tie rule") {
  const Dataset d = two_group_shared_signal(150, 60, 31);
  const auto folds = make_folds(d, 3, 7);
  const auto overall = pt::fit_overall(d, folds, 15);
  CHECK(pt::select_alpha(d, overall, folds, {0.5}, 15) == 0.5);
  CHECK_THROWS_AS(pt::select_alpha(d, overall, folds, {}, 15), InvalidConfig);
  CHECK_THROWS_AS(pt::select_alpha(d, overall, folds, {1.5}, 15), InvalidConfig);
}

TEST_CASE("prediction routes by group and rejects unknown labels") {
  const Dataset d = two_group_shared_signal(200, 80, 55);
  const auto folds = make_folds(d, 3, 9);
  const auto overall = pt::fit_overall(d, folds, 15);
  const auto model = pt::fit_group_models(d, overall, 0.5, folds, 15);

  const auto p1 = pt::predict(model, d);
  CHECK(p1.size() == d.n_rows());

  // permuting rows permutes predictions identically
  std::vector<int> perm;
  for (int i = static_cast<int>(d.n_rows()) - 1; i >= 0; --i) perm.push_back(i);
  const Dataset rev = d.subset(perm);
  const auto p2 = pt::predict(model, rev);
  for (Eigen::Index i = 0; i < d.n_rows(); ++i)
    CHECK(p2(i) == p1(d.n_rows() - 1 - i));

  Dataset alien = d.subset({0, 1, 2});
  alien.group = {"maj", "nope", "min"};
  CHECK_THROWS_AS(pt::predict(model, alien), UnknownGroup);
  const auto p3 = pt::predict(model, alien, true);  // fallback to overall
  const Eigen::MatrixXd X = apply_lasso_design(alien, overall.design);
  const double eta = overall.mu0 + X.row(1).dot(overall.beta0);
  CHECK(p3(1) == doctest::Approx(1.0 / (1.0 + std::exp(-eta))).epsilon(1e-12));
}

TEST_CASE("a single-class group is refused by name") {
  Dataset d = two_group_shared_signal(60, 10, 77);
  for (int i = 60; i < 70; ++i) d.y(i) = 0.0;  // minority all negative
  const auto folds = make_folds(d.subset([] {
                                  std::vector<int> v(60);
                                  for (int i = 0; i < 60; ++i) v[static_cast<std::size_t>(i)] = i;
                                  return v;
                                }()),
                                3, 1);
  // folds built on the majority only; fit over the full data must refuse
  FoldAssignment full;
  full.k = 3;
  for (int i = 0; i < 70; ++i) full.fold_id.push_back(i % 3);
  const Dataset maj_only = d.subset([] {
    std::vector<int> v(60);
    for (int i = 0; i < 60; ++i) v[static_cast<std::size_t>(i)] = i;
    return v;
  }());
  const auto overall = pt::fit_overall(maj_only, folds, 10);
  CHECK_THROWS_AS(pt::fit_group_models(d, overall, 0.5, full, 10), DegenerateGroup);
}
