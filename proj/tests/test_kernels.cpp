#include <doctest.h>

#include "helpers.hpp"
#include "stratlasso/kernels.hpp"
#include "stratlasso/threading.hpp"

using namespace stratlasso;

TEST_CASE("parallel kernels match the serial reference bit for bit") {
  Rng rng(101);
  for (const auto [n, p] : {std::pair{50, 4}, {5000, 40}, {20001, 37}}) {
    Eigen::MatrixXd X(n, p);
    Eigen::VectorXd beta(p), r(n), y(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < p; ++j) X(i, j) = rng.normal();
    for (int j = 0; j < p; ++j) beta(j) = rng.normal();
    for (int i = 0; i < n; ++i) r(i) = rng.normal();
    for (int i = 0; i < n; ++i) y(i) = rng.bernoulli(0.3) ? 1.0 : 0.0;
    Eigen::VectorXd offset = r * 0.1;

    for (int threads : {1, 2, 8}) {
      set_max_threads(threads);
      Eigen::VectorXd a, b;
      kernels::linear_predictor_serial(X, beta, 0.25, &offset, a);
      kernels::linear_predictor(X, beta, 0.25, &offset, b);
      CHECK(a == b);

      kernels::column_dots_serial(X, r, a);
      kernels::column_dots(X, r, b);
      CHECK(a == b);

      std::vector<int> cols = {0, 2, p - 1};
      kernels::column_dots_subset_serial(X, r, cols, a);
      kernels::column_dots_subset(X, r, cols, b);
      CHECK(a == b);

      kernels::linear_predictor_serial(X, beta, 0.0, nullptr, a);
      CHECK(kernels::logistic_loss_serial(y, a) == kernels::logistic_loss(y, a));

      Eigen::VectorXd pa, pb;
      kernels::sigmoid_probs_serial(a, pa);
      kernels::sigmoid_probs(a, pb);
      CHECK(pa == pb);
    }
    set_max_threads(0);
  }
}

TEST_CASE("sigmoid saturates without NaN") {
  CHECK(kernels::sigmoid(1e6) == doctest::Approx(1.0));
  CHECK(kernels::sigmoid(-1e6) == doctest::Approx(0.0));
  CHECK(kernels::sigmoid(1e6) < 1.0);
  CHECK(kernels::sigmoid(-1e6) > 0.0);
  CHECK(kernels::sigmoid(0.0) == 0.5);
}

TEST_CASE("logistic loss matches the naive formula") {
  Rng rng(7);
  Eigen::VectorXd eta(40), y(40);
  for (int i = 0; i < 40; ++i) {
    eta(i) = 3.0 * rng.normal();
    y(i) = rng.bernoulli(0.5) ? 1.0 : 0.0;
  }
  double naive = 0.0;
  for (int i = 0; i < 40; ++i) {
    const double p = 1.0 / (1.0 + std::exp(-eta(i)));
    naive += -(y(i) * std::log(p) + (1.0 - y(i)) * std::log(1.0 - p));
  }
  naive /= 40.0;
  CHECK(kernels::logistic_loss_serial(y, eta) == doctest::Approx(naive).epsilon(1e-12));
}
