// Timing comparison of the serial reference kernels against the OpenMP
// versions, and a spot check that both produce identical bits.

#include <chrono>
#include <cstdio>

#include "stratlasso/kernels.hpp"
#include "stratlasso/rng.hpp"
#include "stratlasso/threading.hpp"

using namespace stratlasso;

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                   t0)
      .count();
}

void fill(Eigen::MatrixXd& X, Eigen::VectorXd& y, Eigen::VectorXd& beta, Rng& rng) {
  for (Eigen::Index i = 0; i < X.rows(); ++i)
    for (Eigen::Index j = 0; j < X.cols(); ++j) X(i, j) = rng.normal();
  for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = rng.bernoulli(0.4) ? 1.0 : 0.0;
  for (Eigen::Index j = 0; j < beta.size(); ++j) beta(j) = rng.normal() * 0.3;
}

}  // namespace

int main() {
  Rng rng(42);
  const int reps = 20;
  std::printf("%-10s %-10s %-22s %12s %12s %9s %s\n", "rows", "cols", "kernel",
              "serial(ms)", "openmp(ms)", "speedup", "bitwise");

  for (const auto [n, p] : {std::pair{2000, 100}, {20000, 200}, {50000, 400}}) {
    Eigen::MatrixXd X(n, p);
    Eigen::VectorXd y(n), beta(p), r(n);
    fill(X, y, beta, rng);
    for (Eigen::Index i = 0; i < n; ++i) r(i) = rng.normal();

    Eigen::VectorXd a, b;
    auto t0 = std::chrono::steady_clock::now();
    for (int k = 0; k < reps; ++k) kernels::linear_predictor_serial(X, beta, 0.1, nullptr, a);
    const double ts1 = ms_since(t0) / reps;
    t0 = std::chrono::steady_clock::now();
    for (int k = 0; k < reps; ++k) kernels::linear_predictor(X, beta, 0.1, nullptr, b);
    const double tp1 = ms_since(t0) / reps;
    std::printf("%-10d %-10d %-22s %12.3f %12.3f %8.2fx %s\n", n, p,
                "linear_predictor", ts1, tp1, ts1 / tp1, a == b ? "yes" : "NO");

    t0 = std::chrono::steady_clock::now();
    for (int k = 0; k < reps; ++k) kernels::column_dots_serial(X, r, a);
    const double ts2 = ms_since(t0) / reps;
    t0 = std::chrono::steady_clock::now();
    for (int k = 0; k < reps; ++k) kernels::column_dots(X, r, b);
    const double tp2 = ms_since(t0) / reps;
    std::printf("%-10d %-10d %-22s %12.3f %12.3f %8.2fx %s\n", n, p, "column_dots",
                ts2, tp2, ts2 / tp2, a == b ? "yes" : "NO");

    kernels::linear_predictor_serial(X, beta, 0.1, nullptr, a);
    double l1 = 0, l2 = 0;
    t0 = std::chrono::steady_clock::now();
    for (int k = 0; k < reps; ++k) l1 = kernels::logistic_loss_serial(y, a);
    const double ts3 = ms_since(t0) / reps;
    t0 = std::chrono::steady_clock::now();
    for (int k = 0; k < reps; ++k) l2 = kernels::logistic_loss(y, a);
    const double tp3 = ms_since(t0) / reps;
    std::printf("%-10d %-10d %-22s %12.3f %12.3f %8.2fx %s\n", n, p, "logistic_loss",
                ts3, tp3, ts3 / tp3, l1 == l2 ? "yes" : "NO");
  }
  return 0;
}
