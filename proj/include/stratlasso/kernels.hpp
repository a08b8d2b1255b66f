#pragma once

#include <Eigen/Dense>
#include <vector>

namespace stratlasso::kernels {

// Data-parallel primitives shared by the solvers. Every kernel has a serial
// reference implementation and an OpenMP version; the parallel version
// computes each output element with the exact same expression as the serial
// one, so results are bitwise identical for any thread count. Reductions
// fill a per-element buffer in parallel and sum it in index order.

/// eta_i = mu + x_i . beta + offset_i   (offset may be null)
void linear_predictor_serial(const Eigen::MatrixXd& X, const Eigen::VectorXd& beta,
                             double mu, const Eigen::VectorXd* offset,
                             Eigen::VectorXd& eta);
void linear_predictor(const Eigen::MatrixXd& X, const Eigen::VectorXd& beta,
                      double mu, const Eigen::VectorXd* offset, Eigen::VectorXd& eta);

/// out_j = x_j . r for every column j.
void column_dots_serial(const Eigen::MatrixXd& X, const Eigen::VectorXd& r,
                        Eigen::VectorXd& out);
void column_dots(const Eigen::MatrixXd& X, const Eigen::VectorXd& r,
                 Eigen::VectorXd& out);

/// out[k] = x_{cols[k]} . r for a column subset.
void column_dots_subset_serial(const Eigen::MatrixXd& X, const Eigen::VectorXd& r,
                               const std::vector<int>& cols, Eigen::VectorXd& out);
void column_dots_subset(const Eigen::MatrixXd& X, const Eigen::VectorXd& r,
                        const std::vector<int>& cols, Eigen::VectorXd& out);

/// Mean logistic log-loss: (1/n) sum_i [log(1 + exp(eta_i)) - y_i eta_i].
/// Numerically stable for |eta| large.
double logistic_loss_serial(const Eigen::VectorXd& y, const Eigen::VectorXd& eta);
double logistic_loss(const Eigen::VectorXd& y, const Eigen::VectorXd& eta);

/// p_i = sigmoid(clamp(eta_i)); clamping keeps p strictly inside (0, 1).
void sigmoid_probs_serial(const Eigen::VectorXd& eta, Eigen::VectorXd& p);
void sigmoid_probs(const Eigen::VectorXd& eta, Eigen::VectorXd& p);

double sigmoid(double eta);

}  // namespace stratlasso::kernels
