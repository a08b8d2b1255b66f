#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "stratlasso/types.hpp"

namespace stratlasso::synth {

struct GroupSpec {
  std::string label;
  int n = 0;
  double intercept = 0.0;                         // group base-rate logit
  std::vector<std::pair<int, double>> effects;    // group-specific coefficients
};

struct InteractionSpec {
  int i = 0, j = 0;
  double coef = 0.0;
};

/// Stratified multi-group generator configuration. Features are standard
/// normal, AR(1)-correlated when rho > 0; the outcome is Bernoulli of
/// logit_i = intercept_g + x beta_shared + x beta_g + sum c_ij x_i x_j.
struct SynthConfig {
  std::vector<GroupSpec> groups;
  int p = 0;
  std::vector<std::pair<int, double>> shared_effects;
  std::vector<InteractionSpec> interactions;
  std::vector<int> candidate_indices;
  double rho = 0.0;  // AR(1) feature correlation, in [0, 1)
  std::uint64_t seed = 1;

  void validate() const;
};

struct SynthResult {
  Dataset data;
  Eigen::VectorXd true_logit;  // generating logit per row, the Bayes score
};

SynthResult generate(const SynthConfig& config);

/// Documented verification cohorts:
///   paperlike_small — five groups at a 54:1 majority:smallest ratio,
///                     p = 50, shared plus group-specific signals
///   transfer        — two groups with the same signal, 60-row minority
///   interaction     — one planted candidate x feature product term
///   null            — no signal at all
SynthConfig cohort_preset(const std::string& name);

/// Flat key-value config format (section.key = value).
SynthConfig read_config(const std::string& path);
void write_config(const SynthConfig& config, const std::string& path);

void write_truth_csv(const SynthResult& result, const std::string& path);

}  // namespace stratlasso::synth
