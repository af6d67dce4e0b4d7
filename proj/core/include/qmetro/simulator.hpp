/* Copyright 2026 The qmetro Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#ifndef QMETRO_SIMULATOR_HPP_
#define QMETRO_SIMULATOR_HPP_

// Monte Carlo runs of the adaptive experiment. The probe qubit evolves under
// the residual Hamiltonian delta_beta . sigma with a noiseless ancilla and is
// measured in the Bell basis. Two estimation backends are provided: a
// Gaussian draw from the asymptotic covariance, and multinomial Bell counts
// followed by maximum likelihood.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qmetro/qfim.hpp"
#include "qmetro/qubit.hpp"
#include "qmetro/rng.hpp"

namespace qmetro {

/// Outcome order: Phi+, Psi+, Psi-, Phi-.
std::array<double, 4> bell_probabilities(const Vector3& delta_beta, double t);

/// (cos^2 theta, sin^2 theta n1^2, sin^2 theta n2^2, sin^2 theta n3^2).
std::array<double, 4> bell_probabilities_closed_form(const Vector3& delta_beta, double t);

struct BellOutcomeCounts {
  std::array<std::int64_t, 4> counts{};
  std::int64_t n = 0;
};

/// Multinomial draw by sequential binomials.
BellOutcomeCounts sample_counts(const std::array<double, 4>& p, std::int64_t n,
                                CounterRng& rng);

/// delta_beta_hat ~ N(delta_beta_true, C) with C the closed-form iteration
/// covariance.
Vector3 estimate_step_gaussian(const Vector3& delta_beta_true, double n, double t,
                               CounterRng& rng);

struct MleResult {
  Vector3 estimate = Vector3::Zero();
  int iterations = 0;
  double log_likelihood = 0.0;
};

/// Maximum-likelihood delta_beta from Bell counts by Fisher scoring started
/// at `prior`. The likelihood only sees n_i^2 and theta mod pi, so the mode
/// reached is the one nearest the prior. Throws MleNonconvergence after 200
/// iterations.
MleResult bell_mle(const BellOutcomeCounts& counts, double t, const Vector3& prior);

/// Exact inverse of the Bell probabilities with sign and theta branch taken
/// from the prior.
Vector3 bell_mle_closed_form(const BellOutcomeCounts& counts, double t, const Vector3& prior);

Vector3 estimate_step_bell(const Vector3& delta_beta_true, std::int64_t n, double t,
                           const Vector3& prior, CounterRng& rng);

enum class Backend { Gaussian, Bell };

struct TimeRefinement {
  bool enabled = false;
  std::int64_t extra_trials = 0;  // 0 selects n
};

struct ExperimentConfig {
  Vector3 beta_true = Vector3::Zero();
  int iterations = 1;
  std::int64_t trials = 1;
  Backend backend = Backend::Gaussian;
  std::uint64_t seed = 0;
  TimeRefinement refinement;
  // Rough bound on |beta_true| used to plan t_1 and the schedule; the true
  // norm when unset.
  std::optional<double> norm_bound;
  // Target |delta_beta| t for refined times; g0 when unset.
  std::optional<double> refinement_threshold;
};

/// Throws DomainError for invalid configurations.
void validate(const ExperimentConfig& config);

struct IterationTrace {
  int k = 1;
  Vector3 control = Vector3::Zero();     // beta_hat_{k-1}
  Vector3 delta_beta = Vector3::Zero();  // beta_true - control
  double dE2 = 0.0;                      // realized 4 |delta_beta|^2
  double dE2_planned = 0.0;              // recursion mean
  double d_plan = 1.0;                   // dE2 / dE2_planned
  double d_conditional = 1.0;            // dE2 / (4 Tr C_{k-1}); 1 for k = 1
  double t = 0.0;
  std::int64_t n = 0;
  Vector3 estimate = Vector3::Zero();    // beta_hat_k
  double error2 = 0.0;                   // |beta_hat_k - beta_true|^2
  double trace_c = 0.0;                  // Tr C_k at the realized residual
};

struct ExperimentTrace {
  std::vector<IterationTrace> iterations;
  double planned_v = 0.0;     // V_m from the schedule
  double realized_v = 0.0;    // |beta_hat_m - beta_true|^2
  double final_trace_c = 0.0;
  double t1_norm = 0.0;       // norm used to plan t_1
  bool t1_from_bound = false;
  bool aborted = false;
  std::string abort_reason;
};

ExperimentTrace run_adaptive_experiment(const ExperimentConfig& config, CounterRng& rng);

/// Repetition r uses stream r of config.seed.
std::vector<ExperimentTrace> run_experiments(const ExperimentConfig& config,
                                             std::int64_t repetitions, unsigned threads);

}  // namespace qmetro

#endif  // QMETRO_SIMULATOR_HPP_
