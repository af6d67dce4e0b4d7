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
#ifndef QMETRO_ADAPTIVE_HPP_
#define QMETRO_ADAPTIVE_HPP_

// Adaptive Hamiltonian control: per-iteration covariance under a residual
// control error, the optimal evolution time, the precision recursion and the
// equal-trials schedule, compared against exact (optimal) control.
//
// Notation used throughout: delta_beta is the Pauli vector of the residual
// Hamiltonian (beta_true - control); dE2 is the squared energy gap of that
// residual, 4 |delta_beta|^2; V is the total variance Tr C of the Pauli-basis
// estimators.

#include <array>
#include <optional>
#include <variant>
#include <vector>

#include "qmetro/qfim.hpp"
#include "qmetro/qubit.hpp"

namespace qmetro {

/// Constants derived from the optimal dimensionless time g0. They are solved
/// once (to 1e-12) on first use and never hard-coded.
struct AdaptiveConstants {
  double g0 = 0.0;
  double gain_g0 = 0.0;           // G(g0), per-iteration contraction with n = 1
  double weight = 0.0;            // g0^2 csc^2(g0)
  double adaptive_factor = 0.0;   // 4 g0^2 G(g0) / 3
  double alpha_factor = 0.0;      // 4 g0^2 csc^2(g0) - 1
};

const AdaptiveConstants& adaptive_constants();

/// G(x) = 1/(4x^2) + csc^2(x)/2 on (0, pi).
double gain(double x);

/// phi(g) = 1/g + 2 g csc^2(g); the next-iteration squared gap at fixed total
/// time is proportional to phi(|delta_beta| t).
double time_objective(double g);
double time_objective_derivative(double g);

/// Minimizer of time_objective on (0, pi) by golden-section search over
/// [0.5, 3.0]. A sign-change scan of the derivative guards the bracket
/// (Error(BracketFailure) otherwise). Tolerances below 1e-7 are finished by
/// bisection on the derivative, since function comparisons stall there.
double solve_g0(double tolerance);

/// QFIM of the Pauli coefficients with residual `delta_beta` at time t.
Matrix3 iteration_qfim(const Vector3& delta_beta, double t);

/// Closed-form (n F)^-1 for the residual `delta_beta`. Throws
/// DegenerateInput for delta_beta = 0 and DivergentTime at |delta_beta| t = k pi.
Covariance3 iteration_covariance(const Vector3& delta_beta, double n, double t);

/// Expected squared gap after an iteration of total time T_k and per-trial
/// time t_k, starting from squared gap dE2_k.
double expected_dE2_next(double total_time, double t, double dE2);

/// 2 g0 / sqrt(dE2).
double optimal_time(double dE2_mean);

/// G(g0) / n * dE2.
double recursion(double dE2_mean, double n);

struct IterationRecord {
  int k = 1;
  double n = 1.0;
  double t = 0.0;
  double dE2_mean = 0.0;  // <dE^2_k>
  double v = 0.0;         // predicted total variance after iteration k
};

struct TargetVariance {
  double v;
};
struct TargetIterations {
  int m;
};
using ScheduleTarget = std::variant<TargetVariance, TargetIterations>;

struct AdaptiveSchedule {
  std::vector<IterationRecord> records;
  int m = 0;
  double n = 0.0;
  double v0 = 0.0;
  double g0 = 0.0;
  std::optional<double> target;
  double v_m = 0.0;                 // from the recursion
  double total_time = 0.0;          // parallel trials: sum t_k
  double sequential_time = 0.0;     // sum n t_k
  double v_m_from_total_time = 0.0; // exact relation between V_m and sum t_k
  double v_m_large_n = 0.0;         // g0^2 G / (n T^2), valid for n >> G
  double v_oc = 0.0;                // optimal control with n trials of length T
  double ratio_vs_optimal = 0.0;    // v_m / v_oc
  double adaptive_factor = 0.0;     // r -> infinity limit of the ratio
};

/// Equal-trials schedule. Throws NoContraction when n <= G(g0).
AdaptiveSchedule plan_schedule(double v0, double n, const ScheduleTarget& target);

/// t_k = g0 V0^-1/2 (n/G)^((k-1)/2).
double planned_time(double v0, double n, int k);

struct OptimalControlBaseline {
  Covariance3 covariance;
  double v_oc = 0.0;
};

/// C = I / (4 n t^2) for exactly cancelled control.
OptimalControlBaseline optimal_control_baseline(double n_oc, double t_oc);

struct AlphaParameterBound {
  double mu_max = 0.0;          // max_{r != s} |(J^-1)_ir (J^-1)_is|
  double nu_max = 0.0;          // max_r (J^-1)_ir^2
  double adaptive_upper = 0.0;  // upper bound on C_alpha,ii after m iterations
  double optimal_lower = 0.0;   // lower bound on C_alpha,ii under optimal control
};

struct AlphaBoundReport {
  std::array<AlphaParameterBound, 3> params;
  double kappa = 0.0;            // V_m / V_oc
  double combined_factor = 0.0;  // (12 a - 3) / (1 + 2 a) * kappa, a = g0^2 csc^2 g0
  double headline_factor = 0.0;  // 4 a - 1
};

/// Bounds on the original-parameter variances implied by the Pauli-basis
/// totals. J[i][j] = d beta_i / d alpha_j. Throws SingularJacobian.
AlphaBoundReport alpha_variance_bounds(const Matrix3& jacobian, double v_m, double v_oc);

}  // namespace qmetro

#endif  // QMETRO_ADAPTIVE_HPP_
