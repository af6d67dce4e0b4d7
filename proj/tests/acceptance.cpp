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
// Acceptance checks. Each criterion prints one line:
//   criterion N PASS|FAIL <name>: <measurements> [runtime X ms < limit Y ms]
// Usage: qmetro_acceptance [--criterion N]. Exit status is 1 if any selected
// criterion fails, including by exceeding its runtime limit.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "qmetro/adaptive.hpp"
#include "qmetro/errors.hpp"
#include "qmetro/qfim.hpp"
#include "qmetro/robustness.hpp"
#include "qmetro/simulator.hpp"
#include "qmetro/variance.hpp"
#include "support/deviation_oracle.hpp"
#include "support/test_support.hpp"

namespace qmetro {
namespace {

using testing::Sampler;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double limit_ms;
  std::function<Outcome()> check;
};

template <typename... Args>
std::string fmt(const char* f, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Outcome g0_reproduction() {
  const double g0 = solve_g0(1e-6);
  return {std::abs(g0 - 1.2986) <= 1e-3, fmt("g0=%.12f target 1.2986 tol 1e-3", g0)};
}

Outcome adaptive_factor() {
  const AdaptiveConstants& c = adaptive_constants();
  const double factor = 4 * c.g0 * c.g0 * gain(c.g0) / 3;
  const AdaptiveSchedule s = plan_schedule(1.0, 1000.0, TargetIterations{6});
  const double rel = std::abs(s.ratio_vs_optimal / factor - 1);
  const bool ok = std::abs(factor - 1.55) <= 0.01 && rel <= 0.01;
  return {ok, fmt("factor=%.6f target 1.55 tol 0.01; V_m/V_oc(m=6,n=1000)=%.6f rel.dev %.4f tol 0.01",
                  factor, s.ratio_vs_optimal, rel)};
}

Outcome original_parameter_factor() {
  const double a = adaptive_constants().weight;
  const double headline = 4 * a - 1;
  Sampler s(3003);
  int violations = 0;
  double worst = 0.0;
  for (int k = 0; k < 500; ++k) {
    const Matrix3 j = s.jacobian();
    const Vector3 d = s.uniform(0.01, 3.0) * s.unit();
    const double n = s.uniform(1.0, 1000.0);
    const double t = adaptive_constants().g0 / d.norm();
    const Covariance3 cm = iteration_covariance(d, n, t);
    const OptimalControlBaseline oc = optimal_control_baseline(n, t);
    const Matrix3 ca = reparameterize_covariance(cm.m, j, Reparameterization::BetaToAlpha);
    const Matrix3 co = reparameterize_covariance(oc.covariance.m, j, Reparameterization::BetaToAlpha);
    const AlphaBoundReport r = alpha_variance_bounds(j, cm.trace(), oc.v_oc);
    for (int i = 0; i < 3; ++i) {
      const double slack = 1 + 1e-12;
      if (ca(i, i) > r.params[i].adaptive_upper * slack) ++violations;
      if (co(i, i) * slack < r.params[i].optimal_lower) ++violations;
      if (ca(i, i) > r.combined_factor * co(i, i) * slack) ++violations;
      worst = std::max(worst, ca(i, i) / co(i, i));
    }
  }
  const bool ok = std::abs(headline - 6.27) <= 0.01 && violations == 0;
  return {ok, fmt("4a-1=%.6f target 6.27 tol 0.01; violations=%d/1500 tol 0; max C_a/C_oc=%.4f", headline,
                  violations, worst)};
}

Outcome qfim_oracle() {
  Sampler s(3004);
  double worst = 0.0;
  for (int k = 0; k < 500; ++k) {
    const HamiltonianModel& m = s.model();
    const Vector3 a = s.alpha(m);
    double t = s.uniform(0.0, 20.0);
    if (t == 0.0) t = 20.0;
    const Matrix3 f = qfim_entangled(m, a, t).m;
    worst = std::max(worst, testing::max_abs(f - testing::qfim_by_quadrature(m, a, t)));
  }
  return {worst <= 1e-8, fmt("max|F - F_quad|=%.3e tol 1e-8 over 500 cases", worst)};
}

Outcome variance_formula() {
  Sampler s(3005);
  double worst = 0.0;
  int checked = 0, skipped = 0;
  while (checked < 500) {
    const HamiltonianModel& m = s.model();
    const Vector3 a = s.alpha(m);
    const double t = s.uniform(0.01, 20.0), n = s.uniform(1.0, 100.0);
    Vector3 closed;
    try {
      closed = closed_form_variances(m, a, t, n);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::DivergentTime && e.kind() != ErrorKind::SingularQfim) throw;
      ++skipped;
      continue;
    }
    const Vector3 inv = inverse_qfim_variances(m, a, t, n);
    for (int i = 0; i < 3; ++i) worst = std::max(worst, testing::rel_diff(closed[i], inv[i]));
    ++checked;
  }
  return {worst <= 1e-8, fmt("max rel diff=%.3e tol 1e-8 over 500 cases (%d pole draws redrawn)", worst, skipped)};
}

Outcome heisenberg_branch() {
  double worst = 0.0;
  const double n = 10.0;
  const Vector3 alpha(1.3, 0.4, -2.0);
  for (int i = 0; i <= 1000; ++i) {
    const double t = 0.1 * std::pow(1000.0, i / 1000.0);
    const double v = estimator_variances(btp_model(), alpha, t, n)[0];
    worst = std::max(worst, std::abs(v * 4 * n * t * t - 1));
  }
  return {worst <= 1e-10, fmt("max |v_B 4nt^2 - 1|=%.3e tol 1e-10 over 1001 t in [0.1,100]", worst)};
}

Outcome initial_state_optimality() {
  Sampler s(3007);
  double worst = 0.0;
  for (int k = 0; k < 500; ++k) {
    const HamiltonianModel& m = s.model();
    const Vector3 a = s.alpha(m);
    const double t = s.uniform(0.01, 20.0), x = s.uniform(0.0, 1.0);
    const Matrix3 df = qfim_weighted_initial(m, a, t, 0.5).m - qfim_weighted_initial(m, a, t, x).m;
    worst = std::min(worst, min_eigenvalue(df));
  }
  return {worst >= -1e-10, fmt("min eig(dF)=%.3e tol -1e-10 over 500 cases", worst)};
}

Outcome weak_commutativity() {
  Sampler s(3008);
  double worst = 0.0;
  for (int k = 0; k < 500; ++k) {
    const HamiltonianModel& m = s.model();
    worst = std::max(worst, weak_commutativity_residual(m, s.alpha(m), s.uniform(0.0, 20.0)));
  }
  return {worst < 1e-10, fmt("max residual=%.3e tol 1e-10 over 500 cases", worst)};
}

Outcome deviation_distribution() {
  const std::size_t n = 1000000;
  CounterRng rng(3009, 0);
  std::vector<double> d(n);
  double sum = 0.0;
  for (double& x : d) sum += (x = sample_deviation(rng));
  const double a = deviation_params().a, c = 2 * a + 1;
  const double sigma = std::sqrt((2 + 4 * a * a) / (c * c) / n);
  const double mean_dev = std::abs(sum / n - 1);
  const double mass = testing::integrate([](double x) { return deviation_pdf(x); }, 0.0, 60.0);
  const int bins = 200;
  const double width = 8.0 / bins;
  std::vector<double> counts(bins, 0.0);
  for (double x : d) {
    if (x < 8.0) counts[static_cast<int>(x / width)] += 1.0;
  }
  double l1 = 0.0;
  for (int b = 0; b < bins; ++b) {
    l1 += std::abs(counts[b] / n -
                   testing::integrate([](double x) { return deviation_pdf(x); }, b * width, (b + 1) * width));
  }
  const bool ok = mean_dev <= 3 * sigma && std::abs(mass - 1) <= 1e-6 && l1 < 0.02;
  return {ok, fmt("|mean-1|=%.2e tol 3sigma=%.2e; |mass-1|=%.2e tol 1e-6; L1=%.4f tol 0.02", mean_dev,
                  3 * sigma, std::abs(mass - 1), l1)};
}

Outcome robustness_probabilities() {
  double p[3];
  for (int m = 2; m <= 4; ++m) p[m - 2] = robustness_mc(m, 1000000, 20240, {.threads = 0}).p_below_one;
  const bool ok = p[0] > 0.5 && p[1] > p[0] && p[2] > p[1];
  return {ok, fmt("p(m=2)=%.4f p(m=3)=%.4f p(m=4)=%.4f; need >0.5 and increasing", p[0], p[1], p[2])};
}

Outcome end_to_end_bias() {
  ExperimentConfig c;
  c.beta_true = Vector3(0.8, -0.4, 0.3);
  c.iterations = 4;
  c.trials = 1000;
  c.seed = 3011;
  const auto traces = run_experiments(c, 500, 0);
  std::vector<double> ratio;
  double conditional = 0.0;
  for (const ExperimentTrace& tr : traces) {
    ratio.push_back(tr.realized_v / tr.planned_v);
    conditional += tr.final_trace_c / tr.planned_v / traces.size();
  }
  const double mean = std::accumulate(ratio.begin(), ratio.end(), 0.0) / ratio.size();
  std::sort(ratio.begin(), ratio.end());
  // Diagnostic only: the same runs with time refinement from a pooled
  // estimate 1000x sharper than the iteration's own.
  c.refinement.enabled = true;
  c.refinement.extra_trials = 1000 * c.trials;
  double refined = 0.0;
  for (const ExperimentTrace& tr : run_experiments(c, 500, 0)) refined += tr.realized_v / tr.planned_v / 500;
  const bool ok = mean <= 1.3 && mean >= 1 / 1.3;
  return {ok, fmt("mean realized/planned=%.4f tol factor 1.3; median %.4f; mean TrC_m/planned %.4f; "
                  "refined (extra 1000n) mean %.4f",
                  mean, ratio[ratio.size() / 2], conditional, refined)};
}

Outcome bell_saturation() {
  const Vector3 d(0.06, 0.05, -0.04);
  const double t = 1.0;
  const std::int64_t n = 100000;
  const int reps = 2000;
  const Matrix3 crb = iteration_covariance(d, static_cast<double>(n), t).m;
  const Eigen::LLT<Matrix3> chol(crb);
  std::vector<Vector3> est(reps);
  for (int r = 0; r < reps; ++r) {
    CounterRng rng(3012, r);
    const Vector3 prior = d + chol.matrixL() * Vector3(rng.normal(), rng.normal(), rng.normal());
    est[r] = estimate_step_bell(d, n, t, prior, rng);
  }
  Vector3 mean = Vector3::Zero();
  for (const Vector3& e : est) mean += e / reps;
  Matrix3 cov = Matrix3::Zero();
  for (const Vector3& e : est) cov += (e - mean) * (e - mean).transpose() / (reps - 1);
  const double rel = cov.trace() / crb.trace() - 1;
  return {std::abs(rel) <= 0.15, fmt("Tr C_emp/Tr (nF)^-1 - 1=%.4f tol 0.15 (|dE| t=%.3f)", rel, 2 * d.norm() * t)};
}

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all{
      {1, "g0 reproduction", 1.0, g0_reproduction},
      {2, "adaptive-vs-optimal factor", 10.0, adaptive_factor},
      {3, "original-parameter factor", 5e3, original_parameter_factor},
      {4, "QFIM oracle equivalence", 30e3, qfim_oracle},
      {5, "variance formula equivalence", 10e3, variance_formula},
      {6, "Heisenberg branch", 1e3, heisenberg_branch},
      {7, "initial-state optimality", 10e3, initial_state_optimality},
      {8, "weak commutativity", 10e3, weak_commutativity},
      {9, "deviation distribution", 30e3, deviation_distribution},
      {10, "robustness probabilities", 60e3, robustness_probabilities},
      {11, "end-to-end bias bound", 120e3, end_to_end_bias},
      {12, "Bell backend CRB saturation", 300e3, bell_saturation},
  };
  return all;
}

bool run_one(const Criterion& c) {
  // Cached constants are warmed outside the timed region.
  adaptive_constants();
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = c.check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  const bool in_time = ms < c.limit_ms;
  const bool pass = o.pass && in_time;
  std::printf("criterion %d %s %s: %s [runtime %.3f ms %s limit %g ms]\n", c.id, pass ? "PASS" : "FAIL", c.name,
              o.detail.c_str(), ms, in_time ? "<" : ">=", c.limit_ms);
  std::fflush(stdout);
  return pass;
}

}  // namespace
}  // namespace qmetro

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--criterion" && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: %s [--criterion N]\n", argv[0]);
      return 2;
    }
  }
  bool all = true;
  bool found = false;
  for (const auto& c : qmetro::criteria()) {
    if (only != 0 && c.id != only) continue;
    found = true;
    all = qmetro::run_one(c) && all;
  }
  if (!found) {
    std::fprintf(stderr, "no criterion %d\n", only);
    return 2;
  }
  return all ? 0 : 1;
}
