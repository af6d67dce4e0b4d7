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
#include "qmetro/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>

#include "qmetro/adaptive.hpp"
#include "qmetro/errors.hpp"
#include "qmetro/parallel.hpp"

namespace qmetro {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kMaxMleIterations = 200;

using Vector4c = Eigen::Matrix<Complex, 4, 1>;

Vector3 draw_normal(const Vector3& mean, const Matrix3& cov, CounterRng& rng) {
  const Eigen::SelfAdjointEigenSolver<Matrix3> es(cov);
  Vector3 z;
  for (int i = 0; i < 3; ++i) z[i] = std::sqrt(std::max(es.eigenvalues()[i], 0.0)) * rng.normal();
  return mean + es.eigenvectors() * z;
}

// Probabilities and their gradients with respect to delta_beta.
struct BellModel {
  std::array<double, 4> p{};
  std::array<Vector3, 4> grad{};
};

BellModel bell_model(const Vector3& beta, double t) {
  BellModel m;
  const double b = beta.norm();
  if (b == 0.0) {
    m.p = {1.0, 0.0, 0.0, 0.0};
    for (auto& g : m.grad) g.setZero();
    return m;
  }
  const Vector3 u = beta / b;
  const double s = std::sin(b * t), c = std::cos(b * t);
  const double ds2 = 2.0 * s * c * t;  // d sin^2(bt) / db
  m.p[0] = c * c;
  m.grad[0] = -ds2 * u;
  for (int i = 0; i < 3; ++i) {
    m.p[i + 1] = s * s * u[i] * u[i];
    Vector3 du2 = -2.0 * u[i] * u[i] * u / b;
    du2[i] += 2.0 * u[i] / b;
    m.grad[i + 1] = ds2 * u[i] * u[i] * u + s * s * du2;
  }
  return m;
}

double log_likelihood(const BellOutcomeCounts& counts, const std::array<double, 4>& p) {
  double l = 0.0;
  for (int k = 0; k < 4; ++k) {
    if (counts.counts[k] == 0) continue;
    if (!(p[k] > 0.0)) return -std::numeric_limits<double>::infinity();
    l += static_cast<double>(counts.counts[k]) * std::log(p[k]);
  }
  return l;
}

}  // namespace

std::array<double, 4> bell_probabilities(const Vector3& delta_beta, double t) {
  if (!(t >= 0.0)) fail(ErrorKind::DomainError, "time must be non-negative");
  const Matrix2c u = evolve_unitary(pauli_compose(PauliCoefficients{delta_beta}), t);
  // (U x I)|Phi+> in the basis |probe, ancilla> = |00>, |01>, |10>, |11>.
  const double r = 1.0 / std::sqrt(2.0);
  Vector4c psi;
  psi << r * u(0, 0), r * u(0, 1), r * u(1, 0), r * u(1, 1);
  std::array<Vector4c, 4> bell;
  bell[0] << r, 0.0, 0.0, r;
  bell[1] << 0.0, r, r, 0.0;
  bell[2] << 0.0, r, -r, 0.0;
  bell[3] << r, 0.0, 0.0, -r;
  std::array<double, 4> p{};
  for (int k = 0; k < 4; ++k) p[k] = std::norm(bell[k].dot(psi));
  return p;
}

std::array<double, 4> bell_probabilities_closed_form(const Vector3& delta_beta, double t) {
  if (!(t >= 0.0)) fail(ErrorKind::DomainError, "time must be non-negative");
  return bell_model(delta_beta, t).p;
}

BellOutcomeCounts sample_counts(const std::array<double, 4>& p, std::int64_t n,
                                CounterRng& rng) {
  if (n < 0) fail(ErrorKind::DomainError, "trial count must be non-negative");
  double total = 0.0;
  for (double x : p) {
    if (!(x >= 0.0)) fail(ErrorKind::DomainError, "probabilities must be non-negative");
    total += x;
  }
  if (std::abs(total - 1.0) > 1e-9) fail(ErrorKind::DomainError, "probabilities must sum to 1");
  BellOutcomeCounts out;
  out.n = n;
  std::int64_t left = n;
  double mass = 1.0;
  for (int k = 0; k < 3 && left > 0; ++k) {
    const double q = mass > 0.0 ? std::clamp(p[k] / mass, 0.0, 1.0) : 0.0;
    std::binomial_distribution<std::int64_t> draw(left, q);
    out.counts[k] = draw(rng);
    left -= out.counts[k];
    mass -= p[k];
  }
  out.counts[3] = left;
  return out;
}

Vector3 estimate_step_gaussian(const Vector3& delta_beta_true, double n, double t,
                               CounterRng& rng) {
  return draw_normal(delta_beta_true, iteration_covariance(delta_beta_true, n, t).m, rng);
}

MleResult bell_mle(const BellOutcomeCounts& counts, double t, const Vector3& prior) {
  if (!(t > 0.0)) fail(ErrorKind::DomainError, "time must be positive");
  if (counts.n <= 0) fail(ErrorKind::DomainError, "no trials to estimate from");
  const double n = static_cast<double>(counts.n);
  MleResult r;
  r.estimate = prior;
  if (r.estimate.norm() == 0.0) r.estimate = Vector3::Constant(1e-3 / t);
  BellModel m = bell_model(r.estimate, t);
  r.log_likelihood = log_likelihood(counts, m.p);

  for (r.iterations = 1; r.iterations <= kMaxMleIterations; ++r.iterations) {
    Vector3 score = Vector3::Zero();
    Matrix3 info = Matrix3::Zero();
    for (int k = 0; k < 4; ++k) {
      if (!(m.p[k] > 1e-300)) continue;
      score += static_cast<double>(counts.counts[k]) / m.p[k] * m.grad[k];
      info += n / m.p[k] * m.grad[k] * m.grad[k].transpose();
    }
    info += 1e-12 * std::max(info.trace(), 1e-300) * Matrix3::Identity();
    Vector3 step = info.ldlt().solve(score);
    if (!step.allFinite()) fail(ErrorKind::MleNonconvergence, "Fisher scoring step is not finite");

    bool improved = false;
    for (int halving = 0; halving < 60; ++halving) {
      const Vector3 trial = r.estimate + step;
      const BellModel tm = bell_model(trial, t);
      const double l = log_likelihood(counts, tm.p);
      if (l >= r.log_likelihood) {
        r.estimate = trial;
        r.log_likelihood = l;
        m = tm;
        improved = true;
        break;
      }
      step *= 0.5;
    }
    // No ascent direction left at double precision: a maximum.
    if (!improved) return r;
    if (step.norm() <= 1e-12 * std::max(1.0, r.estimate.norm())) return r;
  }
  fail(ErrorKind::MleNonconvergence, "maximum likelihood did not converge in 200 iterations");
}

Vector3 bell_mle_closed_form(const BellOutcomeCounts& counts, double t, const Vector3& prior) {
  if (!(t > 0.0)) fail(ErrorKind::DomainError, "time must be positive");
  if (counts.n <= 0) fail(ErrorKind::DomainError, "no trials to estimate from");
  const double n = static_cast<double>(counts.n);
  const double c0 = static_cast<double>(counts.counts[0]);
  const double theta0 = std::acos(std::sqrt(c0 / n));
  const double target = prior.norm() * t;
  double theta = theta0;
  for (double j = 0.0; j <= std::ceil(target / kPi) + 1.0; j += 1.0) {
    for (double cand : {j * kPi + theta0, j * kPi - theta0}) {
      if (cand >= 0.0 && std::abs(cand - target) < std::abs(theta - target)) theta = cand;
    }
  }
  Vector3 u;
  if (n - c0 > 0.0) {
    for (int i = 0; i < 3; ++i) {
      u[i] = std::sqrt(static_cast<double>(counts.counts[i + 1]) / (n - c0));
      if (prior[i] < 0.0) u[i] = -u[i];
    }
  } else {
    u = prior.norm() > 0.0 ? Vector3(prior.normalized()) : Vector3(1.0, 0.0, 0.0);
  }
  return theta / t * u;
}

Vector3 estimate_step_bell(const Vector3& delta_beta_true, std::int64_t n, double t,
                           const Vector3& prior, CounterRng& rng) {
  if (n < 100) fail(ErrorKind::DomainError, "the Bell backend needs at least 100 trials");
  const BellOutcomeCounts counts = sample_counts(bell_probabilities(delta_beta_true, t), n, rng);
  return bell_mle(counts, t, prior).estimate;
}

void validate(const ExperimentConfig& config) {
  if (config.iterations < 1) fail(ErrorKind::DomainError, "iterations must be at least 1");
  if (config.trials < 1) fail(ErrorKind::DomainError, "trials must be at least 1");
  if (!config.beta_true.allFinite() || config.beta_true.norm() == 0.0) {
    fail(ErrorKind::DomainError, "beta_true must be finite and non-zero");
  }
  if (config.backend == Backend::Bell && config.trials < 100) {
    fail(ErrorKind::DomainError, "the Bell backend needs at least 100 trials");
  }
  if (config.norm_bound && !(*config.norm_bound > 0.0 && std::isfinite(*config.norm_bound))) {
    fail(ErrorKind::DomainError, "norm bound must be positive");
  }
  if (config.refinement.extra_trials < 0) fail(ErrorKind::DomainError, "extra trials must be non-negative");
  if (config.refinement_threshold &&
      !(*config.refinement_threshold > 0.0 && *config.refinement_threshold < kPi)) {
    fail(ErrorKind::DomainError, "refinement threshold must lie in (0, pi)");
  }
}

ExperimentTrace run_adaptive_experiment(const ExperimentConfig& config, CounterRng& rng) {
  validate(config);
  const Vector3& beta = config.beta_true;
  const std::int64_t n = config.trials;
  const double nd = static_cast<double>(n);
  const double threshold = config.refinement_threshold.value_or(adaptive_constants().g0);
  const std::int64_t extra = config.refinement.extra_trials > 0 ? config.refinement.extra_trials : n;

  ExperimentTrace trace;
  trace.t1_from_bound = config.norm_bound.has_value();
  trace.t1_norm = config.norm_bound.value_or(beta.norm());
  const AdaptiveSchedule plan =
      plan_schedule(trace.t1_norm * trace.t1_norm, nd, TargetIterations{config.iterations});
  trace.planned_v = plan.v_m;

  Vector3 control = Vector3::Zero();
  // Settings and results of the previous iteration, reused by the refinement.
  Vector3 prev_control = Vector3::Zero(), prev_delta = Vector3::Zero();
  Vector3 prev_increment = Vector3::Zero(), prev_prior = Vector3::Zero();
  BellOutcomeCounts prev_counts;
  double prev_t = 0.0, prev_trace_c = 0.0;
  std::int64_t prev_n = 0;

  for (int k = 1; k <= config.iterations; ++k) {
    const IterationRecord& rec = plan.records[k - 1];
    IterationTrace it;
    it.k = k;
    it.control = control;
    it.delta_beta = beta - control;
    it.dE2 = 4.0 * it.delta_beta.squaredNorm();
    it.dE2_planned = rec.dE2_mean;
    it.d_plan = it.dE2 / it.dE2_planned;
    if (k >= 2) it.d_conditional = it.dE2 / (4.0 * prev_trace_c);
    it.t = rec.t;
    it.n = n;

    try {
      if (config.refinement.enabled && k >= 2) {
        // Keep repeating the previous iteration's trials to obtain a second,
        // sharper estimate beta'_0, then retune t so |beta_hat - beta'_0| t
        // hits the threshold at the planned total time.
        Vector3 pooled;
        if (config.backend == Backend::Gaussian) {
          const Vector3 e = estimate_step_gaussian(prev_delta, static_cast<double>(extra), prev_t, rng);
          pooled = (static_cast<double>(prev_n) * prev_increment + static_cast<double>(extra) * e) /
                   static_cast<double>(prev_n + extra);
        } else {
          BellOutcomeCounts more = sample_counts(bell_probabilities(prev_delta, prev_t), extra, rng);
          for (int j = 0; j < 4; ++j) more.counts[j] += prev_counts.counts[j];
          more.n += prev_counts.n;
          pooled = bell_mle(more, prev_t, prev_prior).estimate;
        }
        const double dist = (control - (prev_control + pooled)).norm();
        if (dist > 0.0) {
          const double total = nd * rec.t;
          it.t = threshold / dist;
          it.n = std::max<std::int64_t>(1, std::llround(total / it.t));
        }
      }

      const Covariance3 cov = iteration_covariance(it.delta_beta, static_cast<double>(it.n), it.t);
      Vector3 increment;
      if (config.backend == Backend::Gaussian) {
        increment = draw_normal(it.delta_beta, cov.m, rng);
      } else {
        // The previous iteration localizes delta_beta to within its
        // covariance; the prior stands in for that knowledge.
        prev_prior = draw_normal(it.delta_beta, cov.m, rng);
        prev_counts = sample_counts(bell_probabilities(it.delta_beta, it.t), it.n, rng);
        increment = bell_mle(prev_counts, it.t, prev_prior).estimate;
      }
      it.estimate = control + increment;
      it.error2 = (it.estimate - beta).squaredNorm();
      it.trace_c = cov.trace();

      prev_control = control;
      prev_delta = it.delta_beta;
      prev_increment = increment;
      prev_t = it.t;
      prev_n = it.n;
      prev_trace_c = it.trace_c;
      control = it.estimate;
      trace.iterations.push_back(it);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::MleNonconvergence) throw;
      trace.aborted = true;
      trace.abort_reason = e.what();
      break;
    }
  }
  if (!trace.iterations.empty()) {
    trace.realized_v = trace.iterations.back().error2;
    trace.final_trace_c = trace.iterations.back().trace_c;
  }
  return trace;
}

std::vector<ExperimentTrace> run_experiments(const ExperimentConfig& config,
                                             std::int64_t repetitions, unsigned threads) {
  validate(config);
  if (repetitions < 1) fail(ErrorKind::DomainError, "repetitions must be at least 1");
  std::vector<ExperimentTrace> out(static_cast<std::size_t>(repetitions));
  parallel_for(out.size(), threads, [&](std::size_t r) {
    CounterRng rng(config.seed, r);
    out[r] = run_adaptive_experiment(config, rng);
  });
  return out;
}

}  // namespace qmetro
