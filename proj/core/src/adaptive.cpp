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
#include "qmetro/adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "qmetro/errors.hpp"
#include "qmetro/variance.hpp"

namespace qmetro {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kBracketLo = 0.5;
constexpr double kBracketHi = 3.0;

void check_positive(double x, const char* what) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    fail(ErrorKind::DomainError, std::string(what) + " must be positive and finite");
  }
}

void check_not_pole(double phase) {
  const double k = std::round(phase / kPi);
  if (k >= 1.0 && std::abs(phase - k * kPi) < 1e-9) {
    fail(ErrorKind::DivergentTime, "evolution phase is at a multiple of pi");
  }
}

AdaptiveConstants compute_constants() {
  AdaptiveConstants c;
  c.g0 = solve_g0(1e-12);
  c.gain_g0 = gain(c.g0);
  c.weight = c.g0 * c.g0 * csc2(c.g0);
  c.adaptive_factor = 4.0 * c.g0 * c.g0 * c.gain_g0 / 3.0;
  c.alpha_factor = 4.0 * c.weight - 1.0;
  return c;
}

}  // namespace

const AdaptiveConstants& adaptive_constants() {
  static const AdaptiveConstants constants = compute_constants();
  return constants;
}

double gain(double x) {
  if (!(x > 0.0 && x < kPi)) fail(ErrorKind::DomainError, "gain is defined on (0, pi)");
  return 1.0 / (4.0 * x * x) + 0.5 * csc2(x);
}

double time_objective(double g) {
  if (!(g > 0.0 && g < kPi)) fail(ErrorKind::DomainError, "objective is defined on (0, pi)");
  return 1.0 / g + 2.0 * g * csc2(g);
}

double time_objective_derivative(double g) {
  if (!(g > 0.0 && g < kPi)) fail(ErrorKind::DomainError, "objective is defined on (0, pi)");
  const double s2 = csc2(g);
  return -1.0 / (g * g) + 2.0 * s2 - 4.0 * g * s2 / std::tan(g);
}

double solve_g0(double tolerance) {
  if (!(tolerance >= 1e-12 && tolerance <= 1e-3)) {
    fail(ErrorKind::DomainError, "tolerance must lie in [1e-12, 1e-3]");
  }
  // The derivative must change sign exactly once, from negative to positive.
  constexpr int kScan = 400;
  int changes = 0;
  double prev = time_objective_derivative(kBracketLo);
  if (!(prev < 0.0)) fail(ErrorKind::BracketFailure, "objective not decreasing at 0.5");
  for (int i = 1; i <= kScan; ++i) {
    const double g = kBracketLo + (kBracketHi - kBracketLo) * i / kScan;
    const double d = time_objective_derivative(g);
    if ((d > 0.0) != (prev > 0.0)) ++changes;
    prev = d;
  }
  if (changes != 1 || !(prev > 0.0)) {
    fail(ErrorKind::BracketFailure, "objective is not unimodal on [0.5, 3.0]");
  }

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  const double coarse = std::max(tolerance, 1e-7);
  double a = kBracketLo, b = kBracketHi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = time_objective(c), fd = time_objective(d);
  while (b - a > coarse) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = time_objective(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = time_objective(d);
    }
  }
  double x = 0.5 * (a + b);
  if (coarse <= tolerance) return x;

  double lo = std::max(kBracketLo, x - 1e-5), hi = std::min(kBracketHi, x + 1e-5);
  if (!(time_objective_derivative(lo) < 0.0 && time_objective_derivative(hi) > 0.0)) {
    fail(ErrorKind::BracketFailure, "golden-section result does not bracket the minimum");
  }
  while (hi - lo > tolerance) {
    const double mid = 0.5 * (lo + hi);
    if (time_objective_derivative(mid) < 0.0) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

Matrix3 iteration_qfim(const Vector3& delta_beta, double t) {
  check_positive(t, "time");
  const double b = delta_beta.norm();
  if (b == 0.0) return 4.0 * t * t * Matrix3::Identity();
  const Vector3 u = delta_beta / b;
  const Matrix3 par = u * u.transpose();
  const double s = std::sin(b * t) / b;
  return 4.0 * t * t * par + 4.0 * s * s * (Matrix3::Identity() - par);
}

Covariance3 iteration_covariance(const Vector3& delta_beta, double n, double t) {
  check_positive(t, "time");
  if (!(n >= 1.0)) fail(ErrorKind::DomainError, "trial count must be at least 1");
  const double b2 = delta_beta.squaredNorm();
  if (b2 == 0.0) {
    fail(ErrorKind::DegenerateInput,
         "control error is zero; use optimal_control_baseline");
  }
  const double b = std::sqrt(b2);
  check_not_pole(b * t);
  const double s2 = csc2(b * t);
  const double inv = 1.0 / (t * t * b2);
  Covariance3 c;
  c.n = n;
  c.t = t;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const double p = delta_beta[i] * delta_beta[j];
      c.m(i, j) = (i == j) ? p * inv + (b2 - p) * s2 : p * (inv - s2);
    }
  }
  c.m /= 4.0 * n;
  return c;
}

double expected_dE2_next(double total_time, double t, double dE2) {
  check_positive(t, "per-trial time");
  check_positive(dE2, "squared gap");
  if (!(total_time >= t)) fail(ErrorKind::DomainError, "total time must be at least the per-trial time");
  const double b = std::sqrt(dE2) / 2.0;
  check_not_pole(b * t);
  return (1.0 / t + 2.0 * t * b * b * csc2(b * t)) / total_time;
}

double optimal_time(double dE2_mean) {
  check_positive(dE2_mean, "mean squared gap");
  return 2.0 * adaptive_constants().g0 / std::sqrt(dE2_mean);
}

double recursion(double dE2_mean, double n) {
  check_positive(dE2_mean, "mean squared gap");
  check_positive(n, "trial count");
  return adaptive_constants().gain_g0 / n * dE2_mean;
}

double planned_time(double v0, double n, int k) {
  const AdaptiveConstants& c = adaptive_constants();
  return c.g0 / std::sqrt(v0) * std::pow(n / c.gain_g0, 0.5 * (k - 1));
}

AdaptiveSchedule plan_schedule(double v0, double n, const ScheduleTarget& target) {
  const AdaptiveConstants& c = adaptive_constants();
  check_positive(v0, "initial variance");
  if (!(n > c.gain_g0) || !std::isfinite(n)) {
    fail(ErrorKind::NoContraction, "n must exceed G(g0) for the recursion to contract");
  }
  const double q = c.gain_g0 / n;

  AdaptiveSchedule s;
  s.n = n;
  s.v0 = v0;
  s.g0 = c.g0;
  s.adaptive_factor = c.adaptive_factor;
  if (const auto* tv = std::get_if<TargetVariance>(&target)) {
    if (!(tv->v > 0.0 && tv->v < v0)) {
      fail(ErrorKind::DomainError, "target variance must lie in (0, V0)");
    }
    s.target = tv->v;
    const double exact = std::log(tv->v / v0) / std::log(q);
    s.m = std::max(1, static_cast<int>(std::ceil(exact - 1e-12)));
  } else {
    s.m = std::get<TargetIterations>(target).m;
    if (s.m < 1) fail(ErrorKind::DomainError, "iteration count must be at least 1");
  }

  double v = v0;
  for (int k = 1; k <= s.m; ++k) {
    IterationRecord r;
    r.k = k;
    r.n = n;
    r.dE2_mean = 4.0 * v;
    r.t = optimal_time(r.dE2_mean);
    r.v = recursion(r.dE2_mean, n) / 4.0;
    v = r.v;
    s.total_time += r.t;
    s.sequential_time += n * r.t;
    s.records.push_back(r);
  }
  s.v_m = v;

  const double rr = std::sqrt(n / c.gain_g0);
  const double tt = s.total_time;
  const double shrink = 1.0 - std::pow(rr, -s.m);
  s.v_m_from_total_time = c.g0 * c.g0 * shrink * shrink / ((rr - 1.0) * (rr - 1.0) * tt * tt);
  s.v_m_large_n = c.g0 * c.g0 * c.gain_g0 / (n * tt * tt);
  s.v_oc = optimal_control_baseline(n, tt).v_oc;
  s.ratio_vs_optimal = s.v_m / s.v_oc;
  return s;
}

OptimalControlBaseline optimal_control_baseline(double n_oc, double t_oc) {
  if (!(n_oc >= 1.0)) fail(ErrorKind::DomainError, "trial count must be at least 1");
  check_positive(t_oc, "time");
  OptimalControlBaseline b;
  b.covariance.n = n_oc;
  b.covariance.t = t_oc;
  b.covariance.m = Matrix3::Identity() / (4.0 * n_oc * t_oc * t_oc);
  b.v_oc = 3.0 / (4.0 * n_oc * t_oc * t_oc);
  return b;
}

AlphaBoundReport alpha_variance_bounds(const Matrix3& jacobian, double v_m, double v_oc) {
  check_positive(v_m, "adaptive variance");
  check_positive(v_oc, "optimal-control variance");
  if (!(std::abs(jacobian.determinant()) >= 1e-12)) {
    fail(ErrorKind::SingularJacobian, "Jacobian is not invertible");
  }
  const AdaptiveConstants& c = adaptive_constants();
  const Matrix3 inv = jacobian.inverse();
  const double a = c.weight;
  AlphaBoundReport rep;
  rep.kappa = v_m / v_oc;
  rep.combined_factor = (12.0 * a - 3.0) / (1.0 + 2.0 * a) * rep.kappa;
  rep.headline_factor = c.alpha_factor;
  for (int i = 0; i < 3; ++i) {
    AlphaParameterBound& p = rep.params[i];
    for (int r = 0; r < 3; ++r) {
      p.nu_max = std::max(p.nu_max, inv(i, r) * inv(i, r));
      for (int s = 0; s < 3; ++s) {
        if (r != s) p.mu_max = std::max(p.mu_max, std::abs(inv(i, r) * inv(i, s)));
      }
    }
    p.adaptive_upper = (2.0 * p.mu_max * (a - 1.0) / (1.0 + 2.0 * a) + p.nu_max) * v_m;
    p.optimal_lower = p.nu_max / 3.0 * v_oc;
  }
  return rep;
}

}  // namespace qmetro
