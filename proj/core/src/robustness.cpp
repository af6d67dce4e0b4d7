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
#include "qmetro/robustness.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qmetro/adaptive.hpp"
#include "qmetro/errors.hpp"
#include "qmetro/parallel.hpp"

namespace qmetro {

DeviationDistributionParams deviation_params() {
  DeviationDistributionParams p;
  p.a = adaptive_constants().weight;
  p.normalizer = 2.0 * p.a + 1.0;
  return p;
}

double sample_deviation(CounterRng& rng) {
  static const DeviationDistributionParams p = deviation_params();
  const double z1 = rng.normal();
  const double z2 = rng.normal();
  const double z3 = rng.normal();
  return (z1 * z1 + p.a * (z2 * z2 + z3 * z3)) / p.normalizer;
}

double deviation_pdf(double d) {
  if (!(d > 0.0)) return 0.0;
  static const DeviationDistributionParams p = deviation_params();
  const double a = p.a, c = p.normalizer;
  // Convolution of a scaled chi-square(1) with an exponential; a > 1 keeps
  // the erf argument real.
  return c / (2.0 * a) * std::sqrt(a / (a - 1.0)) * std::exp(-c * d / (2.0 * a)) *
         std::erf(std::sqrt(c * (a - 1.0) * d / (2.0 * a)));
}

double ratio_single_limit() {
  const double x = std::numbers::pi / adaptive_constants().g0;
  return x * x;
}

double ratio_single(double d) {
  if (!(d > 0.0 && d < ratio_single_limit())) {
    fail(ErrorKind::DomainError, "deviation must lie in (0, (pi/g0)^2)");
  }
  const AdaptiveConstants& c = adaptive_constants();
  return d * gain(std::sqrt(d) * c.g0) / c.gain_g0;
}

double modified_recursion(double dE2_tilde, double d, double total_time) {
  if (!(dE2_tilde > 0.0 && d > 0.0 && total_time > 0.0)) {
    fail(ErrorKind::DomainError, "modified recursion inputs must be positive");
  }
  const AdaptiveConstants& c = adaptive_constants();
  return 2.0 * c.g0 * c.gain_g0 / total_time * std::sqrt(d * dE2_tilde);
}

double ratio_total(std::span<const double> d) {
  if (d.empty()) fail(ErrorKind::DomainError, "at least one deviation is required");
  if (d[0] != 1.0) fail(ErrorKind::DomainError, "the first deviation must be 1");
  const std::size_t m = d.size();
  double log_r = 0.0;
  for (std::size_t k = 1; k <= m; ++k) {
    if (!(d[k - 1] > 0.0)) fail(ErrorKind::DomainError, "deviations must be positive");
    log_r += std::log(d[k - 1]) * std::ldexp(1.0, -static_cast<int>(m - k + 1));
  }
  return std::exp(log_r);
}

RobustnessSummary robustness_mc(int m, std::int64_t samples, std::uint64_t seed,
                                const RobustnessOptions& options) {
  if (m < 2) fail(ErrorKind::DomainError, "robustness needs at least two iterations");
  if (samples < 10000) fail(ErrorKind::DomainError, "robustness needs at least 1e4 samples");
  if (options.cdf_points < 2) fail(ErrorKind::DomainError, "CDF needs at least two points");

  std::vector<double> ratios(static_cast<std::size_t>(samples));
  parallel_for(ratios.size(), options.threads, [&](std::size_t i) {
    CounterRng rng(seed, i);
    std::vector<double> d(static_cast<std::size_t>(m), 1.0);
    if (!options.force_unit) {
      for (int k = 1; k < m; ++k) d[k] = sample_deviation(rng);
    }
    ratios[i] = ratio_total(d);
  });
  std::sort(ratios.begin(), ratios.end());

  RobustnessSummary s;
  s.m = m;
  s.samples = samples;
  s.seed = seed;
  const auto below = std::lower_bound(ratios.begin(), ratios.end(), 1.0);
  s.p_below_one = static_cast<double>(below - ratios.begin()) / static_cast<double>(samples);
  const std::size_t n = ratios.size();
  s.median = (n % 2 == 1) ? ratios[n / 2] : 0.5 * (ratios[n / 2 - 1] + ratios[n / 2]);

  const std::size_t points = std::min(options.cdf_points, n);
  s.cdf.reserve(points);
  for (std::size_t j = 0; j < points; ++j) {
    const std::size_t idx = (points == n) ? j : j * (n - 1) / (points - 1);
    s.cdf.emplace_back(ratios[idx], static_cast<double>(idx + 1) / static_cast<double>(n));
  }
  return s;
}

}  // namespace qmetro
