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
#ifndef QMETRO_ROBUSTNESS_HPP_
#define QMETRO_ROBUSTNESS_HPP_

// Robustness of the adaptive scheme to random control errors. After an
// iteration the realized squared gap deviates from its mean by a factor D,
// distributed as a weighted sum of three chi-square(1) variables with unit
// mean. The ratios below compare the realized precision with the planned one.

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "qmetro/rng.hpp"

namespace qmetro {

struct DeviationDistributionParams {
  double a = 0.0;           // g0^2 csc^2(g0)
  double normalizer = 0.0;  // 2a + 1
};

DeviationDistributionParams deviation_params();

/// D = (Z1^2 + a (Z2^2 + Z3^2)) / (2a + 1).
double sample_deviation(CounterRng& rng);

/// Density of D; zero for D < 0.
double deviation_pdf(double d);

/// Upper end of the domain of ratio_single, (pi/g0)^2.
double ratio_single_limit();

/// R = D G(sqrt(D) g0) / G(g0) for 0 < D < (pi/g0)^2.
double ratio_single(double d);

/// One step of the time-modified recursion,
/// (2 g0 G(g0) / T) sqrt(D dE2).
double modified_recursion(double dE2_tilde, double d, double total_time);

/// prod_k D_k^(1/2^(m-k+1)); D_1 must be 1.
double ratio_total(std::span<const double> d);

struct RobustnessSummary {
  int m = 0;
  std::int64_t samples = 0;
  std::uint64_t seed = 0;
  std::vector<std::pair<double, double>> cdf;  // (ratio, quantile), ascending
  double p_below_one = 0.0;
  double median = 0.0;
};

struct RobustnessOptions {
  unsigned threads = 1;
  std::size_t cdf_points = 1001;  // CDF rows kept out of `samples`
  bool force_unit = false;        // every D_k = 1, for debugging
};

/// Monte Carlo distribution of ratio_total over D_2..D_m. Sample i draws from
/// stream i, so the result is independent of the thread count.
RobustnessSummary robustness_mc(int m, std::int64_t samples, std::uint64_t seed,
                                const RobustnessOptions& options = {});

}  // namespace qmetro

#endif  // QMETRO_ROBUSTNESS_HPP_
