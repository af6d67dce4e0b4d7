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
#ifndef QMETRO_TESTS_SUPPORT_HPP_
#define QMETRO_TESTS_SUPPORT_HPP_

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "qmetro/qfim.hpp"
#include "qmetro/qubit.hpp"

namespace qmetro::testing {

inline constexpr double kPi = std::numbers::pi;

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : gen_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
  double normal() { return std::normal_distribution<double>()(gen_); }
  int index(int n) { return std::uniform_int_distribution<int>(0, n - 1)(gen_); }

  Vector3 vector(double lo, double hi) { return {uniform(lo, hi), uniform(lo, hi), uniform(lo, hi)}; }
  Vector3 unit() {
    Vector3 v(normal(), normal(), normal());
    return v.normalized();
  }

  Matrix2c hermitian(double range) {
    Matrix2c h;
    const double a = uniform(-range, range), d = uniform(-range, range);
    const Complex b(uniform(-range, range), uniform(-range, range));
    h << a, b, std::conj(b), d;
    return h;
  }

  // Well-conditioned random Jacobian.
  Matrix3 jacobian() {
    for (;;) {
      Matrix3 j;
      for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) j(r, c) = uniform(-2.0, 2.0);
      }
      if (std::abs(j.determinant()) > 0.1) return j;
    }
  }

  const HamiltonianModel& model() { return index(2) == 0 ? pauli_model() : btp_model(); }

  // A point inside the model domain away from coordinate singularities.
  Vector3 alpha(const HamiltonianModel& m) {
    if (m.name() == "btp") return {uniform(0.2, 2.0), uniform(-1.4, 1.4), uniform(-kPi, kPi)};
    return vector(-2.0, 2.0);
  }

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

// Simpson panels needed for ~1e-10 accuracy on a generator whose integrand
// oscillates with frequency |dE|.
inline int simpson_steps(double gap, double t) {
  const int steps = static_cast<int>(std::max(100.0, 400.0 * std::abs(gap) * t + 100.0));
  return steps + (steps % 2);
}

inline Matrix3 qfim_by_quadrature(const HamiltonianModel& model, const Vector3& alpha, double t) {
  const double gap = 2.0 * model.pauli_map(alpha).norm();
  const int steps = simpson_steps(gap, t);
  return qfim_from_generators(generator_oracle(model, alpha, 0, t, steps),
                              generator_oracle(model, alpha, 1, t, steps),
                              generator_oracle(model, alpha, 2, t, steps));
}

inline double max_abs(const Matrix3& m) { return m.cwiseAbs().maxCoeff(); }

inline double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
}

}  // namespace qmetro::testing

#endif  // QMETRO_TESTS_SUPPORT_HPP_
