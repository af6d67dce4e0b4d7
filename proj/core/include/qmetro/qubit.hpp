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
#ifndef QMETRO_QUBIT_HPP_
#define QMETRO_QUBIT_HPP_

// Exact 2x2 Hermitian/unitary algebra and the Hamiltonian model abstraction.
// Energies are in angular-frequency units (hbar = 1).

#include <complex>
#include <functional>
#include <optional>
#include <string>

#include <Eigen/Dense>

namespace qmetro {

using Complex = std::complex<double>;
using Matrix2c = Eigen::Matrix2cd;
using Vector2c = Eigen::Vector2cd;
using Vector3 = Eigen::Vector3d;
using Matrix3 = Eigen::Matrix3d;

inline constexpr double kHermitianTolerance = 1e-12;
inline constexpr double kUnitaryTolerance = 1e-10;

/// Coefficients (b1, b2, b3) of b . sigma in the Pauli basis.
struct PauliCoefficients {
  Vector3 b = Vector3::Zero();

  PauliCoefficients() = default;
  explicit PauliCoefficients(const Vector3& v) : b(v) {}
  PauliCoefficients(double b1, double b2, double b3) : b(b1, b2, b3) {}

  double norm() const { return b.norm(); }
  double operator[](int i) const { return b[i]; }
};

/// sigma_x, sigma_y, sigma_z for index 0, 1, 2.
const Matrix2c& pauli(int index);

/// b1 sigma_x + b2 sigma_y + b3 sigma_z.
Matrix2c pauli_compose(const PauliCoefficients& b);

/// Decomposes a Hermitian matrix as c I + b . sigma. Only the Hermitian
/// part of `h` is read.
void pauli_decompose(const Matrix2c& h, double& trace_part, Vector3& b);

bool is_hermitian(const Matrix2c& m, double tol = kHermitianTolerance);
bool is_unitary(const Matrix2c& m, double tol = kUnitaryTolerance);
double max_abs(const Matrix2c& m);

/// Eigen-decomposition of a 2x2 Hermitian matrix with E0 >= E1.
///
/// Each eigenvector's global phase is fixed so that its largest-magnitude
/// component is real and positive (first component on ties). A zero gap
/// yields the computational basis.
struct SpectralDecomposition2 {
  double e0 = 0.0;
  double e1 = 0.0;
  Vector2c v0 = Vector2c(1.0, 0.0);
  Vector2c v1 = Vector2c(0.0, 1.0);

  double gap() const { return e0 - e1; }
  Matrix2c reconstruct() const;
};

/// Throws Error(NonHermitianInput) when `h` is not Hermitian within 1e-12.
SpectralDecomposition2 spectral_decompose(const Matrix2c& h);

/// exp(-i h t) in closed form. `h` may carry a trace component.
Matrix2c evolve_unitary(const Matrix2c& h, double t);

enum class JacobianMode { Analytic, CentralDifference };

/// Central-difference Jacobian J[i][j] = d f_i / d alpha_j with step
/// 1e-6 * max(1, |alpha_j|).
Matrix3 central_difference_jacobian(
    const std::function<Vector3(const Vector3&)>& map, const Vector3& alpha);

/// Evaluation of a model at a parameter point.
struct ModelEvaluation {
  Matrix2c hamiltonian;
  PauliCoefficients coefficients;
  Matrix3 jacobian;
  bool singular_jacobian = false;  // |det J| < 1e-12; informational only.

  /// d H / d alpha_i = sum_k J[k][i] sigma_k.
  Matrix2c derivative(int i) const;
};

/// A three-parameter traceless qubit Hamiltonian alpha -> f(alpha) . sigma.
class HamiltonianModel {
 public:
  using PauliMap = std::function<Vector3(const Vector3&)>;
  using JacobianMap = std::function<Matrix3(const Vector3&)>;
  using DomainCheck = std::function<std::optional<std::string>(const Vector3&)>;

  /// Model with an analytic Jacobian.
  HamiltonianModel(std::string name, PauliMap map, JacobianMap jacobian,
                   DomainCheck domain = {});

  /// Model whose Jacobian is taken by central differences.
  HamiltonianModel(std::string name, PauliMap map, DomainCheck domain = {});

  const std::string& name() const { return name_; }
  static constexpr int param_count() { return 3; }
  JacobianMode jacobian_mode() const { return mode_; }

  /// Throws Error(DomainError) outside the model domain.
  ModelEvaluation evaluate(const Vector3& alpha) const;

  Vector3 pauli_map(const Vector3& alpha) const { return map_(alpha); }
  Matrix3 jacobian(const Vector3& alpha) const;

 private:
  std::string name_;
  PauliMap map_;
  JacobianMap jacobian_;
  DomainCheck domain_;
  JacobianMode mode_;
};

/// f(alpha) = alpha.
const HamiltonianModel& pauli_model();

/// f(B, theta, phi) = B (cos theta cos phi, cos theta sin phi, sin theta),
/// defined for B > 0.
const HamiltonianModel& btp_model();

/// Looks up "pauli" or "btp"; throws Error(DomainError) otherwise.
const HamiltonianModel& builtin_model(const std::string& name);

}  // namespace qmetro

#endif  // QMETRO_QUBIT_HPP_
