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
#include "qmetro/qubit.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include "qmetro/errors.hpp"

namespace qmetro {

namespace {

constexpr Complex kI(0.0, 1.0);

// Rotates the global phase so the largest-magnitude entry is real positive.
Vector2c fix_gauge(Vector2c v) {
  v.normalize();
  const int pivot = std::abs(v[0]) >= std::abs(v[1]) ? 0 : 1;
  const double mag = std::abs(v[pivot]);
  if (mag > 0.0) v *= std::conj(v[pivot]) / mag;
  return v;
}

bool all_finite(const Vector3& v) { return v.allFinite(); }

}  // namespace

std::string_view error_kind_name(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::NonHermitianInput: return "NonHermitianInput";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::SingularJacobian: return "SingularJacobian";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::SingularQfim: return "SingularQfim";
    case ErrorKind::DivergentTime: return "DivergentTime";
    case ErrorKind::DegenerateSpectrum: return "DegenerateSpectrum";
    case ErrorKind::DegenerateInput: return "DegenerateInput";
    case ErrorKind::BracketFailure: return "BracketFailure";
    case ErrorKind::NoContraction: return "NoContraction";
    case ErrorKind::MleNonconvergence: return "MleNonconvergence";
    case ErrorKind::InvariantViolation: return "InvariantViolation";
  }
  return "Unknown";
}

const Matrix2c& pauli(int index) {
  static const std::array<Matrix2c, 3> kPauli = [] {
    std::array<Matrix2c, 3> p;
    p[0] << 0.0, 1.0, 1.0, 0.0;
    p[1] << 0.0, -kI, kI, 0.0;
    p[2] << 1.0, 0.0, 0.0, -1.0;
    return p;
  }();
  if (index < 0 || index > 2) {
    fail(ErrorKind::IndexOutOfRange, "Pauli index must be 0, 1 or 2");
  }
  return kPauli[static_cast<std::size_t>(index)];
}

Matrix2c pauli_compose(const PauliCoefficients& b) {
  Matrix2c m;
  m << Complex(b[2], 0.0), Complex(b[0], -b[1]),
       Complex(b[0], b[1]), Complex(-b[2], 0.0);
  return m;
}

void pauli_decompose(const Matrix2c& h, double& trace_part, Vector3& b) {
  trace_part = 0.5 * (h(0, 0).real() + h(1, 1).real());
  const Complex off = 0.5 * (h(1, 0) + std::conj(h(0, 1)));
  b[0] = off.real();
  b[1] = off.imag();
  b[2] = 0.5 * (h(0, 0).real() - h(1, 1).real());
}

bool is_hermitian(const Matrix2c& m, double tol) {
  if (!m.allFinite()) return false;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      if (std::abs(m(i, j) - std::conj(m(j, i))) > tol) return false;
    }
  }
  return true;
}

bool is_unitary(const Matrix2c& m, double tol) {
  if (!m.allFinite()) return false;
  return max_abs(m * m.adjoint() - Matrix2c::Identity()) < tol;
}

double max_abs(const Matrix2c& m) { return m.cwiseAbs().maxCoeff(); }

Matrix2c SpectralDecomposition2::reconstruct() const {
  return e0 * v0 * v0.adjoint() + e1 * v1 * v1.adjoint();
}

SpectralDecomposition2 spectral_decompose(const Matrix2c& h) {
  if (!is_hermitian(h)) {
    fail(ErrorKind::NonHermitianInput, "spectral_decompose: input is not Hermitian");
  }
  double c = 0.0;
  Vector3 b;
  pauli_decompose(h, c, b);
  const double r = b.norm();

  SpectralDecomposition2 out;
  out.e0 = c + r;
  out.e1 = c - r;
  if (r == 0.0) return out;

  const Vector3 n = b / r;
  Vector2c up;
  Vector2c down;
  if (n[2] >= 0.0) {
    up << Complex(1.0 + n[2], 0.0), Complex(n[0], n[1]);
    down << -Complex(n[0], -n[1]), Complex(1.0 + n[2], 0.0);
  } else {
    up << Complex(n[0], -n[1]), Complex(1.0 - n[2], 0.0);
    down << Complex(1.0 - n[2], 0.0), -Complex(n[0], n[1]);
  }
  out.v0 = fix_gauge(up);
  out.v1 = fix_gauge(down);
  return out;
}

Matrix2c evolve_unitary(const Matrix2c& h, double t) {
  double c = 0.0;
  Vector3 b;
  pauli_decompose(h, c, b);
  const double r = b.norm();
  double cos_part = 1.0;
  double sin_over_r = t;  // sin(r t) / r
  if (r * std::abs(t) >= 1e-8) {
    cos_part = std::cos(r * t);
    sin_over_r = std::sin(r * t) / r;
  }
  const Matrix2c rotation = cos_part * Matrix2c::Identity() -
                            kI * sin_over_r * pauli_compose(PauliCoefficients(b));
  return std::exp(-kI * (c * t)) * rotation;
}

Matrix3 central_difference_jacobian(
    const std::function<Vector3(const Vector3&)>& map, const Vector3& alpha) {
  Matrix3 j;
  for (int col = 0; col < 3; ++col) {
    const double h = 1e-6 * std::max(1.0, std::abs(alpha[col]));
    Vector3 plus = alpha;
    Vector3 minus = alpha;
    plus[col] += h;
    minus[col] -= h;
    j.col(col) = (map(plus) - map(minus)) / (plus[col] - minus[col]);
  }
  return j;
}

Matrix2c ModelEvaluation::derivative(int i) const {
  if (i < 0 || i > 2) {
    fail(ErrorKind::IndexOutOfRange, "parameter index must be 0, 1 or 2");
  }
  return pauli_compose(PauliCoefficients(jacobian.col(i)));
}

HamiltonianModel::HamiltonianModel(std::string name, PauliMap map,
                                   JacobianMap jacobian, DomainCheck domain)
    : name_(std::move(name)),
      map_(std::move(map)),
      jacobian_(std::move(jacobian)),
      domain_(std::move(domain)),
      mode_(JacobianMode::Analytic) {}

HamiltonianModel::HamiltonianModel(std::string name, PauliMap map,
                                   DomainCheck domain)
    : name_(std::move(name)),
      map_(std::move(map)),
      domain_(std::move(domain)),
      mode_(JacobianMode::CentralDifference) {}

Matrix3 HamiltonianModel::jacobian(const Vector3& alpha) const {
  if (mode_ == JacobianMode::Analytic) return jacobian_(alpha);
  return central_difference_jacobian(map_, alpha);
}

ModelEvaluation HamiltonianModel::evaluate(const Vector3& alpha) const {
  if (!all_finite(alpha)) {
    fail(ErrorKind::DomainError, name_ + ": parameters must be finite");
  }
  if (domain_) {
    if (auto reason = domain_(alpha)) fail(ErrorKind::DomainError, name_ + ": " + *reason);
  }
  ModelEvaluation ev;
  ev.coefficients = PauliCoefficients(map_(alpha));
  if (!ev.coefficients.b.allFinite()) {
    fail(ErrorKind::DomainError, name_ + ": Pauli map produced non-finite values");
  }
  ev.hamiltonian = pauli_compose(ev.coefficients);
  ev.jacobian = jacobian(alpha);
  ev.singular_jacobian = std::abs(ev.jacobian.determinant()) < 1e-12;
  return ev;
}

const HamiltonianModel& pauli_model() {
  static const HamiltonianModel kModel(
      "pauli", [](const Vector3& a) { return a; },
      [](const Vector3&) { return Matrix3(Matrix3::Identity()); });
  return kModel;
}

const HamiltonianModel& btp_model() {
  static const HamiltonianModel kModel(
      "btp",
      [](const Vector3& a) {
        const double b = a[0], th = a[1], ph = a[2];
        return Vector3(b * std::cos(th) * std::cos(ph),
                       b * std::cos(th) * std::sin(ph), b * std::sin(th));
      },
      [](const Vector3& a) {
        const double b = a[0], th = a[1], ph = a[2];
        const double ct = std::cos(th), st = std::sin(th);
        const double cp = std::cos(ph), sp = std::sin(ph);
        Matrix3 j;
        j << ct * cp, -b * st * cp, -b * ct * sp,
             ct * sp, -b * st * sp, b * ct * cp,
             st, b * ct, 0.0;
        return j;
      },
      [](const Vector3& a) -> std::optional<std::string> {
        if (!(a[0] > 0.0)) {
          std::ostringstream os;
          os << "field strength B must be positive (got " << a[0] << ")";
          return os.str();
        }
        return std::nullopt;
      });
  return kModel;
}

const HamiltonianModel& builtin_model(const std::string& name) {
  if (name == "pauli") return pauli_model();
  if (name == "btp") return btp_model();
  fail(ErrorKind::DomainError, "unknown model '" + name + "' (expected pauli or btp)");
}

}  // namespace qmetro
