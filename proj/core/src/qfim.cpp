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
#include "qmetro/qfim.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "qmetro/errors.hpp"
#include "qmetro/simulator.hpp"

namespace qmetro {

namespace {

constexpr Complex kI(0.0, 1.0);
constexpr double kDegenerateGapTime = 1e-8;

void check_index(int i) {
  if (i < 0 || i > 2) {
    fail(ErrorKind::IndexOutOfRange, "parameter index must be 0, 1 or 2");
  }
}

// (e^{i d t} - 1) / (i d), written as t e^{i d t / 2} sinc(d t / 2) so the
// small-gap limit needs no special casing.
Complex phase_integral(double d, double t) {
  const double x = 0.5 * d * t;
  const double sinc = std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
  return t * sinc * std::exp(kI * x);
}

Matrix2c eigen_basis(const SpectralDecomposition2& s) {
  Matrix2c p;
  p.col(0) = s.v0;
  p.col(1) = s.v1;
  return p;
}

Complex trace(const Matrix2c& m) { return m(0, 0) + m(1, 1); }

std::array<Matrix2c, 3> generators(const HamiltonianModel& model, const Vector3& alpha,
                                   double t) {
  return {generator(model, alpha, 0, t), generator(model, alpha, 1, t),
          generator(model, alpha, 2, t)};
}

Matrix3 symmetrize(const Matrix3& m) { return 0.5 * (m + m.transpose()); }

}  // namespace

Matrix2c generator(const HamiltonianModel& model, const Vector3& alpha, int i, double t) {
  check_index(i);
  return generator(model, alpha, i, t, spectral_decompose(model.evaluate(alpha).hamiltonian));
}

Matrix2c generator(const HamiltonianModel& model, const Vector3& alpha, int i, double t,
                   const SpectralDecomposition2& s) {
  check_index(i);
  const ModelEvaluation ev = model.evaluate(alpha);
  const Matrix2c dh = ev.derivative(i);
  if (std::abs(s.gap()) * std::abs(t) < kDegenerateGapTime) return t * dh;

  const Matrix2c p = eigen_basis(s);
  const Matrix2c a = p.adjoint() * dh * p;
  const std::array<double, 2> e = {s.e0, s.e1};
  Matrix2c in_basis;
  for (int l = 0; l < 2; ++l) {
    for (int k = 0; k < 2; ++k) {
      in_basis(l, k) = a(l, k) * phase_integral(e[l] - e[k], t);
    }
  }
  Matrix2c h = p * in_basis * p.adjoint();
  return 0.5 * (h + h.adjoint());
}

Matrix2c generator_oracle(const HamiltonianModel& model, const Vector3& alpha, int i,
                          double t, int steps) {
  check_index(i);
  if (steps < 100) fail(ErrorKind::DomainError, "generator_oracle needs at least 100 panels");
  if (steps % 2 != 0) ++steps;
  const ModelEvaluation ev = model.evaluate(alpha);
  const Matrix2c dh = ev.derivative(i);
  const double step = t / steps;
  Matrix2c sum = Matrix2c::Zero();
  for (int k = 0; k <= steps; ++k) {
    const Matrix2c forward = evolve_unitary(ev.hamiltonian, -k * step);  // e^{iH tau}
    const double weight = (k == 0 || k == steps) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
    sum += weight * (forward * dh * forward.adjoint());
  }
  return sum * (step / 3.0);
}

Matrix3 qfim_from_generators(const Matrix2c& h1, const Matrix2c& h2, const Matrix2c& h3) {
  const std::array<const Matrix2c*, 3> h = {&h1, &h2, &h3};
  Matrix3 f;
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j) {
      const Complex v = 2.0 * trace(*h[i] * *h[j]) - trace(*h[i]) * trace(*h[j]);
      f(i, j) = v.real();
      f(j, i) = v.real();
    }
  }
  return f;
}

QfimMatrix qfim_entangled(const HamiltonianModel& model, const Vector3& alpha, double t) {
  const auto h = generators(model, alpha, t);
  QfimMatrix out;
  out.m = qfim_from_generators(h[0], h[1], h[2]);
  out.t = t;
  out.model = model.name();
  out.alpha = alpha;
  return out;
}

Matrix3 qfim_spectral(const HamiltonianModel& model, const Vector3& alpha, double t) {
  return qfim_spectral(model, alpha, t, spectral_decompose(model.evaluate(alpha).hamiltonian));
}

Matrix3 qfim_spectral(const HamiltonianModel& model, const Vector3& alpha, double t,
                      const SpectralDecomposition2& s) {
  const ModelEvaluation ev = model.evaluate(alpha);
  const double gap = s.gap();
  Matrix3 f;
  if (std::abs(gap) * std::abs(t) < kDegenerateGapTime) {
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        const Matrix2c di = ev.derivative(i), dj = ev.derivative(j);
        f(i, j) = t * t * (2.0 * trace(di * dj) - trace(di) * trace(dj)).real();
      }
    }
    return f;
  }

  const Matrix2c p = eigen_basis(s);
  std::array<double, 2> e = {s.e0, s.e1};
  // d_i E_l and <E_l|d_i E_{1-l}> = <E_l|d_i H|E_{1-l}> / (E_{1-l} - E_l).
  double de[3][2];
  Complex overlap[3][2];
  for (int i = 0; i < 3; ++i) {
    const Matrix2c a = p.adjoint() * ev.derivative(i) * p;
    for (int l = 0; l < 2; ++l) {
      de[i][l] = a(l, l).real();
      overlap[i][l] = a(l, 1 - l) / (e[1 - l] - e[l]);
    }
  }
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      Complex v = 0.0;
      for (int l = 0; l < 2; ++l) {
        v += t * t * (de[i][l] * de[j][l] - de[i][l] * de[j][1 - l]);
        const double sn = std::sin(0.5 * (e[l] - e[1 - l]) * t);
        v -= 8.0 * sn * sn * overlap[i][l] * overlap[j][1 - l];
      }
      f(i, j) = v.real();
    }
  }
  return f;
}

QfimMatrix qfim_weighted_initial(const HamiltonianModel& model, const Vector3& alpha,
                                 double t, double x) {
  if (!(x >= 0.0 && x <= 1.0)) {
    fail(ErrorKind::DomainError, "initial-state weight x must lie in [0, 1]");
  }
  const auto h = generators(model, alpha, t);
  QfimMatrix out;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const Matrix2c& a = h[i];
      const Matrix2c& b = h[j];
      const Complex second = x * (a(0, 0) * b(0, 0) + a(0, 1) * b(1, 0)) +
                             (1.0 - x) * (a(1, 0) * b(0, 1) + a(1, 1) * b(1, 1));
      const Complex mean_a = x * a(0, 0) + (1.0 - x) * a(1, 1);
      const Complex mean_b = x * b(0, 0) + (1.0 - x) * b(1, 1);
      out.m(i, j) = 4.0 * (second.real() - (mean_a * mean_b).real());
    }
  }
  out.m = symmetrize(out.m);
  out.t = t;
  out.model = model.name();
  out.alpha = alpha;
  return out;
}

double weak_commutativity_residual(const HamiltonianModel& model, const Vector3& alpha,
                                   double t) {
  const auto h = generators(model, alpha, t);
  double worst = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      worst = std::max(worst, std::abs(trace(h[i] * h[j]).imag()) / 2.0);
    }
  }
  return worst;
}

double min_eigenvalue(const Matrix3& m) {
  Eigen::SelfAdjointEigenSolver<Matrix3> es(symmetrize(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues()[0];
}

double max_eigenvalue(const Matrix3& m) {
  Eigen::SelfAdjointEigenSolver<Matrix3> es(symmetrize(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues()[2];
}

bool is_psd(const Matrix3& m, double rel_tol) {
  return min_eigenvalue(m) >= -rel_tol * std::max(1.0, max_eigenvalue(m));
}

bool is_invertible_qfim(const Matrix3& f) {
  Eigen::SelfAdjointEigenSolver<Matrix3> es(symmetrize(f), Eigen::EigenvaluesOnly);
  const double hi = es.eigenvalues()[2];
  return hi > 0.0 && es.eigenvalues()[0] > 1e-12 * hi;
}

Covariance3 covariance_from_qfim(const QfimMatrix& f, double n) {
  if (!(n >= 1.0)) fail(ErrorKind::DomainError, "trial count must be at least 1");
  if (!is_invertible_qfim(f.m)) {
    fail(ErrorKind::SingularQfim, "quantum Fisher information matrix is not invertible");
  }
  // Spectral inverse: the cofactor formula loses ~cond^2 digits when F is
  // nearly rank-deficient, which happens close to every pole in t.
  const Eigen::SelfAdjointEigenSolver<Matrix3> es(symmetrize(f.m));
  const Matrix3& v = es.eigenvectors();
  Covariance3 c;
  c.m = symmetrize(v * es.eigenvalues().cwiseInverse().asDiagonal() * v.transpose() / n);
  c.n = n;
  c.t = f.t;
  return c;
}

double scalar_bound(const Matrix3& weight, const QfimMatrix& f, double n) {
  return (weight * covariance_from_qfim(f, n).m).trace();
}

namespace {

void check_jacobian(const Matrix3& j) {
  if (!j.allFinite() || std::abs(j.determinant()) < 1e-12) {
    fail(ErrorKind::SingularJacobian, "Jacobian is singular (|det J| < 1e-12)");
  }
}

}  // namespace

QfimMatrix reparameterize_qfim(const QfimMatrix& f, const Matrix3& jacobian,
                               Reparameterization direction) {
  check_jacobian(jacobian);
  QfimMatrix out = f;
  if (direction == Reparameterization::BetaToAlpha) {
    out.m = symmetrize(jacobian.transpose() * f.m * jacobian);
  } else {
    const Matrix3 inv = jacobian.inverse();
    out.m = symmetrize(inv.transpose() * f.m * inv);
  }
  return out;
}

Matrix3 reparameterize_covariance(const Matrix3& c, const Matrix3& jacobian,
                                  Reparameterization direction) {
  check_jacobian(jacobian);
  if (direction == Reparameterization::BetaToAlpha) {
    const Matrix3 inv = jacobian.inverse();
    return symmetrize(inv * c * inv.transpose());
  }
  return symmetrize(jacobian * c * jacobian.transpose());
}

Matrix3 bell_cfi(const HamiltonianModel& model, const Vector3& alpha, double t) {
  const auto probs_at = [&](const Vector3& a) {
    return bell_probabilities(model.evaluate(a).coefficients.b, t);
  };
  const auto p = probs_at(alpha);
  std::array<std::array<double, 3>, 4> dp{};
  for (int i = 0; i < 3; ++i) {
    const double h = 1e-6 * std::max(1.0, std::abs(alpha[i]));
    Vector3 plus = alpha, minus = alpha;
    plus[i] += h;
    minus[i] -= h;
    const auto pp = probs_at(plus);
    const auto pm = probs_at(minus);
    for (int k = 0; k < 4; ++k) dp[k][i] = (pp[k] - pm[k]) / (plus[i] - minus[i]);
  }
  Matrix3 cfi = Matrix3::Zero();
  for (int k = 0; k < 4; ++k) {
    if (p[k] < 1e-14) continue;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) cfi(i, j) += dp[k][i] * dp[k][j] / p[k];
    }
  }
  return cfi;
}

}  // namespace qmetro
