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
#include "qmetro/variance.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "qmetro/errors.hpp"
#include "qmetro/parallel.hpp"
#include "qmetro/qfim.hpp"

namespace qmetro {

namespace {

constexpr double kPi = std::numbers::pi;

// Indices of the other two parameters, in the order the variance law uses.
void others(int i, int& j, int& k) {
  switch (i) {
    case 0: j = 1; k = 2; return;
    case 1: j = 0; k = 2; return;
    case 2: j = 0; k = 1; return;
    default: fail(ErrorKind::IndexOutOfRange, "parameter index must be 0, 1 or 2");
  }
}

void check_time_and_trials(double t, double n) {
  if (!(t > 0.0) || !std::isfinite(t)) fail(ErrorKind::DomainError, "time must be positive");
  if (!(n >= 1.0)) fail(ErrorKind::DomainError, "trial count must be at least 1");
}

bool near_pole(double gap, double t, double tol) {
  const double phase = std::abs(gap) * t;
  const double k = std::round(phase / (2.0 * kPi));
  return k >= 1.0 && std::abs(phase - 2.0 * kPi * k) < tol;
}

}  // namespace

SpectralSensitivities spectral_sensitivities(const HamiltonianModel& model,
                                             const Vector3& alpha) {
  return spectral_sensitivities(model, alpha,
                                spectral_decompose(model.evaluate(alpha).hamiltonian));
}

SpectralSensitivities spectral_sensitivities(const HamiltonianModel& model,
                                             const Vector3& alpha,
                                             const SpectralDecomposition2& basis) {
  const ModelEvaluation ev = model.evaluate(alpha);
  const double scale = std::max(std::abs(basis.e0), std::abs(basis.e1));
  SpectralSensitivities s;
  s.gap = basis.gap();
  if (!(std::abs(s.gap) > 1e-10 * scale)) {
    fail(ErrorKind::DegenerateSpectrum,
         "energy gap vanishes; use the optimal-control path for H = 0");
  }
  Matrix2c p;
  p.col(0) = basis.v0;
  p.col(1) = basis.v1;
  for (int i = 0; i < 3; ++i) {
    const Matrix2c a = p.adjoint() * ev.derivative(i) * p;
    s.de(i, 0) = a(0, 0).real();
    s.de(i, 1) = a(1, 1).real();
    s.dgap[i] = s.de(i, 0) - s.de(i, 1);
    // First-order perturbation theory; eigenvectors are never differentiated.
    const Complex w = a(0, 1) / (basis.e1 - basis.e0);
    s.mu[i] = w.real();
    s.nu[i] = w.imag();
  }
  return s;
}

XiCoefficients xi_coefficients(const SpectralSensitivities& s, int i) {
  int j = 0, k = 0;
  others(i, j, k);
  const Vector3& g = s.dgap;
  const Vector3& mu = s.mu;
  const Vector3& nu = s.nu;
  XiCoefficients xi;
  const double re = mu[j] * g[k] - mu[k] * g[j];
  const double im = nu[j] * g[k] - nu[k] * g[j];
  xi.xi1 = re * re + im * im;
  const double cross = mu[k] * nu[j] - mu[j] * nu[k];
  xi.xi2 = 16.0 * cross * cross;
  const double triple = mu[0] * (nu[2] * g[1] - nu[1] * g[2]) +
                        mu[1] * (nu[0] * g[2] - nu[2] * g[0]) +
                        mu[2] * (nu[1] * g[0] - nu[0] * g[1]);
  xi.xi3 = 16.0 * triple * triple;
  return xi;
}

double csc2(double x) {
  if (std::abs(x) < 1e-4) return 1.0 / (x * x) + 1.0 / 3.0;
  const double s = std::sin(x);
  return 1.0 / (s * s);
}

Vector3 closed_form_variances(const HamiltonianModel& model, const Vector3& alpha,
                              double t, double n) {
  check_time_and_trials(t, n);
  const SpectralSensitivities s = spectral_sensitivities(model, alpha);
  if (near_pole(s.gap, t, 1e-9)) {
    fail(ErrorKind::DivergentTime, "dE t is a multiple of 2 pi; variances diverge");
  }
  const double c = csc2(0.5 * s.gap * t);
  Vector3 v;
  for (int i = 0; i < 3; ++i) {
    const XiCoefficients xi = xi_coefficients(s, i);
    if (!(xi.xi3 > 0.0)) {
      fail(ErrorKind::SingularQfim, "xi3 vanishes; the QFIM is singular");
    }
    v[i] = (c * t * t * xi.xi1 + xi.xi2) / (n * t * t * xi.xi3);
  }
  return v;
}

Vector3 inverse_qfim_variances(const HamiltonianModel& model, const Vector3& alpha,
                               double t, double n) {
  check_time_and_trials(t, n);
  return covariance_from_qfim(qfim_entangled(model, alpha, t), n).m.diagonal();
}

Vector3 estimator_variances(const HamiltonianModel& model, const Vector3& alpha,
                            double t, double n) {
  const Vector3 closed = closed_form_variances(model, alpha, t, n);
  const Vector3 inverse = inverse_qfim_variances(model, alpha, t, n);
  for (int i = 0; i < 3; ++i) {
    if (std::abs(closed[i] - inverse[i]) > 1e-8 * std::abs(inverse[i])) return inverse;
  }
  return closed;
}

double variance_envelope(const XiCoefficients& xi, double c0, double t, double n) {
  if (!(xi.xi3 > 0.0)) fail(ErrorKind::DomainError, "xi3 must be positive");
  if (!(c0 >= 1.0)) fail(ErrorKind::DomainError, "c0 must be at least 1");
  check_time_and_trials(t, n);
  return (c0 * t * t * xi.xi1 + xi.xi2) / (n * t * t * xi.xi3);
}

double variance_infimum(const XiCoefficients& xi, double n) {
  if (!(xi.xi3 > 0.0)) fail(ErrorKind::DomainError, "xi3 must be positive");
  return xi.xi1 / (n * xi.xi3);
}

std::vector<VarianceRow> variance_curve(const HamiltonianModel& model, const Vector3& alpha,
                                        std::span<const double> t_grid, double n, int param,
                                        unsigned threads) {
  const SpectralSensitivities s = spectral_sensitivities(model, alpha);
  const XiCoefficients xi = xi_coefficients(s, param);
  const double infimum = variance_infimum(xi, n);
  std::vector<VarianceRow> rows(t_grid.size());
  parallel_for(t_grid.size(), threads, [&](std::size_t idx) {
    VarianceRow& row = rows[idx];
    row.t = t_grid[idx];
    row.infimum = infimum;
    row.envelope = variance_envelope(xi, 1.0, row.t, n);
    if (near_pole(s.gap, row.t, 1e-6)) {
      row.pole = true;
      row.v.setConstant(std::numeric_limits<double>::quiet_NaN());
      return;
    }
    try {
      row.v = estimator_variances(model, alpha, row.t, n);
    } catch (const Error& e) {
      // Just outside the pole window the QFIM can still be numerically singular.
      if (e.kind() != ErrorKind::SingularQfim && e.kind() != ErrorKind::DivergentTime) throw;
      row.pole = true;
      row.v.setConstant(std::numeric_limits<double>::quiet_NaN());
    }
  });
  return rows;
}

}  // namespace qmetro
