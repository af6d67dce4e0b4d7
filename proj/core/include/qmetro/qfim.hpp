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
#ifndef QMETRO_QFIM_HPP_
#define QMETRO_QFIM_HPP_

// Generators of parameter translation and the quantum Fisher information
// matrix of the probe+ancilla scheme.

#include <string>

#include "qmetro/qubit.hpp"

namespace qmetro {

/// Quantum Fisher information matrix at evolution time `t`.
struct QfimMatrix {
  Matrix3 m = Matrix3::Zero();
  double t = 0.0;
  std::string model;
  Vector3 alpha = Vector3::Zero();
};

/// Estimator covariance (n F)^-1 for `n` trials at time `t`.
struct Covariance3 {
  Matrix3 m = Matrix3::Zero();
  double n = 1.0;
  double t = 0.0;

  double trace() const { return m.trace(); }
};

/// h_i(t) = int_0^t e^{iH tau} (d_i H) e^{-iH tau} d tau in closed form.
///
/// Uses the eigenbasis of H: diagonal elements grow as t d_i E_l, the
/// off-diagonal ones oscillate at the gap frequency. Falls back to t d_i H
/// when |dE| t < 1e-8. Throws Error(IndexOutOfRange) for i outside [0, 2].
Matrix2c generator(const HamiltonianModel& model, const Vector3& alpha, int i, double t);

/// Same, expressed in a caller-supplied eigenbasis of H (any ordering or
/// phase convention). The result is basis independent.
Matrix2c generator(const HamiltonianModel& model, const Vector3& alpha, int i, double t,
                   const SpectralDecomposition2& basis);

/// Same integral by composite Simpson's rule with `steps` panels (test oracle).
Matrix2c generator_oracle(const HamiltonianModel& model, const Vector3& alpha, int i,
                          double t, int steps);

/// F_ij = 2 Tr(h_i h_j) - Tr h_i Tr h_j for the maximally entangled input.
QfimMatrix qfim_entangled(const HamiltonianModel& model, const Vector3& alpha, double t);

/// Trace formula applied to an arbitrary set of generators.
Matrix3 qfim_from_generators(const Matrix2c& h1, const Matrix2c& h2, const Matrix2c& h3);

/// Spectral closed form
///   F_ij = t^2 d_i dE d_j dE + 16 sin^2(dE t / 2) Re(w_i conj(w_j)),
/// with w_i = <E0|d_i E1> from first-order perturbation theory.
Matrix3 qfim_spectral(const HamiltonianModel& model, const Vector3& alpha, double t);
Matrix3 qfim_spectral(const HamiltonianModel& model, const Vector3& alpha, double t,
                      const SpectralDecomposition2& basis);

/// QFIM for the input sqrt(x)|00> + sqrt(1-x)|11>, 0 <= x <= 1.
QfimMatrix qfim_weighted_initial(const HamiltonianModel& model, const Vector3& alpha,
                                 double t, double x);

/// max_ij |Im Tr(h_i h_j)| / 2, which vanishes when weak commutativity holds.
double weak_commutativity_residual(const HamiltonianModel& model, const Vector3& alpha,
                                   double t);

/// True when min eig(F) > 1e-12 max eig(F).
bool is_invertible_qfim(const Matrix3& f);

/// (n F)^-1; throws Error(SingularQfim).
Covariance3 covariance_from_qfim(const QfimMatrix& f, double n);

/// Tr(W F^-1) / n; throws Error(SingularQfim).
double scalar_bound(const Matrix3& weight, const QfimMatrix& f, double n);

enum class Reparameterization { AlphaToBeta, BetaToAlpha };

/// Transforms a QFIM between parameterizations. `jacobian` is always
/// J[i][j] = d beta_i / d alpha_j, so F_alpha = J^T F_beta J.
/// Throws Error(SingularJacobian) when |det J| < 1e-12.
QfimMatrix reparameterize_qfim(const QfimMatrix& f, const Matrix3& jacobian,
                               Reparameterization direction);

/// Contravariant counterpart: C_alpha = J^-1 C_beta J^-T.
Matrix3 reparameterize_covariance(const Matrix3& c, const Matrix3& jacobian,
                                  Reparameterization direction);

/// Classical Fisher information of a Bell-basis measurement on (U x I)|Phi+>,
/// with outcome probability derivatives by central differences. Outcomes
/// with probability below 1e-14 are skipped, so directions whose Bell
/// amplitude vanishes exactly (e.g. off-axis components of an axis-aligned
/// residual) carry no information at that point.
Matrix3 bell_cfi(const HamiltonianModel& model, const Vector3& alpha, double t);

/// Smallest eigenvalue of a symmetric 3x3 matrix.
double min_eigenvalue(const Matrix3& m);
double max_eigenvalue(const Matrix3& m);

/// PSD test with slack `rel_tol * max(1, max eigenvalue)`.
bool is_psd(const Matrix3& m, double rel_tol = 1e-10);

}  // namespace qmetro

#endif  // QMETRO_QFIM_HPP_
