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
#ifndef QMETRO_VARIANCE_HPP_
#define QMETRO_VARIANCE_HPP_

// Closed-form estimator variances versus evolution time, their oscillation
// envelope and infimum.

#include <span>
#include <vector>

#include "qmetro/qubit.hpp"

namespace qmetro {

/// First-order spectral data of H(alpha).
struct SpectralSensitivities {
  double gap = 0.0;                     // E0 - E1
  Eigen::Matrix<double, 3, 2> de;       // de(i, l) = d_i E_l
  Vector3 dgap = Vector3::Zero();       // d_i (E0 - E1)
  Vector3 mu = Vector3::Zero();         // Re <E0|d_i E1>
  Vector3 nu = Vector3::Zero();         // Im <E0|d_i E1>
};

/// Coefficients of the variance law
///   var_i(t) = (csc^2(dE t / 2) t^2 xi1 + xi2) / (n t^2 xi3).
struct XiCoefficients {
  double xi1 = 0.0;
  double xi2 = 0.0;
  double xi3 = 0.0;
};

/// Throws Error(DegenerateSpectrum) when dE <= 1e-10 ||H||.
SpectralSensitivities spectral_sensitivities(const HamiltonianModel& model,
                                             const Vector3& alpha);

/// Same data in a caller-supplied eigenbasis; ordering and phases are free.
SpectralSensitivities spectral_sensitivities(const HamiltonianModel& model,
                                             const Vector3& alpha,
                                             const SpectralDecomposition2& basis);

/// xi coefficients for the estimator of parameter `i` (0-based).
XiCoefficients xi_coefficients(const SpectralSensitivities& s, int i);

/// csc^2(x), using 1/x^2 + 1/3 for |x| < 1e-4.
double csc2(double x);

/// The three closed-form variances. Throws DivergentTime near
/// dE t = 2 k pi, SingularQfim when xi3 = 0, DegenerateSpectrum.
Vector3 closed_form_variances(const HamiltonianModel& model, const Vector3& alpha,
                              double t, double n);

/// diag((n F)^-1) from the trace-formula QFIM.
Vector3 inverse_qfim_variances(const HamiltonianModel& model, const Vector3& alpha,
                               double t, double n);

/// Estimator variances. The closed form is returned when it agrees with
/// diag((n F)^-1) to 1e-8 relative; otherwise the matrix inverse wins.
Vector3 estimator_variances(const HamiltonianModel& model, const Vector3& alpha,
                            double t, double n);

/// Curve through the sampling points where csc^2(dE t / 2) = c0.
double variance_envelope(const XiCoefficients& xi, double c0, double t, double n);

/// xi1 / (n xi3), the large-t lower bound reached at c0 = 1.
double variance_infimum(const XiCoefficients& xi, double n);

struct VarianceRow {
  double t = 0.0;
  Vector3 v = Vector3::Zero();
  double envelope = 0.0;
  double infimum = 0.0;
  bool pole = false;  // within 1e-6 of 2 k pi / |dE|; v is NaN
};

/// Tabulates the variances on `t_grid`. `param` selects which estimator the
/// envelope/infimum columns describe. Rows are ordered as the grid.
std::vector<VarianceRow> variance_curve(const HamiltonianModel& model, const Vector3& alpha,
                                        std::span<const double> t_grid, double n,
                                        int param = 0, unsigned threads = 1);

}  // namespace qmetro

#endif  // QMETRO_VARIANCE_HPP_
