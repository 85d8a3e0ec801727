// Copyright 2026 The qsdcert Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Exponential certificates C exp(-rho t) for sup_mu0 ||mu_t - nu|| and the
// comparison envelopes that relate the absorbing chain to its Doob transform.
// All TV values use the analyst's convention (maximum 2).
//
// With r = phi_max/phi_min, eta~ the Doob invariant law, and the Perron
// normalization eta[phi^2] = 1:
//   thm2            C = sqrt(1/eta~_min) r,                rho = gap of L~ symmetrized
//   thm3_a          C = sqrt(1/(phi^2 eta)_min) r,         rho = lambda2 - lambda1
//   thm3_b          C = sqrt(1/eta_min) r^2,               rho = lambda2 - lambda1
//   lsi             C = sqrt(2 r ln(1/eta~_min)),          rho = alpha/2
//   lsi_reversible  C = sqrt(2 ln(1/(phi^2 eta)_min)) r,   rho = alpha/2
//   product_tv      C = (sqrt(1/eta_min) r^2)^d,           rho = lambda2 - lambda1
//   product_lsi     C = sqrt(2 d ln(r/eta_min) r^d),       rho = alpha/2
// (note eta[phi phi*]/(phi phi* eta)_min = 1/eta~_min).

#ifndef QSD_BOUNDS_HPP_
#define QSD_BOUNDS_HPP_

#include <string>

#include "qsd/chain.hpp"
#include "qsd/doob.hpp"
#include "qsd/evolution.hpp"
#include "qsd/spectral.hpp"

namespace qsd {

enum class CurveKind { Thm2, Thm3A, Thm3B, Lsi, LsiReversible, ProductTv, ProductLsi };

std::string to_string(CurveKind kind);

struct BoundCurve {
  double prefactor = 0.0;
  double rate = 0.0;
  CurveKind kind = CurveKind::Thm2;

  double eval(double t) const;
};

BoundCurve thm2_curve(const PerronData& p, double gap_tilde);

enum class Thm3Variant { A, B };
// Throws NotReversible when lambda2 is not available (pass nullopt).
BoundCurve thm3_curve(const PerronData& p, std::optional<double> lambda2, Thm3Variant variant);

BoundCurve lsi_curve(const PerronData& p, double alpha, bool reversible);

struct ProductCurves {
  BoundCurve tv;
  BoundCurve lsi;
};
// Single-factor Perron data; lambda2 and alpha of the single factor.
ProductCurves product_curves(const PerronData& p, std::optional<double> lambda2, double alpha, int d);

// Time at which the curve reaches level eps: (ln C - ln eps)/rho, or 0 when
// eps >= C.
double mixing_time(const BoundCurve& curve, double eps);

struct Envelope {
  double lower = 0.0;
  double actual = 0.0;
  double upper = 0.0;
};

// (phi_min/2phi_max)||mu~_t - eta~|| <= ||mu_t - nu|| <= 2(phi_max/phi_min)||mu~_t - eta~||,
// with mu~_0 proportional to phi mu0.
Envelope thm1_envelope(const Evolver& ev, const PerronData& p, const DoobChain& d, const ProbDist& mu0,
                       double t);

struct MedianEnvelope {
  double median_integral = 0.0;
  double tv = 0.0;
  double twice_median_integral = 0.0;
  double median = 0.0;
};

// integral |f - m| dnu <= ||mu - nu|| <= 2 integral |f - m| dnu with f = mu/nu and
// m the lower nu-median of f. Requires nu > 0.
MedianEnvelope median_envelope(const ProbDist& mu, const ProbDist& nu);

// Reweighting comparison: with mu~ and nu~ proportional to psi mu and psi nu,
//   (psi_min/2psi_max)||mu~ - nu~|| <= ||mu - nu|| <= 2(psi_max/psi_min)||mu~ - nu~||.
Envelope reweight_envelope(const ProbDist& mu, const ProbDist& nu, const Vector& psi);

}  // namespace qsd

#endif  // QSD_BOUNDS_HPP_
