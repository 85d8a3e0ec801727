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

// Perron-Frobenius and Dirichlet eigendata of absorbing chains.
//
// Normalizations (continuous time):
//   (L - V) phi = -lambda1 phi,         eta[phi^2] = 1,
//   (L* - V) phi_star = -lambda1 phi_star, eta[phi_star] = 1,
//   nu = phi_star . eta,
// where L* is the adjoint of L in L^2(eta).
//
// Discrete time: Q phi = beta phi and psi Q = beta psi with beta the Perron
// root of Q. phi is scaled so that min phi = 1 and psi so that it sums to one
// (hence nu = psi). lambda1 := 1 - beta. eta and phi_star are not defined.

#ifndef QSD_SPECTRAL_HPP_
#define QSD_SPECTRAL_HPP_

#include <complex>
#include <optional>
#include <vector>

#include "qsd/chain.hpp"

namespace qsd {

struct SolverOptions {
  // Relative eigen-residual acceptance threshold.
  double eigen_tol = 1e-9;
};

struct PerronData {
  bool discrete = false;
  double lambda1 = 0.0;
  std::optional<double> beta;  // discrete only
  Vector phi;
  Vector phi_star;             // continuous only
  Vector psi;                  // discrete only
  std::optional<ProbDist> eta; // continuous only
  ProbDist nu;

  double phi_min() const { return phi.minCoeff(); }
  double phi_max() const { return phi.maxCoeff(); }
  // phi_max / phi_min.
  double ratio() const { return phi_max() / phi_min(); }
};

struct DirichletSpectrum {
  // Spectrum of V - L (continuous) or {1 - beta_i} (discrete), sorted by real
  // part, then imaginary part.
  std::vector<std::complex<double>> eigenvalues;
  bool reversible = false;
  std::optional<double> lambda2;

  double lambda1() const { return eigenvalues.front().real(); }
  // Real part of the second eigenvalue; this is lambda2 when reversible.
  double second_real() const;
};

// Unique invariant law of an irreducible rate matrix.
ProbDist invariant_measure(const ContinuousChain& chain);

// True iff eta(x)L(x,y) = eta(y)L(y,x) for all pairs (tol 1e-10 scaled by the
// largest rate).
bool check_reversible(const ContinuousChain& chain, const ProbDist& eta);

// Detailed-balance weights for a nonnegative off-diagonal weight matrix W, if
// one exists: q(x)W(x,y) = q(y)W(y,x). Returned normalized to sum one.
std::optional<ProbDist> reversing_measure(const Matrix& weights, double tol = 1e-10);

PerronData perron(const ContinuousChain& chain, const SolverOptions& opts = {});
PerronData perron(const DiscreteChain& chain, const SolverOptions& opts = {});
PerronData perron(const AbsorbingChain& chain, const SolverOptions& opts = {});

DirichletSpectrum dirichlet_spectrum(const ContinuousChain& chain);
DirichletSpectrum dirichlet_spectrum(const DiscreteChain& chain);
DirichletSpectrum dirichlet_spectrum(const AbsorbingChain& chain);

// Eigenvalues of a general real matrix, sorted by (real, imag).
std::vector<std::complex<double>> sorted_eigenvalues(const Matrix& m);

// Eigenvalues of a symmetric-izable matrix M with D_w M D_w^{-1} symmetric,
// D_w = diag(sqrt(w)). Sorted ascending.
Vector symmetrized_eigenvalues(const Matrix& m, const Vector& w);

}  // namespace qsd

#endif  // QSD_SPECTRAL_HPP_
