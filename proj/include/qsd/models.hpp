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

// Built-in absorbing chains with known spectral structure, and the closed-form
// certificates that go with them.

#ifndef QSD_MODELS_HPP_
#define QSD_MODELS_HPP_

#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qsd/chain.hpp"
#include "qsd/spectral.hpp"

namespace qsd {

// Birth-death chain on 1..N killed at rate 1 from state 1; unit rates except
// L(N, N-1) = 2.
ContinuousChain bd_uniform(int n);

// Birth-death chain on 1..N with up rate r, down rate 1, L(N, N-1) = 1 + r,
// killed at rate 1 from state 1.
ContinuousChain bd_biased(int n, double r);

// Reversible law of bd_biased in closed form, including the last state where
// detailed balance gives eta(N) = eta(N-1) r / (1 + r).
ProbDist bd_biased_eta(int n, double r);

// Directed cycle Z_N with unit rates, killed at rate 1 from 0.
ContinuousChain cycle_chain(int n);

// Roots of X^N + X^{N-1} - 1, sorted by (real, imag).
std::vector<std::complex<double>> cycle_roots(int n);

// The unique positive root of X^N + X^{N-1} - 1, by bisection on (0, 1).
double cycle_real_root(int n);

// phi_c(x) = c^{x-N} for x != 0 and phi_c(0) = 1.
Eigen::VectorXcd cycle_eigenvector(int n, std::complex<double> c);

// S = {1, 2}, L = [[-1, 1], [1, -1]], V = (1, 1).
ContinuousChain two_point();

// Tensor-sum chain on S^d with generator (1/d) sum_k L_k and killing
// (1/d) sum_k V(x_k). Labels are comma-joined coordinates.
ContinuousChain product_chain(const ContinuousChain& base, int d);

// Perron data of the product chain: lambda1 unchanged, phi, phi_star, eta and
// nu are d-fold tensor powers.
PerronData product_perron(const PerronData& base, int d);

inline constexpr std::size_t kProductMaxStates = 20000;

struct RockBreaking {
  DiscreteChain chain;
  // Partitions of n, parts ascending, in table order; the absorbing 1^n first.
  std::vector<std::vector<int>> partitions;
  // Full kernel numerators over 2^n, absorbing state first.
  std::vector<std::vector<std::int64_t>> numerators;
  std::int64_t denominator = 1;
  // beta = 1/2, phi = sum_i C(lambda_i, 2), psi = Dirac at 1^{n-2} 2.
  PerronData exact;

  // Full table as doubles, absorbing state first.
  Matrix table() const;
};

// Binomial rock-breaking chain on partitions of n (2 <= n <= 12).
RockBreaking rock_breaking(int n);

// Number of partitions of n into exactly l parts.
std::int64_t partition_count(int n, int l);

// Birth-death kernel on 0..N: row 0 is (r, 1-r), interior rows (p, 0, q),
// row N is (1-s, s). The chain is killed on entering N; S = 0..N-1.
DiscreteChain zhou_bd(int n, double p, double r, double s);

// Random walk on 1..N absorbed at 0 from 1 with probability 1/2 and holding
// with probability 1/2 at N.
DiscreteChain intro_walk(int n);

struct Lemma11Certificate {
  double lambda = 0.0;
  std::complex<double> rho_plus;
  std::complex<double> rho_minus;
  std::complex<double> psi_image;
  // |P_N numerator at rho_plus| over the sum of its term magnitudes.
  double poly_residual = 0.0;
  // max_x |((L - V)phi + lambda phi)(x)| / max |phi| for phi = rho+^x - rho-^x.
  double residual = 0.0;
};

// Certifies each eigenvalue of V - L for bd_biased(N, r). Throws
// CertificationFailure if any check misses its tolerance.
std::vector<Lemma11Certificate> lemma11_certify(int n, double r, const std::vector<double>& spectrum);

struct ZhouCertificate {
  double theta = 0.0;
  double c = 0.0;
  double beta = 0.0;
  double boundary_defect_left = 0.0;
  double boundary_defect_right = 0.0;
  double interior_defect = 0.0;
};

// Checks a proposed (theta, c) against the two boundary equations of the
// birth-death kernel on 0..N, with phi(x) = (p/q)^{x/2} cos(theta x + c) and
// beta = 2 sqrt(pq) cos(theta). Throws BoundaryDefect above 1e-9.
ZhouCertificate zhou_certify(int n, double p, double r, double s, double theta, double c);

// Names accepted by make_builtin.
const std::vector<std::string>& builtin_names();

// Builds a builtin from its name and parameters; unspecified parameters take
// documented defaults. Unknown names or parameters raise SchemaError.
AbsorbingChain make_builtin(const std::string& name, const std::map<std::string, double>& params);

// Default parameters of a builtin, used when a spec omits them.
std::map<std::string, double> builtin_defaults(const std::string& name);

}  // namespace qsd

#endif  // QSD_MODELS_HPP_
