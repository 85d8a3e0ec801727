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

// Poincare and log-Sobolev constants of reversible generators, and the
// canonical-path bound for discrete absorbing chains.
//
// Energy convention. For a generator G reversible w.r.t. m,
//   E(g) = 1/2 sum_{x,y} (g(y) - g(x))^2 m(x) G(x,y) = <-G g, g>_m,
// the spectral gap is inf E(g)/Var_m(g) and the log-Sobolev constant is
//   alpha = inf E(g) / Ent_m(g^2).
// With this normalization the symmetric two-point chain has gap 2 and alpha 1,
// and alpha <= gap/2 always.

#ifndef QSD_FUNINEQ_HPP_
#define QSD_FUNINEQ_HPP_

#include <cstdint>
#include <optional>
#include <vector>

#include "qsd/chain.hpp"
#include "qsd/spectral.hpp"

namespace qsd {

// Throws NotSymmetric unless m(x)G(x,y) = m(y)G(y,x) within 1e-10 (scaled by
// the largest entry of G).
void require_detailed_balance(const Matrix& generator, const ProbDist& m);

// Smallest nonzero eigenvalue of -G for G reversible w.r.t. m.
double spectral_gap(const Matrix& sym_generator, const ProbDist& invariant);

struct GapEigenpair {
  double gap = 0.0;
  // Eigenfunction of -G at the gap, normalized in L^2(m).
  Vector g;
};
GapEigenpair spectral_gap_eigenpair(const Matrix& sym_generator, const ProbDist& invariant);

double dirichlet_energy(const Matrix& sym_generator, const ProbDist& m, const Vector& g);
double variance(const ProbDist& m, const Vector& g);
// Ent_m(g^2) = m[g^2 ln g^2] - m[g^2] ln m[g^2], with 0 ln 0 = 0.
double entropy_sq(const ProbDist& m, const Vector& g);

// Gap of the additive symmetrization of L in L^2(eta).
double base_gap(const ContinuousChain& chain, const PerronData& p);

// (phi_min phi*_min)/(phi_max phi*_max) * gap_base.
double compare_gap(const PerronData& p, double gap_base);

enum class LsiMode {
  // Closed-form lower bound and trial-function upper bound only.
  Bracket,
  // Also run the randomized minimization of E/Ent.
  Estimate,
};

struct LsiOptions {
  LsiMode mode = LsiMode::Estimate;
  std::uint64_t seed = 0;
  int restarts = 50;
  double tol = 1e-8;
  int max_iter = 4000;
};

struct LsiBracket {
  double lower = 0.0;
  double upper = 0.0;
  // Best value found by the optimizer, clipped to the upper bound; empty in
  // Bracket mode or after a stall.
  std::optional<double> estimate;
  bool stalled = false;
};

// (1 - 2 m_min)/ln(1/m_min - 1) * gap, or gap/2 when m_min = 1/2.
double lsi_lower_bound(double m_min, double gap);

LsiBracket lsi_constant(const Matrix& sym_generator, const ProbDist& invariant,
                        const LsiOptions& opts = {});

// Paths to the absorbing point. State index n (the chain size) stands for it.
struct PathFamily {
  std::vector<std::vector<std::size_t>> paths;
};

// Breadth-first shortest paths to absorption; among shortest paths the
// lexicographically smallest state sequence is chosen. Throws
// NoPathToAbsorption if some state cannot reach absorption.
PathFamily default_paths(const DiscreteChain& chain);

struct PathBound {
  double A = 0.0;
  double beta1_upper = 0.0;
  // Edge attaining the maximum (second index n means absorption).
  std::size_t edge_from = 0;
  std::size_t edge_to = 0;
};

// max over used edges (x,y) of 2/(q(x)K(x,y)) sum_{z : (x,y) in gamma_z}
// |gamma_z| q(z), and 1 - 1/A. Requires q(x)Q(x,y) = q(y)Q(y,x) on S.
PathBound path_bound(const DiscreteChain& chain, const ProbDist& q,
                     const std::optional<PathFamily>& paths = std::nullopt);

// 1/2 sum over x, y in S plus absorption of (f(y) - f(x))^2 q(x)K(x,y), with
// f extended by 0 at absorption.
double dirichlet_form(const DiscreteChain& chain, const ProbDist& q, const Vector& f);

// <(I - Q) f, f>_q.
double kernel_quadratic_form(const DiscreteChain& chain, const ProbDist& q, const Vector& f);

}  // namespace qsd

#endif  // QSD_FUNINEQ_HPP_
