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

// Exact transient analysis of absorbing chains: conditioned laws, survival,
// and distances to the quasi-stationary law.
//
// The sub-Markov semigroup is propagated in shifted form,
//   exp(t (L - V + lambda1 I))   (continuous)   or   (Q / beta)^l  (discrete),
// so that long horizons neither underflow nor lose relative accuracy; the
// survival probability is recovered as exp(-lambda1 t) times the row mass.
//
// Total variation follows the analyst's convention sum_x |mu(x) - nu(x)|,
// twice the probabilist's; see to_probabilist_tv.

#ifndef QSD_EVOLUTION_HPP_
#define QSD_EVOLUTION_HPP_

#include <optional>
#include <string>
#include <vector>

#include "qsd/chain.hpp"
#include "qsd/doob.hpp"
#include "qsd/spectral.hpp"

namespace qsd {

inline double to_probabilist_tv(double tv) { return 0.5 * tv; }

// exp(t G). When `weights` is given, G must be reversible w.r.t. it and the
// symmetric eigendecomposition is used; otherwise Eigen's scaling-and-squaring
// Pade exponential.
Matrix expm(const Matrix& generator, double t, const std::optional<Vector>& weights = std::nullopt);

// Scaling-and-squaring exponential, regardless of structure.
Matrix expm_pade(const Matrix& a);

struct ConditionedLaw {
  ProbDist law;
  double survival = 1.0;
  double log_survival = 0.0;
};

class Evolver {
 public:
  // Perron data is computed when not supplied. For discrete chains whose
  // Perron data cannot be computed, plain renormalized powers are used.
  explicit Evolver(AbsorbingChain chain, std::optional<PerronData> perron = std::nullopt);

  const AbsorbingChain& chain() const { return chain_; }
  bool discrete() const { return !is_continuous(chain_); }
  bool reversible() const { return reversing_.has_value(); }
  double lambda1() const { return lambda1_; }

  // exp(t(L - V + lambda1)) or (Q/beta)^t. Throws NegativeTime, and
  // FractionalTime for non-integer t on discrete chains.
  Matrix shifted(double t) const;

  ConditionedLaw conditioned(const ProbDist& mu0, double t) const;

  // Conditioned law and survival from every Dirac start, in state order.
  std::vector<ConditionedLaw> from_diracs(double t) const;

 private:
  ConditionedLaw finish(const Vector& row, double t) const;

  AbsorbingChain chain_;
  double lambda1_ = 0.0;
  double log_beta_ = 0.0;
  std::optional<Vector> reversing_;
  Matrix sub_;  // L - V + lambda1 I, or Q/beta
};

ConditionedLaw conditioned_law(const AbsorbingChain& chain, const ProbDist& mu0, double t);

// mu~_0 exp(t L~) or mu~_0 K^t.
ProbDist doob_law(const DoobChain& d, const ProbDist& mu_tilde0, double t);

// Law with density proportional to phi with respect to mu0.
ProbDist doob_initial(const PerronData& p, const ProbDist& mu0);

struct Distances {
  double tv = 0.0;
  double chi2 = 0.0;
  double kl = 0.0;
};

// tv = sum |mu - ref|, chi2 = sum (mu/ref - 1)^2 ref, kl = sum (mu/ref) ln(mu/ref) ref.
// Throws ReferenceZero unless ref > 0 everywhere.
Distances distances(const ProbDist& mu, const ProbDist& ref);

double tv_distance(const ProbDist& a, const ProbDist& b);

struct WorstCase {
  double tv = 0.0;
  std::size_t argmax = 0;
};

// Max over Dirac initial laws of ||mu_t - nu||; by convexity of TV this is
// the supremum over all initial laws.
WorstCase worst_case_tv(const Evolver& ev, const ProbDist& nu, double t);

std::vector<double> survival_curve(const Evolver& ev, const ProbDist& m0, const std::vector<double>& times);

struct EvolutionRow {
  double t = 0.0;
  ProbDist mu;
  double survival = 1.0;
  double log_survival = 0.0;
  double tv = 0.0;
  // L^2 and entropy distances to nu and, for the Doob chain, to eta~; empty
  // when nu has zero entries.
  std::optional<double> i_t, j_t, i_tilde, j_tilde;
  // Doob-chain distance ||mu~_t - eta~||.
  double tv_tilde = 0.0;
};

struct EvolutionReport {
  std::vector<std::string> states;
  std::vector<EvolutionRow> rows;

  std::string to_csv() const;
  std::string to_json() const;
};

EvolutionReport evolve(const Evolver& ev, const PerronData& p, const DoobChain& d, const ProbDist& mu0,
                       const std::vector<double>& times);

// `count` points on [tmin, tmax], linear or logarithmic.
std::vector<double> time_grid(double tmin, double tmax, std::size_t count, bool log_scale);

}  // namespace qsd

#endif  // QSD_EVOLUTION_HPP_
