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

// Trajectory simulation of absorbing chains.
//
// Trajectory i draws from its own engine seeded by (seed, i), so a sample is
// a pure function of the configuration regardless of how trajectories are
// split across threads. Continuous chains are simulated exactly through
// exponential holding times; the killing integral is accumulated in closed
// form between jumps.

#ifndef QSD_MONTECARLO_HPP_
#define QSD_MONTECARLO_HPP_

#include <cstdint>
#include <limits>
#include <vector>

#include "qsd/chain.hpp"

namespace qsd {

struct SimConfig {
  std::uint64_t seed = 0;
  std::size_t n_traj = 1000;
  // Time horizon; a whole number of steps for discrete chains.
  double horizon = 1.0;
  unsigned threads = 1;
};

struct AbsorptionSample {
  // Absorption time, +inf when still alive at the horizon.
  std::vector<double> tau;
  // State index at the horizon, or n (the cemetery) once absorbed.
  std::vector<std::size_t> terminal;
  // exp(-int_0^{min(tau, horizon)} V(X_s) ds); for discrete chains the
  // product of (1 - a(X_k)) over the steps taken.
  std::vector<double> weight;
  double horizon = 0.0;
  std::size_t n_states = 0;

  std::size_t survivors() const;
  // Fraction of trajectories with tau > t, for t <= horizon.
  double survival(double t) const;
};

AbsorptionSample simulate(const AbsorbingChain& chain, const ProbDist& m0, const SimConfig& cfg);

struct ConditionedEstimate {
  ProbDist law;
  Vector std_error;  // binomial standard errors per state
  std::size_t survivors = 0;
  double survival = 0.0;
};

// Empirical law of the survivors at time t. Throws TooFewSurvivors when the
// exact expected survivor count n_traj * P[tau > t] is below 100.
ConditionedEstimate estimate_conditioned(const AbsorbingChain& chain, const ProbDist& mu0, double t,
                                         const SimConfig& cfg);

struct FeynmanKacEstimate {
  double value = 0.0;
  double std_error = 0.0;
  // Mean weight, an unbiased estimate of P[tau > t], and its standard error.
  double denominator = 0.0;
  double denominator_se = 0.0;
};

// Simulates the unkilled process (rates L, or Q renormalized to a stochastic
// kernel) and reweights by exp(-int V). Ratio estimator with a delta-method
// standard error.
FeynmanKacEstimate feynman_kac(const AbsorbingChain& chain, const ProbDist& mu0, double t, const Vector& f,
                               const SimConfig& cfg);

struct FeynmanKacLaw {
  Vector value;
  Vector std_error;
  double denominator = 0.0;
  double denominator_se = 0.0;
};

// Every state indicator at once, from a single sample.
FeynmanKacLaw feynman_kac_law(const AbsorbingChain& chain, const ProbDist& mu0, double t, const SimConfig& cfg);

struct KsResult {
  double statistic = 0.0;
  double critical = 0.0;  // 1% level, asymptotic 1.628/sqrt(n)
  std::size_t n = 0;
  bool passed = false;
};

// Kolmogorov-Smirnov distance between the absorption times and Exp(rate).
// Censored times count as exceeding the horizon; the supremum is taken over
// [0, horizon].
KsResult ks_exponential(const AbsorptionSample& sample, double rate);

// Least-squares slope of ln(empirical survival) on an evenly spaced grid of
// `points` times in [t0, t1].
double survival_log_slope(const AbsorptionSample& sample, double t0, double t1, int points = 20);

}  // namespace qsd

#endif  // QSD_MONTECARLO_HPP_
