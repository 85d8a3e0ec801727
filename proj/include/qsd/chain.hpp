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

// Absorbing Markov chain models on a finite state space S with one implicit
// absorbing point. Continuous-time chains are given by a rate matrix L on S
// together with a killing vector V; the sub-Markovian generator on S is L - V.
// Discrete-time chains are given by the substochastic block Q of the full
// kernel and the absorption probabilities a.

#ifndef QSD_CHAIN_HPP_
#define QSD_CHAIN_HPP_

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace qsd {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kGeneratorTol = 1e-12;
inline constexpr double kProbSumTol = 1e-10;

class StateSpace {
 public:
  StateSpace() = default;
  explicit StateSpace(std::vector<std::string> labels);

  // States labelled "1", ..., "n" (or starting at `first`).
  static StateSpace numbered(std::size_t n, int first = 1);

  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(std::size_t i) const { return labels_.at(i); }
  std::optional<std::size_t> index_of(const std::string& label) const;

  bool operator==(const StateSpace&) const = default;

 private:
  std::vector<std::string> labels_;
};

// A probability vector on S.
class ProbDist {
 public:
  ProbDist() = default;
  // Validates nonnegativity and unit mass (abs tol kProbSumTol).
  explicit ProbDist(Vector weights);

  // Rescales nonnegative weights to unit mass.
  static ProbDist normalized(const Vector& weights);
  static ProbDist dirac(std::size_t n, std::size_t at);
  static ProbDist uniform(std::size_t n);

  std::size_t size() const { return static_cast<std::size_t>(w_.size()); }
  const Vector& weights() const { return w_; }
  double operator[](std::size_t i) const { return w_(static_cast<Eigen::Index>(i)); }
  double min() const { return w_.minCoeff(); }

 private:
  Vector w_;
};

class ContinuousChain {
 public:
  const StateSpace& states() const { return states_; }
  std::size_t size() const { return states_.size(); }
  // Markov generator L on S; diagonal equals minus the off-diagonal row sums.
  const Matrix& rates() const { return rates_; }
  const Vector& killing() const { return killing_; }
  // L - V.
  Matrix subgenerator() const;
  // The (n+1)x(n+1) generator on S plus the absorbing point (last index).
  Matrix full_generator() const;

  bool irreducible() const { return irreducible_; }
  // True when V == 0: nothing is ever absorbed.
  bool non_absorbing() const { return non_absorbing_; }
  // True when the supplied diagonal disagreed with the recomputed one.
  bool diagonal_overwritten() const { return diagonal_overwritten_; }

  bool operator==(const ContinuousChain& o) const {
    return states_ == o.states_ && rates_ == o.rates_ && killing_ == o.killing_;
  }

 private:
  friend ContinuousChain build_continuous(StateSpace, const Matrix&, const Vector&);
  StateSpace states_;
  Matrix rates_;
  Vector killing_;
  bool irreducible_ = false;
  bool non_absorbing_ = false;
  bool diagonal_overwritten_ = false;
};

class DiscreteChain {
 public:
  const StateSpace& states() const { return states_; }
  std::size_t size() const { return states_.size(); }
  const Matrix& sub() const { return sub_; }
  const Vector& absorb() const { return absorb_; }
  // Full (n+1)x(n+1) stochastic kernel, absorbing point last.
  Matrix full_kernel() const;
  bool irreducible() const { return irreducible_; }

  bool operator==(const DiscreteChain& o) const {
    return states_ == o.states_ && sub_ == o.sub_ && absorb_ == o.absorb_;
  }

 private:
  friend DiscreteChain build_discrete(StateSpace, const Matrix&, const Vector&);
  StateSpace states_;
  Matrix sub_;
  Vector absorb_;
  bool irreducible_ = false;
};

using AbsorbingChain = std::variant<ContinuousChain, DiscreteChain>;

// Validates a continuous-time model. Supplied diagonal entries are ignored and
// recomputed from the off-diagonals.
ContinuousChain build_continuous(StateSpace states, const Matrix& rates,
                                 const Vector& killing);

// Validates a discrete-time model; rows of (Q | a) must sum to one.
DiscreteChain build_discrete(StateSpace states, const Matrix& sub,
                             const Vector& absorb);

// Strong connectivity of the digraph with an edge x->y whenever adj(x,y) > 0
// (x != y).
bool strongly_connected(const Matrix& adj);

const StateSpace& states_of(const AbsorbingChain& chain);
inline bool is_continuous(const AbsorbingChain& c) {
  return std::holds_alternative<ContinuousChain>(c);
}

}  // namespace qsd

#endif  // QSD_CHAIN_HPP_
