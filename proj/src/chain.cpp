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

#include "qsd/chain.hpp"

#include <cmath>
#include <deque>
#include <set>

#include "qsd/error.hpp"

namespace qsd {

StateSpace::StateSpace(std::vector<std::string> labels) : labels_(std::move(labels)) {
  require(!labels_.empty(), ErrorKind::InvalidState, "state space must be nonempty");
  std::set<std::string> seen;
  for (const auto& l : labels_) {
    require(seen.insert(l).second, ErrorKind::InvalidState,
            "duplicate state label '" + l + "'");
  }
}

StateSpace StateSpace::numbered(std::size_t n, int first) {
  std::vector<std::string> labels;
  labels.reserve(n);
  for (std::size_t i = 0; i < n; ++i) labels.push_back(std::to_string(first + static_cast<int>(i)));
  return StateSpace(std::move(labels));
}

std::optional<std::size_t> StateSpace::index_of(const std::string& label) const {
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] == label) return i;
  }
  return std::nullopt;
}

ProbDist::ProbDist(Vector weights) : w_(std::move(weights)) {
  require(w_.size() > 0, ErrorKind::DimensionMismatch, "empty distribution");
  for (Eigen::Index i = 0; i < w_.size(); ++i) {
    require(std::isfinite(w_(i)) && w_(i) >= 0.0, ErrorKind::NegativeEntry,
            "distribution weights must be finite and nonnegative");
  }
  require(std::abs(w_.sum() - 1.0) <= kProbSumTol, ErrorKind::RowSumViolation,
          "distribution does not sum to 1");
}

ProbDist ProbDist::normalized(const Vector& weights) {
  const double total = weights.sum();
  require(total > 0.0 && std::isfinite(total), ErrorKind::InvalidArgument,
          "cannot normalize weights with nonpositive total");
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    require(weights(i) >= 0.0, ErrorKind::NegativeEntry, "negative weight");
  }
  return ProbDist(weights / total);
}

ProbDist ProbDist::dirac(std::size_t n, std::size_t at) {
  require(at < n, ErrorKind::InvalidState, "dirac index out of range");
  Vector w = Vector::Zero(static_cast<Eigen::Index>(n));
  w(static_cast<Eigen::Index>(at)) = 1.0;
  return ProbDist(std::move(w));
}

ProbDist ProbDist::uniform(std::size_t n) {
  return ProbDist(Vector::Constant(static_cast<Eigen::Index>(n), 1.0 / static_cast<double>(n)));
}

bool strongly_connected(const Matrix& adj) {
  const Eigen::Index n = adj.rows();
  if (n <= 1) return true;
  auto reach_all = [&](bool transpose) {
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::deque<Eigen::Index> queue{0};
    seen[0] = 1;
    Eigen::Index count = 1;
    while (!queue.empty()) {
      const Eigen::Index x = queue.front();
      queue.pop_front();
      for (Eigen::Index y = 0; y < n; ++y) {
        const double w = transpose ? adj(y, x) : adj(x, y);
        if (y != x && w > 0.0 && !seen[static_cast<std::size_t>(y)]) {
          seen[static_cast<std::size_t>(y)] = 1;
          ++count;
          queue.push_back(y);
        }
      }
    }
    return count == n;
  };
  return reach_all(false) && reach_all(true);
}

Matrix ContinuousChain::subgenerator() const {
  Matrix m = rates_;
  m.diagonal() -= killing_;
  return m;
}

Matrix ContinuousChain::full_generator() const {
  const Eigen::Index n = rates_.rows();
  Matrix full = Matrix::Zero(n + 1, n + 1);
  full.topLeftCorner(n, n) = subgenerator();
  full.topRightCorner(n, 1) = killing_;
  return full;
}

ContinuousChain build_continuous(StateSpace states, const Matrix& rates,
                                 const Vector& killing) {
  const auto n = static_cast<Eigen::Index>(states.size());
  require(rates.rows() == n && rates.cols() == n, ErrorKind::DimensionMismatch,
          "rate matrix must be " + std::to_string(n) + "x" + std::to_string(n));
  require(killing.size() == n, ErrorKind::DimensionMismatch,
          "killing vector must have length " + std::to_string(n));

  ContinuousChain chain;
  chain.states_ = std::move(states);
  chain.rates_ = rates;
  for (Eigen::Index x = 0; x < n; ++x) {
    require(std::isfinite(killing(x)) && killing(x) >= 0.0, ErrorKind::NegativeRate,
            "negative killing rate at state " + chain.states_.label(static_cast<std::size_t>(x)));
    double out = 0.0;
    for (Eigen::Index y = 0; y < n; ++y) {
      if (y == x) continue;
      require(std::isfinite(rates(x, y)) && rates(x, y) >= 0.0, ErrorKind::NegativeRate,
              "negative rate from " + chain.states_.label(static_cast<std::size_t>(x)) +
                  " to " + chain.states_.label(static_cast<std::size_t>(y)));
      out += rates(x, y);
    }
    if (std::abs(rates(x, x) + out) > kGeneratorTol) chain.diagonal_overwritten_ = true;
    chain.rates_(x, x) = -out;
  }
  chain.killing_ = killing;
  chain.irreducible_ = strongly_connected(chain.rates_);
  chain.non_absorbing_ = (killing.array() == 0.0).all();
  return chain;
}

Matrix DiscreteChain::full_kernel() const {
  const Eigen::Index n = sub_.rows();
  Matrix full = Matrix::Zero(n + 1, n + 1);
  full.topLeftCorner(n, n) = sub_;
  full.topRightCorner(n, 1) = absorb_;
  full(n, n) = 1.0;
  return full;
}

DiscreteChain build_discrete(StateSpace states, const Matrix& sub, const Vector& absorb) {
  const auto n = static_cast<Eigen::Index>(states.size());
  require(sub.rows() == n && sub.cols() == n, ErrorKind::DimensionMismatch,
          "substochastic matrix must be " + std::to_string(n) + "x" + std::to_string(n));
  require(absorb.size() == n, ErrorKind::DimensionMismatch,
          "absorption vector must have length " + std::to_string(n));
  for (Eigen::Index x = 0; x < n; ++x) {
    const std::string& lx = states.label(static_cast<std::size_t>(x));
    require(std::isfinite(absorb(x)) && absorb(x) >= 0.0, ErrorKind::NegativeEntry,
            "negative absorption probability at state " + lx);
    for (Eigen::Index y = 0; y < n; ++y) {
      require(std::isfinite(sub(x, y)) && sub(x, y) >= 0.0, ErrorKind::NegativeEntry,
              "negative transition probability from state " + lx);
    }
    const double row = sub.row(x).sum() + absorb(x);
    require(std::abs(row - 1.0) <= kGeneratorTol, ErrorKind::RowSumViolation,
            "row " + lx + " sums to " + std::to_string(row));
  }
  DiscreteChain chain;
  chain.states_ = std::move(states);
  chain.sub_ = sub;
  chain.absorb_ = absorb;
  chain.irreducible_ = strongly_connected(sub);
  return chain;
}

const StateSpace& states_of(const AbsorbingChain& chain) {
  return std::visit([](const auto& c) -> const StateSpace& { return c.states(); }, chain);
}

}  // namespace qsd
