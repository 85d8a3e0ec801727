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

#include "qsd/doob.hpp"

#include <algorithm>
#include <cmath>

#include "qsd/error.hpp"

namespace qsd {

ProbDist doob_invariant(const PerronData& p) {
  if (p.discrete) return ProbDist::normalized(p.phi.cwiseProduct(p.psi));
  return ProbDist::normalized(p.phi.cwiseProduct(p.phi_star).cwiseProduct(p.eta->weights()));
}

Matrix adjoint(const Matrix& generator, const ProbDist& m) {
  const Vector& w = m.weights();
  return w.cwiseInverse().asDiagonal() * generator.transpose() * w.asDiagonal();
}

Matrix symmetrize(const Matrix& generator, const ProbDist& m) {
  return 0.5 * (generator + adjoint(generator, m));
}

double stationarity_defect(const Matrix& generator, const ProbDist& m) {
  return (generator.transpose() * m.weights()).cwiseAbs().maxCoeff();
}

DoobChain doob_continuous(const ContinuousChain& chain, const PerronData& p,
                          const SolverOptions& opts) {
  require(!p.discrete && p.phi.size() == static_cast<Eigen::Index>(chain.size()),
          ErrorKind::PerronMismatch, "Perron data does not belong to this chain");
  const Matrix& l = chain.rates();
  const Vector& phi = p.phi;
  const Eigen::Index n = l.rows();

  Matrix lt = phi.cwiseInverse().asDiagonal() * l * phi.asDiagonal();
  for (Eigen::Index x = 0; x < n; ++x) {
    lt(x, x) = 0.0;
    lt(x, x) = -lt.row(x).sum();
  }

  // Conjugation identity: the diagonal of Phi^{-1}(L - V + lambda1)Phi must
  // match the recomputed one. The defect at x is the eigen-residual at x over
  // phi(x), so compare after rescaling by phi(x)/max phi.
  const double scale = std::max(1.0, chain.subgenerator().cwiseAbs().maxCoeff());
  const double tol = std::max(opts.eigen_tol, 1e-10) * scale;
  for (Eigen::Index x = 0; x < n; ++x) {
    const double conj = l(x, x) - chain.killing()(x) + p.lambda1;
    const double defect = std::abs(conj - lt(x, x)) * phi(x) / p.phi_max();
    if (!(defect <= tol)) {
      throw Error(ErrorKind::PerronMismatch,
                  "conjugation identity fails at state " + chain.states().label(static_cast<std::size_t>(x)));
    }
  }

  DoobChain d;
  d.discrete = false;
  d.generator = std::move(lt);
  d.invariant = doob_invariant(p);
  d.symmetrized = symmetrize(d.generator, d.invariant);
  return d;
}

DoobChain doob_discrete(const DiscreteChain& chain, double beta, const Vector& phi,
                        const Vector& psi) {
  const Matrix& q = chain.sub();
  const Eigen::Index n = q.rows();
  require(phi.size() == n && psi.size() == n, ErrorKind::DimensionMismatch,
          "phi/psi length does not match the chain");
  require(beta > 0.0, ErrorKind::NonStochastic, "beta must be positive");
  for (Eigen::Index i = 0; i < n; ++i) {
    require(phi(i) > 0.0, ErrorKind::PerronFailure, "phi must be strictly positive");
  }
  Matrix k(n, n);
  for (Eigen::Index x = 0; x < n; ++x) {
    for (Eigen::Index y = 0; y < n; ++y) k(x, y) = q(x, y) * phi(y) / (beta * phi(x));
  }
  for (Eigen::Index x = 0; x < n; ++x) {
    const double row = k.row(x).sum();
    if (!(std::abs(row - 1.0) <= 1e-9)) {
      throw Error(ErrorKind::NonStochastic,
                  "row " + chain.states().label(static_cast<std::size_t>(x)) + " of K sums to " +
                      std::to_string(row));
    }
  }
  DoobChain d;
  d.discrete = true;
  d.generator = std::move(k);
  d.invariant = ProbDist::normalized(phi.cwiseProduct(psi));
  return d;
}

DoobChain doob_transform(const AbsorbingChain& chain, const PerronData& p,
                         const SolverOptions& opts) {
  if (const auto* c = std::get_if<ContinuousChain>(&chain)) return doob_continuous(*c, p, opts);
  const auto& dc = std::get<DiscreteChain>(chain);
  require(p.discrete && p.beta.has_value(), ErrorKind::PerronMismatch,
          "Perron data does not belong to this chain");
  return doob_discrete(dc, *p.beta, p.phi, p.psi);
}

}  // namespace qsd
