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

// Doob h-transform of an absorbing chain by its Perron eigenfunction.
//
// Continuous time: L~(x,y) = L(x,y) phi(y)/phi(x) off the diagonal, which is
// the conjugation L~ = Phi^{-1}(L - V + lambda1 I)Phi. Its invariant law is
// eta~ proportional to phi phi_star eta.
//
// Discrete time: K(x,y) = Q(x,y) phi(y) / (beta phi(x)), stationary law pi
// proportional to phi psi. The printed formula in some references has the
// ratio phi(x)/phi(y); that orientation is not stochastic.

#ifndef QSD_DOOB_HPP_
#define QSD_DOOB_HPP_

#include "qsd/chain.hpp"
#include "qsd/spectral.hpp"

namespace qsd {

struct DoobChain {
  bool discrete = false;
  // Rate matrix L~ (continuous) or stochastic matrix K (discrete).
  Matrix generator;
  // eta~ (continuous) or pi (discrete).
  ProbDist invariant;
  // Additive symmetrization of L~ in L^2(eta~); empty for discrete chains.
  Matrix symmetrized;
};

DoobChain doob_continuous(const ContinuousChain& chain, const PerronData& p,
                          const SolverOptions& opts = {});

// eta~ (continuous) or pi (discrete).
ProbDist doob_invariant(const PerronData& p);

// Adjoint of a generator or kernel in L^2(m): D_m^{-1} G^T D_m.
Matrix adjoint(const Matrix& generator, const ProbDist& m);

// (G + G*)/2 with the adjoint taken in L^2(m).
Matrix symmetrize(const Matrix& generator, const ProbDist& m);

DoobChain doob_discrete(const DiscreteChain& chain, double beta, const Vector& phi,
                        const Vector& psi);

DoobChain doob_transform(const AbsorbingChain& chain, const PerronData& p,
                         const SolverOptions& opts = {});

// max_x |(m G)(x)|, the stationarity defect of m for a generator (pass K - I
// for kernels).
double stationarity_defect(const Matrix& generator, const ProbDist& m);

}  // namespace qsd

#endif  // QSD_DOOB_HPP_
