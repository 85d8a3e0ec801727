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

// One-call summary of a chain: Perron data, Dirichlet spectrum, Doob
// transform, functional constants and every applicable bound curve.

#ifndef QSD_ANALYSIS_HPP_
#define QSD_ANALYSIS_HPP_

#include <optional>
#include <vector>

#include <json.hpp>

#include "qsd/bounds.hpp"
#include "qsd/chain.hpp"
#include "qsd/doob.hpp"
#include "qsd/funineq.hpp"
#include "qsd/spectral.hpp"

namespace qsd {

struct AnalysisOptions {
  SolverOptions solver;
  LsiOptions lsi;
};

struct FunctionalConstants {
  double gap_tilde = 0.0;  // gap of the symmetrized Doob generator in L^2(eta~)
  double gap_base = 0.0;   // gap of the symmetrized L in L^2(eta)
  double eq7_bound = 0.0;  // comparison lower bound on gap_tilde
  LsiBracket lsi;
};

struct Analysis {
  std::vector<std::string> states;
  PerronData perron;
  DirichletSpectrum spectrum;
  DoobChain doob;
  // Continuous chains only.
  std::optional<FunctionalConstants> constants;
  // The lsi curves use the certified lower bound on alpha.
  std::vector<BoundCurve> curves;
  // Discrete chains with a detailed-balance measure on S.
  std::optional<PathBound> path;

  const BoundCurve* curve(CurveKind kind) const;
  nlohmann::json to_json() const;
};

Analysis analyze(const AbsorbingChain& chain, const AnalysisOptions& opts = {});

nlohmann::json to_json(const Vector& v);
nlohmann::json to_json(const BoundCurve& c);

}  // namespace qsd

#endif  // QSD_ANALYSIS_HPP_
