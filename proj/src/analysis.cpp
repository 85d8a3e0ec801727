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

#include "qsd/analysis.hpp"

#include "qsd/error.hpp"

namespace qsd {

using json = nlohmann::json;

json to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json to_json(const BoundCurve& c) {
  return {{"kind", to_string(c.kind)}, {"prefactor", c.prefactor}, {"rate", c.rate},
          {"mixing_time_1", mixing_time(c, 1.0)}, {"mixing_time_half", mixing_time(c, 0.5)}};
}

const BoundCurve* Analysis::curve(CurveKind kind) const {
  for (const auto& c : curves) {
    if (c.kind == kind) return &c;
  }
  return nullptr;
}

json Analysis::to_json() const {
  json doc;
  doc["kind"] = perron.discrete ? "discrete" : "continuous";
  doc["states"] = states;
  doc["lambda1"] = perron.lambda1;
  if (perron.beta) doc["beta"] = *perron.beta;
  doc["reversible"] = spectrum.reversible;
  if (spectrum.lambda2) doc["lambda2"] = *spectrum.lambda2;
  json spec = json::array();
  for (const auto& z : spectrum.eigenvalues) spec.push_back({z.real(), z.imag()});
  doc["dirichlet_spectrum"] = spec;
  doc["phi"] = qsd::to_json(perron.phi);
  doc["phi_ratio"] = perron.ratio();
  if (perron.discrete) {
    doc["psi"] = qsd::to_json(perron.psi);
  } else {
    doc["phi_star"] = qsd::to_json(perron.phi_star);
    doc["eta"] = qsd::to_json(perron.eta->weights());
  }
  doc["nu"] = qsd::to_json(perron.nu.weights());
  doc[perron.discrete ? "pi" : "eta_tilde"] = qsd::to_json(doob.invariant.weights());
  if (constants) {
    doc["gap_tilde"] = constants->gap_tilde;
    doc["gap_base"] = constants->gap_base;
    doc["eq7_bound"] = constants->eq7_bound;
    json lsi = {{"lower", constants->lsi.lower}, {"upper", constants->lsi.upper}, {"stalled", constants->lsi.stalled}};
    lsi["estimate"] = constants->lsi.estimate ? json(*constants->lsi.estimate) : json(nullptr);
    doc["lsi"] = lsi;
  }
  json cs = json::object();
  for (const auto& c : curves) cs[to_string(c.kind)] = qsd::to_json(c);
  doc["curves"] = cs;
  if (path) {
    doc["path_bound"] = {{"A", path->A}, {"beta1_upper", path->beta1_upper},
                         {"edge", {path->edge_from, path->edge_to}}};
  }
  return doc;
}

Analysis analyze(const AbsorbingChain& chain, const AnalysisOptions& opts) {
  Analysis a;
  a.states = states_of(chain).labels();
  a.perron = perron(chain, opts.solver);
  a.spectrum = dirichlet_spectrum(chain);
  a.doob = doob_transform(chain, a.perron, opts.solver);

  if (const auto* c = std::get_if<ContinuousChain>(&chain)) {
    FunctionalConstants k;
    k.gap_tilde = spectral_gap(a.doob.symmetrized, a.doob.invariant);
    k.gap_base = base_gap(*c, a.perron);
    k.eq7_bound = compare_gap(a.perron, k.gap_base);
    k.lsi = lsi_constant(a.doob.symmetrized, a.doob.invariant, opts.lsi);
    a.curves.push_back(thm2_curve(a.perron, k.gap_tilde));
    if (a.spectrum.reversible) {
      a.curves.push_back(thm3_curve(a.perron, a.spectrum.lambda2, Thm3Variant::A));
      a.curves.push_back(thm3_curve(a.perron, a.spectrum.lambda2, Thm3Variant::B));
    }
    if (k.lsi.lower > 0.0) a.curves.push_back(lsi_curve(a.perron, k.lsi.lower, a.spectrum.reversible));
    a.constants = k;
  } else {
    const auto& d = std::get<DiscreteChain>(chain);
    if (const auto q = reversing_measure(d.sub())) {
      try {
        a.path = path_bound(d, *q);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::NoPathToAbsorption && e.kind() != ErrorKind::NotReversible) throw;
      }
    }
  }
  return a;
}

}  // namespace qsd
