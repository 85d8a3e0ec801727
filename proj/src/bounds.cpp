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

#include "qsd/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qsd/error.hpp"

namespace qsd {
namespace {

void require_continuous(const PerronData& p) {
  require(!p.discrete && p.eta.has_value(), ErrorKind::InvalidArgument,
          "bound curves are defined for continuous-time chains");
}

double phi2_eta_min(const PerronData& p) {
  return p.phi.cwiseProduct(p.phi).cwiseProduct(p.eta->weights()).minCoeff();
}

}  // namespace

std::string to_string(CurveKind kind) {
  switch (kind) {
    case CurveKind::Thm2: return "thm2";
    case CurveKind::Thm3A: return "thm3_a";
    case CurveKind::Thm3B: return "thm3_b";
    case CurveKind::Lsi: return "lsi";
    case CurveKind::LsiReversible: return "lsi_reversible";
    case CurveKind::ProductTv: return "product_tv";
    case CurveKind::ProductLsi: return "product_lsi";
  }
  return "unknown";
}

double BoundCurve::eval(double t) const { return prefactor * std::exp(-rate * t); }

BoundCurve thm2_curve(const PerronData& p, double gap_tilde) {
  require_continuous(p);
  const double eta_tilde_min = doob_invariant(p).min();
  return {std::sqrt(1.0 / eta_tilde_min) * p.ratio(), gap_tilde, CurveKind::Thm2};
}

BoundCurve thm3_curve(const PerronData& p, std::optional<double> lambda2, Thm3Variant variant) {
  require_continuous(p);
  require(lambda2.has_value(), ErrorKind::NotReversible, "reversible curves need a reversible chain");
  const double rate = *lambda2 - p.lambda1;
  if (variant == Thm3Variant::A) {
    return {std::sqrt(1.0 / phi2_eta_min(p)) * p.ratio(), rate, CurveKind::Thm3A};
  }
  return {std::sqrt(1.0 / p.eta->min()) * p.ratio() * p.ratio(), rate, CurveKind::Thm3B};
}

BoundCurve lsi_curve(const PerronData& p, double alpha, bool reversible) {
  require_continuous(p);
  require(alpha > 0.0, ErrorKind::InvalidArgument, "log-Sobolev constant must be positive");
  if (reversible) {
    return {std::sqrt(2.0 * std::log(1.0 / phi2_eta_min(p))) * p.ratio(), 0.5 * alpha, CurveKind::LsiReversible};
  }
  const double eta_tilde_min = doob_invariant(p).min();
  return {std::sqrt(2.0 * p.ratio() * std::log(1.0 / eta_tilde_min)), 0.5 * alpha, CurveKind::Lsi};
}

ProductCurves product_curves(const PerronData& p, std::optional<double> lambda2, double alpha, int d) {
  require_continuous(p);
  require(d >= 1, ErrorKind::InvalidArgument, "product dimension must be >= 1");
  require(lambda2.has_value(), ErrorKind::NotReversible, "product curves need a reversible factor");
  require(alpha > 0.0, ErrorKind::InvalidArgument, "log-Sobolev constant must be positive");
  const double r = p.ratio();
  const double eta_min = p.eta->min();
  const double dd = static_cast<double>(d);
  ProductCurves out;
  out.tv = {std::pow(std::sqrt(1.0 / eta_min) * r * r, dd), *lambda2 - p.lambda1, CurveKind::ProductTv};
  out.lsi = {std::sqrt(2.0 * dd * std::log(r / eta_min) * std::pow(r, dd)), 0.5 * alpha, CurveKind::ProductLsi};
  return out;
}

double mixing_time(const BoundCurve& curve, double eps) {
  require(eps > 0.0, ErrorKind::InvalidArgument, "mixing level must be positive");
  if (eps >= curve.prefactor) return 0.0;
  return (std::log(curve.prefactor) - std::log(eps)) / curve.rate;
}

Envelope thm1_envelope(const Evolver& ev, const PerronData& p, const DoobChain& d, const ProbDist& mu0,
                       double t) {
  const ConditionedLaw c = ev.conditioned(mu0, t);
  const ProbDist mt = doob_law(d, doob_initial(p, mu0), t);
  const double doob_tv = tv_distance(mt, d.invariant);
  const double r = p.ratio();
  return {doob_tv / (2.0 * r), tv_distance(c.law, p.nu), 2.0 * r * doob_tv};
}

MedianEnvelope median_envelope(const ProbDist& mu, const ProbDist& nu) {
  require(mu.size() == nu.size(), ErrorKind::DimensionMismatch, "laws have different lengths");
  const std::size_t n = nu.size();
  std::vector<double> f(n);
  for (std::size_t x = 0; x < n; ++x) {
    require(nu[x] > 0.0, ErrorKind::ReferenceZero, "reference law vanishes at a state");
    f[x] = mu[x] / nu[x];
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return f[a] < f[b]; });
  // Lower median: the smallest value v with nu(f <= v) >= 1/2.
  double cum = 0.0;
  double m = f[order.back()];
  for (std::size_t i = 0; i < n; ++i) {
    cum += nu[order[i]];
    const bool tie_next = i + 1 < n && f[order[i + 1]] == f[order[i]];
    if (!tie_next && cum >= 0.5 - 1e-15) {
      m = f[order[i]];
      break;
    }
  }
  MedianEnvelope out;
  out.median = m;
  for (std::size_t x = 0; x < n; ++x) out.median_integral += std::abs(f[x] - m) * nu[x];
  out.tv = tv_distance(mu, nu);
  out.twice_median_integral = 2.0 * out.median_integral;
  return out;
}

Envelope reweight_envelope(const ProbDist& mu, const ProbDist& nu, const Vector& psi) {
  require(psi.size() == static_cast<Eigen::Index>(mu.size()), ErrorKind::DimensionMismatch,
          "weight has the wrong length");
  require(psi.minCoeff() > 0.0, ErrorKind::InvalidArgument, "weight must be positive");
  const ProbDist mt = ProbDist::normalized(psi.cwiseProduct(mu.weights()));
  const ProbDist nt = ProbDist::normalized(psi.cwiseProduct(nu.weights()));
  const double tilde = tv_distance(mt, nt);
  const double k = psi.maxCoeff() / psi.minCoeff();
  return {tilde / (2.0 * k), tv_distance(mu, nu), 2.0 * k * tilde};
}

}  // namespace qsd
