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

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "qsd/bounds.hpp"
#include "qsd/doob.hpp"
#include "qsd/error.hpp"
#include "qsd/evolution.hpp"
#include "qsd/funineq.hpp"
#include "qsd/models.hpp"
#include "test_util.hpp"

using namespace qsd;
using std::numbers::pi;

TEST_SUITE("bounds") {
  TEST_CASE("curve evaluation") {
    BoundCurve c{3.0, 0.5, CurveKind::Thm2};
    CHECK(c.eval(0.0) == 3.0);
    CHECK(c.eval(2.0) == doctest::Approx(3.0 * std::exp(-1.0)));
    CHECK(c.eval(1.0) > c.eval(1.5));
  }

  TEST_CASE("two-point curves") {
    const PerronData p = perron(two_point());
    const BoundCurve t2 = thm2_curve(p, 2.0);
    CHECK(t2.prefactor == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK(t2.rate == 2.0);
    const BoundCurve l = lsi_curve(p, 1.0, false);
    CHECK(l.prefactor == doctest::Approx(std::sqrt(2.0 * std::log(2.0))).epsilon(1e-12));
    CHECK(l.rate == doctest::Approx(0.5));
    CHECK(lsi_curve(p, 1.0, true).prefactor == doctest::Approx(std::sqrt(2.0 * std::log(2.0))).epsilon(1e-12));
  }

  TEST_CASE("non-absorbing uniform chain: prefactor sqrt(n)") {
    Matrix l = Matrix::Ones(4, 4);
    const ContinuousChain c = build_continuous(StateSpace::numbered(4), l, Vector::Zero(4));
    const PerronData p = perron(c);
    CHECK(thm2_curve(p, 1.0).prefactor == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(lsi_curve(p, 1.0, false).prefactor == doctest::Approx(std::sqrt(2.0 * std::log(4.0))).epsilon(1e-10));
  }

  TEST_CASE("thm3 variants") {
    const ContinuousChain c = bd_uniform(6);
    const PerronData p = perron(c);
    const DirichletSpectrum s = dirichlet_spectrum(c);
    const BoundCurve a = thm3_curve(p, s.lambda2, Thm3Variant::A);
    const BoundCurve b = thm3_curve(p, s.lambda2, Thm3Variant::B);
    const Vector& eta = p.eta->weights();
    const double phi2eta_min = p.phi.cwiseProduct(p.phi).cwiseProduct(eta).minCoeff();
    CHECK(a.prefactor == doctest::Approx(std::sqrt(1.0 / phi2eta_min) * p.ratio()).epsilon(1e-12));
    CHECK(b.prefactor == doctest::Approx(std::sqrt(1.0 / eta.minCoeff()) * p.ratio() * p.ratio()).epsilon(1e-12));
    CHECK(a.prefactor <= b.prefactor * (1 + 1e-12));
    CHECK(a.rate == doctest::Approx(*s.lambda2 - s.lambda1()));
    CHECK_THROWS_AS(thm3_curve(p, std::nullopt, Thm3Variant::A), Error);
  }

  TEST_CASE("thm3 variant a never exceeds variant b") {
    for (const ContinuousChain& c : {bd_uniform(3), bd_uniform(11), bd_biased(7, 2.0), bd_biased(7, 0.5), two_point()}) {
      const PerronData p = perron(c);
      const auto l2 = dirichlet_spectrum(c).lambda2;
      CHECK(thm3_curve(p, l2, Thm3Variant::A).prefactor <= thm3_curve(p, l2, Thm3Variant::B).prefactor * (1 + 1e-12));
    }
  }

  TEST_CASE("product curves on the two-point chain") {
    const PerronData p = perron(two_point());
    for (int d : {1, 2, 3, 5}) {
      const ProductCurves pc = product_curves(p, 3.0, 1.0, d);
      for (double t : {0.0, 0.3, 2.0}) {
        CHECK(pc.tv.eval(t) == doctest::Approx(std::pow(2.0, d / 2.0) * std::exp(-2.0 * t)).epsilon(1e-12));
        CHECK(pc.lsi.eval(t) == doctest::Approx(std::sqrt(2.0 * d * std::log(2.0)) * std::exp(-t / 2)).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("d=1 product tv curve is thm3 variant b") {
    const ContinuousChain c = bd_uniform(5);
    const PerronData p = perron(c);
    const auto l2 = dirichlet_spectrum(c).lambda2;
    const ProductCurves pc = product_curves(p, l2, 0.1, 1);
    const BoundCurve b = thm3_curve(p, l2, Thm3Variant::B);
    CHECK(pc.tv.prefactor == doctest::Approx(b.prefactor));
    CHECK(pc.tv.rate == doctest::Approx(b.rate));
  }

  TEST_CASE("product mixing times: linear versus logarithmic") {
    const PerronData p = perron(two_point());
    std::vector<double> tv, ls;
    for (int d = 1; d <= 8; ++d) {
      const ProductCurves pc = product_curves(p, 3.0, 1.0, d);
      tv.push_back(mixing_time(pc.tv, 0.5));
      ls.push_back(mixing_time(pc.lsi, 0.5));
    }
    // Constant increments for the tv curve, shrinking ones for the lsi curve.
    for (std::size_t i = 1; i + 1 < tv.size(); ++i) {
      CHECK(tv[i + 1] - tv[i] == doctest::Approx(tv[i] - tv[i - 1]).epsilon(1e-12));
      CHECK(ls[i + 1] - ls[i] < ls[i] - ls[i - 1]);
    }
  }

  TEST_CASE("mixing time") {
    CHECK(mixing_time(BoundCurve{1.0, 3.0, CurveKind::Thm2}, 1.0) == 0.0);
    CHECK(mixing_time(BoundCurve{0.5, 3.0, CurveKind::Thm2}, 1.0) == 0.0);
    const BoundCurve l = lsi_curve(perron(two_point()), 1.0, false);
    CHECK(mixing_time(l, 0.5) == doctest::Approx(2.0 * (std::log(std::sqrt(2.0 * std::log(2.0))) + std::log(2.0))));
    const BoundCurve c{5.0, 0.2, CurveKind::Thm2};
    CHECK(c.eval(mixing_time(c, 0.01)) == doctest::Approx(0.01));
  }

  TEST_CASE("thm1 envelope on a non-absorbing chain") {
    Matrix l(3, 3);
    l << 0, 1, 2, 1, 0, 1, 0.5, 2, 0;
    const ContinuousChain c = build_continuous(StateSpace::numbered(3), l, Vector::Zero(3));
    const PerronData p = perron(c);
    const DoobChain d = doob_continuous(c, p);
    const Evolver ev(c, p);
    const Envelope e = thm1_envelope(ev, p, d, ProbDist::dirac(3, 0), 0.4);
    CHECK(e.lower == doctest::Approx(0.5 * e.actual));
    CHECK(e.upper == doctest::Approx(2.0 * e.actual));
  }

  TEST_CASE("thm1 envelope from nu") {
    const ContinuousChain c = cycle_chain(5);
    const PerronData p = perron(c);
    const DoobChain d = doob_continuous(c, p);
    const Evolver ev(c, p);
    for (double t : {0.0, 1.0, 5.0}) {
      const Envelope e = thm1_envelope(ev, p, d, p.nu, t);
      CHECK(e.actual < 1e-9);
      CHECK(e.lower <= e.actual + 1e-9);
    }
  }

  TEST_CASE("thm1 envelope, N=5 from the top state, against a Taylor oracle") {
    const ContinuousChain c = bd_uniform(5);
    const PerronData p = perron(c);
    const DoobChain d = doob_continuous(c, p);
    const Evolver ev(c, p);
    for (double t : {0.5, 2.0, 8.0}) {
      const Envelope e = thm1_envelope(ev, p, d, ProbDist::dirac(5, 4), t);
      CHECK(e.lower <= e.actual);
      CHECK(e.actual <= e.upper);
      const Vector row = test::taylor_expm(c.subgenerator(), t).row(4).transpose();
      const Vector mu = row / row.sum();
      CHECK(e.actual == doctest::Approx((mu - p.nu.weights()).cwiseAbs().sum()).epsilon(1e-9));
      Vector m0 = Vector::Zero(5);
      m0(4) = 1.0;
      const Vector wt = test::taylor_expm(d.generator, t).row(4).transpose();
      const double tilde = (wt - d.invariant.weights()).cwiseAbs().sum();
      CHECK(e.upper == doctest::Approx(2 * p.ratio() * tilde).epsilon(1e-9));
    }
  }

  TEST_CASE("median envelope") {
    const ProbDist u = ProbDist::uniform(4);
    const MedianEnvelope same = median_envelope(u, u);
    CHECK(same.median_integral == doctest::Approx(0.0));
    CHECK(same.tv == doctest::Approx(0.0));
    for (std::size_t n : {3u, 5u}) {
      const MedianEnvelope e = median_envelope(ProbDist::dirac(n, 0), ProbDist::uniform(n));
      CHECK(e.median == 0.0);
      CHECK(e.median_integral == doctest::Approx(1.0));
      CHECK(e.tv == doctest::Approx(2.0 * (1.0 - 1.0 / n)));
    }
  }

  TEST_CASE("median and reweighting envelopes on random pairs") {
    std::mt19937_64 rng(23);
    for (int i = 0; i < 1000; ++i) {
      const std::size_t n = 2 + static_cast<std::size_t>(i % 7);
      const ProbDist mu(test::random_weights(rng, n));
      const ProbDist nu(test::random_weights(rng, n));
      const MedianEnvelope m = median_envelope(mu, nu);
      CHECK(m.median_integral <= m.tv + 1e-12);
      CHECK(m.tv <= m.twice_median_integral + 1e-12);
      const Vector psi = test::random_weights(rng, n) * 10.0;
      const Envelope r = reweight_envelope(mu, nu, psi);
      CHECK(r.lower <= r.actual + 1e-12);
      CHECK(r.actual <= r.upper + 1e-12);
    }
  }

  TEST_CASE("curve names") {
    CHECK(to_string(CurveKind::Thm2) == "thm2");
    CHECK(to_string(CurveKind::Thm3A) == "thm3_a");
    CHECK(to_string(CurveKind::LsiReversible) == "lsi_reversible");
  }

  TEST_CASE("curves dominate the worst case at t = 0 and along a grid") {
    const ContinuousChain c = bd_uniform(4);
    const PerronData p = perron(c);
    const DoobChain d = doob_continuous(c, p);
    const double gap = spectral_gap(d.symmetrized, d.invariant);
    const LsiBracket lb = lsi_constant(d.symmetrized, d.invariant, {LsiMode::Bracket});
    const Evolver ev(c, p);
    const auto l2 = dirichlet_spectrum(c).lambda2;
    const std::vector<BoundCurve> curves = {thm2_curve(p, gap), thm3_curve(p, l2, Thm3Variant::A),
                                            thm3_curve(p, l2, Thm3Variant::B), lsi_curve(p, lb.lower, true)};
    for (double t : time_grid(0.01, 40.0, 40, true)) {
      const double w = worst_case_tv(ev, p.nu, t).tv;
      for (const auto& cv : curves) CHECK(w <= cv.eval(t) + 1e-9);
    }
    const double w0 = worst_case_tv(ev, p.nu, 0.0).tv;
    for (const auto& cv : curves) CHECK(w0 <= cv.prefactor);
  }
}
