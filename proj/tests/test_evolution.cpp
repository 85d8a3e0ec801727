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
#include "qsd/models.hpp"
#include "test_util.hpp"

using namespace qsd;
using std::numbers::pi;

namespace {

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_SUITE("evolution") {
  TEST_CASE("t = 0 returns the initial law") {
    const ContinuousChain c = bd_uniform(4);
    Vector w(4);
    w << 0.1, 0.2, 0.3, 0.4;
    const ConditionedLaw r = conditioned_law(c, ProbDist(w), 0.0);
    CHECK(r.survival == 1.0);
    CHECK((r.law.weights() - w).cwiseAbs().maxCoeff() < 1e-15);
  }

  TEST_CASE("quasi-stationary fixed point and exponential survival") {
    for (const ContinuousChain& c : {bd_uniform(5), cycle_chain(5), bd_biased(6, 2.0)}) {
      const PerronData p = perron(c);
      for (double t : {0.1, 1.0, 10.0}) {
        const ConditionedLaw r = conditioned_law(c, p.nu, t);
        CHECK(tv_distance(r.law, p.nu) <= 1e-10);
        CHECK(std::abs(r.survival - std::exp(-p.lambda1 * t)) <= 1e-10);
      }
    }
  }

  TEST_CASE("N=2 from the top state against the spectral expansion") {
    // Eigenpairs of L - V: -(2 -+ sqrt 2) with vectors sin(pi x (2k+1)/4).
    const double t = 1.0;
    Matrix u(2, 2);
    Vector lam(2);
    for (int k = 0; k < 2; ++k) {
      lam(k) = 2.0 - (k == 0 ? 1 : -1) * std::sqrt(2.0);
      for (int x = 1; x <= 2; ++x) u(x - 1, k) = std::sin(pi * x * (2 * k + 1) / 4.0);
    }
    // Symmetric in L2(eta) with eta = (2, 1)/3; normalize columns there.
    Vector eta(2);
    eta << 2.0 / 3, 1.0 / 3;
    for (int k = 0; k < 2; ++k) u.col(k) /= std::sqrt(u.col(k).cwiseAbs2().dot(eta));
    Matrix pt = Matrix::Zero(2, 2);
    for (int k = 0; k < 2; ++k) pt += std::exp(-lam(k) * t) * u.col(k) * (u.col(k).cwiseProduct(eta)).transpose();
    const Vector row = pt.row(1).transpose();
    const ConditionedLaw r = conditioned_law(bd_uniform(2), ProbDist::dirac(2, 1), t);
    CHECK(r.survival == doctest::Approx(row.sum()).epsilon(1e-10));
    CHECK((r.law.weights() - row / row.sum()).cwiseAbs().maxCoeff() < 1e-10);
  }

  TEST_CASE("symmetric and Pade exponentials agree on reversible builtins") {
    for (const ContinuousChain& c : {bd_uniform(8), bd_biased(6, 2.0), bd_biased(6, 0.5), two_point()}) {
      const Vector eta = invariant_measure(c).weights();
      const Matrix g = c.subgenerator();
      for (double t : {0.3, 3.0}) {
        const Matrix a = expm(g, t, eta);
        const Matrix b = expm(g, t);
        CHECK(test::max_abs(a - b) <= 1e-10 * test::max_abs(b));
        CHECK(test::max_abs(b - test::taylor_expm(g, t)) <= 1e-10 * test::max_abs(b));
      }
    }
  }

  TEST_CASE("negative and fractional times") {
    const ContinuousChain c = bd_uniform(3);
    CHECK(kind_of([&] { conditioned_law(c, ProbDist::uniform(3), -1.0); }) == ErrorKind::NegativeTime);
    const DiscreteChain d = intro_walk(3);
    CHECK(kind_of([&] { conditioned_law(d, ProbDist::uniform(3), 1.5); }) == ErrorKind::FractionalTime);
  }

  TEST_CASE("long horizons keep relative accuracy") {
    const ContinuousChain c = bd_uniform(5);
    const PerronData p = perron(c);
    const ConditionedLaw r = conditioned_law(c, ProbDist::dirac(5, 4), 300.0);
    const ConditionedLaw s = conditioned_law(c, ProbDist::dirac(5, 4), 400.0);
    CHECK(std::exp(r.log_survival) == doctest::Approx(r.survival).epsilon(1e-12));
    // Deep in the tail the log-survival decreases at exactly lambda1.
    CHECK(s.log_survival - r.log_survival == doctest::Approx(-100.0 * p.lambda1).epsilon(1e-9));
    CHECK(tv_distance(r.law, p.nu) < 1e-10);
  }

  TEST_CASE("discrete powers") {
    const DiscreteChain d = intro_walk(3);
    const ProbDist m0 = ProbDist::dirac(3, 2);
    Vector v = m0.weights();
    for (int l = 0; l < 7; ++l) v = d.sub().transpose() * v;
    const ConditionedLaw r = conditioned_law(d, m0, 7.0);
    CHECK(r.survival == doctest::Approx(v.sum()).epsilon(1e-12));
    CHECK((r.law.weights() - v / v.sum()).cwiseAbs().maxCoeff() < 1e-12);
  }

  TEST_CASE("Doob law") {
    const ContinuousChain c = bd_uniform(4);
    const PerronData p = perron(c);
    const DoobChain d = doob_continuous(c, p);
    const ProbDist m = ProbDist::dirac(4, 3);
    CHECK(tv_distance(doob_law(d, m, 0.0), m) < 1e-15);
    CHECK(tv_distance(doob_law(d, m, 50.0 * 16), d.invariant) < 1e-8);
  }

  TEST_CASE("conditioned law recovered from the Doob chain") {
    const ContinuousChain c = cycle_chain(5);
    const PerronData p = perron(c);
    const DoobChain d = doob_continuous(c, p);
    const ProbDist m0 = ProbDist::dirac(5, 2);
    for (double t : {0.5, 2.0}) {
      const ProbDist mt = doob_law(d, doob_initial(p, m0), t);
      // mu_t[f] = mu~_t[f/phi] / mu~_t[1/phi].
      const Vector w = mt.weights().cwiseQuotient(p.phi);
      const Vector want = w / w.sum();
      CHECK((conditioned_law(c, m0, t).law.weights() - want).cwiseAbs().maxCoeff() < 1e-9);
    }
  }

  TEST_CASE("distances") {
    const ProbDist u = ProbDist::uniform(2);
    const Distances z = distances(u, u);
    CHECK(z.tv == 0.0);
    CHECK(z.chi2 == 0.0);
    CHECK(z.kl == 0.0);
    const Distances e = distances(ProbDist::dirac(2, 0), u);
    CHECK(e.tv == doctest::Approx(1.0));
    CHECK(e.chi2 == doctest::Approx(1.0));
    CHECK(e.kl == doctest::Approx(std::log(2.0)));
    CHECK(kind_of([&] { distances(u, ProbDist::dirac(2, 0)); }) == ErrorKind::ReferenceZero);
  }

  TEST_CASE("Cauchy-Schwarz and Pinsker on random pairs") {
    std::mt19937_64 rng(31);
    for (int i = 0; i < 1000; ++i) {
      const std::size_t n = 2 + static_cast<std::size_t>(i % 9);
      const Distances d = distances(ProbDist(test::random_weights(rng, n)), ProbDist(test::random_weights(rng, n)));
      CHECK(d.tv >= 0.0);
      CHECK(d.tv <= std::sqrt(d.chi2) + 1e-12);
      CHECK(d.tv <= std::sqrt(2.0 * d.kl) + 1e-12);
    }
  }

  TEST_CASE("worst case at t = 0 sits at the nu-minimal state") {
    const ContinuousChain c = bd_biased(5, 2.0);
    const PerronData p = perron(c);
    const Evolver ev(c, p);
    const WorstCase w = worst_case_tv(ev, p.nu, 0.0);
    Eigen::Index at = 0;
    const double m = p.nu.weights().minCoeff(&at);
    CHECK(w.tv == doctest::Approx(2.0 - 2.0 * m));
    CHECK(w.argmax == static_cast<std::size_t>(at));
  }

  TEST_CASE("worst case below 1 at the thm3 mixing time") {
    const ContinuousChain c = bd_uniform(10);
    const PerronData p = perron(c);
    const Evolver ev(c, p);
    const BoundCurve b = thm3_curve(p, dirichlet_spectrum(c).lambda2, Thm3Variant::A);
    CHECK(worst_case_tv(ev, p.nu, mixing_time(b, 1.0)).tv <= 1.0);
  }

  TEST_CASE("random initial laws never beat the Dirac sweep") {
    const ContinuousChain c = cycle_chain(5);
    const PerronData p = perron(c);
    const Evolver ev(c, p);
    const double w = worst_case_tv(ev, p.nu, 1.0).tv;
    std::mt19937_64 rng(37);
    for (int i = 0; i < 200; ++i) {
      const ProbDist m0(test::random_weights(rng, 5));
      CHECK(tv_distance(ev.conditioned(m0, 1.0).law, p.nu) <= w + 1e-12);
    }
  }

  TEST_CASE("survival curve") {
    const ContinuousChain c = bd_uniform(5);
    const PerronData p = perron(c);
    const Evolver ev(c, p);
    const auto s = survival_curve(ev, p.nu, {0.0, 1.0, 5.0, 20.0});
    CHECK(s[0] == 1.0);
    for (std::size_t i = 1; i < s.size(); ++i) CHECK(std::abs(s[i] - std::exp(-p.lambda1 * std::vector{0.0, 1.0, 5.0, 20.0}[i])) <= 1e-10);
    // Tail log-slope from the top state, least squares on exact values.
    std::vector<double> ts;
    for (int i = 0; i <= 20; ++i) ts.push_back(100.0 + 10.0 * i);
    const auto tail = survival_curve(ev, ProbDist::dirac(5, 4), ts);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
      const double y = std::log(tail[i]);
      sx += ts[i];
      sy += y;
      sxx += ts[i] * ts[i];
      sxy += ts[i] * y;
    }
    const double k = static_cast<double>(ts.size());
    const double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
    CHECK(std::abs(slope + p.lambda1) < 1e-4);
  }

  TEST_CASE("I and J sandwiches, monotone Doob distances on reversible chains") {
    for (const ContinuousChain& c : {bd_uniform(6), bd_biased(6, 2.0), bd_biased(5, 0.5), two_point()}) {
      const PerronData p = perron(c);
      const DoobChain d = doob_continuous(c, p);
      const Evolver ev(c, p);
      const double r = p.ratio();
      const auto times = time_grid(0.0, 30.0, 60, false);
      for (std::size_t x = 0; x < c.size(); ++x) {
        const EvolutionReport rep = evolve(ev, p, d, ProbDist::dirac(c.size(), x), times);
        double prev_i = 1e300, prev_j = 1e300;
        for (const auto& row : rep.rows) {
          REQUIRE(row.i_t.has_value());
          CHECK(*row.i_t <= r * r * *row.i_tilde * (1 + 1e-9) + 1e-14);
          CHECK(*row.i_tilde <= r * r * *row.i_t * (1 + 1e-9) + 1e-14);
          CHECK(*row.j_t <= r * *row.j_tilde * (1 + 1e-9) + 1e-14);
          CHECK(*row.j_tilde <= r * *row.j_t * (1 + 1e-9) + 1e-14);
          CHECK(*row.i_tilde <= prev_i * (1 + 1e-9) + 1e-14);
          CHECK(*row.j_tilde <= prev_j * (1 + 1e-9) + 1e-14);
          prev_i = *row.i_tilde;
          prev_j = *row.j_tilde;
          CHECK(row.tv <= 2.0);
        }
      }
    }
  }

  TEST_CASE("evolution report invariants and serialization") {
    const ContinuousChain c = cycle_chain(4);
    const PerronData p = perron(c);
    const DoobChain d = doob_continuous(c, p);
    const Evolver ev(c, p);
    const EvolutionReport rep = evolve(ev, p, d, ProbDist::dirac(4, 1), time_grid(0.01, 20.0, 25, true));
    for (std::size_t i = 1; i < rep.rows.size(); ++i) CHECK(rep.rows[i].survival <= rep.rows[i - 1].survival);
    const std::string csv = rep.to_csv();
    CHECK(csv.find("\r\n") != std::string::npos);
    CHECK(rep.to_json().find("\"rows\"") != std::string::npos);
  }

  TEST_CASE("time grids") {
    const auto lin = time_grid(0.0, 1.0, 5, false);
    CHECK(lin.size() == 5);
    CHECK(lin[2] == doctest::Approx(0.5));
    const auto lg = time_grid(0.01, 100.0, 5, true);
    CHECK(lg[2] == doctest::Approx(1.0));
    CHECK(time_grid(2.0, 3.0, 1, false).size() == 1);
  }

  TEST_CASE("total mass underflow is reported") {
    Matrix q(1, 1);
    q << 1e-3;
    Vector a(1);
    a << 1 - 1e-3;
    const DiscreteChain d = build_discrete(StateSpace::numbered(1), q, a);
    CHECK(kind_of([&] { conditioned_law(d, ProbDist::uniform(1), 120.0); }) == ErrorKind::TotalMassUnderflow);
  }
}
