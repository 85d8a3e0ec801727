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

#include "qsd/doob.hpp"
#include "qsd/error.hpp"
#include "qsd/funineq.hpp"
#include "qsd/models.hpp"
#include "test_util.hpp"

using namespace qsd;
using std::numbers::pi;

namespace {

struct Sym {
  Matrix g;
  ProbDist m;
};

Sym doob_sym(const ContinuousChain& c) {
  const PerronData p = perron(c);
  const DoobChain d = doob_continuous(c, p);
  return {d.symmetrized, d.invariant};
}

}  // namespace

TEST_SUITE("funineq") {
  TEST_CASE("two-point gap and log-Sobolev constant") {
    const Sym s = doob_sym(two_point());
    CHECK(spectral_gap(s.g, s.m) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(lsi_lower_bound(0.5, 2.0) == doctest::Approx(1.0));
    LsiOptions o;
    o.seed = 3;
    const LsiBracket b = lsi_constant(s.g, s.m, o);
    CHECK(b.lower == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(b.upper <= 1.0 + 1e-6);
    REQUIRE(b.estimate.has_value());
    CHECK(*b.estimate == doctest::Approx(1.0).epsilon(1e-4));
  }

  TEST_CASE("reversible gap equals lambda2 - lambda1") {
    for (const ContinuousChain& c : {bd_uniform(6), bd_biased(6, 2.0), bd_biased(5, 0.5)}) {
      const Sym s = doob_sym(c);
      const DirichletSpectrum sp = dirichlet_spectrum(c);
      CHECK(spectral_gap(s.g, s.m) == doctest::Approx(*sp.lambda2 - sp.lambda1()).epsilon(1e-9));
    }
  }

  TEST_CASE("cycle gap window") {
    for (int n : {5, 9, 20}) {
      const PerronData p = perron(cycle_chain(n));
      const Sym s = doob_sym(cycle_chain(n));
      const double gap = spectral_gap(s.g, s.m);
      const double k = 1.0 - std::cos(2.0 * pi / n);
      // The lower end is attained; allow roundoff.
      CHECK(gap >= k * (1.0 - p.lambda1) * (1.0 - 1e-12));
      CHECK(gap <= k * std::pow(1.0 - p.lambda1, 1 - n));
    }
  }

  TEST_CASE("non-symmetric generator is rejected") {
    const ContinuousChain c = cycle_chain(4);
    const DoobChain d = doob_continuous(c, perron(c));
    try {
      spectral_gap(d.generator, d.invariant);
      FAIL("expected NotSymmetric");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::NotSymmetric);
    }
  }

  TEST_CASE("Poincare equality at the gap eigenfunction") {
    for (const ContinuousChain& c : {bd_uniform(5), cycle_chain(6), bd_biased(4, 2.0)}) {
      const Sym s = doob_sym(c);
      const GapEigenpair e = spectral_gap_eigenpair(s.g, s.m);
      CHECK(dirichlet_energy(s.g, s.m, e.g) == doctest::Approx(e.gap * variance(s.m, e.g)).epsilon(1e-8));
    }
  }

  TEST_CASE("Poincare inequality on random functions") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> z;
    const Sym s = doob_sym(cycle_chain(7));
    const double gap = spectral_gap(s.g, s.m);
    for (int i = 0; i < 200; ++i) {
      Vector g(7);
      for (Eigen::Index k = 0; k < 7; ++k) g(k) = z(rng);
      CHECK(dirichlet_energy(s.g, s.m, g) >= gap * variance(s.m, g) * (1 - 1e-12));
    }
  }

  TEST_CASE("comparison bound with constant phi") {
    PerronData p;
    p.phi = Vector::Ones(3);
    p.phi_star = Vector::Ones(3);
    CHECK(compare_gap(p, 0.7) == doctest::Approx(0.7));
  }

  TEST_CASE("comparison bound never exceeds the exact gap") {
    for (const ContinuousChain& c : {bd_uniform(4), bd_uniform(9), bd_biased(6, 2.0), bd_biased(6, 0.5), two_point(),
                                     cycle_chain(6)}) {
      const PerronData p = perron(c);
      const Sym s = doob_sym(c);
      CHECK(compare_gap(p, base_gap(c, p)) <= spectral_gap(s.g, s.m) * (1 + 1e-10));
    }
  }

  TEST_CASE("N=4 comparison bound from the sine extrema") {
    const ContinuousChain c = bd_uniform(4);
    const PerronData p = perron(c);
    // Reversibility makes phi* proportional to phi.
    const double ratio = std::pow(std::sin(pi / 8.0), 2);
    CHECK(compare_gap(p, 1.0) == doctest::Approx(ratio).epsilon(1e-10));
  }

  TEST_CASE("log-Sobolev lower bound formula") {
    const double m = 0.2, gap = 1.5;
    CHECK(lsi_lower_bound(m, gap) == doctest::Approx((1 - 2 * m) / std::log(1 / m - 1) * gap));
    CHECK(lsi_lower_bound(0.5 - 1e-13, 4.0) == doctest::Approx(2.0));
    // Continuity towards the symmetric case.
    CHECK(lsi_lower_bound(0.5 - 1e-6, 4.0) == doctest::Approx(2.0).epsilon(1e-5));
  }

  TEST_CASE("biased two-state chain, lower bound from m_min = (1-r)/2") {
    const double r = 0.4;
    Matrix l(2, 2);
    l << 0, 1 - r, 1 + r, 0;
    const ContinuousChain c = build_continuous(StateSpace::numbered(2), l, Vector::Zero(2));
    const Sym s = doob_sym(c);
    CHECK(s.m.min() == doctest::Approx((1 - r) / 2));
    const double gap = spectral_gap(s.g, s.m);
    CHECK(gap == doctest::Approx(2.0));
    const LsiBracket b = lsi_constant(s.g, s.m);
    CHECK(b.lower == doctest::Approx(r / std::log((1 + r) / (1 - r)) * gap));
  }

  TEST_CASE("log-Sobolev bracket is ordered on builtins") {
    for (const ContinuousChain& c : {bd_uniform(5), bd_biased(5, 2.0), cycle_chain(5), product_chain(two_point(), 2)}) {
      const Sym s = doob_sym(c);
      LsiOptions o;
      o.seed = 1;
      o.restarts = 20;
      const LsiBracket b = lsi_constant(s.g, s.m, o);
      CHECK(b.lower > 0.0);
      CHECK(b.lower <= b.upper * (1 + 1e-8));
      if (b.estimate) {
        CHECK(b.lower <= *b.estimate * (1 + 1e-8));
        CHECK(*b.estimate <= b.upper * (1 + 1e-8));
      }
      CHECK(b.upper <= spectral_gap(s.g, s.m) / 2 * (1 + 1e-8));
    }
  }

  TEST_CASE("log-Sobolev estimate is seed-deterministic") {
    const Sym s = doob_sym(bd_uniform(4));
    LsiOptions o;
    o.seed = 42;
    o.restarts = 10;
    const LsiBracket a = lsi_constant(s.g, s.m, o);
    const LsiBracket b = lsi_constant(s.g, s.m, o);
    CHECK(a.estimate == b.estimate);
  }

  TEST_CASE("entropy and variance helpers") {
    const ProbDist m = ProbDist::uniform(2);
    Vector g(2);
    g << 0.0, std::sqrt(2.0);
    CHECK(variance(m, g) == doctest::Approx(0.5));
    // g^2 = (0, 2): m[g^2 ln g^2] = ln 2, m[g^2] = 1.
    CHECK(entropy_sq(m, g) == doctest::Approx(std::log(2.0)));
  }

  TEST_CASE("path bound on the birth-death kernel") {
    for (int n = 2; n <= 12; ++n) {
      const DiscreteChain d = zhou_bd(n, 0.5, 0.5, 1.0);
      const PathBound b = path_bound(d, ProbDist::uniform(static_cast<std::size_t>(n)));
      CHECK(b.A == doctest::Approx(2.0 * n * (n + 1)).epsilon(1e-12));
      CHECK(b.beta1_upper >= *perron(d).beta);
    }
  }

  TEST_CASE("path bound N=2") {
    const DiscreteChain d = zhou_bd(2, 0.5, 0.5, 1.0);
    const PathBound b = path_bound(d, ProbDist::uniform(2));
    CHECK(b.A == doctest::Approx(12.0));
    CHECK(b.beta1_upper == doctest::Approx(11.0 / 12.0));
    CHECK(*perron(d).beta == doctest::Approx(std::cos(pi / 5)).epsilon(1e-12));
  }

  TEST_CASE("single state path bound") {
    const double p = 0.3;
    Matrix q(1, 1);
    q << 1 - p;
    Vector a(1);
    a << p;
    const DiscreteChain d = build_discrete(StateSpace::numbered(1), q, a);
    const PathBound b = path_bound(d, ProbDist::uniform(1));
    CHECK(b.A == doctest::Approx(2.0 / p));
    CHECK(b.beta1_upper == doctest::Approx(1 - p / 2));
    CHECK(b.beta1_upper >= 1 - p);
  }

  TEST_CASE("default paths are shortest and end at absorption") {
    const DiscreteChain d = zhou_bd(5, 0.5, 0.5, 1.0);
    const PathFamily f = default_paths(d);
    REQUIRE(f.paths.size() == 5);
    const Matrix k = d.full_kernel();
    for (std::size_t x = 0; x < 5; ++x) {
      const auto& g = f.paths[x];
      CHECK(g.front() == x);
      CHECK(g.back() == 5u);
      CHECK(g.size() == 5 - x + 1);
      for (std::size_t i = 0; i + 1 < g.size(); ++i) CHECK(k(static_cast<Eigen::Index>(g[i]), static_cast<Eigen::Index>(g[i + 1])) > 0.0);
    }
  }

  TEST_CASE("unreachable absorption") {
    Matrix q(2, 2);
    q << 0.5, 0.0, 0.0, 1.0;
    Vector a(2);
    a << 0.5, 0.0;
    const DiscreteChain d = build_discrete(StateSpace::numbered(2), q, a);
    try {
      default_paths(d);
      FAIL("expected NoPathToAbsorption");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::NoPathToAbsorption);
    }
  }

  TEST_CASE("Dirichlet form: constants without absorption") {
    Matrix q(2, 2);
    q << 0.3, 0.7, 0.7, 0.3;
    const DiscreteChain d = build_discrete(StateSpace::numbered(2), q, Vector::Zero(2));
    CHECK(dirichlet_form(d, ProbDist::uniform(2), Vector::Constant(2, 3.0)) == doctest::Approx(0.0));
  }

  TEST_CASE("Dirichlet form of an indicator by direct double sum") {
    const DiscreteChain d = zhou_bd(2, 0.5, 0.5, 1.0);
    const ProbDist q = ProbDist::uniform(2);
    Vector f = Vector::Zero(2);
    f(0) = 1.0;
    const Matrix k = d.full_kernel();
    Vector fe = Vector::Zero(3);
    fe.head(2) = f;
    double e = 0.0;
    for (int x = 0; x < 3; ++x)
      for (int y = 0; y < 3; ++y) {
        const double qx = x < 2 ? q[static_cast<std::size_t>(x)] : 0.0;
        e += 0.5 * std::pow(fe(y) - fe(x), 2) * qx * k(x, y);
      }
    CHECK(dirichlet_form(d, q, f) == doctest::Approx(e).epsilon(1e-12));
    double kill = 0.0;
    for (int x = 0; x < 2; ++x) kill += f(x) * f(x) * q[static_cast<std::size_t>(x)] * k(x, 2);
    CHECK(dirichlet_form(d, q, f) == doctest::Approx(kernel_quadratic_form(d, q, f) - 0.5 * kill).epsilon(1e-12));
  }

  TEST_CASE("Dirichlet form is dominated by the kernel quadratic form") {
    std::mt19937_64 rng(19);
    std::normal_distribution<double> z;
    const DiscreteChain d = zhou_bd(6, 0.5, 0.5, 1.0);
    const ProbDist q = ProbDist::uniform(6);
    for (int i = 0; i < 100; ++i) {
      Vector f(6);
      for (Eigen::Index k = 0; k < 6; ++k) f(k) = z(rng);
      CHECK(dirichlet_form(d, q, f) <= kernel_quadratic_form(d, q, f) + 1e-12);
    }
  }
}
