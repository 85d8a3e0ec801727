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

#include <random>

#include "qsd/chain.hpp"
#include "qsd/error.hpp"
#include "qsd/models.hpp"
#include "test_util.hpp"

using namespace qsd;

TEST_SUITE("chain") {
  TEST_CASE("two-point chain builds and is irreducible") {
    Matrix l(2, 2);
    l << -1, 1, 1, -1;
    const ContinuousChain c = build_continuous(StateSpace::numbered(2), l, Vector::Ones(2));
    CHECK(c.irreducible());
    CHECK_FALSE(c.non_absorbing());
    CHECK_FALSE(c.diagonal_overwritten());
    CHECK(c.subgenerator()(0, 0) == doctest::Approx(-2.0));
  }

  TEST_CASE("negative off-diagonal rate is rejected") {
    Matrix l(2, 2);
    l << 0.5, -0.5, 1, -1;
    try {
      build_continuous(StateSpace::numbered(2), l, Vector::Ones(2));
      FAIL("expected NegativeRate");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::NegativeRate);
    }
  }

  TEST_CASE("dimension mismatch and negative killing") {
    Matrix l = Matrix::Zero(2, 2);
    CHECK_THROWS_AS(build_continuous(StateSpace::numbered(3), l, Vector::Ones(2)), Error);
    Vector v(2);
    v << 1, -1;
    try {
      build_continuous(StateSpace::numbered(2), l, v);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.category() == ErrorCategory::Model);
    }
  }

  TEST_CASE("N=2 edge rates 1 and 2 with killing at state 1") {
    Matrix l(2, 2);
    l << 0, 1, 2, 0;
    Vector v(2);
    v << 1, 0;
    const ContinuousChain c = build_continuous(StateSpace::numbered(2), l, v);
    CHECK(c.irreducible());
    CHECK(c.rates()(1, 1) == -2.0);
    CHECK(c.diagonal_overwritten());
    CHECK(c == bd_uniform(2));
  }

  TEST_CASE("supplied diagonal is replaced by minus the off-diagonal sum") {
    Matrix l(3, 3);
    l << 7, 1, 2, 0.5, 0, 0.5, 3, 0, 9;
    const ContinuousChain c = build_continuous(StateSpace::numbered(3), l, Vector::Zero(3));
    CHECK(c.diagonal_overwritten());
    CHECK(c.non_absorbing());
    for (Eigen::Index i = 0; i < 3; ++i) CHECK(std::abs(c.rates().row(i).sum()) < 1e-12);
  }

  TEST_CASE("full generator rows sum to zero on every builtin") {
    for (const ContinuousChain& c : {bd_uniform(6), bd_biased(5, 2.0), cycle_chain(5), two_point(),
                                     product_chain(two_point(), 2)}) {
      const Matrix g = c.full_generator();
      CHECK(g.rows() == static_cast<Eigen::Index>(c.size() + 1));
      CHECK(g.rowwise().sum().cwiseAbs().maxCoeff() < 1e-12);
      CHECK(g.row(g.rows() - 1).cwiseAbs().maxCoeff() == 0.0);
    }
  }

  TEST_CASE("irreducibility flag matches transitive closure") {
    std::mt19937_64 rng(11);
    std::bernoulli_distribution coin(0.3);
    for (int trial = 0; trial < 200; ++trial) {
      const int n = 2 + trial % 5;
      Matrix l = Matrix::Zero(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (i != j && coin(rng)) l(i, j) = 1.0;
      const ContinuousChain c = build_continuous(StateSpace::numbered(static_cast<std::size_t>(n)), l,
                                                 Vector::Ones(n));
      CHECK(c.irreducible() == test::closure_connected(l));
    }
  }

  TEST_CASE("rock-breaking minor is a valid reducible discrete chain") {
    const Matrix t = rock_breaking(4).table();
    const Matrix q = t.bottomRightCorner(4, 4);
    const Vector a = t.col(0).tail(4);
    CHECK(a(0) == 0.5);
    CHECK(a(1) == 0.25);
    CHECK(a(2) == 0.0);
    CHECK(a(3) == 0.0);
    const DiscreteChain d = build_discrete(StateSpace::numbered(4), q, a);
    CHECK_FALSE(d.irreducible());
    CHECK((d.full_kernel().rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-12);
  }

  TEST_CASE("intro walk N=2 kernel") {
    Matrix q(2, 2);
    q << 0, 0.5, 0.5, 0.5;
    Vector a(2);
    a << 0.5, 0;
    const DiscreteChain d = build_discrete(StateSpace::numbered(2), q, a);
    CHECK(d.irreducible());
    CHECK(d == intro_walk(2));
  }

  TEST_CASE("row sum violation") {
    Matrix q(2, 2);
    q << 0.51, 0.5, 0.5, 0.5;
    try {
      build_discrete(StateSpace::numbered(2), q, Vector::Zero(2));
      FAIL("expected RowSumViolation");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::RowSumViolation);
    }
  }

  TEST_CASE("negative kernel entry") {
    Matrix q(2, 2);
    q << -0.1, 1.1, 0.5, 0.5;
    try {
      build_discrete(StateSpace::numbered(2), q, Vector::Zero(2));
      FAIL("expected NegativeEntry");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::NegativeEntry);
    }
  }

  TEST_CASE("state labels must be distinct") {
    CHECK_THROWS_AS(StateSpace({"a", "b", "a"}), Error);
    const StateSpace s({"x", "y"});
    CHECK(s.index_of("y") == 1u);
    CHECK_FALSE(s.index_of("z").has_value());
  }

  TEST_CASE("probability distributions validate their mass") {
    Vector w(3);
    w << 0.2, 0.3, 0.5;
    CHECK(ProbDist(w)[2] == 0.5);
    w(2) = 0.6;
    CHECK_THROWS_AS(ProbDist{w}, Error);
    CHECK(ProbDist::normalized(w).weights().sum() == doctest::Approx(1.0));
    CHECK(ProbDist::dirac(4, 2)[2] == 1.0);
    CHECK(ProbDist::uniform(4).min() == 0.25);
  }
}
