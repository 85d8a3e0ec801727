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

// Shared helpers for the unit tests.

#ifndef QSD_TESTS_TEST_UTIL_HPP_
#define QSD_TESTS_TEST_UTIL_HPP_

#include <cmath>
#include <random>

#include "qsd/chain.hpp"

namespace qsd::test {

inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

// Dense exponential by Taylor series with squaring; an oracle independent of
// the library's expm routes.
inline Matrix taylor_expm(const Matrix& a, double t) {
  Matrix m = a * t;
  int squarings = 0;
  const double norm = m.cwiseAbs().rowwise().sum().maxCoeff();
  while (norm / std::pow(2.0, squarings) > 0.1) ++squarings;
  m /= std::pow(2.0, squarings);
  Matrix term = Matrix::Identity(m.rows(), m.cols());
  Matrix sum = term;
  for (int k = 1; k < 30; ++k) {
    term = term * m / static_cast<double>(k);
    sum += term;
  }
  for (int i = 0; i < squarings; ++i) sum = sum * sum;
  return sum;
}

inline Vector random_weights(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.01, 1.0);
  Vector w(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = u(rng);
  return w / w.sum();
}

// Transitive closure by repeated boolean squaring.
inline bool closure_connected(const Matrix& adj) {
  const Eigen::Index n = adj.rows();
  Eigen::MatrixXi r = Eigen::MatrixXi::Identity(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (i != j && adj(i, j) > 0) r(i, j) = 1;
  for (Eigen::Index k = 0; k < n; ++k)
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        if (r(i, k) && r(k, j)) r(i, j) = 1;
  return r.minCoeff() == 1;
}

}  // namespace qsd::test

#endif  // QSD_TESTS_TEST_UTIL_HPP_
