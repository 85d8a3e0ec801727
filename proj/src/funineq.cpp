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

#include "qsd/funineq.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <random>

#include <Eigen/Eigenvalues>

#include "qsd/doob.hpp"
#include "qsd/error.hpp"

namespace qsd {
namespace {

constexpr double kFlatEntropy = 1e-13;

double ratio_of(const Matrix& g_mat, const ProbDist& m, const Vector& g) {
  const double ent = entropy_sq(m, g);
  if (!(ent > kFlatEntropy)) return std::numeric_limits<double>::infinity();
  return dirichlet_energy(g_mat, m, g) / ent;
}

// Gradient descent on u -> E(e^u)/Ent(e^{2u}) with Armijo backtracking.
double descend(const Matrix& gen, const ProbDist& m, Vector u, const LsiOptions& opts) {
  const Vector& w = m.weights();
  auto normalize = [&](Vector& v) {
    const Vector g = v.array().exp().matrix();
    v.array() -= 0.5 * std::log(w.dot(g.cwiseProduct(g)));
  };
  normalize(u);
  Vector g = u.array().exp().matrix();
  double r = ratio_of(gen, m, g);
  if (!std::isfinite(r)) return r;
  double step = 1.0;
  int quiet = 0;
  for (int it = 0; it < opts.max_iter; ++it) {
    const double z = w.dot(g.cwiseProduct(g));
    const double ent = entropy_sq(m, g);
    const Vector de = 2.0 * w.cwiseProduct(-(gen * g));
    const Vector dent =
        2.0 * w.cwiseProduct(g).cwiseProduct((g.cwiseProduct(g).array().log() - std::log(z)).matrix());
    const Vector grad = g.cwiseProduct(de - r * dent) / ent;
    const double gnorm2 = grad.squaredNorm();
    if (!(gnorm2 > 0.0) || !std::isfinite(gnorm2)) break;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      Vector trial = u - step * grad;
      normalize(trial);
      const Vector gt = trial.array().exp().matrix();
      const double rt = ratio_of(gen, m, gt);
      if (std::isfinite(rt) && rt <= r - 1e-4 * step * gnorm2) {
        const double drop = r - rt;
        u = std::move(trial);
        g = gt;
        quiet = drop <= opts.tol * std::max(r, 1e-300) ? quiet + 1 : 0;
        r = rt;
        step *= 2.0;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted || quiet >= 5) break;
  }
  return r;
}

}  // namespace

void require_detailed_balance(const Matrix& generator, const ProbDist& m) {
  const Vector& w = m.weights();
  const double tol = 1e-10 * std::max(1.0, generator.cwiseAbs().maxCoeff());
  for (Eigen::Index x = 0; x < generator.rows(); ++x) {
    for (Eigen::Index y = x + 1; y < generator.cols(); ++y) {
      if (std::abs(w(x) * generator(x, y) - w(y) * generator(y, x)) > tol) {
        throw Error(ErrorKind::NotSymmetric, "generator is not reversible with respect to the given law");
      }
    }
  }
}

GapEigenpair spectral_gap_eigenpair(const Matrix& sym_generator, const ProbDist& invariant) {
  require(sym_generator.rows() >= 2, ErrorKind::InvalidArgument, "spectral gap needs at least two states");
  require_detailed_balance(sym_generator, invariant);
  const Vector d = invariant.weights().cwiseSqrt();
  Matrix s = -(d.asDiagonal() * sym_generator * d.cwiseInverse().asDiagonal());
  s = 0.5 * (s + s.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(s);
  require(es.info() == Eigen::Success, ErrorKind::SolverDivergence, "symmetric eigensolver did not converge");
  GapEigenpair out;
  out.gap = es.eigenvalues()(1);
  out.g = es.eigenvectors().col(1).cwiseQuotient(d);
  return out;
}

double spectral_gap(const Matrix& sym_generator, const ProbDist& invariant) {
  return spectral_gap_eigenpair(sym_generator, invariant).gap;
}

double dirichlet_energy(const Matrix& sym_generator, const ProbDist& m, const Vector& g) {
  const Vector& w = m.weights();
  double total = 0.0;
  for (Eigen::Index x = 0; x < g.size(); ++x) {
    for (Eigen::Index y = 0; y < g.size(); ++y) {
      if (x == y) continue;
      const double diff = g(y) - g(x);
      total += diff * diff * w(x) * sym_generator(x, y);
    }
  }
  return 0.5 * total;
}

double variance(const ProbDist& m, const Vector& g) {
  const Vector& w = m.weights();
  const double mean = w.dot(g);
  return w.dot((g.array() - mean).square().matrix());
}

double entropy_sq(const ProbDist& m, const Vector& g) {
  const Vector& w = m.weights();
  const double z = w.dot(g.cwiseProduct(g));
  if (!(z > 0.0)) return 0.0;
  // Sum of h ln h - h + 1 >= 0 (the linear terms cancel in expectation); near
  // h = 1 the series keeps nearly flat g from losing every digit.
  double total = 0.0;
  for (Eigen::Index x = 0; x < g.size(); ++x) {
    const double d = (g(x) * g(x) - z) / z;
    double term = 0.0;
    if (std::abs(d) < 1e-2) {
      double pw = d * d;
      for (int k = 2; k <= 12; ++k) {
        term += pw / (k * (k - 1.0));
        pw *= -d;
      }
    } else {
      const double h = 1.0 + d;
      term = (h > 0.0 ? h * std::log(h) : 0.0) - d;
    }
    total += w(x) * term;
  }
  return std::max(0.0, z * total);
}

double base_gap(const ContinuousChain& chain, const PerronData& p) {
  require(!p.discrete && p.eta.has_value(), ErrorKind::InvalidArgument,
          "base gap needs continuous-time Perron data");
  return spectral_gap(symmetrize(chain.rates(), *p.eta), *p.eta);
}

double compare_gap(const PerronData& p, double gap_base) {
  const double num = p.phi.minCoeff() * p.phi_star.minCoeff();
  const double den = p.phi.maxCoeff() * p.phi_star.maxCoeff();
  return num / den * gap_base;
}

double lsi_lower_bound(double m_min, double gap) {
  if (std::abs(m_min - 0.5) < 1e-12) return 0.5 * gap;
  return (1.0 - 2.0 * m_min) / std::log(1.0 / m_min - 1.0) * gap;
}

LsiBracket lsi_constant(const Matrix& sym_generator, const ProbDist& invariant, const LsiOptions& opts) {
  const GapEigenpair ge = spectral_gap_eigenpair(sym_generator, invariant);
  const Eigen::Index n = sym_generator.rows();
  LsiBracket b;
  b.lower = lsi_lower_bound(invariant.min(), ge.gap);

  // Trial functions: smoothed indicators of single states and of level sets
  // of the gap eigenfunction, plus perturbations of constants along it.
  double upper = 0.5 * ge.gap;
  const double deltas[] = {1e-3, 1e-2, 0.1, 0.5};
  auto consider = [&](const Vector& g) { upper = std::min(upper, ratio_of(sym_generator, invariant, g)); };
  if (n <= 200) {
    for (Eigen::Index x = 0; x < n; ++x) {
      for (double d : deltas) {
        Vector g = Vector::Constant(n, d);
        g(x) = 1.0;
        consider(g);
      }
    }
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index c) { return ge.g(a) < ge.g(c); });
  const Eigen::Index cuts = std::min<Eigen::Index>(n - 1, 64);
  for (Eigen::Index k = 1; k <= cuts; ++k) {
    const Eigen::Index size = k * (n - 1) / cuts;
    for (int side = 0; side < 2; ++side) {
      for (double d : deltas) {
        Vector g = Vector::Constant(n, d);
        for (Eigen::Index i = 0; i < size; ++i) {
          g(order[static_cast<std::size_t>(side == 0 ? i : n - 1 - i)]) = 1.0;
        }
        consider(g);
      }
    }
  }
  for (double t : {0.5, 1.0, 2.0, 4.0}) {
    consider(Vector::Ones(n) + t * ge.g / ge.g.cwiseAbs().maxCoeff());
  }
  b.upper = std::max(upper, b.lower);
  if (opts.mode == LsiMode::Bracket) return b;

  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double spreads[] = {0.5, 1.0, 2.0, 4.0, 8.0};
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < opts.restarts; ++k) {
    const double sigma = spreads[static_cast<std::size_t>(k) % std::size(spreads)];
    Vector u(n);
    for (Eigen::Index i = 0; i < n; ++i) u(i) = sigma * normal(rng);
    best = std::min(best, descend(sym_generator, invariant, std::move(u), opts));
  }
  if (!std::isfinite(best)) {
    b.stalled = true;
    return b;
  }
  b.estimate = std::min(best, b.upper);
  return b;
}

PathFamily default_paths(const DiscreteChain& chain) {
  const Matrix& q = chain.sub();
  const Vector& a = chain.absorb();
  const auto n = static_cast<std::size_t>(q.rows());
  constexpr std::size_t kUnreached = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> dist(n, kUnreached);
  std::deque<std::size_t> queue;
  for (std::size_t x = 0; x < n; ++x) {
    if (a(static_cast<Eigen::Index>(x)) > 0.0) {
      dist[x] = 1;
      queue.push_back(x);
    }
  }
  while (!queue.empty()) {
    const std::size_t y = queue.front();
    queue.pop_front();
    for (std::size_t x = 0; x < n; ++x) {
      if (dist[x] == kUnreached && x != y && q(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) > 0.0) {
        dist[x] = dist[y] + 1;
        queue.push_back(x);
      }
    }
  }
  PathFamily fam;
  for (std::size_t x = 0; x < n; ++x) {
    if (dist[x] == kUnreached) {
      throw Error(ErrorKind::NoPathToAbsorption,
                  "state " + chain.states().label(x) + " cannot reach absorption");
    }
    std::vector<std::size_t> path{x};
    std::size_t cur = x;
    while (dist[cur] > 1) {
      std::size_t next = kUnreached;
      for (std::size_t y = 0; y < n; ++y) {
        if (dist[y] + 1 == dist[cur] &&
            q(static_cast<Eigen::Index>(cur), static_cast<Eigen::Index>(y)) > 0.0) {
          next = y;
          break;
        }
      }
      path.push_back(next);
      cur = next;
    }
    path.push_back(n);
    fam.paths.push_back(std::move(path));
  }
  return fam;
}

PathBound path_bound(const DiscreteChain& chain, const ProbDist& q, const std::optional<PathFamily>& paths) {
  const Matrix k = chain.full_kernel();
  const auto n = static_cast<std::size_t>(chain.size());
  require(q.size() == n, ErrorKind::DimensionMismatch, "q has the wrong length");
  const Vector& w = q.weights();
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = x + 1; y < n; ++y) {
      const auto xi = static_cast<Eigen::Index>(x);
      const auto yi = static_cast<Eigen::Index>(y);
      if (std::abs(w(xi) * k(xi, yi) - w(yi) * k(yi, xi)) > 1e-10) {
        throw Error(ErrorKind::NotReversible, "q is not reversible for the kernel on S");
      }
    }
  }
  const PathFamily fam = paths ? *paths : default_paths(chain);
  require(fam.paths.size() == n, ErrorKind::InvalidArgument, "one path per state is required");

  // Load of each edge: sum of |gamma_z| q(z) over paths through it.
  Matrix load = Matrix::Zero(static_cast<Eigen::Index>(n + 1), static_cast<Eigen::Index>(n + 1));
  for (std::size_t z = 0; z < n; ++z) {
    const auto& p = fam.paths[z];
    require(!p.empty() && p.front() == z && p.back() == n, ErrorKind::InvalidArgument,
            "path of state " + chain.states().label(z) + " must run from it to absorption");
    const double len = static_cast<double>(p.size() - 1);
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
      const auto from = static_cast<Eigen::Index>(p[i]);
      const auto to = static_cast<Eigen::Index>(p[i + 1]);
      require(p[i] < n && k(from, to) > 0.0, ErrorKind::InvalidArgument,
              "path of state " + chain.states().label(z) + " uses an impossible step");
      load(from, to) += len * w(static_cast<Eigen::Index>(z));
    }
  }
  PathBound out;
  for (Eigen::Index x = 0; x < static_cast<Eigen::Index>(n); ++x) {
    for (Eigen::Index y = 0; y <= static_cast<Eigen::Index>(n); ++y) {
      if (load(x, y) <= 0.0) continue;
      const double a = 2.0 / (w(x) * k(x, y)) * load(x, y);
      if (a > out.A) {
        out.A = a;
        out.edge_from = static_cast<std::size_t>(x);
        out.edge_to = static_cast<std::size_t>(y);
      }
    }
  }
  out.beta1_upper = 1.0 - 1.0 / out.A;
  return out;
}

double dirichlet_form(const DiscreteChain& chain, const ProbDist& q, const Vector& f) {
  const Matrix k = chain.full_kernel();
  const Eigen::Index n = static_cast<Eigen::Index>(chain.size());
  Vector fe = Vector::Zero(n + 1);
  fe.head(n) = f;
  Vector qe = Vector::Zero(n + 1);
  qe.head(n) = q.weights();
  double total = 0.0;
  for (Eigen::Index x = 0; x <= n; ++x) {
    for (Eigen::Index y = 0; y <= n; ++y) {
      const double diff = fe(y) - fe(x);
      total += diff * diff * qe(x) * k(x, y);
    }
  }
  return 0.5 * total;
}

double kernel_quadratic_form(const DiscreteChain& chain, const ProbDist& q, const Vector& f) {
  const Vector r = f - chain.sub() * f;
  return q.weights().dot(r.cwiseProduct(f));
}

}  // namespace qsd
