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

#include "qsd/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include <Eigen/Eigenvalues>

#include "qsd/error.hpp"

namespace qsd {
namespace {

using ComplexVector = Eigen::VectorXcd;

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

// Rotates a complex eigenvector for a real eigenvalue onto the real axis.
Vector realify(const ComplexVector& v) {
  Eigen::Index k = 0;
  v.cwiseAbs().maxCoeff(&k);
  const std::complex<double> phase = std::conj(v(k)) / std::abs(v(k));
  return (v * phase).real();
}

// Sign-fix so the first entry is positive (falls back to the largest entry
// when the first is zero).
Vector sign_fixed(Vector v) {
  double pivot = v(0);
  if (pivot == 0.0) {
    Eigen::Index k = 0;
    v.cwiseAbs().maxCoeff(&k);
    pivot = v(k);
  }
  if (pivot < 0.0) v = -v;
  return v;
}

struct RealEigenpair {
  double value;
  Vector vector;
};

// Eigenpair with the largest real part of a real matrix whose top eigenvalue
// is real (Perron root of a Metzler or nonnegative matrix).
RealEigenpair top_eigenpair(const Matrix& m) {
  Eigen::EigenSolver<Matrix> es(m, true);
  if (es.info() != Eigen::Success) {
    throw Error(ErrorKind::SolverDivergence, "nonsymmetric eigensolver did not converge");
  }
  const ComplexVector& vals = es.eigenvalues();
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < vals.size(); ++i) {
    if (vals(i).real() > vals(best).real()) best = i;
  }
  return {vals(best).real(), realify(es.eigenvectors().col(best))};
}

// Symmetric similarity D M D^{-1} with D = diag(sqrt(w)).
Matrix symmetric_form(const Matrix& m, const Vector& w) {
  const Vector d = w.cwiseSqrt();
  Matrix s = d.asDiagonal() * m * d.cwiseInverse().asDiagonal();
  return 0.5 * (s + s.transpose());
}

ProbDist invariant_of_rates(const Matrix& rates) {
  const Eigen::Index n = rates.rows();
  Matrix a = rates.transpose();
  a.row(n - 1).setOnes();
  Vector b = Vector::Zero(n);
  b(n - 1) = 1.0;
  Vector eta = a.fullPivLu().solve(b);
  const double resid = (rates.transpose() * eta).cwiseAbs().maxCoeff();
  if (!(resid <= 1e-10 * std::max(1.0, max_abs(rates)))) {
    throw Error(ErrorKind::SolverDivergence, "invariant measure residual too large");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(eta(i) > 0.0)) {
      throw Error(ErrorKind::NotIrreducible, "invariant measure is not strictly positive");
    }
  }
  return ProbDist(eta / eta.sum());
}

void check_residual(const Matrix& m, const Vector& v, double value, double tol,
                    const char* what) {
  const double scale = std::max(1.0, max_abs(m));
  const double resid = (m * v - value * v).cwiseAbs().maxCoeff();
  if (!(resid <= tol * scale * v.cwiseAbs().maxCoeff())) {
    throw Error(ErrorKind::SolverDivergence,
                std::string(what) + " eigen-residual " + std::to_string(resid) +
                    " exceeds tolerance");
  }
}

void require_positive(const Vector& v, const char* what) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!(v(i) > 0.0)) {
      throw Error(ErrorKind::PerronFailure, std::string(what) + " is not strictly positive");
    }
  }
}

struct DiscretePerron {
  double beta;
  Vector phi;  // sums to one
  Vector psi;  // sums to one
};

DiscretePerron discrete_perron_raw(const Matrix& q) {
  RealEigenpair right = top_eigenpair(q);
  RealEigenpair left = top_eigenpair(q.transpose());
  Vector phi = sign_fixed(right.vector);
  Vector psi = sign_fixed(left.vector);
  return {right.value, phi / phi.sum(), psi / psi.sum()};
}

}  // namespace

double DirichletSpectrum::second_real() const {
  if (eigenvalues.size() < 2) {
    throw Error(ErrorKind::InvalidArgument, "spectrum has a single eigenvalue");
  }
  // lambda1 is real and simple for irreducible chains.
  return eigenvalues[1].real();
}

ProbDist invariant_measure(const ContinuousChain& chain) {
  require(chain.irreducible(), ErrorKind::NotIrreducible, "rate matrix is not irreducible");
  return invariant_of_rates(chain.rates());
}

bool check_reversible(const ContinuousChain& chain, const ProbDist& eta) {
  const Matrix& l = chain.rates();
  const Vector& w = eta.weights();
  const double tol = 1e-10 * std::max(1.0, max_abs(l));
  for (Eigen::Index x = 0; x < l.rows(); ++x) {
    for (Eigen::Index y = x + 1; y < l.cols(); ++y) {
      if (std::abs(w(x) * l(x, y) - w(y) * l(y, x)) > tol) return false;
    }
  }
  return true;
}

std::optional<ProbDist> reversing_measure(const Matrix& weights, double tol) {
  const Eigen::Index n = weights.rows();
  Vector q = Vector::Zero(n);
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  q(0) = 1.0;
  seen[0] = 1;
  std::deque<Eigen::Index> queue{0};
  while (!queue.empty()) {
    const Eigen::Index x = queue.front();
    queue.pop_front();
    for (Eigen::Index y = 0; y < n; ++y) {
      if (y == x || weights(x, y) <= 0.0) continue;
      if (weights(y, x) <= 0.0) return std::nullopt;
      if (!seen[static_cast<std::size_t>(y)]) {
        seen[static_cast<std::size_t>(y)] = 1;
        q(y) = q(x) * weights(x, y) / weights(y, x);
        queue.push_back(y);
      }
    }
  }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end()) return std::nullopt;
  q /= q.sum();
  const double scale = std::max(1.0, max_abs(weights));
  for (Eigen::Index x = 0; x < n; ++x) {
    for (Eigen::Index y = x + 1; y < n; ++y) {
      if (std::abs(q(x) * weights(x, y) - q(y) * weights(y, x)) > tol * scale) {
        return std::nullopt;
      }
    }
  }
  return ProbDist(q);
}

PerronData perron(const ContinuousChain& chain, const SolverOptions& opts) {
  require(chain.irreducible(), ErrorKind::NotIrreducible,
          "Perron data requires an irreducible rate matrix");
  const Eigen::Index n = static_cast<Eigen::Index>(chain.size());
  PerronData p;
  p.discrete = false;
  const ProbDist eta = invariant_measure(chain);
  const Vector& w = eta.weights();
  p.eta = eta;

  if (chain.non_absorbing()) {
    p.lambda1 = 0.0;
    p.phi = Vector::Ones(n);
    p.phi_star = Vector::Ones(n);
    p.nu = eta;
    return p;
  }

  const Matrix m = chain.subgenerator();
  Vector phi;
  Vector phi_star;
  if (check_reversible(chain, eta)) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetric_form(m, w));
    if (es.info() != Eigen::Success) {
      throw Error(ErrorKind::SolverDivergence, "symmetric eigensolver did not converge");
    }
    p.lambda1 = -es.eigenvalues()(n - 1);
    phi = sign_fixed(es.eigenvectors().col(n - 1).cwiseQuotient(w.cwiseSqrt()));
    phi_star = phi;
  } else {
    RealEigenpair right = top_eigenpair(m);
    RealEigenpair left = top_eigenpair(m.transpose());
    p.lambda1 = -right.value;
    phi = sign_fixed(right.vector);
    phi_star = sign_fixed(left.vector).cwiseQuotient(w);
  }

  require_positive(phi, "phi");
  require_positive(phi_star, "phi_star");
  phi /= std::sqrt(w.dot(phi.cwiseProduct(phi)));
  phi_star /= w.dot(phi_star);
  check_residual(m, phi, -p.lambda1, opts.eigen_tol, "right Perron");
  const Matrix adjoint = w.cwiseInverse().asDiagonal() * chain.rates().transpose() * w.asDiagonal();
  Matrix adjoint_sub = adjoint;
  adjoint_sub.diagonal() -= chain.killing();
  check_residual(adjoint_sub, phi_star, -p.lambda1, opts.eigen_tol, "left Perron");

  p.phi = phi;
  p.phi_star = phi_star;
  p.nu = ProbDist::normalized(phi_star.cwiseProduct(w));
  return p;
}

PerronData perron(const DiscreteChain& chain, const SolverOptions& opts) {
  const Matrix& q = chain.sub();
  const Eigen::Index n = q.rows();
  DiscretePerron raw;
  if (chain.irreducible()) {
    raw = discrete_perron_raw(q);
  } else {
    // Perron data of (1-eps)Q + eps J, extrapolated linearly to eps = 0.
    constexpr double e1 = 1e-6;
    constexpr double e2 = 1e-8;
    const Matrix j = Matrix::Constant(n, n, 1.0 / static_cast<double>(n));
    const DiscretePerron a = discrete_perron_raw((1.0 - e1) * q + e1 * j);
    const DiscretePerron b = discrete_perron_raw((1.0 - e2) * q + e2 * j);
    const double ca = -e2 / (e1 - e2);
    const double cb = e1 / (e1 - e2);
    raw.beta = ca * a.beta + cb * b.beta;
    raw.phi = ca * a.phi + cb * b.phi;
    raw.psi = ca * a.psi + cb * b.psi;
    const double zero_tol = std::sqrt(opts.eigen_tol) * raw.psi.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < n; ++i) {
      if (std::abs(raw.psi(i)) <= zero_tol) raw.psi(i) = 0.0;
    }
  }
  require_positive(raw.phi, "phi");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (raw.psi(i) < 0.0) throw Error(ErrorKind::PerronFailure, "psi has a negative entry");
  }
  PerronData p;
  p.discrete = true;
  p.beta = raw.beta;
  p.lambda1 = 1.0 - raw.beta;
  p.phi = raw.phi / raw.phi.minCoeff();
  p.psi = raw.psi / raw.psi.sum();
  check_residual(q, p.phi, raw.beta, opts.eigen_tol, "right Perron");
  check_residual(q.transpose(), p.psi, raw.beta, opts.eigen_tol, "left Perron");
  p.nu = ProbDist(p.psi);
  return p;
}

PerronData perron(const AbsorbingChain& chain, const SolverOptions& opts) {
  return std::visit([&](const auto& c) { return perron(c, opts); }, chain);
}

std::vector<std::complex<double>> sorted_eigenvalues(const Matrix& m) {
  Eigen::EigenSolver<Matrix> es(m, false);
  if (es.info() != Eigen::Success) {
    throw Error(ErrorKind::SolverDivergence, "nonsymmetric eigensolver did not converge");
  }
  std::vector<std::complex<double>> vals(es.eigenvalues().data(),
                                         es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(vals.begin(), vals.end(), [](const auto& a, const auto& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return vals;
}

Vector symmetrized_eigenvalues(const Matrix& m, const Vector& w) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetric_form(m, w), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw Error(ErrorKind::SolverDivergence, "symmetric eigensolver did not converge");
  }
  return es.eigenvalues();
}

namespace {

DirichletSpectrum spectrum_from(const Matrix& m, const std::optional<ProbDist>& reversing) {
  DirichletSpectrum s;
  if (reversing) {
    const Vector vals = symmetrized_eigenvalues(m, reversing->weights());
    s.reversible = true;
    for (Eigen::Index i = 0; i < vals.size(); ++i) s.eigenvalues.emplace_back(vals(i), 0.0);
    if (vals.size() >= 2) s.lambda2 = vals(1);
  } else {
    s.eigenvalues = sorted_eigenvalues(m);
  }
  return s;
}

}  // namespace

DirichletSpectrum dirichlet_spectrum(const ContinuousChain& chain) {
  std::optional<ProbDist> reversing;
  if (chain.irreducible()) {
    ProbDist eta = invariant_measure(chain);
    if (check_reversible(chain, eta)) reversing = std::move(eta);
  }
  return spectrum_from(-chain.subgenerator(), reversing);
}

DirichletSpectrum dirichlet_spectrum(const DiscreteChain& chain) {
  const Eigen::Index n = static_cast<Eigen::Index>(chain.size());
  return spectrum_from(Matrix::Identity(n, n) - chain.sub(), reversing_measure(chain.sub()));
}

DirichletSpectrum dirichlet_spectrum(const AbsorbingChain& chain) {
  return std::visit([](const auto& c) { return dirichlet_spectrum(c); }, chain);
}

}  // namespace qsd
