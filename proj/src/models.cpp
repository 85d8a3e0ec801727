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

#include "qsd/models.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "qsd/error.hpp"

namespace qsd {
namespace {

using cplx = std::complex<double>;

void check_size(bool ok, const std::string& what) { require(ok, ErrorKind::InvalidArgument, what); }

StateSpace range_states(int first, int last) {
  return StateSpace::numbered(static_cast<std::size_t>(last - first + 1), first);
}

std::int64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::int64_t out = 1;
  for (int i = 1; i <= k; ++i) out = out * (n - k + i) / i;
  return out;
}

// Partitions of n with parts in nonincreasing order, lexicographically
// descending (n first, 1^n last).
void partitions_desc(int remaining, int max_part, std::vector<int>& cur,
                     std::vector<std::vector<int>>& out) {
  if (remaining == 0) {
    out.push_back(cur);
    return;
  }
  for (int part = std::min(remaining, max_part); part >= 1; --part) {
    cur.push_back(part);
    partitions_desc(remaining - part, part, cur, out);
    cur.pop_back();
  }
}

std::string partition_label(const std::vector<int>& ascending) {
  std::ostringstream os;
  std::size_t i = 0;
  bool first = true;
  while (i < ascending.size()) {
    std::size_t j = i;
    while (j < ascending.size() && ascending[j] == ascending[i]) ++j;
    if (!first) os << ' ';
    first = false;
    os << ascending[i];
    if (j - i > 1) os << '^' << (j - i);
    i = j;
  }
  return os.str();
}

int as_int(const std::map<std::string, double>& params, const std::string& key) {
  const double v = params.at(key);
  require(std::isfinite(v) && v == std::round(v), ErrorKind::SchemaError,
          "parameter " + key + " must be an integer");
  return static_cast<int>(v);
}

}  // namespace

ContinuousChain bd_uniform(int n) {
  check_size(n >= 2, "bd_uniform requires N >= 2");
  Matrix l = Matrix::Zero(n, n);
  for (int x = 0; x + 1 < n; ++x) {
    l(x, x + 1) = 1.0;
    l(x + 1, x) = 1.0;
  }
  l(n - 1, n - 2) = 2.0;
  Vector v = Vector::Zero(n);
  v(0) = 1.0;
  return build_continuous(range_states(1, n), l, v);
}

ContinuousChain bd_biased(int n, double r) {
  check_size(n >= 2, "bd_biased requires N >= 2");
  require(std::isfinite(r) && r > 0.0 && r != 1.0, ErrorKind::InvalidArgument,
          "bd_biased requires r > 0, r != 1");
  Matrix l = Matrix::Zero(n, n);
  for (int x = 0; x + 1 < n; ++x) {
    l(x, x + 1) = r;
    l(x + 1, x) = 1.0;
  }
  l(n - 1, n - 2) = 1.0 + r;
  Vector v = Vector::Zero(n);
  v(0) = 1.0;
  return build_continuous(range_states(1, n), l, v);
}

ProbDist bd_biased_eta(int n, double r) {
  check_size(n >= 2, "bd_biased requires N >= 2");
  Vector w(n);
  for (int x = 0; x + 1 < n; ++x) w(x) = std::pow(r, x);
  w(n - 1) = w(n - 2) * r / (1.0 + r);
  return ProbDist::normalized(w);
}

ContinuousChain cycle_chain(int n) {
  check_size(n >= 3, "cycle requires N >= 3");
  Matrix l = Matrix::Zero(n, n);
  for (int x = 0; x < n; ++x) l(x, (x + 1) % n) = 1.0;
  Vector v = Vector::Zero(n);
  v(0) = 1.0;
  return build_continuous(range_states(0, n - 1), l, v);
}

std::vector<cplx> cycle_roots(int n) {
  check_size(n >= 1, "cycle_roots requires N >= 1");
  // Companion matrix of X^N + X^{N-1} - 1.
  Matrix comp = Matrix::Zero(n, n);
  for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
  comp(0, n - 1) += 1.0;
  comp(n - 1, n - 1) += -1.0;
  Eigen::EigenSolver<Matrix> es(comp, false);
  require(es.info() == Eigen::Success, ErrorKind::SolverDivergence,
          "companion eigensolver did not converge");
  std::vector<cplx> roots;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    cplx z = es.eigenvalues()(i);
    // Newton polish; the roots are simple.
    for (int it = 0; it < 3; ++it) {
      const cplx zn1 = std::pow(z, n - 1);
      const cplx f = zn1 * z + zn1 - 1.0;
      const cplx df = static_cast<double>(n) * zn1 +
                      (n > 1 ? static_cast<double>(n - 1) * std::pow(z, n - 2) : cplx(0.0));
      if (std::abs(df) == 0.0) break;
      z -= f / df;
    }
    roots.push_back(z);
  }
  std::sort(roots.begin(), roots.end(), [](const cplx& a, const cplx& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return roots;
}

double cycle_real_root(int n) {
  check_size(n >= 1, "cycle_real_root requires N >= 1");
  auto f = [n](double x) { return std::pow(x, n) + std::pow(x, n - 1) - 1.0; };
  double lo = 0.0;
  double hi = 1.0;
  for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

Eigen::VectorXcd cycle_eigenvector(int n, cplx c) {
  Eigen::VectorXcd v(n);
  v(0) = 1.0;
  for (int x = 1; x < n; ++x) v(x) = std::pow(c, x - n);
  return v;
}

ContinuousChain two_point() {
  Matrix l(2, 2);
  l << -1.0, 1.0, 1.0, -1.0;
  return build_continuous(range_states(1, 2), l, Vector::Ones(2));
}

ContinuousChain product_chain(const ContinuousChain& base, int d) {
  check_size(d >= 1, "product requires d >= 1");
  const std::size_t n = base.size();
  std::size_t total = 1;
  for (int k = 0; k < d; ++k) {
    require(total <= kProductMaxStates / n, ErrorKind::SizeGuard,
            "product state space exceeds " + std::to_string(kProductMaxStates) + " states");
    total *= n;
  }
  const auto big = static_cast<Eigen::Index>(total);
  // Coordinates with the first one most significant.
  std::vector<std::vector<std::size_t>> coords(total, std::vector<std::size_t>(static_cast<std::size_t>(d)));
  std::vector<std::string> labels(total);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rest = idx;
    for (int k = d - 1; k >= 0; --k) {
      coords[idx][static_cast<std::size_t>(k)] = rest % n;
      rest /= n;
    }
    std::string lab;
    for (int k = 0; k < d; ++k) {
      if (k > 0) lab += ',';
      lab += base.states().label(coords[idx][static_cast<std::size_t>(k)]);
    }
    labels[idx] = std::move(lab);
  }
  const double inv_d = 1.0 / static_cast<double>(d);
  Matrix l = Matrix::Zero(big, big);
  Vector v = Vector::Zero(big);
  std::size_t stride = 1;
  for (int k = d - 1; k >= 0; --k) {
    for (std::size_t idx = 0; idx < total; ++idx) {
      const std::size_t xk = coords[idx][static_cast<std::size_t>(k)];
      v(static_cast<Eigen::Index>(idx)) += inv_d * base.killing()(static_cast<Eigen::Index>(xk));
      for (std::size_t yk = 0; yk < n; ++yk) {
        if (yk == xk) continue;
        const std::size_t jdx = idx - xk * stride + yk * stride;
        l(static_cast<Eigen::Index>(idx), static_cast<Eigen::Index>(jdx)) +=
            inv_d * base.rates()(static_cast<Eigen::Index>(xk), static_cast<Eigen::Index>(yk));
      }
    }
    stride *= n;
  }
  return build_continuous(StateSpace(std::move(labels)), l, v);
}

PerronData product_perron(const PerronData& base, int d) {
  check_size(d >= 1, "product requires d >= 1");
  require(!base.discrete, ErrorKind::InvalidArgument, "product Perron data is continuous-time only");
  auto power = [d](const Vector& v) {
    Vector out = v;
    for (int k = 1; k < d; ++k) {
      Vector next(out.size() * v.size());
      for (Eigen::Index i = 0; i < out.size(); ++i) next.segment(i * v.size(), v.size()) = out(i) * v;
      out = std::move(next);
    }
    return out;
  };
  PerronData p;
  p.discrete = false;
  p.lambda1 = base.lambda1;
  p.phi = power(base.phi);
  p.phi_star = power(base.phi_star);
  p.eta = ProbDist::normalized(power(base.eta->weights()));
  p.nu = ProbDist::normalized(power(base.nu.weights()));
  return p;
}

Matrix RockBreaking::table() const {
  const auto n = static_cast<Eigen::Index>(numerators.size());
  Matrix t(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      t(i, j) = static_cast<double>(numerators[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) /
                static_cast<double>(denominator);
    }
  }
  return t;
}

std::int64_t partition_count(int n, int l) {
  if (n == 0 && l == 0) return 1;
  if (n <= 0 || l <= 0 || l > n) return 0;
  // p(n, l) = p(n-1, l-1) + p(n-l, l).
  return partition_count(n - 1, l - 1) + partition_count(n - l, l);
}

RockBreaking rock_breaking(int n) {
  require(n >= 2 && n <= 12, ErrorKind::SizeGuard, "rock_breaking requires 2 <= n <= 12");
  std::vector<std::vector<int>> desc;
  std::vector<int> cur;
  partitions_desc(n, n, cur, desc);
  std::reverse(desc.begin(), desc.end());
  RockBreaking rb;
  for (auto& p : desc) {
    std::sort(p.begin(), p.end());
    rb.partitions.push_back(p);
  }
  const std::size_t m = rb.partitions.size();
  std::map<std::vector<int>, std::size_t> index;
  for (std::size_t i = 0; i < m; ++i) index[rb.partitions[i]] = i;

  rb.denominator = std::int64_t{1} << n;
  rb.numerators.assign(m, std::vector<std::int64_t>(m, 0));
  for (std::size_t i = 0; i < m; ++i) {
    const std::vector<int>& parts = rb.partitions[i];
    std::vector<int> split(parts.size(), 0);
    // Odometer over the binomial split of every part.
    std::function<void(std::size_t, std::int64_t)> walk = [&](std::size_t k, std::int64_t weight) {
      if (k == parts.size()) {
        std::vector<int> next;
        for (std::size_t j = 0; j < parts.size(); ++j) {
          if (split[j] > 0) next.push_back(split[j]);
          if (parts[j] - split[j] > 0) next.push_back(parts[j] - split[j]);
        }
        std::sort(next.begin(), next.end());
        rb.numerators[i][index.at(next)] += weight;
        return;
      }
      for (int b = 0; b <= parts[k]; ++b) {
        split[k] = b;
        walk(k + 1, weight * binomial(parts[k], b));
      }
    };
    walk(0, 1);
  }

  // Transient block: everything except the absorbing 1^n at index 0.
  const auto t = static_cast<Eigen::Index>(m - 1);
  Matrix q(t, t);
  Vector a(t);
  std::vector<std::string> labels;
  const double denom = static_cast<double>(rb.denominator);
  for (Eigen::Index i = 0; i < t; ++i) {
    const auto& row = rb.numerators[static_cast<std::size_t>(i + 1)];
    a(i) = static_cast<double>(row[0]) / denom;
    for (Eigen::Index j = 0; j < t; ++j) q(i, j) = static_cast<double>(row[static_cast<std::size_t>(j + 1)]) / denom;
    labels.push_back(partition_label(rb.partitions[static_cast<std::size_t>(i + 1)]));
  }
  rb.chain = build_discrete(StateSpace(std::move(labels)), q, a);

  PerronData& p = rb.exact;
  p.discrete = true;
  p.beta = 0.5;
  p.lambda1 = 0.5;
  p.phi = Vector(t);
  p.psi = Vector::Zero(t);
  for (Eigen::Index i = 0; i < t; ++i) {
    std::int64_t s = 0;
    for (int part : rb.partitions[static_cast<std::size_t>(i + 1)]) s += binomial(part, 2);
    p.phi(i) = static_cast<double>(s);
  }
  // 1^{n-2} 2 is the first transient state in this ordering.
  p.psi(0) = 1.0;
  p.nu = ProbDist(p.psi);
  return rb;
}

DiscreteChain zhou_bd(int n, double p, double r, double s) {
  check_size(n >= 1, "zhou_bd requires N >= 1");
  require(p > 0.0 && p < 1.0, ErrorKind::InvalidArgument, "zhou_bd requires p in (0, 1)");
  require(r >= 0.0 && r <= 1.0 && s >= 0.0 && s <= 1.0, ErrorKind::InvalidArgument,
          "zhou_bd requires r, s in [0, 1]");
  const double q = 1.0 - p;
  Matrix sub = Matrix::Zero(n, n);
  Vector a = Vector::Zero(n);
  // Row 0 is (r, 1-r); the step to 1 leaves S when N = 1.
  sub(0, 0) = r;
  if (n > 1) {
    sub(0, 1) = 1.0 - r;
  } else {
    a(0) = 1.0 - r;
  }
  for (int x = 1; x < n; ++x) {
    sub(x, x - 1) = p;
    if (x + 1 < n) {
      sub(x, x + 1) = q;
    } else {
      a(x) = q;
    }
  }
  return build_discrete(range_states(0, n - 1), sub, a);
}

DiscreteChain intro_walk(int n) {
  check_size(n >= 2, "intro_walk requires N >= 2");
  Matrix sub = Matrix::Zero(n, n);
  Vector a = Vector::Zero(n);
  a(0) = 0.5;
  for (int x = 0; x < n; ++x) {
    if (x > 0) sub(x, x - 1) = 0.5;
    if (x + 1 < n) sub(x, x + 1) = 0.5;
  }
  sub(n - 1, n - 1) = 0.5;
  return build_discrete(range_states(1, n), sub, a);
}

std::vector<Lemma11Certificate> lemma11_certify(int n, double r, const std::vector<double>& spectrum) {
  const ContinuousChain chain = bd_biased(n, r);
  const Matrix m = chain.subgenerator();
  const double rpow_n1 = std::pow(r, 1 - n);
  const double rpow_nm1 = std::pow(r, -n - 1);
  std::vector<Lemma11Certificate> certs;
  for (double lambda : spectrum) {
    Lemma11Certificate c;
    c.lambda = lambda;
    const cplx b = r + 1.0 - lambda;
    const cplx root = std::sqrt(b * b - 4.0 * r);
    c.rho_plus = (b + root) / (2.0 * r);
    c.rho_minus = (b - root) / (2.0 * r);
    const cplx rho = c.rho_plus;
    c.psi_image = ((1.0 + r) * rho - 1.0 - r * rho * rho) / rho;

    const cplx x2n = std::pow(rho, 2 * n);
    const cplx terms[4] = {x2n * rho * rho, -x2n, rpow_n1 * rho * rho, cplx(-rpow_nm1)};
    cplx sum = 0.0;
    double mag = 0.0;
    for (const cplx& t : terms) {
      sum += t;
      mag += std::abs(t);
    }
    c.poly_residual = std::abs(sum) / mag;

    Eigen::VectorXcd phi(n);
    for (int x = 1; x <= n; ++x) phi(x - 1) = std::pow(c.rho_plus, x) - std::pow(c.rho_minus, x);
    const Eigen::VectorXcd defect = m.cast<cplx>() * phi + lambda * phi;
    c.residual = defect.cwiseAbs().maxCoeff() / phi.cwiseAbs().maxCoeff();

    const double scale = std::max(1.0, std::abs(lambda));
    if (!(std::abs(c.rho_plus * c.rho_minus - 1.0 / r) <= 1e-10 * std::max(1.0, 1.0 / r)) ||
        !(std::abs(c.psi_image - lambda) <= 1e-9 * scale) || !(c.poly_residual <= 1e-8) ||
        !(c.residual <= 1e-8)) {
      throw Error(ErrorKind::CertificationFailure,
                  "eigenvalue " + std::to_string(lambda) + " fails its certificate (residual " +
                      std::to_string(c.residual) + ", polynomial " + std::to_string(c.poly_residual) + ")");
    }
    certs.push_back(c);
  }
  return certs;
}

ZhouCertificate zhou_certify(int n, double p, double r, double s, double theta, double c) {
  check_size(n >= 1, "zhou_certify requires N >= 1");
  require(p > 0.0 && p < 1.0, ErrorKind::InvalidArgument, "zhou_certify requires p in (0, 1)");
  const double q = 1.0 - p;
  ZhouCertificate z;
  z.theta = theta;
  z.c = c;
  z.beta = 2.0 * std::sqrt(p * q) * std::cos(theta);
  Vector phi(n + 1);
  for (int x = 0; x <= n; ++x) phi(x) = std::pow(p / q, 0.5 * x) * std::cos(theta * x + c);
  const double scale = std::max(phi.cwiseAbs().maxCoeff(), 1e-300);
  z.boundary_defect_left = std::abs(r * phi(0) + (1.0 - r) * phi(1) - z.beta * phi(0)) / scale;
  z.boundary_defect_right = std::abs((1.0 - s) * phi(n - 1) + s * phi(n) - z.beta * phi(n)) / scale;
  for (int x = 1; x < n; ++x) {
    z.interior_defect = std::max(z.interior_defect,
                                 std::abs(q * phi(x + 1) + p * phi(x - 1) - z.beta * phi(x)) / scale);
  }
  if (!(z.boundary_defect_left <= 1e-9 && z.boundary_defect_right <= 1e-9 && z.interior_defect <= 1e-9)) {
    throw Error(ErrorKind::BoundaryDefect, "(theta, c) = (" + std::to_string(theta) + ", " +
                                               std::to_string(c) + ") violates the boundary equations");
  }
  return z;
}

const std::vector<std::string>& builtin_names() {
  static const std::vector<std::string> names = {"bd_uniform", "bd_biased",     "cycle",     "product",
                                                 "rock_breaking", "zhou_bd", "intro_walk"};
  return names;
}

std::map<std::string, double> builtin_defaults(const std::string& name) {
  if (name == "bd_uniform") return {{"N", 10}};
  if (name == "bd_biased") return {{"N", 10}, {"r", 2}};
  if (name == "cycle") return {{"N", 5}};
  if (name == "product") return {{"d", 2}};
  if (name == "rock_breaking") return {{"n", 4}};
  if (name == "zhou_bd") return {{"N", 5}, {"p", 0.5}, {"r", 0.5}, {"s", 1}};
  if (name == "intro_walk") return {{"N", 5}};
  throw Error(ErrorKind::SchemaError, "unknown builtin '" + name + "'");
}

AbsorbingChain make_builtin(const std::string& name, const std::map<std::string, double>& params) {
  std::map<std::string, double> full = builtin_defaults(name);
  for (const auto& [key, value] : params) {
    require(full.count(key) == 1, ErrorKind::SchemaError,
            "builtin '" + name + "' has no parameter '" + key + "'");
    full[key] = value;
  }
  if (name == "bd_uniform") return bd_uniform(as_int(full, "N"));
  if (name == "bd_biased") return bd_biased(as_int(full, "N"), full.at("r"));
  if (name == "cycle") return cycle_chain(as_int(full, "N"));
  if (name == "product") return product_chain(two_point(), as_int(full, "d"));
  if (name == "rock_breaking") return rock_breaking(as_int(full, "n")).chain;
  if (name == "zhou_bd") {
    return zhou_bd(as_int(full, "N"), full.at("p"), full.at("r"), full.at("s"));
  }
  return intro_walk(as_int(full, "N"));
}

}  // namespace qsd
