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

#include "qsd/evolution.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>
#include <json.hpp>

#include "qsd/error.hpp"

namespace qsd {
namespace {

const double kLogTiny = std::log(1e-300);

void check_time(double t) {
  require(std::isfinite(t) && t >= 0.0, ErrorKind::NegativeTime, "time must be finite and nonnegative");
}

long long integer_steps(double t) {
  check_time(t);
  require(t == std::floor(t), ErrorKind::FractionalTime, "discrete chains take integer step counts");
  return static_cast<long long>(t);
}

Matrix matrix_power(const Matrix& m, long long steps) {
  Matrix result = Matrix::Identity(m.rows(), m.cols());
  Matrix base = m;
  while (steps > 0) {
    if (steps & 1) result = result * base;
    steps >>= 1;
    if (steps > 0) base = base * base;
  }
  return result;
}

// Nonnegative-clipped normalization; roundoff can leave -1e-17 entries.
ProbDist clipped(const Vector& v) { return ProbDist::normalized(v.cwiseMax(0.0)); }

std::optional<Vector> detailed_balance_weights(const Matrix& g, const Vector& w) {
  const double tol = 1e-10 * std::max(1.0, g.cwiseAbs().maxCoeff());
  for (Eigen::Index x = 0; x < g.rows(); ++x) {
    if (!(w(x) > 0.0)) return std::nullopt;
    for (Eigen::Index y = x + 1; y < g.cols(); ++y) {
      if (std::abs(w(x) * g(x, y) - w(y) * g(y, x)) > tol) return std::nullopt;
    }
  }
  return w;
}

}  // namespace

Matrix expm_pade(const Matrix& a) { return a.exp(); }

Matrix expm(const Matrix& generator, double t, const std::optional<Vector>& weights) {
  check_time(t);
  if (!weights) return expm_pade(t * generator);
  const Vector d = weights->cwiseSqrt();
  Matrix s = d.asDiagonal() * generator * d.cwiseInverse().asDiagonal();
  s = 0.5 * (s + s.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(s);
  require(es.info() == Eigen::Success, ErrorKind::SolverDivergence, "symmetric eigensolver did not converge");
  const Vector e = (t * es.eigenvalues()).array().exp().matrix();
  const Matrix& u = es.eigenvectors();
  return d.cwiseInverse().asDiagonal() * (u * e.asDiagonal() * u.transpose()) * d.asDiagonal();
}

Evolver::Evolver(AbsorbingChain chain, std::optional<PerronData> perron_data) : chain_(std::move(chain)) {
  if (const auto* c = std::get_if<ContinuousChain>(&chain_)) {
    const PerronData p = perron_data ? *perron_data : perron(*c);
    lambda1_ = p.lambda1;
    sub_ = c->subgenerator();
    sub_.diagonal().array() += lambda1_;
    if (check_reversible(*c, *p.eta)) reversing_ = p.eta->weights();
    return;
  }
  const auto& dc = std::get<DiscreteChain>(chain_);
  double beta = 1.0;
  if (perron_data) {
    beta = *perron_data->beta;
  } else {
    try {
      beta = *perron(dc).beta;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::PerronFailure && e.kind() != ErrorKind::SolverDivergence) throw;
    }
  }
  require(beta > 0.0, ErrorKind::PerronFailure, "Perron root of Q must be positive");
  lambda1_ = 1.0 - beta;
  log_beta_ = std::log(beta);
  sub_ = dc.sub() / beta;
  if (auto q = reversing_measure(dc.sub())) reversing_ = q->weights();
}

Matrix Evolver::shifted(double t) const {
  if (discrete()) return matrix_power(sub_, integer_steps(t));
  return expm(sub_, t, reversing_);
}

ConditionedLaw Evolver::finish(const Vector& row, double t) const {
  const double mass = row.cwiseMax(0.0).sum();
  const double drift = discrete() ? t * log_beta_ : -lambda1_ * t;
  const double log_surv = drift + std::log(mass);
  if (!(mass > 0.0) || !(log_surv >= kLogTiny)) {
    throw Error(ErrorKind::TotalMassUnderflow, "survival probability below 1e-300 at t = " + std::to_string(t));
  }
  ConditionedLaw out;
  out.law = clipped(row);
  out.log_survival = log_surv;
  out.survival = std::exp(log_surv);
  return out;
}

ConditionedLaw Evolver::conditioned(const ProbDist& mu0, double t) const {
  require(mu0.size() == static_cast<std::size_t>(sub_.rows()), ErrorKind::DimensionMismatch,
          "initial law has the wrong length");
  if (t == 0.0) return {mu0, 1.0, 0.0};
  const Vector row = shifted(t).transpose() * mu0.weights();
  return finish(row, t);
}

std::vector<ConditionedLaw> Evolver::from_diracs(double t) const {
  const Matrix m = shifted(t);
  std::vector<ConditionedLaw> out;
  out.reserve(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index x = 0; x < m.rows(); ++x) out.push_back(finish(m.row(x).transpose(), t));
  return out;
}

ConditionedLaw conditioned_law(const AbsorbingChain& chain, const ProbDist& mu0, double t) {
  return Evolver(chain).conditioned(mu0, t);
}

ProbDist doob_initial(const PerronData& p, const ProbDist& mu0) {
  return ProbDist::normalized(p.phi.cwiseProduct(mu0.weights()));
}

ProbDist doob_law(const DoobChain& d, const ProbDist& mu_tilde0, double t) {
  Matrix m;
  if (d.discrete) {
    m = matrix_power(d.generator, integer_steps(t));
  } else {
    m = expm(d.generator, t, detailed_balance_weights(d.generator, d.invariant.weights()));
  }
  return clipped(m.transpose() * mu_tilde0.weights());
}

double tv_distance(const ProbDist& a, const ProbDist& b) {
  require(a.size() == b.size(), ErrorKind::DimensionMismatch, "laws have different lengths");
  return (a.weights() - b.weights()).cwiseAbs().sum();
}

Distances distances(const ProbDist& mu, const ProbDist& ref) {
  require(mu.size() == ref.size(), ErrorKind::DimensionMismatch, "laws have different lengths");
  Distances out;
  for (std::size_t x = 0; x < ref.size(); ++x) {
    require(ref[x] > 0.0, ErrorKind::ReferenceZero, "reference law vanishes at a state");
    const double f = mu[x] / ref[x];
    out.tv += std::abs(mu[x] - ref[x]);
    out.chi2 += (f - 1.0) * (f - 1.0) * ref[x];
    if (f > 0.0) out.kl += f * std::log(f) * ref[x];
  }
  out.kl = std::max(out.kl, 0.0);
  return out;
}

WorstCase worst_case_tv(const Evolver& ev, const ProbDist& nu, double t) {
  WorstCase w;
  w.tv = -1.0;
  if (t == 0.0) {
    for (std::size_t x = 0; x < nu.size(); ++x) {
      const double tv = tv_distance(ProbDist::dirac(nu.size(), x), nu);
      if (tv > w.tv) w = {tv, x};
    }
    return w;
  }
  const auto laws = ev.from_diracs(t);
  for (std::size_t x = 0; x < laws.size(); ++x) {
    const double tv = tv_distance(laws[x].law, nu);
    if (tv > w.tv) w = {tv, x};
  }
  return w;
}

std::vector<double> survival_curve(const Evolver& ev, const ProbDist& m0, const std::vector<double>& times) {
  std::vector<double> out;
  out.reserve(times.size());
  for (double t : times) out.push_back(ev.conditioned(m0, t).survival);
  return out;
}

EvolutionReport evolve(const Evolver& ev, const PerronData& p, const DoobChain& d, const ProbDist& mu0,
                       const std::vector<double>& times) {
  EvolutionReport rep;
  rep.states = states_of(ev.chain()).labels();
  const bool nu_positive = p.nu.min() > 0.0;
  const bool eta_positive = d.invariant.min() > 0.0;
  const ProbDist mu_tilde0 = doob_initial(p, mu0);
  for (double t : times) {
    const ConditionedLaw c = ev.conditioned(mu0, t);
    EvolutionRow row;
    row.t = t;
    row.mu = c.law;
    row.survival = c.survival;
    row.log_survival = c.log_survival;
    row.tv = tv_distance(c.law, p.nu);
    if (nu_positive) {
      const Distances dist = distances(c.law, p.nu);
      row.i_t = dist.chi2;
      row.j_t = dist.kl;
    }
    const ProbDist mt = doob_law(d, mu_tilde0, t);
    row.tv_tilde = tv_distance(mt, d.invariant);
    if (eta_positive) {
      const Distances dist = distances(mt, d.invariant);
      row.i_tilde = dist.chi2;
      row.j_tilde = dist.kl;
    }
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

std::string EvolutionReport::to_csv() const {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "t,survival,log_survival,tv,tv_tilde,I_t,I_tilde,J_t,J_tilde";
  for (const auto& s : states) os << ",\"mu[" << s << "]\"";
  os << "\r\n";
  auto opt = [&](const std::optional<double>& v) {
    os << ',';
    if (v) os << *v;
  };
  for (const auto& r : rows) {
    os << r.t << ',' << r.survival << ',' << r.log_survival << ',' << r.tv << ',' << r.tv_tilde;
    opt(r.i_t);
    opt(r.i_tilde);
    opt(r.j_t);
    opt(r.j_tilde);
    for (std::size_t x = 0; x < r.mu.size(); ++x) os << ',' << r.mu[x];
    os << "\r\n";
  }
  return os.str();
}

std::string EvolutionReport::to_json() const {
  nlohmann::json j;
  j["states"] = states;
  j["rows"] = nlohmann::json::array();
  auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  for (const auto& r : rows) {
    std::vector<double> mu(r.mu.weights().data(), r.mu.weights().data() + r.mu.weights().size());
    j["rows"].push_back({{"t", r.t},
                         {"survival", r.survival},
                         {"log_survival", r.log_survival},
                         {"tv", r.tv},
                         {"tv_tilde", r.tv_tilde},
                         {"I_t", opt(r.i_t)},
                         {"I_tilde", opt(r.i_tilde)},
                         {"J_t", opt(r.j_t)},
                         {"J_tilde", opt(r.j_tilde)},
                         {"mu", mu}});
  }
  return j.dump(2);
}

std::vector<double> time_grid(double tmin, double tmax, std::size_t count, bool log_scale) {
  require(count >= 1, ErrorKind::InvalidArgument, "grid needs at least one point");
  require(std::isfinite(tmin) && std::isfinite(tmax) && tmin >= 0.0 && tmax >= tmin,
          ErrorKind::InvalidArgument, "grid requires 0 <= tmin <= tmax");
  require(!log_scale || tmin > 0.0, ErrorKind::InvalidArgument, "log grid requires tmin > 0");
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = tmin;
    return out;
  }
  for (std::size_t i = 0; i < count; ++i) {
    const double s = static_cast<double>(i) / static_cast<double>(count - 1);
    out[i] = log_scale ? std::exp(std::log(tmin) + s * (std::log(tmax) - std::log(tmin)))
                       : tmin + s * (tmax - tmin);
  }
  out.front() = tmin;
  out.back() = tmax;
  return out;
}

}  // namespace qsd
