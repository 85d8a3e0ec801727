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

#include "qsd/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

#include "qsd/error.hpp"
#include "qsd/evolution.hpp"

namespace qsd {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Rng {
  std::mt19937_64 engine;

  Rng(std::uint64_t seed, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    engine.seed(seq);
  }

  // Open interval (0, 1); fixed bit recipe so results do not depend on the
  // standard library's distribution implementations.
  double uniform() { return (static_cast<double>(engine() >> 11) + 0.5) * 0x1p-53; }
  double exponential(double rate) { return -std::log(uniform()) / rate; }
};

// Per-state jump table: cumulative weights and destinations. Destination n is
// the cemetery.
struct JumpTable {
  std::vector<std::vector<double>> cum;
  std::vector<std::vector<std::size_t>> to;
  std::vector<double> total;
  Vector cost;  // V for continuous chains, a for discrete ones

  std::size_t pick(std::size_t x, double u) const {
    const auto& c = cum[x];
    const double target = u * total[x];
    const auto it = std::upper_bound(c.begin(), c.end(), target);
    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(it - c.begin()), c.size() - 1);
    return to[x][k];
  }
};

JumpTable make_table(const AbsorbingChain& chain, bool killed) {
  JumpTable t;
  const bool cont = is_continuous(chain);
  const std::size_t n = cont ? std::get<ContinuousChain>(chain).size() : std::get<DiscreteChain>(chain).size();
  const Matrix& m = cont ? std::get<ContinuousChain>(chain).rates() : std::get<DiscreteChain>(chain).sub();
  t.cost = cont ? std::get<ContinuousChain>(chain).killing() : std::get<DiscreteChain>(chain).absorb();
  t.cum.resize(n);
  t.to.resize(n);
  t.total.assign(n, 0.0);
  for (std::size_t x = 0; x < n; ++x) {
    double acc = 0.0;
    for (std::size_t y = 0; y < n; ++y) {
      if (cont && y == x) continue;
      const double w = m(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y));
      if (w <= 0.0) continue;
      acc += w;
      t.cum[x].push_back(acc);
      t.to[x].push_back(y);
    }
    if (killed && t.cost(static_cast<Eigen::Index>(x)) > 0.0) {
      acc += t.cost(static_cast<Eigen::Index>(x));
      t.cum[x].push_back(acc);
      t.to[x].push_back(n);
    }
    t.total[x] = acc;
  }
  return t;
}

std::vector<double> cumulative(const ProbDist& m0) {
  std::vector<double> c(m0.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < m0.size(); ++i) c[i] = (acc += m0[i]);
  return c;
}

std::size_t draw_initial(const std::vector<double>& cum, double u) {
  const double target = u * cum.back();
  const auto it = std::upper_bound(cum.begin(), cum.end(), target);
  return std::min<std::size_t>(static_cast<std::size_t>(it - cum.begin()), cum.size() - 1);
}

struct Path {
  double tau = kInf;
  std::size_t terminal = 0;
  double weight = 1.0;
};

Path run_continuous(const JumpTable& tab, std::size_t x, double horizon, Rng& rng, std::size_t n) {
  Path p;
  double t = 0.0;
  double log_w = 0.0;
  while (true) {
    const double v = tab.cost(static_cast<Eigen::Index>(x));
    const double rate = tab.total[x];
    const double hold = rate > 0.0 ? rng.exponential(rate) : kInf;
    if (t + hold >= horizon) {
      log_w -= v * (horizon - t);
      p.terminal = x;
      break;
    }
    log_w -= v * hold;
    t += hold;
    const std::size_t y = tab.pick(x, rng.uniform());
    if (y == n) {
      p.tau = t;
      p.terminal = n;
      break;
    }
    x = y;
  }
  p.weight = std::exp(log_w);
  return p;
}

// killed: the cemetery is a destination. Otherwise each step moves with the
// renormalized row and multiplies the weight by its mass.
Path run_discrete(const JumpTable& tab, std::size_t x, long steps, Rng& rng, std::size_t n, bool killed) {
  Path p;
  for (long k = 0; k < steps; ++k) {
    const double a = tab.cost(static_cast<Eigen::Index>(x));
    p.weight *= killed ? (1.0 - a) : tab.total[x];
    if (tab.total[x] <= 0.0) {
      if (killed) {
        p.tau = static_cast<double>(k + 1);
        p.terminal = n;
        return p;
      }
      continue;  // zero weight from here on; the state is irrelevant
    }
    const std::size_t y = tab.pick(x, rng.uniform());
    if (y == n) {
      p.tau = static_cast<double>(k + 1);
      p.terminal = n;
      return p;
    }
    x = y;
  }
  p.terminal = x;
  return p;
}

long whole_steps(double horizon) {
  require(std::floor(horizon) == horizon, ErrorKind::FractionalTime, "discrete horizon must be a whole number");
  return static_cast<long>(horizon);
}

AbsorptionSample run(const AbsorbingChain& chain, const ProbDist& m0, const SimConfig& cfg, bool killed) {
  require(cfg.n_traj >= 1, ErrorKind::InvalidArgument, "n_traj must be >= 1");
  require(cfg.horizon >= 0.0, ErrorKind::NegativeTime, "horizon must be nonnegative");
  const auto states = states_of(chain);
  const std::size_t n = states.size();
  require(m0.size() == n, ErrorKind::DimensionMismatch, "initial law has the wrong length");
  const bool cont = is_continuous(chain);
  const long steps = cont ? 0 : whole_steps(cfg.horizon);
  const JumpTable tab = make_table(chain, killed);
  const std::vector<double> init = cumulative(m0);

  AbsorptionSample s;
  s.horizon = cfg.horizon;
  s.n_states = n;
  s.tau.resize(cfg.n_traj);
  s.terminal.resize(cfg.n_traj);
  s.weight.resize(cfg.n_traj);

  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      Rng rng(cfg.seed, i);
      const std::size_t x0 = draw_initial(init, rng.uniform());
      const Path p = cont ? run_continuous(tab, x0, cfg.horizon, rng, n) : run_discrete(tab, x0, steps, rng, n, killed);
      s.tau[i] = p.tau;
      s.terminal[i] = p.terminal;
      s.weight[i] = p.weight;
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(cfg.threads, static_cast<unsigned>(cfg.n_traj)));
  if (threads == 1) {
    work(0, cfg.n_traj);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (cfg.n_traj + threads - 1) / threads;
    for (unsigned k = 0; k < threads; ++k) {
      const std::size_t b = k * chunk;
      const std::size_t e = std::min(cfg.n_traj, b + chunk);
      if (b < e) pool.emplace_back(work, b, e);
    }
    for (auto& th : pool) th.join();
  }
  return s;
}

}  // namespace

std::size_t AbsorptionSample::survivors() const {
  return static_cast<std::size_t>(std::count_if(terminal.begin(), terminal.end(), [&](std::size_t x) { return x < n_states; }));
}

double AbsorptionSample::survival(double t) const {
  if (tau.empty()) return 0.0;
  const auto alive = std::count_if(tau.begin(), tau.end(), [&](double s) { return s > t; });
  return static_cast<double>(alive) / static_cast<double>(tau.size());
}

AbsorptionSample simulate(const AbsorbingChain& chain, const ProbDist& m0, const SimConfig& cfg) {
  return run(chain, m0, cfg, true);
}

ConditionedEstimate estimate_conditioned(const AbsorbingChain& chain, const ProbDist& mu0, double t,
                                         const SimConfig& cfg) {
  double exact_survival = 0.0;
  try {
    exact_survival = conditioned_law(chain, mu0, t).survival;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::TotalMassUnderflow) throw;
  }
  const double expected = static_cast<double>(cfg.n_traj) * exact_survival;
  require(expected >= 100.0, ErrorKind::TooFewSurvivors,
          "expected survivor count " + std::to_string(expected) + " is below 100");
  SimConfig c = cfg;
  c.horizon = t;
  const AbsorptionSample s = simulate(chain, mu0, c);
  const std::size_t n = s.n_states;
  Vector counts = Vector::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t x : s.terminal) {
    if (x < n) counts(static_cast<Eigen::Index>(x)) += 1.0;
  }
  const double alive = counts.sum();
  require(alive > 0.0, ErrorKind::TooFewSurvivors, "no trajectory survived");
  ConditionedEstimate out;
  const Vector p = counts / alive;
  out.law = ProbDist::normalized(p);
  out.std_error = (p.array() * (1.0 - p.array()) / alive).sqrt().matrix();
  out.survivors = static_cast<std::size_t>(alive);
  out.survival = alive / static_cast<double>(s.tau.size());
  return out;
}

FeynmanKacLaw feynman_kac_law(const AbsorbingChain& chain, const ProbDist& mu0, double t, const SimConfig& cfg) {
  SimConfig c = cfg;
  c.horizon = t;
  const AbsorptionSample s = run(chain, mu0, c, false);
  const std::size_t n = s.n_states;
  const double m = static_cast<double>(s.weight.size());
  double wbar = 0.0;
  Vector num = Vector::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < s.weight.size(); ++i) {
    wbar += s.weight[i];
    num(static_cast<Eigen::Index>(s.terminal[i])) += s.weight[i];
  }
  wbar /= m;
  num /= m;
  require(wbar > 0.0, ErrorKind::TooFewSurvivors, "all Feynman-Kac weights vanished");

  FeynmanKacLaw out;
  out.value = num / wbar;
  out.denominator = wbar;
  // Delta method: Var(R) ~ Var(w (f - R)) / (m wbar^2).
  Vector resid2 = Vector::Zero(static_cast<Eigen::Index>(n));
  double wvar = 0.0;
  for (std::size_t i = 0; i < s.weight.size(); ++i) {
    const double w = s.weight[i];
    wvar += (w - wbar) * (w - wbar);
    for (std::size_t x = 0; x < n; ++x) {
      const double f = s.terminal[i] == x ? 1.0 : 0.0;
      const double d = w * (f - out.value(static_cast<Eigen::Index>(x)));
      resid2(static_cast<Eigen::Index>(x)) += d * d;
    }
  }
  const double dof = std::max(1.0, m - 1.0);
  out.std_error = (resid2.array() / dof / m).sqrt().matrix() / wbar;
  out.denominator_se = std::sqrt(wvar / dof / m);
  return out;
}

FeynmanKacEstimate feynman_kac(const AbsorbingChain& chain, const ProbDist& mu0, double t, const Vector& f,
                               const SimConfig& cfg) {
  SimConfig c = cfg;
  c.horizon = t;
  const AbsorptionSample s = run(chain, mu0, c, false);
  require(f.size() == static_cast<Eigen::Index>(s.n_states), ErrorKind::DimensionMismatch,
          "test function has the wrong length");
  const double m = static_cast<double>(s.weight.size());
  double wbar = 0.0;
  double fw = 0.0;
  for (std::size_t i = 0; i < s.weight.size(); ++i) {
    wbar += s.weight[i];
    fw += s.weight[i] * f(static_cast<Eigen::Index>(s.terminal[i]));
  }
  wbar /= m;
  fw /= m;
  require(wbar > 0.0, ErrorKind::TooFewSurvivors, "all Feynman-Kac weights vanished");
  FeynmanKacEstimate out;
  out.value = fw / wbar;
  out.denominator = wbar;
  double r2 = 0.0;
  double wvar = 0.0;
  for (std::size_t i = 0; i < s.weight.size(); ++i) {
    const double w = s.weight[i];
    const double d = w * (f(static_cast<Eigen::Index>(s.terminal[i])) - out.value);
    r2 += d * d;
    wvar += (w - wbar) * (w - wbar);
  }
  const double dof = std::max(1.0, m - 1.0);
  out.std_error = std::sqrt(r2 / dof / m) / wbar;
  out.denominator_se = std::sqrt(wvar / dof / m);
  return out;
}

KsResult ks_exponential(const AbsorptionSample& sample, double rate) {
  require(rate > 0.0, ErrorKind::InvalidArgument, "exponential rate must be positive");
  std::vector<double> tau = sample.tau;
  std::sort(tau.begin(), tau.end());
  const double n = static_cast<double>(tau.size());
  double d = 0.0;
  for (std::size_t i = 0; i < tau.size() && std::isfinite(tau[i]); ++i) {
    const double cdf = -std::expm1(-rate * tau[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - cdf, cdf - static_cast<double>(i) / n});
  }
  // Censored mass: the empirical CDF stays flat up to the horizon.
  const auto finite = static_cast<double>(std::count_if(tau.begin(), tau.end(), [](double x) { return std::isfinite(x); }));
  if (finite < n && std::isfinite(sample.horizon)) {
    d = std::max(d, -std::expm1(-rate * sample.horizon) - finite / n);
  }
  KsResult out;
  out.statistic = d;
  out.n = tau.size();
  out.critical = 1.628 / std::sqrt(n);
  out.passed = d < out.critical;
  return out;
}

double survival_log_slope(const AbsorptionSample& sample, double t0, double t1, int points) {
  require(points >= 2 && t1 > t0, ErrorKind::InvalidArgument, "need at least two distinct fit times");
  double sx = 0, sy = 0, sxx = 0, sxy = 0, k = 0;
  for (int i = 0; i < points; ++i) {
    const double t = t0 + (t1 - t0) * i / (points - 1);
    const double s = sample.survival(t);
    require(s > 0.0, ErrorKind::TooFewSurvivors, "empirical survival vanished inside the fit window");
    const double y = std::log(s);
    sx += t;
    sy += y;
    sxx += t * t;
    sxy += t * y;
    k += 1;
  }
  return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

}  // namespace qsd
