// Copyright 2026 The qthermo Authors
//
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

#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "qthermo/qcore.hpp"

namespace qthermo::openq {

// Qubit with levels -frequency (|0>) and +frequency (|1>), emission rate `emission` on
// sigma_minus and absorption rate `absorption` on sigma_plus. Heat is counted positive when it
// flows into the system, everywhere in this module.
struct ThermalQubitSpec {
  double frequency = 1.0;
  double emission = 1.0;
  double absorption = 0.5;
  std::function<Mat(double)> drive{};  // added to the bare hamiltonian

  void validate() const {
    require(frequency > 0, "thermal qubit: frequency must be positive");
    require(emission >= 0 && absorption >= 0, "thermal qubit: rates must be nonnegative");
    require(emission > 0 || absorption > 0, "thermal qubit: at least one rate must be positive");
  }

  Mat bare_hamiltonian() const {
    const double e[] = {-frequency, frequency};
    return diagonal(e);
  }

  Mat hamiltonian(double t) const { return drive ? (bare_hamiltonian() + drive(t)).eval() : bare_hamiltonian(); }

  // ln(emission / absorption) / (2 frequency); infinite when a rate vanishes
  double beta() const {
    if (absorption == 0) return std::numeric_limits<double>::infinity();
    if (emission == 0) return -std::numeric_limits<double>::infinity();
    return std::log(emission / absorption) / (2 * frequency);
  }

  bool finite_temperature() const { return emission > 0 && absorption > 0; }

  Lindbladian generator() const {
    const ThermalQubitSpec copy = *this;
    return Lindbladian([copy](double t) { return copy.hamiltonian(t); },
                       {{sigma_minus(), emission}, {sigma_plus(), absorption}});
  }
};

inline constexpr double kEntropyProductionFloor = -1e-9;

// tr[drho (log_ref - ln rho)], the rate of decrease of S(rho || ref) along drho. Directions
// leaving the kernel of rho give +infinity.
inline double relative_entropy_decrease_rate(const Mat& drho, const Mat& rho, const Mat& log_ref) {
  const auto es = eigh(0.5 * (rho + rho.adjoint()));
  const Mat rotated = es.vectors.adjoint() * drho * es.vectors;
  double rate = (drho * log_ref).trace().real();
  for (Eigen::Index i = 0; i < es.values.size(); ++i) {
    const double flow = rotated(i, i).real();
    if (es.values[i] > 1e-300) {
      rate -= flow * std::log(es.values[i]);
    } else if (flow > 1e-14) {
      return std::numeric_limits<double>::infinity();
    }
  }
  return rate;
}

inline Mat log_full_rank(const Mat& rho, const char* what) {
  const auto es = eigh(0.5 * (rho + rho.adjoint()));
  require(es.values.minCoeff() > 0, std::string(what) + " must be full rank");
  return es.vectors * es.values.array().log().matrix().cast<cplx>().asDiagonal() * es.vectors.adjoint();
}

inline constexpr double kInvariantResidualTol = 1e-8;

// tr[L(rho) (ln rho_bar - ln rho)] for an invariant state rho_bar of the generator at time t.
inline double spohn_rate(const Lindbladian& gen, const Mat& rho, const Mat& rho_bar, double t = 0.0) {
  require(max_abs(gen(t, rho_bar)) < kInvariantResidualTol, "spohn_rate: reference state is not invariant");
  return relative_entropy_decrease_rate(gen(t, rho), rho, log_full_rank(rho_bar, "spohn_rate: reference state"));
}

struct EpLedger {
  std::vector<double> times;
  std::vector<double> entropy;             // S(rho(t))
  std::vector<double> work;                // integral of tr[dH/dt rho]
  std::vector<double> heat;                // E(t) - E(0) - W(t), into the system
  std::vector<double> entropy_production;  // S(t) - S(0) - beta Q(t)
  std::vector<double> relative_entropy;    // S(rho(t) || rho_beta)
  std::vector<double> rate;                // -d/dt S(rho(t) || rho_beta)
  std::vector<double> spohn;               // Spohn rate against the instantaneous invariant state
  double beta = 0.0;
  bool finite_temperature = true;
};

struct QubitRun {
  LindbladPath path;
  EpLedger ledger;
};

inline int default_qubit_steps(const ThermalQubitSpec& s, double tau) {
  const double fastest = std::max({2 * s.frequency, s.emission, s.absorption});
  return std::max(200, static_cast<int>(std::ceil(tau * fastest * 100)));
}

inline QubitRun thermal_qubit_evolve(const ThermalQubitSpec& spec, const DensityState& rho0, double tau, int steps = 0) {
  spec.validate();
  require(rho0.dim() == 2, "thermal_qubit_evolve: initial state must be a qubit");
  require(tau > 0, "thermal_qubit_evolve: duration must be positive");
  if (steps <= 0) steps = default_qubit_steps(spec, tau);
  const auto gen = spec.generator();
  QubitRun run{lindblad_evolve(gen, rho0, tau, steps), {}};
  auto& led = run.ledger;
  led.beta = spec.beta();
  led.finite_temperature = spec.finite_temperature();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const Mat bare = spec.bare_hamiltonian();
  Mat log_gibbs;
  if (led.finite_temperature) {
    const auto g = gibbs_state(bare, led.beta);
    log_gibbs = -led.beta * bare - g.log_partition * identity(2);
  }
  const auto& ts = run.path.times;
  const double e0 = rho0.expectation(spec.hamiltonian(0.0));
  double w = 0.0, prev_power = 0.0;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    const double t = ts[k];
    const Mat& rho = run.path.states[k];
    double power = 0.0;
    if (spec.drive) {
      const double h = 1e-5 * std::max(1.0, tau);
      const double lo = std::max(0.0, t - h), hi = std::min(tau, t + h);
      power = (rho * (spec.hamiltonian(hi) - spec.hamiltonian(lo))).trace().real() / (hi - lo);
      if (k > 0) w += 0.5 * (power + prev_power) * (t - ts[k - 1]);
    }
    prev_power = power;
    const double s = von_neumann_entropy(rho);
    const double q = (rho * spec.hamiltonian(t)).trace().real() - e0 - w;
    led.times.push_back(t);
    led.entropy.push_back(s);
    led.work.push_back(w);
    led.heat.push_back(q);
    const Mat drho = gen(t, rho);
    if (led.finite_temperature) {
      led.entropy_production.push_back(s - led.entropy.front() - led.beta * q);
      led.relative_entropy.push_back(relative_entropy(rho, gibbs_state(bare, led.beta).state.matrix()));
      led.rate.push_back(relative_entropy_decrease_rate(drho, rho, log_gibbs));
      led.spohn.push_back(relative_entropy_decrease_rate(drho, rho, log_full_rank(stationary_state(gen, t).matrix(), "invariant state")));
      if (!spec.drive && (led.entropy_production.back() < kEntropyProductionFloor || led.spohn.back() < kEntropyProductionFloor)) {
        std::ostringstream msg;
        msg << "thermal_qubit_evolve: entropy production " << led.entropy_production.back() << " / rate "
            << led.spohn.back() << " negative at t=" << t;
        throw IntegrationFailure(msg.str());
      }
    } else {
      for (auto* v : {&led.entropy_production, &led.relative_entropy, &led.rate, &led.spohn}) v->push_back(nan);
    }
  }
  return run;
}

// ------------------------------------------------------------------ driven steady states

struct DrivenPath {
  std::function<Mat(double)> steady_state;  // rho_ss(lambda)
  std::function<Mat(double)> hamiltonian;   // H(lambda)
  double beta;
  double from;
  double to;
};

struct DrivenEntropy {
  double sigma;        // relative-entropy boundary terms plus the path integral
  double sigma_first_law;  // entropy change - beta energy change + beta work
  double work;
  int panels;
};

// ln of the Gibbs state, -beta H - ln Z
inline Mat log_gibbs(const Mat& h, double beta) { return -beta * h - gibbs_state(h, beta).log_partition * identity(h.rows()); }

// Centred difference with one Richardson step (h, h/2).
inline Mat richardson_derivative(const std::function<Mat(double)>& f, double x, double scale) {
  const double h = 1e-3 * std::max(1.0, scale);
  auto central = [&](double step) { return ((f(x + step) - f(x - step)) / (2 * step)).eval(); };
  return (4.0 * central(0.5 * h) - central(h)) / 3.0;
}

inline constexpr int kMaxDrivenPanels = 1024;

inline DrivenEntropy driven_entropy_production(const DrivenPath& path, double tol = 1e-8) {
  require(path.steady_state && path.hamiltonian, "driven_entropy_production: need steady-state and hamiltonian maps");
  require(std::isfinite(path.beta) && path.from != path.to, "driven_entropy_production: need finite beta and a nontrivial path");
  const double scale = std::max(std::abs(path.from), std::abs(path.to));
  auto log_eq = [&](double l) { return log_gibbs(path.hamiltonian(l), path.beta); };
  // integrands: tr[rho_ss d ln rho_eq] and tr[rho_ss dH]
  auto integrands = [&](double l) {
    const Mat rho = path.steady_state(l);
    return std::pair{(rho * richardson_derivative(log_eq, l, scale)).trace().real(),
                     (rho * richardson_derivative(path.hamiltonian, l, scale)).trace().real()};
  };
  using Rule = boost::math::quadrature::gauss<double, 10>;
  auto composite = [&](int panels) {
    double a = 0, b = 0;
    const double width = (path.to - path.from) / panels;
    for (int p = 0; p < panels; ++p) {
      const double lo = path.from + p * width, mid = lo + 0.5 * width;
      const auto& x = Rule::abscissa();
      const auto& w = Rule::weights();
      for (std::size_t i = 0; i < x.size(); ++i)
        for (double sign : {1.0, -1.0}) {
          if (x[i] == 0 && sign < 0) continue;
          const auto [fa, fb] = integrands(mid + sign * 0.5 * width * x[i]);
          a += 0.5 * width * w[i] * fa, b += 0.5 * width * w[i] * fb;
        }
    }
    return std::pair{a, b};
  };
  int panels = 1;
  auto prev = composite(panels);
  for (;;) {
    panels *= 2;
    const auto next = composite(panels);
    const bool done = std::abs(next.first - prev.first) <= tol * std::max(1.0, std::abs(next.first)) &&
                      std::abs(next.second - prev.second) <= tol * std::max(1.0, std::abs(next.second));
    if (done) {
      prev = next;
      break;
    }
    if (panels >= kMaxDrivenPanels) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "driven_entropy_production: quadrature did not converge; last estimates " << prev.first << ", "
          << next.first;
      throw IntegrationFailure(msg.str());
    }
    prev = next;
  }
  const Mat rho0 = path.steady_state(path.from), rho1 = path.steady_state(path.to);
  const Mat h0 = path.hamiltonian(path.from), h1 = path.hamiltonian(path.to);
  DrivenEntropy r;
  r.panels = panels;
  r.work = prev.second;
  r.sigma = relative_entropy(rho0, gibbs_state(h0, path.beta).state.matrix()) -
            relative_entropy(rho1, gibbs_state(h1, path.beta).state.matrix()) - prev.first;
  const double de = (rho1 * h1).trace().real() - (rho0 * h0).trace().real();
  r.sigma_first_law = von_neumann_entropy(rho1) - von_neumann_entropy(rho0) - path.beta * de + path.beta * r.work;
  return r;
}

// ------------------------------------------------------------------ entropy production as correlation

struct EnvironmentUnit {
  Mat hamiltonian;
  double beta;
};

struct CorrelationModel {
  Mat system_hamiltonian;
  std::vector<EnvironmentUnit> units;
  Mat interaction;  // on the full system + environment space, system factor first
  Mat system_initial;
};

struct CorrelationReport {
  double system_entropy_change;
  double irreversible;          // S(rho(t) || rho_S(t) x rho_E(0))
  double reversible;            // sum_i beta_i Q_i
  double mutual_information;    // I(S : E) at time t
  double environment_relative_entropy;  // S(rho_E(t) || rho_E(0))
  double environment_entropy_change;
  std::vector<double> unit_heat;        // heat into the system from each unit
  double identity_residual;     // system change - irreversible - reversible
  double environment_drift;     // max |rho_E(t) - rho_E(0)|
};

inline constexpr Eigen::Index kDefaultJointCap = 1 << 10;

inline CorrelationReport ep_as_correlation(const CorrelationModel& m, double tau, Eigen::Index cap = kDefaultJointCap) {
  const Eigen::Index ds = m.system_hamiltonian.rows();
  require(ds >= 1 && !m.units.empty(), "ep_as_correlation: need a system and at least one environment unit");
  std::vector<int> dims{static_cast<int>(ds)};
  Eigen::Index total = ds;
  for (const auto& u : m.units) {
    require(std::isfinite(u.beta), "ep_as_correlation: unit temperatures must be finite");
    dims.push_back(static_cast<int>(u.hamiltonian.rows()));
    total *= u.hamiltonian.rows();
    if (total > cap) throw CapExceeded("ep_as_correlation: joint dimension exceeds the cap of " + std::to_string(cap));
  }
  require(m.interaction.rows() == total && m.interaction.cols() == total, "ep_as_correlation: interaction has the wrong dimension");
  require(m.system_initial.rows() == ds, "ep_as_correlation: initial system state has the wrong dimension");
  // H_T = H_S + sum_i H_i + H_I on S x E_1 x ... x E_n
  auto place = [&](const Mat& local, std::size_t slot) {
    Eigen::Index before = 1, after = 1;
    for (std::size_t k = 0; k < slot; ++k) before *= dims[k];
    for (std::size_t k = slot + 1; k < dims.size(); ++k) after *= dims[k];
    return kron(kron(identity(before), local), identity(after));
  };
  Mat ht = place(m.system_hamiltonian, 0) + m.interaction;
  std::vector<Mat> unit_states;
  Mat env0 = identity(1);
  for (std::size_t i = 0; i < m.units.size(); ++i) {
    ht += place(m.units[i].hamiltonian, i + 1);
    unit_states.push_back(gibbs_state(m.units[i].hamiltonian, m.units[i].beta).state.matrix());
    env0 = kron(env0, unit_states.back());
  }
  const DensityState rho_s0(m.system_initial);
  const Mat u = expm_hermitian(ht, -kI * tau);
  const Mat rho_t = u * kron(rho_s0.matrix(), env0) * u.adjoint();
  std::vector<int> env_slots(m.units.size());
  std::iota(env_slots.begin(), env_slots.end(), 1);
  const int sys_slot[] = {0};
  const Mat rho_s = partial_trace(rho_t, dims, sys_slot);
  const Mat rho_e = partial_trace(rho_t, dims, env_slots);
  CorrelationReport r;
  const double s_s0 = von_neumann_entropy(rho_s0.matrix()), s_st = von_neumann_entropy(rho_s);
  const double s_e0 = von_neumann_entropy(env0), s_et = von_neumann_entropy(rho_e), s_t = von_neumann_entropy(rho_t);
  r.system_entropy_change = s_st - s_s0;
  r.environment_entropy_change = s_et - s_e0;
  r.mutual_information = s_st + s_et - s_t;
  r.irreversible = relative_entropy(rho_t, kron(rho_s, env0));
  r.environment_relative_entropy = relative_entropy(rho_e, env0);
  r.reversible = 0;
  for (std::size_t i = 0; i < m.units.size(); ++i) {
    const int slot[] = {static_cast<int>(i + 1)};
    const Mat unit_t = partial_trace(rho_t, dims, slot);
    const double q = -((unit_t - unit_states[i]) * m.units[i].hamiltonian).trace().real();
    r.unit_heat.push_back(q);
    r.reversible += m.units[i].beta * q;
  }
  r.identity_residual = r.system_entropy_change - r.irreversible - r.reversible;
  r.environment_drift = max_abs(rho_e - env0);
  return r;
}

// g sum_k SWAP(system, unit k) for a qubit system and qubit units.
inline Mat partial_swap_interaction(int units, double coupling) {
  require(units >= 1, "partial_swap_interaction: need at least one unit");
  const int n = units + 1;
  Mat h = Mat::Zero(Eigen::Index{1} << n, Eigen::Index{1} << n);
  for (int k = 1; k < n; ++k)
    for (const Mat& p : {pauli_x(), pauli_y(), pauli_z()}) h += 0.5 * coupling * embed(p, 0, n) * embed(p, k, n);
  return h + 0.5 * coupling * units * identity(h.rows());
}

}  // namespace qthermo::openq
