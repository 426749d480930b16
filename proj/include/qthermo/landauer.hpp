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

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "qthermo/qcore.hpp"

namespace qthermo::landauer {

// System S erased by a joint unitary with an environment E (system factor first). The two
// optional states let a caller describe a start that must be checked against the factorized
// thermal form rather than assumed.
struct ErasureModel {
  Mat system_initial;
  Mat environment_hamiltonian;
  double beta = 1.0;
  std::function<Mat(double)> evolution;      // U(t) on S x E
  std::optional<Mat> joint_initial{};        // must equal rho_S x rho_beta when given
  std::optional<Mat> environment_initial{};  // must equal rho_beta when given

  Eigen::Index system_dim() const { return system_initial.rows(); }
  Eigen::Index environment_dim() const { return environment_hamiltonian.rows(); }
  Mat thermal_environment() const { return gibbs_state(environment_hamiltonian, beta).state.matrix(); }
  Mat initial_state() const { return kron(system_initial, thermal_environment()); }
};

// U(t) = exp(-i H t) for a time-independent total hamiltonian.
inline std::function<Mat(double)> hamiltonian_evolution(Mat total) {
  require(is_hermitian(total), "hamiltonian_evolution: total hamiltonian must be hermitian");
  const auto es = eigh(total);
  return [es](double t) {
    const Vec phase = (-kI * t * es.values.cast<cplx>()).array().exp();
    return (es.vectors * phase.asDiagonal() * es.vectors.adjoint()).eval();
  };
}

inline constexpr double kAssumptionTol = 1e-10;

// Throws InvalidInput naming the first violated erasure assumption.
inline Mat checked_unitary(const ErasureModel& m, double t) {
  require(m.system_dim() >= 1 && m.environment_dim() >= 1, "erasure model: empty system or environment");
  if (!is_hermitian(m.environment_hamiltonian))
    throw InvalidInput("erasure model violates assumption (separate quantum systems): environment hamiltonian is not hermitian");
  require(std::isfinite(m.beta) && m.beta > 0, "erasure model: beta must be positive and finite");
  static_cast<void>(DensityState(m.system_initial));  // validates
  if (m.joint_initial && max_abs(*m.joint_initial - m.initial_state()) > kAssumptionTol)
    throw InvalidInput("erasure model violates assumption (factorized initial state): system and environment start correlated or differ from rho_S x rho_beta");
  if (m.environment_initial && max_abs(*m.environment_initial - m.thermal_environment()) > kAssumptionTol)
    throw InvalidInput("erasure model violates assumption (thermal environment): environment does not start in its Gibbs state");
  require(static_cast<bool>(m.evolution), "erasure model: no joint evolution given");
  const Mat u = m.evolution(t);
  const Eigen::Index d = m.system_dim() * m.environment_dim();
  if (u.rows() != d || u.cols() != d || max_abs(u.adjoint() * u - identity(d)) > kAssumptionTol)
    throw InvalidInput("erasure model violates assumption (global unitary): evolution is not unitary on S x E");
  return u;
}

struct LandauerReport {
  double beta_heat;              // beta <Q_E>, heat into the environment
  double entropy_change;         // S(rho_S(0)) - S(rho_S(t))
  double mutual_information;
  double environment_relative_entropy;
  double residual;               // beta <Q> - (dS + I + D)
};

inline LandauerReport landauer_equality(const ErasureModel& m, double t) {
  const Mat u = checked_unitary(m, t);
  const int dims[] = {static_cast<int>(m.system_dim()), static_cast<int>(m.environment_dim())};
  const int sys[] = {0}, env[] = {1};
  const Mat rho_env0 = m.thermal_environment();
  const Mat rho_t = u * m.initial_state() * u.adjoint();
  const Mat rho_s = partial_trace(rho_t, dims, sys), rho_e = partial_trace(rho_t, dims, env);
  LandauerReport r;
  r.beta_heat = m.beta * ((rho_e - rho_env0) * m.environment_hamiltonian).trace().real();
  r.entropy_change = von_neumann_entropy(m.system_initial) - von_neumann_entropy(rho_s);
  r.mutual_information = von_neumann_entropy(rho_s) + von_neumann_entropy(rho_e) - von_neumann_entropy(rho_t);
  // exact ln rho_beta; thermal weights far below machine epsilon stay in the support
  const Mat log_thermal = -m.beta * m.environment_hamiltonian -
                          gibbs_state(m.environment_hamiltonian, m.beta).log_partition * identity(m.environment_dim());
  r.environment_relative_entropy = -von_neumann_entropy(rho_e) - (rho_e * log_thermal).trace().real();
  r.residual = r.beta_heat - r.entropy_change - r.mutual_information - r.environment_relative_entropy;
  return r;
}

struct HeatAtom {
  double heat;  // E_m - E_n
  double probability;
};

inline constexpr double kHeatMergeTol = 1e-9;
inline constexpr double kNegligibleHeatProbability = 1e-14;

// Two-point measurement of the environment energy around the joint evolution.
inline std::vector<HeatAtom> heat_distribution(const ErasureModel& m, double t) {
  const Mat u = checked_unitary(m, t);
  const auto levels = spectral_decomposition(m.environment_hamiltonian);
  const Mat id_s = identity(m.system_dim());
  const double ref = levels.front().value;
  double z = 0;
  for (const auto& l : levels) z += l.multiplicity * std::exp(-m.beta * (l.value - ref));
  std::vector<Mat> full;
  for (const auto& l : levels) full.push_back(kron(id_s, l.projector));
  std::vector<HeatAtom> raw;
  for (std::size_t n = 0; n < levels.size(); ++n) {
    const double pn = std::exp(-m.beta * (levels[n].value - ref)) / z;
    const Mat evolved = u * kron(m.system_initial, pn * levels[n].projector) * u.adjoint();
    for (std::size_t k = 0; k < levels.size(); ++k) {
      const double p = (full[k] * evolved).trace().real();
      if (p > kNegligibleHeatProbability) raw.push_back({levels[k].value - levels[n].value, p});
    }
  }
  std::sort(raw.begin(), raw.end(), [](const auto& a, const auto& b) { return a.heat < b.heat; });
  std::vector<HeatAtom> out;
  for (const auto& a : raw) {
    if (!out.empty() && a.heat - out.back().heat <= kHeatMergeTol) out.back().probability += a.probability;
    else out.push_back(a);
  }
  return out;
}

// ln <exp(-eta Q)>, normalized so that it vanishes exactly at eta = 0
inline double cumulant_generating(std::span<const HeatAtom> atoms, double eta) {
  double shift = -std::numeric_limits<double>::infinity(), total = 0;
  for (const auto& a : atoms) shift = std::max(shift, -eta * a.heat), total += a.probability;
  double s = 0;
  for (const auto& a : atoms) s += a.probability * std::exp(-eta * a.heat - shift);
  return std::log(s) + shift - std::log(total);
}

struct FcsReport {
  std::vector<double> etas;
  std::vector<double> theta;
  std::vector<double> bounds;         // -(beta / eta) Theta(eta)
  std::vector<HeatAtom> atoms;
  double mean_heat;                   // from the distribution
  double heat_variance;               // second cumulant
  double mean_from_derivative;        // -dTheta/deta at 0
  double max_bound;
  double min_second_difference;       // convexity check over the grid
};

inline std::vector<double> default_eta_grid(double beta, int points = 16) {
  std::vector<double> g(points);
  for (int k = 0; k < points; ++k) g[k] = beta * std::pow(10.0, -2.0 + 4.0 * k / (points - 1));
  return g;
}

inline FcsReport fcs_report(const ErasureModel& m, double t, std::vector<double> etas = {}) {
  if (etas.empty()) etas = default_eta_grid(m.beta);
  for (double e : etas) require(e > 0 && std::isfinite(e), "fcs_report: counting parameters must be positive");
  std::sort(etas.begin(), etas.end());
  FcsReport r;
  r.atoms = heat_distribution(m, t);
  r.etas = etas;
  double total = 0, mean = 0, second = 0, scale = 0;
  for (const auto& a : r.atoms) total += a.probability, mean += a.probability * a.heat, scale = std::max(scale, std::abs(a.heat));
  mean /= total;
  for (const auto& a : r.atoms) second += a.probability * (a.heat - mean) * (a.heat - mean);
  r.mean_heat = mean;
  r.heat_variance = second / total;
  const double h = 1e-5 / std::max(1.0, scale);
  r.mean_from_derivative = -(cumulant_generating(r.atoms, h) - cumulant_generating(r.atoms, -h)) / (2 * h);
  r.max_bound = -std::numeric_limits<double>::infinity();
  for (double e : etas) {
    r.theta.push_back(cumulant_generating(r.atoms, e));
    r.bounds.push_back(-m.beta / e * r.theta.back());
    r.max_bound = std::max(r.max_bound, r.bounds.back());
  }
  // slopes must not decrease; eta = 0 is included as the left end
  std::vector<double> xs{0.0}, ys{0.0};
  xs.insert(xs.end(), etas.begin(), etas.end());
  ys.insert(ys.end(), r.theta.begin(), r.theta.end());
  r.min_second_difference = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k + 1 < xs.size(); ++k) {
    const double left = (ys[k] - ys[k - 1]) / (xs[k] - xs[k - 1]), right = (ys[k + 1] - ys[k]) / (xs[k + 1] - xs[k]);
    r.min_second_difference = std::min(r.min_second_difference, right - left);
  }
  return r;
}

// Qubit reset model: system qubit and `units` environment qubits (all with gap `gap`), coupled by
// coupling * sum_k SWAP(system, unit k).
inline ErasureModel qubit_reset_model(const Mat& rho_s, int units, double gap, double coupling, double beta) {
  require(units >= 1, "qubit_reset_model: need at least one environment qubit");
  const int n = units + 1;
  const Mat z = 0.5 * gap * (identity(2) - pauli_z());  // |0> ground at energy 0
  Mat h = Mat::Zero(Eigen::Index{1} << n, Eigen::Index{1} << n), he = Mat::Zero(Eigen::Index{1} << units, Eigen::Index{1} << units);
  for (int k = 0; k < n; ++k) h += embed(z, k, n);
  for (int k = 0; k < units; ++k) he += embed(z, k, units);
  for (int k = 1; k < n; ++k)
    for (const Mat& p : {pauli_x(), pauli_y(), pauli_z()}) h += 0.5 * coupling * embed(p, 0, n) * embed(p, k, n);
  h += 0.5 * coupling * units * identity(h.rows());
  return {rho_s, he, beta, hamiltonian_evolution(h)};
}

}  // namespace qthermo::landauer
