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
#include <bit>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "qthermo/qcore.hpp"

namespace qthermo::annealing {

inline constexpr int kMaxChainLength = 14;
inline constexpr int kMaxDenseLength = 12;  // dense operators
inline constexpr int kMaxMixedLength = 10;  // density-matrix routes
inline constexpr double kEndpointTol = 1e-12;
inline constexpr double kOutcomeMergeTol = 1e-9;
inline constexpr double kTauDependenceTol = 1e-3;

// H(t) = -scale [g(t) sum_n X_n + Delta(t) sum_n J_n Z_n Z_{n+1}], open chain, site 0 the most
// significant bit and |0> the Z = +1 state.
struct IsingChainSpec {
  int length;
  std::vector<double> couplings;  // length - 1 bonds
  Schedule field;                 // g(t)
  Schedule interaction;           // Delta(t)
  double energy_scale = 1.0;

  double anneal_time() const { return field.duration(); }
  std::size_t dim() const { return std::size_t{1} << length; }

  double max_coupling() const {
    double m = 0;
    for (double j : couplings) m = std::max(m, std::abs(j));
    return m;
  }

  void validate() const {
    require(length >= 2, "ising chain: need at least two sites");
    if (length > kMaxChainLength) throw CapExceeded("ising chain: at most 14 sites");
    require(couplings.size() == static_cast<std::size_t>(length - 1), "ising chain: need one coupling per bond");
    for (double j : couplings) require(std::isfinite(j) && j != 0.0, "ising chain: couplings must be finite and nonzero");
    require(energy_scale > 0 && std::isfinite(energy_scale), "ising chain: energy scale must be positive");
    require(std::abs(interaction.duration() - field.duration()) <= 1e-12 * field.duration(),
            "ising chain: schedules must share one anneal time");
    require(std::abs(interaction.start()) <= kEndpointTol, "ising chain: Delta(0) must vanish");
    require(std::abs(field.end()) <= kEndpointTol, "ising chain: g(tau) must vanish");
    require(field.start() > 0, "ising chain: g(0) must be positive for a paramagnetic start");
  }
};

// g(t) = g0 (1 - t/tau), Delta(t) = delta1 t/tau; uniform ferromagnetic couplings by default.
inline IsingChainSpec linear_anneal(int length, double tau, double g0 = 1.0, double delta1 = 1.0,
                                    std::vector<double> couplings = {}) {
  if (couplings.empty()) couplings.assign(std::max(length - 1, 0), 1.0);
  IsingChainSpec s{length, std::move(couplings), linear_ramp(g0, 0.0, tau), linear_ramp(0.0, delta1, tau)};
  s.validate();
  return s;
}

// Same schedule shapes played over a different anneal time.
inline IsingChainSpec with_anneal_time(const IsingChainSpec& s, double tau) {
  require(tau > 0, "with_anneal_time: anneal time must be positive");
  const double k = s.anneal_time() / tau;
  auto stretch = [k, tau](const Schedule& f) {
    return Schedule(
        tau, [f, k](double t) { return f(t * k); }, [f, k](double t) { return k * f.rate(t * k); }, f.label());
  };
  IsingChainSpec out{s.length, s.couplings, stretch(s.field), stretch(s.interaction), s.energy_scale};
  out.validate();
  return out;
}

inline std::size_t site_mask(int site, int length) { return std::size_t{1} << (length - 1 - site); }

// Diagonal of sum_n J_n Z_n Z_{n+1}.
inline RVec bond_diagonal(const IsingChainSpec& s) {
  RVec d = RVec::Zero(static_cast<Eigen::Index>(s.dim()));
  for (std::size_t x = 0; x < s.dim(); ++x)
    for (int n = 0; n + 1 < s.length; ++n) {
      const bool a = x & site_mask(n, s.length), b = x & site_mask(n + 1, s.length);
      d[static_cast<Eigen::Index>(x)] += a == b ? s.couplings[n] : -s.couplings[n];
    }
  return d;
}

// Bonds whose sign disagrees with the coupling, per basis state.
inline std::vector<int> kink_counts(const IsingChainSpec& s) {
  std::vector<int> k(s.dim(), 0);
  for (std::size_t x = 0; x < s.dim(); ++x)
    for (int n = 0; n + 1 < s.length; ++n) {
      const bool a = x & site_mask(n, s.length), b = x & site_mask(n + 1, s.length);
      if ((a == b) != (s.couplings[n] > 0)) ++k[x];
    }
  return k;
}

inline Mat transverse_sum(int length) {
  Mat x = Mat::Zero(Eigen::Index{1} << length, Eigen::Index{1} << length);
  for (int i = 0; i < length; ++i) x += embed(pauli_x(), i, length);
  return x;
}

// Omega_i = sum X - 1, dense.
inline Mat initial_observable(int length) {
  return transverse_sum(length) - identity(Eigen::Index{1} << length);
}

// Omega_f = sum (J_n / max|J|) Z_n Z_{n+1}, the diagonal of -H(tau) / (scale Delta(tau) max|J|).
inline RVec final_observable(const IsingChainSpec& s) { return bond_diagonal(s) / s.max_coupling(); }

inline Vec paramagnet(int length) {
  const Eigen::Index d = Eigen::Index{1} << length;
  return Vec::Constant(d, cplx(std::pow(2.0, -0.5 * length)));
}

inline Mat anneal_hamiltonian(const IsingChainSpec& s, const RVec& bonds, const Mat& xsum, double t) {
  return -s.energy_scale * (s.field(t) * xsum + s.interaction(t) * bonds.cast<cplx>().asDiagonal().toDenseMatrix());
}

// Dense H(t). The paramagnetic ground state at t = 0 is confirmed by diagonalization up to 8 sites.
inline HamiltonianPath build_anneal(const IsingChainSpec& s) {
  s.validate();
  if (s.length > kMaxDenseLength) throw CapExceeded("build_anneal: dense operators are capped at 12 sites");
  const RVec bonds = bond_diagonal(s);
  const Mat xsum = transverse_sum(s.length);
  if (s.length <= 8) {
    const auto es = eigh(anneal_hamiltonian(s, bonds, xsum, 0.0));
    const double gap = es.values[1] - es.values[0];
    const double overlap = std::norm(es.vectors.col(0).dot(paramagnet(s.length)));
    if (gap <= 1e-9 || std::abs(overlap - 1.0) > 1e-10)
      throw InvalidInput("build_anneal: H(0) does not have the paramagnet as its unique ground state");
  }
  return {s.anneal_time(), [s, bonds, xsum](double t) { return anneal_hamiltonian(s, bonds, xsum, t); }};
}

// Bound on ||H(t)|| from the schedules sampled on a grid.
inline double norm_bound(const IsingChainSpec& s) {
  double jsum = 0;
  for (double j : s.couplings) jsum += std::abs(j);
  double h = 0;
  for (int k = 0; k <= 64; ++k) {
    const double t = s.anneal_time() * k / 64;
    h = std::max(h, s.length * std::abs(s.field(t)) + jsum * std::abs(s.interaction(t)));
  }
  return s.energy_scale * h;
}

inline int default_unitary_steps(const IsingChainSpec& s) {
  return std::max(256, static_cast<int>(std::ceil(s.anneal_time() * norm_bound(s) / 0.02)));
}

inline int default_lindblad_steps(const IsingChainSpec& s) {
  return std::max(128, static_cast<int>(std::ceil(s.anneal_time() * norm_bound(s) / 0.1)));
}

namespace detail {

// exp(-i H(t) dt) by Strang splitting: half diagonal phase, transverse rotation on every site,
// half diagonal phase. Acts on the columns of `m`.
struct StrangStep {
  const IsingChainSpec& s;
  const RVec& bonds;

  template <class Cols>
  void apply(Cols& m, double t, double dt) const {
    const double a = s.energy_scale * s.interaction(t) * dt / 2;
    const double theta = s.energy_scale * s.field(t) * dt;
    const double c = std::cos(theta);
    const cplx is = kI * std::sin(theta);
    const Eigen::Index d = m.rows();
    Vec phase(d);
    for (Eigen::Index x = 0; x < d; ++x) phase[x] = std::exp(kI * a * bonds[x]);
    for (Eigen::Index col = 0; col < m.cols(); ++col) {
      auto v = m.col(col);
      v.array() *= phase.array();
      for (int site = 0; site < s.length; ++site) {
        const auto mask = static_cast<Eigen::Index>(site_mask(site, s.length));
        for (Eigen::Index x = 0; x < d; ++x) {
          if (x & mask) continue;
          const cplx lo = v[x], hi = v[x | mask];
          v[x] = c * lo + is * hi;
          v[x | mask] = is * lo + c * hi;
        }
      }
      v.array() *= phase.array();
    }
  }
};

// In-place normalized Walsh-Hadamard transform of every column: Z basis to X basis.
inline void hadamard_columns(Mat& m) {
  const Eigen::Index d = m.rows();
  const double norm = 1.0 / std::sqrt(static_cast<double>(d));
  for (Eigen::Index col = 0; col < m.cols(); ++col) {
    auto v = m.col(col);
    for (Eigen::Index h = 1; h < d; h <<= 1)
      for (Eigen::Index x = 0; x < d; ++x)
        if (!(x & h)) {
          const cplx a = v[x], b = v[x | h];
          v[x] = a + b;
          v[x | h] = a - b;
        }
    v *= norm;
  }
}

inline Mat hadamard_conjugate(const Mat& a) {
  Mat m = a;
  hadamard_columns(m);
  m.adjointInPlace();
  hadamard_columns(m);
  m.adjointInPlace();
  return m;
}

}  // namespace detail

// psi(tau) from psi(0) under the noiseless schedule.
inline Vec anneal_state(const IsingChainSpec& s, const Vec& psi0, int steps = 0) {
  s.validate();
  require(psi0.size() == static_cast<Eigen::Index>(s.dim()), "anneal_state: dimension mismatch");
  if (steps <= 0) steps = default_unitary_steps(s);
  const RVec bonds = bond_diagonal(s);
  const detail::StrangStep step{s, bonds};
  const double dt = s.anneal_time() / steps;
  Vec psi = psi0;
  for (int k = 0; k < steps; ++k) step.apply(psi, (k + 0.5) * dt, dt);
  return psi;
}

enum class NoiseKind { none, dephasing, amplitude_damping };

// Independent single-site channels: Z (dephasing) or |0><1| (amplitude damping) on every site.
struct Noise {
  NoiseKind kind = NoiseKind::none;
  double rate = 0.0;

  void validate() const { require(rate >= 0 && std::isfinite(rate), "noise: rate must be nonnegative"); }
  bool active() const { return kind != NoiseKind::none && rate > 0; }
};

// Lindblad generator with the structure of the chain; O(L d^2) per call. Expects hermitian rho.
class AnnealGenerator {
 public:
  AnnealGenerator(IsingChainSpec spec, Noise noise) : s_(std::move(spec)), noise_(noise), bonds_(bond_diagonal(s_)) {
    noise_.validate();
  }

  Mat operator()(double t, const Mat& rho) const {
    const Eigen::Index d = rho.rows();
    const double g = s_.energy_scale * s_.field(t), delta = s_.energy_scale * s_.interaction(t);
    Mat b(d, d);  // rho H
    for (Eigen::Index j = 0; j < d; ++j) b.col(j) = -delta * bonds_[j] * rho.col(j);
    for (int site = 0; site < s_.length; ++site) {
      const auto mask = static_cast<Eigen::Index>(site_mask(site, s_.length));
      for (Eigen::Index j = 0; j < d; ++j) b.col(j) -= g * rho.col(j ^ mask);
    }
    Mat out = -kI * (b.adjoint() - b);
    if (!noise_.active()) return out;
    const double r = noise_.rate;
    if (noise_.kind == NoiseKind::dephasing) {
      for (Eigen::Index j = 0; j < d; ++j)
        for (Eigen::Index i = 0; i < d; ++i) out(i, j) -= 2 * r * std::popcount(static_cast<std::uint64_t>(i ^ j)) * rho(i, j);
      return out;
    }
    for (Eigen::Index j = 0; j < d; ++j)
      for (Eigen::Index i = 0; i < d; ++i)
        out(i, j) -= 0.5 * r * (std::popcount(static_cast<std::uint64_t>(i)) + std::popcount(static_cast<std::uint64_t>(j))) * rho(i, j);
    for (int site = 0; site < s_.length; ++site) {
      const auto mask = static_cast<Eigen::Index>(site_mask(site, s_.length));
      for (Eigen::Index j = 0; j < d; ++j) {
        if (j & mask) continue;
        for (Eigen::Index i = 0; i < d; ++i)
          if (!(i & mask)) out(i, j) += r * rho(i | mask, j | mask);
      }
    }
    return out;
  }

  const IsingChainSpec& spec() const noexcept { return s_; }
  const Noise& noise() const noexcept { return noise_; }

 private:
  IsingChainSpec s_;
  Noise noise_;
  RVec bonds_;
};

// Dense counterpart of AnnealGenerator.
inline Lindbladian dense_generator(const IsingChainSpec& s, const Noise& noise) {
  const auto path = build_anneal(s);
  std::vector<JumpOperator> jumps;
  if (noise.active())
    for (int site = 0; site < s.length; ++site)
      jumps.push_back({embed(noise.kind == NoiseKind::dephasing ? pauli_z() : sigma_minus(), site, s.length), noise.rate});
  return Lindbladian(path.at, std::move(jumps));
}

// The channel E applied to a positive operand of any trace.
inline Mat anneal_map(const IsingChainSpec& s, const Noise& noise, const Mat& operand, int steps = 0) {
  s.validate();
  if (s.length > kMaxMixedLength) throw CapExceeded("anneal_map: density-matrix evolution is capped at 10 sites");
  const double tr = operand.trace().real();
  if (tr <= 0) return Mat::Zero(operand.rows(), operand.cols());
  if (!noise.active()) {
    if (steps <= 0) steps = default_unitary_steps(s);
    const RVec bonds = bond_diagonal(s);
    const detail::StrangStep step{s, bonds};
    const double dt = s.anneal_time() / steps;
    Mat m = operand;
    for (int k = 0; k < steps; ++k) {
      step.apply(m, (k + 0.5) * dt, dt);
      m.adjointInPlace();
      step.apply(m, (k + 0.5) * dt, dt);
      m.adjointInPlace();
    }
    return m;
  }
  if (steps <= 0) steps = default_lindblad_steps(s);
  const AnnealGenerator gen(s, noise);
  const auto path = lindblad_evolve(gen, DensityState(operand / tr), s.anneal_time(), steps, steps);
  return tr * path.final_state();
}

enum class Preparation { ground, observable_gibbs };

struct OutcomeAtom {
  double value;
  double probability;
};

struct DiagnosticReport {
  double tau = 0;
  std::vector<OutcomeAtom> distribution;  // final outcomes omega_f
  std::vector<OutcomeAtom> increments;    // d omega = omega_f - omega_i
  double exp_average = 0;                 // <exp(-d omega)>
  double efficacy = 0;                    // tr[exp(-Omega_f) E(M(rho0) exp(Omega_i))]
  double efficacy_deviation = 0;          // |exp_average - efficacy|
  std::vector<double> kink_histogram;     // index = kinks, 0 .. L-1
  double ground_probability = 0;          // P(omega_f = sum |J_n| / max|J|)
  std::vector<long long> sampled_kinks;   // counts, only with finite shots
};

struct DiagnosticOptions {
  Preparation preparation = Preparation::ground;
  long long shots = 0;
  std::uint64_t seed = 0;
  int steps = 0;
};

namespace detail {

inline std::vector<OutcomeAtom> merge_outcomes(std::vector<OutcomeAtom> atoms, bool drop_negligible = true) {
  std::sort(atoms.begin(), atoms.end(), [](const auto& a, const auto& b) { return a.value < b.value; });
  std::vector<OutcomeAtom> out;
  for (const auto& a : atoms) {
    if (!out.empty() && std::abs(a.value - out.back().value) <= kOutcomeMergeTol) out.back().probability += a.probability;
    else out.push_back(a);
  }
  if (drop_negligible) std::erase_if(out, [](const auto& a) { return a.probability <= 1e-14; });
  return out;
}

inline std::vector<double> populations(const Mat& rho) {
  std::vector<double> p(static_cast<std::size_t>(rho.rows()));
  for (Eigen::Index x = 0; x < rho.rows(); ++x) p[static_cast<std::size_t>(x)] = rho(x, x).real();
  return p;
}

}  // namespace detail

inline DiagnosticReport run_diagnostic(const IsingChainSpec& s, const Noise& noise, const DiagnosticOptions& opt = {}) {
  s.validate();
  noise.validate();
  require(opt.shots >= 0, "run_diagnostic: shots must be nonnegative");
  const int n = s.length;
  const std::size_t d = s.dim();
  const RVec omega_f = final_observable(s);
  const auto kinks = kink_counts(s);
  double top = 0;
  for (double j : s.couplings) top += std::abs(j) / s.max_coupling();

  // initial outcomes in the X basis: omega_i = L - 1 - 2 popcount(y)
  std::vector<std::vector<double>> finals;  // diag(E(Pi_m rho0 Pi_m)) per initial outcome m
  std::vector<double> omega_i;
  Mat efficacy_out;
  if (opt.preparation == Preparation::ground) {
    omega_i.push_back(n - 1.0);
    if (!noise.active()) {
      const Vec psi = anneal_state(s, paramagnet(n), opt.steps);
      std::vector<double> p(d);
      for (std::size_t x = 0; x < d; ++x) p[x] = std::norm(psi[static_cast<Eigen::Index>(x)]);
      finals.push_back(p);
      // M(rho0) exp(Omega_i) = e^{L-1} rho0 for the paramagnet
      efficacy_out = std::exp(n - 1.0) * (psi * psi.adjoint());
    } else {
      const Vec plus = paramagnet(n);
      const Mat rho0 = plus * plus.adjoint();
      const Mat out = anneal_map(s, noise, rho0, opt.steps);
      finals.push_back(detail::populations(out));
      Mat x = detail::hadamard_conjugate(rho0);
      for (Eigen::Index j = 0; j < x.cols(); ++j)
        for (Eigen::Index i = 0; i < x.rows(); ++i)
          x(i, j) = std::popcount(static_cast<std::uint64_t>(i)) == std::popcount(static_cast<std::uint64_t>(j))
                        ? x(i, j) * std::exp(n - 1.0 - 2.0 * std::popcount(static_cast<std::uint64_t>(j)))
                        : cplx(0);
      efficacy_out = anneal_map(s, noise, detail::hadamard_conjugate(x), opt.steps);
    }
  } else {
    // rho0 = exp(-Omega_i) / Z is diagonal in the X basis; each block evolves separately.
    if (n > kMaxMixedLength) throw CapExceeded("run_diagnostic: mixed preparations are capped at 10 sites");
    double z = 0;
    for (std::size_t y = 0; y < d; ++y) z += std::exp(-(n - 1.0 - 2.0 * std::popcount(y)));
    Mat grown = Mat::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (int k = 0; k <= n; ++k) {
      const double w = std::exp(-(n - 1.0 - 2.0 * k)) / z;
      Mat block = Mat::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
      for (std::size_t y = 0; y < d; ++y)
        if (std::popcount(y) == k) block(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(y)) = w;
      grown += block * std::exp(n - 1.0 - 2.0 * k);
      const Mat out = anneal_map(s, noise, detail::hadamard_conjugate(block), opt.steps);
      finals.push_back(detail::populations(out));
      omega_i.push_back(n - 1.0 - 2.0 * k);
    }
    efficacy_out = anneal_map(s, noise, detail::hadamard_conjugate(grown), opt.steps);
  }

  DiagnosticReport r;
  r.tau = s.anneal_time();
  r.kink_histogram.assign(n, 0.0);
  std::vector<OutcomeAtom> dist, inc;
  for (std::size_t m = 0; m < finals.size(); ++m)
    for (std::size_t x = 0; x < d; ++x) {
      const double p = finals[m][x], w = omega_f[static_cast<Eigen::Index>(x)];
      dist.push_back({w, p});
      inc.push_back({w - omega_i[m], p});
      r.kink_histogram[kinks[x]] += p;
      r.exp_average += p * std::exp(-(w - omega_i[m]));
      if (std::abs(std::abs(w) - top) <= kOutcomeMergeTol) r.ground_probability += p;
    }
  for (std::size_t x = 0; x < d; ++x)
    r.efficacy += std::exp(-omega_f[static_cast<Eigen::Index>(x)]) * efficacy_out(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(x)).real();
  r.efficacy_deviation = std::abs(r.exp_average - r.efficacy);
  r.distribution = detail::merge_outcomes(std::move(dist));
  r.increments = detail::merge_outcomes(std::move(inc));
  if (opt.shots > 0) {
    auto rng = stream_rng(opt.seed, 0);
    std::discrete_distribution<int> pick(r.kink_histogram.begin(), r.kink_histogram.end());
    r.sampled_kinks.assign(n, 0);
    for (long long k = 0; k < opt.shots; ++k) ++r.sampled_kinks[pick(rng)];
  }
  return r;
}

struct TauSweep {
  std::vector<DiagnosticReport> reports;
  double max_variation = 0;   // largest total-variation distance between neighbouring taus
  bool tau_dependent = false; // max_variation above kTauDependenceTol
  bool monotone = false;      // ground probability monotone along the grid
};

inline double total_variation(const std::vector<OutcomeAtom>& a, const std::vector<OutcomeAtom>& b) {
  std::vector<OutcomeAtom> all = a;
  for (const auto& x : b) all.push_back({x.value, -x.probability});
  double tv = 0;
  for (const auto& x : detail::merge_outcomes(std::move(all), false)) tv += std::abs(x.probability);
  return 0.5 * tv;
}

// One diagnostic per anneal time, schedule shapes fixed.
inline TauSweep tau_sweep(const IsingChainSpec& s, const Noise& noise, const std::vector<double>& taus,
                          const DiagnosticOptions& opt = {}) {
  require(taus.size() >= 2, "tau_sweep: need at least two anneal times");
  TauSweep out;
  out.reports.resize(taus.size());
  parallel_for(taus.size(), [&](std::size_t i) { out.reports[i] = run_diagnostic(with_anneal_time(s, taus[i]), noise, opt); });
  bool up = true, down = true;
  for (std::size_t i = 1; i < taus.size(); ++i) {
    const auto& a = out.reports[i - 1];
    const auto& b = out.reports[i];
    out.max_variation = std::max(out.max_variation, total_variation(a.distribution, b.distribution));
    up = up && b.ground_probability >= a.ground_probability - 1e-12;
    down = down && b.ground_probability <= a.ground_probability + 1e-12;
  }
  out.tau_dependent = out.max_variation > kTauDependenceTol;
  out.monotone = up || down;
  return out;
}

// Logical problem sum_i h_i Z_i + sum_{i<j} J_ij Z_i Z_j.
struct LogicalIsing {
  std::vector<double> fields;
  RMat couplings;  // upper triangle used

  int size() const { return static_cast<int>(fields.size()); }
  void validate() const {
    require(!fields.empty(), "logical ising: need at least one logical qubit");
    require(couplings.rows() == size() && couplings.cols() == size(), "logical ising: couplings must be N x N");
  }
};

// Diagonal of the unencoded problem on N qubits.
inline RVec ising_diagonal(const LogicalIsing& p) {
  p.validate();
  const int n = p.size();
  RVec d = RVec::Zero(Eigen::Index{1} << n);
  for (Eigen::Index x = 0; x < d.size(); ++x) {
    auto z = [&](int i) { return (x & static_cast<Eigen::Index>(site_mask(i, n))) ? -1.0 : 1.0; };
    for (int i = 0; i < n; ++i) {
      d[x] += p.fields[i] * z(i);
      for (int j = i + 1; j < n; ++j) d[x] += p.couplings(i, j) * z(i) * z(j);
    }
  }
  return d;
}

// Copies n per logical qubit plus one penalty qubit each. Data qubit (i, l) sits at i n + l,
// the penalty qubit of i at N n + i.
struct QacEncoding {
  int logical;
  int copies;
  double problem_scale;
  double penalty_scale;
  RVec problem;  // <H_Ising>, unscaled
  RVec penalty;  // H_P = -sum_{i,l} Z_{i,l} Z_{i,P}, unscaled
  Mat driver;    // sum of X over every physical qubit, penalty qubits included

  int qubits() const { return logical * (copies + 1); }
  int data_qubit(int i, int l) const { return i * copies + l; }
  int penalty_qubit(int i) const { return logical * copies + i; }

  RVec problem_diagonal() const { return problem_scale * problem + penalty_scale * penalty; }

  // A H_X + B (nu <H_Ising> + mu H_P)
  Mat hamiltonian(double a, double b) const {
    return a * driver + (b * problem_diagonal()).cast<cplx>().asDiagonal().toDenseMatrix();
  }

  HamiltonianPath path(const Schedule& a, const Schedule& b) const {
    require(std::abs(a.duration() - b.duration()) <= 1e-12 * a.duration(), "qac: schedules must share one duration");
    return {a.duration(), [enc = *this, a, b](double t) { return enc.hamiltonian(a(t), b(t)); }};
  }
};

inline QacEncoding qac_encode(const LogicalIsing& p, int copies, double problem_scale, double penalty_scale) {
  p.validate();
  require(copies >= 1, "qac_encode: need at least one physical copy");
  const int n = p.size();
  const long long total = static_cast<long long>(n) * (copies + 1);
  if (total > kMaxDenseLength) throw CapExceeded("qac_encode: at most 12 physical qubits including penalty qubits");
  QacEncoding e{n, copies, problem_scale, penalty_scale, {}, {}, {}};
  const int q = e.qubits();
  const Eigen::Index d = Eigen::Index{1} << q;
  e.problem = RVec::Zero(d);
  e.penalty = RVec::Zero(d);
  for (Eigen::Index x = 0; x < d; ++x) {
    auto z = [&](int k) { return (x & static_cast<Eigen::Index>(site_mask(k, q))) ? -1.0 : 1.0; };
    for (int l = 0; l < copies; ++l)
      for (int i = 0; i < n; ++i) {
        e.problem[x] += p.fields[i] * z(e.data_qubit(i, l));
        for (int j = i + 1; j < n; ++j) e.problem[x] += p.couplings(i, j) * z(e.data_qubit(i, l)) * z(e.data_qubit(j, l));
        e.penalty[x] -= z(e.data_qubit(i, l)) * z(e.penalty_qubit(i));
      }
  }
  e.driver = transverse_sum(q);
  return e;
}

}  // namespace qthermo::annealing
