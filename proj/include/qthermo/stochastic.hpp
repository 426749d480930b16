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
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "qthermo/core/errors.hpp"
#include "qthermo/core/numerics.hpp"
#include "qthermo/core/schedule.hpp"

namespace qthermo::stochastic {

// V(x, lambda) with both partial derivatives. equilibrium_stiffness, when set, gives the
// curvature of a harmonic family so that Boltzmann initial positions can be drawn exactly.
struct Potential {
  std::function<double(double, double)> value;
  std::function<double(double, double)> dx;
  std::function<double(double, double)> dlambda;
  std::function<double(double)> centre = [](double) { return 0.0; };
  std::function<double(double)> equilibrium_stiffness{};
  double char_frequency = 0.0;  // for the step-size check; 0 for a free particle
};

inline Potential free_potential() {
  return {[](double, double) { return 0.0; }, [](double, double) { return 0.0; }, [](double, double) { return 0.0; },
          [](double) { return 0.0; }, {}, 0.0};
}

// k (x - lambda)^2 / 2
inline Potential dragged_harmonic(double stiffness, double mass = 1.0) {
  return {[stiffness](double x, double l) { return 0.5 * stiffness * (x - l) * (x - l); },
          [stiffness](double x, double l) { return stiffness * (x - l); },
          [stiffness](double x, double l) { return -stiffness * (x - l); },
          [](double l) { return l; },
          [stiffness](double) { return stiffness; },
          std::sqrt(stiffness / mass)};
}

// m lambda^2 x^2 / 2, lambda playing the frequency
inline Potential breathing_harmonic(double mass, double max_frequency) {
  return {[mass](double x, double w) { return 0.5 * mass * w * w * x * x; },
          [mass](double x, double w) { return mass * w * w * x; },
          [mass](double x, double w) { return mass * w * x * x; },
          [](double) { return 0.0; },
          [mass](double w) { return mass * w * w; },
          max_frequency};
}

struct LangevinParams {
  double mass = 1.0;
  double gamma = 1.0;
  double beta = 1.0;
  std::optional<double> diffusion_override;  // noise strength D in <xi xi> = 2 D delta
  Potential potential = free_potential();

  double diffusion() const { return diffusion_override.value_or(mass * gamma / beta); }
  void validate() const {
    require(mass > 0 && gamma > 0 && beta > 0, "langevin: mass, damping and beta must be positive");
    if (diffusion_override) require(*diffusion_override > 0, "langevin: diffusion must be positive");
  }
};

struct TrajectoryEnsemble {
  std::uint64_t seed = 0;
  std::size_t count = 0;
  std::vector<double> work;
  std::vector<double> heat;           // energy received from the bath
  std::vector<double> energy_change;
  std::vector<double> entropy;        // Sigma where defined
  bool regime_warning = false;

  Estimate mean_work() const { return mean_estimate(work); }
  // <exp(-s X)> with jackknife error
  static Estimate exp_average(std::span<const double> xs, double s) {
    std::vector<double> e(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) e[i] = std::exp(-s * xs[i]);
    return jackknife(e, [](double m) { return m; }, std::min<int>(100, static_cast<int>(xs.size())));
  }
};

inline constexpr double kBlowUp = 1e12;

namespace detail {
inline void check_step(const LangevinParams& p, double dt) {
  require(dt > 0, "langevin: time step must be positive");
  require(p.gamma * dt < 0.1, "langevin: unstable step, need gamma * dt < 0.1");
  if (p.potential.char_frequency > 0)
    require(dt < 0.1 / p.potential.char_frequency, "langevin: unstable step, need dt < 0.1 / omega");
}
}  // namespace detail

struct LangevinOptions {
  double dt = 1e-3;
  std::optional<std::pair<double, double>> start{};  // fixed (x, v); Boltzmann sampling otherwise
};

// Underdamped BAOAB splitting. At each step the parameter is updated first (work at fixed x),
// then kick / drift / exact Ornstein-Uhlenbeck / drift / kick. The kinetic-energy change of
// the OU part is the heat exchanged with the bath.
inline TrajectoryEnsemble langevin_simulate(const LangevinParams& p, const Schedule& lambda, std::size_t n,
                                            std::uint64_t seed, const LangevinOptions& opt = {}) {
  p.validate();
  require(n >= 1, "langevin: need at least one trajectory");
  detail::check_step(p, opt.dt);
  const int steps = std::max(1, static_cast<int>(std::llround(lambda.duration() / opt.dt)));
  const double dt = lambda.duration() / steps;
  const double m = p.mass, decay = std::exp(-p.gamma * dt);
  const double v_sd = std::sqrt(p.diffusion() / (p.gamma * m * m) * (1 - decay * decay));
  const auto& pot = p.potential;
  if (!opt.start) require(static_cast<bool>(pot.equilibrium_stiffness), "langevin: Boltzmann start needs a harmonic family");
  TrajectoryEnsemble out;
  out.seed = seed, out.count = n;
  out.work.resize(n), out.heat.resize(n), out.energy_change.resize(n);
  parallel_for(n, [&](std::size_t i) {
    auto rng = stream_rng(seed, i);
    std::normal_distribution<double> g(0.0, 1.0);
    double x, v;
    const double l0 = lambda(0.0);
    if (opt.start) {
      x = opt.start->first, v = opt.start->second;
    } else {
      x = pot.centre(l0) + g(rng) / std::sqrt(p.beta * pot.equilibrium_stiffness(l0));
      v = g(rng) * std::sqrt(p.diffusion() / (p.gamma * m * m));
    }
    const double e0 = 0.5 * m * v * v + pot.value(x, l0);
    double w = 0, q = 0, l = l0;
    for (int k = 0; k < steps; ++k) {
      const double next = lambda((k + 1) * dt);
      w += pot.value(x, next) - pot.value(x, l);
      l = next;
      v -= 0.5 * dt * pot.dx(x, l) / m;
      x += 0.5 * dt * v;
      const double ke = 0.5 * m * v * v;
      v = v * decay + v_sd * g(rng);
      q += 0.5 * m * v * v - ke;
      x += 0.5 * dt * v;
      v -= 0.5 * dt * pot.dx(x, l) / m;
      if (!std::isfinite(x) || !std::isfinite(v) || std::abs(x) + std::abs(v) > kBlowUp)
        throw IntegrationFailure("langevin: trajectory blew up");
    }
    out.work[i] = w, out.heat[i] = q;
    out.energy_change[i] = 0.5 * m * v * v + pot.value(x, l) - e0;
  });
  return out;
}

struct FdtReport {
  Estimate diffusion;  // gamma^2 m^2 times the velocity-autocorrelation integral
  double expected;     // m gamma / beta
  double ratio;
  double ratio_error;
  Estimate velocity_variance;
  double velocity_variance_expected;  // D / (gamma m^2)
};

// Free particle released at rest; after a burn-in the velocity autocorrelation is integrated
// over `window` by the trapezoid rule. Both durations are in units of 1/gamma.
inline FdtReport fdt_check(const LangevinParams& p, std::size_t n, std::uint64_t seed, double dt = 0.05,
                           double burn_in = 6.0, double window = 12.0) {
  p.validate();
  detail::check_step(p, dt);
  const double m = p.mass, decay = std::exp(-p.gamma * dt);
  const double v_sd = std::sqrt(p.diffusion() / (p.gamma * m * m) * (1 - decay * decay));
  const int burn = static_cast<int>(std::llround(burn_in / (p.gamma * dt)));
  const int span = static_cast<int>(std::llround(window / (p.gamma * dt)));
  std::vector<double> integral(n), v2(n);
  parallel_for(n, [&](std::size_t i) {
    auto rng = stream_rng(seed, i);
    std::normal_distribution<double> g(0.0, 1.0);
    double v = 0;
    for (int k = 0; k < burn; ++k) v = v * decay + v_sd * g(rng);
    const double v0 = v;
    double acc = 0.5 * v0 * v0;
    for (int k = 1; k <= span; ++k) {
      v = v * decay + v_sd * g(rng);
      acc += (k == span ? 0.5 : 1.0) * v0 * v;
    }
    integral[i] = acc * dt * p.gamma * p.gamma * m * m;
    v2[i] = v0 * v0;
  });
  FdtReport r;
  r.diffusion = mean_estimate(integral);
  r.expected = m * p.gamma / p.beta;
  r.ratio = r.diffusion.mean / r.expected;
  r.ratio_error = r.diffusion.error / r.expected;
  r.velocity_variance = mean_estimate(v2);
  r.velocity_variance_expected = p.diffusion() / (p.gamma * m * m);
  return r;
}

struct HamiltonianJarzynski {
  std::vector<double> work;
  Estimate exp_average;  // <exp(-beta W)>
  double expected;       // exp(-beta dF) = omega_0 / omega_tau
};

// Isolated oscillator H = p^2/2m + m w(t)^2 x^2 / 2. Each step first moves the frequency at
// fixed (x, p), booking the energy change as work, then applies the exact flow of the frozen
// oscillator for dt. Both maps preserve phase-space volume, and a constant schedule does no work.
inline HamiltonianJarzynski hamiltonian_jarzynski(const Schedule& omega, double beta, std::size_t n, std::uint64_t seed,
                                                  double mass = 1.0, double dt = 1e-3) {
  require(beta > 0 && mass > 0 && dt > 0, "hamiltonian_jarzynski: beta, mass and dt must be positive");
  const double w0 = omega(0.0), wt = omega(omega.duration());
  const int steps = std::max(1, static_cast<int>(std::llround(omega.duration() / dt)));
  const double h = omega.duration() / steps;
  std::vector<double> freq(steps + 1), cos_step(steps + 1), sin_step(steps + 1);
  for (int k = 0; k <= steps; ++k) {
    freq[k] = omega(k * h);
    require(freq[k] > 0, "hamiltonian_jarzynski: frequencies must be positive");
    cos_step[k] = std::cos(freq[k] * h), sin_step[k] = std::sin(freq[k] * h);
  }
  HamiltonianJarzynski r;
  r.work.resize(n);
  parallel_for(n, [&](std::size_t i) {
    auto rng = stream_rng(seed, i);
    std::normal_distribution<double> g(0.0, 1.0);
    double x = g(rng) / (w0 * std::sqrt(beta * mass)), p = g(rng) * std::sqrt(mass / beta);
    double w = 0;
    for (int k = 0; k < steps; ++k) {
      const double a = freq[k], b = freq[k + 1];
      if (a != b) w += 0.5 * mass * (b * b - a * a) * x * x;
      const double c = cos_step[k + 1], s = sin_step[k + 1];
      const double xn = c * x + s * p / (mass * b);
      p = c * p - s * mass * b * x;
      x = xn;
    }
    r.work[i] = w;
  });
  r.exp_average = TrajectoryEnsemble::exp_average(r.work, beta);
  r.expected = w0 / wt;
  return r;
}

// <exp(-beta W)> for an instantaneous quench from the w0 Gibbs state, by the Gaussian
// integral over x.
inline double quench_exp_average(double w0, double wt) {
  require(w0 > 0 && wt > 0, "quench: frequencies must be positive");
  return 1.0 / std::sqrt(1.0 + (wt * wt - w0 * w0) / (w0 * w0));
}

// ------------------------------------------------------------------ Markov-chain Crooks

using TransitionMatrix = std::vector<std::vector<double>>;  // row: from, column: to

// Finite-state chain. The default kernel is Metropolis with a uniformly proposed other state.
class MarkovChainSpec {
 public:
  using Energy = std::function<double(int, double)>;
  using Kernel = std::function<TransitionMatrix(double)>;

  MarkovChainSpec(Energy energy, int states, std::vector<double> protocol, double beta, Kernel custom_kernel = {})
      : energy_(std::move(energy)), states_(states), protocol_(std::move(protocol)), beta_(beta),
        custom_(std::move(custom_kernel)) {
    require(states_ >= 2, "markov chain needs at least two states");
    require(protocol_.size() >= 2, "protocol needs at least two parameter values");
    require(beta_ > 0, "beta must be positive");
    for (double l : protocol_) {
      const auto k = kernel(l);
      require(k.size() == static_cast<std::size_t>(states_), "markov kernel has the wrong size");
      for (int a = 0; a < states_; ++a) {
        require(k[a].size() == static_cast<std::size_t>(states_), "markov kernel has the wrong size");
        double row = 0;
        for (double x : k[a]) {
          require(x >= 0, "markov kernel has a negative entry");
          row += x;
        }
        require(std::abs(row - 1) <= 1e-12, "markov kernel rows must sum to one");
      }
      for (int a = 0; a < states_; ++a)
        for (int b = 0; b < states_; ++b) {
          const double fwd = k[a][b] * std::exp(-beta_ * (energy_(a, l) - energy_(0, l)));
          const double bwd = k[b][a] * std::exp(-beta_ * (energy_(b, l) - energy_(0, l)));
          require(std::abs(fwd - bwd) <= 1e-12 * std::max(1.0, fwd), "markov chain violates detailed balance");
        }
    }
  }

  TransitionMatrix kernel(double l) const {
    if (custom_) return custom_(l);
    TransitionMatrix k(states_, std::vector<double>(states_, 0.0));
    for (int a = 0; a < states_; ++a) {
      double stay = 1.0;
      for (int b = 0; b < states_; ++b) {
        if (b == a) continue;
        const double acc = std::min(1.0, std::exp(-beta_ * (energy_(b, l) - energy_(a, l))));
        k[a][b] = acc / (states_ - 1);
        stay -= k[a][b];
      }
      k[a][a] = stay;
    }
    return k;
  }

  double energy(int s, double l) const { return energy_(s, l); }
  int states() const noexcept { return states_; }
  double beta() const noexcept { return beta_; }
  const std::vector<double>& protocol() const noexcept { return protocol_; }
  int steps() const noexcept { return static_cast<int>(protocol_.size()) - 1; }

  MarkovChainSpec reversed() const {
    return {energy_, states_, {protocol_.rbegin(), protocol_.rend()}, beta_, custom_};
  }

  std::vector<double> equilibrium(double l) const {
    std::vector<double> p(states_);
    double ref = energy_(0, l);
    for (int s = 1; s < states_; ++s) ref = std::min(ref, energy_(s, l));
    double z = 0;
    for (int s = 0; s < states_; ++s) z += (p[s] = std::exp(-beta_ * (energy_(s, l) - ref)));
    for (double& x : p) x /= z;
    return p;
  }

  double log_partition(double l) const {
    double ref = energy_(0, l);
    for (int s = 1; s < states_; ++s) ref = std::min(ref, energy_(s, l));
    double z = 0;
    for (int s = 0; s < states_; ++s) z += std::exp(-beta_ * (energy_(s, l) - ref));
    return -beta_ * ref + std::log(z);
  }

  double free_energy_change() const {
    return (log_partition(protocol_.front()) - log_partition(protocol_.back())) / beta_;
  }

 private:
  std::function<double(int, double)> energy_;
  int states_;
  std::vector<double> protocol_;
  double beta_;
  Kernel custom_;
};

// Work atoms keyed by value rounded to this grid.
inline constexpr double kWorkGrid = 1e-9;

using WorkHistogram = std::map<long long, double>;  // rounded work -> probability

inline long long work_key(double w) { return std::llround(w / kWorkGrid); }

struct WorkValue {
  double work;
  double probability;
};

// Exact forward work distribution by summing over every path; atoms closer than 1e-9 merge.
inline std::vector<WorkValue> exact_work_distribution(const MarkovChainSpec& spec) {
  const int n = spec.steps(), d = spec.states();
  require(std::pow(d, n + 1) <= double(1 << 22), "exact_work_distribution: too many paths");
  const auto& l = spec.protocol();
  std::vector<TransitionMatrix> kernels;
  for (int k = 1; k <= n; ++k) kernels.push_back(spec.kernel(l[k]));
  const auto p0 = spec.equilibrium(l[0]);
  std::vector<WorkValue> raw;
  std::vector<int> path(n + 1, 0);
  const long long total = std::llround(std::pow(d, n + 1));
  for (long long code = 0; code < total; ++code) {
    long long c = code;
    for (int k = 0; k <= n; ++k) path[k] = static_cast<int>(c % d), c /= d;
    double prob = p0[path[0]], w = 0;
    for (int k = 0; k < n && prob > 0; ++k) {
      w += spec.energy(path[k], l[k + 1]) - spec.energy(path[k], l[k]);
      prob *= kernels[k][path[k]][path[k + 1]];
    }
    if (prob > 0) raw.push_back({w, prob});
  }
  std::sort(raw.begin(), raw.end(), [](const auto& a, const auto& b) { return a.work < b.work; });
  std::vector<WorkValue> out;
  for (const auto& a : raw) {
    if (!out.empty() && a.work - out.back().work <= kWorkGrid) out.back().probability += a.probability;
    else out.push_back(a);
  }
  return out;
}

struct CrooksReport {
  WorkHistogram forward;
  WorkHistogram reverse;
  std::vector<double> forward_work;  // per trajectory
  double slope;                      // of ln[P_F(W) / P_R(-W)] against W
  double slope_error;
  double intercept;
  double crossing;                   // W where the two histograms cross
  Estimate integral;                 // <exp(-beta (W - dF))>_F
  double delta_f;
  int excluded_bins;                 // bins missing in one of the two histograms
};

inline std::vector<double> sample_markov_work(const MarkovChainSpec& spec, std::size_t n, std::uint64_t seed,
                                              std::uint64_t stream_offset = 0) {
  const auto& l = spec.protocol();
  std::vector<TransitionMatrix> kernels;
  for (int k = 1; k <= spec.steps(); ++k) kernels.push_back(spec.kernel(l[k]));
  const auto p0 = spec.equilibrium(l[0]);
  std::vector<double> out(n);
  parallel_for(n, [&](std::size_t i) {
    auto rng = stream_rng(seed, stream_offset + i);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto draw = [&](std::span<const double> probs) {
      double r = u(rng), acc = 0;
      for (std::size_t s = 0; s + 1 < probs.size(); ++s)
        if (r < (acc += probs[s])) return static_cast<int>(s);
      return static_cast<int>(probs.size()) - 1;
    };
    int s = draw(p0);
    double w = 0;
    for (int k = 0; k < spec.steps(); ++k) {
      w += spec.energy(s, l[k + 1]) - spec.energy(s, l[k]);
      s = draw(kernels[k][s]);
    }
    out[i] = w;
  });
  return out;
}

inline CrooksReport crooks_markov(const MarkovChainSpec& spec, std::size_t n, std::uint64_t seed) {
  CrooksReport r;
  r.delta_f = spec.free_energy_change();
  r.forward_work = sample_markov_work(spec, n, seed, 0);
  const auto reverse_work = sample_markov_work(spec.reversed(), n, seed, n);
  for (double w : r.forward_work) r.forward[work_key(w)] += 1.0 / n;
  for (double w : reverse_work) r.reverse[work_key(w)] += 1.0 / n;
  std::vector<double> xs, ys, ws;
  r.excluded_bins = 0;
  for (const auto& [key, pf] : r.forward) {
    const auto it = r.reverse.find(-key);
    if (it == r.reverse.end()) {
      ++r.excluded_bins;
      continue;
    }
    xs.push_back(key * kWorkGrid);
    ys.push_back(std::log(pf / it->second));
    // inverse variance of the log ratio from binomial counts
    ws.push_back(1.0 / (1.0 / (pf * n) + 1.0 / (it->second * n)));
  }
  for (const auto& [key, pr] : r.reverse)
    if (!r.forward.count(-key)) ++r.excluded_bins;
  if (xs.size() >= 2) {
    const auto fit = linear_fit(xs, ys, ws);
    r.slope = fit.slope, r.slope_error = fit.slope_error, r.intercept = fit.intercept;
    r.crossing = -fit.intercept / fit.slope;
  } else {
    r.slope = r.slope_error = r.intercept = r.crossing = std::numeric_limits<double>::quiet_NaN();
  }
  std::vector<double> shifted(r.forward_work);
  for (double& w : shifted) w -= r.delta_f;
  r.integral = TrajectoryEnsemble::exp_average(shifted, spec.beta());
  return r;
}

// ------------------------------------------------------------------ phase-space entropy FT

struct WignerOscillator {
  double mass = 1.0;
  double frequency = 1.0;
  double gamma = 0.5;
  double beta = 1.0;
  double hbar = 0.1;

  double d_pp() const {
    return mass * gamma / beta + mass * beta * gamma * hbar * hbar * (frequency * frequency - gamma * gamma) / 12;
  }
  double d_xp() const { return beta * gamma * hbar * hbar / 12; }
  // stationary variances of x - lambda and p
  double var_x() const { return (d_pp() + mass * gamma * d_xp()) / (gamma * mass * mass * frequency * frequency); }
  double var_p() const { return d_pp() / gamma; }
  double quantum_parameter() const { return beta * hbar * frequency; }
  // ln W_stat at displacement (x - lambda, p)
  double log_stationary(double dx, double p) const {
    return -0.5 * (p * p / var_p() + dx * dx / var_x()) - std::log(2 * 3.14159265358979323846 * std::sqrt(var_x() * var_p()));
  }
};

struct GaussianKernel {
  Eigen::Matrix2d propagator;  // exp(A dt)
  Eigen::Matrix2d cholesky;    // lower factor of the step covariance
};

// Exact one-step transition of the linear phase-space process: drift A y with the generator's
// diffusion. The step covariance follows from stationarity, C - M C M^T, which stays positive
// definite for dt above a threshold set by the cross diffusion.
inline GaussianKernel wigner_kernel(const WignerOscillator& o, double dt) {
  Eigen::Matrix2d a;
  a << 0.0, 1.0 / o.mass, -o.mass * o.frequency * o.frequency, -o.gamma;
  const Eigen::Matrix2d m = (a * dt).exp();
  Eigen::Matrix2d c = Eigen::Matrix2d::Zero();
  c(0, 0) = o.var_x(), c(1, 1) = o.var_p();
  const Eigen::Matrix2d q = c - m * c * m.transpose();
  Eigen::LLT<Eigen::Matrix2d> llt(0.5 * (q + q.transpose()));
  if (llt.info() != Eigen::Success || q.determinant() <= 0)
    throw InvalidInput("wigner_entropy_ft: step covariance is not positive definite; increase dt or leave the high-temperature regime");
  return {m, llt.matrixL()};
}

inline constexpr double kWignerRegimeLimit = 0.3;

// Dragged oscillator, centre lambda(t). Each step first moves lambda (accumulating the change
// of -ln W_stat at fixed phase-space point), then applies the exact Gaussian kernel of the
// generator at the new lambda.
inline TrajectoryEnsemble wigner_entropy_ft(const WignerOscillator& o, const Schedule& lambda, std::size_t n,
                                            std::uint64_t seed, double dt = 0.01) {
  require(o.mass > 0 && o.frequency > 0 && o.gamma > 0 && o.beta > 0 && o.hbar >= 0, "wigner_entropy_ft: invalid oscillator");
  const int steps = std::max(1, static_cast<int>(std::llround(lambda.duration() / dt)));
  const double h = lambda.duration() / steps;
  const auto kern = wigner_kernel(o, h);
  TrajectoryEnsemble out;
  out.seed = seed, out.count = n;
  out.regime_warning = o.quantum_parameter() > kWignerRegimeLimit;
  out.entropy.resize(n);
  const double sx = std::sqrt(o.var_x()), sp = std::sqrt(o.var_p());
  parallel_for(n, [&](std::size_t i) {
    auto rng = stream_rng(seed, i);
    std::normal_distribution<double> g(0.0, 1.0);
    double l = lambda(0.0);
    Eigen::Vector2d y(l + sx * g(rng), sp * g(rng));
    double sigma = 0;
    for (int k = 0; k < steps; ++k) {
      const double next = lambda((k + 1) * h);
      sigma -= o.log_stationary(y[0] - next, y[1]) - o.log_stationary(y[0] - l, y[1]);
      l = next;
      Eigen::Vector2d shifted(y[0] - l, y[1]);
      const Eigen::Vector2d noise(g(rng), g(rng));
      shifted = kern.propagator * shifted + kern.cholesky * noise;
      y << shifted[0] + l, shifted[1];
      if (!y.allFinite() || y.cwiseAbs().maxCoeff() > kBlowUp) throw IntegrationFailure("wigner_entropy_ft: trajectory blew up");
    }
    out.entropy[i] = sigma;
  });
  return out;
}

}  // namespace qthermo::stochastic
