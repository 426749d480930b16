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

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <numeric>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <unsupported/Eigen/MatrixFunctions>

#include "qthermo/stochastic.hpp"

namespace qthermo::stochastic {
namespace {

double variance(const std::vector<double>& xs) {
  const double m = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
  double v = 0;
  for (double x : xs) v += (x - m) * (x - m);
  return v / (xs.size() - 1);
}

class WorkerScope {
 public:
  explicit WorkerScope(int n) { setenv("QTHERMO_WORKERS", std::to_string(n).c_str(), 1); }
  ~WorkerScope() { unsetenv("QTHERMO_WORKERS"); }
};

// ---------------------------------------------------------------- Langevin

TEST(Langevin, RejectsInvalidParameters) {
  LangevinParams p;
  p.gamma = 0;
  EXPECT_THROW(langevin_simulate(p, constant_schedule(0, 1), 10, 1, {.dt = 1e-3, .start = {{0, 0}}}), InvalidInput);
  p.gamma = 1;
  p.diffusion_override = -1;
  EXPECT_THROW(p.validate(), InvalidInput);
}

TEST(Langevin, EnforcesStableStep) {
  LangevinParams p;
  p.gamma = 2;
  EXPECT_THROW(langevin_simulate(p, constant_schedule(0, 1), 10, 1, {.dt = 0.06, .start = {{0, 0}}}), InvalidInput);
  p.gamma = 0.1;
  p.potential = dragged_harmonic(100);
  EXPECT_THROW(langevin_simulate(p, constant_schedule(0, 1), 10, 1, {.dt = 0.02}), InvalidInput);
  EXPECT_NO_THROW(langevin_simulate(p, constant_schedule(0, 1), 10, 1, {.dt = 0.005}));
}

TEST(Langevin, BoltzmannStartNeedsHarmonicFamily) {
  LangevinParams p;
  EXPECT_THROW(langevin_simulate(p, constant_schedule(0, 1), 10, 1), InvalidInput);
}

TEST(Langevin, BlowUpIsAnIntegrationFailure) {
  LangevinParams p;
  p.potential = {[](double x, double) { return -x * x * x * x; }, [](double x, double) { return -4 * x * x * x; },
                 [](double, double) { return 0.0; }};
  EXPECT_THROW(langevin_simulate(p, constant_schedule(0, 5), 4, 1, {.dt = 1e-3, .start = {{10, 0}}}),
               IntegrationFailure);
}

TEST(Langevin, StaticProtocolDoesNoWork) {
  LangevinParams p;
  p.potential = dragged_harmonic(2);
  const auto e = langevin_simulate(p, constant_schedule(0.7, 3), 500, 42, {.dt = 0.01});
  for (double w : e.work) EXPECT_EQ(w, 0.0);
  EXPECT_EQ(e.mean_work().mean, 0.0);
}

TEST(Langevin, EquilibriumIsStationaryAtFixedPotential) {
  LangevinParams p;
  p.beta = 2;
  p.potential = dragged_harmonic(1.5);
  const auto e = langevin_simulate(p, constant_schedule(0, 5), 20000, 3, {.dt = 0.01});
  const auto de = mean_estimate(e.energy_change);
  EXPECT_LT(std::abs(de.mean), 3 * de.error + 1e-3);
}

TEST(Langevin, FirstLawResidualVanishesWithStep) {
  LangevinParams p;
  p.potential = dragged_harmonic(1);
  const auto drive = linear_ramp(0, 2, 4);
  std::vector<double> log_dt, log_res;
  for (double dt : {0.04, 0.02, 0.01, 0.005}) {
    const auto e = langevin_simulate(p, drive, 400, 11, {.dt = dt});
    double res = 0;
    for (std::size_t i = 0; i < e.count; ++i) res += std::abs(e.energy_change[i] - e.work[i] - e.heat[i]);
    res /= e.count;
    log_dt.push_back(std::log(dt));
    log_res.push_back(std::log(res));
  }
  const auto fit = linear_fit(log_dt, log_res);
  EXPECT_GE(fit.slope, 0.95);
  EXPECT_LT(std::exp(log_res.back()), 1e-2);
}

TEST(Langevin, DraggedTrapSatisfiesJarzynski) {
  LangevinParams p;
  p.potential = dragged_harmonic(1);
  const auto e = langevin_simulate(p, linear_ramp(0, 1.5, 2), 40000, 5, {.dt = 0.01});
  const auto avg = TrajectoryEnsemble::exp_average(e.work, p.beta);
  EXPECT_LT(std::abs(avg.mean - 1.0), 3 * avg.error);
  EXPECT_GT(e.mean_work().mean, 0.0);
}

TEST(Langevin, SlowCompressionWithBathApproachesFreeEnergy) {
  LangevinParams p;
  p.potential = breathing_harmonic(1, 2);
  const double df = std::log(2.0) / p.beta;
  std::vector<double> excess, spread;
  for (double tau : {4.0, 40.0}) {
    const auto e = langevin_simulate(p, linear_ramp(1, 2, tau), 4000, 9, {.dt = 0.01});
    excess.push_back(e.mean_work().mean - df);
    spread.push_back(variance(e.work));
  }
  EXPECT_LT(spread[1], 0.2 * spread[0]);
  EXPECT_LT(std::abs(excess[1]), 0.2 * excess[0]);
  EXPECT_GT(excess[0], 0.0);
}

TEST(Langevin, ReproducibleAcrossWorkerCounts) {
  LangevinParams p;
  p.potential = dragged_harmonic(1);
  const auto drive = linear_ramp(0, 1, 1);
  TrajectoryEnsemble a, b, c;
  {
    WorkerScope w(1);
    a = langevin_simulate(p, drive, 37, 2024, {.dt = 0.01});
  }
  {
    WorkerScope w(4);
    b = langevin_simulate(p, drive, 37, 2024, {.dt = 0.01});
  }
  c = langevin_simulate(p, drive, 37, 2025, {.dt = 0.01});
  EXPECT_EQ(a.work, b.work);
  EXPECT_EQ(a.heat, b.heat);
  EXPECT_NE(a.work, c.work);
}

// ---------------------------------------------------------------- FDT

TEST(Fdt, DiffusionFromVelocityAutocorrelation) {
  LangevinParams p;
  const auto r = fdt_check(p, 100000, 77);
  EXPECT_NEAR(r.expected, 1.0, 1e-15);
  EXPECT_LT(std::abs(r.diffusion.mean - r.expected), 3 * r.diffusion.error);
  EXPECT_LT(std::abs(r.ratio - 1.0), 3 * r.ratio_error);
  EXPECT_LT(std::abs(r.velocity_variance.mean - 1.0 / (p.beta * p.mass)), 3 * r.velocity_variance.error);
}

TEST(Fdt, DoublingBetaHalvesDiffusion) {
  LangevinParams p;
  p.beta = 2;
  const auto r = fdt_check(p, 100000, 78);
  EXPECT_DOUBLE_EQ(r.expected, 0.5);
  EXPECT_LT(std::abs(r.diffusion.mean - 0.5), 3 * r.diffusion.error);
}

TEST(Fdt, OverriddenDiffusionSetsVelocityVariance) {
  LangevinParams p;
  p.gamma = 0.5;
  p.mass = 2;
  p.diffusion_override = 3.0;
  const auto r = fdt_check(p, 100000, 79);
  EXPECT_DOUBLE_EQ(r.velocity_variance_expected, 3.0 / (0.5 * 4));
  EXPECT_LT(std::abs(r.velocity_variance.mean - 1.5), 3 * r.velocity_variance.error);
  EXPECT_GT(std::abs(r.velocity_variance.mean - 1.0 / (p.beta * p.mass)), 10 * r.velocity_variance.error);
  EXPECT_LT(std::abs(r.diffusion.mean - 3.0), 3 * r.diffusion.error);
}

// ---------------------------------------------------------------- Hamiltonian Jarzynski

TEST(HamiltonianJarzynski, QuenchClosedFormMatchesQuadrature) {
  for (auto [w0, wt] : {std::pair{1.0, 2.0}, {0.5, 0.7}, {2.0, 5.0}}) {
    const double beta = 1.3, m = 1.0;
    // Gibbs density of x at w0 against exp(-beta dH)
    const double s2 = 1.0 / (beta * m * w0 * w0);
    auto f = [&](double x) {
      return std::exp(-0.5 * x * x / s2 - beta * 0.5 * m * (wt * wt - w0 * w0) * x * x) / std::sqrt(2 * M_PI * s2);
    };
    const double q = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        f, -std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(), 15, 1e-14);
    EXPECT_NEAR(quench_exp_average(w0, wt), q, 1e-12);
    EXPECT_NEAR(quench_exp_average(w0, wt), w0 / wt, 1e-14);
  }
}

TEST(HamiltonianJarzynski, SampledQuench) {
  const Schedule quench(1e-3, [](double t) { return t > 0 ? 2.0 : 1.0; });
  const auto r = hamiltonian_jarzynski(quench, 1.0, 200000, 8, 1.0, 1e-3);
  EXPECT_DOUBLE_EQ(r.expected, 0.5);
  EXPECT_LT(std::abs(r.exp_average.mean - r.expected), 3 * r.exp_average.error);
}

TEST(HamiltonianJarzynski, FiniteRampEquality) {
  const auto r = hamiltonian_jarzynski(smooth_ramp(1.0, 1.6, 1.5), 0.8, 100000, 21, 1.0, 1e-3);
  EXPECT_LT(std::abs(r.exp_average.mean - r.expected), 3 * r.exp_average.error);
  double mean = std::accumulate(r.work.begin(), r.work.end(), 0.0) / r.work.size();
  EXPECT_GT(mean, std::log(1.6) / 0.8);
}

TEST(HamiltonianJarzynski, ConstantFrequencyDoesNoWork) {
  const auto r = hamiltonian_jarzynski(constant_schedule(1.3, 2), 1.0, 1000, 4);
  for (double w : r.work) EXPECT_EQ(w, 0.0);
  EXPECT_EQ(r.exp_average.mean, 1.0);
}

// Without a bath the slow ramp conserves E / omega, so each trajectory's work tends to
// E0 (omega_tau / omega_0 - 1) and keeps a finite spread.
TEST(HamiltonianJarzynski, SlowRampFollowsAdiabaticInvariant) {
  const double w0 = 1.0, wt = 2.0, beta = 1.0;
  const auto r = hamiltonian_jarzynski(smooth_ramp(w0, wt, 200), beta, 2000, 6, 1.0, 0.01);
  std::vector<double> x0_energy(r.work.size());
  for (std::size_t i = 0; i < r.work.size(); ++i) {
    auto rng = stream_rng(6, i);
    std::normal_distribution<double> g(0.0, 1.0);
    const double x = g(rng) / (w0 * std::sqrt(beta)), p = g(rng) / std::sqrt(beta);
    x0_energy[i] = 0.5 * p * p + 0.5 * w0 * w0 * x * x;
    EXPECT_NEAR(r.work[i], x0_energy[i] * (wt / w0 - 1), 1e-3 * (1 + x0_energy[i]));
  }
  EXPECT_NEAR(variance(r.work), 1.0 / (beta * beta), 0.1);
}

// ---------------------------------------------------------------- Markov Crooks

MarkovChainSpec two_state(std::vector<double> protocol, double beta = 1.0) {
  return MarkovChainSpec([](int s, double l) { return s == 0 ? 0.0 : l; }, 2, std::move(protocol), beta);
}

std::vector<double> ramp_protocol(double from, double to, int steps) {
  std::vector<double> l(steps + 1);
  for (int k = 0; k <= steps; ++k) l[k] = from + (to - from) * k / steps;
  return l;
}

TEST(Crooks, DetailedBalanceCheckedAtConstruction) {
  auto bad = [](double) { return TransitionMatrix{{0.5, 0.5}, {0.1, 0.9}}; };
  EXPECT_THROW(MarkovChainSpec([](int s, double l) { return s * l; }, 2, {0.0, 1.0}, 1.0, bad), InvalidInput);
  auto unnormalized = [](double) { return TransitionMatrix{{0.5, 0.6}, {0.6, 0.5}}; };
  EXPECT_THROW(MarkovChainSpec([](int, double) { return 0.0; }, 2, {0.0, 1.0}, 1.0, unnormalized), InvalidInput);
  EXPECT_THROW(two_state({1.0}), InvalidInput);
  EXPECT_NO_THROW(two_state(ramp_protocol(-1, 2, 5), 0.7));
}

TEST(Crooks, ExactPathSumSatisfiesTheorem) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int trial = 0; trial < 10; ++trial) {
    const int steps = 4 + trial % 9;
    std::vector<double> l(steps + 1);
    for (double& x : l) x = u(rng);
    const double beta = 0.5 + 0.1 * trial;
    const auto spec = trial % 2 ? two_state(l, beta)
                                : MarkovChainSpec([](int s, double x) { return s * x + 0.3 * (s == 2); }, 3,
                                                  std::vector<double>(l.begin(), l.begin() + std::min(steps, 8) + 1), beta);
    const double df = spec.free_energy_change();
    const auto fwd = exact_work_distribution(spec);
    const auto rev = exact_work_distribution(spec.reversed());
    double total = 0;
    for (const auto& a : fwd) total += a.probability;
    EXPECT_NEAR(total, 1.0, 1e-12);
    for (const auto& a : fwd) {
      double pr = 0;
      for (const auto& b : rev)
        if (std::abs(a.work + b.work) <= 1e-8) pr += b.probability;
      EXPECT_NEAR(pr, std::exp(-beta * (a.work - df)) * a.probability, 1e-12) << "trial " << trial;
    }
  }
}

TEST(Crooks, TimeSymmetricProtocolOnSymmetricSystem) {
  const auto spec = two_state({0.0, 0.5, 1.0, 0.5, 0.0}, 1.2);
  const auto fwd = exact_work_distribution(spec);
  const auto rev = exact_work_distribution(spec.reversed());
  ASSERT_EQ(fwd.size(), rev.size());
  for (std::size_t i = 0; i < fwd.size(); ++i) {
    EXPECT_NEAR(fwd[i].work, rev[i].work, 1e-14);
    EXPECT_NEAR(fwd[i].probability, rev[i].probability, 1e-14);
  }
  EXPECT_NEAR(spec.free_energy_change(), 0.0, 1e-15);
}

TEST(Crooks, SampledHistogramsGiveSlopeBeta) {
  const double beta = 0.8;
  const auto spec = two_state(ramp_protocol(0, 2, 10), beta);
  const auto r = crooks_markov(spec, 1000000, 17);
  EXPECT_NEAR(r.slope, beta, 0.05 * beta);
  EXPECT_NEAR(r.intercept, -beta * r.delta_f, 0.05 * beta * std::abs(r.delta_f) + 3 * r.slope_error);
  EXPECT_NEAR(r.crossing, r.delta_f, 0.05 * std::abs(r.delta_f) + 0.02);
  EXPECT_LT(std::abs(r.integral.mean - 1.0), 3 * r.integral.error);
  EXPECT_GE(r.excluded_bins, 0);
}

TEST(Crooks, SamplingMatchesExactDistribution) {
  const auto spec = two_state(ramp_protocol(-0.5, 1, 6), 1.0);
  const auto exact = exact_work_distribution(spec);
  const auto r = crooks_markov(spec, 200000, 3);
  for (const auto& a : exact) {
    double sampled = 0;
    for (const auto& [key, p] : r.forward)
      if (std::abs(key * kWorkGrid - a.work) <= 1e-8) sampled += p;
    const double se = std::sqrt(a.probability * (1 - a.probability) / 200000);
    EXPECT_LT(std::abs(sampled - a.probability), 4 * se + 1e-12);
  }
}

// ---------------------------------------------------------------- phase-space entropy FT

TEST(Wigner, ClassicalLimitOfDiffusion) {
  WignerOscillator o{.mass = 1.7, .frequency = 1.2, .gamma = 0.4, .beta = 0.9, .hbar = 0.0};
  EXPECT_EQ(o.d_xp(), 0.0);
  EXPECT_DOUBLE_EQ(o.d_pp(), o.mass * o.gamma / o.beta);
  EXPECT_DOUBLE_EQ(o.var_p(), o.mass / o.beta);
  EXPECT_DOUBLE_EQ(o.var_x(), 1.0 / (o.beta * o.mass * o.frequency * o.frequency));
  o.hbar = 1e-6;
  EXPECT_NEAR(o.d_pp(), o.mass * o.gamma / o.beta, 1e-12);
}

Eigen::Matrix2d drift(const WignerOscillator& o) {
  Eigen::Matrix2d a;
  a << 0, 1 / o.mass, -o.mass * o.frequency * o.frequency, -o.gamma;
  return a;
}

Eigen::Matrix2d diffusion_matrix(const WignerOscillator& o) {
  Eigen::Matrix2d b;
  b << 0, o.d_xp(), o.d_xp(), 2 * o.d_pp();
  return b;
}

TEST(Wigner, StationaryCovarianceSolvesLyapunov) {
  for (double hbar : {0.0, 0.05, 0.3}) {
    const WignerOscillator o{.mass = 1.3, .frequency = 0.9, .gamma = 0.6, .beta = 1.1, .hbar = hbar};
    Eigen::Matrix2d c = Eigen::Matrix2d::Zero();
    c(0, 0) = o.var_x(), c(1, 1) = o.var_p();
    const Eigen::Matrix2d a = drift(o);
    const Eigen::Matrix2d res = a * c + c * a.transpose() + diffusion_matrix(o);
    EXPECT_LT(res.cwiseAbs().maxCoeff(), 1e-13);
  }
}

TEST(Wigner, KernelCovarianceMatchesQuadrature) {
  const WignerOscillator o{.mass = 1.0, .frequency = 1.0, .gamma = 0.5, .beta = 1.0, .hbar = 0.1};
  const double dt = 0.05;
  const auto k = wigner_kernel(o, dt);
  const Eigen::Matrix2d a = drift(o), b = diffusion_matrix(o);
  EXPECT_LT((k.propagator - (a * dt).exp()).cwiseAbs().maxCoeff(), 1e-15);
  Eigen::Matrix2d q = Eigen::Matrix2d::Zero();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      q(i, j) = boost::math::quadrature::gauss<double, 30>::integrate(
          [&](double s) {
            const Eigen::Matrix2d e = (a * s).exp();
            return (e * b * e.transpose())(i, j);
          },
          0.0, dt);
  const Eigen::Matrix2d llt = k.cholesky * k.cholesky.transpose();
  EXPECT_LT((llt - q).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Wigner, TinyStepLosesDefinitenessAndIsRejected) {
  const WignerOscillator o{.mass = 1.0, .frequency = 1.0, .gamma = 0.5, .beta = 1.0, .hbar = 0.3};
  EXPECT_THROW(wigner_kernel(o, 1e-5), InvalidInput);
  EXPECT_NO_THROW(wigner_kernel(o, 0.05));
}

TEST(Wigner, StaticProtocolHasNoEntropyProduction) {
  const WignerOscillator o{.hbar = 0.1};
  const auto e = wigner_entropy_ft(o, constant_schedule(0.4, 2), 500, 3);
  for (double s : e.entropy) EXPECT_EQ(s, 0.0);
  EXPECT_FALSE(e.regime_warning);
}

TEST(Wigner, RegimeWarningAboveThreshold) {
  const WignerOscillator o{.frequency = 1.0, .beta = 1.0, .hbar = 0.5};
  EXPECT_TRUE(wigner_entropy_ft(o, constant_schedule(0, 1), 10, 3, 0.05).regime_warning);
}

TEST(Wigner, IntegralFluctuationTheorem) {
  const WignerOscillator o{.mass = 1.0, .frequency = 1.0, .gamma = 0.5, .beta = 1.0, .hbar = 0.1};
  ASSERT_NEAR(o.quantum_parameter(), 0.1, 1e-15);
  const auto e = wigner_entropy_ft(o, linear_ramp(0, 1, 2), 100000, 13);
  const auto avg = TrajectoryEnsemble::exp_average(e.entropy, 1.0);
  EXPECT_LT(std::abs(avg.mean - 1.0), 3 * avg.error);
  const auto mean = mean_estimate(e.entropy);
  EXPECT_GT(mean.mean, 0.0);
  const auto negative = std::count_if(e.entropy.begin(), e.entropy.end(), [](double s) { return s < 0; });
  EXPECT_GT(negative, 0);
}

}  // namespace
}  // namespace qthermo::stochastic
