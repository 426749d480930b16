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

#include <array>
#include <cmath>
#include <random>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "support.hpp"

namespace qthermo {
namespace {

using testing::random_hermitian;
using testing::random_state;

TEST(Gibbs, QubitMatchesTanhForm) {
  const double delta = 1.3, beta = 0.7;
  const Mat h = 0.5 * delta * pauli_z();
  const auto g = gibbs_state(h, beta);
  const double t = std::tanh(beta * delta / 2);
  // pauli_z = diag(+1, -1): the upper level is index 0.
  EXPECT_NEAR(g.state.matrix()(0, 0).real(), 0.5 * (1 - t), 1e-14);
  EXPECT_NEAR(g.state.matrix()(1, 1).real(), 0.5 * (1 + t), 1e-14);
  EXPECT_NEAR(g.log_partition, std::log(2 * std::cosh(beta * delta / 2)), 1e-14);
}

TEST(Gibbs, InfiniteTemperatureIsMaximallyMixed) {
  std::mt19937_64 rng(3);
  const Mat h = random_hermitian(rng, 5);
  EXPECT_LT(max_abs(gibbs_state(h, 0.0).state.matrix() - identity(5) / 5.0), 1e-14);
}

TEST(Gibbs, ThreeLevelPopulationsFromScalarExponentials) {
  const std::array<double, 3> levels{0, 1, 2};
  const auto g = gibbs_state(diagonal(levels), 1.0);
  const double z = 1 + std::exp(-1.0) + std::exp(-2.0);
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(g.state.matrix()(k, k).real(), std::exp(-k * 1.0) / z, 1e-15);
  EXPECT_NEAR(g.free_energy, -std::log(z), 1e-14);
}

TEST(Gibbs, NegativeBetaInvertsPopulations) {
  const std::array<double, 2> levels{0, 1};
  const auto g = gibbs_state(diagonal(levels), -2.0);
  EXPECT_GT(g.state.matrix()(1, 1).real(), g.state.matrix()(0, 0).real());
}

TEST(Gibbs, RejectsNonHermitian) {
  Mat h = Mat::Zero(2, 2);
  h(0, 1) = 1.0;
  EXPECT_THROW(gibbs_state(h, 1.0), InvalidInput);
}

TEST(Entropies, Basics) {
  const auto mixed = DensityState::maximally_mixed(2);
  EXPECT_NEAR(von_neumann_entropy(mixed), std::log(2.0), 1e-15);
  std::mt19937_64 rng(5);
  const auto rho = random_state(rng, 4);
  EXPECT_NEAR(relative_entropy(rho, rho), 0.0, 1e-12);
}

TEST(Entropies, QubitRelativeEntropyScalarOracle) {
  const std::array<double, 2> p{0.9, 0.1}, q{0.5, 0.5};
  const auto rho = DensityState::from_populations(p), sigma = DensityState::from_populations(q);
  EXPECT_NEAR(relative_entropy(rho, sigma), 0.9 * std::log(1.8) + 0.1 * std::log(0.2), 1e-14);
  const auto e = entropies(rho, &sigma);
  EXPECT_NEAR(e.relative, 0.9 * std::log(1.8) + 0.1 * std::log(0.2), 1e-14);
}

TEST(Entropies, SupportViolationIsInfinite) {
  const std::array<double, 2> p{0.5, 0.5}, q{1.0, 0.0};
  EXPECT_TRUE(std::isinf(relative_entropy(DensityState::from_populations(p), DensityState::from_populations(q))));
}

TEST(Entropies, RelativeEntropyNonnegativeOnRandomPairs) {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 200; ++k) {
    const auto a = random_state(rng, 3), b = random_state(rng, 3);
    const double s = relative_entropy(a, b);
    EXPECT_GE(s, 0.0);
    if (max_abs(a.matrix() - b.matrix()) > 1e-8) {
      EXPECT_GT(s, 0.0);
    }
  }
}

TEST(PartialTrace, ProductAndBell) {
  std::mt19937_64 rng(7);
  const auto a = random_state(rng, 2), b = random_state(rng, 3);
  const std::array<int, 2> dims{2, 3};
  const std::array<int, 1> keep_a{0}, keep_b{1};
  const Mat ab = kron(a.matrix(), b.matrix());
  EXPECT_LT(max_abs(partial_trace(ab, dims, keep_a) - a.matrix()), 1e-14);
  EXPECT_LT(max_abs(partial_trace(ab, dims, keep_b) - b.matrix()), 1e-14);

  Vec bell = Vec::Zero(4);
  bell[0] = bell[3] = 1 / std::sqrt(2.0);
  const Mat rho = bell * bell.adjoint();
  const std::array<int, 2> qq{2, 2};
  EXPECT_LT(max_abs(partial_trace(rho, qq, keep_a) - identity(2) / 2.0), 1e-15);
  EXPECT_LT(max_abs(partial_trace(rho, qq, keep_b) - identity(2) / 2.0), 1e-15);
}

TEST(PartialTrace, SequentialTracesGiveUnitTrace) {
  std::mt19937_64 rng(8);
  const auto rho = random_state(rng, 6);
  const std::array<int, 2> dims{2, 3};
  const std::array<int, 1> keep_a{0};
  const Mat ra = partial_trace(rho.matrix(), dims, keep_a);
  const std::array<int, 1> one{2};
  const std::array<int, 0> none{};
  EXPECT_NEAR(partial_trace(ra, one, none).trace().real(), 1.0, 1e-14);
}

TEST(PartialTrace, DimensionMismatchThrows) {
  const std::array<int, 2> dims{2, 2};
  const std::array<int, 1> keep{0};
  EXPECT_THROW(partial_trace(identity(6) / 6.0, dims, keep), InvalidInput);
}

TEST(Propagate, ConstantHamiltonianIsExact) {
  std::mt19937_64 rng(13);
  const Mat h = random_hermitian(rng, 4);
  const Mat exact = expm_hermitian(h, -kI * 0.8);
  for (int slices : {1, 3, 17}) EXPECT_LT(max_abs(propagate_unitary(constant_path(h, 0.8), slices) - exact), 1e-12);
}

HamiltonianPath lz_path(double v, double gap, double t0, double duration) {
  return {duration, [=](double s) {
            const double t = t0 + s;
            Mat h(2, 2);
            h << 0.5 * v * t, 0.5 * gap, 0.5 * gap, -0.5 * v * t;
            return h;
          }};
}

TEST(Propagate, SecondOrderSelfConvergence) {
  const auto path = lz_path(2.0, 1.0, -3.0, 6.0);
  const Mat u16 = propagate_unitary(path, 16), u32 = propagate_unitary(path, 32), u64 = propagate_unitary(path, 64);
  const double d1 = max_abs(u16 - u32), d2 = max_abs(u32 - u64);
  EXPECT_LT(d2, 0.5 * d1);
  EXPECT_NEAR(d1 / d2, 4.0, 0.5);
}

TEST(Propagate, UnitarityOnRandomSchedules) {
  std::mt19937_64 rng(17);
  for (int k = 0; k < 10; ++k) {
    const Mat a = random_hermitian(rng, 3), b = random_hermitian(rng, 3);
    const HamiltonianPath path{1.5, [=](double t) { return ((1 - t / 1.5) * a + (t / 1.5) * b).eval(); }};
    const Mat u = propagate_unitary(path, 200);
    EXPECT_LT(max_abs(u.adjoint() * u - identity(3)), 1e-9);
  }
}

TEST(Propagate, LandauZenerMatchesIndependentOde) {
  using State = std::vector<std::complex<double>>;
  const double v = 1.5, gap = 0.8, t0 = -6.0, dur = 12.0;
  auto rhs = [&](const State& psi, State& dpsi, double s) {
    const double t = t0 + s;
    dpsi[0] = -kI * (0.5 * v * t * psi[0] + 0.5 * gap * psi[1]);
    dpsi[1] = -kI * (0.5 * gap * psi[0] - 0.5 * v * t * psi[1]);
  };
  State psi{1.0, 0.0};
  namespace ode = boost::numeric::odeint;
  ode::integrate_adaptive(ode::make_controlled(1e-13, 1e-13, ode::runge_kutta_dopri5<State>()), rhs, psi, 0.0, dur,
                          1e-3);
  const Mat u = propagate_unitary(lz_path(v, gap, t0, dur), 8192);
  const double p_oracle = std::norm(psi[1]);
  const double p_slices = std::norm(u(1, 0));
  EXPECT_NEAR(p_slices, p_oracle, 1e-6);
}

TEST(Lindblad, ClosedSystemMatchesUnitary) {
  std::mt19937_64 rng(19);
  const Mat h = random_hermitian(rng, 3);
  const auto rho0 = random_state(rng, 3);
  const auto path = lindblad_evolve(Lindbladian(h, {}), rho0, 1.2, 400);
  const Mat u = expm_hermitian(h, -kI * 1.2);
  EXPECT_LT(max_abs(path.final_state() - u * rho0.matrix() * u.adjoint()), 1e-8);
}

TEST(Lindblad, ThermalQubitRelaxesToGibbs) {
  const double w = 1.0, gamma = 1.0, absorb = 0.4;
  const Mat h = 0.5 * w * (identity(2) - pauli_z());  // |1> excited with energy w
  const std::vector<JumpOperator> jumps{{sigma_minus(), gamma}, {sigma_plus(), absorb}};
  const Vec excited = basis_vector(2, 1);
  const auto path = lindblad_evolve(Lindbladian(h, jumps), DensityState::pure(excited), 30.0, 3000, 100);
  const double beta = std::log(gamma / absorb) / w;
  EXPECT_LT(max_abs(path.final_state() - gibbs_state(h, beta).state.matrix()), 1e-8);
  EXPECT_LT(path.max_trace_drift, 1e-8);
  EXPECT_GT(path.min_eigenvalue, -1e-7);
}

TEST(Lindblad, PureDephasingCoherenceDecay) {
  const double g = 0.3, t = 2.0;
  Vec plus(2);
  plus << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
  const auto path = lindblad_evolve(Lindbladian(Mat(Mat::Zero(2, 2)), {{pauli_z(), g}}), DensityState::pure(plus), t, 200);
  EXPECT_NEAR(path.final_state()(0, 0).real(), 0.5, 1e-14);
  EXPECT_NEAR(std::abs(path.final_state()(0, 1)), 0.5 * std::exp(-2 * g * t), 1e-10);
}

TEST(Lindblad, StationaryStateOfThermalQubit) {
  const Mat h = 0.5 * (identity(2) - pauli_z());
  const Lindbladian gen(h, {{sigma_minus(), 1.0}, {sigma_plus(), 0.25}});
  const auto ss = stationary_state(gen);
  EXPECT_LT(max_abs(ss.matrix() - gibbs_state(h, std::log(4.0)).state.matrix()), 1e-12);
}

TEST(Lindblad, LargeStepsReportIntegrationFailure) {
  const Mat h = 50.0 * pauli_z();
  const auto rho0 = DensityState::maximally_mixed(2);
  EXPECT_THROW(lindblad_evolve(Lindbladian(h, {{sigma_minus(), 40.0}}), rho0, 10.0, 5), IntegrationFailure);
}

double log_factorial(int n) {
  double s = 0;
  for (int k = 2; k <= n; ++k) s += std::log(static_cast<double>(k));
  return s;
}

TEST(Counting, MultiplicityExamples) {
  const std::vector<long long> a{2, 2, 1};
  EXPECT_NEAR(log_multiplicity(a), std::log(30.0), 1e-12);
  const std::vector<long long> b{7};
  EXPECT_NEAR(log_multiplicity(b), 0.0, 1e-12);
  const std::vector<long long> bad{-1, 2};
  EXPECT_THROW(log_multiplicity(bad), InvalidInput);
}

TEST(Counting, MultiplicityMatchesFactorialsUpToTwenty) {
  for (int n = 0; n <= 20; ++n)
    for (int k = 0; k <= n; ++k) {
      const std::vector<long long> occ{k, n - k};
      EXPECT_NEAR(log_multiplicity(occ), log_factorial(n) - log_factorial(k) - log_factorial(n - k), 1e-10);
    }
}

TEST(Counting, BoltzmannTwoLevelSymmetric) {
  const std::array<double, 2> levels{0.0, 1.5};
  const auto occ = boltzmann_occupancy(levels, 100, 75.0);
  EXPECT_NEAR(occ.fractions[0], 0.5, 1e-12);
  EXPECT_NEAR(occ.multiplier, 0.0, 1e-12);
}

TEST(Counting, BoltzmannConstraintsAndRatios) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::array<double, 3> levels{0.0, 0.7, 2.0};
  for (int k = 0; k < 50; ++k) {
    const double n = 1000, e = n * 2.0 * (0.02 + 0.96 * u(rng));
    const auto occ = boltzmann_occupancy(levels, n, e);
    double sum = 0, energy = 0;
    for (int j = 0; j < 3; ++j) sum += occ.fractions[j], energy += n * occ.fractions[j] * levels[j];
    EXPECT_NEAR(sum, 1.0, 1e-12);
    EXPECT_NEAR(energy / e, 1.0, 1e-8);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        EXPECT_NEAR(occ.fractions[i] / occ.fractions[j], std::exp(occ.multiplier * (levels[i] - levels[j])),
                    1e-9 * occ.fractions[i] / occ.fractions[j]);
  }
  EXPECT_THROW(boltzmann_occupancy(levels, 10, 25), InvalidInput);
}

TEST(Channels, CompletenessAndUnitality) {
  EXPECT_FALSE(amplitude_damping(0.3).unital());
  EXPECT_TRUE(random_unitary_mixture(pauli_z(), 0.3).unital());
  Mat k = identity(2) * 0.5;
  EXPECT_THROW(Channel({k}), InvalidInput);
}

TEST(StreamRng, DeterministicAndDistinctStreams) {
  auto a = stream_rng(9, 4), b = stream_rng(9, 4), c = stream_rng(9, 5), d = stream_rng(10, 4);
  for (int i = 0; i < 100; ++i) {
    const auto x = a();
    EXPECT_EQ(x, b());
    EXPECT_NE(x, c());
    EXPECT_NE(x, d());
  }
}

TEST(StreamRng, UniformMomentsAcrossStreams) {
  // first draw of many neighbouring streams, then a long single stream
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (bool across : {true, false}) {
    const int n = 200000;
    auto one = stream_rng(3, 0);
    double m1 = 0, m2 = 0, lag = 0, prev = 0.5;
    for (int i = 0; i < n; ++i) {
      auto fresh = stream_rng(3, i);
      const double x = across ? u(fresh) : u(one);
      m1 += x, m2 += x * x, lag += (x - 0.5) * (prev - 0.5), prev = x;
    }
    EXPECT_NEAR(m1 / n, 0.5, 5 * std::sqrt(1.0 / 12 / n));
    EXPECT_NEAR(m2 / n, 1.0 / 3, 5 * std::sqrt(4.0 / 45 / n));
    EXPECT_NEAR(lag / n, 0.0, 5 * std::sqrt(1.0 / 144 / n));
  }
}

}  // namespace
}  // namespace qthermo
