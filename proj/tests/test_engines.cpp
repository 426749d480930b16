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
#include <random>
#include <vector>

#include "qthermo/core/state.hpp"
#include "qthermo/engines.hpp"

namespace qthermo::engines {
namespace {

double csch(double x) { return 1 / std::sinh(x); }

// Quantum-medium power in the csch/sinh closed form.
double quantum_power_closed(double kappa, double wf, double tau_h, double tau_c, const BathPair& b) {
  const double ec = std::exp(b.coupling_cold * tau_c), eh = std::exp(b.coupling_hot * tau_h);
  const double x = std::exp(b.coupling_cold * tau_c + b.coupling_hot * tau_h) - 1;
  const double a1 = b.t_cold * (ec - 1) + kappa * b.t_hot * ec * (eh - 1);
  const double a2 = b.t_cold * eh * (ec - 1) + kappa * b.t_hot * (eh - 1);
  const double s = wf * kappa / 2;
  return wf / 2 * (1 - kappa) / (b.zeta * (tau_c + tau_h)) * csch(s * x / a1) * csch(s * x / a2) *
         std::sinh(s * (kappa * b.t_hot - b.t_cold) * x * (eh - 1) * (ec - 1) / (a1 * a2));
}

TEST(CurzonAhlborn, TrivialCases) {
  const auto eq = curzon_ahlborn({2.0, 2.0});
  EXPECT_EQ(eq.max_power, 0.0);
  EXPECT_EQ(eq.efficiency, 0.0);
  EXPECT_DOUBLE_EQ(curzon_ahlborn({4.0, 1.0}).efficiency, 0.5);
  EXPECT_THROW(curzon_ahlborn({1.0, 2.0}), InvalidInput);
}

TEST(CurzonAhlborn, NumericOptimumMatchesClosedForm) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.1, 1.0), k(0.2, 5.0);
  for (int trial = 0; trial < 40; ++trial) {
    const double th = 1 + 9 * u(rng);
    const BathPair b{th, th * u(rng) * 0.95, k(rng), k(rng), 1 + u(rng)};
    const auto r = curzon_ahlborn(b);
    EXPECT_NEAR(r.numeric_max_power, r.max_power, 1e-6 * r.max_power);
    EXPECT_NEAR(r.numeric_efficiency, r.efficiency, 1e-6 * r.efficiency);
    EXPECT_NEAR(r.numeric_gap_hot, r.gap_hot, 1e-5 * r.gap_hot);
    EXPECT_NEAR(r.numeric_gap_cold, r.gap_cold, 1e-5 * r.gap_cold);
    EXPECT_NEAR(carnot_power(b, r.gap_hot, r.gap_cold), r.max_power, 1e-12 * r.max_power);
  }
}

TEST(OttoTls, EqualGapsGiveNothing) {
  const auto c = otto_tls(1.0, 1.0, 0.5, 2.0);
  EXPECT_EQ(c.efficiency, 0.0);
  EXPECT_NEAR(c.net_work, 0.0, 1e-15);
}

TEST(OttoTls, StrokesMatchDensityMatrixSimulation) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.1, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double di = u(rng), df = di + u(rng), tc = u(rng), th = tc + u(rng);
    auto h = [](double gap) {
      Mat m = Mat::Zero(2, 2);
      m(1, 1) = gap;
      return m;
    };
    auto energy = [](const DensityState& r, const Mat& hm) { return r.expectation(hm); };
    const auto a = gibbs_state(h(di), 1 / tc).state;
    const auto c = gibbs_state(h(df), 1 / th).state;
    const auto perf = otto_tls(di, df, tc, th);
    EXPECT_NEAR(perf.work_compression, energy(a, h(df)) - energy(a, h(di)), 1e-10);
    EXPECT_NEAR(perf.heat_in, energy(c, h(df)) - energy(a, h(df)), 1e-10);
    EXPECT_NEAR(perf.work_expansion, energy(c, h(di)) - energy(c, h(df)), 1e-10);
    EXPECT_NEAR(perf.heat_out, energy(c, h(di)) - energy(a, h(di)), 1e-10);
    EXPECT_NEAR(perf.net_work, perf.heat_in - perf.heat_out, 1e-12);
    EXPECT_NEAR(perf.net_work, -(perf.work_compression + perf.work_expansion), 1e-12);
    EXPECT_DOUBLE_EQ(perf.efficiency, 1 - di / df);
    EXPECT_DOUBLE_EQ(perf.local_temperatures[1], df / di * tc);
    EXPECT_DOUBLE_EQ(perf.local_temperatures[3], di / df * th);
    EXPECT_EQ(perf.positive_work, df / di < th / tc);
    if (perf.positive_work) {
      EXPECT_GT(perf.net_work, 0.0);
      EXPECT_LE(perf.efficiency, 1 - tc / th);
    } else {
      EXPECT_LE(perf.net_work, 1e-15);
    }
  }
}

TEST(EndoOtto, TrivialAndInvalidSpecs) {
  const BathPair b{2.0, 1.0};
  EXPECT_THROW(endoreversible_otto({Medium::classical_oscillator, 2.0, 1.0, 1.0, 1.0}, b), InvalidInput);
  EXPECT_THROW(endoreversible_otto({Medium::classical_oscillator, 0.5, 1.0, 0.0, 1.0}, b), InvalidInput);
  EXPECT_THROW(endoreversible_otto({Medium::classical_oscillator, 0.5, 1.0, 1.0, 1.0}, {2.0, 1.0, 1.0, 1.0, 0.5}),
               InvalidInput);
}

TEST(EndoOtto, ClassicalPowerMatchesFactorizedForm) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.1, 2.0);
  for (int trial = 0; trial < 100; ++trial) {
    const BathPair b{1 + u(rng), 0.5 * u(rng), u(rng), u(rng), 1 + u(rng)};
    const OttoSpec s{Medium::classical_oscillator, u(rng) * 0.45, 1.0, u(rng), u(rng)};
    const auto c = endoreversible_otto(s, b);
    const double ref = classical_otto_power(s.compression(), s.tau_hot, s.tau_cold, b);
    EXPECT_NEAR(c.power, ref, 1e-12 * std::max(1.0, std::abs(ref)));
    EXPECT_NEAR(c.efficiency, 1 - s.compression(), 1e-12);
    EXPECT_LT(c.bookkeeping_residual(), 1e-10);
  }
}

TEST(EndoOtto, ClassicalPowerFactorizes) {
  const BathPair b{3.0, 1.0, 0.7, 1.4, 1.2};
  auto power = [&](double kappa, double th, double tc) {
    return endoreversible_otto({Medium::classical_oscillator, kappa, 1.0, th, tc}, b).power;
  };
  const double ref = power(0.5, 1.0, 1.0) / power(0.7, 1.0, 1.0);
  for (double th : {0.1, 0.6, 2.5})
    for (double tc : {0.2, 1.3, 4.0}) EXPECT_NEAR(power(0.5, th, tc) / power(0.7, th, tc), ref, 1e-9 * std::abs(ref));
}

TEST(EndoOtto, QuantumPowerMatchesClosedForm) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.1, 2.0);
  for (int trial = 0; trial < 100; ++trial) {
    const BathPair b{1 + u(rng), 0.5 * u(rng), u(rng), u(rng), 1 + u(rng)};
    const double wf = 5 * u(rng), kappa = 0.05 + 0.45 * u(rng);
    const OttoSpec s{Medium::quantum_oscillator, kappa * wf, wf, u(rng), u(rng)};
    const auto c = endoreversible_otto(s, b);
    const double ref = quantum_power_closed(kappa, wf, s.tau_hot, s.tau_cold, b);
    EXPECT_NEAR(c.power, ref, 1e-9 * std::max(1e-3, std::abs(ref)));
    EXPECT_LT(c.bookkeeping_residual(), 1e-10);
    EXPECT_NEAR(c.efficiency, 1 - kappa, 1e-8);
  }
}

TEST(EndoOtto, RootSearchAgreesWithClosedFixedPoint) {
  const BathPair b{2.0, 0.7, 0.9, 1.7, 1.0};
  for (double wf : {0.05, 1.0, 8.0}) {
    const OttoSpec s{Medium::quantum_oscillator, 0.4 * wf, wf, 0.8, 1.3};
    EXPECT_NEAR(solve_tb(s, b), closed_form_tb(s, b), 1e-12 * closed_form_tb(s, b));
  }
}

TEST(EndoOtto, IsentropesConserveEntropy) {
  for (auto m : {Medium::classical_oscillator, Medium::quantum_oscillator})
    for (double t : {0.01, 0.3, 5.0}) {
      const double t2 = isentrope_temperature(m, 0.7, t, 2.1);
      EXPECT_NEAR(medium_entropy(m, 2.1, t2), medium_entropy(m, 0.7, t), 1e-12);
    }
}

TEST(EndoOtto, QuantumReducesToClassicalAtHighTemperature) {
  const BathPair b{2.0, 1.0, 1.0, 1.0, 1.0};
  for (double kappa : {0.2, 0.35, 0.45, 0.6}) {
    const double wf = 0.01 * b.t_cold;
    const auto q = endoreversible_otto({Medium::quantum_oscillator, kappa * wf, wf, 1.0, 1.0}, b);
    const auto c = endoreversible_otto({Medium::classical_oscillator, kappa * wf, wf, 1.0, 1.0}, b);
    EXPECT_LT(std::abs(q.power - c.power), 1e-3 * std::abs(c.power));
  }
}

TEST(EndoOtto, EfficiencyBelowCarnotWhenProducingWork) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const BathPair b{1 + u(rng), u(rng), u(rng), u(rng), 1.0};
    const auto m = trial % 2 ? Medium::quantum_oscillator : Medium::classical_oscillator;
    const double wf = 10 * u(rng);
    const auto c = endoreversible_otto({m, u(rng) * wf * 0.99, wf, u(rng), u(rng)}, b);
    if (c.positive_work) {
      EXPECT_LE(c.efficiency, b.carnot() + 1e-12);
    }
  }
}

TEST(MaximizePower, ClassicalOptimumIsSquareRootRatio) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.1, 3.0);
  const std::vector<Box> vary{{Knob::kappa, 1e-3, 1.0}};
  for (int trial = 0; trial < 10; ++trial) {
    const BathPair b{2 + u(rng), u(rng) * 0.6, u(rng), u(rng), 1 + u(rng)};
    const OttoSpec tmpl{Medium::classical_oscillator, 0.5, 1.0, u(rng), u(rng)};
    const auto opt = maximize_power(tmpl, b, vary);
    EXPECT_NEAR(opt.spec.compression(), std::sqrt(b.t_cold / b.t_hot), 1e-6);
    EXPECT_NEAR(opt.efficiency, b.curzon_ahlborn(), 1e-6);
    EXPECT_FALSE(opt.degenerate);
  }
}

TEST(MaximizePower, NotBelowAnyGridSample) {
  const BathPair b{2.0, 1.0};
  const OttoSpec tmpl{Medium::quantum_oscillator, 0.5, 10.0, 1.0, 1.0};
  const std::vector<Box> vary{{Knob::kappa, 0.01, 1.0}, {Knob::tau_hot, 0.2, 3.0}};
  const auto opt = maximize_power(tmpl, b, vary, 11);
  for (int i = 0; i < 11; ++i)
    for (int j = 0; j < 11; ++j) {
      OttoSpec s = tmpl;
      s.freq_initial = (0.01 + 0.099 * i) * s.freq_final;
      s.tau_hot = 0.2 + 0.28 * j;
      if (s.freq_initial >= s.freq_final) continue;
      EXPECT_LE(endoreversible_otto(s, b).power, opt.max_power + 1e-15);
    }
}

TEST(MaximizePower, InvariantUnderGridRefinement) {
  const BathPair b{2.0, 1.0, 1.3, 0.8, 1.0};
  const std::vector<Box> vary{{Knob::kappa, 1e-3, 1.0}};
  for (auto m : {Medium::classical_oscillator, Medium::quantum_oscillator}) {
    const OttoSpec tmpl{m, 0.5, m == Medium::quantum_oscillator ? 10.0 : 1.0, 1.0, 1.0};
    const auto coarse = maximize_power(tmpl, b, vary, 41);
    const auto fine = maximize_power(tmpl, b, vary, 81);
    EXPECT_NEAR(coarse.spec.compression(), fine.spec.compression(), 1e-8);
    EXPECT_NEAR(coarse.max_power, fine.max_power, 1e-8 * fine.max_power);
  }
}

TEST(MaximizePower, ClassicalEfficiencyIndependentOfRates) {
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> u(0.1, 3.0);
  const std::vector<Box> vary{{Knob::kappa, 1e-3, 1.0}};
  const double th = 3.0, tc = 1.2;
  for (int trial = 0; trial < 8; ++trial) {
    const BathPair b{th, tc, u(rng), u(rng), 1 + u(rng)};
    const auto opt = maximize_power({Medium::classical_oscillator, 0.5, 1.0, 1.0, 1.0}, b, vary);
    EXPECT_NEAR(opt.efficiency, 1 - std::sqrt(tc / th), 1e-6);
  }
}

TEST(MaximizePower, QuantumHighTemperatureTracksCurzonAhlborn) {
  const std::vector<Box> vary{{Knob::kappa, 1e-3, 1.0}};
  for (double ratio = 0.1; ratio <= 0.9 + 1e-12; ratio += 0.1) {
    const BathPair b{1.0 / ratio, 1.0};
    const auto opt = maximize_power({Medium::quantum_oscillator, 0.05, 0.1, 1.0, 1.0}, b, vary);
    EXPECT_LT(std::abs(opt.efficiency - b.curzon_ahlborn()), 0.02 * b.curzon_ahlborn()) << ratio;
  }
}

TEST(MaximizePower, QuantumLowTemperatureBeatsCurzonAhlborn) {
  const BathPair b{2.0, 1.0};
  const std::vector<Box> vary{{Knob::kappa, 1e-3, 1.0}};
  const auto opt = maximize_power({Medium::quantum_oscillator, 5.0, 10.0, 1.0, 1.0}, b, vary);
  EXPECT_GT(opt.efficiency, b.curzon_ahlborn());
}

TEST(MaximizePower, FlatLandscapeIsFlagged) {
  // T_c = kappa T_h: zero work for every stroke time
  const BathPair b{2.0, 1.0};
  const std::vector<Box> vary{{Knob::tau_hot, 0.5, 1.5}};
  EXPECT_TRUE(maximize_power({Medium::classical_oscillator, 0.5, 1.0, 1.0, 1.0}, b, vary, 5).degenerate);
}

}  // namespace
}  // namespace qthermo::engines
