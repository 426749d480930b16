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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "qthermo/darwinism.hpp"

namespace qthermo::darwinism {
namespace {

SpinStarSpec spec(int n, double alpha2, double t, double j = 1.0) {
  return {n, j, std::sqrt(alpha2), std::sqrt(1 - alpha2), t};
}

TEST(SpinStar, ValidatesSpec) {
  EXPECT_THROW(evolve_spin_star({0, 1, 1, 0, 0}), InvalidInput);
  EXPECT_THROW(evolve_spin_star({3, 1, 0.6, 0.6, 0}), InvalidInput);
  EXPECT_THROW(evolve_spin_star(spec(21, 0.3, 0.1)), CapExceeded);
}

TEST(SpinStar, InitialStateIsProduct) {
  const auto s = spec(4, 0.3, 0.0);
  const Vec psi = evolve_spin_star(s);
  Vec plus(2);
  plus << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
  Vec expected(2);
  expected << s.alpha, s.beta;
  for (int i = 0; i < 4; ++i) expected = kron(expected, plus);
  EXPECT_LT((psi - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(SpinStar, MatchesTimeSlicedUnitary) {
  for (int n : {1, 3, 5, 7}) {
    const auto s = spec(n, 0.25, 0.37, 0.8);
    const Vec psi0 = evolve_spin_star({n, s.coupling, s.alpha, s.beta, 0.0});
    const Vec exact = propagate_state(constant_path(spin_star_hamiltonian(n, s.coupling), s.time), psi0, 1);
    EXPECT_LT((evolve_spin_star(s) - exact).cwiseAbs().maxCoeff(), 1e-10) << n;
  }
}

TEST(SpinStar, ReducedSystemState) {
  const auto s = spec(6, 0.3, 0.21, 1.1);
  const Vec psi = evolve_spin_star(s);
  const std::vector<int> dims(7, 2);
  const int keep[] = {0};
  const Mat rho = partial_trace(Mat(psi * psi.adjoint()), dims, keep);
  EXPECT_NEAR(rho(0, 0).real(), 0.3, 1e-14);
  EXPECT_NEAR(rho(1, 1).real(), 0.7, 1e-14);
  const double coherence = s.alpha * s.beta * std::pow(std::cos(2 * s.coupling * s.time), 6);
  EXPECT_NEAR(std::abs(rho(0, 1) - coherence), 0.0, 1e-14);
  EXPECT_NEAR(von_neumann_entropy(rho), system_entropy(s), 1e-12);
}

TEST(SpinStar, SingleEnvironmentQubitState) {
  const auto s = spec(5, 0.2, 0.4, 0.9);
  const Vec psi = evolve_spin_star(s);
  const std::vector<int> dims(6, 2);
  const double jt = 2 * s.coupling * s.time, a2 = s.alpha * s.alpha;
  for (int i = 1; i <= 5; ++i) {
    const int keep[] = {i};
    const Mat rho = partial_trace(Mat(psi * psi.adjoint()), dims, keep);
    EXPECT_NEAR(rho(0, 0).real(), 0.5, 1e-14);
    EXPECT_LT(std::abs(rho(0, 1) - 0.5 * cplx(std::cos(jt), (1 - 2 * a2) * std::sin(jt))), 1e-14);
    EXPECT_LT(std::abs(rho(1, 0) - 0.5 * cplx(std::cos(jt), -(1 - 2 * a2) * std::sin(jt))), 1e-14);
  }
}

TEST(SpinStar, JointStateStaysPure) {
  for (double t : {0.0, 0.3, kPi / 4, 1.9}) {
    const Vec psi = evolve_spin_star(spec(7, 0.4, t));
    EXPECT_NEAR(psi.norm(), 1.0, 1e-14);
    EXPECT_NEAR(von_neumann_entropy(Mat(psi * psi.adjoint())), 0.0, 1e-10);
  }
}

TEST(Plateau, FlatAtDecoherenceTime) {
  const auto s = spec(16, 0.3, kPi / 4);
  const auto curve = mutual_info_curve(s, all_fragments(16));
  const double ss = system_entropy(s);
  EXPECT_NEAR(ss, -0.3 * std::log(0.3) - 0.7 * std::log(0.7), 1e-14);
  EXPECT_EQ(curve.front().mutual_information, 0.0);
  for (int n = 1; n < 16; ++n) EXPECT_NEAR(curve[n].mutual_information, ss, 1e-10) << n;
  EXPECT_NEAR(curve.back().mutual_information, 2 * ss, 1e-10);
  for (int n = 1; n <= 16; ++n) EXPECT_GE(curve[n].mutual_information, curve[n - 1].mutual_information - 1e-14);
}

TEST(Plateau, RoughOffDecoherenceTime) {
  const auto s = spec(10, 0.3, 0.25);
  const auto curve = mutual_info_curve(s, all_fragments(10));
  for (const auto& p : curve) {
    EXPECT_GE(p.mutual_information, -1e-14);
    EXPECT_LE(p.mutual_information, 2 * system_entropy(s) + 1e-12);
  }
  EXPECT_GT(std::abs(curve[3].mutual_information - system_entropy(s)), 1e-3);
}

TEST(Plateau, AnySubsetMatchesClosedForm) {
  std::mt19937_64 rng(7);
  const int n = 8;
  for (double t : {kPi / 4, 0.3}) {
    const auto s = spec(n, 0.35, t);
    const Vec psi = evolve_spin_star(s);
    const auto curve = mutual_info_curve(s, all_fragments(n));
    for (int size = 1; size <= n; ++size) {
      for (int draw = 0; draw < 3; ++draw) {
        std::vector<int> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        std::shuffle(idx.begin(), idx.end(), rng);
        idx.resize(size);
        EXPECT_NEAR(fragment_mutual_information(psi, n, idx), curve[size].mutual_information, 1e-12);
      }
    }
  }
}

}  // namespace
}  // namespace qthermo::darwinism
