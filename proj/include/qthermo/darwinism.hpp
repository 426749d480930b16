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

#include <bit>
#include <cmath>
#include <vector>

#include "qthermo/qcore.hpp"

namespace qthermo::darwinism {

// Central qubit alpha|up> + beta|down> dephased by `units` environment qubits in |+>, through
// J sum_i Z_S Z_i with Z = diag(1, -1) (|up> = |0> first).
struct SpinStarSpec {
  int units = 16;
  double coupling = 1.0;
  double alpha = std::sqrt(0.3);
  double beta = std::sqrt(0.7);
  double time = kPi / 4;

  void validate() const {
    require(units >= 1, "spin star: need at least one environment qubit");
    require(std::abs(alpha * alpha + beta * beta - 1.0) <= 1e-12, "spin star: amplitudes must be normalized");
  }
  // <B_i|A_i>, the per-qubit overlap of the two environment branches
  double overlap() const { return std::cos(2 * coupling * time); }
};

inline constexpr int kMaxSpinStarUnits = 20;

// Joint amplitudes, system qubit as the most significant bit.
inline Vec evolve_spin_star(const SpinStarSpec& s) {
  s.validate();
  if (s.units > kMaxSpinStarUnits) throw CapExceeded("evolve_spin_star: at most 20 environment qubits");
  const std::size_t env = std::size_t{1} << s.units;
  Vec psi(2 * env);
  const double norm = std::pow(2.0, -0.5 * s.units);
  for (std::size_t x = 0; x < env; ++x) {
    const double z = s.units - 2.0 * std::popcount(x);  // sum of Z over the environment
    const double phase = s.coupling * s.time * z;
    psi[x] = s.alpha * norm * std::exp(-kI * phase);
    psi[env + x] = s.beta * norm * std::exp(kI * phase);
  }
  return psi;
}

inline Mat spin_star_hamiltonian(int units, double coupling) {
  const int n = units + 1;
  Mat h = Mat::Zero(Eigen::Index{1} << n, Eigen::Index{1} << n);
  for (int i = 1; i < n; ++i) h += coupling * embed(pauli_z(), 0, n) * embed(pauli_z(), i, n);
  return h;
}

// Entropy of a two-branch mixture alpha^2 |A><A| + beta^2 |B><B| with real overlap <A|B>.
inline double branch_entropy(double alpha, double beta, double overlap) {
  const double a2 = alpha * alpha, b2 = beta * beta;
  const double disc = std::sqrt(std::max(0.0, (a2 - b2) * (a2 - b2) + 4 * a2 * b2 * overlap * overlap));
  const double p[] = {0.5 * (1 + disc), 0.5 * (1 - disc)};
  return shannon_entropy(p);
}

inline double system_entropy(const SpinStarSpec& s) {
  s.validate();
  return branch_entropy(s.alpha, s.beta, std::pow(s.overlap(), s.units));
}

struct MutualInfoPoint {
  int fragment;     // n
  double fraction;  // n / N
  double mutual_information;
};

// I(S : first n units) = S(rho_S) + S(rho_F) - S(rho_SF). Every marginal is a two-branch
// mixture; S(rho_SF) equals the entropy of the complementary fragment.
inline std::vector<MutualInfoPoint> mutual_info_curve(const SpinStarSpec& s, const std::vector<int>& fragments) {
  s.validate();
  const double c = s.overlap();
  const double ss = system_entropy(s);
  std::vector<MutualInfoPoint> out;
  for (int n : fragments) {
    require(n >= 0 && n <= s.units, "mutual_info_curve: fragment size out of range");
    const double sf = branch_entropy(s.alpha, s.beta, std::pow(c, n));
    const double ssf = branch_entropy(s.alpha, s.beta, std::pow(c, s.units - n));
    out.push_back({n, static_cast<double>(n) / s.units, n == 0 ? 0.0 : ss + sf - ssf});
  }
  return out;
}

inline std::vector<int> all_fragments(int units) {
  std::vector<int> n(units + 1);
  for (int k = 0; k <= units; ++k) n[k] = k;
  return n;
}

// Dense route for an arbitrary subset of environment qubits (indices 0..N-1).
inline double fragment_mutual_information(const Vec& psi, int units, const std::vector<int>& subset) {
  std::vector<int> dims(units + 1, 2), keep{0};
  for (int i : subset) {
    require(i >= 0 && i < units, "fragment_mutual_information: qubit index out of range");
    keep.push_back(i + 1);
  }
  const Mat rho = psi * psi.adjoint();
  const Mat rho_sf = partial_trace(rho, dims, keep);
  std::vector<int> sub_dims(keep.size(), 2), part_a{0};
  return mutual_information(rho_sf, sub_dims, part_a);
}

}  // namespace qthermo::darwinism
