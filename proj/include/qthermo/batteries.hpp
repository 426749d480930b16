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
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qthermo/core/linalg.hpp"
#include "qthermo/core/state.hpp"

namespace qthermo::batteries {

class BatterySpec {
 public:
  explicit BatterySpec(std::vector<double> energies) : energies_(std::move(energies)) {
    require(energies_.size() >= 2, "battery needs at least two levels");
    for (std::size_t i = 1; i < energies_.size(); ++i)
      require(energies_[i] > energies_[i - 1], "battery energies must be strictly increasing");
  }

  std::span<const double> energies() const noexcept { return energies_; }
  int dim() const noexcept { return static_cast<int>(energies_.size()); }
  Mat hamiltonian() const { return diagonal(energies_); }

  // Sum of single-battery Hamiltonians over n copies, diagonal in the product basis.
  std::vector<double> register_energies(int n) const {
    std::vector<double> e{0.0};
    for (int k = 0; k < n; ++k) {
      std::vector<double> next;
      next.reserve(e.size() * energies_.size());
      for (double a : e)
        for (double b : energies_) next.push_back(a + b);
      e = std::move(next);
    }
    return e;
  }

 private:
  std::vector<double> energies_;
};

using Swap = std::pair<int, int>;

struct ExtractionReport {
  double ergotropy;
  std::vector<double> final_populations;  // by basis index, energy-ordered basis of H
  std::vector<Swap> swaps;                // transpositions of basis indices, applied in order
  Mat passive_state;
  bool beats_classical = false;
  double mutual_information = 0.0;
};

namespace detail {

// Energy-ordered eigenbasis. Diagonal operators keep the computational basis, with degenerate
// levels ordered by index.
inline EigenSystem ordered_basis(const Mat& h) {
  const Eigen::Index d = h.rows();
  Mat off = h;
  off.diagonal().setZero();
  if (max_abs(off) > kHermitianTol * std::max(1.0, max_abs(h))) return eigh(h);
  std::vector<Eigen::Index> idx(d);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return h(a, a).real() < h(b, b).real(); });
  EigenSystem es{RVec(d), Mat::Zero(d, d)};
  for (Eigen::Index k = 0; k < d; ++k) es.values[k] = h(idx[k], idx[k]).real(), es.vectors(idx[k], k) = 1.0;
  return es;
}

// Descending order of values, stable in the index.
inline std::vector<int> descending_order(std::span<const double> p) {
  std::vector<int> order(p.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return p[a] > p[b] + 1e-12; });
  return order;
}

// Selection-sort transpositions taking `pops` to `target` (a permutation of it).
inline std::vector<Swap> transpositions(std::vector<double> pops, std::span<const double> target) {
  std::vector<Swap> out;
  for (std::size_t i = 0; i < pops.size(); ++i) {
    if (pops[i] == target[i]) continue;
    for (std::size_t j = i + 1; j < pops.size(); ++j)
      if (pops[j] == target[i]) {
        std::swap(pops[i], pops[j]);
        out.emplace_back(static_cast<int>(i), static_cast<int>(j));
        break;
      }
  }
  return out;
}

}  // namespace detail

inline std::vector<double> apply_swaps(std::vector<double> pops, std::span<const Swap> swaps) {
  for (auto [a, b] : swaps) std::swap(pops.at(a), pops.at(b));
  return pops;
}

// Ergotropy of populations p on levels e (both indexed by the same basis).
inline ExtractionReport ergotropy_diagonal(std::span<const double> p, std::span<const double> e) {
  require(p.size() == e.size() && !p.empty(), "ergotropy: populations and energies must match");
  std::vector<int> by_energy(e.size());
  std::iota(by_energy.begin(), by_energy.end(), 0);
  std::stable_sort(by_energy.begin(), by_energy.end(), [&](int a, int b) { return e[a] < e[b]; });
  const auto by_pop = detail::descending_order(p);
  ExtractionReport r;
  r.final_populations.assign(p.size(), 0.0);
  double before = 0, after = 0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    r.final_populations[by_energy[k]] = p[by_pop[k]];
    before += p[k] * e[k];
  }
  for (std::size_t k = 0; k < p.size(); ++k) after += r.final_populations[k] * e[k];
  r.ergotropy = std::max(0.0, before - after);
  r.swaps = detail::transpositions({p.begin(), p.end()}, r.final_populations);
  r.passive_state = diagonal(r.final_populations);
  return r;
}

inline ExtractionReport ergotropy(const DensityState& rho, const Mat& h) {
  require(rho.dim() == h.rows(), "ergotropy: dimension mismatch");
  const auto basis = detail::ordered_basis(h);
  const Mat in_basis = basis.vectors.adjoint() * rho.matrix() * basis.vectors;
  Mat off = in_basis;
  off.diagonal().setZero();
  const std::vector<double> energies(basis.values.data(), basis.values.data() + basis.values.size());
  if (max_abs(off) <= 1e-12) {
    std::vector<double> p(energies.size());
    for (std::size_t k = 0; k < p.size(); ++k) p[k] = in_basis(k, k).real();
    auto r = ergotropy_diagonal(p, energies);
    r.passive_state = basis.vectors * r.passive_state * basis.vectors.adjoint();
    return r;
  }
  const RVec lam = rho.eigenvalues();
  ExtractionReport r;
  r.final_populations.resize(lam.size());
  for (Eigen::Index k = 0; k < lam.size(); ++k) r.final_populations[k] = lam[lam.size() - 1 - k];
  double after = 0;
  for (std::size_t k = 0; k < energies.size(); ++k) after += r.final_populations[k] * energies[k];
  r.ergotropy = std::max(0.0, rho.expectation(h) - after);
  r.passive_state = basis.vectors * diagonal(r.final_populations) * basis.vectors.adjoint();
  return r;
}

inline bool is_passive(const DensityState& rho, const Mat& h) {
  require(rho.dim() == h.rows(), "is_passive: dimension mismatch");
  const auto spaces = spectral_decomposition(h);
  const Mat& r = rho.matrix();
  // no coherence between different energies
  for (std::size_t a = 0; a < spaces.size(); ++a)
    for (std::size_t b = a + 1; b < spaces.size(); ++b)
      if (max_abs(spaces[a].projector * r * spaces[b].projector) >= 1e-10) return false;
  // populations nonincreasing with energy, compared block by block
  double floor = 2.0;
  for (const auto& s : spaces) {
    const RVec lam = eigh(s.projector * r * s.projector).values;
    // the top `multiplicity` eigenvalues belong to this block
    const double hi = lam[lam.size() - 1];
    const double lo = lam[lam.size() - s.multiplicity];
    if (hi > floor + 1e-12) return false;
    floor = lo;
  }
  return true;
}

// Populations of rho^{(x)n} in the product basis.
inline std::vector<double> product_populations(std::span<const double> p, int n) {
  std::vector<double> out{1.0};
  for (int k = 0; k < n; ++k) {
    std::vector<double> next;
    next.reserve(out.size() * p.size());
    for (double a : out)
      for (double b : p) next.push_back(a * b);
    out = std::move(next);
  }
  return out;
}

// I(first battery : the rest) for a state diagonal in the product basis.
inline double diagonal_mutual_information(std::span<const double> joint, int d) {
  const std::size_t rest = joint.size() / d;
  std::vector<double> a(d, 0.0), b(rest, 0.0);
  for (int i = 0; i < d; ++i)
    for (std::size_t j = 0; j < rest; ++j) a[i] += joint[i * rest + j], b[j] += joint[i * rest + j];
  return std::max(0.0, shannon_entropy(a) + shannon_entropy(b) - shannon_entropy(joint));
}

inline constexpr int kDefaultRegisterCap = 729;

struct MultiCopyResult {
  double w_classical;
  double w_global;
  bool beats_classical;
  double threshold_p1;  // sqrt(p0 p2) for qutrits, NaN otherwise
  ExtractionReport global;
};

inline MultiCopyResult multi_copy_strategies(const BatterySpec& spec, std::span<const double> p, int n,
                                             int cap = kDefaultRegisterCap) {
  require(static_cast<int>(p.size()) == spec.dim(), "multi_copy: populations must match the battery dimension");
  require(n == 2 || n == 3, "multi_copy: only 2 or 3 copies are supported");
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  require(std::abs(total - 1) <= 1e-10, "multi_copy: populations must sum to 1");
  for (double x : p) require(x >= 0, "multi_copy: populations must be nonnegative");
  if (std::pow(spec.dim(), n) > cap)
    throw CapExceeded("multi_copy: register dimension " + std::to_string(static_cast<long long>(std::pow(spec.dim(), n))) +
                      " exceeds the cap of " + std::to_string(cap));
  const auto single = ergotropy_diagonal(p, spec.energies());
  MultiCopyResult r;
  r.w_classical = n * single.ergotropy;
  const auto joint = product_populations(p, n);
  const auto energies = spec.register_energies(n);
  r.global = ergotropy_diagonal(joint, energies);
  r.w_global = r.global.ergotropy;
  r.beats_classical = r.w_global - r.w_classical > 1e-12;
  r.global.beats_classical = r.beats_classical;
  r.global.mutual_information = diagonal_mutual_information(r.global.final_populations, spec.dim());
  r.threshold_p1 = spec.dim() == 3 ? std::sqrt(p[0] * p[2]) : std::numeric_limits<double>::quiet_NaN();
  return r;
}

inline double final_state_correlations(const BatterySpec& spec, std::span<const double> p, int n = 2) {
  return multi_copy_strategies(spec, p, n).global.mutual_information;
}

struct ChargingTimes {
  double speed_limit;
  double parallel;
  double global;
};

inline ChargingTimes charging_times(int n, double e_max, double mean_energy, double energy_spread) {
  require(n >= 1 && e_max > 0 && mean_energy > 0 && energy_spread > 0, "charging_times: inputs must be positive");
  return {kPi / (2 * std::min(mean_energy, energy_spread)), n * kPi / (2 * e_max), kPi / (2 * e_max)};
}

// E_max (|0...0><d-1...d-1| + h.c.) on n batteries of dimension d.
inline Mat global_swap_hamiltonian(int d, int n, double e_max) {
  const auto dim = static_cast<Eigen::Index>(std::llround(std::pow(d, n)));
  Mat h = Mat::Zero(dim, dim);
  h(0, dim - 1) = h(dim - 1, 0) = e_max;
  return h;
}

}  // namespace qthermo::batteries
