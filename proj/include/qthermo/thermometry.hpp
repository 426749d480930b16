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
#include <span>
#include <vector>

#include "qthermo/core/errors.hpp"
#include "qthermo/core/numerics.hpp"

namespace qthermo::thermometry {

// Ascending probe energies; degeneracy by repetition.
class ProbeSpectrum {
 public:
  explicit ProbeSpectrum(std::vector<double> energies) : energies_(std::move(energies)) {
    require(!energies_.empty(), "probe spectrum must not be empty");
    for (std::size_t i = 0; i < energies_.size(); ++i) {
      require(std::isfinite(energies_[i]), "probe energies must be finite");
      require(i == 0 || energies_[i] >= energies_[i - 1], "probe energies must be nondecreasing");
    }
  }

  static ProbeSpectrum ladder(double gap, int levels) {
    std::vector<double> e(levels);
    for (int n = 0; n < levels; ++n) e[n] = n * gap;
    return ProbeSpectrum(std::move(e));
  }

  // Ground state plus an (n-1)-fold degenerate excited level.
  static ProbeSpectrum degenerate_two_level(double gap, int n) {
    std::vector<double> e(n, gap);
    e[0] = 0.0;
    return ProbeSpectrum(std::move(e));
  }

  std::span<const double> energies() const noexcept { return energies_; }
  std::size_t size() const noexcept { return energies_.size(); }

 private:
  std::vector<double> energies_;
};

inline std::vector<double> thermal_populations(const ProbeSpectrum& s, double t) {
  require(t > 0, "temperature must be positive");
  const auto e = s.energies();
  std::vector<double> p(e.size());
  double z = 0.0;
  for (std::size_t n = 0; n < e.size(); ++n) z += (p[n] = std::exp(-(e[n] - e[0]) / t));
  for (double& x : p) x /= z;
  return p;
}

// Fisher information about T carried by the Gibbs populations: beta^4 Var(H).
inline double qfi_thermal(const ProbeSpectrum& s, double t) {
  const auto p = thermal_populations(s, t);
  const auto e = s.energies();
  double mean = 0.0;
  for (std::size_t n = 0; n < e.size(); ++n) mean += p[n] * (e[n] - e[0]);
  double var = 0.0;
  for (std::size_t n = 0; n < e.size(); ++n) var += p[n] * (e[n] - e[0] - mean) * (e[n] - e[0] - mean);
  const double beta = 1.0 / t;
  return beta * beta * beta * beta * var;
}

inline double sq_csch(double x) {
  const double s = std::sinh(x);
  return 1.0 / (s * s);
}

inline double qfi_qubit(double gap, double t) {
  require(t > 0, "temperature must be positive");
  const double b = 1.0 / t, c = 1.0 / std::cosh(b * gap / 2);
  return std::pow(b, 4) * gap * gap / 4 * c * c;
}

inline double qfi_oscillator(double gap, double t) {
  require(t > 0, "temperature must be positive");
  const double b = 1.0 / t;
  return std::pow(b, 4) * gap * gap / 4 * sq_csch(b * gap / 2);
}

// Harmonic ladder of d levels: beta^4 Delta^2 / 4 [csch^2(x) - d^2 csch^2(d x)], x = beta Delta / 2.
inline double qfi_harmonic_d(double gap, double t, long long d) {
  if (d < 2) throw InvalidInput("qfi_harmonic_d: d must be >= 2");
  require(t > 0, "temperature must be positive");
  const double b = 1.0 / t, x = b * gap / 2, dd = static_cast<double>(d);
  const double tail = dd * x > 350 ? 0.0 : dd * dd * sq_csch(dd * x);
  return std::pow(b, 4) * gap * gap / 4 * (sq_csch(x) - tail);
}

struct OptimalProbe {
  ProbeSpectrum spectrum;
  double gap;
  double qfi;
};

// Scans the gap of the degenerate two-level structure over [1e-3, 1e3] T in log space.
inline OptimalProbe optimal_probe(int n, double t) {
  require(n >= 2, "optimal_probe: dimension must be >= 2");
  require(t > 0, "temperature must be positive");
  auto neg = [&](double log_gap) {
    return -qfi_thermal(ProbeSpectrum::degenerate_two_level(std::exp(log_gap), n), t);
  };
  const auto best = minimize_scalar(neg, std::log(1e-3 * t), std::log(1e3 * t));
  const double gap = std::exp(best.x);
  return {ProbeSpectrum::degenerate_two_level(gap, n), gap, -best.value};
}

struct QfiCurve {
  std::vector<double> temperatures;
  std::vector<double> qfi;
  double argmax;
  double max;
};

inline QfiCurve qfi_curve(const ProbeSpectrum& s, std::span<const double> temps) {
  require(!temps.empty(), "qfi_curve: empty temperature grid");
  QfiCurve c{{temps.begin(), temps.end()}, {}, 0.0, -1.0};
  for (double t : temps) {
    c.qfi.push_back(qfi_thermal(s, t));
    if (c.qfi.back() > c.max) c.max = c.qfi.back(), c.argmax = t;
  }
  return c;
}

// Var(T estimate) >= 1 / (M F); an uninformative probe returns +infinity.
inline double cramer_rao(double fisher, long long measurements) {
  require(measurements >= 1, "cramer_rao: need at least one measurement");
  require(fisher >= 0, "cramer_rao: Fisher information must be nonnegative");
  if (fisher == 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / (static_cast<double>(measurements) * fisher);
}

}  // namespace qthermo::thermometry
