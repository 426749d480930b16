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

#include <boost/math/tools/roots.hpp>

#include "qthermo/core/errors.hpp"

namespace qthermo {

// ln[N! / prod_j n_j!]
inline double log_multiplicity(std::span<const long long> occupations) {
  long long total = 0;
  double denom = 0.0;
  for (long long n : occupations) {
    require(n >= 0, "multiplicity: occupations must be nonnegative");
    total += n;
    denom += std::lgamma(static_cast<double>(n) + 1.0);
  }
  return std::lgamma(static_cast<double>(total) + 1.0) - denom;
}

struct Occupancy {
  std::vector<double> fractions;  // n_j / N
  double multiplier;              // n_j proportional to exp(multiplier * e_j)
};

namespace detail {
inline std::vector<double> exponential_weights(std::span<const double> levels, double b) {
  const double ref = b >= 0 ? *std::max_element(levels.begin(), levels.end())
                            : *std::min_element(levels.begin(), levels.end());
  std::vector<double> w(levels.size());
  double sum = 0.0;
  for (std::size_t j = 0; j < levels.size(); ++j) sum += (w[j] = std::exp(b * (levels[j] - ref)));
  for (double& x : w) x /= sum;
  return w;
}

inline double mean_level(std::span<const double> levels, double b) {
  const auto w = exponential_weights(levels, b);
  double m = 0.0;
  for (std::size_t j = 0; j < levels.size(); ++j) m += w[j] * levels[j];
  return m;
}
}  // namespace detail

// Maximizes the Stirling log-multiplicity under fixed N and total energy. The stationary
// point has n_j = mu exp(b e_j); b is found by bracketing root search on the mean energy.
inline Occupancy boltzmann_occupancy(std::span<const double> levels, double n_total, double e_total) {
  require(!levels.empty() && n_total > 0, "boltzmann_occupancy: need levels and positive N");
  const double lo = *std::min_element(levels.begin(), levels.end());
  const double hi = *std::max_element(levels.begin(), levels.end());
  const double target = e_total / n_total;
  const double slack = 1e-12 * std::max(1.0, std::max(std::abs(lo), std::abs(hi)));
  if (target < lo - slack || target > hi + slack) throw InvalidInput("boltzmann_occupancy: total energy is unattainable");
  if (hi - lo <= slack) return {std::vector<double>(levels.size(), 1.0 / levels.size()), 0.0};
  const double inf = std::numeric_limits<double>::infinity();
  if (target <= lo + slack || target >= hi - slack) {
    const double edge = target <= lo + slack ? lo : hi;
    std::vector<double> f(levels.size(), 0.0);
    double count = 0;
    for (std::size_t j = 0; j < levels.size(); ++j)
      if (std::abs(levels[j] - edge) <= slack) f[j] = 1.0, ++count;
    for (double& x : f) x /= count;
    return {f, edge == lo ? -inf : inf};
  }
  auto residual = [&](double b) { return detail::mean_level(levels, b) - target; };
  double span = 1.0 / (hi - lo);
  while (residual(-span) > 0 || residual(span) < 0) span *= 2;
  boost::math::tools::eps_tolerance<double> tol(50);
  std::uintmax_t iters = 200;
  const auto [a, b] = boost::math::tools::toms748_solve(residual, -span, span, tol, iters);
  const double root = 0.5 * (a + b);
  return {detail::exponential_weights(levels, root), root};
}

}  // namespace qthermo
