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
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <functional>
#include <numeric>
#include <random>
#include <span>
#include <thread>
#include <vector>

#include <boost/math/tools/minima.hpp>

#include "qthermo/core/errors.hpp"

namespace qthermo {

struct SimplexResult {
  std::vector<double> x;
  double value;
  int iterations;
};

// Minimizes f with the Nelder-Mead simplex method (standard coefficients).
inline SimplexResult nelder_mead(const std::function<double(std::span<const double>)>& f, std::vector<double> x0,
                                 std::vector<double> step, double ftol = 1e-15, int max_iter = 20000) {
  const std::size_t n = x0.size();
  require(step.size() == n && n > 0, "nelder_mead: step must match dimension");
  std::vector<std::vector<double>> pts(n + 1, x0);
  for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += step[i];
  std::vector<double> fv(n + 1);
  for (std::size_t i = 0; i <= n; ++i) fv[i] = f(pts[i]);
  std::vector<std::size_t> order(n + 1);
  int it = 0;
  for (; it < max_iter; ++it) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return fv[a] < fv[b]; });
    const auto best = order.front(), worst = order.back(), second = order[n - 1];
    double spread = 0.0;
    for (std::size_t i = 0; i <= n; ++i)
      for (std::size_t k = 0; k < n; ++k) spread = std::max(spread, std::abs(pts[i][k] - pts[best][k]));
    if (std::abs(fv[worst] - fv[best]) <= ftol * (std::abs(fv[best]) + 1e-300) && spread < 1e-12) break;
    if (spread < 1e-14) break;
    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i <= n; ++i)
      if (i != worst)
        for (std::size_t k = 0; k < n; ++k) centroid[k] += pts[i][k] / n;
    auto along = [&](double t) {
      std::vector<double> p(n);
      for (std::size_t k = 0; k < n; ++k) p[k] = centroid[k] + t * (pts[worst][k] - centroid[k]);
      return p;
    };
    auto xr = along(-1.0);
    const double fr = f(xr);
    if (fr < fv[best]) {
      auto xe = along(-2.0);
      const double fe = f(xe);
      if (fe < fr) pts[worst] = xe, fv[worst] = fe;
      else pts[worst] = xr, fv[worst] = fr;
    } else if (fr < fv[second]) {
      pts[worst] = xr, fv[worst] = fr;
    } else {
      auto xc = fr < fv[worst] ? along(-0.5) : along(0.5);
      const double fc = f(xc);
      if (fc < std::min(fr, fv[worst])) {
        pts[worst] = xc, fv[worst] = fc;
      } else {
        for (std::size_t i = 0; i <= n; ++i) {
          if (i == best) continue;
          for (std::size_t k = 0; k < n; ++k) pts[i][k] = pts[best][k] + 0.5 * (pts[i][k] - pts[best][k]);
          fv[i] = f(pts[i]);
        }
      }
    }
  }
  const auto best = static_cast<std::size_t>(std::min_element(fv.begin(), fv.end()) - fv.begin());
  return {pts[best], fv[best], it};
}

struct ScalarMinimum {
  double x;
  double value;
};

// Bracketed 1-D minimization (golden section with parabolic steps).
inline ScalarMinimum minimize_scalar(const std::function<double(double)>& f, double lo, double hi) {
  std::uintmax_t iters = 500;
  const auto r = boost::math::tools::brent_find_minima(f, lo, hi, 45, iters);
  return {r.first, r.second};
}

struct LinearFit {
  double slope;
  double intercept;
  double slope_error;
};

// Weighted least squares y = a + b x; weights default to 1.
inline LinearFit linear_fit(std::span<const double> x, std::span<const double> y, std::span<const double> w = {}) {
  const std::size_t n = x.size();
  require(n >= 2 && y.size() == n, "linear_fit: need at least two points");
  double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double wi = w.empty() ? 1.0 : w[i];
    sw += wi, sx += wi * x[i], sy += wi * y[i], sxx += wi * x[i] * x[i], sxy += wi * x[i] * y[i];
  }
  const double det = sw * sxx - sx * sx;
  const double slope = (sw * sxy - sx * sy) / det;
  const double intercept = (sy - slope * sx) / sw;
  double chi2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - intercept - slope * x[i];
    chi2 += (w.empty() ? 1.0 : w[i]) * r * r;
  }
  const double dof = n > 2 ? static_cast<double>(n - 2) : 1.0;
  return {slope, intercept, std::sqrt(chi2 / dof * sw / det)};
}

struct Estimate {
  double mean;
  double error;  // standard error
};

inline Estimate mean_estimate(std::span<const double> xs) {
  const double n = static_cast<double>(xs.size());
  require(xs.size() >= 2, "mean_estimate: need at least two samples");
  const double m = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double v = 0;
  for (double x : xs) v += (x - m) * (x - m);
  return {m, std::sqrt(v / (n - 1) / n)};
}

// Jackknife over contiguous blocks for a smooth function of the sample mean.
inline Estimate jackknife(std::span<const double> xs, const std::function<double(double)>& g, int blocks = 100) {
  const std::size_t n = xs.size();
  require(n >= static_cast<std::size_t>(blocks) && blocks >= 2, "jackknife: too few samples");
  const double total = std::accumulate(xs.begin(), xs.end(), 0.0);
  std::vector<double> pseudo(blocks);
  for (int b = 0; b < blocks; ++b) {
    const std::size_t lo = n * b / blocks, hi = n * (b + 1) / blocks;
    const double part = std::accumulate(xs.begin() + lo, xs.begin() + hi, 0.0);
    pseudo[b] = g((total - part) / static_cast<double>(n - (hi - lo)));
  }
  const double mean = std::accumulate(pseudo.begin(), pseudo.end(), 0.0) / blocks;
  double v = 0;
  for (double p : pseudo) v += (p - mean) * (p - mean);
  return {g(total / n), std::sqrt((blocks - 1.0) / blocks * v)};
}

// Counter-based SplitMix64 stream keyed by (seed, stream index): each output is the
// finalizer applied to key + k * golden gamma, so streams are independent of how they are
// distributed over workers and cost nothing to construct.
class StreamEngine {
 public:
  using result_type = std::uint64_t;

  StreamEngine(std::uint64_t seed, std::uint64_t index) : state_(mix(mix(seed) ^ (index * 0xD1B54A32D192ED03ull))) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()() { return mix(state_ += 0x9E3779B97F4A7C15ull); }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
  std::uint64_t state_;
};

inline StreamEngine stream_rng(std::uint64_t seed, std::uint64_t index) { return {seed, index}; }

inline int worker_count() {
  if (const char* env = std::getenv("QTHERMO_WORKERS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Runs body(i) for i in [0, n) over contiguous chunks; body must write only to slot i.
template <class Body>
void parallel_for(std::size_t n, Body&& body, int workers = worker_count()) {
  const std::size_t w = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), 1, std::max<std::size_t>(n, 1));
  if (w == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::jthread> pool;
  std::vector<std::exception_ptr> errors(w);
  for (std::size_t k = 0; k < w; ++k)
    pool.emplace_back([&, k] {
      try {
        for (std::size_t i = n * k / w; i < n * (k + 1) / w; ++i) body(i);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    });
  pool.clear();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace qthermo
