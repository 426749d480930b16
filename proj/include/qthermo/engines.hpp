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

#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "qthermo/core/errors.hpp"
#include "qthermo/core/numerics.hpp"

namespace qthermo::engines {

// Reservoir pair. The couplings are heat conductances for the Carnot model and relaxation
// rates for the Otto models; zeta multiplies the isotherm time to account for the adiabats.
struct BathPair {
  double t_hot;
  double t_cold;
  double coupling_hot = 1.0;
  double coupling_cold = 1.0;
  double zeta = 1.0;

  void validate() const {
    require(t_cold > 0 && t_hot > 0, "bath temperatures must be positive");
    require(t_hot >= t_cold, "hot bath must not be colder than the cold bath");
    require(coupling_hot > 0 && coupling_cold > 0, "bath couplings must be positive");
    require(zeta >= 1.0, "adiabatic overhead factor must be >= 1");
  }
  double carnot() const { return 1.0 - t_cold / t_hot; }
  double curzon_ahlborn() const { return 1.0 - std::sqrt(t_cold / t_hot); }
};

struct CyclePerformance {
  double work_compression = 0;  // energy given to the medium on the first adiabat
  double heat_in = 0;           // from the hot bath
  double work_expansion = 0;    // energy given to the medium on the second adiabat (negative in an engine)
  double heat_out = 0;          // released into the cold bath
  double net_work = 0;          // extracted per cycle
  double efficiency = 0;
  double power = std::numeric_limits<double>::quiet_NaN();
  std::array<double, 4> local_temperatures{};  // A, B, C, D
  bool positive_work = true;

  double bookkeeping_residual() const { return std::abs(net_work - (heat_in - heat_out)); }
};

// ---------------------------------------------------------------- Curzon-Ahlborn

// Power of the endoreversible Carnot cycle as a function of the two working temperature gaps.
inline double carnot_power(const BathPair& bath, double gap_hot, double gap_cold) {
  const double t_hw = bath.t_hot - gap_hot, t_cw = bath.t_cold + gap_cold;
  if (gap_hot <= 0 || gap_cold <= 0 || t_hw <= t_cw) return 0.0;
  const double ratio = t_cw / t_hw;
  return (1.0 - ratio) / (bath.zeta * (1.0 / (bath.coupling_hot * gap_hot) + ratio / (bath.coupling_cold * gap_cold)));
}

struct CurzonAhlbornResult {
  double max_power;
  double gap_hot;   // optimal T_h - T_hw
  double gap_cold;  // optimal T_cw - T_c
  double efficiency;
  double numeric_max_power;
  double numeric_gap_hot;
  double numeric_gap_cold;
  double numeric_efficiency;
};

inline CurzonAhlbornResult curzon_ahlborn(const BathPair& bath) {
  bath.validate();
  const double sh = std::sqrt(bath.t_hot), sc = std::sqrt(bath.t_cold);
  const double kh = bath.coupling_hot, kc = bath.coupling_cold;
  const double diff = (sh - sc) / (std::sqrt(kh) + std::sqrt(kc));
  CurzonAhlbornResult r{};
  r.max_power = kh * kc / bath.zeta * diff * diff;
  r.gap_hot = bath.t_hot * (1 - std::sqrt(bath.t_cold / bath.t_hot)) / (1 + std::sqrt(kh / kc));
  r.gap_cold = bath.t_cold * (std::sqrt(bath.t_hot / bath.t_cold) - 1) / (1 + std::sqrt(kc / kh));
  r.efficiency = bath.curzon_ahlborn();
  if (bath.t_hot == bath.t_cold) {
    r.numeric_max_power = 0, r.numeric_gap_hot = r.numeric_gap_cold = 0, r.numeric_efficiency = 0;
    return r;
  }
  // Optimize over fractions of the available range; start from the symmetric split.
  const double range = bath.t_hot - bath.t_cold;
  auto neg = [&](std::span<const double> u) { return -carnot_power(bath, u[0] * range, u[1] * range); };
  auto fit = nelder_mead(neg, {0.25, 0.25}, {0.1, 0.1});
  fit = nelder_mead(neg, fit.x, {1e-3, 1e-3});
  r.numeric_gap_hot = fit.x[0] * range;
  r.numeric_gap_cold = fit.x[1] * range;
  r.numeric_max_power = -fit.value;
  r.numeric_efficiency = 1 - (bath.t_cold + r.numeric_gap_cold) / (bath.t_hot - r.numeric_gap_hot);
  return r;
}

// ---------------------------------------------------------------- two-level Otto

inline CyclePerformance otto_tls(double gap_initial, double gap_final, double t_cold, double t_hot) {
  require(gap_initial > 0 && gap_final > 0, "otto_tls: gaps must be positive");
  require(t_cold > 0 && t_hot > 0, "otto_tls: temperatures must be positive");
  // Excited population of a gap-w level at temperature t: (1 - tanh(w / 2t)) / 2.
  const double th_a = std::tanh(gap_initial / (2 * t_cold));
  const double th_c = std::tanh(gap_final / (2 * t_hot));
  CyclePerformance c;
  c.work_compression = (gap_final - gap_initial) / 2 * (1 - th_a);
  c.heat_in = gap_final / 2 * (th_a - th_c);
  c.work_expansion = (gap_initial - gap_final) / 2 * (1 - th_c);
  c.heat_out = gap_initial / 2 * (th_a - th_c);
  c.net_work = c.heat_in - c.heat_out;
  c.efficiency = 1 - gap_initial / gap_final;
  c.local_temperatures = {t_cold, gap_final / gap_initial * t_cold, t_hot, gap_initial / gap_final * t_hot};
  c.positive_work = gap_final / gap_initial < t_hot / t_cold;
  return c;
}

// ---------------------------------------------------------------- endoreversible Otto

enum class Medium { classical_oscillator, quantum_oscillator };

inline std::string to_string(Medium m) { return m == Medium::classical_oscillator ? "classical-ho" : "quantum-ho"; }

inline double medium_energy(Medium m, double freq, double t) {
  if (m == Medium::classical_oscillator) return t;
  const double x = freq / (2 * t);
  return freq / 2 / std::tanh(x);
}

inline double medium_entropy(Medium m, double freq, double t) {
  if (m == Medium::classical_oscillator) return 1.0 + std::log(t / freq);
  const double x = freq / (2 * t);
  // ln(2 sinh x) = x + ln(1 - e^{-2x})
  return x / std::tanh(x) - x - std::log1p(-std::exp(-2 * x));
}

// Temperature reached at frequency `to` along the isentrope through (from, t).
inline double isentrope_temperature(Medium m, double from, double t, double to) {
  if (m == Medium::classical_oscillator) return t * to / from;
  const double target = medium_entropy(m, from, t);
  auto f = [&](double y) { return medium_entropy(m, to, std::exp(y)) - target; };
  double lo = std::log(t * to / from) - 1.0, hi = lo + 2.0;
  while (f(lo) > 0) lo -= 1.0;
  while (f(hi) < 0) hi += 1.0;
  boost::math::tools::eps_tolerance<double> tol(52);
  std::uintmax_t iters = 200;
  const auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, tol, iters);
  return std::exp(0.5 * (a + b));
}

struct OttoSpec {
  Medium medium;
  double freq_initial;  // cold-isochore frequency
  double freq_final;    // hot-isochore frequency
  double tau_hot;
  double tau_cold;

  double compression() const { return freq_initial / freq_final; }
  void validate() const {
    require(freq_initial > 0 && freq_final > freq_initial, "otto: need 0 < initial frequency < final frequency");
    require(tau_hot > 0 && tau_cold > 0, "otto: stroke times must be positive");
  }
};

// T_B from closing the cycle: both Fourier relaxations plus the isentropes T_B = T_A / kappa, T_D = kappa T_C.
inline double closed_form_tb(const OttoSpec& s, const BathPair& b) {
  const double k = s.compression();
  const double ec = std::exp(b.coupling_cold * s.tau_cold), eh = std::exp(-b.coupling_hot * s.tau_hot);
  return (b.t_cold * (ec - 1) + k * b.t_hot * (1 - eh)) / (k * (ec - eh));
}

struct LocalTemperatures {
  double a, b, c, d;
};

inline LocalTemperatures cycle_temperatures(const OttoSpec& s, const BathPair& b, double tb) {
  const double eh = std::exp(-b.coupling_hot * s.tau_hot), ec = std::exp(-b.coupling_cold * s.tau_cold);
  const double tc = b.t_hot + (tb - b.t_hot) * eh;
  const double td = isentrope_temperature(s.medium, s.freq_final, tc, s.freq_initial);
  const double ta = b.t_cold + (td - b.t_cold) * ec;
  return {ta, tb, tc, td};
}

// Fixed point of T_B by bracketing root search with isentropes resolved from the medium entropy.
inline double solve_tb(const OttoSpec& s, const BathPair& b) {
  auto mismatch = [&](double tb) {
    const auto lt = cycle_temperatures(s, b, tb);
    return isentrope_temperature(s.medium, s.freq_initial, lt.a, s.freq_final) - tb;
  };
  double lo = 0.5 * b.t_cold * s.freq_final / s.freq_initial * 1e-3, hi = 2 * b.t_hot * s.freq_final / s.freq_initial;
  lo = std::min(lo, 0.5 * b.t_cold);
  if (!(mismatch(lo) > 0 && mismatch(hi) < 0)) throw Infeasible("endoreversible_otto: no positive local-temperature fixed point");
  boost::math::tools::eps_tolerance<double> tol(52);
  std::uintmax_t iters = 300;
  const auto [x, y] = boost::math::tools::toms748_solve(mismatch, lo, hi, tol, iters);
  return 0.5 * (x + y);
}

inline CyclePerformance endoreversible_otto(const OttoSpec& s, const BathPair& b) {
  s.validate();
  b.validate();
  const double tb = s.medium == Medium::classical_oscillator ? closed_form_tb(s, b) : solve_tb(s, b);
  if (!(tb > 0) || !std::isfinite(tb)) throw Infeasible("endoreversible_otto: no positive local-temperature fixed point");
  const auto t = cycle_temperatures(s, b, tb);
  auto e = [&](double f, double temp) { return medium_energy(s.medium, f, temp); };
  CyclePerformance c;
  c.work_compression = e(s.freq_final, t.b) - e(s.freq_initial, t.a);
  c.heat_in = e(s.freq_final, t.c) - e(s.freq_final, t.b);
  c.work_expansion = e(s.freq_initial, t.d) - e(s.freq_final, t.c);
  c.heat_out = e(s.freq_initial, t.d) - e(s.freq_initial, t.a);
  c.net_work = -(c.work_compression + c.work_expansion);
  c.efficiency = c.heat_in != 0 ? c.net_work / c.heat_in : 0.0;
  c.power = c.net_work / (b.zeta * (s.tau_hot + s.tau_cold));
  c.local_temperatures = {t.a, t.b, t.c, t.d};
  c.positive_work = c.net_work > 0;
  return c;
}

// Classical-medium power in factorized form.
inline double classical_otto_power(double kappa, double tau_hot, double tau_cold, const BathPair& b) {
  const double x = b.coupling_cold * tau_cold, y = b.coupling_hot * tau_hot;
  return 2 * (kappa - 1) * (b.t_cold - kappa * b.t_hot) / (b.zeta * kappa * (tau_cold + tau_hot)) * std::sinh(x / 2) *
         std::sinh(y / 2) / std::sinh((x + y) / 2);
}

// ---------------------------------------------------------------- power maximization

enum class Knob { kappa, tau_hot, tau_cold };

struct Box {
  Knob knob;
  double lo;
  double hi;
};

struct PowerOptimum {
  OttoSpec spec;
  double max_power;
  double efficiency;
  bool degenerate;  // landscape flatter than 1e-14 across the grid
};

inline OttoSpec with_knobs(OttoSpec s, std::span<const Box> boxes, std::span<const double> x) {
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    const double v = std::clamp(x[i], boxes[i].lo, boxes[i].hi);
    switch (boxes[i].knob) {
      case Knob::kappa: s.freq_initial = v * s.freq_final; break;
      case Knob::tau_hot: s.tau_hot = v; break;
      case Knob::tau_cold: s.tau_cold = v; break;
    }
  }
  return s;
}

// Simplex comparisons stall once value differences reach rounding, which leaves the argmax
// uncertain at the sqrt(eps) level. Coordinate Newton steps on symmetric differences then
// settle on the same point regardless of where the simplex stopped.
template <class F>
void polish_maximum(const F& power, std::vector<double>& x, std::span<const Box> boxes) {
  const double start = power(x);
  if (!std::isfinite(start)) return;
  std::vector<double> y = x;
  for (int sweep = 0; sweep < 40; ++sweep) {
    double moved = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      const double h = 1e-4 * (boxes[i].hi - boxes[i].lo);
      if (y[i] - h <= boxes[i].lo || y[i] + h >= boxes[i].hi) continue;
      auto at = [&](double v) {
        auto z = y;
        z[i] = v;
        return power(z);
      };
      const double fm = at(y[i] - h), f0 = at(y[i]), fp = at(y[i] + h);
      const double curv = (fp - 2 * f0 + fm) / (h * h);
      if (!(curv < 0) || !std::isfinite(fm + fp)) continue;
      const double step = std::clamp(-(fp - fm) / (2 * h) / curv, -h, h);
      y[i] += step;
      moved = std::max(moved, std::abs(step) / (boxes[i].hi - boxes[i].lo));
    }
    if (moved < 1e-14) break;
  }
  if (power(y) >= start - 1e-12 * std::abs(start)) x = y;
}

// Coarse grid, then Nelder-Mead from the best grid point; freq_final stays fixed.
inline PowerOptimum maximize_power(const OttoSpec& tmpl, const BathPair& bath, std::span<const Box> boxes,
                                   int grid_points = 41) {
  require(!boxes.empty(), "maximize_power: nothing to vary");
  require(grid_points >= 3, "maximize_power: grid needs at least 3 points per axis");
  for (const auto& bx : boxes) require(bx.hi > bx.lo, "maximize_power: empty box");
  auto power = [&](std::span<const double> x) -> double {
    for (std::size_t i = 0; i < boxes.size(); ++i)
      if (x[i] < boxes[i].lo || x[i] > boxes[i].hi) return -std::numeric_limits<double>::infinity();
    const auto s = with_knobs(tmpl, boxes, x);
    if (s.freq_initial >= s.freq_final) return -std::numeric_limits<double>::infinity();
    return endoreversible_otto(s, bath).power;
  };
  const std::size_t dim = boxes.size();
  std::size_t total = 1;
  for (std::size_t i = 0; i < dim; ++i) total *= grid_points;
  std::vector<double> best_x(dim), x(dim);
  double best = -std::numeric_limits<double>::infinity(), worst = std::numeric_limits<double>::infinity();
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rem = idx;
    for (std::size_t i = 0; i < dim; ++i) {
      const double u = static_cast<double>(rem % grid_points) / (grid_points - 1);
      rem /= grid_points;
      // keep strictly inside the box so kappa never reaches 1
      x[i] = boxes[i].lo + (boxes[i].hi - boxes[i].lo) * (1e-9 + u * (1 - 2e-9));
    }
    const double p = power(x);
    if (p > best) best = p, best_x = x;
    if (std::isfinite(p)) worst = std::min(worst, p);
  }
  std::vector<double> step(dim);
  for (std::size_t i = 0; i < dim; ++i) step[i] = (boxes[i].hi - boxes[i].lo) / (grid_points - 1);
  auto neg = [&](std::span<const double> v) { return -power(v); };
  auto fit = nelder_mead(neg, best_x, step, 1e-16, 40000);
  for (auto& s : step) s *= 1e-3;
  fit = nelder_mead(neg, fit.x, step, 1e-16, 40000);
  polish_maximum(power, fit.x, boxes);
  std::vector<double> opt = power(fit.x) >= best ? fit.x : best_x;
  const auto spec = with_knobs(tmpl, boxes, opt);
  const auto perf = endoreversible_otto(spec, bath);
  return {spec, perf.power, perf.efficiency, best - worst < 1e-14};
}

}  // namespace qthermo::engines
