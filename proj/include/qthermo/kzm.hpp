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
#include <functional>
#include <limits>
#include <sstream>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "qthermo/fluctuation.hpp"
#include "qthermo/qcore.hpp"

namespace qthermo::kzm {

// xi = xi0 |eps|^-nu, tau_c = tau0 |eps|^-(z nu), chi = chi0 |eps|^-Lambda, eps(t) = t / tau_Q,
// control lambda(t) = lambda_c (1 - eps(t)).
struct CriticalSpec {
  double nu = 1.0;
  double z = 1.0;
  double susceptibility_exponent = 0.0;  // Lambda
  double defect_dim = 0.0;               // d
  double space_dim = 1.0;                // D
  double xi0 = 1.0;
  double tau0 = 1.0;
  double chi0 = 1.0;
  double critical_value = 1.0;  // lambda_c

  void validate() const {
    require(nu > 0 && z > 0 && std::isfinite(nu) && std::isfinite(z), "critical spec: nu and z must be positive");
    require(xi0 > 0 && tau0 > 0 && chi0 > 0, "critical spec: scales must be positive");
    require(std::isfinite(susceptibility_exponent) && std::isfinite(critical_value), "critical spec: non-finite entry");
  }
  double znu() const { return z * nu; }
};

struct FreezeOut {
  double time;                // t_hat
  double relaxation;          // tau_c(t_hat)
  double correlation_length;  // xi_hat
  double defect_density;      // xi_hat^(d - D)
};

inline FreezeOut freeze_out(const CriticalSpec& s, double quench_time) {
  s.validate();
  require(quench_time > 0, "freeze_out: quench time must be positive");
  const double a = s.znu();
  const double t = std::pow(s.tau0 * std::pow(quench_time, a), 1.0 / (a + 1));
  const double eps = t / quench_time;
  const double xi = s.xi0 * std::pow(eps, -s.nu);
  return {t, s.tau0 * std::pow(eps, -a), xi, std::pow(xi, s.defect_dim - s.space_dim)};
}

// H(t) = (1/2) [[slope t, gap], [gap, -slope t]]; tau_Q = gap / slope and
// tau_c(t) = tau0 / sqrt(1 + eps^2) with tau0 = 1/gap unless given.
struct LzSpec {
  double gap = 1.0;
  double slope = 1.0;
  double relaxation = 0.0;  // tau0; 0 selects 1/gap

  void validate() const {
    require(gap > 0 && slope > 0 && std::isfinite(gap) && std::isfinite(slope), "lz: gap and slope must be positive");
    require(relaxation >= 0 && std::isfinite(relaxation), "lz: relaxation scale must be nonnegative");
  }
  double quench_time() const { return gap / slope; }
  double tau0() const { return relaxation > 0 ? relaxation : 1.0 / gap; }
  double relaxation_time(double t) const {
    const double e = t / quench_time();
    return tau0() / std::sqrt(1 + e * e);
  }
  Mat hamiltonian(double t) const {
    Mat h(2, 2);
    h << 0.5 * slope * t, 0.5 * gap, 0.5 * gap, -0.5 * slope * t;
    return h;
  }
  double level_gap(double t) const { return std::hypot(gap, slope * t); }
};

inline LzSpec lz_with_quench_time(double gap, double quench_time, double relaxation = 0.0) {
  LzSpec s{gap, gap / quench_time, relaxation};
  s.validate();
  return s;
}

struct LzFreezeOut {
  double time;        // positive root
  double relaxation;  // tau_c(t_hat)
  double epsilon;     // t_hat / tau_Q
};

inline LzFreezeOut freeze_out(const LzSpec& s) {
  s.validate();
  const double q = s.quench_time(), t0 = s.tau0();
  // (q/2)(sqrt(4 t0^2 + q^2) - q), written without cancellation
  const double t2 = 2 * q * t0 * t0 / (std::sqrt(4 * t0 * t0 + q * q) + q);
  const double t = std::sqrt(t2);
  return {t, s.relaxation_time(t), t / q};
}

enum class LzWindow { full, from_anticrossing };

// Excitation probability predicted by freezing the state over the impulse window.
inline double lz_defect_ai(const LzSpec& s, LzWindow w = LzWindow::full) {
  const double e = freeze_out(s).epsilon;
  if (w == LzWindow::full) return e * e / (1 + e * e);
  return 0.5 * (1 - 1 / std::sqrt(1 + e * e));
}

namespace detail {

// exp(-i K) for traceless hermitian 2x2 K.
inline Eigen::Matrix2cd su2_exp(const Eigen::Matrix2cd& k) {
  const double kz = k(0, 0).real();
  const cplx off = k(1, 0);
  const double r = std::sqrt(kz * kz + std::norm(off));
  const double c = std::cos(r), sn = r > 0 ? std::sin(r) / r : 1.0;
  Eigen::Matrix2cd u;
  u << cplx(c, 0) - kI * sn * kz, -kI * sn * std::conj(off), -kI * sn * off, cplx(c, 0) + kI * sn * kz;
  return u;
}

// Fourth-order Magnus propagator over [t0, t1].
inline Eigen::Matrix2cd lz_propagator(const LzSpec& s, double t0, double t1, long long steps) {
  const double h = (t1 - t0) / steps;
  const double g = 0.5 / std::sqrt(3.0);
  Eigen::Matrix2cd u = Eigen::Matrix2cd::Identity();
  for (long long k = 0; k < steps; ++k) {
    const double a = t0 + k * h;
    const Eigen::Matrix2cd h1 = s.hamiltonian(a + (0.5 - g) * h), h2 = s.hamiltonian(a + (0.5 + g) * h);
    // i Omega = (h/2)(H1 + H2) - i (sqrt3 h^2 / 12) [H2, H1]
    const Eigen::Matrix2cd k4 = 0.5 * h * (h1 + h2) - kI * (std::sqrt(3.0) * h * h / 12) * (h2 * h1 - h1 * h2);
    u = su2_exp(k4) * u;
  }
  return u;
}

inline Vec ground_state(const Mat& h) { return eigh(h).vectors.col(0); }

// Instantaneous eigenstates dressed to first adiabatic order, so a finite window starts and ends
// close to the states an infinitely long sweep would pass through. Mixing angle theta with
// cos theta = slope t / E, E = level gap; |g> = (-sin theta/2, cos theta/2), |e> = (cos theta/2, sin theta/2).
struct DressedBasis {
  Vec ground;
  Vec excited;
};

inline DressedBasis dressed_basis(const LzSpec& s, double t) {
  const double e = s.level_gap(t);
  const double theta = std::atan2(s.gap, s.slope * t);
  const double rate = -s.gap * s.slope / (e * e);  // d theta / dt
  const cplx c = -kI * rate / (2 * e);
  Vec g(2), x(2);
  g << -std::sin(theta / 2), std::cos(theta / 2);
  x << std::cos(theta / 2), std::sin(theta / 2);
  DressedBasis b{g + c * x, x - std::conj(c) * g};
  b.ground.normalize();
  b.excited.normalize();
  return b;
}

}  // namespace detail

struct LzOptions {
  LzWindow window = LzWindow::full;
  double span = 32;       // initial half window in units of max(tau_Q, t_hat, 1/gap)
  double tolerance = 1e-9;  // relative
  double absolute_tolerance = 1e-14;
  int max_doublings = 6;
};

struct LzDefect {
  double tdse;      // excitation probability at the window end
  double ai;        // adiabatic-impulse value
  double t_start;
  double t_end;
  long long steps;
};

// Excitation probability from the instantaneous ground state at t_start, integrated to t_end;
// window and step are doubled until successive values agree to the tolerance.
inline LzDefect lz_defect_exact(const LzSpec& s, const LzOptions& opt = {}) {
  s.validate();
  require(opt.span > 0 && opt.tolerance > 0, "lz_defect_exact: span and tolerance must be positive");
  const double unit = std::max({s.quench_time(), freeze_out(s).time, 1.0 / s.gap});
  auto run = [&](double half, double step_scale) {
    const double t0 = opt.window == LzWindow::full ? -half : 0.0, t1 = half;
    const double emax = 0.5 * s.level_gap(half);
    const auto steps = static_cast<long long>(std::ceil((t1 - t0) * emax / step_scale)) + 16;
    // the half window starts in the bare ground state at the anticrossing
    const Vec g0 = opt.window == LzWindow::full ? detail::dressed_basis(s, t0).ground : detail::ground_state(s.hamiltonian(t0));
    const Vec psi = detail::lz_propagator(s, t0, t1, steps) * Eigen::Vector2cd(g0);
    return LzDefect{std::min(1.0, std::norm(detail::dressed_basis(s, t1).excited.dot(psi))), lz_defect_ai(s, opt.window), t0, t1, steps};
  };
  double half = opt.span * unit;
  LzDefect last = run(half, 0.05);
  for (int k = 0; k < opt.max_doublings; ++k) {
    const LzDefect fine = run(half, 0.025);   // step check
    half *= 2;
    const LzDefect wide = run(half, 0.05);    // window check
    const double tol = opt.tolerance * wide.tdse + opt.absolute_tolerance;
    if (std::abs(fine.tdse - last.tdse) <= tol && std::abs(wide.tdse - last.tdse) <= tol) return wide;
    last = wide;
  }
  std::ostringstream msg;
  msg << "lz_defect_exact: window did not converge (tau_Q " << s.quench_time() << ", half window " << half
      << ", last value " << last.tdse << ")";
  throw IntegrationFailure(msg.str());
}

struct PowerLawFit {
  double exponent;
  double exponent_error;
  double log_prefactor;
};

inline PowerLawFit power_law_fit(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size() && x.size() >= 3, "power_law_fit: need at least three points");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    require(x[i] > 0 && y[i] > 0, "power_law_fit: values must be positive");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  const auto f = linear_fit(lx, ly);
  return {f.slope, f.slope_error, f.intercept};
}

inline double decades(std::span<const double> x) {
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  return std::log10(*hi / *lo);
}

struct LzSweepPoint {
  double quench_time;
  double tdse;
  double ai;
};

struct LzSweep {
  std::vector<LzSweepPoint> points;
  PowerLawFit tdse_fit;
  PowerLawFit ai_fit;
};

inline LzSweep lz_defect_sweep(double gap, const std::vector<double>& quench_times, const LzOptions& opt = {}) {
  require(decades(quench_times) >= 1.5, "lz_defect_sweep: the sweep must span at least 1.5 decades");
  LzSweep out;
  out.points.resize(quench_times.size());
  parallel_for(quench_times.size(), [&](std::size_t i) {
    const auto d = lz_defect_exact(lz_with_quench_time(gap, quench_times[i]), opt);
    out.points[i] = {quench_times[i], d.tdse, d.ai};
  });
  std::vector<double> x, a, b;
  for (const auto& p : out.points) x.push_back(p.quench_time), a.push_back(p.tdse), b.push_back(p.ai);
  out.tdse_fit = power_law_fit(x, a);
  out.ai_fit = power_law_fit(x, b);
  return out;
}

// Predicted exponent of the excess work in tau_Q.
inline double excess_work_exponent(const CriticalSpec& s) {
  s.validate();
  return (s.susceptibility_exponent - 2) / (s.znu() + 1);
}

inline double excess_work_closed_form(const CriticalSpec& s, double quench_time, double window = 2.0) {
  s.validate();
  const double a = s.znu() + s.susceptibility_exponent;
  if (a <= 1) throw InvalidInput("excess work: z nu + Lambda must exceed 1 for the window integral to converge");
  require(window > 1 && quench_time > 0, "excess work: need n > 1 and a positive quench time");
  const double lc = s.critical_value;
  return 2 * lc * lc * s.chi0 * std::pow(window, 1 - a) / (a - 1) *
         std::pow(s.tau0, (2 - s.susceptibility_exponent) / (s.znu() + 1)) *
         std::pow(quench_time, (s.susceptibility_exponent - 2) / (s.znu() + 1));
}

// Integrand |d lambda/dt|^2 tau_c(t) chi(t) of the quadratic form.
inline double excess_work_integrand(const CriticalSpec& s, double quench_time, double t) {
  const double eps = std::abs(t) / quench_time;
  const double rate = s.critical_value / quench_time;
  return rate * rate * s.tau0 * std::pow(eps, -s.znu()) * s.chi0 * std::pow(eps, -s.susceptibility_exponent);
}

struct Quadrature {
  double value;
  int panels;
};

// Both tails |t| >= n tau_hat, on t = n tau_hat e^u with composite 3-point Gauss-Legendre
// (order 6) over [0, u_max]. With panels = 0 the panel count doubles until agreement to rel_tol.
inline Quadrature excess_work_quadrature(const CriticalSpec& s, double quench_time, double window = 2.0, int panels = 0,
                                         double rel_tol = 1e-13) {
  s.validate();
  const double a = s.znu() + s.susceptibility_exponent;
  if (a <= 1) throw InvalidInput("excess work: z nu + Lambda must exceed 1 for the window integral to converge");
  require(window > 1 && quench_time > 0, "excess work: need n > 1 and a positive quench time");
  const double start = window * freeze_out(s, quench_time).time;
  const double umax = 40.0 / (a - 1);  // integrand decays as e^{-(a-1) u}
  auto f = [&](double u) {
    const double t = start * std::exp(u);
    return t * excess_work_integrand(s, quench_time, t);
  };
  auto composite = [&](int m) {
    double sum = 0;
    const double h = umax / m;
    for (int k = 0; k < m; ++k)
      sum += boost::math::quadrature::gauss<double, 3>::integrate(f, k * h, (k + 1) * h);
    return 2 * sum;
  };
  if (panels > 0) return {composite(panels), panels};
  int m = 16;
  double last = composite(m);
  while (m < (1 << 20)) {
    m *= 2;
    const double next = composite(m);
    if (std::abs(next - last) <= rel_tol * std::abs(next)) return {next, m};
    last = next;
  }
  throw IntegrationFailure("excess work quadrature did not converge");
}

struct ExcessWorkPoint {
  double quench_time;
  double quadrature;
  double closed_form;
};

struct ExcessWorkScaling {
  std::vector<ExcessWorkPoint> points;
  PowerLawFit fit;
  double predicted_exponent;
};

inline ExcessWorkScaling excess_work_scaling(const CriticalSpec& s, const std::vector<double>& quench_times,
                                             double window = 2.0) {
  require(quench_times.size() >= 3, "excess_work_scaling: need at least three quench times");
  ExcessWorkScaling out;
  out.points.resize(quench_times.size());
  parallel_for(quench_times.size(), [&](std::size_t i) {
    const double q = quench_times[i];
    out.points[i] = {q, excess_work_quadrature(s, q, window).value, excess_work_closed_form(s, q, window)};
  });
  std::vector<double> x, y;
  for (const auto& p : out.points) x.push_back(p.quench_time), y.push_back(p.quadrature);
  out.fit = power_law_fit(x, y);
  out.predicted_exponent = excess_work_exponent(s);
  return out;
}

struct LzWork {
  double quench_time;
  fluctuation::WorkDistribution distribution;
  double excess_work;         // <W> - (E_g(t_hat) - E_g(-t_hat))
  double excitation;          // P(excited at t_hat)
  double gap_at_freeze_out;
};

// Two-time measurement over [-t_hat, t_hat], ground-state start.
inline LzWork lz_ttm_work(const LzSpec& s, double step_scale = 0.01) {
  s.validate();
  const double t = freeze_out(s).time;
  const double emax = 0.5 * s.level_gap(t);
  const auto steps = static_cast<long long>(std::ceil(2 * t * emax / step_scale)) + 64;
  const Mat u = detail::lz_propagator(s, -t, t, steps);
  const Mat hi = s.hamiltonian(-t), hf = s.hamiltonian(t);
  const Vec g0 = detail::ground_state(hi);
  auto d = fluctuation::ttm_work_distribution(hi, hf, u, 1.0, DensityState::pure(g0));
  const Vec psi = u * g0;
  const double excited = std::max(0.0, 1.0 - std::norm(detail::ground_state(hf).dot(psi)));
  const double adiabatic = eigh(hf).values[0] - eigh(hi).values[0];
  return {s.quench_time(), d, d.mean() - adiabatic, excited, s.level_gap(t)};
}

}  // namespace qthermo::kzm
