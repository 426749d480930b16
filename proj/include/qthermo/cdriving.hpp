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
#include <string>
#include <vector>

#include "qthermo/qcore.hpp"

namespace qthermo::cdriving {

inline constexpr double kGapFloor = 1e-8;
inline constexpr double kCriticalMargin = 1e-2;
inline constexpr double kTailPopulation = 1e-10;

namespace detail {

// Central (or one-sided at the ends) difference with repeated Richardson extrapolation.
inline Mat derivative(const HamiltonianPath& path, double t) {
  const double tau = path.duration;
  const bool lo_edge = t < 0.05 * tau, hi_edge = t > 0.95 * tau;
  auto estimate = [&](double h) -> Mat {
    if (lo_edge) return (-3.0 * path.at(t) + 4.0 * path.at(t + h) - path.at(t + 2 * h)) / (2 * h);
    if (hi_edge) return (3.0 * path.at(t) - 4.0 * path.at(t - h) + path.at(t - 2 * h)) / (2 * h);
    return (path.at(t + h) - path.at(t - h)) / (2 * h);
  };
  double h = 0.02 * tau;
  std::vector<Mat> row{estimate(h)};
  Mat best = row[0];
  double err = std::numeric_limits<double>::infinity();
  for (int level = 1; level < 8; ++level) {
    h *= 0.5;
    std::vector<Mat> next{estimate(h)};
    double factor = 4.0;
    for (std::size_t k = 1; k <= row.size(); ++k, factor *= 4.0)
      next.push_back(next[k - 1] + (next[k - 1] - row[k - 1]) / (factor - 1.0));
    const double e = max_abs(next.back() - row.back());
    if (e < err) err = e, best = next.back();
    row = std::move(next);
    if (err <= 1e-12 * std::max(1.0, max_abs(best))) break;
  }
  return best;
}

inline void check_gaps(const RVec& e, double t, double floor) {
  for (Eigen::Index k = 1; k < e.size(); ++k)
    if (e[k] - e[k - 1] < floor) {
      std::ostringstream msg;
      msg << "cd_spectral: levels " << k - 1 << " and " << k << " collide at t=" << t << " (gap " << e[k] - e[k - 1]
          << ")";
      throw Singularity(msg.str());
    }
}

// Fourth-order Magnus step with two Gauss points.
inline Mat magnus_step(const std::function<Mat(double)>& h, double t, double dt) {
  const double c = std::sqrt(3.0) / 6.0;
  const Mat h1 = h(t + (0.5 - c) * dt), h2 = h(t + (0.5 + c) * dt);
  const Mat k = 0.5 * dt * (h1 + h2) - kI * (std::sqrt(3.0) / 12.0) * dt * dt * commutator(h2, h1);
  return expm_hermitian(0.5 * (k + k.adjoint()), -kI);
}

}  // namespace detail

struct DrivenSystem {
  HamiltonianPath h0;
  int gap_samples = 257;

  double gap_floor() const {
    double g = std::numeric_limits<double>::infinity();
    for (int k = 0; k < gap_samples; ++k) {
      const RVec e = eigh(h0.at(h0.duration * k / (gap_samples - 1))).values;
      for (Eigen::Index i = 1; i < e.size(); ++i) g = std::min(g, e[i] - e[i - 1]);
    }
    return g;
  }
};

// i sum_{m != n} |m><m| dH0/dt |n><n| / (E_n - E_m)
inline Mat cd_spectral(const DrivenSystem& s, double t, double floor = kGapFloor) {
  const auto es = eigh(s.h0.at(t));
  detail::check_gaps(es.values, t, floor);
  const Mat d = es.vectors.adjoint() * detail::derivative(s.h0, t) * es.vectors;
  Mat h1 = Mat::Zero(d.rows(), d.cols());
  for (Eigen::Index m = 0; m < d.rows(); ++m)
    for (Eigen::Index n = 0; n < d.cols(); ++n)
      if (m != n) h1(m, n) = kI * d(m, n) / (es.values[n] - es.values[m]);
  const Mat out = es.vectors * h1 * es.vectors.adjoint();
  return 0.5 * (out + out.adjoint());
}

// Position and momentum on a truncated ladder of reference frequency omega_ref (m = 1).
struct Ladder {
  int cutoff;
  double omega_ref = 1.0;

  Mat a() const { return annihilation(cutoff); }
  Mat q() const {
    const Mat l = a();
    return (l + l.adjoint()) / std::sqrt(2 * omega_ref);
  }
  Mat p() const {
    const Mat l = a();
    return kI * std::sqrt(omega_ref / 2) * (l.adjoint() - l);
  }
};

// p^2/2 + omega(t)^2 q^2/2
inline HamiltonianPath oscillator_path(const Schedule& omega, const Ladder& lad) {
  const Mat q2 = lad.q() * lad.q(), p2 = lad.p() * lad.p();
  return {omega.duration(), [omega, q2, p2](double t) {
            const double w = omega(t);
            return (0.5 * p2 + 0.5 * w * w * q2).eval();
          }};
}

// i (omega'/4 omega) (a^2 - a^+2)
inline Mat cd_ho(const Schedule& omega, double t, int cutoff) {
  const double w = omega(t);
  if (!(w > 0)) throw InvalidInput("cd_ho: frequency must be positive");
  const Mat a = annihilation(cutoff);
  return kI * (omega.rate(t) / (4 * w)) * (a * a - a.adjoint() * a.adjoint());
}

// p^2/2 + V0((q - f)/gamma) / gamma^2, with V0 applied through the eigenbasis of q.
inline HamiltonianPath scale_invariant_path(const std::function<double(double)>& v0, const Schedule& gamma,
                                            const Schedule& f, const Ladder& lad) {
  const auto qs = eigh(lad.q());
  const Mat p2 = lad.p() * lad.p();
  return {gamma.duration(), [=](double t) {
            const double g = gamma(t), x0 = f(t);
            Vec v(qs.values.size());
            for (Eigen::Index k = 0; k < v.size(); ++k) v[k] = v0((qs.values[k] - x0) / g) / (g * g);
            return (0.5 * p2 + qs.vectors * v.asDiagonal() * qs.vectors.adjoint()).eval();
          }};
}

// (gamma'/2 gamma) [(q - f) p + p (q - f)] + f' p
inline Mat cd_scale_invariant(const Schedule& gamma, const Schedule& f, double t, const Ladder& lad) {
  const double g = gamma(t);
  if (!(g > 0)) throw InvalidInput("cd_scale_invariant: gamma must be positive");
  const Mat p = lad.p();
  const Mat x = lad.q() - f(t) * identity(lad.cutoff);
  return (gamma.rate(t) / (2 * g)) * (x * p + p * x) + f.rate(t) * p;
}

// Collective spin j = N/2 in the basis S_z = j, j-1, ..., -j.
struct CollectiveSpin {
  Mat x, y, z;
};

inline CollectiveSpin collective_spin(int n) {
  require(n >= 1, "collective_spin: need at least one spin");
  const double j = 0.5 * n;
  const int d = n + 1;
  Mat plus = Mat::Zero(d, d), z = Mat::Zero(d, d);
  for (int k = 0; k < d; ++k) {
    const double m = j - k;
    z(k, k) = m;
    if (k > 0) plus(k - 1, k) = std::sqrt(j * (j + 1) - m * (m + 1));
  }
  return {0.5 * (plus + plus.adjoint()), -0.5 * kI * (plus - plus.adjoint()), z};
}

inline Mat lmg_hamiltonian(double h, double chi, int n) {
  const auto s = collective_spin(n);
  return -(2.0 / n) * (s.x * s.x + chi * s.y * s.y) - 2 * h * s.z + 0.5 * (1 + chi) * identity(n + 1);
}

inline HamiltonianPath lmg_path(const Schedule& h, double chi, int n) {
  const auto s = collective_spin(n);
  const Mat fixed = -(2.0 / n) * (s.x * s.x + chi * s.y * s.y) + 0.5 * (1 + chi) * identity(n + 1);
  const Mat z = s.z;
  return {h.duration(), [h, fixed, z](double t) { return (fixed - 2 * h(t) * z).eval(); }};
}

enum class LmgPhase { paramagnetic, ferromagnetic };

inline std::string phase_label(LmgPhase p) { return p == LmgPhase::paramagnetic ? "h>1" : "0<h<1"; }

struct LmgCd {
  double omega;
  double prefactor;  // H1 = prefactor (SxSy + SySx)
  double printed;    // two-branch coefficient, equal to omega'/(2 N omega h')
  Mat h1;
  LmgPhase phase;
};

// Oscillator frequency of the large-N mapping on either side of h = 1.
inline double lmg_omega(double h, double chi) {
  return h > 1 ? 2 * std::sqrt((h - 1) * (h - chi)) : 2 * std::sqrt((1 - h * h) * (1 - chi));
}

inline double lmg_printed_coefficient(double h, double chi, int n) {
  return h > 1 ? (2 * h - 1 - chi) / (4.0 * n * (h - 1) * (h - chi))
               : 2 * h * (chi - 1) / (4.0 * n * (1 - h * h) * (1 - chi));
}

// HP boson form A a^+a - (B/2)(a^2 + a^+2), diagonalized by tanh(alpha) = B/A.
// Returns d(alpha)/dh.
inline double lmg_bogoliubov_slope(double h, double chi) {
  if (h > 1) return -(1 - chi) / (2 * (h - 1) * (h - chi));
  return h / (1 - h * h);
}

// The squeeze b = cosh(alpha/2) a + sinh(alpha/2) a^+ is undone by i(alpha'/4)(a^2 - a^+2), and
// a^2 - a^+2 = (2i/N)(SxSy + SySx) for S+ = sqrt(N) a, so H1 = (alpha'/2N)(SxSy + SySx).
// Below h = 1 the HP axis itself turns with h; that rotation is not part of this term.
inline LmgCd lmg_cd(const Schedule& h, double chi, int n, double t, double margin = kCriticalMargin) {
  require(n >= 1, "lmg_cd: need at least one spin");
  require(chi >= 0 && chi < 1, "lmg_cd: anisotropy must lie in [0, 1)");
  const double hv = h(t), rate = h.rate(t);
  if (!(hv > 0)) throw InvalidInput("lmg_cd: field must be positive");
  if (std::abs(hv - 1) < margin) {
    std::ostringstream msg;
    msg << "lmg_cd: field " << hv << " is within " << margin << " of the critical point";
    throw Singularity(msg.str());
  }
  const LmgPhase phase = hv > 1 ? LmgPhase::paramagnetic : LmgPhase::ferromagnetic;
  const double pre = rate * lmg_bogoliubov_slope(hv, chi) / (2.0 * n);
  const auto s = collective_spin(n);
  return {lmg_omega(hv, chi), pre, lmg_printed_coefficient(hv, chi, n), pre * (s.x * s.y + s.y * s.x), phase};
}

// lmg_cd as a time-dependent operator, with the spin products built once.
inline std::function<Mat(double)> lmg_correction(const Schedule& h, double chi, int n, double margin = kCriticalMargin) {
  lmg_cd(h, chi, n, 0.0, margin);
  const auto s = collective_spin(n);
  const Mat xy = s.x * s.y + s.y * s.x;
  return [=](double t) {
    const double hv = h(t);
    if (std::abs(hv - 1) < margin) throw Singularity("lmg_correction: ramp reaches the critical margin");
    return (h.rate(t) * lmg_bogoliubov_slope(hv, chi) / (2.0 * n) * xy).eval();
  };
}

// Weight on the top two ladder levels; the truncation is trusted while this stays below kTailPopulation.
inline double tail_population(const Vec& psi) {
  const Eigen::Index d = psi.size();
  return d < 2 ? 0.0 : std::norm(psi[d - 1]) + std::norm(psi[d - 2]);
}

// Lowest eigenstates of a ladder operator that keep their weight off the top two rows, minus
// the two levels reached by a^2 from the last of them.
inline int trusted_levels(const Mat& h) {
  const auto es = eigh(h);
  int k = 0;
  while (k < es.vectors.cols() && tail_population(es.vectors.col(k)) < kTailPopulation) ++k;
  return std::max(0, k - 2);
}

struct CdResult {
  std::vector<double> times;
  std::vector<Mat> h1;            // empty when run without a correction
  std::vector<double> fidelity;   // |<n(t)|psi(t)>|^2
  double max_tail = 0.0;          // tail_population over the samples
  Vec final_state;
};

// Evolves psi0 under H0 + H1 (H1 may be empty) and records the overlap with level n of H0(t).
inline CdResult drive(const HamiltonianPath& h0, const std::function<Mat(double)>& h1, const Vec& psi0, int level,
                      int steps, int samples = 11) {
  require(steps >= 1 && samples >= 2, "drive: need at least one step and two samples");
  require(level >= 0 && level < psi0.size(), "drive: level out of range");
  std::function<Mat(double)> total = h1 ? std::function<Mat(double)>([&](double t) { return (h0.at(t) + h1(t)).eval(); })
                                        : std::function<Mat(double)>(h0.at);
  CdResult r;
  Vec psi = psi0;
  const double dt = h0.duration / steps;
  auto record = [&](double t) {
    const Vec n = eigh(h0.at(t)).vectors.col(level);
    r.times.push_back(t);
    r.fidelity.push_back(std::min(1.0, std::norm(n.dot(psi))));
    r.max_tail = std::max(r.max_tail, tail_population(psi));
    if (h1) r.h1.push_back(h1(t));
  };
  record(0.0);
  int next = 1;
  for (int k = 0; k < steps; ++k) {
    psi = detail::magnus_step(total, k * dt, dt) * psi;
    if (static_cast<long long>(k + 1) * (samples - 1) >= static_cast<long long>(next) * steps) {
      record((k + 1) * dt);
      ++next;
    }
  }
  r.final_state = psi;
  return r;
}

// Propagator of H0 + H1 over the path duration.
inline Mat drive_propagator(const HamiltonianPath& h0, const std::function<Mat(double)>& h1, int steps) {
  require(steps >= 1, "drive_propagator: need at least one step");
  const std::function<Mat(double)> total = [&](double t) { return h1 ? (h0.at(t) + h1(t)).eval() : h0.at(t); };
  const double dt = h0.duration / steps;
  Mat u = identity(h0.at(0.0).rows());
  for (int k = 0; k < steps; ++k) u = detail::magnus_step(total, k * dt, dt) * u;
  return u;
}

}  // namespace qthermo::cdriving
