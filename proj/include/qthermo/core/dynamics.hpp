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

#include <cmath>
#include <functional>
#include <sstream>
#include <vector>

#include "qthermo/core/schedule.hpp"
#include "qthermo/core/state.hpp"

namespace qthermo {

inline constexpr int kDefaultSlices = 1024;

// Time-ordered product of midpoint slice exponentials, latest slice leftmost.
inline Mat propagate_unitary(const HamiltonianPath& path, int slices = kDefaultSlices) {
  require(slices >= 1, "propagate_unitary: slices must be >= 1");
  const double dt = path.duration / slices;
  Mat u;
  for (int k = 0; k < slices; ++k) {
    const Mat h = path.at((k + 0.5) * dt);
    if (!is_hermitian(h, 1e-9 * std::max(1.0, max_abs(h))))
      throw InvalidInput("propagate_unitary: hamiltonian is not hermitian at a sampled time");
    const Mat step = expm_hermitian(h, -kI * dt);
    u = k == 0 ? step : (step * u).eval();
  }
  return u;
}

// Same slicing applied to a state vector; cheaper than forming U for large dimensions.
inline Vec propagate_state(const HamiltonianPath& path, const Vec& psi0, int slices = kDefaultSlices) {
  require(slices >= 1, "propagate_state: slices must be >= 1");
  const double dt = path.duration / slices;
  Vec psi = psi0;
  for (int k = 0; k < slices; ++k) psi = expm_hermitian(path.at((k + 0.5) * dt), -kI * dt) * psi;
  return psi;
}

struct JumpOperator {
  Mat op;
  double rate;
};

// rho' = -i[H(t), rho] + sum_k rate_k (L rho L^+ - {L^+L, rho}/2)
class Lindbladian {
 public:
  Lindbladian(std::function<Mat(double)> hamiltonian, std::vector<JumpOperator> jumps)
      : hamiltonian_(std::move(hamiltonian)), jumps_(std::move(jumps)) {
    for (const auto& j : jumps_) {
      require(j.rate >= 0, "lindblad: rates must be nonnegative");
      decay_.push_back(j.op.adjoint() * j.op);
    }
  }

  Lindbladian(const Mat& hamiltonian, std::vector<JumpOperator> jumps)
      : Lindbladian([hamiltonian](double) { return hamiltonian; }, std::move(jumps)) {}

  Mat hamiltonian(double t) const { return hamiltonian_(t); }
  const std::vector<JumpOperator>& jumps() const noexcept { return jumps_; }

  Mat operator()(double t, const Mat& rho) const {
    const Mat h = hamiltonian_(t);
    Mat out = -kI * commutator(h, rho);
    for (std::size_t k = 0; k < jumps_.size(); ++k) {
      const Mat& l = jumps_[k].op;
      out += jumps_[k].rate * (l * rho * l.adjoint() - 0.5 * anticommutator(decay_[k], rho));
    }
    return out;
  }

  // Column-stacking matrix representation at time t.
  Mat superoperator(double t) const {
    const Mat h = hamiltonian_(t);
    Mat s = -kI * (left_multiplier(h) - right_multiplier(h));
    for (std::size_t k = 0; k < jumps_.size(); ++k) {
      const Mat& l = jumps_[k].op;
      s += jumps_[k].rate * (kron(l.conjugate(), l) - 0.5 * left_multiplier(decay_[k]) - 0.5 * right_multiplier(decay_[k]));
    }
    return s;
  }

 private:
  std::function<Mat(double)> hamiltonian_;
  std::vector<JumpOperator> jumps_;
  std::vector<Mat> decay_;
};

struct LindbladPath {
  std::vector<double> times;
  std::vector<Mat> states;
  double max_trace_drift = 0.0;
  double min_eigenvalue = 1.0;
  double max_step_error = 0.0;  // Richardson estimate from step halving

  const Mat& final_state() const { return states.back(); }
};

inline constexpr double kTraceDriftLimit = 1e-6;
inline constexpr double kLindbladPositivityLimit = -1e-7;

// Fixed-step RK4. Each step is also taken as two half steps; the half-step result is kept
// and the difference feeds the error estimate. Any generator callable as gen(t, rho) works.
template <class Generator>
LindbladPath lindblad_evolve(const Generator& gen, const DensityState& rho0, double tau, int steps,
                                    int sample_every = 1) {
  require(steps >= 1 && sample_every >= 1, "lindblad_evolve: steps and sample interval must be >= 1");
  require(tau >= 0, "lindblad_evolve: duration must be nonnegative");
  const double dt = tau / steps;
  auto rk4 = [&gen](double t, const Mat& y, double h) {
    const Mat k1 = gen(t, y);
    const Mat k2 = gen(t + 0.5 * h, y + 0.5 * h * k1);
    const Mat k3 = gen(t + 0.5 * h, y + 0.5 * h * k2);
    const Mat k4 = gen(t + h, y + h * k3);
    return (y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)).eval();
  };

  LindbladPath path;
  Mat rho = rho0.matrix();
  auto record = [&](double t) {
    const double drift = std::abs(rho.trace().real() - 1.0);
    const double lam = eigh(0.5 * (rho + rho.adjoint())).values.minCoeff();
    path.max_trace_drift = std::max(path.max_trace_drift, drift);
    path.min_eigenvalue = std::min(path.min_eigenvalue, lam);
    if (!rho.allFinite() || drift > kTraceDriftLimit || lam < kLindbladPositivityLimit) {
      std::ostringstream msg;
      msg << "lindblad_evolve: integration failure at t=" << t << " (trace drift " << drift << ", min eigenvalue "
          << lam << ", dt " << dt << ", step error " << path.max_step_error << ")";
      throw IntegrationFailure(msg.str());
    }
    path.times.push_back(t);
    path.states.push_back(rho);
  };
  record(0.0);
  for (int n = 0; n < steps; ++n) {
    const double t = n * dt;
    const Mat full = rk4(t, rho, dt);
    const Mat half = rk4(t + 0.5 * dt, rk4(t, rho, 0.5 * dt), 0.5 * dt);
    path.max_step_error = std::max(path.max_step_error, max_abs(half - full) / 15.0);
    rho = 0.5 * (half + half.adjoint());
    if ((n + 1) % sample_every == 0 || n + 1 == steps) record((n + 1) * dt);
  }
  return path;
}

// Invariant state of a time-independent generator, normalized to unit trace.
inline DensityState stationary_state(const Lindbladian& gen, double t = 0.0) {
  const Mat s = gen.superoperator(t);
  const Eigen::Index d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(s.rows()))));
  Mat a = s;
  Vec b = Vec::Zero(s.rows());
  a.row(0).setZero();
  for (Eigen::Index i = 0; i < d; ++i) a(0, i * (d + 1)) = 1.0;
  b[0] = 1.0;
  const Vec v = a.fullPivLu().solve(b);
  return DensityState::repaired(unvectorize(v, d));
}

}  // namespace qthermo
