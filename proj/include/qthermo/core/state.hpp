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
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "qthermo/core/linalg.hpp"

namespace qthermo {

inline constexpr double kTraceTol = 1e-10;
inline constexpr double kPositivityTol = 1e-9;

inline double min_eigenvalue(const Mat& rho) { return eigh(rho).values.minCoeff(); }

// Unit-trace, positive semidefinite, hermitian matrix. Construction validates.
class DensityState {
 public:
  explicit DensityState(Mat rho) : rho_(std::move(rho)) {
    require(rho_.rows() == rho_.cols() && rho_.rows() > 0, "density state must be a nonempty square matrix");
    require(is_hermitian(rho_, kHermitianTol), "density state must be hermitian");
    rho_ = 0.5 * (rho_ + rho_.adjoint()).eval();
    const double tr = rho_.trace().real();
    require(std::abs(tr - 1.0) <= kTraceTol, "density state trace deviates from 1 by " + std::to_string(tr - 1.0));
    require(min_eigenvalue(rho_) >= -kPositivityTol, "density state has a negative eigenvalue");
  }

  // Renormalizes the trace and clips tiny negative eigenvalues produced by numerics.
  static DensityState repaired(const Mat& rho) {
    auto es = eigh(0.5 * (rho + rho.adjoint()));
    RVec p = es.values.cwiseMax(0.0);
    p /= p.sum();
    return DensityState(es.vectors * p.cast<cplx>().asDiagonal() * es.vectors.adjoint());
  }

  static DensityState pure(const Vec& psi) {
    const double n = psi.norm();
    require(n > 0, "pure state vector must be nonzero");
    const Vec u = psi / n;
    return DensityState(u * u.adjoint());
  }

  static DensityState maximally_mixed(Eigen::Index d) { return DensityState(identity(d) / static_cast<double>(d)); }

  static DensityState from_populations(std::span<const double> p) {
    return DensityState(diagonal(p));
  }

  const Mat& matrix() const noexcept { return rho_; }
  Eigen::Index dim() const noexcept { return rho_.rows(); }

  double expectation(const Mat& a) const { return (rho_ * a).trace().real(); }

  RVec eigenvalues() const { return eigh(rho_).values; }

 private:
  Mat rho_;
};

inline DensityState tensor(const DensityState& a, const DensityState& b) {
  return DensityState(kron(a.matrix(), b.matrix()));
}

struct ThermalState {
  DensityState state;
  double log_partition;
  double free_energy;  // -ln Z / beta; NaN at beta = 0
};

// Gibbs state exp(-beta H)/Z; beta may be negative.
inline ThermalState gibbs_state(const Mat& h, double beta) {
  require(std::isfinite(beta), "gibbs_state: beta must be finite");
  if (!is_hermitian(h)) throw InvalidInput("gibbs_state: hamiltonian is not hermitian");
  const auto es = eigh(h);
  const double ref = beta >= 0 ? es.values.minCoeff() : es.values.maxCoeff();
  RVec w = (-beta * (es.values.array() - ref)).exp();
  const double sum = w.sum();
  w /= sum;
  const double log_z = -beta * ref + std::log(sum);
  Mat rho = es.vectors * w.cast<cplx>().asDiagonal() * es.vectors.adjoint();
  const double f = beta == 0.0 ? std::numeric_limits<double>::quiet_NaN() : -log_z / beta;
  return {DensityState(rho), log_z, f};
}

inline double shannon_entropy(std::span<const double> p) {
  double s = 0.0;
  for (double x : p)
    if (x > 0) s -= x * std::log(x);
  return s;
}

inline double von_neumann_entropy(const Mat& rho) {
  const RVec p = eigh(rho).values;
  double s = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i)
    if (p[i] > 1e-300) s -= p[i] * std::log(p[i]);
  return s;
}

inline double von_neumann_entropy(const DensityState& rho) { return von_neumann_entropy(rho.matrix()); }

// S(rho||sigma). Returns +infinity when rho has weight outside the support of sigma.
inline double relative_entropy(const Mat& rho, const Mat& sigma, double support_tol = 1e-12) {
  require(rho.rows() == sigma.rows(), "relative_entropy: dimension mismatch");
  const auto es = eigh(sigma);
  // eigenvalues at roundoff level count as kernel; anything larger keeps its log
  const double floor = 64 * std::numeric_limits<double>::epsilon() * std::max(1.0, es.values.cwiseAbs().maxCoeff());
  Vec log_s(es.values.size());
  Mat kernel = Mat::Zero(rho.rows(), rho.rows());
  for (Eigen::Index i = 0; i < es.values.size(); ++i) {
    if (es.values[i] > floor) {
      log_s[i] = std::log(es.values[i]);
    } else {
      log_s[i] = 0.0;
      kernel += es.vectors.col(i) * es.vectors.col(i).adjoint();
    }
  }
  if ((rho * kernel).trace().real() > support_tol) return std::numeric_limits<double>::infinity();
  const Mat log_sigma = es.vectors * log_s.asDiagonal() * es.vectors.adjoint();
  const double cross = (rho * log_sigma).trace().real();
  const double value = -von_neumann_entropy(rho) - cross;
  return std::max(value, 0.0);
}

inline double relative_entropy(const DensityState& rho, const DensityState& sigma) {
  return relative_entropy(rho.matrix(), sigma.matrix());
}

struct Entropies {
  double entropy;
  double relative;  // NaN when no reference state was supplied
};

inline Entropies entropies(const DensityState& rho, const DensityState* sigma = nullptr) {
  return {von_neumann_entropy(rho),
          sigma ? relative_entropy(rho, *sigma) : std::numeric_limits<double>::quiet_NaN()};
}

// Partial trace over every factor not listed in keep. Kept factors retain their order.
inline Mat partial_trace(const Mat& rho, std::span<const int> dims, std::span<const int> keep) {
  const int n = static_cast<int>(dims.size());
  const Eigen::Index total = std::accumulate(dims.begin(), dims.end(), Eigen::Index{1}, std::multiplies<>());
  if (rho.rows() != total || rho.cols() != total)
    throw InvalidInput("partial_trace: product of factor dimensions does not match the state");
  std::vector<bool> kept(n, false);
  for (int k : keep) {
    if (k < 0 || k >= n) throw InvalidInput("partial_trace: keep index out of range");
    kept[k] = true;
  }
  std::vector<Eigen::Index> stride(n);
  Eigen::Index s = 1;
  for (int i = n - 1; i >= 0; --i) {
    stride[i] = s;
    s *= dims[i];
  }
  Eigen::Index dk = 1;
  for (int i = 0; i < n; ++i)
    if (kept[i]) dk *= dims[i];
  const Eigen::Index dt = total / dk;

  // Enumerate composite indices as (kept multi-index, traced multi-index) offsets.
  auto offsets = [&](bool want_kept, Eigen::Index count) {
    std::vector<Eigen::Index> off(count, 0);
    for (Eigen::Index idx = 0; idx < count; ++idx) {
      Eigen::Index rem = idx, o = 0;
      for (int i = n - 1; i >= 0; --i) {
        if (kept[i] != want_kept) continue;
        o += (rem % dims[i]) * stride[i];
        rem /= dims[i];
      }
      off[idx] = o;
    }
    return off;
  };
  const auto ko = offsets(true, dk);
  const auto to = offsets(false, dt);
  Mat out = Mat::Zero(dk, dk);
  for (Eigen::Index a = 0; a < dk; ++a)
    for (Eigen::Index b = 0; b < dk; ++b) {
      cplx acc = 0;
      for (Eigen::Index t = 0; t < dt; ++t) acc += rho(ko[a] + to[t], ko[b] + to[t]);
      out(a, b) = acc;
    }
  return out;
}

inline DensityState partial_trace(const DensityState& rho, std::span<const int> dims, std::span<const int> keep) {
  return DensityState(partial_trace(rho.matrix(), dims, keep));
}

// I(A:B) for a bipartition given by the factor indices in part_a; the rest form B.
inline double mutual_information(const Mat& rho, std::span<const int> dims, std::span<const int> part_a) {
  std::vector<int> part_b;
  for (int i = 0; i < static_cast<int>(dims.size()); ++i)
    if (std::find(part_a.begin(), part_a.end(), i) == part_a.end()) part_b.push_back(i);
  return von_neumann_entropy(partial_trace(rho, dims, part_a)) + von_neumann_entropy(partial_trace(rho, dims, part_b)) -
         von_neumann_entropy(rho);
}

}  // namespace qthermo
