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
#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "qthermo/core/errors.hpp"

namespace qthermo {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

inline constexpr cplx kI{0.0, 1.0};
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kDegeneracyTol = 1e-9;

inline double max_abs(const Mat& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

inline bool is_hermitian(const Mat& a, double tol = kHermitianTol) {
  return a.rows() == a.cols() && max_abs(a - a.adjoint()) <= tol;
}

inline Mat identity(Eigen::Index d) { return Mat::Identity(d, d); }

inline Mat kron(const Mat& a, const Mat& b) { return Eigen::kroneckerProduct(a, b).eval(); }

inline Mat kron(std::span<const Mat> factors) {
  Mat out = Mat::Identity(1, 1);
  for (const auto& f : factors) out = kron(out, f);
  return out;
}

inline Vec kron(const Vec& a, const Vec& b) { return Eigen::kroneckerProduct(a, b).eval(); }

inline cplx trace(const Mat& a) { return a.trace(); }

inline Mat commutator(const Mat& a, const Mat& b) { return a * b - b * a; }
inline Mat anticommutator(const Mat& a, const Mat& b) { return a * b + b * a; }

struct EigenSystem {
  RVec values;  // ascending
  Mat vectors;  // columns
};

inline EigenSystem eigh(const Mat& h) {
  if (!is_hermitian(h, 1e-8 * std::max(1.0, max_abs(h))))
    throw InvalidInput("eigh: matrix is not hermitian");
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (h + h.adjoint()));
  if (es.info() != Eigen::Success) throw InvalidInput("eigh: eigendecomposition failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

struct Eigenspace {
  double value;
  Mat projector;
  int multiplicity;
};

// Eigenvalues closer than rel_tol * max(1, spectral radius) share one projector.
inline std::vector<Eigenspace> spectral_decomposition(const Mat& h, double rel_tol = kDegeneracyTol) {
  const auto es = eigh(h);
  const Eigen::Index d = es.values.size();
  const double scale = std::max(1.0, es.values.cwiseAbs().maxCoeff());
  std::vector<Eigenspace> out;
  Eigen::Index start = 0;
  while (start < d) {
    Eigen::Index stop = start + 1;
    while (stop < d && es.values[stop] - es.values[stop - 1] <= rel_tol * scale) ++stop;
    const Eigen::Index n = stop - start;
    const Mat v = es.vectors.middleCols(start, n);
    out.push_back({es.values.segment(start, n).mean(), v * v.adjoint(), static_cast<int>(n)});
    start = stop;
  }
  return out;
}

template <class F>
Mat hermitian_function(const Mat& h, F&& f) {
  const auto es = eigh(h);
  Vec fv(es.values.size());
  for (Eigen::Index i = 0; i < fv.size(); ++i) fv[i] = f(es.values[i]);
  return es.vectors * fv.asDiagonal() * es.vectors.adjoint();
}

// exp(factor * h) for hermitian h and complex factor.
inline Mat expm_hermitian(const Mat& h, cplx factor) {
  return hermitian_function(h, [factor](double x) { return std::exp(factor * x); });
}

// Non-hermitian exponential (scaling and squaring, Pade).
inline Mat expm(const Mat& a) { return a.exp().eval(); }

// Logarithm of a positive semidefinite matrix restricted to its support; eigenvalues below
// floor are mapped to zero so the result is only meaningful when paired with a state
// supported inside the same support.
inline Mat logm_psd(const Mat& rho, double floor = 1e-300) {
  return hermitian_function(rho, [floor](double x) { return x > floor ? cplx(std::log(x)) : cplx(0.0); });
}

inline Mat pauli_x() {
  Mat m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}
inline Mat pauli_y() {
  Mat m(2, 2);
  m << 0, -kI, kI, 0;
  return m;
}
inline Mat pauli_z() {
  Mat m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}
// |0><1| in the computational basis; sigma_plus is its adjoint.
inline Mat sigma_minus() {
  Mat m = Mat::Zero(2, 2);
  m(0, 1) = 1;
  return m;
}
inline Mat sigma_plus() { return sigma_minus().adjoint(); }

// Places a local operator on one site of a chain of identical local dimension.
inline Mat embed(const Mat& local, int site, int n_sites) {
  const Eigen::Index d = local.rows();
  Mat left = identity(static_cast<Eigen::Index>(std::pow(d, site)));
  Mat right = identity(static_cast<Eigen::Index>(std::pow(d, n_sites - site - 1)));
  return kron(kron(left, local), right);
}

// Truncated bosonic ladder.
inline Mat annihilation(int cutoff) {
  Mat a = Mat::Zero(cutoff, cutoff);
  for (int n = 1; n < cutoff; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

inline Mat number_operator(int cutoff) {
  Mat n = Mat::Zero(cutoff, cutoff);
  for (int k = 0; k < cutoff; ++k) n(k, k) = k;
  return n;
}

inline Mat diagonal(std::span<const double> values) {
  Mat m = Mat::Zero(static_cast<Eigen::Index>(values.size()), static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
  return m;
}

inline Vec basis_vector(Eigen::Index dim, Eigen::Index k) {
  Vec v = Vec::Zero(dim);
  v[k] = 1.0;
  return v;
}

// Column-stacking superoperator helpers: vec(A X B) = (B^T kron A) vec(X).
inline Mat left_multiplier(const Mat& a) { return kron(identity(a.rows()), a); }
inline Mat right_multiplier(const Mat& b) { return kron(b.transpose(), identity(b.rows())); }

inline Vec vectorize(const Mat& x) { return Eigen::Map<const Vec>(x.data(), x.size()); }

inline Mat unvectorize(const Vec& v, Eigen::Index dim) { return Eigen::Map<const Mat>(v.data(), dim, dim); }

}  // namespace qthermo
