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

#include <cstdint>
#include <random>

#include "qthermo/qcore.hpp"

namespace qthermo::testing {

inline Mat random_matrix(std::mt19937_64& rng, Eigen::Index d) {
  std::normal_distribution<double> n(0.0, 1.0);
  Mat m(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) m(i, j) = cplx(n(rng), n(rng));
  return m;
}

inline Mat random_hermitian(std::mt19937_64& rng, Eigen::Index d) {
  const Mat m = random_matrix(rng, d);
  return 0.5 * (m + m.adjoint());
}

inline DensityState random_state(std::mt19937_64& rng, Eigen::Index d) {
  const Mat g = random_matrix(rng, d);
  Mat rho = g * g.adjoint();
  rho /= rho.trace().real();
  return DensityState(0.5 * (rho + rho.adjoint()));
}

inline Mat random_unitary(std::mt19937_64& rng, Eigen::Index d) {
  Eigen::HouseholderQR<Mat> qr(random_matrix(rng, d));
  return qr.householderQ() * Mat::Identity(d, d);
}

// Random CPTP map built from an isometry into d * k dimensions.
inline Channel random_channel(std::mt19937_64& rng, Eigen::Index d, int k) {
  const Mat u = random_unitary(rng, d * k);
  std::vector<Mat> kraus;
  for (int j = 0; j < k; ++j) kraus.push_back(u.block(j * d, 0, d, d));
  return Channel(kraus);
}

inline std::vector<double> random_probabilities(std::mt19937_64& rng, std::size_t n) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> p(n);
  double s = 0;
  for (auto& x : p) s += (x = e(rng));
  for (auto& x : p) x /= s;
  return p;
}

}  // namespace qthermo::testing
