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
#include <vector>

#include "qthermo/core/linalg.hpp"

namespace qthermo {

// Kraus representation of a CPTP map.
class Channel {
 public:
  explicit Channel(std::vector<Mat> kraus) : kraus_(std::move(kraus)) {
    require(!kraus_.empty(), "channel needs at least one Kraus operator");
    const Eigen::Index d = kraus_.front().rows();
    Mat completeness = Mat::Zero(d, d);
    Mat unitality = Mat::Zero(d, d);
    for (const auto& k : kraus_) {
      require(k.rows() == d && k.cols() == d, "Kraus operators must share one square dimension");
      completeness += k.adjoint() * k;
      unitality += k * k.adjoint();
    }
    require(max_abs(completeness - identity(d)) <= 1e-10, "channel is not trace preserving");
    unital_ = max_abs(unitality - identity(d)) <= 1e-10;
  }

  static Channel unitary(const Mat& u) { return Channel({u}); }

  Mat operator()(const Mat& rho) const {
    Mat out = Mat::Zero(rho.rows(), rho.cols());
    for (const auto& k : kraus_) out += k * rho * k.adjoint();
    return out;
  }

  // Heisenberg-picture adjoint map.
  Mat adjoint(const Mat& a) const {
    Mat out = Mat::Zero(a.rows(), a.cols());
    for (const auto& k : kraus_) out += k.adjoint() * a * k;
    return out;
  }

  bool unital() const noexcept { return unital_; }
  Eigen::Index dim() const { return kraus_.front().rows(); }
  const std::vector<Mat>& kraus() const noexcept { return kraus_; }

  // Apply this channel after `first`.
  Channel after(const Channel& first) const {
    std::vector<Mat> ks;
    for (const auto& a : kraus_)
      for (const auto& b : first.kraus_) ks.push_back(a * b);
    return Channel(std::move(ks));
  }

 private:
  std::vector<Mat> kraus_;
  bool unital_ = false;
};

// Qubit amplitude damping towards |0> with decay probability p.
inline Channel amplitude_damping(double p) {
  require(p >= 0 && p <= 1, "amplitude damping probability must lie in [0, 1]");
  Mat k0 = Mat::Zero(2, 2), k1 = Mat::Zero(2, 2);
  k0(0, 0) = 1;
  k0(1, 1) = std::sqrt(1 - p);
  k1(0, 1) = std::sqrt(p);
  return Channel({k0, k1});
}

// Keeps the state with probability 1-p, otherwise applies the given unitary; unital.
inline Channel random_unitary_mixture(const Mat& u, double p) {
  require(p >= 0 && p <= 1, "mixing probability must lie in [0, 1]");
  const Eigen::Index d = u.rows();
  return Channel({std::sqrt(1 - p) * identity(d), std::sqrt(p) * u});
}

// Complete dephasing in the eigenbasis given by a set of orthogonal projectors.
inline Channel projective_dephasing(const std::vector<Mat>& projectors) { return Channel(projectors); }

}  // namespace qthermo
