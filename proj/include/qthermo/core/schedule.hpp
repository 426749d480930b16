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
#include <string>
#include <utility>

#include "qthermo/core/linalg.hpp"

namespace qthermo {

// A scalar control path on [0, duration]. Rate falls back to a central difference.
class Schedule {
 public:
  using Fn = std::function<double(double)>;

  Schedule(double duration, Fn value, Fn rate = {}, std::string label = "custom")
      : duration_(duration), value_(std::move(value)), rate_(std::move(rate)), label_(std::move(label)) {
    require(duration_ > 0 && std::isfinite(duration_), "schedule duration must be positive");
    require(static_cast<bool>(value_), "schedule needs a sampler");
  }

  double operator()(double t) const { return value_(std::clamp(t, 0.0, duration_)); }

  double rate(double t) const {
    if (rate_) return rate_(std::clamp(t, 0.0, duration_));
    const double h = 1e-5 * duration_;
    const double lo = std::max(0.0, t - h), hi = std::min(duration_, t + h);
    return (value_(hi) - value_(lo)) / (hi - lo);
  }

  double duration() const noexcept { return duration_; }
  const std::string& label() const noexcept { return label_; }
  double start() const { return value_(0.0); }
  double end() const { return value_(duration_); }

 private:
  double duration_;
  Fn value_;
  Fn rate_;
  std::string label_;
};

inline Schedule constant_schedule(double value, double duration) {
  return Schedule(duration, [value](double) { return value; }, [](double) { return 0.0; }, "constant");
}

inline Schedule linear_ramp(double from, double to, double duration) {
  const double slope = (to - from) / duration;
  return Schedule(
      duration, [=](double t) { return from + slope * t; }, [=](double) { return slope; }, "linear");
}

// from -> to with vanishing rate at both ends: s(u) = u^2 (3 - 2u).
inline Schedule smooth_ramp(double from, double to, double duration) {
  return Schedule(
      duration,
      [=](double t) {
        const double u = t / duration;
        return from + (to - from) * u * u * (3 - 2 * u);
      },
      [=](double t) {
        const double u = t / duration;
        return (to - from) * 6 * u * (1 - u) / duration;
      },
      "smooth");
}

// Time-dependent operator on [0, duration].
struct HamiltonianPath {
  double duration;
  std::function<Mat(double)> at;

  Mat derivative(double t) const {
    const double h = 1e-4 * duration;
    const double lo = std::max(0.0, t - h), hi = std::min(duration, t + h);
    return (at(hi) - at(lo)) / (hi - lo);
  }
};

inline HamiltonianPath constant_path(const Mat& h, double duration) {
  return {duration, [h](double) { return h; }};
}

}  // namespace qthermo
