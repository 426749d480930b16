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
#include <optional>
#include <string>
#include <vector>

#include "qthermo/core/channel.hpp"
#include "qthermo/core/dynamics.hpp"
#include "qthermo/core/state.hpp"

namespace qthermo::fluctuation {

inline constexpr double kAtomMergeTol = 1e-9;

struct WorkAtom {
  double value;
  double probability;
};

struct WorkDistribution {
  std::vector<WorkAtom> atoms;  // ascending in value
  double beta = std::numeric_limits<double>::quiet_NaN();
  double delta_f = std::numeric_limits<double>::quiet_NaN();
  std::string label;

  double total() const {
    double s = 0;
    for (const auto& a : atoms) s += a.probability;
    return s;
  }
  double mean() const {
    double s = 0;
    for (const auto& a : atoms) s += a.value * a.probability;
    return s;
  }
  // <exp(-s W)>
  double exp_average(double s) const {
    double r = 0;
    for (const auto& a : atoms) r += a.probability * std::exp(-s * a.value);
    return r;
  }
};

// Sorts atoms and merges runs whose values lie within tol of the run's first value.
inline std::vector<WorkAtom> coalesce(std::vector<WorkAtom> atoms, double tol = kAtomMergeTol) {
  std::stable_sort(atoms.begin(), atoms.end(), [](const auto& a, const auto& b) { return a.value < b.value; });
  std::vector<WorkAtom> out;
  double anchor = 0;
  for (const auto& a : atoms) {
    if (!out.empty() && a.value - anchor <= tol) {
      out.back().probability += a.probability;
    } else {
      out.push_back(a);
      anchor = a.value;
    }
  }
  return out;
}

// Transitions forbidden up to rounding are not reported as atoms.
inline constexpr double kNegligibleProbability = 1e-14;

inline std::vector<WorkAtom> drop_negligible(std::vector<WorkAtom> atoms) {
  std::erase_if(atoms, [](const WorkAtom& a) { return a.probability <= kNegligibleProbability; });
  return atoms;
}

inline void check_normalized(const WorkDistribution& d) {
  for (const auto& a : d.atoms)
    if (a.probability < -1e-14) throw InvalidInput("work distribution has a negative probability");
  if (std::abs(d.total() - 1.0) > 1e-10) throw InvalidInput("work distribution is not normalized");
}

// Two-time energy measurement statistics for the unitary u taking H_initial to H_final.
// The initial state defaults to the Gibbs state of H_initial.
inline WorkDistribution ttm_work_distribution(const Mat& h_initial, const Mat& h_final, const Mat& u, double beta,
                                              const std::optional<DensityState>& initial = std::nullopt) {
  require(h_initial.rows() == h_final.rows() && u.rows() == h_initial.rows(), "ttm: dimension mismatch");
  const auto g0 = gibbs_state(h_initial, beta);
  const auto g1 = gibbs_state(h_final, beta);
  const Mat rho = initial ? initial->matrix() : g0.state.matrix();
  const auto before = spectral_decomposition(h_initial), after = spectral_decomposition(h_final);
  std::vector<WorkAtom> atoms;
  for (const auto& m : before) {
    const Mat evolved = u * (m.projector * rho * m.projector) * u.adjoint();
    for (const auto& n : after) {
      const double p = (n.projector * evolved).trace().real();
      atoms.push_back({n.value - m.value, std::max(p, 0.0)});
    }
  }
  WorkDistribution d{drop_negligible(coalesce(std::move(atoms))), beta, (g0.log_partition - g1.log_partition) / beta, "ttm"};
  check_normalized(d);
  return d;
}

inline WorkDistribution ttm_work_distribution(const HamiltonianPath& path, double beta, int slices = kDefaultSlices,
                                              const std::optional<DensityState>& initial = std::nullopt) {
  return ttm_work_distribution(path.at(0.0), path.at(path.duration), propagate_unitary(path, slices), beta, initial);
}

struct JarzynskiCheck {
  double lhs;  // <exp(-beta W)>
  double rhs;  // exp(-beta dF)
  double gap;
};

inline JarzynskiCheck jarzynski_check(const WorkDistribution& d) {
  require(std::isfinite(d.beta) && std::isfinite(d.delta_f), "jarzynski_check: beta and free-energy change required");
  const double lhs = d.exp_average(d.beta), rhs = std::exp(-d.beta * d.delta_f);
  return {lhs, rhs, std::abs(lhs - rhs)};
}

struct EigenstateWork {
  WorkDistribution distribution;  // atoms at W_m = <m|U^+ H_f U|m> - E_m with Gibbs weights
  double lhs;                     // <exp(-beta W)> over that distribution
  double rhs;                     // exp(-beta dF) exp(-S(rho_tilde || rho_eq))
  double correction;              // S(rho_tilde || rho_eq)
  double information_free_energy; // F_f + correction / beta
  double mean_work_ttm;
  Mat rho_tilde;
  double log_z_tilde;
};

// Measurement-free work defined on time-evolved initial eigenstates.
inline EigenstateWork eigenstate_work(const Mat& h_initial, const Mat& h_final, const Mat& u, double beta) {
  const auto es = eigh(h_initial);
  const auto g0 = gibbs_state(h_initial, beta);
  const auto g1 = gibbs_state(h_final, beta);
  const Eigen::Index d = es.values.size();
  std::vector<double> final_energy(d);
  std::vector<WorkAtom> atoms;
  const double e0 = es.values.minCoeff();
  double z0 = 0;
  for (Eigen::Index m = 0; m < d; ++m) z0 += std::exp(-beta * (es.values[m] - e0));
  for (Eigen::Index m = 0; m < d; ++m) {
    const Vec evolved = u * es.vectors.col(m);
    final_energy[m] = (evolved.adjoint() * h_final * evolved)(0, 0).real();
    atoms.push_back({final_energy[m] - es.values[m], std::exp(-beta * (es.values[m] - e0)) / z0});
  }
  const double ref = *std::min_element(final_energy.begin(), final_energy.end());
  double z_tilde_shifted = 0;
  Mat rho_tilde = Mat::Zero(d, d);
  for (Eigen::Index m = 0; m < d; ++m) {
    const double w = std::exp(-beta * (final_energy[m] - ref));
    z_tilde_shifted += w;
    const Vec evolved = u * es.vectors.col(m);
    rho_tilde += w * evolved * evolved.adjoint();
  }
  rho_tilde /= z_tilde_shifted;
  EigenstateWork r;
  r.distribution = {coalesce(std::move(atoms)), beta, (g0.log_partition - g1.log_partition) / beta, "eigenstate"};
  check_normalized(r.distribution);
  r.lhs = r.distribution.exp_average(beta);
  r.correction = relative_entropy(rho_tilde, g1.state.matrix());
  r.rhs = std::exp(-beta * r.distribution.delta_f - r.correction);
  r.information_free_energy = g1.free_energy + r.correction / beta;
  r.mean_work_ttm = ttm_work_distribution(h_initial, h_final, u, beta).mean();
  r.rho_tilde = rho_tilde;
  r.log_z_tilde = -beta * ref + std::log(z_tilde_shifted);
  return r;
}

inline EigenstateWork eigenstate_work(const HamiltonianPath& path, double beta, int slices = kDefaultSlices) {
  return eigenstate_work(path.at(0.0), path.at(path.duration), propagate_unitary(path, slices), beta);
}

// Observables measured before and after the map, with their eigenspaces.
class ObservablePair {
 public:
  ObservablePair(Mat initial, Mat final_obs)
      : initial_(std::move(initial)), final_(std::move(final_obs)), pi_i_(spectral_decomposition(initial_)),
        pi_f_(spectral_decomposition(final_)) {
    require(initial_.rows() == final_.rows(), "observable pair: dimension mismatch");
    for (const auto* set : {&pi_i_, &pi_f_}) {
      Mat sum = Mat::Zero(initial_.rows(), initial_.rows());
      for (const auto& s : *set) sum += s.projector;
      require(max_abs(sum - identity(initial_.rows())) <= 1e-10, "observable pair: projectors are not complete");
    }
  }

  const Mat& initial() const noexcept { return initial_; }
  const Mat& final_observable() const noexcept { return final_; }
  const std::vector<Eigenspace>& initial_spaces() const noexcept { return pi_i_; }
  const std::vector<Eigenspace>& final_spaces() const noexcept { return pi_f_; }

 private:
  Mat initial_, final_;
  std::vector<Eigenspace> pi_i_, pi_f_;
};

inline Mat measurement_average(const std::vector<Eigenspace>& spaces, const Mat& rho) {
  Mat out = Mat::Zero(rho.rows(), rho.cols());
  for (const auto& s : spaces) out += s.projector * rho * s.projector;
  return out;
}

struct GeneralizedFt {
  double lhs;       // <exp(-d omega)>
  double efficacy;  // tr[exp(-Omega_f) E(M(rho0) exp(Omega_i))]
  std::vector<WorkAtom> atoms;
};

inline GeneralizedFt generalized_ft(const ObservablePair& pair, const DensityState& rho0, const Channel& channel) {
  require(rho0.dim() == pair.initial().rows() && channel.dim() == rho0.dim(), "generalized_ft: dimension mismatch");
  std::vector<WorkAtom> atoms;
  double lhs = 0;
  for (const auto& m : pair.initial_spaces()) {
    const Mat out = channel(m.projector * rho0.matrix() * m.projector);
    for (const auto& n : pair.final_spaces()) {
      const double p = (n.projector * out).trace().real();
      atoms.push_back({n.value - m.value, p});
      lhs += p * std::exp(-(n.value - m.value));
    }
  }
  const Mat grown = measurement_average(pair.initial_spaces(), rho0.matrix()) *
                    hermitian_function(pair.initial(), [](double x) { return cplx(std::exp(x)); });
  const Mat decay = hermitian_function(pair.final_observable(), [](double x) { return cplx(std::exp(-x)); });
  const double eff = (decay * channel(grown)).trace().real();
  return {lhs, eff, drop_negligible(coalesce(std::move(atoms)))};
}

}  // namespace qthermo::fluctuation
