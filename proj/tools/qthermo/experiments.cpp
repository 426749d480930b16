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

#include "experiments.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "qthermo/annealing.hpp"
#include "qthermo/batteries.hpp"
#include "qthermo/cdriving.hpp"
#include "qthermo/darwinism.hpp"
#include "qthermo/engines.hpp"
#include "qthermo/fluctuation.hpp"
#include "qthermo/kzm.hpp"
#include "qthermo/landauer.hpp"
#include "qthermo/openq.hpp"
#include "qthermo/stochastic.hpp"
#include "qthermo/thermometry.hpp"

namespace qthermo::cli {

void Table::add(std::vector<Cell> row) {
  require(row.size() == header.size(), "table row width does not match the header");
  rows.push_back(std::move(row));
}

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

double num(const json& p, const char* k) { return p.at(k).get<double>(); }
int integer(const json& p, const char* k) { return static_cast<int>(p.at(k).get<long long>()); }
bool flag(const json& p, const char* k) { return p.at(k).get<bool>(); }
std::string text(const json& p, const char* k) { return p.at(k).get<std::string>(); }
std::vector<double> nums(const json& p, const char* k) { return p.at(k).get<std::vector<double>>(); }
std::vector<std::string> texts(const json& p, const char* k) { return p.at(k).get<std::vector<std::string>>(); }

std::vector<double> grid(double lo, double hi, int points, bool log_spaced) {
  require(points >= 2, "grids need at least two points");
  require(!log_spaced || (lo > 0 && hi > 0), "log-spaced grids need positive endpoints");
  std::vector<double> g(points);
  for (int k = 0; k < points; ++k) {
    const double u = static_cast<double>(k) / (points - 1);
    g[k] = log_spaced ? std::exp(std::log(lo) + u * (std::log(hi) - std::log(lo))) : lo + u * (hi - lo);
  }
  return g;
}

json ramp(const char* kind, double from, double to, double duration) {
  return {{"kind", kind}, {"from", from}, {"to", to}, {"duration", duration}};
}

json estimate(const Estimate& e) { return {{"mean", e.mean}, {"error", e.error}}; }

// ---------------------------------------------------------------- thermometry

Artifacts thermometry_curves(const json& p, std::uint64_t) {
  using namespace thermometry;
  Artifacts a;
  a.table.header = {"kind", "Delta", "d", "T", "F"};
  const auto temps = grid(num(p, "t_min"), num(p, "t_max"), integer(p, "points"), flag(p, "log_spacing"));
  std::vector<long long> dims;
  for (double d : nums(p, "dims")) {
    require(d >= 2 && std::nearbyint(d) == d, "dims must be integers >= 2");
    dims.push_back(static_cast<long long>(d));
  }
  json peaks = json::array();
  auto curve = [&](const std::string& kind, double gap, Cell d, auto&& f) {
    double best = -1, arg = kNan;
    for (double t : temps) {
      const double q = f(t);
      if (q > best) best = q, arg = t;
      a.table.add({kind, gap, d, t, q});
    }
    peaks.push_back({{"kind", kind}, {"Delta", gap}, {"d", std::holds_alternative<std::string>(d) ? json("inf") : json(std::get<long long>(d))},
                     {"T_peak", arg}, {"F_peak", best}});
  };
  for (const auto& kind : texts(p, "kinds"))
    for (double gap : nums(p, "gaps")) {
      require(gap > 0, "gaps must be positive");
      if (kind == "qubit") {
        curve(kind, gap, 2LL, [&](double t) { return qfi_qubit(gap, t); });
      } else if (kind == "oscillator") {
        curve(kind, gap, std::string("inf"), [&](double t) { return qfi_oscillator(gap, t); });
      } else if (kind == "d-level") {
        for (long long d : dims) curve(kind, gap, d, [&](double t) { return qfi_harmonic_d(gap, t, d); });
      } else {
        for (long long d : dims) {
          const auto s = ProbeSpectrum::degenerate_two_level(gap, static_cast<int>(d));
          curve(kind, gap, d, [&](double t) { return qfi_thermal(s, t); });
        }
      }
    }
  a.summary = {{"peaks", peaks}};
  return a;
}

// ---------------------------------------------------------------- engines

const std::vector<std::string> kEngineHeader = {"medium", "T_c/T_h", "kappa", "tau_h", "tau_c",
                                                "P",      "eta",     "eta_CA", "eta_Carnot"};

std::vector<double> checked_ratios(const json& p) {
  auto r = nums(p, "ratios");
  for (double x : r) require(x > 0 && x < 1, "temperature ratios must lie in (0, 1)");
  return r;
}

Artifacts carnot_ca(const json& p, std::uint64_t) {
  using namespace engines;
  Artifacts a;
  a.table.header = kEngineHeader;
  double worst = 0;
  for (double r : checked_ratios(p)) {
    const BathPair b{num(p, "t_hot"), r * num(p, "t_hot"), num(p, "coupling_hot"), num(p, "coupling_cold"), num(p, "zeta")};
    const auto ca = curzon_ahlborn(b);
    worst = std::max(worst, std::abs(ca.numeric_max_power - ca.max_power) / ca.max_power);
    a.table.add({std::string("carnot"), r, kNan, kNan, kNan, ca.numeric_max_power, ca.numeric_efficiency,
                 b.curzon_ahlborn(), b.carnot()});
  }
  a.summary = {{"max_power_relative_error", worst}};
  return a;
}

Artifacts otto_tls_cycle(const json& p, std::uint64_t) {
  using namespace engines;
  Artifacts a;
  a.table.header = kEngineHeader;
  const double gi = num(p, "gap_initial"), gf = num(p, "gap_final"), th = num(p, "t_hot");
  json flags = json::array();
  for (double r : checked_ratios(p)) {
    const auto c = otto_tls(gi, gf, r * th, th);
    const BathPair b{th, r * th};
    a.table.add({std::string("tls"), r, gi / gf, kNan, kNan, c.power, c.efficiency, b.curzon_ahlborn(), b.carnot()});
    flags.push_back({{"T_c/T_h", r}, {"net_work", c.net_work}, {"positive_work", c.positive_work}});
  }
  a.summary = {{"cycles", flags}};
  return a;
}

Artifacts otto_endo(const json& p, std::uint64_t) {
  using namespace engines;
  Artifacts a;
  a.table.header = kEngineHeader;
  const double tc = num(p, "t_cold");
  const double wf = num(p, "omega_over_t_cold") * tc;
  const std::vector<Box> vary{{Knob::kappa, num(p, "kappa_min"), 1.0}};
  std::vector<std::pair<Medium, double>> jobs;
  for (const auto& m : texts(p, "media"))
    for (double r : checked_ratios(p))
      jobs.emplace_back(m == "classical-ho" ? Medium::classical_oscillator : Medium::quantum_oscillator, r);
  std::vector<std::vector<Cell>> rows(jobs.size());
  std::vector<json> notes(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t i) {
    const auto [m, r] = jobs[i];
    const BathPair b{tc / r, tc, num(p, "coupling_hot"), num(p, "coupling_cold"), num(p, "zeta")};
    const OttoSpec tmpl{m, 0.5 * wf, wf, num(p, "tau_hot"), num(p, "tau_cold")};
    const auto opt = maximize_power(tmpl, b, vary, integer(p, "grid_points"));
    rows[i] = {to_string(m), r, opt.spec.compression(), opt.spec.tau_hot, opt.spec.tau_cold, opt.max_power,
               opt.efficiency, b.curzon_ahlborn(), b.carnot()};
    notes[i] = {{"medium", to_string(m)}, {"T_c/T_h", r}, {"degenerate", opt.degenerate},
                {"eta_minus_eta_CA", opt.efficiency - b.curzon_ahlborn()}};
  });
  for (auto& row : rows) a.table.add(std::move(row));
  a.summary = {{"freq_final", wf}, {"optima", notes}};
  return a;
}

// ---------------------------------------------------------------- batteries

Artifacts battery_threshold(const json& p, std::uint64_t) {
  using namespace batteries;
  Artifacts a;
  a.table.header = {"p0", "p1", "W_classical", "W_global", "beats", "mutual_info"};
  const BatterySpec spec(nums(p, "energies"));
  require(spec.dim() == 3, "battery-qutrit-threshold needs three energies");
  const double p0 = num(p, "p0");
  require(p0 >= 0 && p0 <= 1, "p0 must lie in [0, 1]");
  const auto p1s = grid(num(p, "p1_min"), std::min(num(p, "p1_max"), 1 - p0), integer(p, "points"), false);
  long long flips = 0;
  bool last = false;
  for (std::size_t i = 0; i < p1s.size(); ++i) {
    const double p1 = p1s[i], p2 = std::max(0.0, 1 - p0 - p1);
    const std::vector<double> pops{p0, p1, p2};
    const auto r = multi_copy_strategies(spec, pops, integer(p, "copies"));
    if (i > 0 && r.beats_classical != last) ++flips;
    last = r.beats_classical;
    a.table.add({p0, p1, r.w_classical, r.w_global, r.beats_classical, r.global.mutual_information});
  }
  // p1^2 = p0 p2 with p2 = 1 - p0 - p1
  const double threshold = 0.5 * (-p0 + std::sqrt(p0 * p0 + 4 * p0 * (1 - p0)));
  a.summary = {{"threshold_p1", threshold}, {"flips", flips}};
  return a;
}

// ---------------------------------------------------------------- fluctuation theorems

HamiltonianPath jarzynski_protocol(const std::string& kind, const json& p) {
  const Schedule w = make_ramp(p.at("frequency"));
  const double g = num(p, "drive"), tau = w.duration();
  if (kind == "qubit") {
    const Mat z = 0.5 * pauli_z(), x = pauli_x();
    return {tau, [=](double t) { return Mat(w(t) * z + g * std::sin(kPi * t / tau) * x); }};
  }
  const int cut = integer(p, "cutoff");
  const Mat n = number_operator(cut), a = annihilation(cut);
  const Mat push = a + a.adjoint();
  return {tau, [=](double t) { return Mat(w(t) * n + g * std::sin(kPi * t / tau) * push); }};
}

Artifacts quantum_jarzynski(const json& p, std::uint64_t) {
  using namespace fluctuation;
  Artifacts a;
  a.sidecar = true;
  a.table.header = {"protocol", "beta", "W", "prob"};
  json checks = json::array();
  for (const auto& kind : texts(p, "protocols"))
    for (double beta : nums(p, "betas")) {
      const auto path = jarzynski_protocol(kind, p);
      const auto d = ttm_work_distribution(path, beta, integer(p, "slices"));
      const auto j = jarzynski_check(d);
      const auto e = eigenstate_work(path, beta, integer(p, "slices"));
      for (const auto& atom : d.atoms) a.table.add({kind, beta, atom.value, atom.probability});
      checks.push_back({{"protocol", kind}, {"beta", beta}, {"lhs", j.lhs}, {"rhs", j.rhs}, {"gap", j.gap},
                        {"correction", e.correction}, {"eigenstate_lhs", e.lhs}, {"eigenstate_rhs", e.rhs}});
    }
  a.summary = {{"checks", checks}};
  return a;
}

Artifacts classical_jarzynski(const json& p, std::uint64_t seed) {
  using namespace stochastic;
  Artifacts a;
  a.sidecar = true;
  a.table.header = {"traj_id", "W"};
  const auto n = static_cast<std::size_t>(integer(p, "samples"));
  const double beta = num(p, "beta");
  std::vector<double> work;
  double expected = 1.0;
  if (text(p, "dynamics") == "langevin") {
    LangevinParams lp;
    lp.mass = num(p, "mass"), lp.gamma = num(p, "gamma"), lp.beta = beta;
    lp.potential = dragged_harmonic(num(p, "stiffness"), lp.mass);
    work = langevin_simulate(lp, make_ramp(p.at("protocol")), n, seed, {.dt = num(p, "dt")}).work;
  } else {
    const auto r = hamiltonian_jarzynski(make_ramp(p.at("frequency")), beta, n, seed, num(p, "mass"), num(p, "dt"));
    work = r.work;
    expected = r.expected;
  }
  for (std::size_t i = 0; i < work.size(); ++i) a.table.add({static_cast<long long>(i), work[i]});
  const auto avg = TrajectoryEnsemble::exp_average(work, beta);
  a.summary = {{"exp_average", estimate(avg)}, {"expected", expected},
               {"deviation_sigma", std::abs(avg.mean - expected) / avg.error}, {"mean_work", estimate(mean_estimate(work))}};
  return a;
}

Artifacts crooks(const json& p, std::uint64_t seed) {
  using namespace stochastic;
  Artifacts a;
  a.sidecar = true;
  a.table.header = {"traj_id", "W"};
  const auto protocol = grid(num(p, "level_from"), num(p, "level_to"), integer(p, "steps") + 1, false);
  const MarkovChainSpec spec([](int s, double l) { return s == 0 ? 0.0 : l; }, 2, protocol, num(p, "beta"));
  const auto r = crooks_markov(spec, static_cast<std::size_t>(integer(p, "samples")), seed);
  for (std::size_t i = 0; i < r.forward_work.size(); ++i) a.table.add({static_cast<long long>(i), r.forward_work[i]});
  a.summary = {{"slope", r.slope},         {"slope_error", r.slope_error}, {"beta", spec.beta()},
               {"intercept", r.intercept}, {"crossing", r.crossing},       {"delta_f", r.delta_f},
               {"integral", estimate(r.integral)}, {"excluded_bins", r.excluded_bins}};
  return a;
}

Artifacts wigner_ft(const json& p, std::uint64_t seed) {
  using namespace stochastic;
  Artifacts a;
  a.sidecar = true;
  a.table.header = {"traj_id", "Sigma"};
  const WignerOscillator o{num(p, "mass"), num(p, "frequency"), num(p, "gamma"), num(p, "beta"), num(p, "hbar")};
  const auto e = wigner_entropy_ft(o, make_ramp(p.at("protocol")), static_cast<std::size_t>(integer(p, "samples")),
                                   seed, num(p, "dt"));
  for (std::size_t i = 0; i < e.entropy.size(); ++i) a.table.add({static_cast<long long>(i), e.entropy[i]});
  const auto avg = TrajectoryEnsemble::exp_average(e.entropy, 1.0);
  a.summary = {{"exp_average", estimate(avg)}, {"deviation_sigma", std::abs(avg.mean - 1.0) / avg.error},
               {"quantum_parameter", o.quantum_parameter()}, {"regime_warning", e.regime_warning}};
  return a;
}

// ---------------------------------------------------------------- open systems

// Index 0 is the ground state in every qubit model below.
Mat qubit_state(double excited, double coherence) {
  require(excited >= 0 && excited <= 1, "excited population must lie in [0, 1]");
  Mat rho(2, 2);
  rho << 1 - excited, coherence, coherence, excited;
  return rho;
}

const std::vector<std::string> kEpHeader = {"t", "S", "Q", "Sigma", "sigma_rate", "spohn_rate"};

Artifacts qubit_ep(const json& p, std::uint64_t) {
  using namespace openq;
  Artifacts a;
  a.table.header = kEpHeader;
  ThermalQubitSpec s{num(p, "frequency"), num(p, "emission"), num(p, "absorption")};
  const double amp = num(p, "drive_amplitude"), w = num(p, "drive_frequency");
  if (amp != 0) s.drive = [amp, w](double t) { return Mat(amp * std::cos(w * t) * pauli_x()); };
  const Mat rho = qubit_state(num(p, "excited"), num(p, "coherence"));
  const auto run = thermal_qubit_evolve(s, DensityState(rho), num(p, "tau"), integer(p, "steps"));
  const auto& l = run.ledger;
  double min_spohn = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < l.times.size(); ++k) {
    a.table.add({l.times[k], l.entropy[k], l.heat[k], l.entropy_production[k], l.rate[k], l.spohn[k]});
    if (!std::isnan(l.spohn[k])) min_spohn = std::min(min_spohn, l.spohn[k]);
  }
  a.summary = {{"beta", l.beta}, {"min_spohn_rate", min_spohn}, {"final_Sigma", l.entropy_production.back()}};
  return a;
}

Artifacts ep_correlation(const json& p, std::uint64_t) {
  using namespace openq;
  Artifacts a;
  a.table.header = kEpHeader;
  const int units = integer(p, "units");
  const auto betas = nums(p, "betas");
  CorrelationModel m;
  const Mat h = -0.5 * num(p, "gap") * pauli_z();
  m.system_hamiltonian = h;
  for (int i = 0; i < units; ++i) m.units.push_back({h, betas[i % betas.size()]});
  m.interaction = partial_swap_interaction(units, num(p, "coupling"));
  m.system_initial = qubit_state(num(p, "excited"), num(p, "coherence"));
  const auto ts = grid(0.0, num(p, "t_max"), integer(p, "points"), false);
  std::vector<CorrelationReport> reps(ts.size());
  parallel_for(ts.size(), [&](std::size_t i) { reps[i] = ep_as_correlation(m, ts[i]); });
  double worst = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    double q = 0;
    for (double x : reps[i].unit_heat) q += x;
    const std::size_t lo = i == 0 ? 0 : i - 1, hi = i + 1 == ts.size() ? i : i + 1;
    const double rate = (reps[hi].irreversible - reps[lo].irreversible) / (ts[hi] - ts[lo]);
    a.table.add({ts[i], reps[i].system_entropy_change, q, reps[i].irreversible, rate, kNan});
    worst = std::max(worst, std::abs(reps[i].identity_residual));
  }
  a.summary = {{"max_identity_residual", worst}, {"final_mutual_information", reps.back().mutual_information}};
  return a;
}

Artifacts landauer_run(const json& p, std::uint64_t) {
  using namespace landauer;
  Artifacts a;
  a.sidecar = true;
  a.table.header = {"eta", "Theta", "bound"};
  const double beta = num(p, "beta"), t = num(p, "time");
  const auto m = qubit_reset_model(qubit_state(num(p, "excited"), num(p, "coherence")), integer(p, "units"),
                                   num(p, "gap"), num(p, "coupling"), beta);
  const auto eq = landauer_equality(m, t);
  const auto f = fcs_report(m, t, default_eta_grid(beta, integer(p, "eta_points")));
  for (std::size_t k = 0; k < f.etas.size(); ++k) a.table.add({f.etas[k], f.theta[k], f.bounds[k]});
  a.summary = {{"betaQ", eq.beta_heat},
               {"dSS", eq.entropy_change},
               {"mutual", eq.mutual_information},
               {"relent", eq.environment_relative_entropy},
               {"residual", eq.residual},
               {"max_bound", f.max_bound}};
  return a;
}

// ---------------------------------------------------------------- darwinism

Artifacts darwinism_plateau(const json& p, std::uint64_t) {
  using namespace darwinism;
  Artifacts a;
  a.table.header = {"N", "f", "MI", "S_system"};
  const double a2 = num(p, "alpha_squared");
  require(a2 > 0 && a2 < 1, "alpha_squared must lie in (0, 1)");
  json flat = json::array();
  for (double nu : nums(p, "units")) {
    require(nu >= 1 && std::nearbyint(nu) == nu, "units must be positive integers");
    const SpinStarSpec s{static_cast<int>(nu), num(p, "coupling"), std::sqrt(a2), std::sqrt(1 - a2), num(p, "time")};
    const double ss = system_entropy(s);
    double worst = 0;
    for (const auto& pt : mutual_info_curve(s, all_fragments(s.units))) {
      a.table.add({static_cast<long long>(s.units), pt.fraction, pt.mutual_information, ss});
      if (pt.fragment > 0 && pt.fragment < s.units) worst = std::max(worst, std::abs(pt.mutual_information - ss));
    }
    flat.push_back({{"N", s.units}, {"max_plateau_deviation", worst}});
  }
  a.summary = {{"plateaus", flat}};
  return a;
}

// ---------------------------------------------------------------- annealing

Artifacts anneal_diagnostic(const json& p, std::uint64_t seed) {
  using namespace annealing;
  Artifacts a;
  a.table.header = {"tau", "omega", "prob", "kinks", "efficacy_lhs"};
  const int length = integer(p, "length");
  auto couplings = nums(p, "couplings");
  if (couplings.size() == 1) couplings.assign(std::max(length - 1, 1), couplings[0]);
  bool uniform = true;
  for (double j : couplings) uniform = uniform && std::abs(j) == std::abs(couplings[0]);
  const auto taus = nums(p, "taus");
  require(!taus.empty(), "taus must not be empty");
  const auto spec = linear_anneal(length, taus.front(), num(p, "g0"), num(p, "delta1"), couplings);
  const std::string kind = text(p, "noise");
  const Noise noise{kind == "dephasing" ? NoiseKind::dephasing : kind == "amplitude-damping" ? NoiseKind::amplitude_damping
                                                                                              : NoiseKind::none,
                    num(p, "rate")};
  DiagnosticOptions opt;
  opt.preparation = text(p, "preparation") == "ground" ? Preparation::ground : Preparation::observable_gibbs;
  opt.shots = integer(p, "shots");
  opt.seed = seed;
  opt.steps = integer(p, "steps");
  std::vector<DiagnosticReport> reps;
  json flags = json::object();
  if (taus.size() >= 2) {
    auto sweep = tau_sweep(spec, noise, taus, opt);
    flags = {{"max_variation", sweep.max_variation}, {"tau_dependent", sweep.tau_dependent}, {"monotone", sweep.monotone}};
    reps = std::move(sweep.reports);
  } else {
    reps.push_back(run_diagnostic(spec, noise, opt));
  }
  json per = json::array();
  for (const auto& r : reps) {
    for (const auto& atom : r.distribution) {
      const double kinks = uniform ? (length - 1 - atom.value) / 2 : kNan;
      a.table.add({r.tau, atom.value, atom.probability, kinks, r.exp_average});
    }
    per.push_back({{"tau", r.tau}, {"exp_average", r.exp_average}, {"efficacy", r.efficacy},
                   {"ground_probability", r.ground_probability}});
  }
  a.summary = {{"sweep", flags}, {"reports", per}};
  return a;
}

// ---------------------------------------------------------------- Kibble-Zurek

const std::vector<std::string> kKzHeader = {"tauQ", "D_exact", "D_ai", "Wex_quad", "Wex_closed"};

Artifacts kz_lz(const json& p, std::uint64_t) {
  using namespace kzm;
  Artifacts a;
  a.table.header = kKzHeader;
  LzOptions opt;
  opt.window = text(p, "window") == "full" ? LzWindow::full : LzWindow::from_anticrossing;
  const auto r = lz_defect_sweep(num(p, "gap"), nums(p, "quench_times"), opt);
  for (const auto& pt : r.points) a.table.add({pt.quench_time, pt.tdse, pt.ai, kNan, kNan});
  a.summary = {{"tdse_exponent", r.tdse_fit.exponent}, {"tdse_exponent_error", r.tdse_fit.exponent_error},
               {"ai_exponent", r.ai_fit.exponent}};
  return a;
}

Artifacts kz_excess_work(const json& p, std::uint64_t) {
  using namespace kzm;
  Artifacts a;
  a.table.header = kKzHeader;
  CriticalSpec s;
  s.nu = num(p, "nu"), s.z = num(p, "z"), s.susceptibility_exponent = num(p, "Lambda");
  s.tau0 = num(p, "tau0"), s.chi0 = num(p, "chi0"), s.critical_value = num(p, "critical_value");
  const auto r = excess_work_scaling(s, nums(p, "quench_times"), num(p, "window"));
  for (const auto& pt : r.points) a.table.add({pt.quench_time, kNan, kNan, pt.quadrature, pt.closed_form});
  a.summary = {{"fitted_exponent", r.fit.exponent}, {"exponent_error", r.fit.exponent_error},
               {"predicted_exponent", r.predicted_exponent}};
  return a;
}

// ---------------------------------------------------------------- counterdiabatic driving

Artifacts cd_fidelity(const json& p, std::uint64_t) {
  using namespace cdriving;
  Artifacts a;
  a.table.header = {"system", "tau", "with_correction", "fidelity"};
  struct Job {
    std::string system;
    double tau;
    bool corrected;
  };
  std::vector<Job> jobs;
  for (const auto& sys : texts(p, "systems"))
    for (double tau : nums(p, "taus")) {
      require(tau > 0, "taus must be positive");
      for (bool c : {false, true}) jobs.push_back({sys, tau, c});
    }
  const int steps = integer(p, "steps");
  std::vector<double> fid(jobs.size());
  std::vector<double> tails(jobs.size(), 0.0);
  parallel_for(jobs.size(), [&](std::size_t i) {
    const auto& j = jobs[i];
    if (j.system == "ho") {
      const Schedule w = smooth_ramp(num(p, "omega_from"), num(p, "omega_to"), j.tau);
      const Ladder lad{integer(p, "cutoff"), std::sqrt(std::max(num(p, "omega_from"), num(p, "omega_to")))};
      const auto path = oscillator_path(w, lad);
      std::function<Mat(double)> h1;
      if (j.corrected) h1 = [w, cut = lad.cutoff](double t) { return cd_ho(w, t, cut); };
      const auto r = drive(path, h1, eigh(path.at(0.0)).vectors.col(0), 0, steps, 2);
      fid[i] = r.fidelity.back(), tails[i] = r.max_tail;
    } else if (j.system == "transport") {
      const Ladder lad{integer(p, "cutoff"), 1.0};
      const Schedule f = smooth_ramp(0.0, num(p, "distance"), j.tau), one = constant_schedule(1.0, j.tau);
      const auto path = scale_invariant_path([](double x) { return 0.5 * x * x; }, one, f, lad);
      std::function<Mat(double)> h1;
      if (j.corrected) h1 = [=](double t) { return cd_scale_invariant(one, f, t, lad); };
      const auto r = drive(path, h1, eigh(path.at(0.0)).vectors.col(0), 0, steps, 2);
      fid[i] = r.fidelity.back(), tails[i] = r.max_tail;
    } else {
      const int n = integer(p, "spins");
      const double chi = num(p, "chi");
      const Schedule h = smooth_ramp(num(p, "h_from"), num(p, "h_to"), j.tau);
      const auto path = lmg_path(h, chi, n);
      const auto h1 = j.corrected ? lmg_correction(h, chi, n) : std::function<Mat(double)>{};
      fid[i] = drive(path, h1, eigh(path.at(0.0)).vectors.col(0), 0, steps, 2).fidelity.back();
    }
  });
  double tail = 0;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    a.table.add({jobs[i].system, jobs[i].tau, jobs[i].corrected, fid[i]});
    tail = std::max(tail, tails[i]);
  }
  a.summary = {{"max_tail_population", tail}};
  return a;
}

// ---------------------------------------------------------------- registry

const std::vector<std::string> kMedia = {"classical-ho", "quantum-ho"};
const json kRatios = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};

std::vector<Experiment> build_registry() {
  using K = Kind;
  std::vector<Experiment> r;
  r.push_back({"thermometry-curves", "thermometry: quantum Fisher information of thermal probes",
               Schema({{"kinds", K::text_list, {"qubit", "oscillator", "d-level", "degenerate"}, "probe families",
                        {"qubit", "oscillator", "d-level", "degenerate"}},
                       {"gaps", K::number_list, {0.5, 1.0, 2.0}, "energy spacings Delta"},
                       {"dims", K::number_list, {3, 5}, "dimensions for d-level and degenerate probes"},
                       {"t_min", K::number, 0.05, "lowest temperature"},
                       {"t_max", K::number, 5.0, "highest temperature"},
                       {"points", K::integer, 60, "temperatures per curve"},
                       {"log_spacing", K::boolean, true, "log-spaced temperature grid"}}),
               thermometry_curves});
  r.push_back({"carnot-ca", "engines: endoreversible Carnot cycle at maximum power",
               Schema({{"t_hot", K::number, 1.0, "hot bath temperature"},
                       {"ratios", K::number_list, kRatios, "T_c / T_h values"},
                       {"coupling_hot", K::number, 1.0, "hot-side heat conductance"},
                       {"coupling_cold", K::number, 1.0, "cold-side heat conductance"},
                       {"zeta", K::number, 1.0, "adiabat time overhead"}}),
               carnot_ca});
  r.push_back({"otto-tls", "engines: two-level quantum Otto cycle",
               Schema({{"gap_initial", K::number, 0.5, "cold-isochore gap"},
                       {"gap_final", K::number, 1.0, "hot-isochore gap"},
                       {"t_hot", K::number, 4.0, "hot bath temperature"},
                       {"ratios", K::number_list, kRatios, "T_c / T_h values"}}),
               otto_tls_cycle});
  r.push_back({"otto-endo", "engines: endoreversible Otto cycle with oscillator media",
               Schema({{"media", K::text_list, kMedia, "working media", kMedia},
                       {"ratios", K::number_list, kRatios, "T_c / T_h values"},
                       {"t_cold", K::number, 1.0, "cold bath temperature"},
                       {"omega_over_t_cold", K::number, 0.1, "hot-isochore frequency over T_c"},
                       {"tau_hot", K::number, 1.0, "hot isochore duration"},
                       {"tau_cold", K::number, 1.0, "cold isochore duration"},
                       {"coupling_hot", K::number, 1.0, "hot relaxation rate"},
                       {"coupling_cold", K::number, 1.0, "cold relaxation rate"},
                       {"zeta", K::number, 1.0, "adiabat time overhead"},
                       {"kappa_min", K::number, 1e-3, "lower end of the compression search"},
                       {"grid_points", K::integer, 41, "coarse grid before the simplex"}}),
               otto_endo});
  r.push_back({"battery-qutrit-threshold", "batteries: global versus copy-wise ergotropy of qutrits",
               Schema({{"energies", K::number_list, {0.0, 0.579, 1.0}, "qutrit levels"},
                       {"p0", K::number, 0.224, "ground population"},
                       {"p1_min", K::number, 0.0, "lowest middle population"},
                       {"p1_max", K::number, 0.776, "highest middle population (clipped to 1 - p0)"},
                       {"points", K::integer, 97, "middle populations scanned"},
                       {"copies", K::integer, 2, "batteries acted on globally (2 or 3)"}}),
               battery_threshold});
  r.push_back({"quantum-jarzynski", "fluctuation theorems: two-time measurement work statistics",
               Schema({{"protocols", K::text_list, {"qubit", "oscillator"}, "driven systems", {"qubit", "oscillator"}},
                       {"betas", K::number_list, {0.5, 1.0, 2.0}, "inverse temperatures"},
                       {"frequency", K::ramp, ramp("linear", 1.0, 2.0, 1.0), "level-spacing ramp"},
                       {"drive", K::number, 0.4, "transverse drive amplitude, sin(pi t / tau) envelope"},
                       {"cutoff", K::integer, 6, "oscillator truncation"},
                       {"slices", K::integer, 256, "propagator slices"}}),
               quantum_jarzynski});
  r.push_back({"classical-jarzynski", "fluctuation theorems: classical work statistics",
               Schema({{"dynamics", K::text, "langevin", "langevin or hamiltonian", {"langevin", "hamiltonian"}},
                       {"samples", K::integer, 20000, "trajectories"},
                       {"beta", K::number, 1.0, "inverse temperature"},
                       {"mass", K::number, 1.0, "particle mass"},
                       {"gamma", K::number, 1.0, "friction rate (langevin)"},
                       {"stiffness", K::number, 1.0, "trap stiffness (langevin)"},
                       {"protocol", K::ramp, ramp("linear", 0.0, 1.0, 1.0), "trap centre (langevin)"},
                       {"frequency", K::ramp, ramp("linear", 1.0, 2.0, 1.0), "oscillator frequency (hamiltonian)"},
                       {"dt", K::number, 1e-3, "time step"}}),
               classical_jarzynski});
  r.push_back({"crooks", "fluctuation theorems: Crooks relation on a driven two-state chain",
               Schema({{"level_from", K::number, 0.0, "initial excited energy"},
                       {"level_to", K::number, 2.0, "final excited energy"},
                       {"steps", K::integer, 8, "protocol steps"},
                       {"beta", K::number, 1.0, "inverse temperature"},
                       {"samples", K::integer, 100000, "forward and reverse trajectories each"}}),
               crooks});
  r.push_back({"wigner-ft", "fluctuation theorems: entropy production of a quantum Brownian oscillator in the Wigner picture",
               Schema({{"mass", K::number, 1.0, "oscillator mass"},
                       {"frequency", K::number, 1.0, "oscillator frequency"},
                       {"gamma", K::number, 0.5, "friction rate"},
                       {"beta", K::number, 1.0, "inverse temperature"},
                       {"hbar", K::number, 0.1, "Planck constant in model units"},
                       {"protocol", K::ramp, ramp("linear", 0.0, 1.0, 2.0), "trap centre"},
                       {"samples", K::integer, 20000, "trajectories"},
                       {"dt", K::number, 0.01, "time step"}}),
               wigner_ft});
  r.push_back({"qubit-ep", "open systems: entropy production of a thermalizing qubit",
               Schema({{"frequency", K::number, 1.0, "bare hamiltonian diag(-w, w)"},
                       {"emission", K::number, 1.0, "decay rate"},
                       {"absorption", K::number, 0.5, "excitation rate"},
                       {"drive_amplitude", K::number, 0.0, "amplitude of the cos(w_d t) sigma_x drive"},
                       {"drive_frequency", K::number, 1.0, "drive frequency w_d"},
                       {"excited", K::number, 1.0, "initial excited population"},
                       {"coherence", K::number, 0.0, "initial real coherence"},
                       {"tau", K::number, 5.0, "evolution time"},
                       {"steps", K::integer, 0, "integrator steps, 0 picks a default"}}),
               qubit_ep});
  r.push_back({"ep-correlation", "open systems: entropy production as system-environment correlation",
               Schema({{"units", K::integer, 3, "environment qubits"},
                       {"betas", K::number_list, {1.0}, "unit inverse temperatures, cycled"},
                       {"gap", K::number, 1.0, "qubit gap for system and units"},
                       {"coupling", K::number, 0.5, "partial-swap coupling"},
                       {"excited", K::number, 0.8, "initial system excited population"},
                       {"coherence", K::number, 0.2, "initial system coherence"},
                       {"t_max", K::number, 3.0, "last time"},
                       {"points", K::integer, 31, "times"}}),
               ep_correlation});
  r.push_back({"landauer", "Landauer principle: equality and full-counting-statistics bounds for qubit reset",
               Schema({{"units", K::integer, 3, "environment qubits"},
                       {"gap", K::number, 1.0, "qubit gap"},
                       {"coupling", K::number, 0.5, "partial-swap coupling"},
                       {"beta", K::number, 1.0, "environment inverse temperature"},
                       {"time", K::number, 1.0, "interaction time"},
                       {"excited", K::number, 0.5, "initial system excited population"},
                       {"coherence", K::number, 0.0, "initial system coherence"},
                       {"eta_points", K::integer, 16, "counting parameters"}}),
               landauer_run});
  r.push_back({"darwinism-plateau", "quantum Darwinism: mutual-information plateau of a spin star",
               Schema({{"units", K::number_list, {16}, "environment sizes N"},
                       {"coupling", K::number, 1.0, "system-environment coupling J"},
                       {"alpha_squared", K::number, 0.3, "weight of the first pointer state"},
                       {"time", K::number, kPi / 4, "interaction time"}}),
               darwinism_plateau});
  r.push_back({"anneal-diagnostic", "quantum annealing: fluctuation-theorem diagnostic of an Ising chain",
               Schema({{"length", K::integer, 6, "chain sites"},
                       {"couplings", K::number_list, {1.0}, "bond couplings, one value means uniform"},
                       {"taus", K::number_list, {1.0, 3.0, 10.0, 30.0}, "anneal times"},
                       {"g0", K::number, 1.0, "initial transverse field"},
                       {"delta1", K::number, 1.0, "final interaction scale"},
                       {"noise", K::text, "none", "noise channel", {"none", "dephasing", "amplitude-damping"}},
                       {"rate", K::number, 0.0, "noise rate"},
                       {"preparation", K::text, "ground", "initial state", {"ground", "observable-gibbs"}},
                       {"shots", K::integer, 0, "sampled shots, 0 for exact distributions"},
                       {"steps", K::integer, 0, "integrator steps, 0 picks a default"}}),
               anneal_diagnostic});
  r.push_back({"kz-lz", "Kibble-Zurek: Landau-Zener defect scaling",
               Schema({{"gap", K::number, 1.0, "minimum gap"},
                       {"quench_times", K::number_list, {1.0, 2.0, 5.0, 10.0, 20.0, 50.0}, "quench times tau_Q"},
                       {"window", K::text, "from-anticrossing", "sweep window", {"full", "from-anticrossing"}}}),
               kz_lz});
  r.push_back({"kz-excess-work", "Kibble-Zurek: excess work scaling near a critical point",
               Schema({{"nu", K::number, 1.0, "correlation-length exponent"},
                       {"z", K::number, 1.0, "dynamic exponent"},
                       {"Lambda", K::number, 1.0, "susceptibility exponent"},
                       {"tau0", K::number, 1.0, "relaxation scale"},
                       {"chi0", K::number, 1.0, "susceptibility scale"},
                       {"critical_value", K::number, 1.0, "critical parameter value"},
                       {"window", K::number, 2.0, "impulse window in units of the freeze-out time"},
                       {"quench_times", K::number_list, {1.0, 1.78, 3.16, 5.62, 10.0, 17.8, 31.6, 56.2, 100.0},
                        "quench times tau_Q"}}),
               kz_excess_work});
  r.push_back({"cd-fidelity", "counterdiabatic driving: fidelity with and without the correction",
               Schema({{"systems", K::text_list, {"ho", "lmg", "transport"}, "driven systems", {"ho", "lmg", "transport"}},
                       {"taus", K::number_list, {0.1, 0.3, 1.0}, "ramp times"},
                       {"steps", K::integer, 200, "integrator steps"},
                       {"cutoff", K::integer, 60, "oscillator truncation (ho, transport)"},
                       {"omega_from", K::number, 1.0, "initial frequency (ho)"},
                       {"omega_to", K::number, 5.0, "final frequency (ho)"},
                       {"distance", K::number, 1.0, "transport distance"},
                       {"spins", K::integer, 50, "LMG spin number N"},
                       {"chi", K::number, 0.0, "LMG anisotropy"},
                       {"h_from", K::number, 3.0, "initial LMG field"},
                       {"h_to", K::number, 1.5, "final LMG field"}}),
               cd_fidelity});
  return r;
}

std::string cell_text(const Cell& c) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) return format_number(v);
        else if constexpr (std::is_same_v<T, long long>) return std::to_string(v);
        else if constexpr (std::is_same_v<T, bool>) return v ? "true" : "false";
        else return v;
      },
      c);
}

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot write '" + path.string() + "'");
  f << body;
  if (!f) throw Error("failed writing '" + path.string() + "'");
}

}  // namespace

const std::vector<Experiment>& registry() {
  static const std::vector<Experiment> r = build_registry();
  return r;
}

const Experiment& find_experiment(const std::string& name) {
  for (const auto& e : registry())
    if (e.name == name) return e;
  throw SchemaError("unknown experiment '" + name + "' (see 'qthermo list')");
}

json registry_json() {
  json out = json::array();
  for (const auto& e : registry()) out.push_back({{"name", e.name}, {"topic", e.topic}, {"parameters", e.schema.describe()}});
  return out;
}

std::string render_csv(const Table& t, const std::string& manifest_name) {
  std::string out;
  for (std::size_t i = 0; i < t.header.size(); ++i) out += (i ? "," : "") + t.header[i];
  out += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + cell_text(row[i]);
    out += '\n';
  }
  out += "# manifest: " + manifest_name + "\n";
  return out;
}

RunRequest request_from_config(const json& config) {
  if (!config.is_object()) throw SchemaError("config must be a table of keys");
  RunRequest req;
  for (const auto& [k, v] : config.items()) {
    if (k == "experiment") {
      if (!v.is_string()) throw SchemaError("'experiment' must be a string");
      req.experiment = v.get<std::string>();
    } else if (k == "seed") {
      if (!v.is_number_integer() || v.get<long long>() < 0) throw SchemaError("'seed' must be a nonnegative integer");
      req.seed = v.get<std::uint64_t>();
    } else if (k == "out") {
      if (!v.is_string()) throw SchemaError("'out' must be a string");
      req.out = v.get<std::string>();
    } else {
      req.params[k] = v;
    }
  }
  return req;
}

RunResult run_experiment(const RunRequest& req) {
  const auto& exp = find_experiment(req.experiment);
  const json params = exp.schema.resolve(req.params);
  const auto start = std::chrono::steady_clock::now();
  Artifacts art = exp.run(params, req.seed);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::filesystem::create_directories(req.out);
  RunResult res;
  const std::string manifest_name = exp.name + ".manifest.json";
  res.csv = req.out / (exp.name + ".csv");
  res.manifest = req.out / manifest_name;
  write_file(res.csv, render_csv(art.table, manifest_name));
  if (art.sidecar) {
    res.sidecar = req.out / (exp.name + ".json");
    write_file(res.sidecar, art.summary.dump(2) + "\n");
  }
  const json canonical = {{"experiment", exp.name}, {"params", params}, {"seed", req.seed}};
  res.manifest_json = {{"toolkit", "qthermo"},
                       {"version", kToolkitVersion},
                       {"experiment", exp.name},
                       {"topic", exp.topic},
                       {"config_hash", hex64(fnv1a(canonical.dump()))},
                       {"seed", req.seed},
                       {"params", params},
                       {"workers", worker_count()},
                       {"wall_seconds", wall},
                       {"rows", art.table.rows.size()},
                       {"csv", res.csv.filename().string()},
                       {"summary", art.summary}};
  if (art.sidecar) res.manifest_json["sidecar"] = res.sidecar.filename().string();
  write_file(res.manifest, res.manifest_json.dump(2) + "\n");
  return res;
}

int exit_code(const std::exception& e) {
  if (dynamic_cast<const InvalidInput*>(&e)) return 2;
  if (dynamic_cast<const IntegrationFailure*>(&e) || dynamic_cast<const Singularity*>(&e)) return 3;
  if (dynamic_cast<const CapExceeded*>(&e)) return 4;
  if (dynamic_cast<const nlohmann::json::exception*>(&e)) return 2;
  return 1;
}

}  // namespace qthermo::cli
