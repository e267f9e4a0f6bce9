#pragma once

// Quantum Mpemba experiment: a qubit relaxing in a bosonic bath from a
// coherent reference state and from its incoherent (rotated) counterpart.

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qig/analysis.hpp"
#include "qig/errors.hpp"
#include "qig/gksl.hpp"
#include "qig/info_geometry.hpp"
#include "qig/numerics.hpp"
#include "qig/state_algebra.hpp"
#include "qig/thermo.hpp"

namespace qig::mpemba {

struct MpembaScenario {
  double epsilon = 5.0;      ///< level splitting
  double temperature = 10.0;
  double gamma = 1.0;        ///< bath coupling
  BlochVector r_ref{-0.41760, -0.60647, 0.47879};
  double horizon = 12.0;     ///< tau
  double dt = 1e-3;

  double beta() const { return 1.0 / temperature; }

  void validate() const {
    if (!(temperature > 0.0) || !std::isfinite(temperature)) throw ValidationError("scenario: temperature must be > 0");
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ValidationError("scenario: gamma must be > 0");
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ValidationError("scenario: epsilon must be > 0");
    if (!(r_ref.norm() <= 1.0)) throw ValidationError("scenario: |r_ref| must not exceed 1");
    if (r_ref.x == 0.0 && r_ref.y == 0.0)
      throw ValidationError("scenario: reference state needs a nonzero r_x or r_y (coherence in the energy basis)");
    if (!(horizon > 0.0) || !(dt > 0.0) || dt > horizon) throw ValidationError("scenario: need 0 < dt <= horizon");
  }
};

/// Generator, initial states and fixed point. Basis order (|e>, |g>), so
/// H = (epsilon/2) sigma_z.
struct MpembaSystem {
  ComplexMatrix hamiltonian;
  Lindbladian lindbladian;
  DensityMatrix reference;
  DensityMatrix rotated;
  DensityMatrix thermal;
  double free_energy_eq;
  double bose;         ///< f_B = 1 / (e^{beta eps} - 1)
  double gamma_plus;   ///< absorption g -> e
  double gamma_minus;  ///< emission e -> g
  double beta;
};

inline MpembaSystem build_scenario(const MpembaScenario& s) {
  s.validate();
  const double beta = s.beta();
  const double bose = 1.0 / std::expm1(beta * s.epsilon);
  const double gp = s.gamma * bose, gm = s.gamma * (1.0 + bose);
  const ComplexMatrix h = 0.5 * s.epsilon * pauli::z();
  ComplexMatrix l_plus = ComplexMatrix::Zero(2, 2), l_minus = ComplexMatrix::Zero(2, 2);
  l_plus(0, 1) = std::sqrt(gp);   // |e><g|
  l_minus(1, 0) = std::sqrt(gm);  // |g><e|
  // emission hands beta*eps of entropy to the bath; absorption takes it back
  Lindbladian lind(Hamiltonian(h), {JumpPair(l_minus, l_plus, std::log(gm / gp))});
  DensityMatrix reference = bloch_to_density(s.r_ref);
  const RealVector lam = reference.eig().values;
  ComplexMatrix diag = ComplexMatrix::Zero(2, 2);
  diag(0, 0) = lam[0];
  diag(1, 1) = lam[1];
  ThermalState th = thermal_state(h, beta);
  return {h,    std::move(lind), std::move(reference), DensityMatrix(diag), std::move(th.state), th.free_energy,
          bose, gp,              gm,                   beta};
}

/// Time after which curve a stays above curve b.
struct CrossingResult {
  std::optional<double> t_m;
  bool persistent = false;
};

/// Earliest linearly interpolated sign change of a - b after which a > b up
/// to the end of the series. Samples with |a - b| <= resolution carry no
/// sign; they neither break nor establish persistence.
inline CrossingResult detect_crossing(std::span<const double> t, std::span<const double> a,
                                      std::span<const double> b, double resolution = 0.0) {
  if (a.size() != t.size() || b.size() != t.size()) throw ValidationError("detect_crossing: series must share the grid");
  auto sign = [&](std::size_t i) {
    const double d = a[i] - b[i];
    return std::abs(d) <= resolution ? 0 : (d > 0 ? 1 : -1);
  };
  std::optional<std::size_t> last_resolved;
  for (std::size_t i = t.size(); i-- > 0;)
    if (sign(i) != 0) {
      last_resolved = i;
      break;
    }
  if (!last_resolved) return {};
  const int final_sign = sign(*last_resolved);
  // last resolved sample with the opposite sign
  std::optional<std::size_t> before;
  for (std::size_t i = *last_resolved + 1; i-- > 0;)
    if (sign(i) == -final_sign) {
      before = i;
      break;
    }
  if (!before) return {};
  if (final_sign < 0) return {std::nullopt, false};
  std::size_t after = *before + 1;
  while (sign(after) != final_sign) ++after;
  const double d0 = a[*before] - b[*before], d1 = a[after] - b[after];
  const double tm = t[*before] + (t[after] - t[*before]) * d0 / (d0 - d1);
  return {tm, true};
}

struct DecayFit {
  double rate = std::numeric_limits<double>::quiet_NaN();
  double window_start = 0.0;
  double window_end = 0.0;  ///< after truncation
  std::size_t points = 0;
  bool shrunk = false;      ///< window cut short by non-positive or unresolved samples
};

/// Least-squares decay rate -d log(series)/dt over [start, end]. The window
/// ends early at the first sample that is non-positive or below
/// floor_fraction times the series peak (the roundoff floor).
inline DecayFit decay_rate_fit(std::span<const double> t, std::span<const double> series, double start, double end,
                               double floor_fraction = 1e-24) {
  if (series.size() != t.size()) throw ValidationError("decay_rate_fit: series must share the grid");
  const double peak = *std::max_element(series.begin(), series.end());
  DecayFit fit;
  fit.window_start = start;
  fit.window_end = start;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < start) continue;
    if (t[i] > end) break;
    if (!(series[i] > 0.0) || series[i] < floor_fraction * peak) {
      fit.shrunk = true;
      break;
    }
    const double y = std::log(series[i]);
    sx += t[i], sy += y, sxx += t[i] * t[i], sxy += t[i] * y;
    ++fit.points;
    fit.window_end = t[i];
  }
  if (fit.points < 2) throw ValidationError("decay_rate_fit: fewer than two usable samples in the window");
  const double m = static_cast<double>(fit.points);
  fit.rate = -(m * sxy - sx * sy) / (m * sxx - sx * sx);
  return fit;
}

/// Everything computed for one initial state.
struct StateRun : RunAnalysis {
  std::string label;
  IdentityReport identities;
  std::vector<double> geodesic_from_start;  ///< L^geo_SLD(rho(0), rho(t))
  double geodesic_to_thermal_sld = 0.0;
  double geodesic_to_thermal_wy = 0.0;
  DecayFit incoherent_decay;
  DecayFit coherent_decay;  ///< rate NaN when F_C vanishes on the window

  /// L(tau) and its increment over the last tenth of the horizon.
  double length_infinity(MetricKind k) const { return summary(k).length.back(); }
  double length_convergence(MetricKind k) const {
    const auto& g = summary(k);
    const double t90 = 0.9 * g.t.back();
    std::size_t i = 0;
    while (i + 1 < g.t.size() && g.t[i] < t90) ++i;
    return g.length.back() - g.length[i];
  }
};

struct ExperimentBundle {
  MpembaScenario scenario;
  std::vector<MetricKind> metrics;
  double gamma_plus = 0.0, gamma_minus = 0.0, free_energy_eq = 0.0;
  StateRun reference;
  StateRun rotated;
  CrossingResult crossing;  ///< F_neq(reference) overtakes F_neq(rotated)
};

inline StateRun run_state(const MpembaSystem& sys, const MpembaScenario& s, const DensityMatrix& rho0,
                          std::string label, std::span<const MetricKind> metrics) {
  StateRun run;
  static_cast<RunAnalysis&>(run) = analyze(sys.lindbladian, rho0, TimeGrid{s.horizon, s.dt}, metrics, sys.beta);
  run.label = std::move(label);
  const Trajectory& tr = run.trajectory;
  run.identities = qfi_ic_identities(tr, run.flows, run.entropy);
  for (std::size_t i = 0; i < tr.size(); ++i)
    run.geodesic_from_start.push_back(geodesic_length(tr.states[0], tr.states[i], MetricKind::SLD));
  run.geodesic_to_thermal_sld = geodesic_length(rho0, sys.thermal, MetricKind::SLD);
  run.geodesic_to_thermal_wy = geodesic_length(rho0, sys.thermal, MetricKind::WY);
  const double tau = tr.t.back();
  run.incoherent_decay = decay_rate_fit(tr.t, run.sld.incoherent, 0.5 * tau, tau);
  try {
    run.coherent_decay = decay_rate_fit(tr.t, run.sld.coherent, 0.5 * tau, tau);
  } catch (const ValidationError&) {
    run.coherent_decay = DecayFit{};  // no coherent contribution to fit
  }
  return run;
}

inline ExperimentBundle run_experiment(const MpembaScenario& s, std::vector<MetricKind> metrics) {
  if (metrics.empty()) throw ValidationError("run_experiment: at least one metric is required");
  const MpembaSystem sys = build_scenario(s);
  ExperimentBundle out;
  out.scenario = s;
  out.metrics = std::move(metrics);
  out.gamma_plus = sys.gamma_plus;
  out.gamma_minus = sys.gamma_minus;
  out.free_energy_eq = sys.free_energy_eq;
  auto rotated = std::async(std::launch::async,
                            [&] { return run_state(sys, s, sys.rotated, "rotated", out.metrics); });
  out.reference = run_state(sys, s, sys.reference, "reference", out.metrics);
  out.rotated = rotated.get();
  double scale = 0.0;
  for (double f : out.reference.free_energy) scale = std::max(scale, std::abs(f));
  for (double f : out.rotated.free_energy) scale = std::max(scale, std::abs(f));
  out.crossing = detect_crossing(out.reference.trajectory.t, out.reference.free_energy, out.rotated.free_energy,
                                 1e3 * std::numeric_limits<double>::epsilon() * scale);
  return out;
}

}  // namespace qig::mpemba
