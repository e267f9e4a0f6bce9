#pragma once

// One-stop analysis of a single GKSL trajectory: entropy balance, QFI
// geometry per metric, entropy-rate bounds, observable speed and, given an
// inverse temperature, the non-equilibrium free energy.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qig/gksl.hpp"
#include "qig/info_geometry.hpp"
#include "qig/thermo.hpp"

namespace qig {

struct RunAnalysis {
  Trajectory trajectory;
  std::vector<EigenbasisFlows> flows;
  std::vector<EntropyRecord> entropy;
  GeometricSummary sld;                          ///< always present
  std::vector<GeometricSummary> geometry;        ///< one per requested metric
  std::vector<std::vector<BoundReport>> bounds;  ///< per requested metric, horizons t[1..]
  SpeedBound speed;                              ///< for the chosen observable
  std::vector<double> heat;                      ///< tr(H drho/dt)
  std::vector<double> free_energy;               ///< F_neq, NaN without beta

  const GeometricSummary& summary(MetricKind k) const {
    for (const auto& g : geometry)
      if (g.kind == k) return g;
    if (k == MetricKind::SLD) return sld;
    throw ValidationError("metric " + std::string(to_string(k)) + " was not requested");
  }
  const std::vector<BoundReport>& bound_series(MetricKind k) const {
    for (std::size_t i = 0; i < geometry.size(); ++i)
      if (geometry[i].kind == k) return bounds[i];
    throw ValidationError("metric " + std::string(to_string(k)) + " was not requested");
  }
};

/// `observable` defaults to the Hamiltonian.
inline RunAnalysis analyze(const Lindbladian& l, const DensityMatrix& rho0, std::span<const double> grid,
                           std::span<const MetricKind> metrics, std::optional<double> beta = std::nullopt,
                           std::optional<ComplexMatrix> observable = std::nullopt) {
  if (metrics.empty()) throw ValidationError("analyze: at least one metric is required");
  if (grid.size() < 3) throw ValidationError("analyze: the grid needs at least three samples");
  RunAnalysis run;
  run.trajectory = integrate(l, rho0, grid);
  const Trajectory& tr = run.trajectory;
  run.flows = eigenbasis_series(l, tr);
  run.entropy = entropy_decomposition(tr, run.flows);
  run.sld = geometric_summary(tr, MetricKind::SLD);
  for (MetricKind k : metrics) {
    run.geometry.push_back(k == MetricKind::SLD ? run.sld : geometric_summary(tr, k));
    run.bounds.push_back(entropy_rate_bound_series(run.entropy, run.geometry.back()));
  }
  const ComplexMatrix& h = l.hamiltonian().matrix();
  run.speed = observable_speed_bound(tr, observable ? *observable : h, run.sld.length);
  run.heat = heat_current(tr, h);
  run.free_energy.assign(tr.size(), std::numeric_limits<double>::quiet_NaN());
  if (beta) {
    const ThermalState th = thermal_state(h, *beta);
    for (std::size_t i = 0; i < tr.size(); ++i)
      run.free_energy[i] = relative_entropy(tr.states[i], th.state) / *beta + th.free_energy;
  }
  return run;
}

inline RunAnalysis analyze(const Lindbladian& l, const DensityMatrix& rho0, const TimeGrid& grid,
                           std::span<const MetricKind> metrics, std::optional<double> beta = std::nullopt,
                           std::optional<ComplexMatrix> observable = std::nullopt) {
  const auto t = grid.points();
  return analyze(l, rho0, t, metrics, beta, std::move(observable));
}

}  // namespace qig
