#pragma once

// Entropy-rate decomposition along GKSL trajectories, the incoherent-QFI
// identities, the entropy-rate bound, the observable speed bound and the
// non-equilibrium free energy.

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "qig/errors.hpp"
#include "qig/gksl.hpp"
#include "qig/info_geometry.hpp"
#include "qig/numerics.hpp"
#include "qig/state_algebra.hpp"
#include "qig/types.hpp"

namespace qig {

/// Eigenbasis flows at every sample, with labels kept continuous in time.
inline std::vector<EigenbasisFlows> eigenbasis_series(const Lindbladian& l, const Trajectory& traj) {
  const auto aligned = aligned_eigenbases(traj);
  std::vector<EigenbasisFlows> out;
  out.reserve(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) out.push_back(eigenbasis_currents(l, aligned[i], traj.derivs[i]));
  return out;
}

struct EntropyRecord {
  double t = 0.0;
  double entropy = 0.0;       ///< S
  double rate = 0.0;          ///< dS/dt = -sum pdot log p
  double production = 0.0;    ///< sigma = <<f>>
  double flow = 0.0;          ///< Phi = <<phi>>
  double acceleration = 0.0;  ///< d^2S/dt^2, finite difference of the rate
  double b_term = 0.0;        ///< B = -sum pddot log p
  double c_term = 0.0;        ///< C = int_0^t B
};

namespace detail {
inline double minus_pdot_log_p(const RealVector& p, const RealVector& pdot) {
  double s = 0.0;
  for (Index x = 0; x < p.size(); ++x)
    if (p[x] > tol::eps_floor) s -= pdot[x] * std::log(p[x]);
  return s;
}

// Current average of the time derivative of a per-channel matrix series. An
// entry's derivative is used only where the source is defined at every point
// of its stencil.
inline std::vector<double> averaged_rate(std::span<const double> t, const std::vector<EigenbasisFlows>& flows,
                                         std::vector<RealMatrix> EigenbasisFlows::*member) {
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  const std::size_t n = flows.size();
  const std::size_t channels = n ? (flows[0].*member).size() : 0;
  std::vector<double> out(n, 0.0);
  std::vector<std::vector<RealMatrix>> derivs(channels);
  for (std::size_t k = 0; k < channels; ++k) {
    std::vector<RealMatrix> series;
    series.reserve(n);
    for (const auto& f : flows)
      series.push_back((f.*member)[k].unaryExpr([](double v) { return std::isfinite(v) ? v : 0.0; }));
    derivs[k] = differentiate<RealMatrix>(t, series);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto s = derivative_stencil(t, i);
    std::vector<RealMatrix> rate(channels);
    for (std::size_t k = 0; k < channels; ++k) {
      rate[k] = derivs[k][i];
      for (std::size_t q = 0; q < s.count; ++q)
        rate[k] = rate[k].binaryExpr((flows[s.first + q].*member)[k],
                                     [](double v, double src) { return std::isfinite(src) ? v : nan; });
    }
    out[i] = current_average(flows[i].current, rate);
  }
  return out;
}
}  // namespace detail

inline std::vector<EntropyRecord> entropy_decomposition(const Trajectory& traj,
                                                        const std::vector<EigenbasisFlows>& flows) {
  const std::size_t n = traj.size();
  std::vector<EntropyRecord> rec(n);
  std::vector<double> rate(n);
  std::vector<RealVector> pdot(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& f = flows[i];
    rec[i].t = traj.t[i];
    rec[i].entropy = von_neumann_entropy(traj.states[i]);
    rec[i].rate = rate[i] = detail::minus_pdot_log_p(f.p, f.pdot);
    rec[i].production = current_average(f.current, f.force);
    rec[i].flow = current_average(f.current, f.flow);
    pdot[i] = f.pdot;
  }
  if (n >= 3) {
    const auto acc = differentiate(traj.t, rate);
    const auto pddot = differentiate<RealVector>(traj.t, pdot);
    std::vector<double> b(n);
    for (std::size_t i = 0; i < n; ++i) {
      rec[i].acceleration = acc[i];
      rec[i].b_term = b[i] = detail::minus_pdot_log_p(flows[i].p, pddot[i]);
    }
    const auto c = cumulative_trapezoid(traj.t, b);
    for (std::size_t i = 0; i < n; ++i) rec[i].c_term = c[i];
  }
  return rec;
}

inline std::vector<EntropyRecord> entropy_decomposition(const Lindbladian& l, const Trajectory& traj) {
  return entropy_decomposition(traj, eigenbasis_series(l, traj));
}

/// Largest |dS/dt - (sigma - Phi)| over the records.
inline double entropy_balance_residual(std::span<const EntropyRecord> rec) {
  double r = 0.0;
  for (const auto& e : rec) r = std::max(r, std::abs(e.rate - (e.production - e.flow)));
  return r;
}

/// Per-sample terms of the incoherent-QFI identities
///   F_IC = B - (d sigma/dt - d Phi/dt) = -<<df/dt>> + <<dphi/dt>>.
struct IdentityReport {
  std::vector<double> t;
  std::vector<double> incoherent;     ///< F_IC from the QFI decomposition
  std::vector<double> b_term;
  std::vector<double> production_rate;  ///< d sigma/dt
  std::vector<double> flow_rate_total;  ///< d Phi/dt
  std::vector<double> force_rate;     ///< <<df/dt>>
  std::vector<double> flow_rate;      ///< <<dphi/dt>>
  std::vector<double> scale;          ///< per-sample normalisation of the gaps
  double max_entropic_gap = 0.0;      ///< F_IC vs B - (sigma' - Phi'), interior
  double max_current_gap = 0.0;       ///< F_IC vs -<<f'>> + <<phi'>>, interior
  double min_flow_excess = 0.0;       ///< min (<<phi'>> - <<f'>>) / scale, interior

  std::size_t size() const { return t.size(); }
  double entropic(std::size_t i) const { return b_term[i] - (production_rate[i] - flow_rate_total[i]); }
  double current_form(std::size_t i) const { return -force_rate[i] + flow_rate[i]; }
};

/// `floor_fraction` sets the smallest normalisation as a fraction of the
/// peak F_IC; below it the differences are compared on that absolute scale.
inline IdentityReport qfi_ic_identities(const Trajectory& traj, const std::vector<EigenbasisFlows>& flows,
                                        const std::vector<EntropyRecord>& rec, double floor_fraction = 1e-8) {
  const std::size_t n = traj.size();
  if (n < 3) throw ValidationError("qfi_ic_identities: need at least three samples");
  IdentityReport r;
  r.t = traj.t;
  std::vector<double> sigma(n), phi(n);
  for (std::size_t i = 0; i < n; ++i) {
    r.incoherent.push_back(qfi(traj.eigs[i], traj.derivs[i], MetricKind::SLD).incoherent);
    r.b_term.push_back(rec[i].b_term);
    sigma[i] = rec[i].production;
    phi[i] = rec[i].flow;
  }
  r.production_rate = differentiate(traj.t, sigma);
  r.flow_rate_total = differentiate(traj.t, phi);
  r.force_rate = detail::averaged_rate(traj.t, flows, &EigenbasisFlows::force);
  r.flow_rate = detail::averaged_rate(traj.t, flows, &EigenbasisFlows::flow);
  const double peak = *std::max_element(r.incoherent.begin(), r.incoherent.end());
  r.min_flow_excess = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double s =
        std::max({std::abs(r.incoherent[i]), std::abs(r.b_term[i]), std::abs(r.production_rate[i] - r.flow_rate_total[i]),
                  std::abs(r.force_rate[i]), std::abs(r.flow_rate[i]), floor_fraction * peak,
                  std::numeric_limits<double>::min()});
    r.scale.push_back(s);
    if (i == 0 || i + 1 == n) continue;
    r.max_entropic_gap = std::max(r.max_entropic_gap, std::abs(r.incoherent[i] - r.entropic(i)) / s);
    r.max_current_gap = std::max(r.max_current_gap, std::abs(r.incoherent[i] - r.current_form(i)) / s);
    r.min_flow_excess = std::min(r.min_flow_excess, (r.flow_rate[i] - r.force_rate[i]) / s);
  }
  if (!std::isfinite(r.min_flow_excess)) r.min_flow_excess = 0.0;
  return r;
}

inline IdentityReport qfi_ic_identities(const Lindbladian& l, const Trajectory& traj) {
  const auto flows = eigenbasis_series(l, traj);
  return qfi_ic_identities(traj, flows, entropy_decomposition(traj, flows));
}

/// Delta Sdot <= C - T delta + int_0^T F_C at horizon T.
struct BoundReport {
  MetricKind kind = MetricKind::SLD;
  double horizon = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;  ///< rhs - lhs
  double c_term = 0.0;
  double delta = 0.0;
  double coherent_integral = 0.0;
  double incoherent_integral = 0.0;
  double length = 0.0;
  /// | (-delta T + int F_C) - (4 L^2 / T - int F_IC) |
  double identity_residual = 0.0;

  double relative_margin() const { return margin / std::max({std::abs(lhs), std::abs(rhs), 1e-12}); }
  bool holds(double tol_bound = 1e-6) const { return relative_margin() >= -tol_bound; }
};

inline BoundReport entropy_rate_bound(const std::vector<EntropyRecord>& rec, const GeometricSummary& geo,
                                      std::size_t index) {
  if (index == 0 || index >= rec.size())
    throw DomainError("entropy_rate_bound: horizon must lie beyond the first grid step (delta undefined)");
  const auto t = std::span<const double>(geo.t).first(index + 1);
  BoundReport b;
  b.kind = geo.kind;
  b.horizon = geo.t[index] - geo.t[0];
  b.lhs = rec[index].rate - rec[0].rate;
  b.c_term = rec[index].c_term;
  b.delta = geo.delta[index];
  b.coherent_integral = trapezoid(t, std::span<const double>(geo.coherent).first(index + 1));
  b.incoherent_integral = trapezoid(t, std::span<const double>(geo.incoherent).first(index + 1));
  b.length = geo.length[index];
  b.rhs = b.c_term - b.horizon * b.delta + b.coherent_integral;
  b.margin = b.rhs - b.lhs;
  b.identity_residual = std::abs((-b.delta * b.horizon + b.coherent_integral) -
                                 (4.0 * b.length * b.length / b.horizon - b.incoherent_integral));
  return b;
}

inline BoundReport entropy_rate_bound(const std::vector<EntropyRecord>& rec, const GeometricSummary& geo,
                                      double horizon) {
  return entropy_rate_bound(rec, geo, detail::grid_index(geo.t, horizon));
}

/// Bound evaluated at every grid horizon after the first step.
inline std::vector<BoundReport> entropy_rate_bound_series(const std::vector<EntropyRecord>& rec,
                                                          const GeometricSummary& geo) {
  std::vector<BoundReport> out;
  for (std::size_t i = 1; i < rec.size(); ++i) out.push_back(entropy_rate_bound(rec, geo, i));
  return out;
}

/// int_0^t |Tr[O d rho/ds]| / Delta O ds against 2 L_SLD(t).
struct SpeedBound {
  std::vector<double> t;
  std::vector<double> integrand;  ///< |o'| / Delta O, 0 on skipped samples
  std::vector<double> lhs;
  std::vector<double> rhs;
  std::vector<std::size_t> skipped;  ///< samples with vanishing variance
};

inline SpeedBound observable_speed_bound(const Trajectory& traj, const ComplexMatrix& observable,
                                         std::span<const double> sld_length) {
  if (hermiticity_error(observable) > tol::hermitian) throw ValidationError("observable must be Hermitian");
  SpeedBound b;
  b.t = traj.t;
  // <O^2> - <O>^2 cancels to roundoff ~eps |O|^2, so spreads below ~1e-6 |O|
  // are indistinguishable from zero
  const double floor = 1e-6 * std::max(max_abs(observable), tol::eps_floor);
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double spread = traj.states[i].stddev(observable);
    const double change = std::abs((observable * traj.derivs[i]).trace().real());
    if (spread > floor) {
      b.integrand.push_back(change / spread);
    } else {
      b.integrand.push_back(0.0);
      b.skipped.push_back(i);
    }
    b.rhs.push_back(2.0 * sld_length[i]);
  }
  b.lhs = cumulative_trapezoid(traj.t, b.integrand);
  return b;
}

/// d<H>/dt = Tr[H d rho/dt] at every sample.
inline std::vector<double> heat_current(const Trajectory& traj, const ComplexMatrix& h) {
  std::vector<double> out;
  out.reserve(traj.size());
  for (const auto& d : traj.derivs) out.push_back((h * d).trace().real());
  return out;
}

/// Gibbs state exp(-beta H)/Z and its free energy -log(Z)/beta.
struct ThermalState {
  DensityMatrix state;
  double free_energy;
};

inline ThermalState thermal_state(const ComplexMatrix& h, double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("thermal_state: beta must be positive and finite");
  const EigenDecomposition e = eig_hermitian(h);
  const double emin = e.values.minCoeff();
  RealVector w = (-beta * (e.values.array() - emin)).exp().matrix();
  const double zs = w.sum();  // shifted partition function
  const ComplexMatrix tau = e.vectors * (w / zs).cast<Complex>().asDiagonal() * e.vectors.adjoint();
  const double log_z = std::log(zs) - beta * emin;
  return {DensityMatrix(hermitize(tau)), -log_z / beta};
}

/// F_neq = D(rho || tau_beta) / beta + F_eq.
inline double noneq_free_energy(const DensityMatrix& state, const ComplexMatrix& h, double beta) {
  const ThermalState th = thermal_state(h, beta);
  return relative_entropy(state, th.state) / beta + th.free_energy;
}

}  // namespace qig
