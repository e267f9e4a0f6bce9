#pragma once

// Analysis results laid out as CSV tables, plus the Mpemba summary text.

#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "qig/analysis.hpp"
#include "qig/io/csv.hpp"
#include "qig/mpemba.hpp"

namespace qig::io {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

inline std::string metric_tag(MetricKind k) { return std::string(to_string(k)); }

/// Per-sample geometry and thermodynamics in the fixed column order
/// t, F_Q_*, F_IC, F_C_*, S, Sdot, sigma, Phi, L_*, R_*, delta_*, I_*,
/// F_neq, heat_current, bound_lhs, bound_rhs. The bound columns use the
/// first metric with horizon T = t.
inline Table state_table(const RunAnalysis& run, std::span<const MetricKind> metrics) {
  Table t;
  const auto& tr = run.trajectory;
  const std::size_t n = tr.size();
  auto per_metric = [&](const char* prefix, std::vector<double> GeometricSummary::*field) {
    for (MetricKind k : metrics) t.add(std::string(prefix) + metric_tag(k), run.summary(k).*field);
  };
  auto from_entropy = [&](double EntropyRecord::*field) {
    std::vector<double> v;
    v.reserve(n);
    for (const auto& e : run.entropy) v.push_back(e.*field);
    return v;
  };
  t.add("t", tr.t);
  per_metric("F_Q_", &GeometricSummary::fisher);
  t.add("F_IC", run.sld.incoherent);
  per_metric("F_C_", &GeometricSummary::coherent);
  t.add("S", from_entropy(&EntropyRecord::entropy));
  t.add("Sdot", from_entropy(&EntropyRecord::rate));
  t.add("sigma", from_entropy(&EntropyRecord::production));
  t.add("Phi", from_entropy(&EntropyRecord::flow));
  per_metric("L_", &GeometricSummary::length);
  per_metric("R_", &GeometricSummary::completion);
  per_metric("delta_", &GeometricSummary::delta);
  per_metric("I_", &GeometricSummary::averaged);
  t.add("F_neq", run.free_energy);
  t.add("heat_current", run.heat);
  std::vector<double> lhs(n, kNaN), rhs(n, kNaN);
  if (!metrics.empty()) {
    const auto& b = run.bound_series(metrics.front());
    for (std::size_t i = 0; i < b.size(); ++i) lhs[i + 1] = b[i].lhs, rhs[i + 1] = b[i].rhs;
  }
  t.add("bound_lhs", std::move(lhs));
  t.add("bound_rhs", std::move(rhs));
  return t;
}

/// Density-matrix entries (upper triangle) and instantaneous spectrum.
inline Table trajectory_table(const Trajectory& tr) {
  Table t;
  t.add("t", tr.t);
  const Index d = tr.states.empty() ? 0 : tr.states.front().dim();
  for (Index i = 0; i < d; ++i)
    for (Index j = i; j < d; ++j) {
      std::vector<double> re, im;
      for (const auto& s : tr.states) re.push_back(s.matrix()(i, j).real()), im.push_back(s.matrix()(i, j).imag());
      const std::string ij = std::to_string(i) + std::to_string(j);
      t.add("re_rho_" + ij, std::move(re));
      if (i != j) t.add("im_rho_" + ij, std::move(im));
    }
  for (Index x = 0; x < d; ++x) {
    std::vector<double> p;
    for (const auto& s : tr.states) p.push_back(s.probabilities()[x]);
    t.add("p_" + std::to_string(x), std::move(p));
  }
  return t;
}

namespace detail {
inline const char* short_label(const mpemba::StateRun& r) { return r.label == "reference" ? "ref" : "rot"; }
}  // namespace detail

/// Fisher information and its incoherent/coherent split for both states.
inline Table fig1_table(const mpemba::ExperimentBundle& b) {
  Table t;
  t.add("t", b.reference.trajectory.t);
  for (const auto* r : {&b.reference, &b.rotated}) {
    const std::string s = detail::short_label(*r);
    for (MetricKind k : b.metrics) t.add("F_Q_" + metric_tag(k) + "_" + s, r->summary(k).fisher);
    t.add("F_IC_" + s, r->sld.incoherent);
    for (MetricKind k : b.metrics) t.add("F_C_" + metric_tag(k) + "_" + s, r->summary(k).coherent);
  }
  return t;
}

/// Statistical length, completion and the SLD geodesic from the initial state.
inline Table fig2_table(const mpemba::ExperimentBundle& b) {
  Table t;
  t.add("t", b.reference.trajectory.t);
  for (const auto* r : {&b.reference, &b.rotated}) {
    const std::string s = detail::short_label(*r);
    for (MetricKind k : b.metrics) t.add("L_" + metric_tag(k) + "_" + s, r->summary(k).length);
    for (MetricKind k : b.metrics) t.add("R_" + metric_tag(k) + "_" + s, r->summary(k).completion);
    t.add("Lgeo_SLD_" + s, r->geodesic_from_start);
  }
  return t;
}

/// Observable speed bound for O = H.
inline Table fig3_table(const mpemba::ExperimentBundle& b) {
  Table t;
  t.add("t", b.reference.trajectory.t);
  for (const auto* r : {&b.reference, &b.rotated}) {
    const std::string s = detail::short_label(*r);
    t.add("speed_lhs_" + s, r->speed.lhs);
    t.add("speed_rhs_" + s, r->speed.rhs);
  }
  return t;
}

/// Geometric uncertainty, time-averaged Fisher information and their ratio.
inline Table fig4_table(const mpemba::ExperimentBundle& b) {
  Table t;
  t.add("t", b.reference.trajectory.t);
  for (const auto* r : {&b.reference, &b.rotated}) {
    const std::string s = detail::short_label(*r);
    for (MetricKind k : b.metrics) {
      const auto& g = r->summary(k);
      std::vector<double> ratio(g.size(), kNaN);
      for (std::size_t i = 1; i < g.size(); ++i)
        if (g.delta[i] > 0.0) ratio[i] = g.averaged[i] / g.delta[i];
      t.add("delta_" + metric_tag(k) + "_" + s, g.delta);
      t.add("I_" + metric_tag(k) + "_" + s, g.averaged);
      t.add("I_over_delta_" + metric_tag(k) + "_" + s, std::move(ratio));
    }
  }
  return t;
}

inline Table fneq_table(const mpemba::ExperimentBundle& b) {
  Table t;
  t.add("t", b.reference.trajectory.t);
  t.add("F_neq_ref", b.reference.free_energy);
  t.add("F_neq_rot", b.rotated.free_energy);
  return t;
}

namespace detail {
inline std::string num(double v) {
  std::string s;
  append_number(s, v);
  return s;
}
}  // namespace detail

/// Human-readable digest: crossing time, asymptotic lengths, bound margins.
inline std::string mpemba_summary(const mpemba::ExperimentBundle& b) {
  using detail::num;
  const auto& s = b.scenario;
  std::string out;
  out += "scenario: epsilon=" + num(s.epsilon) + " temperature=" + num(s.temperature) + " gamma=" + num(s.gamma) +
         " horizon=" + num(s.horizon) + " dt=" + num(s.dt) + "\n";
  out += "rates: gamma_plus=" + num(b.gamma_plus) + " gamma_minus=" + num(b.gamma_minus) +
         " Gamma=" + num(b.gamma_plus + b.gamma_minus) + "\n";
  out += "free_energy_eq: " + num(b.free_energy_eq) + "\n";
  if (b.crossing.t_m)
    out += "crossing: t_M=" + num(*b.crossing.t_m) + "\n";
  else
    out += "crossing: none\n";
  for (const auto* r : {&b.reference, &b.rotated}) {
    out += r->label + ":\n";
    out += "  F_neq(0)=" + num(r->free_energy.front()) + "\n";
    for (MetricKind k : b.metrics)
      out += "  L_inf_" + metric_tag(k) + "=" + num(r->length_infinity(k)) +
             " (last-tenth increment " + num(r->length_convergence(k)) + ")\n";
    out += "  L_geo_SLD_to_thermal=" + num(r->geodesic_to_thermal_sld) + "\n";
    out += "  L_geo_WY_to_thermal=" + num(r->geodesic_to_thermal_wy) + "\n";
    out += "  decay_rate_F_IC=" + num(r->incoherent_decay.rate) + " decay_rate_F_C=" + num(r->coherent_decay.rate) +
           "\n";
    out += "  identity_gap_entropic=" + num(r->identities.max_entropic_gap) +
           " identity_gap_current=" + num(r->identities.max_current_gap) + "\n";
    for (std::size_t m = 0; m < b.metrics.size(); ++m) {
      double worst = std::numeric_limits<double>::infinity(), worst_rel = worst;
      for (const auto& br : r->bounds[m]) worst = std::min(worst, br.margin), worst_rel = std::min(worst_rel, br.relative_margin());
      const auto& last = r->bounds[m].back();
      out += "  bound_" + metric_tag(b.metrics[m]) + ": min_margin=" + num(worst) + " min_relative_margin=" +
             num(worst_rel) + " margin_at_tau=" + num(last.margin) + "\n";
    }
  }
  return out;
}

}  // namespace qig::io
