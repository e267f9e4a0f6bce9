#pragma once

// Randomized property suite behind `qig check`. Each property prints one
// line; the run passes iff every property does. Output depends only on the
// seed.

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/QR>

#include "qig/analysis.hpp"
#include "qig/classical_markov.hpp"
#include "qig/info_geometry.hpp"
#include "qig/io/csv.hpp"
#include "qig/random.hpp"

namespace qig::check {

struct Outcome {
  std::string name;
  bool pass = false;
  std::string detail;
};

namespace detail {
inline std::string num(double v) {
  std::string s;
  io::append_number(s, v);
  return s;
}

/// Random channel from a Haar-ish isometry, returned as Kraus operators.
inline std::vector<ComplexMatrix> random_channel(random::Engine& g, Index n, Index kraus) {
  const ComplexMatrix a = random::ginibre(g, n * kraus);
  const ComplexMatrix q = Eigen::HouseholderQR<ComplexMatrix>(a).householderQ();
  std::vector<ComplexMatrix> k;
  for (Index i = 0; i < kraus; ++i) k.push_back(q.block(i * n, 0, n, n));
  return k;
}

inline ComplexMatrix apply(const std::vector<ComplexMatrix>& kraus, const ComplexMatrix& m) {
  ComplexMatrix out = ComplexMatrix::Zero(m.rows(), m.cols());
  for (const auto& k : kraus) out += k * m * k.adjoint();
  return out;
}
}  // namespace detail

/// Spectral, surprisal and force/flow forms of the classical Fisher
/// information on random chains.
inline Outcome classical_identities(random::Engine& g, int instances = 100) {
  double worst = 0.0;
  for (int k = 0; k < instances; ++k) {
    const Index n = 3 + static_cast<Index>(k % 3);
    const auto w = random::rate_matrix(g, n);
    const auto p0 = random::probability(g, n);
    const auto t = TimeGrid{0.2, 1e-4}.points();
    const auto traj = classical::integrate_classical(w, p0, t);
    worst = std::max(worst, classical::fisher_identity_check(w, traj).max_relative_deviation);
  }
  return {"classical-fisher-identities", worst <= 1e-5,
          std::to_string(instances) + " chains, worst relative deviation " + detail::num(worst)};
}

/// F_SLD <= F_WY <= F_HM, metric-independent F_IC, and non-negative F_C.
inline Outcome qfi_ordering(random::Engine& g, int instances = 300) {
  int failures = 0;
  double worst_ic = 0.0;
  for (int k = 0; k < instances; ++k) {
    const Index n = 2 + static_cast<Index>(k % 3);
    const DensityMatrix rho = random::full_rank_state(g, n, 0.01);
    const ComplexMatrix d = random::tangent(g, n);
    const QfiValue s = qfi(rho, d, MetricKind::SLD), w = qfi(rho, d, MetricKind::WY), h = qfi(rho, d, MetricKind::HM);
    const double slack = 1e-10 * std::max(1.0, h.total);
    if (s.total > w.total + slack || w.total > h.total + slack || s.coherent < -slack) ++failures;
    worst_ic = std::max({worst_ic, relative_gap(s.incoherent, w.incoherent), relative_gap(s.incoherent, h.incoherent)});
  }
  return {"qfi-ordering", failures == 0 && worst_ic <= 1e-12,
          std::to_string(instances) + " states, " + std::to_string(failures) + " ordering violations, F_IC spread " +
              detail::num(worst_ic)};
}

/// Monotonicity of every metric under random CPTP maps.
inline Outcome qfi_contractivity(random::Engine& g, int instances = 150) {
  int failures = 0;
  double worst = -1.0;
  for (int k = 0; k < instances; ++k) {
    const Index n = 2 + static_cast<Index>(k % 2);
    const DensityMatrix rho = random::full_rank_state(g, n, 0.02);
    const ComplexMatrix d = random::tangent(g, n);
    const auto kraus = detail::random_channel(g, n, 2 + static_cast<Index>(k % 3));
    const DensityMatrix out(hermitize(detail::apply(kraus, rho.matrix())));
    const ComplexMatrix dout = hermitize(detail::apply(kraus, d));
    for (MetricKind m : kAllMetrics) {
      const double before = qfi(rho, d, m).total, after = qfi(out, dout, m).total;
      const double excess = (after - before) / std::max(before, 1e-300);
      worst = std::max(worst, excess);
      if (excess > 1e-9) ++failures;
    }
  }
  return {"qfi-contractivity", failures == 0,
          std::to_string(instances) + " channels x 3 metrics, worst relative increase " + detail::num(worst)};
}

/// Identities and bounds along random three-level GKSL trajectories with
/// detailed-balance jump pairs.
inline std::vector<Outcome> gksl_properties(random::Engine& g, int instances = 5) {
  double ent = 0, cur = 0, excess = 1e300, balance = 0, margin = 1e300, idres = 0, order = -1e300, ratio = 1e300, speed = -1e300,
         geo = -1e300;
  for (int k = 0; k < instances; ++k) {
    const auto inst = random::gksl_system(g, 3);
    const RunAnalysis run = analyze(inst.lindbladian, inst.initial, TimeGrid{3.0, 1e-3}, kAllMetrics);
    const auto id = qfi_ic_identities(run.trajectory, run.flows, run.entropy);
    ent = std::max(ent, id.max_entropic_gap);
    cur = std::max(cur, id.max_current_gap);
    excess = std::min(excess, id.min_flow_excess);
    balance = std::max(balance, entropy_balance_residual(run.entropy));
    for (const auto& series : run.bounds)
      for (const auto& b : series) {
        margin = std::min(margin, b.relative_margin());
        idres = std::max(idres, b.identity_residual);
      }
    const auto& bs = run.bounds[0];
    const auto& bw = run.bounds[1];
    const auto& bh = run.bounds[2];
    for (std::size_t i = 0; i < bs.size(); ++i) {
      const double scale = std::max({std::abs(bs[i].rhs), std::abs(bh[i].rhs), 1e-12});
      order = std::max({order, (bs[i].rhs - bw[i].rhs) / scale, (bw[i].rhs - bh[i].rhs) / scale});
    }
    for (const auto& geom : run.geometry)
      for (std::size_t i = 1; i < geom.size(); ++i)
        if (geom.delta[i] > 1e-12) ratio = std::min(ratio, geom.averaged[i] / geom.delta[i]);
    for (std::size_t i = 0; i < run.speed.t.size(); ++i) speed = std::max(speed, run.speed.lhs[i] - run.speed.rhs[i]);
    for (std::size_t i = 0; i < run.trajectory.size(); ++i)
      geo = std::max(geo, geodesic_length(run.trajectory.states[0], run.trajectory.states[i], MetricKind::SLD) -
                              run.sld.length[i]);
  }
  const std::string n = std::to_string(instances) + " systems";
  return {
      {"gksl-fic-identities", ent <= 1e-4 && cur <= 1e-4,
       n + ", entropic gap " + detail::num(ent) + ", current gap " + detail::num(cur)},
      {"gksl-flow-rate-excess", excess >= -1e-9, n + ", min relative <<phi'>> - <<f'>> " + detail::num(excess)},
      {"gksl-entropy-balance", balance <= 1e-9, n + ", max |Sdot - (sigma - Phi)| " + detail::num(balance)},
      {"entropy-rate-bound", margin >= -1e-6, n + ", min relative margin " + detail::num(margin)},
      {"entropy-rate-identity", idres <= 1e-8, n + ", max residual " + detail::num(idres)},
      {"bound-rhs-ordering", order <= 1e-9, n + ", max relative rhs excess " + detail::num(order)},
      {"uncertainty-relation", ratio >= 1.0 - 1e-9, n + ", min I/delta " + detail::num(ratio)},
      {"observable-speed-bound", speed <= 1e-9, n + ", max lhs - rhs " + detail::num(speed)},
      {"geodesic-shortest", geo <= 1e-6, n + ", max L_geo - L " + detail::num(geo)},
  };
}

/// Runs everything; returns true iff all properties pass.
inline bool run_all(std::uint64_t seed, std::ostream& out) {
  random::Engine g(seed);
  std::vector<Outcome> all;
  all.push_back(classical_identities(g));
  all.push_back(qfi_ordering(g));
  all.push_back(qfi_contractivity(g));
  for (auto& o : gksl_properties(g)) all.push_back(std::move(o));
  bool ok = true;
  out << "seed " << seed << "\n";
  for (const auto& o : all) {
    out << (o.pass ? "PASS " : "FAIL ") << o.name << ": " << o.detail << "\n";
    ok = ok && o.pass;
  }
  out << (ok ? "all properties hold" : "some properties failed") << "\n";
  return ok;
}

}  // namespace qig::check
