// Acceptance run: one PASS/FAIL line per criterion at the default Mpemba
// parameters. Exit status is non-zero if any criterion fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "qig/analysis.hpp"
#include "qig/classical_markov.hpp"
#include "qig/mpemba.hpp"
#include "qig/random.hpp"

using namespace qig;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int failures = 0;

void report(int id, const char* title, bool pass, const std::string& detail) {
  std::printf("%s %2d %s: %s\n", pass ? "PASS" : "FAIL", id, title, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}
std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}
std::string fmt(const char* f, double a, double b, double c) {
  char buf[200];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

const char* yes(bool b) { return b ? "yes" : "no"; }

// 1. Three expressions for the classical Fisher information.
void classical_oracle() {
  random::Engine g(20240601);
  double worst = 0.0, flow = 0.0;
  const int instances = 120;
  for (int k = 0; k < instances; ++k) {
    const Index n = 3 + static_cast<Index>(k % 3);
    const auto w = random::rate_matrix(g, n);
    const auto traj = classical::integrate_classical(w, random::probability(g, n), TimeGrid{0.2, 1e-4}.points());
    const auto r = classical::fisher_identity_check(w, traj);
    worst = std::max(worst, r.max_relative_deviation);
    for (std::size_t i = 1; i + 1 < r.size(); ++i) flow = std::max(flow, std::abs(r.flow_rate[i]));
  }
  report(1, "classical oracle equivalence", worst <= 1e-5 && flow <= 1e-12,
         fmt("%.0f chains, max relative deviation %.3g, max |<<phi'>>| %.3g", instances, worst, flow));
}

// 2. Rotated trajectory against the induced two-state chain.
void quantum_classical(const mpemba::ExperimentBundle& b) {
  RealMatrix w = RealMatrix::Zero(2, 2);
  w(0, 1) = b.gamma_plus;
  w(1, 0) = b.gamma_minus;
  const auto chain = classical::RateMatrix::from_rates(w);
  const auto& tr = b.rotated.trajectory;
  RealVector p0(2);
  p0 << tr.states[0].matrix()(0, 0).real(), tr.states[0].matrix()(1, 1).real();
  const auto ct = classical::integrate_classical(chain, classical::ProbVector(p0), tr.t);
  std::vector<double> fc;
  double peak = 0.0;
  for (std::size_t i = 0; i < ct.t.size(); ++i) {
    fc.push_back(classical::classical_fisher(ct.p[i], ct.pdot[i]));
    peak = std::max(peak, fc.back());
  }
  double worst = 0.0, coherent = 0.0;
  for (MetricKind k : b.metrics) {
    const auto& g = b.rotated.summary(k);
    for (std::size_t i = 0; i < g.size(); ++i) {
      worst = std::max(worst, relative_gap(g.fisher[i], fc[i], 1e-8 * peak));
      coherent = std::max(coherent, g.coherent[i]);
    }
  }
  report(2, "quantum-classical reduction", worst <= 1e-8 && coherent <= 1e-12,
         fmt("max relative |F_Q - F_classical| %.3g, max F_C %.3g", worst, coherent));
}

// 3. F_SLD <= F_WY <= F_HM along the reference trajectory.
void qfi_ordering(const mpemba::ExperimentBundle& b) {
  const auto& s = b.reference.summary(MetricKind::SLD).fisher;
  const auto& w = b.reference.summary(MetricKind::WY).fisher;
  const auto& h = b.reference.summary(MetricKind::HM).fisher;
  double worst = -kInf;
  for (std::size_t i = 0; i < s.size(); ++i) worst = std::max({worst, s[i] - w[i], w[i] - h[i]});
  report(3, "QFI ordering", worst <= 1e-10, fmt("max(F_SLD - F_WY, F_WY - F_HM) = %.3g", worst));
}

// 4. F_IC = B - (sigma' - Phi') = -<<f'>> + <<phi'>>, and <<phi'>> >= <<f'>>.
void first_result(const mpemba::ExperimentBundle& b) {
  double ent = 0.0, cur = 0.0, excess = kInf;
  auto take = [&](const IdentityReport& id) {
    ent = std::max(ent, id.max_entropic_gap);
    cur = std::max(cur, id.max_current_gap);
    excess = std::min(excess, id.min_flow_excess);
  };
  take(b.reference.identities);
  take(b.rotated.identities);
  random::Engine g(77);
  for (int k = 0; k < 5; ++k) {
    const auto inst = random::gksl_system(g, 3);
    take(qfi_ic_identities(inst.lindbladian, integrate(inst.lindbladian, inst.initial, TimeGrid{3.0, 1e-3})));
  }
  report(4, "first central result", ent <= 1e-4 && cur <= 1e-4 && excess >= -1e-9,
         fmt("max relative gap entropic %.3g, current %.3g; min relative <<phi'>> - <<f'>> %.3g", ent, cur, excess));
}

// 5. Entropy-rate bound, its algebraic identity and the metric ordering.
void second_result(const mpemba::ExperimentBundle& b) {
  double margin = kInf, idres = 0.0, order = -kInf;
  for (const auto* r : {&b.reference, &b.rotated}) {
    for (const auto& series : r->bounds)
      for (const auto& br : series) {
        margin = std::min(margin, br.relative_margin());
        idres = std::max(idres, br.identity_residual);
      }
    const auto& s = r->bound_series(MetricKind::SLD);
    const auto& w = r->bound_series(MetricKind::WY);
    const auto& h = r->bound_series(MetricKind::HM);
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double scale = std::max({std::abs(s[i].rhs), std::abs(h[i].rhs), 1e-12});
      order = std::max({order, (s[i].rhs - w[i].rhs) / scale, (w[i].rhs - h[i].rhs) / scale});
    }
  }
  report(5, "second key result", margin >= -1e-6 && idres <= 1e-8 && order <= 1e-12,
         fmt("min relative margin %.3g, max identity residual %.3g, max relative rhs disorder %.3g", margin, idres,
             order));
}

// 6. I / delta >= 1 everywhere and <= 1.05 at T = 10 / gamma.
void uncertainty(const mpemba::ExperimentBundle& b) {
  double low = kInf;
  std::string at10;
  bool saturated = true;
  const double t10 = 10.0 / b.scenario.gamma;
  for (const auto* r : {&b.reference, &b.rotated}) {
    for (MetricKind k : b.metrics) {
      const auto& g = r->summary(k);
      for (std::size_t i = 1; i < g.size(); ++i)
        if (g.delta[i] > 1e-12) low = std::min(low, g.averaged[i] / g.delta[i]);
      const std::size_t i10 = detail::grid_index(g.t, t10);
      const double ratio = g.averaged[i10] / g.delta[i10];
      saturated = saturated && ratio <= 1.05;
      at10 += " " + r->label.substr(0, 3) + "/" + std::string(to_string(k)) + "=" + fmt("%.4f", ratio);
    }
  }
  report(6, "uncertainty relation", low >= 1.0 - 1e-9 && saturated,
         fmt("min I/delta %.6f; I/delta at T=10:", low) + at10);
}

// 7. Ordinal claims of the Mpemba experiment.
void mpemba_claims(const mpemba::ExperimentBundle& b) {
  const bool crossing = b.crossing.t_m.has_value() && b.crossing.persistent;
  const bool shorter = b.rotated.length_infinity(MetricKind::SLD) < b.reference.length_infinity(MetricKind::SLD);
  const bool geodesic = b.reference.geodesic_to_thermal_sld < b.rotated.geodesic_to_thermal_sld;
  const auto& rr = b.reference.summary(MetricKind::SLD).completion;
  const auto& rp = b.rotated.summary(MetricKind::SLD).completion;
  bool faster = true;
  for (std::size_t i = 1; i + 1 < rr.size(); ++i) faster = faster && rp[i] > rr[i];
  const auto& ds = b.reference.summary(MetricKind::SLD).delta;
  const auto& dw = b.reference.summary(MetricKind::WY).delta;
  const auto& dh = b.reference.summary(MetricKind::HM).delta;
  bool smallest = true;
  for (std::size_t i = 1; i < ds.size(); ++i) smallest = smallest && ds[i] <= dw[i] && ds[i] <= dh[i];
  char buf[400];
  std::snprintf(buf, sizeof buf,
                "crossing %s (t_M=%.5f), L_inf rot<ref %s (%.5f < %.5f), L_geo ref<rot %s (%.5f < %.5f), "
                "R'>R %s, delta_SLD smallest %s",
                yes(crossing), b.crossing.t_m.value_or(NAN), yes(shorter),
                b.rotated.length_infinity(MetricKind::SLD), b.reference.length_infinity(MetricKind::SLD),
                yes(geodesic), b.reference.geodesic_to_thermal_sld, b.rotated.geodesic_to_thermal_sld, yes(faster),
                yes(smallest));
  report(7, "Mpemba reproduction", crossing && shorter && geodesic && faster && smallest, buf);
}

// 8. Tail decay of F_IC twice as fast as F_C.
void decay_rates(const mpemba::ExperimentBundle& b) {
  const double ic = b.reference.incoherent_decay.rate, c = b.reference.coherent_decay.rate;
  const double ratio = ic / c;
  report(8, "decay-rate separation", std::abs(ratio - 2.0) <= 0.1,
         fmt("rate(F_IC) %.5f, rate(F_C) %.5f, ratio %.5f", ic, c, ratio) +
             fmt(" (Gamma = %.5f)", b.gamma_plus + b.gamma_minus));
}

// 9. Observable speed bound for O = H.
void speed_bound(const mpemba::ExperimentBundle& b) {
  double excess = -kInf, gap = 0.0;
  for (const auto* r : {&b.reference, &b.rotated})
    for (std::size_t i = 0; i < r->speed.t.size(); ++i) excess = std::max(excess, r->speed.lhs[i] - r->speed.rhs[i]);
  const auto& s = b.rotated.speed;
  for (std::size_t i = 1; i < s.t.size(); ++i) gap = std::max(gap, (s.rhs[i] - s.lhs[i]) / s.rhs[i]);
  report(9, "observable speed bound", excess <= 1e-9 && gap <= 1e-6,
         fmt("max lhs - rhs %.3g, max relative gap on rotated %.3g", excess, gap));
}

// 10. The rotated state moves along an SLD geodesic.
void geodesic_path(const mpemba::ExperimentBundle& b) {
  const auto& l = b.rotated.summary(MetricKind::SLD).length;
  const auto& geo = b.rotated.geodesic_from_start;
  double worst = 0.0;
  for (std::size_t i = 0; i < l.size(); ++i) worst = std::max(worst, std::abs(l[i] - geo[i]));
  report(10, "geodesic path property", worst <= 1e-4, fmt("max |L_SLD - L_geo| %.3g", worst));
}

}  // namespace

int main() {
  try {
    classical_oracle();
    const auto bundle = mpemba::run_experiment({}, {MetricKind::SLD, MetricKind::WY, MetricKind::HM});
    quantum_classical(bundle);
    qfi_ordering(bundle);
    first_result(bundle);
    second_result(bundle);
    uncertainty(bundle);
    mpemba_claims(bundle);
    decay_rates(bundle);
    speed_bound(bundle);
    geodesic_path(bundle);
  } catch (const std::exception& e) {
    std::printf("FAIL acceptance aborted: %s\n", e.what());
    return 1;
  }
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
