#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "qig/classical_markov.hpp"
#include "qig/info_geometry.hpp"
#include "qig/mpemba.hpp"
#include "qig/random.hpp"

using namespace qig;

namespace {
const mpemba::MpembaSystem& qubit() {
  static const mpemba::MpembaSystem sys = mpemba::build_scenario({});
  return sys;
}
}  // namespace

TEST(MetricF, Examples) {
  for (MetricKind k : kAllMetrics) EXPECT_DOUBLE_EQ(metric_f(k, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(metric_f(MetricKind::SLD, 4.0), 2.5);
  EXPECT_DOUBLE_EQ(metric_f(MetricKind::WY, 4.0), 2.25);
  EXPECT_DOUBLE_EQ(metric_f(MetricKind::HM, 4.0), 1.6);
  EXPECT_EQ(metric_f(MetricKind::HM, 0.0), 0.0);
  EXPECT_THROW(metric_f(MetricKind::SLD, -1.0), DomainError);
}

TEST(MetricF, SelfInversiveAndOrdered) {
  for (double x : {1e-6, 0.01, 0.3, 1.0, 2.0, 7.5, 1e4}) {
    for (MetricKind k : kAllMetrics) EXPECT_NEAR(metric_f(k, x), x * metric_f(k, 1.0 / x), 1e-12 * std::max(1.0, x));
    EXPECT_GE(metric_f(MetricKind::SLD, x), metric_f(MetricKind::WY, x));
    EXPECT_GE(metric_f(MetricKind::WY, x), metric_f(MetricKind::HM, x));
  }
}

TEST(MetricDenominator, MatchesDefinition) {
  for (MetricKind k : kAllMetrics)
    for (double px : {0.1, 0.45, 0.9})
      for (double py : {0.05, 0.3, 0.7}) EXPECT_NEAR(metric_denominator(k, px, py), px * metric_f(k, py / px), 1e-15);
  EXPECT_EQ(metric_denominator(MetricKind::HM, 0.0, 0.0), 0.0);
}

TEST(ParseMetric, Names) {
  EXPECT_EQ(parse_metric("sld"), MetricKind::SLD);
  EXPECT_EQ(parse_metric("WY"), MetricKind::WY);
  EXPECT_EQ(parse_metric("hm"), MetricKind::HM);
  EXPECT_THROW(parse_metric("kmb"), ValidationError);
}

TEST(Qfi, ZeroDerivative) {
  const auto q = qfi(qubit().reference, ComplexMatrix::Zero(2, 2), MetricKind::SLD);
  EXPECT_EQ(q.total, 0.0);
  EXPECT_EQ(q.incoherent, 0.0);
  EXPECT_EQ(q.coherent, 0.0);
}

TEST(Qfi, DiagonalReducesToClassical) {
  ComplexMatrix rho = ComplexMatrix::Zero(3, 3), d = ComplexMatrix::Zero(3, 3);
  rho.diagonal() << 0.5, 0.3, 0.2;
  d.diagonal() << 0.1, -0.25, 0.15;
  RealVector p(3), pd(3);
  p << 0.5, 0.3, 0.2;
  pd << 0.1, -0.25, 0.15;
  for (MetricKind k : kAllMetrics) {
    const auto q = qfi(DensityMatrix(rho), d, k);
    EXPECT_EQ(q.coherent, 0.0);
    EXPECT_NEAR(q.incoherent, classical::classical_fisher(p, pd), 1e-15);
  }
}

TEST(Qfi, OrderingAtMpembaStart) {
  const ComplexMatrix d = lindblad_rhs(qubit().lindbladian, qubit().reference);
  const auto s = qfi(qubit().reference, d, MetricKind::SLD);
  const auto w = qfi(qubit().reference, d, MetricKind::WY);
  const auto h = qfi(qubit().reference, d, MetricKind::HM);
  EXPECT_LT(s.total, w.total);
  EXPECT_LT(w.total, h.total);
  EXPECT_DOUBLE_EQ(s.incoherent, h.incoherent);
  EXPECT_GT(s.coherent, 0.0);
}

TEST(Qfi, PureStateSld) {
  // pure |psi(t)> = cos t |0> + sin t |1>: F_SLD = 4 (Fubini-Study); with
  // p_y = 0 the WY denominator is p_x / 4 against p_x / 2, doubling F
  ComplexMatrix rho(2, 2), d(2, 2);
  const double t = 0.3, c = std::cos(t), s = std::sin(t);
  rho << c * c, c * s, c * s, s * s;
  d << -2 * c * s, c * c - s * s, c * c - s * s, 2 * c * s;
  EXPECT_NEAR(qfi(DensityMatrix(rho), d, MetricKind::SLD).total, 4.0, 1e-9);
  EXPECT_NEAR(qfi(DensityMatrix(rho), d, MetricKind::WY).total, 8.0, 1e-9);
  // HM coherent denominator vanishes on a pure state
  EXPECT_THROW(qfi(DensityMatrix(rho), d, MetricKind::HM), DivergentQfiError);
}

TEST(Qfi, InputValidation) {
  ComplexMatrix bad = ComplexMatrix::Zero(2, 2);
  bad(0, 1) = 1.0;
  EXPECT_THROW(qfi(qubit().reference, bad, MetricKind::SLD), ValidationError);
  EXPECT_THROW(qfi(qubit().reference, ComplexMatrix::Identity(2, 2), MetricKind::SLD), ValidationError);
}

TEST(Qfi, RandomSplitAndOrdering) {
  random::Engine g(41);
  for (int k = 0; k < 100; ++k) {
    const Index n = 2 + k % 4;
    const auto rho = random::full_rank_state(g, n);
    const ComplexMatrix d = random::tangent(g, n);
    const auto s = qfi(rho, d, MetricKind::SLD), w = qfi(rho, d, MetricKind::WY), h = qfi(rho, d, MetricKind::HM);
    EXPECT_LE(s.total, w.total * (1 + 1e-12));
    EXPECT_LE(w.total, h.total * (1 + 1e-12));
    EXPECT_NEAR(s.total, s.incoherent + s.coherent, 1e-9 * s.total);
    EXPECT_DOUBLE_EQ(s.incoherent, w.incoherent);
    EXPECT_GE(s.coherent, 0.0);
  }
}

TEST(Qfi, SldMatchesFidelityExpansion) {
  // F_SLD = 8 (1 - sqrt F(rho, rho + h d)) / h^2 + O(h)
  random::Engine g(43);
  const auto rho = random::full_rank_state(g, 3, 0.05);
  const ComplexMatrix d = 0.1 * random::tangent(g, 3);
  const double h = 1e-4;
  const DensityMatrix moved(hermitize(rho.matrix() + h * d));
  const double approx = 8.0 * (1.0 - std::sqrt(uhlmann_fidelity(rho, moved))) / (h * h);
  EXPECT_NEAR(approx, qfi(rho, d, MetricKind::SLD).total, 2e-3 * qfi(rho, d, MetricKind::SLD).total);
}

TEST(StatisticalLength, Examples) {
  const auto t = TimeGrid{2.0, 0.01}.points();
  const std::vector<double> zero(t.size(), 0.0), c(t.size(), 9.0);
  for (double l : statistical_length(t, zero)) EXPECT_EQ(l, 0.0);
  EXPECT_NEAR(statistical_length(t, c).back(), 3.0, 1e-12);  // sqrt(9) * 2 / 2
}

TEST(StatisticalDivergence, Examples) {
  const auto t = TimeGrid{2.0, 0.01}.points();
  const std::vector<double> zero(t.size(), 0.0), c(t.size(), 9.0);
  EXPECT_EQ(statistical_divergence(t, zero, 2.0), 0.0);
  const double l = statistical_length(t, c).back();
  EXPECT_NEAR(statistical_divergence(t, c, 2.0), l * l, 1e-12);
  EXPECT_THROW(statistical_divergence(t, c, 0.005), DomainError);
}

TEST(RatioOfCompletion, Endpoints) {
  const std::vector<double> l{0.0, 0.3, 0.7, 1.2};
  const auto r = ratio_of_completion(l, 3);
  EXPECT_EQ(r.front(), 0.0);
  EXPECT_EQ(r.back(), 1.0);
  EXPECT_TRUE(std::isnan(ratio_of_completion(std::vector<double>{0, 0, 0}, 2)[1]));
}

TEST(GeometricUncertainty, Examples) {
  const auto t = TimeGrid{2.0, 0.01}.points();
  const std::vector<double> c(t.size(), 4.0), zero(t.size(), 0.0);
  const auto u = geometric_uncertainty(t, c, 2.0);
  ASSERT_TRUE(u.delta);
  EXPECT_NEAR(*u.delta, 0.0, 1e-12);
  EXPECT_NEAR(u.time_averaged_fisher, 4.0, 1e-12);
  const auto z = geometric_uncertainty(t, zero, 2.0);
  EXPECT_EQ(*z.delta, 0.0);
  EXPECT_EQ(z.time_averaged_fisher, 0.0);
  EXPECT_FALSE(z.ratio());
  EXPECT_FALSE(geometric_uncertainty(t, c, 0.0).delta);
  // non-constant speed: delta > 0 and I / delta >= 1
  std::vector<double> f;
  for (double s : t) f.push_back(std::exp(-s));
  const auto v = geometric_uncertainty(t, f, 2.0);
  EXPECT_GT(*v.delta, 0.0);
  EXPECT_GE(*v.ratio(), 1.0);
}

TEST(GeodesicLength, Examples) {
  ComplexMatrix e = ComplexMatrix::Zero(2, 2), gnd = ComplexMatrix::Zero(2, 2);
  e(0, 0) = 1;
  gnd(1, 1) = 1;
  for (MetricKind k : {MetricKind::SLD, MetricKind::WY}) {
    EXPECT_NEAR(geodesic_length(qubit().reference, qubit().reference, k), 0.0, 1e-6);
    EXPECT_NEAR(geodesic_length(DensityMatrix(e), DensityMatrix(gnd), k), std::numbers::pi / 2, 1e-12);
  }
  EXPECT_THROW(geodesic_length(qubit().reference, qubit().thermal, MetricKind::HM), UnsupportedError);
  EXPECT_LT(geodesic_length(qubit().reference, qubit().thermal, MetricKind::SLD),
            geodesic_length(qubit().rotated, qubit().thermal, MetricKind::SLD));
}

TEST(GeometricSummary, MpembaTrajectoryInvariants) {
  const auto tr = integrate(qubit().lindbladian, qubit().reference, TimeGrid{4.0, 1e-3});
  std::vector<GeometricSummary> all;
  for (MetricKind k : kAllMetrics) all.push_back(geometric_summary(tr, k));
  for (std::size_t i = 0; i < tr.size(); ++i) {
    EXPECT_LE(all[0].fisher[i], all[1].fisher[i] + 1e-10);
    EXPECT_LE(all[1].fisher[i], all[2].fisher[i] + 1e-10);
    for (const auto& g : all) {
      EXPECT_NEAR(g.fisher[i], g.incoherent[i] + g.coherent[i], 1e-9 * g.fisher[i]);
      EXPECT_GE(g.coherent[i], 0.0);
      if (i > 0) {
        EXPECT_GE(g.length[i], g.length[i - 1]);
        EXPECT_GE(g.divergence[i] - g.length[i] * g.length[i], -1e-12);
      }
    }
  }
  const auto& sld = all[0];
  EXPECT_EQ(sld.completion.back(), 1.0);
  EXPECT_TRUE(std::isnan(sld.delta[0]));
  // J > L^2 strictly: the speed is not constant
  EXPECT_GT(sld.divergence.back(), sld.length.back() * sld.length.back());
  // path length dominates the geodesic
  EXPECT_GE(sld.length.back() + 1e-9, geodesic_length(tr.states.front(), tr.states.back(), MetricKind::SLD));
  EXPECT_GE(all[1].length.back() + 1e-9, geodesic_length(tr.states.front(), tr.states.back(), MetricKind::WY));
}

TEST(GeometricSummary, UnitaryHasNoIncoherentPart) {
  const auto l = Lindbladian::unitary(Hamiltonian(qubit().hamiltonian));
  const auto tr = integrate(l, qubit().reference, TimeGrid{2.0, 1e-3});
  const auto g = geometric_summary(tr, MetricKind::SLD);
  for (std::size_t i = 0; i < tr.size(); ++i) {
    EXPECT_NEAR(g.incoherent[i], 0.0, 1e-18);
    EXPECT_NEAR(g.fisher[i], g.fisher[0], 1e-9 * g.fisher[0]);
  }
  // constant speed: L grows linearly
  EXPECT_NEAR(g.length.back(), 0.5 * std::sqrt(g.fisher[0]) * 2.0, 1e-9);
}
