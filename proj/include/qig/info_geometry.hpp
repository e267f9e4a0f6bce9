#pragma once

// Quantum Fisher information family with respect to time, its incoherent
// and coherent parts, and the path functionals built from it.

#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qig/errors.hpp"
#include "qig/gksl.hpp"
#include "qig/numerics.hpp"
#include "qig/state_algebra.hpp"
#include "qig/types.hpp"

namespace qig {

/// Monotone metric selector: symmetric logarithmic derivative (smallest),
/// Wigner-Yanase, harmonic mean (largest).
enum class MetricKind { SLD, WY, HM };

inline constexpr MetricKind kAllMetrics[] = {MetricKind::SLD, MetricKind::WY, MetricKind::HM};

inline std::string_view to_string(MetricKind k) {
  switch (k) {
    case MetricKind::SLD: return "sld";
    case MetricKind::WY: return "wy";
    case MetricKind::HM: return "hm";
  }
  return "?";
}

inline MetricKind parse_metric(std::string_view s) {
  if (s == "sld" || s == "SLD") return MetricKind::SLD;
  if (s == "wy" || s == "WY") return MetricKind::WY;
  if (s == "hm" || s == "HM") return MetricKind::HM;
  throw ValidationError("unknown metric '" + std::string(s) + "' (expected sld, wy or hm)");
}

/// The operator-monotone function f defining the metric.
inline double metric_f(MetricKind kind, double x) {
  if (!(x >= 0.0)) throw DomainError("metric_f: argument must be non-negative");
  switch (kind) {
    case MetricKind::SLD: return 0.5 * (x + 1.0);
    case MetricKind::WY: {
      const double s = std::sqrt(x) + 1.0;
      return 0.25 * s * s;
    }
    case MetricKind::HM: return 2.0 * x / (x + 1.0);
  }
  return 0.0;
}

/// p_x f(p_y / p_x) written symmetrically so that p_x = 0 needs no division.
inline double metric_denominator(MetricKind kind, double px, double py) {
  switch (kind) {
    case MetricKind::SLD: return 0.5 * (px + py);
    case MetricKind::WY: {
      const double s = std::sqrt(px) + std::sqrt(py);
      return 0.25 * s * s;
    }
    case MetricKind::HM: return px + py > 0.0 ? 2.0 * px * py / (px + py) : 0.0;
  }
  return 0.0;
}

struct QfiValue {
  double total = 0.0;       ///< F_Q
  double incoherent = 0.0;  ///< F_IC, metric independent
  double coherent = 0.0;    ///< F_C
};

/// QFI of the time parameter given the state's eigenbasis and d rho/dt.
/// `eig` should already be adapted to `deriv` in degenerate subspaces.
inline QfiValue qfi(const EigenDecomposition& eig, const ComplexMatrix& deriv, MetricKind kind) {
  if (deriv.rows() != eig.dim() || deriv.cols() != eig.dim()) throw ValidationError("qfi: dimension mismatch");
  const double scale = std::max(1.0, max_abs(deriv));
  if (hermiticity_error(deriv) > tol::hermitian * scale) throw ValidationError("qfi: derivative is not Hermitian");
  if (std::abs(deriv.trace()) > 1e-10 * scale) throw ValidationError("qfi: derivative is not traceless");

  const ComplexMatrix d = eig.in_basis(deriv);
  QfiValue out;
  const Index n = eig.dim();
  for (Index x = 0; x < n; ++x) {
    const double px = eig.values[x] > tol::eps_floor ? eig.values[x] : 0.0;
    if (px > 0.0) out.incoherent += std::norm(d(x, x)) / px;
    for (Index y = 0; y < n; ++y) {
      if (x == y) continue;
      const double py = eig.values[y] > tol::eps_floor ? eig.values[y] : 0.0;
      const double num = std::norm(d(x, y));
      const double den = metric_denominator(kind, px, py);
      if (den < tol::eps_floor) {
        if (num > tol::eps_floor * 1e-6)
          throw DivergentQfiError("qfi: coherent term diverges (denominator " + std::to_string(den) + ")");
        continue;
      }
      out.coherent += num / den;
    }
  }
  out.total = out.incoherent + out.coherent;
  return out;
}

inline QfiValue qfi(const DensityMatrix& state, const ComplexMatrix& deriv, MetricKind kind) {
  return qfi(adapt_to_derivative(state.eig(), deriv), deriv, kind);
}

/// L(t) = 1/2 int_0^t sqrt(F) ds on the grid (trapezoid).
inline std::vector<double> statistical_length(std::span<const double> t, std::span<const double> fisher) {
  std::vector<double> speed(fisher.size());
  for (std::size_t i = 0; i < fisher.size(); ++i) speed[i] = 0.5 * std::sqrt(std::max(0.0, fisher[i]));
  return cumulative_trapezoid(t, speed);
}

namespace detail {
inline std::size_t grid_index(std::span<const double> t, double when) {
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double h = i + 1 < t.size() ? t[i + 1] - t[i] : (i > 0 ? t[i] - t[i - 1] : 1.0);
    if (std::abs(t[i] - when) <= 1e-9 * h) return i;
  }
  throw DomainError("time " + std::to_string(when) + " is not a grid point");
}
}  // namespace detail

/// J(T) = (T/4) int_0^T F dt for a grid time T.
inline double statistical_divergence(std::span<const double> t, std::span<const double> fisher, double horizon) {
  const std::size_t k = detail::grid_index(t, horizon);
  return 0.25 * t[k] * trapezoid(t.first(k + 1), fisher.first(k + 1));
}

/// R(t) = L(t) / L(tau) with tau = t[tau_index]. NaN when L(tau) = 0.
inline std::vector<double> ratio_of_completion(std::span<const double> length, std::size_t tau_index) {
  std::vector<double> r(length.size(), std::numeric_limits<double>::quiet_NaN());
  const double total = length[tau_index];
  if (total > 0.0)
    for (std::size_t i = 0; i < length.size(); ++i) r[i] = length[i] / total;
  return r;
}

struct Uncertainty {
  std::optional<double> delta;  ///< 4 (J - L^2) / T^2; absent for T below the first step
  double time_averaged_fisher;  ///< I = (1/T) int F dt (0 at T = 0)
  /// I / delta, absent when delta is undefined or <= 1e-12.
  std::optional<double> ratio() const {
    if (!delta || *delta <= 1e-12) return std::nullopt;
    return time_averaged_fisher / *delta;
  }
};

/// Geometric uncertainty and time-averaged Fisher information over [0, T].
inline Uncertainty geometric_uncertainty(std::span<const double> t, std::span<const double> fisher, double horizon) {
  const std::size_t k = detail::grid_index(t, horizon);
  if (k == 0) return {std::nullopt, 0.0};
  const double big_t = t[k] - t[0];
  const auto tt = t.first(k + 1);
  const auto ff = fisher.first(k + 1);
  const double length = statistical_length(tt, ff).back();
  const double integral = trapezoid(tt, ff);
  const double j = 0.25 * big_t * integral;
  return {4.0 * (j - length * length) / (big_t * big_t), integral / big_t};
}

/// Closed-form geodesic lengths: arccos sqrt(F) for SLD, arccos A for WY.
inline double geodesic_length(const DensityMatrix& rho1, const DensityMatrix& rho2, MetricKind kind) {
  switch (kind) {
    case MetricKind::SLD: return std::acos(std::clamp(std::sqrt(uhlmann_fidelity(rho1, rho2)), 0.0, 1.0));
    case MetricKind::WY: return std::acos(std::clamp(affinity(rho1, rho2), 0.0, 1.0));
    case MetricKind::HM: break;
  }
  throw UnsupportedError("geodesic_length: no closed form for the harmonic-mean metric");
}

/// Per-sample geometric quantities of one trajectory under one metric.
struct GeometricSummary {
  MetricKind kind = MetricKind::SLD;
  std::vector<double> t;
  std::vector<double> fisher;      ///< F_Q
  std::vector<double> incoherent;  ///< F_IC
  std::vector<double> coherent;    ///< F_C
  std::vector<double> length;      ///< L(t)
  std::vector<double> divergence;  ///< J(t) = (t/4) int_0^t F
  std::vector<double> completion;  ///< R_tau(t), tau = last sample
  std::vector<double> delta;       ///< NaN at t = 0
  std::vector<double> averaged;    ///< I(t), 0 at t = 0

  std::size_t size() const { return t.size(); }
};

inline GeometricSummary summarize_fisher(std::span<const double> t, std::vector<double> total,
                                         std::vector<double> incoherent, std::vector<double> coherent,
                                         MetricKind kind) {
  GeometricSummary s;
  s.kind = kind;
  s.t.assign(t.begin(), t.end());
  s.fisher = std::move(total);
  s.incoherent = std::move(incoherent);
  s.coherent = std::move(coherent);
  s.length = statistical_length(t, s.fisher);
  const auto integral = cumulative_trapezoid(t, s.fisher);
  const std::size_t n = t.size();
  s.divergence.resize(n);
  s.delta.assign(n, std::numeric_limits<double>::quiet_NaN());
  s.averaged.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double big_t = t[i] - t[0];
    s.divergence[i] = 0.25 * big_t * integral[i];
    if (i > 0) {
      s.delta[i] = 4.0 * (s.divergence[i] - s.length[i] * s.length[i]) / (big_t * big_t);
      s.averaged[i] = integral[i] / big_t;
    }
  }
  s.completion = n > 0 ? ratio_of_completion(s.length, n - 1) : std::vector<double>{};
  return s;
}

inline GeometricSummary geometric_summary(const Trajectory& traj, MetricKind kind) {
  std::vector<double> total, inc, coh;
  total.reserve(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const QfiValue q = qfi(traj.eigs[i], traj.derivs[i], kind);
    total.push_back(q.total);
    inc.push_back(q.incoherent);
    coh.push_back(q.coherent);
  }
  return summarize_fisher(traj.t, std::move(total), std::move(inc), std::move(coh), kind);
}

}  // namespace qig
