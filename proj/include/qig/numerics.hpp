#pragma once

// Grid utilities shared by the analysis modules: time grids, composite
// trapezoid quadrature and fourth-order finite differences.

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "qig/errors.hpp"

namespace qig {

/// Uniform output grid [0, t_final] with spacing dt.
struct TimeGrid {
  double t_final = 0.0;
  double dt = 1e-3;

  std::size_t steps() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("time grid: dt must be positive");
    if (!(t_final >= 0.0) || !std::isfinite(t_final))
      throw ValidationError("time grid: t_final must be non-negative");
    return static_cast<std::size_t>(std::llround(t_final / dt));
  }

  std::vector<double> points() const {
    const std::size_t n = steps();
    std::vector<double> t(n + 1);
    for (std::size_t i = 0; i <= n; ++i) t[i] = static_cast<double>(i) * dt;
    return t;
  }
};

inline void require_increasing(std::span<const double> t) {
  for (std::size_t i = 1; i < t.size(); ++i)
    if (!(t[i] > t[i - 1])) throw ValidationError("time grid must be strictly increasing");
}

/// Running integral of y over t; out[0] = 0.
inline std::vector<double> cumulative_trapezoid(std::span<const double> t, std::span<const double> y) {
  std::vector<double> out(t.size(), 0.0);
  for (std::size_t i = 1; i < t.size(); ++i)
    out[i] = out[i - 1] + 0.5 * (t[i] - t[i - 1]) * (y[i] + y[i - 1]);
  return out;
}

inline double trapezoid(std::span<const double> t, std::span<const double> y) {
  double acc = 0.0;
  for (std::size_t i = 1; i < t.size(); ++i) acc += 0.5 * (t[i] - t[i - 1]) * (y[i] + y[i - 1]);
  return acc;
}

/// Finite-difference weights for d/dt at one sample.
struct StencilWeights {
  std::size_t first = 0;  ///< index of the first node
  std::size_t count = 0;  ///< number of nodes (at most 5)
  double w[5] = {};
};

/// Fornberg weights for the first derivative at `x0` from the given nodes.
inline void fornberg_first_derivative(double x0, std::span<const double> nodes, double* out) {
  const std::size_t n = nodes.size();
  double c[5][2] = {};  // c[node][derivative order]
  double c1 = 1.0, c4 = nodes[0] - x0;
  c[0][0] = 1.0;
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t mn = std::min<std::size_t>(i, 1);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = nodes[i] - x0;
    for (std::size_t j = 0; j < i; ++j) {
      const double c3 = nodes[i] - nodes[j];
      c2 *= c3;
      if (j == i - 1) {
        for (std::size_t k = mn; k >= 1; --k) c[i][k] = c1 * (static_cast<double>(k) * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (std::size_t k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - static_cast<double>(k) * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  for (std::size_t i = 0; i < n; ++i) out[i] = c[i][1];
}

/// Fourth-order stencil: five nodes centred on i where possible, shifted
/// inward at the ends. Grids with three or four samples fall back to all
/// available nodes.
inline StencilWeights derivative_stencil(std::span<const double> t, std::size_t i) {
  const std::size_t n = t.size();
  if (n < 3) throw ValidationError("finite differences need at least three samples");
  StencilWeights s;
  s.count = std::min<std::size_t>(5, n);
  const std::size_t half = s.count / 2;
  s.first = i < half ? 0 : std::min(i - half, n - s.count);
  fornberg_first_derivative(t[i], t.subspan(s.first, s.count), s.w);
  return s;
}

/// Derivative of a sampled series; T may be a scalar or any type with
/// scalar multiplication and addition (Eigen matrices included).
template <class T>
std::vector<T> differentiate(std::span<const double> t, std::span<const T> y) {
  std::vector<T> out;
  out.reserve(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    // weights sum to zero, so differencing against y[i] keeps constant
    // series at exactly zero instead of O(eps / dt)
    const auto s = derivative_stencil(t, i);
    const std::size_t c = i - s.first, k0 = c == 0 ? 1 : 0;
    T acc = s.w[k0] * (y[s.first + k0] - y[i]);
    for (std::size_t k = k0 + 1; k < s.count; ++k)
      if (k != c) acc = acc + s.w[k] * (y[s.first + k] - y[i]);
    out.push_back(std::move(acc));
  }
  return out;
}

inline std::vector<double> differentiate(std::span<const double> t, const std::vector<double>& y) {
  return differentiate<double>(t, std::span<const double>(y));
}

/// |a - b| scaled by max(|a|, |b|, floor).
inline double relative_gap(double a, double b, double floor = 0.0) {
  const double scale = std::max({std::abs(a), std::abs(b), floor});
  return scale > 0.0 ? std::abs(a - b) / scale : 0.0;
}

}  // namespace qig
