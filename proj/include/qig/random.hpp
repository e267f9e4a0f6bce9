#pragma once

// Random instances for property checks. Everything is driven by a caller
// supplied engine so a seed reproduces a run exactly.

#include <cmath>
#include <random>
#include <vector>

#include "qig/classical_markov.hpp"
#include "qig/gksl.hpp"
#include "qig/state_algebra.hpp"

namespace qig::random {

using Engine = std::mt19937_64;

inline double uniform(Engine& g, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(g); }
inline double normal(Engine& g) { return std::normal_distribution<double>(0.0, 1.0)(g); }

inline ComplexMatrix ginibre(Engine& g, Index n) {
  ComplexMatrix m(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) m(i, j) = Complex(normal(g), normal(g));
  return m;
}

inline ComplexMatrix hermitian(Engine& g, Index n) { return hermitize(ginibre(g, n)); }

/// Full-rank state with eigenvalues bounded away from zero by `floor`.
inline DensityMatrix full_rank_state(Engine& g, Index n, double floor = 0.02) {
  const ComplexMatrix a = ginibre(g, n);
  ComplexMatrix m = a * a.adjoint();
  m /= m.trace().real();
  m = (1.0 - floor * static_cast<double>(n)) * m + floor * ComplexMatrix::Identity(n, n);
  return DensityMatrix(hermitize(m));
}

/// Traceless Hermitian direction, normalised to unit Frobenius norm.
inline ComplexMatrix tangent(Engine& g, Index n) {
  ComplexMatrix d = hermitian(g, n);
  d -= (d.trace() / static_cast<double>(n)) * ComplexMatrix::Identity(n, n);
  return d / d.norm();
}

/// Rate matrix with all off-diagonal rates in [lo, hi].
inline classical::RateMatrix rate_matrix(Engine& g, Index n, double lo = 0.1, double hi = 2.0) {
  RealMatrix w = RealMatrix::Zero(n, n);
  for (Index x = 0; x < n; ++x)
    for (Index y = 0; y < n; ++y)
      if (x != y) w(x, y) = uniform(g, lo, hi);
  return classical::RateMatrix::from_rates(w);
}

inline classical::ProbVector probability(Engine& g, Index n, double floor = 0.05) {
  RealVector p(n);
  for (Index i = 0; i < n; ++i) p[i] = uniform(g, floor, 1.0);
  return classical::ProbVector(p / p.sum());
}

/// GKSL generator whose dissipator is made of detailed-balance pairs
/// L = sqrt(g e^{phi/2}) A, L' = sqrt(g e^{-phi/2}) A^dagger with dense random A.
struct GkslInstance {
  Lindbladian lindbladian;
  DensityMatrix initial;
};

inline GkslInstance gksl_system(Engine& g, Index n, int pairs = 2) {
  std::vector<JumpPair> jp;
  for (int k = 0; k < pairs; ++k) {
    const ComplexMatrix a = ginibre(g, n) / std::sqrt(static_cast<double>(n));
    const double rate = uniform(g, 0.3, 1.0);
    const double phi = uniform(g, -1.5, 1.5);
    jp.emplace_back(std::sqrt(rate * std::exp(0.5 * phi)) * a, std::sqrt(rate * std::exp(-0.5 * phi)) * a.adjoint(),
                    phi);
  }
  Lindbladian l(Hamiltonian(hermitian(g, n)), std::move(jp));
  return {std::move(l), full_rank_state(g, n, 0.05)};
}

}  // namespace qig::random
