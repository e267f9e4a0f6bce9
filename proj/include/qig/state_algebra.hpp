#pragma once

// Dense Hermitian linear algebra and state functionals for small systems.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "qig/errors.hpp"
#include "qig/types.hpp"

namespace qig {

/// Spectrum of a Hermitian matrix, eigenvalues descending, eigenvectors as columns.
struct EigenDecomposition {
  RealVector values;
  ComplexMatrix vectors;

  Index dim() const { return values.size(); }

  ComplexMatrix reconstruct() const {
    return vectors * values.cast<Complex>().asDiagonal() * vectors.adjoint();
  }

  /// Matrix elements <x|M|y> in this eigenbasis.
  ComplexMatrix in_basis(const ComplexMatrix& m) const { return vectors.adjoint() * m * vectors; }
};

namespace detail {

// First component with magnitude above the threshold made real-positive.
inline void fix_phase(Eigen::Ref<Eigen::VectorXcd> v) {
  for (Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v[i]);
    if (a > 1e-10) {
      v *= std::conj(v[i]) / a;
      v[i] = Complex(v[i].real(), 0.0);
      return;
    }
  }
}

inline bool lexicographic_less(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  for (Index i = 0; i < a.size(); ++i) {
    if (a[i].real() != b[i].real()) return a[i].real() < b[i].real();
    if (a[i].imag() != b[i].imag()) return a[i].imag() < b[i].imag();
  }
  return false;
}

inline double tie_tolerance(double a, double b) {
  return 1e-13 * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace detail

/// Eigendecomposition of a Hermitian matrix with deterministic ordering:
/// descending eigenvalues, ties broken lexicographically on the
/// phase-fixed eigenvector entries (real part, then imaginary part).
inline EigenDecomposition eig_hermitian(const ComplexMatrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0) throw ValidationError("eig_hermitian: matrix must be square");
  if (!all_finite(m)) throw ValidationError("eig_hermitian: non-finite entries");
  if (hermiticity_error(m) > tol::hermitian) throw ValidationError("eig_hermitian: matrix is not Hermitian");

  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitize(m));
  if (solver.info() != Eigen::Success) throw ValidationError("eig_hermitian: decomposition failed");

  const Index n = m.rows();
  ComplexMatrix vecs = solver.eigenvectors();
  for (Index j = 0; j < n; ++j) detail::fix_phase(vecs.col(j));
  const RealVector& vals = solver.eigenvalues();

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(), [&](Index a, Index b) { return vals[a] > vals[b]; });
  // Runs of (numerically) equal eigenvalues are reordered by eigenvector entries.
  for (std::size_t lo = 0; lo < order.size();) {
    std::size_t hi = lo + 1;
    while (hi < order.size() &&
           std::abs(vals[order[hi]] - vals[order[hi - 1]]) <= detail::tie_tolerance(vals[order[hi]], vals[order[hi - 1]]))
      ++hi;
    if (hi - lo > 1)
      std::sort(order.begin() + static_cast<long>(lo), order.begin() + static_cast<long>(hi), [&](Index a, Index b) {
        return detail::lexicographic_less(vecs.col(a), vecs.col(b));
      });
    lo = hi;
  }

  EigenDecomposition out{RealVector(n), ComplexMatrix(n, n)};
  for (Index j = 0; j < n; ++j) {
    out.values[j] = vals[order[static_cast<std::size_t>(j)]];
    out.vectors.col(j) = vecs.col(order[static_cast<std::size_t>(j)]);
  }
  return out;
}

/// Within every block of (nearly) degenerate eigenvalues, rotate the
/// eigenvectors so that `deriv` is diagonal inside the block. Keeps the
/// diagonal elements <x|deriv|x> consistent with the eigenvalue derivatives.
inline EigenDecomposition adapt_to_derivative(const EigenDecomposition& eig, const ComplexMatrix& deriv,
                                              double gap = 1e-9) {
  EigenDecomposition out = eig;
  const Index n = eig.dim();
  for (Index lo = 0; lo < n;) {
    Index hi = lo + 1;
    while (hi < n && std::abs(eig.values[hi] - eig.values[hi - 1]) < gap) ++hi;
    if (hi - lo > 1) {
      const Index k = hi - lo;
      const ComplexMatrix basis = eig.vectors.middleCols(lo, k);
      const ComplexMatrix block = hermitize(basis.adjoint() * deriv * basis);
      Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(block);
      ComplexMatrix rotated = basis * solver.eigenvectors();
      for (Index j = 0; j < k; ++j) {
        // descending derivative order inside the block
        Eigen::VectorXcd v = rotated.col(k - 1 - j);
        detail::fix_phase(v);
        out.vectors.col(lo + j) = v;
      }
    }
    lo = hi;
  }
  return out;
}

/// f applied to the eigenvalues: V f(diag) V^dagger.
template <class Fn>
ComplexMatrix matrix_function(const EigenDecomposition& eig, Fn&& fn) {
  RealVector mapped(eig.dim());
  for (Index i = 0; i < eig.dim(); ++i) mapped[i] = fn(eig.values[i]);
  return eig.vectors * mapped.cast<Complex>().asDiagonal() * eig.vectors.adjoint();
}

/// Hermitian, unit-trace, positive semidefinite matrix; immutable and
/// carries its spectral decomposition.
class DensityMatrix {
public:
  /// Validates against the default tolerances.
  explicit DensityMatrix(const ComplexMatrix& m) : DensityMatrix(m, tol::negative_eigenvalue) {}

  /// Validates with a custom positivity tolerance (used by integrators,
  /// whose error budget is looser than the construction default).
  DensityMatrix(const ComplexMatrix& m, double negative_tolerance) {
    if (m.rows() != m.cols() || m.rows() == 0) throw ValidationError("density matrix must be square and nonempty");
    if (!all_finite(m)) throw ValidationError("density matrix has non-finite entries");
    if (hermiticity_error(m) > tol::hermitian)
      throw ValidationError("density matrix is not Hermitian (max |M - M^dagger| = " +
                            std::to_string(hermiticity_error(m)) + ")");
    const double tr = m.trace().real();
    if (std::abs(tr - 1.0) > tol::trace)
      throw ValidationError("density matrix trace is " + std::to_string(tr) + ", expected 1");
    matrix_ = hermitize(m);
    eig_ = eig_hermitian(matrix_);
    if (eig_.values.minCoeff() < -negative_tolerance)
      throw ValidationError("density matrix has negative eigenvalue " + std::to_string(eig_.values.minCoeff()));
    probabilities_ = eig_.values;
    for (Index i = 0; i < probabilities_.size(); ++i)
      if (probabilities_[i] <= tol::eps_floor) probabilities_[i] = 0.0;
  }

  static DensityMatrix maximally_mixed(Index dim) {
    return DensityMatrix(ComplexMatrix::Identity(dim, dim) / static_cast<double>(dim));
  }

  static DensityMatrix pure(const Eigen::VectorXcd& psi) {
    const Eigen::VectorXcd v = psi / psi.norm();
    return DensityMatrix(v * v.adjoint());
  }

  const ComplexMatrix& matrix() const { return matrix_; }
  const EigenDecomposition& eig() const { return eig_; }
  /// Eigenvalues (descending) with values at or below eps_floor set to zero.
  const RealVector& probabilities() const { return probabilities_; }
  Index dim() const { return matrix_.rows(); }

  /// Tr[rho O] for Hermitian O.
  double expectation(const ComplexMatrix& o) const { return (matrix_ * o).trace().real(); }

  /// Standard deviation of O in this state; zero when it would be negative from roundoff.
  double stddev(const ComplexMatrix& o) const {
    const double m1 = expectation(o);
    const double m2 = expectation(o * o);
    return std::sqrt(std::max(0.0, m2 - m1 * m1));
  }

private:
  ComplexMatrix matrix_;
  EigenDecomposition eig_;
  RealVector probabilities_;
};

/// S = -sum p log p in nats.
inline double von_neumann_entropy(const DensityMatrix& rho) {
  double s = 0.0;
  for (double p : rho.probabilities())
    if (p > tol::eps_floor) s -= p * std::log(p);
  return s;
}

inline ComplexMatrix sqrt_psd(const EigenDecomposition& eig) {
  return matrix_function(eig, [](double x) { return x > 0.0 ? std::sqrt(x) : 0.0; });
}

/// F = (Tr sqrt(sqrt(rho1) rho2 sqrt(rho1)))^2, clamped to [0, 1].
inline double uhlmann_fidelity(const DensityMatrix& rho1, const DensityMatrix& rho2) {
  if (rho1.dim() != rho2.dim()) throw ValidationError("fidelity: dimension mismatch");
  const ComplexMatrix s = sqrt_psd(rho1.eig());
  const ComplexMatrix inner = hermitize(s * rho2.matrix() * s);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(inner, Eigen::EigenvaluesOnly);
  double tr = 0.0;
  for (Index i = 0; i < solver.eigenvalues().size(); ++i) tr += std::sqrt(std::max(0.0, solver.eigenvalues()[i]));
  return std::clamp(tr * tr, 0.0, 1.0);
}

/// A = Tr(sqrt(rho1) sqrt(rho2)), clamped to [0, 1].
inline double affinity(const DensityMatrix& rho1, const DensityMatrix& rho2) {
  if (rho1.dim() != rho2.dim()) throw ValidationError("affinity: dimension mismatch");
  const double a = (sqrt_psd(rho1.eig()) * sqrt_psd(rho2.eig())).trace().real();
  return std::clamp(a, 0.0, 1.0);
}

/// D(sigma||tau) = Tr[sigma (log sigma - log tau)] in nats. Throws DomainError
/// when sigma has weight outside the support of tau (D = +infinity).
inline double relative_entropy(const DensityMatrix& sigma, const DensityMatrix& tau) {
  if (sigma.dim() != tau.dim()) throw ValidationError("relative_entropy: dimension mismatch");
  const auto& te = tau.eig();
  const RealVector& q = tau.probabilities();
  double cross = 0.0;  // Tr[sigma log tau]
  for (Index j = 0; j < te.dim(); ++j) {
    const Eigen::VectorXcd v = te.vectors.col(j);
    const double weight = (v.adjoint() * sigma.matrix() * v)(0, 0).real();
    if (q[j] <= tol::eps_floor) {
      if (weight > tol::eps_floor) throw DomainError("relative_entropy: support(sigma) not contained in support(tau)");
      continue;
    }
    cross += weight * std::log(q[j]);
  }
  double self = 0.0;  // Tr[sigma log sigma]
  for (double p : sigma.probabilities())
    if (p > tol::eps_floor) self += p * std::log(p);
  return self - cross;
}

/// Real Bloch vector of a qubit state.
struct BlochVector {
  double x = 0.0, y = 0.0, z = 0.0;
  double norm() const { return std::sqrt(x * x + y * y + z * z); }
};

namespace pauli {
inline ComplexMatrix x() { return (ComplexMatrix(2, 2) << 0, 1, 1, 0).finished(); }
inline ComplexMatrix y() { return (ComplexMatrix(2, 2) << 0, Complex(0, -1), Complex(0, 1), 0).finished(); }
inline ComplexMatrix z() { return (ComplexMatrix(2, 2) << 1, 0, 0, -1).finished(); }
}  // namespace pauli

/// rho = (1 + r.sigma)/2; basis order (|0>, |1>) with sigma_z = diag(1, -1).
inline DensityMatrix bloch_to_density(const BlochVector& r) {
  if (!(r.norm() <= 1.0 + 1e-12)) throw ValidationError("Bloch vector has |r| > 1");
  const ComplexMatrix m =
      0.5 * (ComplexMatrix::Identity(2, 2) + r.x * pauli::x() + r.y * pauli::y() + r.z * pauli::z());
  return DensityMatrix(m);
}

inline BlochVector density_to_bloch(const DensityMatrix& rho) {
  if (rho.dim() != 2) throw ValidationError("Bloch vector needs a qubit state");
  const auto& m = rho.matrix();
  return {2.0 * m(0, 1).real(), -2.0 * m(0, 1).imag(), (m(0, 0) - m(1, 1)).real()};
}

}  // namespace qig
