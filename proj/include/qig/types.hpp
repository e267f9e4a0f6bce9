#pragma once

#include <complex>
#include <cstddef>
#include <limits>

#include <Eigen/Dense>

namespace qig {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

namespace tol {
/// Max entrywise |M - M^dagger| accepted as Hermitian.
inline constexpr double hermitian = 1e-10;
/// Allowed |Tr rho - 1|.
inline constexpr double trace = 1e-10;
/// Most negative eigenvalue accepted in a density matrix.
inline constexpr double negative_eigenvalue = 1e-10;
/// Eigenvalues at or below this are treated as zero and never enter a logarithm.
inline constexpr double eps_floor = 1e-12;
}  // namespace tol

/// Largest entry magnitude; 0 for an empty matrix.
template <class Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
  return m.size() == 0 ? 0.0 : static_cast<double>(m.cwiseAbs().maxCoeff());
}

inline double hermiticity_error(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  return max_abs(m - m.adjoint());
}

inline ComplexMatrix hermitize(const ComplexMatrix& m) {
  return (m + m.adjoint()) * 0.5;
}

inline bool all_finite(const ComplexMatrix& m) {
  return m.allFinite();
}

}  // namespace qig
