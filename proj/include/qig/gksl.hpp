#pragma once

// GKSL master equation with locally detailed-balanced jump pairs, fixed-step
// integration, and the stochastic-thermodynamic quantities of the
// instantaneous eigenbasis.

#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "qig/errors.hpp"
#include "qig/numerics.hpp"
#include "qig/state_algebra.hpp"
#include "qig/types.hpp"

namespace qig {

class Hamiltonian {
public:
  explicit Hamiltonian(ComplexMatrix h) {
    if (h.rows() != h.cols() || h.rows() == 0) throw ValidationError("Hamiltonian must be square and nonempty");
    if (!all_finite(h)) throw ValidationError("Hamiltonian has non-finite entries");
    if (hermiticity_error(h) > tol::hermitian) throw ValidationError("Hamiltonian is not Hermitian");
    h_ = hermitize(h);
  }

  static Hamiltonian zero(Index dim) { return Hamiltonian(ComplexMatrix::Zero(dim, dim)); }

  const ComplexMatrix& matrix() const { return h_; }
  Index dim() const { return h_.rows(); }

private:
  ComplexMatrix h_;
};

/// Jump operators (L_k, L_k') related by L_k = e^{phi_k/2} L_k'^dagger, where
/// phi_k is the environmental entropy change of a jump through L_k (the
/// partner carries -phi_k). A self-paired jump is a single Hermitian operator
/// with phi = 0.
class JumpPair {
public:
  JumpPair(ComplexMatrix op, ComplexMatrix partner, double phi)
      : op_(std::move(op)), partner_(std::move(partner)), phi_(phi) {
    if (op_.rows() != op_.cols() || partner_.rows() != op_.rows() || partner_.cols() != op_.cols())
      throw ValidationError("jump pair: operators must be square and of equal size");
    if (!all_finite(op_) || !all_finite(partner_) || !std::isfinite(phi_))
      throw ValidationError("jump pair: non-finite entries");
    const double scale = std::max({1.0, max_abs(op_), max_abs(partner_)});
    const double mismatch = max_abs(op_ - std::exp(0.5 * phi_) * partner_.adjoint());
    if (mismatch > 1e-10 * scale)
      throw ValidationError("jump pair violates L_k = exp(phi/2) L_k'^dagger (mismatch " + std::to_string(mismatch) + ")");
  }

  static JumpPair self_paired(ComplexMatrix op) {
    JumpPair p(op, op, 0.0);
    p.self_paired_ = true;
    return p;
  }

  const ComplexMatrix& op() const { return op_; }
  const ComplexMatrix& partner() const { return partner_; }
  double phi() const { return phi_; }
  bool is_self_paired() const { return self_paired_; }

private:
  ComplexMatrix op_;
  ComplexMatrix partner_;
  double phi_;
  bool self_paired_ = false;
};

/// One jump channel after expanding the pairs.
struct Jump {
  ComplexMatrix op;
  ComplexMatrix op_dag_op;
  double phi;
  std::size_t partner;  ///< index of the reverse channel (itself when self-paired)
};

class Lindbladian {
public:
  Lindbladian(Hamiltonian h, std::vector<JumpPair> pairs) : h_(std::move(h)), pairs_(std::move(pairs)) {
    for (const auto& p : pairs_) {
      if (p.op().rows() != h_.dim()) throw ValidationError("Lindbladian: jump operator dimension mismatch");
      const std::size_t k = jumps_.size();
      if (p.is_self_paired()) {
        jumps_.push_back({p.op(), p.op().adjoint() * p.op(), 0.0, k});
      } else {
        jumps_.push_back({p.op(), p.op().adjoint() * p.op(), p.phi(), k + 1});
        jumps_.push_back({p.partner(), p.partner().adjoint() * p.partner(), -p.phi(), k});
      }
    }
  }

  /// Purely Hamiltonian generator.
  static Lindbladian unitary(Hamiltonian h) { return Lindbladian(std::move(h), {}); }

  const Hamiltonian& hamiltonian() const { return h_; }
  const std::vector<JumpPair>& pairs() const { return pairs_; }
  const std::vector<Jump>& jumps() const { return jumps_; }
  Index dim() const { return h_.dim(); }

  /// -i[H, rho] + sum_k (L rho L^dagger - {L^dagger L, rho}/2), on raw matrices.
  ComplexMatrix apply(const ComplexMatrix& rho) const {
    const Complex i(0.0, 1.0);
    const ComplexMatrix& h = h_.matrix();
    ComplexMatrix out = -i * (h * rho - rho * h);
    for (const auto& j : jumps_)
      out += j.op * rho * j.op.adjoint() - 0.5 * (j.op_dag_op * rho + rho * j.op_dag_op);
    return out;
  }

private:
  Hamiltonian h_;
  std::vector<JumpPair> pairs_;
  std::vector<Jump> jumps_;
};

inline ComplexMatrix lindblad_rhs(const Lindbladian& l, const DensityMatrix& rho) {
  if (rho.dim() != l.dim()) throw ValidationError("lindblad_rhs: dimension mismatch");
  return l.apply(rho.matrix());
}

/// Sampled solution of the master equation. derivs are the generator
/// applied to each state; eigs are canonical decompositions of each state,
/// adapted to the derivative inside degenerate eigenspaces.
struct Trajectory {
  std::vector<double> t;
  std::vector<DensityMatrix> states;
  std::vector<ComplexMatrix> derivs;
  std::vector<EigenDecomposition> eigs;

  std::size_t size() const { return t.size(); }
};

namespace detail {
inline DensityMatrix checked_state(const ComplexMatrix& m, double t) {
  const double tr = m.trace().real();
  if (std::abs(tr - 1.0) > 1e-9)
    throw IntegrationError("integrate: trace drifted to " + std::to_string(tr) + " at t=" + std::to_string(t) +
                           "; use a smaller dt");
  try {
    return DensityMatrix(m, 1e-8);
  } catch (const ValidationError& e) {
    throw IntegrationError(std::string("integrate: state left the state space at t=") + std::to_string(t) + " (" +
                           e.what() + "); use a smaller dt");
  }
}
}  // namespace detail

/// Fixed-step RK4 on the given grid (one step per grid interval); states are
/// re-Hermitized after every step.
inline Trajectory integrate(const Lindbladian& l, const DensityMatrix& rho0, std::span<const double> grid) {
  if (rho0.dim() != l.dim()) throw ValidationError("integrate: dimension mismatch");
  require_increasing(grid);
  Trajectory out;
  out.t.assign(grid.begin(), grid.end());
  out.states.reserve(grid.size());
  out.derivs.reserve(grid.size());
  out.eigs.reserve(grid.size());
  ComplexMatrix rho = rho0.matrix();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (i > 0) {
      const double h = grid[i] - grid[i - 1];
      const ComplexMatrix k1 = l.apply(rho);
      const ComplexMatrix k2 = l.apply(rho + 0.5 * h * k1);
      const ComplexMatrix k3 = l.apply(rho + 0.5 * h * k2);
      const ComplexMatrix k4 = l.apply(rho + h * k3);
      rho = hermitize(rho + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
    }
    DensityMatrix state = i == 0 ? rho0 : detail::checked_state(rho, grid[i]);
    ComplexMatrix deriv = hermitize(l.apply(state.matrix()));
    out.eigs.push_back(adapt_to_derivative(state.eig(), deriv));
    out.derivs.push_back(std::move(deriv));
    out.states.push_back(std::move(state));
  }
  return out;
}

inline Trajectory integrate(const Lindbladian& l, const DensityMatrix& rho0, const TimeGrid& grid) {
  const auto pts = grid.points();
  return integrate(l, rho0, std::span<const double>(pts));
}

/// w_k(x, y) = |<x|L_k|y>|^2 for every jump channel.
inline std::vector<RealMatrix> transition_rates(const Lindbladian& l, const EigenDecomposition& eigs) {
  std::vector<RealMatrix> out;
  out.reserve(l.jumps().size());
  for (const auto& j : l.jumps()) out.push_back(eigs.in_basis(j.op).cwiseAbs2());
  return out;
}

/// Currents, forces and flows between instantaneous eigenstates, per jump
/// channel. Undefined logarithms are NaN and listed in `excluded` as
/// (channel, x, y).
struct EigenbasisFlows {
  RealVector p;     ///< populations (eigenvalues, floored)
  RealVector pdot;  ///< <x|d rho/dt|x>
  std::vector<RealMatrix> rates;
  std::vector<RealMatrix> current;
  std::vector<RealMatrix> force;
  std::vector<RealMatrix> flow;
  std::vector<std::tuple<std::size_t, Index, Index>> excluded;
};

inline EigenbasisFlows eigenbasis_currents(const Lindbladian& l, const EigenDecomposition& eigs,
                                           const ComplexMatrix& deriv) {
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  const Index n = eigs.dim();
  EigenbasisFlows out;
  out.p = eigs.values.unaryExpr([](double v) { return v > tol::eps_floor ? v : 0.0; });
  out.pdot = eigs.in_basis(deriv).diagonal().real();
  out.rates = transition_rates(l, eigs);
  const auto& jumps = l.jumps();
  for (std::size_t k = 0; k < jumps.size(); ++k) {
    const RealMatrix& w = out.rates[k];
    const RealMatrix& wr = out.rates[jumps[k].partner];
    RealMatrix j = RealMatrix::Zero(n, n), f = RealMatrix::Constant(n, n, nan), phi = RealMatrix::Constant(n, n, nan);
    for (Index x = 0; x < n; ++x) {
      for (Index y = 0; y < n; ++y) {
        if (x == y) continue;
        const double a = w(x, y) * out.p[y], b = wr(y, x) * out.p[x];
        j(x, y) = a - b;
        if (w(x, y) > 0.0 && wr(y, x) > 0.0) phi(x, y) = std::log(w(x, y) / wr(y, x));
        if (a > 0.0 && b > 0.0)
          f(x, y) = std::log(a / b);
        else
          out.excluded.emplace_back(k, x, y);
      }
    }
    out.current.push_back(std::move(j));
    out.force.push_back(std::move(f));
    out.flow.push_back(std::move(phi));
  }
  return out;
}

inline EigenbasisFlows eigenbasis_currents(const Lindbladian& l, const DensityMatrix& state) {
  const ComplexMatrix deriv = lindblad_rhs(l, state);
  return eigenbasis_currents(l, adapt_to_derivative(state.eig(), deriv), deriv);
}

/// <<A>> = 1/2 sum_k sum_{x != y} j_k(x, y) A_k(x, y); NaN entries skipped.
inline double current_average(const std::vector<RealMatrix>& current, const std::vector<RealMatrix>& a) {
  double acc = 0.0;
  for (std::size_t k = 0; k < current.size(); ++k)
    for (Index x = 0; x < current[k].rows(); ++x)
      for (Index y = 0; y < current[k].cols(); ++y)
        if (x != y && std::isfinite(a[k](x, y))) acc += current[k](x, y) * a[k](x, y);
  return 0.5 * acc;
}

/// Eigendecompositions relabelled so that each label follows the
/// eigenvector with the largest overlap at the previous sample. Needed
/// whenever per-label quantities are differenced across an eigenvalue
/// crossing.
inline std::vector<EigenDecomposition> aligned_eigenbases(const Trajectory& traj) {
  std::vector<EigenDecomposition> out;
  out.reserve(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    if (i == 0) {
      out.push_back(traj.eigs[0]);
      continue;
    }
    const EigenDecomposition& prev = out.back();
    const EigenDecomposition& cur = traj.eigs[i];
    const Index n = cur.dim();
    RealMatrix overlap = (prev.vectors.adjoint() * cur.vectors).cwiseAbs2();
    std::vector<Index> assign(static_cast<std::size_t>(n), -1);
    std::vector<bool> used(static_cast<std::size_t>(n), false);
    for (Index round = 0; round < n; ++round) {
      double best = -1.0;
      Index ba = 0, bc = 0;
      for (Index a = 0; a < n; ++a) {
        if (assign[static_cast<std::size_t>(a)] >= 0) continue;
        for (Index c = 0; c < n; ++c)
          if (!used[static_cast<std::size_t>(c)] && overlap(a, c) > best) best = overlap(a, c), ba = a, bc = c;
      }
      assign[static_cast<std::size_t>(ba)] = bc;
      used[static_cast<std::size_t>(bc)] = true;
    }
    EigenDecomposition e{RealVector(n), ComplexMatrix(n, n)};
    for (Index a = 0; a < n; ++a) {
      const Index c = assign[static_cast<std::size_t>(a)];
      e.values[a] = cur.values[c];
      e.vectors.col(a) = cur.vectors.col(c);
    }
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace qig
