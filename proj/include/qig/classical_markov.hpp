#pragma once

// Classical discrete-state master equation: integration, probability
// currents, thermodynamic forces and the Fisher-information identities.

#include <cmath>
#include <concepts>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qig/errors.hpp"
#include "qig/numerics.hpp"
#include "qig/types.hpp"

namespace qig::classical {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Generator of a continuous-time Markov chain. w(x, y) is the rate y -> x
/// for x != y; columns sum to zero.
class RateMatrix {
public:
  explicit RateMatrix(RealMatrix w) : w_(std::move(w)) {
    const Index n = w_.rows();
    if (n < 2 || w_.cols() != n) throw ValidationError("rate matrix must be square with at least two states");
    if (!w_.allFinite()) throw ValidationError("rate matrix has non-finite entries");
    for (Index y = 0; y < n; ++y) {
      for (Index x = 0; x < n; ++x) {
        if (x == y) continue;
        if (w_(x, y) < 0.0) throw ValidationError("rate matrix has a negative off-diagonal rate");
        if (w_(x, y) > 0.0 && !(w_(y, x) > 0.0))
          throw ValidationError("rate matrix: transition " + std::to_string(y) + "->" + std::to_string(x) +
                                " has no reverse rate");
      }
      const double col = w_.col(y).sum();
      if (std::abs(col) > 1e-12 * std::max(1.0, w_.col(y).cwiseAbs().maxCoeff()))
        throw ValidationError("rate matrix column " + std::to_string(y) + " does not sum to zero");
    }
  }

  /// Builds the diagonal from the off-diagonal rates.
  static RateMatrix from_rates(RealMatrix rates) {
    for (Index y = 0; y < rates.cols(); ++y) {
      rates(y, y) = 0.0;
      rates(y, y) = -rates.col(y).sum();
    }
    return RateMatrix(std::move(rates));
  }

  const RealMatrix& matrix() const { return w_; }
  Index dim() const { return w_.rows(); }
  double operator()(Index x, Index y) const { return w_(x, y); }
  double max_rate() const { return w_.cwiseAbs().maxCoeff(); }

private:
  RealMatrix w_;
};

/// Probability distribution over the chain's states.
class ProbVector {
public:
  explicit ProbVector(RealVector p, double negative_tolerance = 0.0) : p_(std::move(p)) {
    if (p_.size() == 0 || !p_.allFinite()) throw ValidationError("probability vector must be finite and nonempty");
    if (p_.minCoeff() < -negative_tolerance) throw ValidationError("probability vector has a negative entry");
    if (std::abs(p_.sum() - 1.0) > 1e-10) throw ValidationError("probabilities do not sum to one");
  }

  static ProbVector uniform(Index n) { return ProbVector(RealVector::Constant(n, 1.0 / static_cast<double>(n))); }

  const RealVector& values() const { return p_; }
  Index dim() const { return p_.size(); }
  double operator[](Index i) const { return p_[i]; }

private:
  RealVector p_;
};

template <class G>
concept RateGenerator = std::invocable<const G&, double> &&
                        std::convertible_to<std::invoke_result_t<const G&, double>, const RateMatrix&>;

/// Time-independent generator wrapped as W(t).
inline auto constant_generator(RateMatrix w) {
  return [w = std::move(w)](double) -> const RateMatrix& { return w; };
}

struct ClassicalTrajectory {
  std::vector<double> t;
  std::vector<RealVector> p;
  std::vector<RealVector> pdot;  ///< W(t) p(t) at each sample
};

/// Fixed-step RK4 on the output grid.
template <RateGenerator G>
ClassicalTrajectory integrate_classical(const G& generator, const ProbVector& p0, std::span<const double> grid) {
  require_increasing(grid);
  ClassicalTrajectory out;
  if (grid.empty()) return out;
  auto rhs = [&](double t, const RealVector& p) -> RealVector {
    const RateMatrix& w = generator(t);
    if (w.dim() != p.size()) throw ValidationError("integrate_classical: dimension mismatch");
    return w.matrix() * p;
  };
  RealVector p = p0.values();
  out.t.assign(grid.begin(), grid.end());
  out.p.reserve(grid.size());
  out.pdot.reserve(grid.size());
  out.p.push_back(p);
  out.pdot.push_back(rhs(grid[0], p));
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double t = grid[i - 1], h = grid[i] - grid[i - 1];
    const RealVector k1 = rhs(t, p);
    const RealVector k2 = rhs(t + 0.5 * h, p + 0.5 * h * k1);
    const RealVector k3 = rhs(t + 0.5 * h, p + 0.5 * h * k2);
    const RealVector k4 = rhs(t + h, p + h * k3);
    p += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (p.minCoeff() < -1e-9)
      throw IntegrationError("integrate_classical: probability " + std::to_string(p.minCoeff()) + " at t=" +
                             std::to_string(grid[i]) + "; use a smaller dt (10*dt*max|w| <= 1)");
    out.p.push_back(p);
    out.pdot.push_back(rhs(grid[i], p));
  }
  return out;
}

inline ClassicalTrajectory integrate_classical(const RateMatrix& w, const ProbVector& p0, std::span<const double> grid) {
  return integrate_classical(constant_generator(w), p0, grid);
}

/// j(x, y) = w(x, y) p_y - w(y, x) p_x; zero on the diagonal.
inline RealMatrix currents(const RateMatrix& w, const RealVector& p) {
  const Index n = w.dim();
  RealMatrix j = RealMatrix::Zero(n, n);
  for (Index x = 0; x < n; ++x)
    for (Index y = 0; y < n; ++y)
      if (x != y) j(x, y) = w(x, y) * p[y] - w(y, x) * p[x];
  return j;
}

/// Generalised forces and environmental entropy changes. Entries whose
/// logarithm is undefined are NaN and listed in `excluded`.
struct ForceAndFlow {
  RealMatrix force;
  RealMatrix flow;
  std::vector<std::pair<Index, Index>> excluded;
};

inline ForceAndFlow force_and_flow(const RateMatrix& w, const RealVector& p) {
  const Index n = w.dim();
  ForceAndFlow out{RealMatrix::Constant(n, n, kNaN), RealMatrix::Constant(n, n, kNaN), {}};
  for (Index x = 0; x < n; ++x) {
    for (Index y = 0; y < n; ++y) {
      if (x == y) continue;
      const double fwd = w(x, y), bwd = w(y, x);
      if (fwd > 0.0 && bwd > 0.0) out.flow(x, y) = std::log(fwd / bwd);
      const double a = fwd * p[y], b = bwd * p[x];
      if (a > 0.0 && b > 0.0)
        out.force(x, y) = std::log(a / b);
      else
        out.excluded.emplace_back(x, y);
    }
  }
  return out;
}

/// <<A>> = 1/2 sum_{x,y} j(x, y) A(x, y); NaN entries of A are skipped.
inline double current_average(const RealMatrix& j, const RealMatrix& a) {
  double acc = 0.0;
  for (Index x = 0; x < j.rows(); ++x)
    for (Index y = 0; y < j.cols(); ++y)
      if (x != y && std::isfinite(a(x, y))) acc += j(x, y) * a(x, y);
  return 0.5 * acc;
}

/// F = sum_x pdot_x^2 / p_x over p_x > eps_floor.
inline double classical_fisher(const RealVector& p, const RealVector& pdot) {
  double f = 0.0;
  for (Index x = 0; x < p.size(); ++x)
    if (p[x] > tol::eps_floor) f += pdot[x] * pdot[x] / p[x];
  return f;
}

/// I(x, y) = -log(p_y / p_x); NaN where either probability vanishes.
inline RealMatrix relative_surprisal(const RealVector& p) {
  const Index n = p.size();
  RealMatrix out = RealMatrix::Constant(n, n, kNaN);
  for (Index x = 0; x < n; ++x)
    for (Index y = 0; y < n; ++y)
      if (x != y && p[x] > tol::eps_floor && p[y] > tol::eps_floor) out(x, y) = -std::log(p[y] / p[x]);
  return out;
}

struct EntropyRates {
  double sdot = 0.0;
  double sigma = 0.0;  ///< entropy production
  double phi = 0.0;    ///< entropy flow to the environment
};

inline EntropyRates entropy_rates_classical(const RateMatrix& w, const RealVector& p) {
  const RealMatrix j = currents(w, p);
  const ForceAndFlow ff = force_and_flow(w, p);
  return {-current_average(j, relative_surprisal(p)), current_average(j, ff.force), current_average(j, ff.flow)};
}

/// B = -sum_x pddot_x log p_x.
inline double entropic_b_term(const RealVector& p, const RealVector& pddot) {
  double b = 0.0;
  for (Index x = 0; x < p.size(); ++x)
    if (p[x] > tol::eps_floor) b -= pddot[x] * std::log(p[x]);
  return b;
}

/// Per-sample values of the three expressions for the Fisher information
/// along a trajectory, together with the entropic acceleration terms.
struct FisherIdentityReport {
  std::vector<double> t;
  std::vector<double> spectral;       ///< sum pdot^2 / p
  std::vector<double> surprisal;      ///< <<dI/dt>>
  std::vector<double> force_rate;     ///< <<df/dt>>
  std::vector<double> flow_rate;      ///< <<dphi/dt>>
  std::vector<double> thermodynamic;  ///< -<<df/dt>> + <<dphi/dt>>
  std::vector<double> sddot;          ///< d/dt of Sdot by finite differences
  std::vector<double> b_term;         ///< -sum pddot log p
  double max_relative_deviation = 0.0;  ///< over interior samples

  std::size_t size() const { return t.size(); }
  bool interior(std::size_t i) const { return i > 0 && i + 1 < t.size(); }
};

namespace detail {
inline std::vector<RealMatrix> zero_nans(std::vector<RealMatrix> v) {
  for (auto& m : v) m = m.unaryExpr([](double x) { return std::isfinite(x) ? x : 0.0; });
  return v;
}
}  // namespace detail

/// Evaluates F three ways over the trajectory: spectrally, as the current
/// average of the surprisal rate, and from force and flow rates. Matrix
/// rates use central differences on the trajectory grid. `scale_floor`
/// is the relative-error floor as a fraction of the peak spectral F.
template <RateGenerator G>
FisherIdentityReport fisher_identity_check(const G& generator, const ClassicalTrajectory& traj,
                                           double scale_floor = 1e-8) {
  const std::size_t n = traj.t.size();
  FisherIdentityReport r;
  r.t = traj.t;
  if (n < 3) throw ValidationError("fisher_identity_check: need at least three samples");
  std::vector<RealMatrix> js, forces, flows, surprisals;
  std::vector<double> sdot(n);
  for (std::size_t i = 0; i < n; ++i) {
    const RateMatrix& w = generator(traj.t[i]);
    const auto& p = traj.p[i];
    js.push_back(currents(w, p));
    auto ff = force_and_flow(w, p);
    forces.push_back(std::move(ff.force));
    flows.push_back(std::move(ff.flow));
    surprisals.push_back(relative_surprisal(p));
    r.spectral.push_back(classical_fisher(p, traj.pdot[i]));
    sdot[i] = -current_average(js.back(), surprisals.back());
  }
  const auto mask = [&](std::size_t i, const std::vector<RealMatrix>& series, const RealMatrix& rate) {
    // an entry's rate is meaningful only if it is defined at every stencil point
    RealMatrix out = rate;
    const auto s = derivative_stencil(traj.t, i);
    for (std::size_t k = 0; k < s.count; ++k)
      out = out.binaryExpr(series[s.first + k],
                           [](double v, double src) { return std::isfinite(src) ? v : kNaN; });
    return out;
  };
  const auto df = differentiate<RealMatrix>(traj.t, detail::zero_nans(forces));
  const auto dphi = differentiate<RealMatrix>(traj.t, detail::zero_nans(flows));
  const auto di = differentiate<RealMatrix>(traj.t, detail::zero_nans(surprisals));
  const auto pddot = differentiate<RealVector>(traj.t, traj.pdot);
  r.sddot = differentiate(traj.t, sdot);
  double peak = 0.0;
  for (double f : r.spectral) peak = std::max(peak, f);
  for (std::size_t i = 0; i < n; ++i) {
    r.surprisal.push_back(current_average(js[i], mask(i, surprisals, di[i])));
    r.force_rate.push_back(current_average(js[i], mask(i, forces, df[i])));
    r.flow_rate.push_back(current_average(js[i], mask(i, flows, dphi[i])));
    r.thermodynamic.push_back(-r.force_rate.back() + r.flow_rate.back());
    r.b_term.push_back(entropic_b_term(traj.p[i], pddot[i]));
    if (r.interior(i)) {
      const double floor = scale_floor * peak;
      r.max_relative_deviation = std::max({r.max_relative_deviation,
                                           relative_gap(r.spectral[i], r.surprisal[i], floor),
                                           relative_gap(r.spectral[i], r.thermodynamic[i], floor),
                                           relative_gap(r.surprisal[i], r.thermodynamic[i], floor)});
    }
  }
  return r;
}

inline FisherIdentityReport fisher_identity_check(const RateMatrix& w, const ClassicalTrajectory& traj,
                                                  double scale_floor = 1e-8) {
  return fisher_identity_check(constant_generator(w), traj, scale_floor);
}

}  // namespace qig::classical
