#pragma once

// Evolution of the pseudo-inverse:
//
//   ∂_t X(z) = R[X](z) - U(X(z)),
//
// with the repulsion term R[X](z) = ∫₀¹ ψ_r'(X(z) - X(ζ)) dζ for q_r > 1 and
// R[X](z) = 2z - 1 for q_r = 1, and U = ψ_a' ∗ ω from AttractionPotential.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "wgf/error.hpp"
#include "wgf/kernels.hpp"
#include "wgf/measures.hpp"
#include "wgf/parallel.hpp"

namespace wgf {

struct FlowState {
  double t = 0.0;
  InverseCDF X;
  double min_slope = 0.0;
  /// ∂_t X at this state; filled for recorded snapshots.
  std::vector<double> velocity;
};

enum class Scheme { rk4, euler };

struct IntegratorConfig {
  double dt = 1e-3;
  double t_end = 1.0;
  Scheme scheme = Scheme::rk4;
  /// dt must satisfy dt·λ <= safety.
  double safety = 0.5;
  std::size_t record_every = 1;

  void validate(double lambda) const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InputError("time step must be positive");
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw InputError("final time must be nonnegative");
    if (!(safety > 0.0 && safety <= 1.0)) throw InputError("safety factor must lie in (0, 1]");
    if (record_every == 0) throw InputError("record_every must be positive");
    if (dt * lambda > safety)
      throw InputError("time step " + std::to_string(dt) + " violates dt*lambda <= " + std::to_string(safety) +
                       " (lambda = " + std::to_string(lambda) + ")");
  }
};

namespace detail {

// Pairwise table is used up to this size; beyond it rows are summed directly.
inline constexpr std::size_t kPairTableLimit = 2048;

inline void repulsion(std::span<const double> x, double q_r, std::span<double> out) {
  const std::size_t n = x.size();
  const double inv_n = 1.0 / static_cast<double>(n);
  if (q_r == 1.0) {
    for (std::size_t i = 0; i < n; ++i) out[i] = 2.0 * InverseCDF::node(i, n) - 1.0;
    return;
  }
  if (q_r == 2.0) {
    double mean = 0.0;
    for (double v : x) mean += v;
    mean *= inv_n;
    for (std::size_t i = 0; i < n; ++i) out[i] = 2.0 * (x[i] - mean);
    return;
  }
  if (n > kPairTableLimit) {
    parallel_for(n, [&](std::size_t i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc += power_derivative(q_r, x[i] - x[j]);
      out[i] = acc * inv_n;
    });
    return;
  }
  // φ_ij = ψ_r'(x_i - x_j) for j < i, stored row-wise; ψ_r' is odd.
  std::vector<double> table(n * (n - 1) / 2);
  parallel_for(n, [&](std::size_t i) {
    double* row = table.data() + i * (i - 1) / 2;
    for (std::size_t j = 0; j < i; ++j) row[j] = power_derivative(q_r, x[i] - x[j]);
  });
  parallel_for(n, [&](std::size_t i) {
    const double* row = table.data() + i * (i - 1) / 2;
    double acc = 0.0;
    for (std::size_t j = 0; j < i; ++j) acc += row[j];
    for (std::size_t j = i + 1; j < n; ++j) acc -= table[j * (j - 1) / 2 + i];
    out[i] = acc * inv_n;
  });
}

inline void check_consistent(const AttractionPotential& pot, const Exponents& exps) {
  if (pot.q_a() != exps.q_a()) throw PreconditionError("attraction potential built for a different q_a");
}

/// V = R[x] - U(x) for an arbitrary (stage) vector x.
inline void velocity(std::span<const double> x, const AttractionPotential& pot, const Exponents& exps,
                     std::span<double> out) {
  const std::size_t n = x.size();
  repulsion(x, exps.q_r(), out);
  std::vector<double> u(n);
  pot.evaluate(x, u);
  for (std::size_t i = 0; i < n; ++i) out[i] -= u[i];
}

}  // namespace detail

/// Right-hand side of the pseudo-inverse evolution at the grid nodes.
/// For q_a = q_r = 1 this is V_i = 2[z_i - G(X_i)] + m - 1.
inline std::vector<double> rhs(const InverseCDF& X, const AttractionPotential& pot, const Exponents& exps) {
  detail::check_consistent(pot, exps);
  std::vector<double> v(X.size());
  detail::velocity(X.values(), pot, exps, v);
  return v;
}

namespace detail {

inline InverseCDF advance(const InverseCDF& X, std::span<const double> k1, double t, double h, Scheme scheme,
                          const AttractionPotential& pot, const Exponents& exps) {
  const std::size_t n = X.size();
  const auto x = X.values();
  std::vector<double> next(n);
  if (scheme == Scheme::euler) {
    for (std::size_t i = 0; i < n; ++i) next[i] = x[i] + h * k1[i];
  } else {
    std::vector<double> stage(n), k2(n), k3(n), k4(n);
    for (std::size_t i = 0; i < n; ++i) stage[i] = x[i] + 0.5 * h * k1[i];
    velocity(stage, pot, exps, k2);
    for (std::size_t i = 0; i < n; ++i) stage[i] = x[i] + 0.5 * h * k2[i];
    velocity(stage, pot, exps, k3);
    for (std::size_t i = 0; i < n; ++i) stage[i] = x[i] + h * k3[i];
    velocity(stage, pot, exps, k4);
    for (std::size_t i = 0; i < n; ++i) next[i] = x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(next[i]))
      throw StateError("state overflowed at t = " + std::to_string(t + h) + "; bound the final time");
    if (i > 0 && next[i] < next[i - 1])
      throw MonotonicityError("ordering of the pseudo-inverse violated at t = " + std::to_string(t + h) +
                                  ", node " + std::to_string(i) + "; retry with dt <= " + std::to_string(0.5 * h) +
                                  " or a finer grid",
                              t + h, 0.5 * h);
  }
  return InverseCDF(std::move(next));
}

}  // namespace detail

/// One RK4 (or Euler) step of size cfg.dt.
inline FlowState step(const FlowState& state, const IntegratorConfig& cfg, const AttractionPotential& pot,
                      const Exponents& exps) {
  detail::check_consistent(pot, exps);
  cfg.validate(pot.lambda());
  const std::vector<double> k1 = rhs(state.X, pot, exps);
  InverseCDF next = detail::advance(state.X, k1, state.t, cfg.dt, cfg.scheme, pot, exps);
  const double slope = next.min_slope();
  return FlowState{state.t + cfg.dt, std::move(next), slope, {}};
}

/// Exact solution for q_a = q_r = 2:
/// X(t,z) = e^{-2(m-1)t}(X₀(z) - (1 - e^{-2t}) ∫X₀) + (1 - e^{-2mt})/m ∫₀^m Y.
inline InverseCDF closed_form_q2(const InverseCDF& X0, const ReferenceProfile& profile, double t) {
  const double m = profile.mass();
  const double mean0 = X0.mean();
  const double int_y = profile.first_moment();
  const double decay = std::exp(-2.0 * (m - 1.0) * t);
  const double shift = -std::expm1(-2.0 * t) * mean0;
  const double target = -std::expm1(-2.0 * m * t) / m * int_y;
  std::vector<double> x(X0.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = decay * (X0[i] - shift) + target;
  return InverseCDF(std::move(x));
}

struct Trajectory {
  std::vector<FlowState> snapshots;
  double lambda = 0.0;
  /// Initial minimal slope; the α of the slope condition.
  double alpha = 0.0;
  /// min over all steps of min_slope(t)·e^{λt}.
  double slope_certificate = std::numeric_limits<double>::infinity();

  /// slope_certificate / alpha; the slope condition holds when this stays >= 1 - tol.
  double slope_ratio() const { return std::isfinite(alpha) && alpha > 0.0 ? slope_certificate / alpha : 1.0; }
};

using SnapshotObserver = std::function<void(const FlowState&)>;

/// Integrates from X0 to cfg.t_end, recording every cfg.record_every steps and the final state.
inline Trajectory simulate(const InverseCDF& X0, const AttractionPotential& pot, const Exponents& exps,
                           const IntegratorConfig& cfg, const SnapshotObserver& observer = {}) {
  detail::check_consistent(pot, exps);
  cfg.validate(pot.lambda());
  Trajectory traj;
  traj.lambda = pot.lambda();
  traj.alpha = X0.min_slope();
  traj.slope_certificate = traj.alpha;

  const double span = cfg.t_end;
  const auto steps = static_cast<std::size_t>(std::ceil(span / cfg.dt - 1e-9));
  InverseCDF X = X0;
  double t = 0.0;
  const auto record = [&](const InverseCDF& x, double time, std::vector<double> v) {
    traj.snapshots.push_back(FlowState{time, x, x.min_slope(), std::move(v)});
    if (observer) observer(traj.snapshots.back());
  };

  for (std::size_t k = 0; k < steps; ++k) {
    std::vector<double> k1 = rhs(X, pot, exps);
    if (k % cfg.record_every == 0) record(X, t, k1);
    const double t_next = std::min(span, static_cast<double>(k + 1) * cfg.dt);
    X = detail::advance(X, k1, t, t_next - t, cfg.scheme, pot, exps);
    t = t_next;
    if (std::isfinite(traj.alpha))
      traj.slope_certificate = std::min(traj.slope_certificate, X.min_slope() * std::exp(traj.lambda * t));
  }
  record(X, t, rhs(X, pot, exps));
  return traj;
}

inline Trajectory simulate(const InverseCDF& X0, const ReferenceProfile& profile, const Exponents& exps,
                           const IntegratorConfig& cfg, const SnapshotObserver& observer = {}) {
  return simulate(X0, AttractionPotential(profile, exps.q_a(), X0.size()), exps, cfg, observer);
}

}  // namespace wgf
