#pragma once

// Steady states of the pseudo-inverse evolution.
//
// For q_r = 1 the stationarity condition reads U(X*(z)) = 2z - 1, so X* is the
// monotone inverse of U on [-1, 1] when q_a > 1, and a shifted quantile of ω
// when q_a = 1 and m >= 1.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "wgf/bisection.hpp"
#include "wgf/dynamics.hpp"
#include "wgf/error.hpp"
#include "wgf/kernels.hpp"
#include "wgf/measures.hpp"

namespace wgf {

enum class SteadyKind { qa_gt_1, qa_eq_1_shift, none_exists };

inline const char* to_string(SteadyKind k) {
  switch (k) {
    case SteadyKind::qa_gt_1: return "qa_gt_1";
    case SteadyKind::qa_eq_1_shift: return "qa_eq_1_shift";
    case SteadyKind::none_exists: return "none_exists";
  }
  return "unknown";
}

struct SteadyState {
  /// Empty when kind == none_exists.
  std::optional<InverseCDF> Xstar;
  double x_lo = std::numeric_limits<double>::quiet_NaN();
  double x_hi = std::numeric_limits<double>::quiet_NaN();
  /// Median of μ*, the zero of U.
  double x_zero = std::numeric_limits<double>::quiet_NaN();
  SteadyKind kind = SteadyKind::none_exists;
};

/// Unique steady state for q_r = 1, built on an n-point grid with the potential's quadrature.
inline SteadyState steady_qr1(const AttractionPotential& pot, std::size_t n) {
  if (n == 0) throw ShapeError("steady state needs a nonempty grid");
  const ReferenceProfile& profile = pot.profile();
  const double m = profile.mass();
  SteadyState s;

  if (pot.q_a() == 1.0) {
    if (m < 1.0) return s;
    const double shift = 0.5 * (m - 1.0);
    s.kind = SteadyKind::qa_eq_1_shift;
    s.Xstar = InverseCDF::from_function(n, [&](double z) { return profile.pseudo_inverse(z + shift); });
    s.x_lo = profile.pseudo_inverse(shift);
    s.x_hi = profile.lower_quantile(shift + 1.0);
    s.x_zero = profile.pseudo_inverse(0.5 * m);
    return s;
  }

  const auto U = [&pot](double x) { return pot(x); };
  const Bracket hull = expand_bracket(U, 0.0, profile.support_lo(), profile.support_hi());
  const Bracket wide = expand_bracket(U, -1.0, hull.lo, hull.hi);
  const Bracket full = expand_bracket(U, 1.0, wide.lo, wide.hi);
  s.kind = SteadyKind::qa_gt_1;
  s.x_zero = bisect_monotone(U, 0.0, hull);
  s.x_lo = bisect_monotone(U, -1.0, full);
  s.x_hi = bisect_monotone(U, 1.0, full);
  const Bracket nodes{s.x_lo, s.x_hi};
  std::vector<double> x(n);
  parallel_for(n, [&](std::size_t i) { x[i] = bisect_monotone(U, 2.0 * InverseCDF::node(i, n) - 1.0, nodes); });
  s.Xstar = InverseCDF(std::move(x));
  return s;
}

inline SteadyState steady_qr1(const ReferenceProfile& profile, double q_a, std::size_t n) {
  return steady_qr1(AttractionPotential(profile, q_a, n), n);
}

/// Density of μ* inside [x_lo, x_hi]: ½ ψ_a'' ∗ ω, evaluated exactly from the profile.
inline double steady_density(const ReferenceProfile& profile, double q_a, double x) {
  detail::check_exponent(q_a);
  if (q_a == 1.0) return profile.density(x);
  if (q_a == 2.0) return profile.mass();
  return 0.5 * q_a * (q_a - 1.0) * profile.abs_power_convolution(q_a - 2.0, x);
}

enum class NodeFate { bound, escaping_left, escaping_right };

/// Partial limit X̃*(z) = Y(z - (1-m)/2) on the window z ∈ [(1-m)/2, (1+m)/2];
/// nodes outside the window escape to ∓∞.
struct ShiftedProfile {
  std::size_t n = 0;
  double z_lo = 0.0;
  double z_hi = 1.0;
  std::vector<NodeFate> fate;
  /// Limit position for bound nodes, NaN for escaping ones.
  std::vector<double> x;

  std::optional<double> target(std::size_t i) const {
    if (fate.at(i) != NodeFate::bound) return std::nullopt;
    return x[i];
  }
};

inline ShiftedProfile shifted_profile_mlt1(const ReferenceProfile& profile, std::size_t n) {
  const double m = profile.mass();
  if (!(m < 1.0)) throw PreconditionError("shifted limit profile requires mass m < 1");
  if (n == 0) throw ShapeError("shifted profile needs a nonempty grid");
  ShiftedProfile out;
  out.n = n;
  out.z_lo = 0.5 * (1.0 - m);
  out.z_hi = 0.5 * (1.0 + m);
  out.fate.resize(n);
  out.x.assign(n, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 0; i < n; ++i) {
    const double z = InverseCDF::node(i, n);
    if (2.0 * z - 1.0 + m < 0.0) {
      out.fate[i] = NodeFate::escaping_left;
    } else if (2.0 * z - 1.0 - m > 0.0) {
      out.fate[i] = NodeFate::escaping_right;
    } else {
      out.fate[i] = NodeFate::bound;
      const double zeta = z - out.z_lo;
      out.x[i] = zeta < m ? profile.pseudo_inverse(zeta) : profile.lower_quantile(m);
    }
  }
  return out;
}

/// Sup-norm stationarity defect ‖rhs(X)‖_∞.
inline double steady_residual(const InverseCDF& X, const AttractionPotential& pot, const Exponents& exps) {
  const std::vector<double> v = rhs(X, pot, exps);
  double r = 0.0;
  for (double vi : v) r = std::max(r, std::abs(vi));
  return r;
}

}  // namespace wgf
