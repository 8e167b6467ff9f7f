#pragma once

// Pseudo-inverse calculus for finite measures on the real line.
//
// A probability measure μ is represented by its pseudo-inverse
// X(z) = inf{x : F(x) > z} sampled on the midpoint grid z_i = (i + 1/2)/n.
// The reference profile ω is a piecewise-constant density, so its CDF G is
// piecewise linear and its pseudo-inverse Y has a closed form.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wgf/error.hpp"

namespace wgf {

class InverseCDF {
 public:
  explicit InverseCDF(std::vector<double> x) : x_(std::move(x)) { validate(); }

  /// Midpoint node z_i = (i + 1/2)/n.
  static double node(std::size_t i, std::size_t n) {
    return (static_cast<double>(i) + 0.5) / static_cast<double>(n);
  }

  /// Samples a nondecreasing function of the mass variable.
  template <class F>
  static InverseCDF from_function(std::size_t n, F&& f) {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = f(node(i, n));
    return InverseCDF(std::move(x));
  }

  /// Uniform probability density on [a, b].
  static InverseCDF uniform(double a, double b, std::size_t n) {
    if (!(b > a)) throw DomainError("uniform initial datum needs a < b");
    return from_function(n, [a, b](double z) { return a + (b - a) * z; });
  }

  std::size_t size() const noexcept { return x_.size(); }
  double z(std::size_t i) const { return node(i, x_.size()); }
  double operator[](std::size_t i) const { return x_[i]; }
  std::span<const double> values() const noexcept { return x_; }
  const std::vector<double>& vector() const noexcept { return x_; }
  double front() const { return x_.front(); }
  double back() const { return x_.back(); }

  /// Center of mass, ∫₀¹ X(z) dz by the midpoint rule.
  double mean() const {
    return std::accumulate(x_.begin(), x_.end(), 0.0) / static_cast<double>(x_.size());
  }

  /// min_i (x_{i+1} - x_i)/(z_{i+1} - z_i); +inf for a single node.
  double min_slope() const {
    double s = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < x_.size(); ++i) s = std::min(s, x_[i + 1] - x_[i]);
    return s * static_cast<double>(x_.size());
  }

 private:
  void validate() const {
    if (x_.empty()) throw ShapeError("InverseCDF needs at least one grid point");
    for (std::size_t i = 0; i < x_.size(); ++i) {
      if (!std::isfinite(x_[i])) throw StateError("InverseCDF entry " + std::to_string(i) + " is not finite");
      if (i > 0 && x_[i] < x_[i - 1])
        throw StateError("InverseCDF is not nondecreasing at index " + std::to_string(i));
    }
  }

  std::vector<double> x_;
};

/// Compactly supported piecewise-constant density ω with exact CDF G and pseudo-inverse Y.
class ReferenceProfile {
 public:
  ReferenceProfile(std::vector<double> breakpoints, std::vector<double> densities)
      : b_(std::move(breakpoints)), d_(std::move(densities)) {
    if (b_.size() < 2) throw InputError("profile needs at least two breakpoints");
    if (d_.size() + 1 != b_.size())
      throw ShapeError("profile needs exactly one density per interval between breakpoints");
    for (std::size_t k = 0; k < b_.size(); ++k) {
      if (!std::isfinite(b_[k])) throw InputError("profile breakpoints must be finite");
      if (k > 0 && !(b_[k] > b_[k - 1])) throw InputError("profile breakpoints must be strictly increasing");
    }
    cum_.assign(b_.size(), 0.0);
    bound_ = 0.0;
    for (std::size_t k = 0; k < d_.size(); ++k) {
      if (!std::isfinite(d_[k]) || d_[k] < 0.0) throw InputError("profile densities must be finite and nonnegative");
      cum_[k + 1] = cum_[k] + d_[k] * (b_[k + 1] - b_[k]);
      bound_ = std::max(bound_, d_[k]);
    }
    mass_ = cum_.back();
    if (!(mass_ > 0.0)) throw InputError("profile must have positive mass");
  }

  /// Constant density on [a, b] carrying the given mass.
  static ReferenceProfile uniform(double a, double b, double mass) {
    return ReferenceProfile({a, b}, {mass / (b - a)});
  }

  double mass() const noexcept { return mass_; }
  double density_bound() const noexcept { return bound_; }
  double support_lo() const noexcept { return b_.front(); }
  double support_hi() const noexcept { return b_.back(); }
  std::span<const double> breakpoints() const noexcept { return b_; }
  std::span<const double> densities() const noexcept { return d_; }
  /// Cumulative mass at each breakpoint, G(b_k).
  std::span<const double> cumulative() const noexcept { return cum_; }

  double density(double x) const {
    if (x < b_.front() || x >= b_.back()) return 0.0;
    return d_[piece_of(x)];
  }

  /// G(x) = ω((-∞, x]).
  double cdf(double x) const {
    if (x <= b_.front()) return 0.0;
    if (x >= b_.back()) return mass_;
    const std::size_t k = piece_of(x);
    return std::min(cum_[k + 1], cum_[k] + d_[k] * (x - b_[k]));
  }

  /// Y(ζ) = inf{x : G(x) > ζ} for ζ ∈ [0, m). Zero-density gaps resolve to their right end.
  double pseudo_inverse(double zeta) const {
    if (!(zeta >= 0.0 && zeta < mass_))
      throw DomainError("pseudo-inverse argument " + std::to_string(zeta) + " outside [0, m)");
    const auto it = std::upper_bound(cum_.begin() + 1, cum_.end(), zeta);
    const auto k = static_cast<std::size_t>(it - (cum_.begin() + 1));
    return std::min(b_[k + 1], b_[k] + (zeta - cum_[k]) / d_[k]);
  }

  /// inf{x : G(x) >= ζ} for ζ ∈ (0, m], the left-continuous quantile.
  double lower_quantile(double zeta) const {
    if (!(zeta > 0.0 && zeta <= mass_))
      throw DomainError("lower quantile argument " + std::to_string(zeta) + " outside (0, m]");
    const auto it = std::lower_bound(cum_.begin() + 1, cum_.end(), zeta);
    const auto k = static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - (cum_.begin() + 1),
                                                                     static_cast<std::ptrdiff_t>(d_.size()) - 1));
    if (d_[k] == 0.0) return b_[k];
    return std::min(b_[k + 1], b_[k] + (zeta - cum_[k]) / d_[k]);
  }

  /// ∫ y ω(y) dy = ∫₀^m Y(ζ) dζ.
  double first_moment() const {
    double s = 0.0;
    for (std::size_t k = 0; k < d_.size(); ++k) s += 0.5 * d_[k] * (b_[k + 1] * b_[k + 1] - b_[k] * b_[k]);
    return s;
  }

  double center_of_mass() const { return first_moment() / mass_; }

  /// ∫ |y|^r ω(y) dy, exact.
  double absolute_moment(double r) const {
    const auto prim = [r](double u) { return std::copysign(std::pow(std::abs(u), r + 1.0), u) / (r + 1.0); };
    double s = 0.0;
    for (std::size_t k = 0; k < d_.size(); ++k) s += d_[k] * (prim(b_[k + 1]) - prim(b_[k]));
    return s;
  }

  /// ∫ |x - y|^s ω(y) dy, exact for s > -1.
  double abs_power_convolution(double s, double x) const {
    const auto prim = [s](double u) { return std::copysign(std::pow(std::abs(u), s + 1.0), u) / (s + 1.0); };
    double acc = 0.0;
    for (std::size_t k = 0; k < d_.size(); ++k) {
      if (d_[k] == 0.0) continue;
      acc += d_[k] * (prim(b_[k + 1] - x) - prim(b_[k] - x));
    }
    return acc;
  }

  /// ∫ sgn(x - y) |x - y|^s ω(y) dy, exact for s > -1.
  double signed_power_convolution(double s, double x) const {
    double acc = 0.0;
    for (std::size_t k = 0; k < d_.size(); ++k) {
      if (d_[k] == 0.0) continue;
      acc += d_[k] * (std::pow(std::abs(x - b_[k]), s + 1.0) - std::pow(std::abs(x - b_[k + 1]), s + 1.0));
    }
    return acc / (s + 1.0);
  }

 private:
  // Index k with b_k <= x < b_{k+1}; x must lie inside [b_0, b_K).
  std::size_t piece_of(double x) const {
    const auto it = std::upper_bound(b_.begin(), b_.end(), x);
    return std::min(static_cast<std::size_t>(it - b_.begin()) - 1, d_.size() - 1);
  }

  std::vector<double> b_;
  std::vector<double> d_;
  std::vector<double> cum_;
  double mass_ = 0.0;
  double bound_ = 0.0;
};

/// Quadrature ∫₀^m f(ζ) dζ ≈ Σ w_j f(ζ_j) over the mass variable.
class MassQuadrature {
 public:
  MassQuadrature(std::vector<double> nodes, std::vector<double> weights, double mass)
      : nodes_(std::move(nodes)), weights_(std::move(weights)), mass_(mass) {
    if (nodes_.empty() || nodes_.size() != weights_.size())
      throw ShapeError("quadrature needs matching, nonempty node and weight arrays");
    double total = 0.0;
    double carry = 0.0;
    for (std::size_t j = 0; j < nodes_.size(); ++j) {
      if (!(weights_[j] > 0.0)) throw InputError("quadrature weights must be positive");
      if (!(nodes_[j] > 0.0 && nodes_[j] < mass_)) throw InputError("quadrature nodes must lie in (0, m)");
      if (j > 0 && !(nodes_[j] > nodes_[j - 1])) throw InputError("quadrature nodes must be strictly increasing");
      const double next = total + weights_[j];
      carry += std::abs(total) >= std::abs(weights_[j]) ? (total - next) + weights_[j] : (weights_[j] - next) + total;
      total = next;
    }
    total += carry;
    if (std::abs(total - mass_) > 1e-12 * std::max(1.0, mass_))
      throw InputError("quadrature weights must sum to the profile mass");
  }

  /// ζ_j = (j - 1/2)·m/M, w_j = m/M.
  static MassQuadrature midpoint(double mass, std::size_t count) {
    if (count == 0) throw ShapeError("midpoint quadrature needs at least one node");
    std::vector<double> nodes(count);
    std::vector<double> weights(count, mass / static_cast<double>(count));
    for (std::size_t j = 0; j < count; ++j) nodes[j] = InverseCDF::node(j, count) * mass;
    return MassQuadrature(std::move(nodes), std::move(weights), mass);
  }

  std::size_t size() const noexcept { return nodes_.size(); }
  double mass() const noexcept { return mass_; }
  std::span<const double> nodes() const noexcept { return nodes_; }
  std::span<const double> weights() const noexcept { return weights_; }

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
  double mass_;
};

/// A reference profile together with a mass quadrature and the samples Y(ζ_j).
/// This is the discrete measure Σ_j w_j δ_{Y(ζ_j)} that every quadrature-based
/// evaluation of ω uses.
class SampledProfile {
 public:
  SampledProfile(ReferenceProfile profile, MassQuadrature quad)
      : profile_(std::move(profile)), quad_(std::move(quad)) {
    if (std::abs(quad_.mass() - profile_.mass()) > 1e-12 * std::max(1.0, profile_.mass()))
      throw ShapeError("quadrature mass differs from profile mass");
    samples_.resize(quad_.size());
    first_moment_ = 0.0;
    for (std::size_t j = 0; j < quad_.size(); ++j) {
      samples_[j] = profile_.pseudo_inverse(quad_.nodes()[j]);
      first_moment_ += quad_.weights()[j] * samples_[j];
    }
  }

  SampledProfile(const ReferenceProfile& profile, std::size_t count)
      : SampledProfile(profile, MassQuadrature::midpoint(profile.mass(), count)) {}

  const ReferenceProfile& profile() const noexcept { return profile_; }
  const MassQuadrature& quadrature() const noexcept { return quad_; }
  std::span<const double> samples() const noexcept { return samples_; }
  std::span<const double> weights() const noexcept { return quad_.weights(); }
  std::size_t size() const noexcept { return samples_.size(); }
  double mass() const noexcept { return profile_.mass(); }

  /// Σ w_j Y(ζ_j).
  double first_moment() const noexcept { return first_moment_; }
  /// Center of mass of the discrete measure; the equilibrium center for q_a = 2.
  double center_of_mass() const noexcept { return first_moment_ / profile_.mass(); }

 private:
  ReferenceProfile profile_;
  MassQuadrature quad_;
  std::vector<double> samples_;
  double first_moment_ = 0.0;
};

/// Σ_j w_j g(x - Y(ζ_j)) ≈ (g ∗ ω)(x).
template <class G>
double convolve_kernel(const SampledProfile& sampled, G&& g, double x) {
  const auto y = sampled.samples();
  const auto w = sampled.weights();
  double acc = 0.0;
  for (std::size_t j = 0; j < y.size(); ++j) acc += w[j] * g(x - y[j]);
  return acc;
}

template <class G>
double convolve_kernel(const ReferenceProfile& profile, const MassQuadrature& quad, G&& g, double x) {
  double acc = 0.0;
  for (std::size_t j = 0; j < quad.size(); ++j) acc += quad.weights()[j] * g(x - profile.pseudo_inverse(quad.nodes()[j]));
  return acc;
}

/// W_p between two measures on the same grid, ‖X_a - X_b‖ in L^p(0, 1).
/// For p = ∞ this is the grid maximum, a lower bound of the true sup.
inline double wasserstein(const InverseCDF& a, const InverseCDF& b, double p) {
  if (a.size() != b.size()) throw ShapeError("wasserstein needs equal grid sizes");
  if (!(p >= 1.0)) throw DomainError("wasserstein exponent must satisfy p >= 1");
  const std::size_t n = a.size();
  if (std::isinf(p)) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
  }
  double s = 0.0;
  if (p == 2.0) {
    for (std::size_t i = 0; i < n; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s / static_cast<double>(n));
  }
  for (std::size_t i = 0; i < n; ++i) s += std::pow(std::abs(a[i] - b[i]), p);
  return std::pow(s / static_cast<double>(n), 1.0 / p);
}

/// W_p(μ, δ_c).
inline double wasserstein_to_point(const InverseCDF& a, double c, double p) {
  if (!(p >= 1.0)) throw DomainError("wasserstein exponent must satisfy p >= 1");
  std::vector<double> shifted(a.size(), c);
  return wasserstein(a, InverseCDF(std::move(shifted)), p);
}

/// Midpoint-rule absolute moment (1/n) Σ |X_i|^r.
inline double moment(const InverseCDF& a, double r) {
  if (!(r > 0.0)) throw DomainError("moment order must be positive");
  double s = 0.0;
  for (double x : a.values()) s += std::pow(std::abs(x), r);
  return s / static_cast<double>(a.size());
}

/// μ([lo, hi]) for the grid measure; compare with G(hi) - G(lo) for vague convergence.
inline double windowed_mass(const InverseCDF& a, double lo, double hi) {
  const auto v = a.values();
  const auto first = std::lower_bound(v.begin(), v.end(), lo);
  const auto last = std::upper_bound(v.begin(), v.end(), hi);
  return static_cast<double>(std::max<std::ptrdiff_t>(0, last - first)) / static_cast<double>(a.size());
}

/// Pseudo-inverse of ω/m sampled on the grid; the natural initial datum built from a profile.
inline InverseCDF sample_normalized(const ReferenceProfile& profile, std::size_t n) {
  const double m = profile.mass();
  return InverseCDF::from_function(n, [&](double z) { return profile.pseudo_inverse(z * m); });
}

}  // namespace wgf
