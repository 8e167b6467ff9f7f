#pragma once

// Power kernels ψ(x) = |x|^q, q ∈ [1, 2], and the attraction potential U = ψ_a' ∗ ω.

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>

#include "wgf/error.hpp"
#include "wgf/measures.hpp"
#include "wgf/parallel.hpp"

namespace wgf {

namespace detail {
inline void check_exponent(double q) {
  if (!(q >= 1.0 && q <= 2.0))
    throw DomainError("kernel exponent " + std::to_string(q) + " outside the admissible range [1,2]");
}
}  // namespace detail

enum class Regime { attraction_dominated, balanced };

/// Attraction and repulsion exponents with 1 <= q_r <= q_a <= 2.
class Exponents {
 public:
  Exponents(double q_a, double q_r) : q_a_(q_a), q_r_(q_r) {
    detail::check_exponent(q_a);
    detail::check_exponent(q_r);
    if (q_r > q_a)
      throw DomainError("repulsion-dominated exponents (q_r > q_a) are not supported; need 1 <= q_r <= q_a <= 2");
  }

  double q_a() const noexcept { return q_a_; }
  double q_r() const noexcept { return q_r_; }
  Regime regime() const noexcept { return q_r_ < q_a_ ? Regime::attraction_dominated : Regime::balanced; }

 private:
  double q_a_;
  double q_r_;
};

inline double psi(double q, double x) {
  detail::check_exponent(q);
  if (q == 1.0) return std::abs(x);
  if (q == 2.0) return x * x;
  return std::pow(std::abs(x), q);
}

/// ψ'(x) = q sgn(x) |x|^{q-1}, with ψ'(0) = 0 for every q (sgn(0) = 0 when q = 1).
inline double psi_prime(double q, double x) {
  detail::check_exponent(q);
  if (x == 0.0) return 0.0;
  if (q == 2.0) return 2.0 * x;
  if (q == 1.0) return x > 0.0 ? 1.0 : -1.0;
  return std::copysign(q * std::pow(std::abs(x), q - 1.0), x);
}

/// ψ''(x) = q(q-1)|x|^{q-2}; singular at 0 unless q = 2.
inline double psi_double_prime(double q, double x) {
  detail::check_exponent(q);
  if (q == 2.0) return 2.0;
  if (x == 0.0) throw SingularityError("psi'' is singular at the origin for q < 2");
  if (q == 1.0) return 0.0;
  return q * (q - 1.0) * std::pow(std::abs(x), q - 2.0);
}

namespace detail {
// ψ'(d) for the exponent range (1, 2); no validation, used in inner loops.
inline double power_derivative(double q, double d) {
  if (d == 0.0) return 0.0;
  return std::copysign(q * std::pow(std::abs(d), q - 1.0), d);
}
}  // namespace detail

/// U = ψ_a' ∗ ω with its Lipschitz bound λ.
///
/// q_a = 1 uses the exact form U = 2G - m; q_a = 2 the exact affine form
/// U(x) = 2(m x - Σ w_j Y_j); every other exponent the mass quadrature
/// Σ_j w_j ψ_a'(x - Y(ζ_j)).
class AttractionPotential {
 public:
  AttractionPotential(SampledProfile sampled, double q_a) : sampled_(std::move(sampled)), q_a_(q_a) {
    detail::check_exponent(q_a);
    const double m = sampled_.mass();
    const double bound = sampled_.profile().density_bound();
    if (q_a_ == 1.0)
      lambda_ = 2.0 * bound;
    else if (q_a_ == 2.0)
      lambda_ = 2.0 * m;
    else
      lambda_ = q_a_ * (q_a_ - 1.0) * (2.0 / (q_a_ - 1.0) * bound + m);
  }

  /// Midpoint mass quadrature with the given number of nodes.
  AttractionPotential(const ReferenceProfile& profile, double q_a, std::size_t nodes)
      : AttractionPotential(SampledProfile(profile, nodes), q_a) {}

  double operator()(double x) const {
    if (q_a_ == 1.0) return 2.0 * sampled_.profile().cdf(x) - sampled_.mass();
    if (q_a_ == 2.0) return 2.0 * (sampled_.mass() * x - sampled_.first_moment());
    const auto y = sampled_.samples();
    const auto w = sampled_.weights();
    double acc = 0.0;
    for (std::size_t j = 0; j < y.size(); ++j) acc += w[j] * detail::power_derivative(q_a_, x - y[j]);
    return acc;
  }

  /// out[i] = U(x[i]).
  void evaluate(std::span<const double> x, std::span<double> out) const {
    if (x.size() != out.size()) throw ShapeError("attraction potential: output size mismatch");
    parallel_for(x.size(), [&](std::size_t i) { out[i] = (*this)(x[i]); });
  }

  double q_a() const noexcept { return q_a_; }
  double lambda() const noexcept { return lambda_; }
  double mass() const noexcept { return sampled_.mass(); }
  const SampledProfile& sampled() const noexcept { return sampled_; }
  const ReferenceProfile& profile() const noexcept { return sampled_.profile(); }

 private:
  SampledProfile sampled_;
  double q_a_;
  double lambda_ = 0.0;
};

inline double attraction_U(const AttractionPotential& pot, double x) { return pot(x); }

/// Lipschitz bound of U; any valid upper bound serves as the step-size guard.
inline double lipschitz_lambda(const AttractionPotential& pot) { return pot.lambda(); }

}  // namespace wgf
