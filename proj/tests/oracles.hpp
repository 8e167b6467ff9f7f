#pragma once

// Reference computations used only by the tests. Each one is derived
// independently of the library: closed forms integrated by hand, brute-force
// sums, or general-purpose adaptive quadrature.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace oracle {

/// Piecewise-constant density given as intervals [a_k, b_k) with density d_k.
struct Piece {
  double a;
  double b;
  double d;
};

inline std::vector<Piece> pieces(const std::vector<double>& breaks, const std::vector<double>& dens) {
  std::vector<Piece> out;
  for (std::size_t k = 0; k < dens.size(); ++k) out.push_back({breaks[k], breaks[k + 1], dens[k]});
  return out;
}

inline double mass(const std::vector<Piece>& p) {
  double m = 0.0;
  for (const Piece& q : p) m += q.d * (q.b - q.a);
  return m;
}

inline double cdf(const std::vector<Piece>& p, double x) {
  double m = 0.0;
  for (const Piece& q : p) m += q.d * std::clamp(x - q.a, 0.0, q.b - q.a);
  return m;
}

/// inf{x : G(x) > ζ} by bisection on the CDF.
inline double quantile(const std::vector<Piece>& p, double zeta) {
  double lo = p.front().a - 1.0;
  double hi = p.back().b + 1.0;
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (cdf(p, mid) > zeta)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

/// U(x) = ∫ ψ_q'(x - y) ω(y) dy from the antiderivative (|x - a|^q - |x - b|^q) per piece.
inline double potential(const std::vector<Piece>& p, double q, double x) {
  double u = 0.0;
  for (const Piece& s : p) u += s.d * (std::pow(std::abs(x - s.a), q) - std::pow(std::abs(x - s.b), q));
  return u;
}

/// ∫ |x - y|^s ω(y) dy by tanh-sinh quadrature on each piece, split at x.
inline double abs_power_integral(const std::vector<Piece>& p, double s, double x) {
  boost::math::quadrature::tanh_sinh<double> ts;
  double acc = 0.0;
  for (const Piece& q : p) {
    // Integrate in the distance variable so the possible singularity sits at an endpoint exactly.
    const auto f = [s](double u) { return std::pow(u, s); };
    const auto part = [&](double lo, double hi) { return hi > lo ? ts.integrate(f, lo, hi) : 0.0; };
    if (x > q.a && x < q.b) {
      acc += q.d * (part(0.0, x - q.a) + part(0.0, q.b - x));
    } else if (x <= q.a) {
      acc += q.d * part(q.a - x, q.b - x);
    } else {
      acc += q.d * part(x - q.b, x - q.a);
    }
  }
  return acc;
}

/// K_q = ∫_ℝ (1 - cos u) |u|^{-1-q} du by numerical quadrature.
inline double cosine_kernel_integral(double q) {
  using gk = boost::math::quadrature::gauss_kronrod<double, 61>;
  const auto f = [q](double u) { return (1.0 - std::cos(u)) * std::pow(u, -1.0 - q); };
  // Near 0 use 2 sin²(u/2) to avoid cancellation; the tail beyond T has
  // ∫_T^∞ u^{-1-q} du = T^{-q}/q minus an oscillatory part, integrated panel by panel.
  const auto g = [q](double u) {
    const double h = std::sin(0.5 * u) / u;
    return 2.0 * h * h * std::pow(u, 1.0 - q);
  };
  double acc = 0.0;
  double a = 0.0;
  const double period = 2.0 * std::numbers::pi;
  boost::math::quadrature::tanh_sinh<double> ts;
  acc += ts.integrate(g, 0.0, period);
  a = period;
  const int panels = 20000;
  for (int k = 0; k < panels; ++k) {
    acc += gk::integrate(f, a, a + period, 5, 1e-15);
    a += period;
  }
  // Tail: ∫_a^∞ u^{-1-q} du minus ∫_a^∞ cos u · u^{-1-q} du; the latter is O(a^{-1-q}) and dropped.
  acc += std::pow(a, -q) / q;
  return 2.0 * acc;
}

/// D = (1/n) Σ_i V_i² expanded into triple sums over ψ_r' and ψ_a' products.
inline double dissipation_triple(const std::vector<double>& x, const std::vector<double>& y,
                                 const std::vector<double>& w, double qa, double qr) {
  const auto dpsi = [](double q, double d) {
    if (d == 0.0) return 0.0;
    return q * std::pow(std::abs(d), q - 1.0) * (d > 0.0 ? 1.0 : -1.0);
  };
  const std::size_t n = x.size();
  const double N = static_cast<double>(n);
  double rr = 0.0, ra = 0.0, aa = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) rr += dpsi(qr, x[i] - x[j]) * dpsi(qr, x[i] - x[k]);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t l = 0; l < y.size(); ++l) ra += w[l] * dpsi(qr, x[i] - x[j]) * dpsi(qa, x[i] - y[l]);
    for (std::size_t l = 0; l < y.size(); ++l)
      for (std::size_t k = 0; k < y.size(); ++k) aa += w[l] * w[k] * dpsi(qa, x[i] - y[l]) * dpsi(qa, x[i] - y[k]);
  }
  return rr / (N * N * N) - 2.0 * ra / (N * N) + aa / N;
}

/// Random nondecreasing vector with n entries starting near `start` and spread about `width`.
inline std::vector<double> random_monotone(std::mt19937_64& rng, std::size_t n, double start, double width) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> x(n);
  double acc = start;
  for (double& v : x) {
    acc += 2.0 * width * unit(rng) / static_cast<double>(n);
    v = acc;
  }
  return x;
}

}  // namespace oracle
