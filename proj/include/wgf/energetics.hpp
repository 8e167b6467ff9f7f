#pragma once

// Energy, dissipation and moment bounds.
//
//   E[μ] = ∫₀¹∫₀^m ψ_a(X(z) - Y(ζ)) dζ dz - ½ ∫₀¹∫₀¹ ψ_r(X(z) - X(ζ)) dζ dz
//   D[μ] = ∫₀¹ |∂_t X(z)|² dz
//
// All integrals over ω use the same discrete measure Σ w_j δ_{Y(ζ_j)} as the
// dynamics, so along a semi-discrete trajectory dE/dt = -D holds exactly.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "wgf/dynamics.hpp"
#include "wgf/error.hpp"
#include "wgf/kernels.hpp"
#include "wgf/measures.hpp"
#include "wgf/parallel.hpp"

namespace wgf {

namespace detail {

// ∫ ψ_a(x - y) dω(y) with the conventions of AttractionPotential.
inline double attraction_energy_density(const AttractionPotential& pot, double x) {
  const double q = pot.q_a();
  const SampledProfile& s = pot.sampled();
  if (q == 1.0) return s.profile().abs_power_convolution(1.0, x);
  const auto y = s.samples();
  const auto w = s.weights();
  if (q == 2.0) {
    const double ybar = s.center_of_mass();
    double spread = 0.0;
    for (std::size_t j = 0; j < y.size(); ++j) spread += w[j] * (y[j] - ybar) * (y[j] - ybar);
    return s.mass() * (x - ybar) * (x - ybar) + spread;
  }
  double acc = 0.0;
  for (std::size_t j = 0; j < y.size(); ++j) acc += w[j] * std::pow(std::abs(x - y[j]), q);
  return acc;
}

// (1/(2n²)) Σ_i Σ_j ψ_r(x_i - x_j) for sorted x.
inline double repulsion_energy(std::span<const double> x, double q_r) {
  const std::size_t n = x.size();
  const double nn = static_cast<double>(n) * static_cast<double>(n);
  if (q_r == 1.0) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * (2.0 * static_cast<double>(i) - static_cast<double>(n) + 1.0);
    return acc / nn;
  }
  if (q_r == 2.0) {
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double v : x) var += (v - mean) * (v - mean);
    return var / static_cast<double>(n);
  }
  std::vector<double> rows(n, 0.0);
  parallel_for(n, [&](std::size_t i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < i; ++j) acc += std::pow(x[i] - x[j], q_r);
    rows[i] = acc;
  });
  double acc = 0.0;
  for (double r : rows) acc += r;
  return acc / nn;
}

// Signed atoms of μ - ω, sorted by position, coincident positions merged.
struct Atoms {
  std::vector<double> x;
  std::vector<double> a;
};

inline Atoms signed_atoms(const InverseCDF& X, const SampledProfile& sampled) {
  std::vector<std::pair<double, double>> raw;
  raw.reserve(X.size() + sampled.size());
  const double w_mu = 1.0 / static_cast<double>(X.size());
  for (double v : X.values()) raw.emplace_back(v, w_mu);
  for (std::size_t j = 0; j < sampled.size(); ++j) raw.emplace_back(sampled.samples()[j], -sampled.weights()[j]);
  std::sort(raw.begin(), raw.end());
  Atoms out;
  for (const auto& [pos, w] : raw) {
    if (!out.x.empty() && out.x.back() == pos)
      out.a.back() += w;
    else {
      out.x.push_back(pos);
      out.a.push_back(w);
    }
  }
  return out;
}

}  // namespace detail

/// Discrete energy E = (1/n)Σ_i Σ_j w_j ψ_a(X_i - Y_j) - (1/(2n²))Σ_i Σ_j ψ_r(X_i - X_j).
/// For q_a = 1 the attraction integral is evaluated exactly from the profile.
inline double energy(const InverseCDF& X, const AttractionPotential& pot, const Exponents& exps) {
  detail::check_consistent(pot, exps);
  const std::size_t n = X.size();
  std::vector<double> a(n);
  parallel_for(n, [&](std::size_t i) { a[i] = detail::attraction_energy_density(pot, X[i]); });
  double attraction = 0.0;
  for (double v : a) attraction += v;
  attraction /= static_cast<double>(n);
  return attraction - detail::repulsion_energy(X.values(), exps.q_r());
}

inline double dissipation_from_velocity(std::span<const double> v) {
  double acc = 0.0;
  for (double vi : v) acc += vi * vi;
  return acc / static_cast<double>(v.size());
}

/// D = (1/n) Σ_i V_i² with V = rhs(X). For q_r = 1 this is a formal extension.
inline double dissipation(const InverseCDF& X, const AttractionPotential& pot, const Exponents& exps) {
  return dissipation_from_velocity(rhs(X, pot, exps));
}

struct EnergyReport {
  double t = 0.0;
  double E = 0.0;
  double D = 0.0;
  std::optional<double> E_hat;
  double moment_qa = 0.0;
  double moment_r = 0.0;
  /// Order r used for moment_r.
  double r = 0.0;
};

/// |E(0) - E(T) - ∫₀^T D dt| with the trapezoid rule over the report times.
inline double energy_balance(std::span<const EnergyReport> reports) {
  if (reports.size() < 2) throw InputError("energy balance needs at least two snapshots");
  double integral = 0.0;
  for (std::size_t k = 1; k < reports.size(); ++k)
    integral += 0.5 * (reports[k].t - reports[k - 1].t) * (reports[k].D + reports[k - 1].D);
  return std::abs(reports.front().E - reports.back().E - integral);
}

/// D_q = -(2π)^{-1/2} 2^{q+1/2} Γ((1+q)/2) / (2Γ(-q/2)), the one-dimensional
/// constant of the generalized Fourier transform of |x|^q, 1 < q < 2.
inline double fourier_constant(double q) {
  if (!(q > 1.0 && q < 2.0)) throw DomainError("Fourier constant needs 1 < q < 2");
  return -std::pow(2.0 * std::numbers::pi, -0.5) * std::pow(2.0, q + 0.5) * std::tgamma(0.5 * (1.0 + q)) /
         (2.0 * std::tgamma(-0.5 * q));
}

/// Ẽ[μ] = -½ ∬ ψ_q d[μ-ω] d[μ-ω] by direct double sums over the discrete measures.
inline double relative_energy(const InverseCDF& X, const SampledProfile& sampled, double q) {
  detail::check_exponent(q);
  const detail::Atoms atoms = detail::signed_atoms(X, sampled);
  const std::size_t k = atoms.x.size();
  std::vector<double> rows(k, 0.0);
  parallel_for(k, [&](std::size_t i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < i; ++j) acc += atoms.a[j] * std::pow(atoms.x[i] - atoms.x[j], q);
    rows[i] = atoms.a[i] * acc;
  });
  double acc = 0.0;
  for (double r : rows) acc += r;
  return -acc;
}

/// ½ ∬ ψ_q dω dω for the discrete ω; E = Ẽ + C in the balanced case.
inline double self_interaction(const SampledProfile& sampled, double q) {
  const auto y = sampled.samples();
  const auto w = sampled.weights();
  double acc = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i)
    for (std::size_t j = 0; j < i; ++j) acc += w[i] * w[j] * psi(q, y[i] - y[j]);
  return acc;
}

struct FourierGrid {
  /// Upper frequency cutoff Ξ; the tail beyond it is corrected analytically.
  double xi_max = 4000.0;
  /// Panel width in units of 1/diameter of the combined support.
  double panel_scale = 2.0;
  /// Panels on the substituted low-frequency segment [0, ξ₀].
  std::size_t low_panels = 8;
};

struct FourierEnergy {
  double value = 0.0;
  /// Bound on the part of the tail not captured by the analytic correction.
  double tail_bound = 0.0;
};

/// Ê[μ] = D_q ∫ |μ̂(ξ) - ω̂(ξ)|² |ξ|^{-1-q} dξ for the discrete measures.
///
/// The integrand is even. On [0, ξ₀] the substitution ξ = ξ₀ u^{1/(2-q)} absorbs
/// the |ξ|^{1-q} behaviour at the origin; [ξ₀, Ξ] uses Gauss–Legendre panels no
/// wider than panel_scale/L (L the support diameter); beyond Ξ the mean value
/// Σ a_k² of |μ̂ - ω̂|² gives the tail 2 Σa_k² Ξ^{-q}/q.
inline FourierEnergy fourier_energy(const InverseCDF& X, const SampledProfile& sampled, double q,
                                    const FourierGrid& grid = {}) {
  if (std::abs(sampled.mass() - 1.0) > 1e-12)
    throw PreconditionError("Fourier energy needs a reference profile of unit mass");
  const double dq = fourier_constant(q);
  detail::Atoms atoms = detail::signed_atoms(X, sampled);
  const double lo = atoms.x.front();
  const double hi = atoms.x.back();
  const double diameter = hi - lo;
  double sum_sq = 0.0;
  double sum_abs = 0.0;
  for (double a : atoms.a) {
    sum_sq += a * a;
    sum_abs += std::abs(a);
  }
  if (!(diameter > 0.0) || sum_abs == 0.0) return {0.0, 0.0};
  const double center = 0.5 * (lo + hi);
  for (double& x : atoms.x) x -= center;

  // |F(ξ)|² with F(ξ) = Σ a_k (e^{-iξx_k} - 1), accurate for small ξ.
  const auto spectrum = [&](double xi) {
    double re = 0.0;
    double im = 0.0;
    for (std::size_t k = 0; k < atoms.x.size(); ++k) {
      const double h = std::sin(0.5 * xi * atoms.x[k]);
      re -= atoms.a[k] * 2.0 * h * h;
      im -= atoms.a[k] * std::sin(xi * atoms.x[k]);
    }
    return re * re + im * im;
  };

  using gl = boost::math::quadrature::gauss<double, 10>;
  const double xi0 = std::min(1.0, 1.0 / diameter);
  const double s = 2.0 - q;
  double low = 0.0;
  const double du = 1.0 / static_cast<double>(grid.low_panels);
  for (std::size_t p = 0; p < grid.low_panels; ++p) {
    low += gl::integrate(
        [&](double u) {
          const double xi = xi0 * std::pow(u, 1.0 / s);
          return spectrum(xi) / (xi * xi);
        },
        static_cast<double>(p) * du, static_cast<double>(p + 1) * du);
  }
  low *= std::pow(xi0, s) / s;

  const double xi_max = std::max(grid.xi_max, 2.0 * xi0);
  const double width_cap = grid.panel_scale / diameter;
  std::vector<double> edges{xi0};
  while (edges.back() < xi_max) edges.push_back(std::min(xi_max, edges.back() + std::min(0.5 * edges.back(), width_cap)));
  std::vector<double> panel(edges.size() - 1);
  parallel_for(panel.size(), [&](std::size_t p) {
    panel[p] = gl::integrate([&](double xi) { return spectrum(xi) * std::pow(xi, -1.0 - q); }, edges[p], edges[p + 1]);
  });
  double mid = 0.0;
  for (double v : panel) mid += v;

  const double tail = sum_sq * std::pow(xi_max, -q) / q;
  FourierEnergy out;
  out.value = dq * 2.0 * (low + mid + tail);
  out.tail_bound = dq * 2.0 * (sum_abs * sum_abs - sum_sq) * std::pow(xi_max, -q) / q;
  return out;
}

struct ReportOptions {
  /// Compute Ê (balanced exponents in (1, 2) and unit mass only).
  bool fourier = false;
  /// Order of the moment_r diagnostic.
  double r = 0.5;
  FourierGrid grid;
};

inline EnergyReport make_report(const FlowState& state, const AttractionPotential& pot, const Exponents& exps,
                                const ReportOptions& opts = {}) {
  EnergyReport rep;
  rep.t = state.t;
  rep.E = energy(state.X, pot, exps);
  rep.D = state.velocity.size() == state.X.size() ? dissipation_from_velocity(state.velocity)
                                                  : dissipation(state.X, pot, exps);
  if (opts.fourier) {
    if (exps.regime() != Regime::balanced) throw PreconditionError("Fourier energy needs q_a = q_r");
    rep.E_hat = fourier_energy(state.X, pot.sampled(), exps.q_a(), opts.grid).value;
  }
  rep.moment_qa = moment(state.X, exps.q_a());
  rep.moment_r = moment(state.X, opts.r);
  rep.r = opts.r;
  return rep;
}

inline std::vector<EnergyReport> report_trajectory(const Trajectory& traj, const AttractionPotential& pot,
                                                   const Exponents& exps, const ReportOptions& opts = {}) {
  std::vector<EnergyReport> out;
  out.reserve(traj.snapshots.size());
  for (const FlowState& s : traj.snapshots) out.push_back(make_report(s, pot, exps, opts));
  return out;
}

struct MomentCertificate {
  bool pass = false;
  /// A-priori bound M' computed from E(0).
  double bound = 0.0;
  double max_moment = 0.0;
  /// Order of the certified moment (q_a, or r in the balanced case).
  double order = 0.0;
  std::size_t worst_index = 0;
  bool energy_monotone = true;
};

/// c_r = 1 / ∫_ℝ (1 - cos u)|u|^{-1-r} du, so that ∫|x|^r dμ = c_r ∫ (1 - Re μ̂)|ξ|^{-1-r} dξ.
inline double moment_fourier_constant(double r) {
  if (!(r > 0.0 && r < 1.0)) throw DomainError("moment Fourier constant needs 0 < r < 1");
  return r / (2.0 * std::tgamma(1.0 - r) * std::cos(0.5 * std::numbers::pi * r));
}

/// Checks every report's moment against the a-priori bound implied by E(0).
///
/// Attraction-dominated (q_a > q_r), order q_a:
///   M' = (4/m)(E(0) + ∫|y|^{q_a} dω + 2R^{q_r}),  R = (8/m)^{1/(q_a - q_r)}.
/// Balanced (1 < q < 2, m = 1), order 0 < r < q/2:
///   M'' = 2(Ẽ(0) + Ẽ[δ₀]) / D_q,  M' = c_r ( (2/(q - 2r))^{1/2} (M'')^{1/2} + 4/r ),
/// splitting the frequency integral at |ξ| = 1 and using |μ̂ - 1| <= 2 outside.
inline MomentCertificate moment_certificate(std::span<const EnergyReport> reports, const Exponents& exps,
                                            const AttractionPotential& pot, double r = 0.0) {
  detail::check_consistent(pot, exps);
  if (reports.empty()) throw InputError("moment certificate needs at least one report");
  const SampledProfile& s = pot.sampled();
  const double m = s.mass();
  const double e0 = reports.front().E;
  MomentCertificate cert;

  if (exps.regime() == Regime::attraction_dominated) {
    const double qa = exps.q_a();
    const double qr = exps.q_r();
    double omega_moment = 0.0;
    if (qa == 1.0) {
      omega_moment = s.profile().absolute_moment(1.0);
    } else {
      for (std::size_t j = 0; j < s.size(); ++j) omega_moment += s.weights()[j] * std::pow(std::abs(s.samples()[j]), qa);
    }
    const double radius = std::pow(8.0 / m, 1.0 / (qa - qr));
    cert.bound = 4.0 / m * (e0 + omega_moment + 2.0 * std::pow(radius, qr));
    cert.order = qa;
  } else {
    const double q = exps.q_a();
    if (!(q > 1.0 && q < 2.0)) throw PreconditionError("balanced moment certificate needs 1 < q < 2");
    if (std::abs(m - 1.0) > 1e-12) throw PreconditionError("balanced moment certificate needs unit mass");
    if (!(r > 0.0 && r < 0.5 * q)) throw PreconditionError("balanced moment certificate needs 0 < r < q/2");
    for (const EnergyReport& rep : reports)
      if (rep.r != r) throw PreconditionError("reports carry moments of a different order than requested");
    const double c = self_interaction(s, q);
    double omega_moment = 0.0;
    for (std::size_t j = 0; j < s.size(); ++j) omega_moment += s.weights()[j] * std::pow(std::abs(s.samples()[j]), q);
    const double e_rel = std::max(0.0, e0 - c);
    const double e_delta = std::max(0.0, omega_moment - c);
    const double m2 = 2.0 * (e_rel + e_delta) / fourier_constant(q);
    cert.bound = moment_fourier_constant(r) * (std::sqrt(2.0 / (q - 2.0 * r)) * std::sqrt(m2) + 4.0 / r);
    cert.order = r;
  }

  const double slack = 1e-10 * std::max(1.0, std::abs(e0));
  for (std::size_t k = 0; k < reports.size(); ++k) {
    const double mom = exps.regime() == Regime::attraction_dominated ? reports[k].moment_qa : reports[k].moment_r;
    if (mom >= cert.max_moment) {
      cert.max_moment = mom;
      cert.worst_index = k;
    }
    if (reports[k].E > e0 + slack) cert.energy_monotone = false;
  }
  cert.pass = cert.energy_monotone && cert.max_moment <= cert.bound;
  return cert;
}

}  // namespace wgf
