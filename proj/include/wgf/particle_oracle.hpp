#pragma once

// Discrete dithering energy
//
//   E_N[p] = -(1/(2N²)) Σ_i Σ_j ψ_r(p_i - p_j) + (1/N) Σ_i ∫ ψ_a(p_i - x) dω(x)
//
// and its scaled particle gradient flow dp_i/dt = -N ∂E_N/∂p_i. The integrals
// against ω use the discrete measure Σ_j w_j δ_{Y(ζ_j)}, evaluated by plain
// double loops without any of the closed forms used by the continuum solver.

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "wgf/error.hpp"
#include "wgf/kernels.hpp"
#include "wgf/measures.hpp"

namespace wgf {

class ParticleSystem {
 public:
  explicit ParticleSystem(std::vector<double> p) : p_(std::move(p)) {
    if (p_.empty()) throw ShapeError("particle system needs at least one particle");
    for (std::size_t i = 0; i < p_.size(); ++i) {
      if (!std::isfinite(p_[i])) throw StateError("particle " + std::to_string(i) + " is not finite");
      if (i > 0 && p_[i] < p_[i - 1]) throw StateError("particles must be sorted nondecreasing");
    }
  }

  /// Particles at the grid values p_i = X(z_i).
  explicit ParticleSystem(const InverseCDF& X) : ParticleSystem(X.vector()) {}

  std::size_t size() const noexcept { return p_.size(); }
  double operator[](std::size_t i) const { return p_[i]; }
  const std::vector<double>& positions() const noexcept { return p_; }

 private:
  std::vector<double> p_;
};

inline double discrete_energy(const ParticleSystem& sys, const SampledProfile& omega, const Exponents& exps) {
  const std::size_t n = sys.size();
  const double N = static_cast<double>(n);
  const auto y = omega.samples();
  const auto w = omega.weights();
  double attraction = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < y.size(); ++j) acc += w[j] * psi(exps.q_a(), sys[i] - y[j]);
    attraction += acc;
  }
  double repulsion = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) repulsion += psi(exps.q_r(), sys[i] - sys[j]);
  return attraction / N - repulsion / (2.0 * N * N);
}

inline double discrete_energy(const ParticleSystem& sys, const ReferenceProfile& profile, const Exponents& exps,
                              std::size_t quadrature_nodes) {
  return discrete_energy(sys, SampledProfile(profile, quadrature_nodes), exps);
}

/// -N ∂E_N/∂p_i = -Σ_j w_j ψ_a'(p_i - Y_j) + (1/N) Σ_j ψ_r'(p_i - p_j).
inline std::vector<double> particle_rhs(const ParticleSystem& sys, const SampledProfile& omega, const Exponents& exps) {
  const std::size_t n = sys.size();
  if (exps.q_r() == 1.0) {
    for (std::size_t i = 1; i < n; ++i)
      if (sys[i] == sys[i - 1])
        throw SubdifferentialError("coinciding particles at index " + std::to_string(i) +
                                   ": the q_r = 1 gradient is set-valued there");
  }
  const auto y = omega.samples();
  const auto w = omega.weights();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double attraction = 0.0;
    for (std::size_t j = 0; j < y.size(); ++j) attraction += w[j] * psi_prime(exps.q_a(), sys[i] - y[j]);
    double repulsion = 0.0;
    for (std::size_t j = 0; j < n; ++j) repulsion += psi_prime(exps.q_r(), sys[i] - sys[j]);
    out[i] = repulsion / static_cast<double>(n) - attraction;
  }
  return out;
}

inline std::vector<double> particle_rhs(const ParticleSystem& sys, const ReferenceProfile& profile,
                                        const Exponents& exps, std::size_t quadrature_nodes) {
  return particle_rhs(sys, SampledProfile(profile, quadrature_nodes), exps);
}

}  // namespace wgf
