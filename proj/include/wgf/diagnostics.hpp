#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>

#include "wgf/error.hpp"

namespace wgf {

struct RateFit {
  /// Slope of log y against t.
  double rate = std::numeric_limits<double>::quiet_NaN();
  double intercept = std::numeric_limits<double>::quiet_NaN();
  double r2 = std::numeric_limits<double>::quiet_NaN();
  std::size_t points = 0;

  bool valid() const { return points >= 2 && std::isfinite(rate); }
};

/// Ordinary least squares of log y on t over t ∈ [t_lo, t_hi]; samples with y <= floor are skipped.
inline RateFit fit_log_rate(std::span<const double> t, std::span<const double> y, double t_lo, double t_hi,
                            double floor = 1e-14) {
  if (t.size() != y.size()) throw ShapeError("rate fit needs equally many times and values");
  double st = 0.0, sy = 0.0;
  std::size_t k = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_lo || t[i] > t_hi || !(y[i] > floor)) continue;
    st += t[i];
    sy += std::log(y[i]);
    ++k;
  }
  RateFit fit;
  fit.points = k;
  if (k < 2) return fit;
  const double mt = st / static_cast<double>(k);
  const double my = sy / static_cast<double>(k);
  double stt = 0.0, sty = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_lo || t[i] > t_hi || !(y[i] > floor)) continue;
    const double dt = t[i] - mt;
    const double dy = std::log(y[i]) - my;
    stt += dt * dt;
    sty += dt * dy;
    syy += dy * dy;
  }
  if (!(stt > 0.0)) return fit;
  fit.rate = sty / stt;
  fit.intercept = my - fit.rate * mt;
  fit.r2 = syy > 0.0 ? sty * sty / (stt * syy) : 1.0;
  return fit;
}

}  // namespace wgf
