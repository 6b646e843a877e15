#pragma once

// Least-squares slope on log-log data, with R².

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace mflab {

struct PowerFit {
  double exponent = 0.0;   // slope of log(y) vs log(x)
  double prefactor = 0.0;  // exp(intercept)
  double r_squared = 0.0;
};

inline PowerFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("fit_power_law: need >= 2 matching points");
  const std::size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0))
      throw std::invalid_argument("fit_power_law: data must be positive");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly; syy += ly * ly;
  }
  const double denom = n * sxx - sx * sx;
  PowerFit f;
  f.exponent = (n * sxy - sx * sy) / denom;
  f.prefactor = std::exp((sy - f.exponent * sx) / double(n));
  const double ss_tot = syy - sy * sy / double(n);
  double ss_res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double pred = std::log(f.prefactor) + f.exponent * std::log(x[i]);
    const double d = std::log(y[i]) - pred;
    ss_res += d * d;
  }
  f.r_squared = (ss_tot > 0.0) ? 1.0 - ss_res / ss_tot : 1.0;
  return f;
}

}  // namespace mflab
