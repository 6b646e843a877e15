#pragma once

// Charge-neutral smeared potential U and its Newtonian potential h.
// U is the uniform ball of radius N^{-β1} carrying the same L¹ mass as
// V_β; h solves Δh = V_β - U and vanishes outside the ball.  For
// piecewise-constant shells everything is closed form.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "radial.hpp"

namespace mflab {

struct SmearedPair {
  ScaledPotential V;
  double beta1 = 0.0;
  double U_height = 0.0;  // (3/4π)·||V_β||₁·N^{3β1}
  double U_radius = 0.0;  // N^{-β1}

  double U(double r) const { return (r < U_radius) ? U_height : 0.0; }
  double rho(double r) const { return V(r) - U(r); }

  // enclosed charge Q(r) = 4π ∫₀^r ρ s² ds, exact per shell
  double enclosed(double r) const {
    double q = 0.0, r_in = 0.0;
    for (const auto& sh : V.scaled.shells()) {
      const double hi = std::min(r, sh.r_out);
      if (hi > r_in) q += sh.value * (4.0 / 3.0) * pi * (hi * hi * hi - r_in * r_in * r_in);
      r_in = sh.r_out;
      if (r_in >= r) break;
    }
    const double hu = std::min(r, U_radius);
    q -= U_height * (4.0 / 3.0) * pi * hu * hu * hu;
    return q;
  }

  // outer moment 4π ∫_r^∞ ρ s ds, exact per shell
  double outer_moment(double r) const {
    double m = 0.0;
    double r_in = 0.0;
    for (const auto& sh : V.scaled.shells()) {
      const double lo = std::max(r, r_in);
      if (sh.r_out > lo) m += sh.value * 2.0 * pi * (sh.r_out * sh.r_out - lo * lo);
      r_in = sh.r_out;
    }
    const double lo = std::min(std::max(r, 0.0), U_radius);
    m -= U_height * 2.0 * pi * (U_radius * U_radius - lo * lo);
    return m;
  }

  // Newtonian potential with Δh = ρ:
  // h(r) = -(1/4π) [Q(r)/r + 4π ∫_r^∞ ρ s ds]
  double h(double r) const {
    if (r >= U_radius) return 0.0;
    if (r <= 0.0) return -outer_moment(0.0) / (4.0 * pi);
    return -(enclosed(r) / r + outer_moment(r)) / (4.0 * pi);
  }

  // Gauss: h'(r) = Q(r)/(4π r²)
  double dh(double r) const {
    if (r >= U_radius || r <= 0.0) return 0.0;
    return enclosed(r) / (4.0 * pi * r * r);
  }
};

inline SmearedPair build_smeared(const ScaledPotential& V, double beta1) {
  const double beta = V.exponent;
  if (beta1 < 0.0 || beta1 > beta)
    throw std::domain_error("build_smeared: need 0 <= beta1 <= beta");
  SmearedPair p;
  p.V = V;
  p.beta1 = beta1;
  const double N = double(V.N);
  p.U_radius = std::pow(N, -beta1);
  p.U_height = 3.0 / (4.0 * pi) * V.l1_norm() * std::pow(N, 3.0 * beta1);
  if (V.support_radius() > p.U_radius)
    throw std::domain_error("build_smeared: V support exceeds U radius; beta1 too large for this N");
  return p;
}

struct HNorms {
  double l2 = 0.0;
  double l3 = 0.0;
  double grad_l1 = 0.0;
  double grad_l2 = 0.0;
};

// Radial quadrature over [0, U_radius]; mesh aligned to shell boundaries
// plus refinement near the U boundary where |h| has the most curvature.
inline HNorms h_norms(const SmearedPair& p, std::size_t pts_per_region = 8001) {
  std::vector<double> bounds{0.0};
  for (const auto& sh : p.V.scaled.shells()) bounds.push_back(sh.r_out);
  bounds.push_back(p.U_radius);
  HNorms n;
  for (std::size_t b = 0; b + 1 < bounds.size(); ++b) {
    const double lo = bounds[b], hi = bounds[b + 1];
    if (hi <= lo) continue;
    const std::size_t m = pts_per_region | 1;
    const double step = (hi - lo) / double(m - 1);
    double s2 = 0, s3 = 0, g1 = 0, g2 = 0;
    for (std::size_t i = 0; i < m; ++i) {
      const double r = lo + step * double(i);
      const double w = (i == 0 || i == m - 1) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      const double jac = 4.0 * pi * r * r;
      const double h = p.h(r), dh = p.dh(r);
      s2 += w * h * h * jac;
      s3 += w * std::abs(h * h * h) * jac;
      g1 += w * std::abs(dh) * jac;
      g2 += w * dh * dh * jac;
    }
    n.l2 += s2 * step / 3.0;
    n.l3 += s3 * step / 3.0;
    n.grad_l1 += g1 * step / 3.0;
    n.grad_l2 += g2 * step / 3.0;
  }
  n.l2 = std::sqrt(n.l2);
  n.l3 = std::cbrt(n.l3);
  n.grad_l2 = std::sqrt(n.grad_l2);
  return n;
}

// Max over sampled interior nodes of |Δh - ρ| relative to ||ρ||, using the
// radial identity Δh = (r h)''/r on a uniform mesh.  Nodes whose stencil
// crosses a density jump are skipped: (r h) is cubic per shell, so the
// central second difference is exact away from the jumps.
inline double laplacian_residual(const SmearedPair& p, std::size_t mesh = 20001) {
  const double hi = p.U_radius;
  const double step = hi / double(mesh - 1);
  std::vector<double> boundary{p.U_radius};
  for (const auto& sh : p.V.scaled.shells()) boundary.push_back(sh.r_out);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 2; i + 2 < mesh; ++i) {
    const double r = step * double(i);
    bool near_jump = false;
    for (double b : boundary)
      if (std::abs(r - b) < 1.5 * step) near_jump = true;
    if (near_jump) continue;
    const double rm = r - step, rp = r + step;
    const double lap = (rp * p.h(rp) - 2.0 * r * p.h(r) + rm * p.h(rm)) / (step * step * r);
    const double d = lap - p.rho(r);
    num += d * d * r * r;
    den += p.rho(r) * p.rho(r) * r * r;
  }
  return std::sqrt(num / den);
}

}  // namespace mflab
