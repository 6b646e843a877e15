#pragma once

// Radial zero-energy scattering: u'' = ½(V - W) u with u(0)=0, u'(0)=1.
// Piecewise-constant potentials admit exact per-shell propagation
// (sinh/cosh for repulsive pieces, sin/cos on the attractive well), so
// the scattering length and the flatness construction carry no
// integrator error.

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "radial.hpp"

namespace mflab {

// State (u, u') of the radial equation.
struct RadialState {
  double u = 0.0;
  double du = 0.0;
};

// Propagate u'' = ½ c u over a distance dr with constant c.
inline RadialState propagate_const(RadialState s, double c, double dr) {
  if (dr == 0.0) return s;
  if (c > 0.0) {
    const double k = std::sqrt(0.5 * c);
    const double ch = std::cosh(k * dr), sh = std::sinh(k * dr);
    return {s.u * ch + s.du / k * sh, s.u * k * sh + s.du * ch};
  }
  if (c < 0.0) {
    const double k = std::sqrt(-0.5 * c);
    const double cs = std::cos(k * dr), sn = std::sin(k * dr);
    return {s.u * cs + s.du / k * sn, -s.u * k * sn + s.du * cs};
  }
  return {s.u + s.du * dr, s.du};
}

// Propagate outward from r=0 through all shells of V; returns state at
// the support radius.
inline RadialState propagate_profile(const RadialProfile& V) {
  RadialState s{0.0, 1.0};
  double r = 0.0;
  for (const auto& sh : V.shells()) {
    s = propagate_const(s, sh.value, sh.r_out - r);
    r = sh.r_out;
  }
  return s;
}

// Scattering length: beyond the support u(r) = c (r - a); a = r - u/u'.
inline double scat(const RadialProfile& V) {
  if (V.shells().empty()) return 0.0;
  const RadialState s = propagate_profile(V);
  if (s.du <= 0.0) throw std::runtime_error("scat: non-positive outgoing slope");
  return V.support_radius() - s.u / s.du;
}

inline double scat(const ScaledPotential& V) { return scat(V.scaled); }

// Zero-energy profile f(r) = u(r)/(c r), normalized so f -> 1 outside.
struct ScatteringProfile {
  std::vector<double> r;
  std::vector<double> u;        // unnormalized radial solution
  double norm_slope = 1.0;      // c with u(r) = c (r - a) outside (no W)
  double scat_length = 0.0;
  double K = 1.0;               // matching constant to the bare state
  double R_flat = 0.0;          // radius beyond which f == 1

  double f(std::size_t i) const { return u[i] / (norm_slope * r[i]); }
};

// Tabulate u on a mesh with nodes aligned to shell boundaries.
inline void tabulate(const RadialProfile& V, double r_max, std::size_t min_pts,
                     std::vector<double>& rs, std::vector<double>& us) {
  std::vector<double> bounds{0.0};
  for (const auto& sh : V.shells())
    if (sh.r_out < r_max) bounds.push_back(sh.r_out);
  bounds.push_back(r_max);
  rs.clear();
  us.clear();
  RadialState s{0.0, 1.0};
  rs.push_back(0.0);
  us.push_back(0.0);
  for (std::size_t b = 0; b + 1 < bounds.size(); ++b) {
    const double len = bounds[b + 1] - bounds[b];
    const std::size_t n = std::max<std::size_t>(8, std::size_t(min_pts * len / r_max));
    const double c = V(0.5 * (bounds[b] + bounds[b + 1]));
    for (std::size_t i = 1; i <= n; ++i) {
      const double dr = len * double(i) / double(n);
      const RadialState t = propagate_const(s, c, dr);
      rs.push_back(bounds[b] + dr);
      us.push_back(t.u);
    }
    s = propagate_const(s, c, len);
  }
}

// Zero-energy state of V alone (no compensator).
inline ScatteringProfile zero_energy_state(const RadialProfile& V,
                                           double r_max_factor = 8.0,
                                           std::size_t mesh_pts = 4000) {
  ScatteringProfile p;
  const double Rs = V.support_radius();
  const double r_max = (Rs > 0.0) ? r_max_factor * Rs : 1.0;
  tabulate(V, r_max, mesh_pts, p.r, p.u);
  if (V.shells().empty()) {
    p.norm_slope = 1.0;
    p.scat_length = 0.0;
    p.K = 1.0;
    p.R_flat = 0.0;
    return p;
  }
  const RadialState s = propagate_profile(V);
  p.norm_slope = s.du;
  p.scat_length = Rs - s.u / s.du;
  p.K = 1.0;
  p.R_flat = r_max;  // f -> 1 only asymptotically without a compensator
  return p;
}

// Compensated pair (V_β, W_{β1}): W is the flat shell of height a_N N^{3β1}
// on (N^{-β1}, R_flat) chosen so the combined scattering length vanishes.
struct CompensatedPotential {
  ScaledPotential inner;       // V_β
  double beta1 = 0.0;
  double a_N = 0.0;            // 4π · scat(V_β)
  double W_height = 0.0;       // a_N N^{3β1}
  double W_inner_radius = 0.0; // N^{-β1}
  double W_outer_radius = 0.0; // R_flat
  double K = 1.0;              // f = j/K inside the W-free core
  double norm_slope = 1.0;     // c with f(r) = u(r)/(c r)

  // states at the two W boundaries of the *unnormalized* u
  RadialState at_inner{};
  RadialState at_flat{};

  double W(double r) const {
    return (r > W_inner_radius && r <= W_outer_radius) ? W_height : 0.0;
  }

  // f(r) for any r >= 0 (exact per-shell propagation).
  double f(double r) const {
    if (r >= W_outer_radius) return 1.0;
    RadialState s = u_state(r);
    return s.u / (norm_slope * r);
  }

  double g(double r) const { return 1.0 - f(r); }

  RadialState u_state(double r) const {
    const double Rv = inner.support_radius();
    RadialState s{0.0, 1.0};
    double pos = 0.0;
    for (const auto& sh : inner.scaled.shells()) {
      const double stop = std::min(r, sh.r_out);
      if (stop > pos) s = propagate_const(s, sh.value, stop - pos);
      pos = std::max(pos, stop);
      if (pos >= r) return s;
    }
    (void)Rv;
    if (r <= W_inner_radius) return propagate_const(s, 0.0, r - pos);
    s = propagate_const(s, 0.0, W_inner_radius - pos);
    return propagate_const(s, -W_height, std::min(r, W_outer_radius) - W_inner_radius);
  }
};

// Build W_{β1} for V_β: fixed height a_N N^{3β1}, minimal outer radius with
// d_r f = 0 there.  The flatness condition r u'(r) - u(r) = 0 is located on
// the analytic oscillatory branch by marching + bisection.
inline CompensatedPotential build_compensator(const ScaledPotential& V_beta, double beta1) {
  const double beta = V_beta.exponent;
  if (!(beta1 > 0.0) || !(beta1 < beta))
    throw std::domain_error("build_compensator: need 0 < beta1 < beta");
  const double N = double(V_beta.N);
  const double r0 = std::pow(N, -beta1);
  if (V_beta.support_radius() >= r0)
    throw std::domain_error("build_compensator: V support reaches into the W region; beta1 too large for this N");

  CompensatedPotential c;
  c.inner = V_beta;
  c.beta1 = beta1;
  c.a_N = 4.0 * pi * scat(V_beta);
  c.W_height = c.a_N * std::pow(N, 3.0 * beta1);
  c.W_inner_radius = r0;

  // state at the inner W boundary
  RadialState s = propagate_profile(V_beta.scaled);
  s = propagate_const(s, 0.0, r0 - V_beta.support_radius());
  c.at_inner = s;

  const double k = std::sqrt(0.5 * c.W_height);
  auto eval = [&](double theta) -> std::pair<double, double> {
    const double u = s.u * std::cos(theta) + s.du / k * std::sin(theta);
    const double du = -s.u * k * std::sin(theta) + s.du * std::cos(theta);
    const double r = r0 + theta / k;
    return {r * du - u, u};
  };

  // march to bracket the first zero of r u' - u; abort at a node of u
  double th_lo = 0.0;
  double f_lo = eval(0.0).first;
  const double dth = 1e-3;
  double th_hi = 0.0, f_hi = f_lo;
  for (;;) {
    th_hi += dth;
    auto [phi, u] = eval(th_hi);
    if (u <= 0.0)
      throw std::runtime_error("build_compensator: node of u before flatness radius; beta1 too small for this N");
    f_hi = phi;
    if (f_lo * f_hi <= 0.0) break;
    th_lo = th_hi;
    f_lo = f_hi;
    if (th_hi > 64.0 * pi)
      throw std::runtime_error("build_compensator: no flatness radius found");
  }
  const double tol_theta = 1e-12 * r0 * k;  // 1e-12 * N^{-beta1} in r
  while (th_hi - th_lo > tol_theta) {
    const double mid = 0.5 * (th_lo + th_hi);
    const double fm = eval(mid).first;
    if (f_lo * fm <= 0.0) {
      th_hi = mid;
      f_hi = fm;
    } else {
      th_lo = mid;
      f_lo = fm;
    }
  }
  const double theta = 0.5 * (th_lo + th_hi);
  c.W_outer_radius = r0 + theta / k;
  c.at_flat = {s.u * std::cos(theta) + s.du / k * std::sin(theta),
               -s.u * k * std::sin(theta) + s.du * std::cos(theta)};
  c.norm_slope = c.at_flat.u / c.W_outer_radius;

  // f = j/K inside the core; both solve the same equation there, so the
  // ratio is the ratio of normalizations.
  c.K = c.norm_slope / propagate_profile(V_beta.scaled).du;
  return c;
}

// ∫ (V_β - W) f d³x, evaluated via 2[u' r - u] (exact: u'' = ½(V-W)u inside
// the potentials, and u' r - u is constant on potential-free gaps).
inline double compensation_integral(const CompensatedPotential& c) {
  const RadialState end = c.at_flat;
  const double wronsk = end.du * c.W_outer_radius - end.u;  // [u'r-u] at R_flat
  return 8.0 * pi * wronsk / c.norm_slope;
}

// ∫ V_β f d³x for the same pair (used to normalize the residual).
inline double inner_integral(const CompensatedPotential& c) {
  const RadialState at_supp = propagate_profile(c.inner.scaled);
  const double wronsk = at_supp.du * c.inner.support_radius() - at_supp.u;
  return 8.0 * pi * wronsk / c.norm_slope;
}

// ∫ W f d³x (difference of the two exact integrals).
inline double w_f_l1(const CompensatedPotential& c) {
  return inner_integral(c) - compensation_integral(c);
}

struct GNorms {
  double l1 = 0.0;
  double l2 = 0.0;
  double l3 = 0.0;
};

// Radial quadrature of g = 1 - f over [0, R_flat] (g vanishes beyond).
// Composite Simpson on a boundary-aligned mesh; g is smooth per shell.
inline GNorms g_norms(const CompensatedPotential& c, std::size_t pts_per_region = 4001) {
  std::vector<double> bounds{0.0};
  for (const auto& sh : c.inner.scaled.shells()) bounds.push_back(sh.r_out);
  bounds.push_back(c.W_inner_radius);
  bounds.push_back(c.W_outer_radius);
  GNorms n;
  for (std::size_t b = 0; b + 1 < bounds.size(); ++b) {
    const double lo = bounds[b], hi = bounds[b + 1];
    if (hi <= lo) continue;
    std::size_t m = pts_per_region | 1;  // odd for Simpson
    const double h = (hi - lo) / double(m - 1);
    double s1 = 0.0, s2 = 0.0, s3 = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double r = lo + h * double(i);
      const double g = (r == 0.0) ? c.g(1e-300) : c.g(r);
      const double w = (i == 0 || i == m - 1) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      const double jac = 4.0 * pi * r * r;
      s1 += w * std::abs(g) * jac;
      s2 += w * g * g * jac;
      s3 += w * std::abs(g * g * g) * jac;
    }
    n.l1 += s1 * h / 3.0;
    n.l2 += s2 * h / 3.0;
    n.l3 += s3 * h / 3.0;
  }
  n.l2 = std::sqrt(n.l2);
  n.l3 = std::cbrt(n.l3);
  return n;
}

}  // namespace mflab
