#pragma once

// Spherically symmetric pair potentials on [0, R_supp] described by
// piecewise-constant radial shells, plus their N-scaled variants.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace mflab {

inline constexpr double pi = std::numbers::pi;

struct Shell {
  double r_out = 0.0;  // outer radius of the shell
  double value = 0.0;  // constant potential value on (r_in, r_out]
};

// Nonnegative, compactly supported radial profile V(r).
// Shells partition (0, R_supp]; V = 0 beyond the last shell.
class RadialProfile {
 public:
  RadialProfile() = default;

  explicit RadialProfile(std::vector<Shell> shells) : shells_(std::move(shells)) {
    validate();
  }

  static RadialProfile square_barrier(double height, double radius) {
    return RadialProfile({{radius, height}});
  }

  static RadialProfile from_json(const nlohmann::json& j) {
    std::vector<Shell> shells;
    for (const auto& row : j.at("shells")) {
      shells.push_back({row.at(0).get<double>(), row.at(1).get<double>()});
    }
    return RadialProfile(std::move(shells));
  }

  const std::vector<Shell>& shells() const { return shells_; }

  double support_radius() const {
    return shells_.empty() ? 0.0 : shells_.back().r_out;
  }

  double operator()(double r) const {
    if (r < 0.0) r = -r;
    for (const auto& s : shells_) {
      if (r <= s.r_out) return s.value;
    }
    return 0.0;
  }

  // ∫ V d³x, exact for shells.
  double l1_norm() const {
    double acc = 0.0;
    double r_in = 0.0;
    for (const auto& s : shells_) {
      acc += s.value * (4.0 / 3.0) * pi * (std::pow(s.r_out, 3) - std::pow(r_in, 3));
      r_in = s.r_out;
    }
    return acc;
  }

  double sup_norm() const {
    double m = 0.0;
    for (const auto& s : shells_) m = std::max(m, s.value);
    return m;
  }

 private:
  void validate() const {
    double prev = 0.0;
    for (const auto& s : shells_) {
      if (s.r_out <= prev) throw std::invalid_argument("shell radii must increase");
      if (s.value < 0.0) throw std::invalid_argument("potential must be nonnegative");
      prev = s.r_out;
    }
  }

  std::vector<Shell> shells_;
};

enum class ScalingKind { beta, mu };

// V_beta(x) = N^{-1+3β} V(N^β x), or the hard scaling N^μ V(N x).
struct ScaledPotential {
  RadialProfile base;
  RadialProfile scaled;  // realized profile at this N
  long N = 1;
  ScalingKind kind = ScalingKind::beta;
  double exponent = 0.0;  // β or μ

  double support_radius() const { return scaled.support_radius(); }
  double l1_norm() const { return scaled.l1_norm(); }
  double sup_norm() const { return scaled.sup_norm(); }
  double operator()(double r) const { return scaled(r); }
};

inline ScaledPotential scale(const RadialProfile& base, long N, double beta) {
  if (N < 1) throw std::domain_error("scale: N must be >= 1");
  if (!(beta > 0.0) || beta > 1.0) throw std::domain_error("scale: beta must be in (0,1]");
  const double amp = std::pow(double(N), -1.0 + 3.0 * beta);
  const double shrink = std::pow(double(N), -beta);
  std::vector<Shell> shells;
  shells.reserve(base.shells().size());
  for (const auto& s : base.shells()) shells.push_back({s.r_out * shrink, s.value * amp});
  ScaledPotential p;
  p.base = base;
  p.scaled = RadialProfile(std::move(shells));
  p.N = N;
  p.kind = ScalingKind::beta;
  p.exponent = beta;
  return p;
}

// Hard scaling with shrinking support: N^μ V(N x).  The printed form with
// expanding support contradicts the O(1/N) scattering length it is meant to
// produce, so the shrinking-support reading is implemented.
inline ScaledPotential scale_mu(const RadialProfile& base, long N, double mu) {
  if (N < 1) throw std::domain_error("scale_mu: N must be >= 1");
  if (!(mu > 2.0)) throw std::domain_error("scale_mu: mu must be > 2");
  const double amp = std::pow(double(N), mu);
  const double shrink = 1.0 / double(N);
  std::vector<Shell> shells;
  shells.reserve(base.shells().size());
  for (const auto& s : base.shells()) shells.push_back({s.r_out * shrink, s.value * amp});
  ScaledPotential p;
  p.base = base;
  p.scaled = RadialProfile(std::move(shells));
  p.N = N;
  p.kind = ScalingKind::mu;
  p.exponent = mu;
  return p;
}

}  // namespace mflab
