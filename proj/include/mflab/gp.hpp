#pragma once

// Time-dependent Gross-Pitaevskii solver on a periodic box:
// i ∂φ = (-Δ + A_t)φ + 2a|φ|²φ, Strang split with spectral kinetics,
// plus the regularity monitors (‖φ‖_∞, ‖∇φ‖_{6,loc}, ‖Δφ‖) and
// imaginary-time ground-state search.

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "fft.hpp"
#include "radial.hpp"

namespace mflab {

using cplx = std::complex<double>;

struct Grid {
  int d = 1;
  int M = 64;
  double L = 2.0 * pi;

  double dx() const { return L / double(M); }
  std::size_t size() const {
    std::size_t s = 1;
    for (int i = 0; i < d; ++i) s *= std::size_t(M);
    return s;
  }
  double cell() const { return std::pow(dx(), d); }
  // coordinate of index i along one axis, centered on the box
  double coord(long i) const { return double(i) * dx() - 0.5 * L; }
  // fourier frequency of index i along one axis
  double freq(long i) const {
    const long half = (i <= M / 2) ? i : i - M;
    return 2.0 * pi * double(half) / L;
  }
};

struct Field {
  Grid grid;
  std::vector<cplx> psi;

  explicit Field(Grid g) : grid(g), psi(g.size(), cplx(0.0)) {}
  Field() = default;

  double norm() const {
    double s = 0.0;
    for (const auto& z : psi) s += std::norm(z);
    return std::sqrt(s * grid.cell());
  }

  void normalize() {
    const double n = norm();
    if (n == 0.0) throw std::runtime_error("Field::normalize: zero field");
    for (auto& z : psi) z /= n;
  }

  double sup_norm() const {
    double m = 0.0;
    for (const auto& z : psi) m = std::max(m, std::abs(z));
    return m;
  }
};

// multi-index helpers (row-major, axis 0 slowest)
inline void unravel(std::size_t idx, int d, int M, long* out) {
  for (int ax = d - 1; ax >= 0; --ax) {
    out[ax] = long(idx % std::size_t(M));
    idx /= std::size_t(M);
  }
}

enum class TrapForm { off, harmonic, linear, tabulated };

// External potential A(x,t) = ramp(t) · shape(x).  The ramp is either
// constant 1, a linear switch-on over [0, t_ramp], or a hard release at
// t_release (shape on before, zero after, with Ȧ = 0 away from the jump).
struct TrapSchedule {
  TrapForm form = TrapForm::off;
  double amplitude = 1.0;
  double t_ramp = 0.0;          // >0: A ramps linearly from 0 to full over [0,t_ramp]
  double t_release = -1.0;      // >=0: A switched off for t >= t_release
  std::vector<double> table;    // tabulated shape on the grid (size = grid.size())

  double shape(const Grid& g, std::size_t idx) const {
    if (form == TrapForm::off) return 0.0;
    if (form == TrapForm::tabulated) return table.at(idx);
    long mi[3];
    unravel(idx, g.d, g.M, mi);
    double r2 = 0.0, lin = 0.0;
    for (int ax = 0; ax < g.d; ++ax) {
      const double x = g.coord(mi[ax]);
      r2 += x * x;
      lin += x;
    }
    return (form == TrapForm::harmonic) ? amplitude * r2 : amplitude * lin;
  }

  double ramp(double t) const {
    if (t_release >= 0.0 && t >= t_release) return 0.0;
    if (t_ramp > 0.0 && t < t_ramp) return std::max(0.0, t / t_ramp);
    return 1.0;
  }

  double ramp_dot(double t) const {
    if (t_release >= 0.0 && t >= t_release) return 0.0;
    if (t_ramp > 0.0 && t < t_ramp) return 1.0 / t_ramp;
    return 0.0;
  }

  double A(const Grid& g, std::size_t idx, double t) const {
    return ramp(t) * shape(g, idx);
  }
  double Adot(const Grid& g, std::size_t idx, double t) const {
    return ramp_dot(t) * shape(g, idx);
  }

  double sup_shape(const Grid& g) const {
    double m = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) m = std::max(m, std::abs(shape(g, i)));
    return m;
  }
  // sup over x,t of |Ȧ|; infinite ramps are excluded by construction
  double sup_Adot(const Grid& g) const {
    return (t_ramp > 0.0) ? sup_shape(g) / t_ramp : 0.0;
  }
};

struct GpDiagnostics {
  double t = 0.0;
  double energy = 0.0;
  double norm = 0.0;
  double sup = 0.0;          // ‖φ‖_∞
  double grad6loc = 0.0;     // ‖∇φ‖_{6,loc}
  double lap_l2 = 0.0;       // ‖Δφ‖₂
  double adot_sup = 0.0;     // ‖Ȧ_t‖_∞
  double gronwall = 0.0;     // ∫₀^t (‖φ‖_∞ + ‖∇φ‖_{6,loc} + ‖Ȧ‖_∞) ds
  double edge_mass = 0.0;    // mass in the outer 10% shell of the box
};

class GpSolver {
 public:
  GpSolver(Grid g, TrapSchedule trap, double a)
      : grid_(g), trap_(trap), a_(a), fft_(g.d, g.M), k2_(g.size()) {
    if (a < 0.0) throw std::domain_error("GpSolver: a must be >= 0");
    trap_shape_.resize(grid_.size());
    for (std::size_t i = 0; i < grid_.size(); ++i) trap_shape_[i] = trap_.shape(grid_, i);
    long mi[3];
    for (std::size_t i = 0; i < grid_.size(); ++i) {
      unravel(i, grid_.d, grid_.M, mi);
      double k2 = 0.0;
      for (int ax = 0; ax < grid_.d; ++ax) {
        const double k = grid_.freq(mi[ax]);
        k2 += k * k;
      }
      k2_[i] = k2;
    }
  }

  const Grid& grid() const { return grid_; }
  const TrapSchedule& trap() const { return trap_; }
  double coupling() const { return a_; }

  // one Strang step; throws with a suggested dt if the stability guard trips
  void step(Field& f, double& t, double dt) {
    const double guard = std::abs(dt) * (trap_.ramp(t) * sup_shape() +
                                         2.0 * a_ * f.sup_norm() * f.sup_norm());
    if (guard >= 0.5)
      throw std::runtime_error("gp step: stability guard tripped; suggested dt <= " +
                               std::to_string(0.25 * std::abs(dt) / guard));
    const double tm = t + 0.5 * dt;
    phase(f, tm, 0.5 * dt);
    kinetic(f, dt);
    phase(f, tm, 0.5 * dt);
    t += dt;
  }

  // imaginary-time minimization of the energy functional
  Field ground_state(Field init, double tol = 1e-12, double dtau = 1e-3,
                     long max_iter = 200000) {
    Field f = std::move(init);
    f.normalize();
    double e_prev = energy(f, 0.0);
    for (long it = 0; it < max_iter; ++it) {
      imag_phase(f, 0.5 * dtau);
      imag_kinetic(f, dtau);
      imag_phase(f, 0.5 * dtau);
      f.normalize();
      const double e = energy(f, 0.0);
      if (std::abs(e - e_prev) < tol) return f;
      e_prev = e;
    }
    throw std::runtime_error("ground_state: not converged, last dE = n/a");
  }

  double energy(const Field& f, double t) const {
    auto& fft = const_cast<Fft&>(fft_);
    std::copy(f.psi.begin(), f.psi.end(), fft.data());
    fft.forward();
    double kin = 0.0;
    const auto* ft = fft.data();
    for (std::size_t i = 0; i < grid_.size(); ++i) kin += k2_[i] * std::norm(ft[i]);
    kin *= grid_.cell() / double(grid_.size());
    double pot = 0.0;
    const double ramp = trap_.ramp(t);
    for (std::size_t i = 0; i < grid_.size(); ++i) {
      const double dens = std::norm(f.psi[i]);
      pot += (ramp * trap_shape_[i] + a_ * dens) * dens;
    }
    pot *= grid_.cell();
    return kin + pot;
  }

  // ⟨φ, Ȧ_t φ⟩
  double adot_expectation(const Field& f, double t) const {
    const double rd = trap_.ramp_dot(t);
    if (rd == 0.0) return 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < grid_.size(); ++i)
      s += trap_shape_[i] * std::norm(f.psi[i]);
    return rd * s * grid_.cell();
  }

  GpDiagnostics monitors(const Field& f, double t, double ball_radius = 1.0) const {
    GpDiagnostics d;
    d.t = t;
    d.norm = f.norm();
    d.sup = f.sup_norm();
    d.energy = energy(f, t);
    d.adot_sup = trap_.ramp_dot(t) != 0.0 ? std::abs(trap_.ramp_dot(t)) * sup_shape() : 0.0;

    auto& fft = const_cast<Fft&>(fft_);
    // ‖Δφ‖₂
    std::copy(f.psi.begin(), f.psi.end(), fft.data());
    fft.forward();
    {
      double s = 0.0;
      const auto* ft = fft.data();
      for (std::size_t i = 0; i < grid_.size(); ++i)
        s += k2_[i] * k2_[i] * std::norm(ft[i]);
      d.lap_l2 = std::sqrt(s * grid_.cell() / double(grid_.size()));
    }
    // |∇φ| on the grid (spectral derivative per axis)
    std::vector<double> grad2(grid_.size(), 0.0);
    long mi[3];
    for (int ax = 0; ax < grid_.d; ++ax) {
      std::copy(f.psi.begin(), f.psi.end(), fft.data());
      fft.forward();
      auto* ft = fft.data();
      for (std::size_t i = 0; i < grid_.size(); ++i) {
        unravel(i, grid_.d, grid_.M, mi);
        ft[i] *= cplx(0.0, grid_.freq(mi[ax]));
      }
      fft.backward();
      for (std::size_t i = 0; i < grid_.size(); ++i) grad2[i] += std::norm(ft[i]);
    }
    d.grad6loc = local_l6(grad2, ball_radius);
    d.edge_mass = edge_mass(f);
    return d;
  }

  double sup_shape() const {
    double m = 0.0;
    for (double v : trap_shape_) m = std::max(m, std::abs(v));
    return m;
  }

 private:
  // sup over grid-centered balls of (∫_ball |∇φ|⁶)^{1/6}
  double local_l6(const std::vector<double>& grad2, double radius) const {
    const int span = int(std::floor(radius / grid_.dx()));
    // offsets within the ball, per axis, by periodic min-image distance
    std::vector<long> offs;
    for (long o = -span; o <= span; ++o) offs.push_back(o);
    double best = 0.0;
    const long M = grid_.M;
    if (grid_.d == 1) {
      for (long c = 0; c < M; ++c) {
        double s = 0.0;
        for (long o : offs) s += std::pow(grad2[std::size_t((c + o + M) % M)], 3);
        best = std::max(best, s);
      }
    } else {
      // d = 2,3: brute force over centers, offsets filtered by |o| <= radius
      std::vector<std::vector<long>> ball;
      const int d = grid_.d;
      std::vector<long> o(std::size_t(d), -span);
      for (;;) {
        double r2 = 0.0;
        for (int ax = 0; ax < d; ++ax) r2 += double(o[std::size_t(ax)] * o[std::size_t(ax)]);
        if (std::sqrt(r2) * grid_.dx() <= radius) ball.push_back(o);
        int ax = d - 1;
        while (ax >= 0 && ++o[std::size_t(ax)] > span) {
          o[std::size_t(ax)] = -span;
          --ax;
        }
        if (ax < 0) break;
      }
      long mi[3];
      for (std::size_t c = 0; c < grid_.size(); ++c) {
        unravel(c, d, grid_.M, mi);
        double s = 0.0;
        for (const auto& off : ball) {
          std::size_t idx = 0;
          for (int ax = 0; ax < d; ++ax)
            idx = idx * std::size_t(M) + std::size_t((mi[ax] + off[std::size_t(ax)] + M) % M);
          s += std::pow(grad2[idx], 3);
        }
        best = std::max(best, s);
      }
    }
    return std::pow(best * grid_.cell(), 1.0 / 6.0);
  }

  double edge_mass(const Field& f) const {
    double s = 0.0;
    long mi[3];
    for (std::size_t i = 0; i < grid_.size(); ++i) {
      unravel(i, grid_.d, grid_.M, mi);
      bool edge = false;
      for (int ax = 0; ax < grid_.d; ++ax) {
        const double x = std::abs(grid_.coord(mi[ax]));
        if (x > 0.45 * grid_.L) edge = true;
      }
      if (edge) s += std::norm(f.psi[i]);
    }
    return s * grid_.cell();
  }

  void phase(Field& f, double t, double dt) const {
    const double ramp = trap_.ramp(t);
    for (std::size_t i = 0; i < grid_.size(); ++i) {
      const double v = ramp * trap_shape_[i] + 2.0 * a_ * std::norm(f.psi[i]);
      f.psi[i] *= std::polar(1.0, -v * dt);
    }
  }

  void kinetic(Field& f, double dt) const {
    auto& fft = const_cast<Fft&>(fft_);
    std::copy(f.psi.begin(), f.psi.end(), fft.data());
    fft.forward();
    auto* ft = fft.data();
    for (std::size_t i = 0; i < grid_.size(); ++i) ft[i] *= std::polar(1.0, -k2_[i] * dt);
    fft.backward();
    std::copy(fft.data(), fft.data() + grid_.size(), f.psi.begin());
  }

  void imag_phase(Field& f, double dtau) const {
    for (std::size_t i = 0; i < grid_.size(); ++i) {
      const double v = trap_shape_[i] + 2.0 * a_ * std::norm(f.psi[i]);
      f.psi[i] *= std::exp(-v * dtau);
    }
  }

  void imag_kinetic(Field& f, double dtau) const {
    auto& fft = const_cast<Fft&>(fft_);
    std::copy(f.psi.begin(), f.psi.end(), fft.data());
    fft.forward();
    auto* ft = fft.data();
    for (std::size_t i = 0; i < grid_.size(); ++i) ft[i] *= std::exp(-k2_[i] * dtau);
    fft.backward();
    std::copy(fft.data(), fft.data() + grid_.size(), f.psi.begin());
  }

  Grid grid_;
  TrapSchedule trap_;
  double a_ = 0.0;
  Fft fft_;
  std::vector<double> k2_;
  std::vector<double> trap_shape_;
};

// trapezoid accumulator for the Grönwall integrand
class GronwallIntegral {
 public:
  void add(double t, double value) {
    if (has_prev_) total_ += 0.5 * (value + prev_val_) * (t - prev_t_);
    prev_t_ = t;
    prev_val_ = value;
    has_prev_ = true;
  }
  double total() const { return total_; }

 private:
  bool has_prev_ = false;
  double prev_t_ = 0.0, prev_val_ = 0.0, total_ = 0.0;
};

}  // namespace mflab
