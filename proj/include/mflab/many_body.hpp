#pragma once

// Exact N-body Schrödinger evolution on the 1D periodic tensor grid,
// the condensate projector algebra (p_j, q_j, P_k, weight operators),
// the counting functional α and its derivative split α'₀, α'₁, α'₂,
// and the reduced one-particle density matrix.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fft.hpp"
#include "gp.hpp"
#include "weights.hpp"

namespace mflab {

inline constexpr std::size_t kDefaultAmplitudeBudget = std::size_t(1) << 24;

// Symmetric N-particle wavefunction on the M^N tensor grid (d = 1).
struct FockState {
  int N = 2;
  Grid grid;  // one-particle grid, d must be 1
  std::vector<cplx> psi;

  FockState(int n, Grid g, std::size_t budget = kDefaultAmplitudeBudget)
      : N(n), grid(g) {
    if (g.d != 1) throw std::domain_error("FockState: the many-body solver is 1D");
    if (n < 1) throw std::domain_error("FockState: N must be >= 1");
    std::size_t sz = 1;
    for (int j = 0; j < n; ++j) {
      if (sz > budget / std::size_t(g.M)) {
        int maxN = 0;
        std::size_t s = 1;
        while (s <= budget / std::size_t(g.M)) {
          s *= std::size_t(g.M);
          ++maxN;
        }
        throw std::length_error("FockState: M^N exceeds the amplitude budget; max feasible N=" +
                                std::to_string(maxN) + " at M=" + std::to_string(g.M));
      }
      sz *= std::size_t(g.M);
    }
    psi.assign(sz, cplx(0.0));
  }

  std::size_t size() const { return psi.size(); }
  double cell() const { return std::pow(grid.dx(), N); }

  double norm() const {
    double s = 0.0;
    for (const auto& z : psi) s += std::norm(z);
    return std::sqrt(s * cell());
  }

  void normalize() {
    const double n = norm();
    for (auto& z : psi) z /= n;
  }

  // exact product state φ^{⊗N}
  static FockState product(const Field& phi, int n, std::size_t budget = kDefaultAmplitudeBudget) {
    FockState f(n, phi.grid, budget);
    const int M = phi.grid.M;
    for (std::size_t i = 0; i < f.size(); ++i) {
      std::size_t rem = i;
      cplx v = 1.0;
      for (int ax = n - 1; ax >= 0; --ax) {
        v *= phi.psi[rem % std::size_t(M)];
        rem /= std::size_t(M);
      }
      f.psi[i] = v;
    }
    return f;
  }

  // residual of a transposition of particles j,k (0-based axes)
  double transposition_residual(int j, int k) const {
    const int M = grid.M;
    std::vector<long> mi(static_cast<std::size_t>(N));
    double worst = 0.0;
    for (std::size_t i = 0; i < size(); ++i) {
      std::size_t rem = i;
      for (int ax = N - 1; ax >= 0; --ax) {
        mi[std::size_t(ax)] = long(rem % static_cast<std::size_t>(M));
        rem /= std::size_t(M);
      }
      std::swap(mi[std::size_t(j)], mi[std::size_t(k)]);
      std::size_t other = 0;
      for (int ax = 0; ax < N; ++ax) other = other * std::size_t(M) + std::size_t(mi[std::size_t(ax)]);
      worst = std::max(worst, std::abs(psi[i] - psi[other]));
    }
    return worst;
  }

  // average over all N! permutations
  void symmetrize() {
    std::vector<int> perm(static_cast<std::size_t>(N));
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<cplx> acc(size(), cplx(0.0));
    const int M = grid.M;
    std::vector<long> mi(static_cast<std::size_t>(N));
    std::size_t count = 0;
    do {
      for (std::size_t i = 0; i < size(); ++i) {
        std::size_t rem = i;
        for (int ax = N - 1; ax >= 0; --ax) {
          mi[std::size_t(ax)] = long(rem % static_cast<std::size_t>(M));
          rem /= std::size_t(M);
        }
        std::size_t other = 0;
        for (int ax = 0; ax < N; ++ax)
          other = other * std::size_t(M) + std::size_t(mi[std::size_t(perm[std::size_t(ax)])]);
        acc[i] += psi[other];
      }
      ++count;
    } while (std::next_permutation(perm.begin(), perm.end()));
    for (std::size_t i = 0; i < size(); ++i) psi[i] = acc[i] / double(count);
  }
};

inline FockState random_symmetric_state(int N, Grid g, std::mt19937_64& rng) {
  FockState f(N, g);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (auto& z : f.psi) z = cplx(gauss(rng), gauss(rng));
  f.symmetrize();
  f.normalize();
  return f;
}

// Condensate reference: one-body mode φ with its grid measure.
struct ProjectorContext {
  Field phi;

  explicit ProjectorContext(Field f) : phi(std::move(f)) {
    if (phi.grid.d != 1) throw std::domain_error("ProjectorContext: 1D only");
  }

  int M() const { return phi.grid.M; }
  double dx() const { return phi.grid.dx(); }
};

namespace detail {

// apply the one-body projector p = |φ⟩⟨φ| (with grid measure) on axis `ax`
inline void apply_p_axis(const FockState& in, const ProjectorContext& ctx, int ax,
                         FockState& out) {
  const int M = ctx.M();
  const std::size_t stride = [&] {
    std::size_t s = 1;
    for (int a = in.N - 1; a > ax; --a) s *= std::size_t(M);
    return s;
  }();
  const std::size_t block = stride * std::size_t(M);
  const double dx = ctx.dx();
  std::fill(out.psi.begin(), out.psi.end(), cplx(0.0));
  for (std::size_t base = 0; base < in.size(); base += block) {
    for (std::size_t off = 0; off < stride; ++off) {
      cplx coef = 0.0;
      for (int m = 0; m < M; ++m)
        coef += std::conj(ctx.phi.psi[std::size_t(m)]) * in.psi[base + std::size_t(m) * stride + off];
      coef *= dx;
      for (int m = 0; m < M; ++m)
        out.psi[base + std::size_t(m) * stride + off] = ctx.phi.psi[std::size_t(m)] * coef;
    }
  }
}

}  // namespace detail

inline FockState apply_p(const FockState& f, const ProjectorContext& ctx, int axis) {
  FockState out = f;
  detail::apply_p_axis(f, ctx, axis, out);
  return out;
}

inline FockState apply_q(const FockState& f, const ProjectorContext& ctx, int axis) {
  FockState out = f;
  detail::apply_p_axis(f, ctx, axis, out);
  for (std::size_t i = 0; i < f.size(); ++i) out.psi[i] = f.psi[i] - out.psi[i];
  return out;
}

// m̂_d Ψ = Σ_k m(k+d) P_k Ψ, expanded over the 2^N p/q patterns.
// Out-of-range weight indices read as zero (P_k := 0 outside 0..N).
inline FockState apply_weight(const FockState& f, const ProjectorContext& ctx,
                              const WeightVector& w, long shift = 0) {
  const int N = f.N;
  if (N > 6) throw std::length_error("apply_weight: pattern expansion limited to N <= 6");
  FockState out(N, f.grid);
  FockState scratch(N, f.grid);
  FockState cur(N, f.grid);
  for (unsigned pat = 0; pat < (1u << N); ++pat) {
    const int k = __builtin_popcount(pat);
    const double weight = w.at(long(k) + shift);
    if (weight == 0.0) continue;
    cur.psi = f.psi;
    for (int ax = 0; ax < N; ++ax) {
      detail::apply_p_axis(cur, ctx, ax, scratch);
      if (pat & (1u << ax)) {
        for (std::size_t i = 0; i < cur.size(); ++i) cur.psi[i] -= scratch.psi[i];  // q
      } else {
        std::swap(cur.psi, scratch.psi);  // p
      }
    }
    for (std::size_t i = 0; i < out.size(); ++i) out.psi[i] += weight * cur.psi[i];
  }
  return out;
}

inline cplx inner(const FockState& a, const FockState& b) {
  cplx s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a.psi[i]) * b.psi[i];
  return s * a.cell();
}

inline double expect_n(const FockState& f, const ProjectorContext& ctx) {
  const WeightVector n = WeightVector::n_weight(f.N);
  return std::real(inner(f, apply_weight(f, ctx, n)));
}

// ⟨Ψ, n̂² Ψ⟩ via the relative-particle-number identity N^{-1} Σ_j q_j
inline double expect_n2(const FockState& f, const ProjectorContext& ctx) {
  double s = 0.0;
  for (int ax = 0; ax < f.N; ++ax) {
    const FockState q = apply_q(f, ctx, ax);
    s += std::real(inner(f, q));
  }
  return s / double(f.N);
}

// -------------------------------------------------------------------------
// many-body Hamiltonian and evolution

class ManyBodySolver {
 public:
  // pair: callable v(r) with r the min-image distance; range is the radius
  // of its support, which must fit the torus with room to spare
  template <class PairFn>
  ManyBodySolver(int N, Grid g, PairFn&& pair, double range, TrapSchedule trap,
                 std::size_t budget = kDefaultAmplitudeBudget)
      : N_(N), grid_(g), trap_(trap), fft_(N, g.M) {
    if (!(range < g.L / 4.0))
      throw std::domain_error("ManyBodySolver: pair potential range must be < L/4");
    FockState probe(N, g, budget);  // validates capacity
    const int M = g.M;
    pair_.resize(static_cast<std::size_t>(M));
    for (int i = 0; i < M; ++i) {
      double d = double(i) * g.dx();
      if (d > g.L / 2.0) d = g.L - d;
      pair_[std::size_t(i)] = pair(d);
    }
    trap_shape_.resize(static_cast<std::size_t>(M));
    for (int i = 0; i < M; ++i) {
      Grid one = g;
      trap_shape_[std::size_t(i)] = trap_.shape(one, std::size_t(i));
    }
    k2_.resize(static_cast<std::size_t>(M));
    for (int i = 0; i < M; ++i) {
      const double k = g.freq(i);
      k2_[std::size_t(i)] = k * k;
    }
    build_diag(probe.size());
  }

  const std::vector<double>& pair_table() const { return pair_; }

  // one Strang step of i∂Ψ = HΨ
  void step(FockState& f, double& t, double dt) {
    const double tm = t + 0.5 * dt;
    phase(f, tm, 0.5 * dt);
    kinetic(f, dt);
    phase(f, tm, 0.5 * dt);
    t += dt;
  }

  // N^{-1} ⟨Ψ, H Ψ⟩
  double energy_per_particle(const FockState& f, double t) const {
    auto& fft = const_cast<Fft&>(fft_);
    std::copy(f.psi.begin(), f.psi.end(), fft.data());
    fft.forward();
    double kin = 0.0;
    const auto* ft = fft.data();
    const int M = grid_.M;
    for (std::size_t i = 0; i < f.size(); ++i) {
      std::size_t rem = i;
      double k2 = 0.0;
      for (int ax = 0; ax < N_; ++ax) {
        k2 += k2_[rem % std::size_t(M)];
        rem /= std::size_t(M);
      }
      kin += k2 * std::norm(ft[i]);
    }
    kin *= f.cell() / double(f.size());
    const double ramp = trap_.ramp(t);
    double pot = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
      pot += (pair_diag_[i] + ramp * trap_diag_[i]) * std::norm(f.psi[i]);
    pot *= f.cell();
    return (kin + pot) / double(N_);
  }

  // ⟨Ψ, Ȧ(x_1) Ψ⟩ summed over particles, divided per the α'₀ convention:
  // the functional uses the one-particle term; symmetry gives Σ_j = N x it.
  double adot_expectation_one(const FockState& f, double t) const {
    const double rd = trap_.ramp_dot(t);
    if (rd == 0.0) return 0.0;
    const int M = grid_.M;
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      std::size_t rem = i;
      for (int ax = N_ - 1; ax > 0; --ax) rem /= std::size_t(M);
      s += trap_shape_[rem % std::size_t(M)] * std::norm(f.psi[i]);
    }
    return rd * s * f.cell();
  }

  int N() const { return N_; }
  const Grid& grid() const { return grid_; }
  const TrapSchedule& trap() const { return trap_; }

  // Z(x1,x2)Ψ with Z = v(x1-x2) - 2a/(N-1)(|φ|²(x1)+|φ|²(x2))
  FockState apply_Z(const FockState& f, const ProjectorContext& ctx, double a) const {
    FockState out = f;
    const int M = grid_.M;
    std::vector<double> dens(static_cast<std::size_t>(M));
    for (int i = 0; i < M; ++i) dens[std::size_t(i)] = std::norm(ctx.phi.psi[std::size_t(i)]);
    const double c = 2.0 * a / double(N_ - 1);
    const std::size_t rest = f.size() / std::size_t(M) / std::size_t(M);
    for (std::size_t i = 0; i < f.size(); ++i) {
      const std::size_t i1 = i / (rest * static_cast<std::size_t>(M));
      const std::size_t i2 = (i / rest) % std::size_t(M);
      long diff = long(i1) - long(i2);
      if (diff < 0) diff += M;
      out.psi[i] *= pair_[std::size_t(diff)] - c * (dens[i1] + dens[i2]);
    }
    return out;
  }

 private:
  void build_diag(std::size_t size) {
    pair_diag_.assign(size, 0.0);
    trap_diag_.assign(size, 0.0);
    const int M = grid_.M;
    std::vector<std::size_t> mi(static_cast<std::size_t>(N_));
    for (std::size_t i = 0; i < size; ++i) {
      std::size_t rem = i;
      for (int ax = N_ - 1; ax >= 0; --ax) {
        mi[std::size_t(ax)] = rem % std::size_t(M);
        rem /= std::size_t(M);
      }
      double tp = 0.0, pp = 0.0;
      for (int j = 0; j < N_; ++j) {
        tp += trap_shape_[mi[std::size_t(j)]];
        for (int k = j + 1; k < N_; ++k) {
          long diff = long(mi[std::size_t(j)]) - long(mi[std::size_t(k)]);
          if (diff < 0) diff += M;
          pp += pair_[std::size_t(diff)];
        }
      }
      pair_diag_[i] = pp;
      trap_diag_[i] = tp;
    }
  }

  void phase(FockState& f, double t, double dt) {
    const double ramp = trap_.ramp(t);
    for (std::size_t i = 0; i < f.size(); ++i)
      f.psi[i] *= std::polar(1.0, -(pair_diag_[i] + ramp * trap_diag_[i]) * dt);
  }

  void kinetic(FockState& f, double dt) {
    std::copy(f.psi.begin(), f.psi.end(), fft_.data());
    fft_.forward();
    auto* ft = fft_.data();
    const int M = grid_.M;
    for (std::size_t i = 0; i < f.size(); ++i) {
      std::size_t rem = i;
      double k2 = 0.0;
      for (int ax = 0; ax < N_; ++ax) {
        k2 += k2_[rem % std::size_t(M)];
        rem /= std::size_t(M);
      }
      ft[i] *= std::polar(1.0, -k2 * dt);
    }
    fft_.backward();
    std::copy(fft_.data(), fft_.data() + f.size(), f.psi.begin());
  }

  int N_;
  Grid grid_;
  TrapSchedule trap_;
  Fft fft_;
  std::vector<double> pair_, trap_shape_, k2_;
  std::vector<double> pair_diag_, trap_diag_;
};

// -------------------------------------------------------------------------
// reduced one-particle density matrix

struct OneBodyDensity {
  Eigen::MatrixXcd mu;  // operator matrix: kernel * dx, eigenvalues are occupations
  double dx = 0.0;

  double trace() const { return mu.trace().real(); }

  Eigen::VectorXd eigenvalues() const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(mu);
    return es.eigenvalues();
  }

  double top_eigenvalue() const {
    const auto ev = eigenvalues();
    return ev(ev.size() - 1);
  }

  // trace distance to the pure condensate |φ⟩⟨φ|
  double trace_distance_to(const Field& phi) const {
    const int M = int(mu.rows());
    Eigen::MatrixXcd proj(M, M);
    for (int i = 0; i < M; ++i)
      for (int j = 0; j < M; ++j)
        proj(i, j) = phi.psi[std::size_t(i)] * std::conj(phi.psi[std::size_t(j)]) * dx;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(mu - proj);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
  }
};

inline OneBodyDensity reduced_density(const FockState& f) {
  const int M = f.grid.M;
  const std::size_t rest = f.size() / std::size_t(M);
  OneBodyDensity d;
  d.dx = f.grid.dx();
  d.mu = Eigen::MatrixXcd::Zero(M, M);
  const double measure = std::pow(f.grid.dx(), f.N - 1) * d.dx;
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < M; ++j) {
      cplx s = 0.0;
      const cplx* a = f.psi.data() + std::size_t(i) * rest;
      const cplx* b = f.psi.data() + std::size_t(j) * rest;
      for (std::size_t r = 0; r < rest; ++r) s += a[r] * std::conj(b[r]);
      d.mu(i, j) = s * measure;
    }
  return d;
}

// -------------------------------------------------------------------------
// counting functional and its derivative split

struct AlphaSplit {
  double alpha0 = 0.0;  // |⟨Ψ,ȦΨ⟩ - ⟨φ,Ȧφ⟩|
  double alpha1 = 0.0;  // 2N(N-1)|Im⟨Ψ, Z p1p2 (n̂-n̂₂) Ψ⟩|
  double alpha2 = 0.0;  // 4N(N-1)|Im⟨Ψ, Z p1q2 (n̂-n̂₁) Ψ⟩|
  // signed Heisenberg decomposition: d/dt⟨n̂⟩ = ddt_pp + ddt_pq exactly
  double ddt_pp = 0.0;
  double ddt_pq = 0.0;

  double sum() const { return alpha0 + alpha1 + alpha2; }
  double ddt_n() const { return ddt_pp + ddt_pq; }
};

inline double alpha(const FockState& f, const ProjectorContext& ctx,
                    const ManyBodySolver& solver, const GpSolver& gp, double t) {
  const double e_many = solver.energy_per_particle(f, t);
  const double e_gp = gp.energy(ctx.phi, t);
  return expect_n(f, ctx) + std::abs(e_many - e_gp);
}

inline AlphaSplit alpha_prime(const FockState& f, const ProjectorContext& ctx,
                              const ManyBodySolver& solver, const GpSolver& gp,
                              double a, double t) {
  AlphaSplit out;
  const int N = f.N;
  const WeightVector n = WeightVector::n_weight(N);

  // α'₀
  const double many_adot = solver.adot_expectation_one(f, t);
  const double gp_adot = gp.adot_expectation(ctx.phi, t);
  out.alpha0 = std::abs(many_adot - gp_adot);

  // (n̂ - n̂_d) Ψ, then the p/q sandwich, then Z
  auto sandwich = [&](bool q_on_2, long shift) -> double {
    FockState t1 = apply_weight(f, ctx, n, 0);
    FockState t2 = apply_weight(f, ctx, n, shift);
    for (std::size_t i = 0; i < t1.size(); ++i) t1.psi[i] -= t2.psi[i];
    t1 = apply_p(t1, ctx, 0);
    t1 = q_on_2 ? apply_q(t1, ctx, 1) : apply_p(t1, ctx, 1);
    t1 = solver.apply_Z(t1, ctx, a);
    return std::imag(inner(f, t1));
  };

  const double s_pp = sandwich(false, 2);
  const double s_pq = sandwich(true, 1);
  const double nn1 = double(N) * double(N - 1);
  out.alpha1 = 2.0 * nn1 * std::abs(s_pp);
  out.alpha2 = 4.0 * nn1 * std::abs(s_pq);
  out.ddt_pp = -nn1 * s_pp;
  out.ddt_pq = -2.0 * nn1 * s_pq;
  return out;
}

// max-norm residual of p1 f(x1-x2) p1 - p1 (f⋆|φ|²)(x2) on trial states
inline double convolution_identity_residual(const ProjectorContext& ctx,
                                            const std::vector<double>& f_of_offset,
                                            int n_states, std::mt19937_64& rng) {
  const int M = ctx.M();
  Grid g = ctx.phi.grid;
  // spectral convolution (f ⋆ |φ|²)(x) = Σ_y f(x-y)|φ(y)|² dx
  Fft fft(1, M);
  std::vector<cplx> fhat(static_cast<std::size_t>(M)), rhohat(static_cast<std::size_t>(M));
  for (int i = 0; i < M; ++i) fft.data()[i] = f_of_offset[std::size_t(i)];
  fft.forward();
  std::copy(fft.data(), fft.data() + M, fhat.begin());
  for (int i = 0; i < M; ++i) fft.data()[i] = std::norm(ctx.phi.psi[std::size_t(i)]);
  fft.forward();
  std::copy(fft.data(), fft.data() + M, rhohat.begin());
  for (int i = 0; i < M; ++i) fft.data()[i] = fhat[std::size_t(i)] * rhohat[std::size_t(i)];
  fft.backward();
  std::vector<double> conv(static_cast<std::size_t>(M));
  for (int i = 0; i < M; ++i) conv[std::size_t(i)] = std::real(fft.data()[i]) * g.dx();

  double worst = 0.0;
  for (int s = 0; s < n_states; ++s) {
    FockState psi = random_symmetric_state(2, g, rng);
    // lhs: p1 f(x1-x2) p1 ψ
    FockState lhs = apply_p(psi, ctx, 0);
    for (std::size_t i = 0; i < lhs.size(); ++i) {
      const std::size_t i1 = i / std::size_t(M), i2 = i % std::size_t(M);
      long diff = long(i1) - long(i2);
      if (diff < 0) diff += M;
      lhs.psi[i] *= f_of_offset[std::size_t(diff)];
    }
    lhs = apply_p(lhs, ctx, 0);
    // rhs: p1 (f⋆|φ|²)(x2) ψ
    FockState rhs = apply_p(psi, ctx, 0);
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs.psi[i] *= conv[i % std::size_t(M)];
    for (std::size_t i = 0; i < lhs.size(); ++i)
      worst = std::max(worst, std::abs(lhs.psi[i] - rhs.psi[i]));
  }
  return worst;
}

}  // namespace mflab
