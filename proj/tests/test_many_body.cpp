#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "mflab/many_body.hpp"

using namespace mflab;

namespace {

const Grid kGrid{1, 8, 2.0 * pi};

Field mode(const Grid& g, int harmonic) {
  Field f(g);
  for (int i = 0; i < g.M; ++i) {
    const double x = g.coord(i);
    f.psi[std::size_t(i)] =
        std::exp(cplx(0.0, harmonic * x)) * (1.0 + 0.3 * std::cos(x));
  }
  f.normalize();
  return f;
}

double max_diff(const FockState& a, const FockState& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, std::abs(a.psi[i] - b.psi[i]));
  return worst;
}

}  // namespace

TEST_CASE("random symmetric states are symmetric and normalized") {
  std::mt19937_64 rng(7);
  const auto psi = random_symmetric_state(3, kGrid, rng);
  CHECK_THAT(psi.norm(), Catch::Matchers::WithinAbs(1.0, 1e-12));
  CHECK(psi.transposition_residual(0, 1) < 1e-13);
  CHECK(psi.transposition_residual(1, 2) < 1e-13);
  CHECK(psi.transposition_residual(0, 2) < 1e-13);
}

TEST_CASE("projector algebra: idempotent, orthogonal, complete") {
  std::mt19937_64 rng(11);
  const ProjectorContext ctx(mode(kGrid, 0));
  for (int trial = 0; trial < 20; ++trial) {
    const auto psi = random_symmetric_state(3, kGrid, rng);
    for (int ax = 0; ax < 3; ++ax) {
      const auto p = apply_p(psi, ctx, ax);
      const auto q = apply_q(psi, ctx, ax);
      CHECK(max_diff(apply_p(p, ctx, ax), p) < 1e-12);       // p² = p
      CHECK(max_diff(apply_q(q, ctx, ax), q) < 1e-12);       // q² = q
      const auto pq = apply_p(q, ctx, ax);
      for (const auto& z : pq.psi) CHECK(std::abs(z) < 1e-12);  // pq = 0
      FockState sum = p;
      for (std::size_t i = 0; i < sum.size(); ++i) sum.psi[i] += q.psi[i];
      CHECK(max_diff(sum, psi) < 1e-12);                     // p + q = 1
    }
  }
}

TEST_CASE("sector projectors sum to the identity") {
  std::mt19937_64 rng(13);
  const ProjectorContext ctx(mode(kGrid, 1));
  const auto psi = random_symmetric_state(3, kGrid, rng);
  const auto out = apply_weight(psi, ctx, WeightVector::ones(3));
  CHECK(max_diff(out, psi) < 1e-12);
}

TEST_CASE("weight operators commute and compose multiplicatively on sectors") {
  std::mt19937_64 rng(17);
  const ProjectorContext ctx(mode(kGrid, 0));
  const auto psi = random_symmetric_state(3, kGrid, rng);
  const auto m = WeightVector(3, {0.3, 1.7, 0.2, 0.9}, "m");
  const auto n = WeightVector::n_weight(3);
  const auto mn = apply_weight(apply_weight(psi, ctx, n), ctx, m);
  const auto nm = apply_weight(apply_weight(psi, ctx, m), ctx, n);
  CHECK(max_diff(mn, nm) < 1e-12);
  // product of the two = weight with pointwise product
  const auto prod = apply_weight(
      psi, ctx,
      WeightVector(3, {0.3 * n.at(0), 1.7 * n.at(1), 0.2 * n.at(2), 0.9 * n.at(3)}, "mn"));
  CHECK(max_diff(mn, prod) < 1e-12);
}

TEST_CASE("relative particle number: n-hat squared equals the mean of q_j") {
  std::mt19937_64 rng(19);
  const ProjectorContext ctx(mode(kGrid, 2));
  const auto psi = random_symmetric_state(3, kGrid, rng);
  const auto n = WeightVector::n_weight(3);
  const auto n2 = apply_weight(apply_weight(psi, ctx, n), ctx, n);
  FockState qsum(3, kGrid);
  for (int ax = 0; ax < 3; ++ax) {
    const auto q = apply_q(psi, ctx, ax);
    for (std::size_t i = 0; i < q.size(); ++i) qsum.psi[i] += q.psi[i] / 3.0;
  }
  CHECK(max_diff(n2, qsum) < 1e-12);
  CHECK_THAT(expect_n2(psi, ctx), Catch::Matchers::WithinAbs(std::real(inner(psi, n2)), 1e-12));
}

TEST_CASE("shifted weights: out-of-range indices annihilate") {
  std::mt19937_64 rng(23);
  const ProjectorContext ctx(mode(kGrid, 0));
  const auto psi = random_symmetric_state(3, kGrid, rng);
  const auto out = apply_weight(psi, ctx, WeightVector::ones(3), 4);
  for (const auto& z : out.psi) CHECK(std::abs(z) == 0.0);
}

TEST_CASE("shift identity: weights pass through a pair sandwich with shifted index") {
  // m̂ p₁p₂ A q₁q₂ = p₁p₂ A m̂₋₂ q₁q₂ for any two-particle multiplier A
  std::mt19937_64 rng(29);
  const ProjectorContext ctx(mode(kGrid, 1));
  const auto m = WeightVector(3, {0.8, 0.1, 1.2, 0.5}, "m");
  const int M = kGrid.M;
  std::vector<double> f(static_cast<std::size_t>(M));
  for (int i = 0; i < M; ++i) {
    double d = double(i) * kGrid.dx();
    if (d > kGrid.L / 2.0) d = kGrid.L - d;
    f[std::size_t(i)] = (d < 0.8) ? 2.5 : 0.0;
  }
  auto apply_A = [&](const FockState& in) {
    FockState out = in;
    const std::size_t rest = in.size() / std::size_t(M) / std::size_t(M);
    for (std::size_t i = 0; i < in.size(); ++i) {
      const std::size_t i1 = i / (rest * std::size_t(M));
      const std::size_t i2 = (i / rest) % std::size_t(M);
      long diff = long(i1) - long(i2);
      if (diff < 0) diff += M;
      out.psi[i] *= f[std::size_t(diff)];
    }
    return out;
  };
  const auto psi = random_symmetric_state(3, kGrid, rng);
  auto sandwich = [&](const FockState& in) {
    auto s = apply_q(apply_q(in, ctx, 0), ctx, 1);
    s = apply_A(s);
    return apply_p(apply_p(s, ctx, 0), ctx, 1);
  };
  const auto lhs = apply_weight(sandwich(psi), ctx, m, 0);
  const auto rhs = sandwich(apply_weight(psi, ctx, m, -2));
  CHECK(max_diff(lhs, rhs) < 1e-12);
}

TEST_CASE("convolution identity on the condensate axis") {
  std::mt19937_64 rng(31);
  const ProjectorContext ctx(mode(kGrid, 1));
  const int M = kGrid.M;
  std::vector<double> f(static_cast<std::size_t>(M));
  for (int i = 0; i < M; ++i) {
    double d = double(i) * kGrid.dx();
    if (d > kGrid.L / 2.0) d = kGrid.L - d;
    f[std::size_t(i)] = (d < 0.7) ? 1.3 : 0.0;
  }
  CHECK(convolution_identity_residual(ctx, f, 25, rng) < 1e-12);
}

TEST_CASE("product state: full condensation") {
  const Field phi = mode(kGrid, 0);
  const ProjectorContext ctx(phi);
  const auto psi = FockState::product(phi, 3);
  CHECK_THAT(psi.norm(), Catch::Matchers::WithinAbs(1.0, 1e-12));
  CHECK(std::abs(expect_n(psi, ctx)) < 1e-12);
  CHECK(std::abs(expect_n2(psi, ctx)) < 1e-12);
  const auto dm = reduced_density(psi);
  CHECK_THAT(dm.trace(), Catch::Matchers::WithinAbs(1.0, 1e-12));
  CHECK_THAT(dm.top_eigenvalue(), Catch::Matchers::WithinAbs(1.0, 1e-12));
  CHECK(dm.trace_distance_to(phi) < 1e-12);
}

TEST_CASE("two-mode symmetric pair: occupations one half each") {
  const Field phi = mode(kGrid, 0);
  const Field chi = mode(kGrid, 3);
  // orthogonalize chi against phi
  Field chi_o = chi;
  cplx ov = 0.0;
  for (int i = 0; i < kGrid.M; ++i)
    ov += std::conj(phi.psi[std::size_t(i)]) * chi.psi[std::size_t(i)];
  ov *= kGrid.dx();
  for (int i = 0; i < kGrid.M; ++i) chi_o.psi[std::size_t(i)] -= ov * phi.psi[std::size_t(i)];
  chi_o.normalize();

  FockState psi(2, kGrid);
  for (int i = 0; i < kGrid.M; ++i)
    for (int j = 0; j < kGrid.M; ++j)
      psi.psi[std::size_t(i * kGrid.M + j)] =
          phi.psi[std::size_t(i)] * chi_o.psi[std::size_t(j)] +
          chi_o.psi[std::size_t(i)] * phi.psi[std::size_t(j)];
  psi.normalize();
  const auto dm = reduced_density(psi);
  CHECK_THAT(dm.trace(), Catch::Matchers::WithinAbs(1.0, 1e-12));
  const auto ev = dm.eigenvalues();
  CHECK_THAT(ev(ev.size() - 1), Catch::Matchers::WithinAbs(0.5, 1e-12));
  CHECK_THAT(ev(ev.size() - 2), Catch::Matchers::WithinAbs(0.5, 1e-12));
  const ProjectorContext ctx(phi);
  CHECK_THAT(expect_n2(psi, ctx), Catch::Matchers::WithinAbs(0.5, 1e-12));
}

TEST_CASE("free product state stays fully condensed under matched evolution") {
  const Grid g{1, 8, 2.0 * pi};
  Field phi(g);
  for (int i = 0; i < g.M; ++i) phi.psi[std::size_t(i)] = 1.0 + 0.2 * std::cos(g.coord(i));
  phi.normalize();
  TrapSchedule off;
  auto zero_pair = [](double) { return 0.0; };
  ManyBodySolver mb(3, g, zero_pair, 0.1, off);
  GpSolver gp_solver(g, off, 0.0);
  FockState psi = FockState::product(phi, 3);
  double t_mb = 0.0, t_gp = 0.0;
  for (int s = 0; s < 200; ++s) {
    mb.step(psi, t_mb, 1e-3);
    gp_solver.step(phi, t_gp, 1e-3);
  }
  const ProjectorContext ctx(phi);
  CHECK(expect_n(psi, ctx) < 1e-10);
  CHECK(std::abs(mb.energy_per_particle(psi, t_mb) - gp_solver.energy(phi, t_gp)) < 1e-10);
}

TEST_CASE("derivative of the excitation count matches its pair decomposition") {
  // evolve an interacting product state, then compare a central finite
  // difference of <n̂> against the two-term pair decomposition
  const Grid g{1, 8, 2.0 * pi};
  const int N = 3;
  Field phi(g);
  for (int i = 0; i < g.M; ++i) phi.psi[std::size_t(i)] = 1.0 + 0.25 * std::cos(g.coord(i));
  phi.normalize();
  const double v0 = 1.5, rb = 0.6;
  auto pair = [&](double r) { return (r < rb) ? v0 : 0.0; };
  const double a = 0.5 * double(N - 1) * 2.0 * v0 * rb;
  TrapSchedule off;
  ManyBodySolver mb(N, g, pair, rb, off);
  GpSolver gp_solver(g, off, a);

  FockState psi = FockState::product(phi, N);
  double t_mb = 0.0, t_gp = 0.0;
  const double dt = 1e-4;
  for (int s = 0; s < 400; ++s) {
    mb.step(psi, t_mb, dt);
    gp_solver.step(phi, t_gp, dt);
  }
  ProjectorContext ctx(phi);
  const AlphaSplit ap = alpha_prime(psi, ctx, mb, gp_solver, a, t_mb);

  // central difference of <n̂> about the current time
  auto advance = [&](FockState ps, Field ph, double dtt) {
    double tm = t_mb, tg = t_gp;
    mb.step(ps, tm, dtt);
    gp_solver.step(ph, tg, dtt);
    const ProjectorContext c2(ph);
    return expect_n(ps, c2);
  };
  const double n_plus = advance(psi, phi, dt);
  const double n_minus = advance(psi, phi, -dt);
  const double fd = (n_plus - n_minus) / (2.0 * dt);
  CHECK_THAT(ap.ddt_n(), Catch::Matchers::WithinAbs(fd, 1e-5));
  // and the advertised bound dominates the true derivative
  CHECK(std::abs(fd) <= ap.alpha1 + ap.alpha2 + 1e-5);
}
