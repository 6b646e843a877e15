#include <catch2/catch_amalgamated.hpp>

#include "mflab/fit.hpp"
#include "mflab/smearing.hpp"

using namespace mflab;

static SmearedPair make(long N, double beta = 0.8, double beta1 = 0.5) {
  const auto base = RadialProfile::square_barrier(10.0, 1.0);
  return build_smeared(scale(base, N, beta), beta1);
}

TEST_CASE("smeared ball: charge neutrality is exact") {
  for (long N : {100L, 1000L, 10000L}) {
    const auto p = make(N);
    CHECK(std::abs(p.enclosed(p.U_radius)) / p.V.l1_norm() < 1e-12);
    // and the L1 masses match by construction
    const double U_mass = p.U_height * 4.0 / 3.0 * pi * std::pow(p.U_radius, 3);
    CHECK_THAT(U_mass, Catch::Matchers::WithinRel(p.V.l1_norm(), 1e-13));
  }
}

TEST_CASE("h vanishes identically outside the ball") {
  const auto p = make(1000);
  for (double f : {1.0, 1.000001, 1.5, 10.0})
    CHECK(std::abs(p.h(f * p.U_radius)) < 1e-10);
}

TEST_CASE("h is continuous at the ball boundary") {
  const auto p = make(1000);
  CHECK(std::abs(p.h(p.U_radius * (1.0 - 1e-9))) < 1e-6 * std::abs(p.h(0.0)));
}

TEST_CASE("Gauss law: h' = -Q(r)/r^2 against a finite difference of h") {
  const auto p = make(1000);
  const double r = 0.37 * p.U_radius;  // inside a smooth region
  const double eps = 1e-7 * p.U_radius;
  const double fd = (p.h(r + eps) - p.h(r - eps)) / (2.0 * eps);
  CHECK_THAT(p.dh(r), Catch::Matchers::WithinRel(fd, 1e-5));
}

TEST_CASE("discrete Laplacian of h reproduces the charge density") {
  for (long N : {100L, 1000L}) {
    const auto p = make(N);
    CHECK(laplacian_residual(p) < 1e-6);
  }
}

TEST_CASE("norm decay exponents along N") {
  const double beta = 0.8, beta1 = 0.5;
  std::vector<double> ns, l2s, l3s, g1s, g2s;
  for (long N : {100L, 316L, 1000L, 3162L, 10000L}) {
    const auto p = make(N, beta, beta1);
    const auto h = h_norms(p);
    ns.push_back(double(N));
    l2s.push_back(h.l2);
    // the cubic norm carries a (ln N)^{1/3} factor; divide it out before
    // fitting the power
    l3s.push_back(h.l3 / std::cbrt(std::log(double(N))));
    g1s.push_back(h.grad_l1);
    g2s.push_back(h.grad_l2);
  }
  // bounds: ||h||2 ≲ N^{-1-β1/2}, ||h||3 ≲ N^{-1}(ln N)^{1/3},
  // ||∇h||1 ≲ N^{-1-β1}, ||∇h||2 ≲ N^{-1+β/2};
  // fitted exponents must not decay slower
  const double tol = 0.1;
  const auto f2 = fit_power_law(ns, l2s);
  CHECK(f2.r_squared > 0.98);
  CHECK(f2.exponent <= -1.0 - beta1 / 2.0 + tol);
  const auto f3 = fit_power_law(ns, l3s);
  CHECK(f3.r_squared > 0.98);
  CHECK(f3.exponent <= -1.0 + tol);
  const auto fg1 = fit_power_law(ns, g1s);
  CHECK(fg1.r_squared > 0.98);
  CHECK(fg1.exponent <= -1.0 - beta1 + tol);
  const auto fg2 = fit_power_law(ns, g2s);
  CHECK(fg2.r_squared > 0.98);
  CHECK(fg2.exponent <= -1.0 + beta / 2.0 + tol);
}

TEST_CASE("smearing preconditions") {
  const auto base = RadialProfile::square_barrier(10.0, 1.0);
  const auto V = scale(base, 1000, 0.8);
  CHECK_THROWS_AS(build_smeared(V, 0.9), std::domain_error);   // beta1 > beta
  CHECK_THROWS_AS(build_smeared(V, -0.1), std::domain_error);
  // support of V must fit inside the ball
  const auto wide = RadialProfile::square_barrier(10.0, 2.0);
  CHECK_THROWS_AS(build_smeared(scale(wide, 2, 0.8), 0.79), std::domain_error);
}
