// Acceptance gate: ten pass/fail checks covering the scattering oracle,
// the scaling regimes, the microstructure/smearing/weight audits, the
// operator algebra, the condensate solver, the derivative identity, and
// the N-convergence trend.  Prints one line per criterion; exit code is
// the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include "mflab/classify.hpp"
#include "mflab/fit.hpp"
#include "mflab/harness.hpp"
#include "mflab/many_body.hpp"
#include "mflab/scattering.hpp"
#include "mflab/smearing.hpp"
#include "mflab/weights.hpp"

using namespace mflab;

namespace {

int failures = 0;

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

void report(int idx, const char* name, bool ok, double secs, const std::string& detail) {
  std::printf("criterion-%02d %-22s %s  (%.2fs)  %s\n", idx, name, ok ? "PASS" : "FAIL",
              secs, detail.c_str());
  if (!ok) ++failures;
}

Field boxed_gaussian(const Grid& g, double sigma) {
  Field f(g);
  long mi[3];
  for (std::size_t i = 0; i < g.size(); ++i) {
    unravel(i, g.d, g.M, mi);
    double r2 = 0.0;
    for (int ax = 0; ax < g.d; ++ax) r2 += g.coord(mi[ax]) * g.coord(mi[ax]);
    f.psi[i] = std::exp(-r2 / (2.0 * sigma * sigma));
  }
  f.normalize();
  return f;
}

// 1. closed-form scattering length of the square barrier
void criterion_1() {
  Timer tm;
  const auto V = RadialProfile::square_barrier(10.0, 1.0);
  const double k = std::sqrt(5.0);
  const double exact = 1.0 - std::tanh(k) / k;
  const double got = scat(V);
  const double err = std::abs(got - exact);
  report(1, "scattering-oracle", err < 1e-8 && tm.seconds() < 1.0, tm.seconds(),
         "err=" + fmt_num(err));
}

// 2. soft regime: 8π·scat approaches the L1 norm
void criterion_2() {
  Timer tm;
  const auto base = RadialProfile::square_barrier(10.0, 1.0);
  bool monotone = true;
  double prev = 1e300, last = 0.0;
  for (long N : {100L, 1000L, 10000L, 100000L}) {
    const auto V = scale(base, N, 0.2);
    last = std::abs(8.0 * pi * scat(V) - V.l1_norm()) / V.l1_norm();
    if (last >= prev) monotone = false;
    prev = last;
  }
  report(2, "born-regime", monotone && last < 1e-3 && tm.seconds() < 10.0, tm.seconds(),
         "final_ratio=" + fmt_num(last));
}

// 3. hard regime: 4πN·scat(V₁) is an exact invariant of the scaling
void criterion_3() {
  Timer tm;
  const auto base = RadialProfile::square_barrier(10.0, 1.0);
  const double ref = 4.0 * pi * scat(scale(base, 1, 1.0));
  double worst = 0.0;
  for (long N : {1L, 10L, 100L, 1000L}) {
    const double c = 4.0 * pi * double(N) * scat(scale(base, N, 1.0));
    worst = std::max(worst, std::abs(c - ref) / ref);
  }
  report(3, "hard-regime", worst < 1e-6 && tm.seconds() < 10.0, tm.seconds(),
         "max_rel_dev=" + fmt_num(worst));
}

// 4. microstructure: exact cancellation, K bounds, g-norm decay
void criterion_4() {
  Timer tm;
  const auto base = RadialProfile::square_barrier(10.0, 1.0);
  const double beta = 0.8, beta1 = 0.5;
  bool ok = true;
  std::string detail;
  std::vector<double> ns, g1s;
  double worst_resid = 0.0;
  for (long N : {100L, 316L, 1000L, 3162L, 10000L}) {
    const auto c = build_compensator(scale(base, N, beta), beta1);
    const double resid = std::abs(compensation_integral(c)) / std::abs(inner_integral(c));
    worst_resid = std::max(worst_resid, resid);
    const double k_lo = 1.0 - c.a_N / (4.0 * pi * c.W_inner_radius);
    if (!(c.K >= k_lo - 1e-9 && c.K <= 1.0 + 1e-9)) ok = false;
    ns.push_back(double(N));
    g1s.push_back(g_norms(c).l1);
  }
  if (worst_resid >= 1e-8) ok = false;
  const auto fit = fit_power_law(ns, g1s);
  if (!(fit.exponent <= -1.0 - 2.0 * beta1 + 0.1)) ok = false;
  detail = "cancel_resid=" + fmt_num(worst_resid) + " g_l1_exp=" + fmt_num(fit.exponent);
  report(4, "microstructure-audit", ok && tm.seconds() < 30.0, tm.seconds(), detail);
}

// 5. smearing: Poisson residual, support, norm decay exponents
void criterion_5() {
  Timer tm;
  const auto base = RadialProfile::square_barrier(10.0, 1.0);
  const double beta = 0.8, beta1 = 0.5;
  bool ok = true;
  std::vector<double> ns, l2s, l3s, g1s, g2s;
  double worst_lap = 0.0, worst_out = 0.0;
  for (long N : {100L, 316L, 1000L, 3162L, 10000L}) {
    const auto p = build_smeared(scale(base, N, beta), beta1);
    worst_lap = std::max(worst_lap, laplacian_residual(p));
    for (double fac : {1.0, 1.5, 4.0})
      worst_out = std::max(worst_out, std::abs(p.h(fac * p.U_radius)));
    const auto h = h_norms(p);
    ns.push_back(double(N));
    l2s.push_back(h.l2);
    l3s.push_back(h.l3 / std::cbrt(std::log(double(N))));  // strip the ln^{1/3} factor
    g1s.push_back(h.grad_l1);
    g2s.push_back(h.grad_l2);
  }
  if (worst_lap >= 1e-6 || worst_out >= 1e-10) ok = false;
  const double tol = 0.1;
  if (!(fit_power_law(ns, l2s).exponent <= -1.0 - beta1 / 2.0 + tol)) ok = false;
  if (!(fit_power_law(ns, l3s).exponent <= -1.0 + tol)) ok = false;
  if (!(fit_power_law(ns, g1s).exponent <= -1.0 - beta1 + tol)) ok = false;
  if (!(fit_power_law(ns, g2s).exponent <= -1.0 + beta / 2.0 + tol)) ok = false;
  report(5, "smearing-audit", ok && tm.seconds() < 30.0, tm.seconds(),
         "lap_resid=" + fmt_num(worst_lap));
}

// 6. weight family: recursion + structural audit, exhaustive
void criterion_6() {
  Timer tm;
  bool ok = true;
  double worst = 0.0;
  int violations = 0;
  for (long N : {4L, 50L, 200L}) {
    const auto rep = check_bounds(build_m_family(N));
    worst = std::max(worst, rep.recursion_residual);
    violations += rep.violations;
  }
  ok = (violations == 0) && worst < 1e-14;
  report(6, "weights-audit", ok && tm.seconds() < 5.0, tm.seconds(),
         "recursion_resid=" + fmt_num(worst) + " violations=" + std::to_string(violations));
}

// 7. projector / weight operator algebra on random states
void criterion_7() {
  Timer tm;
  const Grid g{1, 8, 2.0 * pi};
  Field phi(g);
  for (int i = 0; i < g.M; ++i)
    phi.psi[std::size_t(i)] = std::exp(cplx(0.0, g.coord(i))) * (1.0 + 0.3 * std::cos(g.coord(i)));
  phi.normalize();
  const ProjectorContext ctx(phi);
  std::mt19937_64 rng(2024);
  const int M = g.M;
  std::vector<double> f(static_cast<std::size_t>(M));
  for (int i = 0; i < M; ++i) {
    double d = double(i) * g.dx();
    if (d > g.L / 2.0) d = g.L - d;
    f[std::size_t(i)] = (d < 0.8) ? 2.0 : 0.0;
  }
  const auto m = WeightVector(3, {0.8, 0.1, 1.2, 0.5}, "m");
  double worst = 0.0;
  auto track = [&](double v) { worst = std::max(worst, v); };
  auto apply_pair = [&](const FockState& in) {
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
  auto diff_norm = [](const FockState& a, const FockState& b) {
    double w = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) w = std::max(w, std::abs(a.psi[i] - b.psi[i]));
    return w;
  };
  for (int trial = 0; trial < 75; ++trial) {
    const auto psi = random_symmetric_state(3, g, rng);
    // completeness and idempotence
    track(diff_norm(apply_weight(psi, ctx, WeightVector::ones(3)), psi));
    const auto p0 = apply_p(psi, ctx, 0);
    track(diff_norm(apply_p(p0, ctx, 0), p0));
    // n̂² = (1/N) Σ q_j
    const auto n = WeightVector::n_weight(3);
    auto n2 = apply_weight(apply_weight(psi, ctx, n), ctx, n);
    FockState qs(3, g);
    for (int ax = 0; ax < 3; ++ax) {
      const auto q = apply_q(psi, ctx, ax);
      for (std::size_t i = 0; i < q.size(); ++i) qs.psi[i] += q.psi[i] / 3.0;
    }
    track(diff_norm(n2, qs));
    // shift identity through the pair sandwich
    auto sandwich = [&](const FockState& in) {
      auto s = apply_q(apply_q(in, ctx, 0), ctx, 1);
      s = apply_pair(s);
      return apply_p(apply_p(s, ctx, 0), ctx, 1);
    };
    track(diff_norm(apply_weight(sandwich(psi), ctx, m, 0),
                    sandwich(apply_weight(psi, ctx, m, -2))));
  }
  // convolution identity uses 25 further random states (100 total)
  track(convolution_identity_residual(ctx, f, 25, rng));
  report(7, "operator-algebra", worst < 1e-12 && tm.seconds() < 60.0, tm.seconds(),
         "max_residual=" + fmt_num(worst));
}

// 8. condensate solver: conservation + dispersion laws at M=256
void criterion_8() {
  Timer tm;
  bool ok = true;
  std::string detail;
  {
    // static harmonic trap, nonlinear, 10^4 steps
    Grid g{1, 256, 16.0};
    TrapSchedule tr;
    tr.form = TrapForm::harmonic;
    GpSolver solver(g, tr, 1.5);
    Field fphi = boxed_gaussian(g, 1.0);
    const double e0 = solver.energy(fphi, 0.0);
    double t = 0.0;
    for (int s = 0; s < 10000; ++s) solver.step(fphi, t, 1e-4);
    const double norm_drift = std::abs(fphi.norm() - 1.0) / t;
    const double e_drift = std::abs(solver.energy(fphi, t) - e0);
    if (norm_drift >= 1e-10 || e_drift >= 1e-8) ok = false;
    detail += "norm_drift=" + fmt_num(norm_drift) + " e_drift=" + fmt_num(e_drift);
  }
  {
    // free Gaussian: closed-form sup norm and long-time decay exponent
    Grid g{1, 256, 64.0};
    GpSolver solver(g, TrapSchedule{}, 0.0);
    const double sigma = 0.8;
    Field fphi = boxed_gaussian(g, sigma);
    const double sup0 = fphi.sup_norm();
    double t = 0.0;
    auto law = [&](double tt) {
      return sup0 * std::pow(1.0 + std::pow(2.0 * tt / (sigma * sigma), 2), -0.25);
    };
    std::vector<double> ts, sups;
    while (t < 8.0 - 1e-9) {
      solver.step(fphi, t, 5e-3);
      if (t > 0.49 && t < 0.51 && std::abs(fphi.sup_norm() - law(t)) / law(t) >= 1e-6)
        ok = false;
      if (t > 4.0) {
        ts.push_back(t);
        sups.push_back(fphi.sup_norm());
      }
    }
    const auto fit = fit_power_law(ts, sups);
    if (std::abs(fit.exponent + 0.5) > 0.025) ok = false;  // -1/2 ± 5%
    detail += " decay_exp=" + fmt_num(fit.exponent);
  }
  report(8, "gp-solver", ok && tm.seconds() < 120.0, tm.seconds(), detail);
}

// 9. derivative identity: finite difference of the counting functional
//    against its derivative bound
void criterion_9() {
  Timer tm;
  const Grid g{1, 12, 2.0 * pi};
  const int N = 3;
  const double v0 = 1.2, rb = 0.6, dt = 1e-4;
  auto pair = [&](double r) { return (r < rb) ? v0 : 0.0; };
  const double a = 0.5 * double(N - 1) * 2.0 * v0 * rb;
  TrapSchedule off;
  ManyBodySolver mb(N, g, pair, rb, off);
  GpSolver gps(g, off, a);
  Field phi(g);
  for (int i = 0; i < g.M; ++i) phi.psi[std::size_t(i)] = 1.0 + 0.25 * std::cos(g.coord(i));
  phi.normalize();
  FockState psi = FockState::product(phi, N);
  double t_mb = 0.0, t_gp = 0.0;

  auto alpha_at = [&](FockState ps, Field ph, double dtt) {
    if (dtt != 0.0) {
      double tm2 = t_mb, tg2 = t_gp;
      mb.step(ps, tm2, dtt);
      gps.step(ph, tg2, dtt);
      const ProjectorContext c(ph);
      return alpha(ps, c, mb, gps, tm2);
    }
    const ProjectorContext c(ph);
    return alpha(ps, c, mb, gps, t_mb);
  };

  bool ok = true;
  double worst_violation = -1e300;
  int sampled = 0;
  const int stride = 20;  // 50 samples over 1000 steps
  for (int s = 0; s < 1000; ++s) {
    mb.step(psi, t_mb, dt);
    gps.step(phi, t_gp, dt);
    if (s % stride != 0) continue;
    ++sampled;
    const ProjectorContext ctx(phi);
    const AlphaSplit ap = alpha_prime(psi, ctx, mb, gps, a, t_mb);
    const double fd = (alpha_at(psi, phi, dt) - alpha_at(psi, phi, -dt)) / (2.0 * dt);
    const double viol = std::abs(fd) - ap.sum();
    worst_violation = std::max(worst_violation, viol);
    if (viol > 1e-5) ok = false;
  }
  report(9, "derivative-identity", ok && sampled >= 50 && tm.seconds() < 300.0, tm.seconds(),
         "samples=" + std::to_string(sampled) + " worst_slack=" + fmt_num(worst_violation));
}

// 10. convergence trend at fixed time with matched coupling
void criterion_10() {
  Timer tm;
  json params{{"M", 16},
              {"L", 2.0 * pi},
              {"pair", {{"height", 0.8}, {"radius", 0.5}}},
              {"dt", 1e-3},
              {"T", 0.5},
              {"N", {2, 3, 4, 5}},
              {"init", {{"type", "gaussian"}, {"sigma", 1.0}}}};
  json cfg{{"experiment", "nbody-convergence"}, {"params", params}};
  const auto rep = run(ExperimentConfig::from_json(cfg));
  const auto alphas = rep.summary["alpha_by_N"].get<std::vector<double>>();
  std::string detail = "alpha=[";
  for (std::size_t i = 0; i < alphas.size(); ++i)
    detail += (i ? "," : "") + fmt_num(alphas[i]);
  detail += "]";
  report(10, "nbody-convergence", rep.pass && tm.seconds() < 1200.0, tm.seconds(), detail);
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  std::printf("%s (%d/10 passed)\n", failures == 0 ? "ALL PASS" : "FAILURES", 10 - failures);
  return failures;
}
