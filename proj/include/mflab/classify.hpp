#pragma once

// Empirical membership test for the scaling classes: checks that the
// effective coupling extracted per N converges, fits the decay exponent
// of the residual, and reports a verdict.

#include <cmath>
#include <string>
#include <vector>

#include "fit.hpp"
#include "radial.hpp"
#include "scattering.hpp"

namespace mflab {

enum class ClassVerdict { Pass, Fail, Inconclusive };

struct ClassRow {
  long N = 0;
  double l1 = 0.0;
  double sup = 0.0;
  double scat_length = 0.0;
  double coupling = 0.0;  // N·||V_β||₁/2 (β<1) or 4πN·scat (β=1)
  double residual = 0.0;  // |coupling_N - fitted a|
};

struct ClassReport {
  double beta = 0.0;
  double fitted_a = 0.0;
  double fitted_eta = 0.0;  // decay exponent of the residual (0 if exactly 0)
  ClassVerdict verdict = ClassVerdict::Inconclusive;
  std::vector<ClassRow> rows;

  std::string verdict_str() const {
    switch (verdict) {
      case ClassVerdict::Pass: return "PASS";
      case ClassVerdict::Fail: return "FAIL";
      default: return "INCONCLUSIVE";
    }
  }
};

// seq must be strictly increasing with >= 3 entries.
inline ClassReport classify(const RadialProfile& base, double beta,
                            const std::vector<long>& seq,
                            double rel_tol = 1e-3) {
  if (seq.size() < 3) throw std::domain_error("classify: need >= 3 values of N");
  for (std::size_t i = 1; i < seq.size(); ++i)
    if (seq[i] <= seq[i - 1]) throw std::domain_error("classify: N sequence must increase");

  ClassReport rep;
  rep.beta = beta;
  const bool hard = (beta == 1.0);
  for (long N : seq) {
    const ScaledPotential p = scale(base, N, beta);
    ClassRow row;
    row.N = N;
    row.l1 = p.l1_norm();
    row.sup = p.sup_norm();
    row.scat_length = scat(p);
    row.coupling = hard ? 4.0 * pi * double(N) * row.scat_length
                        : double(N) * row.l1 / 2.0;
    rep.rows.push_back(row);
  }
  // fitted a = coupling at the largest N (best-converged point)
  rep.fitted_a = rep.rows.back().coupling;
  double max_resid = 0.0;
  std::vector<double> ns, rs;
  for (auto& row : rep.rows) {
    row.residual = std::abs(row.coupling - rep.fitted_a);
    max_resid = std::max(max_resid, row.residual / std::max(rep.fitted_a, 1e-300));
    if (row.residual > 0.0 && row.N != rep.rows.back().N) {
      ns.push_back(double(row.N));
      rs.push_back(row.residual);
    }
  }
  if (ns.size() >= 2) {
    rep.fitted_eta = -fit_power_law(ns, rs).exponent;
  }
  // monotonicity of residuals (excluding the anchor point)
  bool monotone = true;
  for (std::size_t i = 1; i + 1 < rep.rows.size(); ++i)
    if (rep.rows[i].residual > rep.rows[i - 1].residual * (1.0 + rel_tol)) monotone = false;

  if (max_resid <= rel_tol || (monotone && rep.fitted_eta > 0.0)) {
    rep.verdict = ClassVerdict::Pass;
  } else if (!monotone) {
    rep.verdict = ClassVerdict::Inconclusive;
  } else {
    rep.verdict = ClassVerdict::Fail;
  }
  return rep;
}

}  // namespace mflab
