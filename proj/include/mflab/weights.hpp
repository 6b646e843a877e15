#pragma once

// Weight vectors m(k,N) over k = 0..N and the constructive family
// m⁰..m⁵: m⁵(k,N) = N^{-1/2}(k+1)^{-9/2} on the defined parity, the
// lower levels built by the descending recursion anchored at
// m^j(N,N) = (N+2)^{-j}, odd-parity entries averaged.

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace mflab {

class WeightVector {
 public:
  WeightVector() = default;
  WeightVector(long N, std::vector<double> values, std::string label)
      : N_(N), values_(std::move(values)), label_(std::move(label)) {
    if (values_.size() != std::size_t(N_ + 1))
      throw std::invalid_argument("WeightVector: need N+1 entries");
    for (double v : values_)
      if (v < 0.0) throw std::invalid_argument("WeightVector: entries must be >= 0");
  }

  static WeightVector n_weight(long N) {
    std::vector<double> v(N + 1);
    for (long k = 0; k <= N; ++k) v[k] = std::sqrt(double(k) / double(N));
    return WeightVector(N, std::move(v), "n");
  }

  static WeightVector ones(long N) {
    return WeightVector(N, std::vector<double>(N + 1, 1.0), "1");
  }

  long N() const { return N_; }
  const std::string& label() const { return label_; }
  const std::vector<double>& values() const { return values_; }

  // m(k) with out-of-range k read as 0 (matching P_k := 0 outside 0..N)
  double at(long k) const {
    return (k < 0 || k > N_) ? 0.0 : values_[std::size_t(k)];
  }

 private:
  long N_ = 0;
  std::vector<double> values_;
  std::string label_;
};

// m⁰..m⁵ plus the internal extension rows k = N+1..N+4 needed so the
// recursion identity m^{j+1}(k) = m^j(k) - m^j(k+2) closes at k = N.
struct MFamily {
  long N = 0;
  std::array<std::vector<double>, 6> levels;  // levels[j][k], k = 0..N+4

  double m(int j, long k) const {
    if (k < 0) return 0.0;
    if (k > N + 4) return 0.0;
    return levels[std::size_t(j)][std::size_t(k)];
  }

  WeightVector vec(int j) const {
    std::vector<double> v(levels[std::size_t(j)].begin(),
                          levels[std::size_t(j)].begin() + N + 1);
    return WeightVector(N, std::move(v), "m^" + std::to_string(j));
  }
};

inline MFamily build_m_family(long N) {
  if (N < 2) throw std::domain_error("build_m_family: N must be >= 2");
  MFamily fam;
  fam.N = N;
  const std::size_t K = std::size_t(N) + 5;
  for (auto& lvl : fam.levels) lvl.assign(K, 0.0);

  auto& m5 = fam.levels[5];
  for (std::size_t k = 0; k < K; ++k)
    if ((N + long(k)) % 2 == 0)
      m5[k] = std::pow(double(N), -0.5) * std::pow(double(k) + 1.0, -4.5);
  // odd parity: averages; at k=0 (odd N) the closed form applies directly
  if (N % 2 == 1) m5[0] = std::pow(double(N), -0.5);
  for (std::size_t k = 1; k + 1 < K; ++k)
    if ((N + long(k)) % 2 == 1) m5[k] = 0.5 * (m5[k - 1] + m5[k + 1]);

  for (int j = 4; j >= 0; --j) {
    auto& m = fam.levels[std::size_t(j)];
    const auto& up = fam.levels[std::size_t(j) + 1];
    m[std::size_t(N)] = std::pow(double(N) + 2.0, -double(j));
    m[std::size_t(N) + 2] = m[std::size_t(N)] - up[std::size_t(N)];
    m[std::size_t(N) + 4] = m[std::size_t(N) + 2] - up[std::size_t(N) + 2];
    for (long k = N - 2; k >= 0; k -= 2) m[std::size_t(k)] = up[std::size_t(k)] + m[std::size_t(k) + 2];
    for (std::size_t k = 1; k + 1 < K; ++k)
      if ((N + long(k)) % 2 == 1) m[k] = 0.5 * (m[k - 1] + m[k + 1]);
    if (N % 2 == 1) m[0] = up[0] + m[2];  // no left neighbor to average with
  }
  return fam;
}

struct WeightAuditReport {
  long N = 0;
  double recursion_residual = 0.0;        // max |m^{j+1}(k) - (m^j(k)-m^j(k+2))|
  std::array<double, 6> c_lower{};        // tightest c_j: min m^j / envelope
  std::array<double, 6> C_upper{};        // tightest C_j: max m^j / envelope
  std::array<double, 6> C_diff1{};        // first-difference bound constants
  std::array<double, 6> C_diff2{};        // second-difference bound constants
  bool monotone = true;                   // m^j strictly decreasing in k, j>=1
  bool positive = true;
  int violations = 0;
  std::vector<std::string> violation_notes;
};

// Verifies the structure of the family: exact recursion, positivity,
// monotonicity, and the sandwich/difference envelopes with their tightest
// observed constants.  The envelopes hold with j-dependent constants, not
// with constant 1 (the small-k rows of m⁵ exceed the unit envelope), so
// the constants are reported rather than asserted.
inline WeightAuditReport check_bounds(const MFamily& fam) {
  WeightAuditReport rep;
  const long N = fam.N;
  rep.N = N;
  auto n_of = [N](long k) { return std::sqrt(double(k) / double(N)); };

  for (int j = 0; j < 5; ++j)
    for (long k = 0; k <= N; ++k)
      rep.recursion_residual = std::max(
          rep.recursion_residual,
          std::abs(fam.m(j + 1, k) - (fam.m(j, k) - fam.m(j, k + 2))));

  for (int j = 0; j <= 5; ++j) {
    double c = std::numeric_limits<double>::infinity();
    double C = 0.0, C1 = 0.0, C2 = 0.0;
    for (long k = 0; k <= N; ++k) {
      const double v = fam.m(j, k);
      if (v < 0.0) {
        rep.positive = false;
        ++rep.violations;
        rep.violation_notes.push_back("negative m^" + std::to_string(j) + "(" + std::to_string(k) + ")");
      }
      if (j >= 1) {
        const double env = std::pow(double(N), -double(j)) *
                           std::pow(n_of(k + 2), 1.0 - 2.0 * double(j));
        c = std::min(c, v / env);
        C = std::max(C, v / env);
        if (k < N && fam.m(j, k + 1) >= v) {
          rep.monotone = false;
          ++rep.violations;
          rep.violation_notes.push_back("non-monotone m^" + std::to_string(j) + " at k=" + std::to_string(k));
        }
      }
      if (k < N) {
        const double denv = std::pow(double(N), -double(j) - 1.0) *
                            std::pow(n_of(k + 1), -1.0 - 2.0 * double(j));
        C1 = std::max(C1, std::abs(v - fam.m(j, k + 1)) / denv);
      }
      if (k + 2 <= N) {
        const double denv2 = std::pow(double(N), -double(j) - 2.0) *
                             std::pow(n_of(k + 1), -3.0 - 2.0 * double(j));
        C2 = std::max(C2, std::abs(v - 2.0 * fam.m(j, k + 1) + fam.m(j, k + 2)) / denv2);
      }
    }
    rep.c_lower[std::size_t(j)] = (j >= 1) ? c : 0.0;
    rep.C_upper[std::size_t(j)] = C;
    rep.C_diff1[std::size_t(j)] = C1;
    rep.C_diff2[std::size_t(j)] = C2;
    if (j >= 1 && !(c > 0.0)) {
      ++rep.violations;
      rep.violation_notes.push_back("lower envelope constant c_" + std::to_string(j) + " not positive");
    }
    if (!std::isfinite(C1) || !std::isfinite(C2)) {
      ++rep.violations;
      rep.violation_notes.push_back("difference constant not finite at j=" + std::to_string(j));
    }
  }
  if (rep.recursion_residual > 1e-14) {
    ++rep.violations;
    rep.violation_notes.push_back("recursion residual exceeds 1e-14");
  }
  return rep;
}

}  // namespace mflab
