// Sampling-based estimators: Lyapunov exponent, the moment growth rate
// k(t), large-deviation rate tables over the (alpha, gamma) grids, the
// Legendre transform, and the t_0 / t_c diagnostics read off the curves.
#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "measure.hpp"

namespace projlab {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct LyapunovEstimate {
  double value = 0.0;
  double std_err = 0.0;
  uint32_t n = 0;
  uint64_t samples = 0;
};

LyapunovEstimate estimate_lyapunov(const MatrixMeasure& mu, uint32_t n, uint64_t samples,
                                   uint64_t seed, int threads = 1);

enum class BracketSide { kLower, kUpper, kExact };

struct KtPoint {
  double t = 0.0;
  double k_hat = 0.0;
  double std_err = 0.0;
  BracketSide bracket = BracketSide::kExact;
};

// k_hat = (1/n) log mean(|g|^t), accumulated in log space. t = 0 returns
// exactly zero. Throws "degenerate sample" if every weight underflows.
KtPoint estimate_kt(const MatrixMeasure& mu, double t, uint32_t n, uint64_t samples,
                    uint64_t seed, int threads = 1);

struct KtCurve {
  std::vector<KtPoint> points;  // sorted by t
  uint32_t n = 0;
  uint64_t samples = 0;
};

KtCurve estimate_kt_curve(const MatrixMeasure& mu, const std::vector<double>& t_values,
                          uint32_t n, uint64_t samples, uint64_t seed, int threads = 1);

// Richardson-style n-ladder extrapolation of k(t); heuristic, reported
// alongside the finite-n values.
struct KtLadder {
  std::vector<uint32_t> n_values;
  std::vector<double> k_values;
  double extrapolated = 0.0;
};

KtLadder kt_ladder(const MatrixMeasure& mu, double t, uint32_t n_base, int rungs,
                   uint64_t samples, uint64_t seed, int threads = 1);

// Empirical rate table over the grids A(eps) x Gamma(eps). Entry (alpha,
// gamma) holds sup over x of the empirical mass of E_gamma(alpha, eps, n, x);
// the dual flag replaces omega_-(g) with upsilon_+(g), producing the *E
// table. The sup is taken over a uniform x-grid, or exactly over all of P
// by a sliding window over the sampled directions when x_grid_size == 0
// (the grid cannot resolve radii e^{-n(gamma-eps) alpha} near gamma = 2).
struct RateTableEntry {
  double hit = 0.0;    // sup over x of the bin mass (count or exact weight)
  double i_hat = kNegInf;
  int32_t x_argmax = -1;   // grid index; -1 empty, -2 exact-sup mode
  double x_theta = -1.0;   // achieving x as an angle; -1 when empty
};

struct RateTable {
  uint32_t n = 0;
  double epsilon = 0.05;
  uint32_t x_grid_size = 256;  // 0 = exact sup over P
  bool dual = false;
  bool exact = false;
  double total = 0.0;  // sample count, or 1.0 for exact tables
  std::vector<double> alpha_grid;
  std::vector<double> gamma_grid;
  std::vector<RateTableEntry> entries;  // [ia * gamma_grid.size() + ig]

  const RateTableEntry& at(size_t ia, size_t ig) const {
    return entries[ia * gamma_grid.size() + ig];
  }
  size_t gamma_index_of_two() const { return gamma_grid.size() - 1; }
  // I_2(alpha) row (gamma = 2); -inf where empty.
  std::vector<double> i2_row() const;
};

RateTable estimate_rate_table(const MatrixMeasure& mu, uint32_t n, double epsilon,
                              uint32_t x_grid_size, uint64_t samples, bool dual,
                              uint64_t seed, int threads = 1);

// Exact table via enumerate_products; same binning and x-grid.
RateTable exact_rate_table(const MatrixMeasure& mu, uint32_t n, double epsilon,
                           uint32_t x_grid_size, bool dual,
                           uint64_t cap = kEnumerationCap);

// I(alpha) = inf_t { k(t) - alpha t } over the curve's grid.
struct LegendreValue {
  double value = 0.0;
  double t_argmin = 0.0;
  bool edge_limited = false;  // minimiser sits on the grid boundary
};

LegendreValue legendre_rate(const KtCurve& curve, double alpha);

// t_0 = inf{t : k(t) > I(0)}: leftmost grid t exceeding I0 by > 2 stderr.
struct T0Estimate {
  double value = 0.0;
  double uncertainty = 0.0;  // one grid step
  bool detected = false;
  std::string note;
};

T0Estimate estimate_t0(const KtCurve& curve, double i0_at_zero);

// t_c = inf{t : k(t) > sup_alpha {I2(alpha) - t alpha}}, clipped to [-1,0).
struct TcEstimate {
  double value = 0.0;
  double uncertainty = 0.0;
  bool detected = false;
  bool clipped = false;
  std::string note;
};

TcEstimate estimate_tc(const KtCurve& curve, const RateTable& i2_table);

}  // namespace projlab
