// Discretized transfer operators on a uniform circular grid: Nystrom-style
// collocation with piecewise-linear interpolation at midpoint nodes.
// Carries the leading eigen-triple machinery, the adjoint-side iteration
// on Lebesgue, the duality and mass identities, the Lasota-Yorke probe,
// and the zeta_t root solve.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "measure.hpp"
#include "montecarlo.hpp"

namespace projlab {

// Values at midpoint nodes theta_i = (i + 1/2) pi / N.
struct GridFunction {
  std::vector<double> values;

  size_t size() const { return values.size(); }
};

// Nonnegative cell weights over the same N uniform cells; normalized to
// total mass 1 where noted.
struct GridMeasure {
  std::vector<double> weights;

  size_t size() const { return weights.size(); }
  double total() const;
  void normalize();
};

GridMeasure uniform_measure(size_t n_cells);

// Sparse row-major operator: row i holds, for each atom a, the weight
// w_a |g_a x_i|^t split over the two cells bracketing act(g_a, x_i).
struct DiscreteOperator {
  uint32_t n_cells = 0;
  double t = 0.0;
  bool dual = false;
  bool experimental = false;  // set when built with t > 0
  uint64_t measure_fingerprint = 0;
  uint32_t entries_per_row = 0;
  std::vector<uint32_t> cols;  // [row * entries_per_row + k]
  std::vector<double> vals;

  std::vector<double> apply(const std::vector<double>& f) const;
  std::vector<double> apply_transpose(const std::vector<double>& nu) const;
  double row_sum(size_t row) const;
};

DiscreteOperator build_operator(const MatrixMeasure& mu, double t, uint32_t n_cells,
                                bool dual);

struct EigenTriple {
  double log_eigenvalue = 0.0;  // k_hat(t)
  GridFunction eigenfunction;   // h_t, scaled so that <nu_t, h_t> = 1
  GridMeasure eigenmeasure;     // nu_t, probability
  double gap_ratio = 0.0;       // |lambda_2| / lambda_1 estimate
  uint32_t iterations = 0;
};

struct ConvergenceError : std::runtime_error {
  ConvergenceError(const std::string& what, uint32_t iters, std::vector<double> history)
      : std::runtime_error(what), iterations(iters), ratio_history(std::move(history)) {}
  uint32_t iterations;
  std::vector<double> ratio_history;  // recent normalization factors
};

// Simultaneous forward/transpose power iteration with sup-norm
// normalization; the eigenvalue is the geometric mean of the
// normalization factors over the last quarter of the iterations.
EigenTriple leading_triple(const DiscreteOperator& op, double tol = 1e-10,
                           uint32_t max_iters = 100000);

// Normalized n-fold transpose application to the uniform measure: the
// *nu_t approximant (build the operator with dual = true for *P_t).
GridMeasure iterate_on_lebesgue(const DiscreteOperator& op_dual, uint32_t n);

// Both sides of P_t^n (int |<.,w>|^t d nu)(x) = int |<x,w>|^t d (*P_t^n nu),
// evaluated by exact enumeration over mu^n. Returns the max discrepancy
// over x_nodes uniform evaluation points.
double duality_check(const MatrixMeasure& mu, double t, uint32_t n,
                     const std::vector<std::pair<ProjPoint, double>>& probe,
                     uint32_t x_nodes, uint64_t cap = kEnumerationCap);

// Relative difference between (P_t^n) lambda(1) and (*P_t^n) lambda(1)
// computed through independently built grid operators.
double mass_identity_check(const MatrixMeasure& mu, double t, uint32_t n, uint32_t n_cells);

// Riesz-type potential of the eigenmeasure against |<x,w>|^t, per-cell
// exact kernel masses (shared singular quadrature). If nu_pairing is given
// the output is rescaled so that <nu_pairing, h> = 1.
GridFunction eigenfunction_from_eigenmeasure(const GridMeasure& star_nu, double t,
                                             const GridMeasure* nu_pairing = nullptr);

// Monte-Carlo sup over (x,y) pairs (down to near-coincident scales) of
// (1/n) log int |gx|^t (d(gx,gy)/d(x,y))^zeta dmu^n.
double lasota_yorke_probe(const MatrixMeasure& mu, double t, double zeta, uint32_t n,
                          uint64_t pair_samples, uint64_t seed,
                          uint64_t integral_samples = 4096);

struct ZetaEstimate {
  double zeta = 0.0;
  double alpha_star = 0.0;  // alpha achieving the sup at the root
  bool bracketed = true;    // false when the root was clipped to an endpoint
};

// Solves sup_alpha { I2(alpha) - t alpha + 2 zeta alpha } = k_at_t by
// bisection over zeta in [0, 1+t]; entries at -inf are skipped. Throws
// "degenerate table" if no finite entry with alpha > 0 exists.
ZetaEstimate zeta_solver(const RateTable& i2_table, double k_at_t, double t,
                         double tol = 1e-6);

// Kernel cell masses K[m] = int over the offset-m cell of |sin u|^t du;
// shared between the potential evaluations here and in the Fourier module.
std::vector<double> kernel_cell_table(double t, size_t n_cells);

}  // namespace projlab
