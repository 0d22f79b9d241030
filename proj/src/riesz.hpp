// Riesz potentials on the circle R/(pi Z), Fourier coefficients of
// measures and kernels, the singular convolution kernel G_beta with its
// inverse multiplier T_beta, and the Holder / Frostman exponent
// estimators linking potentials to measure dimensions.
#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "transfer.hpp"

namespace projlab {

// --- potentials ------------------------------------------------------

// I_{t,nu}(x) = int d_P(x,y)^t d nu(y) for an atomic measure.
double riesz_potential(const std::vector<std::pair<ProjPoint, double>>& atoms, double t,
                       ProjPoint x);

// Same for a grid measure; each cell's weight is spread uniformly over
// the cell and integrated exactly against the kernel.
double riesz_potential(const GridMeasure& nu, double t, ProjPoint x);

// Potential at every grid node via the shared kernel cell table.
GridFunction riesz_potential_nodes(const GridMeasure& nu, double t);

// --- Fourier side ----------------------------------------------------

// Coefficients c_k for |k| <= n_max of a pi-periodic object, stored at
// index k + n_max. Real underlying data keeps c_{-k} = conj(c_k).
struct FourierSeries {
  int32_t n_max = 0;
  std::vector<std::complex<double>> coeff;

  std::complex<double> at(int32_t k) const { return coeff[static_cast<size_t>(k + n_max)]; }
  std::complex<double>& at(int32_t k) { return coeff[static_cast<size_t>(k + n_max)]; }
  static FourierSeries zeros(int32_t n_max);
};

std::complex<double> fourier_coeff_measure(const GridMeasure& nu, int32_t n);
std::complex<double> fourier_coeff_measure(const std::vector<std::pair<ProjPoint, double>>& atoms,
                                           int32_t n);
FourierSeries fourier_series_of_measure(const GridMeasure& nu, int32_t n_max);

// Samples of a grid function -> coefficients by the midpoint rule.
FourierSeries fourier_series_of_function(const GridFunction& f, int32_t n_max);
double evaluate_series(const FourierSeries& s, double x);
std::complex<double> series_pairing(const FourierSeries& f, const FourierSeries& g);

// c_n(d_P(0,.)^t) = (2/pi) int_0^{pi/2} sin(x)^t cos(2nx) dx; strictly
// positive for -1 < t < 0 (the computable content of the positivity lemma).
double fourier_coeff_kernel(double t, int32_t n, double tol = 1e-12);

// --- G_beta and T_beta ------------------------------------------------

// C_beta = pi^{-1/2} Gamma(beta/2) / Gamma((1-beta)/2), beta = t + 1.
double g_beta_constant(double beta);

struct GBetaValue {
  double value = 0.0;
  double tail_bound = 0.0;  // Dirichlet-test bound on the truncated tail
};

// Symmetric partial sum C_beta 2 sum_{n<=N} n^{-beta} cos(2nx).
GBetaValue g_beta_partial_sum(double t, double x, uint64_t n_terms);

// Limit of the series, evaluated through the classical power-series
// representation of the periodic zeta function (exact to ~1e-12; the
// truncated sum cannot resolve the Lipschitz remainder at small x).
double g_beta(double t, double x);

// G_beta(x) - |x_folded|^t: the smooth remainder, with the singular power
// removed analytically so no cancellation occurs near x = 0.
double g_beta_regular_part(double t, double x);

// Coefficientwise |n|^beta scaling with c_0 -> 0.
FourierSeries t_beta_multiplier(const FourierSeries& series, double beta);

// --- estimators -------------------------------------------------------

struct InjectivityReport {
  double max_potential_discrepancy = 0.0;
  double max_coeff_discrepancy = 0.0;
};

// Reports sup_x |I_{t,nu1} - I_{t,nu2}| over x_nodes evaluation points and
// max_{|n| <= n_max} |c_n(nu1) - c_n(nu2)|. Equal potentials force equal
// measures because every kernel coefficient is strictly positive; the
// discrete check exposes both distances.
InjectivityReport injectivity_probe(const GridMeasure& nu1, const GridMeasure& nu2, double t,
                                    uint32_t x_nodes, int32_t n_max = 16);

struct DimensionEstimate {
  double value = 0.0;  // clipped to [0, 1]
  double slope_stderr = 0.0;
  std::vector<double> radii;
  std::vector<double> sup_masses;
};

// Least-squares slope of log sup_x nu(B(x,r)) against log r over the
// ladder; the sup is taken over a grid 16x finer than the smallest radius.
DimensionEstimate frostman_dim_estimate(const GridMeasure& nu, std::vector<double> radii);
DimensionEstimate frostman_dim_estimate(const std::vector<double>& sample_angles,
                                        std::vector<double> radii);

std::vector<double> geometric_radii(double r_min, double r_max, int count);

struct HolderEstimate {
  double value = 1.0;  // clipped to (0, 1]
  bool saturated = false;
  std::vector<double> scales;
  std::vector<double> moduli;
};

// Modulus of continuity over a dyadic offset ladder; slope of
// log omega(delta) against log delta.
HolderEstimate holder_exponent_estimate(const GridFunction& f);

}  // namespace projlab
