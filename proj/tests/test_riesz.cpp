#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <complex>

#include "quadrature.hpp"
#include "riesz.hpp"
#include "rng.hpp"

using namespace projlab;

TEST_CASE("riesz potential basics") {
  // t = 0: total mass for any probability measure
  GridMeasure lambda = uniform_measure(512);
  CHECK(riesz_potential(lambda, 0.0, proj_point(0.3)) == doctest::Approx(1.0));

  // against Lebesgue the potential is the constant C_{lambda,t}
  for (double t : {-0.5, -0.2}) {
    double a = riesz_potential(lambda, t, proj_point(0.0));
    double b = riesz_potential(lambda, t, proj_point(1.1));
    CHECK(a == doctest::Approx(b).epsilon(1e-10));
    CHECK(a == doctest::Approx(lambda_constant_gamma(t)).epsilon(1e-9));
  }

  // atomic measure: d_P(x,y)^t
  std::vector<std::pair<ProjPoint, double>> delta{{proj_point(0.9), 1.0}};
  CHECK(riesz_potential(delta, -0.3, proj_point(0.2)) ==
        doctest::Approx(std::pow(std::fabs(std::sin(0.2 - 0.9)), -0.3)).epsilon(1e-13));

  CHECK_THROWS_AS(riesz_potential(lambda, -1.0, proj_point(0.0)), std::invalid_argument);
}

TEST_CASE("potential at nodes matches the pointwise evaluation") {
  GridMeasure nu;
  nu.weights.assign(128, 0.0);
  nu.weights[10] = 0.3;
  nu.weights[77] = 0.7;
  const double t = -0.4;
  GridFunction nodes = riesz_potential_nodes(nu, t);
  for (size_t i : {0ul, 9ul, 10ul, 64ul, 127ul}) {
    CHECK(nodes.values[i] ==
          doctest::Approx(riesz_potential(nu, t, ProjPoint{grid_node(i, 128)})).epsilon(1e-10));
  }
}

TEST_CASE("fourier coefficients of measures") {
  GridMeasure lambda = uniform_measure(256);
  CHECK(std::abs(fourier_coeff_measure(lambda, 0) - std::complex<double>{1.0, 0.0}) <= 1e-12);
  for (int32_t n : {1, 2, 7, 100}) CHECK(std::abs(fourier_coeff_measure(lambda, n)) <= 1e-12);

  std::vector<std::pair<ProjPoint, double>> delta0{{proj_point(0.0), 1.0}};
  for (int32_t n : {0, 1, 5}) {
    CHECK(std::abs(fourier_coeff_measure(delta0, n) - std::complex<double>{1.0, 0.0}) <=
          1e-14);
  }

  // conjugate symmetry for a real measure
  GridMeasure skew;
  skew.weights.assign(64, 0.0);
  skew.weights[3] = 0.5;
  skew.weights[40] = 0.5;
  for (int32_t n : {1, 2, 9}) {
    auto cp = fourier_coeff_measure(skew, n);
    auto cm = fourier_coeff_measure(skew, -n);
    CHECK(std::abs(cp - std::conj(cm)) <= 1e-12);
  }
}

TEST_CASE("kernel fourier coefficients") {
  // n = 0 recovers the lambda constant
  for (double t : {-0.3, -0.6}) {
    CHECK(fourier_coeff_kernel(t, 0) == doctest::Approx(lambda_constant_gamma(t)).epsilon(1e-10));
  }
  CHECK(fourier_coeff_kernel(-0.5, 1) > 0.0);
  // positivity across a sweep (full range in the acceptance battery)
  for (double t : {-0.1, -0.5, -0.9})
    for (int32_t n : {1, 2, 3, 8, 16}) CHECK(fourier_coeff_kernel(t, n) > 1e-12);
  // coefficients decrease toward zero in n
  CHECK(fourier_coeff_kernel(-0.5, 32) < fourier_coeff_kernel(-0.5, 2));
  CHECK_THROWS_AS(fourier_coeff_kernel(0.0, 1), std::invalid_argument);
}

TEST_CASE("potential-coefficient convolution identity on band-limited measures") {
  // nu has density 1 + 0.6 cos(2theta) + 0.3 sin(4theta); the potential is
  // evaluated directly by singular quadrature, independent of the Fourier
  // machinery, and its midpoint DFT must factor through the kernel
  // coefficients.
  const double t = -0.45;
  auto density = [](double y) {
    return 1.0 + 0.6 * std::cos(2.0 * y) + 0.3 * std::sin(4.0 * y);
  };
  const size_t n_nodes = 64;
  GridFunction pot;
  pot.values.resize(n_nodes);
  for (size_t i = 0; i < n_nodes; ++i) {
    double x = grid_node(i, n_nodes);
    // int |sin(x-y)|^t rho(y) dlambda(y), singularity at y = x
    auto smooth = [&](double y) {
      double d = std::fabs(y - x);
      double base = d < 1e-150 ? 1.0 : std::pow(std::fabs(std::sin(d)) / d, t);
      return base * density(y);
    };
    pot.values[i] =
        quad_power_singular(smooth, t, x, x - kPi / 2.0, x + kPi / 2.0, 1e-11) / kPi;
  }
  FourierSeries series = fourier_series_of_function(pot, 8);
  // c_{+-1}(nu) = 0.3, c_{+-2}(nu) = -+ 0.15 i
  std::complex<double> c1_expect = fourier_coeff_kernel(t, 1) * 0.3;
  std::complex<double> c2_expect =
      fourier_coeff_kernel(t, 2) * std::complex<double>{0.0, -0.15};
  CHECK(std::abs(series.at(1) - c1_expect) <= 1e-8);
  CHECK(std::abs(series.at(2) - c2_expect) <= 1e-8);
  CHECK(std::abs(series.at(0) - fourier_coeff_kernel(t, 0)) <= 1e-8);
  CHECK(std::abs(series.at(5)) <= 1e-9);  // outside the band
}

TEST_CASE("g_beta constant and series") {
  CHECK(g_beta_constant(0.5) == doctest::Approx(1.0 / std::sqrt(kPi)).epsilon(1e-12));
  CHECK_THROWS_AS(g_beta_constant(1.0), std::invalid_argument);

  // symmetry and periodicity
  for (double t : {-0.3, -0.7}) {
    CHECK(g_beta(t, 0.4) == doctest::Approx(g_beta(t, -0.4)).epsilon(1e-12));
    CHECK(g_beta(t, 0.4) == doctest::Approx(g_beta(t, 0.4 + kPi)).epsilon(1e-12));
  }

  // the truncated cosine sum approaches the analytic value within its
  // reported tail bound
  for (double x : {0.3, 0.9, 1.4}) {
    const double t = -0.5;
    GBetaValue partial = g_beta_partial_sum(t, x, 200000);
    double limit = g_beta(t, x);
    CHECK(std::fabs(partial.value - limit) <= partial.tail_bound + 1e-12);
    CHECK(std::fabs(partial.value - limit) <= 5e-3);
  }

  CHECK_THROWS_AS(g_beta(-0.5, 0.0), std::invalid_argument);
}

TEST_CASE("g_beta minus the metric power is Lipschitz across dyadic scales") {
  for (double t : {-0.2, -0.5, -0.8}) {
    std::vector<double> quotient;
    for (double x = 1e-4; 2.0 * x <= kPi / 2.0; x *= 2.0) {
      double b2 = g_beta(t, 2.0 * x) - std::pow(std::fabs(std::sin(2.0 * x)), t);
      double b1 = g_beta(t, x) - std::pow(std::fabs(std::sin(x)), t);
      quotient.push_back(std::fabs(b2 - b1) / x);
    }
    for (size_t i = 1; i < quotient.size(); ++i) {
      if (quotient[i - 1] > 1e-14) CHECK(quotient[i] / quotient[i - 1] <= 2.0);
    }
  }
}

TEST_CASE("t_beta multiplier") {
  FourierSeries constant = FourierSeries::zeros(4);
  constant.at(0) = 3.0;
  FourierSeries out = t_beta_multiplier(constant, 0.5);
  for (int32_t n = -4; n <= 4; ++n) CHECK(std::abs(out.at(n)) == 0.0);

  CounterRng rng(9, 0);
  FourierSeries f = FourierSeries::zeros(6), g = FourierSeries::zeros(6);
  for (int32_t n = 1; n <= 6; ++n) {
    std::complex<double> cf{rng.next_uniform(-1, 1), rng.next_uniform(-1, 1)};
    std::complex<double> cg{rng.next_uniform(-1, 1), rng.next_uniform(-1, 1)};
    f.at(n) = cf;
    f.at(-n) = std::conj(cf);
    g.at(n) = cg;
    g.at(-n) = std::conj(cg);
  }
  f.at(0) = 0.4;
  g.at(0) = -1.3;
  // zero mean and pairing symmetry
  CHECK(std::abs(t_beta_multiplier(f, 0.7).at(0)) <= 1e-12);
  CHECK(std::abs(series_pairing(f, t_beta_multiplier(g, 0.7)) -
                 series_pairing(t_beta_multiplier(f, 0.7), g)) <= 1e-10);
}

TEST_CASE("multiplier inversion through numerically integrated G coefficients") {
  const double t = -0.5;
  const double beta = t + 1.0;
  double cb = g_beta_constant(beta);
  for (int32_t n : {1, 2, 5, 8}) {
    auto cosn = [n](double x) { return std::cos(2.0 * n * x); };
    double cn =
        (2.0 / kPi) *
        (quad_power_singular(cosn, t, 0.0, 0.0, kPi / 2.0, 1e-12) +
         adaptive_simpson([&](double x) { return g_beta_regular_part(t, x) * cosn(x); }, 0.0,
                          kPi / 2.0, 1e-12));
    CHECK(std::fabs(std::pow(n, beta) * cn - cb) <= 1e-8);
  }
}

TEST_CASE("injectivity probe") {
  GridMeasure lambda = uniform_measure(512);
  InjectivityReport same = injectivity_probe(lambda, lambda, -0.4, 512);
  CHECK(same.max_potential_discrepancy == 0.0);
  CHECK(same.max_coeff_discrepancy == 0.0);

  GridMeasure delta;
  delta.weights.assign(512, 0.0);
  delta.weights[100] = 1.0;
  InjectivityReport distinct = injectivity_probe(lambda, delta, -0.4, 512);
  CHECK(distinct.max_potential_discrepancy > 0.01);
  CHECK(distinct.max_coeff_discrepancy > 0.01);
}

TEST_CASE("equal potentials bound coefficient distance through the kernel") {
  // perturb lambda by eta cos(2 m theta) with eta c_m(K) = 1e-9: potentials
  // differ by 1e-9, coefficients by eta/2 <= 1e-9 / min_n c_n(K)
  const double t = -0.5;
  const int32_t m = 16;
  const size_t cells = 1024;
  double cm = fourier_coeff_kernel(t, m);
  double eta = 1e-9 / cm;
  GridMeasure nu1 = uniform_measure(cells), nu2 = uniform_measure(cells);
  const double h = kPi / cells;
  for (size_t k = 0; k < cells; ++k) {
    // exact cell integral of eta cos(2 m theta) / pi
    double lo = k * h, hi = (k + 1) * h;
    nu2.weights[k] += eta * (std::sin(2 * m * hi) - std::sin(2 * m * lo)) / (2.0 * m * kPi);
  }
  InjectivityReport rep = injectivity_probe(nu1, nu2, t, cells, 16);
  CHECK(rep.max_potential_discrepancy <= 1.05e-9);
  double min_kernel = fourier_coeff_kernel(t, 16);  // smallest over |n| <= 16
  CHECK(rep.max_coeff_discrepancy <= 1e-9 / min_kernel * 1.05);
}

TEST_CASE("frostman dimension estimator") {
  DimensionEstimate lam = frostman_dim_estimate(uniform_measure(4096),
                                                geometric_radii(0.004, 0.4, 9));
  CHECK(lam.value == doctest::Approx(1.0).epsilon(0.02));

  GridMeasure delta;
  delta.weights.assign(4096, 0.0);
  delta.weights[1000] = 1.0;
  DimensionEstimate datom = frostman_dim_estimate(delta, geometric_radii(0.004, 0.4, 9));
  CHECK(datom.value <= 0.05);

  CHECK_THROWS_AS(frostman_dim_estimate(uniform_measure(64), {0.1, 0.2, 0.3}),
                  std::invalid_argument);
  CHECK_THROWS_AS(frostman_dim_estimate(uniform_measure(64), {0.1, 0.4}),
                  std::invalid_argument);
}

TEST_CASE("frostman dimension from samples") {
  // uniform angles: dimension 1
  CounterRng rng(15, 0);
  std::vector<double> uniform_samples;
  for (int i = 0; i < 200000; ++i) uniform_samples.push_back(rng.next_uniform(0.0, kPi));
  DimensionEstimate u = frostman_dim_estimate(uniform_samples, geometric_radii(0.004, 0.4, 9));
  CHECK(u.value == doctest::Approx(1.0).epsilon(0.03));

  // pushforward under theta -> theta^2/pi: dimension 1/2 at the origin
  std::vector<double> pushed;
  for (double s : uniform_samples) pushed.push_back(s * s / kPi);
  DimensionEstimate p = frostman_dim_estimate(pushed, geometric_radii(0.004, 0.4, 9));
  CHECK(p.value == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("pushforward grid measure has dimension one half") {
  GridMeasure push;
  push.weights.resize(8192);
  const double h = kPi / 8192.0;
  for (size_t k = 0; k < push.weights.size(); ++k)
    push.weights[k] = std::sqrt((k + 1) * h / kPi) - std::sqrt(k * h / kPi);
  DimensionEstimate est = frostman_dim_estimate(push, geometric_radii(0.004, 0.4, 9));
  CHECK(est.value == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("holder exponent estimator") {
  const size_t n = 4096;
  GridFunction root;
  root.values.resize(n);
  for (size_t i = 0; i < n; ++i)
    root.values[i] = std::sqrt(std::fabs(std::sin(grid_node(i, n))));
  HolderEstimate he = holder_exponent_estimate(root);
  CHECK(he.value == doctest::Approx(0.5).epsilon(0.1));
  CHECK_FALSE(he.saturated);

  GridFunction lipschitz;
  lipschitz.values.resize(n);
  for (size_t i = 0; i < n; ++i) lipschitz.values[i] = std::sin(2.0 * grid_node(i, n));
  HolderEstimate hl = holder_exponent_estimate(lipschitz);
  CHECK(hl.value == doctest::Approx(1.0));
  CHECK(hl.saturated);

  GridFunction constant;
  constant.values.assign(n, 3.7);
  HolderEstimate hc = holder_exponent_estimate(constant);
  CHECK(hc.value == 1.0);
  CHECK(hc.saturated);

  GridFunction tiny;
  tiny.values.assign(32, 0.0);
  CHECK_THROWS_AS(holder_exponent_estimate(tiny), std::invalid_argument);
}

TEST_CASE("holder-frostman duality sanity") {
  // measure of dimension ~1/2; its potential at exponent t = -0.2 should be
  // Holder of order >= min(1, d + t) - 0.1 = 0.2
  GridMeasure push;
  push.weights.resize(4096);
  const double h = kPi / 4096.0;
  for (size_t k = 0; k < push.weights.size(); ++k)
    push.weights[k] = std::sqrt((k + 1) * h / kPi) - std::sqrt(k * h / kPi);
  const double t = -0.2;
  GridFunction pot = riesz_potential_nodes(push, t);
  HolderEstimate he = holder_exponent_estimate(pot);
  DimensionEstimate dim = frostman_dim_estimate(push, geometric_radii(0.004, 0.4, 9));
  CHECK(he.value >= std::min(1.0, dim.value + t) - 0.1);
}
