#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "measure.hpp"
#include "montecarlo.hpp"

using namespace projlab;

namespace {
MatrixMeasure rotation_pair() {
  return make_measure({{mat_rotation(0.9), 0.5}, {mat_rotation(2.2), 0.5}});
}
MatrixMeasure exp_atom() { return make_measure({{mat_diag(std::exp(1.0), std::exp(-1.0)), 1.0}}); }
}  // namespace

TEST_CASE("lyapunov estimator") {
  LyapunovEstimate rot = estimate_lyapunov(rotation_pair(), 16, 500, 3);
  CHECK(rot.value == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(rot.std_err == doctest::Approx(0.0).epsilon(1e-12));

  LyapunovEstimate one = estimate_lyapunov(exp_atom(), 12, 100, 3);
  CHECK(one.value == doctest::Approx(1.0).epsilon(1e-12));

  // classical L(mu) = 0 for {diag(2,1/2), rotation(pi/2)}; the estimator
  // averages (1/n) log kappa >= 0, so its bias decays like n^{-1/2} while
  // the standard error is bias/sqrt(samples) up to a constant: the 3 se
  // coverage only holds for small sample counts
  MatrixMeasure classical =
      make_measure({{mat_diag(2.0, 0.5), 0.5}, {mat_rotation(kPi / 2), 0.5}});
  LyapunovEstimate cls = estimate_lyapunov(classical, 2048, 2, 7, 2);
  CHECK(std::fabs(cls.value) <= 3.0 * cls.std_err);
  CHECK(std::fabs(cls.value) <= 0.05);  // n large enough that the bias is small outright

  // bounded by alpha_bar
  MatrixMeasure ref = reference_measure();
  LyapunovEstimate l = estimate_lyapunov(ref, 24, 5000, 11, 2);
  CHECK(l.value <= ref.alpha_bar + 1e-12);
  CHECK(l.value > 0.0);

  CHECK_THROWS_AS(estimate_lyapunov(ref, 0, 10, 1), std::invalid_argument);
  CHECK_THROWS_AS(estimate_lyapunov(ref, 4, 1, 1), std::invalid_argument);
}

TEST_CASE("kt estimator anchors") {
  MatrixMeasure ref = reference_measure();
  KtPoint zero = estimate_kt(ref, 0.0, 10, 100, 5);
  CHECK(zero.k_hat == 0.0);
  CHECK(zero.std_err == 0.0);
  CHECK(zero.bracket == BracketSide::kExact);

  // |g_1...g_n| = e^n for the diagonal atom, so k_hat = t exactly
  for (double t : {-0.7, -0.2, 0.4}) {
    KtPoint pt = estimate_kt(exp_atom(), t, 9, 50, 5);
    CHECK(pt.k_hat == doctest::Approx(t).epsilon(1e-12));
    CHECK(pt.bracket == (t < 0 ? BracketSide::kLower : BracketSide::kUpper));
  }

  KtPoint rot = estimate_kt(rotation_pair(), -0.5, 12, 100, 5);
  CHECK(rot.k_hat == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("kt bracket monotonicity in n for t < 0") {
  MatrixMeasure ref = reference_measure();
  KtPoint a = estimate_kt(ref, -0.3, 8, 40000, 9, 2);
  KtPoint b = estimate_kt(ref, -0.3, 16, 40000, 9, 2);
  CHECK(a.k_hat <= b.k_hat + 3.0 * std::hypot(a.std_err, b.std_err));
}

TEST_CASE("kt convexity across a grid") {
  MatrixMeasure ref = reference_measure();
  KtCurve curve = estimate_kt_curve(ref, {-0.4, -0.3, -0.2, -0.1, 0.0}, 16, 40000, 13, 2);
  for (size_t i = 1; i + 1 < curve.points.size(); ++i) {
    const KtPoint &a = curve.points[i - 1], &b = curve.points[i], &c = curve.points[i + 1];
    double lam = (c.t - b.t) / (c.t - a.t);
    double interp = lam * a.k_hat + (1.0 - lam) * c.k_hat;
    double sigma =
        std::sqrt(a.std_err * a.std_err + b.std_err * b.std_err + c.std_err * c.std_err);
    CHECK(b.k_hat <= interp + 3.0 * sigma);
  }
}

TEST_CASE("kt ladder extrapolation is finite and ordered") {
  KtLadder ladder = kt_ladder(reference_measure(), -0.3, 8, 3, 20000, 17, 2);
  CHECK(ladder.n_values.size() == 3);
  CHECK(std::isfinite(ladder.extrapolated));
  CHECK(ladder.k_values.front() <= ladder.extrapolated + 0.05);
}

TEST_CASE("rate table: deterministic single atom") {
  // alpha_hat = 1 exactly for every sample; gamma = 0 window covers P
  RateTable table = estimate_rate_table(exp_atom(), 8, 0.05, 64, 2000, false, 21);
  size_t ia_one = 20;  // alpha = 1.0 on the 0.05 grid
  CHECK(table.alpha_grid[ia_one] == doctest::Approx(1.0));
  CHECK(table.at(ia_one, 0).i_hat == doctest::Approx(0.0));
  CHECK(table.at(ia_one, 0).hit == doctest::Approx(2000.0));
  // all other alpha bins are empty
  for (size_t ia = 0; ia < table.alpha_grid.size(); ++ia) {
    if (ia == ia_one) continue;
    CHECK(table.at(ia, 0).i_hat == kNegInf);
  }
}

TEST_CASE("rate table: gamma monotonicity from set inclusion") {
  RateTable table = estimate_rate_table(reference_measure(), 8, 0.05, 128, 20000, false, 23, 2);
  size_t g2 = table.gamma_index_of_two();
  for (size_t ia = 0; ia < table.alpha_grid.size(); ++ia) {
    CHECK(table.at(ia, g2).hit <= table.at(ia, 0).hit + 1e-12);
    for (size_t ig = 1; ig < table.gamma_grid.size(); ++ig)
      CHECK(table.at(ia, ig).hit <= table.at(ia, ig - 1).hit + 1e-12);
  }
}

TEST_CASE("rate table: sampled matches exact enumeration at n = 3") {
  MatrixMeasure ref = reference_measure();
  const uint32_t n = 3;
  const uint64_t samples = 100000;
  RateTable exact = exact_rate_table(ref, n, 0.05, 64, false);
  RateTable sampled = estimate_rate_table(ref, n, 0.05, 64, samples, false, 29, 2);
  REQUIRE(exact.alpha_grid.size() == sampled.alpha_grid.size());
  for (size_t ia = 0; ia < exact.alpha_grid.size(); ++ia) {
    for (size_t ig = 0; ig < exact.gamma_grid.size(); ++ig) {
      double p = exact.at(ia, ig).hit;
      double phat = sampled.at(ia, ig).hit / sampled.total;
      double sigma = std::sqrt(std::max(p * (1.0 - p), 0.0) / samples);
      CHECK(std::fabs(phat - p) <= 3.0 * sigma + 1.0 / samples);
    }
  }
}

TEST_CASE("rate table: dual flag uses the image direction") {
  // g = diag(e, 1/e) rotated: omega_- and upsilon_+ differ, so the tables
  // localize mass at different x
  Mat2 g = mat_rotation(0.6) * mat_diag(std::exp(1.0), std::exp(-1.0));
  MatrixMeasure mu = make_measure({{g, 1.0}});
  RateTable primal = estimate_rate_table(mu, 1, 0.05, 256, 500, false, 31);
  RateTable dual = estimate_rate_table(mu, 1, 0.05, 256, 500, true, 31);
  size_t g2 = primal.gamma_index_of_two();
  size_t ia = 20;  // alpha = 1.0 on the 0.05 grid
  REQUIRE(primal.alpha_grid[ia] == doctest::Approx(1.0));
  CHECK(primal.at(ia, g2).x_argmax != dual.at(ia, g2).x_argmax);
}

TEST_CASE("legendre transform of synthetic curves") {
  KtCurve linear;  // k(t) = t on a grid
  linear.n = 1;
  for (double t = -1.0; t <= 1.0 + 1e-12; t += 0.1) linear.points.push_back({t, t, 0.0,
                                                                             BracketSide::kExact});
  LegendreValue at_one = legendre_rate(linear, 1.0);
  CHECK(at_one.value == doctest::Approx(0.0).epsilon(1e-12));
  LegendreValue at_half = legendre_rate(linear, 0.5);
  CHECK(at_half.edge_limited);
  CHECK(at_half.value < -0.4);

  KtCurve flat;  // k = 0 (rotations)
  flat.n = 1;
  for (double t = -1.0; t <= 0.0 + 1e-12; t += 0.1) flat.points.push_back({t, 0.0, 0.0,
                                                                           BracketSide::kExact});
  CHECK(legendre_rate(flat, 0.0).value == doctest::Approx(0.0));

  CHECK_THROWS_AS(legendre_rate(KtCurve{}, 0.0), std::invalid_argument);
}

TEST_CASE("legendre tangency at the Lyapunov exponent") {
  MatrixMeasure ref = reference_measure();
  KtCurve curve = estimate_kt_curve(ref, {-0.2, -0.15, -0.1, -0.05, 0.0, 0.05, 0.1, 0.15, 0.2},
                                    20, 60000, 37, 2);
  LyapunovEstimate lyap = estimate_lyapunov(ref, 20, 60000, 37, 2);
  LegendreValue rate = legendre_rate(curve, lyap.value);
  double sigma = 0.0;
  for (const auto& pt : curve.points) sigma = std::max(sigma, pt.std_err);
  CHECK(std::fabs(rate.value) <= 2.0 * (sigma + lyap.std_err * 0.2 + 1e-3));
  CHECK(rate.t_argmin == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("t0 estimate on synthetic curves") {
  KtCurve kinked;  // k(t) = max(t, -0.5)
  kinked.n = 1;
  for (double t = -1.0; t <= 0.0 + 1e-12; t += 0.05)
    kinked.points.push_back({t, std::max(t, -0.5), 0.0, BracketSide::kExact});
  T0Estimate t0 = estimate_t0(kinked, -0.5);
  CHECK(t0.detected);
  CHECK(std::fabs(t0.value - (-0.5)) <= t0.uncertainty + 1e-12);

  T0Estimate none = estimate_t0(kinked, kNegInf);
  CHECK_FALSE(none.detected);
}

TEST_CASE("tc estimate on synthetic tables") {
  // I2(1) = -2, k(t) = t: crossing everywhere above t = -1, clipped at -1
  RateTable table;
  table.n = 1;
  table.alpha_grid = {0.0, 0.5, 1.0};
  table.gamma_grid = {0.0, 2.0};
  table.entries.resize(6);
  for (auto& e : table.entries) e = {0.0, kNegInf, -1};
  table.entries[2 * 2 + 1] = {1.0, -2.0, 0};  // (alpha=1, gamma=2)

  KtCurve linear;
  linear.n = 1;
  for (double t = -1.0; t <= 0.0 + 1e-12; t += 0.1)
    linear.points.push_back({t, t, 0.0, BracketSide::kExact});

  TcEstimate tc = estimate_tc(linear, table);
  CHECK(tc.detected);
  CHECK(tc.value == doctest::Approx(-1.0));
  CHECK(tc.clipped);

  // all entries empty -> error
  RateTable empty = table;
  for (auto& e : empty.entries) e = {0.0, kNegInf, -1};
  CHECK_THROWS_WITH_AS(estimate_tc(linear, empty), "no I2 data", std::runtime_error);

  // only alpha = 0 finite with a floor value below the curve: still -1
  RateTable floor_table = empty;
  floor_table.entries[0 * 2 + 1] = {1.0, -5.0, 0};
  TcEstimate tc2 = estimate_tc(linear, floor_table);
  CHECK(tc2.detected);
  CHECK(tc2.value == doctest::Approx(-1.0));
}
