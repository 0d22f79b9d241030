#include "quadrature.hpp"

#include <cmath>
#include <stdexcept>

#include "geometry.hpp"

namespace projlab {

namespace {

double simpson(double a, double fa, double fm, double b, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

// force_depth keeps subdividing regardless of the error estimate; without
// it, integrands oscillating at a power of two of the interval (e.g.
// cos(2nx) on [0, pi/2]) alias to constants on the first Simpson nodes.
double adaptive_step(const std::function<double(double)>& f, double a, double fa, double b,
                     double fb, double m, double fm, double whole, double tol, int depth,
                     int force_depth) {
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = simpson(a, fa, flm, m, fm);
  double right = simpson(m, fm, frm, b, fb);
  double delta = left + right - whole;
  if (depth <= 0 || (force_depth <= 0 && std::fabs(delta) <= 15.0 * tol))
    return left + right + delta / 15.0;
  return adaptive_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1,
                       force_depth - 1) +
         adaptive_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1,
                       force_depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int max_depth) {
  if (a == b) return 0.0;
  double m = 0.5 * (a + b);
  double fa = f(a), fb = f(b), fm = f(m);
  double whole = simpson(a, fa, fm, b, fb);
  return adaptive_step(f, a, fa, b, fb, m, fm, whole, tol, max_depth, 8);
}

double quad_power_singular(const std::function<double(double)>& g, double t, double s0,
                           double a, double b, double tol) {
  if (a > b) return -quad_power_singular(g, t, s0, b, a, tol);
  if (t <= -1.0) throw std::invalid_argument("non-integrable exponent");
  auto one_side = [&](double lo, double hi) -> double {
    // Interval entirely on one side of s0 (lo >= s0).
    if (hi <= lo) return 0.0;
    double p = 1.0 + t;
    double g0 = g(s0);
    double exact = g0 * (std::pow(hi - s0, p) - std::pow(lo - s0, p)) / p;
    auto rem = [&](double x) { return (g(x) - g0) * std::pow(x - s0, t); };
    // The remainder integrand extends continuously by 0 at s0.
    auto rem_safe = [&](double x) { return x <= s0 ? 0.0 : rem(x); };
    return exact + adaptive_simpson(rem_safe, lo, hi, tol);
  };
  if (b <= s0) {
    auto gr = [&](double x) { return g(2.0 * s0 - x); };
    return quad_power_singular(gr, t, s0, 2.0 * s0 - b, 2.0 * s0 - a, tol);
  }
  if (a >= s0) return one_side(a, b);
  // straddles the singularity: reflect the left part
  auto gr = [&](double x) { return g(2.0 * s0 - x); };
  double left = quad_power_singular(gr, t, s0, s0, 2.0 * s0 - a, tol);
  return left + one_side(s0, b);
}

double integral_abs_sin_pow(double t, double lo, double hi, double tol) {
  if (hi < lo) return -integral_abs_sin_pow(t, hi, lo, tol);
  if (t <= -1.0) throw std::invalid_argument("non-integrable exponent");
  if (t == 0.0) return hi - lo;
  double total = 0.0;
  // walk over the zeros of sin at multiples of pi
  double k0 = std::floor(lo / kPi);
  for (double k = k0;; k += 1.0) {
    double z0 = k * kPi, z1 = (k + 1.0) * kPi;
    double a = std::max(lo, z0), b = std::min(hi, z1);
    if (a >= hi) break;
    if (b <= a) continue;
    double mid = 0.5 * (z0 + z1);
    // smooth factor (sin|u-z|/|u-z|)^t relative to the nearest zero
    auto piece = [&](double s0, double pa, double pb) {
      auto smooth = [&](double x) {
        double d = std::fabs(x - s0);
        if (d < 1e-150) return 1.0;
        return std::pow(std::fabs(std::sin(d)) / d, t);
      };
      return quad_power_singular(smooth, t, s0, pa, pb, tol);
    };
    if (b <= mid) {
      total += piece(z0, a, b);
    } else if (a >= mid) {
      total += piece(z1, a, b);
    } else {
      total += piece(z0, a, mid) + piece(z1, mid, b);
    }
    if (b >= hi) break;
  }
  return total;
}

double lambda_constant(double t) {
  if (t <= -1.0) throw std::invalid_argument("non-integrable exponent");
  if (t == 0.0) return 1.0;
  return (2.0 / kPi) * integral_abs_sin_pow(t, 0.0, kPi / 2.0);
}

double lambda_constant_gamma(double t) {
  if (t <= -1.0) throw std::invalid_argument("non-integrable exponent");
  // int_0^{pi/2} sin^t = sqrt(pi)/2 * Gamma((1+t)/2) / Gamma(1 + t/2)
  return std::exp(std::lgamma(0.5 * (1.0 + t)) - std::lgamma(1.0 + 0.5 * t)) / std::sqrt(kPi);
}

double riemann_zeta(double s) {
  if (s == 1.0) throw std::invalid_argument("zeta pole at s = 1");
  // Euler-Maclaurin with M leading terms and Bernoulli tail corrections.
  static const double kBern[] = {1.0 / 6.0,   -1.0 / 30.0,  1.0 / 42.0,   -1.0 / 30.0,
                                 5.0 / 66.0,  -691.0 / 2730.0, 7.0 / 6.0, -3617.0 / 510.0};
  constexpr int M = 24;
  double sum = 0.0;
  for (int n = 1; n < M; ++n) sum += std::pow(n, -s);
  double Md = static_cast<double>(M);
  sum += std::pow(Md, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(Md, -s);
  // Tail: sum_k B_{2k}/(2k)! * (s)(s+1)...(s+2k-2) * M^{-s-2k+1}
  double acc = 0.0;
  double rising = 1.0;  // (s)(s+1)...(s+2k-2) built incrementally
  static const double kFact[] = {2.0, 24.0, 720.0, 40320.0, 3628800.0, 479001600.0,
                                 87178291200.0, 20922789888000.0};
  for (int k = 1; k <= 8; ++k) {
    if (k == 1) {
      rising = s;
    } else {
      rising *= (s + 2.0 * k - 3.0) * (s + 2.0 * k - 2.0);
    }
    acc += kBern[k - 1] / kFact[k - 1] * rising * std::pow(Md, -s - 2.0 * k + 1.0);
  }
  return sum + acc;
}

}  // namespace projlab
