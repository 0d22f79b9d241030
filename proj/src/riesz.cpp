#include "riesz.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "quadrature.hpp"

namespace projlab {

double riesz_potential(const std::vector<std::pair<ProjPoint, double>>& atoms, double t,
                       ProjPoint x) {
  if (t <= -1.0) throw std::invalid_argument("non-integrable exponent");
  double acc = 0.0;
  for (const auto& [y, w] : atoms) acc += w * std::pow(proj_metric(x, y), t);
  return acc;
}

double riesz_potential(const GridMeasure& nu, double t, ProjPoint x) {
  if (t <= -1.0) throw std::invalid_argument("non-integrable exponent");
  if (t == 0.0) return nu.total();
  const size_t n = nu.size();
  const double h = kPi / static_cast<double>(n);
  double acc = 0.0;
  for (size_t j = 0; j < n; ++j) {
    if (nu.weights[j] == 0.0) continue;
    double lo = x.theta - static_cast<double>(j + 1) * h;
    acc += nu.weights[j] * integral_abs_sin_pow(t, lo, lo + h) / h;
  }
  return acc;
}

GridFunction riesz_potential_nodes(const GridMeasure& nu, double t) {
  if (t <= -1.0) throw std::invalid_argument("non-integrable exponent");
  const size_t n = nu.size();
  const double h = kPi / static_cast<double>(n);
  GridFunction out;
  if (t == 0.0) {
    out.values.assign(n, nu.total());
    return out;
  }
  std::vector<double> kernel = kernel_cell_table(t, n);
  out.values.assign(n, 0.0);
  for (size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (size_t j = 0; j < n; ++j) acc += nu.weights[j] * kernel[(i + n - j) % n];
    out.values[i] = acc / h;
  }
  return out;
}

FourierSeries FourierSeries::zeros(int32_t n_max) {
  FourierSeries s;
  s.n_max = n_max;
  s.coeff.assign(static_cast<size_t>(2 * n_max + 1), {0.0, 0.0});
  return s;
}

std::complex<double> fourier_coeff_measure(const GridMeasure& nu, int32_t n) {
  std::complex<double> acc{0.0, 0.0};
  const size_t cells = nu.size();
  for (size_t k = 0; k < cells; ++k) {
    double theta = grid_node(k, cells);
    acc += nu.weights[k] * std::polar(1.0, -2.0 * n * theta);
  }
  return acc;
}

std::complex<double> fourier_coeff_measure(
    const std::vector<std::pair<ProjPoint, double>>& atoms, int32_t n) {
  std::complex<double> acc{0.0, 0.0};
  for (const auto& [y, w] : atoms) acc += w * std::polar(1.0, -2.0 * n * y.theta);
  return acc;
}

FourierSeries fourier_series_of_measure(const GridMeasure& nu, int32_t n_max) {
  FourierSeries s = FourierSeries::zeros(n_max);
  for (int32_t n = -n_max; n <= n_max; ++n) s.at(n) = fourier_coeff_measure(nu, n);
  return s;
}

FourierSeries fourier_series_of_function(const GridFunction& f, int32_t n_max) {
  FourierSeries s = FourierSeries::zeros(n_max);
  const size_t cells = f.size();
  for (int32_t n = -n_max; n <= n_max; ++n) {
    std::complex<double> acc{0.0, 0.0};
    for (size_t k = 0; k < cells; ++k)
      acc += f.values[k] * std::polar(1.0, -2.0 * n * grid_node(k, cells));
    s.at(n) = acc / static_cast<double>(cells);
  }
  return s;
}

double evaluate_series(const FourierSeries& s, double x) {
  std::complex<double> acc{0.0, 0.0};
  for (int32_t n = -s.n_max; n <= s.n_max; ++n) acc += s.at(n) * std::polar(1.0, 2.0 * n * x);
  return acc.real();
}

std::complex<double> series_pairing(const FourierSeries& f, const FourierSeries& g) {
  // <f, g> = int f conj(g) d lambda = sum c_n(f) conj(c_n(g))
  std::complex<double> acc{0.0, 0.0};
  int32_t m = std::min(f.n_max, g.n_max);
  for (int32_t n = -m; n <= m; ++n) acc += f.at(n) * std::conj(g.at(n));
  return acc;
}

double fourier_coeff_kernel(double t, int32_t n, double tol) {
  if (!(t > -1.0) || !(t < 0.0))
    throw std::invalid_argument("fourier_coeff_kernel: t must lie in (-1, 0)");
  int32_t m = std::abs(n);
  auto smooth = [&](double x) {
    if (x <= 0.0) return 1.0;
    return std::pow(std::sin(x) / x, t) * std::cos(2.0 * m * x);
  };
  return (2.0 / kPi) * quad_power_singular(smooth, t, 0.0, 0.0, kPi / 2.0, tol);
}

double g_beta_constant(double beta) {
  if (!(beta > 0.0) || !(beta < 1.0))
    throw std::invalid_argument("g_beta_constant: beta must lie in (0, 1)");
  return std::exp(std::lgamma(0.5 * beta) - std::lgamma(0.5 * (1.0 - beta))) / std::sqrt(kPi);
}

namespace {
// fold onto [0, pi/2] using the pi-periodicity and evenness of the series
double fold_angle(double x) {
  double xf = std::fabs(std::fmod(x, kPi));
  if (xf > kPi / 2.0) xf = kPi - xf;
  return xf;
}
}  // namespace

GBetaValue g_beta_partial_sum(double t, double x, uint64_t n_terms) {
  double beta = t + 1.0;
  double cb = g_beta_constant(beta);
  double xf = fold_angle(x);
  GBetaValue out;
  double acc = 0.0;
  for (uint64_t n = 1; n <= n_terms; ++n)
    acc += std::pow(static_cast<double>(n), -beta) * std::cos(2.0 * n * xf);
  out.value = 2.0 * cb * acc;
  double s = std::fabs(std::sin(xf));
  out.tail_bound = s > 0.0
                       ? 2.0 * cb * std::pow(static_cast<double>(n_terms + 1), -beta) / s
                       : std::numeric_limits<double>::infinity();
  return out;
}

namespace {
// Smooth part of sum_{n>=1} n^{-beta} cos(n theta) after removing the
// Gamma(1-beta) sin(pi beta/2) theta^{beta-1} singular term:
// sum_j B Gamma(1-beta+2j) zeta(1-beta+2j) / (2j)! (theta/2pi)^{2j},
// with B = 2^beta pi^{beta-1} sin(pi beta/2); valid for |theta| < 2 pi.
double periodic_zeta_regular(double beta, double theta) {
  double b_const = std::pow(2.0, beta) * std::pow(kPi, beta - 1.0) * std::sin(kPi * beta / 2.0);
  double ratio2 = theta * theta / (4.0 * kPi * kPi);
  double series = 0.0;
  double power = 1.0;  // (theta/2pi)^{2j}
  for (int j = 0; j < 200; ++j, power *= ratio2) {
    double s = 1.0 - beta + 2.0 * j;
    double term =
        b_const * std::exp(std::lgamma(s) - std::lgamma(2.0 * j + 1.0)) * power * riemann_zeta(s);
    series += term;
    if (j > 2 && std::fabs(term) < 1e-17 * (std::fabs(series) + 1.0)) break;
  }
  return series;
}
}  // namespace

double g_beta(double t, double x) {
  double beta = t + 1.0;
  double xf = fold_angle(x);
  if (xf == 0.0) throw std::invalid_argument("g_beta: singular at x = 0");
  // 2 C_beta Gamma(1-beta) sin(pi beta/2) (2 xf)^{beta-1} == xf^{beta-1}
  return std::pow(xf, beta - 1.0) + g_beta_regular_part(t, x);
}

double g_beta_regular_part(double t, double x) {
  double beta = t + 1.0;
  double cb = g_beta_constant(beta);
  double xf = fold_angle(x);
  return 2.0 * cb * periodic_zeta_regular(beta, 2.0 * xf);
}

FourierSeries t_beta_multiplier(const FourierSeries& series, double beta) {
  FourierSeries out = series;
  for (int32_t n = -out.n_max; n <= out.n_max; ++n)
    out.at(n) = n == 0 ? std::complex<double>{0.0, 0.0}
                       : out.at(n) * std::pow(std::fabs(static_cast<double>(n)), beta);
  return out;
}

InjectivityReport injectivity_probe(const GridMeasure& nu1, const GridMeasure& nu2, double t,
                                    uint32_t x_nodes, int32_t n_max) {
  if (!(t > -1.0) || !(t < 0.0))
    throw std::invalid_argument("injectivity_probe: t must lie in (-1, 0)");
  InjectivityReport rep;
  GridFunction p1 = riesz_potential_nodes(nu1, t);
  GridFunction p2 = riesz_potential_nodes(nu2, t);
  if (x_nodes == nu1.size()) {
    for (size_t i = 0; i < p1.size(); ++i)
      rep.max_potential_discrepancy =
          std::max(rep.max_potential_discrepancy, std::fabs(p1.values[i] - p2.values[i]));
  } else {
    for (uint32_t i = 0; i < x_nodes; ++i) {
      ProjPoint x{grid_node(i, x_nodes)};
      rep.max_potential_discrepancy =
          std::max(rep.max_potential_discrepancy,
                   std::fabs(riesz_potential(nu1, t, x) - riesz_potential(nu2, t, x)));
    }
  }
  for (int32_t n = -n_max; n <= n_max; ++n) {
    double d = std::abs(fourier_coeff_measure(nu1, n) - fourier_coeff_measure(nu2, n));
    rep.max_coeff_discrepancy = std::max(rep.max_coeff_discrepancy, d);
  }
  return rep;
}

std::vector<double> geometric_radii(double r_min, double r_max, int count) {
  std::vector<double> radii(count);
  for (int i = 0; i < count; ++i)
    radii[i] = r_min * std::pow(r_max / r_min, static_cast<double>(i) / (count - 1));
  return radii;
}

namespace {

void validate_ladder(const std::vector<double>& radii) {
  if (radii.size() < 3) throw std::invalid_argument("degenerate ladder: need >= 3 radii");
  double lo = *std::min_element(radii.begin(), radii.end());
  double hi = *std::max_element(radii.begin(), radii.end());
  if (!(lo > 0.0) || hi / lo < 100.0 * (1.0 - 1e-9))
    throw std::invalid_argument("degenerate ladder: radii must span >= 2 decades");
}

struct SlopeFit {
  double slope = 0.0;
  double stderr_slope = 0.0;
};

SlopeFit fit_loglog(const std::vector<double>& xs, const std::vector<double>& ys) {
  const size_t n = xs.size();
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  SlopeFit fit;
  fit.slope = sxy / sxx;
  if (n > 2) {
    double ss = 0.0;
    for (size_t i = 0; i < n; ++i) {
      double r = ys[i] - my - fit.slope * (xs[i] - mx);
      ss += r * r;
    }
    fit.stderr_slope = std::sqrt(ss / (static_cast<double>(n - 2) * sxx));
  }
  return fit;
}

// sup over window centers of the nu-mass of circular windows of
// half-width w; prefix sums treat each cell's mass as uniform on the cell.
double sup_window_mass_grid(const GridMeasure& nu, double w, size_t centers) {
  const size_t n = nu.size();
  const double h = kPi / static_cast<double>(n);
  std::vector<double> prefix(n + 1, 0.0);
  for (size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + nu.weights[i];
  double total = prefix[n];
  auto cumulative = [&](double theta) {  // mass of [0, theta), theta in [0, pi)
    double p = theta / h;
    size_t cell = std::min(static_cast<size_t>(p), n - 1);
    double frac = p - static_cast<double>(cell);
    return prefix[cell] + frac * nu.weights[cell];
  };
  auto window_mass = [&](double center) {
    double a = center - w, b = center + w;
    if (b - a >= kPi) return total;
    a = std::fmod(a, kPi);
    if (a < 0.0) a += kPi;
    b = std::fmod(b, kPi);
    if (b < 0.0) b += kPi;
    if (a <= b) return cumulative(b) - cumulative(a);
    return total - cumulative(a) + cumulative(b);
  };
  double best = 0.0;
  for (size_t c = 0; c < centers; ++c)
    best = std::max(best, window_mass(grid_node(c, centers)));
  return best;
}

double sup_window_count_sorted(const std::vector<double>& sorted, double w) {
  // max number of points in a circular window of half-width w
  const size_t n = sorted.size();
  size_t best = 0;
  size_t j = 0;
  for (size_t i = 0; i < n; ++i) {
    double limit = sorted[i] + 2.0 * w;
    if (j < i) j = i;
    while (j + 1 < i + n) {
      double next = j + 1 < n ? sorted[j + 1] : sorted[j + 1 - n] + kPi;
      if (next <= limit)
        ++j;
      else
        break;
    }
    best = std::max(best, j - i + 1);
  }
  return static_cast<double>(std::min(best, n));
}

DimensionEstimate finish_dimension(std::vector<double> radii, std::vector<double> masses) {
  std::vector<double> lx, ly;
  for (size_t i = 0; i < radii.size(); ++i) {
    if (masses[i] <= 0.0) continue;  // empty windows carry no slope information
    lx.push_back(std::log(radii[i]));
    ly.push_back(std::log(masses[i]));
  }
  DimensionEstimate est;
  est.radii = std::move(radii);
  est.sup_masses = std::move(masses);
  if (lx.size() < 2) {
    est.value = 0.0;
    return est;
  }
  SlopeFit fit = fit_loglog(lx, ly);
  est.value = std::clamp(fit.slope, 0.0, 1.0);
  est.slope_stderr = fit.stderr_slope;
  return est;
}

}  // namespace

DimensionEstimate frostman_dim_estimate(const GridMeasure& nu, std::vector<double> radii) {
  validate_ladder(radii);
  std::sort(radii.begin(), radii.end());
  double r_min = radii.front();
  // sup grid 16x finer than the smallest radius (in arc length)
  size_t centers = static_cast<size_t>(std::ceil(kPi / (std::asin(std::min(r_min, 1.0)) / 16.0)));
  centers = std::min<size_t>(std::max<size_t>(centers, nu.size()), 1u << 22);
  std::vector<double> masses;
  masses.reserve(radii.size());
  for (double r : radii)
    masses.push_back(sup_window_mass_grid(nu, std::asin(std::min(r, 1.0)), centers));
  return finish_dimension(std::move(radii), std::move(masses));
}

DimensionEstimate frostman_dim_estimate(const std::vector<double>& sample_angles,
                                        std::vector<double> radii) {
  validate_ladder(radii);
  if (sample_angles.empty()) throw std::invalid_argument("no samples");
  std::sort(radii.begin(), radii.end());
  std::vector<double> sorted = sample_angles;
  for (double& a : sorted) a = canonical_angle(a);
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> masses;
  masses.reserve(radii.size());
  for (double r : radii) {
    double cnt = sup_window_count_sorted(sorted, std::asin(std::min(r, 1.0)));
    masses.push_back(cnt / static_cast<double>(sorted.size()));
  }
  return finish_dimension(std::move(radii), std::move(masses));
}

HolderEstimate holder_exponent_estimate(const GridFunction& f) {
  const size_t n = f.size();
  if (n < 64) throw std::invalid_argument("holder_exponent_estimate: need N >= 64");
  HolderEstimate est;
  const double h = kPi / static_cast<double>(n);
  for (size_t k = 1; k <= n / 4; k *= 2) {
    double omega = 0.0;
    for (size_t i = 0; i < n; ++i)
      omega = std::max(omega, std::fabs(f.values[(i + k) % n] - f.values[i]));
    est.scales.push_back(std::fabs(std::sin(static_cast<double>(k) * h)));
    est.moduli.push_back(omega);
  }
  std::vector<double> lx, ly;
  for (size_t i = 0; i < est.scales.size(); ++i) {
    if (est.moduli[i] <= 0.0) continue;
    lx.push_back(std::log(est.scales[i]));
    ly.push_back(std::log(est.moduli[i]));
  }
  if (lx.size() < 2) {  // constant input
    est.value = 1.0;
    est.saturated = true;
    return est;
  }
  double slope = fit_loglog(lx, ly).slope;
  if (slope >= 1.0 - 1e-5) {
    est.value = 1.0;
    est.saturated = true;
  } else if (slope <= 0.0) {
    est.value = std::numeric_limits<double>::min();
  } else {
    est.value = slope;
  }
  return est;
}

}  // namespace projlab
