#include "transfer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "quadrature.hpp"
#include "rng.hpp"

namespace projlab {

double GridMeasure::total() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }

void GridMeasure::normalize() {
  double s = total();
  if (!(s > 0.0)) throw std::runtime_error("cannot normalize a zero measure");
  for (double& w : weights) w /= s;
}

GridMeasure uniform_measure(size_t n_cells) {
  GridMeasure m;
  m.weights.assign(n_cells, 1.0 / static_cast<double>(n_cells));
  return m;
}

DiscreteOperator build_operator(const MatrixMeasure& mu, double t, uint32_t n_cells,
                                bool dual) {
  if (n_cells < 8) throw std::invalid_argument("build_operator: N must be >= 8");
  DiscreteOperator op;
  op.n_cells = n_cells;
  op.t = t;
  op.dual = dual;
  op.experimental = t > 0.0;
  op.measure_fingerprint = mu.fingerprint;
  op.entries_per_row = static_cast<uint32_t>(2 * mu.size());
  op.cols.resize(static_cast<size_t>(n_cells) * op.entries_per_row);
  op.vals.resize(op.cols.size());

  const double h = kPi / n_cells;
  for (uint32_t i = 0; i < n_cells; ++i) {
    ProjPoint x{grid_node(i, n_cells)};
    size_t base = static_cast<size_t>(i) * op.entries_per_row;
    for (size_t a = 0; a < mu.size(); ++a) {
      Mat2 g = dual ? adjoint(mu.atoms[a].g) : mu.atoms[a].g;
      double coeff = mu.atoms[a].weight * std::pow(norm_ratio(g, x), t);
      double y = act(g, x).theta;
      // circular piecewise-linear weights on the midpoint nodes
      double p = y / h - 0.5;
      double fl = std::floor(p);
      double frac = p - fl;
      long j0 = static_cast<long>(fl);
      uint32_t c0 = static_cast<uint32_t>(((j0 % n_cells) + n_cells) % n_cells);
      uint32_t c1 = (c0 + 1) % n_cells;
      op.cols[base + 2 * a] = c0;
      op.vals[base + 2 * a] = coeff * (1.0 - frac);
      op.cols[base + 2 * a + 1] = c1;
      op.vals[base + 2 * a + 1] = coeff * frac;
    }
  }
  return op;
}

std::vector<double> DiscreteOperator::apply(const std::vector<double>& f) const {
  std::vector<double> out(n_cells, 0.0);
  for (size_t i = 0; i < n_cells; ++i) {
    size_t base = i * entries_per_row;
    double acc = 0.0;
    for (size_t k = 0; k < entries_per_row; ++k) acc += vals[base + k] * f[cols[base + k]];
    out[i] = acc;
  }
  return out;
}

std::vector<double> DiscreteOperator::apply_transpose(const std::vector<double>& nu) const {
  std::vector<double> out(n_cells, 0.0);
  for (size_t i = 0; i < n_cells; ++i) {
    size_t base = i * entries_per_row;
    for (size_t k = 0; k < entries_per_row; ++k) out[cols[base + k]] += vals[base + k] * nu[i];
  }
  return out;
}

double DiscreteOperator::row_sum(size_t row) const {
  size_t base = row * entries_per_row;
  double acc = 0.0;
  for (size_t k = 0; k < entries_per_row; ++k) acc += vals[base + k];
  return acc;
}

namespace {

double sup_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double geometric_mean_tail(const std::vector<double>& factors) {
  size_t from = factors.size() - std::max<size_t>(1, factors.size() / 4);
  double acc = 0.0;
  size_t cnt = 0;
  for (size_t i = from; i < factors.size(); ++i, ++cnt) acc += std::log(factors[i]);
  return std::exp(acc / static_cast<double>(cnt));
}

}  // namespace

EigenTriple leading_triple(const DiscreteOperator& op, double tol, uint32_t max_iters) {
  const size_t n = op.n_cells;
  std::vector<double> h(n, 1.0);
  std::vector<double> nu(n, 1.0 / static_cast<double>(n));
  std::vector<double> companion(n);
  for (size_t i = 0; i < n; ++i) companion[i] = (i % 2 == 0) ? 1.0 : -1.0;

  std::vector<double> h_factors, companion_factors;
  h_factors.reserve(1024);
  uint32_t iter = 0;
  for (; iter < max_iters; ++iter) {
    std::vector<double> h_next = op.apply(h);
    double s = sup_norm(h_next);
    if (!(s > 0.0) || !std::isfinite(s))
      throw ConvergenceError("leading_triple: iteration degenerated", iter, h_factors);
    for (double& v : h_next) v /= s;
    h_factors.push_back(s);

    std::vector<double> nu_next = op.apply_transpose(nu);
    double mass = std::accumulate(nu_next.begin(), nu_next.end(), 0.0);
    for (double& v : nu_next) v /= mass;

    // deflate the companion vector against the current leading pair
    std::vector<double> c_next = op.apply(companion);
    double proj = dot(nu_next, c_next) / std::max(dot(nu_next, h_next), 1e-300);
    for (size_t i = 0; i < n; ++i) c_next[i] -= proj * h_next[i];
    double cs = sup_norm(c_next);
    if (cs > 0.0) {
      for (double& v : c_next) v /= cs;
      companion_factors.push_back(cs);
    }

    double diff = 0.0;
    for (size_t i = 0; i < n; ++i) diff = std::max(diff, std::fabs(h_next[i] - h[i]));
    h.swap(h_next);
    nu.swap(nu_next);
    companion.swap(c_next);
    if (iter > 8 && diff < tol) {
      ++iter;
      break;
    }
  }
  if (iter >= max_iters) {
    std::vector<double> tail(h_factors.end() - std::min<size_t>(h_factors.size(), 16),
                             h_factors.end());
    throw ConvergenceError("leading_triple: no convergence", iter, tail);
  }

  EigenTriple out;
  double lambda = geometric_mean_tail(h_factors);
  out.log_eigenvalue = std::log(lambda);
  out.iterations = iter;
  if (!companion_factors.empty())
    out.gap_ratio = std::min(1.0, geometric_mean_tail(companion_factors) / lambda);

  // normalize: nu a probability (already), <nu, h> = 1
  double pairing = dot(nu, h);
  for (double& v : h) v /= pairing;
  out.eigenfunction.values = std::move(h);
  out.eigenmeasure.weights = std::move(nu);
  return out;
}

GridMeasure iterate_on_lebesgue(const DiscreteOperator& op_dual, uint32_t n) {
  if (n < 1) throw std::invalid_argument("iterate_on_lebesgue: n must be >= 1");
  GridMeasure m = uniform_measure(op_dual.n_cells);
  for (uint32_t k = 0; k < n; ++k) {
    m.weights = op_dual.apply_transpose(m.weights);
    m.normalize();
  }
  return m;
}

double duality_check(const MatrixMeasure& mu, double t, uint32_t n,
                     const std::vector<std::pair<ProjPoint, double>>& probe,
                     uint32_t x_nodes, uint64_t cap) {
  if (probe.empty()) throw std::invalid_argument("duality_check: empty probe measure");
  auto products = enumerate_products(mu, n, cap);

  // pushforward atoms of (*P_t^n) probe: weight W q |g* w|^t at g* w
  struct PushedAtom {
    double theta;
    double weight;
  };
  std::vector<PushedAtom> pushed;
  pushed.reserve(products.size() * probe.size());
  for (const auto& [p, w] : products) {
    Mat2 gstar = adjoint(p.m);
    for (const auto& [wpt, q] : probe) {
      double lognorm = p.log_scale + std::log(norm_ratio(gstar, wpt));
      pushed.push_back({act(gstar, wpt).theta, w * q * std::exp(t * lognorm)});
    }
  }

  double max_disc = 0.0;
  for (uint32_t ix = 0; ix < x_nodes; ++ix) {
    ProjPoint x{grid_node(ix, x_nodes)};
    double lhs = 0.0;
    for (const auto& [p, w] : products) {
      double lognorm = p.log_scale + std::log(norm_ratio(p.m, x));
      ProjPoint gx = p.apply(x);
      double inner_sum = 0.0;
      for (const auto& [wpt, q] : probe) inner_sum += q * std::pow(inner_abs(gx, wpt), t);
      lhs += w * std::exp(t * lognorm) * inner_sum;
    }
    double rhs = 0.0;
    for (const auto& atom : pushed)
      rhs += atom.weight * std::pow(inner_abs(x, ProjPoint{atom.theta}), t);
    max_disc = std::max(max_disc, std::fabs(lhs - rhs));
  }
  return max_disc;
}

double mass_identity_check(const MatrixMeasure& mu, double t, uint32_t n, uint32_t n_cells) {
  DiscreteOperator fwd = build_operator(mu, t, n_cells, false);
  DiscreteOperator dual = build_operator(mu, t, n_cells, true);
  std::vector<double> ones(n_cells, 1.0);
  std::vector<double> f = ones, g = ones;
  for (uint32_t k = 0; k < n; ++k) {
    f = fwd.apply(f);
    g = dual.apply(g);
  }
  double a = std::accumulate(f.begin(), f.end(), 0.0) / n_cells;
  double b = std::accumulate(g.begin(), g.end(), 0.0) / n_cells;
  return std::fabs(a - b) / std::max(std::fabs(a), std::fabs(b));
}

std::vector<double> kernel_cell_table(double t, size_t n_cells) {
  if (t <= -1.0) throw std::invalid_argument("non-integrable exponent");
  const double h = kPi / static_cast<double>(n_cells);
  std::vector<double> table(n_cells);
  for (size_t m = 0; m < n_cells; ++m) {
    double lo = (static_cast<double>(m) - 0.5) * h;
    // fold into the fundamental period around 0 to keep the adaptive
    // integrator near its singular points
    table[m] = integral_abs_sin_pow(t, lo, lo + h);
  }
  return table;
}

GridFunction eigenfunction_from_eigenmeasure(const GridMeasure& star_nu, double t,
                                             const GridMeasure* nu_pairing) {
  if (t <= -1.0) throw std::invalid_argument("non-integrable exponent");
  if (t > 0.0) throw std::invalid_argument("eigenfunction potential requires t <= 0");
  const size_t n = star_nu.size();
  if (n % 2 != 0) throw std::invalid_argument("grid size must be even");
  const double h = kPi / static_cast<double>(n);
  std::vector<double> kernel = kernel_cell_table(t, n);

  GridFunction out;
  out.values.assign(n, 0.0);
  const size_t half = n / 2;
  for (size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (size_t j = 0; j < n; ++j) {
      acc += star_nu.weights[j] * kernel[(i + half - j + n) % n];
    }
    out.values[i] = acc / h;
  }
  if (nu_pairing != nullptr) {
    double pairing = 0.0;
    for (size_t i = 0; i < n; ++i) pairing += nu_pairing->weights[i] * out.values[i];
    if (pairing != 0.0)
      for (double& v : out.values) v /= pairing;
  }
  return out;
}

double lasota_yorke_probe(const MatrixMeasure& mu, double t, double zeta, uint32_t n,
                          uint64_t pair_samples, uint64_t seed, uint64_t integral_samples) {
  if (!(zeta >= 0.0) || zeta > 1.0)
    throw std::invalid_argument("lasota_yorke_probe: zeta must lie in [0,1]");
  if (pair_samples < 1) throw std::invalid_argument("lasota_yorke_probe: need pairs");

  double n_products = std::pow(static_cast<double>(mu.size()), static_cast<double>(n));
  bool enumerate = n_products <= static_cast<double>(kEnumerationCap);
  std::vector<std::pair<ScaledMat2, double>> products;
  if (enumerate) {
    products = enumerate_products(mu, n);
  } else {
    products.reserve(integral_samples);
    for (uint64_t s = 0; s < integral_samples; ++s)
      products.push_back({sample_product_scaled(mu, n, seed ^ 0x9e37u, s),
                          1.0 / static_cast<double>(integral_samples)});
  }

  double sup = kNegInf;
  const int kScales = 40;
  for (uint64_t ps = 0; ps < pair_samples; ++ps) {
    CounterRng rng(seed, ps);
    double theta_x = rng.next_uniform(0.0, kPi);
    int scale = static_cast<int>(ps % kScales);
    double offset = (scale == 0) ? rng.next_uniform(0.0, kPi)
                                 : std::exp(-static_cast<double>(scale));
    ProjPoint x{canonical_angle(theta_x)};
    ProjPoint y{canonical_angle(theta_x + offset)};

    double integral = 0.0;
    for (const auto& [p, w] : products) {
      double lx = p.log_scale + std::log(norm_ratio(p.m, x));
      double ly = p.log_scale + std::log(norm_ratio(p.m, y));
      // on SL(2,R): d(gx,gy)/d(x,y) = 1/(|gx| |gy|) exactly
      integral += w * std::exp(t * lx - zeta * (lx + ly));
    }
    sup = std::max(sup, integral);
  }
  return std::log(sup) / n;
}

ZetaEstimate zeta_solver(const RateTable& i2_table, double k_at_t, double t, double tol) {
  if (!(t > -1.0) || t > 0.0)
    throw std::invalid_argument("zeta_solver: t must lie in (-1, 0]");
  std::vector<double> i2 = i2_table.i2_row();
  bool has_positive_alpha = false;
  for (size_t ia = 0; ia < i2.size(); ++ia)
    if (i2[ia] != kNegInf && i2_table.alpha_grid[ia] > 0.0) has_positive_alpha = true;
  if (!has_positive_alpha) throw std::runtime_error("degenerate table");

  auto envelope = [&](double zeta, double* alpha_star) {
    double best = kNegInf;
    double arg = 0.0;
    for (size_t ia = 0; ia < i2.size(); ++ia) {
      if (i2[ia] == kNegInf) continue;
      double alpha = i2_table.alpha_grid[ia];
      double v = i2[ia] - t * alpha + 2.0 * zeta * alpha;
      if (v > best) {
        best = v;
        arg = alpha;
      }
    }
    if (alpha_star != nullptr) *alpha_star = arg;
    return best - k_at_t;
  };

  double lo = 0.0, hi = 1.0 + t;
  ZetaEstimate out;
  if (envelope(lo, nullptr) >= 0.0) {
    out.zeta = tol;  // root at or below 0, clip into (0, 1+t]
    out.bracketed = false;
    envelope(out.zeta, &out.alpha_star);
    return out;
  }
  if (envelope(hi, nullptr) <= 0.0) {
    out.zeta = hi;
    out.bracketed = false;
    envelope(out.zeta, &out.alpha_star);
    return out;
  }
  while (hi - lo > tol) {
    double mid = 0.5 * (lo + hi);
    if (envelope(mid, nullptr) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  out.zeta = 0.5 * (lo + hi);
  envelope(out.zeta, &out.alpha_star);
  return out;
}

}  // namespace projlab
