#include "montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <memory>
#include <stdexcept>

#include "parallel.hpp"
#include "rng.hpp"

namespace projlab {

namespace {

struct MomentPartial {
  double shift = kNegInf;  // chunk max of y = t log kappa
  double s1 = 0.0;         // sum exp(y - shift)
  double s2 = 0.0;         // sum exp(2 (y - shift))
  uint64_t count = 0;
};

}  // namespace

LyapunovEstimate estimate_lyapunov(const MatrixMeasure& mu, uint32_t n, uint64_t samples,
                                   uint64_t seed, int threads) {
  if (n < 1) throw std::invalid_argument("estimate_lyapunov: n must be >= 1");
  if (samples < 2) throw std::invalid_argument("estimate_lyapunov: samples must be >= 2");
  const size_t n_chunks = chunk_count(samples);
  std::vector<double> sums(n_chunks, 0.0), sums2(n_chunks, 0.0);
  parallel_chunks(samples, threads, [&](size_t ci, size_t begin, size_t end) {
    double s = 0.0, s2 = 0.0;
    for (size_t i = begin; i < end; ++i) {
      double v = sample_product_scaled(mu, n, seed, i).log_kappa() / n;
      s += v;
      s2 += v * v;
    }
    sums[ci] = s;
    sums2[ci] = s2;
  });
  double s = 0.0, s2 = 0.0;
  for (size_t c = 0; c < n_chunks; ++c) {
    s += sums[c];
    s2 += sums2[c];
  }
  double mean = s / static_cast<double>(samples);
  double var = std::max(0.0, (s2 - s * mean) / static_cast<double>(samples - 1));
  LyapunovEstimate est;
  est.value = mean;
  est.std_err = std::sqrt(var / static_cast<double>(samples));
  est.n = n;
  est.samples = samples;
  return est;
}

KtPoint estimate_kt(const MatrixMeasure& mu, double t, uint32_t n, uint64_t samples,
                    uint64_t seed, int threads) {
  if (samples < 2) throw std::invalid_argument("estimate_kt: samples must be >= 2");
  if (n < 1) throw std::invalid_argument("estimate_kt: n must be >= 1");
  KtPoint pt;
  pt.t = t;
  if (t == 0.0) {
    pt.k_hat = 0.0;  // mean of ones
    pt.std_err = 0.0;
    pt.bracket = BracketSide::kExact;
    return pt;
  }
  pt.bracket = t < 0.0 ? BracketSide::kLower : BracketSide::kUpper;

  const size_t n_chunks = chunk_count(samples);
  std::vector<MomentPartial> parts(n_chunks);
  parallel_chunks(samples, threads, [&](size_t ci, size_t begin, size_t end) {
    MomentPartial p;
    // two passes over the chunk: exact max first, then shifted sums
    double mx = kNegInf;
    for (size_t i = begin; i < end; ++i) {
      double y = t * sample_product_scaled(mu, n, seed, i).log_kappa();
      mx = std::max(mx, y);
    }
    p.shift = mx;
    for (size_t i = begin; i < end; ++i) {
      double y = t * sample_product_scaled(mu, n, seed, i).log_kappa();
      double e = std::exp(y - mx);
      p.s1 += e;
      p.s2 += e * e;
    }
    p.count = end - begin;
    parts[ci] = p;
  });

  double shift = kNegInf;
  for (const auto& p : parts) shift = std::max(shift, p.shift);
  double s1 = 0.0, s2 = 0.0;
  for (const auto& p : parts) {
    double r = std::exp(p.shift - shift);
    s1 += p.s1 * r;
    s2 += p.s2 * r * r;
  }
  double count = static_cast<double>(samples);
  if (!(s1 > 0.0) || !std::isfinite(s1)) throw std::runtime_error("degenerate sample");
  double mean = s1 / count;
  double var = std::max(0.0, (s2 - s1 * mean) / (count - 1.0));
  pt.k_hat = (shift + std::log(mean)) / n;
  pt.std_err = std::sqrt(var / count) / (mean * n);
  return pt;
}

KtCurve estimate_kt_curve(const MatrixMeasure& mu, const std::vector<double>& t_values,
                          uint32_t n, uint64_t samples, uint64_t seed, int threads) {
  KtCurve curve;
  curve.n = n;
  curve.samples = samples;
  for (double t : t_values) curve.points.push_back(estimate_kt(mu, t, n, samples, seed, threads));
  std::sort(curve.points.begin(), curve.points.end(),
            [](const KtPoint& a, const KtPoint& b) { return a.t < b.t; });
  return curve;
}

KtLadder kt_ladder(const MatrixMeasure& mu, double t, uint32_t n_base, int rungs,
                   uint64_t samples, uint64_t seed, int threads) {
  if (rungs < 2) throw std::invalid_argument("kt_ladder: need at least two rungs");
  KtLadder ladder;
  uint32_t n = n_base;
  for (int r = 0; r < rungs; ++r, n *= 2) {
    ladder.n_values.push_back(n);
    ladder.k_values.push_back(estimate_kt(mu, t, n, samples, seed + r, threads).k_hat);
  }
  // assume k_n = k + c/n; eliminate c from the last two rungs
  double k1 = ladder.k_values[ladder.k_values.size() - 2];
  double k2 = ladder.k_values.back();
  ladder.extrapolated = 2.0 * k2 - k1;
  return ladder;
}

namespace {

std::vector<double> make_alpha_grid(double alpha_bar, double epsilon) {
  std::vector<double> grid;
  for (int i = 0; i * epsilon <= alpha_bar + 1e-15; ++i) grid.push_back(i * epsilon);
  if (grid.empty()) grid.push_back(0.0);
  return grid;
}

std::vector<double> make_gamma_grid(double epsilon) {
  std::vector<double> grid;
  for (int i = 0; i * epsilon < 2.0 - 1e-15; ++i) grid.push_back(i * epsilon);
  grid.push_back(2.0);
  return grid;
}

// Index window of grid midpoints within circular (mod pi) distance
// asin(r) of dir. Calls add(jlo, count) with jlo in [0, X) and count
// consecutive indices (possibly wrapping); r >= 1 selects everything.
template <typename AddFn>
void window_indices(double dir, double r, uint32_t x_size, const AddFn& add) {
  const double h = kPi / x_size;
  if (r >= 1.0) {
    add(0, x_size);
    return;
  }
  double w = std::asin(r);
  long lo = static_cast<long>(std::ceil((dir - w) / h - 0.5));
  long hi = static_cast<long>(std::floor((dir + w) / h - 0.5));
  long count = hi - lo + 1;
  if (count <= 0) return;
  if (count >= static_cast<long>(x_size)) {
    add(0, x_size);
    return;
  }
  long jlo = lo % static_cast<long>(x_size);
  if (jlo < 0) jlo += x_size;
  add(static_cast<uint32_t>(jlo), static_cast<uint32_t>(count));
}

struct TableGeometry {
  std::vector<double> alpha_grid, gamma_grid;
  uint32_t x_size;
  uint32_t n;
  double epsilon;

  size_t n_alpha() const { return alpha_grid.size(); }
  size_t n_gamma() const { return gamma_grid.size(); }

  size_t bin_alpha(double alpha_hat) const {
    long ia = std::lround(alpha_hat / epsilon);
    return static_cast<size_t>(std::clamp(ia, 0l, static_cast<long>(n_alpha()) - 1));
  }

  // ball radius for E_gamma membership at binned alpha
  double radius(size_t ia, size_t ig) const {
    return std::exp(-static_cast<double>(n) * (gamma_grid[ig] - epsilon) * alpha_grid[ia]);
  }
};

// Scans one product: bins alpha, then range-adds the x-window for every
// gamma into the caller's accumulator.
template <typename AddFn>
void scan_product(const TableGeometry& geo, const ScaledMat2& p, bool dual, const AddFn& add) {
  double alpha_hat = p.log_kappa() / geo.n;
  size_t ia = geo.bin_alpha(alpha_hat);
  SvdParts sv = svd2(p.m);  // directions are scale-invariant
  double dir = dual ? sv.upsilon_plus.theta : sv.omega_minus.theta;
  for (size_t ig = 0; ig < geo.n_gamma(); ++ig) {
    window_indices(dir, geo.radius(ia, ig), geo.x_size,
                   [&](uint32_t jlo, uint32_t count) { add(ia, ig, jlo, count); });
  }
}

void validate_table_args(uint32_t n, double epsilon, uint32_t x_grid_size) {
  if (n < 1) throw std::invalid_argument("rate table: n must be >= 1");
  if (!(epsilon > 0.0)) throw std::invalid_argument("rate table: epsilon must be positive");
  if (x_grid_size != 0 && x_grid_size < 4)
    throw std::invalid_argument("rate table: x_grid_size must be >= 4 (or 0 for the exact sup)");
}

// Exact sup over x in P for an atomic sample: slide a window of angular
// half-width asin(r) over the sorted directions of one alpha bin. Any
// optimal window can be shifted until its left edge touches a sample, so
// scanning sample-anchored windows attains the sup.
struct WindowMax {
  double mass = 0.0;
  double center = -1.0;
};

WindowMax max_window_mass(const std::vector<std::pair<double, double>>& sorted_dir_weight,
                          double radius) {
  WindowMax best;
  const size_t m = sorted_dir_weight.size();
  if (m == 0) return best;
  if (radius >= 1.0) {
    for (const auto& [d, w] : sorted_dir_weight) best.mass += w;
    best.center = sorted_dir_weight[0].first;
    return best;
  }
  const double width = 2.0 * std::asin(radius);
  if (width >= kPi) {
    for (const auto& [d, w] : sorted_dir_weight) best.mass += w;
    best.center = sorted_dir_weight[0].first;
    return best;
  }
  // two-pointer over the circle, unrolled by a +pi copy
  double running = 0.0;
  size_t j = 0;
  for (size_t i = 0; i < m; ++i) {
    if (j < i) {
      j = i;
      running = sorted_dir_weight[i].second;
    }
    double limit = sorted_dir_weight[i].first + width;
    while (j + 1 < i + m) {
      double next =
          j + 1 < m ? sorted_dir_weight[j + 1].first : sorted_dir_weight[j + 1 - m].first + kPi;
      if (next <= limit) {
        ++j;
        running += sorted_dir_weight[j < m ? j : j - m].second;
      } else {
        break;
      }
    }
    if (running > best.mass) {
      best.mass = running;
      best.center = canonical_angle(sorted_dir_weight[i].first + 0.5 * width);
    }
    running -= sorted_dir_weight[i].second;
  }
  return best;
}

RateTable exact_sup_table(const TableGeometry& geo, bool dual, bool exact_weights,
                          double total,
                          std::vector<std::vector<std::pair<double, double>>>& per_bin) {
  RateTable table;
  table.n = geo.n;
  table.epsilon = geo.epsilon;
  table.x_grid_size = 0;
  table.dual = dual;
  table.exact = exact_weights;
  table.total = total;
  table.alpha_grid = geo.alpha_grid;
  table.gamma_grid = geo.gamma_grid;
  table.entries.resize(geo.n_alpha() * geo.n_gamma());
  for (size_t ia = 0; ia < geo.n_alpha(); ++ia) {
    auto& bin = per_bin[ia];
    std::sort(bin.begin(), bin.end());
    for (size_t ig = 0; ig < geo.n_gamma(); ++ig) {
      WindowMax wm = max_window_mass(bin, geo.radius(ia, ig));
      RateTableEntry& e = table.entries[ia * geo.n_gamma() + ig];
      e.hit = wm.mass;
      e.x_argmax = wm.mass > 0.0 ? -2 : -1;
      e.x_theta = wm.center;
      e.i_hat = wm.mass > 0.0 ? std::log(wm.mass / total) / geo.n : kNegInf;
    }
  }
  return table;
}

template <typename Acc>
RateTable finalize_table(const TableGeometry& geo, bool dual, bool exact, double total,
                         uint64_t samples, const Acc& diff, const Acc& full) {
  RateTable table;
  table.n = geo.n;
  table.epsilon = geo.epsilon;
  table.x_grid_size = geo.x_size;
  table.dual = dual;
  table.exact = exact;
  table.total = total;
  table.alpha_grid = geo.alpha_grid;
  table.gamma_grid = geo.gamma_grid;
  table.entries.resize(geo.n_alpha() * geo.n_gamma());
  (void)samples;
  const size_t stride = geo.x_size + 1;
  for (size_t ia = 0; ia < geo.n_alpha(); ++ia) {
    for (size_t ig = 0; ig < geo.n_gamma(); ++ig) {
      size_t base = (ia * geo.n_gamma() + ig) * stride;
      double best = 0.0;
      int32_t best_j = -1;
      double running = 0.0;
      for (uint32_t j = 0; j < geo.x_size; ++j) {
        running += static_cast<double>(diff[base + j]);
        if (running > best) {
          best = running;
          best_j = static_cast<int32_t>(j);
        }
      }
      double everywhere = static_cast<double>(full[ia * geo.n_gamma() + ig]);
      best += everywhere;
      if (best_j < 0 && everywhere > 0.0) best_j = 0;
      RateTableEntry& e = table.entries[ia * geo.n_gamma() + ig];
      e.hit = best;
      e.x_argmax = best_j;
      e.x_theta = best_j >= 0 ? grid_node(static_cast<size_t>(best_j), geo.x_size) : -1.0;
      e.i_hat = best > 0.0 ? std::log(best / total) / geo.n : kNegInf;
    }
  }
  return table;
}

}  // namespace

std::vector<double> RateTable::i2_row() const {
  std::vector<double> row(alpha_grid.size(), kNegInf);
  size_t ig2 = gamma_index_of_two();
  for (size_t ia = 0; ia < alpha_grid.size(); ++ia) row[ia] = at(ia, ig2).i_hat;
  return row;
}

RateTable estimate_rate_table(const MatrixMeasure& mu, uint32_t n, double epsilon,
                              uint32_t x_grid_size, uint64_t samples, bool dual,
                              uint64_t seed, int threads) {
  validate_table_args(n, epsilon, x_grid_size);
  if (samples < 1) throw std::invalid_argument("rate table: samples must be >= 1");
  TableGeometry geo{make_alpha_grid(mu.alpha_bar, epsilon), make_gamma_grid(epsilon),
                    x_grid_size, n, epsilon};

  if (x_grid_size == 0) {
    // exact sup: collect (bin, direction) per sample, then slide windows
    std::vector<uint16_t> bins(samples);
    std::vector<double> dirs(samples);
    parallel_chunks(samples, threads, [&](size_t, size_t begin, size_t end) {
      for (size_t i = begin; i < end; ++i) {
        ScaledMat2 p = sample_product_scaled(mu, n, seed, i);
        bins[i] = static_cast<uint16_t>(geo.bin_alpha(p.log_kappa() / n));
        SvdParts sv = svd2(p.m);
        dirs[i] = dual ? sv.upsilon_plus.theta : sv.omega_minus.theta;
      }
    });
    std::vector<std::vector<std::pair<double, double>>> per_bin(geo.n_alpha());
    for (size_t i = 0; i < samples; ++i) per_bin[bins[i]].push_back({dirs[i], 1.0});
    return exact_sup_table(geo, dual, false, static_cast<double>(samples), per_bin);
  }

  // Difference arrays with wrap markers; atomic adds commute exactly on
  // integers, so the final counts are independent of thread interleaving.
  const size_t stride = x_grid_size + 1;
  const size_t cells = geo.n_alpha() * geo.n_gamma();
  std::unique_ptr<std::atomic<int64_t>[]> diff(new std::atomic<int64_t>[cells * stride]);
  std::unique_ptr<std::atomic<int64_t>[]> full(new std::atomic<int64_t>[cells]);
  for (size_t i = 0; i < cells * stride; ++i) diff[i].store(0, std::memory_order_relaxed);
  for (size_t i = 0; i < cells; ++i) full[i].store(0, std::memory_order_relaxed);

  parallel_chunks(samples, threads, [&](size_t, size_t begin, size_t end) {
    for (size_t i = begin; i < end; ++i) {
      ScaledMat2 p = sample_product_scaled(mu, n, seed, i);
      scan_product(geo, p, dual, [&](size_t ia, size_t ig, uint32_t jlo, uint32_t count) {
        size_t cell = ia * geo.n_gamma() + ig;
        if (count >= x_grid_size) {
          full[cell].fetch_add(1, std::memory_order_relaxed);
          return;
        }
        size_t base = cell * stride;
        uint32_t first = std::min<uint32_t>(count, x_grid_size - jlo);
        diff[base + jlo].fetch_add(1, std::memory_order_relaxed);
        diff[base + jlo + first].fetch_add(-1, std::memory_order_relaxed);
        if (first < count) {  // wrapped part starting at index 0
          diff[base + 0].fetch_add(1, std::memory_order_relaxed);
          diff[base + (count - first)].fetch_add(-1, std::memory_order_relaxed);
        }
      });
    }
  });

  // copy into plain vectors for the shared finalizer
  std::vector<double> d(cells * stride), f(cells);
  for (size_t i = 0; i < cells * stride; ++i) d[i] = static_cast<double>(diff[i].load());
  for (size_t i = 0; i < cells; ++i) f[i] = static_cast<double>(full[i].load());
  return finalize_table(geo, dual, false, static_cast<double>(samples), samples, d, f);
}

RateTable exact_rate_table(const MatrixMeasure& mu, uint32_t n, double epsilon,
                           uint32_t x_grid_size, bool dual, uint64_t cap) {
  validate_table_args(n, epsilon, x_grid_size);
  TableGeometry geo{make_alpha_grid(mu.alpha_bar, epsilon), make_gamma_grid(epsilon),
                    x_grid_size, n, epsilon};

  if (x_grid_size == 0) {
    std::vector<std::vector<std::pair<double, double>>> per_bin(geo.n_alpha());
    for (const auto& [p, w] : enumerate_products(mu, n, cap)) {
      size_t ia = geo.bin_alpha(p.log_kappa() / n);
      SvdParts sv = svd2(p.m);
      per_bin[ia].push_back({dual ? sv.upsilon_plus.theta : sv.omega_minus.theta, w});
    }
    return exact_sup_table(geo, dual, true, 1.0, per_bin);
  }
  const size_t stride = x_grid_size + 1;
  const size_t cells = geo.n_alpha() * geo.n_gamma();
  std::vector<double> diff(cells * stride, 0.0), full(cells, 0.0);

  for (const auto& [p, w] : enumerate_products(mu, n, cap)) {
    double weight = w;
    scan_product(geo, p, dual, [&](size_t ia, size_t ig, uint32_t jlo, uint32_t count) {
      size_t cell = ia * geo.n_gamma() + ig;
      if (count >= x_grid_size) {
        full[cell] += weight;
        return;
      }
      size_t base = cell * stride;
      uint32_t first = std::min<uint32_t>(count, x_grid_size - jlo);
      diff[base + jlo] += weight;
      diff[base + jlo + first] -= weight;
      if (first < count) {
        diff[base + 0] += weight;
        diff[base + (count - first)] -= weight;
      }
    });
  }
  return finalize_table(geo, dual, true, 1.0, 0, diff, full);
}

LegendreValue legendre_rate(const KtCurve& curve, double alpha) {
  if (curve.points.empty()) throw std::invalid_argument("legendre_rate: empty curve");
  LegendreValue out;
  double best = std::numeric_limits<double>::infinity();
  size_t best_i = 0;
  for (size_t i = 0; i < curve.points.size(); ++i) {
    double v = curve.points[i].k_hat - alpha * curve.points[i].t;
    if (v < best) {
      best = v;
      best_i = i;
    }
  }
  out.value = best;
  out.t_argmin = curve.points[best_i].t;
  out.edge_limited = best_i == 0 || best_i + 1 == curve.points.size();
  return out;
}

T0Estimate estimate_t0(const KtCurve& curve, double i0_at_zero) {
  if (curve.points.empty()) throw std::invalid_argument("estimate_t0: empty curve");
  T0Estimate out;
  if (i0_at_zero == kNegInf) {
    out.note = "not detected: I(0) is a -inf sentinel";
    return out;
  }
  double step = curve.points.size() > 1
                    ? curve.points[1].t - curve.points[0].t
                    : 0.0;
  size_t first = curve.points.size();
  for (size_t i = 0; i < curve.points.size(); ++i) {
    if (curve.points[i].k_hat > i0_at_zero + 2.0 * curve.points[i].std_err) {
      first = i;
      break;
    }
  }
  if (first == curve.points.size()) {
    out.note = "curve entirely at or below I(0)";
    return out;
  }
  if (first == 0) {
    out.note = "curve entirely above I(0); t0 below grid";
    return out;
  }
  out.detected = true;
  out.value = curve.points[first].t - step;
  out.uncertainty = step;
  out.note = "diagnostic estimate from grid crossing";
  return out;
}

TcEstimate estimate_tc(const KtCurve& curve, const RateTable& i2_table) {
  if (curve.points.empty()) throw std::invalid_argument("estimate_tc: empty curve");
  std::vector<double> i2 = i2_table.i2_row();
  bool any_finite = false;
  for (double v : i2) any_finite = any_finite || v != kNegInf;
  if (!any_finite) throw std::runtime_error("no I2 data");

  TcEstimate out;
  double step = curve.points.size() > 1 ? curve.points[1].t - curve.points[0].t : 0.0;
  for (size_t i = 0; i < curve.points.size(); ++i) {
    double t = curve.points[i].t;
    double envelope = kNegInf;
    for (size_t ia = 0; ia < i2.size(); ++ia) {
      if (i2[ia] == kNegInf) continue;
      envelope = std::max(envelope, i2[ia] - t * i2_table.alpha_grid[ia]);
    }
    if (curve.points[i].k_hat - envelope > 2.0 * curve.points[i].std_err) {
      out.detected = true;
      out.value = t - step;
      out.uncertainty = step;
      if (out.value <= -1.0) {
        out.value = -1.0;
        out.clipped = true;
        out.note = "clipped at the t = -1 boundary";
      } else if (i == 0) {
        out.note = "crossing at or below the grid edge";
      } else {
        out.note = "diagnostic estimate from grid crossing";
      }
      return out;
    }
  }
  out.note = "no crossing detected on the grid";
  return out;
}

}  // namespace projlab
