#include "geometry.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "parallel.hpp"
#include "rng.hpp"

namespace projlab {

bool Mat2::finite() const {
  return std::isfinite(a) && std::isfinite(b) && std::isfinite(c) && std::isfinite(d);
}

Mat2 operator*(const Mat2& g, const Mat2& h) {
  return {g.a * h.a + g.b * h.c, g.a * h.b + g.b * h.d,
          g.c * h.a + g.d * h.c, g.c * h.b + g.d * h.d};
}

Mat2 mat_rotation(double phi) {
  double c = std::cos(phi), s = std::sin(phi);
  return {c, -s, s, c};
}

Mat2 mat_diag(double top, double bottom) { return {top, 0.0, 0.0, bottom}; }

double canonical_angle(double theta) {
  double t = std::fmod(theta, kPi);
  if (t < 0.0) t += kPi;
  if (t >= kPi) t = 0.0;  // fmod rounding at the seam
  return t;
}

ProjPoint proj_point(double theta) { return {canonical_angle(theta)}; }

double proj_metric(ProjPoint x, ProjPoint y) { return std::fabs(std::sin(x.theta - y.theta)); }

double inner_abs(ProjPoint x, ProjPoint w) { return std::fabs(std::cos(x.theta - w.theta)); }

ProjPoint act(const Mat2& g, ProjPoint x) {
  double cu = std::cos(x.theta), su = std::sin(x.theta);
  double vx = g.a * cu + g.b * su;
  double vy = g.c * cu + g.d * su;
  return proj_point(std::atan2(vy, vx));
}

double norm_ratio(const Mat2& g, ProjPoint x) {
  double cu = std::cos(x.theta), su = std::sin(x.theta);
  return std::hypot(g.a * cu + g.b * su, g.c * cu + g.d * su);
}

ProjPoint perp(ProjPoint x) { return proj_point(x.theta + kPi / 2.0); }

Mat2 adjoint(const Mat2& g) { return g.transpose(); }

namespace {
// Principal axis (largest eigenvalue) of the symmetric matrix [[p,q],[q,r]].
double top_eigen_angle(double p, double q, double r) {
  return 0.5 * std::atan2(2.0 * q, p - r);
}
}  // namespace

namespace {
// Largest singular value, valid for arbitrary det: with T = sum of squared
// entries, T + 2 det = (a+d)^2 + (b-c)^2 and T - 2 det = (a-d)^2 + (b+c)^2,
// so 2 sigma1 = hypot(a+d, b-c) + hypot(a-d, b+c). The hypot form avoids
// the cancellation in T - 2|det| for near-orthogonal matrices.
double sigma_max(const Mat2& g) {
  return 0.5 * (std::hypot(g.a + g.d, g.b - g.c) + std::hypot(g.a - g.d, g.b + g.c));
}
}  // namespace

double log_norm(const Mat2& g) { return std::log(sigma_max(g)); }

SvdParts svd2(const Mat2& g) {
  SvdParts out;
  out.kappa = sigma_max(g);
  double dabs = std::fabs(g.det());
  // kappa <= (1+tol) sqrt(|det|) means the singular values are equal to
  // within tolerance and the directions are ill-defined.
  if (out.kappa * out.kappa <= dabs * (1.0 + kSvdDegeneracyTol) * (1.0 + kSvdDegeneracyTol)) {
    out.degenerate = true;
    out.omega_plus = proj_point(0.0);
    out.omega_minus = proj_point(kPi / 2.0);
    out.upsilon_plus = proj_point(0.0);
    out.upsilon_minus = proj_point(kPi / 2.0);
    return out;
  }
  // g^T g orients the preimage directions, g g^T the image directions.
  double wp = top_eigen_angle(g.a * g.a + g.c * g.c, g.a * g.b + g.c * g.d,
                              g.b * g.b + g.d * g.d);
  double up = top_eigen_angle(g.a * g.a + g.b * g.b, g.a * g.c + g.b * g.d,
                              g.c * g.c + g.d * g.d);
  out.omega_plus = proj_point(wp);
  out.omega_minus = proj_point(wp + kPi / 2.0);
  out.upsilon_plus = proj_point(up);
  out.upsilon_minus = proj_point(up + kPi / 2.0);
  return out;
}

Mat2 random_sl2(CounterRng& rng, double kappa_max) {
  double logk = rng.next_uniform(0.0, std::log(kappa_max));
  double k = std::exp(logk);
  Mat2 g = mat_rotation(rng.next_uniform(0.0, kPi)) * mat_diag(k, 1.0 / k) *
           mat_rotation(rng.next_uniform(0.0, kPi));
  return g;
}

GeometryReport verify_geometry_suite(uint64_t trials, double kappa_max, uint64_t seed,
                                     double slack, int threads) {
  if (trials < 1) throw std::invalid_argument("verify_geometry_suite: trials must be >= 1");
  if (!(kappa_max >= 1.0)) throw std::invalid_argument("verify_geometry_suite: kappa_max must be >= 1");

  const size_t n_chunks = chunk_count(trials);
  std::vector<GeometryReport> partial(n_chunks);

  parallel_chunks(trials, threads, [&](size_t ci, size_t begin, size_t end) {
    GeometryReport rep;
    for (size_t i = begin; i < end; ++i) {
      CounterRng rng(seed, i);
      Mat2 g = random_sl2(rng, kappa_max);
      ProjPoint x = proj_point(rng.next_uniform(0.0, kPi));
      ProjPoint y = proj_point(rng.next_uniform(0.0, kPi));
      SvdParts sv = svd2(g);
      double norm = sv.kappa;
      double gx = norm_ratio(g, x);
      double gy = norm_ratio(g, y);

      // Lemma: d(omega_-,x) <= |gx|/|g| <= d(omega_-,x) + |g|^-2
      double dw = proj_metric(sv.omega_minus, x);
      double ratio = gx / norm;
      double e1 = std::max(dw - ratio, ratio - dw - 1.0 / (norm * norm));
      if (e1 > slack) ++rep.sandwich_violations;

      // Contraction bound, multiplied through to avoid tiny denominators:
      // d(gx,gy) * |gx| * |gy| <= d(x,y).
      double e2 = proj_metric(act(g, x), act(g, y)) * gx * gy - proj_metric(x, y);
      if (e2 > slack) ++rep.contraction_violations;

      // d(gx, upsilon_+) <= 1/(|gx| |g|)
      double e3 = proj_metric(act(g, x), sv.upsilon_plus) - 1.0 / (gx * norm);
      if (e3 > slack) ++rep.attractor_violations;

      double ia = inner_abs(x, y), pm = proj_metric(x, y);
      double e4 = std::fabs(ia * ia + pm * pm - 1.0);
      if (e4 > slack) ++rep.pythagoras_violations;

      SvdParts svt = svd2(adjoint(g));
      double e5 = std::max({proj_metric(sv.omega_plus, svt.upsilon_plus),
                            proj_metric(sv.omega_minus, svt.upsilon_minus),
                            std::fabs(proj_metric(sv.omega_minus, sv.omega_plus) - 1.0),
                            std::fabs(proj_metric(sv.upsilon_minus, sv.upsilon_plus) - 1.0)});
      if (e5 > slack) ++rep.svd_relation_violations;

      rep.max_excess = std::max({rep.max_excess, e1, e2, e3, e4, e5});
    }
    rep.trials = end - begin;
    partial[ci] = rep;
  });

  GeometryReport total;
  for (const auto& rep : partial) {
    total.trials += rep.trials;
    total.sandwich_violations += rep.sandwich_violations;
    total.contraction_violations += rep.contraction_violations;
    total.attractor_violations += rep.attractor_violations;
    total.pythagoras_violations += rep.pythagoras_violations;
    total.svd_relation_violations += rep.svd_relation_violations;
    total.max_excess = std::max(total.max_excess, rep.max_excess);
  }
  return total;
}

}  // namespace projlab
