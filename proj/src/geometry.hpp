// Exact geometry of SL(2,R) acting on the projective line. Lines are
// stored as a canonical angle in [0,pi); with that choice the projective
// metric is |sin(dtheta)| and the circle arithmetic is all mod pi.
#pragma once

#include <cstdint>
#include <string>

namespace projlab {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSvdDegeneracyTol = 1e-12;
constexpr double kDefaultDetTolerance = 1e-9;

// Row-major 2x2 real matrix [[a,b],[c,d]]; callers keep det = 1.
struct Mat2 {
  double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

  double det() const { return a * d - b * c; }
  Mat2 transpose() const { return {a, c, b, d}; }
  bool finite() const;
};

Mat2 operator*(const Mat2& g, const Mat2& h);
Mat2 mat_rotation(double phi);
Mat2 mat_diag(double top, double bottom);

// A line in R^2, canonical angle in [0,pi).
struct ProjPoint {
  double theta = 0.0;
};

double canonical_angle(double theta);
ProjPoint proj_point(double theta);

// Midpoint node (i + 1/2) pi / N of a uniform N-cell grid on [0, pi).
inline double grid_node(size_t i, size_t n_cells) {
  return (static_cast<double>(i) + 0.5) * kPi / static_cast<double>(n_cells);
}

// d_P(x,y) = |u ^ v| / (|u||v|) = |sin(theta_x - theta_y)|, in [0,1].
double proj_metric(ProjPoint x, ProjPoint y);

// |<x,y>| = |cos(theta_x - theta_y)|, in [0,1].
double inner_abs(ProjPoint x, ProjPoint w);

// Induced projective action: the line through g * (cos theta, sin theta).
ProjPoint act(const Mat2& g, ProjPoint x);

// |g u| / |u| for a unit u spanning x; always within [1/|g|, |g|].
double norm_ratio(const Mat2& g, ProjPoint x);

// theta -> theta + pi/2 (mod pi).
ProjPoint perp(ProjPoint x);

Mat2 adjoint(const Mat2& g);

// Singular data of g: kappa = |g| (largest singular value) plus the four
// singular directions. omega_+/- live in the preimage (right singular
// vectors), upsilon_+/- in the image (left singular vectors).
struct SvdParts {
  double kappa = 1.0;
  ProjPoint omega_plus, omega_minus, upsilon_plus, upsilon_minus;
  bool degenerate = false;  // |g| within kSvdDegeneracyTol of 1
};

// Closed-form 2x2 SVD through the eigen-decomposition of g^T g and g g^T.
// When |g| <= 1 + tol all directions are ill-defined; we then take the
// fixed convention omega_+ = upsilon_+ = theta 0, omega_- = upsilon_- =
// theta pi/2, which keeps omega_+(g) = upsilon_+(g*) and the distance
// relations valid.
SvdParts svd2(const Mat2& g);

double log_norm(const Mat2& g);  // log kappa

// Randomized check of the expansion lemmas on (g, x, y) triples with
// |g| <= kappa_max. Violations are counted beyond an absolute slack.
struct GeometryReport {
  uint64_t trials = 0;
  uint64_t sandwich_violations = 0;      // d(omega_-,x) <= |gx|/|g| <= d + |g|^-2
  uint64_t contraction_violations = 0;   // d(gx,gy)/d(x,y) <= 1/(|gx||gy|)
  uint64_t attractor_violations = 0;     // d(gx,upsilon_+) <= 1/(|gx| |g|)
  uint64_t pythagoras_violations = 0;    // inner^2 + metric^2 = 1
  uint64_t svd_relation_violations = 0;  // omega(g) vs upsilon(g*), unit distances
  double max_excess = 0.0;

  uint64_t total_violations() const {
    return sandwich_violations + contraction_violations + attractor_violations +
           pythagoras_violations + svd_relation_violations;
  }
};

GeometryReport verify_geometry_suite(uint64_t trials, double kappa_max, uint64_t seed,
                                     double slack = 1e-9, int threads = 1);

// Random SL(2,R) element R(phi) diag(k,1/k) R(psi) with log k ~ U[0, log kappa_max].
Mat2 random_sl2(class CounterRng& rng, double kappa_max);

}  // namespace projlab
