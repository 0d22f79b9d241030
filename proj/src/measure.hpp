// Finitely supported measures on SL(2,R): validation, convolution-power
// sampling and enumeration, and the SIP diagnostic.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "geometry.hpp"

namespace projlab {

struct MeasureAtom {
  Mat2 g;
  double weight = 0.0;
  double log_kappa = 0.0;  // cached log |g|
};

struct MatrixMeasure {
  std::vector<MeasureAtom> atoms;
  double alpha_bar = 0.0;  // max log |g| over atoms; supp mu within |g| <= e^alpha_bar
  double det_tolerance = kDefaultDetTolerance;
  uint64_t fingerprint = 0;

  size_t size() const { return atoms.size(); }
};

// Builds a validated measure. Throws std::invalid_argument with messages
// "not unimodular", "not a probability vector", "empty measure".
MatrixMeasure make_measure(const std::vector<std::pair<Mat2, double>>& atoms,
                           double det_tolerance = kDefaultDetTolerance);

// Parses the JSON config {"atoms":[{"matrix":[[a,b],[c,d]],"weight":p},...],
// "det_tolerance":1e-9} and validates it.
MatrixMeasure load_measure(const std::string& document);
MatrixMeasure load_measure_file(const std::string& path);

// Product of n i.i.d. atoms, composed left to right: g_1 g_2 ... g_n.
// Stored as matrix * e^{log_scale} to stay in range for large n; the true
// product has det(matrix) * e^{2 log_scale} = 1.
struct ScaledMat2 {
  Mat2 m;
  double log_scale = 0.0;

  double log_kappa() const { return log_norm(m) + log_scale; }
  ProjPoint apply(ProjPoint x) const { return act(m, x); }
};

struct ProductSample {
  Mat2 matrix;
  uint32_t length = 0;
  std::vector<uint32_t> provenance;  // atom index sequence
};

// Deterministic given (seed, stream, n).
ProductSample sample_product(const MatrixMeasure& mu, uint32_t n, uint64_t seed,
                             uint64_t stream = 0);

// Scaled variant safe for large n; provenance omitted.
ScaledMat2 sample_product_scaled(const MatrixMeasure& mu, uint32_t n, uint64_t seed,
                                 uint64_t stream);

constexpr uint64_t kEnumerationCap = 1000000;

// All |atoms|^n ordered products with multiplied weights.
std::vector<std::pair<ScaledMat2, double>> enumerate_products(const MatrixMeasure& mu,
                                                              uint32_t n,
                                                              uint64_t cap = kEnumerationCap);

// Heuristic SIP diagnostic; advisory only, never a certificate.
struct SipReport {
  bool proximal_witness_found = false;
  std::vector<uint32_t> proximal_witness;  // atom word with |trace| > 2
  double witness_trace = 0.0;
  enum class Flag { kLikely, kViolated, kInconclusive } irreducibility = Flag::kInconclusive;
  std::vector<double> invariant_set;  // angles of a detected finite invariant set
};

SipReport sip_heuristic(const MatrixMeasure& mu, uint32_t max_word_length, uint64_t trials,
                        uint64_t seed);

// Reference measure used throughout the test batteries: uniform weights on
// {[[2,1],[1,1]], [[1,1],[1,2]]} (positive entries, SIP, uniformly hyperbolic).
MatrixMeasure reference_measure();

}  // namespace projlab
