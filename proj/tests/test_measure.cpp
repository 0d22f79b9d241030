#include <doctest.h>

#include <cmath>
#include <map>
#include <stdexcept>

#include "measure.hpp"

using namespace projlab;

namespace {
const char* kTwoAtomConfig = R"({
  "atoms": [
    {"matrix": [[2.0, 1.0], [1.0, 1.0]], "weight": 0.5},
    {"matrix": [[1.0, 1.0], [1.0, 2.0]], "weight": 0.5}
  ],
  "det_tolerance": 1e-9
})";
}

TEST_CASE("load_measure validates and caches alpha_bar") {
  MatrixMeasure mu = load_measure(kTwoAtomConfig);
  CHECK(mu.size() == 2);
  // alpha_bar = max log kappa over atoms, oracle via svd2
  double k0 = svd2(mu.atoms[0].g).kappa;
  double k1 = svd2(mu.atoms[1].g).kappa;
  CHECK(mu.alpha_bar == doctest::Approx(std::log(std::max(k0, k1))).epsilon(1e-14));

  CHECK_THROWS_WITH_AS(load_measure(R"({"atoms":[{"matrix":[[1.1,0],[0,1]],"weight":1.0}]})"),
                       "not unimodular", std::invalid_argument);
  CHECK_THROWS_WITH_AS(
      load_measure(
          R"({"atoms":[{"matrix":[[1,0],[0,1]],"weight":0.6},{"matrix":[[1,0],[0,1]],"weight":0.6}]})"),
      "not a probability vector", std::invalid_argument);
  CHECK_THROWS_WITH_AS(load_measure(R"({"atoms":[]})"), "empty measure", std::invalid_argument);
}

TEST_CASE("sample_product determinism and single atom") {
  MatrixMeasure single = make_measure({{mat_diag(2.0, 0.5), 1.0}});
  ProductSample s = sample_product(single, 1, 99);
  CHECK(s.matrix.a == 2.0);
  CHECK(s.length == 1);

  MatrixMeasure mu = load_measure(kTwoAtomConfig);
  ProductSample a = sample_product(mu, 12, 123, 5);
  ProductSample b = sample_product(mu, 12, 123, 5);
  CHECK(a.matrix.a == b.matrix.a);
  CHECK(a.matrix.b == b.matrix.b);
  CHECK(a.matrix.c == b.matrix.c);
  CHECK(a.matrix.d == b.matrix.d);
  CHECK(a.provenance == b.provenance);

  CHECK_THROWS_AS(sample_product(mu, 0, 1), std::invalid_argument);
}

TEST_CASE("enumerate_products weights and caps") {
  MatrixMeasure mu = load_measure(kTwoAtomConfig);
  auto one = enumerate_products(mu, 1);
  CHECK(one.size() == 2);
  auto three = enumerate_products(mu, 3);
  CHECK(three.size() == 8);
  double total = 0.0;
  for (const auto& [p, w] : three) total += w;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));

  CHECK_THROWS_WITH_AS(enumerate_products(mu, 3, 4), "enumeration too large",
                       std::invalid_argument);
}

TEST_CASE("sampling law matches enumeration at n = 2") {
  MatrixMeasure mu = load_measure(kTwoAtomConfig);
  const uint64_t kSamples = 200000;
  std::map<std::pair<uint32_t, uint32_t>, uint64_t> counts;
  for (uint64_t i = 0; i < kSamples; ++i) {
    ProductSample s = sample_product(mu, 2, 2024, i);
    counts[{s.provenance[0], s.provenance[1]}]++;
  }
  CHECK(counts.size() == 4);
  for (const auto& [word, cnt] : counts) {
    double p = 0.25;
    double sigma = std::sqrt(p * (1 - p) * kSamples);
    CHECK(std::fabs(static_cast<double>(cnt) - p * kSamples) <= 3.0 * sigma);
  }
}

TEST_CASE("alpha_bar bounds every sampled product") {
  MatrixMeasure mu = load_measure(kTwoAtomConfig);
  for (uint64_t i = 0; i < 200; ++i) {
    for (uint32_t n : {1u, 3u, 9u, 27u}) {
      ScaledMat2 p = sample_product_scaled(mu, n, 31, i);
      CHECK(p.log_kappa() / n <= mu.alpha_bar + 1e-12);
    }
  }
}

TEST_CASE("scaled products stay finite for very long words") {
  MatrixMeasure mu = load_measure(kTwoAtomConfig);
  ScaledMat2 p = sample_product_scaled(mu, 5000, 17, 0);
  CHECK(std::isfinite(p.log_kappa()));
  CHECK(p.log_kappa() > 0.0);
}

TEST_CASE("sip heuristic") {
  // rotations only: no proximal element
  MatrixMeasure rots = make_measure({{mat_rotation(1.0), 0.5}, {mat_rotation(0.3), 0.5}});
  SipReport r1 = sip_heuristic(rots, 6, 500, 1);
  CHECK_FALSE(r1.proximal_witness_found);
  CHECK(r1.irreducibility == SipReport::Flag::kInconclusive);

  // single hyperbolic atom: witness with trace 2.5
  MatrixMeasure hyp = make_measure({{mat_diag(2.0, 0.5), 1.0}});
  SipReport r2 = sip_heuristic(hyp, 4, 100, 1);
  CHECK(r2.proximal_witness_found);
  CHECK(r2.witness_trace == doctest::Approx(2.5));

  // {diag, rotation(pi/2)} keeps the axis pair invariant
  MatrixMeasure pair =
      make_measure({{mat_diag(2.0, 0.5), 0.5}, {mat_rotation(kPi / 2), 0.5}});
  SipReport r3 = sip_heuristic(pair, 6, 2000, 1);
  CHECK(r3.irreducibility == SipReport::Flag::kViolated);
  CHECK(r3.invariant_set.size() == 2);

  // the reference measure is SIP
  SipReport r4 = sip_heuristic(reference_measure(), 8, 2000, 1);
  CHECK(r4.proximal_witness_found);
  CHECK(r4.irreducibility == SipReport::Flag::kLikely);
}
