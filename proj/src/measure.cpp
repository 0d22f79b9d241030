#include "measure.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "rng.hpp"

namespace projlab {

namespace {

uint64_t hash_doubles(std::initializer_list<double> values, uint64_t h) {
  for (double v : values) {
    uint64_t bits;
    static_assert(sizeof(bits) == sizeof(v));
    std::memcpy(&bits, &v, sizeof(bits));
    h ^= bits;
    h *= 0x100000001b3ull;  // FNV-1a step
  }
  return h;
}

// Rescale once entries grow past this bound; keeps products finite for any n.
constexpr double kRescaleLimit = 1e120;

void maybe_rescale(ScaledMat2& p) {
  double m = std::max({std::fabs(p.m.a), std::fabs(p.m.b), std::fabs(p.m.c), std::fabs(p.m.d)});
  if (m > kRescaleLimit) {
    p.m.a /= m;
    p.m.b /= m;
    p.m.c /= m;
    p.m.d /= m;
    p.log_scale += std::log(m);
  }
}

}  // namespace

MatrixMeasure make_measure(const std::vector<std::pair<Mat2, double>>& atoms,
                           double det_tolerance) {
  if (atoms.empty()) throw std::invalid_argument("empty measure");
  MatrixMeasure mu;
  mu.det_tolerance = det_tolerance;
  double wsum = 0.0;
  uint64_t h = 0xcbf29ce484222325ull;
  for (const auto& [g, w] : atoms) {
    if (!g.finite()) throw std::invalid_argument("not unimodular: non-finite entries");
    if (std::fabs(g.det() - 1.0) > det_tolerance) throw std::invalid_argument("not unimodular");
    if (!(w > 0.0) || !std::isfinite(w)) throw std::invalid_argument("not a probability vector");
    MeasureAtom atom;
    atom.g = g;
    atom.weight = w;
    atom.log_kappa = log_norm(g);
    mu.alpha_bar = std::max(mu.alpha_bar, atom.log_kappa);
    mu.atoms.push_back(atom);
    wsum += w;
    h = hash_doubles({g.a, g.b, g.c, g.d, w}, h);
  }
  if (std::fabs(wsum - 1.0) > 1e-12) throw std::invalid_argument("not a probability vector");
  mu.fingerprint = h;
  return mu;
}

MatrixMeasure load_measure(const std::string& document) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(document);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("measure config parse error: ") + e.what());
  }
  if (!doc.contains("atoms") || !doc["atoms"].is_array())
    throw std::invalid_argument("measure config: missing \"atoms\" array");
  double det_tol = doc.value("det_tolerance", kDefaultDetTolerance);
  std::vector<std::pair<Mat2, double>> atoms;
  for (const auto& entry : doc["atoms"]) {
    const auto& m = entry.at("matrix");
    if (!m.is_array() || m.size() != 2 || m[0].size() != 2 || m[1].size() != 2)
      throw std::invalid_argument("measure config: matrix must be 2x2");
    Mat2 g{m[0][0].get<double>(), m[0][1].get<double>(), m[1][0].get<double>(),
           m[1][1].get<double>()};
    atoms.emplace_back(g, entry.at("weight").get<double>());
  }
  return make_measure(atoms, det_tol);
}

MatrixMeasure load_measure_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open measure config: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return load_measure(ss.str());
}

ScaledMat2 sample_product_scaled(const MatrixMeasure& mu, uint32_t n, uint64_t seed,
                                 uint64_t stream) {
  if (n < 1) throw std::invalid_argument("sample_product: n must be >= 1");
  CounterRng rng(seed, stream);
  ScaledMat2 p{mu.atoms[rng.next_index(mu.size())].g, 0.0};
  for (uint32_t i = 1; i < n; ++i) {
    p.m = p.m * mu.atoms[rng.next_index(mu.size())].g;
    maybe_rescale(p);
  }
  return p;
}

ProductSample sample_product(const MatrixMeasure& mu, uint32_t n, uint64_t seed,
                             uint64_t stream) {
  if (n < 1) throw std::invalid_argument("sample_product: n must be >= 1");
  CounterRng rng(seed, stream);
  ProductSample out;
  out.length = n;
  out.provenance.reserve(n);
  uint32_t first = static_cast<uint32_t>(rng.next_index(mu.size()));
  out.provenance.push_back(first);
  out.matrix = mu.atoms[first].g;
  for (uint32_t i = 1; i < n; ++i) {
    uint32_t idx = static_cast<uint32_t>(rng.next_index(mu.size()));
    out.provenance.push_back(idx);
    out.matrix = out.matrix * mu.atoms[idx].g;
  }
  return out;
}

std::vector<std::pair<ScaledMat2, double>> enumerate_products(const MatrixMeasure& mu,
                                                              uint32_t n, uint64_t cap) {
  if (n < 1) throw std::invalid_argument("enumerate_products: n must be >= 1");
  double total = std::pow(static_cast<double>(mu.size()), static_cast<double>(n));
  if (total > static_cast<double>(cap)) throw std::invalid_argument("enumeration too large");

  std::vector<std::pair<ScaledMat2, double>> current;
  current.reserve(static_cast<size_t>(total));
  for (const auto& atom : mu.atoms) current.push_back({{atom.g, 0.0}, atom.weight});
  for (uint32_t step = 1; step < n; ++step) {
    std::vector<std::pair<ScaledMat2, double>> next;
    next.reserve(current.size() * mu.size());
    for (const auto& [p, w] : current) {
      for (const auto& atom : mu.atoms) {
        ScaledMat2 q{p.m * atom.g, p.log_scale};
        maybe_rescale(q);
        next.push_back({q, w * atom.weight});
      }
    }
    current = std::move(next);
  }
  return current;
}

namespace {

// Attracting fixed line of a matrix with |trace| > 2 (real split spectrum):
// eigenvector of the eigenvalue with larger modulus.
std::optional<ProjPoint> attracting_line(const Mat2& g) {
  double tr = g.a + g.d;
  double disc = tr * tr - 4.0 * g.det();
  if (disc <= 0.0) return std::nullopt;
  double sq = std::sqrt(disc);
  double l1 = 0.5 * (tr + sq), l2 = 0.5 * (tr - sq);
  double lead = std::fabs(l1) >= std::fabs(l2) ? l1 : l2;
  // (g - lead I) v = 0
  double vx, vy;
  if (std::fabs(g.b) > std::fabs(g.c)) {
    vx = g.b;
    vy = lead - g.a;
  } else if (std::fabs(g.c) > 0.0) {
    vx = lead - g.d;
    vy = g.c;
  } else {
    // diagonal: pick the axis of the leading entry
    vx = std::fabs(g.a - lead) < std::fabs(g.d - lead) ? 1.0 : 0.0;
    vy = 1.0 - vx;
  }
  if (vx == 0.0 && vy == 0.0) return std::nullopt;
  return proj_point(std::atan2(vy, vx));
}

bool contains_line(const std::vector<double>& set, double theta, double tol) {
  for (double s : set)
    if (std::fabs(std::sin(s - theta)) <= tol) return true;
  return false;
}

}  // namespace

SipReport sip_heuristic(const MatrixMeasure& mu, uint32_t max_word_length, uint64_t trials,
                        uint64_t seed) {
  if (max_word_length < 1) throw std::invalid_argument("sip_heuristic: max_word_length >= 1");
  SipReport rep;
  std::vector<ProjPoint> fixed_lines;

  auto consider = [&](const Mat2& g, const std::vector<uint32_t>& word) {
    double tr = g.a + g.d;
    if (std::fabs(tr) > 2.0 + 1e-12) {
      if (!rep.proximal_witness_found) {
        rep.proximal_witness_found = true;
        rep.proximal_witness = word;
        rep.witness_trace = tr;
      }
      if (auto line = attracting_line(g)) fixed_lines.push_back(*line);
    }
  };

  // All single atoms, then random words up to max_word_length.
  for (uint32_t i = 0; i < mu.size(); ++i) consider(mu.atoms[i].g, {i});
  for (uint64_t t = 0; t < trials && fixed_lines.size() < 64; ++t) {
    CounterRng rng(seed, t);
    uint32_t len = 1 + static_cast<uint32_t>(rng.next_index(max_word_length));
    std::vector<uint32_t> word;
    Mat2 g;
    for (uint32_t i = 0; i < len; ++i) {
      uint32_t idx = static_cast<uint32_t>(rng.next_index(mu.size()));
      word.push_back(idx);
      g = (i == 0) ? mu.atoms[idx].g : g * mu.atoms[idx].g;
    }
    consider(g, word);
  }

  if (fixed_lines.empty()) {
    rep.irreducibility = SipReport::Flag::kInconclusive;
    return rep;
  }

  // Try to close each fixed line into a finite orbit under all atoms. A
  // small closed orbit is a finite invariant set, violating strong
  // irreducibility.
  constexpr size_t kOrbitCap = 8;
  constexpr double kTol = 1e-9;
  for (const auto& seed_line : fixed_lines) {
    std::vector<double> orbit{seed_line.theta};
    bool closed = true;
    for (size_t i = 0; i < orbit.size() && closed; ++i) {
      for (const auto& atom : mu.atoms) {
        double image = act(atom.g, proj_point(orbit[i])).theta;
        if (!contains_line(orbit, image, kTol)) {
          if (orbit.size() >= kOrbitCap) {
            closed = false;
            break;
          }
          orbit.push_back(image);
        }
      }
    }
    if (closed) {
      rep.irreducibility = SipReport::Flag::kViolated;
      rep.invariant_set = orbit;
      return rep;
    }
  }
  rep.irreducibility = SipReport::Flag::kLikely;
  return rep;
}

MatrixMeasure reference_measure() {
  return make_measure({{Mat2{2, 1, 1, 1}, 0.5}, {Mat2{1, 1, 1, 2}, 0.5}});
}

}  // namespace projlab
