#include "projlab.h"

#include <cstring>
#include <string>

#include "checks.hpp"
#include "experiments.hpp"
#include "geometry.hpp"
#include "measure.hpp"
#include "montecarlo.hpp"
#include "quadrature.hpp"
#include "riesz.hpp"
#include "transfer.hpp"

using namespace projlab;

namespace {

thread_local std::string g_last_error;

plab_status set_error(plab_status code, const char* what) {
  g_last_error = what != nullptr ? what : "unknown error";
  return code;
}

template <typename Fn>
plab_status guarded(Fn&& fn) {
  try {
    fn();
    return PLAB_OK;
  } catch (const ConvergenceError& e) {
    return set_error(PLAB_ERR_NO_CONVERGENCE, e.what());
  } catch (const std::invalid_argument& e) {
    return set_error(PLAB_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::exception& e) {
    return set_error(PLAB_ERR_RUNTIME, e.what());
  }
}

}  // namespace

struct plab_measure {
  MatrixMeasure mu;
};

struct plab_rate_table {
  RateTable table;
};

struct plab_spectrum {
  EigenTriple triple;
  GridMeasure dual_measure;
};

extern "C" {

const char* plab_last_error(void) { return g_last_error.c_str(); }

void plab_string_free(char* s) { delete[] s; }

plab_status plab_measure_load(const char* json_text, plab_measure** out) {
  if (json_text == nullptr || out == nullptr)
    return set_error(PLAB_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = new plab_measure{load_measure(json_text)}; });
}

plab_status plab_measure_load_file(const char* path, plab_measure** out) {
  if (path == nullptr || out == nullptr)
    return set_error(PLAB_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = new plab_measure{load_measure_file(path)}; });
}

void plab_measure_free(plab_measure* mu) { delete mu; }

size_t plab_measure_atom_count(const plab_measure* mu) { return mu == nullptr ? 0 : mu->mu.size(); }

double plab_measure_alpha_bar(const plab_measure* mu) {
  return mu == nullptr ? 0.0 : mu->mu.alpha_bar;
}

uint64_t plab_measure_fingerprint(const plab_measure* mu) {
  return mu == nullptr ? 0 : mu->mu.fingerprint;
}

plab_status plab_verify_geometry(uint64_t trials, double kappa_max, uint64_t seed, int threads,
                                 uint64_t* total_violations, double* max_excess) {
  if (total_violations == nullptr) return set_error(PLAB_ERR_INVALID_ARGUMENT, "null output");
  return guarded([&] {
    GeometryReport rep = verify_geometry_suite(trials, kappa_max, seed, 1e-9, threads);
    *total_violations = rep.total_violations();
    if (max_excess != nullptr) *max_excess = rep.max_excess;
  });
}

plab_status plab_estimate_lyapunov(const plab_measure* mu, uint32_t n, uint64_t samples,
                                   uint64_t seed, int threads, double* value,
                                   double* std_err) {
  if (mu == nullptr || value == nullptr)
    return set_error(PLAB_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    LyapunovEstimate est = estimate_lyapunov(mu->mu, n, samples, seed, threads);
    *value = est.value;
    if (std_err != nullptr) *std_err = est.std_err;
  });
}

plab_status plab_estimate_kt(const plab_measure* mu, double t, uint32_t n, uint64_t samples,
                             uint64_t seed, int threads, double* k_hat, double* std_err,
                             int* bracket_side) {
  if (mu == nullptr || k_hat == nullptr)
    return set_error(PLAB_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    KtPoint pt = estimate_kt(mu->mu, t, n, samples, seed, threads);
    *k_hat = pt.k_hat;
    if (std_err != nullptr) *std_err = pt.std_err;
    if (bracket_side != nullptr)
      *bracket_side = pt.bracket == BracketSide::kLower ? -1
                      : pt.bracket == BracketSide::kUpper ? 1
                                                          : 0;
  });
}

plab_status plab_rate_table_estimate(const plab_measure* mu, uint32_t n, double epsilon,
                                     uint32_t x_grid_size, uint64_t samples, int dual,
                                     uint64_t seed, int threads, plab_rate_table** out) {
  if (mu == nullptr || out == nullptr)
    return set_error(PLAB_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = new plab_rate_table{estimate_rate_table(mu->mu, n, epsilon, x_grid_size, samples,
                                                   dual != 0, seed, threads)};
  });
}

plab_status plab_rate_table_exact(const plab_measure* mu, uint32_t n, double epsilon,
                                  uint32_t x_grid_size, int dual, plab_rate_table** out) {
  if (mu == nullptr || out == nullptr)
    return set_error(PLAB_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = new plab_rate_table{exact_rate_table(mu->mu, n, epsilon, x_grid_size, dual != 0)};
  });
}

void plab_rate_table_free(plab_rate_table* table) { delete table; }

size_t plab_rate_table_alpha_count(const plab_rate_table* t) {
  return t == nullptr ? 0 : t->table.alpha_grid.size();
}

size_t plab_rate_table_gamma_count(const plab_rate_table* t) {
  return t == nullptr ? 0 : t->table.gamma_grid.size();
}

double plab_rate_table_alpha(const plab_rate_table* t, size_t ia) {
  return t->table.alpha_grid.at(ia);
}

double plab_rate_table_gamma(const plab_rate_table* t, size_t ig) {
  return t->table.gamma_grid.at(ig);
}

double plab_rate_table_i_hat(const plab_rate_table* t, size_t ia, size_t ig) {
  return t->table.at(ia, ig).i_hat;
}

plab_status plab_zeta_solve(const plab_rate_table* i2_table, double k_at_t, double t,
                            double* zeta, double* alpha_star) {
  if (i2_table == nullptr || zeta == nullptr)
    return set_error(PLAB_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    ZetaEstimate est = zeta_solver(i2_table->table, k_at_t, t);
    *zeta = est.zeta;
    if (alpha_star != nullptr) *alpha_star = est.alpha_star;
  });
}

plab_status plab_spectrum_compute(const plab_measure* mu, double t, uint32_t n_cells,
                                  uint32_t lebesgue_iterations, plab_spectrum** out) {
  if (mu == nullptr || out == nullptr)
    return set_error(PLAB_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    DiscreteOperator op = build_operator(mu->mu, t, n_cells, false);
    DiscreteOperator opd = build_operator(mu->mu, t, n_cells, true);
    auto sp = new plab_spectrum;
    sp->triple = leading_triple(op);
    sp->dual_measure =
        iterate_on_lebesgue(opd, lebesgue_iterations == 0 ? 256 : lebesgue_iterations);
    *out = sp;
  });
}

void plab_spectrum_free(plab_spectrum* sp) { delete sp; }

uint32_t plab_spectrum_cells(const plab_spectrum* sp) {
  return sp == nullptr ? 0 : static_cast<uint32_t>(sp->triple.eigenfunction.size());
}

double plab_spectrum_log_eigenvalue(const plab_spectrum* sp) {
  return sp->triple.log_eigenvalue;
}

double plab_spectrum_gap_ratio(const plab_spectrum* sp) { return sp->triple.gap_ratio; }

plab_status plab_spectrum_eigenfunction(const plab_spectrum* sp, double* out_values) {
  if (sp == nullptr || out_values == nullptr)
    return set_error(PLAB_ERR_INVALID_ARGUMENT, "null argument");
  std::memcpy(out_values, sp->triple.eigenfunction.values.data(),
              sp->triple.eigenfunction.size() * sizeof(double));
  return PLAB_OK;
}

plab_status plab_spectrum_eigenmeasure(const plab_spectrum* sp, double* out_weights) {
  if (sp == nullptr || out_weights == nullptr)
    return set_error(PLAB_ERR_INVALID_ARGUMENT, "null argument");
  std::memcpy(out_weights, sp->triple.eigenmeasure.weights.data(),
              sp->triple.eigenmeasure.size() * sizeof(double));
  return PLAB_OK;
}

plab_status plab_spectrum_dual_eigenmeasure(const plab_spectrum* sp, double* out_weights) {
  if (sp == nullptr || out_weights == nullptr)
    return set_error(PLAB_ERR_INVALID_ARGUMENT, "null argument");
  std::memcpy(out_weights, sp->dual_measure.weights.data(),
              sp->dual_measure.size() * sizeof(double));
  return PLAB_OK;
}

plab_status plab_duality_check(const plab_measure* mu, double t, uint32_t n,
                               const double* probe_thetas, const double* probe_weights,
                               size_t probe_count, uint32_t x_nodes,
                               double* max_discrepancy) {
  if (mu == nullptr || probe_thetas == nullptr || probe_weights == nullptr ||
      max_discrepancy == nullptr)
    return set_error(PLAB_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    std::vector<std::pair<ProjPoint, double>> probe;
    for (size_t i = 0; i < probe_count; ++i)
      probe.push_back({proj_point(probe_thetas[i]), probe_weights[i]});
    *max_discrepancy = duality_check(mu->mu, t, n, probe, x_nodes);
  });
}

plab_status plab_mass_identity_check(const plab_measure* mu, double t, uint32_t n,
                                     uint32_t n_cells, double* relative_difference) {
  if (mu == nullptr || relative_difference == nullptr)
    return set_error(PLAB_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *relative_difference = mass_identity_check(mu->mu, t, n, n_cells); });
}

plab_status plab_lambda_constant(double t, double* value) {
  if (value == nullptr) return set_error(PLAB_ERR_INVALID_ARGUMENT, "null output");
  return guarded([&] { *value = lambda_constant(t); });
}

plab_status plab_fourier_coeff_kernel(double t, int32_t n, double* value) {
  if (value == nullptr) return set_error(PLAB_ERR_INVALID_ARGUMENT, "null output");
  return guarded([&] { *value = fourier_coeff_kernel(t, n); });
}

plab_status plab_g_beta(double t, double x, double* value) {
  if (value == nullptr) return set_error(PLAB_ERR_INVALID_ARGUMENT, "null output");
  return guarded([&] { *value = g_beta(t, x); });
}

plab_status plab_frostman_dimension(const plab_spectrum* sp, double r_min, double r_max,
                                    int radii, double* value, double* slope_stderr) {
  if (sp == nullptr || value == nullptr)
    return set_error(PLAB_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    DimensionEstimate est =
        frostman_dim_estimate(sp->triple.eigenmeasure, geometric_radii(r_min, r_max, radii));
    *value = est.value;
    if (slope_stderr != nullptr) *slope_stderr = est.slope_stderr;
  });
}

plab_status plab_run_experiment(const char* config_json, char** report_json_out,
                                int* exit_code) {
  if (config_json == nullptr) return set_error(PLAB_ERR_INVALID_ARGUMENT, "null config");
  return guarded([&] {
    ExperimentConfig cfg = parse_config_json(config_json);
    RunReport rep = run_experiment(cfg);
    if (report_json_out != nullptr) {
      std::string json = rep.report_json();
      char* buf = new char[json.size() + 1];
      std::memcpy(buf, json.c_str(), json.size() + 1);
      *report_json_out = buf;
    }
    if (exit_code != nullptr) *exit_code = rep.exit_code;
  });
}

}  // extern "C"
