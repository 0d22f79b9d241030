/* C interface to the projlab shared library: opaque handles and error
 * codes over the SL(2,R) projective-dynamics toolkit. All functions
 * return PLAB_OK on success; on failure, plab_last_error() holds a
 * thread-local message. Strings returned through char** are owned by the
 * library and must be released with plab_string_free().
 */
#ifndef PROJLAB_H
#define PROJLAB_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  PLAB_OK = 0,
  PLAB_ERR_INVALID_ARGUMENT = 1,
  PLAB_ERR_RUNTIME = 2,
  PLAB_ERR_NO_CONVERGENCE = 3
} plab_status;

typedef struct plab_measure plab_measure;
typedef struct plab_rate_table plab_rate_table;
typedef struct plab_spectrum plab_spectrum;

const char* plab_last_error(void);
void plab_string_free(char* s);

/* ---- measures -------------------------------------------------------- */
plab_status plab_measure_load(const char* json_text, plab_measure** out);
plab_status plab_measure_load_file(const char* path, plab_measure** out);
void plab_measure_free(plab_measure* mu);
size_t plab_measure_atom_count(const plab_measure* mu);
double plab_measure_alpha_bar(const plab_measure* mu);
uint64_t plab_measure_fingerprint(const plab_measure* mu);

/* ---- geometry self-test ----------------------------------------------- */
plab_status plab_verify_geometry(uint64_t trials, double kappa_max, uint64_t seed,
                                 int threads, uint64_t* total_violations,
                                 double* max_excess);

/* ---- sampling estimators ---------------------------------------------- */
plab_status plab_estimate_lyapunov(const plab_measure* mu, uint32_t n, uint64_t samples,
                                   uint64_t seed, int threads, double* value,
                                   double* std_err);

/* bracket_side: -1 lower (t<0), +1 upper (t>0), 0 exact (t=0) */
plab_status plab_estimate_kt(const plab_measure* mu, double t, uint32_t n, uint64_t samples,
                             uint64_t seed, int threads, double* k_hat, double* std_err,
                             int* bracket_side);

plab_status plab_rate_table_estimate(const plab_measure* mu, uint32_t n, double epsilon,
                                     uint32_t x_grid_size, uint64_t samples, int dual,
                                     uint64_t seed, int threads, plab_rate_table** out);
plab_status plab_rate_table_exact(const plab_measure* mu, uint32_t n, double epsilon,
                                  uint32_t x_grid_size, int dual, plab_rate_table** out);
void plab_rate_table_free(plab_rate_table* table);
size_t plab_rate_table_alpha_count(const plab_rate_table* table);
size_t plab_rate_table_gamma_count(const plab_rate_table* table);
double plab_rate_table_alpha(const plab_rate_table* table, size_t ia);
double plab_rate_table_gamma(const plab_rate_table* table, size_t ig);
/* i_hat is -HUGE_VAL for empty bins */
double plab_rate_table_i_hat(const plab_rate_table* table, size_t ia, size_t ig);

/* zeta_t root for the gamma = 2 row of the table against k(t) */
plab_status plab_zeta_solve(const plab_rate_table* i2_table, double k_at_t, double t,
                            double* zeta, double* alpha_star);

/* ---- transfer operators ----------------------------------------------- */
plab_status plab_spectrum_compute(const plab_measure* mu, double t, uint32_t n_cells,
                                  uint32_t lebesgue_iterations, plab_spectrum** out);
void plab_spectrum_free(plab_spectrum* sp);
uint32_t plab_spectrum_cells(const plab_spectrum* sp);
double plab_spectrum_log_eigenvalue(const plab_spectrum* sp);
double plab_spectrum_gap_ratio(const plab_spectrum* sp);
/* arrays of length plab_spectrum_cells() */
plab_status plab_spectrum_eigenfunction(const plab_spectrum* sp, double* out_values);
plab_status plab_spectrum_eigenmeasure(const plab_spectrum* sp, double* out_weights);
plab_status plab_spectrum_dual_eigenmeasure(const plab_spectrum* sp, double* out_weights);

plab_status plab_duality_check(const plab_measure* mu, double t, uint32_t n,
                               const double* probe_thetas, const double* probe_weights,
                               size_t probe_count, uint32_t x_nodes, double* max_discrepancy);
plab_status plab_mass_identity_check(const plab_measure* mu, double t, uint32_t n,
                                     uint32_t n_cells, double* relative_difference);

/* ---- Riesz / Fourier toolkit ------------------------------------------ */
plab_status plab_lambda_constant(double t, double* value);
plab_status plab_fourier_coeff_kernel(double t, int32_t n, double* value);
plab_status plab_g_beta(double t, double x, double* value);

/* Frostman dimension of the spectrum's eigenmeasure from a ball-mass
 * slope over a geometric radius ladder. */
plab_status plab_frostman_dimension(const plab_spectrum* sp, double r_min, double r_max,
                                    int radii, double* value, double* slope_stderr);

/* ---- experiments ------------------------------------------------------ */
/* config_json: {"command": "...", "seed": ..., ...}; see the repository
 * README for the schema. Writes output files when out_dir is set in the
 * config; the JSON report is returned through report_json_out. The exit
 * code mirrors the CLI contract (0 pass, 2 check failure, 3 config error,
 * 4 numeric non-convergence). */
plab_status plab_run_experiment(const char* config_json, char** report_json_out,
                                int* exit_code);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* PROJLAB_H */
