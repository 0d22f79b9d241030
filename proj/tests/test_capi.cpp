// Exercises the shared-library surface: handles, error codes, and a few
// end-to-end numbers against known values.
#include <cmath>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "projlab.h"

static int g_failures = 0;

#define REQUIRE(cond)                                                     \
  do {                                                                    \
    if (!(cond)) {                                                        \
      std::fprintf(stderr, "[FAIL] %s:%d: %s\n", __FILE__, __LINE__, #cond); \
      ++g_failures;                                                       \
    }                                                                     \
  } while (0)

static const char* kMeasure =
    "{\"atoms\":[{\"matrix\":[[2.0,1.0],[1.0,1.0]],\"weight\":0.5},"
    "{\"matrix\":[[1.0,1.0],[1.0,2.0]],\"weight\":0.5}]}";

int main() {
  // error paths
  plab_measure* bad = nullptr;
  REQUIRE(plab_measure_load("{\"atoms\":[]}", &bad) == PLAB_ERR_INVALID_ARGUMENT);
  REQUIRE(std::strstr(plab_last_error(), "empty measure") != nullptr);
  REQUIRE(plab_measure_load("not json", &bad) == PLAB_ERR_INVALID_ARGUMENT);
  REQUIRE(plab_measure_load(
              "{\"atoms\":[{\"matrix\":[[1.1,0],[0,1]],\"weight\":1.0}]}", &bad) ==
          PLAB_ERR_INVALID_ARGUMENT);
  REQUIRE(std::strstr(plab_last_error(), "not unimodular") != nullptr);

  plab_measure* mu = nullptr;
  REQUIRE(plab_measure_load(kMeasure, &mu) == PLAB_OK);
  REQUIRE(mu != nullptr);
  REQUIRE(plab_measure_atom_count(mu) == 2);
  REQUIRE(plab_measure_alpha_bar(mu) > 0.9);
  REQUIRE(plab_measure_fingerprint(mu) != 0);

  // geometry self-test
  uint64_t violations = 1;
  double excess = 0.0;
  REQUIRE(plab_verify_geometry(20000, std::exp(3.0), 5, 2, &violations, &excess) == PLAB_OK);
  REQUIRE(violations == 0);

  // k(0) anchor and bracket sides
  double k_hat = 1.0, se = 0.0;
  int bracket = 9;
  REQUIRE(plab_estimate_kt(mu, 0.0, 8, 100, 3, 1, &k_hat, &se, &bracket) == PLAB_OK);
  REQUIRE(k_hat == 0.0);
  REQUIRE(bracket == 0);
  REQUIRE(plab_estimate_kt(mu, -0.3, 8, 4000, 3, 2, &k_hat, &se, &bracket) == PLAB_OK);
  REQUIRE(bracket == -1);
  REQUIRE(k_hat < 0.0);

  double lyap = 0.0;
  REQUIRE(plab_estimate_lyapunov(mu, 16, 4000, 3, 2, &lyap, &se) == PLAB_OK);
  REQUIRE(lyap > 0.5 && lyap < plab_measure_alpha_bar(mu));

  // spectrum handle
  plab_spectrum* sp = nullptr;
  REQUIRE(plab_spectrum_compute(mu, 0.0, 512, 64, &sp) == PLAB_OK);
  REQUIRE(plab_spectrum_cells(sp) == 512);
  REQUIRE(std::fabs(plab_spectrum_log_eigenvalue(sp)) < 1e-8);
  REQUIRE(plab_spectrum_gap_ratio(sp) < 1.0);
  std::vector<double> h(512), nu(512), star(512);
  REQUIRE(plab_spectrum_eigenfunction(sp, h.data()) == PLAB_OK);
  REQUIRE(plab_spectrum_eigenmeasure(sp, nu.data()) == PLAB_OK);
  REQUIRE(plab_spectrum_dual_eigenmeasure(sp, star.data()) == PLAB_OK);
  double mass = 0.0, pairing = 0.0;
  for (int i = 0; i < 512; ++i) {
    mass += nu[i];
    pairing += nu[i] * h[i];
  }
  REQUIRE(std::fabs(mass - 1.0) < 1e-9);
  REQUIRE(std::fabs(pairing - 1.0) < 1e-9);

  double dim = -1.0;
  REQUIRE(plab_frostman_dimension(sp, 0.01, 1.0, 5, &dim, nullptr) == PLAB_OK);
  REQUIRE(dim >= 0.0 && dim <= 1.0);
  plab_spectrum_free(sp);

  // duality and mass identities
  double thetas[2] = {0.3, 1.9};
  double weights[2] = {0.5, 0.5};
  double disc = 1.0;
  REQUIRE(plab_duality_check(mu, -0.3, 2, thetas, weights, 2, 32, &disc) == PLAB_OK);
  REQUIRE(disc <= 1e-10);
  double rel = 1.0;
  REQUIRE(plab_mass_identity_check(mu, -0.3, 2, 512, &rel) == PLAB_OK);
  REQUIRE(rel < 1e-3);

  // rate table + zeta
  plab_rate_table* table = nullptr;
  REQUIRE(plab_rate_table_estimate(mu, 10, 0.05, 64, 20000, 1, 11, 2, &table) == PLAB_OK);
  REQUIRE(plab_rate_table_alpha_count(table) > 5);
  REQUIRE(plab_rate_table_gamma_count(table) == 41);
  double zeta = 0.0, alpha_star = 0.0;
  plab_status zs = plab_zeta_solve(table, 0.0, 0.0, &zeta, &alpha_star);
  REQUIRE(zs == PLAB_OK);
  REQUIRE(zeta > 0.0 && zeta <= 1.0);
  plab_rate_table_free(table);

  // Riesz toolkit entry points
  double c = 0.0;
  REQUIRE(plab_lambda_constant(-0.5, &c) == PLAB_OK);
  REQUIRE(std::fabs(c - 1.669253683 ) < 1e-6);
  REQUIRE(plab_lambda_constant(-1.0, &c) == PLAB_ERR_INVALID_ARGUMENT);
  REQUIRE(plab_fourier_coeff_kernel(-0.5, 3, &c) == PLAB_OK);
  REQUIRE(c > 0.0);
  REQUIRE(plab_g_beta(-0.5, 0.4, &c) == PLAB_OK);
  REQUIRE(c > 0.0);

  // experiment runner
  std::string cfg = std::string("{\"command\":\"lyapunov\",\"seed\":7,\"measure\":") +
                    kMeasure + ",\"params\":{\"n\":12,\"samples\":2000}}";
  char* report = nullptr;
  int exit_code = -1;
  REQUIRE(plab_run_experiment(cfg.c_str(), &report, &exit_code) == PLAB_OK);
  REQUIRE(exit_code == 0);
  REQUIRE(report != nullptr && std::strstr(report, "lyapunov.csv") != nullptr);
  plab_string_free(report);

  // mandatory seed
  REQUIRE(plab_run_experiment("{\"command\":\"lyapunov\"}", &report, &exit_code) ==
          PLAB_ERR_INVALID_ARGUMENT);

  plab_measure_free(mu);
  if (g_failures == 0) {
    std::printf("capi_tests: all assertions passed\n");
    return 0;
  }
  std::fprintf(stderr, "capi_tests: %d failures\n", g_failures);
  return 1;
}
