// Command-line front end; all computation goes through the C API in
// projlab.h. A JSON config file supplies defaults, flags override, and
// the merged config is handed to the library verbatim.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "projlab.h"

namespace {

nlohmann::json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("--config", "cannot open " + path);
  nlohmann::json j;
  in >> j;
  return j;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"projlab: transfer operators, large deviations, and Riesz potentials for "
               "random SL(2,R) matrix products"};

  std::string command, config_path, measure_path, out_dir, t_values_text;
  uint64_t seed = 0;
  bool seed_set = false;
  int threads = -1;
  double epsilon = -1.0, t_value = -10.0, r_min = -1.0, r_max = -1.0, kappa_max = -1.0;
  long long n = -1, samples = -1, grid = -1, x_grid = -1, radii = -1, trials = -1;
  int dual = -1;

  app.add_option("--command", command,
                 "one of: lyapunov, kt-curve, rate-table, spectrum, dimension, zeta, "
                 "riesz-selftest, verify-geometry, full-report");
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--seed", seed, "RNG seed (mandatory here or in the config)")
      ->each([&](const std::string&) { seed_set = true; });
  app.add_option("--threads", threads, "worker threads (0 = hardware)");
  app.add_option("--out", out_dir, "output directory for CSV files and report.json");
  app.add_option("--measure", measure_path, "measure config JSON file");
  app.add_option("--n", n, "word length n");
  app.add_option("--samples", samples, "Monte Carlo sample count");
  app.add_option("--epsilon", epsilon, "grid resolution for A(eps), Gamma(eps)");
  app.add_option("--grid", grid, "operator discretization N");
  app.add_option("--x-grid", x_grid, "x grid size for rate-table sups");
  app.add_option("--t", t_value, "exponent t");
  app.add_option("--t-values", t_values_text, "comma-separated t grid for kt-curve");
  app.add_option("--dual", dual, "1: use upsilon_+ (the * tables); 0: omega_-");
  app.add_option("--r-min", r_min, "smallest ball radius");
  app.add_option("--r-max", r_max, "largest ball radius");
  app.add_option("--radii", radii, "radius ladder length");
  app.add_option("--trials", trials, "verify-geometry trial count");
  app.add_option("--kappa-max", kappa_max, "verify-geometry norm bound");

  CLI11_PARSE(app, argc, argv);

  nlohmann::json cfg;
  try {
    if (!config_path.empty()) cfg = load_config_file(config_path);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 3;
  }
  if (!command.empty()) cfg["command"] = command;
  if (seed_set) cfg["seed"] = seed;
  if (threads >= 0) cfg["threads"] = threads;
  if (!out_dir.empty()) cfg["out_dir"] = out_dir;
  if (!measure_path.empty()) cfg["measure_path"] = measure_path;
  auto& params = cfg["params"];
  if (n >= 0) params["n"] = n;
  if (samples >= 0) params["samples"] = samples;
  if (epsilon >= 0.0) params["epsilon"] = epsilon;
  if (grid >= 0) params["grid"] = grid;
  if (x_grid >= 0) params["x_grid"] = x_grid;
  if (t_value > -9.0) params["t"] = t_value;
  if (!t_values_text.empty()) params["t_values"] = parse_list(t_values_text);
  if (dual >= 0) params["dual"] = dual != 0;
  if (r_min >= 0.0) params["r_min"] = r_min;
  if (r_max >= 0.0) params["r_max"] = r_max;
  if (radii >= 0) params["radii"] = radii;
  if (trials >= 0) params["trials"] = trials;
  if (kappa_max >= 0.0) params["kappa_max"] = kappa_max;

  if (!cfg.contains("command")) {
    std::cerr << "config error: no command given (use --command or the config file)\n";
    return 3;
  }
  if (!cfg.contains("seed")) {
    std::cerr << "config error: seed is mandatory (use --seed or the config file)\n";
    return 3;
  }

  char* report_json = nullptr;
  int exit_code = 0;
  plab_status status = plab_run_experiment(cfg.dump().c_str(), &report_json, &exit_code);
  if (status != PLAB_OK) {
    std::cerr << "error: " << plab_last_error() << "\n";
    return status == PLAB_ERR_INVALID_ARGUMENT ? 3 : 4;
  }

  nlohmann::json report = nlohmann::json::parse(report_json);
  plab_string_free(report_json);
  for (const auto& check : report["checks"])
    std::cout << (check["passed"].get<bool>() ? "PASS  " : "FAIL  ")
              << check["name"].get<std::string>() << "  measured=" << check["measured"]
              << " tolerance=" << check["tolerance"] << "\n";
  for (const auto& f : report["output_manifest"])
    std::cout << "wrote " << f["file"].get<std::string>() << " (" << f["bytes"] << " bytes)"
              << (cfg.contains("out_dir") ? "" : " [in-memory; pass --out to write]") << "\n";
  std::cout << "exit_code=" << exit_code << "\n";
  return exit_code;
}
