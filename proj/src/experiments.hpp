// Named experiments behind the CLI: each command loads a measure, runs
// module operations, and emits CSV files plus a machine-readable report.
// Output bytes are a pure function of (config, seed); the thread count
// and output directory never enter file contents.
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace projlab {

struct ExperimentParams {
  uint32_t n = 20;
  uint64_t samples = 100000;
  double epsilon = 0.05;
  uint32_t grid_n = 1024;  // operator discretization N
  uint32_t x_grid_size = 256;
  double t = -0.2;
  std::vector<double> t_values;  // kt-curve grid; default filled per command
  bool dual = false;
  double r_min = 0.004;
  double r_max = 0.4;
  int radii_count = 9;
  uint64_t trials = 100000;  // verify-geometry
  double kappa_max = 148.4131591025766;  // e^5
};

struct ExperimentConfig {
  std::string command;  // lyapunov | kt-curve | rate-table | spectrum | dimension |
                        // zeta | riesz-selftest | verify-geometry | full-report
  std::string measure_path;  // either a path or inline JSON text
  std::string measure_json;
  uint64_t seed = 1;
  int threads = 0;
  std::string out_dir;  // when set, files are also written to disk
  ExperimentParams params;
};

struct ReportCheck {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double tolerance = 0.0;
};

struct RunReport {
  std::string command;
  std::string config_echo;  // canonical config JSON (no threads / out_dir)
  uint64_t fingerprint = 0;
  double wall_seconds = 0.0;  // reported on stdout, never written to files
  std::vector<ReportCheck> checks;
  std::map<std::string, std::string> files;  // filename -> bytes
  int exit_code = 0;  // 0 pass, 2 check failure, 3 config error, 4 non-convergence

  bool all_passed() const;
  std::string report_json() const;  // deterministic (excludes wall_seconds)
};

ExperimentConfig parse_config_json(const std::string& json_text);
RunReport run_experiment(const ExperimentConfig& cfg);

const std::vector<std::string>& experiment_commands();
std::string reference_measure_json();

}  // namespace projlab
