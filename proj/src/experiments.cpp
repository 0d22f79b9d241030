#include "experiments.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "checks.hpp"
#include "csvio.hpp"
#include "geometry.hpp"
#include "measure.hpp"
#include "montecarlo.hpp"
#include "quadrature.hpp"
#include "riesz.hpp"
#include "transfer.hpp"

namespace projlab {

namespace {

using nlohmann::json;

json params_to_json(const ExperimentParams& p) {
  json j;
  j["n"] = p.n;
  j["samples"] = p.samples;
  j["epsilon"] = p.epsilon;
  j["grid"] = p.grid_n;
  j["x_grid"] = p.x_grid_size;
  j["t"] = p.t;
  j["t_values"] = p.t_values;
  j["dual"] = p.dual;
  j["r_min"] = p.r_min;
  j["r_max"] = p.r_max;
  j["radii"] = p.radii_count;
  j["trials"] = p.trials;
  j["kappa_max"] = p.kappa_max;
  return j;
}

std::string canonical_echo(const ExperimentConfig& cfg, const MatrixMeasure* mu) {
  json j;
  j["command"] = cfg.command;
  j["seed"] = cfg.seed;
  j["params"] = params_to_json(cfg.params);
  if (mu != nullptr) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(mu->fingerprint));
    j["measure_fingerprint"] = buf;
  }
  return j.dump();
}

std::string header_comment(const ExperimentConfig& cfg, uint64_t fingerprint) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fingerprint));
  return "projlab command=" + cfg.command + " seed=" + std::to_string(cfg.seed) +
         " config_fingerprint=" + buf;
}

std::string bracket_name(BracketSide b) {
  switch (b) {
    case BracketSide::kLower: return "lower";
    case BracketSide::kUpper: return "upper";
    default: return "exact";
  }
}

MatrixMeasure resolve_measure(const ExperimentConfig& cfg) {
  if (!cfg.measure_json.empty()) return load_measure(cfg.measure_json);
  if (!cfg.measure_path.empty()) return load_measure_file(cfg.measure_path);
  return reference_measure();
}

void add_check(RunReport& rep, const std::string& name, double measured, double tol,
               bool pass) {
  rep.checks.push_back({name, pass, measured, tol});
}

std::string rate_table_csv(const RateTable& table, const std::string& header) {
  CsvWriter csv(header,
                {"alpha", "gamma", "hits", "total", "i_hat", "x_argmax_theta", "dual", "n",
                 "epsilon"});
  for (size_t ia = 0; ia < table.alpha_grid.size(); ++ia) {
    for (size_t ig = 0; ig < table.gamma_grid.size(); ++ig) {
      const RateTableEntry& e = table.at(ia, ig);
      csv.add_row_values({table.alpha_grid[ia], table.gamma_grid[ig], e.hit, table.total,
                          e.i_hat, e.x_theta, table.dual ? 1.0 : 0.0,
                          static_cast<double>(table.n), table.epsilon});
    }
  }
  return csv.str();
}

void run_lyapunov(const ExperimentConfig& cfg, const MatrixMeasure& mu, RunReport& rep,
                  const std::string& header) {
  LyapunovEstimate est =
      estimate_lyapunov(mu, cfg.params.n, cfg.params.samples, cfg.seed, cfg.threads);
  CsvWriter csv(header, {"n", "samples", "value", "std_err", "alpha_bar"});
  csv.add_row_values({static_cast<double>(est.n), static_cast<double>(est.samples), est.value,
                      est.std_err, mu.alpha_bar});
  rep.files["lyapunov.csv"] = csv.str();
  add_check(rep, "lyapunov bounded by alpha_bar", est.value, mu.alpha_bar,
            est.value <= mu.alpha_bar + 1e-12);
}

void run_kt_curve(const ExperimentConfig& cfg, const MatrixMeasure& mu, RunReport& rep,
                  const std::string& header) {
  std::vector<double> ts = cfg.params.t_values;
  if (ts.empty())
    for (double t = -0.5; t <= 0.25 + 1e-12; t += 0.05) ts.push_back(t);
  KtCurve curve = estimate_kt_curve(mu, ts, cfg.params.n, cfg.params.samples, cfg.seed,
                                    cfg.threads);
  CsvWriter csv(header, {"t", "k_hat", "std_err", "bracket_side", "n", "samples"});
  for (const KtPoint& pt : curve.points)
    csv.add_row({format_double(pt.t), format_double(pt.k_hat), format_double(pt.std_err),
                 bracket_name(pt.bracket), std::to_string(curve.n),
                 std::to_string(curve.samples)});
  rep.files["kt_curve.csv"] = csv.str();

  for (const KtPoint& pt : curve.points)
    if (pt.t == 0.0) add_check(rep, "k_hat(0) exact zero", pt.k_hat, 0.0, pt.k_hat == 0.0);

  // Legendre transform at the estimated Lyapunov exponent vanishes
  LyapunovEstimate lyap = estimate_lyapunov(mu, cfg.params.n, cfg.params.samples / 4 + 2,
                                            cfg.seed + 1, cfg.threads);
  LegendreValue rate = legendre_rate(curve, lyap.value);
  CsvWriter leg(header, {"alpha", "rate", "t_argmin", "edge_limited"});
  leg.add_row({format_double(lyap.value), format_double(rate.value),
               format_double(rate.t_argmin), rate.edge_limited ? "1" : "0"});
  rep.files["legendre_at_lyapunov.csv"] = leg.str();
}

void run_rate_table(const ExperimentConfig& cfg, const MatrixMeasure& mu, RunReport& rep,
                    const std::string& header) {
  RateTable table =
      estimate_rate_table(mu, cfg.params.n, cfg.params.epsilon, cfg.params.x_grid_size,
                          cfg.params.samples, cfg.params.dual, cfg.seed, cfg.threads);
  rep.files["rate_table.csv"] = rate_table_csv(table, header);
  size_t finite = 0;
  for (const auto& e : table.entries)
    if (e.hit > 0.0) ++finite;
  add_check(rep, "rate table has finite entries", static_cast<double>(finite), 1.0,
            finite >= 1);
}

void run_spectrum(const ExperimentConfig& cfg, const MatrixMeasure& mu, RunReport& rep,
                  const std::string& header) {
  DiscreteOperator op = build_operator(mu, cfg.params.t, cfg.params.grid_n, false);
  DiscreteOperator opd = build_operator(mu, cfg.params.t, cfg.params.grid_n, true);
  EigenTriple fwd = leading_triple(op);
  GridMeasure star_nu = iterate_on_lebesgue(opd, 256);

  char meta[160];
  std::snprintf(meta, sizeof(meta), " t=%s N=%u k_hat=%s gap_ratio=%s iterations=%u",
                format_double(cfg.params.t).c_str(), cfg.params.grid_n,
                format_double(fwd.log_eigenvalue).c_str(),
                format_double(fwd.gap_ratio).c_str(), fwd.iterations);
  CsvWriter csv(header + meta, {"theta", "h_t", "nu_t", "star_nu_t"});
  for (size_t i = 0; i < fwd.eigenfunction.size(); ++i)
    csv.add_row_values({grid_node(i, cfg.params.grid_n), fwd.eigenfunction.values[i],
                        fwd.eigenmeasure.weights[i], star_nu.weights[i]});
  rep.files["spectrum.csv"] = csv.str();

  double pairing = 0.0;
  for (size_t i = 0; i < fwd.eigenfunction.size(); ++i)
    pairing += fwd.eigenmeasure.weights[i] * fwd.eigenfunction.values[i];
  add_check(rep, "pairing <nu_t, h_t> = 1", pairing, 1e-10, std::fabs(pairing - 1.0) <= 1e-10);
  add_check(rep, "gap ratio < 1", fwd.gap_ratio, 1.0, fwd.gap_ratio < 1.0);
  double min_h = *std::min_element(fwd.eigenfunction.values.begin(),
                                   fwd.eigenfunction.values.end());
  add_check(rep, "eigenfunction strictly positive", min_h, 0.0, min_h > 0.0);
}

void run_zeta(const ExperimentConfig& cfg, const MatrixMeasure& mu, RunReport& rep,
              const std::string& header) {
  RateTable table = estimate_rate_table(mu, cfg.params.n, cfg.params.epsilon,
                                        /*x_grid_size=*/0, cfg.params.samples, false,
                                        cfg.seed, cfg.threads);
  DiscreteOperator op = build_operator(mu, cfg.params.t, cfg.params.grid_n, false);
  double k_t = leading_triple(op).log_eigenvalue;
  ZetaEstimate zeta = zeta_solver(table, k_t, cfg.params.t);
  CsvWriter csv(header, {"t", "k_hat", "zeta_hat", "alpha_star", "bracketed"});
  csv.add_row({format_double(cfg.params.t), format_double(k_t), format_double(zeta.zeta),
               format_double(zeta.alpha_star), zeta.bracketed ? "1" : "0"});
  rep.files["zeta.csv"] = csv.str();
  rep.files["rate_table.csv"] = rate_table_csv(table, header);
  add_check(rep, "zeta in (0, 1+t]", zeta.zeta, 1.0 + cfg.params.t,
            zeta.zeta > 0.0 && zeta.zeta <= 1.0 + cfg.params.t + 1e-9);
}

void run_dimension(const ExperimentConfig& cfg, const MatrixMeasure& mu, RunReport& rep,
                   const std::string& header) {
  RateTable dual_table = estimate_rate_table(mu, cfg.params.n, cfg.params.epsilon,
                                             /*x_grid_size=*/0, cfg.params.samples, true,
                                             cfg.seed, cfg.threads);
  ZetaEstimate zeta = zeta_solver(dual_table, 0.0, 0.0);

  DiscreteOperator op = build_operator(mu, 0.0, cfg.params.grid_n, false);
  EigenTriple triple = leading_triple(op);
  DimensionEstimate dim = frostman_dim_estimate(
      triple.eigenmeasure,
      geometric_radii(cfg.params.r_min, cfg.params.r_max, cfg.params.radii_count));

  CsvWriter csv(header, {"zeta_hat", "frostman_dim", "difference", "alpha_star",
                         "slope_stderr"});
  csv.add_row_values({zeta.zeta, dim.value, dim.value - zeta.zeta, zeta.alpha_star,
                      dim.slope_stderr});
  rep.files["dimension.csv"] = csv.str();

  CsvWriter ladder(header, {"radius", "sup_ball_mass"});
  for (size_t i = 0; i < dim.radii.size(); ++i)
    ladder.add_row_values({dim.radii[i], dim.sup_masses[i]});
  rep.files["ball_mass.csv"] = ladder.str();
  rep.files["rate_table.csv"] = rate_table_csv(dual_table, header);

  add_check(rep, "dimension formula consistency |dim - zeta|",
            std::fabs(dim.value - zeta.zeta), 0.1, std::fabs(dim.value - zeta.zeta) <= 0.1);
}

void run_riesz_selftest(const ExperimentConfig& cfg, RunReport& rep,
                        const std::string& header) {
  (void)cfg;
  CsvWriter kcsv(header, {"t", "n", "c_n"});
  double min_coeff = 1.0;
  for (double t : {-0.1, -0.5, -0.9}) {
    for (int32_t n = 0; n <= 64; ++n) {
      double c = fourier_coeff_kernel(t, n);
      if (n >= 1) min_coeff = std::min(min_coeff, c);
      kcsv.add_row_values({t, static_cast<double>(n), c});
    }
  }
  rep.files["kernel_coefficients.csv"] = kcsv.str();
  add_check(rep, "kernel coefficients strictly positive", min_coeff, 1e-12,
            min_coeff > 1e-12);

  CheckOptions opts;
  opts.seed = cfg.seed;
  opts.threads = cfg.threads;
  for (int id : {13, 14}) {
    for (const CheckResult& r : run_acceptance_checks(opts, id))
      add_check(rep, r.name, r.measured, r.threshold, r.passed);
  }
  add_check(rep, "lambda constant matches Gamma closed form",
            std::fabs(lambda_constant(-0.5) - lambda_constant_gamma(-0.5)), 1e-10,
            std::fabs(lambda_constant(-0.5) - lambda_constant_gamma(-0.5)) <= 1e-10);
}

void run_verify_geometry(const ExperimentConfig& cfg, RunReport& rep,
                         const std::string& header) {
  GeometryReport g = verify_geometry_suite(cfg.params.trials, cfg.params.kappa_max, cfg.seed,
                                           1e-9, cfg.threads);
  CsvWriter csv(header, {"trials", "sandwich", "contraction", "attractor", "pythagoras",
                         "svd_relations", "max_excess"});
  csv.add_row_values({static_cast<double>(g.trials), static_cast<double>(g.sandwich_violations),
                      static_cast<double>(g.contraction_violations),
                      static_cast<double>(g.attractor_violations),
                      static_cast<double>(g.pythagoras_violations),
                      static_cast<double>(g.svd_relation_violations), g.max_excess});
  rep.files["geometry_report.csv"] = csv.str();
  add_check(rep, "zero geometry violations", static_cast<double>(g.total_violations()), 0.0,
            g.total_violations() == 0);
}

void run_full_report(const ExperimentConfig& cfg, RunReport& rep, const std::string& header) {
  CheckOptions opts;
  opts.seed = cfg.seed;
  opts.threads = cfg.threads;
  std::vector<CheckResult> results = run_acceptance_checks(opts);
  CsvWriter csv(header, {"id", "name", "passed", "measured", "threshold", "details"});
  for (const CheckResult& r : results) {
    csv.add_row({std::to_string(r.id), r.name, r.passed ? "1" : "0", format_double(r.measured),
                 format_double(r.threshold), r.details});
    add_check(rep, r.name, r.measured, r.threshold, r.passed);
  }
  rep.files["acceptance_report.csv"] = csv.str();
}

}  // namespace

bool RunReport::all_passed() const {
  for (const auto& c : checks)
    if (!c.passed) return false;
  return true;
}

std::string RunReport::report_json() const {
  json j;
  j["command"] = command;
  j["config"] = json::parse(config_echo);
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fingerprint));
  j["config_fingerprint"] = buf;
  j["exit_code"] = exit_code;
  json checks_json = json::array();
  for (const auto& c : checks) {
    json cj;
    cj["name"] = c.name;
    cj["passed"] = c.passed;
    cj["measured"] = c.measured;
    cj["tolerance"] = c.tolerance;
    checks_json.push_back(cj);
  }
  j["checks"] = checks_json;
  json manifest = json::array();
  for (const auto& [name, content] : files) {
    json f;
    f["file"] = name;
    f["bytes"] = content.size();
    manifest.push_back(f);
  }
  j["output_manifest"] = manifest;
  return j.dump(2) + "\n";
}

const std::vector<std::string>& experiment_commands() {
  static const std::vector<std::string> kCommands{
      "lyapunov",    "kt-curve",       "rate-table",      "spectrum",    "dimension",
      "zeta",        "riesz-selftest", "verify-geometry", "full-report"};
  return kCommands;
}

std::string reference_measure_json() {
  return R"({"atoms":[{"matrix":[[2.0,1.0],[1.0,1.0]],"weight":0.5},)"
         R"({"matrix":[[1.0,1.0],[1.0,2.0]],"weight":0.5}],"det_tolerance":1e-9})";
}

ExperimentConfig parse_config_json(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config parse error: ") + e.what());
  }
  ExperimentConfig cfg;
  cfg.command = doc.value("command", "");
  cfg.measure_path = doc.value("measure_path", "");
  if (doc.contains("measure")) cfg.measure_json = doc["measure"].dump();
  if (!doc.contains("seed")) throw std::invalid_argument("config error: seed is mandatory");
  cfg.seed = doc["seed"].get<uint64_t>();
  cfg.threads = doc.value("threads", 0);
  cfg.out_dir = doc.value("out_dir", "");
  if (doc.contains("params")) {
    const json& p = doc["params"];
    ExperimentParams& q = cfg.params;
    q.n = p.value("n", q.n);
    q.samples = p.value("samples", q.samples);
    q.epsilon = p.value("epsilon", q.epsilon);
    q.grid_n = p.value("grid", q.grid_n);
    q.x_grid_size = p.value("x_grid", q.x_grid_size);
    q.t = p.value("t", q.t);
    if (p.contains("t_values")) q.t_values = p["t_values"].get<std::vector<double>>();
    q.dual = p.value("dual", q.dual);
    q.r_min = p.value("r_min", q.r_min);
    q.r_max = p.value("r_max", q.r_max);
    q.radii_count = p.value("radii", q.radii_count);
    q.trials = p.value("trials", q.trials);
    q.kappa_max = p.value("kappa_max", q.kappa_max);
  }
  return cfg;
}

RunReport run_experiment(const ExperimentConfig& cfg) {
  RunReport rep;
  rep.command = cfg.command;
  auto start = std::chrono::steady_clock::now();
  try {
    bool needs_measure = cfg.command != "riesz-selftest" && cfg.command != "verify-geometry";
    MatrixMeasure mu;
    if (needs_measure) mu = resolve_measure(cfg);
    rep.config_echo = canonical_echo(cfg, needs_measure ? &mu : nullptr);
    rep.fingerprint = fnv1a64(rep.config_echo);
    std::string header = header_comment(cfg, rep.fingerprint);

    if (cfg.command == "lyapunov") {
      run_lyapunov(cfg, mu, rep, header);
    } else if (cfg.command == "kt-curve") {
      run_kt_curve(cfg, mu, rep, header);
    } else if (cfg.command == "rate-table") {
      run_rate_table(cfg, mu, rep, header);
    } else if (cfg.command == "spectrum") {
      run_spectrum(cfg, mu, rep, header);
    } else if (cfg.command == "zeta") {
      run_zeta(cfg, mu, rep, header);
    } else if (cfg.command == "dimension") {
      run_dimension(cfg, mu, rep, header);
    } else if (cfg.command == "riesz-selftest") {
      run_riesz_selftest(cfg, rep, header);
    } else if (cfg.command == "verify-geometry") {
      run_verify_geometry(cfg, rep, header);
    } else if (cfg.command == "full-report") {
      run_full_report(cfg, rep, header);
    } else {
      rep.exit_code = 3;
      add_check(rep, "unknown command: " + cfg.command, 0.0, 0.0, false);
    }
    if (rep.exit_code == 0 && !rep.all_passed()) rep.exit_code = 2;
  } catch (const ConvergenceError& e) {
    rep.exit_code = 4;
    add_check(rep, std::string("non-convergence: ") + e.what(),
              static_cast<double>(e.iterations), 0.0, false);
  } catch (const std::invalid_argument& e) {
    rep.exit_code = 3;
    add_check(rep, std::string("config error: ") + e.what(), 0.0, 0.0, false);
  } catch (const std::exception& e) {
    rep.exit_code = 4;
    add_check(rep, std::string("numeric failure: ") + e.what(), 0.0, 0.0, false);
  }
  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  rep.files["report.json"] = rep.report_json();
  if (!cfg.out_dir.empty() && rep.exit_code != 3) {
    std::filesystem::create_directories(cfg.out_dir);
    for (const auto& [name, content] : rep.files) {
      std::ofstream out(std::filesystem::path(cfg.out_dir) / name, std::ios::binary);
      out << content;
    }
  }
  return rep;
}

}  // namespace projlab
