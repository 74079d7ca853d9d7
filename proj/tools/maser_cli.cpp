// Batch front end: binds JSON configs and flag overrides to the solver,
// synchronization measure, and experiment drivers, and emits CSV/JSON data
// files with full provenance. Exit codes: 0 success, 2 config error,
// 3 solver error, 4 validation failure.

#include <CLI11.hpp>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "maser/io.hpp"
#include "maser/maser.hpp"
#include "maser/validate_suite.hpp"

namespace {

using maser::json;

constexpr int kSchemaVersion = 1;

[[noreturn]] void fail(int code, const std::string& type, const std::string& message) {
  json err{{"error", {{"type", type}, {"message", message}}}};
  std::cerr << err.dump() << "\n";
  std::exit(code);
}

// Run metadata (timestamps) goes to stderr only, so the data payloads written
// to files/stdout are byte-identical across reruns with the same config.
void emit_metadata() {
  std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  std::cerr << json{{"metadata", {{"timestamp_utc", buf}}}}.dump() << "\n";
}

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) fail(2, "config", "cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    fail(2, "config", std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) fail(2, "config", "config root must be a JSON object");
  if (j.contains("schema_version") && j.at("schema_version") != kSchemaVersion)
    fail(2, "config", "unsupported schema_version (expected " +
                          std::to_string(kSchemaVersion) + ")");
  return j;
}

maser::SystemParams resolve_params(const json& cfg) {
  maser::SystemParams p = maser::SystemParams::homogeneous(2, 0.1, 0.05, 0.2, 0.5, 0.5);
  if (cfg.contains("params")) {
    try {
      p = maser::params_from_json(cfg.at("params"));
    } catch (const std::exception& e) {
      fail(2, "config", std::string("bad params block: ") + e.what());
    }
  }
  auto problems = maser::validate_params(p);
  if (!problems.empty()) {
    std::string msg;
    for (const auto& s : problems) msg += (msg.empty() ? "" : "; ") + s;
    fail(2, "config", msg);
  }
  return p;
}

// Flag wins over config value wins over the built-in default.
template <typename T>
T pick(const CLI::App* cmd, const std::string& flag, T flag_value, const json& cfg,
       const std::string& key, T fallback) {
  if (cmd->count(flag) > 0) return flag_value;
  if (cfg.contains(key)) {
    try {
      return cfg.at(key).get<T>();
    } catch (const std::exception& e) {
      fail(2, "config", "bad value for '" + key + "': " + e.what());
    }
  }
  return fallback;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(2, "config", "output path is not writable: " + path);
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  auto out = open_output(path);
  out << text;
}

struct CommonOpts {
  std::string config_path;
  std::string out;
  std::uint64_t seed = 1;
  int starts = 64;
  int resolution = 64;
  int quad_points = 64;
  std::vector<int> fit_window;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file (flags override it)");
    cmd->add_option("--out", out, "output path");
    cmd->add_option("--seed", seed, "master seed for optimizer starts and sampling");
    cmd->add_option("--starts", starts, "multi-start count for the torus optimizer");
    cmd->add_option("--resolution", resolution, "grid resolution per phase axis");
    cmd->add_option("--quad-points", quad_points, "quadrature nodes per polar angle");
    cmd->add_option("--fit-window", fit_window, "power-law fit window: N_MIN N_MAX")
        ->expected(2);
  }
};

json echo_common(const std::string& command, const maser::SystemParams& p,
                 std::uint64_t seed, int starts) {
  return json{{"schema_version", kSchemaVersion},
              {"command", command},
              {"params", maser::to_json(p)},
              {"seed", seed},
              {"starts", starts}};
}

int run_steady_state(const CommonOpts& o, const CLI::App* cmd) {
  json cfg = load_config(o.config_path);
  maser::SystemParams p = resolve_params(cfg);
  std::string method = cfg.value("method", std::string("numeric"));
  if (method != "numeric" && method != "analytic")
    fail(2, "config", "method must be 'numeric' or 'analytic'");

  maser::Superoperator gen = maser::build_liouvillian(p);
  maser::DensityMatrix rho =
      method == "analytic" ? maser::solve_analytic(p) : maser::solve_numeric(gen);
  double res = maser::residual(gen, rho);

  json echo{{"schema_version", kSchemaVersion},
            {"command", "steady-state"},
            {"params", maser::to_json(p)},
            {"method", method}};
  if (!o.out.empty() && o.out.size() > 4 && o.out.substr(o.out.size() - 4) == ".csv") {
    auto out = open_output(o.out);
    maser::write_matrix_csv(out, rho.mat, echo.dump());
  } else {
    json doc = echo;
    doc["residual"] = res;
    doc["steady_state"] = maser::to_json(rho);
    write_text(o.out, doc.dump(2) + "\n");
  }
  (void)cmd;
  return 0;
}

int run_sync(const CommonOpts& o, const CLI::App* cmd) {
  json cfg = load_config(o.config_path);
  maser::SystemParams p = resolve_params(cfg);
  std::uint64_t seed = pick(cmd, "--seed", o.seed, cfg, "seed", std::uint64_t{1});
  int starts = pick(cmd, "--starts", o.starts, cfg, "starts", 64);

  maser::DensityMatrix rho = maser::solve_numeric(maser::build_liouvillian(p));
  maser::SyncResult r = maser::maximize_sync(rho, starts, 1e-12, seed);

  json doc = echo_common("sync", p, seed, starts);
  doc["result"] = maser::to_json(r);
  write_text(o.out, doc.dump(2) + "\n");
  return 0;
}

int run_phase_grid(const CommonOpts& o, const CLI::App* cmd) {
  json cfg = load_config(o.config_path);
  maser::SystemParams p = resolve_params(cfg);
  int resolution = pick(cmd, "--resolution", o.resolution, cfg, "resolution", 64);
  const int d = p.dim();
  int axis_i = cfg.value("axis_i", d >= 4 ? 1 : 0);
  int axis_j = cfg.value("axis_j", d >= 4 ? 2 : 1);
  std::vector<double> fixed(static_cast<std::size_t>(d - 1), 0.0);
  if (cfg.contains("fixed_phases")) {
    fixed = cfg.at("fixed_phases").get<std::vector<double>>();
    if (static_cast<int>(fixed.size()) != d - 1)
      fail(2, "config", "fixed_phases must have D-1 entries");
  }

  maser::DensityMatrix rho = maser::solve_numeric(maser::build_liouvillian(p));
  maser::PhaseGrid g;
  try {
    g = maser::phase_distribution_grid(rho, axis_i, axis_j, maser::PhaseVector{fixed},
                                       resolution);
  } catch (const std::invalid_argument& e) {
    fail(2, "config", e.what());
  }

  json echo{{"schema_version", kSchemaVersion},
            {"command", "phase-grid"},
            {"params", maser::to_json(p)},
            {"axis_i", axis_i},
            {"axis_j", axis_j},
            {"fixed_phases", fixed},
            {"resolution", resolution}};
  std::ostringstream os;
  maser::write_grid_csv(os, g, echo.dump());
  write_text(o.out.empty() ? "phase_grid.csv" : o.out, os.str());
  return 0;
}

int run_sweep_bath(const CommonOpts& o, const CLI::App* cmd) {
  json cfg = load_config(o.config_path);
  maser::SweepSpec spec;
  spec.base_params = resolve_params(cfg);
  spec.axis = "n_h/n_c";
  spec.seed = pick(cmd, "--seed", o.seed, cfg, "seed", std::uint64_t{1});
  spec.starts = pick(cmd, "--starts", o.starts, cfg, "starts", 64);
  spec.threads = cfg.value("threads", 0);
  if (cfg.contains("values")) {
    spec.values = cfg.at("values").get<std::vector<double>>();
  } else {
    // default: 41 log-spaced ratios covering 0.1 .. 100
    for (int i = 0; i <= 40; ++i)
      spec.values.push_back(std::pow(10.0, -1.0 + 3.0 * i / 40.0));
  }

  std::vector<maser::BathSweepRow> rows;
  try {
    rows = maser::sweep_bath_ratio(spec);
  } catch (const std::invalid_argument& e) {
    fail(2, "config", e.what());
  }
  bool any_ok = false;
  for (const auto& r : rows) any_ok = any_ok || r.ok;
  if (!any_ok) fail(3, "solver", "every sweep point failed: " + rows.front().error);

  json echo = echo_common("sweep-bath", spec.base_params, spec.seed, spec.starts);
  echo["axis"] = spec.axis;
  echo["values"] = spec.values;
  std::ostringstream os;
  maser::write_bath_sweep_csv(os, rows, echo.dump());
  write_text(o.out.empty() ? "fig2c.csv" : o.out, os.str());
  return 0;
}

int run_sweep_drive(const CommonOpts& o, const CLI::App* cmd) {
  json cfg = load_config(o.config_path);
  maser::SweepSpec spec;
  spec.base_params = resolve_params(cfg);
  spec.axis = "lambda2/lambda3";
  spec.seed = pick(cmd, "--seed", o.seed, cfg, "seed", std::uint64_t{1});
  spec.starts = pick(cmd, "--starts", o.starts, cfg, "starts", 64);
  spec.threads = cfg.value("threads", 0);
  double n_h_engine = cfg.value("n_h_engine", 5.0);
  double n_h_refrigerator = cfg.value("n_h_refrigerator", 0.2);
  if (cfg.contains("values")) {
    spec.values = cfg.at("values").get<std::vector<double>>();
  } else {
    for (int i = 1; i <= 20; ++i) spec.values.push_back(i / 20.0);
  }

  std::vector<maser::DriveSweepRow> rows;
  try {
    rows = maser::sweep_drive_ratio(spec, n_h_engine, n_h_refrigerator);
  } catch (const std::invalid_argument& e) {
    fail(2, "config", e.what());
  }
  bool any_ok = false;
  for (const auto& r : rows) any_ok = any_ok || r.ok;
  if (!any_ok) fail(3, "solver", "every sweep point failed: " + rows.front().error);

  json echo = echo_common("sweep-drive", spec.base_params, spec.seed, spec.starts);
  echo["axis"] = spec.axis;
  echo["values"] = spec.values;
  echo["n_h_engine"] = n_h_engine;
  echo["n_h_refrigerator"] = n_h_refrigerator;
  std::ostringstream os;
  maser::write_drive_sweep_csv(os, rows, echo.dump());
  write_text(o.out.empty() ? "fig2d.csv" : o.out, os.str());
  return 0;
}

int run_scaling(const CommonOpts& o, const CLI::App* cmd, const std::string& regime_flag) {
  json cfg = load_config(o.config_path);
  maser::ScalingOptions opts;
  opts.base = resolve_params(cfg);
  std::uint64_t seed = pick(cmd, "--seed", o.seed, cfg, "seed", std::uint64_t{1});
  opts.starts = pick(cmd, "--starts", o.starts, cfg, "starts", 64);
  opts.threads = cfg.value("threads", 0);
  opts.engine_ratio = cfg.value("engine_ratio", 10.0);
  opts.refrigerator_ratio = cfg.value("refrigerator_ratio", 0.4);
  int n_min = cfg.value("n_min", 2);
  int n_max = cfg.value("n_max", 20);
  int realizations = cfg.value("realizations", 100);
  if (cmd->count("--fit-window")) {
    opts.fit_n_min = o.fit_window.at(0);
    opts.fit_n_max = o.fit_window.at(1);
  } else {
    opts.fit_n_min = cfg.value("fit_n_min", 0);
    opts.fit_n_max = cfg.value("fit_n_max", 0);
  }
  std::string regime_name =
      cmd->count("--regime") ? regime_flag : cfg.value("regime", std::string("engine"));
  maser::Regime regime;
  if (regime_name == "engine")
    regime = maser::Regime::Engine;
  else if (regime_name == "refrigerator")
    regime = maser::Regime::Refrigerator;
  else
    fail(2, "config", "regime must be 'engine' or 'refrigerator'");

  maser::ScalingResult result;
  try {
    result = maser::scaling_with_n(n_min, n_max, realizations, regime, seed, opts);
  } catch (const std::invalid_argument& e) {
    fail(2, "config", e.what());
  }

  json echo = echo_common("scaling", opts.base, seed, opts.starts);
  echo["regime"] = regime_name;
  echo["n_min"] = n_min;
  echo["n_max"] = n_max;
  echo["realizations"] = realizations;
  echo["fit_n_min"] = opts.fit_n_min;
  echo["fit_n_max"] = opts.fit_n_max;
  echo["engine_ratio"] = opts.engine_ratio;
  echo["refrigerator_ratio"] = opts.refrigerator_ratio;
  echo["drive_sampling"] = "lambda_j = u * lambda_2, u ~ uniform(0, 1], j >= 3";

  std::string dir = o.out.empty() ? "." : o.out;
  {
    auto out = open_output(dir + "/fig3_scaling.csv");
    maser::write_scaling_csv(out, result, echo.dump());
  }
  {
    auto out = open_output(dir + "/fig3_phases.csv");
    maser::write_phase_cloud_csv(out, result, echo.dump());
  }
  std::cout << json{{"fit",
                     {{"alpha", result.fit.alpha},
                      {"log_intercept", result.fit.log_intercept},
                      {"r_squared", result.fit.r_squared}}},
                    {"failed", result.failed}}
                   .dump()
            << "\n";
  return 0;
}

int run_validate(const CommonOpts& o, const CLI::App* cmd) {
  json cfg = load_config(o.config_path);
  std::uint64_t seed = pick(cmd, "--seed", o.seed, cfg, "seed", std::uint64_t{2024});
  auto checks = maser::run_validation_suite(seed);
  bool all_pass = true;
  for (const auto& c : checks) {
    std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << ": " << c.detail << "\n";
    all_pass = all_pass && c.pass;
  }
  if (!all_pass) fail(4, "validation", "one or more cross-checks failed");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dissipative degenerate-maser synchronization toolkit"};
  app.require_subcommand(1);

  CommonOpts o;
  std::string regime_flag = "engine";

  CLI::App* c_steady = app.add_subcommand("steady-state", "solve the rotating-frame steady state");
  CLI::App* c_sync = app.add_subcommand("sync", "maximize the phase quasi-distribution");
  CLI::App* c_grid = app.add_subcommand("phase-grid", "tabulate S on a 2D phase slice");
  CLI::App* c_bath = app.add_subcommand("sweep-bath", "sweep the bath occupation ratio");
  CLI::App* c_drive = app.add_subcommand("sweep-drive", "sweep the drive inhomogeneity");
  CLI::App* c_scaling = app.add_subcommand("scaling", "scaling of the measure with manifold size");
  CLI::App* c_validate = app.add_subcommand("validate", "run the cross-check suite");
  for (CLI::App* c : {c_steady, c_sync, c_grid, c_bath, c_drive, c_scaling, c_validate})
    o.attach(c);
  c_scaling->add_option("--regime", regime_flag, "engine or refrigerator");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << json{{"error", {{"type", "config"}, {"message", e.what()}}}}.dump() << "\n";
    return 2;
  }

  emit_metadata();
  try {
    if (c_steady->parsed()) return run_steady_state(o, c_steady);
    if (c_sync->parsed()) return run_sync(o, c_sync);
    if (c_grid->parsed()) return run_phase_grid(o, c_grid);
    if (c_bath->parsed()) return run_sweep_bath(o, c_bath);
    if (c_drive->parsed()) return run_sweep_drive(o, c_drive);
    if (c_scaling->parsed()) return run_scaling(o, c_scaling, regime_flag);
    if (c_validate->parsed()) return run_validate(o, c_validate);
  } catch (const maser::NotApplicableError& e) {
    fail(2, "config", e.what());
  } catch (const std::invalid_argument& e) {
    fail(2, "config", e.what());
  } catch (const std::domain_error& e) {
    fail(2, "config", e.what());
  } catch (const maser::NonUniqueSteadyStateError& e) {
    fail(3, "solver", e.what());
  } catch (const maser::NumericError& e) {
    fail(3, "solver", e.what());
  } catch (const std::exception& e) {
    fail(3, "solver", e.what());
  }
  return 0;
}
