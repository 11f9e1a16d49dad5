#include "tco/cli.hpp"

#include "tco/config.hpp"
#include "tco/csv.hpp"
#include "tco/manifest.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#ifndef TCO_SA_VERSION
#define TCO_SA_VERSION "dev"
#endif

namespace tco {

namespace {

namespace fs = std::filesystem;

constexpr const char* kOutDirEnv = "TCO_SA_OUT_DIR";

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  bool det = false;
  bool oracle = false;
  bool machine = false;
  std::optional<std::int64_t> replications;
  std::optional<std::int64_t> max_iters;
  std::vector<std::string> overrides;
  std::optional<std::int64_t> n;
  std::optional<double> m;
  std::optional<double> t;
  std::optional<double> m0;
  std::string sweep_kind;
};

class InfeasibleInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

RunConfig resolve_config(const Options& opt, bool det_disables_noise) {
  std::map<std::string, std::string> kv;
  if (!opt.config_path.empty()) {
    std::ifstream in(opt.config_path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + opt.config_path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    kv = parse_key_values(buf.str());
  }
  for (const auto& o : opt.overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects KEY=VALUE, got '" + o + "'");
    kv[o.substr(0, eq)] = o.substr(eq + 1);
  }
  if (opt.seed) kv["noise.seed"] = std::to_string(*opt.seed);
  if (opt.replications) kv["scenario.replications"] = std::to_string(*opt.replications);
  if (opt.max_iters) kv["optimizer.max_iters"] = std::to_string(*opt.max_iters);
  if (opt.n) kv["point.n"] = std::to_string(*opt.n);
  if (opt.m) kv["point.m"] = format_double(*opt.m);
  if (opt.t) kv["point.t"] = format_double(*opt.t);
  if (opt.m0) kv["optimizer.m0"] = format_double(*opt.m0);
  if (opt.det && det_disables_noise) kv["noise.scale"] = "0";
  return build_config(kv);
}

fs::path output_dir(const Options& opt) {
  if (!opt.out_dir.empty()) return opt.out_dir;
  if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
  return "out";
}

ScenarioPoint<double> checked_point(std::int64_t n, double m, double t) {
  ScenarioPoint<double> p{n, m, t};
  try {
    p.validate();
  } catch (const std::domain_error& e) {
    throw InfeasibleInput(e.what());
  }
  return p;
}

struct OutputSet {
  fs::path dir;
  RunManifest manifest;
  CsvHeader header;

  OutputSet(const Options& opt, const RunConfig& config, std::string command) : dir(output_dir(opt)) {
    fs::create_directories(dir);
    manifest.effective_config = dump_config(config);
    manifest.config_digest = sha256_hex(manifest.effective_config);
    manifest.seed = config.scenario.spec.seed;
    manifest.version = TCO_SA_VERSION;
    manifest.command = std::move(command);
    manifest.timestamp = utc_timestamp();
    header.version = manifest.version;
    header.config_digest = manifest.config_digest;
    header.seed = manifest.seed;
  }

  void write(const std::string& name, const std::string& series, auto render) {
    CsvHeader h = header;
    h.series = series;
    write_text_file(dir / name, render(h));
    manifest.outputs.push_back(name);
  }

  void finish() { write_text_file(dir / header.manifest_file, manifest.to_json()); }
};

void print_breakdown(std::ostream& out, const char* title, const CostBreakdown<double>& b) {
  out << title << "\n";
  out << std::left << std::setw(10) << "component" << std::right << std::setw(24) << "capex"
      << std::setw(24) << "opex" << "\n";
  for (int i = 0; i < kComponentCount; ++i) {
    out << std::left << std::setw(10) << kComponentNames[i] << std::right << std::setw(24)
        << format_double(b.capex(i)) << std::setw(24) << format_double(b.opex(i)) << "\n";
  }
  out << std::left << std::setw(10) << "total" << std::right << std::setw(24)
      << format_double(b.total) << "\n";
}

void print_machine(std::ostream& out, const char* tag, const CostBreakdown<double>& b) {
  out << "breakdown," << tag;
  for (int i = 0; i < kComponentCount; ++i)
    out << "," << format_double(b.capex(i)) << "," << format_double(b.opex(i));
  out << "," << format_double(b.total) << "\n";
}

int cmd_eval(const Options& opt, std::ostream& out) {
  const RunConfig config = resolve_config(opt, false);
  const ScenarioConfig sc = config.effective_scenario();
  const auto point = checked_point(config.point_n, config.point_m, config.point_t);
  out << "n=" << point.n << " m=" << format_double(point.m) << " t=" << format_double(point.t)
      << "\n";
  const auto det = deterministic_tco(point, sc.params, sc.table);
  print_breakdown(out, "deterministic", det);
  std::optional<CostBreakdown<double>> noisy;
  if (!opt.det) {
    noisy = tco(point, sc.params, sc.table, sample_perturbations(sc.spec, 0));
    out << "\n";
    print_breakdown(out, ("noisy (seed " + std::to_string(sc.spec.seed) + ")").c_str(), *noisy);
  }
  if (opt.machine) {
    print_machine(out, "det", det);
    if (noisy) print_machine(out, "noisy", *noisy);
  }
  return kExitOk;
}

int cmd_optimize(const Options& opt, std::ostream& out, const std::string& command) {
  const RunConfig config = resolve_config(opt, true);
  const ScenarioConfig sc = config.effective_scenario();
  const auto point = checked_point(config.point_n, 1.0, config.point_t);
  if (!(sc.optimizer.m0 >= 1.0 && sc.optimizer.m0 <= static_cast<double>(point.n)))
    throw InfeasibleInput("optimizer.m0 must satisfy 1 <= m0 <= n");

  const auto traj = optimize(point, sc.params, sc.table, sc.spec, sc.schedule, sc.optimizer);
  OutputSet outputs(opt, config, command);
  outputs.write("trajectory.csv", "fdsa_trajectory", [&](const CsvHeader& h) {
    return render_trajectory_csv(h, traj);
  });
  outputs.finish();

  out << "iterations " << traj.records.size() << (traj.stopped_early ? " (early stop)" : "")
      << "\n";
  out << "final m_hat " << format_double(traj.final_m) << "\n";
  out << "recommended m " << traj.recommendation << "\n";
  if (opt.oracle) {
    const std::int64_t m_max = std::min(sc.m_max, point.n);
    const auto best = grid_search(point.n, point.t, sc.params, sc.table, m_max);
    const double at_rec = deterministic_tco(
        ScenarioPoint<double>{point.n, static_cast<double>(traj.recommendation), point.t},
        sc.params, sc.table).total;
    out << "oracle m* " << best.m << " tco* " << format_double(best.tco) << " (m in [1, " << m_max
        << "])\n";
    out << "deterministic tco at recommendation " << format_double(at_rec) << "\n";
  }
  out << "wrote " << (outputs.dir / "trajectory.csv").string() << "\n";
  return kExitOk;
}

int cmd_sweep(const Options& opt, std::ostream& out, const std::string& command) {
  const RunConfig config = resolve_config(opt, true);
  const ScenarioConfig sc = config.effective_scenario();
  OutputSet outputs(opt, config, command);

  if (opt.sweep_kind == "time") {
    checked_point(config.sweep_time_n, config.sweep_time_m, 0.0);
    const auto series = sweep_time(sc, config.sweep_time_n, config.sweep_time_m);
    const std::string name = "time_n" + std::to_string(config.sweep_time_n) + "_m" +
                             format_double(config.sweep_time_m) + ".csv";
    outputs.write(name, series.name, [&](const CsvHeader& h) {
      return render_series_csv(h, series);
    });
  } else if (opt.sweep_kind == "servers") {
    if (!(config.sweep_servers_t >= 0.0)) throw InfeasibleInput("sweep t must be nonnegative");
    for (const auto& series : sweep_edge_servers(sc, config.sweep_servers_t)) {
      const std::string name = series.name + "_t" + format_double(config.sweep_servers_t) + ".csv";
      outputs.write(name, series.name, [&](const CsvHeader& h) {
        return render_series_csv(h, series);
      });
    }
  } else if (opt.sweep_kind == "track") {
    const auto track = track_optimal_m(sc);
    outputs.write("track.csv", "optimal_m", [&](const CsvHeader& h) {
      return render_track_csv(h, track);
    });
    outputs.write("track_averages.csv", "optimal_m_window_means", [&](const CsvHeader& h) {
      return render_averages_csv(h, track, sc.average_window, sc.horizon_years);
    });
  } else {
    throw ConfigError("sweep kind must be one of time, servers, track");
  }
  outputs.finish();
  for (const auto& f : outputs.manifest.outputs) out << "wrote " << (outputs.dir / f).string() << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options opt;
  CLI::App app{"Stochastic TCO model and FDSA edge-server optimizer", "tco-sa"};
  app.require_subcommand(1);
  app.add_option("--config", opt.config_path, "key = value config file");
  app.add_option("--seed", opt.seed, "master seed (overrides noise.seed)");
  app.add_option("--out", opt.out_dir, std::string("output directory (default $") + kOutDirEnv +
                                           " or ./out)");
  app.add_flag("--det", opt.det, "noise-free evaluation");
  app.add_option("--replications", opt.replications, "replications per series point");
  app.add_option("--max-iters", opt.max_iters, "FDSA iteration limit");
  app.add_option("--set", opt.overrides, "KEY=VALUE config override (repeatable)");

  auto* eval = app.add_subcommand("eval", "print the cost breakdown at one point");
  eval->add_option("--n", opt.n, "subscribers");
  eval->add_option("--m", opt.m, "edge servers");
  eval->add_option("--t", opt.t, "years since deployment");
  eval->add_flag("--machine", opt.machine, "also print comma-separated breakdown lines");

  auto* optimize_cmd = app.add_subcommand("optimize", "run FDSA and write its trajectory");
  optimize_cmd->add_option("--n", opt.n, "subscribers");
  optimize_cmd->add_option("--t", opt.t, "years since deployment");
  optimize_cmd->add_option("--m0", opt.m0, "initial edge-server count");
  optimize_cmd->add_flag("--oracle", opt.oracle, "also run the integer grid search");

  auto* sweep = app.add_subcommand("sweep", "run a scenario sweep and write CSV series");
  sweep->add_option("kind", opt.sweep_kind, "time | servers | track")->required();

  std::string command;
  for (int i = 0; i < argc; ++i) command += (i ? " " : "") + std::string(argv[i]);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (eval->parsed()) return cmd_eval(opt, out);
    if (optimize_cmd->parsed()) return cmd_optimize(opt, out, command);
    return cmd_sweep(opt, out, command);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InfeasibleInput& e) {
    err << "infeasible input: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << "\n";
    return kExitRuntime;
  } catch (...) {
    err << "runtime error: unknown failure\n";
    return kExitRuntime;
  }
}

}  // namespace tco
