#include "dgdtrack/cli.hpp"

#include <CLI11.hpp>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "dgdtrack/config.hpp"
#include "dgdtrack/errors.hpp"
#include "dgdtrack/experiment.hpp"
#include "dgdtrack/io.hpp"
#include "dgdtrack/theory.hpp"
#include "dgdtrack/validation.hpp"

namespace dgdtrack {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct CommonOptions {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  int threads = 0;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool with_out) {
  cmd->add_option("--config", o.config_path, "JSON configuration file")->required();
  cmd->add_option("--set", o.overrides, "Override a config key (key=value, dotted for nesting)");
  if (with_out) cmd->add_option("--out", o.out_dir, "Output directory");
  cmd->add_option("--seed", o.seed, "Override master_seed");
  cmd->add_option("--threads", o.threads, "Worker threads (0 = hardware concurrency)");
}

RunConfig resolve(const CommonOptions& o) {
  auto overrides = o.overrides;
  if (o.seed) overrides.push_back("master_seed=" + std::to_string(*o.seed));
  return load_config(o.config_path, overrides);
}

int thread_count(int requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

json manifest_section(const std::string& command, const RunConfig& rc, const MonteCarloResult& mc,
                      const std::string& file) {
  json m;
  m["command"] = command;
  m["files"] = json::array({file});
  const auto& first = mc.traces.front();
  m["theory"] = {{"alpha", first.constants.alpha},
                 {"kappa", first.constants.kappa},
                 {"C", first.constants.C},
                 {"G", first.constants.G},
                 {"t0", first.t0},
                 {"summation_constant", first.summation_constant}};
  if (mc.topology) {
    m["topology"] = {{"shared", true},
                     {"lambda2", mc.topology->mix.lambda2},
                     {"lambdaN", mc.topology->mix.lambdaN},
                     {"topology_factor", mc.topology->mix.topology_factor},
                     {"radius_used", mc.topology->graph.radius_used},
                     {"n_edges", mc.topology->graph.edges.size()}};
  } else {
    m["topology"] = {{"shared", false}};
  }
  json runs = json::array();
  for (const auto& tr : mc.traces)
    runs.push_back({{"run", tr.run_index},
                    {"seed", tr.seed},
                    {"lambda2", tr.lambda2},
                    {"init_dist", tr.constants.init_dist},
                    {"Lambda", tr.constants.Lambda},
                    {"tight_G", tr.tight_G}});
  m["runs"] = runs;
  (void)rc;
  return m;
}

void execute_cell(const std::string& command, const RunConfig& rc, const fs::path& dir, int threads,
                  std::ostream& out) {
  if (auto s = suggested_stride(rc.experiment))
    out << "note: horizon " << rc.experiment.horizon << " measures every step; consider measure_stride=" << *s
        << "\n";
  const MonteCarloResult mc = monte_carlo(rc.experiment, threads);
  const std::string file = cell_file_name(rc.experiment);
  write_cell_csv(dir / file, mc.rows);
  json manifest = config_to_json(rc);
  manifest["manifest"] = manifest_section(command, rc, mc, file);
  atomic_write(dir / "manifest.json", manifest.dump(2) + "\n");
  out << "wrote " << (dir / file).string() << " (" << mc.rows.size() << " rows, " << rc.experiment.n_runs
      << " runs)\n";
}

int cmd_run(const CommonOptions& o, std::ostream& out) {
  const RunConfig rc = resolve(o);
  execute_cell("run", rc, o.out_dir, thread_count(o.threads), out);
  return kExitOk;
}

int cmd_bounds(const CommonOptions& o, bool write_file, std::ostream& out) {
  const RunConfig rc = resolve(o);
  const ExperimentConfig& c = rc.experiment;
  double lambda2 = 0.0;
  std::optional<double> lambdaN;
  std::string source;
  if (rc.lambda2) {
    lambda2 = *rc.lambda2;
    lambdaN = rc.lambdaN;
    source = "explicit";
  } else {
    const Topology topo = shared_topology(c);
    lambda2 = topo.mix.lambda2;
    lambdaN = topo.mix.lambdaN;
    source = "generated graph (seed " + std::to_string(c.master_seed) + ")";
  }
  TheoryInputs in{c.mu, c.L, c.eta, c.E, c.n_agents, c.dim, c.c_max, lambda2, 0.0};
  TheoryConstants tc = theory_constants(in);
  const bool measured_init = rc.init_dist.has_value();
  tc.init_dist = measured_init ? *rc.init_dist : tc.fixed_point_norm_bound();
  const TrackingBound bound(tc, c.scheme);

  auto line = [&](const std::string& k, double v) { out << k << " = " << format_real(v) << '\n'; };
  out << "scheme = " << c.scheme.label() << '\n';
  out << "spectrum = " << source << '\n';
  line("lambda2", lambda2);
  if (lambdaN) {
    line("lambdaN", *lambdaN);
    MixingMatrix probe;
    probe.lambdaN = *lambdaN;
    line("eta_max", max_stable_step(probe, c.mu, c.L));
  }
  line("alpha", tc.alpha);
  line("kappa", tc.kappa);
  line("Lambda", tc.Lambda);
  line("C", tc.C);
  line("G", tc.G);
  line("init_dist", tc.init_dist);
  if (!measured_init) out << "init_dist_source = bound C*sqrt(N*kappa)\n";
  out << "t0 = " << bound.t0() << '\n';
  if (c.scheme.is_discounted()) {
    line("A_gamma", bound.summation_constant());
    line("floor", discounted_constants(tc.alpha, c.scheme.gamma()).floor);
  } else {
    line("A", bound.summation_constant());
  }
  line("bias_term", tc.bias_term());
  line("ate", bound.ate());

  std::ostringstream csv;
  csv << "t,initial,tracking,bias,bound\n";
  for (std::int64_t k : {1, 2, 5, 10, 20, 50, 100, 200, 500, 1000, 2000, 5000, 10000}) {
    const std::int64_t t = bound.t0() * k;
    const BoundTerms terms = bound.terms(t);
    csv << t << ',' << format_real(terms.initial) << ',' << format_real(terms.tracking) << ','
        << format_real(terms.bias) << ',' << format_real(bound(t)) << '\n';
  }
  const double lim = bound.limit();
  csv << "inf,0," << format_real(lim - tc.bias_term()) << ',' << format_real(tc.bias_term()) << ','
      << format_real(lim) << '\n';

  if (write_file) {
    const std::string stem = cell_file_name(c);
    const fs::path path = fs::path(o.out_dir) / ("bounds_" + stem);
    atomic_write(path, csv.str());
    out << "wrote " << path.string() << '\n';
  } else {
    out << csv.str();
  }
  return kExitOk;
}

int cmd_validate(const CommonOptions& o, const std::string& fault, std::ostream& out) {
  const RunConfig rc = resolve(o);
  ValidationOptions opts;
  if (fault == "row-sum") {
    opts.corrupt_mixing = [](MixingMatrix& m) { m.entries(0, 0) += 1e-3; };
  } else if (!fault.empty()) {
    throw ConfigError("--fault", "unknown fault '" + fault + "' (supported: row-sum)");
  }
  const ValidationReport report = run_validation(rc.experiment, opts);
  out << report.to_text();
  out << (report.ok() ? "validation passed\n" : "validation FAILED\n");
  return report.ok() ? kExitOk : kExitRuntime;
}

// Discount factor for a bare "discounted" sweep value on a uniform base config.
constexpr double kDefaultSweepGamma = 0.7;

std::vector<std::string> split_values(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

int cmd_sweep(const CommonOptions& o, const std::string& param, const std::string& values, std::ostream& out) {
  const RunConfig base = resolve(o);
  const auto list = split_values(values);
  if (list.empty()) throw ParameterError("sweep needs at least one value");
  if (param != "E" && param != "gamma" && param != "eta" && param != "scheme")
    throw ParameterError("sweep parameter must be one of E, gamma, eta, scheme");

  std::vector<RunConfig> cells;
  for (const auto& v : list) {
    RunConfig rc = base;
    json doc = config_to_json(rc);
    if (param == "E" || param == "eta") {
      apply_override(doc, param + "=" + v);
    } else if (param == "gamma") {
      doc["scheme"] = {{"kind", "discounted"}, {"gamma", json::parse(v, nullptr, false)}};
    } else if (v == "uniform") {
      doc["scheme"] = {{"kind", "uniform"}};
    } else if (v.rfind("discounted", 0) == 0) {
      const auto colon = v.find(':');
      double gamma = 0.0;
      if (colon != std::string::npos) gamma = std::stod(v.substr(colon + 1));
      else if (base.experiment.scheme.is_discounted()) gamma = base.experiment.scheme.gamma();
      else gamma = kDefaultSweepGamma;
      doc["scheme"] = {{"kind", "discounted"}, {"gamma", gamma}};
    } else {
      throw ParameterError("scheme sweep values are uniform, discounted or discounted:<gamma>");
    }
    cells.push_back(config_from_json(doc));
  }
  const int threads = thread_count(o.threads);
  for (std::size_t i = 0; i < cells.size(); ++i)
    execute_cell("sweep", cells[i], fs::path(o.out_dir) / (param + "=" + list[i]), threads, out);
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"dgdtrack: decentralized gradient descent tracking simulator and bound checker"};
  app.require_subcommand(1);

  CommonOptions run_o, bounds_o, validate_o, sweep_o;
  auto* run = app.add_subcommand("run", "Monte-Carlo experiment; writes the cell CSV and manifest");
  add_common(run, run_o, true);

  bool bounds_to_file = false;
  auto* bounds = app.add_subcommand("bounds", "Print theory constants and a bound table");
  add_common(bounds, bounds_o, false);
  bounds->add_option("--out", bounds_o.out_dir, "Write the bound table CSV into this directory")
      ->each([&](const std::string&) { bounds_to_file = true; });

  std::string fault;
  auto* validate = app.add_subcommand("validate", "Run the invariant suites");
  add_common(validate, validate_o, false);
  validate->add_option("--fault", fault, "Inject a fault (test hook): row-sum");

  std::string param, values;
  auto* sweep = app.add_subcommand("sweep", "Run one cell per parameter value");
  add_common(sweep, sweep_o, true);
  sweep->add_option("--param", param, "E, gamma, eta or scheme")->required();
  sweep->add_option("--values", values, "Comma-separated values")->required();

  std::vector<std::string> argv_store{"dgdtrack"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run) return cmd_run(run_o, out);
    if (*bounds) return cmd_bounds(bounds_o, bounds_to_file, out);
    if (*validate) return cmd_validate(validate_o, fault, out);
    if (*sweep) return cmd_sweep(sweep_o, param, values, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const TheoryDegeneracyError& e) {
    err << "theory degeneracy: " << e.what() << '\n';
    return kExitTheoryDegeneracy;
  } catch (const ParameterError& e) {
    err << "parameter error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitRuntime;
}

}  // namespace dgdtrack
