#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "wfl/wfl.hpp"

namespace {

using namespace wfl;
using namespace wfl::experiments;

// Exit codes: 0 all pass, 1 execution or input error, 2 a verdict failed,
// 3 inconclusive verdicts without failures.
constexpr int kExitError = 1;

ScenarioConfig config_from_argument(const std::string& arg) {
  if (std::filesystem::exists(arg)) return load_config(arg);
  for (const auto& name : list_presets())
    if (name == arg) return load_preset(arg);
  throw Error("no config file or preset named '" + arg + "'");
}

int cmd_run(const std::string& target, const RunOptions& opts) {
  const auto cfg = config_from_argument(target);
  const auto rep = run_scenario(cfg, opts);
  std::cout << rep.summary();
  if (!rep.artifact_dir.empty()) std::cout << "artifacts: " << rep.artifact_dir << '\n';
  return rep.exit_code();
}

int cmd_validate(const std::string& target) {
  const auto cfg = config_from_argument(target);
  std::cout << "valid " << cfg.scenario << " config (hash " << config_hash(cfg) << ")\n";
  return 0;
}

int cmd_presets(const std::string& name) {
  if (!name.empty()) {
    std::cout << preset_text(name);
    return 0;
  }
  for (const auto& n : list_presets()) std::cout << n << '\n';
  return 0;
}

struct ProbeArgs {
  double theta = 1.0;
  double b = 0.25;
  double a = 1.5;
  double lambda_min = 8.0;
  double lambda_max = 128.0;
  double x0 = 0.0;
  double xi0 = 1.0;
  double t = 0.0;
  std::string potential = "zero";
  double amplitude = 1.0;
  double param = 1.0;
  std::string initial = "delta";
  double initial_x0 = 0.0;
  double initial_width = 1.0;
  std::string window = "gaussian";
  std::string mode = "static";
  double halfwidth = 16.0;
  std::size_t points = 4096;
};

int cmd_probe(const ProbeArgs& p) {
  if (!(p.lambda_min > 0.0 && p.lambda_max > p.lambda_min)) throw InvalidArgument("need 0 < lambda-min < lambda-max");
  std::vector<double> ladder;
  for (double l = p.lambda_min; l <= p.lambda_max * (1.0 + 1e-12); l *= 2.0) ladder.push_back(l);
  if (ladder.size() < 2) throw InvalidArgument("ladder needs at least two doublings");

  const auto grid = make_grid<1>(p.halfwidth, p.points);
  const auto pot = builtin_potential<1>(p.potential, {p.amplitude, p.param});
  const auto u0 = make_datum<1>(p.initial, grid, {p.initial_x0}, {0.0}, p.initial_width);

  ProbeSpec<1> spec;
  spec.label = "probe";
  spec.x0 = {p.x0};
  spec.xi0 = {p.xi0};
  spec.a = p.a;
  spec.b = p.b;
  spec.lambda_ladder = ladder;
  spec.window = window_by_name<1>(p.window);

  DecayFit fit;
  if (p.mode == "static") {
    auto u = u0;
    if (p.t != 0.0) u = evolve(u0, EvolutionParams<1>{p.theta, pot, p.t, default_steps(grid, p.theta, p.t)});
    fit = probe_static(u, spec);
  } else {
    fit = probe_flowed(u0, p.theta, pot, p.t, spec, flow_mode_from_string(p.mode));
  }
  std::cout << fit.to_json().dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wave front set detection for fractional Schroedinger evolution"};
  app.set_version_flag("--version", std::string(wfl::kVersion));
  app.require_subcommand(1);

  std::string target;
  std::string stamp, outdir;
  bool no_artifacts = false;
  auto* run = app.add_subcommand("run", "Run a scenario from a config file or preset name");
  run->add_option("config", target, "Config path or preset name")->required();
  run->add_option("--stamp", stamp, "Artifact subdirectory name (default: UTC time)");
  run->add_option("--outdir", outdir, "Override run.outdir");
  run->add_flag("--no-artifacts", no_artifacts, "Print the summary only");

  auto* val = app.add_subcommand("validate", "Check a config and list every violation");
  val->add_option("config", target, "Config path or preset name")->required();

  std::string preset_name;
  auto* pre = app.add_subcommand("presets", "List built-in presets, or print one");
  pre->add_option("name", preset_name, "Preset to print");

  ProbeArgs pa;
  auto* probe = app.add_subcommand("probe", "Classify one phase-space point (1D)");
  probe->add_option("--theta", pa.theta, "Dispersion order in (0, 2)")->capture_default_str();
  probe->add_option("--b", pa.b, "Window scaling exponent")->capture_default_str();
  probe->add_option("--a", pa.a, "Momentum band factor")->capture_default_str();
  probe->add_option("--lambda-min", pa.lambda_min, "Smallest ladder rung")->capture_default_str();
  probe->add_option("--lambda-max", pa.lambda_max, "Largest ladder rung (rungs double)")->capture_default_str();
  probe->add_option("--x0", pa.x0, "Probe position")->capture_default_str();
  probe->add_option("--xi0", pa.xi0, "Probe direction")->capture_default_str();
  probe->add_option("--t", pa.t, "Time")->capture_default_str();
  probe->add_option("--potential", pa.potential, "zero | constant | bump | bracket_power")->capture_default_str();
  probe->add_option("--amplitude", pa.amplitude, "Potential amplitude or coefficient")->capture_default_str();
  probe->add_option("--param", pa.param, "Bump width or bracket power nu")->capture_default_str();
  probe->add_option("--initial", pa.initial, "delta | jump | gaussian")->capture_default_str();
  probe->add_option("--initial-x0", pa.initial_x0, "Initial datum center")->capture_default_str();
  probe->add_option("--initial-width", pa.initial_width, "Initial datum width")->capture_default_str();
  probe->add_option("--window", pa.window, "gaussian | hermite1")->capture_default_str();
  probe->add_option("--mode", pa.mode, "static | full | free | frozen")->capture_default_str();
  probe->add_option("--halfwidth", pa.halfwidth, "Box halfwidth L")->capture_default_str();
  probe->add_option("--points", pa.points, "Grid points N")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      RunOptions opts;
      if (!stamp.empty()) opts.stamp = stamp;
      if (!outdir.empty()) opts.outdir = outdir;
      opts.write_artifacts = !no_artifacts;
      return cmd_run(target, opts);
    }
    if (*val) return cmd_validate(target);
    if (*pre) return cmd_presets(preset_name);
    if (*probe) return cmd_probe(pa);
  } catch (const ConfigError& e) {
    std::cerr << "invalid config:\n";
    for (const auto& v : e.violations()) std::cerr << "  " << v << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
