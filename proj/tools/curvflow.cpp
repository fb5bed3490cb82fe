// curvflow: run, sweep and check from the command line.
//
//   curvflow run   --preset thm1-radial --out out/thm1
//   curvflow run   --config my.cfg --set flow.alpha=2.5 --out out/a25
//   curvflow sweep --preset thm1-radial --axis 'alpha=[1.5:0.5:3]' --parallel 4 --out out/sweep
//   curvflow check "blend(gauss-root,arithmetic-mean,0.5)" -n 2
//
// Exit codes: 0 expected termination, 1 configuration error, 2 numerical failure.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "curvflow/config.hpp"
#include "curvflow/curvature_function.hpp"
#include "curvflow/errors.hpp"
#include "curvflow/runner.hpp"
#include "curvflow/scenarios.hpp"

namespace {

using namespace curvflow;

struct Common {
  std::string preset;
  std::string config;
  std::string out = "out";
  std::int64_t seed = -1;
  double snapshot_every = -1.0;
  std::vector<std::string> sets;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--preset", c.preset, "Start from a named scenario preset");
  cmd->add_option("--config", c.config, "Config file (section.key = value); applied after --preset");
  cmd->add_option("--out", c.out, "Output directory")->capture_default_str();
  cmd->add_option("--seed", c.seed, "Seed recorded in the manifest");
  cmd->add_option("--snapshot-every", c.snapshot_every, "Snapshot interval in flow time (0 disables)");
  cmd->add_option("--set", c.sets, "Override one key, e.g. --set flow.alpha=2.5");
}

RunSpec build_spec(const Common& c) {
  RunSpec spec;
  if (!c.preset.empty()) apply_setting(spec, "run.preset", c.preset);
  if (!c.config.empty()) {
    const std::string name = spec.preset;
    spec = parse_config_file(c.config, spec);
    if (!name.empty() && spec.preset.empty()) spec.preset = name + "+config";
  }
  const std::string name = spec.preset;
  for (const auto& kv : c.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set '" + kv + "': expected key=value");
    apply_setting(spec, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (c.snapshot_every >= 0.0) apply_setting(spec, "output.snapshot_interval", [&] {
    std::ostringstream o;
    o.precision(17);
    o << c.snapshot_every;
    return o.str();
  }());
  if (c.seed >= 0) spec.seed = static_cast<std::uint64_t>(c.seed);
  if (!name.empty() && spec.preset.empty()) spec.preset = name + "+overrides";
  spec.flow.validate();
  return spec;
}

std::string preset_help() {
  std::string s = "Presets:\n";
  for (auto name : preset_names()) s += "  " + std::string(name) + ": " + preset(name).description + "\n";
  s += "Print a preset as a config file with: curvflow run --preset NAME --print-config\n";
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Contracting curvature flows of convex hypersurfaces"};
  app.footer(preset_help());
  app.require_subcommand(1);

  Common run_opts;
  bool print_config = false;
  auto* run = app.add_subcommand("run", "Integrate one flow and write its artifacts");
  add_common(run, run_opts);
  run->add_flag("--print-config", print_config, "Print the resolved config and exit");

  Common sweep_opts;
  std::vector<std::string> axes;
  int parallel = 1;
  auto* sweep = app.add_subcommand("sweep", "Run a grid of flows, one output directory per cell");
  add_common(sweep, sweep_opts);
  sweep->add_option("--axis", axes, "Sweep axis: key=[lo:step:hi] or key=[v1,v2,...]")->required();
  sweep->add_option("--parallel", parallel, "Concurrent runs")->capture_default_str();

  std::string f_spec;
  int dim = 2;
  SamplePlan plan;
  auto* check = app.add_subcommand("check", "Certify a curvature function on seeded samples");
  check->add_option("f", f_spec, "Curvature function, e.g. ek-root(2)")->required();
  check->add_option("-n,--dimension", dim, "Number of principal curvatures")->capture_default_str();
  check->add_option("--samples", plan.count, "Sample count")->capture_default_str();
  check->add_option("--seed", plan.seed, "Sampling seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*run) {
      const RunSpec spec = build_spec(run_opts);
      if (print_config) {
        std::cout << to_config_text(spec);
        return 0;
      }
      const RunOutcome o = execute_run(spec, run_opts.out);
      const auto& r = o.result;
      std::cout << "stop: " << to_string(r.stop.kind) << " (" << r.stop.detail << ")\n"
                << "t_final: " << r.final_state.t << "\nsteps: " << r.steps << '\n'
                << "converged_to_sphere: " << (o.verdict.converged_to_sphere ? "yes" : "no") << '\n'
                << "bounds: " << (o.bounds.all_pass ? "PASS" : "FAIL") << '\n'
                << "output: " << run_opts.out << '\n';
      return o.exit_code;
    }
    if (*sweep) {
      const RunSpec spec = build_spec(sweep_opts);
      std::vector<SweepAxis> parsed;
      for (const auto& a : axes) parsed.push_back(parse_axis(a));
      const SweepResult res = execute_sweep(spec, parsed, parallel, sweep_opts.out);
      for (const auto& c : res.cells) {
        std::cout << "cell " << c.index;
        for (std::size_t k = 0; k < parsed.size(); ++k) std::cout << ' ' << parsed[k].key << '=' << c.values[k];
        std::cout << ": " << c.stop;
        if (!c.error.empty()) std::cout << " (" << c.error << ')';
        std::cout << '\n';
      }
      std::cout << "summary: " << (std::filesystem::path(sweep_opts.out) / "summary.csv").string() << '\n';
      return res.exit_code;
    }
    if (*check) {
      const auto f = CurvatureFunction::parse(f_spec, dim);
      const auto report = check_condition(f, plan);
      std::cout << report.to_text();
      return report.all_pass() ? 0 : 1;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const UnknownPreset& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return 1;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
