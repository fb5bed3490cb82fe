#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include "curvflow/config.hpp"
#include "curvflow/errors.hpp"
#include "curvflow/runner.hpp"

using namespace curvflow;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

fs::path scratch_dir(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("curvflow_test_" + name);
  fs::remove_all(p);
  return p;
}

// Small enough to finish in well under a second.
RunSpec quick_spec() {
  std::istringstream in(R"(
# an ellipse under the normalized curve flow
flow.alpha = 2
flow.beta = 1
grid.n = 1
grid.N = 32
time.t_max = 0.2
output.record_every = 5
output.snapshot_interval = 0.1
initial.shape = ellipsoid   # axis 2, equatorial 1 by default
initial.axis = 1.3
)");
  return parse_config(in);
}

std::string expect_config_error(const std::string& text) {
  std::istringstream in(text);
  try {
    parse_config(in);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "<accepted>";
}

}  // namespace

TEST_CASE("config parsing") {
  const RunSpec s = quick_spec();
  CHECK(s.flow.alpha == 2.0);
  CHECK(s.flow.n == 1);
  CHECK(s.flow.N == 32);
  CHECK(s.flow.snapshot_interval == 0.1);
  CHECK(s.initial.shape == "ellipsoid");
  CHECK(s.initial.axis == 1.3);
  CHECK(s.preset.empty());

  CHECK(expect_config_error("flow.colour = red\n").find("flow.colour") != std::string::npos);
  CHECK(expect_config_error("flow.alpha = two\n").find("flow.alpha") != std::string::npos);
  CHECK(expect_config_error("flow.beta = 0.5\n").find("flow.beta") != std::string::npos);
  CHECK(expect_config_error("grid.N = 4\n").find("grid.N") != std::string::npos);
  CHECK(expect_config_error("flow.normalized = maybe\n").find("flow.normalized") != std::string::npos);
  CHECK(expect_config_error("just words\n").find("line 1") != std::string::npos);
  CHECK(expect_config_error("run.preset = thm9\n").find("run.preset") != std::string::npos);
  CHECK_THROWS_AS(parse_config_file("/nonexistent/missing.cfg"), ConfigError);
}

TEST_CASE("presets round-trip through the config text") {
  for (auto name : preset_names()) {
    const RunSpec s = preset_spec(name);
    std::istringstream in(to_config_text(s));
    const RunSpec t = parse_config(in);
    CHECK(to_config_text(t).substr(to_config_text(t).find("run.seed")) ==
          to_config_text(s).substr(to_config_text(s).find("run.seed")));
    CHECK(t.flow.alpha == s.flow.alpha);
    CHECK(t.flow.f_spec == s.flow.f_spec);
    CHECK(t.flow.snapshot_times == s.flow.snapshot_times);
    CHECK(t.initial.shape == s.initial.shape);
  }
}

TEST_CASE("run.preset applies first and overrides follow") {
  std::istringstream in("flow.alpha = 2.5\nrun.preset = thm1-radial\n");
  const RunSpec s = parse_config(in);
  CHECK(s.flow.alpha == 2.5);
  CHECK(s.flow.n == 2);
  CHECK(s.preset == "thm1-radial+overrides");
  RunSpec t;
  apply_setting(t, "alpha", "3.5");
  apply_setting(t, "N", "64");
  CHECK(t.flow.alpha == 3.5);
  CHECK(t.flow.N == 64);
}

TEST_CASE("sweep axes") {
  auto a = parse_axis("alpha=[1.5:0.5:4]");
  CHECK(a.key == "flow.alpha");
  CHECK(a.values == std::vector<std::string>{"1.5", "2", "2.5", "3", "3.5", "4"});
  a = parse_axis("beta=[1, 1.5 ,2]");
  CHECK(a.values == std::vector<std::string>{"1", "1.5", "2"});
  a = parse_axis("flow.f=[arithmetic-mean,blend(gauss-root,arithmetic-mean,0.5)]");
  CHECK(a.values == std::vector<std::string>{"arithmetic-mean", "blend(gauss-root,arithmetic-mean,0.5)"});
  a = parse_axis("alpha=[0.1:0.1:0.3]");
  CHECK(a.values.size() == 3);
  for (const char* bad : {"alpha=[]", "alpha=[2:1:1]", "alpha=[1:0:2]", "alpha=1.5", "=[1]", "alpha=[1:x:2]"})
    CHECK_THROWS_AS(parse_axis(bad), ConfigError);
}

TEST_CASE("exit codes") {
  CHECK(exit_code_for(StopKind::Converged) == 0);
  CHECK(exit_code_for(StopKind::ReachedOrigin) == 0);
  CHECK(exit_code_for(StopKind::RatioBlowup) == 0);
  CHECK(exit_code_for(StopKind::TimeExhausted) == 0);
  CHECK(exit_code_for(StopKind::LostConvexity) == 2);
  CHECK(exit_code_for(StopKind::NumericalFailure) == 2);
}

TEST_CASE("execute_run writes deterministic artifacts") {
  const auto d1 = scratch_dir("run1"), d2 = scratch_dir("run2");
  const RunSpec s = quick_spec();
  const auto o = execute_run(s, d1);
  execute_run(s, d2);
  CHECK(o.exit_code == 0);
  CHECK(o.result.stop.kind == StopKind::TimeExhausted);
  for (const char* f : {"timeseries.csv", "report.txt", "config.txt", "manifest.json", "summary.csv",
                        "snapshots/snap_0000.txt", "snapshots/snap_0002.txt"})
    CHECK_MESSAGE(fs::exists(d1 / f), f);
  CHECK(slurp(d1 / "timeseries.csv") == slurp(d2 / "timeseries.csv"));
  CHECK(slurp(d1 / "snapshots/snap_0002.txt") == slurp(d2 / "snapshots/snap_0002.txt"));
  const auto header = slurp(d1 / "timeseries.csv").substr(0, slurp(d1 / "timeseries.csv").find('\n'));
  CHECK(header == "t,r_min,r_max,ratio,grad_ratio_max,lambda_min,lambda_max,F_min,F_max,u_min,u_max,star_margin,dt");
  const auto manifest = slurp(d1 / "manifest.json");
  CHECK(manifest.find("\"reason\": \"TimeExhausted\"") != std::string::npos);
  CHECK(manifest.find("\"flow.alpha\": \"2\"") != std::string::npos);
  CHECK(slurp(d1 / "report.txt").find("stop.reason: TimeExhausted") != std::string::npos);

  // The written config reproduces the run.
  const RunSpec again = parse_config_file(d1 / "config.txt");
  const auto d3 = scratch_dir("run3");
  execute_run(again, d3);
  CHECK(slurp(d1 / "timeseries.csv") == slurp(d3 / "timeseries.csv"));

  RunSpec bad = s;
  bad.initial.shape = "eccentric";
  bad.initial.offset = 3.0;
  CHECK_THROWS_AS(execute_run(bad, scratch_dir("run4")), ConfigError);
  for (const auto& d : {d1, d2, d3}) fs::remove_all(d);
}

TEST_CASE("sweep results do not depend on parallelism") {
  const auto d1 = scratch_dir("sweep1"), d2 = scratch_dir("sweep2");
  const RunSpec s = quick_spec();
  const std::vector<SweepAxis> axes = {parse_axis("alpha=[2:1:3]"), parse_axis("beta=[1,0.5]")};
  const auto a = execute_sweep(s, axes, 1, d1);
  const auto b = execute_sweep(s, axes, 3, d2);
  REQUIRE(a.cells.size() == 4);
  CHECK(a.cells[1].stop == "ConfigError");
  CHECK(a.cells[1].exit_code == 1);
  CHECK(a.cells[0].stop == "TimeExhausted");
  CHECK(a.exit_code == 1);
  for (const char* cell : {"cell_000", "cell_002"})
    CHECK(slurp(d1 / cell / "timeseries.csv") == slurp(d2 / cell / "timeseries.csv"));
  CHECK(slurp(d1 / "summary.csv") == slurp(d2 / "summary.csv"));
  CHECK(slurp(d1 / "summary.csv").rfind("cell,flow.alpha,flow.beta,stop", 0) == 0);
  fs::remove_all(d1);
  fs::remove_all(d2);
}
