#include "curvflow/runner.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "curvflow/errors.hpp"
#include "curvflow/simd/kernels.hpp"

namespace curvflow {

namespace fs = std::filesystem;

namespace {

std::string iso_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream o;
  o << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return o.str();
}

std::string fmt(double v) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

nlohmann::ordered_json config_echo(const RunSpec& spec) {
  nlohmann::ordered_json echo;
  std::istringstream in(to_config_text(spec));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find(" = ");
    if (eq == std::string::npos) {
      if (!line.empty() && line.back() == '=') echo[line.substr(0, line.size() - 1)] = "";
      continue;
    }
    echo[line.substr(0, eq)] = line.substr(eq + 3);
  }
  return echo;
}

}  // namespace

int exit_code_for(StopKind kind) {
  return kind == StopKind::LostConvexity || kind == StopKind::NumericalFailure ? 2 : 0;
}

RunOutcome execute_run(const RunSpec& spec, const fs::path& out_dir) {
  const std::string started = iso_now();
  spec.flow.validate();
  const Flow flow(spec.flow);
  const Profile initial = make_initial(spec.initial, spec.flow);
  try {
    (void)flow.make_state(initial);
  } catch (const NonConvex& e) {
    throw ConfigError(std::string("initial: ") + e.what());
  } catch (const PoleIrregular& e) {
    throw ConfigError(std::string("initial: ") + e.what());
  }

  RunOutcome out;
  out.result = flow.run(initial);
  out.verdict = convergence_verdict(out.result.series, VerdictTolerances::from(spec.flow.stop));
  out.bounds = check_bounds(out.result.series, spec.flow);
  out.exit_code = exit_code_for(out.result.stop.kind);

  fs::create_directories(out_dir / "snapshots");
  std::vector<std::string> files;
  auto track = [&](const fs::path& p) { files.push_back(fs::relative(p, out_dir).generic_string()); };

  const fs::path csv = out_dir / "timeseries.csv";
  out.result.series.write_csv(csv);
  track(csv);
  for (std::size_t i = 0; i < out.result.snapshots.size(); ++i) {
    std::ostringstream name;
    name << "snap_" << std::setw(4) << std::setfill('0') << i << ".txt";
    const fs::path p = out_dir / "snapshots" / name.str();
    write_snapshot_file(p, out.result.snapshots[i]);
    track(p);
  }

  const RunResult& r = out.result;
  {
    const fs::path p = out_dir / "report.txt";
    std::ofstream rep(p);
    rep << std::setprecision(10);
    rep << "run.preset: " << (spec.preset.empty() ? "-" : spec.preset) << '\n';
    rep << "stop.reason: " << to_string(r.stop.kind) << '\n';
    rep << "stop.measurement: " << r.stop.measurement << '\n';
    rep << "stop.detail: " << r.stop.detail << '\n';
    rep << "run.t_final: " << r.final_state.t << '\n';
    rep << "run.steps: " << r.steps << '\n';
    rep << "run.records: " << r.series.size() << '\n';
    rep << "run.snapshots: " << r.snapshots.size() << '\n';
    rep << "run.exit_code: " << out.exit_code << '\n';
    rep << out.verdict.to_text() << out.bounds.to_text();
    track(p);
  }
  {
    const fs::path p = out_dir / "config.txt";
    std::ofstream cfg(p);
    cfg << to_config_text(spec);
    track(p);
  }
  const fs::path index = out_dir / "summary.csv";
  append_run_index(index, {spec.preset.empty() ? out_dir.filename().string() : spec.preset,
                           std::string(to_string(r.stop.kind)), r.final_state.t, r.steps,
                           r.series.empty() ? 0.0 : r.series.back().ratio, out.verdict.gamma_ratio(),
                           out.verdict.gamma_grad(), out.verdict.converged_to_sphere, out.bounds.all_pass});
  track(index);

  nlohmann::ordered_json m;
  m["version"] = kVersion;
  m["preset"] = spec.preset;
  m["seed"] = spec.seed;
  m["config"] = config_echo(spec);
  m["start_time"] = started;
  m["end_time"] = iso_now();
  m["stop"] = {{"reason", to_string(r.stop.kind)},
               {"measurement", r.stop.measurement},
               {"detail", r.stop.detail},
               {"t_final", r.final_state.t},
               {"steps", r.steps}};
  m["exit_code"] = out.exit_code;
  m["simd"] = isa_name(simd::kernels().isa);
  m["outputs"] = files;
  std::ofstream(out_dir / "manifest.json") << m.dump(2) << '\n';
  return out;
}

SweepAxis parse_axis(std::string_view text) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos || eq == 0)
    throw ConfigError("sweep axis '" + std::string(text) + "': expected key=[lo:step:hi] or key=[v1,v2]");
  SweepAxis axis;
  axis.key = canonical_key(text.substr(0, eq));
  std::string_view body = text.substr(eq + 1);
  if (body.size() < 2 || body.front() != '[' || body.back() != ']')
    throw ConfigError(axis.key + ": axis values must be enclosed in [ ]");
  body = body.substr(1, body.size() - 2);
  auto number = [&](std::string_view s) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    double x = 0.0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(x))
      throw ConfigError(axis.key + ": axis value '" + std::string(s) + "' is not a finite number");
    return x;
  };
  if (body.find(':') != std::string_view::npos) {
    const auto c1 = body.find(':'), c2 = body.find(':', c1 + 1);
    if (c2 == std::string_view::npos) throw ConfigError(axis.key + ": range must be [lo:step:hi]");
    const double lo = number(body.substr(0, c1));
    const double step = number(body.substr(c1 + 1, c2 - c1 - 1));
    const double hi = number(body.substr(c2 + 1));
    if (!(step > 0.0)) throw ConfigError(axis.key + ": range step must be positive");
    if (hi < lo) throw ConfigError(axis.key + ": empty range (hi < lo)");
    const auto count = static_cast<long>(std::floor((hi - lo) / step + 1e-9)) + 1;
    if (count > 100000) throw ConfigError(axis.key + ": range has too many points");
    for (long i = 0; i < count; ++i) axis.values.push_back(fmt(lo + static_cast<double>(i) * step));
  } else {
    // Split at commas outside parentheses so function specs survive.
    std::string item;
    int depth = 0;
    auto flush = [&] {
      const auto b = item.find_first_not_of(' '), e = item.find_last_not_of(' ');
      if (b != std::string::npos) axis.values.push_back(item.substr(b, e - b + 1));
      item.clear();
    };
    for (char ch : body) {
      if (ch == '(') ++depth;
      if (ch == ')') --depth;
      if (ch == ',' && depth == 0) flush();
      else item += ch;
    }
    flush();
  }
  if (axis.values.empty()) throw ConfigError(axis.key + ": empty sweep axis");
  return axis;
}

SweepResult execute_sweep(const RunSpec& base, const std::vector<SweepAxis>& axes, int parallel,
                          const fs::path& out_dir) {
  if (axes.empty()) throw ConfigError("sweep: no axis given");
  std::size_t total = 1;
  for (const auto& a : axes) {
    if (a.values.empty()) throw ConfigError(a.key + ": empty sweep axis");
    total *= a.values.size();
  }
  SweepResult res;
  res.cells.resize(total);
  for (std::size_t i = 0; i < total; ++i) {
    SweepCell& cell = res.cells[i];
    cell.index = i;
    std::size_t rest = i;
    cell.values.resize(axes.size());
    for (std::size_t k = axes.size(); k-- > 0;) {
      cell.values[k] = axes[k].values[rest % axes[k].values.size()];
      rest /= axes[k].values.size();
    }
  }
  fs::create_directories(out_dir);

  auto work = [&](SweepCell& cell) {
    std::ostringstream name;
    name << "cell_" << std::setw(3) << std::setfill('0') << cell.index;
    try {
      RunSpec spec = base;
      const std::string preset = spec.preset;
      for (std::size_t k = 0; k < axes.size(); ++k) apply_setting(spec, axes[k].key, cell.values[k]);
      spec.preset = preset.empty() ? "" : preset + "+sweep";
      const RunOutcome o = execute_run(spec, out_dir / name.str());
      cell.stop = std::string(to_string(o.result.stop.kind));
      cell.exit_code = o.exit_code;
      cell.t_final = o.result.final_state.t;
      cell.steps = o.result.steps;
      cell.final_ratio = o.result.series.empty() ? 0.0 : o.result.series.back().ratio;
      cell.gamma_ratio = o.verdict.gamma_ratio();
      cell.gamma_grad = o.verdict.gamma_grad();
      cell.converged = o.verdict.converged_to_sphere;
      cell.bounds_pass = o.bounds.all_pass;
    } catch (const ConfigError& e) {
      cell.stop = "ConfigError";
      cell.error = e.what();
      cell.exit_code = 1;
    } catch (const std::exception& e) {
      cell.stop = "Error";
      cell.error = e.what();
      cell.exit_code = 2;
    }
  };

  const int threads = std::clamp(parallel, 1, static_cast<int>(total));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < total;) work(res.cells[i]);
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  std::ofstream summary(out_dir / "summary.csv");
  summary << "cell";
  for (const auto& a : axes) summary << ',' << a.key;
  summary << ",stop,t_final,steps,final_ratio,gamma_ratio,gamma_grad,converged,bounds_pass,error\n";
  summary << std::setprecision(17);
  for (const auto& c : res.cells) {
    summary << c.index;
    for (const auto& v : c.values) summary << ',' << v;
    std::string err = c.error;
    std::replace(err.begin(), err.end(), ',', ';');
    summary << ',' << c.stop << ',' << c.t_final << ',' << c.steps << ',' << c.final_ratio << ','
            << c.gamma_ratio << ',' << c.gamma_grad << ',' << (c.converged ? 1 : 0) << ','
            << (c.bounds_pass ? 1 : 0) << ',' << err << '\n';
    res.exit_code = std::max(res.exit_code, c.exit_code);
  }
  return res;
}

}  // namespace curvflow
