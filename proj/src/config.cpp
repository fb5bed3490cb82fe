#include "curvflow/config.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>

#include "curvflow/errors.hpp"

namespace curvflow {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string bad(std::string_view key, std::string_view value, std::string_view want) {
  return std::string(key) + ": cannot read '" + std::string(value) + "' as " + std::string(want);
}

double to_double(std::string_view key, std::string_view v) {
  double x = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size()) throw ConfigError(bad(key, v, "a number"));
  return x;
}

long long to_int(std::string_view key, std::string_view v) {
  long long x = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size()) throw ConfigError(bad(key, v, "an integer"));
  return x;
}

bool to_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  throw ConfigError(bad(key, v, "a boolean"));
}

std::vector<double> to_list(std::string_view key, std::string_view v) {
  std::vector<double> out;
  while (!v.empty()) {
    const auto comma = v.find(',');
    const auto item = trim(v.substr(0, comma));
    if (!item.empty()) out.push_back(to_double(key, item));
    if (comma == std::string_view::npos) break;
    v.remove_prefix(comma + 1);
  }
  return out;
}

std::string fmt(double v) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

}  // namespace

const std::vector<std::string_view>& config_keys() {
  static const std::vector<std::string_view> keys = {
      "run.preset",       "run.seed",           "flow.alpha",          "flow.beta",
      "flow.speed",       "flow.parametrization", "flow.normalized",   "flow.f",
      "grid.n",           "grid.N",             "time.safety",         "time.t_max",
      "stop.grad_ratio_tol", "stop.ratio_tol",  "stop.origin_eps",     "stop.blowup_ratio",
      "stop.curvature_cap", "stop.stationary_tol", "output.record_every", "output.snapshot_interval",
      "output.snapshot_times", "initial.shape", "initial.radius",      "initial.axis",
      "initial.equatorial", "initial.offset",   "initial.file"};
  return keys;
}

std::string canonical_key(std::string_view key) {
  if (key == "alpha") return "flow.alpha";
  if (key == "beta") return "flow.beta";
  if (key == "f") return "flow.f";
  if (key == "n") return "grid.n";
  if (key == "N") return "grid.N";
  return std::string(key);
}

void apply_setting(RunSpec& spec, std::string_view raw_key, std::string_view raw_value) {
  const std::string key = canonical_key(trim(raw_key));
  const std::string_view v = trim(raw_value);
  FlowConfig& c = spec.flow;
  InitialSpec& in = spec.initial;
  auto as_int = [&] {
    const long long x = to_int(key, v);
    if (x < -1000000000LL || x > 1000000000LL) throw ConfigError(key + ": out of range");
    return static_cast<int>(x);
  };

  if (key == "run.preset") {
    const auto seed = spec.seed;
    try {
      spec = preset_spec(v);
    } catch (const UnknownPreset& e) {
      throw ConfigError(std::string("run.preset: ") + e.what());
    }
    spec.seed = seed;
  } else if (key == "run.seed") {
    const long long x = to_int(key, v);
    if (x < 0) throw ConfigError("run.seed: must be non-negative");
    spec.seed = static_cast<std::uint64_t>(x);
  } else if (key == "flow.alpha") c.alpha = to_double(key, v);
  else if (key == "flow.beta") c.beta = to_double(key, v);
  else if (key == "flow.speed") {
    try {
      c.speed_kind = parse_weight_kind(v);
    } catch (const ParseError&) {
      throw ConfigError(bad(key, v, "radial or support"));
    }
  } else if (key == "flow.parametrization") {
    try {
      c.parametrization = parse_profile_kind(v);
    } catch (const std::exception&) {
      throw ConfigError(bad(key, v, "radial or support"));
    }
  } else if (key == "flow.normalized") c.normalized = to_bool(key, v);
  else if (key == "flow.f") c.f_spec = std::string(v);
  else if (key == "grid.n") c.n = as_int();
  else if (key == "grid.N") c.N = as_int();
  else if (key == "time.safety") c.safety = to_double(key, v);
  else if (key == "time.t_max") c.t_max = to_double(key, v);
  else if (key == "stop.grad_ratio_tol") c.stop.grad_ratio_tol = to_double(key, v);
  else if (key == "stop.ratio_tol") c.stop.ratio_tol = to_double(key, v);
  else if (key == "stop.origin_eps") c.stop.origin_eps = to_double(key, v);
  else if (key == "stop.blowup_ratio") c.stop.blowup_ratio = to_double(key, v);
  else if (key == "stop.curvature_cap") c.stop.curvature_cap = to_double(key, v);
  else if (key == "stop.stationary_tol") c.stop.stationary_tol = to_double(key, v);
  else if (key == "output.record_every") c.record_every = as_int();
  else if (key == "output.snapshot_interval") c.snapshot_interval = to_double(key, v);
  else if (key == "output.snapshot_times") c.snapshot_times = to_list(key, v);
  else if (key == "initial.shape") in.shape = std::string(v);
  else if (key == "initial.radius") in.radius = to_double(key, v);
  else if (key == "initial.axis") in.axis = to_double(key, v);
  else if (key == "initial.equatorial") in.equatorial = to_double(key, v);
  else if (key == "initial.offset") in.offset = to_double(key, v);
  else if (key == "initial.file") in.file = std::string(v);
  else throw ConfigError(key + ": unknown key");
  if (key != "run.preset" && key != "run.seed") spec.preset.clear();
}

RunSpec parse_config(std::istream& in, RunSpec base) {
  std::vector<std::pair<std::string, std::string>> lines;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::string_view s = line;
    if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(number) + ": expected 'section.key = value'");
    lines.emplace_back(std::string(trim(s.substr(0, eq))), std::string(trim(s.substr(eq + 1))));
  }
  RunSpec spec = std::move(base);
  std::string preset_name;
  for (const auto& [k, v] : lines)
    if (k == "run.preset") apply_setting(spec, k, v), preset_name = v;
  for (const auto& [k, v] : lines)
    if (k != "run.preset") apply_setting(spec, k, v);
  // Overrides on top of a named preset keep the name for the manifest.
  if (!preset_name.empty() && spec.preset.empty()) spec.preset = preset_name + "+overrides";
  spec.flow.validate();
  return spec;
}

RunSpec parse_config_file(const std::filesystem::path& path, RunSpec base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path.string() + "'");
  return parse_config(in, std::move(base));
}

std::string to_config_text(const RunSpec& s) {
  const FlowConfig& c = s.flow;
  std::ostringstream o;
  o << "# " << kVersion << '\n';
  if (!s.preset.empty()) o << "# preset: " << s.preset << '\n';
  o << "run.seed = " << s.seed << '\n';
  o << "flow.alpha = " << fmt(c.alpha) << '\n';
  o << "flow.beta = " << fmt(c.beta) << '\n';
  o << "flow.speed = " << to_string(c.speed_kind) << '\n';
  o << "flow.parametrization = " << to_string(c.parametrization) << '\n';
  o << "flow.normalized = " << (c.normalized ? "true" : "false") << '\n';
  o << "flow.f = " << c.f_spec << '\n';
  o << "grid.n = " << c.n << '\n';
  o << "grid.N = " << c.N << '\n';
  o << "time.safety = " << fmt(c.safety) << '\n';
  o << "time.t_max = " << fmt(c.t_max) << '\n';
  o << "stop.grad_ratio_tol = " << fmt(c.stop.grad_ratio_tol) << '\n';
  o << "stop.ratio_tol = " << fmt(c.stop.ratio_tol) << '\n';
  o << "stop.origin_eps = " << fmt(c.stop.origin_eps) << '\n';
  o << "stop.blowup_ratio = " << fmt(c.stop.blowup_ratio) << '\n';
  o << "stop.curvature_cap = " << fmt(c.stop.curvature_cap) << '\n';
  o << "stop.stationary_tol = " << fmt(c.stop.stationary_tol) << '\n';
  o << "output.record_every = " << c.record_every << '\n';
  o << "output.snapshot_interval = " << fmt(c.snapshot_interval) << '\n';
  o << "output.snapshot_times =";
  for (std::size_t i = 0; i < c.snapshot_times.size(); ++i) o << (i ? ", " : " ") << fmt(c.snapshot_times[i]);
  o << '\n';
  o << "initial.shape = " << s.initial.shape << '\n';
  o << "initial.radius = " << fmt(s.initial.radius) << '\n';
  o << "initial.axis = " << fmt(s.initial.axis) << '\n';
  o << "initial.equatorial = " << fmt(s.initial.equatorial) << '\n';
  o << "initial.offset = " << fmt(s.initial.offset) << '\n';
  if (!s.initial.file.empty()) o << "initial.file = " << s.initial.file << '\n';
  return o.str();
}

RunSpec preset_spec(std::string_view name) {
  Preset p = preset(name);
  RunSpec s;
  s.preset = p.name;
  s.flow = std::move(p.config);
  s.initial = std::move(p.initial_spec);
  return s;
}

}  // namespace curvflow
