#include "curvflow/profile.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <numbers>
#include <ostream>
#include <string>

#include "curvflow/curvature_function.hpp"
#include "curvflow/errors.hpp"

namespace curvflow {

std::string_view to_string(ProfileKind kind) {
  return kind == ProfileKind::radial ? "radial" : "support";
}

ProfileKind parse_profile_kind(std::string_view text) {
  if (text == "radial") return ProfileKind::radial;
  if (text == "support") return ProfileKind::support;
  throw ParseError("unknown profile kind '" + std::string(text) + "'");
}

double grid_spacing(int n, int N) {
  return (n == 1 ? 2.0 * std::numbers::pi : std::numbers::pi) / N;
}

Profile Profile::sample(ProfileKind kind, int n, int N, const std::function<double(double)>& fn,
                        double time) {
  Profile p{kind, n, N, {}, time};
  p.values.resize(static_cast<std::size_t>(node_count(n, N)));
  for (int j = 0; j < p.nodes(); ++j) p.values[static_cast<std::size_t>(j)] = fn(p.theta(j));
  p.validate();
  return p;
}

void Profile::validate() const {
  if (n < 1 || n > kMaxDimension)
    throw DomainError("profile dimension n=" + std::to_string(n) + " out of range");
  if (N < 8) throw DomainError("profile grid needs N >= 8, got " + std::to_string(N));
  if (static_cast<int>(values.size()) != nodes())
    throw DomainError("profile has " + std::to_string(values.size()) + " values, grid expects " +
                      std::to_string(nodes()));
  for (std::size_t j = 0; j < values.size(); ++j)
    if (!(values[j] > 0.0) || !std::isfinite(values[j]))
      throw DomainError("profile value at node " + std::to_string(j) +
                        " is not a positive finite number");
}

void write_snapshot(std::ostream& out, const Profile& p) {
  out << std::setprecision(17);
  out << "# kind: " << to_string(p.kind) << '\n'
      << "# n: " << p.n << '\n'
      << "# N: " << p.N << '\n'
      << "# time: " << p.time << '\n'
      << "theta,value\n";
  for (int j = 0; j < p.nodes(); ++j)
    out << p.theta(j) << ',' << p.values[static_cast<std::size_t>(j)] << '\n';
}

namespace {

double to_double(std::string_view s, const char* what) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ParseError(std::string("snapshot: bad ") + what + " '" + std::string(s) + "'");
  return v;
}

int to_int(std::string_view s, const char* what) {
  const double v = to_double(s, what);
  if (v != std::floor(v)) throw ParseError(std::string("snapshot: non-integer ") + what);
  return static_cast<int>(v);
}

}  // namespace

Profile read_snapshot(std::istream& in) {
  Profile p;
  bool have_kind = false, have_n = false, have_N = false, in_body = false;
  std::string line;
  while (std::getline(in, line)) {
    std::string_view v(line);
    if (v.empty() || v == "\r") continue;
    if (v.starts_with("#")) {
      v.remove_prefix(1);
      const auto colon = v.find(':');
      if (colon == std::string_view::npos) continue;
      std::string_view key = v.substr(0, colon), val = v.substr(colon + 1);
      while (!key.empty() && key.front() == ' ') key.remove_prefix(1);
      while (!val.empty() && val.front() == ' ') val.remove_prefix(1);
      while (!val.empty() && (val.back() == ' ' || val.back() == '\r')) val.remove_suffix(1);
      if (key == "kind") p.kind = parse_profile_kind(val), have_kind = true;
      else if (key == "n") p.n = to_int(val, "n"), have_n = true;
      else if (key == "N") p.N = to_int(val, "N"), have_N = true;
      else if (key == "time") p.time = to_double(val, "time");
      continue;
    }
    if (!in_body) {
      if (!v.starts_with("theta,value")) throw ParseError("snapshot: missing 'theta,value' header");
      in_body = true;
      continue;
    }
    const auto comma = v.find(',');
    if (comma == std::string_view::npos) throw ParseError("snapshot: malformed row '" + line + "'");
    p.values.push_back(to_double(v.substr(comma + 1), "value"));
  }
  if (!have_kind || !have_n || !have_N) throw ParseError("snapshot: incomplete header");
  p.validate();
  return p;
}

void write_snapshot_file(const std::filesystem::path& path, const Profile& p) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_snapshot(out, p);
}

Profile read_snapshot_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return read_snapshot(in);
}

}  // namespace curvflow
