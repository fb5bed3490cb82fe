#include "curvflow/flow.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <sstream>

#include "curvflow/errors.hpp"

namespace curvflow {

std::string_view to_string(WeightKind kind) {
  return kind == WeightKind::radial ? "radial" : "support";
}

WeightKind parse_weight_kind(std::string_view text) {
  if (text == "radial" || text == "r") return WeightKind::radial;
  if (text == "support" || text == "u") return WeightKind::support;
  throw ParseError("unknown speed weight '" + std::string(text) + "'");
}

std::string_view to_string(StopKind kind) {
  switch (kind) {
    case StopKind::Converged: return "Converged";
    case StopKind::ReachedOrigin: return "ReachedOrigin";
    case StopKind::RatioBlowup: return "RatioBlowup";
    case StopKind::LostConvexity: return "LostConvexity";
    case StopKind::TimeExhausted: return "TimeExhausted";
    case StopKind::NumericalFailure: return "NumericalFailure";
  }
  return "?";
}

StopKind parse_stop_kind(std::string_view text) {
  for (StopKind k : {StopKind::Converged, StopKind::ReachedOrigin, StopKind::RatioBlowup,
                     StopKind::LostConvexity, StopKind::TimeExhausted, StopKind::NumericalFailure})
    if (text == to_string(k)) return k;
  throw ParseError("unknown stop reason '" + std::string(text) + "'");
}

namespace {

std::size_t sz(int v) { return static_cast<std::size_t>(v); }

template <class T>
std::string str(const T& v) {
  std::ostringstream o;
  o.precision(10);
  o << v;
  return o.str();
}

void require(bool ok, const char* key, const std::string& what) {
  if (!ok) throw ConfigError(std::string(key) + ": " + what);
}

// x^a; integer and half-integer exponents up to 8 use sqrt and products.
inline double power(double x, double a) {
  const double twice = 2.0 * a;
  if (twice != std::nearbyint(twice) || std::abs(twice) > 16.0) return std::pow(x, a);
  const int k = static_cast<int>(std::abs(twice));
  double r = (k & 1) ? std::sqrt(x) : 1.0;
  for (int i = 0; i < k / 2; ++i) r *= x;
  return a < 0.0 ? 1.0 / r : r;
}

}  // namespace

void FlowConfig::validate() const {
  require(std::isfinite(alpha), "flow.alpha", "must be finite (got " + str(alpha) + ")");
  require(std::isfinite(beta) && beta >= 1.0, "flow.beta", "must be >= 1 (got " + str(beta) + ")");
  require(n >= 1 && n <= kMaxDimension, "grid.n",
          "must be in [1, " + std::to_string(kMaxDimension) + "] (got " + std::to_string(n) + ")");
  require(N >= 16, "grid.N", "must be >= 16 (got " + std::to_string(N) + ")");
  require(safety > 0.0 && safety < 1.0, "time.safety", "must lie in (0, 1) (got " + str(safety) + ")");
  require(std::isfinite(t_max) && t_max > 0.0, "time.t_max", "must be positive (got " + str(t_max) + ")");
  require(stop.grad_ratio_tol > 0.0, "stop.grad_ratio_tol", "must be positive");
  require(stop.ratio_tol > 0.0, "stop.ratio_tol", "must be positive");
  require(stop.origin_eps > 0.0, "stop.origin_eps", "must be positive");
  require(stop.blowup_ratio > 1.0, "stop.blowup_ratio", "must exceed 1");
  require(stop.curvature_cap > 0.0, "stop.curvature_cap", "must be positive");
  require(stop.stationary_tol > 0.0, "stop.stationary_tol", "must be positive");
  require(record_every >= 1, "output.record_every", "must be >= 1");
  require(snapshot_interval >= 0.0 && std::isfinite(snapshot_interval), "output.snapshot_interval",
          "must be >= 0");
  for (double t : snapshot_times)
    require(std::isfinite(t) && t >= 0.0, "output.snapshot_times", "entries must be >= 0");
  try {
    make_function(f_spec, n);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("flow.f: ") + e.what());
  }
}

struct Flow::Workspace {
  GeometryFields g;
  std::vector<double> F, phi;
  std::vector<double> k1, k2, k3, k4, y;
};

namespace {

CurvatureFunction validated_function(const FlowConfig& cfg) {
  cfg.validate();
  return make_function(cfg.f_spec, cfg.n);
}

}  // namespace

Flow::Flow(FlowConfig cfg)
    : cfg_(std::move(cfg)), f_(validated_function(cfg_)), f_dual_(f_.dual()) {}

void Flow::evaluate(std::span<const double> values, Workspace& ws, std::span<double> out) const {
  const int n = cfg_.n;
  compute_geometry(cfg_.parametrization, n, cfg_.N, values, ws.g);
  const GeometryFields& g = ws.g;
  if (auto v = find_convexity_violation(g)) {
    throw FlowError({StopKind::LostConvexity, v->value,
                     "convexity lost at node " + std::to_string(v->node) + " (theta=" + str(v->theta) +
                         "), value " + str(v->value)});
  }
  const int m = g.nodes();
  ws.F.resize(sz(m));
  ws.phi.resize(sz(m));
  const bool radial_picture = cfg_.parametrization == ProfileKind::radial;
  const bool radial_weight = cfg_.speed_kind == WeightKind::radial;
  std::array<double, kMaxDimension> tuple{};
  const std::span<double> lam(tuple.data(), sz(n));

  for (int j = 0; j < m; ++j) {
    const std::size_t i = sz(j);
    const double W = radial_weight ? g.radial[i] : g.support[i];
    double F, phi, v;
    if (radial_picture) {
      g.eigen_tuple(j, lam);
      F = f_.eval_unchecked(lam);
      phi = power(W, cfg_.alpha) * power(F, cfg_.beta);
      v = -(std::sqrt(g.metric[i]) / g.radial[i]) * phi;
    } else {
      lam[0] = g.tau_profile[i];
      for (int a = 1; a < n; ++a) lam[sz(a)] = g.tau_orbit[i];
      const double Fs = f_dual_.eval_unchecked(lam);
      F = 1.0 / Fs;
      phi = power(W, cfg_.alpha) * power(Fs, -cfg_.beta);
      v = -phi;
    }
    if (zero_speed_) v = 0.0, phi = 0.0;
    else if (cfg_.normalized) v += values[i];
    if (!std::isfinite(v))
      throw FlowError({StopKind::NumericalFailure, v, "non-finite speed at node " + std::to_string(j)});
    ws.F[i] = F;
    ws.phi[i] = phi;
    out[i] = v;
  }
}

void Flow::fill_fields(FlowState& s) const {
  Workspace ws;
  ws.g = std::move(s.geometry);
  s.velocity.resize(s.profile.values.size());
  evaluate(s.profile.values, ws, s.velocity);
  s.geometry = std::move(ws.g);
  s.f_value = std::move(ws.F);
  s.phi = std::move(ws.phi);
}

FlowState Flow::make_state(const Profile& initial) const {
  initial.validate();
  if (initial.n != cfg_.n)
    throw ConfigError("grid.n: profile has n=" + std::to_string(initial.n) + ", config has " +
                      std::to_string(cfg_.n));
  if (initial.N != cfg_.N)
    throw ConfigError("grid.N: profile has N=" + std::to_string(initial.N) + ", config has " +
                      std::to_string(cfg_.N));
  FlowState s;
  s.t = initial.time;
  if (initial.kind == cfg_.parametrization) {
    s.profile = initial;
    profile_geometry(s.profile);
  } else {
    s.profile = initial.kind == ProfileKind::radial ? radial_to_support_profile(initial)
                                                    : support_to_radial_profile(initial);
  }
  try {
    fill_fields(s);
  } catch (const FlowError& e) {
    throw NonConvex(e.what(), -1, 0.0, e.reason().measurement);
  }
  return s;
}

std::vector<double> Flow::rhs(const FlowState& s) const {
  Workspace ws;
  std::vector<double> out(s.profile.values.size());
  evaluate(s.profile.values, ws, out);
  return out;
}

double Flow::stable_dt(const FlowState& s) const {
  const GeometryFields& g = s.geometry;
  const int n = cfg_.n;
  std::array<double, kMaxDimension> tuple{}, grad{};
  const std::span<double> lam(tuple.data(), sz(n)), gr(grad.data(), sz(n));
  double dmax = 0.0;
  for (int j = 0; j < g.nodes(); ++j) {
    const std::size_t i = sz(j);
    double D;
    if (cfg_.parametrization == ProfileKind::radial) {
      g.eigen_tuple(j, lam);
      const double F = f_.gradient_unchecked(lam, gr);
      D = cfg_.beta * s.phi[i] * *std::max_element(gr.begin(), gr.end()) / (F * g.metric[i]);
    } else {
      lam[0] = g.tau_profile[i];
      for (int a = 1; a < n; ++a) lam[sz(a)] = g.tau_orbit[i];
      const double Fs = f_dual_.gradient_unchecked(lam, gr);
      D = cfg_.beta * s.phi[i] * *std::max_element(gr.begin(), gr.end()) / Fs;
    }
    dmax = std::max(dmax, D);
  }
  const double h = grid_spacing(cfg_.n, cfg_.N);
  const double remaining = cfg_.t_max - s.t;
  if (!(dmax > 0.0)) return remaining;
  return std::min(cfg_.safety * h * h / dmax, remaining);
}

FlowState Flow::step(const FlowState& s, double dt) const {
  Workspace ws;
  ws.g = s.geometry;
  const std::size_t m = s.profile.values.size();
  for (auto* v : {&ws.k1, &ws.k2, &ws.k3, &ws.k4, &ws.y}) v->resize(m);
  const auto& k = simd::kernels();
  const double* y0 = s.profile.values.data();

  if (s.velocity.size() == m) ws.k1 = s.velocity;
  else evaluate(s.profile.values, ws, ws.k1);
  k.axpy(m, 0.5 * dt, ws.k1.data(), y0, ws.y.data());
  evaluate(ws.y, ws, ws.k2);
  k.axpy(m, 0.5 * dt, ws.k2.data(), y0, ws.y.data());
  evaluate(ws.y, ws, ws.k3);
  k.axpy(m, dt, ws.k3.data(), y0, ws.y.data());
  evaluate(ws.y, ws, ws.k4);

  FlowState next;
  next.t = s.t + dt;
  next.profile = s.profile;
  next.profile.time = next.t;
  k.rk4_combine(m, dt / 6.0, y0, ws.k1.data(), ws.k2.data(), ws.k3.data(), ws.k4.data(),
                next.profile.values.data());
  for (std::size_t i = 0; i < m; ++i) {
    const double v = next.profile.values[i];
    if (!std::isfinite(v))
      throw FlowError({StopKind::NumericalFailure, v, "non-finite value after step"});
    if (!(v > 0.0))
      throw FlowError({StopKind::NumericalFailure, v, "non-positive value after step"});
  }
  next.geometry = std::move(ws.g);
  fill_fields(next);
  return next;
}

Record Flow::record(const FlowState& s, double dt) const {
  const GeometryFields& g = s.geometry;
  Record r;
  r.t = s.t;
  const auto [rlo, rhi] = std::minmax_element(g.radial.begin(), g.radial.end());
  r.r_min = *rlo;
  r.r_max = *rhi;
  r.ratio = r.r_max / r.r_min;
  r.grad_ratio_max = *std::max_element(g.grad_ratio.begin(), g.grad_ratio.end());
  r.lambda_min = g.lambda_min();
  r.lambda_max = g.lambda_max();
  const auto [flo, fhi] = std::minmax_element(s.f_value.begin(), s.f_value.end());
  r.F_min = *flo;
  r.F_max = *fhi;
  const auto [ulo, uhi] = std::minmax_element(g.support.begin(), g.support.end());
  r.u_min = *ulo;
  r.u_max = *uhi;
  r.star_margin = *std::min_element(g.star_margin.begin(), g.star_margin.end());
  r.dt = dt;
  return r;
}

RunResult Flow::run(const Profile& initial) const {
  RunResult out;
  FlowState s = make_state(initial);

  std::vector<double> schedule = cfg_.snapshot_times;
  if (cfg_.snapshot_interval > 0.0)
    for (long i = 0;; ++i) {
      const double t = s.t + static_cast<double>(i) * cfg_.snapshot_interval;
      if (t > cfg_.t_max) break;
      schedule.push_back(t);
    }
  std::sort(schedule.begin(), schedule.end());
  schedule.erase(std::unique(schedule.begin(), schedule.end()), schedule.end());
  std::size_t next_snap = 0;
  while (next_snap < schedule.size() && schedule[next_snap] < s.t) ++next_snap;
  auto snapshot = [&](const FlowState& st) {
    out.snapshots.push_back(st.profile);
    out.snapshots.back().time = st.t;
  };
  if (next_snap < schedule.size() && schedule[next_snap] == s.t) {
    snapshot(s);
    ++next_snap;
  }

  out.series.records.push_back(record(s, 0.0));
  const StopRules& rules = cfg_.stop;

  auto check_stop = [&](const FlowState& st, const Record& r) -> std::optional<StopReason> {
    if (r.lambda_max > rules.curvature_cap)
      return StopReason{StopKind::NumericalFailure, r.lambda_max,
                        "curvature " + str(r.lambda_max) + " exceeds cap " + str(rules.curvature_cap)};
    if (r.r_min < rules.origin_eps)
      return StopReason{StopKind::ReachedOrigin, r.r_min,
                        "min r " + str(r.r_min) + " below " + str(rules.origin_eps)};
    if (r.ratio > rules.blowup_ratio)
      return StopReason{StopKind::RatioBlowup, r.ratio,
                        "ratio " + str(r.ratio) + " above " + str(rules.blowup_ratio) +
                            " with min r " + str(r.r_min)};
    if (cfg_.normalized && r.grad_ratio_max < rules.grad_ratio_tol &&
        r.ratio - 1.0 < rules.ratio_tol) {
      const auto& v = st.velocity;
      double motion = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i)
        motion = std::max(motion, std::abs(v[i]) / st.profile.values[i]);
      if (motion < rules.stationary_tol)
        return StopReason{StopKind::Converged, r.ratio - 1.0,
                          "ratio-1 " + str(r.ratio - 1.0) + ", grad ratio " + str(r.grad_ratio_max) +
                              ", relative speed " + str(motion)};
    }
    if (st.t >= cfg_.t_max)
      return StopReason{StopKind::TimeExhausted, st.t, "reached t_max " + str(cfg_.t_max)};
    return std::nullopt;
  };

  std::optional<StopReason> stop = check_stop(s, out.series.back());
  while (!stop) {
    double dt = stable_dt(s);
    bool hit = false;
    if (next_snap < schedule.size() && schedule[next_snap] - s.t <= dt) {
      dt = schedule[next_snap] - s.t;
      hit = true;
    }
    const bool last = s.t + dt >= cfg_.t_max;
    try {
      FlowState next = step(s, dt);
      if (hit) next.t = next.profile.time = schedule[next_snap];
      else if (last) next.t = next.profile.time = cfg_.t_max;
      s = std::move(next);
    } catch (const FlowError& e) {
      stop = e.reason();
      break;
    }
    ++out.steps;
    if (hit) {
      snapshot(s);
      ++next_snap;
    }
    const Record r = record(s, dt);
    stop = check_stop(s, r);
    if (hit || stop || out.steps % cfg_.record_every == 0) out.series.records.push_back(r);
  }

  if (out.snapshots.empty() || out.snapshots.back().time != s.t) snapshot(s);
  out.stop = *stop;
  out.final_state = std::move(s);
  return out;
}

std::pair<double, double> rescale_map(double t, double alpha, double beta) {
  const double k = alpha - beta - 1.0;
  if (k == 0.0) return {std::exp(t), t};
  const double base = 1.0 + k * t;
  if (!(base > 0.0))
    throw DomainError("rescale_map: 1 + (alpha - beta - 1) t = " + str(base) + " is not positive");
  return {std::pow(base, 1.0 / k), std::log(base) / k};
}

}  // namespace curvflow
