#include "curvflow/scenarios.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "curvflow/errors.hpp"
#include "curvflow/geometry.hpp"

namespace curvflow {

namespace {

std::string num(double v) {
  std::ostringstream o;
  o.precision(10);
  o << v;
  return o.str();
}

// Cyclic Jacobi rotations on a dense symmetric matrix (row-major, size m).
std::vector<double> symmetric_eigenvalues(std::vector<double> a, std::size_t m) {
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < m; ++p)
      for (std::size_t q = p + 1; q < m; ++q) off += a[p * m + q] * a[p * m + q];
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < m; ++p)
      for (std::size_t q = p + 1; q < m; ++q) {
        const double apq = a[p * m + q];
        if (apq == 0.0) continue;
        const double theta = (a[q * m + q] - a[p * m + p]) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (std::size_t k = 0; k < m; ++k) {
          const double akp = a[k * m + p], akq = a[k * m + q];
          a[k * m + p] = c * akp - s * akq;
          a[k * m + q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < m; ++k) {
          const double apk = a[p * m + k], aqk = a[q * m + k];
          a[p * m + k] = c * apk - s * aqk;
          a[q * m + k] = s * apk + c * aqk;
        }
      }
  }
  std::vector<double> ev(m);
  for (std::size_t i = 0; i < m; ++i) ev[i] = a[i * m + i];
  std::sort(ev.begin(), ev.end());
  return ev;
}

}  // namespace

double barrier_radius(double t, double a, double q) {
  if (q == 0.0) throw DomainError("barrier_radius: q = 0 (alpha = beta + 1) has no barrier form");
  if (!(a > 0.0)) throw DomainError("barrier_radius: initial radius must be positive");
  const double base = 1.0 - (1.0 - std::pow(a, q)) * std::exp(q * t);
  if (!(base > 0.0))
    throw DomainError("barrier_radius: 1 - (1 - a^q) e^{qt} = " + num(base) + " at t=" + num(t) +
                      " (sphere has reached the origin)");
  return std::pow(base, 1.0 / q);
}

double CounterexampleParams::seam() const { return std::pow(std::abs(t_param), theta_exp); }

void CounterexampleParams::validate() const {
  if (!(gamma_gap > 0.0)) throw DomainError("counterexample: gamma_gap must be > 0 (alpha < beta + 1)");
  if (!(beta >= 1.0)) throw DomainError("counterexample: beta must be >= 1");
  if (!(theta_exp > 1.0 / gamma_gap))
    throw DomainError("counterexample: theta_exp must exceed 1/gamma_gap = " + num(1.0 / gamma_gap));
  if (!(t_param > -1.0 && t_param < 0.0)) throw DomainError("counterexample: t_param must lie in (-1, 0)");
}

CounterexamplePoint counterexample_profile(const CounterexampleParams& p, double rho) {
  p.validate();
  if (!(rho >= 0.0 && rho <= 1.0)) throw DomainError("counterexample: rho = " + num(rho) + " outside [0, 1]");
  const double s = p.sigma();
  const double at = std::abs(p.t_param);
  const double th = p.theta_exp;
  CounterexamplePoint out;
  out.inner = rho < p.seam();
  if (out.inner) {
    const double c = std::pow(at, (s - 1.0) * th);
    const double w = 1.0 + 4.0 * c * c * rho * rho;
    out.height = -std::pow(at, th) + c * rho * rho;
    out.slope = 2.0 * c * rho;
    out.second = 2.0 * c;
    out.lambda1 = 2.0 * c / std::pow(w, 1.5);
    out.lambda_a = 2.0 * c / std::sqrt(w);
  } else {
    const double w = 1.0 + 4.0 * std::pow(rho, 2.0 * s);
    out.height = -std::pow(at, th) - (1.0 - s) / (1.0 + s) * std::pow(at, (1.0 + s) * th) +
                 2.0 / (1.0 + s) * std::pow(rho, 1.0 + s);
    out.slope = 2.0 * std::pow(rho, s);
    out.second = 2.0 * s * std::pow(rho, s - 1.0);
    out.lambda1 = 2.0 * s * std::pow(rho, s - 1.0) / std::pow(w, 1.5);
    out.lambda_a = 2.0 * std::pow(rho, s - 1.0) / std::sqrt(w);
  }
  return out;
}

std::vector<double> graph_curvatures(const std::function<double(std::span<const double>)>& f,
                                     std::span<const double> x, double step) {
  const std::size_t m = x.size();
  std::vector<double> y(x.begin(), x.end());
  auto at = [&](std::size_t i, double di, std::size_t j, double dj) {
    y[i] += di;
    y[j] += dj;
    const double v = f(y);
    y[i] -= di;
    y[j] -= dj;
    return v;
  };
  const double h = step;
  std::vector<double> grad(m), hess(m * m);
  for (std::size_t i = 0; i < m; ++i) {
    grad[i] = ((at(i, -2 * h, i, 0) - at(i, 2 * h, i, 0)) + 8.0 * (at(i, h, i, 0) - at(i, -h, i, 0))) / (12.0 * h);
    hess[i * m + i] = (16.0 * (at(i, h, i, 0) + at(i, -h, i, 0)) - (at(i, 2 * h, i, 0) + at(i, -2 * h, i, 0)) -
                       30.0 * f(y)) / (12.0 * h * h);
  }
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) {
      auto cross = [&](double d) {
        return at(i, d, j, d) - at(i, d, j, -d) - at(i, -d, j, d) + at(i, -d, j, -d);
      };
      const double v = (16.0 * cross(h) - cross(2 * h)) / (48.0 * h * h);
      hess[i * m + j] = hess[j * m + i] = v;
    }
  // Shape operator g^{-1} h / W with g = I + p p^T, W = sqrt(1 + |p|^2); its
  // eigenvalues are those of the symmetric g^{-1/2} h g^{-1/2} / W, where
  // g^{-1/2} = I - c p p^T with c = (1 - 1/W) / |p|^2.
  double p2 = 0.0;
  for (double g : grad) p2 += g * g;
  const double W = std::sqrt(1.0 + p2);
  const double c = p2 > 0.0 ? (1.0 - 1.0 / W) / p2 : 0.5;
  std::vector<double> s(m * m), t(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) s[i * m + j] = (i == j ? 1.0 : 0.0) - c * grad[i] * grad[j];
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t k = 0; k < m; ++k) t[i * m + j] += s[i * m + k] * hess[k * m + j];
  std::vector<double> a(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      for (std::size_t k = 0; k < m; ++k) a[i * m + j] += t[i * m + k] * s[k * m + j];
      a[i * m + j] /= W;
    }
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) a[i * m + j] = a[j * m + i] = 0.5 * (a[i * m + j] + a[j * m + i]);
  return symmetric_eigenvalues(std::move(a), m);
}

Profile eccentric_body(int n, int N, double radius, double offset) {
  if (!(radius > 0.0)) throw DomainError("eccentric_body: radius must be positive");
  if (!(offset >= 0.0 && offset < radius))
    throw DomainError("eccentric_body: offset " + num(offset) + " must lie in [0, radius " + num(radius) +
                      ") so the origin is inside");
  return Profile::sample(ProfileKind::radial, n, N, [=](double t) {
    const double s = std::sin(t);
    return offset * std::cos(t) + std::sqrt(radius * radius - offset * offset * s * s);
  });
}

Profile ellipsoid(ProfileKind kind, int n, int N, double axis, double equatorial) {
  if (!(axis > 0.0 && equatorial > 0.0)) throw DomainError("ellipsoid: semi-axes must be positive");
  const double a = axis, b = equatorial;
  if (kind == ProfileKind::radial)
    return Profile::sample(kind, n, N, [=](double t) {
      const double c = std::cos(t), s = std::sin(t);
      return a * b / std::sqrt(b * b * c * c + a * a * s * s);
    });
  return Profile::sample(kind, n, N, [=](double t) {
    const double c = std::cos(t), s = std::sin(t);
    return std::sqrt(a * a * c * c + b * b * s * s);
  });
}

std::size_t ComparisonResult::violations() const {
  return static_cast<std::size_t>(std::count(nested.begin(), nested.end(), false));
}

ComparisonResult comparison_check(const FlowConfig& a, const RunResult& ra, const FlowConfig& b,
                                  const RunResult& rb, double slack) {
  auto mismatch = [](const std::string& what) { throw ConfigMismatch("comparison_check: " + what + " differ"); };
  if (a.alpha != b.alpha || a.beta != b.beta) mismatch("exponents");
  if (a.f_spec != b.f_spec) mismatch("curvature functions");
  if (a.speed_kind != b.speed_kind) mismatch("speed weights");
  if (a.normalized != b.normalized) mismatch("normalizations");
  if (a.n != b.n || a.N != b.N) mismatch("grids");

  auto support = [](const Profile& p) {
    return p.kind == ProfileKind::support ? p.values : radial_to_support_profile(p).values;
  };
  ComparisonResult out;
  std::size_t j = 0;
  for (const auto& pa : ra.snapshots) {
    while (j < rb.snapshots.size() && rb.snapshots[j].time < pa.time) ++j;
    if (j == rb.snapshots.size()) break;
    if (rb.snapshots[j].time != pa.time) continue;
    const auto ua = support(pa), ub = support(rb.snapshots[j]);
    double gap = ub[0] - ua[0];
    for (std::size_t i = 1; i < ua.size(); ++i) gap = std::min(gap, ub[i] - ua[i]);
    const bool ok = gap >= -slack;
    out.times.push_back(pa.time);
    out.nested.push_back(ok);
    out.min_gap.push_back(gap);
    if (!ok && !out.first_violation) out.first_violation = pa.time;
  }
  return out;
}

std::vector<std::string_view> preset_names() {
  return {"thm1-radial",  "thm1-support", "thm1-critical-radial", "thm4-gauss-blend",
          "counterexample", "sphere-oracle", "barrier-oracle"};
}

Profile make_initial(const InitialSpec& spec, const FlowConfig& cfg) {
  try {
    if (spec.shape == "sphere") {
      if (!(spec.radius > 0.0)) throw DomainError("radius must be positive");
      const double r = spec.radius;
      return Profile::sample(cfg.parametrization, cfg.n, cfg.N, [r](double) { return r; });
    }
    if (spec.shape == "ellipsoid") return ellipsoid(cfg.parametrization, cfg.n, cfg.N, spec.axis, spec.equatorial);
    if (spec.shape == "eccentric") return eccentric_body(cfg.n, cfg.N, spec.radius, spec.offset);
  } catch (const DomainError& e) {
    throw ConfigError("initial." + spec.shape + ": " + e.what());
  }
  if (spec.shape == "file") {
    Profile p = read_snapshot_file(spec.file);
    if (p.n != cfg.n || p.N != cfg.N)
      throw ConfigError("initial.file: snapshot grid (n=" + std::to_string(p.n) + ", N=" + std::to_string(p.N) +
                        ") differs from grid.n/grid.N");
    return p;
  }
  throw ConfigError("initial.shape: unknown shape '" + spec.shape + "' (sphere, ellipsoid, eccentric, file)");
}

Preset preset(std::string_view name) {
  Preset p;
  p.name = std::string(name);
  FlowConfig& c = p.config;
  c.N = 256;
  c.t_max = 100.0;
  c.record_every = 100;
  if (name == "thm1-radial" || name == "thm1-critical-radial") {
    c.alpha = name == "thm1-radial" ? 3.0 : 2.0;
    c.beta = 1.0;
    c.n = 2;
    c.speed_kind = WeightKind::radial;
    c.parametrization = ProfileKind::radial;
    p.initial_spec.shape = "ellipsoid";
    p.description = "normalized r^alpha F^beta flow of a prolate ellipsoid (ratio 2), alpha = " +
                    num(c.alpha) + ", beta = 1";
  } else if (name == "thm1-support") {
    c.alpha = 3.0;
    c.beta = 1.5;
    c.n = 2;
    c.speed_kind = WeightKind::support;
    c.parametrization = ProfileKind::support;
    c.safety = 0.3;
    p.initial_spec.shape = "ellipsoid";
    p.description = "normalized u^alpha F^beta flow of a prolate ellipsoid (ratio 2), alpha = 3, beta = 1.5";
  } else if (name == "thm4-gauss-blend") {
    c.alpha = 2.0;
    c.beta = 1.0;
    c.n = 2;
    c.f_spec = "blend(gauss-root,arithmetic-mean,0.5)";
    c.speed_kind = WeightKind::support;
    c.parametrization = ProfileKind::support;
    p.initial_spec.shape = "ellipsoid";
    p.description = "normalized u^alpha F^beta flow, alpha = beta + 1 = 2, F = K^(1/2n) H^(1/2) blend";
  } else if (name == "counterexample") {
    c.alpha = 0.0;
    c.beta = 1.0;
    c.n = 1;
    c.normalized = false;
    c.record_every = 10;
    p.initial_spec.shape = "eccentric";
    p.initial_spec.offset = 0.9;
    p.description = "unnormalized curvature flow (alpha = 0) of a circle of radius 1 offset 0.9 from the origin";
  } else if (name == "sphere-oracle") {
    c.alpha = 2.0;
    c.beta = 1.0;
    c.n = 1;
    c.normalized = false;
    c.t_max = 8.0;
    c.snapshot_times = {0.5, 1.0, 2.0};
    p.initial_spec.shape = "sphere";
    p.description = "unnormalized alpha = beta + 1 flow of the unit circle: r(t) = exp(-t)";
  } else if (name == "barrier-oracle") {
    c.alpha = 3.0;
    c.beta = 1.0;
    c.n = 2;
    c.snapshot_times = {0.5, 1.0, 2.0};
    p.initial_spec.shape = "sphere";
    p.initial_spec.radius = 0.5;
    p.description = "normalized alpha = 3, beta = 1 flow of the sphere of radius 0.5: 1/r - 1 = e^{-t}";
  } else {
    std::string known;
    for (auto k : preset_names()) known += (known.empty() ? "" : ", ") + std::string(k);
    throw UnknownPreset("unknown preset '" + std::string(name) + "' (known: " + known + ")");
  }
  p.initial = make_initial(p.initial_spec, c);
  return p;
}

}  // namespace curvflow
