#include "curvflow/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "curvflow/errors.hpp"

namespace curvflow {

namespace {

// Relative one-sided pole slope above which a radial profile is rejected.
// Even profiles give O(h^4) here; odd parts give an h-independent value.
constexpr double kPoleSlopeTol = 5e-2;

std::size_t sz(int v) { return static_cast<std::size_t>(v); }

void fill_padded(int n, std::span<const double> f, std::vector<double>& padded) {
  const std::size_t m = f.size();
  padded.resize(m + 4);
  std::copy(f.begin(), f.end(), padded.begin() + 2);
  if (n == 1) {
    padded[0] = f[m - 2];
    padded[1] = f[m - 1];
    padded[m + 2] = f[0];
    padded[m + 3] = f[1];
  } else {
    padded[0] = f[2];
    padded[1] = f[1];
    padded[m + 2] = f[m - 2];
    padded[m + 3] = f[m - 3];
  }
}

void stencil(int n, int N, std::span<const double> f, std::vector<double>& padded,
             std::span<double> d1, std::span<double> d2, const simd::KernelTable& k) {
  const double h = grid_spacing(n, N);
  fill_padded(n, f, padded);
  k.stencil(padded.data(), f.size(), 1.0 / (12.0 * h), 1.0 / (12.0 * h * h), d1.data(), d2.data());
}

void require_kind(const Profile& p, ProfileKind kind, const char* op) {
  if (p.kind != kind)
    throw DomainError(std::string(op) + " expects a " + std::string(to_string(kind)) +
                      " profile");
}

[[noreturn]] void throw_nonconvex(const GeometryFields& g, const ConvexityViolation& v) {
  std::ostringstream msg;
  msg.precision(6);
  msg << to_string(g.source) << " profile is not convex: "
      << (g.source == ProfileKind::radial ? "curvature " : "principal radius ") << v.value
      << " at node " << v.node << " (theta=" << v.theta << ")";
  throw NonConvex(msg.str(), v.node, v.theta, v.value);
}

}  // namespace

void GeometryFields::eigen_tuple(int j, std::span<double> out) const {
  out[0] = lambda_profile[sz(j)];
  for (std::size_t i = 1; i < out.size(); ++i) out[i] = lambda_orbit[sz(j)];
}

double GeometryFields::lambda_min() const {
  double v = *std::min_element(lambda_profile.begin(), lambda_profile.end());
  if (!lambda_orbit.empty()) v = std::min(v, *std::min_element(lambda_orbit.begin(), lambda_orbit.end()));
  return v;
}

double GeometryFields::lambda_max() const {
  double v = *std::max_element(lambda_profile.begin(), lambda_profile.end());
  if (!lambda_orbit.empty()) v = std::max(v, *std::max_element(lambda_orbit.begin(), lambda_orbit.end()));
  return v;
}

void derivatives(int n, int N, std::span<const double> values, std::span<double> d1,
                 std::span<double> d2, const simd::KernelTable& k) {
  std::vector<double> padded;
  stencil(n, N, values, padded, d1, d2, k);
}

void compute_geometry(ProfileKind kind, int n, int N, std::span<const double> values,
                      GeometryFields& g, const simd::KernelTable& k) {
  const int m = node_count(n, N);
  if (g.n != n || g.N != N || g.cot.size() != sz(m)) {
    g.cot.assign(sz(m), 0.0);
    if (n >= 2)
      for (int j = 1; j < N; ++j) {
        const double t = grid_theta(n, N, j);
        g.cot[sz(j)] = std::cos(t) / std::sin(t);
      }
  }
  g.source = kind;
  g.n = n;
  g.N = N;
  for (auto* v : {&g.d1, &g.d2, &g.lambda_profile, &g.lambda_orbit, &g.radial, &g.support,
                  &g.grad_ratio, &g.star_margin, &g.metric})
    v->resize(sz(m));

  stencil(n, N, values, g.padded, g.d1, g.d2, k);

  if (kind == ProfileKind::radial) {
    g.tau_profile.clear();
    g.tau_orbit.clear();
    k.radial_pointwise(values.data(), g.d1.data(), g.d2.data(), g.cot.data(), sz(m),
                       {g.lambda_profile.data(), g.lambda_orbit.data(), g.support.data(),
                        g.grad_ratio.data(), g.star_margin.data(), g.metric.data()});
    std::copy(values.begin(), values.end(), g.radial.begin());
  } else {
    g.tau_profile.resize(sz(m));
    g.tau_orbit.resize(sz(m));
    k.support_pointwise(values.data(), g.d1.data(), g.d2.data(), g.cot.data(), sz(m),
                        {g.tau_profile.data(), g.tau_orbit.data(), g.lambda_profile.data(),
                         g.lambda_orbit.data(), g.radial.data(), g.grad_ratio.data(),
                         g.star_margin.data(), g.metric.data()});
    std::copy(values.begin(), values.end(), g.support.begin());
  }

  if (n == 1) {
    g.lambda_orbit.clear();
    g.tau_orbit.clear();
    return;
  }
  // Poles: r' cot(theta) -> r'' (and u' cot(theta) -> u''), which makes the
  // rotational curvature coincide with the meridian one.
  for (int j : {0, N}) {
    g.lambda_orbit[sz(j)] = g.lambda_profile[sz(j)];
    if (kind == ProfileKind::support) g.tau_orbit[sz(j)] = g.tau_profile[sz(j)];
  }
}

std::optional<ConvexityViolation> find_convexity_violation(const GeometryFields& g) {
  const bool radii = g.source == ProfileKind::support;
  const auto& a = radii ? g.tau_profile : g.lambda_profile;
  const auto& b = radii ? g.tau_orbit : g.lambda_orbit;
  for (const auto* v : {&a, &b})
    for (std::size_t j = 0; j < v->size(); ++j) {
      const double x = (*v)[j];
      if (!(x > 0.0) || !std::isfinite(x)) {
        const int node = static_cast<int>(j);
        return ConvexityViolation{node, grid_theta(g.n, g.N, node), x};
      }
    }
  return std::nullopt;
}

double pole_slope(const Profile& p) {
  if (p.n == 1) return 0.0;
  const auto& f = p.values;
  const double h = p.spacing();
  auto one_sided = [&](auto at) {
    const double s = (-25.0 * at(0) + 48.0 * at(1) - 36.0 * at(2) + 16.0 * at(3) - 3.0 * at(4)) /
                     (12.0 * h);
    return std::abs(s) / at(0);
  };
  const int N = p.N;
  return std::max(one_sided([&](int i) { return f[sz(i)]; }),
                  one_sided([&](int i) { return f[sz(N - i)]; }));
}

GeometryFields radial_to_geometry(const Profile& p) {
  require_kind(p, ProfileKind::radial, "radial_to_geometry");
  p.validate();
  if (const double s = pole_slope(p); s > kPoleSlopeTol) {
    std::ostringstream msg;
    msg << "radial profile is not smooth at a pole: relative slope " << s;
    throw PoleIrregular(msg.str());
  }
  GeometryFields g;
  compute_geometry(ProfileKind::radial, p.n, p.N, p.values, g);
  if (auto v = find_convexity_violation(g)) throw_nonconvex(g, *v);
  return g;
}

GeometryFields support_to_geometry(const Profile& p) {
  require_kind(p, ProfileKind::support, "support_to_geometry");
  p.validate();
  GeometryFields g;
  compute_geometry(ProfileKind::support, p.n, p.N, p.values, g);
  if (auto v = find_convexity_violation(g)) throw_nonconvex(g, *v);
  return g;
}

GeometryFields profile_geometry(const Profile& p) {
  return p.kind == ProfileKind::radial ? radial_to_geometry(p) : support_to_geometry(p);
}

namespace {

// Full circle of 2N (n >= 2, mirrored) or N (n = 1) samples of a profile.
std::vector<double> full_circle(const Profile& p) {
  if (p.n == 1) return p.values;
  std::vector<double> v(sz(2 * p.N));
  for (int j = 0; j < 2 * p.N; ++j) v[sz(j)] = p.values[sz(j <= p.N ? j : 2 * p.N - j)];
  return v;
}

int wrap(int j, int m) { return ((j % m) + m) % m; }

// Lagrange interpolation through equispaced nodes at integer offsets
// first..first+5, evaluated at offset s.
double lagrange6(const double* y, int first, double s) {
  double acc = 0.0;
  for (int a = 0; a < 6; ++a) {
    double w = 1.0;
    for (int b = 0; b < 6; ++b)
      if (b != a) w *= (s - (first + b)) / static_cast<double>(a - b);
    acc += w * y[a];
  }
  return acc;
}

}  // namespace

Profile radial_to_support_profile(const Profile& p) {
  radial_to_geometry(p);
  const std::vector<double> r = full_circle(p);
  const int m = static_cast<int>(r.size());
  const double h = p.spacing();
  std::vector<double> x(sz(m)), y(sz(m));
  for (int j = 0; j < m; ++j) {
    x[sz(j)] = r[sz(j)] * std::cos(j * h);
    y[sz(j)] = r[sz(j)] * std::sin(j * h);
  }

  Profile out{ProfileKind::support, p.n, p.N, std::vector<double>(p.values.size()), p.time};
  for (int k = 0; k < p.nodes(); ++k) {
    const double th = p.theta(k);
    const double c = std::cos(th), s = std::sin(th);
    int best = 0;
    double gbest = -1.0;
    for (int j = 0; j < m; ++j) {
      const double g = x[sz(j)] * c + y[sz(j)] * s;
      if (g > gbest) gbest = g, best = j;
    }
    auto g_at = [&](int j) {
      const int w = wrap(j, m);
      return x[sz(w)] * c + y[sz(w)] * s;
    };
    const double gm = g_at(best - 1), gp = g_at(best + 1);
    const double denom = gm - 2.0 * gbest + gp;
    const double delta = denom < 0.0 ? 0.5 * (gm - gp) / denom : 0.0;
    const double quad = gbest - 0.25 * (gm - gp) * delta;

    // Polish: maximize r_I(t) cos(t - th) on the local interpolant, with
    // t = (best + s) h and s in [-1, 1].
    const int first = delta >= 0.0 ? -2 : -3;
    double ry[6];
    for (int a = 0; a < 6; ++a) ry[a] = r[sz(wrap(best + first + a, m))];
    auto G = [&](double sv) {
      return lagrange6(ry, first, sv) * std::cos((best + sv) * h - th);
    };
    constexpr double inv_phi = 0.6180339887498949;
    double lo = -1.0, hi = 1.0;
    double a1 = hi - inv_phi * (hi - lo), a2 = lo + inv_phi * (hi - lo);
    double g1 = G(a1), g2 = G(a2);
    for (int it = 0; it < 60; ++it) {
      if (g1 < g2) {
        lo = a1, a1 = a2, g1 = g2;
        a2 = lo + inv_phi * (hi - lo), g2 = G(a2);
      } else {
        hi = a2, a2 = a1, g2 = g1;
        a1 = hi - inv_phi * (hi - lo), g1 = G(a1);
      }
    }
    out.values[sz(k)] = std::isfinite(quad) ? G(0.5 * (lo + hi)) : gbest;
  }
  return out;
}

Profile support_to_radial_profile(const Profile& p) {
  const GeometryFields g = support_to_geometry(p);
  const int M = p.n == 1 ? p.N : 2 * p.N;
  const double two_pi = 2.0 * std::numbers::pi;

  std::vector<double> psi(sz(M)), rad(sz(M));
  for (int j = 0; j < M; ++j) {
    if (p.n == 1 || j <= p.N) {
      psi[sz(j)] = p.theta(j) + std::atan2(g.d1[sz(j)], p.values[sz(j)]);
      rad[sz(j)] = g.radial[sz(j)];
    } else {
      psi[sz(j)] = two_pi - psi[sz(2 * p.N - j)];
      rad[sz(j)] = rad[sz(2 * p.N - j)];
    }
  }

  // Extended, strictly increasing copy with three wrapped nodes per side.
  constexpr int pad = 3;
  std::vector<double> ps(sz(M + 2 * pad)), rs(sz(M + 2 * pad));
  for (int i = -pad; i < M + pad; ++i) {
    const int w = wrap(i, M);
    const double shift = two_pi * static_cast<double>((i - w) / M);
    ps[sz(i + pad)] = psi[sz(w)] + shift;
    rs[sz(i + pad)] = rad[sz(w)];
  }

  Profile out{ProfileKind::radial, p.n, p.N, std::vector<double>(p.values.size()), p.time};
  for (int k = 0; k < p.nodes(); ++k) {
    double t = p.theta(k);
    if (t < ps[sz(pad)]) t += two_pi;
    auto it = std::upper_bound(ps.begin() + 1, ps.end() - 2, t);
    int i = static_cast<int>(it - ps.begin()) - 1;
    i = std::clamp(i, 1, M + 2 * pad - 3);
    double acc = 0.0;
    for (int a = i - 1; a <= i + 2; ++a) {
      double w = 1.0;
      for (int b = i - 1; b <= i + 2; ++b)
        if (b != a) w *= (t - ps[sz(b)]) / (ps[sz(a)] - ps[sz(b)]);
      acc += w * rs[sz(a)];
    }
    out.values[sz(k)] = acc;
  }
  return out;
}

namespace {

// Periodic 4-point Lagrange interpolation of equispaced samples at angle t.
double periodic_cubic(const std::vector<double>& f, double h, double t) {
  const int m = static_cast<int>(f.size());
  const double x = t / h;
  const int i = static_cast<int>(std::floor(x));
  const double s = x - i;
  const double w[4] = {-s * (s - 1.0) * (s - 2.0) / 6.0, (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0,
                       -(s + 1.0) * s * (s - 2.0) / 2.0, (s + 1.0) * s * (s - 1.0) / 6.0};
  double acc = 0.0;
  for (int a = 0; a < 4; ++a) acc += w[a] * f[sz(wrap(i - 1 + a, m))];
  return acc;
}

std::vector<double> mirrored(const std::vector<double>& v, int n, int N) {
  if (n == 1) return v;
  std::vector<double> out(sz(2 * N));
  for (int j = 0; j < 2 * N; ++j) out[sz(j)] = v[sz(j <= N ? j : 2 * N - j)];
  return out;
}

}  // namespace

double inverse_curvature_defect(const Profile& radial) {
  const GeometryFields rg = radial_to_geometry(radial);
  const Profile sup = radial_to_support_profile(radial);
  const GeometryFields sg = support_to_geometry(sup);
  const double h = radial.spacing();
  const auto lp = mirrored(rg.lambda_profile, radial.n, radial.N);
  const auto lo = radial.n == 1 ? std::vector<double>{} : mirrored(rg.lambda_orbit, radial.n, radial.N);
  double worst = 0.0;
  for (int k = 0; k < sup.nodes(); ++k) {
    double psi = sup.theta(k) + std::atan2(sg.d1[sz(k)], sup.values[sz(k)]);
    psi = std::fmod(psi + 4.0 * std::numbers::pi, 2.0 * std::numbers::pi);
    worst = std::max(worst, std::abs(sg.tau_profile[sz(k)] * periodic_cubic(lp, h, psi) - 1.0));
    if (!lo.empty())
      worst = std::max(worst, std::abs(sg.tau_orbit[sz(k)] * periodic_cubic(lo, h, psi) - 1.0));
  }
  return worst;
}

double ratio(const Profile& p) {
  const Profile r = p.kind == ProfileKind::radial ? p : support_to_radial_profile(p);
  const auto [lo, hi] = std::minmax_element(r.values.begin(), r.values.end());
  return *hi / *lo;
}

double star_shape_margin(const Profile& p) {
  p.validate();
  GeometryFields g;
  compute_geometry(p.kind, p.n, p.N, p.values, g);
  return *std::min_element(g.star_margin.begin(), g.star_margin.end());
}

}  // namespace curvflow
