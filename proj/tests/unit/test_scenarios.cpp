#include <doctest.h>

#include <cmath>
#include <numbers>

#include "curvflow/errors.hpp"
#include "curvflow/geometry.hpp"
#include "curvflow/scenarios.hpp"

using namespace curvflow;

TEST_CASE("barrier_radius") {
  CHECK(barrier_radius(0.0, 0.7, -1.0) == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(barrier_radius(0.0, 0.7, 0.5) == doctest::Approx(0.7).epsilon(1e-15));
  CHECK_THROWS_AS(barrier_radius(std::log(2.0), 0.5, 1.0), DomainError);
  CHECK_THROWS_AS(barrier_radius(1.0, 0.5, 0.0), DomainError);
  CHECK(std::abs(barrier_radius(5.0, 0.5, -1.0) - 1.0) <= std::exp(-5.0));
  CHECK(barrier_radius(60.0, 0.5, -1.0) == doctest::Approx(1.0).epsilon(1e-15));

  // r' = -r^{alpha - beta} + r with alpha - beta = 1 - q, 4th-order differences.
  for (double q : {-1.0, -0.5, 0.5}) {
    for (double t : {0.1, 0.4, 0.8}) {
      const double h = 1e-3;
      auto r = [&](double s) { return barrier_radius(s, 0.8, q); };
      const double d = ((r(t - 2 * h) - r(t + 2 * h)) + 8.0 * (r(t + h) - r(t - h))) / (12.0 * h);
      CHECK(std::abs(d - (-std::pow(r(t), 1.0 - q) + r(t))) <= 1e-10);
    }
  }
}

TEST_CASE("counterexample profile: parameters") {
  CounterexampleParams p;
  CHECK(p.sigma() == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(p.seam() == doctest::Approx(0.0625).epsilon(1e-15));
  CHECK_NOTHROW(p.validate());
  auto bad = p;
  bad.theta_exp = 1.5;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = p;
  bad.t_param = 0.2;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = p;
  bad.gamma_gap = -0.5;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  CHECK_THROWS_AS(counterexample_profile(p, 1.5), DomainError);
  CHECK_THROWS_AS(counterexample_profile(p, -0.1), DomainError);
}

TEST_CASE("counterexample profile: seam and convexity") {
  for (double t : {-0.5, -0.8, -0.2}) {
    CounterexampleParams p;
    p.t_param = t;
    p.theta_exp = 3.0;
    const double s = p.sigma();
    const double seam = p.seam();
    // Evaluate both branch formulas at the seam directly.
    const double at = std::abs(t);
    const double c = std::pow(at, (s - 1.0) * p.theta_exp);
    const double inner_h = -std::pow(at, p.theta_exp) + c * seam * seam;
    const double outer_h = -std::pow(at, p.theta_exp) - (1 - s) / (1 + s) * std::pow(at, (1 + s) * p.theta_exp) +
                           2 / (1 + s) * std::pow(seam, 1 + s);
    const double forced = -std::pow(at, p.theta_exp) + std::pow(at, (1 + s) * p.theta_exp);
    CHECK(std::abs(inner_h - forced) <= 1e-12);
    CHECK(std::abs(outer_h - forced) <= 1e-12);
    CHECK(std::abs(2.0 * c * seam - 2.0 * std::pow(seam, s)) <= 1e-12);

    const auto out = counterexample_profile(p, seam);
    CHECK_FALSE(out.inner);
    CHECK(std::abs(out.height - forced) <= 1e-12);
    const auto in = counterexample_profile(p, std::nextafter(seam, 0.0));
    CHECK(in.inner);
    CHECK(std::abs(in.height - out.height) <= 1e-12);
    CHECK(std::abs(in.slope - out.slope) <= 1e-12);

    for (int i = 0; i <= 50; ++i) {
      const auto pt = counterexample_profile(p, i / 50.0);
      CHECK(pt.second > 0.0);
      CHECK(pt.lambda1 > 0.0);
      CHECK(pt.lambda_a > 0.0);
    }
  }
}

TEST_CASE("graph_curvatures") {
  SUBCASE("paraboloid at the origin and on a sphere cap") {
    auto para = [](std::span<const double> x) { return x[0] * x[0] + 3.0 * x[1] * x[1]; };
    const std::vector<double> o = {0.0, 0.0};
    const auto k = graph_curvatures(para, o);
    CHECK(k[0] == doctest::Approx(2.0).epsilon(1e-8));
    CHECK(k[1] == doctest::Approx(6.0).epsilon(1e-8));
    auto cap = [](std::span<const double> x) { return -std::sqrt(4.0 - x[0] * x[0] - x[1] * x[1] - x[2] * x[2]); };
    const std::vector<double> x = {0.3, -0.5, 0.7};
    for (double v : graph_curvatures(cap, x)) CHECK(std::abs(v - 0.5) <= 1e-7);
  }
  SUBCASE("matches the closed-form curvatures of the profile") {
    CounterexampleParams p;
    const double seam = p.seam();
    auto phi = [&](std::span<const double> x) { return counterexample_profile(p, std::hypot(x[0], x[1])).height; };
    const double dir = 0.3;
    for (int branch = 0; branch < 2; ++branch) {
      const double lo = branch == 0 ? 0.05 * seam : seam * 1.2;
      const double hi = branch == 0 ? 0.95 * seam : 1.0 - 1e-3;
      for (int i = 0; i < 20; ++i) {
        const double rho = lo + (hi - lo) * i / 19.0;
        const std::vector<double> x = {rho * std::cos(dir), rho * std::sin(dir)};
        const auto k = graph_curvatures(phi, x);
        const auto ref = counterexample_profile(p, rho);
        const double a = std::min(ref.lambda1, ref.lambda_a), b = std::max(ref.lambda1, ref.lambda_a);
        CHECK(std::abs(k[0] - a) <= 1e-6);
        CHECK(std::abs(k[1] - b) <= 1e-6);
      }
    }
  }
}

TEST_CASE("eccentric_body") {
  const auto round = eccentric_body(2, 64, 1.5, 0.0);
  for (double v : round.values) CHECK(v == doctest::Approx(1.5).epsilon(1e-15));
  const auto e = eccentric_body(2, 64, 1.0, 0.3);
  CHECK(e.values.front() == doctest::Approx(1.3).epsilon(1e-15));
  CHECK(e.values.back() == doctest::Approx(0.7).epsilon(1e-14));
  CHECK_THROWS_AS(eccentric_body(2, 64, 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(eccentric_body(2, 64, 1.0, -0.1), DomainError);
  for (int n : {1, 2}) {
    const auto g = radial_to_geometry(eccentric_body(n, 256, 2.0, 0.6));
    for (std::size_t j = 0; j < g.lambda_profile.size(); ++j) CHECK(std::abs(g.lambda_profile[j] - 0.5) <= 1e-6);
    for (std::size_t j = 0; j < g.lambda_orbit.size(); ++j) CHECK(std::abs(g.lambda_orbit[j] - 0.5) <= 1e-6);
  }
}

TEST_CASE("ellipsoid in both pictures") {
  const auto r = ellipsoid(ProfileKind::radial, 2, 128, 2.0, 1.0);
  const auto u = ellipsoid(ProfileKind::support, 2, 128, 2.0, 1.0);
  CHECK(r.values.front() == doctest::Approx(2.0));
  CHECK(r.values[64] == doctest::Approx(1.0));
  const auto converted = radial_to_support_profile(r);
  for (std::size_t j = 0; j < u.values.size(); ++j) CHECK(std::abs(converted.values[j] - u.values[j]) <= 1e-7);
  CHECK(ratio(u) == doctest::Approx(2.0).epsilon(1e-6));
  CHECK_THROWS_AS(ellipsoid(ProfileKind::radial, 2, 64, -1.0, 1.0), DomainError);
}

TEST_CASE("comparison_check") {
  auto cfg = [](double alpha, int n) {
    FlowConfig c;
    c.alpha = alpha;
    c.beta = 1.0;
    c.n = n;
    c.N = 64;
    c.normalized = false;
    c.snapshot_interval = 0.05;
    c.t_max = 0.5;
    c.record_every = 50;
    return c;
  };
  auto sphere = [](int n, double rho) { return Profile::sample(ProfileKind::radial, n, 64, [rho](double) { return rho; }); };

  SUBCASE("concentric spheres") {
    const auto c = cfg(2.0, 2);
    const auto a = run(c, sphere(2, 1.0)), b = run(c, sphere(2, 2.0));
    const auto res = comparison_check(c, a, c, b);
    CHECK(res.times.size() == 11);
    CHECK(res.all_nested());
    CHECK(res.violations() == 0);
    for (std::size_t i = 0; i < res.times.size(); ++i)
      CHECK(res.min_gap[i] == doctest::Approx(std::exp(-res.times[i])).epsilon(1e-6));
  }
  SUBCASE("identical data") {
    const auto c = cfg(2.0, 1);
    const auto a = run(c, ellipsoid(ProfileKind::radial, 1, 64, 1.5, 1.0));
    const auto res = comparison_check(c, a, c, a);
    CHECK(res.all_nested());
    for (double g : res.min_gap) CHECK(g == 0.0);
  }
  SUBCASE("eccentric body inside a larger circle") {
    auto c = cfg(0.0, 1);
    c.t_max = 2.0;
    const auto a = run(c, eccentric_body(1, 64, 1.0, 0.5));
    const auto b = run(c, sphere(1, 2.0));
    const auto res = comparison_check(c, a, c, b);
    CHECK(res.times.size() >= 2);
    CHECK(res.all_nested());
    CHECK(res.times.back() <= a.final_state.t);
  }
  SUBCASE("a body starting outside is reported") {
    const auto c = cfg(2.0, 1);
    const auto a = run(c, sphere(1, 2.0)), b = run(c, sphere(1, 1.0));
    const auto res = comparison_check(c, a, c, b);
    REQUIRE(res.first_violation);
    CHECK(*res.first_violation == 0.0);
  }
  SUBCASE("mismatched configs") {
    const auto c = cfg(2.0, 1);
    auto d = c;
    d.alpha = 3.0;
    const auto a = run(c, sphere(1, 1.0));
    CHECK_THROWS_AS(comparison_check(c, a, d, a), ConfigMismatch);
    d = c;
    d.f_spec = "power-mean(2)";
    CHECK_THROWS_AS(comparison_check(c, a, d, a), ConfigMismatch);
  }
}

TEST_CASE("presets") {
  for (auto name : preset_names()) {
    const auto p = preset(name);
    CHECK(p.name == name);
    CHECK_NOTHROW(p.config.validate());
    CHECK(p.initial.n == p.config.n);
    CHECK(p.initial.N == p.config.N);
    CHECK_FALSE(p.description.empty());
  }
  const auto blend = preset("thm4-gauss-blend");
  CHECK(blend.config.alpha == blend.config.beta + 1.0);
  CHECK(blend.config.speed_kind == WeightKind::support);
  const auto ce = preset("counterexample");
  CHECK(ce.config.alpha < ce.config.beta + 1.0);
  CHECK_FALSE(ce.config.normalized);
  CHECK(ratio(ce.initial) == doctest::Approx(19.0).epsilon(1e-12));
  const auto r = preset("thm1-radial");
  CHECK(ratio(r.initial) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(preset("thm1-critical-radial").config.alpha == 2.0);
  CHECK(preset("thm1-support").config.beta == 1.5);
  CHECK_THROWS_AS(preset("thm9"), UnknownPreset);
}

TEST_CASE("make_initial") {
  FlowConfig c;
  c.n = 2;
  c.N = 32;
  InitialSpec s;
  s.shape = "ellipsoid";
  c.parametrization = ProfileKind::support;
  CHECK(make_initial(s, c).kind == ProfileKind::support);
  s.shape = "eccentric";
  s.offset = 0.4;
  CHECK(make_initial(s, c).kind == ProfileKind::radial);
  s.offset = 2.0;
  CHECK_THROWS_AS(make_initial(s, c), ConfigError);
  s.shape = "torus";
  CHECK_THROWS_AS(make_initial(s, c), ConfigError);
}
