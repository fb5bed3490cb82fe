#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "curvflow/errors.hpp"
#include "curvflow/flow.hpp"

using namespace curvflow;

namespace {

Profile sphere(ProfileKind kind, int n, int N, double rho) {
  return Profile::sample(kind, n, N, [rho](double) { return rho; });
}

FlowConfig sphere_config(double alpha, double beta, int n, bool normalized) {
  FlowConfig c;
  c.alpha = alpha;
  c.beta = beta;
  c.n = n;
  c.N = 64;
  c.normalized = normalized;
  return c;
}

double spread(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi - *lo;
}

}  // namespace

TEST_CASE("rhs on spheres") {
  const double rho = 0.7;
  for (int n : {1, 2, 3}) {
    for (auto param : {ProfileKind::radial, ProfileKind::support}) {
      for (auto weight : {WeightKind::radial, WeightKind::support}) {
        auto c = sphere_config(3.0, 1.5, n, true);
        c.parametrization = param;
        c.speed_kind = weight;
        const Flow flow(c);
        const auto v = flow.rhs(flow.make_state(sphere(param, n, 64, rho)));
        const double expect = -std::pow(rho, 1.5) + rho;
        for (double x : v) CHECK(std::abs(x - expect) <= 1e-12);
      }
    }
    auto c = sphere_config(2.0, 1.0, n, false);
    const Flow flow(c);
    for (double x : flow.rhs(flow.make_state(sphere(ProfileKind::radial, n, 64, rho))))
      CHECK(std::abs(x + rho) <= 1e-12);
  }
}

TEST_CASE("rhs with other curvature functions on spheres") {
  for (const char* f : {"gauss-root", "power-mean(3)", "ek-root(2)", "blend(gauss-root,arithmetic-mean,0.5)"}) {
    auto c = sphere_config(2.0, 1.0, 3, false);
    c.f_spec = f;
    for (auto param : {ProfileKind::radial, ProfileKind::support}) {
      c.parametrization = param;
      const Flow flow(c);
      for (double x : flow.rhs(flow.make_state(sphere(param, 3, 64, 1.3))))
        CHECK(std::abs(x + 1.3) <= 1e-12);
    }
  }
}

TEST_CASE("stable_dt") {
  SUBCASE("sphere, n = 2: D_max = beta / n") {
    auto c = sphere_config(2.0, 1.0, 2, true);
    const Flow flow(c);
    const double h = grid_spacing(2, 64);
    const double dt = flow.stable_dt(flow.make_state(sphere(ProfileKind::radial, 2, 64, 1.0)));
    CHECK(dt == doctest::Approx(0.2 * h * h / 0.5).epsilon(1e-14));
  }
  SUBCASE("n = 1 unit circle: D_max = 1") {
    auto c = sphere_config(2.0, 1.0, 1, true);
    for (auto param : {ProfileKind::radial, ProfileKind::support}) {
      c.parametrization = param;
      const Flow flow(c);
      const double h = grid_spacing(1, 64);
      const double dt = flow.stable_dt(flow.make_state(sphere(param, 1, 64, 1.0)));
      CHECK(dt == doctest::Approx(0.2 * h * h).epsilon(1e-14));
    }
  }
  SUBCASE("capped at t_max - t") {
    auto c = sphere_config(2.0, 1.0, 1, true);
    c.t_max = 1e-6;
    const Flow flow(c);
    auto s = flow.make_state(sphere(ProfileKind::radial, 1, 64, 1.0));
    CHECK(flow.stable_dt(s) == doctest::Approx(1e-6));
    s.t = 0.5e-6;
    CHECK(flow.stable_dt(s) == doctest::Approx(0.5e-6));
  }
}

TEST_CASE("one step on a sphere matches the scalar RK4 update") {
  const double dt = 1e-3, a = 0.5;
  auto ode = [](double r) { return -r * r + r; };
  const double k1 = ode(a), k2 = ode(a + 0.5 * dt * k1), k3 = ode(a + 0.5 * dt * k2),
               k4 = ode(a + dt * k3);
  const double expect = a + dt / 6.0 * (k1 + 2.0 * (k2 + k3) + k4);
  for (auto param : {ProfileKind::radial, ProfileKind::support}) {
    auto c = sphere_config(3.0, 1.0, 2, true);
    c.parametrization = param;
    c.speed_kind = param == ProfileKind::radial ? WeightKind::radial : WeightKind::support;
    const Flow flow(c);
    const auto next = flow.step(flow.make_state(sphere(param, 2, 64, a)), dt);
    CHECK(next.t == doctest::Approx(dt));
    for (double v : next.profile.values) CHECK(std::abs(v - expect) <= 1e-14);
  }
}

TEST_CASE("sphere stays round over 1000 steps") {
  auto c = sphere_config(3.0, 1.0, 2, true);
  const Flow flow(c);
  auto s = flow.make_state(sphere(ProfileKind::radial, 2, 64, 0.5));
  for (int i = 0; i < 1000; ++i) s = flow.step(s, flow.stable_dt(s));
  CHECK(spread(s.profile.values) <= 1e-10);
}

TEST_CASE("zero speed leaves the state unchanged") {
  auto c = sphere_config(3.0, 1.0, 2, false);
  Flow flow(c);
  flow.disable_speed_for_testing();
  const auto p = Profile::sample(ProfileKind::radial, 2, 64,
                                 [](double t) { return 1.0 + 0.1 * std::cos(2.0 * t); });
  const auto s0 = flow.make_state(p);
  const auto s1 = flow.step(s0, 1e-3);
  CHECK(s1.profile.values == s0.profile.values);
}

TEST_CASE("run: unnormalized sphere follows exp(-t)") {
  auto c = sphere_config(2.0, 1.0, 1, false);
  c.N = 256;
  c.t_max = 1.0;
  const auto res = run(c, sphere(ProfileKind::radial, 1, 256, 1.0));
  CHECK(res.stop.kind == StopKind::TimeExhausted);
  CHECK(res.final_state.t == 1.0);
  for (const auto& r : res.series.records) {
    CHECK(std::abs(r.r_max / std::exp(-r.t) - 1.0) <= 1e-6);
    CHECK(std::abs(r.r_min / std::exp(-r.t) - 1.0) <= 1e-6);
  }
}

TEST_CASE("run: unnormalized sphere reaches the origin") {
  auto c = sphere_config(2.0, 1.0, 1, false);
  c.N = 32;
  const auto res = run(c, sphere(ProfileKind::radial, 1, 32, 1.0));
  CHECK(res.stop.kind == StopKind::ReachedOrigin);
  CHECK(res.final_state.t == doctest::Approx(std::log(1e3)).epsilon(1e-2));
}

TEST_CASE("run: normalized sphere converges to the unit sphere") {
  auto c = sphere_config(3.0, 1.0, 2, true);
  c.N = 32;
  const auto res = run(c, sphere(ProfileKind::radial, 2, 32, 0.5));
  CHECK(res.stop.kind == StopKind::Converged);
  for (double v : res.final_state.profile.values) CHECK(std::abs(v - 1.0) <= 1e-6);
}

TEST_CASE("run: records, snapshots and the time series") {
  auto c = sphere_config(3.0, 1.0, 1, true);
  c.N = 32;
  c.t_max = 0.5;
  c.record_every = 10;
  c.snapshot_interval = 0.125;
  c.snapshot_times = {0.3};
  const auto res = run(c, sphere(ProfileKind::radial, 1, 32, 0.5));
  CHECK(res.stop.kind == StopKind::TimeExhausted);
  std::vector<double> times;
  for (const auto& p : res.snapshots) times.push_back(p.time);
  CHECK(times == std::vector<double>{0.0, 0.125, 0.25, 0.3, 0.375, 0.5});
  const auto t = res.series.column("t");
  CHECK(std::adjacent_find(t.begin(), t.end(), std::greater_equal<>()) == t.end());
  CHECK(t.front() == 0.0);
  CHECK(t.back() == 0.5);
  CHECK(res.series.size() < static_cast<std::size_t>(res.steps));
}

TEST_CASE("make_state converts between pictures") {
  auto c = sphere_config(3.0, 1.0, 2, true);
  c.parametrization = ProfileKind::support;
  const Flow flow(c);
  const auto s = flow.make_state(Profile::sample(ProfileKind::radial, 2, 64, [](double t) {
    return 1.0 / std::sqrt(std::cos(t) * std::cos(t) + 0.25 * std::sin(t) * std::sin(t));
  }));
  CHECK(s.profile.kind == ProfileKind::support);
  CHECK(s.profile.values.front() == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(s.profile.values[32] == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("config validation names the key") {
  auto expect_key = [](FlowConfig c, const std::string& key) {
    try {
      c.validate();
      FAIL("accepted invalid config for " << key);
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find(key) != std::string::npos);
    }
  };
  FlowConfig c;
  c.beta = 0.5;
  expect_key(c, "flow.beta");
  c = {};
  c.N = 8;
  expect_key(c, "grid.N");
  c = {};
  c.safety = 1.0;
  expect_key(c, "time.safety");
  c = {};
  c.stop.ratio_tol = 0.0;
  expect_key(c, "stop.ratio_tol");
  c = {};
  c.f_spec = "ek-root(3)";
  c.n = 2;
  expect_key(c, "flow.f");
  CHECK_NOTHROW(FlowConfig{}.validate());

  auto d = sphere_config(3.0, 1.0, 2, true);
  CHECK_THROWS_AS(Flow(d).make_state(sphere(ProfileKind::radial, 3, 64, 1.0)), ConfigError);
  CHECK_THROWS_AS(Flow(d).make_state(Profile::sample(ProfileKind::radial, 2, 64,
                                                     [](double t) { return 1.0 + 0.9 * std::cos(4 * t); })),
                  NonConvex);
}

TEST_CASE("rescale_map") {
  auto [p1, t1] = rescale_map(1.0, 2.0, 1.0);
  CHECK(p1 == doctest::Approx(std::numbers::e).epsilon(1e-15));
  CHECK(t1 == 1.0);
  auto [p2, t2] = rescale_map(1.0, 3.0, 1.0);
  CHECK(p2 == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(t2 == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  for (double a : {0.0, 2.0, 3.5}) {
    auto [p, t] = rescale_map(0.0, a, 1.0);
    CHECK(p == 1.0);
    CHECK(t == 0.0);
  }
  CHECK_THROWS_AS(rescale_map(1.0, 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(rescale_map(2.0, 1.5, 1.0), DomainError);
}

TEST_CASE("stop and weight names round-trip") {
  for (auto k : {StopKind::Converged, StopKind::ReachedOrigin, StopKind::RatioBlowup, StopKind::LostConvexity,
                 StopKind::TimeExhausted, StopKind::NumericalFailure})
    CHECK(parse_stop_kind(to_string(k)) == k);
  CHECK(parse_weight_kind("u") == WeightKind::support);
  CHECK(parse_weight_kind("radial") == WeightKind::radial);
  CHECK_THROWS(parse_weight_kind("both"));
}
