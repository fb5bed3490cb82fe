#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "curvflow/curvature_function.hpp"
#include "curvflow/errors.hpp"

using namespace curvflow;

namespace {

// sigma_k by enumerating every k-subset (bitmask), independent of the
// recurrence used in the library.
double sigma_brute(const std::vector<double>& x, int k) {
  const int n = static_cast<int>(x.size());
  double total = 0.0;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (std::popcount(mask) != k) continue;
    double prod = 1.0;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) prod *= x[static_cast<std::size_t>(i)];
    total += prod;
  }
  return total;
}

double binom(int n, int k) {
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

}  // namespace

TEST_CASE("registry values") {
  CHECK(make_function("gauss-root", 2).eval(std::vector{2.0, 8.0}) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(make_function("blend(gauss-root, arithmetic-mean, 0.5)", 2).eval(std::vector{1.0, 1.0}) == 1.0);
  CHECK(make_function("arithmetic-mean", 3).eval(std::vector{1.0, 1.0, 1.0}) == 1.0);
  CHECK(make_function("power-mean(2)", 2).eval(std::vector{3.0, 4.0}) ==
        doctest::Approx(std::sqrt(12.5)).epsilon(1e-15));

  const std::vector<double> lam{1.0, 2.0, 3.0};
  const double oracle = std::sqrt(sigma_brute(lam, 2) / binom(3, 2));
  CHECK(oracle == doctest::Approx(1.914854).epsilon(1e-6));
  CHECK(make_function("ek-root(2)", 3).eval(lam) == doctest::Approx(oracle).epsilon(1e-15));
}

TEST_CASE("ek-root against subset enumeration for every k") {
  const std::vector<double> lam{0.3, 1.7, 2.2, 0.9, 5.0, 1.1};
  for (int k = 1; k <= 6; ++k) {
    const auto f = make_function("ek-root(" + std::to_string(k) + ")", 6);
    const double oracle = std::pow(sigma_brute(lam, k) / binom(6, k), 1.0 / k);
    CHECK(f.eval(lam) == doctest::Approx(oracle).epsilon(1e-14));
  }
}

TEST_CASE("parse errors and domain errors") {
  CHECK_THROWS_AS(make_function("ek-root(3)", 2), DomainError);
  CHECK_THROWS_AS(make_function("ek-root(1.5)", 2), DomainError);
  CHECK_THROWS_AS(make_function("power-mean(0)", 2), DomainError);
  CHECK_THROWS_AS(make_function("power-mean(-1)", 2), DomainError);
  CHECK_THROWS_AS(make_function("blend(gauss-root,arithmetic-mean,1.5)", 2), DomainError);
  CHECK_THROWS_AS(make_function("geometric-mean", 2), ParseError);
  CHECK_THROWS_AS(make_function("blend(gauss-root,arithmetic-mean)", 2), ParseError);
  CHECK_THROWS_AS(make_function("gauss-root)", 2), ParseError);
  CHECK_THROWS_AS(make_function("", 2), ParseError);

  const auto f = make_function("  blend ( ek-root( 2 ) ,power-mean(3) , 0.25 ) ", 3);
  CHECK(f.describe() == "blend(ek-root(2),power-mean(3),0.25)");

  CHECK_THROWS_AS(f.eval(std::vector{1.0, 0.0, 1.0}), DomainError);
  CHECK_THROWS_AS(f.eval(std::vector{1.0, -2.0, 1.0}), DomainError);
  CHECK_THROWS_AS(f.eval(std::vector{1.0, 1.0}), DomainError);
  CHECK_THROWS_AS(f.gradient(std::vector{1.0, 1.0, 0.0}), DomainError);
}

TEST_CASE("gradients") {
  const auto am = make_function("arithmetic-mean", 2);
  const auto g = am.gradient(std::vector{0.7, 9.0});
  CHECK(g[0] == 0.5);
  CHECK(g[1] == 0.5);

  const auto gr = make_function("gauss-root", 2);
  const std::vector<double> lam{2.0, 8.0};
  const auto ga = gr.gradient(lam);
  CHECK(ga[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(ga[1] == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(lam[0] * ga[0] + lam[1] * ga[1] == doctest::Approx(4.0).epsilon(1e-14));

  // Plain central differences, step 1e-6 * lambda_i.
  for (int i = 0; i < 2; ++i) {
    auto up = lam, dn = lam;
    const double step = 1e-6 * lam[static_cast<std::size_t>(i)];
    up[static_cast<std::size_t>(i)] += step;
    dn[static_cast<std::size_t>(i)] -= step;
    const double fd = (gr.eval(up) - gr.eval(dn)) / (2.0 * step);
    CHECK(fd == doctest::Approx(ga[static_cast<std::size_t>(i)]).epsilon(1e-8));
  }
}

TEST_CASE("duals") {
  const auto am = make_function("arithmetic-mean", 2);
  CHECK(am.dual().eval(std::vector{1.0, 3.0}) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(am.dual().is_dual());
  CHECK_FALSE(am.dual().dual().is_dual());
  CHECK(dual(make_function("gauss-root", 2)).eval(std::vector{2.0, 8.0}) ==
        doctest::Approx(4.0).epsilon(1e-15));
  CHECK(make_function("power-mean(2)", 2).dual().dual().eval(std::vector{3.0, 4.0}) ==
        doctest::Approx(std::sqrt(12.5)).epsilon(1e-15));

  // Gradient of the dual: d/dl_i [1/f(1/l)] = f_i(1/l) / (f(1/l)^2 l_i^2).
  const auto pm = make_function("power-mean(3)", 3);
  const std::vector<double> lam{0.5, 2.0, 3.0};
  const std::vector<double> inv{2.0, 0.5, 1.0 / 3.0};
  const auto g = pm.gradient(inv);
  const double f = pm.eval(inv);
  const auto gd = pm.dual().gradient(lam);
  for (std::size_t i = 0; i < 3; ++i)
    CHECK(gd[i] == doctest::Approx(g[i] / (f * f * lam[i] * lam[i])).epsilon(1e-13));
}

TEST_CASE("check_condition passes for the registry") {
  SamplePlan plan;
  plan.count = 1000;
  for (const char* spec : {"arithmetic-mean", "power-mean(0.5)", "power-mean(2)", "gauss-root",
                           "ek-root(1)", "ek-root(2)", "blend(gauss-root,arithmetic-mean,0.5)"}) {
    for (int n : {2, 3}) {
      const auto report = check_condition(make_function(spec, n), plan);
      INFO(report.to_text());
      CHECK(report.all_pass());
    }
  }
}

TEST_CASE("check_condition flags an unnormalized sum") {
  for (int n : {2, 3, 5}) {
    const auto sum = CurvatureFunction::custom(
        "sum", n,
        [](std::span<const double> x) { return std::accumulate(x.begin(), x.end(), 0.0); },
        [](std::span<const double> x, std::span<double> g) {
          std::fill(g.begin(), g.end(), 1.0);
          return std::accumulate(x.begin(), x.end(), 0.0);
        });
    SamplePlan plan;
    plan.count = 200;
    const auto report = check_condition(sum, plan);
    const auto& norm = report.at("normalization");
    CHECK_FALSE(norm.pass);
    CHECK(norm.worst_residual == doctest::Approx(n - 1.0));
    REQUIRE(norm.witness.size() == static_cast<std::size_t>(n));
    for (double w : norm.witness) CHECK(w == 1.0);
    CHECK(report.at("homogeneity").pass);
    CHECK(report.at("euler-relation").pass);
    CHECK_FALSE(report.all_pass());
  }
}

TEST_CASE("check_condition flags a non-monotone function with a witness") {
  // f = 2 l1 - l2 + ... normalised at (1,1); decreasing in l2.
  const auto bad = CurvatureFunction::custom(
      "skew", 2, [](std::span<const double> x) { return 2.0 * x[0] - x[1]; },
      [](std::span<const double> x, std::span<double> g) {
        g[0] = 2.0;
        g[1] = -1.0;
        return 2.0 * x[0] - x[1];
      });
  SamplePlan plan;
  plan.count = 50;
  const auto report = check_condition(bad, plan);
  const auto& mono = report.at("monotonicity");
  CHECK_FALSE(mono.pass);
  CHECK(mono.witness.size() == 2);
  CHECK_FALSE(report.at("symmetry").pass);
}

TEST_CASE("check_condition is deterministic per seed") {
  SamplePlan plan;
  plan.count = 100;
  const auto f = make_function("ek-root(2)", 4);
  CHECK(check_condition(f, plan).to_text() == check_condition(f, plan).to_text());
}
