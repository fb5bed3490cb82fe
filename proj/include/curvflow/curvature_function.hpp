#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace curvflow {

/// Largest supported hypersurface dimension n. Evaluation uses fixed-size
/// stack scratch of this length.
inline constexpr int kMaxDimension = 64;

/// Principal curvatures (lambda_1, ..., lambda_n); every entry must be > 0.
using EigenTuple = std::vector<double>;

namespace detail {
struct Node;
}

/// A symmetric, degree-one homogeneous curvature function f on the positive
/// cone, built from the registry
///
///   arithmetic-mean | power-mean(p) | ek-root(k) | gauss-root
///   | blend(F1, F2, s)            (F1^s * F2^(1-s))
///
/// together with its analytic gradient. Instances are immutable and can be
/// shared between threads.
class CurvatureFunction {
 public:
  using ValueFn = std::function<double(std::span<const double>)>;
  using GradFn = std::function<double(std::span<const double>, std::span<double>)>;

  /// Parses a registry expression; throws ParseError / DomainError.
  static CurvatureFunction parse(std::string_view spec, int n);

  /// Wraps user-supplied callables. Intended for tests that need functions
  /// outside the registry (e.g. an unnormalized sum). `grad` must write the
  /// gradient and return the value.
  static CurvatureFunction custom(std::string name, int n, ValueFn value, GradFn grad);

  int dimension() const noexcept { return n_; }
  bool is_dual() const noexcept { return dual_; }
  /// Canonical text form, e.g. "blend(gauss-root,arithmetic-mean,0.5)".
  std::string describe() const;

  /// f(lambda). Throws DomainError unless lambda has n strictly positive
  /// finite entries.
  double eval(std::span<const double> lambda) const;
  /// Writes df/dlambda_i into `grad` and returns f(lambda).
  double gradient(std::span<const double> lambda, std::span<double> grad) const;
  std::vector<double> gradient(std::span<const double> lambda) const;

  /// Unchecked variants for hot loops; the caller guarantees positivity.
  double eval_unchecked(std::span<const double> lambda) const;
  double gradient_unchecked(std::span<const double> lambda, std::span<double> grad) const;

  /// The dual f*(lambda) = 1 / f(1/lambda_1, ..., 1/lambda_n).
  CurvatureFunction dual() const;

 private:
  CurvatureFunction(std::shared_ptr<const detail::Node> root, int n, bool dual)
      : root_(std::move(root)), n_(n), dual_(dual) {}
  void validate(std::span<const double> lambda) const;

  std::shared_ptr<const detail::Node> root_;
  int n_ = 1;
  bool dual_ = false;
};

inline CurvatureFunction make_function(std::string_view spec, int n) {
  return CurvatureFunction::parse(spec, n);
}

inline CurvatureFunction dual(const CurvatureFunction& f) { return f.dual(); }

/// Sampling plan for check_condition: `count` points drawn log-uniformly
/// from [lo, hi]^n with a seeded generator.
struct SamplePlan {
  int count = 1000;
  double lo = 1e-2;
  double hi = 1e2;
  std::uint64_t seed = 20240611;
};

struct CheckResult {
  std::string name;
  bool pass = true;
  double worst_residual = 0.0;
  double tolerance = 0.0;
  /// Sample at which the worst residual occurred; always set on failure.
  EigenTuple witness;
};

struct ConditionReport {
  std::string function;
  int n = 0;
  int samples = 0;
  std::vector<CheckResult> checks;

  bool all_pass() const;
  const CheckResult& at(std::string_view name) const;
  std::string to_text() const;
};

/// Sampled certification of the structural conditions on f:
/// normalization, homogeneity, monotonicity, symmetry, Euler relation,
/// gradient vs. finite differences, dual involution, inverse concavity
/// (midpoint test on f*) and vanishing of f* at the boundary of the cone.
/// Failures are reported, never thrown.
ConditionReport check_condition(const CurvatureFunction& f, const SamplePlan& plan);

/// Central-difference gradient oracle (Richardson-extrapolated, step
/// rel_step * lambda_i). Independent of the analytic gradient path.
std::vector<double> finite_difference_gradient(const CurvatureFunction& f,
                                               std::span<const double> lambda,
                                               double rel_step = 1e-3);

}  // namespace curvflow
