#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "curvflow/flow.hpp"
#include "curvflow/profile.hpp"

namespace curvflow {

/// Radius of the sphere solution of the normalized flow started at radius a,
/// q = beta + 1 - alpha: (1 - (1 - a^q) e^{qt})^{1/q}. Throws DomainError when
/// the base is not positive (the sphere has reached the origin) or q = 0.
double barrier_radius(double t, double a, double q);

/// The contracting graph profile
///   phi(rho) = -|t|^th + |t|^{(s-1)th} rho^2                                   rho <  |t|^th
///   phi(rho) = -|t|^th - (1-s)/(1+s) |t|^{(1+s)th} + 2/(1+s) rho^{1+s}          rho >= |t|^th
/// with s = (gamma th - 1) / (beta th). Here th is the profile exponent
/// (theta_exp), unrelated to the polar angle of the grids.
struct CounterexampleParams {
  double theta_exp = 4.0;
  double gamma_gap = 0.5;  // beta + 1 - alpha
  double beta = 1.0;
  double t_param = -0.5;

  double sigma() const { return (gamma_gap * theta_exp - 1.0) / (beta * theta_exp); }
  double seam() const;
  /// Throws DomainError unless gamma > 0, beta >= 1, theta > 1/gamma and t in (-1, 0).
  void validate() const;
};

struct CounterexamplePoint {
  double height = 0.0;
  double slope = 0.0;   // d phi / d rho
  double second = 0.0;  // d^2 phi / d rho^2
  double lambda1 = 0.0;  // radial principal curvature
  double lambda_a = 0.0; // the n - 1 rotational ones
  bool inner = true;
};

/// Height and closed-form curvatures at rho in [0, 1]; DomainError outside.
CounterexamplePoint counterexample_profile(const CounterexampleParams& p, double rho);

/// Principal curvatures (ascending) of the graph of f over R^n at x, from
/// 4th-order central differences with the given step.
std::vector<double> graph_curvatures(const std::function<double(std::span<const double>)>& f,
                                     std::span<const double> x, double step = 1e-4);

/// Round sphere of radius rho centred at distance d along the axis:
/// r(theta) = d cos theta + sqrt(rho^2 - d^2 sin^2 theta). DomainError if d >= rho.
Profile eccentric_body(int n, int N, double radius, double offset);

/// Ellipsoid of revolution with semi-axis `axis` along the symmetry axis and
/// `equatorial` across it, as a radial or support profile.
Profile ellipsoid(ProfileKind kind, int n, int N, double axis, double equatorial);

struct ComparisonResult {
  std::vector<double> times;
  std::vector<bool> nested;
  std::vector<double> min_gap;  // min over nodes of u_B - u_A
  std::optional<double> first_violation;

  bool all_nested() const { return !first_violation.has_value(); }
  std::size_t violations() const;
};

/// Nesting of run A inside run B at every common snapshot time, compared on
/// support functions. Throws ConfigMismatch unless both runs use the same
/// exponents, F, weight, normalization and grid.
ComparisonResult comparison_check(const FlowConfig& cfg_a, const RunResult& a, const FlowConfig& cfg_b,
                                  const RunResult& b, double slack = 1e-12);

/// Initial data as plain parameters, so that runs can be written to and read
/// from config files. Shapes: sphere (radius), ellipsoid (axis, equatorial),
/// eccentric (radius, offset), file (a snapshot written by write_snapshot).
struct InitialSpec {
  std::string shape = "sphere";
  double radius = 1.0;
  double axis = 2.0;
  double equatorial = 1.0;
  double offset = 0.0;
  std::string file;
};

/// Samples the initial profile on the grid of cfg, in the configured
/// parametrization where the shape has a closed form for it. Throws
/// ConfigError for unknown shapes or a grid mismatch with a file.
Profile make_initial(const InitialSpec& spec, const FlowConfig& cfg);

struct Preset {
  std::string name;
  std::string description;
  FlowConfig config;
  InitialSpec initial_spec;
  Profile initial;
};

std::vector<std::string_view> preset_names();
/// Throws UnknownPreset.
Preset preset(std::string_view name);

}  // namespace curvflow
