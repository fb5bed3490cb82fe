#pragma once

#include <optional>
#include <span>
#include <vector>

#include "curvflow/profile.hpp"
#include "curvflow/simd/kernels.hpp"

namespace curvflow {

/// Pointwise geometry of an axisymmetric profile. All vectors have one entry
/// per grid node.
///
/// The principal curvatures at a node are lambda_profile (along the
/// meridian) and, for n >= 2, lambda_orbit with multiplicity n - 1. At the
/// poles lambda_orbit equals lambda_profile.
struct GeometryFields {
  ProfileKind source = ProfileKind::radial;
  int n = 1;
  int N = 0;

  std::vector<double> d1;  // first theta-derivative of the source values
  std::vector<double> d2;  // second theta-derivative

  std::vector<double> lambda_profile;
  std::vector<double> lambda_orbit;  // empty for n = 1
  std::vector<double> tau_profile;   // principal radii; support source only
  std::vector<double> tau_orbit;     // support source only, empty for n = 1

  /// r and u at the boundary point represented by each node. For a radial
  /// source that point has polar angle theta_j; for a support source it is
  /// the point with outer normal at angle theta_j.
  std::vector<double> radial;
  std::vector<double> support;

  std::vector<double> grad_ratio;   // |Dr|/r (equivalently |Du|/u)
  std::vector<double> star_margin;  // 1 - <e, p/|p|>^2 = r^2 / (r^2 + r'^2)

  /// Metric factor of the profile direction used by the time-step bound:
  /// r^2 + r'^2 for a radial source, tau_profile^2 for a support source.
  std::vector<double> metric;

  /// Grid-dependent scratch reused between evaluations.
  std::vector<double> cot;
  std::vector<double> padded;
  std::vector<double> scratch;

  int nodes() const { return static_cast<int>(radial.size()); }
  /// Principal curvatures at node j, expanded to length n.
  void eigen_tuple(int j, std::span<double> out) const;
  double lambda_min() const;
  double lambda_max() const;
};

/// A node where a principal curvature (or radius) is not strictly positive
/// or not finite.
struct ConvexityViolation {
  int node;
  double theta;
  double value;
};

/// Fills `out` from raw nodal values without throwing. Used by the solver
/// on every Runge-Kutta stage; `out` keeps its allocations between calls.
void compute_geometry(ProfileKind kind, int n, int N, std::span<const double> values,
                      GeometryFields& out,
                      const simd::KernelTable& k = simd::kernels());

std::optional<ConvexityViolation> find_convexity_violation(const GeometryFields& g);

/// 4th-order first and second derivatives with periodic wraparound (n = 1)
/// or even reflection across the poles (n >= 2).
void derivatives(int n, int N, std::span<const double> values, std::span<double> d1,
                 std::span<double> d2, const simd::KernelTable& k = simd::kernels());

/// Geometry of a radial profile. Throws NonConvex when a curvature is not
/// positive and PoleIrregular when (n >= 2) the one-sided slope at a pole is
/// not numerically zero.
GeometryFields radial_to_geometry(const Profile& p);

/// Geometry of a support profile (principal radii tau = u'' + u and
/// u' cot(theta) + u). Throws NonConvex when a radius is not positive.
GeometryFields support_to_geometry(const Profile& p);

/// Dispatches on p.kind.
GeometryFields profile_geometry(const Profile& p);

/// Support function of the body bounded by a radial profile, on the same
/// grid: u(z) = max over boundary points X of <X, z>. The discrete argmax
/// is refined by 3-point quadratic interpolation and then polished on a
/// 6-point Lagrange interpolant of r(theta).
Profile radial_to_support_profile(const Profile& p);

/// Radial function of the body with support function u: the boundary
/// points X = u z + u' e_theta are re-binned by their own polar angle and
/// |X| is interpolated (4-point Lagrange) onto the grid.
Profile support_to_radial_profile(const Profile& p);

/// Largest |tau * lambda - 1| over the grid, where tau are the principal
/// radii of radial_to_support_profile(p) and lambda the principal
/// curvatures of p, interpolated (4-point Lagrange) to the boundary point
/// with the same outer normal.
double inverse_curvature_defect(const Profile& radial);

/// max r / min r (support profiles are converted to radial first).
double ratio(const Profile& p);

/// min over the grid of r^2 / (r^2 + r'^2).
double star_shape_margin(const Profile& p);

/// Largest one-sided slope |r'| at the two poles, relative to r there.
/// Zero for n = 1.
double pole_slope(const Profile& p);

}  // namespace curvflow
