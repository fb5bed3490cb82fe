#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string_view>
#include <vector>

namespace curvflow {

enum class ProfileKind { radial, support };

std::string_view to_string(ProfileKind kind);
/// "radial" | "support"; throws ParseError otherwise.
ProfileKind parse_profile_kind(std::string_view text);

/// Number of grid nodes: N for the periodic n = 1 grid, N + 1 (both poles
/// included) for n >= 2.
inline int node_count(int n, int N) { return n == 1 ? N : N + 1; }

/// Grid spacing in theta: 2 pi / N for n = 1, pi / N for n >= 2.
double grid_spacing(int n, int N);

inline double grid_theta(int n, int N, int j) { return j * grid_spacing(n, N); }

/// An axisymmetric hypersurface in R^(n+1) sampled on a polar-angle grid.
///
/// n = 1: a closed curve, theta_j = 2 pi j / N, j = 0..N-1 (periodic).
/// n >= 2: a surface of revolution about the first axis, theta_j = pi j / N,
///         j = 0..N, with theta = 0 and theta = pi the poles.
///
/// `values` holds the radial function r(theta) or the support function
/// u(theta) depending on `kind`.
struct Profile {
  ProfileKind kind = ProfileKind::radial;
  int n = 1;
  int N = 0;
  std::vector<double> values;
  double time = 0.0;

  static Profile sample(ProfileKind kind, int n, int N, const std::function<double(double)>& fn,
                        double time = 0.0);

  int nodes() const { return node_count(n, N); }
  double spacing() const { return grid_spacing(n, N); }
  double theta(int j) const { return grid_theta(n, N, j); }

  /// Throws DomainError unless 1 <= n <= kMaxDimension, N >= 8, the value
  /// count matches the grid and every value is finite and positive.
  void validate() const;
};

/// Snapshot text format:
///
///   # kind: radial
///   # n: 2
///   # N: 256
///   # time: 0.5
///   theta,value
///   0,1.0000000000000000
///   ...
///
/// All reals use 17 significant digits, so a write/read cycle is exact.
void write_snapshot(std::ostream& out, const Profile& p);
Profile read_snapshot(std::istream& in);
void write_snapshot_file(const std::filesystem::path& path, const Profile& p);
Profile read_snapshot_file(const std::filesystem::path& path);

}  // namespace curvflow
