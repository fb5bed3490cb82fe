#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "curvflow/curvature_function.hpp"
#include "curvflow/geometry.hpp"
#include "curvflow/profile.hpp"
#include "curvflow/timeseries.hpp"

namespace curvflow {

/// Which quantity carries the exponent alpha in the speed
/// Phi = W^alpha F^beta: the radial function r or the support function u.
enum class WeightKind { radial, support };

std::string_view to_string(WeightKind kind);
WeightKind parse_weight_kind(std::string_view text);

enum class StopKind {
  Converged,
  ReachedOrigin,
  RatioBlowup,
  LostConvexity,
  TimeExhausted,
  NumericalFailure,
};

std::string_view to_string(StopKind kind);
StopKind parse_stop_kind(std::string_view text);

struct StopReason {
  StopKind kind = StopKind::TimeExhausted;
  /// The measurement that triggered the stop (ratio, min r, t, ...).
  double measurement = 0.0;
  std::string detail;
};

struct StopRules {
  double grad_ratio_tol = 1e-6;
  double ratio_tol = 1e-4;
  double origin_eps = 1e-3;
  double blowup_ratio = 50.0;
  double curvature_cap = 1e6;
  /// Normalized runs only count as converged once the profile has also
  /// stopped moving: max |d/dt value| / value below this tolerance.
  double stationary_tol = 1e-6;
};

/// Contracting flow dX/dt = -W^alpha F^beta nu (+ X when normalized).
///
/// Radial parametrization:  dr/dt = -sqrt(1 + |Dr|^2/r^2) W^alpha F^beta(lambda) [+ r]
/// Support parametrization: du/dt = -W^alpha F_*(tau)^(-beta)                   [+ u]
struct FlowConfig {
  double alpha = 2.0;
  double beta = 1.0;
  WeightKind speed_kind = WeightKind::radial;
  ProfileKind parametrization = ProfileKind::radial;
  bool normalized = true;
  std::string f_spec = "arithmetic-mean";
  int n = 1;
  int N = 256;
  double safety = 0.2;
  double t_max = 50.0;
  StopRules stop;

  /// Keep every k-th step in the time series (first and last always kept).
  int record_every = 1;
  /// Snapshot cadence in flow time; 0 disables periodic snapshots.
  double snapshot_interval = 0.0;
  /// Extra snapshot times. The step size is clipped so that every snapshot
  /// time is hit exactly.
  std::vector<double> snapshot_times;

  /// Throws ConfigError naming the offending key.
  void validate() const;
};

struct FlowState {
  double t = 0.0;
  Profile profile;
  GeometryFields geometry;
  std::vector<double> f_value;  // F(lambda) per node
  std::vector<double> phi;      // W^alpha F^beta per node
  std::vector<double> velocity; // d/dt of the profile values per node
};

/// Raised by Flow::step when the new state is unusable.
class FlowError : public std::runtime_error {
 public:
  explicit FlowError(StopReason reason)
      : std::runtime_error(reason.detail), reason_(std::move(reason)) {}
  const StopReason& reason() const noexcept { return reason_; }

 private:
  StopReason reason_;
};

struct RunResult {
  TimeSeries series;
  FlowState final_state;
  StopReason stop;
  std::vector<Profile> snapshots;
  long steps = 0;
};

/// A configured flow. Holds the parsed curvature function (and its dual);
/// immutable after construction and safe to share between threads.
class Flow {
 public:
  explicit Flow(FlowConfig cfg);

  const FlowConfig& config() const { return cfg_; }
  const CurvatureFunction& function() const { return f_; }

  /// State at t = initial.time. A profile of the other kind is converted to
  /// the configured parametrization first. Throws NonConvex, DomainError or
  /// ConfigError (grid mismatch).
  FlowState make_state(const Profile& initial) const;

  /// Nodal time derivative of the evolving scalar (r or u).
  std::vector<double> rhs(const FlowState& s) const;

  /// safety * h^2 / D_max, capped at t_max - t. D is the coefficient of the
  /// second-derivative term: beta Phi F^-1 max_i f^i / m with m = r^2 + r'^2
  /// in the radial picture, and beta Phi max_i f_*^i / F_* in the support
  /// picture (the same expression written in the radii tau).
  double stable_dt(const FlowState& s) const;

  /// One classical RK4 step. Throws FlowError (LostConvexity or
  /// NumericalFailure).
  FlowState step(const FlowState& s, double dt) const;

  /// Integrates until a stop rule fires.
  RunResult run(const Profile& initial) const;

  /// Test hook: replaces the speed by zero (state must stay unchanged).
  void disable_speed_for_testing() { zero_speed_ = true; }

 private:
  struct Workspace;
  void evaluate(std::span<const double> values, Workspace& ws, std::span<double> out) const;
  void fill_fields(FlowState& s) const;
  Record record(const FlowState& s, double dt) const;

  FlowConfig cfg_;
  CurvatureFunction f_;
  CurvatureFunction f_dual_;
  bool zero_speed_ = false;
};

inline std::vector<double> rhs(const FlowState& s, const FlowConfig& cfg) { return Flow(cfg).rhs(s); }
inline double stable_dt(const FlowState& s, const FlowConfig& cfg) { return Flow(cfg).stable_dt(s); }
inline FlowState step(const FlowState& s, const FlowConfig& cfg, double dt) {
  return Flow(cfg).step(s, dt);
}
inline RunResult run(const FlowConfig& cfg, const Profile& initial) { return Flow(cfg).run(initial); }

/// Scale factor and time of the normalized picture for unnormalized time t:
/// with k = alpha - beta - 1, phi = (1 + k t)^(1/k), tau = log(1 + k t) / k;
/// for k = 0, (e^t, t). The normalized hypersurface is phi(t) X(t).
/// Throws DomainError when 1 + k t <= 0.
std::pair<double, double> rescale_map(double t, double alpha, double beta);

}  // namespace curvflow
