#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "curvflow/flow.hpp"
#include "curvflow/timeseries.hpp"

namespace curvflow {

/// Least-squares fit of log y = intercept - gamma t.
struct DecayFit {
  double gamma = 0.0;
  double intercept = 0.0;
  double r_squared = 1.0;
  double t_lo = 0.0;
  double t_hi = 0.0;
  std::size_t points = 0;
};

/// Fit over the trailing tail_fraction of the records of one column.
/// Throws EmptyWindow (fewer than two points) or NonPositiveValues.
DecayFit fit_decay_rate(const TimeSeries& series, std::string_view field, double tail_fraction = 0.5);
DecayFit fit_decay_rate(std::span<const double> t, std::span<const double> y);

/// Realized value range of one monitored quantity over a run.
struct BoundCheck {
  std::string quantity;
  double lo = 0.0;
  double hi = 0.0;
  bool pass = true;
  std::string rule;
};

struct BoundReport {
  /// Normalized run with alpha >= beta + 1: the regime where the a priori
  /// bounds are expected to hold.
  bool admissible = false;
  bool all_pass = true;
  std::vector<BoundCheck> checks;

  const BoundCheck* find(std::string_view quantity) const;
  std::string to_text() const;
};

inline constexpr double kBoundLo = 1e-8;
inline constexpr double kBoundHi = 1e8;

/// r, u, F and lambda must stay in [1e-8, 1e8] and star_margin > 0. Also
/// monitors ratio <= stop.blowup_ratio and, for admissible runs, the C0 bound
/// max r <= max(1, max r(0)) + 1e-8.
BoundReport check_bounds(const TimeSeries& series, const FlowConfig& cfg);

struct VerdictTolerances {
  double ratio_tol = 1e-4;
  double grad_tol = 1e-6;
  double min_r_squared = 0.98;
  double tail_fraction = 0.5;
  /// Records at or below this value are rounding noise and end the window
  /// used for the decay fits.
  double noise_floor = 1e-13;

  static VerdictTolerances from(const StopRules& rules);
};

struct Verdict {
  bool converged_to_sphere = false;
  double final_ratio = 1.0;
  double final_grad = 0.0;
  std::optional<DecayFit> ratio_fit;  // on ratio - 1
  std::optional<DecayFit> grad_fit;   // on grad_ratio_max
  std::string note;

  double gamma_ratio() const { return ratio_fit ? ratio_fit->gamma : 0.0; }
  double gamma_grad() const { return grad_fit ? grad_fit->gamma : 0.0; }
  std::string to_text() const;
};

/// Converged iff the final ratio and gradient ratio are below tolerance and
/// both decay fits have gamma > 0 and r^2 > min_r_squared. The fits use the
/// trailing tail_fraction of the records before the value first drops to the
/// noise floor; a quantity at the floor from the first record needs no fit.
Verdict convergence_verdict(const TimeSeries& series, const VerdictTolerances& tol = {});

/// One row of the run-index CSV.
struct RunIndexRow {
  std::string run;
  std::string stop;
  double t_final = 0.0;
  long steps = 0;
  double final_ratio = 1.0;
  double gamma_ratio = 0.0;
  double gamma_grad = 0.0;
  bool converged = false;
  bool bounds_pass = false;
};

std::string run_index_header();
std::string run_index_line(const RunIndexRow& row);
/// Appends one row, writing the header first when the file is new or empty.
void append_run_index(const std::filesystem::path& path, const RunIndexRow& row);

}  // namespace curvflow
