#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "curvflow/config.hpp"
#include "curvflow/diagnostics.hpp"

namespace curvflow {

/// 0: the run ended the way the mathematics allows (Converged, ReachedOrigin,
/// RatioBlowup, TimeExhausted). 2: LostConvexity or NumericalFailure.
int exit_code_for(StopKind kind);

struct RunOutcome {
  RunResult result;
  Verdict verdict;
  BoundReport bounds;
  int exit_code = 0;
};

/// Runs spec and writes into out_dir: timeseries.csv, snapshots/*.txt,
/// report.txt, config.txt and manifest.json, and appends one row to
/// out_dir/summary.csv. Throws ConfigError for invalid specs or initial data.
RunOutcome execute_run(const RunSpec& spec, const std::filesystem::path& out_dir);

/// One sweep dimension: `key=[lo:step:hi]` (inclusive) or `key=[v1,v2,...]`.
struct SweepAxis {
  std::string key;  // canonical
  std::vector<std::string> values;
};

/// Throws ConfigError on malformed or empty axes.
SweepAxis parse_axis(std::string_view text);

struct SweepCell {
  std::size_t index = 0;
  std::vector<std::string> values;  // one per axis
  std::string stop;                 // stop reason or error class
  std::string error;
  int exit_code = 0;
  double t_final = 0.0;
  long steps = 0;
  double final_ratio = 0.0;
  double gamma_ratio = 0.0;
  double gamma_grad = 0.0;
  bool converged = false;
  bool bounds_pass = false;
};

struct SweepResult {
  std::vector<SweepCell> cells;
  int exit_code = 0;  // max over cells
};

/// Cartesian product of the axes over base, run on up to `parallel` threads.
/// Each cell writes into out_dir/cell_<index>; out_dir/summary.csv is written
/// once all cells finish, in cell order. A failing cell never stops others.
SweepResult execute_sweep(const RunSpec& base, const std::vector<SweepAxis>& axes, int parallel,
                          const std::filesystem::path& out_dir);

}  // namespace curvflow
