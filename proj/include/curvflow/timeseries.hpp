#pragma once

#include <filesystem>
#include <iosfwd>
#include <string_view>
#include <vector>

namespace curvflow {

/// One diagnostic record per accepted (and retained) solver step.
struct Record {
  double t = 0.0;
  double r_min = 0.0;
  double r_max = 0.0;
  double ratio = 1.0;
  double grad_ratio_max = 0.0;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double F_min = 0.0;
  double F_max = 0.0;
  double u_min = 0.0;
  double u_max = 0.0;
  double star_margin = 1.0;
  double dt = 0.0;
};

/// CSV column names in file order.
inline constexpr std::string_view kColumns[] = {
    "t",     "r_min", "r_max", "ratio", "grad_ratio_max", "lambda_min", "lambda_max",
    "F_min", "F_max", "u_min", "u_max", "star_margin",    "dt"};

struct TimeSeries {
  std::vector<Record> records;

  bool empty() const { return records.empty(); }
  std::size_t size() const { return records.size(); }
  const Record& back() const { return records.back(); }

  /// Values of one column; throws std::invalid_argument for unknown names.
  std::vector<double> column(std::string_view name) const;

  /// Header line plus one row per record, 17 significant digits.
  void write_csv(std::ostream& out) const;
  void write_csv(const std::filesystem::path& path) const;
  static TimeSeries read_csv(std::istream& in);
  static TimeSeries read_csv(const std::filesystem::path& path);
};

double record_field(const Record& r, std::string_view name);

}  // namespace curvflow
