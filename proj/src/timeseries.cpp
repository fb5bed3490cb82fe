#include "curvflow/timeseries.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "curvflow/errors.hpp"

namespace curvflow {

namespace {

double* field_ptr(Record& r, std::string_view name) {
  if (name == "t") return &r.t;
  if (name == "r_min") return &r.r_min;
  if (name == "r_max") return &r.r_max;
  if (name == "ratio") return &r.ratio;
  if (name == "grad_ratio_max") return &r.grad_ratio_max;
  if (name == "lambda_min") return &r.lambda_min;
  if (name == "lambda_max") return &r.lambda_max;
  if (name == "F_min") return &r.F_min;
  if (name == "F_max") return &r.F_max;
  if (name == "u_min") return &r.u_min;
  if (name == "u_max") return &r.u_max;
  if (name == "star_margin") return &r.star_margin;
  if (name == "dt") return &r.dt;
  return nullptr;
}

}  // namespace

double record_field(const Record& r, std::string_view name) {
  Record copy = r;
  const double* p = field_ptr(copy, name);
  if (!p) throw std::invalid_argument("unknown time-series column '" + std::string(name) + "'");
  return *p;
}

std::vector<double> TimeSeries::column(std::string_view name) const {
  std::vector<double> out;
  out.reserve(records.size());
  Record probe;
  if (!field_ptr(probe, name))
    throw std::invalid_argument("unknown time-series column '" + std::string(name) + "'");
  for (Record r : records) out.push_back(*field_ptr(r, name));
  return out;
}

void TimeSeries::write_csv(std::ostream& out) const {
  for (std::size_t i = 0; i < std::size(kColumns); ++i) out << (i ? "," : "") << kColumns[i];
  out << '\n' << std::setprecision(17);
  for (Record r : records) {
    for (std::size_t i = 0; i < std::size(kColumns); ++i)
      out << (i ? "," : "") << *field_ptr(r, kColumns[i]);
    out << '\n';
  }
}

void TimeSeries::write_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_csv(out);
}

TimeSeries TimeSeries::read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("time series: empty input");
  std::vector<std::string> header;
  for (std::size_t start = 0;;) {
    const auto comma = line.find(',', start);
    header.push_back(line.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  TimeSeries ts;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    Record r;
    std::size_t start = 0;
    for (const auto& name : header) {
      const auto comma = line.find(',', start);
      const std::string_view cell(line.data() + start,
                                  (comma == std::string::npos ? line.size() : comma) - start);
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc()) throw ParseError("time series: bad number '" + std::string(cell) + "'");
      if (double* f = field_ptr(r, name)) *f = v;
      start = comma == std::string::npos ? line.size() : comma + 1;
    }
    ts.records.push_back(r);
  }
  return ts;
}

TimeSeries TimeSeries::read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return read_csv(in);
}

}  // namespace curvflow
