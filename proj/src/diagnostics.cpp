#include "curvflow/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "curvflow/errors.hpp"

namespace curvflow {

namespace {

std::string num(double v) {
  std::ostringstream o;
  o.precision(10);
  o << v;
  return o.str();
}

}  // namespace

DecayFit fit_decay_rate(std::span<const double> t, std::span<const double> y) {
  if (t.size() != y.size()) throw std::invalid_argument("fit_decay_rate: length mismatch");
  if (t.size() < 2) throw EmptyWindow("fit window has " + std::to_string(t.size()) + " point(s)");
  const std::size_t m = t.size();
  std::vector<double> ly(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (!(y[i] > 0.0) || !std::isfinite(y[i]))
      throw NonPositiveValues("value " + num(y[i]) + " at t=" + num(t[i]) + " cannot be log-fitted");
    ly[i] = std::log(y[i]);
  }
  double tm = 0.0, lm = 0.0;
  for (std::size_t i = 0; i < m; ++i) tm += t[i], lm += ly[i];
  tm /= static_cast<double>(m);
  lm /= static_cast<double>(m);
  double stt = 0.0, sty = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double dt = t[i] - tm, dy = ly[i] - lm;
    stt += dt * dt;
    sty += dt * dy;
    syy += dy * dy;
  }
  if (!(stt > 0.0)) throw EmptyWindow("fit window spans zero time");
  const double slope = sty / stt;
  DecayFit fit;
  fit.gamma = -slope;
  fit.intercept = lm - slope * tm;
  double ssr = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double e = ly[i] - (fit.intercept + slope * t[i]);
    ssr += e * e;
  }
  // A flat series (spread at rounding level) is fitted exactly by a constant.
  const double floor = static_cast<double>(m) * std::pow(64.0 * 2.2e-16 * (1.0 + std::abs(lm)), 2);
  fit.r_squared = syy > floor ? std::clamp(1.0 - ssr / syy, 0.0, 1.0) : 1.0;
  fit.t_lo = t.front();
  fit.t_hi = t.back();
  fit.points = m;
  return fit;
}

DecayFit fit_decay_rate(const TimeSeries& series, std::string_view field, double tail_fraction) {
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0))
    throw std::invalid_argument("tail_fraction must be in (0, 1]");
  const auto t = series.column("t");
  const auto y = series.column(field);
  const auto count = static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(t.size())));
  const std::size_t first = t.size() - std::min(count, t.size());
  return fit_decay_rate(std::span(t).subspan(first), std::span(y).subspan(first));
}

const BoundCheck* BoundReport::find(std::string_view quantity) const {
  for (const auto& c : checks)
    if (c.quantity == quantity) return &c;
  return nullptr;
}

std::string BoundReport::to_text() const {
  std::ostringstream o;
  o << "bounds.admissible: " << (admissible ? "yes" : "no") << '\n';
  o << "bounds.all_pass: " << (all_pass ? "PASS" : "FAIL") << '\n';
  for (const auto& c : checks)
    o << "bounds." << c.quantity << ": " << (c.pass ? "PASS" : "FAIL") << " [" << num(c.lo) << ", "
      << num(c.hi) << "] " << c.rule << '\n';
  return o.str();
}

BoundReport check_bounds(const TimeSeries& series, const FlowConfig& cfg) {
  BoundReport rep;
  rep.admissible = cfg.normalized && cfg.alpha >= cfg.beta + 1.0;
  if (series.empty()) return rep;

  auto range = [&](double Record::*lo_field, double Record::*hi_field) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& r : series.records) {
      lo = std::min(lo, r.*lo_field);
      hi = std::max(hi, r.*hi_field);
    }
    return std::pair{lo, hi};
  };
  auto add = [&](std::string name, std::pair<double, double> lh, bool pass, std::string rule) {
    rep.checks.push_back({std::move(name), lh.first, lh.second, pass, std::move(rule)});
    rep.all_pass = rep.all_pass && pass;
  };
  auto window = [&](std::string name, double Record::*lo_field, double Record::*hi_field) {
    const auto lh = range(lo_field, hi_field);
    add(std::move(name), lh, lh.first >= kBoundLo && lh.second <= kBoundHi, "within [1e-08, 1e+08]");
  };
  window("r", &Record::r_min, &Record::r_max);
  window("u", &Record::u_min, &Record::u_max);
  window("F", &Record::F_min, &Record::F_max);
  window("lambda", &Record::lambda_min, &Record::lambda_max);

  const auto sm = range(&Record::star_margin, &Record::star_margin);
  add("star_margin", sm, sm.first > 0.0, "> 0");

  const auto ratio = range(&Record::ratio, &Record::ratio);
  add("ratio", ratio, ratio.second <= cfg.stop.blowup_ratio, "<= " + num(cfg.stop.blowup_ratio));

  if (rep.admissible) {
    const double cap = std::max(1.0, series.records.front().r_max) + 1e-8;
    const auto r = range(&Record::r_min, &Record::r_max);
    add("r_max_monotone", r, r.second <= cap, "<= max(1, max r(0)) + 1e-08 = " + num(cap));
  }
  return rep;
}

VerdictTolerances VerdictTolerances::from(const StopRules& rules) {
  VerdictTolerances t;
  t.ratio_tol = rules.ratio_tol;
  t.grad_tol = rules.grad_ratio_tol;
  return t;
}

std::string Verdict::to_text() const {
  std::ostringstream o;
  o << "verdict.converged_to_sphere: " << (converged_to_sphere ? "yes" : "no") << '\n';
  o << "verdict.final_ratio: " << num(final_ratio) << '\n';
  o << "verdict.final_grad_ratio: " << num(final_grad) << '\n';
  auto fit = [&](const char* name, const std::optional<DecayFit>& f) {
    if (!f) {
      o << "verdict." << name << ": none\n";
      return;
    }
    o << "verdict." << name << ".gamma: " << num(f->gamma) << '\n';
    o << "verdict." << name << ".r_squared: " << num(f->r_squared) << '\n';
    o << "verdict." << name << ".window: [" << num(f->t_lo) << ", " << num(f->t_hi) << "] (" << f->points
      << " points)\n";
  };
  fit("ratio_fit", ratio_fit);
  fit("grad_fit", grad_fit);
  if (!note.empty()) o << "verdict.note: " << note << '\n';
  return o.str();
}

Verdict convergence_verdict(const TimeSeries& series, const VerdictTolerances& tol) {
  Verdict v;
  if (series.empty()) {
    v.note = "empty series";
    return v;
  }
  v.final_ratio = series.back().ratio;
  v.final_grad = series.back().grad_ratio_max;

  const auto t = series.column("t");
  // A quantity already at the noise floor in the first record has nothing to
  // fit; it counts as converged (exact sphere data).
  auto fit = [&](std::vector<double> y, const char* name, bool& exact) -> std::optional<DecayFit> {
    std::size_t end = 0;
    while (end < y.size() && y[end] > tol.noise_floor) ++end;
    exact = end == 0;
    if (exact) {
      v.note += std::string(v.note.empty() ? "" : "; ") + name + ": identically at the noise floor";
      return std::nullopt;
    }
    const auto count = static_cast<std::size_t>(std::ceil(tol.tail_fraction * static_cast<double>(end)));
    try {
      return fit_decay_rate(std::span(t).subspan(end - count, count), std::span(y).subspan(end - count, count));
    } catch (const std::exception& e) {
      v.note += std::string(v.note.empty() ? "" : "; ") + name + ": " + e.what();
      return std::nullopt;
    }
  };
  std::vector<double> excess;
  for (const auto& r : series.records) excess.push_back(r.ratio - 1.0);
  bool ratio_exact = false, grad_exact = false;
  v.ratio_fit = fit(std::move(excess), "ratio fit", ratio_exact);
  v.grad_fit = fit(series.column("grad_ratio_max"), "grad fit", grad_exact);

  auto good = [&](const std::optional<DecayFit>& f, bool exact) {
    return exact || (f && f->gamma > 0.0 && f->r_squared > tol.min_r_squared);
  };
  v.converged_to_sphere = v.final_ratio - 1.0 < tol.ratio_tol && v.final_grad < tol.grad_tol &&
                          good(v.ratio_fit, ratio_exact) && good(v.grad_fit, grad_exact);
  return v;
}

std::string run_index_header() {
  return "run,stop,t_final,steps,final_ratio,gamma_ratio,gamma_grad,converged,bounds_pass";
}

std::string run_index_line(const RunIndexRow& row) {
  std::ostringstream o;
  o.precision(17);
  o << row.run << ',' << row.stop << ',' << row.t_final << ',' << row.steps << ',' << row.final_ratio << ','
    << row.gamma_ratio << ',' << row.gamma_grad << ',' << (row.converged ? 1 : 0) << ','
    << (row.bounds_pass ? 1 : 0);
  return o.str();
}

void append_run_index(const std::filesystem::path& path, const RunIndexRow& row) {
  std::error_code ec;
  const bool fresh = !std::filesystem::exists(path, ec) || std::filesystem::file_size(path, ec) == 0;
  std::ofstream out(path, std::ios::app);
  if (!out) throw std::runtime_error("cannot append to " + path.string());
  if (fresh) out << run_index_header() << '\n';
  out << run_index_line(row) << '\n';
}

}  // namespace curvflow
