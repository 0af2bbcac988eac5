#include "trendqp/diagnostics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "trendqp/errors.hpp"

namespace trendqp {

std::vector<double> autocorrelation(std::span<const double> series,
                                    std::size_t L) {
  const std::size_t n = series.size();
  if (L < 1) throw ParameterError("autocorrelation: L must be >= 1");
  if (n <= L)
    throw DimensionError("autocorrelation: series length must exceed L");

  double mean = 0.0;
  for (double x : series) mean += x;
  mean /= static_cast<double>(n);

  double denom = 0.0;
  for (double x : series) denom += (x - mean) * (x - mean);
  if (denom == 0.0)
    throw DegenerateSeriesError("autocorrelation: zero sample variance");

  std::vector<double> phi(L);
  for (std::size_t l = 1; l <= L; ++l) {
    double num = 0.0;
    for (std::size_t t = 0; t + l < n; ++t)
      num += (series[t] - mean) * (series[t + l] - mean);
    phi[l - 1] = num / denom;
  }
  return phi;
}

double inefficiency_factor(std::span<const double> series, std::size_t L) {
  const std::vector<double> phi = autocorrelation(series, L);
  double f = 1.0;
  for (double p : phi) f += 2.0 * p;
  return f;
}

double quantile_type7(std::span<const double> values, double p) {
  if (values.empty()) throw DimensionError("quantile_type7: empty input");
  if (!(p >= 0.0) || !(p <= 1.0))
    throw ParameterError("quantile_type7: p must lie in [0, 1]");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const double hh = p * static_cast<double>(v.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(hh));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double frac = hh - static_cast<double>(lo);
  return v[lo] + frac * (v[hi] - v[lo]);
}

FiveNumber five_number(std::span<const double> values) {
  if (values.empty()) throw DimensionError("five_number: empty input");
  return {quantile_type7(values, 0.0), quantile_type7(values, 0.25),
          quantile_type7(values, 0.5), quantile_type7(values, 0.75),
          quantile_type7(values, 1.0)};
}

std::vector<SummaryRow> posterior_summary(
    const ChainTrace& trace, const std::vector<std::string>& names) {
  std::vector<SummaryRow> rows;
  rows.reserve(names.size());
  for (const std::string& name : names) {
    const std::vector<double> col = trace.column(name);
    if (col.empty()) throw DimensionError("posterior_summary: empty trace");
    double mean = 0.0;
    for (double x : col) mean += x;
    mean /= static_cast<double>(col.size());
    rows.push_back({name, mean, quantile_type7(col, 0.05),
                    quantile_type7(col, 0.95)});
  }
  return rows;
}

std::vector<double> inefficiency_factors_serial(
    const ChainTrace& trace, std::span<const std::size_t> cols,
    std::size_t L) {
  std::vector<double> out(cols.size());
  for (std::size_t i = 0; i < cols.size(); ++i)
    out[i] = inefficiency_factor(trace.column(cols[i]), L);
  return out;
}

std::vector<double> inefficiency_factors_parallel(
    const ChainTrace& trace, std::span<const std::size_t> cols,
    std::size_t L) {
  std::vector<double> out(cols.size());
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(cols.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i)
    out[static_cast<std::size_t>(i)] =
        inefficiency_factor(trace.column(cols[static_cast<std::size_t>(i)]), L);
  return out;
}

namespace {

// "tau_12" -> "tau"; names without a trailing numeric suffix stand alone.
std::string block_of(const std::string& name) {
  const std::size_t us = name.rfind('_');
  if (us == std::string::npos || us + 1 == name.size()) return name;
  for (std::size_t i = us + 1; i < name.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(name[i]))) return name;
  return name.substr(0, us);
}

}  // namespace

EfficiencyReport efficiency_report(const ChainTrace& trace, std::size_t L) {
  if (trace.n_rows() < 2)
    throw DimensionError("efficiency_report: needs at least two rows");
  EfficiencyReport rep;
  rep.lag_cap = std::min(L, trace.n_rows() - 1);
  rep.params = trace.names();

  // A column pinned to a single value has no autocorrelation to sum; report
  // it as one draw's worth per draw instead of aborting the whole table.
  std::vector<std::size_t> live;
  rep.factors.assign(trace.n_cols(), 1.0);
  for (std::size_t c = 0; c < trace.n_cols(); ++c) {
    const std::vector<double> col = trace.column(c);
    double mean = 0.0;
    for (double v : col) mean += v;
    mean /= static_cast<double>(col.size());
    double ss = 0.0;
    for (double v : col) ss += (v - mean) * (v - mean);
    if (ss > 0.0) live.push_back(c);
  }
  const std::vector<double> live_factors =
      inefficiency_factors_parallel(trace, live, rep.lag_cap);
  for (std::size_t i = 0; i < live.size(); ++i)
    rep.factors[live[i]] = live_factors[i];

  // Preserve first-appearance order of blocks.
  std::vector<std::string> block_names;
  std::vector<std::vector<double>> block_vals;
  for (std::size_t c = 0; c < trace.n_cols(); ++c) {
    const std::string b = block_of(trace.names()[c]);
    std::size_t k = block_names.size();
    for (std::size_t i = 0; i < block_names.size(); ++i)
      if (block_names[i] == b) {
        k = i;
        break;
      }
    if (k == block_names.size()) {
      block_names.push_back(b);
      block_vals.emplace_back();
    }
    block_vals[k].push_back(rep.factors[c]);
  }
  for (std::size_t i = 0; i < block_names.size(); ++i)
    rep.blocks.push_back({block_names[i], five_number(block_vals[i])});
  return rep;
}

}  // namespace trendqp
