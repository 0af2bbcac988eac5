#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "trendqp/trace.hpp"

namespace trendqp {

/// Sample autocorrelations phi_1..phi_L with the full-sample variance in the
/// denominator. Requires length > L >= 1 and nonzero sample variance
/// (DegenerateSeriesError otherwise).
std::vector<double> autocorrelation(std::span<const double> series,
                                    std::size_t L);

/// 1 + 2 * sum of the first L sample autocorrelations: the number of
/// correlated draws worth one independent draw, matching the variance
/// inflation of a correlated sample mean. Truncated sums can go below 1 or
/// even negative; reported as computed.
double inefficiency_factor(std::span<const double> series, std::size_t L = 100);

struct FiveNumber {
  double min, q1, median, q3, max;
};

/// Linear-interpolation (type 7) quantile of the values; p in [0, 1].
double quantile_type7(std::span<const double> values, double p);

FiveNumber five_number(std::span<const double> values);

struct SummaryRow {
  std::string name;
  double mean, q05, q95;
};

/// Mean and central 90% interval per named column of the trace.
std::vector<SummaryRow> posterior_summary(const ChainTrace& trace,
                                          const std::vector<std::string>& names);

/// Inefficiency factors for the selected columns; plain sequential loop,
/// kept as the reference the parallel variant is checked against.
std::vector<double> inefficiency_factors_serial(
    const ChainTrace& trace, std::span<const std::size_t> cols, std::size_t L);

/// Same factors computed with OpenMP across columns. Each column's
/// computation is untouched, so the output is bit-identical to the serial
/// reference in any schedule.
std::vector<double> inefficiency_factors_parallel(
    const ChainTrace& trace, std::span<const std::size_t> cols, std::size_t L);

struct EfficiencyReport {
  std::vector<std::string> params;
  std::vector<double> factors;
  struct BlockSummary {
    std::string block;
    FiveNumber summary;
  };
  std::vector<BlockSummary> blocks;
  std::size_t lag_cap = 100;
};

/// Factors for every column plus five-number summaries per block, where a
/// block groups columns sharing a name prefix before a numeric suffix
/// ("tau_12" -> "tau"); columns without such a suffix form their own block.
EfficiencyReport efficiency_report(const ChainTrace& trace,
                                   std::size_t L = 100);

}  // namespace trendqp
