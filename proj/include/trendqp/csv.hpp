#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace trendqp {

/// Quarterly CPI levels with their YYYYQn labels; dates strictly increasing,
/// levels strictly positive.
struct CpiSeries {
  std::vector<std::string> dates;
  std::vector<double> levels;
};

/// Shortest decimal string that round-trips the exact double (17 significant
/// digits); every numeric field in result files goes through this.
std::string format_double(double v);

/// Strict counterpart of format_double: the whole field must parse.
double parse_double_field(const std::string& s);

/// "1947Q1" -> 4 * 1947 + 0; total order on quarter labels. Throws DataError
/// on a malformed label.
long quarter_index(const std::string& label);

/// Label of the quarter `steps` after `label`.
std::string advance_quarter(const std::string& label, long steps);

/// Reads `date,cpi` rows. Errors carry the 1-based line number: malformed
/// rows, non-positive levels, and out-of-order dates all reject the file.
CpiSeries load_cpi_csv(const std::string& path);

void write_cpi_csv(const std::string& path, const CpiSeries& series);

/// Sub-series with labels in [start, end] (inclusive; either may be empty to
/// leave that side open). Throws DataError if the window selects nothing.
CpiSeries slice_series(const CpiSeries& series, const std::string& start,
                       const std::string& end);

/// Header plus numeric rows, every cell through format_double.
void write_numeric_csv(const std::string& path, const std::string& header,
                       const std::vector<std::vector<double>>& rows);

}  // namespace trendqp
