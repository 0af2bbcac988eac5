#include "trendqp/csv.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>

#include "trendqp/errors.hpp"

namespace trendqp {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_double_field(const std::string& s) {
  if (s.empty()) throw DataError("empty numeric field");
  const char* begin = s.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end != begin + s.size())
    throw DataError("malformed numeric field '" + s + "'");
  return v;
}

long quarter_index(const std::string& label) {
  // YYYYQn with a 4-digit year and n in 1..4.
  bool ok = label.size() == 6 && label[4] == 'Q';
  for (std::size_t i = 0; ok && i < 4; ++i)
    ok = std::isdigit(static_cast<unsigned char>(label[i])) != 0;
  ok = ok && label[5] >= '1' && label[5] <= '4';
  if (!ok) throw DataError("malformed quarter label '" + label + "'");
  const long year = std::stol(label.substr(0, 4));
  return 4 * year + (label[5] - '1');
}

std::string advance_quarter(const std::string& label, long steps) {
  const long idx = quarter_index(label) + steps;
  if (idx < 0 || idx >= 40000) throw DataError("quarter label out of range");
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04ldQ%ld", idx / 4, idx % 4 + 1);
  return buf;
}

namespace {

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

CpiSeries load_cpi_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open data file '" + path + "'");

  std::string line;
  if (!std::getline(in, line))
    throw DataError("empty data file '" + path + "'", 1);
  if (strip_cr(line) != "date,cpi")
    throw DataError("expected header 'date,cpi'", 1);

  CpiSeries series;
  std::size_t line_no = 1;
  long prev_idx = -1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const std::size_t comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos)
      throw DataError("expected exactly two fields", line_no);
    const std::string date = line.substr(0, comma);
    const std::string level_str = line.substr(comma + 1);
    long idx;
    double level;
    try {
      idx = quarter_index(date);
      level = parse_double_field(level_str);
    } catch (const DataError& e) {
      throw DataError(std::string(e.what()), line_no);
    }
    if (!(level > 0.0) || !std::isfinite(level))
      throw DataError("level must be positive, got '" + level_str + "'",
                      line_no);
    if (idx <= prev_idx)
      throw DataError("dates out of order at '" + date + "'", line_no);
    prev_idx = idx;
    series.dates.push_back(date);
    series.levels.push_back(level);
  }
  return series;
}

void write_cpi_csv(const std::string& path, const CpiSeries& series) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << "date,cpi\n";
  for (std::size_t i = 0; i < series.dates.size(); ++i)
    out << series.dates[i] << ',' << format_double(series.levels[i]) << '\n';
  if (!out) throw DataError("write failed for '" + path + "'");
}

CpiSeries slice_series(const CpiSeries& series, const std::string& start,
                       const std::string& end) {
  const long lo = start.empty() ? std::numeric_limits<long>::min()
                                : quarter_index(start);
  const long hi =
      end.empty() ? std::numeric_limits<long>::max() : quarter_index(end);
  CpiSeries out;
  for (std::size_t i = 0; i < series.dates.size(); ++i) {
    const long idx = quarter_index(series.dates[i]);
    if (idx >= lo && idx <= hi) {
      out.dates.push_back(series.dates[i]);
      out.levels.push_back(series.levels[i]);
    }
  }
  if (out.dates.empty())
    throw DataError("sample window [" + start + ", " + end +
                    "] selects no observations");
  return out;
}

void write_numeric_csv(const std::string& path, const std::string& header,
                       const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << header << '\n';
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << ',';
      out << format_double(row[c]);
    }
    out << '\n';
  }
  if (!out) throw DataError("write failed for '" + path + "'");
}

}  // namespace trendqp
