#include "trendqp/trace.hpp"

#include "trendqp/errors.hpp"

namespace trendqp {

double BlockStats::acceptance_rate() const {
  return steps == 0 ? 0.0
                    : static_cast<double>(accepts) / static_cast<double>(steps);
}

double BlockStats::mean_ar_draws() const {
  return steps == 0 ? 0.0
                    : static_cast<double>(ar_draws_total) /
                          static_cast<double>(steps);
}

double BlockStats::mean_qp_active_fraction() const {
  return steps == 0 ? 0.0 : qp_active_fraction_sum / static_cast<double>(steps);
}

ChainTrace::ChainTrace(std::vector<std::string> names)
    : names_(std::move(names)) {
  if (names_.empty()) throw DimensionError("ChainTrace: needs at least one column");
}

void ChainTrace::reserve_rows(std::size_t n) { data_.reserve(n * n_cols()); }

void ChainTrace::push_row(std::span<const double> row) {
  if (row.size() != n_cols())
    throw DimensionError("ChainTrace::push_row: width mismatch");
  data_.insert(data_.end(), row.begin(), row.end());
  ++n_rows_;
}

std::size_t ChainTrace::col_index(const std::string& name) const {
  for (std::size_t c = 0; c < names_.size(); ++c)
    if (names_[c] == name) return c;
  throw ParameterError("ChainTrace: unknown column '" + name + "'");
}

double ChainTrace::at(std::size_t row, std::size_t col) const {
  if (row >= n_rows_ || col >= n_cols())
    throw DimensionError("ChainTrace::at: index out of range");
  return data_[row * n_cols() + col];
}

std::span<const double> ChainTrace::row(std::size_t r) const {
  if (r >= n_rows_) throw DimensionError("ChainTrace::row: index out of range");
  return {data_.data() + r * n_cols(), n_cols()};
}

std::vector<double> ChainTrace::column(std::size_t c) const {
  if (c >= n_cols())
    throw DimensionError("ChainTrace::column: index out of range");
  std::vector<double> out(n_rows_);
  for (std::size_t r = 0; r < n_rows_; ++r) out[r] = data_[r * n_cols() + c];
  return out;
}

std::vector<double> ChainTrace::column(const std::string& name) const {
  return column(col_index(name));
}

ChainTrace ChainTrace::from_row(std::size_t start) const {
  if (start > n_rows_)
    throw DimensionError("ChainTrace::from_row: start past end");
  ChainTrace out(names_);
  out.reserve_rows(n_rows_ - start);
  for (std::size_t r = start; r < n_rows_; ++r) out.push_row(row(r));
  out.blocks = blocks;
  return out;
}

}  // namespace trendqp
