#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace trendqp {

/// Counters for one sampler block, accumulated over a whole run.
struct BlockStats {
  std::string name;
  std::size_t steps = 0;
  std::size_t accepts = 0;
  std::size_t ar_draws_total = 0;
  std::size_t armh_fallbacks = 0;    // accept-reject phase exhausted
  std::size_t qp_fallbacks = 0;      // QP solve failed; mode mean used
  std::size_t newton_fallbacks = 0;  // mode search needed a repair
  double qp_active_fraction_sum = 0.0;

  double acceptance_rate() const;
  double mean_ar_draws() const;
  double mean_qp_active_fraction() const;
};

/// Column-named draw storage: one row per retained sweep, row-major.
class ChainTrace {
 public:
  ChainTrace() = default;
  explicit ChainTrace(std::vector<std::string> names);

  std::size_t n_rows() const { return n_rows_; }
  std::size_t n_cols() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }

  void reserve_rows(std::size_t n);
  void push_row(std::span<const double> row);

  /// Throws ParameterError on an unknown name.
  std::size_t col_index(const std::string& name) const;
  double at(std::size_t row, std::size_t col) const;
  std::span<const double> row(std::size_t r) const;
  std::vector<double> column(std::size_t c) const;
  std::vector<double> column(const std::string& name) const;

  /// Copy holding rows [start, n_rows) with the same columns and block
  /// counters; used to discard warm-up draws before summarizing.
  ChainTrace from_row(std::size_t start) const;

  std::vector<BlockStats> blocks;

 private:
  std::vector<std::string> names_;
  std::vector<double> data_;
  std::size_t n_rows_ = 0;
};

}  // namespace trendqp
