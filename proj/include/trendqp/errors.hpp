#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace trendqp {

/// Dimension or shape mismatch between containers.
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A distribution or model parameter outside its admissible range.
struct ParameterError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Malformed or inconsistent input data. `line` is 1-based when known, 0 otherwise.
struct DataError : std::runtime_error {
  explicit DataError(const std::string& msg, std::size_t line_no = 0)
      : std::runtime_error(msg), line(line_no) {}
  std::size_t line;
};

/// Invalid or incomplete run configuration.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Cholesky pivot failure; `index` is the 0-based row of the failing pivot.
struct NotPositiveDefiniteError : std::runtime_error {
  explicit NotPositiveDefiniteError(std::size_t idx)
      : std::runtime_error("matrix is not positive definite (pivot at index " +
                           std::to_string(idx) + ")"),
        index(idx) {}
  std::size_t index;
};

/// A point violates its box constraints; lists the offending coordinates.
struct InfeasibleError : std::runtime_error {
  explicit InfeasibleError(std::vector<std::size_t> idx)
      : std::runtime_error(describe(idx)), indices(std::move(idx)) {}
  std::vector<std::size_t> indices;

 private:
  static std::string describe(const std::vector<std::size_t>& idx) {
    std::string s = "point violates bounds at indices:";
    for (std::size_t i : idx) s += " " + std::to_string(i);
    return s;
  }
};

/// An iterative method hit its cap. Payload (best iterate) is attached by the
/// throwing site via the derived classes in qp_box.hpp / state_gaussian.hpp.
struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A series with zero sample variance where autocorrelations are undefined.
struct DegenerateSeriesError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace trendqp
