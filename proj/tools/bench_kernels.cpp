#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <omp.h>

#include "CLI11.hpp"
#include "trendqp/diagnostics.hpp"
#include "trendqp/rng.hpp"
#include "trendqp/trace.hpp"

namespace {

using trendqp::ChainTrace;

// Synthetic trace of AR(1) columns; heavy enough that the per-column
// autocovariance sums dominate the timing.
ChainTrace make_trace(std::size_t rows, std::size_t cols, double phi,
                      std::uint64_t seed) {
  std::vector<std::string> names;
  for (std::size_t c = 0; c < cols; ++c)
    names.push_back("x_" + std::to_string(c + 1));
  ChainTrace trace(names);
  trace.reserve_rows(rows);

  trendqp::RngStream rng(seed);
  std::vector<double> state(cols, 0.0);
  const double scale = std::sqrt(1.0 - phi * phi);
  std::vector<double> row(cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      state[c] = phi * state[c] + scale * rng.normal();
      row[c] = state[c];
    }
    trace.push_row(row);
  }
  return trace;
}

template <typename Fn>
double best_seconds(Fn&& fn, std::size_t repeats) {
  double best = 1e300;
  for (std::size_t i = 0; i < repeats; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const double s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    best = std::min(best, s);
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Compare the serial and OpenMP inefficiency-factor kernels on a "
      "synthetic trace"};
  std::size_t rows = 20000, cols = 400, repeats = 3, lag = 100;
  app.add_option("--rows", rows, "Draws per column");
  app.add_option("--cols", cols, "Columns");
  app.add_option("--repeats", repeats, "Timing repeats (best reported)");
  app.add_option("--lag", lag, "Autocorrelation lag cap");
  CLI11_PARSE(app, argc, argv);

  const ChainTrace trace = make_trace(rows, cols, 0.95, 20240901);
  std::vector<std::size_t> idx(cols);
  for (std::size_t c = 0; c < cols; ++c) idx[c] = c;

  std::vector<double> serial, parallel;
  const double ts = best_seconds(
      [&] { serial = trendqp::inefficiency_factors_serial(trace, idx, lag); },
      repeats);
  const double tp = best_seconds(
      [&] {
        parallel = trendqp::inefficiency_factors_parallel(trace, idx, lag);
      },
      repeats);

  bool identical = serial.size() == parallel.size();
  for (std::size_t c = 0; identical && c < serial.size(); ++c)
    identical = serial[c] == parallel[c];

  std::printf("rows=%zu cols=%zu lag=%zu threads=%d\n", rows, cols, lag,
              omp_get_max_threads());
  std::printf("serial_seconds=%.6f\n", ts);
  std::printf("parallel_seconds=%.6f\n", tp);
  std::printf("speedup=%.2fx\n", ts / tp);
  std::printf("outputs_bit_identical=%s\n", identical ? "yes" : "no");
  return identical ? 0 : 1;
}
