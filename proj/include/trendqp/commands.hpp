#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "trendqp/config.hpp"

namespace trendqp {

inline constexpr const char* kVersion = "0.1.0";

/// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitRuntime = 4;

struct BenchRow {
  std::size_t T = 0;
  double median_seconds = 0.0;
  double mean_iterations = 0.0;
  double max_kkt = 0.0;
};

struct BenchSpec {
  std::size_t t_min = 50;
  std::size_t t_max = 550;
  std::size_t t_step = 50;
  std::size_t repeats = 5;
};

/// Core of the benchmark subcommand: for each T builds the trend-posterior
/// precision and mean from the first T observations of the configured data,
/// solves the box QP with a discarded warm-up plus `repeats` timed solves,
/// and reports the median wall time per T. Throws on bad config/data.
std::vector<BenchRow> run_qp_bench(const FileConfig& cfg,
                                   const BenchSpec& spec);

/// Full estimation run: loads data, runs the chain, writes trace.csv,
/// summary.csv, efficiency.csv, and manifest.txt into out_dir. Returns an
/// exit code and prints errors to stderr instead of throwing.
int cmd_run(const std::string& config_path, const Overrides& overrides);

/// Runs both proposal strategies on the same data and seed and writes
/// comparison.csv: per-timepoint posterior-mean trends, their absolute
/// difference, and per-block inefficiency five-number rows per strategy.
int cmd_compare(const std::string& config_path, const Overrides& overrides);

/// Benchmark wrapper: writes bench.csv (T,median_seconds,mean_iterations)
/// into out_dir.
int cmd_bench_qp(const std::string& config_path, const Overrides& overrides,
                 const BenchSpec& spec);

struct GenDataSpec {
  std::size_t n_obs = 600;    // inflation observations; levels = n_obs + 1
  std::uint64_t seed = 7;
  std::string start = "1947Q1";
  double level0 = 21.48;
  double tau0 = 5.0;
  double rho = 0.5;
  double sigma2 = 1.0;
  double omega2 = 0.0625;
};

/// Writes a synthetic CPI level file in the input format: simulates the
/// local-level model's inflation path and compounds it into levels.
int cmd_gen_data(const std::string& path, const GenDataSpec& spec);

}  // namespace trendqp
