#include "trendqp/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <span>

#include "trendqp/csv.hpp"
#include "trendqp/diagnostics.hpp"
#include "trendqp/errors.hpp"
#include "trendqp/qp_box.hpp"

namespace trendqp {

namespace {

// Everything behind the CLI funnels through this: errors become messages on
// stderr plus the documented exit codes instead of escaping exceptions.
template <typename Fn>
int guarded(Fn&& fn) {
  try {
    fn();
    return kExitOk;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DataError& e) {
    if (e.line > 0)
      std::cerr << "data error (line " << e.line << "): " << e.what() << '\n';
    else
      std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

std::vector<double> load_series(const FileConfig& cfg,
                                std::size_t* data_rows) {
  if (cfg.data_path.empty())
    throw ConfigError("no data file configured (key 'data')");
  CpiSeries s = load_cpi_csv(cfg.data_path);
  if (!cfg.sample_start.empty() || !cfg.sample_end.empty())
    s = slice_series(s, cfg.sample_start, cfg.sample_end);
  if (data_rows) *data_rows = s.levels.size();
  return transform_inflation(s.levels);
}

double prior_mean(double nu, double S) { return nu > 1.0 ? S / (nu - 1.0) : S; }

std::string iso_utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

void write_trace_csv(const std::string& path, const ChainTrace& trace) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  for (std::size_t c = 0; c < trace.n_cols(); ++c) {
    if (c) out << ',';
    out << trace.names()[c];
  }
  out << '\n';
  for (std::size_t r = 0; r < trace.n_rows(); ++r) {
    const std::span<const double> row = trace.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << ',';
      out << format_double(row[c]);
    }
    out << '\n';
  }
  if (!out) throw DataError("write failed for '" + path + "'");
}

void write_summary_csv(const std::string& path, const ChainTrace& trace) {
  const std::vector<SummaryRow> rows =
      posterior_summary(trace, trace.names());
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << "param,mean,q05,q95\n";
  for (const SummaryRow& r : rows)
    out << r.name << ',' << format_double(r.mean) << ','
        << format_double(r.q05) << ',' << format_double(r.q95) << '\n';
  if (!out) throw DataError("write failed for '" + path + "'");
}

void write_efficiency_csv(const std::string& path,
                          const EfficiencyReport& rep) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << "param,ineff_factor\n";
  for (std::size_t i = 0; i < rep.params.size(); ++i)
    out << rep.params[i] << ',' << format_double(rep.factors[i]) << '\n';
  out << "block,min,q1,median,q3,max\n";
  for (const auto& b : rep.blocks)
    out << b.block << ',' << format_double(b.summary.min) << ','
        << format_double(b.summary.q1) << ',' << format_double(b.summary.median)
        << ',' << format_double(b.summary.q3) << ','
        << format_double(b.summary.max) << '\n';
  if (!out) throw DataError("write failed for '" + path + "'");
}

void write_block_stats(std::ofstream& out, const BlockStats& b) {
  const std::string p = "block_" + b.name + "_";
  out << p << "steps = " << b.steps << '\n';
  out << p << "acceptance_rate = " << format_double(b.acceptance_rate())
      << '\n';
  out << p << "mean_ar_draws = " << format_double(b.mean_ar_draws()) << '\n';
  out << p << "armh_fallbacks = " << b.armh_fallbacks << '\n';
  out << p << "qp_fallbacks = " << b.qp_fallbacks << '\n';
  out << p << "newton_fallbacks = " << b.newton_fallbacks << '\n';
  out << p << "mean_qp_active_fraction = "
      << format_double(b.mean_qp_active_fraction()) << '\n';
}

void write_manifest(const std::string& path, const FileConfig& cfg,
                    const std::string& command, double wall_seconds,
                    const ChainTrace& kept, std::size_t data_rows,
                    std::size_t sample_size) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << "version = " << kVersion << '\n';
  out << "command = " << command << '\n';
  for (const auto& [k, v] : config_items(cfg)) out << k << " = " << v << '\n';
  out << "data_rows = " << data_rows << '\n';
  out << "sample_size = " << sample_size << '\n';
  out << "retained_draws = " << kept.n_rows() << '\n';
  out << "wall_seconds = " << format_double(wall_seconds) << '\n';
  out << "timestamp_utc = " << iso_utc_now() << '\n';
  for (const BlockStats& b : kept.blocks) write_block_stats(out, b);
  if (!out) throw DataError("write failed for '" + path + "'");
}

std::string join_path(const std::string& dir, const char* name) {
  return (std::filesystem::path(dir) / name).string();
}

}  // namespace

int cmd_run(const std::string& config_path, const Overrides& overrides) {
  return guarded([&] {
    const FileConfig cfg = load_config(config_path, overrides);
    std::size_t data_rows = 0;
    const std::vector<double> y = load_series(cfg, &data_rows);

    const auto t0 = std::chrono::steady_clock::now();
    const ChainTrace full = run_chain(cfg.run, y);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    const ChainTrace kept = full.from_row(cfg.run.burn_in);

    std::filesystem::create_directories(cfg.out_dir);
    write_trace_csv(join_path(cfg.out_dir, "trace.csv"), kept);
    write_summary_csv(join_path(cfg.out_dir, "summary.csv"), kept);
    write_efficiency_csv(join_path(cfg.out_dir, "efficiency.csv"),
                         efficiency_report(kept, 100));
    write_manifest(join_path(cfg.out_dir, "manifest.txt"), cfg, "run", wall,
                   kept, data_rows, y.size());
  });
}

int cmd_compare(const std::string& config_path, const Overrides& overrides) {
  return guarded([&] {
    const FileConfig cfg = load_config(config_path, overrides);
    const std::vector<double> y = load_series(cfg, nullptr);

    RunConfig mode_cfg = cfg.run;
    mode_cfg.strategy = ProposalStrategy::Mode;
    RunConfig qp_cfg = cfg.run;
    qp_cfg.strategy = ProposalStrategy::QuadProg;

    const ChainTrace mode_trace =
        run_chain(mode_cfg, y).from_row(cfg.run.burn_in);
    const ChainTrace qp_trace = run_chain(qp_cfg, y).from_row(cfg.run.burn_in);

    std::size_t T = 0;
    while (T < mode_trace.n_cols() &&
           mode_trace.names()[T] == "tau_" + std::to_string(T + 1))
      ++T;

    std::filesystem::create_directories(cfg.out_dir);
    const std::string path = join_path(cfg.out_dir, "comparison.csv");
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << "t,trend_mode,trend_quadprog,abs_diff\n";
    for (std::size_t t = 0; t < T; ++t) {
      double ma = 0.0, mb = 0.0;
      for (std::size_t r = 0; r < mode_trace.n_rows(); ++r)
        ma += mode_trace.at(r, t);
      for (std::size_t r = 0; r < qp_trace.n_rows(); ++r)
        mb += qp_trace.at(r, t);
      ma /= static_cast<double>(mode_trace.n_rows());
      mb /= static_cast<double>(qp_trace.n_rows());
      out << (t + 1) << ',' << format_double(ma) << ',' << format_double(mb)
          << ',' << format_double(std::fabs(ma - mb)) << '\n';
    }
    out << "strategy,block,min,q1,median,q3,max\n";
    const EfficiencyReport reps[2] = {efficiency_report(mode_trace, 100),
                                      efficiency_report(qp_trace, 100)};
    const char* labels[2] = {"mode", "quadprog"};
    for (int i = 0; i < 2; ++i)
      for (const auto& b : reps[i].blocks)
        out << labels[i] << ',' << b.block << ','
            << format_double(b.summary.min) << ',' << format_double(b.summary.q1)
            << ',' << format_double(b.summary.median) << ','
            << format_double(b.summary.q3) << ',' << format_double(b.summary.max)
            << '\n';
    if (!out) throw DataError("write failed for '" + path + "'");
  });
}

std::vector<BenchRow> run_qp_bench(const FileConfig& cfg,
                                   const BenchSpec& spec) {
  if (spec.t_min == 0 || spec.t_max < spec.t_min || spec.t_step == 0 ||
      spec.repeats == 0)
    throw ConfigError("bench: need 0 < t_min <= t_max, t_step > 0, repeats > 0");
  const std::vector<double> y = load_series(cfg, nullptr);
  if (y.size() < spec.t_max)
    throw DataError("benchmark needs " + std::to_string(spec.t_max) +
                    " observations, data has " + std::to_string(y.size()));

  const UcArHyper& h = cfg.run.ucar;
  const double sigma2 = prior_mean(h.nu_sigma2, h.S_sigma2);
  const double omega2 = prior_mean(h.nu_omega2, h.S_omega2);
  const double rho = 0.5;  // fixed representative persistence for the bench

  std::vector<BenchRow> rows;
  for (std::size_t T = spec.t_min; T <= spec.t_max; T += spec.t_step) {
    const GaussianApprox sys = local_level_system(
        std::span<const double>(y.data(), T), h.a0, rho, sigma2, omega2);
    const Box box = Box::uniform(T, cfg.run.ucar_a_tau, cfg.run.ucar_b_tau);
    const BoxQp qp(sys.precision(), sys.mean(), box);

    solve_box_qp(qp);  // warm-up, discarded
    std::vector<double> times;
    double iter_sum = 0.0, kkt_max = 0.0;
    for (std::size_t rep = 0; rep < spec.repeats; ++rep) {
      const QpResult r = solve_box_qp(qp);
      times.push_back(r.elapsed_seconds);
      iter_sum += static_cast<double>(r.iterations);
      kkt_max = std::max(kkt_max, r.kkt_residual);
    }
    rows.push_back({T, quantile_type7(times, 0.5),
                    iter_sum / static_cast<double>(spec.repeats), kkt_max});
  }
  return rows;
}

int cmd_bench_qp(const std::string& config_path, const Overrides& overrides,
                 const BenchSpec& spec) {
  return guarded([&] {
    const FileConfig cfg = load_config(config_path, overrides);
    const std::vector<BenchRow> rows = run_qp_bench(cfg, spec);
    std::filesystem::create_directories(cfg.out_dir);
    std::vector<std::vector<double>> cells;
    for (const BenchRow& r : rows)
      cells.push_back({static_cast<double>(r.T), r.median_seconds,
                       r.mean_iterations});
    write_numeric_csv(join_path(cfg.out_dir, "bench.csv"),
                      "T,median_seconds,mean_iterations", cells);
  });
}

int cmd_gen_data(const std::string& path, const GenDataSpec& spec) {
  return guarded([&] {
    if (spec.n_obs == 0) throw ConfigError("gen-data: n_obs must be positive");
    if (!(spec.level0 > 0.0))
      throw ConfigError("gen-data: level0 must be positive");
    if (!(std::fabs(spec.rho) < 1.0))
      throw ConfigError("gen-data: |rho| must be below 1");
    if (!(spec.sigma2 > 0.0) || !(spec.omega2 > 0.0))
      throw ConfigError("gen-data: variances must be positive");

    RngStream rng(spec.seed);
    UcArState st;
    st.tau0 = spec.tau0;
    st.rho = spec.rho;
    st.sigma2 = spec.sigma2;
    st.omega2 = spec.omega2;
    ucar_draw_trend(st, spec.n_obs, Box::unbounded(spec.n_obs), rng);
    const std::vector<double> y = ucar_draw_data(st, rng);

    CpiSeries series;
    series.dates.push_back(spec.start);
    series.levels.push_back(spec.level0);
    for (std::size_t t = 0; t < y.size(); ++t) {
      series.dates.push_back(
          advance_quarter(spec.start, static_cast<long>(t) + 1));
      series.levels.push_back(series.levels.back() * std::exp(y[t] / 400.0));
    }
    write_cpi_csv(path, series);
  });
}

}  // namespace trendqp
