#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "trendqp/commands.hpp"

namespace {

// --set key=value pairs plus convenience flags, applied on top of the config
// file in the order given on the command line.
trendqp::Overrides to_overrides(const std::vector<std::string>& sets) {
  trendqp::Overrides out;
  for (const std::string& s : sets) {
    const std::size_t eq = s.find('=');
    if (eq == std::string::npos || eq == 0)
      throw CLI::ValidationError("--set", "expected key=value, got '" + s + "'");
    out.emplace_back(s.substr(0, eq), s.substr(eq + 1));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Bayesian trend estimation with bounded latent states: Gibbs sampling "
      "with mode-based or QP-based Gaussian proposals"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("trendqp ") + trendqp::kVersion);

  std::string config_path;
  std::vector<std::string> sets;
  trendqp::BenchSpec bench;
  trendqp::GenDataSpec gen;
  std::string gen_out;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", config_path, "Config file (key = value lines)")
        ->required();
    sub->add_option("--set", sets,
                    "Override a config key, e.g. --set seed=42 (repeatable)");
  };

  CLI::App* run = app.add_subcommand(
      "run", "Run one chain; writes trace/summary/efficiency/manifest");
  add_common(run);

  CLI::App* compare = app.add_subcommand(
      "compare",
      "Run both proposal strategies on the same seed and data; writes "
      "comparison.csv");
  add_common(compare);

  CLI::App* bench_cmd = app.add_subcommand(
      "bench", "Time the box-QP solve across problem sizes; writes bench.csv");
  add_common(bench_cmd);
  bench_cmd->add_option("--t-min", bench.t_min, "Smallest problem size");
  bench_cmd->add_option("--t-max", bench.t_max, "Largest problem size");
  bench_cmd->add_option("--t-step", bench.t_step, "Size increment");
  bench_cmd->add_option("--repeats", bench.repeats,
                        "Timed solves per size (median reported)");

  CLI::App* gen_cmd = app.add_subcommand(
      "gen-data", "Write a synthetic CPI level file in the input format");
  gen_cmd->add_option("-o,--out", gen_out, "Output CSV path")->required();
  gen_cmd->add_option("--n-obs", gen.n_obs, "Inflation observations to simulate");
  gen_cmd->add_option("--seed", gen.seed, "Simulation seed");
  gen_cmd->add_option("--start", gen.start, "First quarter label");
  gen_cmd->add_option("--level0", gen.level0, "Initial CPI level");
  gen_cmd->add_option("--tau0", gen.tau0, "Trend start");
  gen_cmd->add_option("--rho", gen.rho, "Noise persistence");
  gen_cmd->add_option("--sigma2", gen.sigma2, "Noise innovation variance");
  gen_cmd->add_option("--omega2", gen.omega2, "Trend increment variance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return trendqp::kExitConfig;
  }

  try {
    if (run->parsed()) return trendqp::cmd_run(config_path, to_overrides(sets));
    if (compare->parsed())
      return trendqp::cmd_compare(config_path, to_overrides(sets));
    if (bench_cmd->parsed())
      return trendqp::cmd_bench_qp(config_path, to_overrides(sets), bench);
    if (gen_cmd->parsed()) return trendqp::cmd_gen_data(gen_out, gen);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return trendqp::kExitConfig;
  }
  return trendqp::kExitConfig;
}
