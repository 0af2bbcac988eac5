#pragma once

#include <string>
#include <utility>
#include <vector>

#include "trendqp/sampler.hpp"

namespace trendqp {

/// A run configuration as resolved from the config file plus command-line
/// overrides: the sampler settings together with the file-level concerns
/// (data location, output directory, sample window).
struct FileConfig {
  RunConfig run;
  std::string data_path;
  std::string out_dir = ".";
  std::string sample_start;  // empty = open
  std::string sample_end;
  bool have_a_tau = false;   // bounded model requires explicit trend bounds
  bool have_b_tau = false;
};

using Overrides = std::vector<std::pair<std::string, std::string>>;

/// Parses `key = value` lines ('#' comments, blank lines allowed; duplicate
/// keys rejected), applies overrides on top (overrides win), and materializes
/// the typed configuration. Unknown keys, unparseable values, and a bounded
/// model without both a_tau and b_tau are ConfigErrors.
FileConfig load_config(const std::string& path, const Overrides& overrides);

/// Same resolution from in-memory text; the file loader wraps this.
FileConfig resolve_config(const std::string& text, const Overrides& overrides);

/// Every key in config-file syntax with its resolved value, in a fixed
/// order; the manifest embeds this so a run can be reproduced from it.
std::vector<std::pair<std::string, std::string>> config_items(
    const FileConfig& cfg);

}  // namespace trendqp
