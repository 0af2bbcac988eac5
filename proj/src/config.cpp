#include "trendqp/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "trendqp/csv.hpp"
#include "trendqp/errors.hpp"

namespace trendqp {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_num(const std::string& key, const std::string& v) {
  if (v == "inf" || v == "+inf") return std::numeric_limits<double>::infinity();
  if (v == "-inf") return -std::numeric_limits<double>::infinity();
  const char* begin = v.c_str();
  char* end = nullptr;
  const double x = std::strtod(begin, &end);
  if (v.empty() || end != begin + v.size() || std::isnan(x))
    throw ConfigError("config key '" + key + "': bad number '" + v + "'");
  return x;
}

std::size_t parse_count(const std::string& key, const std::string& v) {
  const double x = parse_num(key, v);
  if (x < 0 || x != std::floor(x) || x > 1e15)
    throw ConfigError("config key '" + key +
                      "': expected a nonnegative integer, got '" + v + "'");
  return static_cast<std::size_t>(x);
}

std::uint64_t parse_seed(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const unsigned long long x = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return static_cast<std::uint64_t>(x);
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': bad seed '" + v + "'");
  }
}

void apply_key(FileConfig& cfg, const std::string& key,
               const std::string& value) {
  RunConfig& r = cfg.run;
  if (key == "model") {
    if (value == "ucar")
      r.model = Model::UcAr;
    else if (value == "bounded")
      r.model = Model::Bounded;
    else
      throw ConfigError("model must be 'ucar' or 'bounded', got '" + value +
                        "'");
  } else if (key == "method") {
    if (value == "mode")
      r.strategy = ProposalStrategy::Mode;
    else if (value == "quadprog")
      r.strategy = ProposalStrategy::QuadProg;
    else
      throw ConfigError("method must be 'mode' or 'quadprog', got '" + value +
                        "'");
  } else if (key == "precision_at") {
    if (value == "mode")
      r.precision_at = PrecisionAt::Mode;
    else if (value == "qp_solution")
      r.precision_at = PrecisionAt::QpSolution;
    else
      throw ConfigError("precision_at must be 'mode' or 'qp_solution', got '" +
                        value + "'");
  } else if (key == "pi0_policy") {
    if (value == "from_data")
      r.pi0_policy = PiZeroPolicy::FromData;
    else if (value == "drop_first")
      r.pi0_policy = PiZeroPolicy::DropFirst;
    else
      throw ConfigError("pi0_policy must be 'from_data' or 'drop_first'");
  } else if (key == "lambda") {
    r.armh.lambda = parse_num(key, value);
  } else if (key == "max_ar_draws") {
    r.armh.max_ar_draws = parse_count(key, value);
  } else if (key == "n_draws") {
    r.n_draws = parse_count(key, value);
  } else if (key == "burn_in") {
    r.burn_in = parse_count(key, value);
  } else if (key == "seed") {
    r.seed = parse_seed(key, value);
  } else if (key == "data") {
    cfg.data_path = value;
  } else if (key == "out_dir") {
    cfg.out_dir = value;
  } else if (key == "sample_start") {
    cfg.sample_start = value;
  } else if (key == "sample_end") {
    cfg.sample_end = value;
  } else if (key == "a_tau") {
    const double v = parse_num(key, value);
    r.ucar_a_tau = Bound::of(v);
    r.bounded.a_tau = Bound::of(v);
    cfg.have_a_tau = true;
  } else if (key == "b_tau") {
    const double v = parse_num(key, value);
    r.ucar_b_tau = Bound::of(v);
    r.bounded.b_tau = Bound::of(v);
    cfg.have_b_tau = true;
  } else if (key == "a_rho") {
    r.bounded.a_rho = Bound::of(parse_num(key, value));
  } else if (key == "b_rho") {
    r.bounded.b_rho = Bound::of(parse_num(key, value));
  } else if (key == "a0") {
    r.ucar.a0 = parse_num(key, value);
  } else if (key == "b0") {
    r.ucar.b0 = parse_num(key, value);
  } else if (key == "nu_sigma2") {
    r.ucar.nu_sigma2 = parse_num(key, value);
  } else if (key == "S_sigma2") {
    r.ucar.S_sigma2 = parse_num(key, value);
  } else if (key == "nu_omega2") {
    r.ucar.nu_omega2 = parse_num(key, value);
  } else if (key == "S_omega2") {
    r.ucar.S_omega2 = parse_num(key, value);
  } else if (key == "tau0") {
    r.bounded.tau0 = parse_num(key, value);
  } else if (key == "rho0") {
    r.bounded.rho0 = parse_num(key, value);
  } else if (key == "h0") {
    r.bounded.h0 = parse_num(key, value);
  } else if (key == "omega_tau2") {
    r.bounded.omega_tau2 = parse_num(key, value);
  } else if (key == "omega_rho2") {
    r.bounded.omega_rho2 = parse_num(key, value);
  } else if (key == "omega_h2") {
    r.bounded.omega_h2 = parse_num(key, value);
  } else if (key == "nu_tau") {
    r.bounded.nu_tau = parse_num(key, value);
  } else if (key == "S_tau") {
    r.bounded.S_tau = parse_num(key, value);
  } else if (key == "nu_rho") {
    r.bounded.nu_rho = parse_num(key, value);
  } else if (key == "S_rho") {
    r.bounded.S_rho = parse_num(key, value);
  } else if (key == "nu_h") {
    r.bounded.nu_h = parse_num(key, value);
  } else if (key == "S_h") {
    r.bounded.S_h = parse_num(key, value);
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

std::string bound_str(const Bound& b) {
  if (!b.is_finite()) return b.value() > 0 ? "inf" : "-inf";
  return format_double(b.value());
}

}  // namespace

FileConfig resolve_config(const std::string& text, const Overrides& overrides) {
  std::map<std::string, std::string> kv;
  std::vector<std::string> order;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": empty key or value");
    if (!kv.emplace(key, value).second)
      throw ConfigError("duplicate config key '" + key + "'");
    order.push_back(key);
  }
  for (const auto& [k, v] : overrides) {
    if (kv.find(k) == kv.end()) order.push_back(k);
    kv[k] = v;
  }

  FileConfig cfg;
  try {
    for (const std::string& k : order) apply_key(cfg, k, kv.at(k));
    cfg.run.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (cfg.run.model == Model::Bounded && (!cfg.have_a_tau || !cfg.have_b_tau))
    throw ConfigError(
        "bounded model requires explicit a_tau and b_tau (use -inf/inf for an "
        "unconstrained side)");
  return cfg;
}

FileConfig load_config(const std::string& path, const Overrides& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return resolve_config(buf.str(), overrides);
}

std::vector<std::pair<std::string, std::string>> config_items(
    const FileConfig& cfg) {
  const RunConfig& r = cfg.run;
  std::vector<std::pair<std::string, std::string>> out;
  out.emplace_back("model", r.model == Model::UcAr ? "ucar" : "bounded");
  out.emplace_back("method", r.strategy == ProposalStrategy::Mode
                                 ? "mode"
                                 : "quadprog");
  out.emplace_back("precision_at", r.precision_at == PrecisionAt::Mode
                                       ? "mode"
                                       : "qp_solution");
  out.emplace_back("lambda", format_double(r.armh.lambda));
  out.emplace_back("max_ar_draws", std::to_string(r.armh.max_ar_draws));
  out.emplace_back("n_draws", std::to_string(r.n_draws));
  out.emplace_back("burn_in", std::to_string(r.burn_in));
  out.emplace_back("seed", std::to_string(r.seed));
  out.emplace_back("data", cfg.data_path);
  out.emplace_back("out_dir", cfg.out_dir);
  if (!cfg.sample_start.empty())
    out.emplace_back("sample_start", cfg.sample_start);
  if (!cfg.sample_end.empty()) out.emplace_back("sample_end", cfg.sample_end);
  out.emplace_back("pi0_policy", r.pi0_policy == PiZeroPolicy::FromData
                                     ? "from_data"
                                     : "drop_first");
  if (r.model == Model::UcAr) {
    out.emplace_back("a_tau", bound_str(r.ucar_a_tau));
    out.emplace_back("b_tau", bound_str(r.ucar_b_tau));
    out.emplace_back("a0", format_double(r.ucar.a0));
    out.emplace_back("b0", format_double(r.ucar.b0));
    out.emplace_back("nu_sigma2", format_double(r.ucar.nu_sigma2));
    out.emplace_back("S_sigma2", format_double(r.ucar.S_sigma2));
    out.emplace_back("nu_omega2", format_double(r.ucar.nu_omega2));
    out.emplace_back("S_omega2", format_double(r.ucar.S_omega2));
  } else {
    out.emplace_back("a_tau", bound_str(r.bounded.a_tau));
    out.emplace_back("b_tau", bound_str(r.bounded.b_tau));
    out.emplace_back("a_rho", bound_str(r.bounded.a_rho));
    out.emplace_back("b_rho", bound_str(r.bounded.b_rho));
    out.emplace_back("tau0", format_double(r.bounded.tau0));
    out.emplace_back("rho0", format_double(r.bounded.rho0));
    out.emplace_back("h0", format_double(r.bounded.h0));
    out.emplace_back("omega_tau2", format_double(r.bounded.omega_tau2));
    out.emplace_back("omega_rho2", format_double(r.bounded.omega_rho2));
    out.emplace_back("omega_h2", format_double(r.bounded.omega_h2));
    out.emplace_back("nu_tau", format_double(r.bounded.nu_tau));
    out.emplace_back("S_tau", format_double(r.bounded.S_tau));
    out.emplace_back("nu_rho", format_double(r.bounded.nu_rho));
    out.emplace_back("S_rho", format_double(r.bounded.S_rho));
    out.emplace_back("nu_h", format_double(r.bounded.nu_h));
    out.emplace_back("S_h", format_double(r.bounded.S_h));
  }
  return out;
}

}  // namespace trendqp
