#include "trendqp/sampler.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>

#include "trendqp/diagnostics.hpp"
#include "trendqp/errors.hpp"
#include "trendqp/qp_box.hpp"

namespace trendqp {

void ArmhConfig::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw ConfigError("armh lambda must be positive and finite");
  if (max_ar_draws == 0)
    throw ConfigError("armh max_ar_draws must be at least 1");
}

ArmhResult armh_step(std::span<const double> current,
                     const SmoothTarget& target,
                     const GaussianApprox& proposal, const ArmhConfig& cfg,
                     RngStream& rng) {
  const std::size_t T = target.dim;
  if (current.size() != T || proposal.dim() != T)
    throw DimensionError("armh_step: dimension mismatch");
  if (!target.box.contains(current))
    throw InfeasibleError(target.box.violations(current));

  // Anchor the dominance constant at the proposal mean using the smooth
  // target value, so a mean pushed outside the box still yields a finite
  // positive constant. Any fixed c keeps the kernel exact; c controls only
  // how often the accept-reject phase accepts.
  const double log_c = std::log(cfg.lambda) +
                       target.log_density(proposal.mean()) -
                       proposal.log_density(proposal.mean());

  const double lp_cur = target.log_density(current);
  const double lq_cur = proposal.log_density(current);

  ArmhResult res;
  std::vector<double> cand;
  double lp_cand = 0.0, lq_cand = 0.0;
  bool have_cand = false;
  while (res.ar_draws < cfg.max_ar_draws) {
    ++res.ar_draws;
    cand = proposal.sample(rng);
    if (!target.box.contains(cand)) continue;
    lp_cand = target.log_density(cand);
    lq_cand = proposal.log_density(cand);
    if (std::log(rng.uniform()) < lp_cand - log_c - lq_cand) {
      have_cand = true;
      break;
    }
  }

  if (!have_cand) {
    // The accept-reject phase ran out of draws. Its exhaustion probability
    // does not involve the current point, so swapping in one plain
    // independence step keeps the mixture kernel in detailed balance.
    res.fallback = true;
    ++res.ar_draws;
    cand = proposal.sample(rng);
    if (target.box.contains(cand)) {
      lp_cand = target.log_density(cand);
      lq_cand = proposal.log_density(cand);
      if (std::log(rng.uniform()) < (lp_cand - lq_cand) - (lp_cur - lq_cur)) {
        res.accepted = true;
        res.x = std::move(cand);
        return res;
      }
    }
    res.x.assign(current.begin(), current.end());
    return res;
  }

  const double log_num = lp_cand + std::min(lp_cur, log_c + lq_cur);
  const double log_den = lp_cur + std::min(lp_cand, log_c + lq_cand);
  if (std::log(rng.uniform()) < log_num - log_den) {
    res.accepted = true;
    res.x = std::move(cand);
  } else {
    res.x.assign(current.begin(), current.end());
  }
  return res;
}

namespace {

// Curvature repair for indefinite negative-Hessians. Matrices that already
// factor are returned untouched. Otherwise a banded LDL' pass with
// Gill-Murray-Wright pivot clamping stiffens exactly the failing pivots,
// so non-concave pockets get a local diagonal addition while
// well-conditioned directions keep their exact curvature. A global ridge
// here would leave near-zero eigenvalues and blow up the proposal
// variance in the repaired directions.
BandedSymMatrix ridge_to_pd(const BandedSymMatrix& nh) {
  try {
    band_cholesky(nh);
    return nh;
  } catch (const NotPositiveDefiniteError&) {
  }
  const std::size_t n = nh.dim();
  const std::size_t b = nh.bandwidth();
  double gamma = 0.0;
  double xi = 0.0;
  for (std::size_t j = 0; j < n; ++j)
    gamma = std::max(gamma, std::fabs(nh.diag(0, j)));
  for (std::size_t k = 1; k <= b; ++k)
    for (std::size_t j = 0; j + k < n; ++j)
      xi = std::max(xi, std::fabs(nh.diag(k, j)));
  const double beta2 = std::max({gamma, xi, 1e-12});
  const double delta = 1e-8 * std::max(gamma + xi, 1.0);

  std::vector<std::vector<double>> l(b + 1, std::vector<double>(n, 0.0));
  std::vector<double> d(n, 0.0);
  std::vector<double> add(n, 0.0);
  std::vector<double> c(b, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t k0 = j >= b ? j - b : 0;
    double p = nh.diag(0, j);
    for (std::size_t k = k0; k < j; ++k) p -= l[j - k][k] * l[j - k][k] * d[k];
    const std::size_t iend = std::min(n, j + b + 1);
    double theta = 0.0;
    for (std::size_t i = j + 1; i < iend; ++i) {
      double v = nh.diag(i - j, j);
      for (std::size_t k = (i >= b ? i - b : 0); k < j; ++k)
        v -= l[i - k][k] * l[j - k][k] * d[k];
      c[i - j - 1] = v;
      theta = std::max(theta, std::fabs(v));
    }
    // Floor at half the local diagonal: the repaired matrix becomes a
    // proposal precision, and a near-zero pivot would mean a proposal sd far
    // above the scale the target's own diagonal implies, which kills joint
    // feasibility against nearby bounds. Over-stiffening is benign here; the
    // accept-reject correction absorbs a narrow proposal.
    d[j] = std::max(
        {std::fabs(p), theta * theta / beta2, 0.5 * nh.diag(0, j), delta});
    add[j] = d[j] - p;
    for (std::size_t i = j + 1; i < iend; ++i) l[i - j][j] = c[i - j - 1] / d[j];
  }

  BandedSymMatrix out = nh;
  for (std::size_t j = 0; j < n; ++j) out.diag(0, j) += add[j];
  double extra = delta;
  for (int round = 0; round < 40; ++round) {
    try {
      band_cholesky(out);
      return out;
    } catch (const NotPositiveDefiniteError&) {
      for (std::size_t j = 0; j < n; ++j) out.diag(0, j) += extra;
      extra *= 10.0;
    }
  }
  throw ConvergenceError(
      "curvature repair failed to reach positive definiteness");
}

// Ascent with per-step curvature repair for targets the plain mode search
// cannot handle (non-concave pockets, stalls). Trial points are projected
// into the target's box: the truncation-normalizer terms diverge far outside
// the box, so an unconstrained ascent on a boxed target can run away from
// the interior local mode the proposal needs. Returns a usable Gaussian
// centered at the best point reached; the chain stays exact regardless
// because the accept-reject correction absorbs any proposal.
GaussianApprox repaired_mode(const SmoothTarget& target,
                             std::vector<double> x) {
  x = target.box.clamp(x);
  double value = target.log_density(x);
  for (std::size_t it = 0; it < 60; ++it) {
    std::vector<double> g = target.gradient(x);
    double gn = 0.0;
    for (double v : g) gn = std::max(gn, std::fabs(v));
    if (gn <= 1e-8) break;
    BandCholesky ch = band_cholesky(ridge_to_pd(target.neg_hessian(x)));
    std::vector<double> d = ch.solve(g);
    // Clamped pivots can produce huge directions; a trust radius keeps the
    // line-search trials inside the range where the target is evaluable.
    double xn = 0.0;
    double dn = 0.0;
    for (double v : x) xn = std::max(xn, std::fabs(v));
    for (double v : d) dn = std::max(dn, std::fabs(v));
    const double radius = 1e3 * (1.0 + xn);
    if (dn > radius)
      for (double& v : d) v *= radius / dn;
    double step = 1.0;
    bool moved = false;
    for (std::size_t h = 0; h <= 30; ++h, step *= 0.5) {
      std::vector<double> xt(x.size());
      for (std::size_t t = 0; t < x.size(); ++t) xt[t] = x[t] + step * d[t];
      xt = target.box.clamp(xt);
      const double vt = target.log_density(xt);
      if (std::isfinite(vt) && vt > value) {
        x = std::move(xt);
        value = vt;
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  BandedSymMatrix prec = ridge_to_pd(target.neg_hessian(x));
  return GaussianApprox(std::move(x), std::move(prec));
}

}  // namespace

ProposalBuild build_proposal(const SmoothTarget& target,
                             ProposalStrategy strategy,
                             PrecisionAt precision_at,
                             std::span<const double> init) {
  if (init.size() != target.dim)
    throw DimensionError("build_proposal: init has wrong length");
  std::vector<double> x0(init.begin(), init.end());

  bool newton_fb = false;
  GaussianApprox mode = [&]() {
    try {
      return std::move(newton_mode(target, x0).approx);
    } catch (const NewtonConvergenceError& e) {
      newton_fb = true;
      return repaired_mode(target, e.best_x);
    } catch (const NotPositiveDefiniteError&) {
      newton_fb = true;
      return repaired_mode(target, std::move(x0));
    } catch (const ParameterError&) {
      // The unconstrained search walked past the target's evaluable range
      // (possible for boxed targets whose smooth extension diverges).
      newton_fb = true;
      return repaired_mode(target, std::move(x0));
    }
  }();

  if (strategy == ProposalStrategy::QuadProg && !target.box.is_unbounded()) {
    try {
      BoxQp qp(mode.precision(), mode.mean(), target.box);
      QpResult r = solve_box_qp(qp);
      const std::size_t active = r.active_lower.size() + r.active_upper.size();
      BandedSymMatrix prec = mode.precision();
      if (precision_at == PrecisionAt::QpSolution) {
        BandedSymMatrix nh = target.neg_hessian(r.tau_star);
        try {
          band_cholesky(nh);
          prec = std::move(nh);
        } catch (const NotPositiveDefiniteError&) {
          newton_fb = true;
          prec = ridge_to_pd(nh);
        }
      }
      return ProposalBuild{
          GaussianApprox(std::move(r.tau_star), std::move(prec)), active,
          r.iterations, false, newton_fb};
    } catch (const QpConvergenceError&) {
      return ProposalBuild{std::move(mode), 0, 0, true, newton_fb};
    }
  }
  return ProposalBuild{std::move(mode), 0, 0, false, newton_fb};
}

void RunConfig::validate() const {
  armh.validate();
  ucar.validate();
  bounded.validate();
  if (n_draws == 0) throw ConfigError("n_draws must be positive");
  if (burn_in >= n_draws)
    throw ConfigError("burn_in must be smaller than n_draws");
  if (!(ucar_a_tau.value() < ucar_b_tau.value()))
    throw ConfigError("trend bounds must satisfy a_tau < b_tau");
}

namespace {

double prior_mean_or_scale(double nu, double S) {
  return nu > 1.0 ? S / (nu - 1.0) : S;
}

// Centered moving average with edge truncation. A smooth initial trend keeps
// the first increment-variance draws near their priors; starting a random-walk
// block at the raw data makes those draws absorb observation noise, which can
// wedge the truncated targets against their bounds.
std::vector<double> smoothed(const std::vector<double>& y,
                             std::size_t half_width) {
  const std::size_t n = y.size();
  std::vector<double> out(n);
  for (std::size_t t = 0; t < n; ++t) {
    const std::size_t lo = t >= half_width ? t - half_width : 0;
    const std::size_t hi = std::min(n - 1, t + half_width);
    double s = 0.0;
    for (std::size_t j = lo; j <= hi; ++j) s += y[j];
    out[t] = s / static_cast<double>(hi - lo + 1);
  }
  return out;
}

// One proposal build plus one accept-reject MH transition, with the block's
// counters updated in place. The proposal is built against build_target; the
// accept/reject step always uses the exact target, so build_target only has
// to be a good Gaussian sketch of it, never a substitute.
void armh_block(std::vector<double>& value, const SmoothTarget& target,
                const SmoothTarget& build_target, const RunConfig& cfg,
                RngStream& rng, BlockStats& stats) {
  ProposalBuild pb =
      build_proposal(build_target, cfg.strategy, cfg.precision_at, value);
  ArmhResult r = armh_step(value, target, pb.approx, cfg.armh, rng);
  stats.steps += 1;
  if (r.accepted) stats.accepts += 1;
  stats.ar_draws_total += r.ar_draws;
  if (r.fallback) stats.armh_fallbacks += 1;
  if (pb.qp_fallback) stats.qp_fallbacks += 1;
  if (pb.newton_fallback) stats.newton_fallbacks += 1;
  if (target.dim > 0)
    stats.qp_active_fraction_sum += static_cast<double>(pb.qp_active_count) /
                                    static_cast<double>(target.dim);
  value = std::move(r.x);
}

void armh_block(std::vector<double>& value, const SmoothTarget& target,
                const RunConfig& cfg, RngStream& rng, BlockStats& stats) {
  armh_block(value, target, target, cfg, rng, stats);
}

// One full Gibbs sweep of the local-level sampler. With an unbounded trend
// box the trend is an exact Gaussian draw, and that path is byte-for-byte
// the same whichever proposal strategy is configured.
void ucar_sweep(UcArState& st, std::span<const double> y, const Box& box,
                const RunConfig& cfg, double omega2_bias, RngStream& rng,
                BlockStats& tau_stats) {
  GaussianApprox cond =
      local_level_system(y, st.tau0, st.rho, st.sigma2, st.omega2);
  if (box.is_unbounded()) {
    st.tau = cond.sample(rng);
    tau_stats.steps += 1;
    tau_stats.accepts += 1;
    tau_stats.ar_draws_total += 1;
  } else {
    SmoothTarget target = gaussian_target(std::move(cond), box);
    armh_block(st.tau, target, cfg, rng, tau_stats);
  }
  ucar_sample_statics(st, y, cfg.ucar, rng, omega2_bias);
}

void bounded_sweep(BoundedState& st, const BoundedData& data,
                   const RunConfig& cfg, RngStream& rng, BlockStats& tau_stats,
                   BlockStats& rho_stats, BlockStats& h_stats) {
  // tau and rho proposals come from the Gaussian part of each conditional:
  // its mode and curvature are the natural Gaussian sketch, and dropping the
  // truncation normalizers keeps the precision positive definite everywhere.
  // The accept step still scores the exact conditional, so the chain's
  // stationary law is unchanged.
  {
    SmoothTarget t = bounded_tau_target(st, data, cfg.bounded);
    SmoothTarget b = bounded_tau_proposal_target(st, data, cfg.bounded);
    armh_block(st.tau, t, b, cfg, rng, tau_stats);
  }
  {
    SmoothTarget t = bounded_rho_target(st, data, cfg.bounded);
    SmoothTarget b = bounded_rho_proposal_target(st, data, cfg.bounded);
    armh_block(st.rho, t, b, cfg, rng, rho_stats);
  }
  {
    SmoothTarget t = bounded_h_target(st, data, cfg.bounded);
    armh_block(st.h, t, cfg, rng, h_stats);
  }
  bounded_sample_variances(st, cfg.bounded, rng);
}

}  // namespace

ChainTrace run_chain_ucar(const RunConfig& cfg, std::span<const double> y) {
  cfg.validate();
  const std::size_t T = y.size();
  if (T == 0) throw DimensionError("run_chain_ucar: empty series");
  const Box box = Box::uniform(T, cfg.ucar_a_tau, cfg.ucar_b_tau);

  std::vector<std::string> names;
  names.reserve(T + 4);
  for (std::size_t t = 0; t < T; ++t)
    names.push_back("tau_" + std::to_string(t + 1));
  names.insert(names.end(), {"tau0", "rho", "sigma2", "omega2"});
  ChainTrace trace(names);
  trace.reserve_rows(cfg.n_draws);
  trace.blocks.push_back(BlockStats{});
  trace.blocks[0].name = "tau";

  RngStream rng(cfg.seed);
  UcArState st;
  st.tau = box.clamp(y);
  st.tau0 = cfg.ucar.a0;
  st.rho = 0.0;
  st.sigma2 = prior_mean_or_scale(cfg.ucar.nu_sigma2, cfg.ucar.S_sigma2);
  st.omega2 = prior_mean_or_scale(cfg.ucar.nu_omega2, cfg.ucar.S_omega2);

  std::vector<double> row(T + 4);
  for (std::size_t it = 0; it < cfg.n_draws; ++it) {
    ucar_sweep(st, y, box, cfg, 1.0, rng, trace.blocks[0]);
    assert(box.contains(st.tau));
    assert(st.sigma2 > 0.0 && st.omega2 > 0.0 && std::fabs(st.rho) < 1.0);
    std::copy(st.tau.begin(), st.tau.end(), row.begin());
    row[T] = st.tau0;
    row[T + 1] = st.rho;
    row[T + 2] = st.sigma2;
    row[T + 3] = st.omega2;
    trace.push_row(row);
  }
  return trace;
}

ChainTrace run_chain_bounded(const RunConfig& cfg, const BoundedData& data) {
  cfg.validate();
  const std::size_t T = data.pi.size();
  if (T == 0) throw DimensionError("run_chain_bounded: empty series");
  const Box tau_box = cfg.bounded.tau_box(T);
  const Box rho_box = cfg.bounded.rho_box(T);

  std::vector<std::string> names;
  names.reserve(3 * T + 3);
  for (std::size_t t = 0; t < T; ++t)
    names.push_back("tau_" + std::to_string(t + 1));
  for (std::size_t t = 0; t < T; ++t)
    names.push_back("rho_" + std::to_string(t + 1));
  for (std::size_t t = 0; t < T; ++t)
    names.push_back("h_" + std::to_string(t + 1));
  names.insert(names.end(), {"sigma_tau2", "sigma_rho2", "sigma_h2"});
  ChainTrace trace(names);
  trace.reserve_rows(cfg.n_draws);
  for (const char* b : {"tau", "rho", "h"}) {
    trace.blocks.push_back(BlockStats{});
    trace.blocks.back().name = b;
  }

  RngStream rng(cfg.seed);
  BoundedState st;
  st.tau = tau_box.clamp_interior(smoothed(data.pi, 8), 0.05);
  double rho_init;
  if (cfg.bounded.a_rho.is_finite() && cfg.bounded.b_rho.is_finite())
    rho_init = 0.5 * (cfg.bounded.a_rho.value() + cfg.bounded.b_rho.value());
  else
    rho_init = rho_box.clamp(std::vector<double>{cfg.bounded.rho0})[0];
  st.rho.assign(T, rho_init);
  // Start h at the residual scale implied by the tau/rho starts. The h update
  // proposes near the conditional mode; a start many conditional sds away
  // (h = 0 when the data's noise scale is far from 1) would make the
  // correction step reject indefinitely.
  double s2 = 0.0;
  for (std::size_t t = 1; t < T; ++t) {
    const double g1 = data.pi[t] - st.tau[t];
    const double g0 = data.pi[t - 1] - st.tau[t - 1];
    const double s = g1 - st.rho[t] * g0;
    s2 += s * s;
  }
  s2 = T > 1 ? s2 / static_cast<double>(T - 1) : 1.0;
  st.h.assign(T, std::log(std::min(std::max(s2, 1e-8), 1e8)));
  // The walk updates propose all T coordinates jointly, so the initial
  // increment scale must be small against the starting path's distance to
  // its bounds; otherwise essentially every joint draw leaves the box and
  // the warm-up cannot move. Cap the variance starts accordingly.
  const auto capped_start = [](double prior_mean, const std::vector<double>& x,
                               Bound lo, Bound hi) {
    if (!lo.is_finite() && !hi.is_finite()) return prior_mean;
    double dmin = std::numeric_limits<double>::infinity();
    for (double v : x) {
      if (lo.is_finite()) dmin = std::min(dmin, v - lo.value());
      if (hi.is_finite()) dmin = std::min(dmin, hi.value() - v);
    }
    return std::min(prior_mean,
                    std::max(dmin * dmin / 9.0, prior_mean / 1000.0));
  };
  st.sigma_tau2 =
      capped_start(prior_mean_or_scale(cfg.bounded.nu_tau, cfg.bounded.S_tau),
                   st.tau, cfg.bounded.a_tau, cfg.bounded.b_tau);
  st.sigma_rho2 =
      capped_start(prior_mean_or_scale(cfg.bounded.nu_rho, cfg.bounded.S_rho),
                   st.rho, cfg.bounded.a_rho, cfg.bounded.b_rho);
  st.sigma_h2 = prior_mean_or_scale(cfg.bounded.nu_h, cfg.bounded.S_h);

  std::vector<double> row(3 * T + 3);
  for (std::size_t it = 0; it < cfg.n_draws; ++it) {
    bounded_sweep(st, data, cfg, rng, trace.blocks[0], trace.blocks[1],
                  trace.blocks[2]);
    assert(tau_box.contains(st.tau) && rho_box.contains(st.rho));
    assert(st.sigma_tau2 > 0.0 && st.sigma_rho2 > 0.0 && st.sigma_h2 > 0.0);
    std::copy(st.tau.begin(), st.tau.end(), row.begin());
    std::copy(st.rho.begin(), st.rho.end(), row.begin() + T);
    std::copy(st.h.begin(), st.h.end(), row.begin() + 2 * T);
    row[3 * T] = st.sigma_tau2;
    row[3 * T + 1] = st.sigma_rho2;
    row[3 * T + 2] = st.sigma_h2;
    trace.push_row(row);
  }
  return trace;
}

ChainTrace run_chain(const RunConfig& cfg, std::span<const double> series) {
  if (cfg.model == Model::UcAr) return run_chain_ucar(cfg, series);
  BoundedData data;
  if (cfg.pi0_policy == PiZeroPolicy::FromData) {
    if (series.size() < 2)
      throw DataError(
          "need at least two observations to split off the pre-sample value");
    data.pi0 = series[0];
    data.pi.assign(series.begin() + 1, series.end());
  } else {
    data.pi.assign(series.begin(), series.end());
  }
  return run_chain_bounded(cfg, data);
}

double GewekeReport::max_abs_z() const {
  double m = 0.0;
  for (double v : z) {
    if (!std::isfinite(v)) return std::numeric_limits<double>::infinity();
    m = std::max(m, std::fabs(v));
  }
  return m;
}

namespace {

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double var_of(const std::vector<double>& v, double mean) {
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return v.size() > 1 ? s / static_cast<double>(v.size() - 1) : 0.0;
}

// z-scores comparing independent generative draws against the sweep-coupled
// chain; the chain side's variance is scaled by its inefficiency factor.
GewekeReport make_report(std::vector<std::string> names,
                         const std::vector<std::vector<double>>& mc,
                         const std::vector<std::vector<double>>& sc,
                         const GewekeOptions& opts) {
  GewekeReport rep;
  rep.names = std::move(names);
  const double N = static_cast<double>(opts.n_cycles);
  for (std::size_t i = 0; i < rep.names.size(); ++i) {
    const double m1 = mean_of(mc[i]);
    const double m2 = mean_of(sc[i]);
    const double v1 = var_of(mc[i], m1);
    const double v2 = var_of(sc[i], m2);
    std::size_t L = std::min(opts.ineff_lag_cap, opts.n_cycles / 10);
    L = std::max<std::size_t>(L, 1);
    double inflate = 1.0;
    if (v2 > 0.0 && sc[i].size() > L)
      inflate = std::max(1.0, inefficiency_factor(sc[i], L));
    const double denom = std::sqrt(v1 / N + v2 * inflate / N);
    rep.z.push_back(denom > 0.0 ? (m1 - m2) / denom : 0.0);
  }
  return rep;
}

std::vector<std::string> ucar_stat_names() {
  return {"tau0",     "rho",      "log_sigma2", "log_omega2", "tau_first",
          "tau_last", "tau_mean", "y_first",    "y_mean",     "y_sq_mean"};
}

std::vector<double> ucar_stats(const UcArState& st,
                               std::span<const double> y) {
  double tau_mean = 0.0;
  for (double v : st.tau) tau_mean += v;
  tau_mean /= static_cast<double>(st.tau.size());
  double y_mean = 0.0, y_sq = 0.0;
  for (double v : y) {
    y_mean += v;
    y_sq += v * v;
  }
  y_mean /= static_cast<double>(y.size());
  y_sq /= static_cast<double>(y.size());
  return {st.tau0,         st.rho,        std::log(st.sigma2),
          std::log(st.omega2), st.tau.front(), st.tau.back(),
          tau_mean,        y.front(),     y_mean,
          y_sq};
}

std::vector<std::string> bounded_stat_names() {
  return {"log_sigma_tau2", "log_sigma_rho2", "log_sigma_h2", "tau_first",
          "tau_last",       "tau_mean",       "rho_first",    "rho_mean",
          "h_first",        "h_mean",         "pi_first",     "pi_mean",
          "pi_sq_mean"};
}

std::vector<double> bounded_stats(const BoundedState& st,
                                  std::span<const double> pi) {
  auto avg = [](std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  double pi_sq = 0.0;
  for (double v : pi) pi_sq += v * v;
  pi_sq /= static_cast<double>(pi.size());
  return {std::log(st.sigma_tau2),
          std::log(st.sigma_rho2),
          std::log(st.sigma_h2),
          st.tau.front(),
          st.tau.back(),
          avg(st.tau),
          st.rho.front(),
          avg(st.rho),
          st.h.front(),
          avg(st.h),
          pi.front(),
          avg(pi),
          pi_sq};
}

GewekeReport geweke_ucar(const RunConfig& cfg, const GewekeOptions& opts) {
  const std::size_t T = opts.T;
  const Box box = Box::uniform(T, cfg.ucar_a_tau, cfg.ucar_b_tau);
  RngStream base(opts.seed);
  RngStream mc_rng = base.derive(1);
  RngStream sc_rng = base.derive(2);

  std::vector<std::string> names = ucar_stat_names();
  std::vector<std::vector<double>> mc(names.size()), sc(names.size());
  for (auto& s : mc) s.reserve(opts.n_cycles);
  for (auto& s : sc) s.reserve(opts.n_cycles);

  for (std::size_t n = 0; n < opts.n_cycles; ++n) {
    UcArState st = ucar_draw_params(cfg.ucar, mc_rng);
    ucar_draw_trend(st, T, box, mc_rng);
    std::vector<double> y = ucar_draw_data(st, mc_rng);
    std::vector<double> vals = ucar_stats(st, y);
    for (std::size_t i = 0; i < vals.size(); ++i) mc[i].push_back(vals[i]);
  }

  // Chain side starts from an exact generative draw, so every cycle sits in
  // the joint distribution when the sweep's conditionals are correct.
  UcArState st = ucar_draw_params(cfg.ucar, sc_rng);
  ucar_draw_trend(st, T, box, sc_rng);
  BlockStats scratch;
  scratch.name = "tau";
  for (std::size_t n = 0; n < opts.n_cycles; ++n) {
    std::vector<double> y = ucar_draw_data(st, sc_rng);
    ucar_sweep(st, y, box, cfg, opts.ucar_omega2_scale_bias, sc_rng, scratch);
    std::vector<double> vals = ucar_stats(st, y);
    for (std::size_t i = 0; i < vals.size(); ++i) sc[i].push_back(vals[i]);
  }
  return make_report(std::move(names), mc, sc, opts);
}

GewekeReport geweke_bounded(const RunConfig& cfg, const GewekeOptions& opts) {
  const std::size_t T = opts.T;
  RngStream base(opts.seed);
  RngStream mc_rng = base.derive(1);
  RngStream sc_rng = base.derive(2);

  std::vector<std::string> names = bounded_stat_names();
  std::vector<std::vector<double>> mc(names.size()), sc(names.size());
  for (auto& s : mc) s.reserve(opts.n_cycles);
  for (auto& s : sc) s.reserve(opts.n_cycles);

  for (std::size_t n = 0; n < opts.n_cycles; ++n) {
    BoundedState st = bounded_draw_params(cfg.bounded, mc_rng);
    bounded_draw_states(st, T, cfg.bounded, mc_rng);
    std::vector<double> pi =
        bounded_draw_data(st, opts.bounded_pi0, cfg.bounded, mc_rng);
    std::vector<double> vals = bounded_stats(st, pi);
    for (std::size_t i = 0; i < vals.size(); ++i) mc[i].push_back(vals[i]);
  }

  BoundedState st = bounded_draw_params(cfg.bounded, sc_rng);
  bounded_draw_states(st, T, cfg.bounded, sc_rng);
  BoundedData data;
  data.pi0 = opts.bounded_pi0;
  BlockStats s_tau, s_rho, s_h;
  s_tau.name = "tau";
  s_rho.name = "rho";
  s_h.name = "h";
  for (std::size_t n = 0; n < opts.n_cycles; ++n) {
    data.pi = bounded_draw_data(st, opts.bounded_pi0, cfg.bounded, sc_rng);
    bounded_sweep(st, data, cfg, sc_rng, s_tau, s_rho, s_h);
    std::vector<double> vals = bounded_stats(st, data.pi);
    for (std::size_t i = 0; i < vals.size(); ++i) sc[i].push_back(vals[i]);
  }
  return make_report(std::move(names), mc, sc, opts);
}

}  // namespace

GewekeReport geweke_test(const RunConfig& cfg, const GewekeOptions& opts) {
  cfg.validate();
  if (opts.T == 0) throw ConfigError("geweke_test: T must be positive");
  if (opts.n_cycles < 20)
    throw ConfigError("geweke_test: needs at least 20 cycles");
  return cfg.model == Model::UcAr ? geweke_ucar(cfg, opts)
                                  : geweke_bounded(cfg, opts);
}

}  // namespace trendqp
