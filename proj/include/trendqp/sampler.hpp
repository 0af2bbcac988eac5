#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "trendqp/models.hpp"
#include "trendqp/state_gaussian.hpp"
#include "trendqp/trace.hpp"

namespace trendqp {

/// Mode: Gaussian built at the unconstrained maximizer of the smooth target
/// (its mean may sit outside the box). QuadProg: the proposal mean is moved
/// to the boxed maximizer of the same quadratic via the QP solver, so it is
/// always feasible.
enum class ProposalStrategy { Mode, QuadProg };

/// Where the QuadProg proposal takes its precision: the neg-Hessian
/// re-evaluated at the QP solution (default) or the one from the mode.
enum class PrecisionAt { QpSolution, Mode };

struct ArmhConfig {
  double lambda = 1.0;          // dominance-constant multiplier
  std::size_t max_ar_draws = 100;
  void validate() const;
};

struct ArmhResult {
  std::vector<double> x;
  bool accepted = false;
  std::size_t ar_draws = 0;  // proposal draws consumed, >= 1
  bool fallback = false;     // accept-reject phase exhausted
};

/// One accept-reject Metropolis-Hastings transition targeting the smooth
/// density restricted to the target's box. Phase one repeatedly draws from
/// the proposal, discards draws outside the box, and accepts with probability
/// p*(x)/(c q(x)) under the dominance constant c = lambda p*(m)/q(m) anchored
/// at the proposal mean m (using the smooth value there, so an infeasible
/// mean still yields a positive constant). Phase two applies the ratio
///   min{1, p*(x) min(p*(z), c q(z)) / [p*(z) min(p*(x), c q(x))]}
/// against the current point z. If phase one exhausts max_ar_draws the step
/// degrades to one independence MH move with the same proposal; both paths
/// leave the boxed target invariant. current must be inside the box.
ArmhResult armh_step(std::span<const double> current,
                     const SmoothTarget& target,
                     const GaussianApprox& proposal, const ArmhConfig& cfg,
                     RngStream& rng);

struct ProposalBuild {
  GaussianApprox approx;
  std::size_t qp_active_count = 0;
  std::size_t qp_iterations = 0;
  bool qp_fallback = false;      // QP failed; mode mean kept
  bool newton_fallback = false;  // mode search needed a repaired curvature
};

/// Builds the Gaussian proposal for one block. Both strategies start from the
/// unconstrained Newton mode search (init warm-starts it). With an unbounded
/// box the strategies coincide and the QP is skipped. Under QuadProg the mean
/// solves the box QP with the mode's neg-Hessian as curvature; the precision
/// follows precision_at. Failures never propagate: a failed QP keeps the mode
/// mean, a non-concave or unconverged mode search falls back to the best
/// iterate with an escalating diagonal ridge, and both are counted.
ProposalBuild build_proposal(const SmoothTarget& target,
                             ProposalStrategy strategy,
                             PrecisionAt precision_at,
                             std::span<const double> init);

enum class Model { UcAr, Bounded };

/// FromData: the first observation of the series becomes the pre-sample
/// value and the rest the estimation sample. DropFirst: the whole series is
/// the sample and the first measurement term is dropped.
enum class PiZeroPolicy { FromData, DropFirst };

struct RunConfig {
  Model model = Model::UcAr;
  ProposalStrategy strategy = ProposalStrategy::QuadProg;
  PrecisionAt precision_at = PrecisionAt::QpSolution;
  ArmhConfig armh;
  std::size_t n_draws = 10000;
  std::size_t burn_in = 1000;
  std::uint64_t seed = 1;
  UcArHyper ucar;
  Bound ucar_a_tau = Bound::neg_inf();
  Bound ucar_b_tau = Bound::pos_inf();
  BoundedHyper bounded;
  PiZeroPolicy pi0_policy = PiZeroPolicy::FromData;

  void validate() const;  // burn_in < n_draws, hyperparameters valid
};

/// Gibbs run for the local-level model. The trend block is an exact Gaussian
/// draw when its box is unbounded (both strategies share that code path and
/// its randomness, so their traces are bit-identical under one seed);
/// with a finite box the trend moves by ARMH under the configured strategy.
/// Statics follow in fixed order. Column layout: tau_1..tau_T, tau0, rho,
/// sigma2, omega2.
ChainTrace run_chain_ucar(const RunConfig& cfg, std::span<const double> y);

/// Gibbs run for the bounded model: tau (ARMH), rho (ARMH), h (ARMH with an
/// unbounded box, hence strategy-independent), then the increment variances.
/// Columns: tau_1.., rho_1.., h_1.., sigma_tau2, sigma_rho2, sigma_h2.
ChainTrace run_chain_bounded(const RunConfig& cfg, const BoundedData& data);

/// Dispatches on cfg.model; for the bounded model the series is split per
/// cfg.pi0_policy.
ChainTrace run_chain(const RunConfig& cfg, std::span<const double> series);

struct GewekeOptions {
  std::size_t n_cycles = 5000;
  std::size_t T = 10;
  std::uint64_t seed = 1;
  double bounded_pi0 = 0.0;
  /// Multiplier on the omega2 conditional scale of the local-level sampler;
  /// 1 in production. The self-test sets it to 0.5 to confirm a corrupted
  /// conditional is detected.
  double ucar_omega2_scale_bias = 1.0;
  std::size_t ineff_lag_cap = 100;
};

struct GewekeReport {
  std::vector<std::string> names;
  std::vector<double> z;
  double max_abs_z() const;
};

/// Joint-distribution check of the Gibbs sampler: compares statistics of
/// (parameters, states, data) between independent draws from the generative
/// model and a chain that alternates one Gibbs sweep with a data redraw,
/// started from a generative draw so it is stationary from cycle one.
/// z-scores use the independent-sample variance on one side and an
/// inefficiency-corrected variance on the other.
GewekeReport geweke_test(const RunConfig& cfg, const GewekeOptions& opts);

}  // namespace trendqp
