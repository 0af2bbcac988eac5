#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "trendqp/bound.hpp"
#include "trendqp/distributions.hpp"
#include "trendqp/rng.hpp"
#include "trendqp/state_gaussian.hpp"

namespace trendqp {

/// y_t = 400 (ln z_t - ln z_{t-1}): annualized quarterly log growth.
/// Output has length len(z) - 1. Throws DataError naming the offending index
/// on a non-positive level.
std::vector<double> transform_inflation(std::span<const double> z);

// ---------------------------------------------------------------------------
// Local-level model with AR(1) measurement noise.
//
//   y_t = tau_t + eps_t,   eps_t = rho eps_{t-1} + u_t,  u_t ~ N(0, sigma2),
//   tau_t = tau_{t-1} + v_t,  v_t ~ N(0, omega2),  eps_0 = 0,
//   tau0 ~ N(a0, b0), rho ~ U(-1,1), sigma2 ~ IG(nu, S), omega2 ~ IG(nu, S).
//
// An optional box on (tau_1..tau_T) enters as a joint reweighting of the
// whole prior by 1[tau in box]. Under that convention every non-trend
// conditional keeps its conjugate form (the indicator never touches them),
// and the trend conditional is the box-restricted Gaussian.
// ---------------------------------------------------------------------------

struct UcArHyper {
  double a0 = 5.0;
  double b0 = 100.0;
  double nu_sigma2 = 3.0;
  double S_sigma2 = 2.0;
  double nu_omega2 = 3.0;
  double S_omega2 = 0.125;

  void validate() const;
};

struct UcArState {
  std::vector<double> tau;
  double tau0 = 0.0;
  double rho = 0.0;
  double sigma2 = 1.0;
  double omega2 = 1.0;

  /// Invariants: |rho| < 1, variances positive, tau inside the box.
  void validate(const Box& box) const;
};

/// Resamples tau0, rho, sigma2, omega2 in that order from their exact full
/// conditionals given tau and y. omega2_scale_bias multiplies the scale of
/// the omega2 conditional; it is 1 in production and is exercised by the
/// joint-distribution self-test to prove the test detects a biased
/// conditional.
void ucar_sample_statics(UcArState& state, std::span<const double> y,
                         const UcArHyper& hyper, RngStream& rng,
                         double omega2_scale_bias = 1.0);

/// Draws (tau0, rho, sigma2, omega2) from the untruncated parameter priors.
UcArState ucar_draw_params(const UcArHyper& hyper, RngStream& rng);

/// Fills state.tau with a draw of the random-walk path reweighted by the box
/// (rejection against the whole path). Throws ConvergenceError if the box
/// keeps rejecting past the attempt cap.
void ucar_draw_trend(UcArState& state, std::size_t T, const Box& box,
                     RngStream& rng);

/// Simulates y given the state: AR(1) noise added to the trend, eps_0 = 0.
std::vector<double> ucar_draw_data(const UcArState& state, RngStream& rng);

// ---------------------------------------------------------------------------
// Bounded trend-inflation model.
//
//   pi_t - tau_t = rho_t (pi_{t-1} - tau_{t-1}) + eps_t exp(h_t / 2),
//   tau_t = tau_{t-1} + TN(a_tau - tau_{t-1}, b_tau - tau_{t-1}; 0, .),
//   rho_t likewise inside [a_rho, b_rho], h_t a Gaussian random walk.
//   Increment variances: omega_*2 at t = 1, sigma_*2 afterwards.
//   sigma_tau2 ~ IG(nu_tau, S_tau) etc.
//
// The truncated increments are normalized densities, so the trend and gap
// conditionals carry state-dependent normalizer terms and the variance
// conditionals for tau and rho are non-conjugate.
// ---------------------------------------------------------------------------

struct BoundedHyper {
  double tau0 = 0.0;
  double rho0 = 0.0;
  double h0 = 0.0;
  double omega_tau2 = 5.0;
  double omega_rho2 = 1.0;
  double omega_h2 = 5.0;
  double nu_tau = 10.0;
  double S_tau = 0.18;
  double nu_rho = 10.0;
  double S_rho = 0.009;
  double nu_h = 10.0;
  double S_h = 0.45;
  Bound a_tau = Bound::neg_inf();
  Bound b_tau = Bound::pos_inf();
  Bound a_rho = Bound::finite(0.0);
  Bound b_rho = Bound::finite(1.0);

  void validate() const;
  Box tau_box(std::size_t T) const { return Box::uniform(T, a_tau, b_tau); }
  Box rho_box(std::size_t T) const { return Box::uniform(T, a_rho, b_rho); }
};

struct BoundedState {
  std::vector<double> tau;
  std::vector<double> rho;
  std::vector<double> h;
  double sigma_tau2 = 1.0;
  double sigma_rho2 = 1.0;
  double sigma_h2 = 1.0;

  void validate(const BoundedHyper& hyper) const;
};

/// Inflation series for the estimation sample plus the optional pre-sample
/// value feeding the t = 1 measurement term; without it that term is dropped.
struct BoundedData {
  std::vector<double> pi;
  std::optional<double> pi0;
};

/// Conditional log-density builders for the three latent blocks; each returns
/// the terms of ln p(block | everything else) that depend on the block, with
/// analytic gradient and tridiagonal negative Hessian, plus the block's box.
SmoothTarget bounded_tau_target(const BoundedState& state,
                                const BoundedData& data,
                                const BoundedHyper& hyper);
SmoothTarget bounded_rho_target(const BoundedState& state,
                                const BoundedData& data,
                                const BoundedHyper& hyper);
SmoothTarget bounded_h_target(const BoundedState& state,
                              const BoundedData& data,
                              const BoundedHyper& hyper);

/// Gaussian part of the tau / rho conditionals: the same measurement and
/// random-walk increment terms but without the truncation normalizers, so the
/// log density is exactly quadratic with a constant positive definite
/// precision. Intended for building Gaussian proposals: Newton's method
/// converges in one step from any point, while the exact targets above remain
/// the reference for accept/reject decisions. The box carried by the returned
/// target is the block's box, unchanged.
SmoothTarget bounded_tau_proposal_target(const BoundedState& state,
                                         const BoundedData& data,
                                         const BoundedHyper& hyper);
SmoothTarget bounded_rho_proposal_target(const BoundedState& state,
                                         const BoundedData& data,
                                         const BoundedHyper& hyper);

/// Resamples sigma_tau2, sigma_rho2, sigma_h2 from their full conditionals.
/// sigma_h2 is conjugate inverse-gamma; the truncated blocks are slice-sampled
/// on ln(variance) against the exact conditional including normalizers, except
/// when their box is unbounded (then the normalizers are 1 and the conjugate
/// shortcut applies). With T = 1 there are no increments and each draw falls
/// back to its prior.
void bounded_sample_variances(BoundedState& state, const BoundedHyper& hyper,
                              RngStream& rng);

/// Draws the three increment variances from their priors.
BoundedState bounded_draw_params(const BoundedHyper& hyper, RngStream& rng);

/// Fills tau, rho, h with ancestral draws of the truncated/Gaussian random
/// walks (exact; each truncated increment is a normalized density).
void bounded_draw_states(BoundedState& state, std::size_t T,
                         const BoundedHyper& hyper, RngStream& rng);

/// Simulates the inflation path given the state and the pre-sample value.
std::vector<double> bounded_draw_data(const BoundedState& state, double pi0,
                                      const BoundedHyper& hyper,
                                      RngStream& rng);

}  // namespace trendqp
