#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "trendqp/banded.hpp"
#include "trendqp/bound.hpp"
#include "trendqp/errors.hpp"
#include "trendqp/rng.hpp"

namespace trendqp {

/// A smooth log-density over R^T paired with the box its sampler must respect.
/// The callables return the log-density up to an additive constant, its
/// gradient, and the negative Hessian as a banded matrix; the box is handled
/// by the caller (constraint in the proposal construction, truncation in the
/// accept-reject correction), never folded into the smooth part.
struct SmoothTarget {
  std::size_t dim;
  Box box;
  std::function<double(std::span<const double>)> log_density;
  std::function<std::vector<double>(std::span<const double>)> gradient;
  std::function<BandedSymMatrix(std::span<const double>)> neg_hessian;
};

/// N(mean, K^{-1}) with the precision K banded; the Cholesky factor and the
/// normalizing constant are cached at construction.
class GaussianApprox {
 public:
  GaussianApprox(std::vector<double> mean, BandedSymMatrix precision);

  std::size_t dim() const { return mean_.size(); }
  const std::vector<double>& mean() const { return mean_; }
  const BandedSymMatrix& precision() const { return precision_; }
  const BandCholesky& chol() const { return chol_; }
  double log_det_precision() const { return chol_.log_det(); }

  /// Exact normalized log-density.
  double log_density(std::span<const double> x) const;
  std::vector<double> sample(RngStream& rng) const;

 private:
  std::vector<double> mean_;
  BandedSymMatrix precision_;
  BandCholesky chol_;
  double log_norm_const_;
};

/// mean + L'^{-1} z with z iid standard normal: one draw from N(mean, K^{-1})
/// given the factorization K = L L'.
std::vector<double> sample_mvn_precision(const std::vector<double>& mean,
                                         const BandCholesky& chol,
                                         RngStream& rng);

struct NewtonOptions {
  std::size_t max_iter = 100;
  double grad_tol = 1e-8;
  std::size_t max_halvings = 30;
};

struct NewtonOutcome {
  GaussianApprox approx;  // mean = maximizer, precision = neg-Hessian there
  double value = 0.0;     // log-density at the maximizer
  double grad_norm = 0.0;
  std::size_t iterations = 0;
};

/// Iteration cap reached; carries the highest-value iterate found.
struct NewtonConvergenceError : ConvergenceError {
  NewtonConvergenceError(const std::string& msg, std::vector<double> best_x_in,
                         double value_in, double grad_norm_in)
      : ConvergenceError(msg),
        best_x(std::move(best_x_in)),
        value(value_in),
        grad_norm(grad_norm_in) {}
  std::vector<double> best_x;
  double value;
  double grad_norm;
};

/// Ascends target.log_density from x0 by damped Newton steps: direction from
/// the banded neg-Hessian solve, step halved (at most max_halvings times)
/// until the value does not decrease, so the trajectory is monotone. Stops
/// when the gradient max-norm falls below grad_tol and returns the Gaussian
/// built from the neg-Hessian at the maximizer. A non-positive-definite
/// neg-Hessian anywhere (including at the maximizer) propagates as
/// NotPositiveDefiniteError: it flags a non-log-concave region and the caller
/// decides the fallback. Past max_iter throws NewtonConvergenceError.
NewtonOutcome newton_mode(const SmoothTarget& target, std::vector<double> x0,
                          const NewtonOptions& opts = {});

/// Posterior precision and mean of the local level given AR(1) noise:
/// observation y = level + noise, noise quasi-differenced by rho with
/// innovation variance sigma2, level a random walk from level0 with increment
/// variance omega2. K = D'D/omega2 + A'A/sigma2 (D the first difference, A
/// the rho quasi-difference), mean = K^{-1}(e_1 level0/omega2 + A'A y/sigma2).
GaussianApprox local_level_system(std::span<const double> y, double level0,
                                  double rho, double sigma2, double omega2);

/// SmoothTarget view of a fixed Gaussian: quadratic log-density with constant
/// curvature, shared by all three callbacks.
SmoothTarget gaussian_target(GaussianApprox approx, Box box);

}  // namespace trendqp
