#include "trendqp/state_gaussian.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <sstream>

namespace trendqp {

namespace {

double inf_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

}  // namespace

GaussianApprox::GaussianApprox(std::vector<double> mean,
                               BandedSymMatrix precision)
    : mean_(std::move(mean)),
      precision_(std::move(precision)),
      chol_(band_cholesky(precision_)) {
  if (mean_.size() != precision_.dim())
    throw DimensionError("GaussianApprox: mean/precision dimension mismatch");
  log_norm_const_ =
      0.5 * chol_.log_det() -
      0.5 * static_cast<double>(dim()) * std::log(2.0 * std::numbers::pi);
}

double GaussianApprox::log_density(std::span<const double> x) const {
  if (x.size() != dim())
    throw DimensionError("GaussianApprox::log_density: dimension mismatch");
  return log_norm_const_ - 0.5 * quad_form(precision_, x, mean_);
}

std::vector<double> GaussianApprox::sample(RngStream& rng) const {
  return sample_mvn_precision(mean_, chol_, rng);
}

std::vector<double> sample_mvn_precision(const std::vector<double>& mean,
                                         const BandCholesky& chol,
                                         RngStream& rng) {
  if (mean.size() != chol.dim())
    throw DimensionError("sample_mvn_precision: mean/factor dimension mismatch");
  std::vector<double> z(mean.size());
  for (double& v : z) v = rng.normal();
  std::vector<double> x = chol.transpose_solve(z);
  for (std::size_t t = 0; t < x.size(); ++t) x[t] += mean[t];
  return x;
}

NewtonOutcome newton_mode(const SmoothTarget& target, std::vector<double> x0,
                          const NewtonOptions& opts) {
  if (x0.size() != target.dim)
    throw DimensionError("newton_mode: x0 dimension mismatch");

  std::vector<double> x = std::move(x0);
  double value = target.log_density(x);
  if (!std::isfinite(value))
    throw ParameterError("newton_mode: log-density not finite at x0");
  std::vector<double> g = target.gradient(x);

  std::vector<double> best_x = x;
  double best_value = value;
  double best_grad = inf_norm(g);

  for (std::size_t it = 0; it <= opts.max_iter; ++it) {
    const double grad_norm = inf_norm(g);
    if (value > best_value) {
      best_x = x;
      best_value = value;
      best_grad = grad_norm;
    }
    if (grad_norm <= opts.grad_tol) {
      // Factorizing here means a flat direction at the maximizer is a hard
      // error, not something papered over.
      BandedSymMatrix nh = target.neg_hessian(x);
      GaussianApprox approx(std::move(x), std::move(nh));
      return {std::move(approx), value, grad_norm, it};
    }
    if (it == opts.max_iter) break;

    const BandCholesky step_factor = band_cholesky(target.neg_hessian(x));
    const std::vector<double> dir = step_factor.solve(g);

    double alpha = 1.0;
    std::vector<double> x_new(x.size());
    double v_new = -std::numeric_limits<double>::infinity();
    bool accepted = false;
    for (std::size_t h = 0; h <= opts.max_halvings; ++h) {
      for (std::size_t t = 0; t < x.size(); ++t)
        x_new[t] = x[t] + alpha * dir[t];
      v_new = target.log_density(x_new);
      if (std::isfinite(v_new) && v_new >= value) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      std::ostringstream msg;
      msg << "newton_mode: no ascent step found at gradient norm " << grad_norm;
      throw NewtonConvergenceError(msg.str(), std::move(best_x), best_value,
                                   best_grad);
    }
    x.swap(x_new);
    value = v_new;
    g = target.gradient(x);
  }

  std::ostringstream msg;
  msg << "newton_mode: gradient norm " << inf_norm(g) << " above tolerance "
      << opts.grad_tol << " after " << opts.max_iter << " iterations";
  throw NewtonConvergenceError(msg.str(), std::move(best_x), best_value,
                               best_grad);
}

GaussianApprox local_level_system(std::span<const double> y, double level0,
                                  double rho, double sigma2, double omega2) {
  const std::size_t T = y.size();
  if (T == 0) throw DimensionError("local_level_system: empty data");
  if (!(std::fabs(rho) < 1.0))
    throw ParameterError("local_level_system: requires |rho| < 1");
  if (!(sigma2 > 0.0) || !(omega2 > 0.0))
    throw ParameterError("local_level_system: variances must be positive");

  BandedSymMatrix K = first_diff_gram(T);
  K.scale(1.0 / omega2);
  const BandedSymMatrix ar = ar1_diff_gram(T, rho);
  K.add_scaled(1.0 / sigma2, ar);

  std::vector<double> b = ar.multiply(y);
  for (double& v : b) v /= sigma2;
  b[0] += level0 / omega2;

  std::vector<double> mean = solve_spd(band_cholesky(K), b);
  return {std::move(mean), std::move(K)};
}

SmoothTarget gaussian_target(GaussianApprox approx, Box box) {
  if (box.dim() != approx.dim())
    throw DimensionError("gaussian_target: box dimension mismatch");
  auto shared = std::make_shared<const GaussianApprox>(std::move(approx));
  SmoothTarget t;
  t.dim = shared->dim();
  t.box = std::move(box);
  t.log_density = [shared](std::span<const double> x) {
    return shared->log_density(x);
  };
  t.gradient = [shared](std::span<const double> x) {
    std::vector<double> d(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) d[i] = x[i] - shared->mean()[i];
    std::vector<double> g = shared->precision().multiply(d);
    for (double& v : g) v = -v;
    return g;
  };
  t.neg_hessian = [shared](std::span<const double>) {
    return shared->precision();
  };
  return t;
}

}  // namespace trendqp
