#include <cmath>
#include <string>

#include "trendqp/errors.hpp"
#include "trendqp/models.hpp"

namespace trendqp {

std::vector<double> transform_inflation(std::span<const double> z) {
  if (z.size() < 2)
    throw DataError("transform_inflation: needs at least two levels", 0);
  for (std::size_t i = 0; i < z.size(); ++i)
    if (!(z[i] > 0.0) || !std::isfinite(z[i]))
      throw DataError("transform_inflation: non-positive level", i);
  std::vector<double> y(z.size() - 1);
  for (std::size_t i = 1; i < z.size(); ++i)
    y[i - 1] = 400.0 * (std::log(z[i]) - std::log(z[i - 1]));
  return y;
}

void UcArHyper::validate() const {
  if (!(b0 > 0.0) || !(nu_sigma2 > 0.0) || !(S_sigma2 > 0.0) ||
      !(nu_omega2 > 0.0) || !(S_omega2 > 0.0) || !std::isfinite(a0))
    throw ParameterError("UcArHyper: b0 and shapes/scales must be positive");
}

void UcArState::validate(const Box& box) const {
  if (tau.size() != box.dim())
    throw DimensionError("UcArState: tau/box dimension mismatch");
  if (!(std::fabs(rho) < 1.0))
    throw ParameterError("UcArState: requires |rho| < 1");
  if (!(sigma2 > 0.0) || !(omega2 > 0.0))
    throw ParameterError("UcArState: variances must be positive");
  if (!std::isfinite(tau0)) throw ParameterError("UcArState: tau0 not finite");
  if (!box.contains(tau))
    throw ParameterError("UcArState: tau outside its box");
}

void ucar_sample_statics(UcArState& s, std::span<const double> y,
                         const UcArHyper& hyper, RngStream& rng,
                         double omega2_scale_bias) {
  const std::size_t T = s.tau.size();
  if (T == 0 || y.size() != T)
    throw DimensionError("ucar_sample_statics: tau/y length mismatch");

  {
    const double prec = 1.0 / hyper.b0 + 1.0 / s.omega2;
    const double mean =
        (hyper.a0 / hyper.b0 + s.tau[0] / s.omega2) / prec;
    s.tau0 = sample_normal(mean, 1.0 / prec, rng);
  }

  // Noise path; eps_0 = 0 keeps the t = 1 innovation free of rho.
  std::vector<double> eps(T);
  for (std::size_t t = 0; t < T; ++t) eps[t] = y[t] - s.tau[t];

  {
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t t = 1; t < T; ++t) {
      sxx += eps[t - 1] * eps[t - 1];
      sxy += eps[t] * eps[t - 1];
    }
    if (sxx > 0.0) {
      s.rho = sample_trunc_normal(Bound::finite(-1.0), Bound::finite(1.0),
                                  sxy / sxx, s.sigma2 / sxx, rng);
    } else {
      // Likelihood flat in rho; the conditional is the uniform prior.
      s.rho = -1.0 + 2.0 * rng.uniform();
    }
  }

  {
    double ssr = eps[0] * eps[0];
    for (std::size_t t = 1; t < T; ++t) {
      const double u = eps[t] - s.rho * eps[t - 1];
      ssr += u * u;
    }
    s.sigma2 = sample_inv_gamma(hyper.nu_sigma2 + 0.5 * static_cast<double>(T),
                                hyper.S_sigma2 + 0.5 * ssr, rng);
  }

  {
    double ssd = (s.tau[0] - s.tau0) * (s.tau[0] - s.tau0);
    for (std::size_t t = 1; t < T; ++t) {
      const double d = s.tau[t] - s.tau[t - 1];
      ssd += d * d;
    }
    s.omega2 = sample_inv_gamma(
        hyper.nu_omega2 + 0.5 * static_cast<double>(T),
        (hyper.S_omega2 + 0.5 * ssd) * omega2_scale_bias, rng);
  }
}

UcArState ucar_draw_params(const UcArHyper& hyper, RngStream& rng) {
  hyper.validate();
  UcArState s;
  s.tau0 = sample_normal(hyper.a0, hyper.b0, rng);
  s.rho = -1.0 + 2.0 * rng.uniform();
  s.sigma2 = sample_inv_gamma(hyper.nu_sigma2, hyper.S_sigma2, rng);
  s.omega2 = sample_inv_gamma(hyper.nu_omega2, hyper.S_omega2, rng);
  return s;
}

void ucar_draw_trend(UcArState& s, std::size_t T, const Box& box,
                     RngStream& rng) {
  if (T == 0 || box.dim() != T)
    throw DimensionError("ucar_draw_trend: box dimension mismatch");
  constexpr std::size_t kMaxAttempts = 200000;
  s.tau.assign(T, 0.0);
  const double sd = std::sqrt(s.omega2);
  for (std::size_t attempt = 0; attempt < kMaxAttempts; ++attempt) {
    double prev = s.tau0;
    bool feasible = true;
    for (std::size_t t = 0; t < T; ++t) {
      prev += sd * rng.normal();
      if (prev < box.lo(t) || prev > box.hi(t)) {
        feasible = false;
        break;
      }
      s.tau[t] = prev;
    }
    if (feasible) return;
  }
  throw ConvergenceError(
      "ucar_draw_trend: box rejected every path; box too tight for these "
      "parameters");
}

std::vector<double> ucar_draw_data(const UcArState& s, RngStream& rng) {
  const std::size_t T = s.tau.size();
  std::vector<double> y(T);
  const double sd = std::sqrt(s.sigma2);
  double eps = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    eps = s.rho * eps + sd * rng.normal();
    y[t] = s.tau[t] + eps;
  }
  return y;
}

}  // namespace trendqp
