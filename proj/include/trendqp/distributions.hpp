#pragma once

#include <functional>
#include <variant>

#include "trendqp/bound.hpp"
#include "trendqp/rng.hpp"

namespace trendqp {

/// Draw from N(mu, sigma2). sigma2 > 0.
double sample_normal(double mu, double sigma2, RngStream& rng);

/// Draw from N(mu, sigma2) conditioned on (lo, hi); the draw lies strictly
/// inside the interval. Region-adaptive: naive normal rejection when the
/// interval holds substantial mass, uniform or exponential (Robert-style)
/// rejection in narrow or tail regions, so far-tail intervals cannot hang.
double sample_trunc_normal(Bound lo, Bound hi, double mu, double sigma2,
                           RngStream& rng);

/// Draw from the inverse-gamma law with shape nu and scale S (mean S/(nu-1)),
/// realized as 1 / Gamma(shape = nu, rate = S).
double sample_inv_gamma(double nu, double S, RngStream& rng);

/// Unit-scale Gamma(shape) draw, Marsaglia-Tsang; building block for the above.
double sample_gamma(double shape, RngStream& rng);

// -- log densities (all include normalizing constants; -inf outside support) --

double log_normal_pdf(double x, double mu, double sigma2);
double log_trunc_normal_pdf(double x, Bound lo, Bound hi, double mu, double sigma2);
double log_inv_gamma_pdf(double x, double nu, double S);
double log_uniform_pdf(double x, double lo, double hi);

/// One update of a univariate slice sampler (stepping-out then shrinkage)
/// targeting the density proportional to exp(log_f). Exact for any continuous
/// unnormalized log-density that is finite at x0; the shrinkage phase cannot
/// fail to terminate because x0 itself always lies above the slice level.
double slice_sample_1d(const std::function<double(double)>& log_f, double x0,
                       RngStream& rng, double width = 1.0);

/// ln P(lo <= X <= hi) for X ~ N(mu, sigma2) together with its first two
/// derivatives in mu. The log-mass is concave in mu, so d2 <= 0. Evaluated
/// through log-scale tail ratios so far-outside mu cannot underflow to NaN.
struct IntervalMassDerivs {
  double log_mass;
  double d1;  // d/dmu ln Z
  double d2;  // d^2/dmu^2 ln Z
};
IntervalMassDerivs norm_interval_mass_derivs(Bound lo, Bound hi, double mu,
                                             double sigma2);

struct NormalFamily {
  double mu, sigma2;
};
struct TruncNormalFamily {
  Bound lo, hi;
  double mu, sigma2;
};
struct InvGammaFamily {
  double nu, S;
};
struct UniformFamily {
  double lo, hi;
};
using Family = std::variant<NormalFamily, TruncNormalFamily, InvGammaFamily, UniformFamily>;

double log_density(const Family& family, double x);

}  // namespace trendqp
