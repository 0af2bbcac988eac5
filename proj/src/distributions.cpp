#include "trendqp/distributions.hpp"

#include <cmath>
#include <limits>

#include "trendqp/errors.hpp"
#include "trendqp/normal.hpp"

namespace trendqp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Region switches for the truncated sampler. Naive rejection is used while the
// interval mass stays above kNaiveMassMin (expected < 4 proposals); below that
// the proposal is uniform on the interval or, in one-sided tails, Robert's
// translated-exponential.
constexpr double kNaiveMassMin = 0.25;
constexpr double kTailMassMin = 0.25;
constexpr long kRejectionCap = 1000000;

// Standardized draw from N(0,1) on (a, b) with 0 <= a < b (possibly b = inf).
double sample_std_tail(double a, double b, RngStream& rng) {
  const double lambda = 0.5 * (a + std::sqrt(a * a + 4.0));
  // Probability that the one-sided proposal lands below b.
  const double p_below = b == std::numeric_limits<double>::infinity()
                             ? 1.0
                             : -std::expm1(-lambda * (b - a));
  if (p_below >= kTailMassMin) {
    // Robert's exponential rejection at a, discarding draws beyond b.
    for (long it = 0; it < kRejectionCap; ++it) {
      const double x = a - std::log(rng.uniform()) / lambda;
      if (x >= b) continue;
      const double d = x - lambda;
      if (std::log(rng.uniform()) <= -0.5 * d * d) return x;
    }
  } else {
    // Narrow far-tail slice: uniform proposal, accept exp((a^2 - x^2)/2).
    for (long it = 0; it < kRejectionCap; ++it) {
      const double x = a + (b - a) * rng.uniform();
      if (std::log(rng.uniform()) <= 0.5 * (a * a - x * x)) return x;
    }
  }
  throw ConvergenceError("sample_trunc_normal: rejection cap exceeded");
}

// Standardized draw on (a, b) with a < 0 < b allowed; dispatches by region.
double sample_std_trunc(double a, double b, RngStream& rng) {
  if (a <= 0.0 && b >= 0.0) {
    const double mass = norm_interval_mass(a, b);
    if (mass >= kNaiveMassMin) {
      for (long it = 0; it < kRejectionCap; ++it) {
        const double x = rng.normal();
        if (x > a && x < b) return x;
      }
      throw ConvergenceError("sample_trunc_normal: rejection cap exceeded");
    }
    // Narrow interval around the mode: uniform proposal, accept exp(-x^2/2).
    for (long it = 0; it < kRejectionCap; ++it) {
      const double x = a + (b - a) * rng.uniform();
      if (std::log(rng.uniform()) <= -0.5 * x * x) return x;
    }
    throw ConvergenceError("sample_trunc_normal: rejection cap exceeded");
  }
  if (a >= 0.0) return sample_std_tail(a, b, rng);
  return -sample_std_tail(-b, -a, rng);
}

}  // namespace

double sample_normal(double mu, double sigma2, RngStream& rng) {
  if (!(sigma2 > 0.0)) throw ParameterError("sample_normal: sigma2 must be > 0");
  return mu + std::sqrt(sigma2) * rng.normal();
}

double sample_trunc_normal(Bound lo, Bound hi, double mu, double sigma2,
                           RngStream& rng) {
  if (!(sigma2 > 0.0)) throw ParameterError("sample_trunc_normal: sigma2 must be > 0");
  if (!(lo.value() < hi.value()))
    throw ParameterError("sample_trunc_normal: empty or inverted interval");
  const double sigma = std::sqrt(sigma2);
  const double a = (lo.value() - mu) / sigma;
  const double b = (hi.value() - mu) / sigma;
  double x = mu + sigma * sample_std_trunc(a, b, rng);
  // Rounding may land exactly on a finite endpoint; nudge inward.
  if (x <= lo.value()) x = std::nextafter(lo.value(), hi.value());
  if (x >= hi.value()) x = std::nextafter(hi.value(), lo.value());
  return x;
}

double sample_gamma(double shape, RngStream& rng) {
  if (!(shape > 0.0)) throw ParameterError("sample_gamma: shape must be > 0");
  if (shape < 1.0) {
    // Boost via G(shape) = G(shape + 1) * U^{1/shape}.
    const double g = sample_gamma(shape + 1.0, rng);
    return g * std::pow(rng.uniform(), 1.0 / shape);
  }
  // Marsaglia-Tsang, with the full log acceptance test every iteration.
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (long it = 0; it < kRejectionCap; ++it) {
    const double z = rng.normal();
    const double f = 1.0 + c * z;
    if (f <= 0.0) continue;
    const double v = f * f * f;
    const double u = rng.uniform();
    if (std::log(u) < 0.5 * z * z + d - d * v + d * std::log(v)) return d * v;
  }
  throw ConvergenceError("sample_gamma: rejection cap exceeded");
}

double sample_inv_gamma(double nu, double S, RngStream& rng) {
  if (!(nu > 0.0) || !(S > 0.0))
    throw ParameterError("sample_inv_gamma: nu and S must be > 0");
  // 1 / Gamma(shape = nu, rate = S) = S / Gamma(shape = nu, rate = 1).
  return S / sample_gamma(nu, rng);
}

double log_normal_pdf(double x, double mu, double sigma2) {
  if (!(sigma2 > 0.0)) throw ParameterError("log_normal_pdf: sigma2 must be > 0");
  const double d = x - mu;
  return -0.5 * std::log(2.0 * M_PI * sigma2) - 0.5 * d * d / sigma2;
}

double log_trunc_normal_pdf(double x, Bound lo, Bound hi, double mu, double sigma2) {
  if (!(sigma2 > 0.0)) throw ParameterError("log_trunc_normal_pdf: sigma2 must be > 0");
  if (!(lo.value() < hi.value()))
    throw ParameterError("log_trunc_normal_pdf: empty or inverted interval");
  if (x < lo.value() || x > hi.value()) return kNegInf;
  const double sigma = std::sqrt(sigma2);
  const double a = (lo.value() - mu) / sigma;
  const double b = (hi.value() - mu) / sigma;
  return log_normal_pdf(x, mu, sigma2) - log_norm_interval_mass(a, b);
}

double log_inv_gamma_pdf(double x, double nu, double S) {
  if (!(nu > 0.0) || !(S > 0.0))
    throw ParameterError("log_inv_gamma_pdf: nu and S must be > 0");
  if (!(x > 0.0)) return kNegInf;
  return nu * std::log(S) - std::lgamma(nu) - (nu + 1.0) * std::log(x) - S / x;
}

double log_uniform_pdf(double x, double lo, double hi) {
  if (!(lo < hi)) throw ParameterError("log_uniform_pdf: requires lo < hi");
  if (x < lo || x > hi) return kNegInf;
  return -std::log(hi - lo);
}

double slice_sample_1d(const std::function<double(double)>& log_f, double x0,
                       RngStream& rng, double width) {
  if (!(width > 0.0))
    throw ParameterError("slice_sample_1d: width must be positive");
  const double f0 = log_f(x0);
  if (!std::isfinite(f0))
    throw ParameterError("slice_sample_1d: log_f not finite at x0");
  // Slice level ln y = ln f(x0) + ln U; stepping out then shrinking (Neal).
  const double level = f0 + std::log(rng.uniform());

  constexpr int kMaxStepOut = 200;
  double left = x0 - width * rng.uniform();
  double right = left + width;
  for (int i = 0; i < kMaxStepOut && log_f(left) > level; ++i) left -= width;
  for (int i = 0; i < kMaxStepOut && log_f(right) > level; ++i) right += width;

  constexpr int kMaxShrink = 1000;
  for (int i = 0; i < kMaxShrink; ++i) {
    const double x = left + (right - left) * rng.uniform();
    if (log_f(x) > level) return x;
    if (x < x0) left = x;
    else right = x;
  }
  throw ConvergenceError("slice_sample_1d: shrinkage failed to terminate");
}

IntervalMassDerivs norm_interval_mass_derivs(Bound lo, Bound hi, double mu,
                                             double sigma2) {
  if (!(std::isfinite(sigma2) && sigma2 > 0.0))
    throw ParameterError("norm_interval_mass_derivs: sigma2 must be positive");
  if (!(lo.value() < hi.value()))
    throw ParameterError("norm_interval_mass_derivs: requires lo < hi");
  const double sd = std::sqrt(sigma2);
  const double a = (lo.value() - mu) / sd;
  const double b = (hi.value() - mu) / sd;

  IntervalMassDerivs r;
  r.log_mass = log_norm_interval_mass(a, b);
  // Density-to-mass ratios phi(.)/Z on the log scale; exact zeros at the
  // infinite endpoints.
  const double ra =
      std::isfinite(a) ? std::exp(log_normal_pdf_std(a) - r.log_mass) : 0.0;
  const double rb =
      std::isfinite(b) ? std::exp(log_normal_pdf_std(b) - r.log_mass) : 0.0;
  r.d1 = (ra - rb) / sd;
  const double ta = std::isfinite(a) ? a * ra : 0.0;
  const double tb = std::isfinite(b) ? b * rb : 0.0;
  // Concavity of the log-mass holds exactly; clip roundoff excess.
  r.d2 = std::min((ta - tb) / sigma2 - r.d1 * r.d1, 0.0);
  return r;
}

double log_density(const Family& family, double x) {
  return std::visit(
      [x](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, NormalFamily>)
          return log_normal_pdf(x, f.mu, f.sigma2);
        else if constexpr (std::is_same_v<T, TruncNormalFamily>)
          return log_trunc_normal_pdf(x, f.lo, f.hi, f.mu, f.sigma2);
        else if constexpr (std::is_same_v<T, InvGammaFamily>)
          return log_inv_gamma_pdf(x, f.nu, f.S);
        else
          return log_uniform_pdf(x, f.lo, f.hi);
      },
      family);
}

}  // namespace trendqp
