#pragma once

namespace trendqp {

/// Standard normal density and distribution helpers. The CDF/quantile pair is
/// accurate to better than 1e-12 absolute; truncation normalizers feed the
/// exact ARMH target density, so this accuracy is a contract, not a nicety.

double normal_pdf(double x);
double log_normal_pdf_std(double x);

/// Phi(x)
double normal_cdf(double x);
/// Q(x) = 1 - Phi(x)
double normal_ccdf(double x);
/// log Q(x), stable for arbitrarily large x (asymptotic series in the far tail).
double log_normal_ccdf(double x);

/// Phi^{-1}(p) for p in (0, 1); Wichura's AS 241 rational approximations.
double normal_quantile(double p);

/// Phi(b) - Phi(a) for a < b, computed from the side that avoids cancellation.
double norm_interval_mass(double a, double b);
/// log(Phi(b) - Phi(a)), stable in far tails where the mass underflows.
double log_norm_interval_mass(double a, double b);

}  // namespace trendqp
