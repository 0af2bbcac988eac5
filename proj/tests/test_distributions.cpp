#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "doctest.h"
#include "trendqp/distributions.hpp"
#include "trendqp/normal.hpp"
#include "trendqp/rng.hpp"

using namespace trendqp;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Kolmogorov-Smirnov distance of sorted uniforms against U(0,1).
double ks_uniform(std::vector<double> u) {
  std::sort(u.begin(), u.end());
  const double n = static_cast<double>(u.size());
  double d = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    d = std::max(d, std::fabs(u[i] - static_cast<double>(i) / n));
    d = std::max(d, std::fabs(u[i] - static_cast<double>(i + 1) / n));
  }
  return d;
}

// Truncated-normal CDF from the erfc-backed normal CDF; test-side oracle.
double tn_cdf(double x, double lo, double hi, double mu, double sd) {
  auto cdf = [](double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); };
  const double a = std::isfinite(lo) ? cdf((lo - mu) / sd) : 0.0;
  const double b = std::isfinite(hi) ? cdf((hi - mu) / sd) : 1.0;
  return (cdf((x - mu) / sd) - a) / (b - a);
}

double simpson(const std::function<double(double)>& f, double a, double b,
               std::size_t n) {
  // n must be even
  const double h = (b - a) / static_cast<double>(n);
  double s = f(a) + f(b);
  for (std::size_t i = 1; i < n; ++i)
    s += f(a + h * static_cast<double>(i)) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

}  // namespace

TEST_SUITE("distributions") {
  TEST_CASE("normal cdf and ccdf agree with erfc") {
    for (double x = -37.0; x <= 37.0; x += 0.37) {
      const double ref = 0.5 * std::erfc(-x / std::sqrt(2.0));
      CHECK(normal_cdf(x) == doctest::Approx(ref).epsilon(1e-13));
      const double refc = 0.5 * std::erfc(x / std::sqrt(2.0));
      if (refc > 0.0)
        CHECK(normal_ccdf(x) == doctest::Approx(refc).epsilon(1e-12));
    }
  }

  TEST_CASE("log ccdf is stable into the far tail") {
    // mid-range: agree with the direct ccdf
    for (double x : {-5.0, 0.0, 1.5, 8.0, 20.0})
      CHECK(log_normal_ccdf(x) ==
            doctest::Approx(std::log(normal_ccdf(x))).epsilon(1e-12));
    // far tail: three-term asymptotic ln Q(x) ~ ln phi(x) - ln x + ln(1 - x^-2 + 3 x^-4)
    for (double x : {50.0, 100.0, 500.0}) {
      const double ref = -0.5 * x * x - 0.5 * std::log(2.0 * M_PI) -
                         std::log(x) +
                         std::log1p(-1.0 / (x * x) + 3.0 / (x * x * x * x));
      CHECK(log_normal_ccdf(x) == doctest::Approx(ref).epsilon(1e-10));
    }
    CHECK(std::isfinite(log_normal_ccdf(1e4)));
  }

  TEST_CASE("quantile inverts the cdf") {
    for (double p : {1e-12, 1e-8, 1e-3, 0.02, 0.5, 0.77, 1 - 1e-3, 1 - 1e-8}) {
      const double x = normal_quantile(p);
      CHECK(normal_cdf(x) == doctest::Approx(p).epsilon(1e-9));
    }
    CHECK(normal_quantile(0.5) == 0.0);
  }

  TEST_CASE("interval mass avoids cancellation on both sides") {
    CHECK(norm_interval_mass(-1.0, 1.0) ==
          doctest::Approx(std::erf(1.0 / std::sqrt(2.0))).epsilon(1e-14));
    // symmetric tails must match exactly
    CHECK(norm_interval_mass(5.0, 6.0) ==
          doctest::Approx(norm_interval_mass(-6.0, -5.0)).epsilon(1e-13));
    // far tail stays positive and log form stays finite
    CHECK(norm_interval_mass(38.0, 39.0) > 0.0);
    CHECK(std::isfinite(log_norm_interval_mass(100.0, 101.0)));
    CHECK(log_norm_interval_mass(100.0, 101.0) < -5000.0);
  }

  TEST_CASE("truncated normal draws stay strictly inside their interval") {
    RngStream rng(100);
    const struct { double lo, hi, mu, s2; } grid[] = {
        {0.0, kInf, 0.0, 1.0},  {-kInf, 0.0, 0.0, 1.0}, {0.0, 1.0, 0.0, 1.0},
        {0.0, 1.0, 5.0, 1.0},   {-1.0, 1.0, 0.0, 0.01}, {10.0, 11.0, 0.0, 1.0},
        {0.0, 5.0, 2.5, 4.0},   {1000.0, kInf, 0.0, 1.0}};
    for (const auto& g : grid) {
      const Bound lo = Bound::of(g.lo), hi = Bound::of(g.hi);
      for (int i = 0; i < 2000; ++i) {
        const double x = sample_trunc_normal(lo, hi, g.mu, g.s2, rng);
        CHECK(x > g.lo);
        CHECK(x < g.hi);
      }
    }
  }

  TEST_CASE("truncated normal sampler passes KS against the cdf oracle") {
    const struct { double lo, hi, mu, s2; } grid[] = {
        {0.0, kInf, 0.0, 1.0},  {0.0, 1.0, 0.0, 1.0},  {0.0, 1.0, 5.0, 1.0},
        {-1.0, 1.0, 0.0, 0.01}, {10.0, 11.0, 0.0, 1.0}, {0.0, 5.0, 2.5, 4.0}};
    const std::size_t n = 100000;
    const double crit = 1.628 / std::sqrt(static_cast<double>(n));  // 1% level
    RngStream rng(101);
    for (const auto& g : grid) {
      std::vector<double> u(n);
      for (std::size_t i = 0; i < n; ++i) {
        const double x =
            sample_trunc_normal(Bound::of(g.lo), Bound::of(g.hi), g.mu, g.s2, rng);
        u[i] = tn_cdf(x, g.lo, g.hi, g.mu, std::sqrt(g.s2));
      }
      CHECK(ks_uniform(std::move(u)) < crit);
    }
  }

  TEST_CASE("truncated normal log density integrates to one") {
    const struct { double lo, hi, mu, s2; } grid[] = {
        {0.0, 1.0, 0.0, 1.0}, {0.0, 1.0, 5.0, 1.0}, {-2.0, 3.0, 1.0, 4.0}};
    for (const auto& g : grid) {
      auto f = [&](double x) {
        return std::exp(
            log_trunc_normal_pdf(x, Bound::of(g.lo), Bound::of(g.hi), g.mu, g.s2));
      };
      CHECK(simpson(f, g.lo, g.hi, 4000) == doctest::Approx(1.0).epsilon(1e-6));
    }
    // half line: integrate far enough that the remainder is negligible
    auto f = [](double x) {
      return std::exp(
          log_trunc_normal_pdf(x, Bound::finite(0.0), Bound::pos_inf(), 0.0, 1.0));
    };
    CHECK(simpson(f, 0.0, 12.0, 6000) == doctest::Approx(1.0).epsilon(1e-6));
  }

  TEST_CASE("pinned density values") {
    // standard normal at 0
    CHECK(log_normal_pdf(0.0, 0.0, 1.0) ==
          doctest::Approx(-0.9189385332046727).epsilon(1e-14));
    // halving the support doubles the density
    CHECK(log_trunc_normal_pdf(1.0, Bound::finite(0.0), Bound::pos_inf(), 0.0, 1.0) ==
          doctest::Approx(log_normal_pdf(1.0, 0.0, 1.0) + std::log(2.0))
              .epsilon(1e-13));
    // inverse gamma: nu = 2, S = 3 at x = 1: 2 ln 3 - ln Gamma(2) - 3
    CHECK(log_inv_gamma_pdf(1.0, 2.0, 3.0) ==
          doctest::Approx(2.0 * std::log(3.0) - 3.0).epsilon(1e-13));
    CHECK(log_uniform_pdf(0.3, -1.0, 1.0) ==
          doctest::Approx(-std::log(2.0)).epsilon(1e-14));
    CHECK(log_uniform_pdf(1.5, -1.0, 1.0) == -kInf);
    CHECK(log_trunc_normal_pdf(-0.5, Bound::finite(0.0), Bound::finite(1.0),
                               0.0, 1.0) == -kInf);
  }

  TEST_CASE("normal and inverse gamma moments within three standard errors") {
    RngStream rng(102);
    const std::size_t n = 200000;
    double s = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double x = sample_normal(2.0, 9.0, rng);
      s += x;
      s2 += x * x;
    }
    const double mean = s / n;
    const double var = s2 / n - mean * mean;
    CHECK(std::fabs(mean - 2.0) < 3.0 * std::sqrt(9.0 / n));
    CHECK(std::fabs(var - 9.0) < 3.0 * 9.0 * std::sqrt(2.0 / n));

    // IG(nu, S): mean S/(nu-1), var S^2/((nu-1)^2 (nu-2))
    const double nu = 10.0, S = 18.0;
    const double m_true = S / (nu - 1.0);
    const double v_true = S * S / ((nu - 1.0) * (nu - 1.0) * (nu - 2.0));
    s = s2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double x = sample_inv_gamma(nu, S, rng);
      s += x;
      s2 += x * x;
    }
    const double m_hat = s / n;
    CHECK(std::fabs(m_hat - m_true) < 3.0 * std::sqrt(v_true / n));
    // spot check the density normalization as well
    auto f = [&](double x) { return std::exp(log_inv_gamma_pdf(x, nu, S)); };
    CHECK(simpson(f, 0.05, 40.0, 8000) == doctest::Approx(1.0).epsilon(1e-6));
  }

  TEST_CASE("gamma sampler moments") {
    RngStream rng(103);
    const std::size_t n = 200000;
    for (double shape : {0.7, 1.0, 3.7}) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += sample_gamma(shape, rng);
      CHECK(std::fabs(s / n - shape) < 3.0 * std::sqrt(shape / n));
    }
  }

  TEST_CASE("slice sampler reproduces a known target") {
    RngStream rng(104);
    auto log_f = [](double x) { return -0.5 * (x - 3.0) * (x - 3.0) / 4.0; };
    const std::size_t n = 20000;
    double x = 0.0, s = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      x = slice_sample_1d(log_f, x, rng, 1.0);
      s += x;
      s2 += x * x;
    }
    const double mean = s / n;
    const double var = s2 / n - mean * mean;
    CHECK(mean == doctest::Approx(3.0).epsilon(0.03));
    CHECK(var == doctest::Approx(4.0).epsilon(0.08));
  }

  TEST_CASE("interval mass derivatives match finite differences and concavity") {
    const struct { double lo, hi, mu, s2; } grid[] = {
        {0.0, 1.0, 0.5, 1.0},   {0.0, 1.0, 5.0, 1.0},  {0.0, 1.0, -30.0, 1.0},
        {0.0, kInf, -3.0, 4.0}, {-kInf, 0.0, 2.0, 0.25}, {0.0, 5.0, 2.5, 0.04}};
    for (const auto& g : grid) {
      const Bound lo = Bound::of(g.lo), hi = Bound::of(g.hi);
      const IntervalMassDerivs r = norm_interval_mass_derivs(lo, hi, g.mu, g.s2);
      CHECK(r.d2 <= 1e-12);
      const double h = 1e-5 * (1.0 + std::fabs(g.mu));
      const IntervalMassDerivs rp = norm_interval_mass_derivs(lo, hi, g.mu + h, g.s2);
      const IntervalMassDerivs rm = norm_interval_mass_derivs(lo, hi, g.mu - h, g.s2);
      CHECK(r.d1 ==
            doctest::Approx((rp.log_mass - rm.log_mass) / (2.0 * h)).epsilon(1e-5));
      CHECK(r.d2 ==
            doctest::Approx((rp.d1 - rm.d1) / (2.0 * h)).epsilon(1e-4));
    }
    // extremely far means must stay finite (log-scale tail ratios)
    const IntervalMassDerivs far =
        norm_interval_mass_derivs(Bound::finite(0.0), Bound::finite(1.0), 1e6, 1.0);
    CHECK(std::isfinite(far.log_mass));
    CHECK(std::isfinite(far.d1));
    CHECK(std::isfinite(far.d2));
  }

  TEST_CASE("family dispatch matches the direct densities") {
    CHECK(log_density(Family{NormalFamily{1.0, 2.0}}, 0.3) ==
          log_normal_pdf(0.3, 1.0, 2.0));
    CHECK(log_density(Family{TruncNormalFamily{Bound::finite(0.0),
                                               Bound::finite(1.0), 0.2, 1.0}},
                      0.4) ==
          log_trunc_normal_pdf(0.4, Bound::finite(0.0), Bound::finite(1.0), 0.2, 1.0));
    CHECK(log_density(Family{InvGammaFamily{3.0, 2.0}}, 1.7) ==
          log_inv_gamma_pdf(1.7, 3.0, 2.0));
    CHECK(log_density(Family{UniformFamily{0.0, 2.0}}, 1.0) ==
          log_uniform_pdf(1.0, 0.0, 2.0));
  }

  TEST_CASE("parameter validation") {
    RngStream rng(105);
    CHECK_THROWS_AS(sample_normal(0.0, 0.0, rng), ParameterError);
    CHECK_THROWS_AS(sample_normal(0.0, -1.0, rng), ParameterError);
    CHECK_THROWS_AS(sample_trunc_normal(Bound::finite(1.0), Bound::finite(0.0),
                                        0.0, 1.0, rng), ParameterError);
    CHECK_THROWS_AS(sample_inv_gamma(0.0, 1.0, rng), ParameterError);
    CHECK_THROWS_AS(sample_inv_gamma(1.0, -2.0, rng), ParameterError);
    CHECK_THROWS_AS(sample_gamma(0.0, rng), ParameterError);
    CHECK_THROWS_AS(Bound::of(std::nan("")), ParameterError);
  }
}
