#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "trendqp/banded.hpp"
#include "trendqp/bound.hpp"
#include "trendqp/errors.hpp"
#include "trendqp/rng.hpp"
#include "trendqp/state_gaussian.hpp"

using namespace trendqp;

namespace {

Eigen::MatrixXd to_dense(const BandedSymMatrix& K) {
  const std::size_t n = K.dim();
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) D(i, j) = K.at(i, j);
  return D;
}

BandedSymMatrix random_spd(std::size_t n, std::size_t bw, RngStream& rng) {
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i >= j && i - j <= bw) B(i, j) = rng.normal();
  Eigen::MatrixXd D = B * B.transpose();
  for (std::size_t i = 0; i < n; ++i) D(i, i) += 0.5;
  BandedSymMatrix K(n, bw);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k <= bw && j + k < n; ++k)
      K.set(j + k, j, D(j + k, j));
  return K;
}

std::vector<double> random_vec(std::size_t n, RngStream& rng) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.normal();
  return v;
}

Box free_box(std::size_t n) {
  return Box::uniform(n, Bound::neg_inf(), Bound::pos_inf());
}

// Kolmogorov-Smirnov statistic against the standard normal CDF.
double ks_standard_normal(std::vector<double> z) {
  std::sort(z.begin(), z.end());
  const double n = static_cast<double>(z.size());
  double d = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double f = 0.5 * std::erfc(-z[i] / std::numbers::sqrt2);
    d = std::max(d, std::fabs(f - static_cast<double>(i) / n));
    d = std::max(d, std::fabs(f - static_cast<double>(i + 1) / n));
  }
  return d;
}

// 1-D smooth target f(x) = -cosh(x - c): strictly concave, maximum at c,
// curvature cosh(x - c) >= 1 everywhere.
SmoothTarget cosh_target(double c) {
  SmoothTarget t;
  t.dim = 1;
  t.box = free_box(1);
  t.log_density = [c](std::span<const double> x) { return -std::cosh(x[0] - c); };
  t.gradient = [c](std::span<const double> x) {
    return std::vector<double>{-std::sinh(x[0] - c)};
  };
  t.neg_hessian = [c](std::span<const double> x) {
    BandedSymMatrix K(1, 0);
    K.set(0, 0, std::cosh(x[0] - c));
    return K;
  };
  return t;
}

}  // namespace

TEST_SUITE("state_gaussian") {
  TEST_CASE("gaussian approx log density matches the dense formula") {
    RngStream rng(501);
    for (std::size_t n : {1u, 2u, 5u, 9u}) {
      const std::size_t bw = std::min<std::size_t>(n - 1, 2);
      BandedSymMatrix K = random_spd(n, bw, rng);
      std::vector<double> m = random_vec(n, rng);
      GaussianApprox g(m, K);

      Eigen::MatrixXd Kd = to_dense(K);
      const double log_det = std::log(Kd.determinant());
      CHECK(g.log_det_precision() == doctest::Approx(log_det).epsilon(1e-10));

      for (int rep = 0; rep < 10; ++rep) {
        std::vector<double> x = random_vec(n, rng);
        Eigen::VectorXd d(n);
        for (std::size_t i = 0; i < n; ++i) d(i) = x[i] - m[i];
        const double expect = -0.5 * n * std::log(2.0 * std::numbers::pi) +
                              0.5 * log_det - 0.5 * d.dot(Kd * d);
        CHECK(g.log_density(x) == doctest::Approx(expect).epsilon(1e-10));
      }
    }
  }

  TEST_CASE("gaussian target exposes the approx through all three callbacks") {
    RngStream rng(502);
    const std::size_t n = 7;
    BandedSymMatrix K = random_spd(n, 2, rng);
    std::vector<double> m = random_vec(n, rng);
    GaussianApprox g(m, K);
    Box box = Box::uniform(n, Bound::finite(-4.0), Bound::finite(4.0));
    SmoothTarget t = gaussian_target(g, box);

    REQUIRE(t.dim == n);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(t.box.lo(i) == -4.0);
      CHECK(t.box.hi(i) == 4.0);
    }

    Eigen::MatrixXd Kd = to_dense(K);
    for (int rep = 0; rep < 20; ++rep) {
      std::vector<double> x = random_vec(n, rng);
      CHECK(t.log_density(x) == g.log_density(x));

      // gradient of the Gaussian log density is -K (x - m)
      Eigen::VectorXd d(n);
      for (std::size_t i = 0; i < n; ++i) d(i) = x[i] - m[i];
      Eigen::VectorXd expect = -(Kd * d);
      std::vector<double> grad = t.gradient(x);
      for (std::size_t i = 0; i < n; ++i)
        CHECK(grad[i] == doctest::Approx(expect(i)).epsilon(1e-12));

      BandedSymMatrix H = t.neg_hessian(x);
      CHECK((to_dense(H) - Kd).cwiseAbs().maxCoeff() == 0.0);
    }

    // central finite differences of the value agree with the gradient
    const double h = 1e-5;
    std::vector<double> x = random_vec(n, rng);
    std::vector<double> grad = t.gradient(x);
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      const double fd = (t.log_density(xp) - t.log_density(xm)) / (2.0 * h);
      CHECK(grad[i] == doctest::Approx(fd).epsilon(1e-6));
    }
  }

  TEST_CASE("samples whiten to iid standard normals") {
    RngStream rng(503);
    const std::size_t n = 3;
    BandedSymMatrix K = random_spd(n, 1, rng);
    std::vector<double> m = {1.0, -2.0, 0.5};
    GaussianApprox g(m, K);
    const BandCholesky& L = g.chol();

    const std::size_t draws = 20000;
    std::vector<double> z;
    z.reserve(draws * n);
    std::vector<double> sum(n, 0.0);
    for (std::size_t d = 0; d < draws; ++d) {
      std::vector<double> x = g.sample(rng);
      for (std::size_t i = 0; i < n; ++i) sum[i] += x[i];
      // z = L' (x - m) recovers the white noise that generated the draw
      for (std::size_t i = 0; i < n; ++i) {
        double v = 0.0;
        for (std::size_t j = i; j < std::min(n, i + L.bandwidth() + 1); ++j)
          v += L.at(j, i) * (x[j] - m[j]);
        z.push_back(v);
      }
    }
    const double crit = 1.628 / std::sqrt(static_cast<double>(z.size()));
    CHECK(ks_standard_normal(std::move(z)) < crit);

    // marginal means within 4 standard errors
    Eigen::MatrixXd cov = to_dense(K).inverse();
    for (std::size_t i = 0; i < n; ++i) {
      const double se = std::sqrt(cov(i, i) / static_cast<double>(draws));
      CHECK(std::fabs(sum[i] / draws - m[i]) < 4.0 * se);
    }
  }

  TEST_CASE("sample_mvn_precision is deterministic and matches member sample") {
    RngStream rng(504);
    BandedSymMatrix K = random_spd(6, 2, rng);
    std::vector<double> m = random_vec(6, rng);
    GaussianApprox g(m, K);

    RngStream r1(99), r2(99), r3(99);
    std::vector<double> a = g.sample(r1);
    std::vector<double> b = g.sample(r2);
    std::vector<double> c = sample_mvn_precision(m, g.chol(), r3);
    for (std::size_t i = 0; i < 6; ++i) {
      CHECK(a[i] == b[i]);
      CHECK(a[i] == c[i]);
    }
  }

  TEST_CASE("local level system matches the scalar posterior at T equal 1") {
    const double y = 3.2, level0 = 1.0, sigma2 = 0.7, omega2 = 0.2;
    for (double rho : {-0.5, 0.0, 0.8}) {
      GaussianApprox g =
          local_level_system(std::vector<double>{y}, level0, rho, sigma2, omega2);
      REQUIRE(g.dim() == 1);
      // rho never enters with one observation: eps_0 = 0 makes the first
      // quasi-difference the identity
      const double k = 1.0 / omega2 + 1.0 / sigma2;
      const double mean = (level0 / omega2 + y / sigma2) / k;
      CHECK(g.precision().at(0, 0) == doctest::Approx(k).epsilon(1e-14));
      CHECK(g.mean()[0] == doctest::Approx(mean).epsilon(1e-14));
    }
  }

  TEST_CASE("local level system matches the dense construction at T equal 4") {
    const std::size_t T = 4;
    std::vector<double> y = {2.0, 2.5, 1.5, 3.0};
    const double level0 = 1.8;
    for (double rho : {-0.7, 0.0, 0.3, 0.95}) {
      for (auto [sigma2, omega2] : {std::pair{0.5, 0.1}, std::pair{2.0, 1.3}}) {
        GaussianApprox g = local_level_system(y, level0, rho, sigma2, omega2);
        REQUIRE(g.dim() == T);
        CHECK(g.precision().bandwidth() == 1);

        Eigen::MatrixXd D = Eigen::MatrixXd::Identity(T, T);
        Eigen::MatrixXd A = Eigen::MatrixXd::Identity(T, T);
        for (std::size_t i = 1; i < T; ++i) {
          D(i, i - 1) = -1.0;
          A(i, i - 1) = -rho;
        }
        Eigen::MatrixXd K =
            D.transpose() * D / omega2 + A.transpose() * A / sigma2;
        Eigen::VectorXd yv(T);
        for (std::size_t i = 0; i < T; ++i) yv(i) = y[i];
        Eigen::VectorXd b = A.transpose() * A * yv / sigma2;
        b(0) += level0 / omega2;
        Eigen::VectorXd mean = K.ldlt().solve(b);

        CHECK((to_dense(g.precision()) - K).cwiseAbs().maxCoeff() < 1e-12);
        for (std::size_t i = 0; i < T; ++i)
          CHECK(g.mean()[i] == doctest::Approx(mean(i)).epsilon(1e-10));
      }
    }
  }

  TEST_CASE("newton converges in one step on any quadratic") {
    RngStream rng(505);
    for (std::size_t n : {1u, 4u, 12u}) {
      BandedSymMatrix K = random_spd(n, std::min<std::size_t>(n - 1, 2), rng);
      std::vector<double> m = random_vec(n, rng);
      GaussianApprox g(m, K);
      SmoothTarget t = gaussian_target(g, free_box(n));

      std::vector<double> far(n);
      for (std::size_t i = 0; i < n; ++i) far[i] = m[i] + 40.0 + 3.0 * i;
      NewtonOutcome out = newton_mode(t, far);
      CHECK(out.iterations == 1);
      CHECK(out.grad_norm <= 1e-8);
      for (std::size_t i = 0; i < n; ++i)
        CHECK(out.approx.mean()[i] == doctest::Approx(m[i]).epsilon(1e-9));

      NewtonOutcome at_mode = newton_mode(t, m);
      CHECK(at_mode.iterations == 0);
    }
  }

  TEST_CASE("newton finds the maximum of a non quadratic concave density") {
    SmoothTarget t = cosh_target(3.0);
    NewtonOutcome out = newton_mode(t, {-5.0});
    CHECK(out.grad_norm <= 1e-8);
    CHECK(out.approx.mean()[0] == doctest::Approx(3.0).epsilon(1e-8));
    CHECK(out.approx.precision().at(0, 0) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(out.value == doctest::Approx(-1.0).epsilon(1e-10));
    CHECK(out.iterations >= 2);
  }

  TEST_CASE("non concave region raises not positive definite") {
    // f(x) = x^4 / 4 is convex: its negative Hessian -3 x^2 has a negative
    // pivot away from zero
    SmoothTarget t;
    t.dim = 1;
    t.box = free_box(1);
    t.log_density = [](std::span<const double> x) {
      return 0.25 * x[0] * x[0] * x[0] * x[0];
    };
    t.gradient = [](std::span<const double> x) {
      return std::vector<double>{x[0] * x[0] * x[0]};
    };
    t.neg_hessian = [](std::span<const double> x) {
      BandedSymMatrix K(1, 0);
      K.set(0, 0, -3.0 * x[0] * x[0]);
      return K;
    };
    CHECK_THROWS_AS(newton_mode(t, {2.0}), NotPositiveDefiniteError);
  }

  TEST_CASE("iteration cap raises a convergence error carrying the best point") {
    SmoothTarget t = cosh_target(0.0);
    NewtonOptions opts;
    opts.max_iter = 2;
    // each Newton step moves by tanh(x) so the walk from 40 cannot finish
    try {
      newton_mode(t, {40.0}, opts);
      FAIL("expected NewtonConvergenceError");
    } catch (const NewtonConvergenceError& e) {
      REQUIRE(e.best_x.size() == 1);
      CHECK(std::fabs(e.best_x[0]) < 40.0);
      CHECK(e.value == doctest::Approx(-std::cosh(e.best_x[0])).epsilon(1e-12));
      CHECK(e.grad_norm > 1e-8);
    }
  }

  TEST_CASE("monotone ascent never decreases the objective") {
    // mixture-like bumpy concave target: -cosh(x) - 0.3 x^2 shifted
    SmoothTarget t;
    t.dim = 1;
    t.box = free_box(1);
    t.log_density = [](std::span<const double> x) {
      return -std::cosh(x[0] - 1.0) - 0.3 * x[0] * x[0];
    };
    t.gradient = [](std::span<const double> x) {
      return std::vector<double>{-std::sinh(x[0] - 1.0) - 0.6 * x[0]};
    };
    t.neg_hessian = [](std::span<const double> x) {
      BandedSymMatrix K(1, 0);
      K.set(0, 0, std::cosh(x[0] - 1.0) + 0.6);
      return K;
    };
    NewtonOutcome out = newton_mode(t, {-8.0});
    CHECK(out.grad_norm <= 1e-8);
    // stationarity cross-check with the analytic gradient
    CHECK(std::fabs(t.gradient(out.approx.mean())[0]) <= 1e-8);
    // the maximizer of the sum sits between the two pulls
    CHECK(out.approx.mean()[0] > 0.0);
    CHECK(out.approx.mean()[0] < 1.0);
  }
}
