#include <chrono>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "trendqp/qp_box.hpp"
#include "trendqp/rng.hpp"

using namespace trendqp;

namespace {

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    d = std::max(d, std::fabs(a[i] - b[i]));
  return d;
}

// Random instance in the shape the samplers produce: tridiagonal SPD
// precision with random-walk structure plus a diagonal, random mean, and a
// box that mixes finite and infinite sides.
BoxQp random_instance(std::size_t T, RngStream& rng, bool allow_infinite = true) {
  BandedSymMatrix C(T, T == 1 ? 0 : 1);
  for (std::size_t t = 0; t < T; ++t) {
    C.set(t, t, 1.0 + 3.0 * rng.uniform());
    if (t + 1 < T) {
      const double off = -rng.uniform();
      C.set(t + 1, t, off);
      C.add(t, t, std::fabs(off));
      C.add(t + 1, t + 1, std::fabs(off));
    }
  }
  std::vector<double> m(T);
  for (double& v : m) v = 3.0 * rng.normal();
  std::vector<Bound> lo(T, Bound::neg_inf()), hi(T, Bound::pos_inf());
  for (std::size_t t = 0; t < T; ++t) {
    const double u = rng.uniform();
    const double a = rng.normal(), w = 0.5 + 2.0 * rng.uniform();
    if (!allow_infinite || u < 0.7) {
      lo[t] = Bound::finite(a);
      hi[t] = Bound::finite(a + w);
    } else if (u < 0.85) {
      lo[t] = Bound::finite(a);
    } else {
      hi[t] = Bound::finite(a);
    }
  }
  return BoxQp(std::move(C), std::move(m), Box(std::move(lo), std::move(hi)));
}

}  // namespace

TEST_SUITE("qp") {
  TEST_CASE("solver matches the enumeration oracle on random small instances") {
    RngStream rng(201);
    const auto start = std::chrono::steady_clock::now();
    for (int rep = 0; rep < 500; ++rep) {
      const std::size_t T = 1 + rep % 8;
      BoxQp p = random_instance(T, rng);
      QpResult r = solve_box_qp(p);
      std::vector<double> oracle = enumeration_oracle(p);
      CHECK(max_abs_diff(r.tau_star, oracle) < 1e-8);
      CHECK(r.kkt_residual <= 1e-8);
      CHECK(p.box.contains(r.tau_star));
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    CHECK(secs < 10.0);
  }

  TEST_CASE("unconstrained solution is the mean") {
    RngStream rng(202);
    for (std::size_t T : {1u, 4u, 50u}) {
      BandedSymMatrix C(T, T == 1 ? 0 : 1);
      for (std::size_t t = 0; t < T; ++t) {
        C.set(t, t, 2.0);
        if (t + 1 < T) C.set(t + 1, t, -0.5);
      }
      std::vector<double> m(T);
      for (double& v : m) v = rng.normal();
      BoxQp p(C, m, Box::unbounded(T));
      QpResult r = solve_box_qp(p);
      CHECK(max_abs_diff(r.tau_star, m) < 1e-12);
      CHECK(r.active_lower.empty());
      CHECK(r.active_upper.empty());
    }
  }

  TEST_CASE("pinned two dimensional regression") {
    // C = [[2,1],[1,2]], m = (2, 0), box [0,1]^2.
    // Unconstrained mode (2,0); tau_1 clamps to 1; the free coordinate solves
    // 2 (tau_2 - 0) + 1 (1 - 2) = 0 => tau_2 = 0.5, interior.  Gradient at
    // the clamped coordinate: 2 (1 - 2) + 1 (0.5 - 0) = -1.5 <= 0 as an
    // upper-bound multiplier requires.
    BandedSymMatrix C(2, 1);
    C.set(0, 0, 2.0);
    C.set(1, 1, 2.0);
    C.set(1, 0, 1.0);
    BoxQp p(C, {2.0, 0.0}, Box::uniform(2, Bound::finite(0.0), Bound::finite(1.0)));
    QpResult r = solve_box_qp(p);
    REQUIRE(r.tau_star.size() == 2);
    CHECK(r.tau_star[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.tau_star[1] == doctest::Approx(0.5).epsilon(1e-12));
    REQUIRE(r.active_upper.size() == 1);
    CHECK(r.active_upper[0] == 0);
    CHECK(r.active_lower.empty());
  }

  TEST_CASE("solution is idempotent") {
    RngStream rng(203);
    for (int rep = 0; rep < 50; ++rep) {
      BoxQp p = random_instance(6, rng);
      QpResult r1 = solve_box_qp(p);
      BoxQp p2(p.C, r1.tau_star, p.box);
      // re-solving from the solution as the mean must return it unchanged
      QpResult r2 = solve_box_qp(p2);
      CHECK(max_abs_diff(r2.tau_star, r1.tau_star) < 1e-10);
    }
  }

  TEST_CASE("scaling the curvature leaves the solution fixed") {
    RngStream rng(204);
    for (int rep = 0; rep < 50; ++rep) {
      BoxQp p = random_instance(5, rng);
      QpResult r1 = solve_box_qp(p);
      for (double lam : {0.25, 4.0, 1024.0}) {
        BandedSymMatrix C2 = p.C;
        C2.scale(lam);
        QpResult r2 = solve_box_qp(BoxQp(C2, p.m, p.box));
        CHECK(max_abs_diff(r2.tau_star, r1.tau_star) < 1e-8);
      }
    }
  }

  TEST_CASE("expanding the box monotonically lowers the objective") {
    RngStream rng(205);
    auto objective = [](const BoxQp& p, const std::vector<double>& x) {
      return 0.5 * quad_form(p.C, x, p.m);
    };
    for (int rep = 0; rep < 50; ++rep) {
      BoxQp p = random_instance(6, rng, false);
      QpResult r1 = solve_box_qp(p);
      std::vector<Bound> lo, hi;
      for (std::size_t t = 0; t < 6; ++t) {
        lo.push_back(Bound::finite(p.box.lo(t) - 0.5));
        hi.push_back(Bound::finite(p.box.hi(t) + 0.5));
      }
      BoxQp wide(p.C, p.m, Box(std::move(lo), std::move(hi)));
      QpResult r2 = solve_box_qp(wide);
      CHECK(objective(wide, r2.tau_star) <= objective(p, r1.tau_star) + 1e-12);
    }
  }

  TEST_CASE("kkt residual flags infeasible points and accepts solutions") {
    RngStream rng(206);
    BoxQp p = random_instance(4, rng, false);
    QpResult r = solve_box_qp(p);
    CHECK(kkt_residual(p, r.tau_star) <= 1e-8);
    std::vector<double> bad = r.tau_star;
    bad[2] = p.box.hi(2) + 1.0;
    CHECK_THROWS_AS(kkt_residual(p, bad), InfeasibleError);
    try {
      kkt_residual(p, bad);
    } catch (const InfeasibleError& e) {
      REQUIRE(e.indices.size() == 1);
      CHECK(e.indices[0] == 2);
    }
    // a feasible but clearly suboptimal point has a large residual
    std::vector<double> mid(4);
    for (std::size_t t = 0; t < 4; ++t)
      mid[t] = 0.5 * (p.box.lo(t) + p.box.hi(t));
    if (max_abs_diff(mid, r.tau_star) > 1e-3)
      CHECK(kkt_residual(p, mid) > 1e-6);
  }

  TEST_CASE("active sets are consistent with the bounds") {
    RngStream rng(207);
    for (int rep = 0; rep < 100; ++rep) {
      BoxQp p = random_instance(7, rng);
      QpResult r = solve_box_qp(p);
      for (std::size_t i : r.active_lower)
        CHECK(r.tau_star[i] == doctest::Approx(p.box.lo(i)).epsilon(1e-12));
      for (std::size_t i : r.active_upper)
        CHECK(r.tau_star[i] == doctest::Approx(p.box.hi(i)).epsilon(1e-12));
    }
  }

  TEST_CASE("tight boxes and distant means still solve") {
    // mean far outside a narrow box: everything pins
    const std::size_t T = 60;
    BandedSymMatrix C(T, 1);
    for (std::size_t t = 0; t < T; ++t) {
      C.set(t, t, 2.0);
      if (t + 1 < T) C.set(t + 1, t, -1.0);
    }
    std::vector<double> m(T, 100.0);
    BoxQp p(C, m, Box::uniform(T, Bound::finite(0.0), Bound::finite(1.0)));
    QpResult r = solve_box_qp(p);
    for (double v : r.tau_star) CHECK(v == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(r.kkt_residual <= 1e-8);
    CHECK(r.active_upper.size() == T);
  }

  TEST_CASE("moderate sizes keep kkt residuals tight") {
    RngStream rng(208);
    for (std::size_t T : {50u, 150u, 400u}) {
      BoxQp p = random_instance(T, rng);
      QpResult r = solve_box_qp(p);
      CHECK(r.kkt_residual <= 1e-8);
      CHECK(p.box.contains(r.tau_star));
      CHECK(r.iterations > 0);
    }
  }
}
