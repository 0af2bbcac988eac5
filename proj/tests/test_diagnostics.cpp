#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "trendqp/diagnostics.hpp"
#include "trendqp/errors.hpp"
#include "trendqp/rng.hpp"
#include "trendqp/trace.hpp"

using namespace trendqp;

namespace {

std::vector<double> ar1_series(std::size_t n, double phi, RngStream& rng) {
  std::vector<double> x(n);
  double v = rng.normal() / std::sqrt(1.0 - phi * phi);
  for (std::size_t t = 0; t < n; ++t) {
    v = phi * v + rng.normal();
    x[t] = v;
  }
  return x;
}

ChainTrace make_trace(const std::vector<std::string>& names, std::size_t rows,
                      RngStream& rng, double phi = 0.5) {
  ChainTrace tr(names);
  std::vector<double> state(names.size(), 0.0);
  std::vector<double> row(names.size());
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < names.size(); ++c) {
      state[c] = phi * state[c] + rng.normal();
      row[c] = state[c];
    }
    tr.push_row(row);
  }
  return tr;
}

}  // namespace

TEST_SUITE("diagnostics") {
  TEST_CASE("type 7 quantiles interpolate linearly") {
    std::vector<double> v = {4.0, 2.0, 1.0, 3.0};  // unsorted on purpose
    CHECK(quantile_type7(v, 0.0) == 1.0);
    CHECK(quantile_type7(v, 0.25) == 1.75);
    CHECK(quantile_type7(v, 0.5) == 2.5);
    CHECK(quantile_type7(v, 0.75) == 3.25);
    CHECK(quantile_type7(v, 1.0) == 4.0);

    std::vector<double> w = {3.0, 1.0, 4.0, 1.0, 5.0, 9.0, 2.0, 6.0};
    FiveNumber f = five_number(w);
    CHECK(f.min == 1.0);
    CHECK(f.q1 == 1.75);
    CHECK(f.median == 3.5);
    CHECK(f.q3 == 5.25);
    CHECK(f.max == 9.0);

    std::vector<double> one = {7.0};
    CHECK(quantile_type7(one, 0.0) == 7.0);
    CHECK(quantile_type7(one, 0.37) == 7.0);
    CHECK(quantile_type7(one, 1.0) == 7.0);

    CHECK_THROWS_AS(quantile_type7(std::vector<double>{}, 0.5),
                    DimensionError);
    CHECK_THROWS_AS(quantile_type7(v, -0.1), ParameterError);
    CHECK_THROWS_AS(quantile_type7(v, 1.1), ParameterError);
  }

  TEST_CASE("autocorrelation matches a hand computation") {
    // alternating series: phi_1 = -5/6, phi_2 = 2/3 at n = 6
    std::vector<double> x = {1.0, 2.0, 1.0, 2.0, 1.0, 2.0};
    std::vector<double> phi = autocorrelation(x, 2);
    REQUIRE(phi.size() == 2);
    CHECK(phi[0] == doctest::Approx(-5.0 / 6.0).epsilon(1e-14));
    CHECK(phi[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(inefficiency_factor(x, 2) ==
          doctest::Approx(1.0 + 2.0 * (-5.0 / 6.0 + 2.0 / 3.0)).epsilon(1e-14));

    RngStream rng(801);
    std::vector<double> ar = ar1_series(200000, 0.9, rng);
    std::vector<double> p = autocorrelation(ar, 3);
    CHECK(p[0] == doctest::Approx(0.9).epsilon(0.02));
    CHECK(p[1] == doctest::Approx(0.81).epsilon(0.03));
  }

  TEST_CASE("inefficiency factor calibration on known processes") {
    RngStream rng(802);
    std::vector<double> iid(10000);
    for (double& v : iid) v = rng.normal();
    const double f_iid = inefficiency_factor(iid, 100);
    CHECK(f_iid >= 0.6);
    CHECK(f_iid <= 1.4);

    std::vector<double> ar = ar1_series(400000, 0.9, rng);
    const double f_ar = inefficiency_factor(ar, 100);
    // truncated geometric sum: 1 + 2 sum_{l=1}^{100} 0.9^l = 19.0
    CHECK(f_ar >= 15.0);
    CHECK(f_ar <= 21.0);
  }

  TEST_CASE("degenerate series and bad arguments are rejected") {
    std::vector<double> flat(50, 3.0);
    CHECK_THROWS_AS(autocorrelation(flat, 5), DegenerateSeriesError);
    CHECK_THROWS_AS(inefficiency_factor(flat, 5), DegenerateSeriesError);
    std::vector<double> x = {1.0, 2.0, 3.0};
    CHECK_THROWS_AS(autocorrelation(x, 0), ParameterError);
    CHECK_THROWS_AS(autocorrelation(x, 3), DimensionError);
    CHECK_NOTHROW(autocorrelation(x, 2));
  }

  TEST_CASE("parallel factors are bit identical to the serial reference") {
    RngStream rng(803);
    ChainTrace tr = make_trace({"a_1", "a_2", "a_3", "b_1", "b_2", "c", "d",
                                "e_10"},
                               3000, rng, 0.8);
    std::vector<std::size_t> cols = {3, 0, 7, 1, 6, 2, 5, 4};
    std::vector<double> s = inefficiency_factors_serial(tr, cols, 100);
    std::vector<double> p = inefficiency_factors_parallel(tr, cols, 100);
    REQUIRE(s.size() == p.size());
    for (std::size_t i = 0; i < s.size(); ++i) CHECK(s[i] == p[i]);
    for (double f : s) CHECK(f > 0.5);
  }

  TEST_CASE("posterior summary reports mean and central ninety percent") {
    RngStream rng(804);
    ChainTrace tr = make_trace({"x", "y"}, 500, rng, 0.0);
    std::vector<SummaryRow> rows = posterior_summary(tr, {"y", "x"});
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].name == "y");
    CHECK(rows[1].name == "x");
    for (const SummaryRow& r : rows) {
      std::vector<double> col = tr.column(r.name);
      const double mean =
          std::accumulate(col.begin(), col.end(), 0.0) / col.size();
      CHECK(r.mean == doctest::Approx(mean).epsilon(1e-15));
      CHECK(r.q05 == quantile_type7(col, 0.05));
      CHECK(r.q95 == quantile_type7(col, 0.95));
      CHECK(r.q05 < r.mean);
      CHECK(r.mean < r.q95);
    }
    CHECK_THROWS_AS(posterior_summary(tr, {"zz"}), ParameterError);
  }

  TEST_CASE("efficiency report groups columns into blocks by numeric suffix") {
    RngStream rng(805);
    ChainTrace tr = make_trace(
        {"tau_1", "tau_2", "tau_3", "rho_1", "sigma2", "note_", "b_12x"}, 800,
        rng, 0.6);
    EfficiencyReport rep = efficiency_report(tr, 100);
    REQUIRE(rep.params.size() == 7);
    REQUIRE(rep.factors.size() == 7);
    CHECK(rep.lag_cap == 100);

    REQUIRE(rep.blocks.size() == 5);
    CHECK(rep.blocks[0].block == "tau");
    CHECK(rep.blocks[1].block == "rho");
    CHECK(rep.blocks[2].block == "sigma2");
    CHECK(rep.blocks[3].block == "note_");
    CHECK(rep.blocks[4].block == "b_12x");

    // block summary equals the five-number summary of its members' factors
    std::vector<double> tau_f = {rep.factors[0], rep.factors[1],
                                 rep.factors[2]};
    FiveNumber f = five_number(tau_f);
    CHECK(rep.blocks[0].summary.min == f.min);
    CHECK(rep.blocks[0].summary.median == f.median);
    CHECK(rep.blocks[0].summary.max == f.max);
    CHECK(rep.blocks[1].summary.min == rep.blocks[1].summary.max);

    // the factors come from the shared per-column computation
    std::vector<std::size_t> cols(7);
    std::iota(cols.begin(), cols.end(), std::size_t{0});
    std::vector<double> direct = inefficiency_factors_serial(tr, cols, 100);
    for (std::size_t c = 0; c < 7; ++c) CHECK(rep.factors[c] == direct[c]);
  }

  TEST_CASE("efficiency report tolerates constant columns and short caps") {
    ChainTrace tr({"live", "stuck"});
    RngStream rng(806);
    for (int r = 0; r < 50; ++r) {
      const double row[2] = {rng.normal(), 42.0};
      tr.push_row(row);
    }
    EfficiencyReport rep = efficiency_report(tr, 100);
    CHECK(rep.lag_cap == 49);  // capped at rows - 1
    CHECK(rep.factors[1] == 1.0);
    CHECK(rep.factors[0] != 1.0);

    ChainTrace tiny({"x"});
    const double one[1] = {1.0};
    tiny.push_row(one);
    CHECK_THROWS_AS(efficiency_report(tiny, 100), DimensionError);
  }

  TEST_CASE("chain trace storage behaves like a column table") {
    ChainTrace tr({"a", "b"});
    CHECK(tr.n_rows() == 0);
    const double r1[2] = {1.0, 2.0};
    const double r2[2] = {3.0, 4.0};
    const double r3[2] = {5.0, 6.0};
    tr.push_row(r1);
    tr.push_row(r2);
    tr.push_row(r3);
    CHECK(tr.n_rows() == 3);
    CHECK(tr.n_cols() == 2);
    CHECK(tr.at(1, 0) == 3.0);
    CHECK(tr.row(2)[1] == 6.0);
    CHECK(tr.column("b") == std::vector<double>{2.0, 4.0, 6.0});
    CHECK(tr.col_index("a") == 0);
    CHECK_THROWS_AS(tr.col_index("zz"), ParameterError);
    CHECK_THROWS_AS(tr.at(3, 0), DimensionError);
    CHECK_THROWS_AS(tr.push_row(std::vector<double>{1.0}), DimensionError);

    tr.blocks.push_back(BlockStats{});
    tr.blocks[0].name = "a";
    tr.blocks[0].steps = 3;
    tr.blocks[0].accepts = 2;
    ChainTrace tail = tr.from_row(1);
    CHECK(tail.n_rows() == 2);
    CHECK(tail.at(0, 0) == 3.0);
    CHECK(tail.at(1, 1) == 6.0);
    REQUIRE(tail.blocks.size() == 1);
    CHECK(tail.blocks[0].steps == 3);
    CHECK(tail.blocks[0].acceptance_rate() ==
          doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK_THROWS_AS(tr.from_row(4), DimensionError);

    CHECK_THROWS_AS(ChainTrace(std::vector<std::string>{}), DimensionError);
  }
}
