#include "trendqp/qp_box.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace trendqp {

namespace {

constexpr double kKktTol = 1e-8;
constexpr std::size_t kMaxActiveSetRounds = 50;
constexpr std::size_t kCoordPassesPerDim = 100;

enum class CoordState : unsigned char { Free = 0, AtLower = 1, AtUpper = 2 };

double inf_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

// Max-norm KKT violation of a feasible x given its coordinate classification.
double violation(const BoxQp& p, std::span<const double> x,
                 const std::vector<CoordState>& st) {
  const std::vector<double> g = [&] {
    std::vector<double> d(x.size());
    for (std::size_t t = 0; t < x.size(); ++t) d[t] = x[t] - p.m[t];
    return p.C.multiply(d);
  }();
  double v = 0.0;
  for (std::size_t t = 0; t < x.size(); ++t) {
    switch (st[t]) {
      case CoordState::Free: v = std::max(v, std::fabs(g[t])); break;
      case CoordState::AtLower: v = std::max(v, std::max(0.0, -g[t])); break;
      case CoordState::AtUpper: v = std::max(v, std::max(0.0, g[t])); break;
    }
  }
  return v;
}

// Exact-at-bound classification, ties counted as active.
std::vector<CoordState> classify(const BoxQp& p, std::span<const double> x) {
  std::vector<CoordState> st(x.size(), CoordState::Free);
  for (std::size_t t = 0; t < x.size(); ++t) {
    if (x[t] == p.box.lo(t)) st[t] = CoordState::AtLower;
    else if (x[t] == p.box.hi(t)) st[t] = CoordState::AtUpper;
  }
  return st;
}

// Given fixed active sets, solve the equality-constrained subproblem:
// actives pinned at their bounds, gradient zero on the free set.
std::vector<double> subproblem_solve(const BoxQp& p, const std::vector<CoordState>& st) {
  const std::size_t n = p.m.size();
  std::vector<double> x(n, 0.0);
  std::vector<std::size_t> free_idx;
  free_idx.reserve(n);
  for (std::size_t t = 0; t < n; ++t) {
    switch (st[t]) {
      case CoordState::AtLower: x[t] = p.box.lo(t); break;
      case CoordState::AtUpper: x[t] = p.box.hi(t); break;
      case CoordState::Free: free_idx.push_back(t); break;
    }
  }
  if (free_idx.empty()) return x;
  // C_FF x_F = (C m)_F - (C x_fixed)_F with zeros on the free slots of x.
  const std::vector<double> cm = p.C.multiply(p.m);
  const std::vector<double> cfix = p.C.multiply(x);
  std::vector<double> rhs(free_idx.size());
  for (std::size_t r = 0; r < free_idx.size(); ++r)
    rhs[r] = cm[free_idx[r]] - cfix[free_idx[r]];
  const BandedSymMatrix sub = principal_submatrix(p.C, free_idx);
  const std::vector<double> xf = band_cholesky(sub).solve(rhs);
  for (std::size_t r = 0; r < free_idx.size(); ++r) x[free_idx[r]] = xf[r];
  return x;
}

double objective(const BoxQp& p, std::span<const double> x) {
  return 0.5 * quad_form(p.C, x, p.m);
}

}  // namespace

BoxQp::BoxQp(BandedSymMatrix C_in, std::vector<double> m_in, Box box_in)
    : C(std::move(C_in)), m(std::move(m_in)), box(std::move(box_in)) {
  if (m.size() != C.dim() || box.dim() != C.dim())
    throw DimensionError("BoxQp: dimension mismatch between C, m and box");
  for (double v : m)
    if (!std::isfinite(v)) throw ParameterError("BoxQp: m must be finite");
}

QpResult solve_box_qp(const BoxQp& p) {
  const auto t_start = std::chrono::steady_clock::now();
  const std::size_t n = p.m.size();
  const double scale = 1.0 + inf_norm(p.C.multiply(p.m));

  std::vector<CoordState> st(n, CoordState::Free);
  for (std::size_t t = 0; t < n; ++t) {
    if (p.m[t] <= p.box.lo(t)) st[t] = CoordState::AtLower;
    else if (p.m[t] >= p.box.hi(t)) st[t] = CoordState::AtUpper;
  }

  std::size_t iterations = 0;
  std::vector<double> x;
  bool fixed_point = false;

  for (std::size_t round = 0; round < kMaxActiveSetRounds; ++round) {
    ++iterations;
    x = subproblem_solve(p, st);
    // Projected-gradient classification of the candidate: z = x - g.
    std::vector<double> d(n);
    for (std::size_t t = 0; t < n; ++t) d[t] = x[t] - p.m[t];
    const std::vector<double> g = p.C.multiply(d);
    std::vector<CoordState> next(n, CoordState::Free);
    for (std::size_t t = 0; t < n; ++t) {
      const double z = x[t] - g[t];
      if (z <= p.box.lo(t)) next[t] = CoordState::AtLower;
      else if (z >= p.box.hi(t)) next[t] = CoordState::AtUpper;
    }
    if (next == st) {
      fixed_point = true;
      break;
    }
    st = std::move(next);
  }

  if (!fixed_point) {
    // Cycled or slow set identification: polish with projected Gauss-Seidel,
    // which decreases the objective monotonically on an SPD quadratic.
    x = p.box.clamp(x.empty() ? p.m : x);
    const std::size_t w = p.C.bandwidth();
    const std::size_t max_passes = kCoordPassesPerDim * n;
    for (std::size_t pass = 0; pass < max_passes; ++pass) {
      ++iterations;
      double dx_max = 0.0;
      for (std::size_t t = 0; t < n; ++t) {
        double s = 0.0;
        const std::size_t j0 = t > w ? t - w : 0;
        const std::size_t j1 = std::min(n - 1, t + w);
        for (std::size_t j = j0; j <= j1; ++j)
          if (j != t) s += p.C.at(t, j) * (x[j] - p.m[j]);
        const double xt = std::min(std::max(p.m[t] - s / p.C.diag(0, t), p.box.lo(t)),
                                   p.box.hi(t));
        dx_max = std::max(dx_max, std::fabs(xt - x[t]));
        x[t] = xt;
      }
      if (dx_max <= 1e-15 * scale) break;
    }
    // Sharpen with one exact solve on the identified sets.
    const std::vector<CoordState> cd_sets = classify(p, x);
    std::vector<double> sharp = p.box.clamp(subproblem_solve(p, cd_sets));
    if (objective(p, sharp) <= objective(p, x)) x = sharp;
  }

  std::vector<double> sol = p.box.clamp(x);
  const std::vector<CoordState> final_st = classify(p, sol);
  const double resid = violation(p, sol, final_st) / scale;

  QpResult result;
  result.tau_star = std::move(sol);
  for (std::size_t t = 0; t < n; ++t) {
    if (final_st[t] == CoordState::AtLower) result.active_lower.push_back(t);
    else if (final_st[t] == CoordState::AtUpper) result.active_upper.push_back(t);
  }
  result.kkt_residual = resid;
  result.iterations = iterations;
  result.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();

  if (resid > kKktTol)
    throw QpConvergenceError("solve_box_qp: iteration cap reached before KKT tolerance",
                             std::move(result));
  return result;
}

double kkt_residual(const BoxQp& p, std::span<const double> tau) {
  if (tau.size() != p.m.size()) throw DimensionError("kkt_residual: length mismatch");
  const std::vector<std::size_t> bad = p.box.violations(tau);
  if (!bad.empty()) throw InfeasibleError(bad);
  const double scale = 1.0 + inf_norm(p.C.multiply(p.m));
  return violation(p, tau, classify(p, tau)) / scale;
}

}  // namespace trendqp
