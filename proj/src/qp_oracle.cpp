// Brute-force reference for solve_box_qp. Dense arithmetic throughout and no
// reuse of the banded factorizations, so oracle and solver can only agree by
// computing the same optimum.

#include <cmath>
#include <limits>
#include <vector>

#include "trendqp/qp_box.hpp"

namespace trendqp {

namespace {

// Dense symmetric solve, Gaussian elimination with partial pivoting.
std::vector<double> dense_solve(std::vector<std::vector<double>> A, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::fabs(A[r][col]) > std::fabs(A[piv][col])) piv = r;
    std::swap(A[col], A[piv]);
    std::swap(b[col], b[piv]);
    if (A[col][col] == 0.0) return {};  // singular; caller skips the candidate
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = A[r][col] / A[col][col];
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) A[r][c] -= f * A[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t ri = n; ri-- > 0;) {
    double s = b[ri];
    for (std::size_t c = ri + 1; c < n; ++c) s -= A[ri][c] * x[c];
    x[ri] = s / A[ri][ri];
  }
  return x;
}

}  // namespace

std::vector<double> enumeration_oracle(const BoxQp& p) {
  const std::size_t n = p.m.size();
  if (n > 12) throw ParameterError("enumeration_oracle: refuses T > 12 (3^T enumeration)");

  std::vector<std::vector<double>> C(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) C[i][j] = p.C.at(i, j);

  const auto dense_objective = [&](const std::vector<double>& x) {
    double q = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) q += (x[i] - p.m[i]) * C[i][j] * (x[j] - p.m[j]);
    return 0.5 * q;
  };
  const auto dense_gradient = [&](const std::vector<double>& x) {
    std::vector<double> g(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) g[i] += C[i][j] * (x[j] - p.m[j]);
    return g;
  };

  double scale = 1.0;
  {
    const std::vector<double> cm = dense_gradient(std::vector<double>(n, 0.0));
    for (double v : cm) scale = std::max(scale, 1.0 + std::fabs(v));
  }
  const double kkt_tol = 1e-7 * scale;

  std::size_t n_assign = 1;
  for (std::size_t t = 0; t < n; ++t) n_assign *= 3;

  double best_obj = std::numeric_limits<double>::infinity();
  double best_feasible_obj = std::numeric_limits<double>::infinity();
  std::vector<double> best, best_feasible;

  for (std::size_t code = 0; code < n_assign; ++code) {
    // Digit 0: free, 1: at lower, 2: at upper.
    std::vector<int> digit(n);
    std::size_t c = code;
    bool usable = true;
    for (std::size_t t = 0; t < n; ++t) {
      digit[t] = static_cast<int>(c % 3);
      c /= 3;
      if (digit[t] == 1 && !std::isfinite(p.box.lo(t))) usable = false;
      if (digit[t] == 2 && !std::isfinite(p.box.hi(t))) usable = false;
    }
    if (!usable) continue;

    std::vector<double> x(n, 0.0);
    std::vector<std::size_t> free_idx;
    for (std::size_t t = 0; t < n; ++t) {
      if (digit[t] == 1) x[t] = p.box.lo(t);
      else if (digit[t] == 2) x[t] = p.box.hi(t);
      else free_idx.push_back(t);
    }
    if (!free_idx.empty()) {
      const std::size_t k = free_idx.size();
      std::vector<std::vector<double>> A(k, std::vector<double>(k));
      std::vector<double> rhs(k, 0.0);
      for (std::size_t r = 0; r < k; ++r) {
        for (std::size_t s = 0; s < k; ++s) A[r][s] = C[free_idx[r]][free_idx[s]];
        for (std::size_t j = 0; j < n; ++j) {
          if (digit[j] == 0) rhs[r] += C[free_idx[r]][j] * p.m[j];
          else rhs[r] += C[free_idx[r]][j] * (p.m[j] - x[j]);
        }
      }
      const std::vector<double> xf = dense_solve(std::move(A), std::move(rhs));
      if (xf.empty()) continue;
      for (std::size_t r = 0; r < k; ++r) x[free_idx[r]] = xf[r];
    }

    bool feasible = true;
    for (std::size_t t = 0; t < n; ++t) {
      const double slack = 1e-9 * (1.0 + std::fabs(x[t]));
      if (x[t] < p.box.lo(t) - slack || x[t] > p.box.hi(t) + slack) feasible = false;
    }
    if (!feasible) continue;

    const double obj = dense_objective(x);
    if (obj < best_feasible_obj) {
      best_feasible_obj = obj;
      best_feasible = x;
    }

    const std::vector<double> g = dense_gradient(x);
    bool kkt_ok = true;
    for (std::size_t t = 0; t < n; ++t) {
      if (digit[t] == 0 && std::fabs(g[t]) > kkt_tol) kkt_ok = false;
      if (digit[t] == 1 && g[t] < -kkt_tol) kkt_ok = false;
      if (digit[t] == 2 && g[t] > kkt_tol) kkt_ok = false;
    }
    if (!kkt_ok) continue;

    if (obj < best_obj) {
      best_obj = obj;
      best = x;
    }
  }

  if (!best.empty()) {
    for (std::size_t t = 0; t < n; ++t)
      best[t] = std::min(std::max(best[t], p.box.lo(t)), p.box.hi(t));
    return best;
  }
  if (!best_feasible.empty()) {
    for (std::size_t t = 0; t < n; ++t)
      best_feasible[t] =
          std::min(std::max(best_feasible[t], p.box.lo(t)), p.box.hi(t));
    return best_feasible;
  }
  throw ConvergenceError("enumeration_oracle: no feasible candidate found");
}

}  // namespace trendqp
