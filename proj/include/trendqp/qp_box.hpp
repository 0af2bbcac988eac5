#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "trendqp/banded.hpp"
#include "trendqp/bound.hpp"

namespace trendqp {

/// Box-constrained quadratic program
///     min 0.5 (tau - m)' C (tau - m)   s.t.  lo <= tau <= hi
/// with C banded SPD. This is the kernel-maximization problem whose solution
/// is the feasible point closest to the unconstrained Gaussian mode in the
/// precision norm.
struct BoxQp {
  BoxQp(BandedSymMatrix C_in, std::vector<double> m_in, Box box_in);

  BandedSymMatrix C;
  std::vector<double> m;
  Box box;
};

struct QpResult {
  std::vector<double> tau_star;
  std::vector<std::size_t> active_lower, active_upper;
  /// Scaled KKT violation: max-norm of the signed gradient violations divided
  /// by (1 + ||C m||_inf). <= 1e-8 on success.
  double kkt_residual = 0.0;
  std::size_t iterations = 0;
  double elapsed_seconds = 0.0;
};

/// Iteration cap reached; `best` is the best feasible iterate found.
struct QpConvergenceError : ConvergenceError {
  QpConvergenceError(const std::string& msg, QpResult best_in)
      : ConvergenceError(msg), best(std::move(best_in)) {}
  QpResult best;
};

/// Primal-dual active-set solver (Newton-type): starting from the clamp of m,
/// alternate an exact banded solve on the free set with an active-set update
/// from the projected gradient step, until the sets fix. Falls back to
/// projected Gauss-Seidel passes if the sets cycle. Caps: 50 active-set
/// rounds, then 100*T coordinate passes.
QpResult solve_box_qp(const BoxQp& problem);

/// Scaled KKT violation of a feasible point (same scaling as QpResult).
/// Throws InfeasibleError listing violated indices if tau is outside the box.
double kkt_residual(const BoxQp& problem, std::span<const double> tau);

/// Independent brute force for T <= 12: enumerates all 3^T lower/upper/free
/// assignments, solves each candidate densely, and returns the feasible
/// KKT-consistent candidate of least objective. Test oracle; shares no code
/// with solve_box_qp.
std::vector<double> enumeration_oracle(const BoxQp& problem);

}  // namespace trendqp
