#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "trendqp/errors.hpp"

namespace trendqp {

/// Symmetric banded matrix stored by diagonals.
///
/// Storage: `diagonals()[k]` holds the k-th sub-diagonal (k = 0 is the main
/// diagonal) and has `dim - k` entries, so entry (i, j) with i >= j and
/// i - j <= bandwidth lives at diagonals()[i - j][j]. A tridiagonal matrix of
/// dimension T costs 2T - 1 doubles. All precision matrices in the samplers
/// are tridiagonal; the type supports general small bandwidth.
class BandedSymMatrix {
 public:
  BandedSymMatrix(std::size_t dim, std::size_t bandwidth);

  std::size_t dim() const { return dim_; }
  std::size_t bandwidth() const { return bw_; }

  /// Storage accessor: k-th sub-diagonal, column j (element (j + k, j)).
  double& diag(std::size_t k, std::size_t j) { return diags_[k][j]; }
  double diag(std::size_t k, std::size_t j) const { return diags_[k][j]; }
  const std::vector<std::vector<double>>& diagonals() const { return diags_; }

  /// General accessor; returns 0 outside the band.
  double at(std::size_t i, std::size_t j) const;
  /// Sets (i, j) and its mirror; throws outside the band.
  void set(std::size_t i, std::size_t j, double v);
  void add(std::size_t i, std::size_t j, double v);

  /// y = K x
  std::vector<double> multiply(std::span<const double> x) const;

  /// this += alpha * B (B must not exceed this bandwidth)
  void add_scaled(double alpha, const BandedSymMatrix& B);
  void scale(double alpha);

 private:
  std::size_t dim_, bw_;
  std::vector<std::vector<double>> diags_;
};

/// Lower-triangular Cholesky factor of a banded SPD matrix, same band layout.
/// Main-diagonal entries are strictly positive.
class BandCholesky {
 public:
  std::size_t dim() const { return dim_; }
  std::size_t bandwidth() const { return bw_; }
  double at(std::size_t i, std::size_t j) const;

  /// Solves K x = b with K = L L'.
  std::vector<double> solve(std::span<const double> b) const;
  /// Solves L y = b.
  std::vector<double> forward_solve(std::span<const double> b) const;
  /// Solves L' x = z; this is the map used to draw from N(mu, K^{-1}).
  std::vector<double> transpose_solve(std::span<const double> z) const;

  /// log det K = 2 sum log L_tt
  double log_det() const;

  friend BandCholesky band_cholesky(const BandedSymMatrix& K);

 private:
  BandCholesky(std::size_t dim, std::size_t bw);
  std::size_t dim_, bw_;
  std::vector<std::vector<double>> diags_;
};

/// H'H for the lower-bidiagonal first-difference matrix H (unit diagonal,
/// -1 first sub-diagonal). Tridiagonal: main diagonal (2, ..., 2, 1),
/// sub-diagonal -1; [1] for T = 1.
BandedSymMatrix first_diff_gram(std::size_t T);

/// H'H for the lower-bidiagonal quasi-difference matrix H (unit diagonal,
/// -rho first sub-diagonal). Tridiagonal: main diagonal (1 + rho^2, ...,
/// 1 + rho^2, 1), sub-diagonal -rho; [1] for T = 1. Equals first_diff_gram
/// at rho = 1 and the identity at rho = 0.
BandedSymMatrix ar1_diff_gram(std::size_t T, double rho);

/// Cholesky factorization; throws NotPositiveDefiniteError on a failed pivot.
BandCholesky band_cholesky(const BandedSymMatrix& K);

/// x with K x = b given the factorization of K.
std::vector<double> solve_spd(const BandCholesky& F, std::span<const double> b);

/// (x - m)' K (x - m)
double quad_form(const BandedSymMatrix& K, std::span<const double> x,
                 std::span<const double> m);

/// Principal submatrix K[idx, idx] for strictly increasing idx; the result
/// keeps the same bandwidth bound since compressing indices only narrows it.
BandedSymMatrix principal_submatrix(const BandedSymMatrix& K,
                                    const std::vector<std::size_t>& idx);

}  // namespace trendqp
