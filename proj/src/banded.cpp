#include "trendqp/banded.hpp"

#include <algorithm>
#include <cmath>

namespace trendqp {

BandedSymMatrix::BandedSymMatrix(std::size_t dim, std::size_t bandwidth)
    : dim_(dim), bw_(bandwidth) {
  if (dim == 0) throw DimensionError("BandedSymMatrix: dim must be >= 1");
  if (bandwidth >= dim)
    throw DimensionError("BandedSymMatrix: bandwidth must be < dim");
  diags_.resize(bw_ + 1);
  for (std::size_t k = 0; k <= bw_; ++k) diags_[k].assign(dim_ - k, 0.0);
}

double BandedSymMatrix::at(std::size_t i, std::size_t j) const {
  if (i >= dim_ || j >= dim_) throw DimensionError("BandedSymMatrix::at: index out of range");
  const std::size_t k = i >= j ? i - j : j - i;
  if (k > bw_) return 0.0;
  return diags_[k][std::min(i, j)];
}

void BandedSymMatrix::set(std::size_t i, std::size_t j, double v) {
  if (i >= dim_ || j >= dim_) throw DimensionError("BandedSymMatrix::set: index out of range");
  const std::size_t k = i >= j ? i - j : j - i;
  if (k > bw_) throw DimensionError("BandedSymMatrix::set: entry outside band");
  diags_[k][std::min(i, j)] = v;
}

void BandedSymMatrix::add(std::size_t i, std::size_t j, double v) {
  set(i, j, at(i, j) + v);
}

std::vector<double> BandedSymMatrix::multiply(std::span<const double> x) const {
  if (x.size() != dim_) throw DimensionError("BandedSymMatrix::multiply: length mismatch");
  std::vector<double> y(dim_, 0.0);
  for (std::size_t j = 0; j < dim_; ++j) y[j] = diags_[0][j] * x[j];
  for (std::size_t k = 1; k <= bw_; ++k) {
    const auto& d = diags_[k];
    for (std::size_t j = 0; j + k < dim_; ++j) {
      y[j + k] += d[j] * x[j];
      y[j] += d[j] * x[j + k];
    }
  }
  return y;
}

void BandedSymMatrix::add_scaled(double alpha, const BandedSymMatrix& B) {
  if (B.dim_ != dim_) throw DimensionError("add_scaled: dimension mismatch");
  if (B.bw_ > bw_) throw DimensionError("add_scaled: bandwidth exceeds target");
  for (std::size_t k = 0; k <= B.bw_; ++k)
    for (std::size_t j = 0; j < dim_ - k; ++j) diags_[k][j] += alpha * B.diags_[k][j];
}

void BandedSymMatrix::scale(double alpha) {
  for (auto& row : diags_)
    for (double& v : row) v *= alpha;
}

BandedSymMatrix first_diff_gram(std::size_t T) {
  if (T == 0) throw DimensionError("first_diff_gram: T must be >= 1");
  BandedSymMatrix K(T, T == 1 ? 0 : 1);
  for (std::size_t j = 0; j < T; ++j) K.diag(0, j) = (j + 1 < T) ? 2.0 : 1.0;
  if (T > 1)
    for (std::size_t j = 0; j + 1 < T; ++j) K.diag(1, j) = -1.0;
  return K;
}

BandedSymMatrix ar1_diff_gram(std::size_t T, double rho) {
  if (T == 0) throw DimensionError("ar1_diff_gram: T must be >= 1");
  BandedSymMatrix K(T, T == 1 ? 0 : 1);
  for (std::size_t j = 0; j < T; ++j)
    K.diag(0, j) = (j + 1 < T) ? 1.0 + rho * rho : 1.0;
  if (T > 1)
    for (std::size_t j = 0; j + 1 < T; ++j) K.diag(1, j) = -rho;
  return K;
}

BandCholesky::BandCholesky(std::size_t dim, std::size_t bw) : dim_(dim), bw_(bw) {
  diags_.resize(bw_ + 1);
  for (std::size_t k = 0; k <= bw_; ++k) diags_[k].assign(dim_ - k, 0.0);
}

double BandCholesky::at(std::size_t i, std::size_t j) const {
  if (i >= dim_ || j >= dim_) throw DimensionError("BandCholesky::at: index out of range");
  if (j > i || i - j > bw_) return 0.0;
  return diags_[i - j][j];
}

BandCholesky band_cholesky(const BandedSymMatrix& K) {
  const std::size_t n = K.dim(), w = K.bandwidth();
  BandCholesky L(n, w);
  for (std::size_t j = 0; j < n; ++j) {
    double d = K.diag(0, j);
    const std::size_t k0 = j > w ? j - w : 0;
    for (std::size_t k = k0; k < j; ++k) {
      const double l = L.diags_[j - k][k];
      d -= l * l;
    }
    if (!(d > 0.0)) throw NotPositiveDefiniteError(j);
    const double ljj = std::sqrt(d);
    L.diags_[0][j] = ljj;
    for (std::size_t i = j + 1; i < std::min(n, j + w + 1); ++i) {
      double s = K.diag(i - j, j);
      const std::size_t m0 = i > w ? i - w : 0;
      for (std::size_t k = std::max(m0, k0); k < j; ++k)
        s -= L.diags_[i - k][k] * L.diags_[j - k][k];
      L.diags_[i - j][j] = s / ljj;
    }
  }
  return L;
}

std::vector<double> BandCholesky::forward_solve(std::span<const double> b) const {
  if (b.size() != dim_) throw DimensionError("forward_solve: length mismatch");
  std::vector<double> y(dim_);
  for (std::size_t i = 0; i < dim_; ++i) {
    double s = b[i];
    const std::size_t j0 = i > bw_ ? i - bw_ : 0;
    for (std::size_t j = j0; j < i; ++j) s -= diags_[i - j][j] * y[j];
    y[i] = s / diags_[0][i];
  }
  return y;
}

std::vector<double> BandCholesky::transpose_solve(std::span<const double> z) const {
  if (z.size() != dim_) throw DimensionError("transpose_solve: length mismatch");
  std::vector<double> x(dim_);
  for (std::size_t ii = dim_; ii-- > 0;) {
    double s = z[ii];
    const std::size_t jmax = std::min(dim_ - 1, ii + bw_);
    for (std::size_t j = ii + 1; j <= jmax; ++j) s -= diags_[j - ii][ii] * x[j];
    x[ii] = s / diags_[0][ii];
  }
  return x;
}

std::vector<double> BandCholesky::solve(std::span<const double> b) const {
  const std::vector<double> y = forward_solve(b);
  return transpose_solve(y);
}

double BandCholesky::log_det() const {
  double s = 0.0;
  for (std::size_t j = 0; j < dim_; ++j) s += std::log(diags_[0][j]);
  return 2.0 * s;
}

std::vector<double> solve_spd(const BandCholesky& F, std::span<const double> b) {
  return F.solve(b);
}

double quad_form(const BandedSymMatrix& K, std::span<const double> x,
                 std::span<const double> m) {
  if (x.size() != K.dim() || m.size() != K.dim())
    throw DimensionError("quad_form: length mismatch");
  std::vector<double> d(K.dim());
  for (std::size_t t = 0; t < K.dim(); ++t) d[t] = x[t] - m[t];
  const std::vector<double> Kd = K.multiply(d);
  double q = 0.0;
  for (std::size_t t = 0; t < K.dim(); ++t) q += d[t] * Kd[t];
  return q;
}

BandedSymMatrix principal_submatrix(const BandedSymMatrix& K,
                                    const std::vector<std::size_t>& idx) {
  if (idx.empty()) throw DimensionError("principal_submatrix: empty index set");
  for (std::size_t r = 0; r + 1 < idx.size(); ++r)
    if (!(idx[r] < idx[r + 1]))
      throw DimensionError("principal_submatrix: indices must be strictly increasing");
  if (idx.back() >= K.dim())
    throw DimensionError("principal_submatrix: index out of range");
  const std::size_t n = idx.size();
  const std::size_t w = std::min(K.bandwidth(), n - 1);
  BandedSymMatrix S(n, w);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k <= w && j + k < n; ++k) {
      const std::size_t gap = idx[j + k] - idx[j];
      S.diag(k, j) = gap <= K.bandwidth() ? K.diag(gap, idx[j]) : 0.0;
    }
  }
  return S;
}

}  // namespace trendqp
