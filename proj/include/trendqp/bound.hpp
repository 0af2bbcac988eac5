#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "trendqp/errors.hpp"

namespace trendqp {

/// One-sided bound: a finite scalar or +/- infinity. Thin wrapper over double
/// so that clamping and comparisons fall out of ordinary IEEE arithmetic.
class Bound {
 public:
  static Bound neg_inf() { return Bound(-std::numeric_limits<double>::infinity()); }
  static Bound pos_inf() { return Bound(std::numeric_limits<double>::infinity()); }
  static Bound finite(double v) {
    if (!std::isfinite(v)) throw ParameterError("Bound::finite requires a finite value");
    return Bound(v);
  }
  /// Accepts finite values and +/-infinity; rejects NaN.
  static Bound of(double v) {
    if (std::isnan(v)) throw ParameterError("Bound cannot be NaN");
    return Bound(v);
  }

  bool is_finite() const { return std::isfinite(v_); }
  double value() const { return v_; }

 private:
  explicit Bound(double v) : v_(v) {}
  double v_;
};

/// Per-coordinate box [lo_t, hi_t], entries possibly infinite. lo_t < hi_t.
class Box {
 public:
  Box() = default;
  Box(std::vector<Bound> lo, std::vector<Bound> hi) {
    if (lo.size() != hi.size()) throw DimensionError("Box: lo/hi length mismatch");
    for (std::size_t t = 0; t < lo.size(); ++t) {
      if (!(lo[t].value() < hi[t].value()))
        throw ParameterError("Box: requires lo < hi at index " + std::to_string(t));
    }
    lo_.reserve(lo.size());
    hi_.reserve(hi.size());
    for (const auto& b : lo) lo_.push_back(b.value());
    for (const auto& b : hi) hi_.push_back(b.value());
  }

  /// Same scalar bounds replicated across all coordinates.
  static Box uniform(std::size_t dim, Bound lo, Bound hi) {
    return Box(std::vector<Bound>(dim, lo), std::vector<Bound>(dim, hi));
  }
  static Box unbounded(std::size_t dim) {
    return uniform(dim, Bound::neg_inf(), Bound::pos_inf());
  }

  std::size_t dim() const { return lo_.size(); }
  double lo(std::size_t t) const { return lo_[t]; }
  double hi(std::size_t t) const { return hi_[t]; }

  bool is_unbounded() const {
    for (std::size_t t = 0; t < dim(); ++t)
      if (std::isfinite(lo_[t]) || std::isfinite(hi_[t])) return false;
    return true;
  }

  bool contains(std::span<const double> x) const {
    for (std::size_t t = 0; t < dim(); ++t)
      if (x[t] < lo_[t] || x[t] > hi_[t]) return false;
    return true;
  }

  std::vector<std::size_t> violations(std::span<const double> x) const {
    std::vector<std::size_t> bad;
    for (std::size_t t = 0; t < dim(); ++t)
      if (x[t] < lo_[t] || x[t] > hi_[t]) bad.push_back(t);
    return bad;
  }

  std::vector<double> clamp(std::span<const double> x) const {
    std::vector<double> y(x.begin(), x.end());
    for (std::size_t t = 0; t < dim(); ++t) y[t] = std::min(std::max(y[t], lo_[t]), hi_[t]);
    return y;
  }

  /// Clamp with a small inward margin on finite sides; used for feasible starts.
  std::vector<double> clamp_interior(std::span<const double> x, double rel_margin = 1e-6) const {
    std::vector<double> y = clamp(x);
    for (std::size_t t = 0; t < dim(); ++t) {
      if (std::isfinite(lo_[t]) && std::isfinite(hi_[t])) {
        const double m = rel_margin * (hi_[t] - lo_[t]);
        y[t] = std::min(std::max(y[t], lo_[t] + m), hi_[t] - m);
      } else if (std::isfinite(lo_[t])) {
        y[t] = std::max(y[t], lo_[t] + rel_margin * (1.0 + std::fabs(lo_[t])));
      } else if (std::isfinite(hi_[t])) {
        y[t] = std::min(y[t], hi_[t] - rel_margin * (1.0 + std::fabs(hi_[t])));
      }
    }
    return y;
  }

 private:
  std::vector<double> lo_, hi_;
};

}  // namespace trendqp
