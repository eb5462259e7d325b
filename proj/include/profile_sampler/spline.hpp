#pragma once

#include <vector>

#include "profile_sampler/core.hpp"

namespace profile_sampler {

/// Clamped cubic B-spline basis on [lo, hi] with the given interior knots.
class SplineBasis {
 public:
  static constexpr int kDegree = 3;

  SplineBasis() = default;
  SplineBasis(double lo, double hi, std::vector<double> interior_knots);

  int size() const { return static_cast<int>(interior_.size()) + kDegree + 1; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  const std::vector<double>& interior_knots() const { return interior_; }
  const std::vector<double>& knot_vector() const { return knots_; }

  /// All basis functions (or their `deriv`-th derivatives) at z. z is clamped to [lo, hi].
  Vector eval(double z, int deriv = 0) const;

  /// Rows are eval(z_i).
  Matrix design(const std::vector<double>& z, int deriv = 0) const;

  /// Exact Gram matrix of second derivatives, (i, j) -> integral of B_i'' B_j''.
  Matrix penalty() const;

 private:
  double lo_ = 0.0;
  double hi_ = 1.0;
  std::vector<double> interior_;
  std::vector<double> knots_;
};

/// k(z) = sum_j coefficients_j B_j(z) - centering_offset.
class SplineCurve {
 public:
  SplineCurve() = default;
  SplineCurve(SplineBasis basis, Vector coefficients, double centering_offset);

  double operator()(double z) const;
  const SplineBasis& basis() const { return basis_; }
  const Vector& coefficients() const { return coef_; }
  double centering_offset() const { return offset_; }

  /// Second-order Sobolev seminorm sqrt(integral of k''^2).
  double j2() const;
  /// max |k| over an equispaced grid of `grid` points spanning the support.
  double sup_norm(int grid = 1000) const;

 private:
  SplineBasis basis_;
  Vector coef_;
  double offset_ = 0.0;
};

}  // namespace profile_sampler
