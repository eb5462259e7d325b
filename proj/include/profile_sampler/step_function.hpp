#pragma once

#include <vector>

namespace profile_sampler {

/// Nonnegative nondecreasing right-continuous step function, zero before the
/// first knot. Used for cumulative hazard estimates.
class MonotoneStepFunction {
 public:
  MonotoneStepFunction() = default;
  MonotoneStepFunction(std::vector<double> knots, std::vector<double> values);

  static MonotoneStepFunction zero() { return {}; }

  double operator()(double t) const;

  const std::vector<double>& knots() const { return knots_; }
  const std::vector<double>& values() const { return values_; }
  bool empty() const { return knots_.empty(); }

  /// Jump sizes at each knot (first jump measured from zero).
  std::vector<double> jumps() const;

 private:
  std::vector<double> knots_;
  std::vector<double> values_;
};

}  // namespace profile_sampler
