#include "profile_sampler/step_function.hpp"

#include <algorithm>
#include <cmath>

#include "profile_sampler/errors.hpp"

namespace profile_sampler {

MonotoneStepFunction::MonotoneStepFunction(std::vector<double> knots, std::vector<double> values)
    : knots_(std::move(knots)), values_(std::move(values)) {
  if (knots_.size() != values_.size())
    throw DomainError("step function: knots and values differ in length");
  for (std::size_t i = 0; i < knots_.size(); ++i) {
    if (!std::isfinite(knots_[i]) || !std::isfinite(values_[i]))
      throw DomainError("step function: non-finite entry");
    if (i > 0 && !(knots_[i] > knots_[i - 1]))
      throw DomainError("step function: knots must be strictly increasing");
    if (values_[i] < (i > 0 ? values_[i - 1] : 0.0))
      throw DomainError("step function: values must be nonnegative and nondecreasing");
  }
}

double MonotoneStepFunction::operator()(double t) const {
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
  if (it == knots_.begin()) return 0.0;
  return values_[static_cast<std::size_t>(it - knots_.begin()) - 1];
}

std::vector<double> MonotoneStepFunction::jumps() const {
  std::vector<double> out(values_.size());
  double prev = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    out[i] = values_[i] - prev;
    prev = values_[i];
  }
  return out;
}

}  // namespace profile_sampler
