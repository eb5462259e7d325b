#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <variant>

#include "profile_sampler/core.hpp"
#include "profile_sampler/spline.hpp"
#include "profile_sampler/step_function.hpp"

namespace profile_sampler {

using Nuisance = std::variant<std::monostate, MonotoneStepFunction, SplineCurve>;

/// log pl_n(theta) together with the nuisance fit attaining it.
struct ProfileEvaluation {
  double log_pl = -std::numeric_limits<double>::infinity();
  Nuisance nuisance;
  // Not trustworthy (clamped exp(theta'z) or a failed inner solve); callers
  // treat the point as -inf.
  bool overflow = false;

  bool finite() const { return std::isfinite(log_pl) && !overflow; }
  /// log_pl with flagged evaluations mapped to -inf.
  double value() const {
    return overflow ? -std::numeric_limits<double>::infinity() : log_pl;
  }
};

/// Contract satisfied by every semiparametric model: profile out the nuisance at theta.
class ProfileModel {
 public:
  virtual ~ProfileModel() = default;

  virtual std::string id() const = 0;
  virtual std::size_t sample_size() const = 0;
  virtual std::size_t dimension() const = 0;
  virtual RateSpec rate() const = 0;
  virtual ProfileEvaluation profile(const ParameterPoint& theta) const = 0;

  double log_pl(const ParameterPoint& theta) const { return profile(theta).value(); }
};

}  // namespace profile_sampler
