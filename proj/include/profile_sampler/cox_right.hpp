#pragma once

#include <cstdint>
#include <utility>

#include "profile_sampler/model.hpp"

namespace profile_sampler {

/// Linear predictors beyond +-this are clamped and the evaluation is flagged as overflowed.
inline constexpr double kLinearPredictorCap = 700.0;

/// Breslow profile of the right-censored Cox likelihood. The cumulative hazard
/// jumps by 1/S(y_i) at each event time, S(y) = sum over {j : y_j >= y} of
/// exp(theta'z_j), and
///   log pl = sum over events of [theta'z_i - log S(y_i)] - (number of events).
/// Tied event times share their risk set.
ProfileEvaluation breslow_profile(const ParameterPoint& theta, const CoxDataset& data);

/// Z ~ U[0,1]^d, T = log(1 + E exp(-theta0'Z)) with E ~ Exp(1) (baseline
/// cumulative hazard e^t - 1), C ~ U[0, tn]; records (min(T, C), 1{T <= C}, Z).
CoxDataset generate_right_censored(std::size_t n, const ParameterPoint& theta0, double tn,
                                   std::uint64_t seed);

struct CalibrationBracket {
  double lo = 1e-6;
  double hi = 1e3;
};

/// Monte Carlo estimate of P(T <= C) for C ~ U[0, tn], using the same event-time
/// draws as calibrate_tn (so the estimate is nondecreasing in tn).
double event_fraction(const ParameterPoint& theta0, double tn, std::uint64_t seed,
                      std::size_t mc_draws);

/// Bisection over tn so that the estimated P(delta = 1) matches target_frac (within 0.005).
/// Throws CalibrationError when the target is not reachable inside the bracket.
double calibrate_tn(const ParameterPoint& theta0, double target_frac, std::uint64_t seed,
                    std::size_t mc_draws, CalibrationBracket bracket = {});

class CoxRightModel final : public ProfileModel {
 public:
  explicit CoxRightModel(CoxDataset data) : data_(std::move(data)) {}

  std::string id() const override { return "cox_right"; }
  std::size_t sample_size() const override { return data_.n(); }
  std::size_t dimension() const override { return covariate_dim(data_); }
  RateSpec rate() const override { return RateSpec(0.5); }
  ProfileEvaluation profile(const ParameterPoint& theta) const override {
    return breslow_profile(theta, data_);
  }
  const CoxDataset& data() const { return data_; }

 private:
  CoxDataset data_;
};

}  // namespace profile_sampler
