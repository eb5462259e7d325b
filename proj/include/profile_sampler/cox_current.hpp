#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "profile_sampler/model.hpp"

namespace profile_sampler {

/// Weighted least-squares projection of `values` onto the nondecreasing cone
/// (pool-adjacent-violators, linear time).
std::vector<double> pava(std::span<const double> values, std::span<const double> weights);

struct IcmOptions {
  double tol = 1e-8;  // block-optimality residual
  int max_iter = 5000;
  double lambda_max = 20.0;
};

/// Cumulative hazard at the examination times sorted by (y, original index).
struct IsotonicSolution {
  std::vector<double> x;
  std::vector<std::size_t> order;
};

/// Current-status log-likelihood for fixed theta as a function of the hazard
/// values x at the sorted examination times.
class CurrentStatusObjective {
 public:
  CurrentStatusObjective(const ParameterPoint& theta, const CoxDataset& data);

  std::size_t size() const { return risk_.size(); }
  const std::vector<std::size_t>& order() const { return order_; }
  const std::vector<double>& risk() const { return risk_; }
  const std::vector<int>& delta() const { return delta_; }
  bool overflow() const { return overflow_; }

  double value(std::span<const double> x) const;
  /// Gradient and nonnegative curvature (minus the diagonal second derivative).
  void derivatives(std::span<const double> x, std::span<double> grad,
                   std::span<double> curvature) const;

 private:
  std::vector<std::size_t> order_;
  std::vector<double> risk_;  // exp(theta'z) in sorted order
  std::vector<int> delta_;
  bool overflow_ = false;
};

/// Largest violation of the block optimality conditions at a feasible x.
double icm_residual(const CurrentStatusObjective& objective, std::span<const double> x,
                    double lambda_max);

struct IcmTrace {
  std::vector<double> objective;  // value after each accepted iteration
};

class IcmNonConvergence : public ConvergenceError {
 public:
  IcmNonConvergence(const std::string& what, ProfileEvaluation best)
      : ConvergenceError(what), best_(std::move(best)) {}
  const ProfileEvaluation& best() const { return best_; }

 private:
  ProfileEvaluation best_;
};

/// Profile the monotone cumulative hazard out of the current-status Cox
/// likelihood with the iterative convex minorant algorithm.
ProfileEvaluation icm_profile(const ParameterPoint& theta, const CoxDataset& data,
                              const IcmOptions& opts = {}, IcmTrace* trace = nullptr,
                              IsotonicSolution* solution = nullptr);

/// T as in generate_right_censored, Y ~ U[0, tn]; records (Y, 1{T <= Y}, Z).
CoxDataset generate_current_status(std::size_t n, const ParameterPoint& theta0, double tn,
                                   std::uint64_t seed);

class CoxCurrentModel final : public ProfileModel {
 public:
  explicit CoxCurrentModel(CoxDataset data, IcmOptions opts = {})
      : data_(std::move(data)), opts_(opts) {}

  std::string id() const override { return "cox_current"; }
  std::size_t sample_size() const override { return data_.n(); }
  std::size_t dimension() const override { return covariate_dim(data_); }
  RateSpec rate() const override { return RateSpec(1.0 / 3.0); }
  /// A non-converged solve is returned as its best iterate, flagged so that
  /// value() is -inf and samplers and optimizers skip the point.
  ProfileEvaluation profile(const ParameterPoint& theta) const override {
    try {
      return icm_profile(theta, data_, opts_);
    } catch (const IcmNonConvergence& e) {
      ProfileEvaluation out = e.best();
      out.overflow = true;
      return out;
    }
  }
  const CoxDataset& data() const { return data_; }

 private:
  CoxDataset data_;
  IcmOptions opts_;
};

}  // namespace profile_sampler
