#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "profile_sampler/errors.hpp"

namespace profile_sampler {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Point in the finite-dimensional parameter space; entries are always finite.
class ParameterPoint {
 public:
  ParameterPoint() = default;
  explicit ParameterPoint(Vector theta);
  ParameterPoint(std::initializer_list<double> values);
  static ParameterPoint scalar(double value) { return ParameterPoint{value}; }

  std::size_t size() const { return static_cast<std::size_t>(theta_.size()); }
  double operator[](std::size_t i) const { return theta_[static_cast<Eigen::Index>(i)]; }
  const Vector& values() const { return theta_; }

  friend bool operator==(const ParameterPoint& a, const ParameterPoint& b) {
    return a.theta_.size() == b.theta_.size() && (a.theta_.array() == b.theta_.array()).all();
  }

 private:
  Vector theta_;
};

/// Right-censored or current-status observation. For current status `y` is the
/// examination time and `delta` flags that the event had happened by then.
struct CoxObservation {
  double y = 0.0;
  int delta = 0;
  std::vector<double> z;
};

struct PartlyLinearObservation {
  double c = 0.0;
  int delta = 0;
  double w = 0.0;
  double z = 0.0;
};

/// Immutable, non-empty, homogeneous list of observations.
template <class Observation>
class Dataset {
 public:
  explicit Dataset(std::vector<Observation> observations);

  std::size_t n() const { return obs_.size(); }
  const Observation& operator[](std::size_t i) const { return obs_[i]; }
  const std::vector<Observation>& observations() const { return obs_; }
  auto begin() const { return obs_.begin(); }
  auto end() const { return obs_.end(); }

 private:
  std::vector<Observation> obs_;
};

using CoxDataset = Dataset<CoxObservation>;
using PartlyLinearDataset = Dataset<PartlyLinearObservation>;

/// Number of covariates of a Cox dataset.
std::size_t covariate_dim(const CoxDataset& data);

class Prior {
 public:
  enum class Kind { flat, gaussian };

  static Prior flat() { return Prior(); }
  static Prior gaussian(Vector mean, Vector sd);

  Kind kind() const { return kind_; }
  const Vector& mean() const { return mean_; }
  const Vector& sd() const { return sd_; }

  std::string to_string() const;
  /// Parses "flat" or "gaussian:m1[;m2...],s1[;s2...]"; a scalar pair broadcasts.
  static Prior parse(const std::string& text);

 private:
  Prior() = default;
  Kind kind_ = Kind::flat;
  Vector mean_;
  Vector sd_;
};

double prior_log_density(const Prior& prior, const ParameterPoint& theta);

/// Convergence rate r of the nuisance estimator, r > 1/4.
class RateSpec {
 public:
  explicit RateSpec(double r);
  double r() const { return r_; }
  double effective_exponent() const { return r_ < 0.5 ? r_ : 0.5; }

 private:
  double r_;
};

// Higher-order accuracy scale n^{-1/2} + n^{-2r+1/2}.
double m_n(long n, double r);

// Remainder order of the quadratic expansion of log pl at distance w.
double g_r(double w, long n, double r);

// Error order of the discretized information at step s.
double h_r(double s, long n, double r);

/// c * n^{-min(r, 1/2)}.
double step_size(long n, const RateSpec& rate, double c = 1.0);

// ---------------------------------------------------------------------------

template <class Observation>
Dataset<Observation>::Dataset(std::vector<Observation> observations)
    : obs_(std::move(observations)) {
  if (obs_.empty()) throw DomainError("dataset must contain at least one observation");
}

}  // namespace profile_sampler
