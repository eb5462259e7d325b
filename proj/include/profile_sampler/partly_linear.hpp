#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "profile_sampler/model.hpp"
#include "profile_sampler/spline.hpp"

namespace profile_sampler {

namespace probit {

/// log Phi(q), accurate in both tails.
double log_cdf(double q);
/// d/dq log Phi(q) = phi(q) / Phi(q).
double mills(double q);

}  // namespace probit

struct SieveOptions {
  double M = 10.0;              // radius of the J2 + sup-norm ball
  double knot_constant = 2.0;   // K_n = ceil(knot_constant * n^{1/5})
  double tol = 1e-8;
  int max_iter = 200;
  double support_lo = 0.0;
  double support_hi = 1.0;
};

struct SieveBasis {
  SplineBasis basis;
  Matrix design;   // n x p basis evaluations at the sample points
  Matrix penalty;  // p x p, integral of B_i'' B_j''
  std::string warning;
};

/// Cubic B-spline basis with ceil(c n^{1/5}) interior knots at empirical quantiles.
SieveBasis build_basis(const std::vector<double>& z_points, const SieveOptions& options);

/// Penalized probit objective in the free spline coefficients for fixed theta.
/// The curve is centered to have empirical mean zero; the last basis function is
/// dropped since it is spanned by the others plus constants.
class SieveProblem {
 public:
  SieveProblem(double theta, const PartlyLinearDataset& data, const SieveOptions& options);

  Eigen::Index dim() const { return x_.cols(); }

  double loglik(const Vector& beta) const;
  /// Quadratic roughness-plus-size penalty (J2^2 plus empirical second moment).
  double penalty(const Vector& beta) const { return beta.dot(pen_ * beta); }
  const Matrix& penalty_matrix() const { return pen_; }
  double objective(const Vector& beta, double lambda) const {
    return loglik(beta) - lambda * penalty(beta);
  }
  Vector gradient(const Vector& beta, double lambda) const;
  /// Hessian of the unpenalized log-likelihood.
  Matrix loglik_hessian(const Vector& beta) const;

  SplineCurve curve(const Vector& beta) const;
  const SieveBasis& sieve() const { return sieve_; }

 private:
  SieveBasis sieve_;
  Matrix x_;          // centered design with the last column removed
  Vector col_means_;  // column means of the raw design
  Vector offset_;     // c_i - theta * w_i
  std::vector<int> delta_;
  Matrix pen_;
};

struct NewtonResult {
  Vector beta;
  std::vector<double> objective;  // penalized value after each accepted step
  bool hessian_nsd = true;        // Cholesky of -H succeeded at every iterate
  bool converged = false;
};

/// Damped Newton ascent on the penalized objective at fixed lambda.
NewtonResult sieve_newton(const SieveProblem& problem, double lambda, Vector start,
                          const SieveOptions& options);

struct SieveTrace {
  std::vector<double> lambdas;
  std::vector<NewtonResult> solves;
  double final_lambda = 0.0;
  double j2 = 0.0;
  double sup = 0.0;
};

/// Profile k out of the partly linear current-status probit likelihood subject to
/// J2(k) + sup|k| <= M, by bisection along the penalty path.
ProfileEvaluation sieve_profile(const ParameterPoint& theta, const PartlyLinearDataset& data,
                                const SieveOptions& options = {}, SieveTrace* trace = nullptr);

/// W, Z ~ U[0,1], Y = theta0 W + k0(Z) + N(0,1), C ~ U[lc, uc]; records (C, 1{Y <= C}, W, Z).
PartlyLinearDataset generate_partly_linear(std::size_t n, const ParameterPoint& theta0,
                                           const std::function<double(double)>& k0, double lc,
                                           double uc, std::uint64_t seed);

class PartlyLinearModel final : public ProfileModel {
 public:
  explicit PartlyLinearModel(PartlyLinearDataset data, SieveOptions opts = {})
      : data_(std::move(data)), opts_(opts) {}

  std::string id() const override { return "partly_linear"; }
  std::size_t sample_size() const override { return data_.n(); }
  std::size_t dimension() const override { return 1; }
  RateSpec rate() const override { return RateSpec(0.4); }
  ProfileEvaluation profile(const ParameterPoint& theta) const override {
    return sieve_profile(theta, data_, opts_);
  }

 private:
  PartlyLinearDataset data_;
  SieveOptions opts_;
};

}  // namespace profile_sampler
