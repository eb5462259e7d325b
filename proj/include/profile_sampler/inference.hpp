#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "profile_sampler/core.hpp"
#include "profile_sampler/model.hpp"
#include "profile_sampler/sampler.hpp"

namespace profile_sampler {

using LogPl = std::function<double(const ParameterPoint&)>;

// ---------------------------------------------------------------------------
// Point estimation

/// Search box for the maximizer. For d = 1 the interval is scanned on a coarse
/// grid, then narrowed by golden-section search and a final parabolic step. For
/// d > 1 a Nelder-Mead simplex is seeded at the box center.
struct SearchBox {
  Vector lo;
  Vector hi;
  static SearchBox around(const ParameterPoint& center, double half_width);
};

ParameterPoint mle_maximize(const LogPl& log_pl, const SearchBox& box, double tol = 1e-8);

// ---------------------------------------------------------------------------
// Information estimates

struct InfoEstimate {
  enum class Method { numeric, mcmc };
  Matrix matrix;
  double step = 0.0;  // 0 for the mcmc method
  Method method = Method::numeric;
  bool positive_definite = false;
};

/// Discretized observed profile information along direction v:
///   -2 [log pl(theta + s v) - log pl(theta)] / (n s^2).
double info_directional(const LogPl& log_pl, const ParameterPoint& theta_hat, const Vector& v,
                        double s, std::size_t n);

/// Element-wise four-point differences
///   -[lpl(t + s e_i + s e_j) + lpl(t) - lpl(t + s e_i) - lpl(t + s e_j)] / (n s^2).
InfoEstimate info_matrix(const LogPl& log_pl, const ParameterPoint& theta_hat, double s,
                         std::size_t n);

/// Inverse of n times the chain sample covariance.
InfoEstimate posterior_info(const Chain& chain, std::size_t n);

ParameterPoint posterior_mean(const Chain& chain);
/// Per-coordinate sample standard deviation (denominator N - 1).
Vector posterior_sd(const Chain& chain);
Matrix posterior_covariance(const Chain& chain);

// ---------------------------------------------------------------------------
// Intervals

/// Empirical alpha-quantile with linear interpolation between order statistics.
double empirical_quantile(std::vector<double> values, double alpha);

double credible_quantile(const Chain& chain, double alpha, std::size_t coord);

struct IntervalEstimate {
  enum class Method { wald_numeric, wald_mcmc, quantile, plr };
  double lower = 0.0;
  double upper = 0.0;
  double level = 0.95;
  Method method = Method::quantile;
  std::size_t coord = 0;

  bool contains(double v) const { return lower <= v && v <= upper; }
  double width() const { return upper - lower; }
};

std::string to_string(IntervalEstimate::Method m);

/// Per coordinate: theta_i +- z_{1-alpha/2} / sqrt(n info_ii).
std::vector<IntervalEstimate> wald_interval(const ParameterPoint& theta_hat,
                                            const InfoEstimate& info, std::size_t n,
                                            double alpha);

/// Posterior draws of 2 (log_pl_max - log pl(theta)).
std::vector<double> plr_samples(const Chain& chain, double log_pl_max);

double plr_threshold(const std::vector<double>& plr_values, double alpha);

/// {theta : 2 (log pl(theta_hat) - log pl(theta)) <= chi} for scalar theta, by
/// geometric bracket expansion then bisection to 1e-8. Assumes the profile is
/// unimodal. Throws BracketError if a side does not cross within expand_limit doublings.
IntervalEstimate plr_interval(const LogPl& log_pl, const ParameterPoint& theta_hat, double chi,
                              int expand_limit = 60, double initial_step = 1e-3,
                              double level = 0.95);

double normal_quantile(double p);
double chi_squared_quantile(double p, double dof);

// ---------------------------------------------------------------------------
// Report pipeline

struct ReportConfig {
  std::optional<double> rate_r;  // defaults to the model's own rate
  double step_constant = 1.0;
  std::size_t chain_total = 5000;
  std::size_t burn_in = 2000;
  std::uint64_t seed = 1;
  Prior prior = Prior::flat();
  double alpha = 0.05;
  double search_half_width = 10.0;
  double mle_tol = 1e-8;
  // "M" interval from chain quantiles (default) or Wald with the chain SD.
  bool mcmc_interval_from_quantiles = true;
  // PLR interval at the chi-square quantile (default) or at the posterior threshold.
  bool plr_at_chi_squared = true;
  TuningOptions tuning;
};

struct InferenceReport {
  std::string model;
  std::size_t n = 0;
  std::size_t d = 0;
  ParameterPoint mle;
  ParameterPoint mle_direct;  // optimizer run before sampling
  ParameterPoint mle_chain;   // highest-log_pl chain draw
  double log_pl_max = 0.0;
  ParameterPoint cm;
  Vector se_m;
  Vector se_n;
  std::vector<IntervalEstimate> intervals;
  double chi_b = 0.0;
  double chi_squared = 0.0;
  double rate_r = 0.5;
  double m_n = 0.0;
  double step = 0.0;
  InfoEstimate info_numeric;
  std::optional<InfoEstimate> info_mcmc;
  ChainDiagnostics chain_meta;
  TuningResult tuning;
  std::vector<std::string> flags;  // degeneracies; empty on full success

  bool success() const { return flags.empty(); }
  /// Interval of the given method for coordinate `coord`, if computed.
  std::optional<IntervalEstimate> interval(IntervalEstimate::Method m, std::size_t coord = 0) const;
};

/// Full per-dataset pipeline: MLE, numeric information, proposal tuning, chain,
/// posterior estimators and the three interval types. Stage failures surface as
/// StageError; estimator degeneracies are recorded in `flags`.
InferenceReport build_report(const ProfileModel& model, const ReportConfig& config);

/// One `key=value` per line.
void write_report(std::ostream& os, const InferenceReport& report);

}  // namespace profile_sampler
