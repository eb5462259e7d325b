#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "profile_sampler/core.hpp"

namespace profile_sampler {

/// Log target split into the profile log-likelihood and the log prior. The
/// chain records log_pl per draw so PLR quantities need no re-evaluation.
struct TargetValue {
  double log_pl = 0.0;
  double log_prior = 0.0;
  double total() const { return log_pl + log_prior; }
};

using LogTarget = std::function<TargetValue(const ParameterPoint&)>;

/// Wraps a plain log density (treated entirely as the log_pl component).
LogTarget plain_target(std::function<double(const ParameterPoint&)> log_density);

struct Chain {
  std::vector<ParameterPoint> samples;  // post burn-in
  std::vector<double> log_pl_values;    // aligned with samples
  double acceptance_rate = 0.0;         // over all iterations, burn-in included
  std::size_t accepted = 0;
  Vector proposal_sd;
  std::uint64_t seed = 0;
  std::size_t burn_in = 0;
  std::size_t total_iter = 0;

  std::size_t size() const { return samples.size(); }
  std::size_t dimension() const { return samples.empty() ? 0 : samples.front().size(); }
  /// Retained values of one coordinate.
  std::vector<double> coordinate(std::size_t k) const;
};

/// Random-walk Metropolis with proposal theta + sd .* N(0, I).
Chain metropolis_run(const LogTarget& log_target, const ParameterPoint& theta_init,
                     const Vector& proposal_sd, std::size_t total_iter, std::size_t burn_in,
                     std::uint64_t seed);

struct TuningResult {
  Vector sd;
  double acceptance_rate = 0.0;  // of the last pilot
  int rounds = 0;
  std::string protocol;  // human-readable pilot settings, for report metadata
  std::optional<std::string> warning;
};

struct TuningOptions {
  std::size_t pilot_iter = 500;
  int max_rounds = 30;
  double accept_lo = 0.2;
  double accept_hi = 0.4;
};

/// Pilot-chain tuning: double sd above the acceptance window, halve below it.
TuningResult tune_proposal(const LogTarget& log_target, const ParameterPoint& theta_init,
                           std::uint64_t seed, const Vector& initial_sd,
                           const TuningOptions& options = {});
TuningResult tune_proposal(const LogTarget& log_target, const ParameterPoint& theta_init,
                           std::uint64_t seed);

struct ChainDiagnostics {
  double acceptance_rate = 0.0;
  Vector mean;
  Vector sd;
  Vector autocorrelation_time;
  Vector split_half_discrepancy;
  bool degenerate = false;  // some coordinate has zero spread
};

/// Moments, initial-positive-sequence autocorrelation time and split-half check.
ChainDiagnostics chain_diagnostics(const Chain& chain);

/// Integrated autocorrelation time of a series (Geyer initial positive sequence).
double autocorrelation_time(const std::vector<double>& x);

/// CSV `iter,theta1[,theta2,...],log_pl`, iter counting from burn_in.
void write_chain_csv(std::ostream& os, const Chain& chain);

}  // namespace profile_sampler
