#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "profile_sampler/core.hpp"
#include "profile_sampler/inference.hpp"

namespace profile_sampler {

struct StudyConfig {
  std::string model = "cox_right";  // cox_right | cox_current
  std::vector<std::size_t> sizes{50, 100};
  std::size_t reps = 50;
  ParameterPoint theta0{1.0};
  std::size_t chain_total = 5000;
  std::size_t chain_burn_in = 2000;
  std::uint64_t master_seed = 20240601;
  double target_event_frac = 0.9;
  std::optional<double> rate_r;  // model default when unset
  double step_constant = 1.0;
  // Exponents for the |MLE-CM|, |SE_M-SE_N|, |L_M-L_N|, |U_M-U_N| columns.
  // Unset means the model default.
  std::optional<std::array<double, 4>> scaling_exponents;
  Prior prior = Prior::flat();
  std::uint64_t calibration_seed = 97;
  std::size_t calibration_draws = 1000000;
  std::optional<double> tn;  // skips calibration when given
  bool record_timing = false;

  std::array<double, 4> exponents() const;
  /// Throws DomainError on an invalid combination.
  void validate() const;
};

std::array<double, 4> default_exponents(const std::string& model);

/// Line-oriented `key = value` text, `#` starts a comment.
StudyConfig parse_study_config(std::istream& is);
StudyConfig load_study_config(const std::string& path);

struct ReplicateResult {
  std::string model;
  std::size_t n = 0;
  std::size_t rep = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;  // stage error or missing-estimate reason when !ok
  double mle = 0.0, cm = 0.0, se_m = 0.0, se_n = 0.0;
  double l_m = 0.0, u_m = 0.0, l_n = 0.0, u_n = 0.0;
  double plr_lo = 0.0, plr_hi = 0.0, chi_b = 0.0;
  double accept_rate = 0.0;
  double runtime_ms = 0.0;
  std::vector<std::string> flags;
};

struct StudyRow {
  std::string model;
  std::size_t n = 0;
  std::size_t reps = 0;
  std::array<double, 4> scaled{};  // means over successful replicates
  double coverage = 0.0;
  double mean_accept_rate = 0.0;
  std::size_t failures = 0;
  double wall_ms = 0.0;
};

struct StudyResult {
  StudyConfig config;
  double tn = 0.0;
  std::vector<ReplicateResult> replicates;  // ordered by (size index, rep)
  std::vector<StudyRow> rows;
};

/// Probability-of-event calibration of the censoring bound, memoized per
/// (theta0, target, seed, draws). Both Cox designs share it.
double cached_tn(const ParameterPoint& theta0, double target, std::uint64_t seed,
                 std::size_t draws);

/// Seed of replicate `rep` at sample size `n`.
std::uint64_t replicate_seed(std::uint64_t master, std::size_t n, std::size_t rep);

/// One dataset through the full report pipeline. Never throws for per-dataset
/// failures; they are recorded in the result.
ReplicateResult run_replicate(const StudyConfig& config, double tn, std::size_t n,
                              std::size_t rep);

/// Aggregates replicates of one sample size.
StudyRow summarize(const StudyConfig& config, std::size_t n,
                   const std::vector<ReplicateResult>& replicates);

/// Runs every (n, rep) pair on up to `threads` workers. Output does not depend
/// on the thread count. Throws EstimateError if every replicate of some n fails.
StudyResult run_study(const StudyConfig& config, unsigned threads = 1);

inline constexpr const char* kReplicateHeader =
    "model,n,rep,seed,mle,cm,se_m,se_n,l_m,u_m,l_n,u_n,plr_lo,plr_hi,chi_b,accept_rate,runtime_ms";
inline constexpr const char* kSummaryHeader =
    "model,n,reps,scaled_mle_cm,scaled_se,scaled_l,scaled_u,coverage,failures";

void write_replicates_csv(std::ostream& os, const std::vector<ReplicateResult>& rows);
void write_summary_csv(std::ostream& os, const std::vector<StudyRow>& rows);
/// Both throw DomainError on empty input (no file is created) and IoError when
/// the path cannot be written.
void emit_csv(const std::vector<ReplicateResult>& rows, const std::string& path);
void emit_csv(const std::vector<StudyRow>& rows, const std::string& path);

std::vector<ReplicateResult> read_replicates_csv(std::istream& is);
std::vector<StudyRow> read_summary_csv(std::istream& is);

/// Free-text notes written next to the CSV files.
void write_study_metadata(std::ostream& os, const StudyResult& result);

}  // namespace profile_sampler
