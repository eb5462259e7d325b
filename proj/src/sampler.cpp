#include "profile_sampler/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "profile_sampler/rng.hpp"

namespace profile_sampler {

LogTarget plain_target(std::function<double(const ParameterPoint&)> log_density) {
  return [f = std::move(log_density)](const ParameterPoint& theta) {
    return TargetValue{f(theta), 0.0};
  };
}

std::vector<double> Chain::coordinate(std::size_t k) const {
  std::vector<double> out(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) out[i] = samples[i][k];
  return out;
}

Chain metropolis_run(const LogTarget& log_target, const ParameterPoint& theta_init,
                     const Vector& proposal_sd, std::size_t total_iter, std::size_t burn_in,
                     std::uint64_t seed) {
  if (!(burn_in < total_iter)) throw DomainError("metropolis_run: burn_in must be < total_iter");
  if (static_cast<std::size_t>(proposal_sd.size()) != theta_init.size())
    throw DomainError("metropolis_run: proposal sd dimension mismatch");
  if (!(proposal_sd.array() >= 0.0).all() || !proposal_sd.allFinite())
    throw DomainError("metropolis_run: proposal sd must be nonnegative");

  TargetValue current_value = log_target(theta_init);
  if (!std::isfinite(current_value.total()))
    throw DomainError("metropolis_run: log target is not finite at the initial point");

  Chain chain;
  chain.proposal_sd = proposal_sd;
  chain.seed = seed;
  chain.burn_in = burn_in;
  chain.total_iter = total_iter;
  chain.samples.reserve(total_iter - burn_in);
  chain.log_pl_values.reserve(total_iter - burn_in);

  Rng rng(seed);
  ParameterPoint current = theta_init;
  const auto d = static_cast<Eigen::Index>(theta_init.size());
  Vector step(d);
  for (std::size_t it = 0; it < total_iter; ++it) {
    for (Eigen::Index k = 0; k < d; ++k) step[k] = proposal_sd[k] * rng.normal();
    const double u = rng.uniform();
    ParameterPoint proposal(current.values() + step);
    const TargetValue proposed_value = log_target(proposal);
    const double log_ratio = proposed_value.total() - current_value.total();
    // A -inf proposal gives log_ratio = -inf and is never accepted; NaN likewise.
    if (log_ratio >= 0.0 || std::log(u) < log_ratio) {
      current = std::move(proposal);
      current_value = proposed_value;
      ++chain.accepted;
    }
    if (it >= burn_in) {
      chain.samples.push_back(current);
      chain.log_pl_values.push_back(current_value.log_pl);
    }
  }
  chain.acceptance_rate = static_cast<double>(chain.accepted) / static_cast<double>(total_iter);
  return chain;
}

TuningResult tune_proposal(const LogTarget& log_target, const ParameterPoint& theta_init,
                           std::uint64_t seed, const Vector& initial_sd,
                           const TuningOptions& options) {
  if (options.pilot_iter < 2 || options.max_rounds < 1)
    throw DomainError("tune_proposal: invalid options");
  TuningResult result;
  result.sd = initial_sd;
  result.protocol = "pilot " + std::to_string(options.pilot_iter) + " iterations; double sd above " +
                    std::to_string(options.accept_hi) + ", halve below " +
                    std::to_string(options.accept_lo) + "; at most " +
                    std::to_string(options.max_rounds) + " rounds";
  for (int round = 0; round < options.max_rounds; ++round) {
    const std::uint64_t pilot_seed = derive_seed(seed, 0x7075, static_cast<std::uint64_t>(round));
    const Chain pilot = metropolis_run(log_target, theta_init, result.sd, options.pilot_iter, 0,
                                       pilot_seed);
    result.acceptance_rate = pilot.acceptance_rate;
    result.rounds = round + 1;
    if (pilot.acceptance_rate > options.accept_hi) {
      if (round + 1 < options.max_rounds) result.sd *= 2.0;
    } else if (pilot.acceptance_rate < options.accept_lo) {
      if (round + 1 < options.max_rounds) result.sd *= 0.5;
    } else {
      return result;
    }
  }
  result.warning = "tune_proposal: acceptance window not reached after " +
                   std::to_string(options.max_rounds) + " pilot rounds (last rate " +
                   std::to_string(result.acceptance_rate) + ")";
  return result;
}

TuningResult tune_proposal(const LogTarget& log_target, const ParameterPoint& theta_init,
                           std::uint64_t seed) {
  return tune_proposal(log_target, theta_init, seed,
                       Vector::Ones(static_cast<Eigen::Index>(theta_init.size())));
}

double autocorrelation_time(const std::vector<double>& x) {
  const std::size_t n = x.size();
  if (n < 2) return 1.0;
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(n);
  auto autocov = [&](std::size_t lag) {
    double acc = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) acc += (x[i] - mean) * (x[i + lag] - mean);
    return acc / static_cast<double>(n);
  };
  const double c0 = autocov(0);
  if (!(c0 > 0.0)) return 1.0;
  // Sum consecutive pairs Gamma_m = rho(2m) + rho(2m+1) while they stay positive.
  double tau = -1.0;
  for (std::size_t m = 0; 2 * m + 1 < n; ++m) {
    const double pair = (autocov(2 * m) + autocov(2 * m + 1)) / c0;
    if (!(pair > 0.0)) break;
    tau += 2.0 * pair;
  }
  return std::max(tau, 1e-12);
}

ChainDiagnostics chain_diagnostics(const Chain& chain) {
  if (chain.size() < 10) throw DomainError("chain_diagnostics: chain shorter than 10 samples");
  const std::size_t d = chain.dimension();
  ChainDiagnostics out;
  out.acceptance_rate = chain.acceptance_rate;
  const auto dd = static_cast<Eigen::Index>(d);
  out.mean.resize(dd);
  out.sd.resize(dd);
  out.autocorrelation_time.resize(dd);
  out.split_half_discrepancy.resize(dd);
  for (std::size_t k = 0; k < d; ++k) {
    const std::vector<double> x = chain.coordinate(k);
    const auto n = static_cast<double>(x.size());
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= n;
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    const auto kk = static_cast<Eigen::Index>(k);
    out.mean[kk] = mean;
    out.sd[kk] = sd;
    out.autocorrelation_time[kk] = autocorrelation_time(x);

    const std::size_t half = x.size() / 2;
    auto moments = [&](std::size_t lo, std::size_t hi, double& m, double& v) {
      m = 0.0;
      for (std::size_t i = lo; i < hi; ++i) m += x[i];
      m /= static_cast<double>(hi - lo);
      v = 0.0;
      for (std::size_t i = lo; i < hi; ++i) v += (x[i] - m) * (x[i] - m);
      v /= static_cast<double>(hi - lo - 1);
    };
    double m1, v1, m2, v2;
    moments(0, half, m1, v1);
    moments(half, x.size(), m2, v2);
    const double se = std::sqrt(out.autocorrelation_time[kk] *
                                (v1 / static_cast<double>(half) +
                                 v2 / static_cast<double>(x.size() - half)));
    out.split_half_discrepancy[kk] = se > 0.0 ? std::abs(m1 - m2) / se : 0.0;
    if (!(sd > 0.0)) out.degenerate = true;
  }
  return out;
}

void write_chain_csv(std::ostream& os, const Chain& chain) {
  const std::size_t d = chain.dimension();
  os << "iter";
  for (std::size_t k = 0; k < d; ++k) os << ",theta" << (k + 1);
  os << ",log_pl\n";
  const auto old = os.precision(17);
  for (std::size_t i = 0; i < chain.size(); ++i) {
    os << (chain.burn_in + i);
    for (std::size_t k = 0; k < d; ++k) os << ',' << chain.samples[i][k];
    os << ',' << chain.log_pl_values[i] << '\n';
  }
  os.precision(old);
}

}  // namespace profile_sampler
