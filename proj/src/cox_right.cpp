#include "profile_sampler/cox_right.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "profile_sampler/rng.hpp"

namespace profile_sampler {

namespace {

double linear_predictor(const ParameterPoint& theta, const CoxObservation& obs) {
  double eta = 0.0;
  for (std::size_t k = 0; k < obs.z.size(); ++k) eta += theta[k] * obs.z[k];
  return eta;
}

std::vector<double> draw_event_times(const ParameterPoint& theta0, std::uint64_t seed,
                                     std::size_t count) {
  Rng rng(seed);
  std::vector<double> t(count);
  for (auto& ti : t) {
    double eta = 0.0;
    for (std::size_t k = 0; k < theta0.size(); ++k) eta += theta0[k] * rng.uniform();
    ti = std::log1p(rng.exponential() * std::exp(-eta));
  }
  return t;
}

// E[(1 - T/tn)_+] = P(T <= C) for C ~ U[0, tn], averaged over the fixed draws.
double fraction_from_draws(const std::vector<double>& t, double tn) {
  double acc = 0.0;
  for (double ti : t) acc += ti < tn ? 1.0 - ti / tn : 0.0;
  return acc / static_cast<double>(t.size());
}

}  // namespace

ProfileEvaluation breslow_profile(const ParameterPoint& theta, const CoxDataset& data) {
  const std::size_t n = data.n();
  if (theta.size() != covariate_dim(data))
    throw DomainError("breslow_profile: theta dimension does not match covariates");

  ProfileEvaluation out;
  std::vector<double> eta(n);
  for (std::size_t i = 0; i < n; ++i) {
    eta[i] = linear_predictor(theta, data[i]);
    if (std::abs(eta[i]) > kLinearPredictorCap) {
      eta[i] = std::copysign(kLinearPredictorCap, eta[i]);
      out.overflow = true;
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return data[a].y < data[b].y; });

  // Walk times from largest to smallest, accumulating log S(y) over
  // {j : y_j >= y} so each tie group sees its full risk set.
  std::vector<double> times;
  std::vector<double> jumps;
  double log_pl = 0.0;
  double log_s = -std::numeric_limits<double>::infinity();
  std::size_t events = 0;
  std::size_t hi = n;
  while (hi > 0) {
    std::size_t lo = hi - 1;
    const double t = data[order[lo]].y;
    while (lo > 0 && data[order[lo - 1]].y == t) --lo;
    int d = 0;
    for (std::size_t k = lo; k < hi; ++k) {
      const double e = eta[order[k]];
      const double m = std::max(log_s, e);
      log_s = m + std::log1p(std::exp(-std::abs(log_s - e)));
    }
    for (std::size_t k = lo; k < hi; ++k) {
      const auto& obs = data[order[k]];
      if (obs.delta == 1) {
        ++d;
        log_pl += eta[order[k]] - log_s;
      }
    }
    if (d > 0) {
      times.push_back(t);
      jumps.push_back(d * std::exp(-log_s));
      events += static_cast<std::size_t>(d);
    }
    hi = lo;
  }
  if (events == 0) {
    out.log_pl = 0.0;
    out.nuisance = MonotoneStepFunction::zero();
    return out;
  }
  out.log_pl = log_pl - static_cast<double>(events);

  std::reverse(times.begin(), times.end());
  std::reverse(jumps.begin(), jumps.end());
  std::vector<double> cumulative(jumps.size());
  std::partial_sum(jumps.begin(), jumps.end(), cumulative.begin());
  if (!std::isfinite(cumulative.back())) {
    out.overflow = true;
    return out;
  }
  out.nuisance = MonotoneStepFunction(std::move(times), std::move(cumulative));
  return out;
}

CoxDataset generate_right_censored(std::size_t n, const ParameterPoint& theta0, double tn,
                                   std::uint64_t seed) {
  if (n < 1) throw DomainError("generate_right_censored: n must be >= 1");
  if (!(tn > 0.0)) throw DomainError("generate_right_censored: tn must be positive");
  Rng rng(seed);
  const std::size_t d = theta0.size();
  std::vector<CoxObservation> obs(n);
  for (auto& o : obs) {
    o.z.resize(d);
    double eta = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      o.z[k] = rng.uniform();
      eta += theta0[k] * o.z[k];
    }
    const double t = std::log1p(rng.exponential() * std::exp(-eta));
    const double c = rng.uniform(0.0, tn);
    o.y = std::min(t, c);
    o.delta = t <= c ? 1 : 0;
  }
  return CoxDataset(std::move(obs));
}

double event_fraction(const ParameterPoint& theta0, double tn, std::uint64_t seed,
                      std::size_t mc_draws) {
  if (mc_draws < 1) throw DomainError("event_fraction: need at least one draw");
  if (!(tn > 0.0)) throw DomainError("event_fraction: tn must be positive");
  return fraction_from_draws(draw_event_times(theta0, seed, mc_draws), tn);
}

double calibrate_tn(const ParameterPoint& theta0, double target_frac, std::uint64_t seed,
                    std::size_t mc_draws, CalibrationBracket bracket) {
  if (!(target_frac > 0.0 && target_frac < 1.0))
    throw DomainError("calibrate_tn: target fraction must lie in (0, 1)");
  if (!(bracket.lo > 0.0 && bracket.hi > bracket.lo))
    throw DomainError("calibrate_tn: invalid bracket");
  if (mc_draws < 1) throw DomainError("calibrate_tn: need at least one draw");
  constexpr double kTolerance = 0.005;

  const std::vector<double> t = draw_event_times(theta0, seed, mc_draws);
  double lo = bracket.lo;
  double hi = bracket.hi;
  const double f_lo = fraction_from_draws(t, lo);
  const double f_hi = fraction_from_draws(t, hi);
  if (f_hi < target_frac - kTolerance || f_lo > target_frac + kTolerance)
    throw CalibrationError("calibrate_tn: target event fraction unreachable in [" +
                           std::to_string(lo) + ", " + std::to_string(hi) + "]");
  if (f_hi < target_frac) return hi;
  if (f_lo > target_frac) return lo;
  // Bisect to the crossing itself rather than stopping at the first point inside
  // the tolerance band, so the result is a well-defined regression constant.
  for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (fraction_from_draws(t, mid) < target_frac)
      lo = mid;
    else
      hi = mid;
  }
  const double tn = 0.5 * (lo + hi);
  if (std::abs(fraction_from_draws(t, tn) - target_frac) > kTolerance)
    throw CalibrationError("calibrate_tn: bisection did not reach the target band");
  return tn;
}

}  // namespace profile_sampler
