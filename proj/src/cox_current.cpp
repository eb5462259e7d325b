#include "profile_sampler/cox_current.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "profile_sampler/cox_right.hpp"
#include "profile_sampler/rng.hpp"

namespace profile_sampler {

namespace {

// Floor on c * x, guarding only the x = 0 boundary.
constexpr double kHazardFloor = 1e-300;
constexpr double kCurvatureCap = 1e300;
constexpr double kCurvatureFloor = 1e-10;
constexpr double kArmijo = 1e-4;
// Accepted residual, as a multiple of tol, once no step can change x.
constexpr double kStallFactor = 1e3;

}  // namespace

std::vector<double> pava(std::span<const double> values, std::span<const double> weights) {
  const std::size_t n = values.size();
  if (n == 0) throw DomainError("pava: empty input");
  if (weights.size() != n) throw DomainError("pava: values and weights differ in length");
  for (double w : weights)
    if (!(w > 0.0) || !std::isfinite(w)) throw DomainError("pava: weights must be positive");

  // Stack of pooled blocks: weighted mean, total weight, length.
  std::vector<double> mean, weight;
  std::vector<std::size_t> len;
  mean.reserve(n);
  weight.reserve(n);
  len.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    double m = values[i];
    double w = weights[i];
    std::size_t l = 1;
    while (!mean.empty() && mean.back() > m) {
      const double wt = weight.back() + w;
      m = (weight.back() * mean.back() + w * m) / wt;
      w = wt;
      l += len.back();
      mean.pop_back();
      weight.pop_back();
      len.pop_back();
    }
    mean.push_back(m);
    weight.push_back(w);
    len.push_back(l);
  }
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t b = 0; b < mean.size(); ++b) out.insert(out.end(), len[b], mean[b]);
  return out;
}

CurrentStatusObjective::CurrentStatusObjective(const ParameterPoint& theta,
                                               const CoxDataset& data) {
  const std::size_t n = data.n();
  if (theta.size() != covariate_dim(data))
    throw DomainError("icm_profile: theta dimension does not match covariates");
  order_.resize(n);
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  std::stable_sort(order_.begin(), order_.end(),
                   [&](std::size_t a, std::size_t b) { return data[a].y < data[b].y; });
  risk_.resize(n);
  delta_.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& obs = data[order_[k]];
    double eta = 0.0;
    for (std::size_t j = 0; j < obs.z.size(); ++j) eta += theta[j] * obs.z[j];
    if (std::abs(eta) > kLinearPredictorCap) {
      eta = std::copysign(kLinearPredictorCap, eta);
      overflow_ = true;
    }
    risk_[k] = std::exp(eta);
    delta_[k] = obs.delta;
  }
}

double CurrentStatusObjective::value(std::span<const double> x) const {
  double total = 0.0;
  for (std::size_t i = 0; i < risk_.size(); ++i) {
    if (delta_[i] == 1)
      total += std::log(-std::expm1(-x[i] * risk_[i]));
    else
      total -= risk_[i] * x[i];
  }
  return total;
}

void CurrentStatusObjective::derivatives(std::span<const double> x, std::span<double> grad,
                                         std::span<double> curvature) const {
  for (std::size_t i = 0; i < risk_.size(); ++i) {
    const double c = risk_[i];
    if (delta_[i] == 1) {
      const double u = std::max(c * x[i], kHazardFloor);
      grad[i] = c / std::expm1(u);
      curvature[i] = std::min(grad[i] * (c / -std::expm1(-u)), kCurvatureCap);
    } else {
      grad[i] = -c;
      curvature[i] = 0.0;
    }
  }
}

double icm_residual(const CurrentStatusObjective& objective, std::span<const double> x,
                    double lambda_max) {
  const std::size_t n = objective.size();
  std::vector<double> g(n), d(n);
  objective.derivatives(x, g, d);
  double worst = 0.0;
  std::size_t a = 0;
  while (a < n) {
    std::size_t b = a;
    while (b + 1 < n && x[b + 1] == x[a]) ++b;
    const double v = x[a];
    if (v < lambda_max) {
      // raise the upper part [k..b] of the block
      double upper = 0.0;
      for (std::size_t k = b + 1; k-- > a;) {
        upper += g[k];
        worst = std::max(worst, upper);
      }
    }
    if (v > 0.0) {
      // lower the lower part [a..k] of the block
      double lower = 0.0;
      for (std::size_t k = a; k <= b; ++k) {
        lower += g[k];
        worst = std::max(worst, -lower);
      }
    }
    a = b + 1;
  }
  return worst;
}

ProfileEvaluation icm_profile(const ParameterPoint& theta, const CoxDataset& data,
                              const IcmOptions& opts, IcmTrace* trace,
                              IsotonicSolution* solution) {
  if (!(opts.tol > 0.0) || opts.max_iter < 1 || !(opts.lambda_max > 0.0))
    throw DomainError("icm_profile: invalid options");
  const CurrentStatusObjective objective(theta, data);
  const std::size_t n = objective.size();
  const double cap = opts.lambda_max;

  // Start on the scale of 1 / exp(theta'z) at the geometric mean risk.
  double log_risk = 0.0;
  for (double c : objective.risk()) log_risk += std::log(c);
  const double scale = std::exp(-log_risk / static_cast<double>(n));
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i)
    x[i] = std::min(1.0, cap) * std::min(scale, 1.0) * static_cast<double>(i + 1) /
           static_cast<double>(n);
  double fx = objective.value(x);

  std::vector<double> g(n), d(n), working(n), y(n), trial(n);

  // Block sums of the gradient carry roundoff of order eps * sum |g|, which
  // dominates the absolute tolerance once exp(theta'z) is large.
  auto converged = [&](const std::vector<double>& at) {
    objective.derivatives(at, g, d);
    double scale = 0.0;
    for (double gi : g) scale += std::abs(gi);
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() * scale;
    return icm_residual(objective, at, cap) <= std::max(opts.tol, floor);
  };

  auto finish = [&](const std::vector<double>& sol) {
    ProfileEvaluation out;
    out.log_pl = objective.value(sol);
    out.overflow = objective.overflow();
    std::vector<double> knots, values;
    for (std::size_t i = 0; i < n; ++i) {
      const double t = data[objective.order()[i]].y;
      if (!knots.empty() && knots.back() == t) {
        values.back() = sol[i];
      } else {
        knots.push_back(t);
        values.push_back(sol[i]);
      }
    }
    out.nuisance = MonotoneStepFunction(std::move(knots), std::move(values));
    if (solution) *solution = IsotonicSolution{sol, objective.order()};
    return out;
  };

  // A trailing block of events sits on a nearly flat stretch of the likelihood,
  // so the iterates creep toward the cap; move it there when that is no worse.
  // Trailing blocks are tried one at a time, top first.
  auto snap_top_block = [&](std::vector<double> sol) {
    double best = objective.value(sol);
    std::size_t lo = n;
    while (lo > 0) {
      const double v = sol[lo - 1];
      while (lo > 0 && sol[lo - 1] == v) --lo;
      if (v >= cap) continue;
      std::vector<double> raised = sol;
      std::fill(raised.begin() + static_cast<std::ptrdiff_t>(lo), raised.end(), cap);
      const double f = objective.value(raised);
      if (f < best) break;
      sol.swap(raised);
      best = f;
    }
    return sol;
  };

  bool stalled = false;
  for (int iter = 0; iter < opts.max_iter; ++iter) {
    if (converged(x)) return finish(snap_top_block(x));
    for (std::size_t i = 0; i < n; ++i) {
      d[i] = std::max(d[i], kCurvatureFloor);
      working[i] = x[i] + g[i] / d[i];
    }
    y = pava(working, d);
    for (auto& v : y) v = std::clamp(v, 0.0, cap);

    double slope = 0.0;
    for (std::size_t i = 0; i < n; ++i) slope += g[i] * (y[i] - x[i]);
    // No ascent that L can resolve at working precision.
    if (!(slope > 4.0 * std::numeric_limits<double>::epsilon() * std::abs(fx))) {
      stalled = true;
      break;
    }

    double alpha = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      if (alpha == 1.0) {
        trial = y;
      } else {
        for (std::size_t i = 0; i < n; ++i) trial[i] = x[i] + alpha * (y[i] - x[i]);
      }
      const double ft = objective.value(trial);
      if (ft >= fx + kArmijo * alpha * slope) {
        accepted = true;
        stalled = trial == x;
        x.swap(trial);
        fx = ft;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) stalled = true;
    if (stalled) break;
    if (trace) trace->objective.push_back(fx);
  }
  if (converged(x)) return finish(snap_top_block(x));
  // The remaining ascent is below the resolution of x and L.
  if (stalled && icm_residual(objective, x, cap) <= kStallFactor * opts.tol)
    return finish(snap_top_block(x));
  ProfileEvaluation best = finish(x);
  throw IcmNonConvergence("icm_profile: no convergence within " +
                              std::to_string(opts.max_iter) + " iterations (residual " +
                              std::to_string(icm_residual(objective, x, cap)) + ")",
                          std::move(best));
}

CoxDataset generate_current_status(std::size_t n, const ParameterPoint& theta0, double tn,
                                   std::uint64_t seed) {
  if (n < 1) throw DomainError("generate_current_status: n must be >= 1");
  if (!(tn > 0.0)) throw DomainError("generate_current_status: tn must be positive");
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
    o.y = rng.uniform(0.0, tn);
    o.delta = t <= o.y ? 1 : 0;
  }
  return CoxDataset(std::move(obs));
}

}  // namespace profile_sampler
