#include "profile_sampler/partly_linear.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

#include "profile_sampler/rng.hpp"

namespace profile_sampler {

namespace probit {

namespace {
constexpr double kSqrt1_2 = 0.70710678118654752440;
constexpr double kHalfLog2Pi = 0.91893853320467274178;
constexpr double kAsymptoticCut = -37.0;

// log(1 - 1/q^2 + 3/q^4 - 15/q^6 + 105/q^8), the asymptotic Mills series.
double mills_series_log(double q) {
  const double r = 1.0 / (q * q);
  return std::log1p(r * (-1.0 + r * (3.0 + r * (-15.0 + r * 105.0))));
}
}  // namespace

double log_cdf(double q) {
  if (q > 0.0) return std::log1p(-0.5 * std::erfc(q * kSqrt1_2));
  if (q > kAsymptoticCut) return std::log(0.5 * std::erfc(-q * kSqrt1_2));
  return -0.5 * q * q - std::log(-q) - kHalfLog2Pi + mills_series_log(q);
}

double mills(double q) {
  const double log_phi = -0.5 * q * q - kHalfLog2Pi;
  if (q > kAsymptoticCut) return std::exp(log_phi - log_cdf(q));
  return -q * std::exp(-mills_series_log(q));
}

}  // namespace probit

namespace {

double quantile_sorted(const std::vector<double>& sorted, double p) {
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

// First and second derivative of the observation log-likelihood in eta.
void probit_terms(double eta, int delta, double& d1, double& d2) {
  const double q = delta == 1 ? eta : -eta;
  const double m = probit::mills(q);
  const double sign = delta == 1 ? 1.0 : -1.0;
  d1 = sign * m;
  d2 = -m * (q + m);
}

}  // namespace

SieveBasis build_basis(const std::vector<double>& z_points, const SieveOptions& options) {
  if (z_points.empty()) throw DomainError("build_basis: no points");
  if (!(options.knot_constant > 0.0)) throw DomainError("build_basis: knot constant must be positive");
  const double lo = options.support_lo;
  const double hi = options.support_hi;
  for (double z : z_points)
    if (!(z >= lo && z <= hi)) throw DomainError("build_basis: point outside the support");

  const double n = static_cast<double>(z_points.size());
  const auto wanted = static_cast<std::size_t>(std::ceil(options.knot_constant * std::pow(n, 0.2)));
  std::vector<double> sorted = z_points;
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> knots;
  for (std::size_t j = 1; j <= wanted; ++j) {
    const double q = quantile_sorted(sorted, static_cast<double>(j) / static_cast<double>(wanted + 1));
    if (!(q > lo && q < hi)) continue;
    if (!knots.empty() && !(q > knots.back())) continue;
    knots.push_back(q);
  }
  SieveBasis out;
  if (knots.size() < wanted)
    out.warning = "build_basis: reduced interior knots from " + std::to_string(wanted) + " to " +
                  std::to_string(knots.size()) + " (too few distinct z)";
  out.basis = SplineBasis(lo, hi, std::move(knots));
  out.design = out.basis.design(z_points);
  out.penalty = out.basis.penalty();
  return out;
}

SieveProblem::SieveProblem(double theta, const PartlyLinearDataset& data,
                           const SieveOptions& options) {
  const std::size_t n = data.n();
  std::vector<double> z(n);
  offset_.resize(static_cast<Eigen::Index>(n));
  delta_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& o = data[i];
    z[i] = o.z;
    offset_[static_cast<Eigen::Index>(i)] = o.c - theta * o.w;
    delta_[i] = o.delta;
  }
  sieve_ = build_basis(z, options);
  const Eigen::Index p = sieve_.basis.size();
  col_means_ = sieve_.design.colwise().mean().transpose();
  const Matrix centered = sieve_.design.rowwise() - col_means_.transpose();
  x_ = centered.leftCols(p - 1);
  pen_ = sieve_.penalty.topLeftCorner(p - 1, p - 1) + x_.transpose() * x_ / static_cast<double>(n);
  pen_ = 0.5 * (pen_ + pen_.transpose());
}

double SieveProblem::loglik(const Vector& beta) const {
  const Vector eta = offset_ - x_ * beta;
  double total = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i)
    total += probit::log_cdf(delta_[static_cast<std::size_t>(i)] == 1 ? eta[i] : -eta[i]);
  return total;
}

Vector SieveProblem::gradient(const Vector& beta, double lambda) const {
  const Vector eta = offset_ - x_ * beta;
  Vector s(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    double d1, d2;
    probit_terms(eta[i], delta_[static_cast<std::size_t>(i)], d1, d2);
    s[i] = d1;
  }
  return -x_.transpose() * s - 2.0 * lambda * (pen_ * beta);
}

Matrix SieveProblem::loglik_hessian(const Vector& beta) const {
  const Vector eta = offset_ - x_ * beta;
  Vector t(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    double d1, d2;
    probit_terms(eta[i], delta_[static_cast<std::size_t>(i)], d1, d2);
    t[i] = d2;
  }
  return x_.transpose() * t.asDiagonal() * x_;
}

SplineCurve SieveProblem::curve(const Vector& beta) const {
  Vector full = Vector::Zero(sieve_.basis.size());
  full.head(beta.size()) = beta;
  return SplineCurve(sieve_.basis, full, col_means_.dot(full));
}

NewtonResult sieve_newton(const SieveProblem& problem, double lambda, Vector start,
                          const SieveOptions& options) {
  NewtonResult res;
  res.beta = std::move(start);
  const Eigen::Index p = problem.dim();
  double f = problem.objective(res.beta, lambda);
  const Matrix pen2 = 2.0 * lambda * problem.penalty_matrix();
  for (int it = 0; it < options.max_iter; ++it) {
    const Vector grad = problem.gradient(res.beta, lambda);
    const Matrix hl = problem.loglik_hessian(res.beta);
    const Matrix neg_hl = -hl;
    const double scale = 1.0 + neg_hl.diagonal().cwiseAbs().maxCoeff();
    Eigen::LLT<Matrix> chol(neg_hl + 1e-10 * scale * Matrix::Identity(p, p));
    if (chol.info() != Eigen::Success) res.hessian_nsd = false;

    const Matrix neg_h = neg_hl + pen2 + 1e-12 * scale * Matrix::Identity(p, p);
    const Vector step = neg_h.ldlt().solve(grad);
    const double decrement = grad.dot(step);
    if (!(decrement > 2.0 * options.tol)) {
      res.converged = std::isfinite(decrement) || grad.norm() == 0.0;
      return res;
    }
    double alpha = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      const Vector trial = res.beta + alpha * step;
      const double ft = problem.objective(trial, lambda);
      if (ft >= f + 1e-4 * alpha * decrement) {
        res.beta = trial;
        f = ft;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      res.converged = decrement < 1e-6;
      return res;
    }
    res.objective.push_back(f);
    if (!res.beta.allFinite() || res.beta.lpNorm<Eigen::Infinity>() > 1e8) return res;
  }
  return res;
}

ProfileEvaluation sieve_profile(const ParameterPoint& theta, const PartlyLinearDataset& data,
                                const SieveOptions& options, SieveTrace* trace) {
  if (theta.size() != 1) throw DomainError("sieve_profile: theta must be scalar");
  if (!(options.M > 0.0) || !(options.tol > 0.0) || options.max_iter < 1)
    throw DomainError("sieve_profile: invalid options");
  const SieveProblem problem(theta[0], data, options);
  const Eigen::Index p = problem.dim();

  auto feasible = [&](const NewtonResult& r, double& j2, double& sup) {
    if (!r.converged) return false;
    const SplineCurve k = problem.curve(r.beta);
    j2 = k.j2();
    sup = k.sup_norm(1000);
    return j2 + sup <= options.M;
  };
  auto solve = [&](double lambda, const Vector& start) {
    NewtonResult r = sieve_newton(problem, lambda, start, options);
    if (trace) {
      trace->lambdas.push_back(lambda);
      trace->solves.push_back(r);
    }
    return r;
  };

  double j2 = 0.0, sup = 0.0;
  double lambda = 0.0;
  NewtonResult best = solve(0.0, Vector::Zero(p));
  if (!feasible(best, j2, sup)) {
    double lo = 0.0;
    double hi = 1e-4;
    NewtonResult at_hi = solve(hi, best.converged ? best.beta : Vector::Zero(p));
    while (!feasible(at_hi, j2, sup)) {
      lo = hi;
      hi *= 10.0;
      // k = 0 is always feasible, and the penalized optimum tends to it as lambda grows.
      assert(hi < 1e30);
      if (hi > 1e30) throw ConvergenceError("sieve_profile: penalty path failed to reach feasibility");
      at_hi = solve(hi, at_hi.beta);
    }
    if (lo == 0.0) lo = hi * 1e-8;
    for (int it = 0; it < 60 && hi > lo * (1.0 + 1e-7); ++it) {
      const double mid = std::sqrt(lo * hi);
      NewtonResult r = solve(mid, at_hi.beta);
      double j2m, supm;
      if (feasible(r, j2m, supm)) {
        hi = mid;
        at_hi = std::move(r);
      } else {
        lo = mid;
      }
    }
    best = std::move(at_hi);
    lambda = hi;
    feasible(best, j2, sup);
  }
  if (trace) {
    trace->final_lambda = lambda;
    trace->j2 = j2;
    trace->sup = sup;
  }
  ProfileEvaluation out;
  out.log_pl = problem.loglik(best.beta);
  out.nuisance = problem.curve(best.beta);
  return out;
}

PartlyLinearDataset generate_partly_linear(std::size_t n, const ParameterPoint& theta0,
                                           const std::function<double(double)>& k0, double lc,
                                           double uc, std::uint64_t seed) {
  if (n < 1) throw DomainError("generate_partly_linear: n must be >= 1");
  if (!(lc < uc)) throw DomainError("generate_partly_linear: need lc < uc");
  if (theta0.size() != 1) throw DomainError("generate_partly_linear: theta0 must be scalar");
  Rng rng(seed);
  std::vector<PartlyLinearObservation> obs(n);
  for (auto& o : obs) {
    o.w = rng.uniform();
    o.z = rng.uniform();
    const double y = theta0[0] * o.w + k0(o.z) + rng.normal();
    o.c = rng.uniform(lc, uc);
    o.delta = y <= o.c ? 1 : 0;
  }
  return PartlyLinearDataset(std::move(obs));
}

}  // namespace profile_sampler
