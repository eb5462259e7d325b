#include "profile_sampler/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include "profile_sampler/format.hpp"
#include "profile_sampler/rng.hpp"

namespace profile_sampler {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Non-finite values rank below every finite one.
double rankable(double v) { return std::isnan(v) ? -kInf : v; }

ParameterPoint golden_section(const LogPl& f, double lo, double hi, double tol) {
  constexpr int kGrid = 21;
  std::vector<double> xs(kGrid), fs(kGrid);
  int best = -1;
  for (int i = 0; i < kGrid; ++i) {
    xs[i] = lo + (hi - lo) * i / (kGrid - 1);
    fs[i] = rankable(f(ParameterPoint::scalar(xs[i])));
    if (std::isfinite(fs[i]) && (best < 0 || fs[i] > fs[best])) best = i;
  }
  if (best < 0) throw BracketError("mle_maximize: no finite log_pl evaluation in the bracket");

  double a = xs[std::max(best - 1, 0)];
  double b = xs[std::min(best + 1, kGrid - 1)];
  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - ratio * (b - a);
  double x2 = a + ratio * (b - a);
  double f1 = rankable(f(ParameterPoint::scalar(x1)));
  double f2 = rankable(f(ParameterPoint::scalar(x2)));
  while (b - a > tol) {
    if (f1 >= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - ratio * (b - a);
      f1 = rankable(f(ParameterPoint::scalar(x1)));
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + ratio * (b - a);
      f2 = rankable(f(ParameterPoint::scalar(x2)));
    }
  }
  double x_best = f1 >= f2 ? x1 : x2;
  double f_best = std::max(f1, f2);
  if (f_best < fs[best]) {
    x_best = xs[best];
    f_best = fs[best];
  }

  // Parabolic step through the final bracket ends and the best interior point.
  const double fa = rankable(f(ParameterPoint::scalar(a)));
  const double fb = rankable(f(ParameterPoint::scalar(b)));
  if (std::isfinite(fa) && std::isfinite(fb) && a < x_best && x_best < b) {
    const double p = (x_best - a) * (x_best - a) * (f_best - fb) -
                     (x_best - b) * (x_best - b) * (f_best - fa);
    const double q = (x_best - a) * (f_best - fb) - (x_best - b) * (f_best - fa);
    if (q != 0.0) {
      const double vertex = x_best - 0.5 * p / q;
      if (vertex > a && vertex < b) {
        const double fv = rankable(f(ParameterPoint::scalar(vertex)));
        if (fv > f_best) x_best = vertex;
      }
    }
  }
  return ParameterPoint::scalar(x_best);
}

ParameterPoint nelder_mead(const LogPl& f, const Vector& lo, const Vector& hi, double tol) {
  const Eigen::Index d = lo.size();
  auto cost = [&](const Vector& x) { return -rankable(f(ParameterPoint(x))); };
  std::vector<Vector> simplex(static_cast<std::size_t>(d + 1));
  std::vector<double> values(static_cast<std::size_t>(d + 1));
  const Vector center = 0.5 * (lo + hi);
  simplex[0] = center;
  for (Eigen::Index k = 0; k < d; ++k) {
    simplex[static_cast<std::size_t>(k + 1)] = center;
    simplex[static_cast<std::size_t>(k + 1)][k] += 0.25 * (hi[k] - lo[k]);
  }
  bool any_finite = false;
  for (std::size_t i = 0; i < simplex.size(); ++i) {
    values[i] = cost(simplex[i]);
    any_finite = any_finite || std::isfinite(values[i]);
  }
  if (!any_finite) throw BracketError("mle_maximize: no finite log_pl evaluation in the simplex");

  const std::size_t max_iter = 5000 * static_cast<std::size_t>(d);
  std::vector<std::size_t> idx(simplex.size());
  for (std::size_t it = 0; it < max_iter; ++it) {
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const Vector& best = simplex[idx.front()];
    double diameter = 0.0;
    for (const auto& v : simplex) diameter = std::max(diameter, (v - best).norm());
    if (diameter <= tol) break;

    const std::size_t worst = idx.back();
    const std::size_t second = idx[idx.size() - 2];
    Vector centroid = Vector::Zero(d);
    for (std::size_t i = 0; i + 1 < idx.size(); ++i) centroid += simplex[idx[i]];
    centroid /= static_cast<double>(d);

    const Vector reflected = centroid + (centroid - simplex[worst]);
    const double fr = cost(reflected);
    if (fr < values[idx.front()]) {
      const Vector expanded = centroid + 2.0 * (centroid - simplex[worst]);
      const double fe = cost(expanded);
      if (fe < fr) {
        simplex[worst] = expanded;
        values[worst] = fe;
      } else {
        simplex[worst] = reflected;
        values[worst] = fr;
      }
      continue;
    }
    if (fr < values[second]) {
      simplex[worst] = reflected;
      values[worst] = fr;
      continue;
    }
    const bool outside = fr < values[worst];
    const Vector contracted = outside ? Vector(centroid + 0.5 * (reflected - centroid))
                                      : Vector(centroid + 0.5 * (simplex[worst] - centroid));
    const double fc = cost(contracted);
    if (fc < (outside ? fr : values[worst])) {
      simplex[worst] = contracted;
      values[worst] = fc;
      continue;
    }
    for (std::size_t i = 1; i < idx.size(); ++i) {
      auto& v = simplex[idx[i]];
      v = best + 0.5 * (v - best);
      values[idx[i]] = cost(v);
    }
  }
  const auto best_it = std::min_element(values.begin(), values.end());
  return ParameterPoint(simplex[static_cast<std::size_t>(best_it - values.begin())]);
}

double eval_finite(const LogPl& f, const ParameterPoint& theta) {
  const double v = f(theta);
  if (!std::isfinite(v)) {
    std::string where;
    for (std::size_t i = 0; i < theta.size(); ++i)
      where += (i ? ";" : "") + format_double(theta[i]);
    throw EstimateError("non-finite log profile likelihood at theta=" + where);
  }
  return v;
}

bool is_positive_definite(const Matrix& m) {
  Eigen::LLT<Matrix> llt(m);
  return llt.info() == Eigen::Success;
}

}  // namespace

SearchBox SearchBox::around(const ParameterPoint& center, double half_width) {
  const Vector c = center.values();
  return {c.array() - half_width, c.array() + half_width};
}

ParameterPoint mle_maximize(const LogPl& log_pl, const SearchBox& box, double tol) {
  if (box.lo.size() != box.hi.size() || box.lo.size() == 0)
    throw DomainError("mle_maximize: malformed search box");
  if (!((box.hi - box.lo).array() > 0.0).all()) throw DomainError("mle_maximize: empty search box");
  if (!(tol > 0.0)) throw DomainError("mle_maximize: tol must be positive");
  if (box.lo.size() == 1) return golden_section(log_pl, box.lo[0], box.hi[0], tol);
  return nelder_mead(log_pl, box.lo, box.hi, tol);
}

double info_directional(const LogPl& log_pl, const ParameterPoint& theta_hat, const Vector& v,
                        double s, std::size_t n) {
  if (!(s > 0.0)) throw DomainError("info_directional: step must be positive");
  if (n < 1) throw DomainError("info_directional: n must be >= 1");
  if (static_cast<std::size_t>(v.size()) != theta_hat.size())
    throw DomainError("info_directional: direction dimension mismatch");
  const double f0 = eval_finite(log_pl, theta_hat);
  const double f1 = eval_finite(log_pl, ParameterPoint(theta_hat.values() + s * v));
  return -2.0 * (f1 - f0) / (static_cast<double>(n) * s * s);
}

InfoEstimate info_matrix(const LogPl& log_pl, const ParameterPoint& theta_hat, double s,
                         std::size_t n) {
  if (!(s > 0.0)) throw DomainError("info_matrix: step must be positive");
  if (n < 1) throw DomainError("info_matrix: n must be >= 1");
  const auto d = static_cast<Eigen::Index>(theta_hat.size());
  if (d < 1) throw DomainError("info_matrix: empty parameter");
  const Vector& t = theta_hat.values();
  const double f0 = eval_finite(log_pl, theta_hat);
  Vector fi(d);
  for (Eigen::Index i = 0; i < d; ++i)
    fi[i] = eval_finite(log_pl, ParameterPoint(t + s * Vector::Unit(d, i)));
  const double denom = static_cast<double>(n) * s * s;
  InfoEstimate out;
  out.matrix.resize(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = i; j < d; ++j) {
      const double fij =
          eval_finite(log_pl, ParameterPoint(t + s * Vector::Unit(d, i) + s * Vector::Unit(d, j)));
      const double value = -(fij + f0 - fi[i] - fi[j]) / denom;
      out.matrix(i, j) = value;
      out.matrix(j, i) = value;
    }
  }
  out.step = s;
  out.method = InfoEstimate::Method::numeric;
  out.positive_definite = is_positive_definite(out.matrix);
  return out;
}

ParameterPoint posterior_mean(const Chain& chain) {
  if (chain.size() == 0) throw DomainError("posterior_mean: empty chain");
  Vector acc = Vector::Zero(static_cast<Eigen::Index>(chain.dimension()));
  for (const auto& s : chain.samples) acc += s.values();
  return ParameterPoint(acc / static_cast<double>(chain.size()));
}

Matrix posterior_covariance(const Chain& chain) {
  if (chain.size() < 2) throw DegeneracyError("posterior covariance needs at least two draws");
  const Vector mean = posterior_mean(chain).values();
  const auto d = mean.size();
  Matrix cov = Matrix::Zero(d, d);
  for (const auto& s : chain.samples) {
    const Vector c = s.values() - mean;
    cov.noalias() += c * c.transpose();
  }
  return cov / static_cast<double>(chain.size() - 1);
}

Vector posterior_sd(const Chain& chain) {
  return posterior_covariance(chain).diagonal().cwiseSqrt();
}

InfoEstimate posterior_info(const Chain& chain, std::size_t n) {
  if (n < 1) throw DomainError("posterior_info: n must be >= 1");
  const Matrix cov = posterior_covariance(chain);
  Eigen::LDLT<Matrix> ldlt(static_cast<double>(n) * cov);
  const double scale = cov.diagonal().cwiseAbs().maxCoeff();
  if (!(scale > 0.0) || ldlt.info() != Eigen::Success ||
      !(ldlt.vectorD().array() > 1e-12 * static_cast<double>(n) * scale).all())
    throw DegeneracyError("posterior_info: chain covariance is singular");
  InfoEstimate out;
  const auto d = cov.rows();
  out.matrix = ldlt.solve(Matrix::Identity(d, d));
  out.matrix = 0.5 * (out.matrix + out.matrix.transpose()).eval();
  out.method = InfoEstimate::Method::mcmc;
  out.step = 0.0;
  out.positive_definite = is_positive_definite(out.matrix);
  return out;
}

double empirical_quantile(std::vector<double> values, double alpha) {
  if (values.empty()) throw DomainError("quantile of an empty sample");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("quantile level outside [0, 1]");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * alpha;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= values.size()) return values.back();
  return values[lo] + (h - static_cast<double>(lo)) * (values[lo + 1] - values[lo]);
}

double credible_quantile(const Chain& chain, double alpha, std::size_t coord) {
  if (chain.size() == 0) throw DomainError("credible_quantile: empty chain");
  if (coord >= chain.dimension()) throw DomainError("credible_quantile: coordinate out of range");
  return empirical_quantile(chain.coordinate(coord), alpha);
}

std::string to_string(IntervalEstimate::Method m) {
  switch (m) {
    case IntervalEstimate::Method::wald_numeric: return "wald_numeric";
    case IntervalEstimate::Method::wald_mcmc: return "wald_mcmc";
    case IntervalEstimate::Method::quantile: return "quantile";
    case IntervalEstimate::Method::plr: return "plr";
  }
  return "unknown";
}

double normal_quantile(double p) {
  if (p == 0.5) return 0.0;
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

double chi_squared_quantile(double p, double dof) {
  if (p == 0.0) return 0.0;
  return boost::math::quantile(boost::math::chi_squared_distribution<double>(dof), p);
}

std::vector<IntervalEstimate> wald_interval(const ParameterPoint& theta_hat,
                                            const InfoEstimate& info, std::size_t n,
                                            double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("wald_interval: alpha must lie in (0, 1]");
  if (n < 1) throw DomainError("wald_interval: n must be >= 1");
  if (static_cast<std::size_t>(info.matrix.rows()) != theta_hat.size())
    throw DomainError("wald_interval: information dimension mismatch");
  const double z = normal_quantile(1.0 - 0.5 * alpha);
  std::vector<IntervalEstimate> out;
  for (std::size_t i = 0; i < theta_hat.size(); ++i) {
    const double ii = info.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
    if (!(ii > 0.0) || !std::isfinite(ii))
      throw DegeneracyError("wald_interval: nonpositive information diagonal");
    const double half = z / std::sqrt(static_cast<double>(n) * ii);
    IntervalEstimate e;
    e.lower = theta_hat[i] - half;
    e.upper = theta_hat[i] + half;
    e.level = 1.0 - alpha;
    e.method = info.method == InfoEstimate::Method::numeric ? IntervalEstimate::Method::wald_numeric
                                                             : IntervalEstimate::Method::wald_mcmc;
    e.coord = i;
    out.push_back(e);
  }
  return out;
}

std::vector<double> plr_samples(const Chain& chain, double log_pl_max) {
  std::vector<double> out(chain.log_pl_values.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double diff = log_pl_max - chain.log_pl_values[i];
    if (diff < -1e-9)
      throw EstimateError("plr_samples: chain log_pl exceeds the supplied maximum (stale MLE)");
    out[i] = 2.0 * std::max(diff, 0.0);
  }
  return out;
}

double plr_threshold(const std::vector<double>& plr_values, double alpha) {
  if (plr_values.empty()) throw DomainError("plr_threshold: no PLR values");
  return empirical_quantile(plr_values, alpha);
}

IntervalEstimate plr_interval(const LogPl& log_pl, const ParameterPoint& theta_hat, double chi,
                              int expand_limit, double initial_step, double level) {
  if (theta_hat.size() != 1) throw DomainError("plr_interval: scalar theta only");
  if (!(chi >= 0.0)) throw DomainError("plr_interval: chi must be nonnegative");
  if (!(initial_step > 0.0)) throw DomainError("plr_interval: initial step must be positive");
  const double center = theta_hat[0];
  const double f0 = log_pl(theta_hat);
  if (!std::isfinite(f0)) throw EstimateError("plr_interval: log_pl not finite at theta_hat");
  IntervalEstimate out;
  out.level = level;
  out.method = IntervalEstimate::Method::plr;
  if (chi == 0.0) {
    out.lower = out.upper = center;
    return out;
  }
  auto plr = [&](double x) {
    const double v = log_pl(ParameterPoint::scalar(x));
    return std::isfinite(v) ? 2.0 * (f0 - v) : kInf;
  };
  auto crossing = [&](double dir) {
    double inner = center;
    double step = initial_step * std::max(1.0, std::abs(center));
    double outer = center + dir * step;
    bool crossed = false;
    for (int k = 0; k <= expand_limit; ++k) {
      outer = center + dir * step;
      if (plr(outer) > chi) {
        crossed = true;
        break;
      }
      inner = outer;
      step *= 2.0;
    }
    if (!crossed)
      throw BracketError(std::string("plr_interval: no crossing on the ") +
                         (dir < 0 ? "left" : "right") + " within the expansion limit");
    while (std::abs(outer - inner) > 1e-8) {
      const double mid = 0.5 * (inner + outer);
      if (plr(mid) > chi)
        outer = mid;
      else
        inner = mid;
    }
    return 0.5 * (inner + outer);
  };
  out.lower = crossing(-1.0);
  out.upper = crossing(1.0);
  return out;
}

std::optional<IntervalEstimate> InferenceReport::interval(IntervalEstimate::Method m,
                                                          std::size_t coord) const {
  for (const auto& e : intervals)
    if (e.method == m && e.coord == coord) return e;
  return std::nullopt;
}

InferenceReport build_report(const ProfileModel& model, const ReportConfig& cfg) {
  InferenceReport rep;
  rep.model = model.id();
  rep.n = model.sample_size();
  rep.d = model.dimension();
  const auto d = static_cast<Eigen::Index>(rep.d);

  auto stage = [](const char* name, auto&& body) {
    try {
      return body();
    } catch (const StageError&) {
      throw;
    } catch (const std::exception& e) {
      throw StageError(name, e.what());
    }
  };

  const RateSpec rate = stage("config", [&] {
    if (!(cfg.burn_in < cfg.chain_total)) throw DomainError("burn_in must be < chain_total");
    return cfg.rate_r ? RateSpec(*cfg.rate_r) : model.rate();
  });
  rep.rate_r = rate.r();
  rep.m_n = m_n(static_cast<long>(rep.n), rate.r());
  rep.step = step_size(static_cast<long>(rep.n), rate, cfg.step_constant);

  const LogPl f = [&model](const ParameterPoint& t) { return model.log_pl(t); };
  const LogTarget target = [&model, &cfg](const ParameterPoint& t) {
    return TargetValue{model.log_pl(t), prior_log_density(cfg.prior, t)};
  };

  const SearchBox box = SearchBox::around(ParameterPoint(Vector::Zero(d)), cfg.search_half_width);
  rep.mle_direct = stage("mle", [&] { return mle_maximize(f, box, cfg.mle_tol); });

  // Preliminary numeric information at the direct MLE seeds the proposal scale.
  Vector sd0 = Vector::Ones(d);
  try {
    const InfoEstimate pre = info_matrix(f, rep.mle_direct, rep.step, rep.n);
    for (Eigen::Index k = 0; k < d; ++k) {
      const double ii = pre.matrix(k, k);
      if (ii > 0.0 && std::isfinite(ii)) sd0[k] = 2.4 / std::sqrt(static_cast<double>(rep.n) * ii);
    }
  } catch (const std::runtime_error&) {
  }

  rep.tuning = stage("tune", [&] {
    return tune_proposal(target, rep.mle_direct, derive_seed(cfg.seed, 1, 0), sd0, cfg.tuning);
  });
  if (rep.tuning.warning) rep.flags.push_back("tuning_cap_reached");

  const Chain chain = stage("chain", [&] {
    return metropolis_run(target, rep.mle_direct, rep.tuning.sd, cfg.chain_total, cfg.burn_in,
                          derive_seed(cfg.seed, 2, 0));
  });

  stage("mle_refine", [&] {
    const auto top = std::max_element(chain.log_pl_values.begin(), chain.log_pl_values.end());
    const double chain_max = *top;
    rep.mle_chain = chain.samples[static_cast<std::size_t>(top - chain.log_pl_values.begin())];
    rep.mle = rep.mle_direct;
    double best = f(rep.mle);
    if (chain_max > best) {
      const Vector width = (4.0 * rep.tuning.sd.array()).max(1e-6);
      const SearchBox local{rep.mle_chain.values() - width, rep.mle_chain.values() + width};
      const ParameterPoint refined = mle_maximize(f, local, cfg.mle_tol);
      const double fr = f(refined);
      if (fr >= chain_max) {
        rep.mle = refined;
        best = fr;
      } else {
        rep.mle = rep.mle_chain;
        best = chain_max;
      }
    }
    rep.log_pl_max = std::max(best, chain_max);
    return 0;
  });

  rep.cm = posterior_mean(chain);
  rep.se_m = Vector::Constant(d, kNaN);
  rep.se_n = Vector::Constant(d, kNaN);
  if (chain.size() >= 2) rep.se_m = posterior_sd(chain);
  if (chain.size() >= 10) {
    rep.chain_meta = chain_diagnostics(chain);
    if (rep.chain_meta.degenerate) rep.flags.push_back("chain_degenerate");
  } else {
    rep.flags.push_back("chain_too_short_for_diagnostics");
    rep.chain_meta.acceptance_rate = chain.acceptance_rate;
  }

  try {
    rep.info_numeric = info_matrix(f, rep.mle, rep.step, rep.n);
    for (Eigen::Index k = 0; k < d; ++k) {
      const double ii = rep.info_numeric.matrix(k, k);
      rep.se_n[k] = ii > 0.0 ? 1.0 / std::sqrt(static_cast<double>(rep.n) * ii) : kNaN;
    }
    for (const auto& e : wald_interval(rep.mle, rep.info_numeric, rep.n, cfg.alpha))
      rep.intervals.push_back(e);
  } catch (const EstimateError& e) {
    rep.flags.push_back("info_numeric_failed");
  } catch (const DegeneracyError&) {
    rep.flags.push_back("info_numeric_nonpositive");
  }

  try {
    rep.info_mcmc = posterior_info(chain, rep.n);
    for (const auto& e : wald_interval(rep.cm, *rep.info_mcmc, rep.n, cfg.alpha))
      rep.intervals.push_back(e);
  } catch (const DegeneracyError&) {
    rep.flags.push_back("info_mcmc_degenerate");
  }

  for (std::size_t k = 0; k < rep.d; ++k) {
    IntervalEstimate q;
    q.method = IntervalEstimate::Method::quantile;
    q.level = 1.0 - cfg.alpha;
    q.coord = k;
    if (cfg.mcmc_interval_from_quantiles) {
      q.lower = credible_quantile(chain, 0.5 * cfg.alpha, k);
      q.upper = credible_quantile(chain, 1.0 - 0.5 * cfg.alpha, k);
    } else {
      const double z = normal_quantile(1.0 - 0.5 * cfg.alpha);
      const auto kk = static_cast<Eigen::Index>(k);
      q.lower = rep.cm[k] - z * rep.se_m[kk];
      q.upper = rep.cm[k] + z * rep.se_m[kk];
    }
    rep.intervals.push_back(q);
  }

  stage("plr", [&] {
    rep.chi_b = plr_threshold(plr_samples(chain, rep.log_pl_max), 1.0 - cfg.alpha);
    rep.chi_squared = chi_squared_quantile(1.0 - cfg.alpha, static_cast<double>(rep.d));
    return 0;
  });
  if (rep.d == 1) {
    try {
      const double chi = cfg.plr_at_chi_squared ? rep.chi_squared : rep.chi_b;
      const double init = std::isfinite(rep.se_m[0]) && rep.se_m[0] > 0.0 ? 0.1 * rep.se_m[0] : 1e-3;
      rep.intervals.push_back(plr_interval(f, rep.mle, chi, 60, init, 1.0 - cfg.alpha));
    } catch (const BracketError&) {
      rep.flags.push_back("plr_interval_unbounded");
    } catch (const EstimateError&) {
      rep.flags.push_back("plr_interval_failed");
    }
  }
  return rep;
}

void write_report(std::ostream& os, const InferenceReport& r) {
  auto vec = [](const Vector& v) {
    std::string s;
    for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? ";" : "") + format_double(v[i]);
    return s;
  };
  auto point = [&](const ParameterPoint& p) { return vec(p.values()); };
  auto mat = [&](const Matrix& m) {
    std::string s;
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j)
        s += ((i || j) ? ";" : "") + format_double(m(i, j));
    return s;
  };
  auto bounds = [&](IntervalEstimate::Method m, bool upper) {
    std::string s;
    for (std::size_t k = 0; k < r.d; ++k) {
      const auto e = r.interval(m, k);
      const double v = e ? (upper ? e->upper : e->lower) : kNaN;
      s += (k ? ";" : "") + format_double(v);
    }
    return s;
  };
  using M = IntervalEstimate::Method;
  os << "model=" << r.model << '\n';
  os << "n=" << r.n << '\n';
  os << "d=" << r.d << '\n';
  os << "status=" << (r.success() ? "success" : "degenerate") << '\n';
  os << "mle=" << point(r.mle) << '\n';
  os << "mle_direct=" << point(r.mle_direct) << '\n';
  os << "mle_chain=" << point(r.mle_chain) << '\n';
  os << "log_pl_max=" << format_double(r.log_pl_max) << '\n';
  os << "cm=" << point(r.cm) << '\n';
  os << "se_m=" << vec(r.se_m) << '\n';
  os << "se_n=" << vec(r.se_n) << '\n';
  os << "l_m=" << bounds(M::quantile, false) << '\n';
  os << "u_m=" << bounds(M::quantile, true) << '\n';
  os << "l_n=" << bounds(M::wald_numeric, false) << '\n';
  os << "u_n=" << bounds(M::wald_numeric, true) << '\n';
  os << "wald_mcmc_lo=" << bounds(M::wald_mcmc, false) << '\n';
  os << "wald_mcmc_hi=" << bounds(M::wald_mcmc, true) << '\n';
  os << "plr_lo=" << bounds(M::plr, false) << '\n';
  os << "plr_hi=" << bounds(M::plr, true) << '\n';
  os << "chi_b=" << format_double(r.chi_b) << '\n';
  os << "chi_squared=" << format_double(r.chi_squared) << '\n';
  os << "rate_r=" << format_double(r.rate_r) << '\n';
  os << "m_n=" << format_double(r.m_n) << '\n';
  os << "step=" << format_double(r.step) << '\n';
  os << "info_numeric=" << mat(r.info_numeric.matrix) << '\n';
  os << "info_mcmc=" << (r.info_mcmc ? mat(r.info_mcmc->matrix) : std::string("nan")) << '\n';
  os << "accept_rate=" << format_double(r.chain_meta.acceptance_rate) << '\n';
  os << "autocorrelation_time=" << vec(r.chain_meta.autocorrelation_time) << '\n';
  os << "split_half_discrepancy=" << vec(r.chain_meta.split_half_discrepancy) << '\n';
  os << "proposal_sd=" << vec(r.tuning.sd) << '\n';
  os << "tuning_rounds=" << r.tuning.rounds << '\n';
  os << "tuning_protocol=" << r.tuning.protocol << '\n';
  std::string flags;
  for (std::size_t i = 0; i < r.flags.size(); ++i) flags += (i ? ";" : "") + r.flags[i];
  os << "flags=" << flags << '\n';
}

}  // namespace profile_sampler
