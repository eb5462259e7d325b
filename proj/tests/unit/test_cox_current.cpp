#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "profile_sampler/cox_current.hpp"
#include "profile_sampler/cox_right.hpp"

using namespace profile_sampler;

namespace {

std::vector<double> pava_v(std::vector<double> v, std::vector<double> w) { return pava(v, w); }

CoxDataset random_current(std::mt19937_64& gen, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<CoxObservation> obs;
  for (std::size_t i = 0; i < n; ++i) obs.push_back({3.0 * u(gen), u(gen) < 0.6, {u(gen)}});
  return CoxDataset(std::move(obs));
}

}  // namespace

TEST_CASE("pava examples") {
  CHECK(pava_v({1, 2, 3}, {1, 1, 1}) == std::vector<double>{1, 2, 3});
  CHECK(pava_v({3, 1, 2}, {1, 1, 1}) == std::vector<double>{2, 2, 2});
  CHECK(pava_v({5, 1}, {1, 3}) == std::vector<double>{2, 2});
  CHECK_THROWS_AS(pava_v({}, {}), DomainError);
  CHECK_THROWS_AS(pava_v({1, 2}, {1, 0}), DomainError);
  CHECK_THROWS_AS(pava_v({1, 2}, {1}), DomainError);
}

TEST_CASE("pava agrees with block enumeration and keeps its invariants") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> val(-5.0, 5.0), wt(0.1, 4.0);
  std::uniform_int_distribution<int> len(1, 8);
  for (int rep = 0; rep < 500; ++rep) {
    const int n = len(gen);
    std::vector<double> v(n), w(n);
    for (int i = 0; i < n; ++i) {
      v[i] = val(gen);
      w[i] = wt(gen);
    }
    const auto out = pava_v(v, w);
    const auto ref = oracle::isotonic_brute_force(v, w);
    for (int i = 0; i < n; ++i) CHECK(std::abs(out[i] - ref[i]) <= 1e-10);
    CHECK(std::is_sorted(out.begin(), out.end()));
    double a = 0.0, b = 0.0;
    for (int i = 0; i < n; ++i) {
      a += w[i] * out[i];
      b += w[i] * v[i];
    }
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
    CHECK(pava_v(out, w) == out);
  }
}

TEST_CASE("icm corner cases") {
  const CoxDataset zeros({{1.0, 0, {0.2}}, {2.0, 0, {0.7}}, {3.0, 0, {0.1}}});
  IsotonicSolution sol;
  const auto ev = icm_profile(ParameterPoint{0.5}, zeros, {}, nullptr, &sol);
  CHECK(ev.log_pl == 0.0);
  for (double x : sol.x) CHECK(x == 0.0);

  const CoxDataset ones({{1.0, 1, {0.2}}, {2.0, 1, {0.7}}, {3.0, 1, {0.1}}});
  const IcmOptions opts;
  const auto ev1 = icm_profile(ParameterPoint{0.5}, ones, opts, nullptr, &sol);
  double expect = 0.0;
  for (const auto& o : ones) expect += std::log(-std::expm1(-opts.lambda_max * std::exp(0.5 * o.z[0])));
  CHECK(ev1.log_pl == doctest::Approx(expect).epsilon(1e-12));
  for (double x : sol.x) CHECK(x == opts.lambda_max);
}

TEST_CASE("icm matches the monotone grid on the three-observation example") {
  const CoxDataset d({{1.0, 1, {0.2}}, {2.0, 0, {0.8}}, {3.0, 1, {0.4}}});
  IsotonicSolution sol;
  const double ll = icm_profile(ParameterPoint{0.5}, d, {}, nullptr, &sol).log_pl;
  std::vector<double> ref_x;
  const double ref = oracle::icm_grid_oracle(0.5, d, IcmOptions{}.lambda_max, &ref_x);
  CHECK(std::abs(ll - ref) <= 1e-5);
  CHECK(ll >= ref - 1e-12);
}

TEST_CASE("icm matches the grid oracle on random tiny instances") {
  std::mt19937_64 gen(17);
  for (int rep = 0; rep < 12; ++rep) {
    const CoxDataset d = random_current(gen, 1 + rep % 4);
    const double theta = -1.5 + 0.25 * rep;
    const double ll = icm_profile(ParameterPoint{theta}, d).log_pl;
    const double ref = oracle::icm_grid_oracle(theta, d, IcmOptions{}.lambda_max);
    CHECK(std::abs(ll - ref) <= 1e-5);
  }
}

TEST_CASE("icm output is feasible, optimal and its objective trace increases") {
  std::mt19937_64 gen(23);
  for (int rep = 0; rep < 5; ++rep) {
    const CoxDataset d = random_current(gen, 80);
    IcmTrace trace;
    IsotonicSolution sol;
    const IcmOptions opts;
    const ParameterPoint theta{0.8};
    const auto ev = icm_profile(theta, d, opts, &trace, &sol);
    CHECK(std::is_sorted(sol.x.begin(), sol.x.end()));
    CHECK(sol.x.front() >= 0.0);
    CHECK(sol.x.back() <= opts.lambda_max);
    for (std::size_t k = 1; k < trace.objective.size(); ++k)
      CHECK(trace.objective[k] >= trace.objective[k - 1]);
    const CurrentStatusObjective obj(theta, d);
    CHECK(icm_residual(obj, sol.x, opts.lambda_max) <= opts.tol);
    CHECK(obj.value(sol.x) == ev.log_pl);
    // Step function reproduces x at the sorted examination times.
    const auto& f = std::get<MonotoneStepFunction>(ev.nuisance);
    for (std::size_t i = 0; i < sol.x.size(); ++i) CHECK(f(d[sol.order[i]].y) == sol.x[i]);
    // Feasible perturbations do not improve the objective.
    std::vector<double> up = sol.x, down = sol.x;
    for (auto& v : up) v = std::min(opts.lambda_max, v * (1 + 1e-4));
    for (auto& v : down) v *= 1 - 1e-4;
    CHECK(obj.value(up) <= ev.log_pl + 1e-9);
    CHECK(obj.value(down) <= ev.log_pl + 1e-9);
  }
}

TEST_CASE("current-status objective is concave along random directions") {
  std::mt19937_64 gen(31);
  std::uniform_real_distribution<double> u(0.05, 2.0);
  const CoxDataset d = random_current(gen, 20);
  const CurrentStatusObjective obj(ParameterPoint{0.3}, d);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> a(20), b(20), m(20);
    for (int i = 0; i < 20; ++i) {
      a[i] = u(gen);
      b[i] = u(gen);
      m[i] = 0.5 * (a[i] + b[i]);
    }
    CHECK(obj.value(m) >= 0.5 * (obj.value(a) + obj.value(b)) - 1e-12);
  }
}

TEST_CASE("current-status gradient matches finite differences") {
  std::mt19937_64 gen(37);
  std::uniform_real_distribution<double> u(0.1, 2.0);
  const CoxDataset d = random_current(gen, 10);
  const CurrentStatusObjective obj(ParameterPoint{0.6}, d);
  std::vector<double> x(10), g(10), c(10);
  for (auto& v : x) v = u(gen);
  obj.derivatives(x, g, c);
  for (int i = 0; i < 10; ++i) {
    auto xp = x, xm = x;
    xp[i] += 1e-6;
    xm[i] -= 1e-6;
    CHECK(g[i] == doctest::Approx((obj.value(xp) - obj.value(xm)) / 2e-6).epsilon(1e-6));
    CHECK(c[i] >= 0.0);
  }
}

TEST_CASE("icm handles tied examination times") {
  const CoxDataset d({{1.0, 1, {0.2}}, {1.0, 0, {0.5}}, {2.0, 1, {0.9}}, {2.0, 1, {0.1}}});
  IsotonicSolution sol;
  const auto ev = icm_profile(ParameterPoint{0.4}, d, {}, nullptr, &sol);
  CHECK(std::isfinite(ev.log_pl));
  CHECK(sol.order == std::vector<std::size_t>{0, 1, 2, 3});
  CHECK(std::abs(ev.log_pl - oracle::icm_grid_oracle(0.4, d, 20.0)) <= 1e-5);
}

TEST_CASE("icm non-convergence carries the best iterate") {
  std::mt19937_64 gen(41);
  const CoxDataset d = random_current(gen, 60);
  IcmOptions opts;
  opts.max_iter = 1;
  opts.tol = 1e-14;
  try {
    icm_profile(ParameterPoint{0.5}, d, opts);
    FAIL("expected non-convergence");
  } catch (const IcmNonConvergence& e) {
    CHECK(std::isfinite(e.best().log_pl));
  }
}

TEST_CASE("current-status generator") {
  const auto a = generate_current_status(30, ParameterPoint{1.0}, 3.0, 9);
  const auto b = generate_current_status(30, ParameterPoint{1.0}, 3.0, 9);
  for (std::size_t i = 0; i < 30; ++i) {
    CHECK(a[i].y == b[i].y);
    CHECK(a[i].delta == b[i].delta);
  }
  for (const auto& o : generate_current_status(100, ParameterPoint{1.0}, 1e-12, 2)) CHECK(o.delta == 0);
  const double tn = calibrate_tn(ParameterPoint{1.0}, 0.9, 97, 1000000);
  const auto big = generate_current_status(20000, ParameterPoint{1.0}, tn, 4);
  double frac = 0.0;
  for (const auto& o : big) frac += o.delta;
  CHECK(frac / 20000 == doctest::Approx(0.9).epsilon(0.01));
}

TEST_CASE("icm converges across a wide range of theta") {
  for (std::uint64_t seed : {1, 14, 555}) {
    const CoxDataset d = generate_current_status(100, ParameterPoint{1.0}, 4.2588462595735095, seed);
    for (double th = -300.0; th <= 300.0; th += 7.3) {
      CAPTURE(seed);
      CAPTURE(th);
      IsotonicSolution sol;
      ProfileEvaluation ev;
      REQUIRE_NOTHROW(ev = icm_profile(ParameterPoint{th}, d, {}, nullptr, &sol));
      CHECK(std::isfinite(ev.log_pl));
      CHECK(std::is_sorted(sol.x.begin(), sol.x.end()));
    }
  }
}

TEST_CASE("current-status model flags a failed solve instead of throwing") {
  const CoxDataset d = generate_current_status(60, ParameterPoint{1.0}, 4.2588462595735095, 3);
  IcmOptions tight;
  tight.max_iter = 1;
  CHECK_THROWS_AS(icm_profile(ParameterPoint{0.5}, d, tight), IcmNonConvergence);
  const CoxCurrentModel model(d, tight);
  const ProfileEvaluation ev = model.profile(ParameterPoint{0.5});
  CHECK(ev.overflow);
  CHECK(model.log_pl(ParameterPoint{0.5}) == -std::numeric_limits<double>::infinity());
}
