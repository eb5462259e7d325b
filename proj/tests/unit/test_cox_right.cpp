#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "profile_sampler/cox_right.hpp"

using namespace profile_sampler;

namespace {

CoxDataset random_cox(std::mt19937_64& gen, std::size_t n, int max_events) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<CoxObservation> obs;
  int events = 0;
  for (std::size_t i = 0; i < n; ++i) {
    int d = u(gen) < 0.7 && events < max_events ? 1 : 0;
    events += d;
    obs.push_back({0.1 + 3.0 * u(gen), d, {2.0 * u(gen) - 1.0}});
  }
  return CoxDataset(std::move(obs));
}

}  // namespace

TEST_CASE("breslow closed-form examples") {
  const CoxDataset one({{1.0, 1, {0.0}}});
  for (double th : {-3.0, 0.0, 2.5}) CHECK(breslow_profile(ParameterPoint{th}, one).log_pl == -1.0);

  const CoxDataset two({{1.0, 1, {0.3}}, {2.0, 1, {-0.8}}});
  CHECK(breslow_profile(ParameterPoint{0.0}, two).log_pl ==
        doctest::Approx(-std::log(2.0) - 2.0).epsilon(1e-15));

  const CoxDataset none({{1.0, 0, {0.3}}, {2.0, 0, {0.1}}});
  const auto ev = breslow_profile(ParameterPoint{1.0}, none);
  CHECK(ev.log_pl == 0.0);
  CHECK(std::get<MonotoneStepFunction>(ev.nuisance).empty());
}

TEST_CASE("breslow matches point-mass maximization on the three-observation example") {
  const CoxDataset d({{1.0, 1, {0.2}}, {2.0, 0, {0.5}}, {3.0, 1, {0.9}}});
  const double closed = breslow_profile(ParameterPoint{0.5}, d).log_pl;
  CHECK(std::abs(closed - oracle::breslow_brute_force(0.5, d)) <= 1e-6);
}

TEST_CASE("breslow matches the oracle on random small datasets") {
  std::mt19937_64 gen(11);
  for (int rep = 0; rep < 10; ++rep) {
    const CoxDataset d = random_cox(gen, 7, 6);
    for (double th : {-2.0, -0.5, 1.0, 2.0}) {
      const double closed = breslow_profile(ParameterPoint{th}, d).log_pl;
      CHECK(std::abs(closed - oracle::breslow_brute_force(th, d)) <= 1e-6);
    }
  }
}

TEST_CASE("breslow nuisance is a monotone step function jumping at event times") {
  std::mt19937_64 gen(5);
  const CoxDataset d = random_cox(gen, 40, 40);
  const auto ev = breslow_profile(ParameterPoint{0.7}, d);
  const auto& f = std::get<MonotoneStepFunction>(ev.nuisance);
  std::vector<double> event_times;
  for (const auto& o : d)
    if (o.delta) event_times.push_back(o.y);
  std::sort(event_times.begin(), event_times.end());
  CHECK(f.knots() == event_times);
  CHECK(f(event_times.front() - 1e-9) == 0.0);
  for (double j : f.jumps()) CHECK(j > 0.0);
  // Jump at y equals 1 / S(y).
  for (std::size_t k = 0; k < event_times.size(); ++k) {
    double s = 0.0;
    for (const auto& o : d)
      if (o.y >= event_times[k]) s += std::exp(0.7 * o.z[0]);
    CHECK(f.jumps()[k] == doctest::Approx(1.0 / s).epsilon(1e-12));
  }
}

TEST_CASE("breslow profile is concave and permutation invariant") {
  std::mt19937_64 gen(9);
  const CoxDataset d = random_cox(gen, 30, 30);
  const double h = 0.05;
  for (double th = -2.0; th <= 2.0; th += 0.1) {
    const double second = breslow_profile(ParameterPoint{th + h}, d).log_pl -
                          2 * breslow_profile(ParameterPoint{th}, d).log_pl +
                          breslow_profile(ParameterPoint{th - h}, d).log_pl;
    CHECK(second <= 1e-9);
  }
  auto obs = d.observations();
  std::shuffle(obs.begin(), obs.end(), gen);
  const CoxDataset shuffled(obs);
  for (double th : {-1.0, 0.3, 1.7})
    CHECK(breslow_profile(ParameterPoint{th}, shuffled).log_pl ==
          doctest::Approx(breslow_profile(ParameterPoint{th}, d).log_pl).epsilon(1e-13));
}

TEST_CASE("breslow ties share the risk set") {
  const CoxDataset d({{1.0, 1, {0.0}}, {1.0, 1, {0.0}}, {2.0, 0, {0.0}}});
  // Both events see S = 3.
  CHECK(breslow_profile(ParameterPoint{0.0}, d).log_pl ==
        doctest::Approx(-2.0 * std::log(3.0) - 2.0).epsilon(1e-15));
  const auto ev = breslow_profile(ParameterPoint{0.0}, d);
  const auto& f = std::get<MonotoneStepFunction>(ev.nuisance);
  CHECK(f.knots() == std::vector<double>{1.0});
  CHECK(f.values()[0] == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("breslow overflow is flagged") {
  const CoxDataset d({{1.0, 1, {1.0}}, {2.0, 1, {0.0}}});
  const auto ev = breslow_profile(ParameterPoint{800.0}, d);
  CHECK(ev.overflow);
  CHECK(ev.value() == -INFINITY);
  CHECK_FALSE(breslow_profile(ParameterPoint{600.0}, d).overflow);
}

TEST_CASE("right-censored generator") {
  const auto a = generate_right_censored(50, ParameterPoint{1.0}, 2.0, 7);
  const auto b = generate_right_censored(50, ParameterPoint{1.0}, 2.0, 7);
  for (std::size_t i = 0; i < 50; ++i) {
    CHECK(a[i].y == b[i].y);
    CHECK(a[i].delta == b[i].delta);
    CHECK(a[i].z == b[i].z);
    CHECK(a[i].z[0] >= 0.0);
    CHECK(a[i].z[0] <= 1.0);
  }
  const auto c = generate_right_censored(200, ParameterPoint{1.0}, 1e-12, 3);
  for (const auto& o : c) CHECK(o.delta == 0);
}

TEST_CASE("tn calibration") {
  // Frozen output of the 10^6-draw bisection at seed 97.
  const double tn = calibrate_tn(ParameterPoint{1.0}, 0.9, 97, 1000000);
  CHECK(tn == doctest::Approx(4.2588462595735095).epsilon(1e-12));

  // Independent check by direct simulation of (T, C) with a different generator.
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::exponential_distribution<double> e(1.0);
  const int draws = 1000000;
  int events = 0;
  for (int i = 0; i < draws; ++i) {
    const double z = u(gen);
    const double t = std::log1p(e(gen) * std::exp(-z));
    events += t <= tn * u(gen);
  }
  CHECK(std::abs(static_cast<double>(events) / draws - 0.9) <= 0.005);

  CHECK(calibrate_tn(ParameterPoint{1.0}, 0.5, 97, 100000) < calibrate_tn(ParameterPoint{1.0}, 0.9, 97, 100000));
  CHECK_THROWS_AS(calibrate_tn(ParameterPoint{1.0}, 0.99999, 97, 10000, {1e-6, 1e-3}), CalibrationError);
  CHECK_THROWS_AS(calibrate_tn(ParameterPoint{1.0}, 1.0, 97, 10000), DomainError);

  const auto data = generate_right_censored(20000, ParameterPoint{1.0}, tn, 5);
  double frac = 0.0;
  for (const auto& o : data) frac += o.delta;
  CHECK(frac / 20000 == doctest::Approx(0.9).epsilon(0.01));
}

TEST_CASE("breslow stays finite for very negative linear predictors") {
  const CoxDataset d({{1.0, 1, {0.5}}, {2.0, 1, {0.9}}, {3.0, 0, {0.2}}});
  for (double th : {-900.0, -1500.0}) {
    const auto ev = breslow_profile(ParameterPoint{th}, d);
    CHECK(ev.overflow);
  }
  // Risks near exp(-690) stay representable through the log-sum-exp risk sets.
  const auto ev = breslow_profile(ParameterPoint{-1000.0}, CoxDataset({{1.0, 1, {0.69}},
                                                                       {2.0, 1, {0.68}}}));
  CHECK_FALSE(ev.overflow);
  CHECK(ev.log_pl == doctest::Approx(-10.0 - std::log1p(std::exp(-10.0)) - 2.0).epsilon(1e-9));
}
