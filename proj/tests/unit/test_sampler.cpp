#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "profile_sampler/rng.hpp"
#include "profile_sampler/sampler.hpp"

using namespace profile_sampler;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

LogTarget gaussian(double mu, double sigma) {
  return plain_target([=](const ParameterPoint& t) {
    const double z = (t[0] - mu) / sigma;
    return -0.5 * z * z;
  });
}

Vector sd1(double s) { return Vector::Constant(1, s); }

Chain iid_chain(const std::vector<double>& xs) {
  Chain c;
  for (double x : xs) {
    c.samples.push_back(ParameterPoint::scalar(x));
    c.log_pl_values.push_back(0.0);
  }
  c.total_iter = xs.size();
  return c;
}

}  // namespace

TEST_CASE("zero proposal sd keeps the chain at its start") {
  const Chain c = metropolis_run(gaussian(0.0, 1.0), ParameterPoint{0.3}, sd1(0.0), 200, 50, 5);
  REQUIRE(c.size() == 150);
  CHECK(c.acceptance_rate == 1.0);
  for (const auto& s : c.samples) CHECK(s[0] == 0.3);
}

TEST_CASE("constant target accepts every proposal") {
  const auto flat = plain_target([](const ParameterPoint&) { return 2.0; });
  const Chain c = metropolis_run(flat, ParameterPoint{0.0}, sd1(3.0), 1000, 0, 11);
  CHECK(c.acceptance_rate == 1.0);
  CHECK(c.accepted == 1000);
}

TEST_CASE("standard normal target moments") {
  const Chain c = metropolis_run(gaussian(0.0, 1.0), ParameterPoint{0.0}, sd1(2.4), 100000, 0, 2024);
  const auto x = c.coordinate(0);
  double m = 0.0;
  for (double v : x) m += v;
  m /= static_cast<double>(x.size());
  double var = 0.0;
  for (double v : x) var += (v - m) * (v - m);
  var /= static_cast<double>(x.size() - 1);
  CHECK(std::abs(m) < 0.02);
  CHECK(var >= 0.95);
  CHECK(var <= 1.05);
}

TEST_CASE("metropolis input validation") {
  CHECK_THROWS_AS(metropolis_run(gaussian(0, 1), ParameterPoint{0.0}, sd1(1.0), 10, 10, 1),
                  DomainError);
  const auto bad = plain_target([](const ParameterPoint&) { return -kInf; });
  CHECK_THROWS_AS(metropolis_run(bad, ParameterPoint{0.0}, sd1(1.0), 10, 0, 1), DomainError);
  CHECK_THROWS_AS(metropolis_run(gaussian(0, 1), ParameterPoint{0.0}, sd1(-1.0), 10, 0, 1),
                  DomainError);
}

TEST_CASE("chains are bit-exact under a fixed seed") {
  const Chain a = metropolis_run(gaussian(1.0, 2.0), ParameterPoint{0.0}, sd1(1.5), 3000, 100, 77);
  const Chain b = metropolis_run(gaussian(1.0, 2.0), ParameterPoint{0.0}, sd1(1.5), 3000, 100, 77);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.samples[i][0] == b.samples[i][0]);
  CHECK(a.accepted == b.accepted);
  const Chain c = metropolis_run(gaussian(1.0, 2.0), ParameterPoint{0.0}, sd1(1.5), 3000, 100, 78);
  CHECK(c.samples.back()[0] != a.samples.back()[0]);
}

TEST_CASE("bookkeeping and rejected moves") {
  // Half-line support makes rejections frequent.
  const auto target = plain_target([](const ParameterPoint& t) {
    return t[0] < 0.0 ? -kInf : -t[0];
  });
  const Chain c = metropolis_run(target, ParameterPoint{1.0}, sd1(2.0), 5000, 0, 3);
  CHECK(c.samples.size() == c.total_iter - c.burn_in);
  CHECK(c.log_pl_values.size() == c.samples.size());
  CHECK(c.acceptance_rate == static_cast<double>(c.accepted) / 5000.0);
  CHECK(c.acceptance_rate > 0.0);
  CHECK(c.acceptance_rate < 1.0);

  std::size_t moves = 0;
  for (std::size_t i = 1; i < c.size(); ++i) {
    if (c.samples[i][0] != c.samples[i - 1][0]) ++moves;
    else CHECK(c.log_pl_values[i] == c.log_pl_values[i - 1]);
    CHECK(c.samples[i][0] >= 0.0);
    CHECK(c.log_pl_values[i] == -c.samples[i][0]);
  }
  // With burn_in 0, every accepted move after the first sample is visible.
  CHECK(moves + 1 >= c.accepted);
  CHECK(moves <= c.accepted);
}

TEST_CASE("log_pl component excludes the prior") {
  const LogTarget target = [](const ParameterPoint& t) {
    return TargetValue{-0.5 * t[0] * t[0], 7.0};
  };
  const Chain c = metropolis_run(target, ParameterPoint{0.0}, sd1(1.0), 300, 0, 9);
  for (std::size_t i = 0; i < c.size(); ++i)
    CHECK(c.log_pl_values[i] == -0.5 * c.samples[i][0] * c.samples[i][0]);
}

TEST_CASE("three-state target frequencies") {
  const double p[3] = {0.2, 0.5, 0.3};
  const auto target = plain_target([&](const ParameterPoint& t) {
    const double r = std::round(t[0]);
    if (r < 0.0 || r > 2.0) return -kInf;
    return std::log(p[static_cast<int>(r)]);
  });
  const std::size_t total = 400000;
  const Chain c = metropolis_run(target, ParameterPoint{1.0}, sd1(1.5), total, 1000, 31);
  const std::size_t batches = 100;
  const std::size_t len = c.size() / batches;
  for (int state = 0; state < 3; ++state) {
    std::vector<double> bm(batches, 0.0);
    for (std::size_t b = 0; b < batches; ++b) {
      for (std::size_t i = b * len; i < (b + 1) * len; ++i)
        if (std::round(c.samples[i][0]) == state) bm[b] += 1.0;
      bm[b] /= static_cast<double>(len);
    }
    double mean = 0.0;
    for (double v : bm) mean += v;
    mean /= batches;
    double var = 0.0;
    for (double v : bm) var += (v - mean) * (v - mean);
    var /= batches - 1;
    const double se = std::sqrt(var / batches);
    CAPTURE(state);
    CAPTURE(mean);
    CHECK(std::abs(mean - p[state]) <= 3.0 * se);
  }
}

TEST_CASE("tuning on a constant target hits the round cap") {
  const auto flat = plain_target([](const ParameterPoint&) { return 0.0; });
  const TuningResult r = tune_proposal(flat, ParameterPoint{0.0}, 5);
  CHECK(r.warning.has_value());
  CHECK(r.rounds == 30);
  CHECK(r.acceptance_rate == 1.0);
  CHECK(!r.protocol.empty());
}

TEST_CASE("tuning on Gaussian targets") {
  for (double sigma : {0.1, 1.0, 10.0}) {
    CAPTURE(sigma);
    const TuningResult r = tune_proposal(gaussian(0.0, sigma), ParameterPoint{0.0}, 123);
    CHECK(!r.warning.has_value());
    CHECK(r.acceptance_rate >= 0.2);
    CHECK(r.acceptance_rate <= 0.4);
    CHECK(r.sd[0] >= 2.4 * sigma / 4.0);
    CHECK(r.sd[0] <= 2.4 * sigma * 4.0);
  }
  const TuningResult a = tune_proposal(gaussian(0.0, 3.0), ParameterPoint{0.0}, 8);
  const TuningResult b = tune_proposal(gaussian(0.0, 3.0), ParameterPoint{0.0}, 8);
  CHECK(a.sd[0] == b.sd[0]);
  CHECK(a.rounds == b.rounds);
  CHECK(a.acceptance_rate == b.acceptance_rate);
}

TEST_CASE("diagnostics on a constant chain") {
  const ChainDiagnostics d = chain_diagnostics(iid_chain(std::vector<double>(50, 1.25)));
  CHECK(d.degenerate);
  CHECK(d.sd[0] == 0.0);
  CHECK(d.mean[0] == 1.25);
  CHECK_THROWS_AS(chain_diagnostics(iid_chain(std::vector<double>(9, 0.0))), DomainError);
}

TEST_CASE("diagnostics on iid draws and their reversal") {
  Rng rng(404);
  std::vector<double> xs(20000);
  for (auto& x : xs) x = rng.normal();
  const ChainDiagnostics d = chain_diagnostics(iid_chain(xs));
  CHECK(!d.degenerate);
  CHECK(d.autocorrelation_time[0] >= 0.5);
  CHECK(d.autocorrelation_time[0] <= 2.0);
  CHECK(d.split_half_discrepancy[0] < 4.0);

  std::vector<double> rev(xs.rbegin(), xs.rend());
  const ChainDiagnostics r = chain_diagnostics(iid_chain(rev));
  CHECK(r.mean[0] == doctest::Approx(d.mean[0]).epsilon(1e-12));
  CHECK(r.sd[0] == doctest::Approx(d.sd[0]).epsilon(1e-12));
}

TEST_CASE("autocorrelation time grows with persistence") {
  Rng rng(5);
  std::vector<double> ar(20000);
  double x = 0.0;
  for (auto& v : ar) {
    x = 0.9 * x + rng.normal();
    v = x;
  }
  // AR(1) with coefficient 0.9 has tau = (1 + 0.9) / (1 - 0.9) = 19.
  const double tau = autocorrelation_time(ar);
  CHECK(tau > 12.0);
  CHECK(tau < 28.0);
}

TEST_CASE("chain csv dump") {
  const Chain c = metropolis_run(gaussian(0, 1), ParameterPoint{0.5}, sd1(1.0), 5, 2, 1);
  std::ostringstream os;
  write_chain_csv(os, c);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "iter,theta1,log_pl");
  int rows = 0;
  while (std::getline(is, line)) {
    CHECK(line.rfind(std::to_string(2 + rows) + ",", 0) == 0);
    ++rows;
  }
  CHECK(rows == 3);
}
