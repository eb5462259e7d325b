#include <doctest.h>

#include <cmath>
#include <numbers>

#include "profile_sampler/core.hpp"
#include "profile_sampler/rng.hpp"
#include "profile_sampler/step_function.hpp"

using namespace profile_sampler;

TEST_CASE("m_n examples") {
  CHECK(m_n(100, 0.5) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(m_n(64, 1.0 / 3.0) == doctest::Approx(0.625).epsilon(1e-14));
  CHECK(m_n(16, 1.0) == doctest::Approx(0.265625).epsilon(1e-15));
  CHECK_THROWS_AS(m_n(10, 0.25), DomainError);
  CHECK_THROWS_AS(m_n(0, 0.5), DomainError);
}

TEST_CASE("m_n is decreasing in r and n") {
  for (long n : {2L, 10L, 100L, 5000L}) {
    for (double r = 0.26; r < 1.5; r += 0.05) {
      CHECK(m_n(n, r + 0.05) < m_n(n, r));
      CHECK(m_n(n + 1, r) < m_n(n, r));
      if (r >= 0.5) {
        const double base = 1.0 / std::sqrt(static_cast<double>(n));
        CHECK(m_n(n, r) > base);
        CHECK(m_n(n, r) <= 2.0 * base * (1 + 1e-15));
      }
    }
  }
}

TEST_CASE("g_r examples and invariants") {
  CHECK(g_r(0.0, 100, 0.5) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(g_r(0.1, 100, 0.5) == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(g_r(0.0, 16, 1.0 / 3.0) == doctest::Approx(0.6299605249474366).epsilon(1e-14));
  CHECK_THROWS_AS(g_r(-0.1, 10, 0.5), DomainError);
  for (double r : {0.3, 1.0 / 3.0, 0.4, 0.5, 0.9}) {
    const double zero = r < 0.5 ? std::pow(50.0, -2 * r + 0.5) : std::pow(50.0, -0.5);
    CHECK(g_r(0.0, 50, r) == doctest::Approx(zero).epsilon(1e-14));
    double prev = g_r(0.0, 50, r);
    for (double w = 0.01; w < 2.0; w += 0.01) {
      const double g = g_r(w, 50, r);
      CHECK(g >= prev);
      prev = g;
    }
  }
}

TEST_CASE("h_r examples") {
  CHECK(h_r(0.1, 100, 0.5) == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(h_r(1.0, 1, 0.5) == doctest::Approx(2.0).epsilon(1e-15));
  // Hand evaluation of the r < 1/2 branch at s = 0.5, n = 16, r = 1/3:
  // 16/8 + 16^(2/3)/4 + 16^(1/3)/2 + 16^(-1/6), divided by 16 * 0.25.
  const double g = 2.0 + std::cbrt(256.0) / 4.0 + std::cbrt(16.0) / 2.0 + std::pow(16.0, -1.0 / 6.0);
  CHECK(h_r(0.5, 16, 1.0 / 3.0) == doctest::Approx(g / 4.0).epsilon(1e-14));
  CHECK(h_r(0.5, 16, 1.0 / 3.0) == doctest::Approx(1.3693).epsilon(1e-4));
  CHECK_THROWS_AS(h_r(0.0, 10, 0.5), DomainError);
}

TEST_CASE("step_size examples and truncation") {
  CHECK(step_size(100, RateSpec(0.5)) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(step_size(1000, RateSpec(1.0 / 3.0)) == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(step_size(100, RateSpec(0.8), 2.0) == doctest::Approx(0.2).epsilon(1e-15));
  for (double r : {0.5, 0.7, 1.0, 3.0})
    CHECK(step_size(321, RateSpec(r), 1.7) == step_size(321, RateSpec(0.5), 1.7));
  CHECK_THROWS_AS(RateSpec(0.25), DomainError);
  CHECK(RateSpec(0.4).effective_exponent() == 0.4);
  CHECK(RateSpec(0.9).effective_exponent() == 0.5);
}

TEST_CASE("prior densities") {
  const Prior flat = Prior::flat();
  CHECK(prior_log_density(flat, ParameterPoint{3.0}) == 0.0);
  CHECK(prior_log_density(flat, ParameterPoint{-1e6}) == 0.0);
  const Prior g = Prior::gaussian(Vector::Zero(1), Vector::Ones(1));
  CHECK(prior_log_density(g, ParameterPoint{0.0}) ==
        doctest::Approx(-0.5 * std::log(2 * std::numbers::pi)).epsilon(1e-15));
  CHECK(prior_log_density(g, ParameterPoint{1.0}) == prior_log_density(g, ParameterPoint{-1.0}));
  CHECK_THROWS_AS(Prior::gaussian(Vector::Zero(1), Vector::Zero(1)), DomainError);
}

TEST_CASE("prior parse round trip") {
  CHECK(Prior::parse("flat").kind() == Prior::Kind::flat);
  const Prior g = Prior::parse("gaussian:0.5;1,2;3");
  CHECK(g.kind() == Prior::Kind::gaussian);
  CHECK(g.mean()[1] == 1.0);
  CHECK(g.sd()[0] == 2.0);
  const Prior back = Prior::parse(g.to_string());
  CHECK(back.mean() == g.mean());
  CHECK(back.sd() == g.sd());
  CHECK_THROWS_AS(Prior::parse("cauchy"), DomainError);
  // A scalar pair broadcasts to every coordinate.
  const Prior s = Prior::parse("gaussian:0,2");
  CHECK(prior_log_density(s, ParameterPoint{1.0, 1.0}) ==
        doctest::Approx(2.0 * prior_log_density(s, ParameterPoint{1.0})));
}

TEST_CASE("parameter points and datasets") {
  CHECK_THROWS_AS(ParameterPoint{std::nan("")}, DomainError);
  CHECK_THROWS_AS(ParameterPoint{INFINITY}, DomainError);
  const ParameterPoint p{1.0, 2.0};
  CHECK(p.size() == 2);
  CHECK(p[1] == 2.0);
  CHECK(p == ParameterPoint{1.0, 2.0});
  CHECK_THROWS_AS(CoxDataset(std::vector<CoxObservation>{}), DomainError);
  const CoxDataset d({{1.0, 1, {0.5}}, {2.0, 0, {0.1}}});
  CHECK(d.n() == 2);
  CHECK(covariate_dim(d) == 1);
}

TEST_CASE("rng determinism and streams") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  Rng c(42);
  Rng s1 = c.split(1), s2 = c.split(2), s1b = c.split(1);
  const auto first = s1.next_u64();
  CHECK(first != s2.next_u64());
  CHECK(first == s1b.next_u64());
  CHECK(c.next_u64() == Rng(42).next_u64());
  CHECK(derive_seed(1, 2, 3) == derive_seed(1, 2, 3));
  CHECK(derive_seed(1, 2, 3) != derive_seed(1, 3, 2));
  Rng u(7);
  double mean = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double x = u.uniform();
    REQUIRE(x > 0.0);
    REQUIRE(x < 1.0);
    mean += x;
  }
  CHECK(mean / 100000 == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("monotone step function") {
  const MonotoneStepFunction f({1.0, 2.0, 4.0}, {0.5, 0.5, 2.0});
  CHECK(f(0.99) == 0.0);
  CHECK(f(1.0) == 0.5);
  CHECK(f(3.9) == 0.5);
  CHECK(f(4.0) == 2.0);
  CHECK(f(100.0) == 2.0);
  CHECK(f.jumps() == std::vector<double>{0.5, 0.0, 1.5});
  CHECK(MonotoneStepFunction::zero()(5.0) == 0.0);
  CHECK_THROWS_AS(MonotoneStepFunction({1.0, 1.0}, {0.0, 1.0}), DomainError);
  CHECK_THROWS_AS(MonotoneStepFunction({1.0, 2.0}, {1.0, 0.5}), DomainError);
  CHECK_THROWS_AS(MonotoneStepFunction({1.0}, {-0.1}), DomainError);
}
