#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include <flatvisc/monotone_map.hpp>
#include <flatvisc/quadrature.hpp>

#include "oracles.hpp"

using namespace flatvisc;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("power laws are exact in loglog mode", "[monotone_map]") {
  const auto ts = log_space(1e-6, 10.0, 40);
  std::vector<double> vs;
  for (double t : ts) vs.push_back(3.0 * std::pow(t, 1.7));
  const MonotoneMap m(ts, vs);
  CHECK(m.direction() == Monotonicity::increasing);
  CHECK(m.strict());
  for (double t : {2e-6, 3.3e-4, 0.5, 7.0}) {
    CHECK_THAT(m(t), WithinRel(3.0 * std::pow(t, 1.7), 1e-12));
    CHECK_THAT(m.derivative(t), WithinRel(5.1 * std::pow(t, 0.7), 1e-10));
  }
  // Extrapolation continues the end segments.
  CHECK_THAT(m(1e-8), WithinRel(3.0 * std::pow(1e-8, 1.7), 1e-10));
  // Integral from 0 of 3 t^1.7 is 3 t^2.7 / 2.7.
  CHECK_THAT(m.integral(0.0, 2.0), WithinRel(3.0 * std::pow(2.0, 2.7) / 2.7, 1e-10));
}

TEST_CASE("invert reproduces values", "[monotone_map]") {
  const auto ts = log_space(1e-4, 1.0, 200);
  std::vector<double> vs;
  for (double t : ts) vs.push_back(t + std::sqrt(t));
  const MonotoneMap m(ts, vs);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(std::log(m.values().front()), std::log(m.values().back()));
  for (int i = 0; i < 200; ++i) {
    const double y = std::exp(U(rng));
    CHECK(oracle::rel(m(m.invert(y)), y) <= 1e-9);
  }
  const auto inv = m.inverse();
  for (double t : {2e-4, 0.01, 0.7}) CHECK_THAT(inv(m(t)), WithinRel(t, 1e-9));
}

TEST_CASE("decreasing tables and linear interpolation", "[monotone_map]") {
  const MonotoneMap d({0.0, 1.0, 2.0}, {4.0, 2.0, 1.0}, Interp::linear);
  CHECK(d.direction() == Monotonicity::decreasing);
  CHECK(d(0.5) == 3.0);
  CHECK(d(1.5) == 1.5);
  CHECK(d.invert(3.0) == 0.5);
  CHECK(d.integral(0.0, 2.0) == 4.5);
  const auto c = d.cumulative_integral();
  REQUIRE(c.size() == 3);
  CHECK(c[0] == 0.0);
  CHECK(c[1] == 3.0);
  CHECK(c[2] == 4.5);
}

TEST_CASE("invalid tables are rejected", "[monotone_map]") {
  CHECK_THROWS_AS(MonotoneMap({1.0, 1.0}, {1.0, 2.0}), std::invalid_argument);
  CHECK_THROWS_AS(MonotoneMap({1.0, 2.0, 3.0}, {1.0, 3.0, 2.0}), std::invalid_argument);
  CHECK_THROWS_AS(MonotoneMap({0.0, 1.0}, {1.0, 2.0}), std::invalid_argument);  // loglog needs t > 0
  CHECK_THROWS_AS(MonotoneMap({1.0}, {1.0}), std::invalid_argument);
  const MonotoneMap flat({1.0, 2.0}, {1.0, 1.0});
  CHECK_FALSE(flat.strict());
  CHECK_THROWS_AS(flat.invert(1.0), std::domain_error);
  const MonotoneMap m({1.0, 2.0}, {1.0, 2.0});
  CHECK_THAT(m.invert(5.0), WithinRel(5.0, 1e-14));  // end segment extends
  const MonotoneMap down({1.0, 2.0}, {2.0, 1.0});
  CHECK_THROWS_AS(down.invert(-1.0), std::domain_error);
}

TEST_CASE("json round trip is exact", "[monotone_map]") {
  const MonotoneMap m(log_space(0.1, 3.0, 17), log_space(0.2, 9.0, 17));
  const nlohmann::json j = m;
  const auto back = j.get<MonotoneMap>();
  CHECK(back.knots() == m.knots());
  CHECK(back.values() == m.values());
  CHECK(back.interp() == m.interp());
}

TEST_CASE("log_space endpoints", "[monotone_map]") {
  const auto v = log_space(1e-10, 2.0, 512);
  REQUIRE(v.size() == 512);
  CHECK(v.front() == 1e-10);
  CHECK(v.back() == 2.0);
  for (std::size_t i = 1; i < v.size(); ++i) CHECK(v[i] > v[i - 1]);
}

TEST_CASE("gauss legendre integrates polynomials", "[quadrature]") {
  // 16 points are exact through degree 31.
  const double got = gauss_legendre([](double x) { return std::pow(x, 31) + 3.0 * x * x; }, 0.0, 1.0);
  CHECK_THAT(got, WithinRel(1.0 / 32.0 + 1.0, 1e-13));
  CHECK_THAT(integrate_log([](double t) { return 1.0 / t; }, 1e-3, 1.0), WithinRel(std::log(1e3), 1e-12));
}

TEST_CASE("improper integrals converge or are rejected", "[quadrature]") {
  const auto a = integrate_from_zero([](double t) { return std::pow(t, -0.5); }, 1.0);
  REQUIRE(a.converged);
  CHECK_THAT(a.value, WithinRel(2.0, 1e-6));

  // Two power-law tails together.
  const auto b = integrate_from_zero([](double t) { return std::pow(t, -0.5) + std::pow(t, -0.8); }, 1.0);
  REQUIRE(b.converged);
  CHECK_THAT(b.value, WithinRel(2.0 + 5.0, 1e-5));

  CHECK_FALSE(integrate_from_zero([](double t) { return 1.0 / t; }, 1.0).converged);
  CHECK_FALSE(integrate_from_zero([](double t) { return 1.0 / (t * std::abs(std::log(t / 2.0))); }, 1.0).converged);
}
