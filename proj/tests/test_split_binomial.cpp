#include <catch_amalgamated.hpp>

#include <cmath>

#include "oracles.hpp"
#include "spectra/split_binomial.hpp"

using namespace spectra;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Direct big-integer sums over both halves, scaled by b^k.
Rational oracle_ratio(unsigned k, unsigned a, unsigned b) {
  oracle::cpp_int hi = 0, lo = 0;
  for (unsigned i = 0; i <= k; ++i) {
    oracle::cpp_int term = oracle::binomial(k, i);
    for (unsigned j = 0; j < i; ++j) term *= a;
    for (unsigned j = i; j < k; ++j) term *= b;
    (2 * i > k ? hi : lo) += term;
  }
  return Rational(hi, lo);
}

}  // namespace

TEST_CASE("exact split ratio matches the big-integer oracle", "[split_binomial]") {
  for (unsigned k : {1u, 3u, 9u, 31u}) {
    CHECK(split_ratio_exact(k, Rational(2)) == oracle_ratio(k, 2, 1));
    CHECK(split_ratio_exact(k, Rational(7, 2)) == oracle_ratio(k, 7, 2));
  }
  CHECK(split_ratio_exact(1, Rational(2)) == Rational(2));
}

TEST_CASE("log-space ratio agrees with the exact value", "[split_binomial]") {
  const auto r = split_ratio(41, Rational(7, 2));
  REQUIRE(r.exact.has_value());
  CHECK_THAT(r.log_ratio(), WithinAbs(std::log(to_double(*r.exact)), 1e-11));
}

TEST_CASE("growth limit and convergence", "[split_binomial]") {
  CHECK_THAT(growth_limit(2.0), WithinAbs(3.0 / (2.0 * std::sqrt(2.0)), 1e-15));
  const auto r = split_ratio(2001, 2.0);
  CHECK(std::fabs(r.root() - growth_limit(2.0)) / growth_limit(2.0) <= 0.01);
}

TEST_CASE("sandwich inequalities hold exactly", "[split_binomial]") {
  for (unsigned k = 1; k <= 61; k += 2) {
    CHECK(sandwich_check(k, Rational(2)).holds());
    CHECK(sandwich_check(k, Rational(7, 2)).holds());
  }
}

TEST_CASE("split ratio preconditions", "[split_binomial]") {
  CHECK_THROWS_AS(split_ratio(4, 2.0), Error);
  CHECK_THROWS_AS(split_ratio(3, 1.0), Error);
  CHECK_THROWS_AS(sandwich_check(101, Rational(2)), Error);
  CHECK_THROWS_AS(growth_limit(0.5), Error);
}
