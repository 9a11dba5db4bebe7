#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "spectra/log_value.hpp"

using namespace spectra;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("log_sum_exp matches direct summation", "[log_value]") {
  const std::vector<double> xs{-1.0, 0.5, -3.25, 2.0};
  double direct = 0.0;
  for (double x : xs) direct += std::exp(x);
  CHECK_THAT(log_sum_exp(xs), WithinAbs(std::log(direct), 1e-14));
}

TEST_CASE("log_sum_exp survives huge and tiny magnitudes", "[log_value]") {
  const std::vector<double> big{1000.0, 1000.0};
  CHECK_THAT(log_sum_exp(big), WithinAbs(1000.0 + std::log(2.0), 1e-12));
  const std::vector<double> small{-2000.0, -2001.0};
  CHECK_THAT(log_sum_exp(small), WithinAbs(-2000.0 + std::log1p(std::exp(-1.0)), 1e-12));
  CHECK(log_sum_exp(std::vector<double>{}) == kNegInf);
  CHECK(log_sum_exp(std::vector<double>{kNegInf, kNegInf}) == kNegInf);
}

TEST_CASE("log_sum_exp is deterministic in the given order", "[log_value]") {
  std::vector<double> xs;
  for (int j = 0; j < 1000; ++j) xs.push_back(std::sin(j) * 30.0);
  CHECK(log_sum_exp(xs) == log_sum_exp(xs));
}

TEST_CASE("LogValue arithmetic", "[log_value]") {
  const auto a = LogValue::from_double(3.0), b = LogValue::from_double(-5.0);
  CHECK_THAT((a + b).to_double(), WithinAbs(-2.0, 1e-14));
  CHECK_THAT((a - b).to_double(), WithinAbs(8.0, 1e-13));
  CHECK_THAT((a * b).to_double(), WithinAbs(-15.0, 1e-13));
  CHECK_THAT((b / a).to_double(), WithinAbs(-5.0 / 3.0, 1e-14));
  CHECK_THAT(a.pow(2.5).to_double(), WithinRel(std::pow(3.0, 2.5), 1e-14));
  CHECK((a - a).is_zero());
  CHECK(LogValue::from_double(0.0).is_zero());
  auto c = a;
  c += a;
  c *= LogValue::from_double(0.5);
  CHECK_THAT(c.to_double(), WithinAbs(3.0, 1e-14));
}

TEST_CASE("log factorials agree with exact big integers", "[log_value]") {
  const LogFactorials lf(200);
  for (unsigned n : {0u, 1u, 5u, 20u, 100u, 170u}) {
    const double exact = std::log(oracle::factorial(n).convert_to<double>());
    CHECK_THAT(lf(n), WithinAbs(exact, 1e-10 * std::max(1.0, exact)));
  }
  const double lb = std::log(oracle::binomial(150, 70).convert_to<double>());
  CHECK_THAT(lf.log_binomial(150, 70), WithinRel(lb, 1e-13));
}
