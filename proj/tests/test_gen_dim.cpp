#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "spectra/gen_dim.hpp"

using namespace spectra;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

DiagonalSystem three_map_example() {
  DiagonalSystem sys;
  sys.maps = {{0.4, 0.3, 1, 1, 0, 0}, {0.3, 0.4, 1, 1, 0.5, 0.5}, {0.3, 0.3, 1, 1, 0.6, 0}};
  sys.probabilities = {0.8, 0.1, 0.1};
  return sys;
}

}  // namespace

TEST_CASE("singular value function pieces", "[gen_dim]") {
  const double a1 = std::log(0.75), a2 = std::log(0.25);
  CHECK(svf(a1, a2, 0.0).to_double() == 1.0);
  CHECK_THAT(svf(a1, a2, 0.5).to_double(), WithinRel(std::sqrt(0.75), 1e-14));
  CHECK_THAT(svf(a1, a2, 1.5).to_double(), WithinRel(0.75 * std::sqrt(0.25), 1e-14));
  CHECK_THAT(svf(a1, a2, 3.0).to_double(), WithinRel(std::pow(0.75 * 0.25, 1.5), 1e-14));
  CHECK_THROWS_AS(svf(a2, a1, 1.0), Error);
  CHECK_THROWS_AS(svf(a1, a2, -0.1), Error);
}

TEST_CASE("one-level roots of the three-map example", "[gen_dim]") {
  const auto sys = three_map_example();
  const auto r = fm_roots(sys, 0.0);
  CHECK_THAT(r.t1, WithinAbs(1.0, 1e-10));
  CHECK_THAT(r.t2, WithinAbs(1.0, 1e-10));
  CHECK_THAT(p0_star(sys, 1.0, 0.0, P0Variant::Max), WithinAbs(1.0, 1e-12));
  const auto u = u_roots(sys, 0.0);
  CHECK(u.u0_found);
  CHECK_THAT(u.u0, WithinAbs(1.0, 1e-10));
  CHECK_THAT(u.u, WithinAbs(1.0, 1e-10));
}

TEST_CASE("swap family roots coincide and solve their equation", "[gen_dim]") {
  const auto sys = swap_family(0.75, 0.25);
  const auto r = fm_roots(sys, 2.0);
  CHECK_THAT(r.t1, WithinAbs(r.t2, 1e-11));
  CHECK(std::fabs(0.25 * (std::pow(0.75, -r.t1) + std::pow(0.25, -r.t1)) - 1.0) <= 1e-10);
}

TEST_CASE("q near 1 is refused", "[gen_dim]") {
  const auto sys = swap_family(0.75, 0.25);
  CHECK_THROWS_AS(fm_roots(sys, 1.0), Error);
  CHECK_THROWS_AS(u_roots(sys, 1.0 + 5e-7), Error);
  CHECK_NOTHROW(u_roots(sys, 1.0 + 2e-6));
}

TEST_CASE("finite-level d_q matches word enumeration", "[gen_dim]") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 4; ++trial) {
    const auto sys = oracle::random_system(rng, 2 + trial % 2);
    for (double q : {0.5, 2.5}) {
      for (std::size_t k : {1, 4}) {
        const double mine = dq_finite_k(sys, k, q);
        const double brute = oracle::bisect([&](double t) { return (q > 1 ? 1 : -1) * (oracle::dq_sum(sys, k, t, q) - 1.0); }, 0.0, 50.0);
        CHECK_THAT(mine, WithinAbs(brute, 1e-9));
      }
    }
  }
}

TEST_CASE("swap-family lower bound exceeds u", "[gen_dim]") {
  for (double q : {1.5, 2.0, 3.0}) {
    const auto ml = miao_counterexample_lower(0.75, 0.25, q);
    CHECK(ml.correction > 0.0);
    const auto u = u_roots(swap_family(0.75, 0.25), q);
    CHECK_THAT(ml.u, WithinAbs(u.u, 1e-9));
  }
  CHECK_THROWS_AS(miao_counterexample_lower(0.75, 0.25, 0.5), Error);
}

TEST_CASE("three-map example is exact with the first condition", "[gen_dim]") {
  const auto sys = three_map_example();
  for (double q : {1.5, 3.0, 5.0}) {
    const auto pt = gen_dim_point(sys, q);
    CHECK(pt.dim_case == GenDimCase::Exact_qgt1);
    REQUIRE(pt.exact.has_value());
    CHECK_THAT(*pt.exact, WithinAbs(pt.roots.t1, 1e-9));
    CHECK(pt.conditions.t1 >= 0.0);
    CHECK(pt.upper >= pt.lower - 1e-9);
  }
  CHECK(gen_dim_point(sys, 0.5).dim_case == GenDimCase::Known_qlt1);
}

TEST_CASE("swap family at q = 2 has bounds only", "[gen_dim]") {
  const auto pt = gen_dim_point(swap_family(0.75, 0.25), 2.0);
  CHECK(pt.dim_case == GenDimCase::Bounds_qgt1);
  CHECK_FALSE(pt.exact.has_value());
  REQUIRE(pt.counterexample_lower.has_value());
  CHECK(pt.lower == *pt.counterexample_lower);
  CHECK(pt.bundle.upper.has_value());
  CHECK(pt.upper >= pt.lower);
}

TEST_CASE("aligned contractions give equality", "[gen_dim]") {
  DiagonalSystem sys;
  sys.maps = {{0.5, 0.2, 1, 1, 0, 0}, {0.4, 0.3, 1, 1, 0.5, 0.5}};
  sys.probabilities = {0.3, 0.7};
  const auto exact = corollary_equality(sys, 2.0);
  REQUIRE(exact.has_value());
  CHECK_THAT(*exact, WithinAbs(u_roots(sys, 2.0).u, 1e-12));
}

TEST_CASE("triangular input uses diagonal-entry formulas", "[gen_dim]") {
  TriangularSystem ts{swap_family(0.75, 0.25), {0.1, 0.0}};
  const auto pt = gen_dim_point(ts, 2.0);
  CHECK(pt.diagonal_entry_formulas);
  CHECK_THROWS_AS(gen_dim_point(ts, 2.0, {4}), Error);
}

TEST_CASE("generalised dimension divides by 1 - q", "[gen_dim]") {
  CHECK(generalised_dimension(-1.0, 2.0) == 1.0);
  CHECK_THROWS_AS(generalised_dimension(0.0, 1.0), Error);
}
