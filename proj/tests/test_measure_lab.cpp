#include <catch_amalgamated.hpp>

#include <cmath>

#include "spectra/lq_spectrum.hpp"
#include "spectra/measure_lab.hpp"
#include "spectra/render.hpp"

using namespace spectra;
using Catch::Matchers::WithinAbs;

TEST_CASE("sampled measure conserves mass and stays on the grid", "[measure_lab]") {
  const auto gm = sample_measure(swap_family(0.75, 0.25), 1'000'000, 42, 8);
  CHECK_THAT(gm.total_mass(), WithinAbs(1.0, 1e-12));
  for (const auto& [c, n] : gm.cells) {
    CHECK(c.row < 256u);
    CHECK(c.col < 256u);
  }
}

TEST_CASE("coarsening matches direct binning", "[measure_lab]") {
  const auto sys = swap_family(0.75, 0.25);
  const auto both = sample_measures(sys, 200'000, 9, {5, 6});
  CHECK(aggregate(both[1], 5).cells == both[0].cells);
  const auto direct = sample_measure(sys, 200'000, 9, 5);
  CHECK(direct.cells == both[0].cells);
}

TEST_CASE("near-degenerate weights concentrate on one corner", "[measure_lab]") {
  DiagonalSystem sys = swap_family(0.75, 0.25);
  sys.probabilities = {0.999, 0.001};
  const auto gm = sample_measure(sys, 200'000, 5, 2);
  CHECK(gm.mass({0, 0}) >= 0.99);  // S_1 fixes the origin
}

TEST_CASE("sampling is deterministic in the seed", "[measure_lab]") {
  const auto sys = swap_family(0.75, 0.25);
  CHECK(sample_measure(sys, 50'000, 1, 6).cells == sample_measure(sys, 50'000, 1, 6).cells);
  CHECK(sample_measure(sys, 50'000, 1, 6).cells != sample_measure(sys, 50'000, 2, 6).cells);
}

TEST_CASE("uniform grid fixes the sign convention", "[measure_lab]") {
  std::vector<GridMeasure> gms;
  for (std::uint32_t m = 2; m <= 6; ++m) gms.push_back(uniform_grid_measure(m));
  CHECK_THAT(empirical_tau(gms, 0.0).tau, WithinAbs(2.0, 1e-12));
  CHECK_THAT(empirical_tau(gms, 2.0).tau, WithinAbs(-2.0, 1e-12));
  CHECK_THAT(empirical_tau(gms, 0.0).std_error, WithinAbs(0.0, 1e-10));
  CHECK(empirical_tau(gms, 1.0).tau == 0.0);
  gms.resize(2);
  CHECK_THROWS_AS(empirical_tau(gms, 2.0), Error);
}

TEST_CASE("estimate tracks the closed form for a self-similar measure", "[measure_lab]") {
  DiagonalSystem sys;
  sys.maps = {{0.5, 0.5, 1, 1, 0, 0}, {0.5, 0.5, 1, 1, 0.5, 0}, {0.5, 0.5, 1, 1, 0, 0.5}};
  sys.probabilities = {0.3, 0.33, 0.37};
  const auto gms = sample_measures(sys, 2'000'000, 17, {3, 4, 5, 6, 7});
  for (double q : {0.0, 2.0}) {
    const double theory = gamma_closed_forms(sys, q).gammaA;
    CHECK_THAT(empirical_tau(gms, q).tau, WithinAbs(theory, 0.05));
  }
}

TEST_CASE("depth-1 overlay draws the two first-level rectangles", "[measure_lab]") {
  const auto sys = swap_family(0.75, 0.25);
  const auto rects = level_rectangles(sys, 1);
  REQUIRE(rects.size() == 2);
  CHECK(rects[0].x.hi == 0.75);
  CHECK(rects[0].y.hi == 0.25);
  CHECK(rects[1].x.lo == 0.75);
  CHECK(rects[1].y.lo == 0.25);

  RenderConfig cfg;
  cfg.width = cfg.height = 40;
  cfg.mode = RenderMode::DeterministicDepth;
  cfg.depth = 1;
  const auto img = render(sys, cfg);
  CHECK(img.pixels[39 * 40 + 0].r == 40);    // bottom-left lies in the first image
  CHECK(img.pixels[0 * 40 + 0].r == 255);    // top-left lies in neither
}

TEST_CASE("chaos-game rendering", "[measure_lab]") {
  const auto sys = swap_family(0.75, 0.25);
  RenderConfig cfg;
  cfg.width = cfg.height = 64;
  cfg.iterations = 0;
  const auto blank = render(sys, cfg);
  for (const auto& p : blank.pixels) CHECK((p.r == 255 && p.g == 255 && p.b == 255));

  cfg.iterations = 20'000;
  cfg.overlay = true;
  const auto a = to_ppm(render(sys, cfg)), b = to_ppm(render(sys, cfg));
  CHECK(a == b);
  CHECK(a.rfind("P6\n64 64\n255\n", 0) == 0);
  CHECK(a.size() == std::string("P6\n64 64\n255\n").size() + 64 * 64 * 3);
  CHECK(to_svg(render(sys, cfg)).find("<svg") != std::string::npos);

  cfg.width = 0;
  CHECK_THROWS_AS(render(sys, cfg), Error);
}

TEST_CASE("random translations keep the images inside the square", "[measure_lab]") {
  DiagonalSystem sys = swap_family(0.75, 0.25);
  sys.maps[1].sign_c = -1;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto moved = randomize_translations(sys, seed);
    for (const auto& m : moved.maps) {
      const auto r = unit_square_image(m);
      CHECK(r.x.lo >= 0.0);
      CHECK(r.x.hi <= 1.0);
      CHECK(r.y.lo >= 0.0);
      CHECK(r.y.hi <= 1.0);
    }
  }
}
