#pragma once

// Chaos-game sampling of self-affine measures, dyadic grid moments and the
// box-counting estimate of the L^q-spectrum.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <utility>
#include <vector>

#include "spectra/error.hpp"
#include "spectra/ifs.hpp"
#include "spectra/log_value.hpp"
#include "spectra/projections.hpp"

namespace spectra {

/// Uniform double in [0, 1) from the top 53 bits; unlike
/// std::uniform_real_distribution this is identical on every platform.
inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Inverse-CDF letter sampler.
class LetterSampler {
 public:
  explicit LetterSampler(const std::vector<double>& p) : cum_(p.size()) {
    std::partial_sum(p.begin(), p.end(), cum_.begin());
  }
  std::size_t operator()(std::mt19937_64& rng) const {
    const double u = uniform01(rng) * cum_.back();
    const auto it = std::upper_bound(cum_.begin(), cum_.end(), u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cum_.begin()), cum_.size() - 1);
  }

 private:
  std::vector<double> cum_;
};

/// Square region the grid is laid over: the unit square when the maps keep
/// it invariant, otherwise the bounding square of the attractor hull.
struct Window {
  double x0 = 0.0, y0 = 0.0, side = 1.0;
};

inline Window sampling_window(const DiagonalSystem& sys) {
  bool inside = true;
  for (const auto& m : sys.maps) {
    const Rect r = unit_square_image(m);
    inside = inside && r.x.lo >= 0.0 && r.x.hi <= 1.0 && r.y.lo >= 0.0 && r.y.hi <= 1.0;
  }
  if (inside) return {};
  const auto px = project(sys, Axis::Horizontal), py = project(sys, Axis::Vertical);
  const Interval hx = attractor_hull(px.ratios, px.signs, px.translations);
  const Interval hy = attractor_hull(py.ratios, py.signs, py.translations);
  return {hx.lo, hy.lo, std::max({hx.length(), hy.length(), 1e-300})};
}

struct Cell {
  std::uint32_t row = 0;
  std::uint32_t col = 0;
  friend auto operator<=>(const Cell&, const Cell&) = default;
};

/// Empirical measure on the 2^depth x 2^depth dyadic grid. Counts are kept
/// as integers so that merging and coarsening are exact.
struct GridMeasure {
  std::uint32_t depth = 0;
  std::map<Cell, std::uint64_t> cells;
  std::uint64_t total_samples = 0;
  std::uint64_t seed = 0;

  double mass(const Cell& c) const {
    const auto it = cells.find(c);
    return it == cells.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(total_samples);
  }

  double total_mass() const {
    double s = 0.0;
    for (const auto& [cell, n] : cells) s += static_cast<double>(n) / static_cast<double>(total_samples);
    return s;
  }
};

inline constexpr std::size_t kBurnIn = 100;
inline constexpr std::uint32_t kMaxDepth = 15;

/// Visits n chaos-game points after discarding the burn-in.
template <class Visit>
void chaos_game(const DiagonalSystem& sys, std::uint64_t n, std::uint64_t seed, Visit&& visit) {
  std::mt19937_64 rng(seed);
  const LetterSampler letter(sys.probabilities);
  double x = 0.5, y = 0.5;
  for (std::uint64_t j = 0; j < kBurnIn + n; ++j) {
    const auto p = sys.maps[letter(rng)].apply(x, y);
    x = p[0];
    y = p[1];
    if (j >= kBurnIn) visit(x, y);
  }
}

inline Cell cell_of(const Window& w, double x, double y, std::uint32_t depth) {
  const double n = std::ldexp(1.0, static_cast<int>(depth));
  const double last = n - 1.0;
  const double cx = std::clamp(std::floor((x - w.x0) / w.side * n), 0.0, last);
  const double cy = std::clamp(std::floor((y - w.y0) / w.side * n), 0.0, last);
  return {static_cast<std::uint32_t>(cy), static_cast<std::uint32_t>(cx)};
}

/// Bins one orbit at the deepest requested level and coarsens it to every
/// other level, so all depths see the same sample stream.
inline std::vector<GridMeasure> sample_measures(const DiagonalSystem& sys, std::uint64_t n, std::uint64_t seed,
                                                const std::vector<std::uint32_t>& depths) {
  require(sys.size() >= 2, "sampling needs at least two maps");
  require(!depths.empty(), "sampling needs at least one depth");
  require(n >= 1, "sampling needs n >= 1");
  const std::uint32_t deepest = *std::max_element(depths.begin(), depths.end());
  require(deepest <= kMaxDepth, "grid depth above 15");
  const Window w = sampling_window(sys);

  std::map<Cell, std::uint64_t> fine;
  std::vector<std::uint64_t> dense;
  const bool use_dense = deepest <= 11;
  if (use_dense) dense.assign(std::size_t{1} << (2 * deepest), 0);
  chaos_game(sys, n, seed, [&](double x, double y) {
    const Cell c = cell_of(w, x, y, deepest);
    if (use_dense) {
      ++dense[(static_cast<std::size_t>(c.row) << deepest) | c.col];
    } else {
      ++fine[c];
    }
  });
  if (use_dense) {
    for (std::size_t idx = 0; idx < dense.size(); ++idx) {
      if (dense[idx] != 0) {
        fine.emplace(Cell{static_cast<std::uint32_t>(idx >> deepest),
                          static_cast<std::uint32_t>(idx & ((std::size_t{1} << deepest) - 1))},
                     dense[idx]);
      }
    }
  }

  std::vector<GridMeasure> out;
  for (auto depth : depths) {
    GridMeasure gm;
    gm.depth = depth;
    gm.total_samples = n;
    gm.seed = seed;
    const std::uint32_t shift = deepest - depth;
    for (const auto& [c, count] : fine) gm.cells[Cell{c.row >> shift, c.col >> shift}] += count;
    out.push_back(std::move(gm));
  }
  return out;
}

inline GridMeasure sample_measure(const DiagonalSystem& sys, std::uint64_t n, std::uint64_t seed,
                                  std::uint32_t depth) {
  return sample_measures(sys, n, seed, {depth}).front();
}

/// Coarsens to a shallower level by summing 2^(m - target) square blocks.
inline GridMeasure aggregate(const GridMeasure& gm, std::uint32_t target) {
  require(target <= gm.depth, "aggregate needs target <= depth");
  GridMeasure out;
  out.depth = target;
  out.total_samples = gm.total_samples;
  out.seed = gm.seed;
  const std::uint32_t shift = gm.depth - target;
  for (const auto& [c, n] : gm.cells) out.cells[Cell{c.row >> shift, c.col >> shift}] += n;
  return out;
}

/// Uniform Lebesgue measure on the square at the given depth.
inline GridMeasure uniform_grid_measure(std::uint32_t depth) {
  require(depth <= 10, "synthetic grid depth above 10");
  GridMeasure gm;
  gm.depth = depth;
  const std::uint32_t side = 1u << depth;
  gm.total_samples = std::uint64_t{side} * side;
  for (std::uint32_t r = 0; r < side; ++r) {
    for (std::uint32_t c = 0; c < side; ++c) gm.cells.emplace(Cell{r, c}, 1);
  }
  return gm;
}

/// log M_m(q) = log sum_cells mass^q.
inline double log_grid_moment(const GridMeasure& gm, double q) {
  require(gm.total_samples > 0, "empty grid measure");
  const double log_n = std::log(static_cast<double>(gm.total_samples));
  std::vector<double> terms;
  terms.reserve(gm.cells.size());
  for (const auto& [c, n] : gm.cells) terms.push_back(q * (std::log(static_cast<double>(n)) - log_n));
  return log_sum_exp(terms);
}

struct TauEstimate {
  double tau = 0.0;     // -slope, so tau(0) is the box dimension
  double slope = 0.0;   // of log M_m(q) against -m log 2
  double std_error = 0.0;
};

inline TauEstimate empirical_tau(const std::vector<GridMeasure>& gms, double q) {
  require(gms.size() >= 3, "empirical_tau needs at least 3 depths");
  require(q >= 0.0, "empirical_tau needs q >= 0");
  if (q == 1.0) return {};
  const std::size_t n = gms.size();
  std::vector<double> xs(n), ys(n);
  for (std::size_t j = 0; j < n; ++j) {
    xs[j] = -static_cast<double>(gms[j].depth) * std::log(2.0);
    ys[j] = log_grid_moment(gms[j], q);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    mx += xs[j];
    my += ys[j];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    sxx += (xs[j] - mx) * (xs[j] - mx);
    sxy += (xs[j] - mx) * (ys[j] - my);
  }
  require(sxx > 0.0, "empirical_tau needs distinct depths");
  TauEstimate est;
  est.slope = sxy / sxx;
  double sse = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double r = ys[j] - (my + est.slope * (xs[j] - mx));
    sse += r * r;
  }
  est.std_error = std::sqrt(sse / static_cast<double>(n - 2) / sxx);
  est.tau = -est.slope;
  return est;
}

}  // namespace spectra
