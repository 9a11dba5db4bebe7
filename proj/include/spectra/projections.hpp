#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "spectra/error.hpp"
#include "spectra/ifs.hpp"
#include "spectra/log_value.hpp"
#include "spectra/roots.hpp"

namespace spectra {

enum class Axis { Horizontal = 1, Vertical = 2 };

/// A coordinate projection of a diagonal system: a self-similar IFS on the
/// line. Maps whose projections coincide are merged into one group.
struct ProjectedSystem {
  std::vector<double> ratios;
  std::vector<int> signs;
  std::vector<double> translations;
  std::vector<double> masses;
  std::vector<std::vector<std::size_t>> merge_map;  // group -> original indices

  std::size_t size() const { return ratios.size(); }
};

inline constexpr double kMergeTolerance = 1e-12;

inline ProjectedSystem project(const DiagonalSystem& sys, Axis axis) {
  ProjectedSystem ps;
  for (std::size_t i = 0; i < sys.size(); ++i) {
    const auto& m = sys.maps[i];
    const double r = axis == Axis::Horizontal ? m.c : m.d;
    const int sg = axis == Axis::Horizontal ? m.sign_c : m.sign_d;
    const double t = axis == Axis::Horizontal ? m.tx : m.ty;
    std::size_t g = 0;
    for (; g < ps.size(); ++g) {
      if (std::fabs(ps.ratios[g] - r) <= kMergeTolerance && ps.signs[g] == sg &&
          std::fabs(ps.translations[g] - t) <= kMergeTolerance) {
        break;
      }
    }
    if (g == ps.size()) {
      ps.ratios.push_back(r);
      ps.signs.push_back(sg);
      ps.translations.push_back(t);
      ps.masses.push_back(0.0);
      ps.merge_map.emplace_back();
    }
    ps.masses[g] += sys.probabilities[i];
    ps.merge_map[g].push_back(i);
  }
  return ps;
}

/// Convex hull of the attractor of a one-dimensional IFS.
inline Interval attractor_hull(const std::vector<double>& ratios, const std::vector<int>& signs,
                               const std::vector<double>& translations) {
  // Fixed points lie in the attractor; grow until the interval is invariant.
  double lo = 0.0, hi = 0.0;
  for (std::size_t g = 0; g < ratios.size(); ++g) {
    const double fp = translations[g] / (1.0 - signs[g] * ratios[g]);
    if (g == 0 || fp < lo) lo = fp;
    if (g == 0 || fp > hi) hi = fp;
  }
  for (int it = 0; it < 10000; ++it) {
    double nlo = lo, nhi = hi;
    for (std::size_t g = 0; g < ratios.size(); ++g) {
      const Interval im = image_of(ratios[g], signs[g], translations[g], {lo, hi});
      nlo = std::min(nlo, im.lo);
      nhi = std::max(nhi, im.hi);
    }
    if (nlo == lo && nhi == hi) break;
    lo = nlo;
    hi = nhi;
  }
  return {lo, hi};
}

/// True when two distinct merged groups map the attractor hull onto
/// intervals with overlapping interiors, i.e. the open set condition cannot
/// be certified with the hull as the open set.
inline bool projection_overlaps(const ProjectedSystem& ps) {
  const Interval hull = attractor_hull(ps.ratios, ps.signs, ps.translations);
  std::vector<Interval> images;
  for (std::size_t g = 0; g < ps.size(); ++g) {
    images.push_back(image_of(ps.ratios[g], ps.signs[g], ps.translations[g], hull));
  }
  for (std::size_t a = 0; a < images.size(); ++a) {
    for (std::size_t b = a + 1; b < images.size(); ++b) {
      if (std::min(images[a].hi, images[b].hi) - std::max(images[a].lo, images[b].lo) > kMergeTolerance) {
        return true;
      }
    }
  }
  return false;
}

enum class ProjectionMode {
  AssumeSeparated,  // natural formula; labelled "assumes projected OSC after merging"
  Strict,           // refuse when the projected pieces overlap
};

/// L^q-spectrum of the projected self-similar measure: the t solving
/// sum_g m_g^q r_g^t = 1. Exact under the open set condition for the merged
/// projection.
inline double tau_projection(const ProjectedSystem& ps, double q,
                             ProjectionMode mode = ProjectionMode::AssumeSeparated) {
  require(q >= 0.0, "tau_projection needs q >= 0");
  if (mode == ProjectionMode::Strict && projection_overlaps(ps)) {
    fail(ErrorKind::InvalidInput, "projected maps overlap; the self-similar formula is not guaranteed");
  }
  if (q == 1.0) return 0.0;
  std::vector<double> a(ps.size()), b(ps.size()), terms(ps.size());
  for (std::size_t g = 0; g < ps.size(); ++g) {
    a[g] = q * std::log(ps.masses[g]);
    b[g] = std::log(ps.ratios[g]);
  }
  auto f = [&](double t) {
    for (std::size_t g = 0; g < ps.size(); ++g) terms[g] = a[g] + t * b[g];
    return log_sum_exp(terms);
  };
  return solve_monotone(f, Monotone::Decreasing, {}, "tau_projection");
}

}  // namespace spectra
