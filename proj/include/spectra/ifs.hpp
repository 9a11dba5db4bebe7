#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "spectra/error.hpp"

namespace spectra {

inline constexpr double kProbabilityTolerance = 1e-12;

/// S(x, y) = (sign_c * c * x + tx, sign_d * d * y + ty).
///
/// Signs only matter for geometry (rendering, ROSC, projected translations);
/// every spectral formula depends on |c| and |d| alone.
struct DiagonalMap {
  double c = 0.5;
  double d = 0.5;
  int sign_c = 1;
  int sign_d = 1;
  double tx = 0.0;
  double ty = 0.0;

  std::array<double, 2> apply(double x, double y) const {
    return {sign_c * c * x + tx, sign_d * d * y + ty};
  }

  friend bool operator==(const DiagonalMap&, const DiagonalMap&) = default;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
};

/// Image of [0,1]^2 under the map, as a pair of closed intervals.
struct Rect {
  Interval x;
  Interval y;
};

inline Interval image_of(double ratio, int sign, double translation, Interval in) {
  const double a = sign * ratio * in.lo + translation;
  const double b = sign * ratio * in.hi + translation;
  return {std::min(a, b), std::max(a, b)};
}

inline Rect unit_square_image(const DiagonalMap& m) {
  return {image_of(m.c, m.sign_c, m.tx, {0.0, 1.0}), image_of(m.d, m.sign_d, m.ty, {0.0, 1.0})};
}

/// A planar diagonal IFS with a Bernoulli weight vector. This is a plain
/// value type; use validate_system() to inspect it or normalized() to obtain
/// a checked copy.
struct DiagonalSystem {
  std::vector<DiagonalMap> maps;
  std::vector<double> probabilities;

  std::size_t size() const { return maps.size(); }

  friend bool operator==(const DiagonalSystem&, const DiagonalSystem&) = default;
};

enum class RoscStatus { Holds, FailsSufficientCheck, Unknown };

inline const char* to_string(RoscStatus s) {
  switch (s) {
    case RoscStatus::Holds: return "holds";
    case RoscStatus::FailsSufficientCheck: return "fails-sufficient-check";
    case RoscStatus::Unknown: return "unknown";
  }
  return "unknown";
}

struct ValidationReport {
  bool map_count_ok = false;
  bool contractions_ok = false;
  bool probabilities_ok = false;
  RoscStatus rosc = RoscStatus::Unknown;
  std::vector<std::string> problems;

  bool valid() const { return map_count_ok && contractions_ok && probabilities_ok; }
};

namespace detail {

// Open intervals (a.lo, a.hi) and (b.lo, b.hi) intersect.
inline bool open_overlap(Interval a, Interval b) { return std::min(a.hi, b.hi) > std::max(a.lo, b.lo); }

}  // namespace detail

/// Checks the contraction and probability invariants plus a sufficient test
/// for the rectangular open set condition: the images of the open unit square
/// are pairwise disjoint and lie inside it. A failed test does not disprove
/// ROSC (another rectangle might work); Unknown means the test could not run.
inline ValidationReport validate_system(const DiagonalSystem& sys) {
  ValidationReport r;
  r.map_count_ok = sys.size() >= 2;
  if (!r.map_count_ok) r.problems.push_back("need at least 2 maps, got " + std::to_string(sys.size()));

  r.contractions_ok = true;
  for (std::size_t i = 0; i < sys.size(); ++i) {
    const auto& m = sys.maps[i];
    const bool ok = m.c > 0.0 && m.c < 1.0 && m.d > 0.0 && m.d < 1.0 &&
                    (m.sign_c == 1 || m.sign_c == -1) && (m.sign_d == 1 || m.sign_d == -1) &&
                    std::isfinite(m.tx) && std::isfinite(m.ty);
    if (!ok) {
      r.contractions_ok = false;
      r.problems.push_back("map " + std::to_string(i) + ": need 0 < c, d < 1, signs in {-1, +1}, finite translation");
    }
  }

  r.probabilities_ok = sys.probabilities.size() == sys.size();
  if (!r.probabilities_ok) {
    r.problems.push_back("expected " + std::to_string(sys.size()) + " probabilities, got " +
                         std::to_string(sys.probabilities.size()));
  } else {
    double total = 0.0;
    for (std::size_t i = 0; i < sys.probabilities.size(); ++i) {
      const double p = sys.probabilities[i];
      if (!(p > 0.0 && p < 1.0)) {
        r.probabilities_ok = false;
        r.problems.push_back("probability " + std::to_string(i) + " not in (0, 1)");
      }
      total += p;
    }
    if (!(std::fabs(total - 1.0) <= kProbabilityTolerance)) {
      r.probabilities_ok = false;
      r.problems.push_back("probabilities sum to " + std::to_string(total) + ", not 1");
    }
  }

  if (!r.contractions_ok) return r;  // rosc stays Unknown

  r.rosc = RoscStatus::Holds;
  std::vector<Rect> images;
  for (const auto& m : sys.maps) images.push_back(unit_square_image(m));
  for (const auto& im : images) {
    if (im.x.lo < 0.0 || im.x.hi > 1.0 || im.y.lo < 0.0 || im.y.hi > 1.0) r.rosc = RoscStatus::FailsSufficientCheck;
  }
  for (std::size_t i = 0; i < images.size(); ++i) {
    for (std::size_t j = i + 1; j < images.size(); ++j) {
      if (detail::open_overlap(images[i].x, images[j].x) && detail::open_overlap(images[i].y, images[j].y)) {
        r.rosc = RoscStatus::FailsSufficientCheck;
      }
    }
  }
  return r;
}

/// Returns a checked copy whose probabilities sum to 1 exactly (up to
/// rounding). Throws InvalidInput if any invariant fails; inputs are only
/// renormalised when already within kProbabilityTolerance.
inline DiagonalSystem normalized(DiagonalSystem sys) {
  const auto report = validate_system(sys);
  if (!report.valid()) {
    std::string msg = "invalid system:";
    for (const auto& p : report.problems) msg += " " + p + ";";
    fail(ErrorKind::InvalidInput, msg);
  }
  const double total = std::accumulate(sys.probabilities.begin(), sys.probabilities.end(), 0.0);
  for (auto& p : sys.probabilities) p /= total;
  return sys;
}

/// Exchanges the roles of the two axes in every map.
inline DiagonalSystem swap_axes(DiagonalSystem sys) {
  for (auto& m : sys.maps) {
    std::swap(m.c, m.d);
    std::swap(m.sign_c, m.sign_d);
    std::swap(m.tx, m.ty);
  }
  return sys;
}

/// The two-map family with linear parts diag(c, d) and diag(d, c), c > d,
/// c + d <= 1, translations (0, 0) and (1 - d, 1 - c), uniform weights.
inline DiagonalSystem swap_family(double c, double d) {
  require(c > d && d > 0.0 && c + d <= 1.0, "swap family needs c > d > 0 and c + d <= 1");
  DiagonalSystem sys;
  sys.maps.push_back({c, d, 1, 1, 0.0, 0.0});
  sys.maps.push_back({d, c, 1, 1, 1.0 - d, 1.0 - c});
  sys.probabilities = {0.5, 0.5};
  return sys;
}

inline bool is_self_similar(const DiagonalSystem& sys) {
  for (const auto& m : sys.maps) {
    if (m.c != m.d) return false;
  }
  return true;
}

}  // namespace spectra
