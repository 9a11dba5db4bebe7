#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "spectra/error.hpp"

namespace spectra {

enum class Monotone { Increasing, Decreasing };

struct RootOptions {
  double lo = -64.0;
  double hi = 64.0;
  double tol = 1e-12;
  int max_expansions = 40;
  int max_iterations = 400;
  /// When set, the bracket is never widened past [lo, hi]; a missing sign
  /// change is then an error the caller is expected to handle.
  bool fixed_bracket = false;
};

/// Bisection for the unique zero of a strictly monotone function. The bracket
/// grows geometrically outward until it straddles the root.
template <class F>
double solve_monotone(F&& f, Monotone dir, const RootOptions& opt, const std::string& what) {
  // Normalise to an increasing function.
  auto g = [&](double x) {
    const double v = f(x);
    return dir == Monotone::Increasing ? v : -v;
  };
  double lo = opt.lo, hi = opt.hi;
  double glo = g(lo), ghi = g(hi);
  double width = hi - lo;
  int expansions = 0;
  while (!(glo <= 0.0 && ghi >= 0.0)) {
    if (std::isnan(glo) || std::isnan(ghi) || opt.fixed_bracket || ++expansions > opt.max_expansions) {
      fail(ErrorKind::SolverFailure, what + ": no sign change in [" + std::to_string(lo) + ", " +
                                         std::to_string(hi) + "]");
    }
    width *= 2.0;
    if (glo > 0.0) {
      hi = lo;
      ghi = glo;
      lo -= width;
      glo = g(lo);
    } else {
      lo = hi;
      glo = ghi;
      hi += width;
      ghi = g(hi);
    }
  }
  if (glo == 0.0) return lo;
  if (ghi == 0.0) return hi;
  for (int it = 0; it < opt.max_iterations && hi - lo > opt.tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double gm = g(mid);
    if (std::isnan(gm)) fail(ErrorKind::SolverFailure, what + ": NaN during bisection");
    if (gm == 0.0) return mid;
    if (gm < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Zeros of a continuous function on [lo, hi]: scans a uniform grid for
/// sign changes, then bisects each bracket to tol.
template <class F>
std::vector<double> grid_crossings(F&& f, double lo, double hi, double step, double tol = 1e-10) {
  std::vector<double> out;
  const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
  double a = lo, fa = f(a);
  for (long j = 1; j <= n; ++j) {
    const double b = lo + static_cast<double>(j) * step;
    const double fb = f(b);
    if (fa == 0.0) {
      out.push_back(a);
    } else if ((fa < 0.0) != (fb < 0.0) && fb != 0.0) {
      double x0 = a, x1 = b, f0 = fa;
      while (x1 - x0 > tol) {
        const double m = 0.5 * (x0 + x1);
        const double fm = f(m);
        if ((fm < 0.0) == (f0 < 0.0)) {
          x0 = m;
          f0 = fm;
        } else {
          x1 = m;
        }
      }
      out.push_back(0.5 * (x0 + x1));
    }
    a = b;
    fa = fb;
  }
  if (fa == 0.0) out.push_back(a);
  return out;
}

}  // namespace spectra
