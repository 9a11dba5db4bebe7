#pragma once

// Ratio of the upper half to the lower half of the binomial expansion of
// (1 + x)^k for odd k and x > 1, which grows like ((1 + x) / (2 sqrt x))^k.

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "spectra/error.hpp"
#include "spectra/log_value.hpp"

namespace spectra {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline constexpr std::size_t kExactSplitCap = 64;

struct SplitRatio {
  std::size_t k = 0;
  double x = 0.0;
  LogValue numerator;    // sum_{i >= ceil(k/2)} C(k,i) x^i
  LogValue denominator;  // sum_{i <= floor(k/2)} C(k,i) x^i
  std::optional<Rational> exact;

  double log_ratio() const { return numerator.log_abs() - denominator.log_abs(); }
  double root() const { return std::exp(log_ratio() / static_cast<double>(k)); }  // R_k^(1/k)
};

namespace detail {

inline void require_split_args(std::size_t k, bool x_above_one) {
  require(k >= 1 && k % 2 == 1, "split ratio needs odd k >= 1, got " + std::to_string(k));
  require(x_above_one, "split ratio needs x > 1");
}

inline BigInt binomial_exact(std::size_t n, std::size_t i) {
  BigInt r = 1;
  for (std::size_t j = 1; j <= i; ++j) {
    r *= n - i + j;
    r /= j;
  }
  return r;
}

}  // namespace detail

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

/// Exact R_k for rational x = a/b: the common factor b^k cancels, leaving
/// sum_{upper} C(k,i) a^i b^(k-i) / sum_{lower} C(k,i) a^i b^(k-i).
inline Rational split_ratio_exact(std::size_t k, const Rational& x) {
  detail::require_split_args(k, x > 1);
  const BigInt a = boost::multiprecision::numerator(x);
  const BigInt b = boost::multiprecision::denominator(x);
  BigInt upper = 0, lower = 0;
  for (std::size_t i = 0; i <= k; ++i) {
    const BigInt term = detail::binomial_exact(k, i) * boost::multiprecision::pow(a, static_cast<unsigned>(i)) *
                        boost::multiprecision::pow(b, static_cast<unsigned>(k - i));
    (2 * i > k ? upper : lower) += term;
  }
  return Rational(upper, lower);
}

inline SplitRatio split_ratio(std::size_t k, double x) {
  detail::require_split_args(k, x > 1.0);
  SplitRatio r;
  r.k = k;
  r.x = x;
  const LogFactorials lf(k);
  const double lx = std::log(x);
  std::vector<double> hi, lo;
  for (std::size_t i = 0; i <= k; ++i) {
    const double t = lf.log_binomial(k, i) + static_cast<double>(i) * lx;
    (2 * i > k ? hi : lo).push_back(t);
  }
  r.numerator = LogValue::from_log(log_sum_exp(hi));
  r.denominator = LogValue::from_log(log_sum_exp(lo));
  return r;
}

/// Log-space evaluation plus the exact rational when k <= exact_cap.
inline SplitRatio split_ratio(std::size_t k, const Rational& x, std::size_t exact_cap = kExactSplitCap) {
  auto r = split_ratio(k, to_double(x));
  if (k <= exact_cap) r.exact = split_ratio_exact(k, x);
  return r;
}

/// lim R_k^(1/k) = (1 + x) / (2 sqrt x), which exceeds 1 for x > 1.
inline double growth_limit(double x) {
  require(x > 1.0, "growth_limit needs x > 1");
  const double v = (1.0 + x) / (2.0 * std::sqrt(x));
  if (!(v >= 1.0)) fail(ErrorKind::SolverFailure, "growth limit below 1");
  return v;
}

struct SandwichReport {
  std::size_t k = 0;
  Rational ratio;
  Rational lower;  // (1+x)^k / (2^k x^floor(k/2)) - 1
  Rational upper;  // (k+1) (1+x)^k / (2^k x^floor(k/2))
  bool lower_holds = false;
  bool upper_holds = false;

  bool holds() const { return lower_holds && upper_holds; }
};

/// Both inequalities that squeeze R_k, checked in exact arithmetic.
inline SandwichReport sandwich_check(std::size_t k, const Rational& x, std::size_t exact_cap = kExactSplitCap) {
  detail::require_split_args(k, x > 1);
  require(k <= exact_cap, "sandwich_check: k above exact cap");
  SandwichReport rep;
  rep.k = k;
  rep.ratio = split_ratio_exact(k, x);
  Rational pw = 1;
  const Rational one_plus_x = 1 + x;
  for (std::size_t j = 0; j < k; ++j) pw *= one_plus_x / 2;
  for (std::size_t j = 0; j < k / 2; ++j) pw /= x;
  rep.lower = pw - 1;
  rep.upper = pw * static_cast<long long>(k + 1);
  rep.lower_holds = rep.ratio >= rep.lower;
  rep.upper_holds = rep.ratio <= rep.upper;
  return rep;
}

}  // namespace spectra
