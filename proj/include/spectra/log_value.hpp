#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace spectra {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// A real number stored as sign and log-magnitude, so that products of
/// thousands of contraction ratios neither underflow nor overflow.
class LogValue {
 public:
  constexpr LogValue() = default;  // zero

  static LogValue from_log(double log_abs, int sign = 1) {
    if (sign == 0 || log_abs == kNegInf) return {};
    LogValue v;
    v.sign_ = sign > 0 ? 1 : -1;
    v.log_abs_ = log_abs;
    return v;
  }

  static LogValue from_double(double x) {
    if (x == 0.0) return {};
    return from_log(std::log(std::fabs(x)), x > 0 ? 1 : -1);
  }

  int sign() const { return sign_; }
  double log_abs() const { return log_abs_; }
  bool is_zero() const { return sign_ == 0; }
  double to_double() const { return sign_ == 0 ? 0.0 : sign_ * std::exp(log_abs_); }

  LogValue operator-() const {
    LogValue v = *this;
    v.sign_ = -v.sign_;
    return v;
  }

  friend LogValue operator*(LogValue a, LogValue b) {
    if (a.is_zero() || b.is_zero()) return {};
    return from_log(a.log_abs_ + b.log_abs_, a.sign_ * b.sign_);
  }

  friend LogValue operator/(LogValue a, LogValue b) {
    if (a.is_zero()) return {};
    return from_log(a.log_abs_ - b.log_abs_, a.sign_ * b.sign_);
  }

  /// Positive values only; x^e.
  LogValue pow(double e) const { return is_zero() ? LogValue{} : from_log(log_abs_ * e, sign_); }

  friend LogValue operator+(LogValue a, LogValue b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    if (a.log_abs_ < b.log_abs_) std::swap(a, b);
    const double diff = b.log_abs_ - a.log_abs_;  // <= 0
    if (a.sign_ == b.sign_) return from_log(a.log_abs_ + std::log1p(std::exp(diff)), a.sign_);
    if (diff == 0.0) return {};
    return from_log(a.log_abs_ + std::log1p(-std::exp(diff)), a.sign_);
  }

  friend LogValue operator-(LogValue a, LogValue b) { return a + (-b); }

  LogValue& operator+=(LogValue b) { return *this = *this + b; }
  LogValue& operator*=(LogValue b) { return *this = *this * b; }

 private:
  int sign_ = 0;
  double log_abs_ = kNegInf;
};

/// log(sum_j exp(terms[j])). Terms are visited in the given order with
/// Neumaier-compensated accumulation, so the result depends only on the input
/// sequence and never on how the caller scheduled work.
inline double log_sum_exp(std::span<const double> terms) {
  double top = kNegInf;
  for (double t : terms) top = std::max(top, t);
  if (top == kNegInf) return kNegInf;
  if (!std::isfinite(top)) return top;
  double sum = 0.0, comp = 0.0;
  for (double t : terms) {
    const double x = std::exp(t - top);
    const double s = sum + x;
    comp += std::fabs(sum) >= x ? (sum - s) + x : (x - s) + sum;
    sum = s;
  }
  return top + std::log(sum + comp);
}

/// Kahan-compensated table of log(j!) for j = 0..n.
class LogFactorials {
 public:
  explicit LogFactorials(std::size_t n) : table_(n + 1, 0.0) {
    double sum = 0.0, comp = 0.0;
    for (std::size_t j = 2; j <= n; ++j) {
      const double y = std::log(static_cast<double>(j)) - comp;
      const double t = sum + y;
      comp = (t - sum) - y;
      sum = t;
      table_[j] = sum;
    }
  }

  double operator()(std::size_t j) const { return table_.at(j); }
  std::size_t size() const { return table_.size(); }

  double log_binomial(std::size_t n, std::size_t i) const {
    return table_.at(n) - table_.at(i) - table_.at(n - i);
  }

 private:
  std::vector<double> table_;
};

}  // namespace spectra
