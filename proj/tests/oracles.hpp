#pragma once

// Independent reference implementations. They share no code with the
// library beyond the system types: sums run over every word in I^k, counts
// use exact big integers and roots use plain bisection.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "spectra/ifs.hpp"

namespace oracle {

using boost::multiprecision::cpp_int;

/// Calls fn(word) for all N^k words in lexicographic order.
inline void for_each_word(std::size_t n, std::size_t k, const std::function<void(const std::vector<std::size_t>&)>& fn) {
  std::vector<std::size_t> w(k, 0);
  while (true) {
    fn(w);
    std::size_t j = k;
    while (j > 0 && ++w[j - 1] == n) w[--j] = 0;
    if (j == 0) return;
  }
}

inline cpp_int factorial(unsigned n) {
  cpp_int r = 1;
  for (unsigned j = 2; j <= n; ++j) r *= j;
  return r;
}

inline cpp_int multinomial(const std::vector<std::uint32_t>& counts) {
  unsigned k = 0;
  for (auto c : counts) k += c;
  cpp_int r = factorial(k);
  for (auto c : counts) r /= factorial(c);
  return r;
}

inline cpp_int binomial(unsigned n, unsigned i) { return factorial(n) / (factorial(i) * factorial(n - i)); }

/// Bisection on [lo, hi] for f with f(lo), f(hi) of opposite sign.
inline double bisect(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-13) {
  double flo = f(lo);
  for (int it = 0; it < 300 && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Root of sum_i m_i^q r_i^t = 1.
inline double similarity_root(const std::vector<double>& r, const std::vector<double>& m, double q) {
  return bisect(
      [&](double t) {
        double s = 0.0;
        for (std::size_t i = 0; i < r.size(); ++i) s += std::pow(m[i], q) * std::pow(r[i], t);
        return s - 1.0;
      },
      -200.0, 200.0);
}

struct WordProduct {
  double c = 1.0, d = 1.0, p = 1.0;
};

inline WordProduct word_product(const spectra::DiagonalSystem& sys, const std::vector<std::size_t>& w) {
  WordProduct r;
  for (auto i : w) {
    r.c *= sys.maps[i].c;
    r.d *= sys.maps[i].d;
    r.p *= sys.probabilities[i];
  }
  return r;
}

/// sum over words of p^q a1^tau_i a2^(s - tau_i), tau_i chosen by the
/// dominant axis of the word.
inline double big_psi(const spectra::DiagonalSystem& sys, std::size_t k, double s, double q, double tau1,
                      double tau2) {
  double total = 0.0;
  for_each_word(sys.size(), k, [&](const std::vector<std::size_t>& w) {
    const auto wp = word_product(sys, w);
    const double a1 = std::max(wp.c, wp.d), a2 = std::min(wp.c, wp.d);
    const double tau = wp.c >= wp.d ? tau1 : tau2;
    total += std::pow(wp.p, q) * std::pow(a1, tau) * std::pow(a2, s - tau);
  });
  return total;
}

inline double svf(double a1, double a2, double t) {
  if (t <= 1.0) return std::pow(a1, t);
  if (t <= 2.0) return a1 * std::pow(a2, t - 1.0);
  return std::pow(a1 * a2, t / 2.0);
}

/// sum over words of phi^t(T_w)^(1 - q) p_w^q.
inline double dq_sum(const spectra::DiagonalSystem& sys, std::size_t k, double t, double q) {
  double total = 0.0;
  for_each_word(sys.size(), k, [&](const std::vector<std::size_t>& w) {
    const auto wp = word_product(sys, w);
    total += std::pow(svf(std::max(wp.c, wp.d), std::min(wp.c, wp.d), t), 1.0 - q) * std::pow(wp.p, q);
  });
  return total;
}

/// Random diagonal system with c_i, d_i in [0.05, 0.6] and weights bounded
/// away from zero. Translations are irrelevant for the spectral sums.
inline spectra::DiagonalSystem random_system(std::mt19937_64& rng, std::size_t n, bool self_similar = false) {
  std::uniform_real_distribution<double> ratio(0.05, 0.6), weight(0.2, 1.0);
  spectra::DiagonalSystem sys;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double c = ratio(rng);
    const double d = self_similar ? c : ratio(rng);
    sys.maps.push_back({c, d, 1, 1, 0.0, 0.0});
    sys.probabilities.push_back(weight(rng));
    total += sys.probabilities.back();
  }
  for (auto& p : sys.probabilities) p /= total;
  return sys;
}

}  // namespace oracle
