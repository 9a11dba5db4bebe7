#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "spectra/error.hpp"
#include "spectra/ifs.hpp"
#include "spectra/log_value.hpp"

namespace spectra {

inline constexpr double kDefaultTypeClassCap = 1e8;

/// All words of length k with the same letter counts. For commuting diagonal
/// maps every per-word quantity depends only on the counts, so a sum over
/// I^k collapses to a weighted sum over type classes.
struct TypeClass {
  std::vector<std::uint32_t> counts;
  std::uint32_t k = 0;
  double log_multinomial = 0.0;  // log(k! / (k_1! ... k_N!))
};

/// Sums of logs over the letters of any word in a type class.
struct WordStats {
  double log_c = 0.0;
  double log_d = 0.0;
  double log_p = 0.0;

  double log_alpha1() const { return std::max(log_c, log_d); }
  double log_alpha2() const { return std::min(log_c, log_d); }
};

/// C(k + N - 1, N - 1) as a double (exact while it stays below 2^53).
inline double count_type_classes(std::size_t n_maps, std::size_t k) {
  double count = 1.0;
  const std::size_t r = n_maps - 1;
  for (std::size_t j = 1; j <= r; ++j) count = count * static_cast<double>(k + j) / static_cast<double>(j);
  return std::round(count);
}

/// Streams the compositions of k into N non-negative parts in lexicographic
/// order, starting from (0, ..., 0, k).
class TypeClassEnumerator {
 public:
  TypeClassEnumerator(std::size_t n_maps, std::size_t k, double cap = kDefaultTypeClassCap)
      : log_fact_(k), n_(n_maps), k_(k) {
    require(n_maps >= 1, "type classes need N >= 1");
    require(k >= 1, "type classes need k >= 1");
    const double count = count_type_classes(n_maps, k);
    if (count > cap) {
      fail(ErrorKind::CapExceeded, "type-class count C(" + std::to_string(k + n_maps - 1) + ", " +
                                       std::to_string(n_maps - 1) + ") exceeds cap");
    }
    current_.counts.assign(n_maps, 0);
    current_.counts.back() = static_cast<std::uint32_t>(k);
    current_.k = static_cast<std::uint32_t>(k);
  }

  /// Writes the next class into `out`; false once exhausted.
  bool next(TypeClass& out) {
    if (done_) return false;
    if (started_ && !advance()) {
      done_ = true;
      return false;
    }
    started_ = true;
    double lm = log_fact_(k_);
    for (auto c : current_.counts) lm -= log_fact_(c);
    current_.log_multinomial = lm;
    out = current_;
    return true;
  }

 private:
  bool advance() {
    auto& c = current_.counts;
    std::uint32_t tail = 0;
    // Rightmost position j < N-1 whose tail (j+1..N-1) is non-empty.
    for (std::size_t j = n_ - 1; j-- > 0;) {
      tail += c[j + 1];
      if (tail > 0) {
        ++c[j];
        std::fill(c.begin() + static_cast<std::ptrdiff_t>(j) + 1, c.end(), 0u);
        c.back() = tail - 1;
        return true;
      }
    }
    return false;
  }

  LogFactorials log_fact_;
  std::size_t n_;
  std::size_t k_;
  TypeClass current_;
  bool started_ = false;
  bool done_ = false;
};

template <class Fn>
void for_each_type_class(std::size_t n_maps, std::size_t k, Fn&& fn, double cap = kDefaultTypeClassCap) {
  TypeClassEnumerator e(n_maps, k, cap);
  TypeClass tc;
  while (e.next(tc)) fn(static_cast<const TypeClass&>(tc));
}

inline std::vector<TypeClass> enumerate_type_classes(std::size_t n_maps, std::size_t k,
                                                     double cap = kDefaultTypeClassCap) {
  std::vector<TypeClass> out;
  for_each_type_class(n_maps, k, [&](const TypeClass& tc) { out.push_back(tc); }, cap);
  return out;
}

inline WordStats word_stats(const DiagonalSystem& sys, const TypeClass& tc) {
  require(tc.counts.size() == sys.size(), "type class length does not match map count");
  WordStats w;
  for (std::size_t i = 0; i < sys.size(); ++i) {
    if (tc.counts[i] == 0) continue;
    const double n = tc.counts[i];
    w.log_c += n * std::log(sys.maps[i].c);
    w.log_d += n * std::log(sys.maps[i].d);
    w.log_p += n * std::log(sys.probabilities[i]);
  }
  return w;
}

/// Per-class statistics gathered once, for kernels that re-evaluate the same
/// sum at many parameter values.
struct TypeClassTable {
  std::vector<double> log_multinomial;
  std::vector<WordStats> stats;

  std::size_t size() const { return stats.size(); }
};

inline TypeClassTable tabulate_type_classes(const DiagonalSystem& sys, std::size_t k,
                                            double cap = kDefaultTypeClassCap) {
  TypeClassTable t;
  for_each_type_class(
      sys.size(), k,
      [&](const TypeClass& tc) {
        t.log_multinomial.push_back(tc.log_multinomial);
        t.stats.push_back(word_stats(sys, tc));
      },
      cap);
  return t;
}

}  // namespace spectra
