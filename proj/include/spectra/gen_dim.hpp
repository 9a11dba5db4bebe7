#pragma once

// Generalised q-dimensions of planar self-affine measures with triangular
// linear parts: the singular value function, the closed-form candidates
// u_0(q) and u(q), finite-level values of d_q, and the closed-form upper
// bounds valid for diagonal systems when q > 1.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "spectra/error.hpp"
#include "spectra/ifs.hpp"
#include "spectra/log_value.hpp"
#include "spectra/lq_spectrum.hpp"
#include "spectra/roots.hpp"
#include "spectra/type_class.hpp"

namespace spectra {

inline constexpr double kQGuardBand = 1e-6;

inline void require_q_not_one(double q) {
  require(q >= 0.0, "q must be non-negative");
  require(std::fabs(q - 1.0) > kQGuardBand, "q must stay outside [1 - 1e-6, 1 + 1e-6]");
}

// ---------------------------------------------------------------------------
// Singular value function

enum class SvfRegime { Sub1, Mid, Area };

inline SvfRegime svf_regime(double s) {
  if (s < 1.0) return SvfRegime::Sub1;
  if (s <= 2.0) return SvfRegime::Mid;
  return SvfRegime::Area;
}

namespace detail {

inline double log_svf(double la1, double la2, double s) {
  if (s <= 0.0) return 0.0;
  if (s <= 1.0) return s * la1;
  if (s <= 2.0) return la1 + (s - 1.0) * la2;
  return 0.5 * s * (la1 + la2);
}

}  // namespace detail

/// phi^s for a planar map with singular values exp(la1) >= exp(la2).
inline LogValue svf(double log_alpha1, double log_alpha2, double s) {
  require(s >= 0.0, "svf needs s >= 0");
  require(log_alpha1 >= log_alpha2, "svf needs alpha1 >= alpha2");
  return LogValue::from_log(detail::log_svf(log_alpha1, log_alpha2, s));
}

// ---------------------------------------------------------------------------
// One-level roots

struct FmRoots {
  double t1 = 0.0;  // sum p^q c^(t(1-q)) = 1
  double t2 = 0.0;  // sum p^q d^(t(1-q)) = 1
  double s1 = 0.0;  // sum p^q (c d^(s-1))^(1-q) = 1
  double s2 = 0.0;  // sum p^q (d c^(s-1))^(1-q) = 1
};

namespace detail {

inline Monotone direction_for(double q) { return q > 1.0 ? Monotone::Increasing : Monotone::Decreasing; }

// log sum_i exp(q log p_i + (1 - q) * exponent_i(t))
template <class Exponent>
double log_axis_sum(const DiagonalSystem& sys, double q, Exponent&& exponent) {
  std::vector<double> terms(sys.size());
  for (std::size_t i = 0; i < sys.size(); ++i) {
    terms[i] = q * std::log(sys.probabilities[i]) + (1.0 - q) * exponent(std::log(sys.maps[i].c), std::log(sys.maps[i].d));
  }
  return log_sum_exp(terms);
}

inline double log_sum_t_c(const DiagonalSystem& sys, double q, double t) {
  return log_axis_sum(sys, q, [t](double lc, double) { return t * lc; });
}
inline double log_sum_t_d(const DiagonalSystem& sys, double q, double t) {
  return log_axis_sum(sys, q, [t](double, double ld) { return t * ld; });
}
// c^(2-t) (cd)^(t-1) = c d^(t-1)
inline double log_sum_s_c(const DiagonalSystem& sys, double q, double t) {
  return log_axis_sum(sys, q, [t](double lc, double ld) { return lc + (t - 1.0) * ld; });
}
inline double log_sum_s_d(const DiagonalSystem& sys, double q, double t) {
  return log_axis_sum(sys, q, [t](double lc, double ld) { return ld + (t - 1.0) * lc; });
}

}  // namespace detail

inline FmRoots fm_roots(const DiagonalSystem& sys, double q) {
  require_q_not_one(q);
  const auto dir = detail::direction_for(q);
  FmRoots r;
  r.t1 = solve_monotone([&](double t) { return detail::log_sum_t_c(sys, q, t); }, dir, {}, "t1");
  r.t2 = solve_monotone([&](double t) { return detail::log_sum_t_d(sys, q, t); }, dir, {}, "t2");
  r.s1 = solve_monotone([&](double t) { return detail::log_sum_s_c(sys, q, t); }, dir, {}, "s1");
  r.s2 = solve_monotone([&](double t) { return detail::log_sum_s_d(sys, q, t); }, dir, {}, "s2");
  return r;
}

// ---------------------------------------------------------------------------
// Piecewise pressure functions

enum class P0Variant {
  Max,          // P_0
  MinForQAbove1 // P_0^*: P_0 for q < 1, minimum of the two sums for q > 1
};

/// log of the two inner sums of P_0 at level t in [0, 2].
inline std::array<double, 2> p0_log_sums(const DiagonalSystem& sys, double t, double q) {
  if (t < 1.0) return {detail::log_sum_t_c(sys, q, t), detail::log_sum_t_d(sys, q, t)};
  return {detail::log_sum_s_c(sys, q, t), detail::log_sum_s_d(sys, q, t)};
}

inline double p0_star(const DiagonalSystem& sys, double t, double q, P0Variant variant) {
  require_q_not_one(q);
  require(t >= 0.0 && t <= 2.0, "P_0 needs t in [0, 2]");
  const auto s = p0_log_sums(sys, t, q);
  const bool use_min = variant == P0Variant::MinForQAbove1 && q > 1.0;
  return std::exp(use_min ? std::min(s[0], s[1]) : std::max(s[0], s[1]));
}

struct URoots {
  double u0 = 2.0;
  double u = 2.0;
  bool u0_found = false;  // false: no crossing in [0, 2], value set to 2
  bool u_found = false;
};

namespace detail {

inline std::optional<double> solve_p0(const DiagonalSystem& sys, double q, P0Variant variant) {
  const bool use_min = variant == P0Variant::MinForQAbove1 && q > 1.0;
  auto f = [&](double t) {
    const auto s = p0_log_sums(sys, t, q);
    return use_min ? std::min(s[0], s[1]) : std::max(s[0], s[1]);
  };
  const auto dir = direction_for(q);
  const double sign = dir == Monotone::Increasing ? 1.0 : -1.0;
  // The kernel is monotone by construction; confirm on a coarse grid.
  double prev = sign * f(0.0);
  for (int j = 1; j <= 8; ++j) {
    const double cur = sign * f(0.25 * j);
    if (cur < prev - 1e-12) fail(ErrorKind::SolverFailure, "P_0 not monotone in t");
    prev = cur;
  }
  if (sign * f(2.0) < 0.0) return std::nullopt;  // never reaches 1 on [0, 2]
  if (sign * f(0.0) > 0.0) return 0.0;
  RootOptions opt;
  opt.lo = 0.0;
  opt.hi = 2.0;
  opt.fixed_bracket = true;
  return solve_monotone(f, dir, opt, "P_0 root");
}

}  // namespace detail

inline URoots u_roots(const DiagonalSystem& sys, double q) {
  require_q_not_one(q);
  URoots r;
  if (auto v = detail::solve_p0(sys, q, P0Variant::Max)) {
    r.u0 = *v;
    r.u0_found = true;
  }
  if (q < 1.0) {
    r.u = r.u0;
    r.u_found = r.u0_found;
  } else if (auto v = detail::solve_p0(sys, q, P0Variant::MinForQAbove1)) {
    r.u = *v;
    r.u_found = true;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Finite-level d_q

/// Level-k sum of phi^t(T_i)^(1-q) p_i^q, collapsed over type classes.
class DqKernel {
 public:
  DqKernel(const DiagonalSystem& sys, std::size_t k, double q, double cap = kDefaultTypeClassCap) : q_(q) {
    const auto table = tabulate_type_classes(sys, k, cap);
    for (std::size_t j = 0; j < table.size(); ++j) {
      offset_.push_back(table.log_multinomial[j] + q * table.stats[j].log_p);
      la1_.push_back(table.stats[j].log_alpha1());
      la2_.push_back(table.stats[j].log_alpha2());
    }
    scratch_.resize(offset_.size());
  }

  double log_value(double t) const {
    for (std::size_t j = 0; j < offset_.size(); ++j) {
      scratch_[j] = offset_[j] + (1.0 - q_) * detail::log_svf(la1_[j], la2_[j], t);
    }
    return log_sum_exp(scratch_);
  }

  /// The t >= 0 where the sum equals 1; beyond t = 2 phi^t uses the area form.
  double root() const {
    const auto dir = detail::direction_for(q_);
    const double sign = dir == Monotone::Increasing ? 1.0 : -1.0;
    auto f = [this](double t) { return log_value(t); };
    if (sign * f(0.0) >= 0.0) return 0.0;
    double hi = 2.0;
    while (sign * f(hi) < 0.0) {
      hi *= 2.0;
      if (hi > 1e6) fail(ErrorKind::SolverFailure, "dq_finite_k: no crossing");
    }
    RootOptions opt;
    opt.lo = 0.0;
    opt.hi = hi;
    opt.fixed_bracket = true;
    return solve_monotone(f, dir, opt, "dq_finite_k");
  }

 private:
  double q_;
  std::vector<double> offset_, la1_, la2_;
  mutable std::vector<double> scratch_;
};

inline double dq_finite_k(const DiagonalSystem& sys, std::size_t k, double q) {
  require_q_not_one(q);
  require(k >= 1, "dq_finite_k needs k >= 1");
  return DqKernel(sys, k, q).root();
}

// ---------------------------------------------------------------------------
// The two-map swap family

struct CounterexampleLower {
  double value = 0.0;
  double u = 0.0;
  double delta = 0.0;
  double correction = 0.0;  // value - u, strictly positive
};

/// d_q >= u + 2 log(delta) / ((q - 1) log(cd)) with x = (c/d)^(u(q-1)),
/// delta = 2 sqrt(x) / (x + 1), u solving 2^-q (c^(u(1-q)) + d^(u(1-q))) = 1.
inline CounterexampleLower miao_counterexample_lower(double c, double d, double q) {
  require(c > d && d > 0.0 && c + d <= 1.0, "swap family needs c > d > 0 and c + d <= 1");
  require(q > 1.0, "miao_counterexample_lower needs q > 1");
  const double lc = std::log(c), ld = std::log(d), l2 = std::log(2.0);
  CounterexampleLower r;
  r.u = solve_monotone(
      [&](double u) {
        const double t[2] = {-q * l2 + u * (1.0 - q) * lc, -q * l2 + u * (1.0 - q) * ld};
        return log_sum_exp(t);
      },
      Monotone::Increasing, {}, "swap-family u(q)");
  const double log_x = r.u * (q - 1.0) * std::log(c / d);
  const double log_delta = l2 + 0.5 * log_x - (log_x + std::log1p(std::exp(-log_x)));
  r.delta = std::exp(log_delta);
  r.correction = 2.0 * log_delta / ((q - 1.0) * std::log(c * d));
  if (!(r.correction > 0.0)) fail(ErrorKind::SolverFailure, "swap-family correction must be positive");
  r.value = r.u + r.correction;
  return r;
}

// ---------------------------------------------------------------------------
// Closed-form upper bounds for q > 1

enum class UpperRegime { CaseA, CaseBi, CaseBii, NoRoot };

inline const char* to_string(UpperRegime r) {
  switch (r) {
    case UpperRegime::CaseA: return "a";
    case UpperRegime::CaseBi: return "b(i)";
    case UpperRegime::CaseBii: return "b(ii)";
    case UpperRegime::NoRoot: return "none";
  }
  return "none";
}

struct UpperBoundBundle {
  std::optional<double> U1, U2, V1, V2, W1, W2;
  double A = 0.0, B = 0.0, C = 0.0, D = 0.0;
  double fraction1 = 0.0, fraction2 = 0.0;  // case (a) ratios, both < 1
  std::optional<double> upper;
  UpperRegime regime = UpperRegime::NoRoot;
};

namespace detail {

// sum_i w_i f_i and sum_i w_i g_i for w_i = exp(log_w_i)
struct WeightedLogs {
  double log_c = 0.0, log_d = 0.0, log_ratio = 0.0;  // weights times log c, log d, log(c/d)
};

template <class LogWeight>
WeightedLogs weighted_logs(const DiagonalSystem& sys, double q, LogWeight&& lw) {
  WeightedLogs r;
  for (std::size_t i = 0; i < sys.size(); ++i) {
    const double lc = std::log(sys.maps[i].c), ld = std::log(sys.maps[i].d);
    const double w = std::exp(q * std::log(sys.probabilities[i]) + lw(lc, ld));
    r.log_c += w * lc;
    r.log_d += w * ld;
    r.log_ratio += w * (lc - ld);
  }
  return r;
}

inline double pos(double x) { return std::max(0.0, x); }

}  // namespace detail

/// Per-root weighted log sums; a non-negative value is the corresponding
/// equality condition.
struct EqualityConditions {
  double t1 = 0.0;  // sum p^q c^(t1(1-q)) log(c/d)
  double t2 = 0.0;  // sum p^q d^(t2(1-q)) log(d/c)
  double s1 = 0.0;  // sum p^q c^(1-q) d^((s1-1)(1-q)) log(c/d)
  double s2 = 0.0;  // sum p^q d^(1-q) c^((s2-1)(1-q)) log(d/c)
};

inline EqualityConditions equality_condition_values(const DiagonalSystem& sys, double q, const FmRoots& r) {
  EqualityConditions cc;
  cc.t1 = detail::weighted_logs(sys, q, [&](double lc, double) { return r.t1 * (1.0 - q) * lc; }).log_ratio;
  cc.t2 = -detail::weighted_logs(sys, q, [&](double, double ld) { return r.t2 * (1.0 - q) * ld; }).log_ratio;
  cc.s1 = detail::weighted_logs(sys, q, [&](double lc, double ld) {
            return (1.0 - q) * lc + (r.s1 - 1.0) * (1.0 - q) * ld;
          }).log_ratio;
  cc.s2 = -detail::weighted_logs(sys, q, [&](double lc, double ld) {
             return (1.0 - q) * ld + (r.s2 - 1.0) * (1.0 - q) * lc;
           }).log_ratio;
  return cc;
}

inline UpperBoundBundle upper_bounds(const DiagonalSystem& sys, double q, const FmRoots& r, const URoots& u) {
  require(q > 1.0 + kQGuardBand, "upper_bounds needs q > 1");
  UpperBoundBundle b;

  const auto e = detail::weighted_logs(sys, q, [&](double lc, double) { return r.t1 * (1.0 - q) * lc; });
  const auto f = detail::weighted_logs(sys, q, [&](double, double ld) { return r.t2 * (1.0 - q) * ld; });
  b.A = (1.0 - r.t1) * (-e.log_ratio) / e.log_d;
  b.B = (1.0 - r.t2) * f.log_ratio / f.log_c;
  b.C = e.log_ratio / e.log_c;
  b.D = (-f.log_ratio) / f.log_d;

  if (!u.u_found || u.u >= 2.0) return b;

  if (u.u >= 1.0) {
    b.regime = UpperRegime::CaseA;
    const auto a1 = detail::weighted_logs(
        sys, q, [&](double lc, double ld) { return (1.0 - q) * lc + (r.s1 - 1.0) * (1.0 - q) * ld; });
    const auto a2 = detail::weighted_logs(
        sys, q, [&](double lc, double ld) { return (1.0 - q) * ld + (r.s2 - 1.0) * (1.0 - q) * lc; });
    b.fraction1 = a1.log_ratio / a1.log_c;
    b.fraction2 = (-a2.log_ratio) / a2.log_d;
    if (!(b.fraction1 < 1.0) || !(b.fraction2 < 1.0)) {
      fail(ErrorKind::SolverFailure, "upper-bound fractions must be < 1");
    }
    b.U1 = r.s1 + detail::pos((2.0 - r.s1) * b.fraction1);
    b.U2 = r.s2 + detail::pos((2.0 - r.s2) * b.fraction2);
    b.upper = std::min(*b.U1, *b.U2);
    return b;
  }

  b.V1 = r.t1 + detail::pos(r.t1 * e.log_ratio / e.log_d);
  b.V2 = r.t2 + detail::pos(r.t2 * (-f.log_ratio) / f.log_c);
  if (std::min(*b.V1, *b.V2) <= 1.0) {
    b.regime = UpperRegime::CaseBi;
    b.upper = std::min(*b.V1, *b.V2);
  } else {
    b.regime = UpperRegime::CaseBii;
    b.W1 = r.t1 + detail::pos(std::max(b.A, b.C));
    b.W2 = r.t2 + detail::pos(std::max(b.B, b.D));
    b.upper = std::min(*b.W1, *b.W2);
  }
  return b;
}

inline UpperBoundBundle upper_bounds(const DiagonalSystem& sys, double q) {
  return upper_bounds(sys, q, fm_roots(sys, q), u_roots(sys, q));
}

inline constexpr double kRootMatchTolerance = 1e-10;

struct EqualityReport {
  EqualityConditions conditions;
  bool aligned = false;  // c_i >= d_i for all i, or c_i <= d_i for all i
  std::vector<std::string> realised_by;  // which of t1, t2, s1, s2 equal u
  std::optional<double> exact;
};

inline EqualityReport equality_report(const DiagonalSystem& sys, double q, const FmRoots& r, const URoots& u) {
  require(q > 1.0 + kQGuardBand, "corollary_equality needs q > 1");
  EqualityReport rep;
  rep.conditions = equality_condition_values(sys, q, r);
  const bool all_ge = std::all_of(sys.maps.begin(), sys.maps.end(), [](const DiagonalMap& m) { return m.c >= m.d; });
  const bool all_le = std::all_of(sys.maps.begin(), sys.maps.end(), [](const DiagonalMap& m) { return m.c <= m.d; });
  rep.aligned = all_ge || all_le;
  if (!u.u_found) return rep;

  auto matches = [&](double root) { return std::fabs(root - u.u) <= kRootMatchTolerance; };
  bool holds = rep.aligned;
  if (u.u <= 1.0 + kRootMatchTolerance) {
    if (matches(r.t1)) {
      rep.realised_by.push_back("t1");
      holds = holds || rep.conditions.t1 >= 0.0;
    }
    if (matches(r.t2)) {
      rep.realised_by.push_back("t2");
      holds = holds || rep.conditions.t2 >= 0.0;
    }
  }
  if (u.u >= 1.0 - kRootMatchTolerance) {
    if (matches(r.s1)) {
      rep.realised_by.push_back("s1");
      holds = holds || rep.conditions.s1 >= 0.0;
    }
    if (matches(r.s2)) {
      rep.realised_by.push_back("s2");
      holds = holds || rep.conditions.s2 >= 0.0;
    }
  }
  if (holds) rep.exact = u.u;
  return rep;
}

inline std::optional<double> corollary_equality(const DiagonalSystem& sys, double q) {
  return equality_report(sys, q, fm_roots(sys, q), u_roots(sys, q)).exact;
}

/// D_q = tau(q) / (1 - q).
inline double generalised_dimension(double tau, double q) {
  require(q != 1.0, "generalised dimension is undefined at q = 1");
  return tau / (1.0 - q);
}

// ---------------------------------------------------------------------------
// Pipeline

/// Upper-triangular input. Closed forms only read the diagonal entries;
/// finite-level sums need a genuinely diagonal system.
struct TriangularSystem {
  DiagonalSystem diagonal;
  std::vector<double> off_diagonal;  // one per map, 0 when diagonal

  bool is_diagonal() const {
    return std::all_of(off_diagonal.begin(), off_diagonal.end(), [](double b) { return b == 0.0; });
  }
};

enum class GenDimCase { Known_qlt1, Bounds_qgt1, Exact_qgt1 };

inline const char* to_string(GenDimCase c) {
  switch (c) {
    case GenDimCase::Known_qlt1: return "Known_qlt1";
    case GenDimCase::Bounds_qgt1: return "Bounds_qgt1";
    case GenDimCase::Exact_qgt1: return "Exact_qgt1";
  }
  return "Bounds_qgt1";
}

struct GenDimPoint {
  double q = 0.0;
  FmRoots roots;
  URoots u;
  double lower = 0.0;
  double upper = std::numeric_limits<double>::infinity();
  std::optional<double> exact;
  std::optional<double> counterexample_lower;
  std::vector<std::pair<std::size_t, double>> dq_finite_k;
  GenDimCase dim_case = GenDimCase::Bounds_qgt1;
  EqualityConditions conditions;
  UpperBoundBundle bundle;
  bool diagonal_entry_formulas = false;
  std::vector<Provenance> methods;

  /// The two plotted equality conditions: the t-conditions when u <= 1,
  /// otherwise the s-conditions.
  std::pair<double, double> plotted_conditions() const {
    if (u.u <= 1.0) return {conditions.t1, conditions.t2};
    return {conditions.s1, conditions.s2};
  }
};

inline GenDimPoint gen_dim_point(const TriangularSystem& tsys, double q, const std::vector<std::size_t>& ks = {}) {
  require_q_not_one(q);
  const auto& sys = tsys.diagonal;
  if (!ks.empty()) require(tsys.is_diagonal(), "dq_finite_k requires a diagonal system");
  GenDimPoint pt;
  pt.q = q;
  pt.diagonal_entry_formulas = !tsys.is_diagonal();
  pt.roots = fm_roots(sys, q);
  pt.u = u_roots(sys, q);
  pt.conditions = equality_condition_values(sys, q, pt.roots);
  for (std::size_t k : ks) pt.dq_finite_k.emplace_back(k, dq_finite_k(sys, k, q));

  if (q < 1.0) {
    pt.dim_case = GenDimCase::Known_qlt1;
    pt.exact = pt.u.u0;
    pt.lower = pt.upper = pt.u.u0;
    pt.methods.push_back({"exact", "u0(q) (known for q < 1)"});
    return pt;
  }

  pt.lower = pt.u.u;
  pt.methods.push_back({"lower", "u(q)"});
  if (auto fam = detect_swap_family(sys)) {
    pt.counterexample_lower = miao_counterexample_lower(fam->c, fam->d, q).value;
    if (*pt.counterexample_lower > pt.lower) {
      pt.lower = *pt.counterexample_lower;
      pt.methods.back() = {"lower", "swap-family quantitative bound"};
    }
  }
  pt.bundle = upper_bounds(sys, q, pt.roots, pt.u);
  if (pt.bundle.upper) {
    pt.upper = *pt.bundle.upper;
    pt.methods.push_back({"upper", std::string("closed-form bound, case ") + to_string(pt.bundle.regime)});
  }
  const auto cor = equality_report(sys, q, pt.roots, pt.u);
  if (cor.exact) {
    pt.exact = cor.exact;
    pt.dim_case = GenDimCase::Exact_qgt1;
    pt.methods.push_back({"exact", cor.aligned ? "u(q) (aligned contractions)" : "u(q) (equality condition holds)"});
  }
  if (pt.diagonal_entry_formulas) pt.methods.push_back({"all", "diagonal-entry formulas"});
  return pt;
}

inline GenDimPoint gen_dim_point(const DiagonalSystem& sys, double q, const std::vector<std::size_t>& ks = {}) {
  return gen_dim_point(TriangularSystem{sys, std::vector<double>(sys.size(), 0.0)}, q, ks);
}

}  // namespace spectra
