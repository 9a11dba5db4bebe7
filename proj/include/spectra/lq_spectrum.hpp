#pragma once

// Moment scaling function of a planar diagonal self-affine measure: the
// finite-level approximations gamma_k, the one-level closed forms gamma_A and
// gamma_B, the case analysis built on them, and the closed-form lower bounds
// L_A, L_B together with the variational certificate that justifies them.

#include <algorithm>
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
#include "spectra/projections.hpp"
#include "spectra/roots.hpp"
#include "spectra/type_class.hpp"

namespace spectra {

inline constexpr double kTrichotomyTolerance = 1e-10;

/// Projection spectra at one q; everything else in this module is a function
/// of the system and this context.
struct QContext {
  double q = 0.0;
  double tau1 = 0.0;
  double tau2 = 0.0;
};

inline QContext make_q_context(const DiagonalSystem& sys, double q,
                               ProjectionMode mode = ProjectionMode::AssumeSeparated) {
  require(q >= 0.0, "q must be non-negative");
  return {q, tau_projection(project(sys, Axis::Horizontal), q, mode),
          tau_projection(project(sys, Axis::Vertical), q, mode)};
}

// ---------------------------------------------------------------------------
// q-modified singular value function and its level-k sums

/// Projection spectrum attached to a word: tau1 when its rectangle is at
/// least as wide as it is tall, tau2 otherwise.
inline double tau_for(const WordStats& w, const QContext& ctx) {
  return w.log_c >= w.log_d ? ctx.tau1 : ctx.tau2;
}

inline LogValue psi_value(const WordStats& w, double s, const QContext& ctx) {
  const double t = tau_for(w, ctx);
  return LogValue::from_log(ctx.q * w.log_p + t * w.log_alpha1() + (s - t) * w.log_alpha2());
}

inline LogValue psi_value(const DiagonalSystem& sys, const TypeClass& tc, double s, double q, double tau1,
                          double tau2) {
  return psi_value(word_stats(sys, tc), s, QContext{q, tau1, tau2});
}

/// log Psi_k(s) = log sum_j exp(offset_j + s * slope_j), one term per type
/// class. Built once per (k, q) and evaluated at many s.
class PsiKernel {
 public:
  PsiKernel(const DiagonalSystem& sys, std::size_t k, const QContext& ctx, double cap = kDefaultTypeClassCap)
      : k_(k) {
    const auto table = tabulate_type_classes(sys, k, cap);
    offset_.reserve(table.size());
    slope_.reserve(table.size());
    for (std::size_t j = 0; j < table.size(); ++j) {
      const auto& w = table.stats[j];
      const double t = tau_for(w, ctx);
      offset_.push_back(table.log_multinomial[j] + ctx.q * w.log_p + t * (w.log_alpha1() - w.log_alpha2()));
      slope_.push_back(w.log_alpha2());
    }
    scratch_.resize(offset_.size());
  }

  double log_value(double s) const {
    for (std::size_t j = 0; j < offset_.size(); ++j) scratch_[j] = offset_[j] + s * slope_[j];
    return log_sum_exp(scratch_);
  }

  std::size_t k() const { return k_; }

  /// gamma_k: the s with Psi_k(s) = 1. Psi_k is strictly decreasing in s
  /// because every alpha_2 < 1.
  double root(double tol = 1e-11) const {
    RootOptions opt;
    opt.tol = tol;
    return solve_monotone([this](double s) { return log_value(s); }, Monotone::Decreasing, opt,
                          "gamma_k (k=" + std::to_string(k_) + ")");
  }

 private:
  std::size_t k_;
  std::vector<double> offset_;
  std::vector<double> slope_;
  mutable std::vector<double> scratch_;
};

inline LogValue big_psi(const DiagonalSystem& sys, std::size_t k, double s, const QContext& ctx) {
  return LogValue::from_log(PsiKernel(sys, k, ctx).log_value(s));
}

inline LogValue big_psi(const DiagonalSystem& sys, std::size_t k, double s, double q) {
  return big_psi(sys, k, s, make_q_context(sys, q));
}

/// Finite-level root. Under submultiplicativity of Psi_k this is an upper
/// bound for gamma(q).
inline double gamma_k(const DiagonalSystem& sys, std::size_t k, const QContext& ctx) {
  return PsiKernel(sys, k, ctx).root();
}

inline double gamma_k(const DiagonalSystem& sys, std::size_t k, double q) {
  return gamma_k(sys, k, make_q_context(sys, q));
}

struct GammaSweep {
  std::vector<std::size_t> ks;
  std::vector<double> values;
  std::optional<double> aitken;  // non-rigorous extrapolation of the tail
};

/// gamma_k for k = 2, 4, ..., k_cap (powers of two), plus Aitken's delta^2
/// extrapolation from the last three values.
inline GammaSweep gamma_k_sweep(const DiagonalSystem& sys, std::size_t k_cap, const QContext& ctx) {
  GammaSweep sw;
  for (std::size_t k = 2; k <= k_cap; k *= 2) {
    sw.ks.push_back(k);
    sw.values.push_back(gamma_k(sys, k, ctx));
  }
  if (sw.values.size() >= 3) {
    const std::size_t n = sw.values.size();
    const double g0 = sw.values[n - 3], g1 = sw.values[n - 2], g2 = sw.values[n - 1];
    const double d1 = g2 - g1, d0 = g1 - g0;
    const double denom = d1 - d0;
    sw.aitken = std::fabs(denom) > 1e-300 ? g2 - d1 * d1 / denom : g2;
  }
  return sw;
}

// ---------------------------------------------------------------------------
// One-level closed forms

struct GammaClosedForms {
  double gammaA = 0.0;
  double gammaB = 0.0;
};

namespace detail {

// Weights p_i^q c_i^tau1 d_i^(gammaA - tau1) (A side) or
// p_i^q d_i^tau2 c_i^(gammaB - tau2) (B side), as logs.
inline std::vector<double> log_weights_A(const DiagonalSystem& sys, const QContext& ctx, double gammaA) {
  std::vector<double> w(sys.size());
  for (std::size_t i = 0; i < sys.size(); ++i) {
    const auto& m = sys.maps[i];
    w[i] = ctx.q * std::log(sys.probabilities[i]) + ctx.tau1 * std::log(m.c) + (gammaA - ctx.tau1) * std::log(m.d);
  }
  return w;
}

inline std::vector<double> log_weights_B(const DiagonalSystem& sys, const QContext& ctx, double gammaB) {
  std::vector<double> w(sys.size());
  for (std::size_t i = 0; i < sys.size(); ++i) {
    const auto& m = sys.maps[i];
    w[i] = ctx.q * std::log(sys.probabilities[i]) + ctx.tau2 * std::log(m.d) + (gammaB - ctx.tau2) * std::log(m.c);
  }
  return w;
}

}  // namespace detail

inline GammaClosedForms gamma_closed_forms(const DiagonalSystem& sys, const QContext& ctx) {
  GammaClosedForms g;
  g.gammaA = solve_monotone([&](double s) { return log_sum_exp(detail::log_weights_A(sys, ctx, s)); },
                            Monotone::Decreasing, {}, "gamma_A");
  g.gammaB = solve_monotone([&](double s) { return log_sum_exp(detail::log_weights_B(sys, ctx, s)); },
                            Monotone::Decreasing, {}, "gamma_B");
  return g;
}

inline GammaClosedForms gamma_closed_forms(const DiagonalSystem& sys, double q) {
  return gamma_closed_forms(sys, make_q_context(sys, q));
}

/// The two log-sums whose non-negativity makes min{gamma_A, gamma_B} exact:
///   sum_i w_i^A log(c_i/d_i)  and  sum_i w_i^B log(d_i/c_i).
struct LogConditions {
  double a = 0.0;
  double b = 0.0;
};

inline LogConditions log_conditions(const DiagonalSystem& sys, const QContext& ctx, const GammaClosedForms& g) {
  const auto wa = detail::log_weights_A(sys, ctx, g.gammaA);
  const auto wb = detail::log_weights_B(sys, ctx, g.gammaB);
  LogConditions lc;
  for (std::size_t i = 0; i < sys.size(); ++i) {
    const double r = std::log(sys.maps[i].c / sys.maps[i].d);
    lc.a += std::exp(wa[i]) * r;
    lc.b -= std::exp(wb[i]) * r;
  }
  return lc;
}

// ---------------------------------------------------------------------------
// Closed-form lower bounds

struct LowerBoundsAB {
  double LA = 0.0;
  double LB = 0.0;
  double fractionA = 0.0;  // both strictly below 1
  double fractionB = 0.0;
};

inline LowerBoundsAB lower_bounds_LA_LB(const DiagonalSystem& sys, const QContext& ctx, const GammaClosedForms& g) {
  const auto wa = detail::log_weights_A(sys, ctx, g.gammaA);
  const auto wb = detail::log_weights_B(sys, ctx, g.gammaB);
  double na = 0.0, da = 0.0, nb = 0.0, db = 0.0;
  for (std::size_t i = 0; i < sys.size(); ++i) {
    const double lc = std::log(sys.maps[i].c), ld = std::log(sys.maps[i].d);
    const double ea = std::exp(wa[i]), eb = std::exp(wb[i]);
    na += ea * (lc - ld);
    da += ea * lc;
    nb += eb * (ld - lc);
    db += eb * ld;
  }
  LowerBoundsAB r;
  r.fractionA = na / da;
  r.fractionB = nb / db;
  if (!(r.fractionA < 1.0) || !(r.fractionB < 1.0)) {
    fail(ErrorKind::SolverFailure, "lower-bound fractions must be < 1 (got " + std::to_string(r.fractionA) + ", " +
                                       std::to_string(r.fractionB) + ")");
  }
  const double sum_tau = ctx.tau1 + ctx.tau2;
  r.LA = g.gammaA - std::max(0.0, (g.gammaA - sum_tau) * r.fractionA);
  r.LB = g.gammaB - std::max(0.0, (g.gammaB - sum_tau) * r.fractionB);
  return r;
}

// ---------------------------------------------------------------------------
// Variational certificate

enum class CertificateBranch { CDominant, DDominant, Balanced };

inline const char* to_string(CertificateBranch b) {
  switch (b) {
    case CertificateBranch::CDominant: return "c-dominant";
    case CertificateBranch::DDominant: return "d-dominant";
    case CertificateBranch::Balanced: return "balanced";
  }
  return "balanced";
}

/// A probability vector theta and level s such that the entropy-type
/// objective(s) required by the branch of theta are non-negative. A valid
/// certificate proves gamma(q) >= s.
struct VariationalCertificate {
  std::vector<double> theta;
  double s = 0.0;
  double objective = 0.0;    // the binding objective (min of both when balanced)
  double objective_c = 0.0;  // sum theta_i log(p^q c^tau1 d^(s-tau1) / theta_i)
  double objective_d = 0.0;  // sum theta_i log(p^q d^tau2 c^(s-tau2) / theta_i)
  CertificateBranch branch = CertificateBranch::Balanced;
  bool valid = false;
};

inline constexpr double kCertificateSlack = 1e-10;

inline VariationalCertificate variational_lower_bound(const DiagonalSystem& sys, const QContext& ctx,
                                                      std::vector<double> theta, double s) {
  require(theta.size() == sys.size(), "theta must have one entry per map");
  double total = 0.0;
  for (double t : theta) {
    require(t > 0.0, "theta entries must be positive");
    total += t;
  }
  require(std::fabs(total - 1.0) <= kProbabilityTolerance, "theta must sum to 1");

  VariationalCertificate cert;
  double bal = 0.0;  // sum theta_i log(c_i / d_i)
  for (std::size_t i = 0; i < sys.size(); ++i) {
    const double lp = std::log(sys.probabilities[i]);
    const double lc = std::log(sys.maps[i].c), ld = std::log(sys.maps[i].d);
    const double lt = std::log(theta[i]);
    bal += theta[i] * (lc - ld);
    cert.objective_c += theta[i] * (ctx.q * lp + ctx.tau1 * lc + (s - ctx.tau1) * ld - lt);
    cert.objective_d += theta[i] * (ctx.q * lp + ctx.tau2 * ld + (s - ctx.tau2) * lc - lt);
  }
  if (bal > 0.0) {
    cert.branch = CertificateBranch::CDominant;
    cert.objective = cert.objective_c;
  } else if (bal < 0.0) {
    cert.branch = CertificateBranch::DDominant;
    cert.objective = cert.objective_d;
  } else {
    cert.branch = CertificateBranch::Balanced;
    cert.objective = std::min(cert.objective_c, cert.objective_d);
  }
  cert.theta = std::move(theta);
  cert.s = s;
  cert.valid = cert.objective >= -kCertificateSlack;
  return cert;
}

/// The Lagrange-multiplier choice theta_i = p_i^q c_i^tau1 d_i^(gammaA - tau1).
inline std::vector<double> lagrange_theta_A(const DiagonalSystem& sys, const QContext& ctx, double gammaA) {
  auto w = detail::log_weights_A(sys, ctx, gammaA);
  double total = 0.0;
  for (auto& x : w) total += (x = std::exp(x));
  for (auto& x : w) x /= total;
  return w;
}

inline std::vector<double> lagrange_theta_B(const DiagonalSystem& sys, const QContext& ctx, double gammaB) {
  auto w = detail::log_weights_B(sys, ctx, gammaB);
  double total = 0.0;
  for (auto& x : w) total += (x = std::exp(x));
  for (auto& x : w) x /= total;
  return w;
}

// ---------------------------------------------------------------------------
// The two-map swap family

struct SwapFamily {
  double c = 0.0;  // larger ratio
  double d = 0.0;
};

/// Structural match: two maps, c_1 = d_2, d_1 = c_2, c_1 != d_1, uniform
/// weights. Translations are not inspected.
inline std::optional<SwapFamily> detect_swap_family(const DiagonalSystem& sys) {
  if (sys.size() != 2) return std::nullopt;
  const auto& a = sys.maps[0];
  const auto& b = sys.maps[1];
  if (a.c != b.d || a.d != b.c || a.c == a.d) return std::nullopt;
  if (sys.probabilities[0] != 0.5 || sys.probabilities[1] != 0.5) return std::nullopt;
  return SwapFamily{std::max(a.c, a.d), std::min(a.c, a.d)};
}

namespace detail {

inline void require_swap_params(double c, double d, double q) {
  require(c > d && d > 0.0 && c + d <= 1.0, "swap family needs c > d > 0 and c + d <= 1");
  require(q > 1.0, "swap family bounds need q > 1");
}

// Common value s of tau1 = tau2 = gamma_A = gamma_B: 2^-q (c^s + d^s) = 1.
inline double swap_family_s(double c, double d, double q) {
  const double lc = std::log(c), ld = std::log(d), l2 = std::log(2.0);
  return solve_monotone(
      [&](double s) {
        const double t[2] = {-q * l2 + s * lc, -q * l2 + s * ld};
        return log_sum_exp(t);
      },
      Monotone::Decreasing, {}, "swap-family gamma_A");
}

}  // namespace detail

struct SwapUpper {
  double value = 0.0;
  double delta = 0.0;  // in (0, 1)
  double s = 0.0;      // gamma_A(q)
};

/// Upper bound gamma(q) <= s - 2 log(delta) / log(cd) with
/// delta = 2 (d/c)^(s/2) / ((d/c)^s + 1).
inline SwapUpper swap_family_upper(double c, double d, double q) {
  detail::require_swap_params(c, d, q);
  SwapUpper r;
  r.s = detail::swap_family_s(c, d, q);
  // Work with log x = s log(d/c) to keep (d/c)^s finite for very negative s.
  const double log_x = r.s * std::log(d / c);
  const double log_delta = std::log(2.0) + 0.5 * log_x - (log_x + std::log1p(std::exp(-log_x)));
  r.delta = std::exp(log_delta);
  if (!(r.delta > 0.0 && r.delta < 1.0)) fail(ErrorKind::SolverFailure, "swap-family delta outside (0, 1)");
  r.value = r.s - 2.0 * log_delta / std::log(c * d);
  return r;
}

struct SplitLimitRow {
  std::size_t k = 0;
  double x_root = 0.0;      // X_k^(1/k)
  double y_root = 0.0;      // Y_k^(1/k)
  double ratio_root = 0.0;  // (X_k / (1 - X_k))^(1/k)
  double relabel_gap = 0.0; // |log(Y/(1-Y)) - log(X/(1-X))|
};

struct SplitLimitReport {
  double s = 0.0;
  double delta = 0.0;
  std::vector<SplitLimitRow> rows;
  double deviation_at_kmax = 0.0;  // max(|X^(1/k) - delta|, |Y^(1/k) - delta|) at k_max
  double max_relabel_gap = 0.0;
};

/// Splits Psi_k at s = gamma_A into the halves X_k (words dominated by
/// horizontal contraction) and Y_k, all in log space, for odd k in
/// {1, 3, 7, 15, ...} and k_max.
inline SplitLimitReport split_ratio_limit_consistency(double c, double d, double q, std::size_t k_max) {
  detail::require_swap_params(c, d, q);
  require(k_max % 2 == 1, "k_max must be odd");
  SplitLimitReport rep;
  const auto up = swap_family_upper(c, d, q);
  rep.s = up.s;
  rep.delta = up.delta;
  const double lc = std::log(c), ld = std::log(d), l2 = std::log(2.0);
  const LogFactorials lf(k_max);

  std::vector<std::size_t> ks;
  for (std::size_t k = 1; k < k_max; k = 2 * k + 1) ks.push_back(k);
  ks.push_back(k_max);

  for (std::size_t k : ks) {
    std::vector<double> x_lo, x_hi, y_lo, y_hi;
    for (std::size_t i = 0; i <= k; ++i) {
      const double base = lf.log_binomial(k, i) - static_cast<double>(k) * q * l2;
      const double ki = static_cast<double>(k - i), ii = static_cast<double>(i);
      const double tx = base + rep.s * (ki * lc + ii * ld);
      const double ty = base + rep.s * (ki * ld + ii * lc);
      if (2 * i < k) {
        x_lo.push_back(tx);
        y_lo.push_back(ty);
      } else {
        x_hi.push_back(tx);
        y_hi.push_back(ty);
      }
    }
    const double lx = log_sum_exp(x_lo), lx_c = log_sum_exp(x_hi);
    const double ly = log_sum_exp(y_hi), ly_c = log_sum_exp(y_lo);
    const double kk = static_cast<double>(k);
    SplitLimitRow row;
    row.k = k;
    row.x_root = std::exp(lx / kk);
    row.y_root = std::exp(ly / kk);
    row.ratio_root = std::exp((lx - lx_c) / kk);
    row.relabel_gap = std::fabs((ly - ly_c) - (lx - lx_c));
    rep.max_relabel_gap = std::max(rep.max_relabel_gap, row.relabel_gap);
    rep.rows.push_back(row);
  }
  const auto& last = rep.rows.back();
  rep.deviation_at_kmax = std::max(std::fabs(last.x_root - rep.delta), std::fabs(last.y_root - rep.delta));
  return rep;
}

// ---------------------------------------------------------------------------
// Case analysis

enum class SpectrumCase { MaxCase, MinCaseExact, MinCaseBoundsOnly, Indeterminate };

inline const char* to_string(SpectrumCase c) {
  switch (c) {
    case SpectrumCase::MaxCase: return "MaxCase";
    case SpectrumCase::MinCaseExact: return "MinCaseExact";
    case SpectrumCase::MinCaseBoundsOnly: return "MinCaseBoundsOnly";
    case SpectrumCase::Indeterminate: return "Indeterminate";
  }
  return "Indeterminate";
}

/// Where a reported number came from.
struct Provenance {
  std::string field;
  std::string method;
};

struct SpectrumPoint {
  double q = 0.0;
  double tau1 = 0.0;
  double tau2 = 0.0;
  double gammaA = 0.0;
  double gammaB = 0.0;
  double LA = 0.0;
  double LB = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  std::optional<double> exact;
  std::optional<double> swap_upper;
  SpectrumCase spectrum_case = SpectrumCase::Indeterminate;
  std::vector<std::pair<std::size_t, double>> gamma_ks;
  LogConditions conditions;
  std::vector<Provenance> methods;
};

struct ClassifyOptions {
  std::vector<std::size_t> ks;  // gamma_k levels folded into the upper bound
  ProjectionMode projection_mode = ProjectionMode::AssumeSeparated;
};

inline SpectrumPoint classify_and_bound(const DiagonalSystem& sys, double q, const ClassifyOptions& opt = {}) {
  const QContext ctx = make_q_context(sys, q, opt.projection_mode);
  const auto g = gamma_closed_forms(sys, ctx);
  const auto lb = lower_bounds_LA_LB(sys, ctx, g);

  SpectrumPoint pt;
  pt.q = q;
  pt.tau1 = ctx.tau1;
  pt.tau2 = ctx.tau2;
  pt.gammaA = g.gammaA;
  pt.gammaB = g.gammaB;
  pt.LA = lb.LA;
  pt.LB = lb.LB;
  pt.conditions = log_conditions(sys, ctx, g);
  const char* tau_label = opt.projection_mode == ProjectionMode::Strict
                              ? "self-similar projection formula (OSC checked)"
                              : "self-similar projection formula (assumes projected OSC after merging)";
  pt.methods.push_back({"tau1", tau_label});
  pt.methods.push_back({"tau2", tau_label});
  pt.methods.push_back({"gammaA", "closed-form root"});
  pt.methods.push_back({"gammaB", "closed-form root"});

  double gk_min = std::numeric_limits<double>::infinity();
  for (std::size_t k : opt.ks) {
    const double v = gamma_k(sys, k, ctx);
    pt.gamma_ks.emplace_back(k, v);
    gk_min = std::min(gk_min, v);
  }
  if (q > 1.0) {
    if (auto fam = detect_swap_family(sys)) pt.swap_upper = swap_family_upper(fam->c, fam->d, q).value;
  }

  const double hi = std::max(g.gammaA, g.gammaB);
  const double lo = std::min(g.gammaA, g.gammaB);
  const double sum_tau = ctx.tau1 + ctx.tau2;
  const double lower_ab = std::max(lb.LA, lb.LB);
  const bool max_branch = hi <= sum_tau + kTrichotomyTolerance;
  const bool min_branch = lo >= sum_tau - kTrichotomyTolerance;

  auto fold_upper = [&](double base, const char* base_label) {
    pt.upper = base;
    std::string how = base_label;
    // Level-k sums are submultiplicative only for q < 1; above that gamma_k
    // approaches from below and is reported but never used as a bound.
    if (q < 1.0 && gk_min < pt.upper) {
      pt.upper = gk_min;
      how = "finite-level root gamma_k (q < 1)";
    }
    if (pt.swap_upper && *pt.swap_upper < pt.upper) {
      pt.upper = *pt.swap_upper;
      how = "swap-family quantitative bound";
    }
    pt.methods.push_back({"upper", how});
  };

  if (max_branch && !min_branch) {
    pt.spectrum_case = SpectrumCase::MaxCase;
    pt.exact = hi;
    pt.lower = pt.upper = hi;
    pt.methods.push_back({"exact", "max{gammaA, gammaB} (max case)"});
  } else if (min_branch && !max_branch) {
    pt.lower = std::max(sum_tau, lower_ab);
    pt.methods.push_back({"lower", lower_ab > sum_tau ? "max{LA, LB}" : "tau1 + tau2"});
    fold_upper(lo, "min{gammaA, gammaB}");
    if (pt.conditions.a >= 0.0 || pt.conditions.b >= 0.0) {
      pt.spectrum_case = SpectrumCase::MinCaseExact;
      pt.exact = lo;
      pt.methods.push_back({"exact", "min{gammaA, gammaB} (log condition holds)"});
    } else {
      pt.spectrum_case = SpectrumCase::MinCaseBoundsOnly;
    }
  } else {
    // Either branch may be the true one: keep only what both imply.
    pt.spectrum_case = SpectrumCase::Indeterminate;
    pt.lower = std::max(lower_ab, std::min(hi, sum_tau));
    pt.methods.push_back({"lower", "bounds valid in both branches"});
    fold_upper(hi, "max{gammaA, gammaB} (both branches)");
    if (pt.upper - pt.lower <= 1e-9) {
      pt.exact = hi;
      pt.methods.push_back({"exact", "both branches agree within tolerance"});
    }
  }
  return pt;
}

}  // namespace spectra
