// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "spectra/spectra.hpp"
#include "spectra_cli.hpp"

using namespace spectra;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// 1. Split binomial growth and exact sandwich.
Outcome split_binomial_limit() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = split_ratio(2001, 2.0);
  const double limit = growth_limit(2.0);
  const double rel = std::fabs(r.root() - limit) / limit;
  const double secs = seconds_since(t0);
  int held = 0, total = 0;
  for (std::size_t k = 1; k <= 61; k += 2) {
    for (const Rational& x : {Rational(2), Rational(7, 2)}) {
      ++total;
      held += sandwich_check(k, x).holds() ? 1 : 0;
    }
  }
  return {rel <= 0.01 && secs < 1.0 && held == total,
          "root=" + fmt("%.6f", r.root()) + " limit=" + fmt("%.6f", limit) + " rel_dev=" + fmt("%.2e", rel) +
              " time=" + fmt("%.3f", secs) + "s sandwich=" + std::to_string(held) + "/" + std::to_string(total)};
}

// 2. Type-class sums against exhaustive word enumeration.
Outcome brute_force_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> qd(0.0, 4.0), sd(-2.0, 2.0);
  double worst_psi = 0.0, worst_dq = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + trial % 2;
    const std::size_t k = 1 + trial % 10;
    const auto sys = oracle::random_system(rng, n);
    double q = qd(rng);
    if (std::fabs(q - 1.0) < 0.05) q += 0.1;
    const double s = sd(rng);
    const auto ctx = make_q_context(sys, q);
    const double brute_psi = oracle::big_psi(sys, k, s, q, ctx.tau1, ctx.tau2);
    worst_psi = std::max(worst_psi, std::fabs(big_psi(sys, k, s, ctx).to_double() - brute_psi) / brute_psi);

    const double sign = q > 1.0 ? 1.0 : -1.0;
    const double brute_root =
        oracle::bisect([&](double t) { return sign * (oracle::dq_sum(sys, k, t, q) - 1.0); }, 0.0, 64.0, 1e-14);
    const double root = dq_finite_k(sys, k, q);
    worst_dq = std::max(worst_dq, std::fabs(root - brute_root) / std::max(1.0, std::fabs(brute_root)));
  }
  const double secs = seconds_since(t0);
  return {worst_psi <= 1e-9 && worst_dq <= 1e-9 && secs < 30.0,
          "max_rel_err_psi=" + fmt("%.2e", worst_psi) + " max_rel_err_dq=" + fmt("%.2e", worst_dq) +
              " time=" + fmt("%.2f", secs) + "s"};
}

constexpr std::size_t kSweepCap = 1024;

// 3. Strict gap below gamma_A at q = 2 and consistency of the bounds.
Outcome counterexample_gap() {
  const auto sys = swap_family(0.75, 0.25);
  const auto ctx = make_q_context(sys, 2.0);
  const double gA = gamma_closed_forms(sys, ctx).gammaA;
  const auto sw = gamma_k_sweep(sys, kSweepCap, ctx);
  bool monotone = true;
  for (std::size_t j = 1; j < sw.values.size(); ++j) monotone = monotone && sw.values[j] <= sw.values[j - 1] + 1e-9;
  const double gap = gA - sw.values.back();

  double worst = -1e300, worst_q = 0.0;
  int points = 0;
  for (double q : QGrid{1.05, 20.0, 0.05}.values()) {
    const auto c = make_q_context(sys, q);
    const auto g = gamma_closed_forms(sys, c);
    const auto lb = lower_bounds_LA_LB(sys, c, g);
    const double lower = std::max({lb.LA, lb.LB, c.tau1 + c.tau2});
    const double upper = std::min(swap_family_upper(0.75, 0.25, q).value, gamma_k(sys, kSweepCap, c));
    if (lower - upper > worst) worst = lower - upper, worst_q = q;
    ++points;
  }
  return {gap >= 1e-3 && monotone && worst <= 0.0,
          "k_max=" + std::to_string(sw.ks.back()) + " gammaA-gamma_k=" + fmt("%.5f", gap) +
              " monotone=" + (monotone ? "yes" : "no") + " grid_points=" + std::to_string(points) +
              " max(lower-upper)=" + fmt("%.2e", worst) + " at q=" + fmt("%.2f", worst_q)};
}

// 4. Where max{LA, LB} improves on 1 - q.
Outcome lower_bound_crossover() {
  const auto sys = swap_family(0.75, 0.25);
  const double m15 = cli::lower_bound_margin(sys, 1.5), m5 = cli::lower_bound_margin(sys, 5.0),
               m10 = cli::lower_bound_margin(sys, 10.0);
  const auto xs = cli::lower_bound_crossovers(0.75, 0.25, 1.05, 20.0, 0.05);
  const bool two = xs.size() == 2;
  const bool near = two && std::fabs(xs[0] - 1.7) <= 0.2 && std::fabs(xs[1] - 9.3) <= 0.2;
  std::string where;
  for (double x : xs) where += (where.empty() ? "" : ",") + fmt("%.4f", x);
  return {m15 > 0.0 && m10 > 0.0 && m5 <= 0.0 && near,
          "margin(1.5)=" + fmt("%.4f", m15) + " margin(5)=" + fmt("%.4f", m5) + " margin(10)=" + fmt("%.4f", m10) +
              " crossovers=[" + where + "]"};
}

// 5. gamma_k approaches gamma_A for q <= 1 and falls below it for q > 1.
Outcome exact_regime() {
  const auto sys = swap_family(0.75, 0.25);
  double worst = 0.0;
  for (double q : {0.25, 0.5, 0.9}) {
    const auto ctx = make_q_context(sys, q);
    worst = std::max(worst, std::fabs(gamma_k(sys, kSweepCap, ctx) - gamma_closed_forms(sys, ctx).gammaA));
  }
  std::vector<double> gaps;
  for (double q : {1.1, 1.5, 2.0}) {
    const auto ctx = make_q_context(sys, q);
    gaps.push_back(gamma_closed_forms(sys, ctx).gammaA - gamma_k(sys, kSweepCap, ctx));
  }
  const bool grows = gaps[0] > 0.0 && gaps[1] > gaps[0] && gaps[2] > gaps[1];
  return {worst <= 5e-3 && grows, "k=" + std::to_string(kSweepCap) + " max|gap| (q<1)=" + fmt("%.2e", worst) +
                                      " gaps(1.1,1.5,2)=" + fmt("%.5f", gaps[0]) + "," + fmt("%.5f", gaps[1]) + "," +
                                      fmt("%.5f", gaps[2])};
}

DiagonalSystem three_map_example() {
  return load_system(std::string(SPECTRA_MANIFEST_DIR) + "/../systems/three_map.json").diagonal;
}

// 6. Three-map example: exact throughout, first condition non-negative.
Outcome three_map_example_check() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto sys = three_map_example();
  const double u0 = u_roots(sys, 0.0).u;
  bool cond_ok = true, exact_ok = true;
  double min_cond = 1e300, worst_exact = 0.0;
  int rows = 0;
  for (double q : cli::without_guard_band(QGrid{0.0, 5.0, 0.05}.values())) {
    const auto pt = gen_dim_point(sys, q);
    const double c1 = pt.plotted_conditions().first;
    min_cond = std::min(min_cond, c1);
    cond_ok = cond_ok && c1 >= 0.0;
    if (!pt.exact) {
      exact_ok = false;
    } else {
      worst_exact = std::max(worst_exact, std::fabs(*pt.exact - pt.roots.t1));
    }
    ++rows;
  }
  exact_ok = exact_ok && worst_exact <= 1e-9;
  const double secs = seconds_since(t0);
  return {std::fabs(u0 - 1.0) <= 1e-10 && cond_ok && exact_ok && secs < 10.0,
          "u(0)=" + fmt("%.12f", u0) + " rows=" + std::to_string(rows) + " min_cond1=" + fmt("%.4f", min_cond) +
              " max|exact-t1|=" + fmt("%.1e", worst_exact) + " time=" + fmt("%.2f", secs) + "s"};
}

// 7. Finite-level d_q stays above u and clears it by the correction.
Outcome swap_family_dq() {
  const auto sys = swap_family(0.75, 0.25);
  bool above = true, margin_ok = true;
  std::string detail;
  for (double q : {1.5, 2.0, 3.0}) {
    const double u = u_roots(sys, q).u;
    const double corr = miao_counterexample_lower(0.75, 0.25, q).correction;
    for (std::size_t k : {1, 2, 4, 16, 64, 256}) above = above && dq_finite_k(sys, k, q) >= u - 1e-8;
    const double dq = dq_finite_k(sys, 1001, q);
    above = above && dq >= u - 1e-8;
    margin_ok = margin_ok && dq - u >= 0.5 * corr;
    detail += " q=" + fmt("%g", q) + ":dq-u=" + fmt("%.4f", dq - u) + ",corr=" + fmt("%.4f", corr);
  }
  return {above && margin_ok, "k=1001" + detail};
}

// 8. Self-similar systems: every formula collapses to the same root.
Outcome self_similar_exactness() {
  std::mt19937_64 rng(99);
  double worst = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    const auto sys = oracle::random_system(rng, 2 + trial % 2, true);
    for (double q : {0.0, 0.5, 2.0, 5.0}) {
      const auto ctx = make_q_context(sys, q);
      const auto g = gamma_closed_forms(sys, ctx);
      worst = std::max(worst, std::fabs(g.gammaA - g.gammaB));
      for (std::size_t k : {1, 8, 64}) worst = std::max(worst, std::fabs(gamma_k(sys, k, ctx) - g.gammaA));
    }
  }
  return {worst <= 1e-10, "max_abs_dev=" + fmt("%.2e", worst)};
}

// 9. Box-counting estimate against the closed form.
Outcome empirical_cross_check() {
  bool ok = true;
  std::string detail;
  for (const char* name : {"square4", "sierpinski", "mixed"}) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto sys = load_system(std::string(SPECTRA_MANIFEST_DIR) + "/../systems/" + name + ".json").diagonal;
    const auto gms = sample_measures(sys, 10'000'000, 12345, {4, 5, 6, 7, 8, 9});
    double worst = 0.0;
    for (double q : {0.0, 2.0}) {
      worst = std::max(worst, std::fabs(empirical_tau(gms, q).tau - gamma_closed_forms(sys, q).gammaA));
    }
    const double secs = seconds_since(t0);
    ok = ok && worst <= 0.05 && secs < 60.0;
    detail += std::string(" ") + name + ":max_dev=" + fmt("%.4f", worst) + ",time=" + fmt("%.1f", secs) + "s";
  }
  return {ok, "n=1e7 depths=4..9" + detail};
}

// 10. Replayed manifests are byte-identical across thread counts.
Outcome determinism() {
  bool ok = true;
  std::string detail;
  for (const auto& name : cli::reproduce_names()) {
    const auto path = cli::reproduce_manifest_path(name, SPECTRA_MANIFEST_DIR);
    const auto m = cli::load_manifest(path.string());
    setenv("SPECTRA_THREADS", "1", 1);
    const auto one = cli::evaluate(m, path.parent_path());
    setenv("SPECTRA_THREADS", "8", 1);
    const auto eight = cli::evaluate(m, path.parent_path());
    const auto again = cli::evaluate(m, path.parent_path());
    const bool same = one == eight && eight == again;
    ok = ok && same;
    detail += " " + name + "=" + (same ? "identical" : "DIFFERENT");
  }
  unsetenv("SPECTRA_THREADS");
  return {ok, "threads=1,8" + detail};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"split binomial limit and sandwich", split_binomial_limit},
      {"brute-force oracle equivalence", brute_force_equivalence},
      {"strict gap below gammaA at q=2", counterexample_gap},
      {"lower-bound crossover against 1-q", lower_bound_crossover},
      {"exact regime for q<=1", exact_regime},
      {"three-map example exactness", three_map_example_check},
      {"finite-level d_q above u", swap_family_dq},
      {"self-similar exactness", self_similar_exactness},
      {"empirical box-counting cross-check", empirical_cross_check},
      {"determinism across thread counts", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::printf("[%s] %zu. %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
