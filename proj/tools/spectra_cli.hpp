#pragma once

// Command implementations behind the `spectra` executable. Every subcommand
// is first lowered to a RunManifest, so a direct invocation and the replay
// of its manifest go through the same code.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "spectra/spectra.hpp"

namespace spectra::cli {

namespace fs = std::filesystem;

enum ExitCode { kOk = 0, kInvalidInput = 2, kSolverFailure = 3, kIoFailure = 4 };

inline int exit_code_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidInput:
    case ErrorKind::CapExceeded: return kInvalidInput;
    case ErrorKind::SolverFailure: return kSolverFailure;
    case ErrorKind::Io: return kIoFailure;
  }
  return kSolverFailure;
}

inline const std::vector<std::string>& reproduce_names() {
  static const std::vector<std::string> names{"figure1", "example-fraser", "example-miao", "phase-transition",
                                              "binomial"};
  return names;
}

// ---------------------------------------------------------------------------
// Small helpers

/// Parses "7/2", "3" or "1.5" exactly.
inline Rational parse_rational(const std::string& s) {
  const auto slash = s.find('/');
  auto parse_decimal = [&](const std::string& t) -> Rational {
    require(!t.empty(), "empty number in \"" + s + "\"");
    std::size_t pos = 0;
    bool neg = false;
    if (t[0] == '-' || t[0] == '+') {
      neg = t[0] == '-';
      pos = 1;
    }
    BigInt num = 0, den = 1;
    bool seen_dot = false, seen_digit = false;
    for (; pos < t.size(); ++pos) {
      const char ch = t[pos];
      if (ch == '.' && !seen_dot) {
        seen_dot = true;
      } else if (ch >= '0' && ch <= '9') {
        num = num * 10 + (ch - '0');
        if (seen_dot) den *= 10;
        seen_digit = true;
      } else {
        fail(ErrorKind::InvalidInput, "cannot parse \"" + s + "\" as a rational");
      }
    }
    require(seen_digit, "cannot parse \"" + s + "\" as a rational");
    return Rational(neg ? BigInt(-num) : num, den);
  };
  if (slash == std::string::npos) return parse_decimal(s);
  const Rational den = parse_decimal(s.substr(slash + 1));
  require(den != 0, "zero denominator in \"" + s + "\"");
  return parse_decimal(s.substr(0, slash)) / den;
}

/// Scientific notation for a positive number known through its logarithm.
inline std::string format_from_log(double log_value) {
  if (log_value < 700.0) return format_number(std::exp(log_value));
  const double l10 = log_value / std::log(10.0);
  double e = std::floor(l10);
  double mant = std::pow(10.0, l10 - e);
  if (mant >= 10.0) {
    mant /= 10.0;
    e += 1.0;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.11fe+%.0f", mant, e);
  return buf;
}

inline std::string q_label(double q) { return "q=" + format_number(q); }

/// Runs fn(q) on every grid point in parallel; failures are re-raised with
/// the offending q.
template <class Fn>
auto map_over_q(const std::vector<double>& qs, Fn&& fn) {
  return parallel_map(qs.size(), [&](std::size_t i) {
    try {
      return fn(qs[i]);
    } catch (const Error& e) {
      fail(e.kind(), q_label(qs[i]) + ": " + e.what());
    }
  });
}

// ---------------------------------------------------------------------------
// Tables

struct SpectrumOptions {
  std::vector<std::size_t> ks;
  bool extrapolate = false;
  std::size_t extrapolate_cap = 256;
  ProjectionMode projection_mode = ProjectionMode::AssumeSeparated;
};

inline CsvTable spectrum_table(const DiagonalSystem& sys, const std::vector<double>& qs, const SpectrumOptions& opt) {
  std::vector<std::string> header{"q",  "tau1",  "tau2",  "gammaA", "gammaB", "LA",
                                  "LB", "lower", "upper", "exact",  "case"};
  for (auto k : opt.ks) header.push_back("gamma_k" + std::to_string(k));
  if (opt.extrapolate) header.push_back("gamma_extrapolated");
  CsvTable t(header);

  const auto rows = map_over_q(qs, [&](double q) {
    ClassifyOptions co;
    co.ks = opt.ks;
    co.projection_mode = opt.projection_mode;
    const auto pt = classify_and_bound(sys, q, co);
    std::vector<std::string> row{format_number(q),        format_number(pt.tau1),   format_number(pt.tau2),
                                 format_number(pt.gammaA), format_number(pt.gammaB), format_number(pt.LA),
                                 format_number(pt.LB),     format_number(pt.lower),  format_number(pt.upper),
                                 format_number(pt.exact),  to_string(pt.spectrum_case)};
    for (const auto& [k, v] : pt.gamma_ks) row.push_back(format_number(v));
    if (opt.extrapolate) {
      const auto sweep = gamma_k_sweep(sys, opt.extrapolate_cap, make_q_context(sys, q, opt.projection_mode));
      row.push_back(format_number(sweep.aitken));
    }
    return row;
  });
  for (const auto& r : rows) t.add_row(r);
  return t;
}

/// Grid points strictly outside the band around q = 1.
inline std::vector<double> without_guard_band(const std::vector<double>& qs) {
  std::vector<double> out;
  for (double q : qs) {
    if (std::fabs(q - 1.0) > kQGuardBand) out.push_back(q);
  }
  return out;
}

inline CsvTable gendim_table(const TriangularSystem& sys, const std::vector<double>& qs,
                             const std::vector<std::size_t>& ks) {
  std::vector<std::string> header{"q", "t1", "t2", "s1", "s2", "u0", "u", "lower", "upper", "exact", "case"};
  for (auto k : ks) header.push_back("dq_k" + std::to_string(k));
  header.insert(header.end(), {"cond1", "cond2", "flags"});
  CsvTable t(header);

  const auto rows = map_over_q(without_guard_band(qs), [&](double q) {
    const auto pt = gen_dim_point(sys, q, ks);
    std::vector<std::string> row{format_number(q),         format_number(pt.roots.t1), format_number(pt.roots.t2),
                                 format_number(pt.roots.s1), format_number(pt.roots.s2), format_number(pt.u.u0),
                                 format_number(pt.u.u),    format_number(pt.lower),    format_number(pt.upper),
                                 format_number(pt.exact),  to_string(pt.dim_case)};
    for (const auto& [k, v] : pt.dq_finite_k) row.push_back(format_number(v));
    const auto [c1, c2] = pt.plotted_conditions();
    row.push_back(format_number(c1));
    row.push_back(format_number(c2));
    row.push_back(pt.diagonal_entry_formulas ? "diagonal-entry formulas" : "");
    return row;
  });
  for (const auto& r : rows) t.add_row(r);
  return t;
}

inline CsvTable binomial_table(const std::vector<std::string>& xs, const std::vector<std::size_t>& ks) {
  CsvTable t({"x", "k", "ratio", "ratio_root", "limit", "abs_deviation"});
  for (const auto& xs_text : xs) {
    const Rational x = parse_rational(xs_text);
    const double xd = to_double(x);
    const double limit = growth_limit(xd);
    for (auto k : ks) {
      const auto r = split_ratio(k, xd);
      t.add_row({xs_text, std::to_string(k), format_from_log(r.log_ratio()), format_number(r.root()),
                 format_number(limit), format_number(std::fabs(r.root() - limit))});
    }
  }
  return t;
}

struct Figure1Data {
  CsvTable table;
  PlotSpec plot;
};

inline Figure1Data figure1_table(double c, double d, const std::vector<double>& qs, const std::vector<std::size_t>& ks) {
  const auto sys = swap_family(c, d);
  std::vector<std::string> header{"q", "lower_bound", "quantitative_upper", "min_gamma", "tau_sum", "one_minus_q"};
  for (auto k : ks) header.push_back("gamma_k" + std::to_string(k));
  Figure1Data out{CsvTable(header), {}};
  struct Row {
    double lower, upper, min_gamma, tau_sum;
    std::vector<double> gks;
  };
  const auto rows = map_over_q(qs, [&](double q) {
    const QContext ctx = make_q_context(sys, q);
    const auto g = gamma_closed_forms(sys, ctx);
    const auto lb = lower_bounds_LA_LB(sys, ctx, g);
    // The quantitative bound only exists for q > 1.
    const double up = q > 1.0 ? swap_family_upper(c, d, q).value : std::numeric_limits<double>::quiet_NaN();
    Row r{std::max(lb.LA, lb.LB), up, std::min(g.gammaA, g.gammaB),
          ctx.tau1 + ctx.tau2, {}};
    for (auto k : ks) r.gks.push_back(gamma_k(sys, k, ctx));
    return r;
  });
  PlotSeries lower{"lower bound", qs, {}, "#1f4e9c", ""};
  PlotSeries upper{"quantitative upper", qs, {}, "#b02020", ""};
  PlotSeries ming{"min(gammaA, gammaB)", qs, {}, "#000000", "10,5"};
  PlotSeries tsum{"tau1 + tau2", qs, {}, "#2a8a2a", "2,3"};
  PlotSeries ref{"1 - q", qs, {}, "#888888", "4,4"};
  for (std::size_t i = 0; i < qs.size(); ++i) {
    const auto& r = rows[i];
    std::vector<std::string> line{format_number(qs[i]),    format_number(r.lower),   format_number(r.upper),
                                  format_number(r.min_gamma), format_number(r.tau_sum), format_number(1.0 - qs[i])};
    for (double v : r.gks) line.push_back(format_number(v));
    out.table.add_row(line);
    lower.y.push_back(r.lower);
    upper.y.push_back(r.upper);
    ming.y.push_back(r.min_gamma);
    tsum.y.push_back(r.tau_sum);
    ref.y.push_back(1.0 - qs[i]);
  }
  out.plot = {"Bounds for the L^q-spectrum, c = " + format_number(c) + ", d = " + format_number(d), "q", "tau(q)",
              720, 480, {lower, upper, ming, tsum, ref}};
  return out;
}

/// max{LA, LB} - (1 - q) for the swap family.
inline double lower_bound_margin(const DiagonalSystem& sys, double q) {
  const QContext ctx = make_q_context(sys, q);
  const auto g = gamma_closed_forms(sys, ctx);
  const auto lb = lower_bounds_LA_LB(sys, ctx, g);
  return std::max(lb.LA, lb.LB) - (1.0 - q);
}

inline std::vector<double> lower_bound_crossovers(double c, double d, double q_lo, double q_hi, double step) {
  const auto sys = swap_family(c, d);
  return grid_crossings([&](double q) { return lower_bound_margin(sys, q); }, q_lo, q_hi, step, 1e-10);
}

struct CrossoverData {
  CsvTable table;
  CsvTable crossovers;
};

inline CrossoverData crossover_tables(double c, double d, const std::vector<double>& qs) {
  const auto sys = swap_family(c, d);
  CrossoverData out{CsvTable({"q", "LA", "LB", "max_L", "one_minus_q", "tau_sum", "improves"}),
                 CsvTable({"index", "q"})};
  const auto rows = map_over_q(qs, [&](double q) {
    const QContext ctx = make_q_context(sys, q);
    const auto g = gamma_closed_forms(sys, ctx);
    const auto lb = lower_bounds_LA_LB(sys, ctx, g);
    const double m = std::max(lb.LA, lb.LB);
    return std::vector<std::string>{format_number(q),       format_number(lb.LA),
                                    format_number(lb.LB),   format_number(m),
                                    format_number(1.0 - q), format_number(ctx.tau1 + ctx.tau2),
                                    m > 1.0 - q ? "1" : "0"};
  });
  for (const auto& r : rows) out.table.add_row(r);
  if (qs.size() >= 2) {
    const auto xs = lower_bound_crossovers(c, d, qs.front(), qs.back(), qs[1] - qs[0]);
    for (std::size_t i = 0; i < xs.size(); ++i) out.crossovers.add_row({std::to_string(i), format_number(xs[i])});
  }
  return out;
}

inline PlotSpec conditions_plot(const CsvTable& t) {
  const auto& h = t.header();
  auto col = [&](const std::string& name) {
    return static_cast<std::size_t>(std::find(h.begin(), h.end(), name) - h.begin());
  };
  PlotSeries u{"u(q)", {}, {}, "#1f4e9c", ""};
  PlotSeries c1{"first condition", {}, {}, "#b02020", "6,3"};
  PlotSeries c2{"second condition", {}, {}, "#2a8a2a", "2,3"};
  for (const auto& r : t.rows()) {
    const double q = std::stod(r[col("q")]);
    for (auto* s : {&u, &c1, &c2}) s->x.push_back(q);
    u.y.push_back(std::stod(r[col("u")]));
    c1.y.push_back(std::stod(r[col("cond1")]));
    c2.y.push_back(std::stod(r[col("cond2")]));
  }
  return {"Generalised dimension and equality conditions", "q", "value", 720, 480, {u, c1, c2}};
}

inline CsvTable phase_transition_table(double c, double d, const std::vector<double>& qs,
                                       const std::vector<std::size_t>& ks) {
  require(qs.size() >= 3, "phase-transition needs at least 3 grid points");
  const auto sys = swap_family(c, d);
  std::vector<std::string> header{"q", "gammaA"};
  for (auto k : ks) {
    const auto ks_ = std::to_string(k);
    header.insert(header.end(), {"gamma_k" + ks_, "d1_k" + ks_, "d2_k" + ks_});
  }
  CsvTable t(header);
  const auto vals = map_over_q(qs, [&](double q) {
    const QContext ctx = make_q_context(sys, q);
    std::vector<double> v{gamma_closed_forms(sys, ctx).gammaA};
    for (auto k : ks) v.push_back(gamma_k(sys, k, ctx));
    return v;
  });
  const double h = qs[1] - qs[0];
  for (std::size_t i = 0; i < qs.size(); ++i) {
    std::vector<std::string> row{format_number(qs[i]), format_number(vals[i][0])};
    for (std::size_t j = 0; j < ks.size(); ++j) {
      row.push_back(format_number(vals[i][j + 1]));
      if (i == 0 || i + 1 == qs.size()) {
        row.insert(row.end(), {"", ""});
      } else {
        const double a = vals[i - 1][j + 1], b = vals[i][j + 1], e = vals[i + 1][j + 1];
        row.push_back(format_number((e - a) / (2.0 * h)));
        row.push_back(format_number((e - 2.0 * b + a) / (h * h)));
      }
    }
    t.add_row(row);
  }
  return t;
}

inline std::string validation_text(const TriangularSystem& ts) {
  const auto rep = validate_system(ts.diagonal);
  std::ostringstream os;
  os << "maps=" << ts.diagonal.size() << "\n"
     << "valid=" << (rep.valid() ? "true" : "false") << "\n"
     << "rosc=" << to_string(rep.rosc) << "\n"
     << "diagonal=" << (ts.is_diagonal() ? "true" : "false") << "\n"
     << "self_similar=" << (is_self_similar(ts.diagonal) ? "true" : "false") << "\n";
  for (const auto& p : rep.problems) os << "problem=" << p << "\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Manifest evaluation

namespace detail {

template <class T>
T option_or(const Json& opts, const char* key, T fallback) {
  if (!opts.contains(key)) return fallback;
  try {
    return opts.at(key).get<T>();
  } catch (const Json::exception&) {
    fail(ErrorKind::InvalidInput, std::string("manifest /options/") + key + ": wrong type");
  }
}

inline std::vector<double> grid_of(const RunManifest& m) {
  require(m.q_grid.has_value(), "command '" + m.command + "' needs a q grid");
  return m.q_grid->values();
}

}  // namespace detail

/// Loads the manifest's system: inline JSON or a path relative to base_dir.
inline TriangularSystem manifest_system(const RunManifest& m, const fs::path& base_dir) {
  if (m.system) {
    auto ts = system_from_json(*m.system);
    ts.diagonal = normalized(ts.diagonal);
    return ts;
  }
  require(m.input.has_value(), "command '" + m.command + "' needs a system (input or inline)");
  const fs::path p(*m.input);
  return load_system((p.is_absolute() ? p : base_dir / p).string());
}

inline DiagonalSystem require_diagonal(const TriangularSystem& ts, const std::string& what) {
  require(ts.is_diagonal(), what + " needs a diagonal system (off-diagonal entries present)");
  return ts.diagonal;
}

/// Output role -> file contents. Roles: csv, svg, image, crossovers, text.
using Artifacts = std::map<std::string, std::string>;

inline Artifacts evaluate(const RunManifest& m, const fs::path& base_dir = ".") {
  const auto& cmd = m.command;
  const Json& o = m.options;
  Artifacts out;
  if (cmd == "validate") {
    out["text"] = validation_text(manifest_system(m, base_dir));
  } else if (cmd == "spectrum") {
    SpectrumOptions so;
    so.ks = m.ks;
    so.extrapolate = detail::option_or(o, "extrapolate", false);
    so.extrapolate_cap = detail::option_or<std::size_t>(o, "extrapolate_cap", 256);
    const auto mode = detail::option_or<std::string>(o, "projection_mode", "assume-separated");
    require(mode == "assume-separated" || mode == "strict", "projection_mode must be assume-separated or strict");
    so.projection_mode = mode == "strict" ? ProjectionMode::Strict : ProjectionMode::AssumeSeparated;
    const auto sys = require_diagonal(manifest_system(m, base_dir), "spectrum");
    out["csv"] = spectrum_table(sys, detail::grid_of(m), so).str();
  } else if (cmd == "gendim") {
    out["csv"] = gendim_table(manifest_system(m, base_dir), detail::grid_of(m), m.ks).str();
  } else if (cmd == "binomial") {
    const auto xs = detail::option_or<std::vector<std::string>>(o, "x", {"3/2", "2", "4"});
    require(!m.ks.empty(), "binomial needs at least one k");
    out["csv"] = binomial_table(xs, m.ks).str();
  } else if (cmd == "render") {
    RenderConfig cfg;
    cfg.width = detail::option_or(o, "width", cfg.width);
    cfg.height = detail::option_or(o, "height", cfg.height);
    cfg.iterations = detail::option_or(o, "iterations", cfg.iterations);
    cfg.seed = m.seeds.empty() ? cfg.seed : m.seeds.front();
    const auto mode = detail::option_or<std::string>(o, "mode", "chaos");
    require(mode == "chaos" || mode == "depth", "render mode must be chaos or depth");
    cfg.mode = mode == "chaos" ? RenderMode::ChaosGame : RenderMode::DeterministicDepth;
    cfg.depth = detail::option_or(o, "depth", cfg.depth);
    cfg.overlay = detail::option_or(o, "overlay", false);
    if (o.contains("random_translations")) cfg.randomize_translations = detail::option_or<std::uint64_t>(o, "random_translations", 0);
    validate_render_config(cfg);
    const auto format = detail::option_or<std::string>(o, "format", "ppm");
    require(format == "ppm" || format == "svg", "render format must be ppm or svg");
    const auto sys = require_diagonal(manifest_system(m, base_dir), "render");
    const auto img = render(sys, cfg);
    out["image"] = format == "ppm" ? to_ppm(img) : to_svg(img);
  } else if (cmd == "figure1") {
    const auto fig = figure1_table(detail::option_or(o, "c", 0.75), detail::option_or(o, "d", 0.25),
                                   detail::grid_of(m), m.ks);
    out["csv"] = fig.table.str();
    out["svg"] = render_plot(fig.plot);
  } else if (cmd == "example-fraser") {
    const auto fr = crossover_tables(detail::option_or(o, "c", 0.75), detail::option_or(o, "d", 0.25), detail::grid_of(m));
    out["csv"] = fr.table.str();
    out["crossovers"] = fr.crossovers.str();
  } else if (cmd == "example-miao") {
    const auto t = gendim_table(manifest_system(m, base_dir), detail::grid_of(m), m.ks);
    out["csv"] = t.str();
    out["svg"] = render_plot(conditions_plot(t));
  } else if (cmd == "phase-transition") {
    const auto ks = m.ks.empty() ? std::vector<std::size_t>{64} : m.ks;
    out["csv"] = phase_transition_table(detail::option_or(o, "c", 0.75), detail::option_or(o, "d", 0.25),
                                        detail::grid_of(m), ks)
                     .str();
  } else {
    fail(ErrorKind::InvalidInput, "unknown command '" + cmd + "'");
  }
  return out;
}

/// Writes each artifact to out_dir / outputs[role]; roles without a file
/// name go to `fallback` (stdout for the CLI).
inline void write_artifacts(const RunManifest& m, const Artifacts& arts, const fs::path& out_dir,
                            std::ostream& fallback) {
  for (const auto& [role, bytes] : arts) {
    const auto it = m.outputs.find(role);
    if (it == m.outputs.end()) {
      fallback << bytes;
      continue;
    }
    const fs::path p(it->second);
    const fs::path target = p.is_absolute() ? p : out_dir / p;
    if (target.has_parent_path()) {
      std::error_code ec;
      fs::create_directories(target.parent_path(), ec);
    }
    write_file(target.string(), bytes);
  }
}

inline RunManifest load_manifest(const std::string& path) {
  return manifest_from_json(parse_json_text(read_text_file(path), path));
}

/// Evaluates, writes outputs and optionally saves the manifest with the
/// measured wall time.
inline void execute(RunManifest m, const fs::path& base_dir, const fs::path& out_dir, std::ostream& fallback,
                    const std::optional<std::string>& manifest_out = std::nullopt) {
  const auto start = std::chrono::steady_clock::now();
  const auto arts = evaluate(m, base_dir);
  write_artifacts(m, arts, out_dir, fallback);
  if (manifest_out) {
    m.wall_time_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_file(*manifest_out, to_json(m).dump(2) + "\n");
  }
}

inline fs::path default_manifest_dir() {
  if (const char* env = std::getenv("SPECTRA_MANIFEST_DIR")) return env;
#ifdef SPECTRA_MANIFEST_DIR
  return SPECTRA_MANIFEST_DIR;
#else
  return "manifests";
#endif
}

inline fs::path reproduce_manifest_path(const std::string& name, const fs::path& manifest_dir) {
  const auto& names = reproduce_names();
  if (std::find(names.begin(), names.end(), name) == names.end()) {
    std::string valid;
    for (const auto& n : names) valid += (valid.empty() ? "" : ", ") + n;
    fail(ErrorKind::InvalidInput, "unknown reproduction '" + name + "'; valid names: " + valid);
  }
  return manifest_dir / (name + ".json");
}

}  // namespace spectra::cli
