#include <CLI11.hpp>

#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "spectra_cli.hpp"

namespace {

using spectra::RunManifest;
namespace cli = spectra::cli;

int report(int code, const std::string& message) {
  std::cerr << "error: " << message << "\n" << "error_code=" << code << "\n";
  return code;
}

struct Common {
  std::string system;
  std::string out;
  std::string manifest_out;
};

void add_common(CLI::App* sub, Common& c, bool needs_system = true) {
  if (needs_system) sub->add_option("system,--system", c.system, "System JSON file")->required();
  sub->add_option("-o,--out", c.out, "Output file (default: stdout)");
  sub->add_option("--manifest-out", c.manifest_out, "Write a replayable manifest here");
}

struct Grid {
  double q_min = 0.0, q_max = 5.0, q_step = 0.05;
};

void add_grid(CLI::App* sub, Grid& g) {
  sub->add_option("--q-min", g.q_min, "First q")->capture_default_str();
  sub->add_option("--q-max", g.q_max, "Last q")->capture_default_str();
  sub->add_option("--q-step", g.q_step, "Grid step")->capture_default_str();
}

RunManifest base_manifest(const std::string& command, const Common& c, const std::string& out_role) {
  RunManifest m;
  m.command = command;
  if (!c.system.empty()) m.input = std::filesystem::absolute(c.system).string();
  if (!c.out.empty()) m.outputs[out_role] = std::filesystem::absolute(c.out).string();
  return m;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lq-spectra and generalised dimensions of planar diagonal self-affine measures"};
  app.require_subcommand(1);
  app.set_version_flag("--version", spectra::kToolVersion);

  Common common;
  Grid grid;
  std::vector<std::size_t> ks;
  bool extrapolate = false;
  std::size_t extrapolate_cap = 256;
  bool strict = false;

  auto* validate = app.add_subcommand("validate", "Check a system and the rectangular open set test");
  add_common(validate, common);

  auto* spectrum = app.add_subcommand("spectrum", "Tabulate closed forms, bounds and gamma_k over a q grid");
  add_common(spectrum, common);
  add_grid(spectrum, grid);
  spectrum->add_option("--k", ks, "Finite level k (repeatable)");
  spectrum->add_flag("--extrapolate", extrapolate, "Add an Aitken extrapolation of gamma_k over k = 2, 4, ...");
  spectrum->add_option("--extrapolate-cap", extrapolate_cap, "Largest k in the extrapolation sweep");
  spectrum->add_flag("--strict-projections", strict, "Refuse overlapping projected maps");

  auto* gendim = app.add_subcommand("gendim", "Tabulate generalised q-dimension candidates and bounds");
  add_common(gendim, common);
  add_grid(gendim, grid);
  gendim->add_option("--k", ks, "Finite level k (repeatable)");

  std::vector<std::string> xs{"3/2", "2", "4"};
  auto* binomial = app.add_subcommand("binomial", "Split binomial ratios against their growth limit");
  add_common(binomial, common, false);
  binomial->add_option("--x", xs, "x > 1, as a decimal or a/b (repeatable)");
  binomial->add_option("--k", ks, "Odd k (repeatable)")->required();

  int width = 512, height = 512, depth = 1;
  std::uint64_t iterations = 1'000'000, seed = 1, random_translations = 0;
  std::string mode = "chaos", format;
  bool overlay = false;
  auto* render = app.add_subcommand("render", "Render the attractor or measure as PPM or SVG");
  add_common(render, common);
  render->add_option("--width", width)->capture_default_str();
  render->add_option("--height", height)->capture_default_str();
  render->add_option("--iterations", iterations)->capture_default_str();
  render->add_option("--seed", seed)->capture_default_str();
  render->add_option("--mode", mode, "chaos or depth")->capture_default_str();
  render->add_option("--depth", depth, "Word length in depth mode")->capture_default_str();
  render->add_flag("--overlay", overlay, "Outline the first-level images of the unit square");
  auto* rt = render->add_option("--random-translations", random_translations, "Seed for random translations");
  render->add_option("--format", format, "ppm or svg (default: from the file extension)");

  std::string name, manifest_path, out_dir = ".", manifest_dir;
  auto* reproduce = app.add_subcommand("reproduce", "Regenerate a pinned artifact from its manifest");
  reproduce->add_option("name", name, "figure1, example-fraser, example-miao, phase-transition or binomial")
      ->required();
  reproduce->add_option("--out-dir", out_dir, "Directory for outputs")->capture_default_str();
  reproduce->add_option("--manifest-dir", manifest_dir, "Directory holding the pinned manifests");

  auto* run = app.add_subcommand("run", "Replay a manifest");
  run->add_option("manifest", manifest_path, "Manifest JSON")->required();
  run->add_option("--out-dir", out_dir, "Directory for relative outputs")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return report(cli::kInvalidInput, "invalid command line");
  }

  try {
    const std::optional<std::string> mout =
        common.manifest_out.empty() ? std::nullopt : std::optional<std::string>(common.manifest_out);
    const spectra::QGrid qg{grid.q_min, grid.q_max, grid.q_step};

    if (validate->parsed()) {
      auto m = base_manifest("validate", common, "text");
      const auto ts = cli::manifest_system(m, ".");
      std::cout << cli::validation_text(ts);
      return cli::kOk;
    }
    if (spectrum->parsed()) {
      auto m = base_manifest("spectrum", common, "csv");
      m.q_grid = qg;
      m.ks = ks;
      m.options = {{"extrapolate", extrapolate},
                   {"extrapolate_cap", extrapolate_cap},
                   {"projection_mode", strict ? "strict" : "assume-separated"}};
      cli::execute(m, ".", ".", std::cout, mout);
    } else if (gendim->parsed()) {
      auto m = base_manifest("gendim", common, "csv");
      m.q_grid = qg;
      m.ks = ks;
      cli::execute(m, ".", ".", std::cout, mout);
    } else if (binomial->parsed()) {
      auto m = base_manifest("binomial", common, "csv");
      m.ks = ks;
      m.options = {{"x", xs}};
      cli::execute(m, ".", ".", std::cout, mout);
    } else if (render->parsed()) {
      auto m = base_manifest("render", common, "image");
      if (format.empty()) format = common.out.size() >= 4 && common.out.ends_with(".svg") ? "svg" : "ppm";
      m.seeds = {seed};
      m.options = {{"width", width}, {"height", height}, {"iterations", iterations}, {"mode", mode},
                   {"depth", depth}, {"overlay", overlay}, {"format", format}};
      if (rt->count() > 0) m.options["random_translations"] = random_translations;
      spectra::require(!common.out.empty(), "render needs --out");
      cli::execute(m, ".", ".", std::cout, mout);
    } else if (reproduce->parsed()) {
      const auto dir = manifest_dir.empty() ? cli::default_manifest_dir() : std::filesystem::path(manifest_dir);
      const auto path = cli::reproduce_manifest_path(name, dir);
      const auto m = cli::load_manifest(path.string());
      cli::execute(m, path.parent_path(), out_dir, std::cout);
      for (const auto& [role, file] : m.outputs) std::cout << role << "=" << (std::filesystem::path(out_dir) / file).string() << "\n";
    } else if (run->parsed()) {
      const auto m = cli::load_manifest(manifest_path);
      cli::execute(m, std::filesystem::path(manifest_path).parent_path(), out_dir, std::cout);
    }
    return cli::kOk;
  } catch (const spectra::Error& e) {
    return report(cli::exit_code_for(e.kind()), e.what());
  } catch (const std::exception& e) {
    return report(cli::kSolverFailure, e.what());
  }
}
