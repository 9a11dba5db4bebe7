#pragma once

// A run manifest records everything needed to replay a command and
// regenerate byte-identical CSV output.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "spectra/error.hpp"

namespace spectra {

inline constexpr const char* kToolVersion = "0.1.0";

struct QGrid {
  double min = 0.0;
  double max = 0.0;
  double step = 0.05;

  /// min + j * step for j = 0..n; indices rather than accumulation keep the
  /// grid identical on every platform.
  std::vector<double> values() const {
    require(step > 0.0, "q-step must be positive");
    require(max >= min, "q-max must be >= q-min");
    const auto n = static_cast<std::size_t>((max - min) / step + 1e-9);
    std::vector<double> out;
    for (std::size_t j = 0; j <= n; ++j) out.push_back(min + static_cast<double>(j) * step);
    return out;
  }
};

struct RunManifest {
  std::string command;
  std::optional<std::string> input;      // path, relative to the manifest's directory
  std::optional<nlohmann::json> system;  // inline system, used when input is absent
  std::optional<QGrid> q_grid;
  std::vector<std::size_t> ks;
  std::vector<std::uint64_t> seeds;
  std::map<std::string, std::string> outputs;  // role -> file name
  nlohmann::json options = nlohmann::json::object();
  std::string tool_version = kToolVersion;
  std::optional<double> wall_time_seconds;  // informational, ignored on replay
};

inline nlohmann::json to_json(const RunManifest& m) {
  nlohmann::json j;
  j["command"] = m.command;
  if (m.input) j["input"] = *m.input;
  if (m.system) j["system"] = *m.system;
  if (m.q_grid) j["q_grid"] = {{"min", m.q_grid->min}, {"max", m.q_grid->max}, {"step", m.q_grid->step}};
  j["ks"] = m.ks;
  j["seeds"] = m.seeds;
  j["outputs"] = m.outputs;
  j["options"] = m.options;
  j["tool_version"] = m.tool_version;
  if (m.wall_time_seconds) j["wall_time_seconds"] = *m.wall_time_seconds;
  return j;
}

inline RunManifest manifest_from_json(const nlohmann::json& j) {
  if (!j.is_object()) fail(ErrorKind::InvalidInput, "manifest: expected an object");
  RunManifest m;
  try {
    m.command = j.at("command").get<std::string>();
    if (j.contains("input")) m.input = j.at("input").get<std::string>();
    if (j.contains("system")) m.system = j.at("system");
    if (j.contains("q_grid")) {
      const auto& g = j.at("q_grid");
      m.q_grid = QGrid{g.at("min").get<double>(), g.at("max").get<double>(), g.at("step").get<double>()};
    }
    if (j.contains("ks")) m.ks = j.at("ks").get<std::vector<std::size_t>>();
    if (j.contains("seeds")) m.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    if (j.contains("outputs")) m.outputs = j.at("outputs").get<std::map<std::string, std::string>>();
    if (j.contains("options")) m.options = j.at("options");
    if (j.contains("tool_version")) m.tool_version = j.at("tool_version").get<std::string>();
    if (j.contains("wall_time_seconds")) m.wall_time_seconds = j.at("wall_time_seconds").get<double>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::InvalidInput, std::string("manifest: ") + e.what());
  }
  return m;
}

}  // namespace spectra
