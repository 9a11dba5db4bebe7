#pragma once

// JSON form of a system:
//   {"maps": [{"c": 0.75, "d": 0.25, "sign_c": 1, "sign_d": 1, "tx": 0, "ty": 0, "b": 0}, ...],
//    "probabilities": [0.5, 0.5]}
// Numbers may also be given as "a/b" strings. "b" is an optional
// off-diagonal entry; signs default to +1 and translations to 0.

#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "spectra/error.hpp"
#include "spectra/gen_dim.hpp"
#include "spectra/ifs.hpp"

namespace spectra {

using Json = nlohmann::json;

namespace detail {

inline double json_number(const Json& v, const std::string& path) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    const auto slash = s.find('/');
    try {
      std::size_t used = 0;
      if (slash == std::string::npos) {
        const double x = std::stod(s, &used);
        if (used == s.size()) return x;
      } else {
        const double a = std::stod(s.substr(0, slash), &used);
        const std::string den = s.substr(slash + 1);
        std::size_t used_den = 0;
        const double b = std::stod(den, &used_den);
        if (used == slash && used_den == den.size() && b != 0.0) return a / b;
      }
    } catch (const std::exception&) {
    }
  }
  fail(ErrorKind::InvalidInput, path + ": expected a number or \"a/b\"");
}

inline int json_sign(const Json& obj, const char* key, const std::string& path) {
  if (!obj.contains(key)) return 1;
  const auto& v = obj.at(key);
  if (!v.is_number_integer() || (v.get<int>() != 1 && v.get<int>() != -1)) {
    fail(ErrorKind::InvalidInput, path + "/" + key + ": expected 1 or -1");
  }
  return v.get<int>();
}

inline double optional_number(const Json& obj, const char* key, const std::string& path, double fallback) {
  return obj.contains(key) ? json_number(obj.at(key), path + "/" + key) : fallback;
}

}  // namespace detail

/// Converts parsed JSON to a system; errors name the JSON path.
inline TriangularSystem system_from_json(const Json& j) {
  if (!j.is_object()) fail(ErrorKind::InvalidInput, "/: expected an object");
  if (!j.contains("maps") || !j.at("maps").is_array()) fail(ErrorKind::InvalidInput, "/maps: expected an array");
  if (!j.contains("probabilities") || !j.at("probabilities").is_array()) {
    fail(ErrorKind::InvalidInput, "/probabilities: expected an array");
  }
  TriangularSystem ts;
  const auto& maps = j.at("maps");
  for (std::size_t i = 0; i < maps.size(); ++i) {
    const std::string path = "/maps/" + std::to_string(i);
    const auto& m = maps[i];
    if (!m.is_object()) fail(ErrorKind::InvalidInput, path + ": expected an object");
    for (const char* key : {"c", "d"}) {
      if (!m.contains(key)) fail(ErrorKind::InvalidInput, path + "/" + key + ": missing");
    }
    DiagonalMap dm;
    dm.c = detail::json_number(m.at("c"), path + "/c");
    dm.d = detail::json_number(m.at("d"), path + "/d");
    dm.sign_c = detail::json_sign(m, "sign_c", path);
    dm.sign_d = detail::json_sign(m, "sign_d", path);
    dm.tx = detail::optional_number(m, "tx", path, 0.0);
    dm.ty = detail::optional_number(m, "ty", path, 0.0);
    ts.diagonal.maps.push_back(dm);
    ts.off_diagonal.push_back(detail::optional_number(m, "b", path, 0.0));
  }
  const auto& probs = j.at("probabilities");
  for (std::size_t i = 0; i < probs.size(); ++i) {
    ts.diagonal.probabilities.push_back(detail::json_number(probs[i], "/probabilities/" + std::to_string(i)));
  }
  return ts;
}

/// Parses text; syntax errors report line and column.
inline Json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t j = 0; j + 1 < e.byte && j < text.size(); ++j) {
      if (text[j] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    fail(ErrorKind::InvalidInput, source + ":" + std::to_string(line) + ":" + std::to_string(col) +
                                      ": malformed JSON");
  }
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorKind::Io, "cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

/// Loads, checks and renormalises a system. Non-diagonal input is accepted;
/// callers decide which operations it supports.
inline TriangularSystem load_system(const std::string& path) {
  const auto text = read_text_file(path);
  auto ts = system_from_json(parse_json_text(text, path));
  try {
    ts.diagonal = normalized(ts.diagonal);
  } catch (const Error& e) {
    fail(e.kind(), path + ": " + e.what());
  }
  return ts;
}

inline Json system_to_json(const TriangularSystem& ts) {
  Json maps = Json::array();
  for (std::size_t i = 0; i < ts.diagonal.size(); ++i) {
    const auto& m = ts.diagonal.maps[i];
    Json o = {{"c", m.c}, {"d", m.d}, {"sign_c", m.sign_c}, {"sign_d", m.sign_d}, {"tx", m.tx}, {"ty", m.ty}};
    if (i < ts.off_diagonal.size() && ts.off_diagonal[i] != 0.0) o["b"] = ts.off_diagonal[i];
    maps.push_back(o);
  }
  return {{"maps", maps}, {"probabilities", ts.diagonal.probabilities}};
}

}  // namespace spectra
