#pragma once

// Raster and vector pictures of self-affine sets and measures.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "spectra/error.hpp"
#include "spectra/ifs.hpp"
#include "spectra/measure_lab.hpp"

namespace spectra {

enum class RenderMode { ChaosGame, DeterministicDepth };

struct RenderConfig {
  int width = 512;
  int height = 512;
  std::uint64_t iterations = 1'000'000;  // chaos game only; 0 gives a blank picture
  std::uint64_t seed = 1;
  RenderMode mode = RenderMode::ChaosGame;
  int depth = 1;                          // deterministic mode only
  bool overlay = false;                   // outline the first-level images of [0,1]^2
  std::optional<std::uint64_t> randomize_translations;
};

struct Rgb {
  std::uint8_t r = 255, g = 255, b = 255;
};

struct Image {
  int width = 0;
  int height = 0;
  std::vector<Rgb> pixels;  // row-major, row 0 at the top

  Rgb& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

inline void validate_render_config(const RenderConfig& cfg) {
  require(cfg.width > 0 && cfg.height > 0, "render needs positive width and height");
  require(cfg.width <= 16384 && cfg.height <= 16384, "render dimensions above 16384");
  require(cfg.depth >= 0 && cfg.depth <= 12, "render depth must be in [0, 12]");
}

/// Re-draws each translation uniformly among positions that keep the image
/// of the unit square inside it. Linear parts and weights are unchanged.
inline DiagonalSystem randomize_translations(DiagonalSystem sys, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (auto& m : sys.maps) {
    const double ux = uniform01(rng), uy = uniform01(rng);
    m.tx = m.sign_c > 0 ? ux * (1.0 - m.c) : m.c + ux * (1.0 - m.c);
    m.ty = m.sign_d > 0 ? uy * (1.0 - m.d) : m.d + uy * (1.0 - m.d);
  }
  return sys;
}

/// Images of [0,1]^2 under all words of the given length.
inline std::vector<Rect> level_rectangles(const DiagonalSystem& sys, int depth) {
  std::vector<Rect> rects{Rect{{0.0, 1.0}, {0.0, 1.0}}};
  for (int level = 0; level < depth; ++level) {
    std::vector<Rect> next;
    next.reserve(rects.size() * sys.size());
    for (const auto& r : rects) {
      for (const auto& m : sys.maps) {
        next.push_back({image_of(m.c, m.sign_c, m.tx, r.x), image_of(m.d, m.sign_d, m.ty, r.y)});
      }
    }
    rects = std::move(next);
  }
  return rects;
}

namespace detail {

struct PixelMap {
  Window w;
  int width, height;

  int px(double x) const { return std::clamp(static_cast<int>(std::floor((x - w.x0) / w.side * width)), 0, width - 1); }
  int py(double y) const {
    return std::clamp(height - 1 - static_cast<int>(std::floor((y - w.y0) / w.side * height)), 0, height - 1);
  }
};

inline void outline(Image& img, const PixelMap& pm, const Rect& r, Rgb colour) {
  const int x0 = pm.px(r.x.lo), x1 = pm.px(r.x.hi), y0 = pm.py(r.y.hi), y1 = pm.py(r.y.lo);
  for (int x = x0; x <= x1; ++x) img.at(x, y0) = img.at(x, y1) = colour;
  for (int y = y0; y <= y1; ++y) img.at(x0, y) = img.at(x1, y) = colour;
}

}  // namespace detail

inline Image render(const DiagonalSystem& input, const RenderConfig& cfg) {
  validate_render_config(cfg);
  const DiagonalSystem sys =
      cfg.randomize_translations ? randomize_translations(input, *cfg.randomize_translations) : input;
  Image img{cfg.width, cfg.height, std::vector<Rgb>(static_cast<std::size_t>(cfg.width) * cfg.height)};
  const detail::PixelMap pm{sampling_window(sys), cfg.width, cfg.height};

  if (cfg.mode == RenderMode::ChaosGame) {
    if (cfg.iterations > 0) {
      std::vector<std::uint64_t> hits(img.pixels.size(), 0);
      chaos_game(sys, cfg.iterations, cfg.seed, [&](double x, double y) {
        ++hits[static_cast<std::size_t>(pm.py(y)) * cfg.width + pm.px(x)];
      });
      const double top = std::log1p(static_cast<double>(*std::max_element(hits.begin(), hits.end())));
      for (std::size_t j = 0; j < hits.size(); ++j) {
        if (hits[j] == 0) continue;
        // Log-scaled density: darker means more mass.
        const double t = std::log1p(static_cast<double>(hits[j])) / top;
        const auto v = static_cast<std::uint8_t>(std::lround(220.0 * (1.0 - t)));
        img.pixels[j] = {v, v, v};
      }
    }
  } else {
    for (const auto& r : level_rectangles(sys, cfg.depth)) {
      for (int y = pm.py(r.y.hi); y <= pm.py(r.y.lo); ++y) {
        for (int x = pm.px(r.x.lo); x <= pm.px(r.x.hi); ++x) img.at(x, y) = {40, 40, 40};
      }
    }
  }
  if (cfg.overlay) {
    for (const auto& r : level_rectangles(sys, 1)) detail::outline(img, pm, r, {200, 30, 30});
  }
  return img;
}

inline std::string to_ppm(const Image& img) {
  std::string out = "P6\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
  out.reserve(out.size() + img.pixels.size() * 3);
  for (const auto& p : img.pixels) {
    out.push_back(static_cast<char>(p.r));
    out.push_back(static_cast<char>(p.g));
    out.push_back(static_cast<char>(p.b));
  }
  return out;
}

/// SVG 1.1: one rect per run of equal-coloured non-white pixels in a row.
inline std::string to_svg(const Image& img) {
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << img.width << "\" height=\""
     << img.height << "\" viewBox=\"0 0 " << img.width << ' ' << img.height << "\" shape-rendering=\"crispEdges\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  char colour[8];
  for (int y = 0; y < img.height; ++y) {
    int x = 0;
    while (x < img.width) {
      const Rgb p = img.pixels[static_cast<std::size_t>(y) * img.width + x];
      int run = 1;
      while (x + run < img.width) {
        const Rgb q = img.pixels[static_cast<std::size_t>(y) * img.width + x + run];
        if (q.r != p.r || q.g != p.g || q.b != p.b) break;
        ++run;
      }
      if (p.r != 255 || p.g != 255 || p.b != 255) {
        std::snprintf(colour, sizeof colour, "#%02x%02x%02x", p.r, p.g, p.b);
        os << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << run << "\" height=\"1\" fill=\"" << colour
           << "\"/>\n";
      }
      x += run;
    }
  }
  os << "</svg>\n";
  return os.str();
}

inline void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(ErrorKind::Io, "cannot open " + path + " for writing");
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) fail(ErrorKind::Io, "write failed for " + path);
}

}  // namespace spectra
