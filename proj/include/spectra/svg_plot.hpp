#pragma once

// Minimal SVG 1.1 line charts for the reproduction artifacts.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace spectra {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<std::optional<double>> y;  // gaps split the polyline
  std::string colour = "#000000";
  std::string dash;                      // stroke-dasharray, empty for solid
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  int width = 720;
  int height = 480;
  std::vector<PlotSeries> series;
};

namespace detail {

inline std::string svg_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string svg_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

inline double nice_step(double span) {
  const double raw = span / 6.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (m * mag >= raw) return m * mag;
  }
  return 10.0 * mag;
}

inline std::string format_tick(double v, double step) {
  if (std::fabs(v) < 1e-9 * step) v = 0.0;
  const int decimals = std::max(0, static_cast<int>(std::ceil(-std::log10(step) - 1e-9)));
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

}  // namespace detail

inline std::string render_plot(const PlotSpec& spec) {
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
  for (const auto& s : spec.series) {
    for (std::size_t j = 0; j < s.x.size(); ++j) {
      if (!s.y[j] || !std::isfinite(*s.y[j])) continue;
      xmin = std::min(xmin, s.x[j]);
      xmax = std::max(xmax, s.x[j]);
      ymin = std::min(ymin, *s.y[j]);
      ymax = std::max(ymax, *s.y[j]);
    }
  }
  if (!std::isfinite(xmin)) xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
  if (xmax == xmin) xmax = xmin + 1.0;
  if (ymax == ymin) ymax = ymin + 1.0;
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;

  // Legend column sized from the longest label at roughly 8px per glyph.
  std::size_t longest = 0;
  for (const auto& s : spec.series) longest = std::max(longest, s.label.size());
  const double left = 70, right = std::max(170.0, 60.0 + 8.0 * static_cast<double>(longest)), top = 40, bottom = 50;
  const double pw = spec.width - left - right, ph = spec.height - top - bottom;
  auto sx = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
  auto sy = [&](double y) { return top + (ymax - y) / (ymax - ymin) * ph; };
  using detail::svg_num;

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << spec.width << "\" height=\""
     << spec.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n"
     << "<text x=\"" << svg_num(left + pw / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
     << detail::svg_escape(spec.title) << "</text>\n"
     << "<rect x=\"" << svg_num(left) << "\" y=\"" << svg_num(top) << "\" width=\"" << svg_num(pw) << "\" height=\""
     << svg_num(ph) << "\" fill=\"none\" stroke=\"#000000\"/>\n";

  const double xs = detail::nice_step(xmax - xmin), ys = detail::nice_step(ymax - ymin);
  for (double t = std::ceil(xmin / xs) * xs; t <= xmax + 1e-9 * xs; t += xs) {
    os << "<line x1=\"" << svg_num(sx(t)) << "\" y1=\"" << svg_num(top + ph) << "\" x2=\"" << svg_num(sx(t))
       << "\" y2=\"" << svg_num(top + ph + 5) << "\" stroke=\"#000000\"/>\n"
       << "<text x=\"" << svg_num(sx(t)) << "\" y=\"" << svg_num(top + ph + 18) << "\" text-anchor=\"middle\">"
       << detail::svg_escape(detail::format_tick(t, xs)) << "</text>\n";
  }
  for (double t = std::ceil(ymin / ys) * ys; t <= ymax + 1e-9 * ys; t += ys) {
    os << "<line x1=\"" << svg_num(left - 5) << "\" y1=\"" << svg_num(sy(t)) << "\" x2=\"" << svg_num(left)
       << "\" y2=\"" << svg_num(sy(t)) << "\" stroke=\"#000000\"/>\n"
       << "<text x=\"" << svg_num(left - 8) << "\" y=\"" << svg_num(sy(t) + 4) << "\" text-anchor=\"end\">"
       << detail::svg_escape(detail::format_tick(t, ys)) << "</text>\n";
  }
  os << "<text x=\"" << svg_num(left + pw / 2) << "\" y=\"" << spec.height - 12 << "\" text-anchor=\"middle\">"
     << detail::svg_escape(spec.x_label) << "</text>\n"
     << "<text x=\"16\" y=\"" << svg_num(top + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
     << svg_num(top + ph / 2) << ")\">" << detail::svg_escape(spec.y_label) << "</text>\n";

  for (std::size_t k = 0; k < spec.series.size(); ++k) {
    const auto& s = spec.series[k];
    std::string pts;
    auto flush = [&] {
      if (pts.empty()) return;
      os << "<polyline fill=\"none\" stroke=\"" << s.colour << "\" stroke-width=\"1.5\"";
      if (!s.dash.empty()) os << " stroke-dasharray=\"" << s.dash << "\"";
      os << " points=\"" << pts << "\"/>\n";
      pts.clear();
    };
    for (std::size_t j = 0; j < s.x.size(); ++j) {
      if (!s.y[j] || !std::isfinite(*s.y[j])) {
        flush();
        continue;
      }
      if (!pts.empty()) pts += ' ';
      pts += svg_num(sx(s.x[j])) + "," + svg_num(sy(*s.y[j]));
    }
    flush();
    const double ly = top + 14 + 18.0 * static_cast<double>(k);
    const double lx = left + pw + 12;
    os << "<line x1=\"" << svg_num(lx) << "\" y1=\"" << svg_num(ly) << "\" x2=\"" << svg_num(lx + 24) << "\" y2=\""
       << svg_num(ly) << "\" stroke=\"" << s.colour << "\" stroke-width=\"1.5\"";
    if (!s.dash.empty()) os << " stroke-dasharray=\"" << s.dash << "\"";
    os << "/>\n<text x=\"" << svg_num(lx + 30) << "\" y=\"" << svg_num(ly + 4) << "\">"
       << detail::svg_escape(s.label) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace spectra
