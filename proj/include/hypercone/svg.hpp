#pragma once

// Minimal static SVG line plots.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include "hypercone/error.hpp"
#include "hypercone/io.hpp"

namespace hypercone::svg {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct Plot {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  std::vector<Series> series;
};

inline std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string render(const Plot& plot) {
  constexpr double W = 640, H = 420, L = 70, R = 20, T = 40, B = 50;
  auto tx = [&](double v) { return plot.log_x ? std::log10(v) : v; };
  auto ty = [&](double v) { return plot.log_y ? std::log10(v) : v; };
  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  for (const auto& s : plot.series) {
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      const double a = tx(s.x[i]), b = ty(s.y[i]);
      if (!std::isfinite(a) || !std::isfinite(b)) continue;
      x0 = std::min(x0, a); x1 = std::max(x1, a);
      y0 = std::min(y0, b); y1 = std::max(y1, b);
    }
  }
  if (x0 > x1) { x0 = 0; x1 = 1; y0 = 0; y1 = 1; }
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;
  auto px = [&](double a) { return L + (a - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double b) { return H - B - (b - y0) / (y1 - y0) * (H - T - B); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  using io::format_number;
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"420\">\n";
  out += "<rect width=\"640\" height=\"420\" fill=\"white\"/>\n";
  out += "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" + escape(plot.title) + "</text>\n";
  out += "<line x1=\"70\" y1=\"370\" x2=\"620\" y2=\"370\" stroke=\"black\"/>\n";
  out += "<line x1=\"70\" y1=\"40\" x2=\"70\" y2=\"370\" stroke=\"black\"/>\n";
  out += "<text x=\"345\" y=\"405\" text-anchor=\"middle\" font-size=\"12\">" + escape(plot.x_label) + "</text>\n";
  out += "<text x=\"16\" y=\"205\" font-size=\"12\" transform=\"rotate(-90 16 205)\" text-anchor=\"middle\">" +
         escape(plot.y_label) + "</text>\n";
  out += "<text x=\"70\" y=\"386\" font-size=\"10\">" + format_number(x0) + "</text>\n";
  out += "<text x=\"620\" y=\"386\" font-size=\"10\" text-anchor=\"end\">" + format_number(x1) + "</text>\n";
  out += "<text x=\"66\" y=\"370\" font-size=\"10\" text-anchor=\"end\">" + format_number(y0) + "</text>\n";
  out += "<text x=\"66\" y=\"46\" font-size=\"10\" text-anchor=\"end\">" + format_number(y1) + "</text>\n";
  for (std::size_t k = 0; k < plot.series.size(); ++k) {
    const auto& s = plot.series[k];
    const char* color = colors[k % 5];
    std::string pts;
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      const double a = tx(s.x[i]), b = ty(s.y[i]);
      if (!std::isfinite(a) || !std::isfinite(b)) continue;
      pts += format_number(std::round(px(a) * 100) / 100) + "," + format_number(std::round(py(b) * 100) / 100) + " ";
    }
    out += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
    out += "<text x=\"530\" y=\"" + std::to_string(56 + 16 * k) + "\" font-size=\"11\" fill=\"" + color + "\">" +
           escape(s.label) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

inline void write(const Plot& plot, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  f << render(plot);
}

}  // namespace hypercone::svg
