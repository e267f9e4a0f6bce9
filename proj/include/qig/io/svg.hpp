#pragma once

// Minimal line charts: every column after the first is drawn against the
// first. Non-finite samples break the polyline.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "qig/io/csv.hpp"

namespace qig::io {

namespace detail {
inline std::string fmt(double v) {
  std::string s;
  append_number(s, v);
  return s;
}

inline std::string label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

inline std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

inline constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                           "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
}  // namespace detail

inline std::string to_svg(const Table& t, const std::string& title = "") {
  constexpr double width = 720, height = 440, left = 70, right = 190, top = 30, bottom = 50;
  const double pw = width - left - right, ph = height - top - bottom;
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" height=\"440\" "
                    "font-family=\"sans-serif\" font-size=\"11\">\n";
  out += "<rect width=\"720\" height=\"440\" fill=\"white\"/>\n";
  if (!title.empty())
    out += "<text x=\"" + detail::fmt(left) + "\" y=\"18\" font-size=\"13\">" + detail::escape(title) + "</text>\n";
  if (t.columns.empty()) return out + "</svg>\n";

  const auto& x = t.columns[0];
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (std::size_t r = 0; r < t.rows(); ++r) {
    if (!std::isfinite(x[r])) continue;
    x0 = std::min(x0, x[r]), x1 = std::max(x1, x[r]);
    for (std::size_t c = 1; c < t.columns.size(); ++c)
      if (std::isfinite(t.columns[c][r])) y0 = std::min(y0, t.columns[c][r]), y1 = std::max(y1, t.columns[c][r]);
  }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1;
  if (!std::isfinite(y0)) y0 = 0, y1 = 1;
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y0 -= 0.5, y1 += 0.5;
  auto px = [&](double v) { return left + (v - x0) / (x1 - x0) * pw; };
  auto py = [&](double v) { return top + (y1 - v) / (y1 - y0) * ph; };

  // axes and end ticks
  out += "<path d=\"M" + detail::fmt(left) + " " + detail::fmt(top) + "V" + detail::fmt(top + ph) + "H" +
         detail::fmt(left + pw) + "\" stroke=\"black\" fill=\"none\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = x0 + (x1 - x0) * k / 4.0, yv = y0 + (y1 - y0) * k / 4.0;
    out += "<text x=\"" + detail::fmt(px(xv)) + "\" y=\"" + detail::fmt(top + ph + 16) +
           "\" text-anchor=\"middle\">" + detail::label(xv) + "</text>\n";
    out += "<text x=\"" + detail::fmt(left - 6) + "\" y=\"" + detail::fmt(py(yv) + 4) + "\" text-anchor=\"end\">" +
           detail::label(yv) + "</text>\n";
  }
  out += "<text x=\"" + detail::fmt(left + pw / 2) + "\" y=\"" + detail::fmt(height - 10) +
         "\" text-anchor=\"middle\">" + detail::escape(t.header[0]) + "</text>\n";

  for (std::size_t c = 1; c < t.columns.size(); ++c) {
    const char* colour = detail::kPalette[(c - 1) % std::size(detail::kPalette)];
    std::string d;
    bool pen = false;
    for (std::size_t r = 0; r < t.rows(); ++r) {
      const double xv = x[r], yv = t.columns[c][r];
      if (!std::isfinite(xv) || !std::isfinite(yv)) {
        pen = false;
        continue;
      }
      d += pen ? " " : (d.empty() ? "M" : " M");
      d += detail::fmt(std::round(px(xv) * 100) / 100) + "," + detail::fmt(std::round(py(yv) * 100) / 100);
      pen = true;
    }
    if (!d.empty())
      out += "<path d=\"" + d + "\" stroke=\"" + colour + "\" stroke-width=\"1.5\" fill=\"none\"/>\n";
    const double ly = top + 14.0 * static_cast<double>(c - 1);
    out += "<line x1=\"" + detail::fmt(left + pw + 12) + "\" y1=\"" + detail::fmt(ly) + "\" x2=\"" +
           detail::fmt(left + pw + 32) + "\" y2=\"" + detail::fmt(ly) + "\" stroke=\"" + colour +
           "\" stroke-width=\"2\"/>\n";
    out += "<text x=\"" + detail::fmt(left + pw + 36) + "\" y=\"" + detail::fmt(ly + 4) + "\">" +
           detail::escape(t.header[c]) + "</text>\n";
  }
  return out + "</svg>\n";
}

inline void write_svg(const Table& t, const std::string& path, const std::string& title = "") {
  write_text(path, to_svg(t, title));
}

}  // namespace qig::io
