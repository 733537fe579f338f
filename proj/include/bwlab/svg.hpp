// bwlab: Bouc-Wen class hysteresis toolkit
//
// Standalone SVG line / scatter plots for the CLI outputs.
//
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "bwlab/io.hpp"

namespace bwlab::svg {

struct Series {
  std::vector<double> x, y;
  std::string label;
  bool scatter = false;
};

struct PlotOptions {
  std::string title, xlabel, ylabel;
  int width = 640, height = 420;
};

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

inline std::string plot(const std::vector<Series>& series, const PlotOptions& o = {}) {
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  if (!std::isfinite(x0)) x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
  if (x1 == x0) x1 = x0 + 1.0;
  if (y1 == y0) y1 = y0 + 1.0;
  const double ml = 70, mr = 20, mt = 30, mb = 50;
  const double pw = o.width - ml - mr, ph = o.height - mt - mb;
  auto px = [&](double x) { return ml + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return mt + (1.0 - (y - y0) / (y1 - y0)) * ph; };

  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(o.width) + "\" height=\"" +
                  std::to_string(o.height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s += "<rect x=\"" + fmt9(ml) + "\" y=\"" + fmt9(mt) + "\" width=\"" + fmt9(pw) + "\" height=\"" + fmt9(ph) +
       "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = x0 + (x1 - x0) * k / 4.0, yv = y0 + (y1 - y0) * k / 4.0;
    s += "<text x=\"" + fmt9(px(xv)) + "\" y=\"" + fmt9(mt + ph + 16) + "\" text-anchor=\"middle\">" + fmt9(xv) +
         "</text>\n";
    s += "<text x=\"" + fmt9(ml - 6) + "\" y=\"" + fmt9(py(yv) + 4) + "\" text-anchor=\"end\">" + fmt9(yv) +
         "</text>\n";
  }
  s += "<text x=\"" + fmt9(ml + pw / 2) + "\" y=\"" + fmt9(o.height - 10.0) + "\" text-anchor=\"middle\">" +
       escape(o.xlabel) + "</text>\n";
  s += "<text x=\"14\" y=\"" + fmt9(mt + ph / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 14 " +
       fmt9(mt + ph / 2) + ")\">" + escape(o.ylabel) + "</text>\n";
  s += "<text x=\"" + fmt9(ml + pw / 2) + "\" y=\"18\" text-anchor=\"middle\">" + escape(o.title) + "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& sr = series[k];
    const std::string col = colors[k % 6];
    if (sr.scatter) {
      for (std::size_t i = 0; i < sr.x.size(); ++i)
        if (std::isfinite(sr.x[i]) && std::isfinite(sr.y[i]))
          s += "<circle cx=\"" + fmt9(px(sr.x[i])) + "\" cy=\"" + fmt9(py(sr.y[i])) + "\" r=\"2\" fill=\"" + col +
               "\"/>\n";
    } else {
      s += "<polyline fill=\"none\" stroke=\"" + col + "\" stroke-width=\"1.2\" points=\"";
      for (std::size_t i = 0; i < sr.x.size(); ++i)
        if (std::isfinite(sr.x[i]) && std::isfinite(sr.y[i])) s += fmt9(px(sr.x[i])) + "," + fmt9(py(sr.y[i])) + " ";
      s += "\"/>\n";
    }
    if (!sr.label.empty())
      s += "<text x=\"" + fmt9(ml + pw - 8) + "\" y=\"" + fmt9(mt + 16.0 + 14.0 * static_cast<double>(k)) +
           "\" text-anchor=\"end\" fill=\"" + col + "\">" + escape(sr.label) + "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

}  // namespace bwlab::svg
