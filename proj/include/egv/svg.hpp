#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

// Small self-contained SVG writer for the diagnostic plots the command line
// tool emits. Nothing here is load bearing for the numerics; it only has to
// produce well formed, deterministic markup.

namespace egv::svg {

namespace detail {

inline std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '&') out += "&amp;";
    else if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '"') out += "&quot;";
    else out += c;
  }
  return out;
}

}  // namespace detail

struct Series {
  std::string label;
  std::string color = "#1f6fb2";
  bool draw_line = true;
  bool draw_markers = true;
  std::vector<double> x;
  std::vector<double> y;
};

struct Plot {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  int width = 640;
  int height = 440;
  std::vector<Series> series;

  std::string render() const {
    const double ml = 72, mr = 24, mt = 40, mb = 56;
    const double pw = width - ml - mr, ph = height - mt - mb;

    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    bool first = true;
    for (const auto& s : series)
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        double px = s.x[i], py = s.y[i];
        if (log_x) {
          if (px <= 0) continue;
          px = std::log10(px);
        }
        if (log_y) {
          if (py <= 0) continue;
          py = std::log10(py);
        }
        if (first) {
          xmin = xmax = px;
          ymin = ymax = py;
          first = false;
        } else {
          xmin = std::min(xmin, px);
          xmax = std::max(xmax, px);
          ymin = std::min(ymin, py);
          ymax = std::max(ymax, py);
        }
      }
    if (xmax - xmin < 1e-12) {
      xmin -= 0.5;
      xmax += 0.5;
    }
    if (ymax - ymin < 1e-12) {
      ymin -= 0.5;
      ymax += 0.5;
    }
    const double xpad = 0.05 * (xmax - xmin), ypad = 0.05 * (ymax - ymin);
    xmin -= xpad;
    xmax += xpad;
    ymin -= ypad;
    ymax += ypad;

    auto sx = [&](double v) {
      if (log_x) v = std::log10(v);
      return ml + (v - xmin) / (xmax - xmin) * pw;
    };
    auto sy = [&](double v) {
      if (log_y) v = std::log10(v);
      return mt + ph - (v - ymin) / (ymax - ymin) * ph;
    };

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
           "\" height=\"" + std::to_string(height) + "\" viewBox=\"0 0 " +
           std::to_string(width) + " " + std::to_string(height) + "\">\n";
    out += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(width) + "\" height=\"" +
           std::to_string(height) + "\" fill=\"white\"/>\n";
    out += "<rect x=\"" + detail::num(ml) + "\" y=\"" + detail::num(mt) + "\" width=\"" +
           detail::num(pw) + "\" height=\"" + detail::num(ph) +
           "\" fill=\"none\" stroke=\"#444444\"/>\n";

    // axis ticks: decades on log axes, five even ticks otherwise
    auto ticks = [&](bool log, double lo, double hi) {
      std::vector<double> t;
      if (log) {
        for (int d = int(std::ceil(lo)); d <= int(std::floor(hi)); ++d)
          t.push_back(std::pow(10.0, d));
        if (t.empty()) t.push_back(std::pow(10.0, 0.5 * (lo + hi)));
      } else {
        for (int i = 0; i <= 4; ++i) t.push_back(lo + (hi - lo) * i / 4.0);
      }
      return t;
    };
    for (double tx : ticks(log_x, xmin, xmax)) {
      const double px = sx(tx);
      out += "<line x1=\"" + detail::num(px) + "\" y1=\"" + detail::num(mt + ph) + "\" x2=\"" +
             detail::num(px) + "\" y2=\"" + detail::num(mt + ph + 5) +
             "\" stroke=\"#444444\"/>\n";
      out += "<text x=\"" + detail::num(px) + "\" y=\"" + detail::num(mt + ph + 18) +
             "\" font-size=\"11\" text-anchor=\"middle\">" + detail::num(tx) + "</text>\n";
    }
    for (double ty : ticks(log_y, ymin, ymax)) {
      const double py = sy(ty);
      out += "<line x1=\"" + detail::num(ml - 5) + "\" y1=\"" + detail::num(py) + "\" x2=\"" +
             detail::num(ml) + "\" y2=\"" + detail::num(py) + "\" stroke=\"#444444\"/>\n";
      out += "<text x=\"" + detail::num(ml - 8) + "\" y=\"" + detail::num(py + 4) +
             "\" font-size=\"11\" text-anchor=\"end\">" + detail::num(ty) + "</text>\n";
    }

    for (const auto& s : series) {
      if (s.draw_line && s.x.size() > 1) {
        std::string pts;
        for (std::size_t i = 0; i < s.x.size(); ++i) {
          if ((log_x && s.x[i] <= 0) || (log_y && s.y[i] <= 0)) continue;
          pts += detail::num(sx(s.x[i])) + "," + detail::num(sy(s.y[i])) + " ";
        }
        out += "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"1.5\" points=\"" +
               pts + "\"/>\n";
      }
      if (s.draw_markers)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
          if ((log_x && s.x[i] <= 0) || (log_y && s.y[i] <= 0)) continue;
          out += "<circle cx=\"" + detail::num(sx(s.x[i])) + "\" cy=\"" +
                 detail::num(sy(s.y[i])) + "\" r=\"3\" fill=\"" + s.color + "\"/>\n";
        }
    }

    // legend
    double ly = mt + 14;
    for (const auto& s : series) {
      if (s.label.empty()) continue;
      out += "<rect x=\"" + detail::num(ml + 10) + "\" y=\"" + detail::num(ly - 8) +
             "\" width=\"10\" height=\"10\" fill=\"" + s.color + "\"/>\n";
      out += "<text x=\"" + detail::num(ml + 26) + "\" y=\"" + detail::num(ly) +
             "\" font-size=\"12\">" + detail::escape(s.label) + "</text>\n";
      ly += 16;
    }

    out += "<text x=\"" + detail::num(width / 2.0) + "\" y=\"20\" font-size=\"14\" "
           "text-anchor=\"middle\">" + detail::escape(title) + "</text>\n";
    out += "<text x=\"" + detail::num(ml + pw / 2.0) + "\" y=\"" + detail::num(height - 16.0) +
           "\" font-size=\"12\" text-anchor=\"middle\">" + detail::escape(x_label) + "</text>\n";
    out += "<text x=\"16\" y=\"" + detail::num(mt + ph / 2.0) +
           "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
           detail::num(mt + ph / 2.0) + ")\">" + detail::escape(y_label) + "</text>\n";
    out += "</svg>\n";
    return out;
  }
};

// Side by side bars for two value sets sharing labels (reference vs result).
inline std::string paired_bars(const std::string& title, const std::vector<std::string>& labels,
                               const std::vector<double>& a, const std::vector<double>& b,
                               const std::string& label_a, const std::string& label_b) {
  if (labels.size() != a.size() || labels.size() != b.size())
    throw std::invalid_argument("paired_bars: size mismatch");
  const int width = 640, height = 400;
  const double ml = 60, mr = 20, mt = 40, mb = 60;
  const double pw = width - ml - mr, ph = height - mt - mb;
  double vmax = 1e-12, vmin = 0.0;
  for (double v : a) {
    vmax = std::max(vmax, v);
    vmin = std::min(vmin, v);
  }
  for (double v : b) {
    vmax = std::max(vmax, v);
    vmin = std::min(vmin, v);
  }
  const double span = vmax - vmin;
  auto sy = [&](double v) { return mt + ph - (v - vmin) / span * ph; };
  const double y0 = sy(0.0);

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
         "\" height=\"" + std::to_string(height) + "\">\n";
  out += "<rect x=\"0\" y=\"0\" width=\"640\" height=\"400\" fill=\"white\"/>\n";
  out += "<text x=\"320\" y=\"20\" font-size=\"14\" text-anchor=\"middle\">" +
         detail::escape(title) + "</text>\n";
  const double slot = pw / double(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double x0 = ml + slot * double(i);
    auto bar = [&](double v, double off, const char* color) {
      const double top = std::min(sy(v), y0), bot = std::max(sy(v), y0);
      out += "<rect x=\"" + detail::num(x0 + off) + "\" y=\"" + detail::num(top) +
             "\" width=\"" + detail::num(slot * 0.35) + "\" height=\"" +
             detail::num(std::max(bot - top, 0.5)) + "\" fill=\"" + color + "\"/>\n";
    };
    bar(a[i], slot * 0.10, "#1f6fb2");
    bar(b[i], slot * 0.50, "#d2691e");
    out += "<text x=\"" + detail::num(x0 + slot * 0.5) + "\" y=\"" +
           detail::num(mt + ph + 16) + "\" font-size=\"11\" text-anchor=\"middle\">" +
           detail::escape(labels[i]) + "</text>\n";
  }
  out += "<line x1=\"" + detail::num(ml) + "\" y1=\"" + detail::num(y0) + "\" x2=\"" +
         detail::num(ml + pw) + "\" y2=\"" + detail::num(y0) + "\" stroke=\"#444444\"/>\n";
  out += "<rect x=\"" + detail::num(ml) + "\" y=\"" + detail::num(mt + ph + 28) +
         "\" width=\"10\" height=\"10\" fill=\"#1f6fb2\"/>\n";
  out += "<text x=\"" + detail::num(ml + 16) + "\" y=\"" + detail::num(mt + ph + 37) +
         "\" font-size=\"12\">" + detail::escape(label_a) + "</text>\n";
  out += "<rect x=\"" + detail::num(ml + 140) + "\" y=\"" + detail::num(mt + ph + 28) +
         "\" width=\"10\" height=\"10\" fill=\"#d2691e\"/>\n";
  out += "<text x=\"" + detail::num(ml + 156) + "\" y=\"" + detail::num(mt + ph + 37) +
         "\" font-size=\"12\">" + detail::escape(label_b) + "</text>\n";
  out += "</svg>\n";
  return out;
}

}  // namespace egv::svg
