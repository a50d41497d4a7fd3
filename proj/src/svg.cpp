#include "sisctl/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace sisctl {
namespace {

constexpr double kPanelW = 420.0;
constexpr double kPanelH = 300.0;
constexpr double kMarginL = 60.0;
constexpr double kMarginR = 20.0;
constexpr double kMarginT = 30.0;
constexpr double kMarginB = 45.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void finish() {
    if (!(lo <= hi)) {
      lo = 0.0;
      hi = 1.0;
    }
    if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
      lo -= 0.5;
      hi += 0.5;
    }
  }
};

void draw_panel(std::ostringstream& out, const Panel& panel, double ox,
                double oy) {
  auto ty = [&](double v) { return panel.log_y ? std::log10(v) : v; };
  Range rx, ry;
  for (const auto& s : panel.series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (panel.log_y && !(s.y[i] > 0.0)) continue;
      rx.add(s.x[i]);
      ry.add(ty(s.y[i]));
    }
  }
  rx.finish();
  ry.finish();

  const double pw = kPanelW - kMarginL - kMarginR;
  const double ph = kPanelH - kMarginT - kMarginB;
  auto px = [&](double v) { return ox + kMarginL + (v - rx.lo) / (rx.hi - rx.lo) * pw; };
  auto py = [&](double v) {
    return oy + kMarginT + ph - (v - ry.lo) / (ry.hi - ry.lo) * ph;
  };

  out << "<g>\n";
  out << "<rect x=\"" << num(ox + kMarginL) << "\" y=\"" << num(oy + kMarginT)
      << "\" width=\"" << num(pw) << "\" height=\"" << num(ph)
      << "\" fill=\"none\" stroke=\"#333\"/>\n";
  out << "<text x=\"" << num(ox + kPanelW / 2) << "\" y=\"" << num(oy + 18)
      << "\" text-anchor=\"middle\" font-size=\"13\">" << escape(panel.title)
      << "</text>\n";
  out << "<text x=\"" << num(ox + kMarginL + pw / 2) << "\" y=\""
      << num(oy + kPanelH - 8) << "\" text-anchor=\"middle\" font-size=\"11\">"
      << escape(panel.x_label) << "</text>\n";
  out << "<text x=\"" << num(ox + 12) << "\" y=\"" << num(oy + kMarginT + ph / 2)
      << "\" text-anchor=\"middle\" font-size=\"11\" transform=\"rotate(-90 "
      << num(ox + 12) << " " << num(oy + kMarginT + ph / 2) << ")\">"
      << escape(panel.y_label) << "</text>\n";

  for (int t = 0; t <= 4; ++t) {
    const double fx = rx.lo + (rx.hi - rx.lo) * t / 4.0;
    const double fy = ry.lo + (ry.hi - ry.lo) * t / 4.0;
    out << "<text x=\"" << num(px(fx)) << "\" y=\"" << num(oy + kMarginT + ph + 14)
        << "\" text-anchor=\"middle\" font-size=\"10\">" << tick(fx)
        << "</text>\n";
    const double label = panel.log_y ? std::pow(10.0, fy) : fy;
    out << "<text x=\"" << num(ox + kMarginL - 4) << "\" y=\"" << num(py(fy) + 3)
        << "\" text-anchor=\"end\" font-size=\"10\">" << tick(label)
        << "</text>\n";
  }

  std::size_t colour = 0;
  for (const auto& s : panel.series) {
    const char* stroke = kPalette[colour++ % std::size(kPalette)];
    out << "<polyline fill=\"none\" stroke-width=\"1.5\" stroke=\"" << stroke
        << "\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (panel.log_y && !(s.y[i] > 0.0)) continue;
      if (!std::isfinite(s.y[i])) continue;
      out << num(px(s.x[i])) << "," << num(py(ty(s.y[i]))) << " ";
    }
    out << "\"/>\n";
  }

  if (panel.series.size() > 1 || !panel.series.front().label.empty()) {
    double ly = oy + kMarginT + 12;
    colour = 0;
    for (const auto& s : panel.series) {
      const char* stroke = kPalette[colour++ % std::size(kPalette)];
      out << "<text x=\"" << num(ox + kMarginL + pw - 4) << "\" y=\"" << num(ly)
          << "\" text-anchor=\"end\" font-size=\"10\" fill=\"" << stroke
          << "\">" << escape(s.label) << "</text>\n";
      ly += 12;
    }
  }
  out << "</g>\n";
}

}  // namespace

std::string render_svg(const std::vector<Panel>& panels) {
  const std::size_t cols = panels.size() > 1 ? 2 : 1;
  const std::size_t rows = (panels.size() + cols - 1) / cols;
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\""
      << num(kPanelW * static_cast<double>(cols)) << "\" height=\""
      << num(kPanelH * static_cast<double>(rows))
      << "\" font-family=\"sans-serif\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t i = 0; i < panels.size(); ++i) {
    if (panels[i].series.empty()) continue;
    draw_panel(out, panels[i], kPanelW * static_cast<double>(i % cols),
               kPanelH * static_cast<double>(i / cols));
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace sisctl
