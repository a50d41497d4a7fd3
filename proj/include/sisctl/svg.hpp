#pragma once

#include <string>
#include <vector>

namespace sisctl {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct Panel {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_y = false;
  std::vector<Series> series;
};

// Renders panels side by side (two per row) as a standalone SVG document.
// Output is a pure function of the input, so identical data gives
// byte-identical files.
std::string render_svg(const std::vector<Panel>& panels);

}  // namespace sisctl
