#pragma once

#include <string>
#include <vector>

namespace tricloud::cli {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;  // non-finite points are skipped
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  int width = 640;
  int height = 400;
};

std::string svg_line_plot(const PlotSpec& spec);

}  // namespace tricloud::cli
