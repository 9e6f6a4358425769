#pragma once

#include <optional>
#include <string>
#include <vector>

namespace mtreg::svg {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool markers = false;
};

struct Plot {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_y = false;  // non-positive values are dropped on a log axis
  std::vector<Series> series;
  int width = 640;
  int height = 400;
};

/// Standalone SVG document with axes, tick labels and one polyline per series.
/// A timestamp, when given, is written as a leading comment and nowhere else.
std::string render(const Plot& plot, const std::optional<std::string>& timestamp = std::nullopt);

/// Current UTC time as YYYY-MM-DDTHH:MM:SSZ.
std::string utc_timestamp();

}  // namespace mtreg::svg
