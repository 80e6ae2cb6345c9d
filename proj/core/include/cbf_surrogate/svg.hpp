#pragma once

#include <filesystem>
#include <span>
#include <string>

namespace cbf_surrogate {

struct ScatterLabels {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::string annotation;  // e.g. "r = 0.46, FDR-p = 8.0e-04"
};

// Pixel mapping shared by the renderer and its tests.
struct ScatterLayout {
  static constexpr double kWidth = 480.0;
  static constexpr double kHeight = 400.0;
  static constexpr double kLeft = 64.0;
  static constexpr double kRight = 20.0;
  static constexpr double kTop = 40.0;
  static constexpr double kBottom = 52.0;

  double x_min = 0.0, x_max = 1.0, y_min = 0.0, y_max = 1.0;

  // Data bounds padded by 5% on each side; a degenerate axis becomes +-1.
  static ScatterLayout fit(std::span<const double> xs, std::span<const double> ys);
  double px(double x) const;
  double py(double y) const;
};

// Standalone SVG: one <circle> per point, least-squares line, axes, labels.
std::string scatter_svg(std::span<const double> xs, std::span<const double> ys,
                        const ScatterLabels& labels);

void write_scatter_svg(std::span<const double> xs, std::span<const double> ys,
                       const ScatterLabels& labels, const std::filesystem::path& out_path);

}  // namespace cbf_surrogate
