#pragma once

#include <string>
#include <vector>

namespace usv {

/// Minimal static vector plots: polyline series, scatter marks, vertical
/// bars, and box glyphs on one pair of linear axes. Output is a
/// self-contained SVG file.
class SvgPlot {
 public:
  SvgPlot(std::string title, std::string x_label, std::string y_label,
          int width = 720, int height = 480);

  void add_line(const std::vector<double>& x, const std::vector<double>& y,
                const std::string& label, const std::string& color);
  void add_scatter(const std::vector<double>& x, const std::vector<double>& y,
                   const std::string& label, const std::string& color);
  void add_bar(double x, double height, double width,
               const std::string& color);
  /// Box glyph from quartiles: whisker_lo, q1, median, q3, whisker_hi.
  void add_box(double x, double width, double wlo, double q1, double med,
               double q3, double whi, const std::string& color);

  void write(const std::string& path) const;

 private:
  struct Series {
    std::vector<double> x;
    std::vector<double> y;
    std::string label;
    std::string color;
    bool scatter = false;
  };
  struct Bar {
    double x, height, width;
    std::string color;
  };
  struct Box {
    double x, width, wlo, q1, med, q3, whi;
    std::string color;
  };

  void bounds(double& x0, double& x1, double& y0, double& y1) const;

  std::string title_, x_label_, y_label_;
  int width_, height_;
  std::vector<Series> series_;
  std::vector<Bar> bars_;
  std::vector<Box> boxes_;
};

}  // namespace usv
