#include "usv/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace usv {

SvgPlot::SvgPlot(std::string title, std::string x_label, std::string y_label,
                 int width, int height)
    : title_(std::move(title)),
      x_label_(std::move(x_label)),
      y_label_(std::move(y_label)),
      width_(width),
      height_(height) {}

void SvgPlot::add_line(const std::vector<double>& x,
                       const std::vector<double>& y, const std::string& label,
                       const std::string& color) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("svg series size mismatch");
  }
  series_.push_back(Series{x, y, label, color, false});
}

void SvgPlot::add_scatter(const std::vector<double>& x,
                          const std::vector<double>& y,
                          const std::string& label,
                          const std::string& color) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("svg series size mismatch");
  }
  series_.push_back(Series{x, y, label, color, true});
}

void SvgPlot::add_bar(double x, double height, double width,
                      const std::string& color) {
  bars_.push_back(Bar{x, height, width, color});
}

void SvgPlot::add_box(double x, double width, double wlo, double q1,
                      double med, double q3, double whi,
                      const std::string& color) {
  boxes_.push_back(Box{x, width, wlo, q1, med, q3, whi, color});
}

void SvgPlot::bounds(double& x0, double& x1, double& y0, double& y1) const {
  x0 = y0 = 1e300;
  x1 = y1 = -1e300;
  auto grow = [&](double x, double y) {
    x0 = std::min(x0, x);
    x1 = std::max(x1, x);
    y0 = std::min(y0, y);
    y1 = std::max(y1, y);
  };
  for (const Series& s : series_) {
    for (size_t i = 0; i < s.x.size(); ++i) grow(s.x[i], s.y[i]);
  }
  for (const Bar& b : bars_) {
    grow(b.x - b.width / 2, 0.0);
    grow(b.x + b.width / 2, b.height);
  }
  for (const Box& b : boxes_) {
    grow(b.x - b.width / 2, b.wlo);
    grow(b.x + b.width / 2, b.whi);
  }
  if (x0 > x1) {
    x0 = 0.0;
    x1 = 1.0;
  }
  if (y0 > y1) {
    y0 = 0.0;
    y1 = 1.0;
  }
  if (x1 - x0 < 1e-12) {
    x0 -= 0.5;
    x1 += 0.5;
  }
  if (y1 - y0 < 1e-12) {
    y0 -= 0.5;
    y1 += 0.5;
  }
  const double mx = 0.05 * (x1 - x0);
  const double my = 0.05 * (y1 - y0);
  x0 -= mx;
  x1 += mx;
  y0 -= my;
  y1 += my;
}

void SvgPlot::write(const std::string& path) const {
  double x0, x1, y0, y1;
  bounds(x0, x1, y0, y1);
  const double ml = 60, mr = 20, mt = 40, mb = 50;
  const double pw = width_ - ml - mr;
  const double ph = height_ - mt - mb;
  auto px = [&](double x) { return ml + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return mt + (y1 - y) / (y1 - y0) * ph; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_
      << "\" height=\"" << height_ << "\" viewBox=\"0 0 " << width_ << " "
      << height_ << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << width_ / 2 << "\" y=\"24\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"16\">" << title_
      << "</text>\n";

  // Axes frame and labels.
  svg << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw
      << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"#333\" stroke-width=\"1\"/>\n";
  svg << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height_ - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"12\">" << x_label_ << "</text>\n";
  svg << "<text x=\"16\" y=\"" << mt + ph / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"12\" transform=\"rotate(-90 16 " << mt + ph / 2
      << ")\">" << y_label_ << "</text>\n";

  // Tick labels at the corners of the data range.
  svg << std::setprecision(4);
  for (double fx : {0.0, 0.5, 1.0}) {
    const double vx = x0 + fx * (x1 - x0);
    svg << "<text x=\"" << px(vx) << "\" y=\"" << mt + ph + 16
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        << "font-size=\"10\">" << vx << "</text>\n";
    const double vy = y0 + fx * (y1 - y0);
    svg << "<text x=\"" << ml - 6 << "\" y=\"" << py(vy) + 3
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
        << "font-size=\"10\">" << vy << "</text>\n";
  }

  for (const Bar& b : bars_) {
    const double bx = px(b.x - b.width / 2);
    const double bw = px(b.x + b.width / 2) - bx;
    const double by = py(std::max(b.height, 0.0));
    const double bh = std::abs(py(b.height) - py(0.0));
    svg << "<rect x=\"" << bx << "\" y=\"" << by << "\" width=\"" << bw
        << "\" height=\"" << bh << "\" fill=\"" << b.color
        << "\" fill-opacity=\"0.7\"/>\n";
  }

  for (const Box& b : boxes_) {
    const double cx = px(b.x);
    const double bx = px(b.x - b.width / 2);
    const double bw = px(b.x + b.width / 2) - bx;
    svg << "<line x1=\"" << cx << "\" y1=\"" << py(b.wlo) << "\" x2=\"" << cx
        << "\" y2=\"" << py(b.whi) << "\" stroke=\"" << b.color << "\"/>\n";
    svg << "<rect x=\"" << bx << "\" y=\"" << py(b.q3) << "\" width=\"" << bw
        << "\" height=\"" << py(b.q1) - py(b.q3) << "\" fill=\"" << b.color
        << "\" fill-opacity=\"0.4\" stroke=\"" << b.color << "\"/>\n";
    svg << "<line x1=\"" << bx << "\" y1=\"" << py(b.med) << "\" x2=\""
        << bx + bw << "\" y2=\"" << py(b.med) << "\" stroke=\"" << b.color
        << "\" stroke-width=\"2\"/>\n";
  }

  for (const Series& s : series_) {
    if (s.scatter) {
      for (size_t i = 0; i < s.x.size(); ++i) {
        svg << "<circle cx=\"" << px(s.x[i]) << "\" cy=\"" << py(s.y[i])
            << "\" r=\"3\" fill=\"" << s.color << "\"/>\n";
      }
    } else if (!s.x.empty()) {
      svg << "<polyline fill=\"none\" stroke=\"" << s.color
          << "\" stroke-width=\"1.5\" points=\"";
      for (size_t i = 0; i < s.x.size(); ++i) {
        svg << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
      }
      svg << "\"/>\n";
    }
  }

  // Legend.
  double ly = mt + 14;
  for (const Series& s : series_) {
    if (s.label.empty()) continue;
    svg << "<rect x=\"" << ml + pw - 150 << "\" y=\"" << ly - 9
        << "\" width=\"12\" height=\"12\" fill=\"" << s.color << "\"/>\n";
    svg << "<text x=\"" << ml + pw - 132 << "\" y=\"" << ly + 2
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << s.label
        << "</text>\n";
    ly += 16;
  }

  svg << "</svg>\n";
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << svg.str();
}

}  // namespace usv
