//
// Project SynthWeaver
// SPDX-License-Identifier: Apache-2.0
//
#include "synthweaver/svgplot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace synthweaver {

namespace {

constexpr int kWidth = 640;
constexpr int kHeight = 440;
constexpr int kMarginLeft = 70, kMarginRight = 20, kMarginTop = 40, kMarginBottom = 55;

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

SvgPlot::SvgPlot(std::string title, std::string x_label, std::string y_label)
    : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)) {}

void SvgPlot::add_scatter(std::vector<std::pair<double, double>> points,
                          const std::string& name) {
  series_.push_back({std::move(points), name, Series::Kind::Scatter});
}

void SvgPlot::add_line(std::vector<std::pair<double, double>> points, const std::string& name) {
  series_.push_back({std::move(points), name, Series::Kind::Line});
}

void SvgPlot::add_step(std::vector<std::pair<double, double>> points, const std::string& name) {
  series_.push_back({std::move(points), name, Series::Kind::Step});
}

std::string SvgPlot::render() const {
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const Series& s : series_) {
    for (auto [x, y] : s.points) {
      double xv = log_x_ ? std::log10(std::max(x, 1e-12)) : x;
      xmin = std::min(xmin, xv);
      xmax = std::max(xmax, xv);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  }
  if (!(xmin <= xmax)) {  // no data
    xmin = 0.0;
    xmax = 1.0;
    ymin = 0.0;
    ymax = 1.0;
  }
  if (xmax - xmin < 1e-12) xmax = xmin + 1.0;
  if (ymax - ymin < 1e-12) ymax = ymin + 1.0;
  double xpad = 0.03 * (xmax - xmin), ypad = 0.06 * (ymax - ymin);
  xmin -= xpad;
  xmax += xpad;
  ymin -= ypad;
  ymax += ypad;

  auto px = [&](double x) {
    double v = log_x_ ? std::log10(std::max(x, 1e-12)) : x;
    return kMarginLeft + (v - xmin) / (xmax - xmin) * (kWidth - kMarginLeft - kMarginRight);
  };
  auto py = [&](double y) {
    return kHeight - kMarginBottom -
           (y - ymin) / (ymax - ymin) * (kHeight - kMarginTop - kMarginBottom);
  };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
     << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\" "
        "font-family=\"sans-serif\">"
     << title_ << "</text>\n";

  // axes
  os << "<line x1=\"" << kMarginLeft << "\" y1=\"" << kHeight - kMarginBottom << "\" x2=\""
     << kWidth - kMarginRight << "\" y2=\"" << kHeight - kMarginBottom
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << kMarginLeft << "\" y1=\"" << kMarginTop << "\" x2=\"" << kMarginLeft
     << "\" y2=\"" << kHeight - kMarginBottom << "\" stroke=\"black\"/>\n";

  for (int t = 0; t <= 5; ++t) {
    double fx = xmin + (xmax - xmin) * t / 5.0;
    double gx = kMarginLeft + (fx - xmin) / (xmax - xmin) * (kWidth - kMarginLeft - kMarginRight);
    double label = log_x_ ? std::pow(10.0, fx) : fx;
    os << "<line x1=\"" << gx << "\" y1=\"" << kHeight - kMarginBottom << "\" x2=\"" << gx
       << "\" y2=\"" << kHeight - kMarginBottom + 5 << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << gx << "\" y=\"" << kHeight - kMarginBottom + 20
       << "\" text-anchor=\"middle\" font-size=\"11\" font-family=\"sans-serif\">"
       << fmt(label) << "</text>\n";
    double fy = ymin + (ymax - ymin) * t / 5.0;
    double gy = py(fy);
    os << "<line x1=\"" << kMarginLeft - 5 << "\" y1=\"" << gy << "\" x2=\"" << kMarginLeft
       << "\" y2=\"" << gy << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << kMarginLeft - 8 << "\" y=\"" << gy + 4
       << "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">" << fmt(fy)
       << "</text>\n";
  }
  os << "<text x=\"" << (kMarginLeft + kWidth - kMarginRight) / 2 << "\" y=\"" << kHeight - 12
     << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\">" << x_label_
     << "</text>\n";
  os << "<text x=\"16\" y=\"" << (kMarginTop + kHeight - kMarginBottom) / 2
     << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\" "
        "transform=\"rotate(-90 16 "
     << (kMarginTop + kHeight - kMarginBottom) / 2 << ")\">" << y_label_ << "</text>\n";

  for (std::size_t si = 0; si < series_.size(); ++si) {
    const Series& s = series_[si];
    const char* color = kColors[si % 6];
    if (s.kind == Series::Kind::Scatter) {
      for (auto [x, y] : s.points) {
        os << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y)
           << "\" r=\"2.2\" fill=\"" << color << "\" fill-opacity=\"0.55\"/>\n";
      }
    } else {
      os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.8\" points=\"";
      const std::pair<double, double>* prev = nullptr;
      for (const auto& pt : s.points) {
        if (s.kind == Series::Kind::Step && prev != nullptr) {
          os << px(pt.first) << "," << py(prev->second) << " ";
        }
        os << px(pt.first) << "," << py(pt.second) << " ";
        prev = &pt;
      }
      os << "\"/>\n";
    }
    // legend
    double ly = kMarginTop + 16.0 * static_cast<double>(si);
    os << "<rect x=\"" << kWidth - kMarginRight - 150 << "\" y=\"" << ly
       << "\" width=\"10\" height=\"10\" fill=\"" << color << "\"/>\n";
    os << "<text x=\"" << kWidth - kMarginRight - 135 << "\" y=\"" << ly + 9
       << "\" font-size=\"11\" font-family=\"sans-serif\">" << s.name << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void SvgPlot::write(const std::filesystem::path& path) const {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write SVG: " + path.string());
  out << render();
}

}  // namespace synthweaver
