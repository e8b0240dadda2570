//
// Project SynthWeaver
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace synthweaver {

// Minimal self-contained SVG scatter/line/step plots. Just enough for the
// report renders; no external plotting dependency.
class SvgPlot {
 public:
  SvgPlot(std::string title, std::string x_label, std::string y_label);

  void add_scatter(std::vector<std::pair<double, double>> points, const std::string& name);
  void add_line(std::vector<std::pair<double, double>> points, const std::string& name);
  // horizontal-then-vertical segments; natural for best-so-far curves
  void add_step(std::vector<std::pair<double, double>> points, const std::string& name);
  void set_log_x(bool on) { log_x_ = on; }

  std::string render() const;
  void write(const std::filesystem::path& path) const;

 private:
  struct Series {
    std::vector<std::pair<double, double>> points;
    std::string name;
    enum class Kind { Scatter, Line, Step } kind;
  };
  std::string title_, x_label_, y_label_;
  std::vector<Series> series_;
  bool log_x_ = false;
};

}  // namespace synthweaver
