#pragma once
#include <string>
#include <vector>

#include "fracac/harness.hpp"

namespace fracac {

struct Series {
  std::string label;
  std::vector<double> x, y;
  bool markers = true;  // false: line only
};

struct PlotSpec {
  std::string title, x_label, y_label;
  bool log_x = false, log_y = false;
  std::vector<Series> series;
};

/// Self-contained SVG document.
std::string render_svg(const PlotSpec& spec, const std::string& hash = {});

/// Figure analogues from a measurement table: s_hat vs alpha with gamma,
/// t_hat vs alpha with 1/gamma, log-log width vs eps with fit lines. Returns the
/// written file names; empty series are skipped and reported in `notes`.
std::vector<std::string> emit_plots(const std::vector<MeasurementRecord>& rows, const std::string& dir,
                                    const std::string& hash, std::vector<std::string>* notes = nullptr);

}  // namespace fracac
