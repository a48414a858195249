#pragma once

#include <string>
#include <vector>

namespace graylaser {

/// Decimal with 17 significant digits, enough to round-trip any double.
std::string format_number(double x);

/// Header row plus one row per entry, '\n' line endings. Throws
/// std::runtime_error if the file cannot be written.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

/// Line plot with axes, tick labels and a legend.
void write_svg(const std::string& path, const std::string& title, const std::string& x_label,
               const std::string& y_label, const std::vector<PlotSeries>& series);

}  // namespace graylaser
