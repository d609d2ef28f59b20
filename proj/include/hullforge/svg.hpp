#pragma once

#include <string>
#include <vector>

namespace hullforge {

// Static SVG plot builders. Output is plain SVG 1.1 with fixed-point
// coordinates so identical inputs render byte-identical files.

struct SvgSeries {
    std::string label;
    std::string color;
    std::vector<double> x;
    std::vector<double> y;
};

std::string svg_line_chart(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<SvgSeries>& series,
                           int marked_index = -1);

std::string svg_bar_chart(const std::string& title, const std::string& x_label,
                          const std::string& y_label, const std::vector<double>& values,
                          const std::vector<std::string>& labels, int marked_index = -1);

std::string svg_scatter(const std::string& title, const std::string& x_label,
                        const std::string& y_label, const std::vector<SvgSeries>& series);

void write_text_file(const std::string& path, const std::string& content);

} // namespace hullforge
