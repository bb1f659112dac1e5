#pragma once

#include <string>
#include <vector>

namespace ksn {

enum class FigureKind { path, error_vs_iter, sparsity_vs_iter, f1_vs_param };

/// One polyline, optionally with a translucent band (e.g. mean +- std).
struct Series {
    std::string name;
    std::vector<double> x; // strictly increasing
    std::vector<double> y;
    std::vector<double> band_low;  // empty or same length as x
    std::vector<double> band_high;
};

struct FigureSpec {
    FigureKind kind = FigureKind::path;
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    bool log_y = false;
    std::vector<Series> series;
    std::string filename;

    void validate() const;
};

/// Minimal self-contained SVG renderer: axes with ticks, legend, one
/// polyline per series, bands as translucent polygons.
std::string render_svg(const FigureSpec& figure);

void write_svg(const FigureSpec& figure);

} // namespace ksn
