#include "ksn/svg.hpp"

#include "ksn/io.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ksn {

void FigureSpec::validate() const {
    if (series.empty())
        throw std::invalid_argument("figure needs at least one series");
    for (const Series& s : series) {
        if (s.x.size() != s.y.size() || s.x.empty())
            throw std::invalid_argument("series '" + s.name +
                                        "' has mismatched or empty data");
        for (size_t i = 1; i < s.x.size(); ++i)
            if (!(s.x[i] > s.x[i - 1]))
                throw std::invalid_argument("series '" + s.name +
                                            "' x values must be increasing");
        if (!s.band_low.empty() && (s.band_low.size() != s.x.size() ||
                                    s.band_high.size() != s.x.size()))
            throw std::invalid_argument("series '" + s.name +
                                        "' band has wrong length");
    }
}

namespace {

constexpr int kWidth = 640;
constexpr int kHeight = 420;
constexpr int kMarginLeft = 62;
constexpr int kMarginRight = 18;
constexpr int kMarginTop = 34;
constexpr int kMarginBottom = 48;

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                          "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
                          "#bcbd22", "#17becf"};

struct AxisScale {
    double lo = 0.0, hi = 1.0;
    bool log = false;

    double map(double v, double pix_lo, double pix_hi) const {
        double t;
        if (log)
            t = (std::log10(v) - std::log10(lo)) /
                (std::log10(hi) - std::log10(lo));
        else
            t = (v - lo) / (hi - lo);
        return pix_lo + t * (pix_hi - pix_lo);
    }
};

std::string fmt_tick(double v) {
    std::ostringstream os;
    os.precision(5);
    os << v;
    return os.str();
}

std::vector<double> linear_ticks(double lo, double hi, int target = 6) {
    const double span = hi - lo;
    if (span <= 0.0)
        return {lo};
    const double raw = span / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (mag * m >= raw) {
            step = mag * m;
            break;
        }
    }
    std::vector<double> ticks;
    for (double v = std::ceil(lo / step) * step; v <= hi + step * 1e-9; v += step)
        ticks.push_back(std::abs(v) < step * 1e-9 ? 0.0 : v);
    return ticks;
}

std::vector<double> log_ticks(double lo, double hi) {
    std::vector<double> ticks;
    for (int e = int(std::floor(std::log10(lo))); e <= int(std::ceil(std::log10(hi)));
         ++e) {
        const double v = std::pow(10.0, e);
        if (v >= lo * (1 - 1e-12) && v <= hi * (1 + 1e-12))
            ticks.push_back(v);
    }
    if (ticks.empty())
        ticks = {lo, hi};
    return ticks;
}

std::string escape_xml(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        default: out += c;
        }
    }
    return out;
}

} // namespace

std::string render_svg(const FigureSpec& figure) {
    figure.validate();

    AxisScale xs, ys;
    xs.log = figure.log_x;
    ys.log = figure.log_y;
    xs.lo = ys.lo = std::numeric_limits<double>::infinity();
    xs.hi = ys.hi = -std::numeric_limits<double>::infinity();
    for (const Series& s : figure.series) {
        for (double v : s.x) {
            xs.lo = std::min(xs.lo, v);
            xs.hi = std::max(xs.hi, v);
        }
        for (double v : s.y) {
            ys.lo = std::min(ys.lo, v);
            ys.hi = std::max(ys.hi, v);
        }
        for (double v : s.band_low)
            ys.lo = std::min(ys.lo, v);
        for (double v : s.band_high)
            ys.hi = std::max(ys.hi, v);
    }
    if (xs.log && !(xs.lo > 0.0))
        throw std::invalid_argument("log x axis needs positive x");
    if (ys.log && !(ys.lo > 0.0))
        throw std::invalid_argument("log y axis needs positive y");
    if (xs.hi == xs.lo)
        xs.hi = xs.lo + 1.0;
    if (ys.hi == ys.lo) {
        ys.hi += 0.5;
        ys.lo -= ys.log ? 0.0 : 0.5;
    }
    if (!ys.log) { // headroom
        const double pad = 0.05 * (ys.hi - ys.lo);
        ys.lo -= pad;
        ys.hi += pad;
    }

    const double px_lo = kMarginLeft, px_hi = kWidth - kMarginRight;
    const double py_lo = kHeight - kMarginBottom, py_hi = kMarginTop;
    auto X = [&](double v) { return xs.map(v, px_lo, px_hi); };
    auto Y = [&](double v) { return ys.map(v, py_lo, py_hi); };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
       << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' '
       << kHeight << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\" "
          "font-family=\"sans-serif\" font-size=\"14\">"
       << escape_xml(figure.title) << "</text>\n";

    // axes
    os << "<line x1=\"" << px_lo << "\" y1=\"" << py_lo << "\" x2=\"" << px_hi
       << "\" y2=\"" << py_lo << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << px_lo << "\" y1=\"" << py_lo << "\" x2=\"" << px_lo
       << "\" y2=\"" << py_hi << "\" stroke=\"black\"/>\n";

    const auto xticks = xs.log ? log_ticks(xs.lo, xs.hi)
                               : linear_ticks(xs.lo, xs.hi);
    for (double v : xticks) {
        const double px = X(v);
        os << "<line x1=\"" << px << "\" y1=\"" << py_lo << "\" x2=\"" << px
           << "\" y2=\"" << py_lo + 4 << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << px << "\" y=\"" << py_lo + 18
           << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
              "font-size=\"11\">"
           << fmt_tick(v) << "</text>\n";
    }
    const auto yticks = ys.log ? log_ticks(ys.lo, ys.hi)
                               : linear_ticks(ys.lo, ys.hi);
    for (double v : yticks) {
        const double py = Y(v);
        os << "<line x1=\"" << px_lo - 4 << "\" y1=\"" << py << "\" x2=\""
           << px_lo << "\" y2=\"" << py << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << px_lo - 7 << "\" y=\"" << py + 4
           << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
              "font-size=\"11\">"
           << fmt_tick(v) << "</text>\n";
    }
    os << "<text x=\"" << (px_lo + px_hi) / 2 << "\" y=\"" << kHeight - 10
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
          "font-size=\"12\">"
       << escape_xml(figure.x_label) << "</text>\n";
    os << "<text x=\"16\" y=\"" << (py_lo + py_hi) / 2
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
          "font-size=\"12\" transform=\"rotate(-90 16 "
       << (py_lo + py_hi) / 2 << ")\">" << escape_xml(figure.y_label)
       << "</text>\n";

    // bands first so lines draw on top
    for (size_t si = 0; si < figure.series.size(); ++si) {
        const Series& s = figure.series[si];
        if (s.band_low.empty())
            continue;
        const char* color = kPalette[si % std::size(kPalette)];
        os << "<polygon fill=\"" << color << "\" fill-opacity=\"0.18\" "
              "stroke=\"none\" points=\"";
        for (size_t i = 0; i < s.x.size(); ++i)
            os << X(s.x[i]) << ',' << Y(s.band_high[i]) << ' ';
        for (size_t i = s.x.size(); i-- > 0;)
            os << X(s.x[i]) << ',' << Y(s.band_low[i]) << ' ';
        os << "\"/>\n";
    }

    for (size_t si = 0; si < figure.series.size(); ++si) {
        const Series& s = figure.series[si];
        const char* color = kPalette[si % std::size(kPalette)];
        os << "<polyline fill=\"none\" stroke=\"" << color
           << "\" stroke-width=\"1.6\" points=\"";
        for (size_t i = 0; i < s.x.size(); ++i)
            os << X(s.x[i]) << ',' << Y(s.y[i]) << ' ';
        os << "\"/>\n";
    }

    // legend
    double ly = py_hi + 6;
    for (size_t si = 0; si < figure.series.size(); ++si) {
        const Series& s = figure.series[si];
        const char* color = kPalette[si % std::size(kPalette)];
        const double lx = px_hi - 150;
        os << "<line x1=\"" << lx << "\" y1=\"" << ly << "\" x2=\"" << lx + 22
           << "\" y2=\"" << ly << "\" stroke=\"" << color
           << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << lx + 28 << "\" y=\"" << ly + 4
           << "\" font-family=\"sans-serif\" font-size=\"11\">"
           << escape_xml(s.name) << "</text>\n";
        ly += 15;
    }

    os << "</svg>\n";
    return os.str();
}

void write_svg(const FigureSpec& figure) {
    write_file(figure.filename, render_svg(figure));
}

} // namespace ksn
