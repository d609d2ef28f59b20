#include "hullforge/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "hullforge/errors.hpp"

namespace hullforge {

namespace {

constexpr double kWidth = 800.0, kHeight = 500.0;
constexpr double kLeft = 70.0, kRight = 30.0, kTop = 50.0, kBottom = 60.0;

std::string fixed2(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

// Tick label: enough digits to tell neighbours apart, no noise.
std::string tick_label(double v, double step) {
    char buf[48];
    int decimals = 0;
    if (step > 0.0 && step < 1.0) {
        decimals = std::min(6, static_cast<int>(std::ceil(-std::log10(step))) + 1);
    }
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (const char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        default: out += c;
        }
    }
    return out;
}

struct Range {
    double lo = 0.0, hi = 1.0;
    double scale(double v, double px_lo, double px_hi) const {
        const double t = (v - lo) / (hi - lo);
        return px_lo + t * (px_hi - px_lo);
    }
};

Range padded_range(double lo, double hi) {
    if (!(hi > lo)) {
        const double pad = std::abs(lo) > 0.0 ? std::abs(lo) * 0.1 : 1.0;
        return {lo - pad, hi + pad};
    }
    const double pad = (hi - lo) * 0.05;
    return {lo - pad, hi + pad};
}

std::string header(const std::string& title) {
    std::string s;
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 500\" "
         "font-family=\"sans-serif\">\n";
    s += "<rect x=\"0\" y=\"0\" width=\"800\" height=\"500\" fill=\"white\"/>\n";
    s += "<text x=\"400\" y=\"28\" text-anchor=\"middle\" font-size=\"18\">" + escape(title) +
         "</text>\n";
    return s;
}

std::string axes(const std::string& x_label, const std::string& y_label, const Range& xr,
                 const Range& yr) {
    std::string s;
    s += "<line x1=\"" + fixed2(kLeft) + "\" y1=\"" + fixed2(kHeight - kBottom) + "\" x2=\"" +
         fixed2(kWidth - kRight) + "\" y2=\"" + fixed2(kHeight - kBottom) +
         "\" stroke=\"black\"/>\n";
    s += "<line x1=\"" + fixed2(kLeft) + "\" y1=\"" + fixed2(kTop) + "\" x2=\"" + fixed2(kLeft) +
         "\" y2=\"" + fixed2(kHeight - kBottom) + "\" stroke=\"black\"/>\n";
    const int ticks = 5;
    for (int t = 0; t <= ticks; ++t) {
        const double fx = xr.lo + (xr.hi - xr.lo) * t / ticks;
        const double px = xr.scale(fx, kLeft, kWidth - kRight);
        s += "<line x1=\"" + fixed2(px) + "\" y1=\"" + fixed2(kHeight - kBottom) + "\" x2=\"" +
             fixed2(px) + "\" y2=\"" + fixed2(kHeight - kBottom + 5) + "\" stroke=\"black\"/>\n";
        s += "<text x=\"" + fixed2(px) + "\" y=\"" + fixed2(kHeight - kBottom + 20) +
             "\" text-anchor=\"middle\" font-size=\"11\">" +
             tick_label(fx, (xr.hi - xr.lo) / ticks) + "</text>\n";
        const double fy = yr.lo + (yr.hi - yr.lo) * t / ticks;
        const double py = yr.scale(fy, kHeight - kBottom, kTop);
        s += "<line x1=\"" + fixed2(kLeft - 5) + "\" y1=\"" + fixed2(py) + "\" x2=\"" +
             fixed2(kLeft) + "\" y2=\"" + fixed2(py) + "\" stroke=\"black\"/>\n";
        s += "<text x=\"" + fixed2(kLeft - 8) + "\" y=\"" + fixed2(py + 4) +
             "\" text-anchor=\"end\" font-size=\"11\">" +
             tick_label(fy, (yr.hi - yr.lo) / ticks) + "</text>\n";
    }
    s += "<text x=\"" + fixed2((kLeft + kWidth - kRight) / 2.0) + "\" y=\"" +
         fixed2(kHeight - 15) + "\" text-anchor=\"middle\" font-size=\"13\">" + escape(x_label) +
         "</text>\n";
    s += "<text x=\"20\" y=\"" + fixed2((kTop + kHeight - kBottom) / 2.0) +
         "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 20 " +
         fixed2((kTop + kHeight - kBottom) / 2.0) + ")\">" + escape(y_label) + "</text>\n";
    return s;
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string series_color(const SvgSeries& s, std::size_t index) {
    if (!s.color.empty()) return s.color;
    return kPalette[index % (sizeof(kPalette) / sizeof(kPalette[0]))];
}

} // namespace

std::string svg_line_chart(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<SvgSeries>& series,
                           int marked_index) {
    double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
    double y_lo = x_lo, y_hi = -x_lo;
    for (const auto& s : series) {
        for (const double v : s.x) {
            x_lo = std::min(x_lo, v);
            x_hi = std::max(x_hi, v);
        }
        for (const double v : s.y) {
            y_lo = std::min(y_lo, v);
            y_hi = std::max(y_hi, v);
        }
    }
    if (!std::isfinite(x_lo)) x_lo = 0.0, x_hi = 1.0, y_lo = 0.0, y_hi = 1.0;
    const Range xr = padded_range(x_lo, x_hi);
    const Range yr = padded_range(y_lo, y_hi);

    std::string out = header(title) + axes(x_label, y_label, xr, yr);
    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        const std::string color = series_color(s, si);
        std::string pts;
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            pts += fixed2(xr.scale(s.x[i], kLeft, kWidth - kRight)) + "," +
                   fixed2(yr.scale(s.y[i], kHeight - kBottom, kTop));
            if (i + 1 < s.x.size()) pts += " ";
        }
        out += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + color +
               "\" stroke-width=\"2\"/>\n";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            const bool marked = si == 0 && static_cast<int>(i) == marked_index;
            out += "<circle cx=\"" + fixed2(xr.scale(s.x[i], kLeft, kWidth - kRight)) +
                   "\" cy=\"" + fixed2(yr.scale(s.y[i], kHeight - kBottom, kTop)) + "\" r=\"" +
                   (marked ? std::string("6") : std::string("3")) + "\" fill=\"" +
                   (marked ? std::string("#d62728") : color) + "\"/>\n";
        }
        if (!s.label.empty()) {
            out += "<text x=\"" + fixed2(kWidth - kRight - 10) + "\" y=\"" +
                   fixed2(kTop + 16.0 + 16.0 * static_cast<double>(si)) +
                   "\" text-anchor=\"end\" font-size=\"12\" fill=\"" + color + "\">" +
                   escape(s.label) + "</text>\n";
        }
    }
    out += "</svg>\n";
    return out;
}

std::string svg_bar_chart(const std::string& title, const std::string& x_label,
                          const std::string& y_label, const std::vector<double>& values,
                          const std::vector<std::string>& labels, int marked_index) {
    double y_lo = 0.0, y_hi = 0.0;
    for (const double v : values) {
        y_lo = std::min(y_lo, v);
        y_hi = std::max(y_hi, v);
    }
    const Range yr = padded_range(y_lo, y_hi);
    const Range xr{0.0, static_cast<double>(std::max<std::size_t>(values.size(), 1))};

    std::string out = header(title);
    out += axes(x_label, y_label, xr, yr);
    const double base = yr.scale(0.0, kHeight - kBottom, kTop);
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double x0 = xr.scale(static_cast<double>(i) + 0.15, kLeft, kWidth - kRight);
        const double x1 = xr.scale(static_cast<double>(i) + 0.85, kLeft, kWidth - kRight);
        const double yv = yr.scale(values[i], kHeight - kBottom, kTop);
        const double top = std::min(yv, base);
        const double h = std::abs(base - yv);
        const bool marked = static_cast<int>(i) == marked_index;
        out += "<rect x=\"" + fixed2(x0) + "\" y=\"" + fixed2(top) + "\" width=\"" +
               fixed2(x1 - x0) + "\" height=\"" + fixed2(h) + "\" fill=\"" +
               (marked ? "#d62728" : "#1f77b4") + "\"/>\n";
        if (i < labels.size()) {
            out += "<text x=\"" + fixed2((x0 + x1) / 2.0) + "\" y=\"" +
                   fixed2(kHeight - kBottom + 35) +
                   "\" text-anchor=\"middle\" font-size=\"11\">" + escape(labels[i]) +
                   "</text>\n";
        }
    }
    out += "</svg>\n";
    return out;
}

std::string svg_scatter(const std::string& title, const std::string& x_label,
                        const std::string& y_label, const std::vector<SvgSeries>& series) {
    double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
    double y_lo = x_lo, y_hi = -x_lo;
    for (const auto& s : series) {
        for (const double v : s.x) {
            x_lo = std::min(x_lo, v);
            x_hi = std::max(x_hi, v);
        }
        for (const double v : s.y) {
            y_lo = std::min(y_lo, v);
            y_hi = std::max(y_hi, v);
        }
    }
    if (!std::isfinite(x_lo)) x_lo = 0.0, x_hi = 1.0, y_lo = 0.0, y_hi = 1.0;
    const Range xr = padded_range(x_lo, x_hi);
    const Range yr = padded_range(y_lo, y_hi);

    std::string out = header(title) + axes(x_label, y_label, xr, yr);
    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        const std::string color = series_color(s, si);
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            out += "<circle cx=\"" + fixed2(xr.scale(s.x[i], kLeft, kWidth - kRight)) +
                   "\" cy=\"" + fixed2(yr.scale(s.y[i], kHeight - kBottom, kTop)) +
                   "\" r=\"3\" fill=\"" + color + "\" fill-opacity=\"0.7\"/>\n";
        }
        if (!s.label.empty()) {
            out += "<text x=\"" + fixed2(kWidth - kRight - 10) + "\" y=\"" +
                   fixed2(kTop + 16.0 + 16.0 * static_cast<double>(si)) +
                   "\" text-anchor=\"end\" font-size=\"12\" fill=\"" + color + "\">" +
                   escape(s.label) + "</text>\n";
        }
    }
    out += "</svg>\n";
    return out;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open for writing: " + path);
    os.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!os) throw IoError("write failed: " + path);
}

} // namespace hullforge
