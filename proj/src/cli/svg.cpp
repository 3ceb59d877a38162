#include "qrabi/cli/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace qrabi::cli {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 600.0;
constexpr double kLeft = 90.0, kRight = 30.0, kTop = 50.0, kBottom = 70.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    if (std::abs(v) < 1e-12)
        return "0";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void add(double v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    bool empty() const { return !(lo <= hi); }
    void pad() {
        if (empty()) {
            lo = 0.0;
            hi = 1.0;
        } else if (hi - lo < 1e-300) {
            const double d = std::max(std::abs(lo) * 0.1, 1.0);
            lo -= d;
            hi += d;
        }
    }
};

} // namespace

std::vector<double> nice_ticks(double lo, double hi, int target) {
    std::vector<double> ticks;
    if (!(hi > lo) || target < 1)
        return ticks;
    const double raw = (hi - lo) / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 2.5, 5.0, 10.0}) {
        step = m * mag;
        if (raw <= step)
            break;
    }
    const double first = std::ceil(lo / step - 1e-9) * step;
    for (double t = first; t <= hi + step * 1e-9; t += step)
        ticks.push_back(std::abs(t) < step * 1e-9 ? 0.0 : t);
    return ticks;
}

std::string Plot::render() const {
    auto ty = [&](double y) { return log_y ? std::log10(y) : y; };
    auto usable = [&](double x, double y) {
        return std::isfinite(x) && std::isfinite(y) && (!log_y || y > 0.0);
    };

    Range rx, ry;
    for (const auto& s : series)
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i)
            if (usable(s.x[i], s.y[i])) {
                rx.add(s.x[i]);
                ry.add(ty(s.y[i]));
            }
    rx.pad();
    ry.pad();
    if (log_y) {
        ry.lo = std::floor(ry.lo);
        ry.hi = std::ceil(ry.hi);
        if (ry.hi == ry.lo)
            ry.hi += 1.0;
    } else {
        const double m = 0.05 * (ry.hi - ry.lo);
        ry.lo -= m;
        ry.hi += m;
    }

    double pw = kWidth - kLeft - kRight;
    double ph = kHeight - kTop - kBottom;
    double ox = kLeft, oy = kTop;
    if (equal_aspect) {
        const double scale = std::min(pw / (rx.hi - rx.lo), ph / (ry.hi - ry.lo));
        const double w = scale * (rx.hi - rx.lo), h = scale * (ry.hi - ry.lo);
        ox += 0.5 * (pw - w);
        oy += 0.5 * (ph - h);
        pw = w;
        ph = h;
    }
    auto px = [&](double x) { return ox + (x - rx.lo) / (rx.hi - rx.lo) * pw; };
    auto py = [&](double y) { return oy + ph - (ty(y) - ry.lo) / (ry.hi - ry.lo) * ph; };
    auto py_raw = [&](double v) { return oy + ph - (v - ry.lo) / (ry.hi - ry.lo) * ph; };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" "
         "viewBox=\"0 0 800 600\" font-family=\"sans-serif\" font-size=\"13\">\n";
    o << "<rect width=\"800\" height=\"600\" fill=\"white\"/>\n";
    o << "<text x=\"400\" y=\"28\" text-anchor=\"middle\" font-size=\"16\">" << escape(title)
      << "</text>\n";

    // grid and ticks
    o << "<g stroke=\"#dddddd\" stroke-width=\"1\">\n";
    const auto xt = nice_ticks(rx.lo, rx.hi);
    std::vector<double> yt;
    if (log_y) {
        const int span = static_cast<int>(ry.hi - ry.lo);
        const int every = std::max(1, span / 8);
        for (int e = static_cast<int>(ry.lo); e <= static_cast<int>(ry.hi); e += every)
            yt.push_back(e);
    } else {
        yt = nice_ticks(ry.lo, ry.hi);
    }
    for (double t : xt)
        o << "<line x1=\"" << num(px(t)) << "\" y1=\"" << num(oy) << "\" x2=\"" << num(px(t))
          << "\" y2=\"" << num(oy + ph) << "\"/>\n";
    for (double t : yt)
        o << "<line x1=\"" << num(ox) << "\" y1=\"" << num(py_raw(t)) << "\" x2=\""
          << num(ox + pw) << "\" y2=\"" << num(py_raw(t)) << "\"/>\n";
    o << "</g>\n";

    o << "<rect x=\"" << num(ox) << "\" y=\"" << num(oy) << "\" width=\"" << num(pw)
      << "\" height=\"" << num(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (double t : xt)
        o << "<text x=\"" << num(px(t)) << "\" y=\"" << num(oy + ph + 18)
          << "\" text-anchor=\"middle\">" << tick_label(t) << "</text>\n";
    for (double t : yt) {
        const std::string label = log_y ? "1e" + tick_label(t) : tick_label(t);
        o << "<text x=\"" << num(ox - 8) << "\" y=\"" << num(py_raw(t) + 4)
          << "\" text-anchor=\"end\">" << label << "</text>\n";
    }
    o << "<text x=\"" << num(ox + pw / 2) << "\" y=\"" << num(kHeight - 22)
      << "\" text-anchor=\"middle\">" << escape(x_label) << "</text>\n";
    o << "<text x=\"22\" y=\"" << num(oy + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 22 "
      << num(oy + ph / 2) << ")\">" << escape(y_label) << "</text>\n";

    o << "<clipPath id=\"plot-area\"><rect x=\"" << num(ox) << "\" y=\"" << num(oy)
      << "\" width=\"" << num(pw) << "\" height=\"" << num(ph) << "\"/></clipPath>\n";
    o << "<g clip-path=\"url(#plot-area)\">\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* color = kPalette[k % std::size(kPalette)];
        const std::size_t n = std::min(s.x.size(), s.y.size());
        if (s.markers) {
            for (std::size_t i = 0; i < n; ++i)
                if (usable(s.x[i], s.y[i]))
                    o << "<circle cx=\"" << num(px(s.x[i])) << "\" cy=\"" << num(py(s.y[i]))
                      << "\" r=\"3\" fill=\"" << color << "\"/>\n";
            continue;
        }
        std::string d;
        bool pen_down = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (!usable(s.x[i], s.y[i])) {
                pen_down = false;
                continue;
            }
            d += (pen_down ? " L" : " M") + num(px(s.x[i])) + "," + num(py(s.y[i]));
            pen_down = true;
        }
        if (!d.empty())
            o << "<path d=\"" << d.substr(1) << "\" fill=\"none\" stroke=\"" << color
              << "\" stroke-width=\"1.8\"/>\n";
    }
    o << "</g>\n";

    // legend for labelled series, top right inside the frame (beside it for square plots)
    std::vector<std::size_t> labelled;
    for (std::size_t k = 0; k < series.size(); ++k)
        if (!series[k].label.empty())
            labelled.push_back(k);
    if (!labelled.empty()) {
        std::size_t longest = 0;
        for (std::size_t k : labelled)
            longest = std::max(longest, series[k].label.size());
        const double lw = 50.0 + 7.5 * static_cast<double>(longest); // rough glyph width at 13px
        const bool beside = ox + pw + lw + 20 <= kWidth;
        const double lx = beside ? ox + pw + 10 : ox + pw - lw - 10, ly = oy + 10;
        o << "<rect x=\"" << num(lx) << "\" y=\"" << num(ly) << "\" width=\"" << num(lw) << "\" height=\""
          << num(20.0 * labelled.size() + 8)
          << "\" fill=\"white\" fill-opacity=\"0.85\" stroke=\"#999999\"/>\n";
        for (std::size_t j = 0; j < labelled.size(); ++j) {
            const std::size_t k = labelled[j];
            const double y = ly + 18 + 20.0 * j;
            const char* color = kPalette[k % std::size(kPalette)];
            if (series[k].markers)
                o << "<circle cx=\"" << num(lx + 20) << "\" cy=\"" << num(y - 4) << "\" r=\"3\" fill=\""
                  << color << "\"/>\n";
            else
                o << "<line x1=\"" << num(lx + 8) << "\" y1=\"" << num(y - 4) << "\" x2=\""
                  << num(lx + 32) << "\" y2=\"" << num(y - 4) << "\" stroke=\"" << color
                  << "\" stroke-width=\"2.5\"/>\n";
            o << "<text x=\"" << num(lx + 40) << "\" y=\"" << num(y) << "\">"
              << escape(series[k].label) << "</text>\n";
        }
    }
    o << "</svg>\n";
    return o.str();
}

void Plot::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::ios_base::failure("cannot write " + path.string());
    out << render();
    out.flush();
    if (!out)
        throw std::ios_base::failure("write failed for " + path.string());
}

} // namespace qrabi::cli
