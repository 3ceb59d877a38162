#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace qrabi::cli {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    bool markers = false; // scatter points instead of a polyline
};

// Static 800x600 line/scatter chart. Non-finite points (and non-positive ones
// on a log axis) break the polyline instead of being drawn.
struct Plot {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_y = false;
    bool equal_aspect = false; // same data scale on both axes (phase portraits)
    std::vector<Series> series;

    std::string render() const;
    void save(const std::filesystem::path& path) const;
};

// Round tick positions covering [lo, hi], about `target` of them.
std::vector<double> nice_ticks(double lo, double hi, int target = 6);

} // namespace qrabi::cli
