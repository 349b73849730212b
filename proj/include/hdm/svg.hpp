#pragma once

#include <string>
#include <vector>

#include "hdm/common.hpp"

namespace hdm::svg {

struct Series {
    std::string label;
    Vec x, y;
    bool line = true;  // false: markers only
};

// Line/scatter chart with linear axes; NaN points are skipped.
std::string line_plot(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                      const std::vector<Series>& series);

// Cell grid coloured on a blue-to-red ramp; values(i, j) belongs to (ys[i], xs[j]).
std::string heatmap(const std::string& title, const std::string& xlabel, const std::string& ylabel, const Vec& xs,
                    const Vec& ys, const Matrix& values);

void save(const std::string& path, const std::string& content);

}  // namespace hdm::svg
