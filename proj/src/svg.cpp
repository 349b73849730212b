#include "hdm/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace hdm::svg {

namespace {

constexpr double kW = 640, kH = 420, kL = 70, kR = 150, kT = 40, kB = 55;
const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::string esc(const std::string& s) {
    std::string o;
    for (char c : s) {
        if (c == '<') o += "&lt;";
        else if (c == '>') o += "&gt;";
        else if (c == '&') o += "&amp;";
        else o += c;
    }
    return o;
}

void header(std::ostringstream& os, const std::string& title) {
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
       << "<text x=\"" << kW / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << esc(title) << "</text>\n";
}

}  // namespace

std::string line_plot(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                      const std::vector<Series>& series) {
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            y0 = std::min(y0, s.y[i]);
            y1 = std::max(y1, s.y[i]);
        }
    if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    if (x1 == x0) x1 = x0 + 1;
    if (y1 == y0) y1 = y0 + 1;
    const double pad = 0.05 * (y1 - y0);
    y0 -= pad;
    y1 += pad;
    const double pw = kW - kL - kR, ph = kH - kT - kB;
    auto X = [&](double x) { return kL + (x - x0) / (x1 - x0) * pw; };
    auto Y = [&](double y) { return kT + ph - (y - y0) / (y1 - y0) * ph; };

    std::ostringstream os;
    header(os, title);
    os << "<rect x=\"" << kL << "\" y=\"" << kT << "\" width=\"" << pw << "\" height=\"" << ph
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double xv = x0 + (x1 - x0) * k / 4, yv = y0 + (y1 - y0) * k / 4;
        os << "<text x=\"" << X(xv) << "\" y=\"" << kT + ph + 16 << "\" text-anchor=\"middle\">" << fmt(xv)
           << "</text>\n";
        os << "<text x=\"" << kL - 6 << "\" y=\"" << Y(yv) + 4 << "\" text-anchor=\"end\">" << fmt(yv) << "</text>\n";
    }
    os << "<text x=\"" << kL + pw / 2 << "\" y=\"" << kH - 12 << "\" text-anchor=\"middle\">" << esc(xlabel)
       << "</text>\n";
    os << "<text transform=\"translate(16," << kT + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">" << esc(ylabel)
       << "</text>\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* col = kColors[k % 6];
        if (s.line) {
            os << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\" points=\"";
            for (std::size_t i = 0; i < s.x.size(); ++i)
                if (std::isfinite(s.x[i]) && std::isfinite(s.y[i])) os << X(s.x[i]) << ',' << Y(s.y[i]) << ' ';
            os << "\"/>\n";
        }
        for (std::size_t i = 0; i < s.x.size(); ++i)
            if (std::isfinite(s.x[i]) && std::isfinite(s.y[i]))
                os << "<circle cx=\"" << X(s.x[i]) << "\" cy=\"" << Y(s.y[i]) << "\" r=\"3\" fill=\"" << col
                   << "\"/>\n";
        const double ly = kT + 14 + 18 * static_cast<double>(k);
        os << "<rect x=\"" << kW - kR + 10 << "\" y=\"" << ly - 9 << "\" width=\"12\" height=\"12\" fill=\"" << col
           << "\"/><text x=\"" << kW - kR + 28 << "\" y=\"" << ly + 1 << "\">" << esc(s.label) << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::string heatmap(const std::string& title, const std::string& xlabel, const std::string& ylabel, const Vec& xs,
                    const Vec& ys, const Matrix& values) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (double v : values.data)
        if (std::isfinite(v)) lo = std::min(lo, v), hi = std::max(hi, v);
    if (!std::isfinite(lo)) lo = 0, hi = 1;
    if (hi == lo) hi = lo + 1;
    const double pw = kW - kL - kR, ph = kH - kT - kB;
    const double cw = pw / static_cast<double>(std::max<std::size_t>(1, xs.size()));
    const double ch = ph / static_cast<double>(std::max<std::size_t>(1, ys.size()));
    std::ostringstream os;
    header(os, title);
    for (std::size_t i = 0; i < ys.size(); ++i)
        for (std::size_t j = 0; j < xs.size(); ++j) {
            const double v = values(i, j);
            const double x = kL + cw * static_cast<double>(j), y = kT + ph - ch * static_cast<double>(i + 1);
            std::string fill = "#cccccc";
            if (std::isfinite(v)) {
                const double t = (v - lo) / (hi - lo);
                char buf[16];
                std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(255 * t), 60,
                              static_cast<int>(255 * (1 - t)));
                fill = buf;
            }
            os << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cw << "\" height=\"" << ch << "\" fill=\""
               << fill << "\" stroke=\"white\"/>\n";
            os << "<text x=\"" << x + cw / 2 << "\" y=\"" << y + ch / 2 + 4
               << "\" text-anchor=\"middle\" fill=\"white\" font-size=\"10\">" << (std::isfinite(v) ? fmt(v) : "-")
               << "</text>\n";
        }
    for (std::size_t j = 0; j < xs.size(); ++j)
        os << "<text x=\"" << kL + cw * (static_cast<double>(j) + 0.5) << "\" y=\"" << kT + ph + 16
           << "\" text-anchor=\"middle\">" << fmt(xs[j]) << "</text>\n";
    for (std::size_t i = 0; i < ys.size(); ++i)
        os << "<text x=\"" << kL - 6 << "\" y=\"" << kT + ph - ch * (static_cast<double>(i) + 0.5) + 4
           << "\" text-anchor=\"end\">" << fmt(ys[i]) << "</text>\n";
    os << "<text x=\"" << kL + pw / 2 << "\" y=\"" << kH - 12 << "\" text-anchor=\"middle\">" << esc(xlabel)
       << "</text>\n";
    os << "<text transform=\"translate(16," << kT + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">" << esc(ylabel)
       << "</text>\n";
    os << "<text x=\"" << kW - kR + 10 << "\" y=\"" << kT + 14 << "\">range " << fmt(lo) << " .. " << fmt(hi)
       << "</text>\n";
    os << "</svg>\n";
    return os.str();
}

void save(const std::string& path, const std::string& content) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << content;
}

}  // namespace hdm::svg
