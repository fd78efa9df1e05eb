#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace mlnet_cli {

namespace {

constexpr double kWidth = 720, kHeight = 440;
constexpr double kLeft = 70, kRight = 170, kTop = 40, kBottom = 60;

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", x);
    return buf;
}

std::string tick(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

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

struct Frame {
    double x0, x1, y0, y1;
    double px(double x) const { return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight); }
    double py(double y) const { return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom); }
};

void open(std::ostringstream& os, const Axes& axes) {
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
       << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << num(kWidth / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
       << escape(axes.title) << "</text>\n";
    os << "<text x=\"" << num(kLeft + (kWidth - kLeft - kRight) / 2) << "\" y=\"" << num(kHeight - 15)
       << "\" text-anchor=\"middle\">" << escape(axes.x_label) << "</text>\n";
    os << "<text x=\"16\" y=\"" << num(kTop + (kHeight - kTop - kBottom) / 2)
       << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << num(kTop + (kHeight - kTop - kBottom) / 2)
       << ")\">" << escape(axes.y_label) << "</text>\n";
}

void frame_axes(std::ostringstream& os, const Frame& f, bool x_ticks) {
    os << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(kWidth - kLeft - kRight)
       << "\" height=\"" << num(kHeight - kTop - kBottom) << "\" fill=\"none\" stroke=\"#444\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double y = f.y0 + (f.y1 - f.y0) * k / 4.0;
        os << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(f.py(y) + 4) << "\" text-anchor=\"end\">"
           << tick(y) << "</text>\n";
        if (!x_ticks) continue;
        const double x = f.x0 + (f.x1 - f.x0) * k / 4.0;
        os << "<text x=\"" << num(f.px(x)) << "\" y=\"" << num(kHeight - kBottom + 16)
           << "\" text-anchor=\"middle\">" << tick(x) << "</text>\n";
    }
}

}  // namespace

std::string layer_color(const std::string& layer) {
    static const std::map<std::string, std::string> palette = {
        {"stc", "#1f3a93"},  // dark blue
        {"ltc", "#e6b800"},  // yellow
        {"cs", "#d62728"},   // red
        {"stf", "#8fd18f"},  // light green
        {"ext", "#87ceeb"},  // light blue
        {"flat", "#006400"}, // dark green
    };
    const auto it = palette.find(layer);
    return it == palette.end() ? "#7f7f7f" : it->second;
}

std::string line_chart(const Axes& axes, const std::vector<Series>& series) {
    double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    bool first = true;
    for (const auto& s : series)
        for (std::size_t k = 0; k < s.xs.size(); ++k) {
            if (first) {
                x0 = x1 = s.xs[k];
                y1 = s.ys[k];
                first = false;
            }
            x0 = std::min(x0, s.xs[k]);
            x1 = std::max(x1, s.xs[k]);
            y1 = std::max(y1, s.ys[k]);
        }
    if (!(x1 > x0)) x1 = x0 + 1.0;
    if (!(y1 > y0)) y1 = y0 + 1.0;
    const Frame f{x0, x1, y0, y1 * 1.05};

    std::ostringstream os;
    open(os, axes);
    frame_axes(os, f, true);
    double legend_y = kTop + 10;
    for (const auto& s : series) {
        os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.8\" points=\"";
        for (std::size_t k = 0; k < s.xs.size(); ++k) os << (k ? " " : "") << num(f.px(s.xs[k])) << ',' << num(f.py(s.ys[k]));
        os << "\"/>\n";
        if (s.marker)
            os << "<line x1=\"" << num(f.px(*s.marker)) << "\" x2=\"" << num(f.px(*s.marker)) << "\" y1=\""
               << num(kTop) << "\" y2=\"" << num(kHeight - kBottom) << "\" stroke=\"" << s.color
               << "\" stroke-dasharray=\"5,4\"/>\n";
        os << "<rect x=\"" << num(kWidth - kRight + 14) << "\" y=\"" << num(legend_y - 9)
           << "\" width=\"14\" height=\"10\" fill=\"" << s.color << "\"/>\n";
        os << "<text x=\"" << num(kWidth - kRight + 34) << "\" y=\"" << num(legend_y) << "\">" << escape(s.name)
           << "</text>\n";
        legend_y += 18;
    }
    os << "</svg>\n";
    return os.str();
}

std::string scatter_chart(const Axes& axes, const std::vector<Point>& points) {
    double y1 = 1.0, size_max = 0.0;
    for (const auto& p : points) {
        y1 = std::max(y1, p.y);
        size_max = std::max(size_max, p.size);
    }
    const double count = static_cast<double>(std::max<std::size_t>(points.size(), 1));
    const Frame f{-0.5, count - 0.5, 0.0, y1 * 1.1};

    std::ostringstream os;
    open(os, axes);
    frame_axes(os, f, false);
    for (std::size_t k = 0; k < points.size(); ++k) {
        const auto& p = points[k];
        const double r = 2.0 + 8.0 * (size_max > 0.0 ? std::sqrt(p.size / size_max) : 0.0);
        os << "<circle cx=\"" << num(f.px(static_cast<double>(k))) << "\" cy=\"" << num(f.py(p.y)) << "\" r=\""
           << num(r) << "\" fill=\"" << (p.highlight ? "#d62728" : "#000000") << "\" fill-opacity=\"0.6\"><title>"
           << escape(p.label) << "</title></circle>\n";
    }
    if (points.size() <= 40)
        for (std::size_t k = 0; k < points.size(); ++k) {
            const double x = f.px(static_cast<double>(k)), y = kHeight - kBottom + 12;
            os << "<text x=\"" << num(x) << "\" y=\"" << num(y) << "\" font-size=\"9\" text-anchor=\"end\" transform=\"rotate(-60 "
               << num(x) << ' ' << num(y) << ")\">" << escape(points[k].label) << "</text>\n";
        }
    os << "</svg>\n";
    return os.str();
}

}  // namespace mlnet_cli
