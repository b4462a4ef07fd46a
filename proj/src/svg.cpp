#include "climnorm/svg.hpp"

#include "climnorm/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace climnorm::svg {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    std::string s = buf;
    return s == "-0.00" ? "0.00" : s;
}

std::string tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", std::abs(v) < 1e-12 ? 0.0 : v);
    return buf;
}

std::string escape(const std::string& text) {
    std::string out;
    for (char c : text) {
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

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void add(double v) {
        if (std::isfinite(v)) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    void finish() {
        if (!std::isfinite(lo)) {
            lo = 0.0;
            hi = 1.0;
        }
        if (hi - lo <= 0.0) {
            const double pad = lo == 0.0 ? 1.0 : std::abs(lo) * 0.1;
            lo -= pad;
            hi += pad;
        }
    }
};

class Canvas {
public:
    Canvas(Range xr, Range yr) : xr_(xr), yr_(yr) {}

    double px(double x) const { return kLeft + (x - xr_.lo) / (xr_.hi - xr_.lo) * (kWidth - kLeft - kRight); }
    double py(double y) const { return kHeight - kBottom - (y - yr_.lo) / (yr_.hi - yr_.lo) * (kHeight - kTop - kBottom); }

    void frame(std::ostringstream& out, const std::string& title, const std::string& xl,
               const std::string& yl) const {
        out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth) << "\" height=\""
            << num(kHeight) << "\" viewBox=\"0 0 " << num(kWidth) << ' ' << num(kHeight) << "\">\n";
        out << "<rect x=\"0\" y=\"0\" width=\"" << num(kWidth) << "\" height=\"" << num(kHeight)
            << "\" style=\"fill:#ffffff\"/>\n";
        out << "<text x=\"" << num(kWidth / 2) << "\" y=\"24\" style=\"font:16px sans-serif;text-anchor:middle\">"
            << escape(title) << "</text>\n";
        const double x0 = kLeft;
        const double x1 = kWidth - kRight;
        const double y0 = kHeight - kBottom;
        const double y1 = kTop;
        out << "<path d=\"M" << num(x0) << ' ' << num(y1) << "V" << num(y0) << "H" << num(x1)
            << "\" style=\"fill:none;stroke:#000000;stroke-width:1\"/>\n";
        for (int i = 0; i <= 4; ++i) {
            const double fx = xr_.lo + (xr_.hi - xr_.lo) * i / 4.0;
            const double fy = yr_.lo + (yr_.hi - yr_.lo) * i / 4.0;
            out << "<text x=\"" << num(px(fx)) << "\" y=\"" << num(y0 + 18)
                << "\" style=\"font:11px sans-serif;text-anchor:middle\">" << tick(fx) << "</text>\n";
            out << "<text x=\"" << num(x0 - 6) << "\" y=\"" << num(py(fy) + 4)
                << "\" style=\"font:11px sans-serif;text-anchor:end\">" << tick(fy) << "</text>\n";
        }
        if (!xl.empty()) {
            out << "<text x=\"" << num((x0 + x1) / 2) << "\" y=\"" << num(kHeight - 10)
                << "\" style=\"font:12px sans-serif;text-anchor:middle\">" << escape(xl) << "</text>\n";
        }
        if (!yl.empty()) {
            out << "<text x=\"16\" y=\"" << num((y0 + y1) / 2) << "\" transform=\"rotate(-90 16 "
                << num((y0 + y1) / 2) << ")\" style=\"font:12px sans-serif;text-anchor:middle\">"
                << escape(yl) << "</text>\n";
        }
    }

private:
    Range xr_;
    Range yr_;
};

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

}  // namespace

std::string line_chart(const std::string& title, const std::vector<double>& x,
                       const std::vector<Line>& lines, const std::string& x_label,
                       const std::string& y_label) {
    Range xr;
    Range yr;
    for (double v : x) {
        xr.add(v);
    }
    for (const auto& line : lines) {
        if (line.y.size() != x.size()) {
            throw_invalid("svg: line '" + line.label + "' length differs from x");
        }
        for (double v : line.y) {
            yr.add(v);
        }
    }
    xr.finish();
    yr.finish();
    const Canvas canvas(xr, yr);
    std::ostringstream out;
    canvas.frame(out, title, x_label, y_label);
    for (std::size_t li = 0; li < lines.size(); ++li) {
        const auto& line = lines[li];
        const std::string color = line.color.empty() ? kPalette[li % std::size(kPalette)] : line.color;
        std::string d;
        bool pen = false;
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (!std::isfinite(line.y[i]) || !std::isfinite(x[i])) {
                pen = false;
                continue;
            }
            d += (pen ? "L" : "M") + num(canvas.px(x[i])) + ' ' + num(canvas.py(line.y[i]));
            pen = true;
        }
        out << "<path d=\"" << d << "\" style=\"fill:none;stroke:" << color << ";stroke-width:1.2\"/>\n";
        const double ly = kTop + 14.0 * static_cast<double>(li);
        out << "<text x=\"" << num(kWidth - kRight - 4) << "\" y=\"" << num(ly + 10)
            << "\" style=\"font:11px sans-serif;text-anchor:end;fill:" << color << "\">"
            << escape(line.label) << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

std::string stem_plot(const std::string& title, const std::vector<double>& x,
                      const std::vector<double>& y, const std::string& x_label,
                      const std::string& y_label) {
    if (x.size() != y.size()) {
        throw_invalid("svg: stem plot x and y lengths differ");
    }
    Range xr;
    Range yr;
    yr.add(0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        xr.add(x[i]);
        yr.add(y[i]);
    }
    xr.finish();
    yr.finish();
    const Canvas canvas(xr, yr);
    std::ostringstream out;
    canvas.frame(out, title, x_label, y_label);
    const double base = canvas.py(0.0);
    out << "<path d=\"M" << num(kLeft) << ' ' << num(base) << "H" << num(kWidth - kRight)
        << "\" style=\"fill:none;stroke:#888888;stroke-width:0.5\"/>\n";
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(y[i]) || y[i] == 0.0) {
            continue;
        }
        const double cx = canvas.px(x[i]);
        const double cy = canvas.py(y[i]);
        out << "<path d=\"M" << num(cx) << ' ' << num(base) << "V" << num(cy)
            << "\" style=\"stroke:#1f77b4;stroke-width:1\"/>"
            << "<circle cx=\"" << num(cx) << "\" cy=\"" << num(cy)
            << "\" r=\"2.5\" style=\"fill:#1f77b4\"/>\n";
    }
    out << "</svg>\n";
    return out.str();
}

}  // namespace climnorm::svg
