#include "plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace rootflow::cli {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", std::abs(v) < 1e-12 ? 0.0 : v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else if (c == '&') out += "&amp;";
        else out += c;
    }
    return out;
}

struct Box {
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    void add(double x, double y) {
        if (!std::isfinite(x) || !std::isfinite(y)) return;
        x0 = std::min(x0, x);
        x1 = std::max(x1, x);
        y0 = std::min(y0, y);
        y1 = std::max(y1, y);
    }
};

}  // namespace

void emit_plot(std::ostream& out, std::span<const Series> series, const PlotStyle& style) {
    if (series.empty()) throw std::invalid_argument("emit_plot: no series");
    Box b;
    for (const auto& s : series) {
        if (s.kind == Series::Kind::histogram) {
            if (s.bars.empty()) throw std::invalid_argument("emit_plot: empty series '" + s.label + "'");
            for (const auto& bar : s.bars) {
                b.add(bar.left, 0.0);
                b.add(bar.right, bar.height);
            }
        } else {
            if (s.points.empty()) throw std::invalid_argument("emit_plot: empty series '" + s.label + "'");
            for (auto [x, y] : s.points) b.add(x, y);
        }
    }
    if (!(b.x1 >= b.x0)) throw std::invalid_argument("emit_plot: no finite data");
    if (b.x1 == b.x0) b.x0 -= 0.5, b.x1 += 0.5;
    if (b.y1 == b.y0) b.y0 -= 0.5, b.y1 += 0.5;

    const double W = style.width, H = style.height, ml = 60, mr = 20, mt = 30, mb = 45;
    double sx = (W - ml - mr) / (b.x1 - b.x0), sy = (H - mt - mb) / (b.y1 - b.y0);
    if (style.equal_aspect) sx = sy = std::min(sx, sy);
    auto X = [&](double x) { return ml + (x - b.x0) * sx; };
    auto Y = [&](double y) { return H - mb - (y - b.y0) * sy; };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << style.width << "\" height=\"" << style.height
        << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!style.title.empty())
        out << "<text x=\"" << num(W / 2) << "\" y=\"18\" text-anchor=\"middle\" font-size=\"13\">" << escape(style.title)
            << "</text>\n";

    const double ax_y = Y(b.y0), ax_x = X(b.x0);
    out << "<g stroke=\"black\"><line x1=\"" << num(ax_x) << "\" y1=\"" << num(ax_y) << "\" x2=\"" << num(X(b.x1))
        << "\" y2=\"" << num(ax_y) << "\"/><line x1=\"" << num(ax_x) << "\" y1=\"" << num(ax_y) << "\" x2=\"" << num(ax_x)
        << "\" y2=\"" << num(Y(b.y1)) << "\"/></g>\n";
    out << "<g class=\"ticks\">\n";
    for (int i = 0; i <= 4; ++i) {
        const double xv = b.x0 + (b.x1 - b.x0) * i / 4, yv = b.y0 + (b.y1 - b.y0) * i / 4;
        out << "<text x=\"" << num(X(xv)) << "\" y=\"" << num(ax_y + 15) << "\" text-anchor=\"middle\">" << tick_label(xv)
            << "</text>\n";
        out << "<text x=\"" << num(ax_x - 5) << "\" y=\"" << num(Y(yv) + 4) << "\" text-anchor=\"end\">" << tick_label(yv)
            << "</text>\n";
    }
    out << "</g>\n";
    if (!style.xlabel.empty())
        out << "<text x=\"" << num(W / 2) << "\" y=\"" << num(H - 8) << "\" text-anchor=\"middle\">" << escape(style.xlabel)
            << "</text>\n";
    if (!style.ylabel.empty())
        out << "<text x=\"14\" y=\"" << num(H / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 14 " << num(H / 2)
            << ")\">" << escape(style.ylabel) << "</text>\n";

    for (const auto& s : series) {
        out << "<g class=\"series\" data-label=\"" << escape(s.label) << "\">\n";
        switch (s.kind) {
            case Series::Kind::scatter:
                for (auto [x, y] : s.points)
                    out << "<circle cx=\"" << num(X(x)) << "\" cy=\"" << num(Y(y)) << "\" r=\"1.5\" fill=\"" << s.color
                        << "\"/>\n";
                break;
            case Series::Kind::histogram:
                for (const auto& bar : s.bars) {
                    const double top = Y(std::max(bar.height, b.y0));
                    out << "<rect x=\"" << num(X(bar.left)) << "\" y=\"" << num(top) << "\" width=\""
                        << num(std::max(0.0, X(bar.right) - X(bar.left))) << "\" height=\"" << num(std::max(0.0, ax_y - top))
                        << "\" fill=\"" << s.color << "\" fill-opacity=\"0.4\" stroke=\"" << s.color << "\"/>\n";
                }
                break;
            case Series::Kind::curve: {
                out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
                bool first = true;
                for (auto [x, y] : s.points) {
                    if (!std::isfinite(x) || !std::isfinite(y)) continue;
                    out << (first ? "" : " ") << num(X(x)) << ',' << num(Y(y));
                    first = false;
                }
                out << "\"/>\n";
                break;
            }
        }
        out << "</g>\n";
    }
    out << "</svg>\n";
}

}  // namespace rootflow::cli
