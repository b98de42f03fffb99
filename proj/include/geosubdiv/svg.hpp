#pragma once

// Poincare disk drawings of hyperbolic polygons.

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace geosubdiv {

struct DiskPolyline {
    int level = 0;
    bool closed = false;
    std::vector<Eigen::Vector2d> points; // disk chart, |p| < 1
};

struct SvgOptions {
    double radius_px = 200.0;
    double margin_px = 10.0;
    bool markers = true;        // circles at the vertices of the first drawn level
    bool geodesic_arcs = false; // circular arcs orthogonal to the boundary instead of chords
    double arc_threshold = 1e-3;
};

namespace detail {

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    std::string s(buf);
    if (s == "-0.0000") s = "0.0000";
    return s;
}

inline const char* level_color(std::size_t i) {
    static const char* palette[] = {"#444444", "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    return palette[i % (sizeof palette / sizeof palette[0])];
}

} // namespace detail

class DiskSvg {
public:
    explicit DiskSvg(SvgOptions options) : opt_(options) {}

    double size() const { return 2.0 * (opt_.radius_px + opt_.margin_px); }

    Eigen::Vector2d to_screen(const Eigen::Vector2d& p) const {
        const double c = opt_.radius_px + opt_.margin_px;
        return {c + opt_.radius_px * p[0], c - opt_.radius_px * p[1]};
    }

    // One path segment from a to b (the pen is at a).
    std::string segment(const Eigen::Vector2d& a, const Eigen::Vector2d& b) const {
        const Eigen::Vector2d sb = to_screen(b);
        const std::string line = "L" + detail::fmt(sb[0]) + " " + detail::fmt(sb[1]);
        if (!opt_.geodesic_arcs || hyperbolic_length(a, b) <= opt_.arc_threshold) return line;
        // Geodesic through a and b is the circle orthogonal to the unit circle:
        // c.a = (1 + |a|^2) / 2, c.b = (1 + |b|^2) / 2.
        const double det = a[0] * b[1] - a[1] * b[0];
        if (std::abs(det) < 1e-9) return line; // through the center: a diameter
        const double ra = 0.5 * (1.0 + a.squaredNorm());
        const double rb = 0.5 * (1.0 + b.squaredNorm());
        const Eigen::Vector2d c((ra * b[1] - rb * a[1]) / det, (a[0] * rb - b[0] * ra) / det);
        const double r = std::sqrt(std::max(0.0, c.squaredNorm() - 1.0));
        // minor arc; the y flip turns a counterclockwise disk turn into a negative screen angle, sweep-flag 0
        const Eigen::Vector2d da = a - c, db = b - c;
        const double cross = da[0] * db[1] - da[1] * db[0];
        const int sweep = cross > 0 ? 0 : 1;
        const double rpx = r * opt_.radius_px;
        return "A" + detail::fmt(rpx) + " " + detail::fmt(rpx) + " 0 0 " + std::to_string(sweep) + " " +
               detail::fmt(sb[0]) + " " + detail::fmt(sb[1]);
    }

    std::string render(const std::vector<DiskPolyline>& lines) const {
        const double c = opt_.radius_px + opt_.margin_px;
        std::string out;
        out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
        out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + detail::fmt(size()) + "\" height=\"" +
               detail::fmt(size()) + "\" viewBox=\"0 0 " + detail::fmt(size()) + " " + detail::fmt(size()) + "\">\n";
        out += "<circle cx=\"" + detail::fmt(c) + "\" cy=\"" + detail::fmt(c) + "\" r=\"" + detail::fmt(opt_.radius_px) +
               "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
        for (std::size_t li = 0; li < lines.size(); ++li) {
            const auto& poly = lines[li];
            if (poly.points.empty()) continue;
            std::string d;
            const Eigen::Vector2d s0 = to_screen(poly.points.front());
            d += "M" + detail::fmt(s0[0]) + " " + detail::fmt(s0[1]);
            for (std::size_t i = 1; i < poly.points.size(); ++i) d += " " + segment(poly.points[i - 1], poly.points[i]);
            if (poly.closed && poly.points.size() > 2) d += " " + segment(poly.points.back(), poly.points.front()) + " Z";
            out += "<path data-level=\"" + std::to_string(poly.level) + "\" d=\"" + d + "\" fill=\"none\" stroke=\"" +
                   detail::level_color(li) + "\" stroke-width=\"1\"/>\n";
            if (opt_.markers && li == 0) {
                for (const auto& p : poly.points) {
                    const Eigen::Vector2d s = to_screen(p);
                    out += "<circle cx=\"" + detail::fmt(s[0]) + "\" cy=\"" + detail::fmt(s[1]) +
                           "\" r=\"3\" fill=\"" + detail::level_color(li) + "\"/>\n";
                }
            }
        }
        out += "</svg>\n";
        return out;
    }

    static double hyperbolic_length(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
        const double num = 2.0 * (a - b).squaredNorm();
        const double den = (1.0 - a.squaredNorm()) * (1.0 - b.squaredNorm());
        return std::acosh(1.0 + num / den);
    }

private:
    SvgOptions opt_;
};

} // namespace geosubdiv
