#pragma once

// Refinement on the flat cylinder S^1 x [0,1] through its universal cover, the strip
// R x [0,1]. Data on the cylinder plus a homotopy class of connecting path (winding
// numbers) lift to the strip, get refined there, and are projected back.
//
// Strip abscissae are kept as (sheet, angle) with u = angle + 2 pi sheet. Averages split
// into an exact rational part on the sheets and a floating part on the angles, so a deck
// transformation (shifting every sheet by k) leaves the projected output bit-identical.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "geosubdiv/errors.hpp"
#include "geosubdiv/manifold.hpp"
#include "geosubdiv/mask.hpp"
#include "geosubdiv/subdivision.hpp"

namespace geosubdiv {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

struct CylinderPoint {
    double angle = 0.0;  // [0, 2 pi)
    double height = 0.0; // [0, 1]; refinement outputs outside are flagged, not clamped

    friend bool operator==(const CylinderPoint&, const CylinderPoint&) = default;
};

struct StripPoint {
    std::int64_t sheet = 0;
    double angle = 0.0;
    double height = 0.0;

    double u() const { return angle + two_pi * static_cast<double>(sheet); }
    CylinderPoint project() const { return {angle, height}; }
};

// Angle difference wrapped to (-pi, pi].
inline double wrap_angle(double d) {
    d = std::remainder(d, two_pi);
    if (d <= -std::numbers::pi) d += two_pi;
    return d;
}

struct LiftedPath {
    std::vector<CylinderPoint> base_points;
    std::vector<std::int64_t> winding; // extra full turns between consecutive points
    std::int64_t base_choice = 0;
    std::vector<StripPoint> lift;

    std::vector<Eigen::Vector2d> planar() const {
        std::vector<Eigen::Vector2d> out;
        out.reserve(lift.size());
        for (const auto& p : lift) out.emplace_back(p.u(), p.height);
        return out;
    }
};

inline CylinderPoint normalized(CylinderPoint p) {
    if (!std::isfinite(p.angle) || !std::isfinite(p.height)) throw Error("non-finite cylinder point");
    p.angle = std::fmod(p.angle, two_pi);
    if (p.angle < 0) p.angle += two_pi;
    if (p.angle >= two_pi) p.angle = 0.0;
    return p;
}

// u_0 = angle_0 + 2 pi base_choice, u_{i+1} = u_i + wrap(angle_{i+1} - angle_i) + 2 pi w_i.
inline LiftedPath lift(const std::vector<CylinderPoint>& points, const std::vector<std::int64_t>& winding,
                       std::int64_t base_choice) {
    if (points.empty()) throw Error("cannot lift an empty path");
    if (winding.size() + 1 != points.size()) throw Error("winding needs one entry per consecutive pair");
    LiftedPath path;
    path.base_points = points;
    path.winding = winding;
    path.base_choice = base_choice;
    std::int64_t sheet = base_choice;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (i > 0) {
            const double raw = points[i].angle - points[i - 1].angle;
            const double gap = wrap_angle(raw);
            // sheets crossed by the short arc: gap - raw is a multiple of 2 pi
            sheet += static_cast<std::int64_t>(std::llround((gap - raw) / two_pi)) + winding[i - 1];
        }
        path.lift.push_back({sheet, points[i].angle, points[i].height});
    }
    return path;
}

inline LiftedPath lift(const std::vector<CylinderPoint>& points, std::int64_t base_choice = 0) {
    return lift(points, std::vector<std::int64_t>(points.empty() ? 0 : points.size() - 1, 0), base_choice);
}

struct CylinderLevel {
    std::vector<StripPoint> lift;
    std::vector<CylinderPoint> points;
    std::vector<bool> off_strip; // height outside [0, 1]

    bool any_off_strip() const {
        for (bool b : off_strip)
            if (b) return true;
        return false;
    }
};

namespace detail {

inline StripPoint strip_average(const WeightRow& row, const std::vector<StripPoint>& pts, std::int64_t i) {
    if (auto k = row.delta_index()) return pts[static_cast<std::size_t>(i + *k)];
    Rational sheet_sum = 0;
    double angle = 0.0, height = 0.0;
    const std::int64_t base = pts[static_cast<std::size_t>(i + row.first)].sheet;
    for (std::int64_t k = row.first; k <= row.last(); ++k) {
        const auto& p = pts[static_cast<std::size_t>(i + k)];
        const Rational& w = row[k];
        const double wd = to_double(w);
        sheet_sum += w * (p.sheet - base);
        angle += wd * p.angle;
        height += wd * p.height;
    }
    // weights sum to one, so the common sheet `base` passes through exactly
    const BigInt whole = numerator(sheet_sum) / denominator(sheet_sum);
    Rational frac = sheet_sum - Rational(whole);
    std::int64_t sheet = base + static_cast<std::int64_t>(whole);
    angle += two_pi * to_double(frac);
    const double turns = std::floor(angle / two_pi);
    angle -= two_pi * turns;
    sheet += static_cast<std::int64_t>(turns);
    if (angle >= two_pi) {
        angle -= two_pi;
        ++sheet;
    }
    if (angle < 0.0) {
        angle += two_pi;
        --sheet;
    }
    return {sheet, angle, height};
}

inline CylinderLevel make_level(std::vector<StripPoint> pts) {
    CylinderLevel level;
    level.lift = std::move(pts);
    for (const auto& p : level.lift) {
        level.points.push_back(p.project());
        level.off_strip.push_back(p.height < 0.0 || p.height > 1.0);
    }
    return level;
}

} // namespace detail

// Level 0 is the input path; level j is the j-fold refinement projected to the cylinder.
// The strip is flat, so refinement is the exact linear rule on (u, h) restricted to fully
// supported outputs.
inline std::vector<CylinderLevel> subdivide_on_cylinder(const Mask& mask, const LiftedPath& path, int k) {
    if (k < 0) throw Error("number of levels must be >= 0");
    const auto weight_rows = rows(mask);
    const std::int64_t n_dil = mask.dilation();
    std::vector<CylinderLevel> levels;
    levels.push_back(detail::make_level(path.lift));
    for (int level = 0; level < k; ++level) {
        const auto& pts = levels.back().lift;
        const auto n = static_cast<std::int64_t>(pts.size());
        // same emitted run as the open-polygon rule in refine_once
        std::int64_t lo = std::numeric_limits<std::int64_t>::max(), hi = std::numeric_limits<std::int64_t>::min();
        for (const auto& row : weight_rows) {
            lo = std::min(lo, n_dil * (-row.first) + row.residue);
            hi = std::max(hi, n_dil * (n - 1 - row.last()) + row.residue);
        }
        std::vector<StripPoint> run, best;
        for (std::int64_t l = lo; l <= hi + 1; ++l) {
            bool ok = false;
            std::int64_t i = 0;
            const WeightRow* row = nullptr;
            if (l <= hi) {
                row = &weight_rows[static_cast<std::size_t>(detail::mod(l, n_dil))];
                i = detail::floor_div(l, n_dil);
                ok = i + row->first >= 0 && i + row->last() <= n - 1;
            }
            if (ok) {
                run.push_back(detail::strip_average(*row, pts, i));
            } else {
                if (run.size() > best.size()) best = run;
                run.clear();
            }
        }
        if (best.size() < 2) throw PolygonTooShort("cylinder path is too short for the mask window");
        levels.push_back(detail::make_level(std::move(best)));
    }
    return levels;
}

inline bool same_projection(const std::vector<CylinderLevel>& a, const std::vector<CylinderLevel>& b, double tol) {
    if (a.size() != b.size()) return false;
    for (std::size_t l = 0; l < a.size(); ++l) {
        if (a[l].points.size() != b[l].points.size()) return false;
        for (std::size_t i = 0; i < a[l].points.size(); ++i) {
            const auto& p = a[l].points[i];
            const auto& q = b[l].points[i];
            if (std::abs(wrap_angle(p.angle - q.angle)) > tol || std::abs(p.height - q.height) > tol) return false;
        }
    }
    return true;
}

// Projected refinements agree (within 1e-12) for every base sheet shift.
inline bool deck_invariance_check(const Mask& mask, const LiftedPath& path, const std::vector<std::int64_t>& shifts,
                                  int k = 3) {
    const auto reference = subdivide_on_cylinder(mask, path, k);
    for (std::int64_t s : shifts) {
        const auto shifted = lift(path.base_points, path.winding, path.base_choice + s);
        if (!same_projection(reference, subdivide_on_cylinder(mask, shifted, k), 1e-12)) return false;
    }
    return true;
}

} // namespace geosubdiv
