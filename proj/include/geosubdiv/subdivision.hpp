#pragma once

// The Riemannian analogue T of a linear rule: every output (Tx)_{N i + r} is the
// center of mass of the window x_{i+k} with the weight row of residue r.
//
// Boundary policy: open polygons emit only fully supported outputs, so each level
// shrinks by the mask window; closed polygons are indexed cyclically.
// Level k point i sits at parameter origin + i / N^k.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "geosubdiv/errors.hpp"
#include "geosubdiv/karcher.hpp"
#include "geosubdiv/manifold.hpp"
#include "geosubdiv/mask.hpp"
#include "geosubdiv/parallel.hpp"

namespace geosubdiv {

template <CartanHadamard M>
struct Polygon {
    std::vector<typename M::Point> points;
    int level = 0;
    Rational origin = 0;  // parameter of points[0]
    Rational spacing = 1; // parameter step, 1 / N^level
    bool closed = false;

    std::size_t size() const { return points.size(); }

    Rational parameter(std::int64_t i) const { return origin + spacing * i; }

    // number of edges between consecutive points, including the closing edge
    std::size_t edge_count() const { return closed ? points.size() : points.size() - 1; }
    const typename M::Point& edge_end(std::size_t e) const { return points[(e + 1) % points.size()]; }
};

struct LevelStats {
    std::size_t averages = 0;      // solver invocations (delta rows excluded)
    std::size_t uncertified = 0;
    double max_error_bound = 0.0;
    int max_iterations = 0;
};

template <CartanHadamard M>
Polygon<M> refine_once(const M& m, const Mask& mask, const Polygon<M>& polygon, double tolerance,
                       LevelStats* stats = nullptr) {
    using Point = typename M::Point;
    if (polygon.size() < 2) throw PolygonTooShort("polygon needs at least 2 points");
    const auto weight_rows = rows(mask);
    const std::int64_t n_dil = mask.dilation();
    const auto n = static_cast<std::int64_t>(polygon.size());

    // output index L = N i + r; `lo`/`hi` bound the emitted run
    std::int64_t lo = 0, hi = -1;
    if (polygon.closed) {
        lo = 0;
        hi = n_dil * n - 1;
    } else {
        std::vector<bool> valid;
        std::int64_t l_min = std::numeric_limits<std::int64_t>::max(), l_max = std::numeric_limits<std::int64_t>::min();
        for (const auto& row : weight_rows) {
            l_min = std::min(l_min, n_dil * (-row.first) + row.residue);
            l_max = std::max(l_max, n_dil * (n - 1 - row.last()) + row.residue);
        }
        if (l_max >= l_min) {
            valid.assign(static_cast<std::size_t>(l_max - l_min + 1), false);
            for (std::int64_t l = l_min; l <= l_max; ++l) {
                const auto& row = weight_rows[static_cast<std::size_t>(detail::mod(l, n_dil))];
                const std::int64_t i = detail::floor_div(l, n_dil);
                valid[static_cast<std::size_t>(l - l_min)] = i + row.first >= 0 && i + row.last() <= n - 1;
            }
            // longest contiguous run of fully supported outputs
            std::int64_t run_start = 0;
            for (std::int64_t l = l_min; l <= l_max + 1; ++l) {
                const bool ok = l <= l_max && valid[static_cast<std::size_t>(l - l_min)];
                if (ok && (l == l_min || !valid[static_cast<std::size_t>(l - 1 - l_min)])) run_start = l;
                if (!ok && l > l_min && valid[static_cast<std::size_t>(l - 1 - l_min)] && l - run_start > hi - lo + 1) {
                    lo = run_start;
                    hi = l - 1;
                }
            }
        }
        // an output polygon needs at least 2 points
        if (hi - lo < 1)
            throw PolygonTooShort("open polygon with " + std::to_string(n) +
                                  " points is too short for the mask window");
    }

    struct Slot {
        double error_bound = 0.0;
        int iterations = 0;
        bool solved = false;
        bool certified = true;
    };
    const auto count = static_cast<std::size_t>(hi - lo + 1);
    std::vector<Point> out(count);
    std::vector<Slot> slots(count);

    parallel_for(count, [&](std::size_t idx) {
        const std::int64_t l = lo + static_cast<std::int64_t>(idx);
        const auto& row = weight_rows[static_cast<std::size_t>(detail::mod(l, n_dil))];
        const std::int64_t i = detail::floor_div(l, n_dil);
        auto point_at = [&](std::int64_t k) -> const Point& {
            return polygon.points[static_cast<std::size_t>(detail::mod(i + k, n))];
        };
        if (auto k = row.delta_index()) {
            out[idx] = point_at(*k);
            return;
        }
        std::vector<Point> window;
        window.reserve(row.weights.size());
        for (std::int64_t k = row.first; k <= row.last(); ++k) window.push_back(point_at(k));
        const WeightedConfiguration<M> config(std::move(window), row.weights);
        auto cert = riemannian_average(m, config, tolerance);
        out[idx] = std::move(cert.mean);
        slots[idx] = {cert.error_bound, cert.iterations, true, cert.certified};
    });

    if (stats) {
        *stats = {};
        for (const auto& s : slots) {
            if (!s.solved) continue;
            ++stats->averages;
            if (!s.certified) ++stats->uncertified;
            stats->max_error_bound = std::max(stats->max_error_bound, s.error_bound);
            stats->max_iterations = std::max(stats->max_iterations, s.iterations);
        }
    }

    Polygon<M> next;
    next.points = std::move(out);
    next.level = polygon.level + 1;
    next.spacing = polygon.spacing / n_dil;
    next.origin = polygon.closed ? polygon.origin : polygon.origin + next.spacing * lo;
    next.closed = polygon.closed;
    return next;
}

template <CartanHadamard M>
double max_edge(const M& m, const Polygon<M>& p) {
    double best = 0.0;
    for (std::size_t e = 0; e < p.edge_count(); ++e) best = std::max(best, m.dist(p.points[e], p.edge_end(e)));
    return best;
}

template <CartanHadamard M>
struct RefinementTrace {
    std::vector<Polygon<M>> levels;          // input first
    std::vector<LevelStats> stats;           // stats[k] describes levels[k + 1]
    Rational gamma = 0;                      // contractivity factor of the mask
    std::int64_t dilation = 2;
    double tolerance = 0.0;
    double rho = 0.0;                        // largest input edge
    std::vector<double> max_edges;           // per level
    std::vector<double> empirical_gammas;    // max_edges[k] / max_edges[k-1], k >= 1
    std::vector<double> displacement_constants; // k: max_i dist(level_{k+1}[N i], level_k[i]) / (gamma^k rho)

    bool certified() const {
        return std::all_of(stats.begin(), stats.end(), [](const LevelStats& s) { return s.uncertified == 0; });
    }
};

// Index in `fine` of the point sharing the parameter of coarse point i, if present.
template <CartanHadamard M>
std::optional<std::size_t> matching_index(const Polygon<M>& coarse, const Polygon<M>& fine, std::size_t i) {
    const Rational pos = (coarse.parameter(static_cast<std::int64_t>(i)) - fine.origin) / fine.spacing;
    if (denominator(pos) != 1) return std::nullopt;
    auto j = static_cast<std::int64_t>(numerator(pos));
    if (fine.closed) j = detail::mod(j, static_cast<std::int64_t>(fine.size()));
    if (j < 0 || j >= static_cast<std::int64_t>(fine.size())) return std::nullopt;
    return static_cast<std::size_t>(j);
}

// Fills rho, max_edges, empirical_gammas and displacement_constants from the levels.
template <CartanHadamard M>
void compute_diagnostics(const M& m, RefinementTrace<M>& trace) {
    trace.max_edges.clear();
    trace.empirical_gammas.clear();
    trace.displacement_constants.clear();
    for (const auto& level : trace.levels) trace.max_edges.push_back(max_edge(m, level));
    trace.rho = trace.max_edges.empty() ? 0.0 : trace.max_edges.front();
    const double gamma = to_double(trace.gamma);
    for (std::size_t k = 1; k < trace.levels.size(); ++k) {
        const double prev = trace.max_edges[k - 1];
        trace.empirical_gammas.push_back(prev > 0.0 ? trace.max_edges[k] / prev : 0.0);

        const auto& coarse = trace.levels[k - 1];
        const auto& fine = trace.levels[k];
        double worst = 0.0;
        for (std::size_t i = 0; i < coarse.size(); ++i)
            if (auto j = matching_index(coarse, fine, i)) worst = std::max(worst, m.dist(fine.points[*j], coarse.points[i]));
        const double scale = std::pow(gamma, static_cast<double>(k - 1)) * trace.rho;
        trace.displacement_constants.push_back(worst == 0.0 ? 0.0 : worst / scale);
    }
}

template <CartanHadamard M>
RefinementTrace<M> refine(const M& m, const Mask& mask, const Polygon<M>& polygon, int k, double tolerance) {
    if (k < 1) throw Error("refine: number of levels must be >= 1");
    RefinementTrace<M> trace;
    trace.gamma = contractivity_factor(mask);
    trace.dilation = mask.dilation();
    trace.tolerance = tolerance;
    trace.levels.push_back(polygon);
    for (int level = 0; level < k; ++level) {
        LevelStats stats;
        trace.levels.push_back(refine_once(m, mask, trace.levels.back(), tolerance, &stats));
        trace.stats.push_back(stats);
    }
    compute_diagnostics(m, trace);
    return trace;
}

// Piecewise geodesic through the polygon; segment i covers [t_i, t_{i+1}].
template <CartanHadamard M>
typename M::Point broken_geodesic_eval(const M& m, const Polygon<M>& p, double t) {
    const double origin = to_double(p.origin);
    const double spacing = to_double(p.spacing);
    double u = (t - origin) / spacing;
    const auto n = static_cast<double>(p.size());
    if (p.closed) {
        u = std::fmod(u, n);
        if (u < 0) u += n;
    } else if (!(u >= 0.0 && u <= n - 1.0)) {
        throw Error("parameter outside the polygon's range");
    }
    const double base = std::floor(u);
    const auto i = static_cast<std::size_t>(base);
    const double s = u - base;
    if (s == 0.0) return p.points[i % p.size()];
    return geodesic_point(m, p.points[i], p.points[(i + 1) % p.size()], s);
}

// max over `samples` parameters of dist(c_a(t), c_b(t)) on the common parameter range.
template <CartanHadamard M>
double broken_geodesic_distance(const M& m, const Polygon<M>& a, const Polygon<M>& b, int samples = 512) {
    double t0, t1;
    if (a.closed && b.closed) {
        t0 = to_double(a.origin);
        t1 = t0 + to_double(a.spacing) * static_cast<double>(a.size());
    } else {
        t0 = std::max(to_double(a.origin), to_double(b.origin));
        t1 = std::min(to_double(a.parameter(static_cast<std::int64_t>(a.size()) - 1)),
                      to_double(b.parameter(static_cast<std::int64_t>(b.size()) - 1)));
    }
    double best = 0.0;
    for (int s = 0; s <= samples; ++s) {
        const double t = t0 + (t1 - t0) * s / samples;
        best = std::max(best, m.dist(broken_geodesic_eval(m, a, t), broken_geodesic_eval(m, b, t)));
    }
    return best;
}

struct ContractivityReport {
    bool pass = true;
    double worst_margin = std::numeric_limits<double>::infinity(); // min over checks of bound - actual
    int worst_level = 0;
    std::size_t worst_index = 0;
    // first violation, if any
    int failing_level = -1;
    std::size_t failing_index = 0;
    double failing_distance = 0.0;
    double failing_bound = 0.0;
};

// dist(T^k x_{i+1}, T^k x_i) <= gamma^k rho + 2 k tolerance for every level k and edge i.
template <CartanHadamard M>
ContractivityReport check_contractivity(const M& m, const RefinementTrace<M>& trace, const Rational& gamma) {
    ContractivityReport report;
    if (trace.levels.size() < 2) return report;
    const double g = to_double(gamma);
    const double rho = max_edge(m, trace.levels.front());
    for (std::size_t k = 1; k < trace.levels.size(); ++k) {
        const auto& level = trace.levels[k];
        const double bound = std::pow(g, static_cast<double>(k)) * rho + 2.0 * static_cast<double>(k) * trace.tolerance;
        for (std::size_t e = 0; e < level.edge_count(); ++e) {
            const double d = m.dist(level.points[e], level.edge_end(e));
            const double margin = bound - d;
            if (margin < report.worst_margin) {
                report.worst_margin = margin;
                report.worst_level = static_cast<int>(k);
                report.worst_index = e;
            }
            if (margin < 0.0 && report.pass) {
                report.pass = false;
                report.failing_level = static_cast<int>(k);
                report.failing_index = e;
                report.failing_distance = d;
                report.failing_bound = bound;
            }
        }
    }
    return report;
}

struct DisplacementReport {
    double c_empirical = 0.0;     // smallest C with dist(T^{k+1}x_{N i}, T^k x_i) <= C gamma^k rho
    std::vector<double> per_level;
    bool finite = true;
};

template <CartanHadamard M>
DisplacementReport check_displacement_safety(const RefinementTrace<M>& trace) {
    DisplacementReport report;
    report.per_level = trace.displacement_constants;
    for (double c : report.per_level) {
        if (!std::isfinite(c)) report.finite = false;
        else report.c_empirical = std::max(report.c_empirical, c);
    }
    return report;
}

// Least-squares slope of log(max edge) against level over levels 1..K, as a
// Holder exponent -slope / log N. Level 0 is left out of the fit.
// Returns +inf when some level has collapsed to a point.
template <CartanHadamard M>
double estimate_holder(const RefinementTrace<M>& trace) {
    if (trace.levels.size() < 3) throw Error("estimate_holder needs at least 3 levels");
    std::vector<double> xs, ys;
    for (std::size_t k = 1; k < trace.max_edges.size(); ++k) {
        if (trace.max_edges[k] <= 0.0) return std::numeric_limits<double>::infinity();
        xs.push_back(static_cast<double>(k));
        ys.push_back(std::log(trace.max_edges[k]));
    }
    const double n = static_cast<double>(xs.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    const double slope = sxy / sxx;
    return -slope / std::log(static_cast<double>(trace.dilation));
}

} // namespace geosubdiv
