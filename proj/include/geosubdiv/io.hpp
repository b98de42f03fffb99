#pragma once

// JSON documents: points, polygons, cylinder paths and refinement traces.
//
//   point    {"manifold": "euclidean:<d>" | "hyperbolic2" | "spd:<n>" | "cylinder",
//             "chart": "disk" | "hyperboloid" (hyperbolic2 only), "coords": [...]}
//   polygon  {"manifold": ..., "closed": bool, "chart": ..., "points": [point | [coords], ...]}
//   path     {"points": [{"angle": a, "height": h}, ...], "winding": [int, ...], "base_choice": int}
//   trace    see trace_to_json

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>

#include <nlohmann/json.hpp>

#include "geosubdiv/covering.hpp"
#include "geosubdiv/errors.hpp"
#include "geosubdiv/manifold.hpp"
#include "geosubdiv/schemes.hpp"
#include "geosubdiv/subdivision.hpp"

namespace geosubdiv {

using json = nlohmann::json;

struct ManifoldSpec {
    enum class Kind { euclidean, hyperbolic, spd, cylinder };
    Kind kind = Kind::euclidean;
    int dim = 0;

    std::string name() const {
        switch (kind) {
        case Kind::euclidean: return "euclidean:" + std::to_string(dim);
        case Kind::hyperbolic: return "hyperbolic2";
        case Kind::spd: return "spd:" + std::to_string(dim);
        case Kind::cylinder: return "cylinder";
        }
        return {};
    }
};

inline ManifoldSpec parse_manifold(const std::string& s) {
    auto sized = [&](std::string_view prefix) {
        try {
            std::size_t used = 0;
            const int d = std::stoi(s.substr(prefix.size()), &used);
            if (used != s.size() - prefix.size()) throw std::invalid_argument(s);
            return d;
        } catch (const std::exception&) {
            throw ParseError("bad manifold '" + s + "'");
        }
    };
    if (s == "hyperbolic2") return {ManifoldSpec::Kind::hyperbolic, 2};
    if (s == "cylinder") return {ManifoldSpec::Kind::cylinder, 2};
    if (s.starts_with("euclidean:")) return {ManifoldSpec::Kind::euclidean, sized("euclidean:")};
    if (s.starts_with("spd:")) return {ManifoldSpec::Kind::spd, sized("spd:")};
    throw ParseError("unknown manifold '" + s + "'");
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError("cannot parse '" + path + "': " + e.what());
    }
}

inline std::vector<double> coords_of(const json& j) {
    try {
        return j.get<std::vector<double>>();
    } catch (const json::exception&) {
        throw ParseError("coordinates must be an array of numbers");
    }
}

// --- points -----------------------------------------------------------------

inline Euclidean::Point point_from_json(const Euclidean& m, const json& coords, const std::string& = {}) {
    const auto c = coords_of(coords);
    Euclidean::Point p = Eigen::Map<const Eigen::VectorXd>(c.data(), static_cast<Eigen::Index>(c.size()));
    m.validate(p);
    return p;
}

inline Hyperbolic::Point point_from_json(const Hyperbolic& m, const json& coords, const std::string& chart) {
    const auto c = coords_of(coords);
    const std::string which = !chart.empty() ? chart : (c.size() == 2 ? "disk" : "hyperboloid");
    Hyperbolic::Point p;
    if (which == "disk") {
        if (c.size() != 2) throw ParseError("disk chart needs 2 coordinates");
        p = Hyperbolic::from_disk({c[0], c[1]});
    } else if (which == "hyperboloid") {
        if (c.size() != 3) throw ParseError("hyperboloid chart needs 3 coordinates");
        p = {c[0], c[1], c[2]};
    } else {
        throw ParseError("unknown chart '" + which + "'");
    }
    m.validate(p);
    return p;
}

inline Spd::Point point_from_json(const Spd& m, const json& coords, const std::string& = {}) {
    const auto c = coords_of(coords);
    const int n = m.size();
    if (c.size() != static_cast<std::size_t>(n * n)) throw ParseError("spd point needs n*n row-major entries");
    Spd::Point p(n, n);
    for (int r = 0; r < n; ++r)
        for (int col = 0; col < n; ++col) p(r, col) = c[static_cast<std::size_t>(r * n + col)];
    m.validate(p);
    return p;
}

inline json point_coords(const Eigen::VectorXd& p) { return std::vector<double>(p.data(), p.data() + p.size()); }
inline json point_coords(const Eigen::Vector3d& p) { return std::vector<double>{p[0], p[1], p[2]}; }
inline json point_coords(const Eigen::MatrixXd& p) {
    std::vector<double> out;
    for (Eigen::Index r = 0; r < p.rows(); ++r)
        for (Eigen::Index c = 0; c < p.cols(); ++c) out.push_back(p(r, c));
    return out;
}

// Accepts a bare coordinate array or a point object.
template <CartanHadamard M>
typename M::Point point_entry(const M& m, const json& entry, const std::string& default_chart) {
    if (entry.is_array()) return point_from_json(m, entry, default_chart);
    if (!entry.is_object() || !entry.contains("coords")) throw ParseError("point must be an array or an object with coords");
    if (entry.contains("manifold") && entry["manifold"].get<std::string>() != m.name())
        throw ManifoldMismatch("point on " + entry["manifold"].get<std::string>() + " in a " + m.name() + " document");
    return point_from_json(m, entry["coords"], entry.value("chart", default_chart));
}

template <CartanHadamard M>
Polygon<M> polygon_from_json(const M& m, const json& j) {
    Polygon<M> poly;
    poly.closed = j.value("closed", false);
    const std::string chart = j.value("chart", std::string{});
    if (!j.contains("points") || !j["points"].is_array()) throw ParseError("polygon needs a points array");
    for (const auto& e : j["points"]) poly.points.push_back(point_entry(m, e, chart));
    if (poly.points.size() < 2) throw PolygonTooShort("polygon needs at least 2 points");
    return poly;
}

template <CartanHadamard M>
json polygon_to_json(const M& m, const Polygon<M>& poly) {
    json pts = json::array();
    for (const auto& p : poly.points) pts.push_back(point_coords(p));
    json j = {{"manifold", m.name()}, {"closed", poly.closed}, {"points", pts}};
    if constexpr (std::is_same_v<M, Hyperbolic>) j["chart"] = "hyperboloid";
    return j;
}

// --- cylinder paths ---------------------------------------------------------

inline LiftedPath path_from_json(const json& j) {
    try {
        std::vector<CylinderPoint> pts;
        for (const auto& p : j.at("points")) pts.push_back(normalized({p.at("angle").get<double>(), p.at("height").get<double>()}));
        std::vector<std::int64_t> winding = j.contains("winding") ? j["winding"].get<std::vector<std::int64_t>>()
                                                                  : std::vector<std::int64_t>(pts.empty() ? 0 : pts.size() - 1, 0);
        return lift(pts, winding, j.value("base_choice", std::int64_t{0}));
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid cylinder path: ") + e.what());
    }
}

inline json path_to_json(const LiftedPath& path) {
    json pts = json::array();
    for (const auto& p : path.base_points) pts.push_back({{"angle", p.angle}, {"height", p.height}});
    return {{"points", pts}, {"winding", path.winding}, {"base_choice", path.base_choice}};
}

// --- traces -----------------------------------------------------------------

template <CartanHadamard M>
json diagnostics_to_json(const RefinementTrace<M>& trace) {
    json stats = json::array();
    for (const auto& s : trace.stats)
        stats.push_back({{"averages", s.averages},
                         {"uncertified", s.uncertified},
                         {"max_error_bound", s.max_error_bound},
                         {"max_iterations", s.max_iterations}});
    return {{"rho", trace.rho},
            {"max_edges", trace.max_edges},
            {"empirical_gammas", trace.empirical_gammas},
            {"displacement_constants", trace.displacement_constants},
            {"solver", stats},
            {"certified", trace.certified()}};
}

// {"format": "geosubdiv-trace", "manifold", "scheme", "gamma", "tolerance",
//  "levels": [{"level", "origin", "spacing", "closed", "points", "disk"?}], "diagnostics"}
template <CartanHadamard M>
json trace_to_json(const M& m, const Mask& mask, const RefinementTrace<M>& trace) {
    json levels = json::array();
    for (const auto& level : trace.levels) {
        json pts = json::array();
        for (const auto& p : level.points) pts.push_back(point_coords(p));
        json lj = {{"level", level.level},
                   {"origin", to_string(level.origin)},
                   {"spacing", to_string(level.spacing)},
                   {"closed", level.closed},
                   {"points", pts}};
        if constexpr (std::is_same_v<M, Hyperbolic>) {
            json disk = json::array();
            for (const auto& p : level.points) {
                const auto d = Hyperbolic::to_disk(p);
                disk.push_back({d[0], d[1]});
            }
            lj["disk"] = disk;
        }
        levels.push_back(std::move(lj));
    }
    return {{"format", "geosubdiv-trace"},
            {"version", 1},
            {"manifold", m.name()},
            {"scheme", mask_to_json(mask)},
            {"gamma", to_string(trace.gamma)},
            {"tolerance", trace.tolerance},
            {"levels", levels},
            {"diagnostics", diagnostics_to_json(trace)}};
}

template <CartanHadamard M>
RefinementTrace<M> trace_from_json(const M& m, const json& j) {
    try {
        RefinementTrace<M> trace;
        const Mask mask = mask_from_json(j.at("scheme"));
        trace.dilation = mask.dilation();
        trace.gamma = parse_rational(j.at("gamma").get<std::string>());
        trace.tolerance = j.at("tolerance").get<double>();
        for (const auto& lj : j.at("levels")) {
            Polygon<M> poly;
            poly.level = lj.at("level").get<int>();
            poly.origin = parse_rational(lj.at("origin").get<std::string>());
            poly.spacing = parse_rational(lj.at("spacing").get<std::string>());
            poly.closed = lj.at("closed").get<bool>();
            for (const auto& p : lj.at("points")) {
                if constexpr (std::is_same_v<M, Hyperbolic>) poly.points.push_back(point_from_json(m, p, "hyperboloid"));
                else poly.points.push_back(point_from_json(m, p));
            }
            trace.levels.push_back(std::move(poly));
        }
        if (j.contains("diagnostics") && j["diagnostics"].contains("solver")) {
            for (const auto& s : j["diagnostics"]["solver"])
                trace.stats.push_back({s.at("averages").get<std::size_t>(), s.at("uncertified").get<std::size_t>(),
                                       s.at("max_error_bound").get<double>(), s.at("max_iterations").get<int>()});
        }
        compute_diagnostics(m, trace);
        return trace;
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid trace document: ") + e.what());
    }
}

} // namespace geosubdiv
