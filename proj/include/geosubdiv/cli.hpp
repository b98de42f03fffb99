#pragma once

// Command-line driver: analyze | refine | render | verify.
//
// Exit codes: 0 ok, 1 usage or input error, 2 mask not affine invariant,
// 3 polygon too short, 4 center of mass not certified, 5 render input not hyperbolic,
// 6 verification failure.

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "geosubdiv/covering.hpp"
#include "geosubdiv/io.hpp"
#include "geosubdiv/mask.hpp"
#include "geosubdiv/schemes.hpp"
#include "geosubdiv/subdivision.hpp"
#include "geosubdiv/svg.hpp"

namespace geosubdiv::cli {

enum ExitCode : int {
    ok = 0,
    usage_error = 1,
    not_affine = 2,
    too_short = 3,
    not_certified = 4,
    not_hyperbolic = 5,
    verify_failed = 6,
};

struct RunConfig {
    std::string command;
    std::string scheme;
    std::string data;
    int levels = -1;
    double tolerance = 0.0; // 0: manifold default
    bool json = false;
    std::string out;
    bool geodesic_arcs = false;
    bool closed = false;
    std::string select = "all"; // render: comma separated levels; empty draws none
    double radius_px = 200.0;
    bool no_markers = false;
};

namespace detail {

inline std::string decimal(const Rational& q, int digits = 6) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(digits) << to_double(q);
    return os.str();
}

inline void write_output(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write '" + path + "'");
    f << text;
}

inline double default_tolerance(const ManifoldSpec& spec) { return spec.kind == ManifoldSpec::Kind::spd ? 1e-8 : 1e-10; }

} // namespace detail

inline int cmd_analyze(const RunConfig& cfg, std::ostream& out) {
    const Mask mask = scheme_by_name(cfg.scheme);
    require_affine_invariance(mask);
    const int m_max = cfg.levels > 0 ? cfg.levels : 4;
    const MaskAnalysis a = analyze(mask, m_max);
    if (cfg.json) {
        json rows_j = json::array();
        for (int m = 0; m < a.m_max(); ++m)
            rows_j.push_back({{"m", m + 1},
                              {"norm", to_string(a.norm_values[m])},
                              {"gamma", to_string(a.gammas[m])},
                              {"gamma_decimal", to_double(a.gammas[m])},
                              {"derived_mask", mask_to_json(a.derived_masks[m])}});
        json j = {{"scheme", mask_to_json(mask)},
                  {"contractivity_factor", to_string(contractivity_factor(mask))},
                  {"iterates", rows_j},
                  {"converges", a.converges},
                  {"witness", a.witness}};
        j["holder_exponent"] = a.converges ? json(a.holder_exponent) : json(nullptr);
        out << j.dump(2) << "\n";
        return ok;
    }
    out << "scheme: dilation " << mask.dilation() << ", offset " << mask.offset() << ", coeffs (";
    for (std::size_t i = 0; i < mask.coeffs().size(); ++i) out << (i ? ", " : "") << to_string(mask.coeffs()[i]);
    out << ")\n";
    out << "m  norm(S^{m*})  gamma_m  gamma_m(decimal)  verdict\n";
    for (int m = 0; m < a.m_max(); ++m) {
        const bool contractive = a.gammas[m] < 1;
        out << (m + 1) << "  " << to_string(a.norm_values[m]) << "  " << to_string(a.gammas[m]) << "  "
            << detail::decimal(a.gammas[m]) << "  " << (contractive ? "contractive" : "undecided") << "\n";
    }
    if (a.converges) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.4f", a.holder_exponent);
        out << "converges (witness m=" << a.witness << "), holder exponent " << buf << "\n";
    } else {
        out << "undecided up to m=" << a.m_max() << "\n";
    }
    return ok;
}

namespace detail {

template <CartanHadamard M>
int refine_manifold(const M& m, const Mask& mask, const json& doc, const RunConfig& cfg, double tol, std::ostream& out,
                    std::ostream& err) {
    Polygon<M> poly = polygon_from_json(m, doc);
    if (cfg.closed) poly.closed = true;
    const auto trace = refine(m, mask, poly, cfg.levels, tol);
    write_output(cfg.out, trace_to_json(m, mask, trace).dump(2) + "\n", out);
    if (!trace.certified()) {
        err << "center of mass not certified within tolerance " << tol << "\n";
        return not_certified;
    }
    return ok;
}

inline int refine_cylinder(const Mask& mask, const json& doc, const RunConfig& cfg, double tol, std::ostream& out) {
    const LiftedPath path = path_from_json(doc);
    const auto levels = subdivide_on_cylinder(mask, path, cfg.levels);
    const Euclidean strip(2);
    Polygon<Euclidean> poly;
    for (const auto& p : path.planar()) poly.points.push_back(p);
    if (poly.points.size() < 2) throw PolygonTooShort("cylinder path needs at least 2 points");
    const auto trace = refine(strip, mask, poly, cfg.levels, tol);
    json j = trace_to_json(strip, mask, trace);
    j["manifold"] = "cylinder";
    j["path"] = path_to_json(path);
    for (std::size_t l = 0; l < levels.size(); ++l) {
        json cyl = json::array(), flagged = json::array();
        for (std::size_t i = 0; i < levels[l].points.size(); ++i) {
            cyl.push_back({levels[l].points[i].angle, levels[l].points[i].height});
            if (levels[l].off_strip[i]) flagged.push_back(i);
        }
        j["levels"][l]["cylinder"] = cyl;
        j["levels"][l]["off_strip"] = flagged;
    }
    write_output(cfg.out, j.dump(2) + "\n", out);
    return ok;
}

} // namespace detail

inline int cmd_refine(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    if (cfg.levels < 0) throw ParseError("refine needs --levels >= 0");
    const Mask mask = scheme_by_name(cfg.scheme);
    require_affine_invariance(mask);
    const json doc = read_json_file(cfg.data);
    const bool cylinder = doc.value("manifold", std::string{}) == "cylinder" || doc.contains("winding");
    const ManifoldSpec spec = cylinder ? ManifoldSpec{ManifoldSpec::Kind::cylinder, 2}
                                       : parse_manifold(doc.at("manifold").get<std::string>());
    const double tol = cfg.tolerance > 0 ? cfg.tolerance : detail::default_tolerance(spec);
    if (cfg.levels == 0) throw ParseError("refine needs --levels >= 1");
    switch (spec.kind) {
    case ManifoldSpec::Kind::euclidean: return detail::refine_manifold(Euclidean(spec.dim), mask, doc, cfg, tol, out, err);
    case ManifoldSpec::Kind::hyperbolic: return detail::refine_manifold(Hyperbolic(), mask, doc, cfg, tol, out, err);
    case ManifoldSpec::Kind::spd: return detail::refine_manifold(Spd(spec.dim), mask, doc, cfg, tol, out, err);
    case ManifoldSpec::Kind::cylinder: return detail::refine_cylinder(mask, doc, cfg, tol, out);
    }
    return usage_error;
}

inline int cmd_render(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const json doc = read_json_file(cfg.data);
    if (doc.value("manifold", std::string{}) != "hyperbolic2") {
        err << "render needs a hyperbolic2 trace or polygon, got '" << doc.value("manifold", std::string{"?"}) << "'\n";
        return not_hyperbolic;
    }
    const Hyperbolic h;
    std::vector<DiskPolyline> all;
    if (doc.value("format", std::string{}) == "geosubdiv-trace") {
        const auto trace = trace_from_json(h, doc);
        for (const auto& level : trace.levels) {
            DiskPolyline line{level.level, level.closed, {}};
            for (const auto& p : level.points) line.points.push_back(Hyperbolic::to_disk(p));
            all.push_back(std::move(line));
        }
    } else {
        const auto poly = polygon_from_json(h, doc);
        DiskPolyline line{0, poly.closed || cfg.closed, {}};
        for (const auto& p : poly.points) line.points.push_back(Hyperbolic::to_disk(p));
        all.push_back(std::move(line));
    }

    std::vector<DiskPolyline> chosen;
    if (cfg.select == "all") {
        chosen = all;
    } else {
        std::stringstream ss(cfg.select);
        std::string item;
        while (std::getline(ss, item, ',')) {
            if (item.empty()) continue;
            int wanted = 0;
            try {
                wanted = std::stoi(item);
            } catch (const std::exception&) {
                throw ParseError("bad level '" + item + "' in --select");
            }
            bool found = false;
            for (const auto& line : all)
                if (line.level == wanted) {
                    chosen.push_back(line);
                    found = true;
                }
            if (!found) throw ParseError("level " + item + " not present in the input");
        }
    }
    SvgOptions opt;
    opt.radius_px = cfg.radius_px;
    opt.geodesic_arcs = cfg.geodesic_arcs;
    opt.markers = !cfg.no_markers;
    detail::write_output(cfg.out, DiskSvg(opt).render(chosen), out);
    return ok;
}

namespace detail {

template <CartanHadamard M>
int verify_manifold(const M& m, const json& doc, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    auto trace = trace_from_json(m, doc);
    const Mask mask = cfg.scheme.empty() ? mask_from_json(doc.at("scheme")) : scheme_by_name(cfg.scheme);
    const Rational gamma = cfg.scheme.empty() ? trace.gamma : contractivity_factor(mask);

    const auto contract = check_contractivity(m, trace, gamma);
    if (!contract.pass) {
        err << "contractivity violated at level " << contract.failing_level << ", edge " << contract.failing_index << " -> "
            << contract.failing_index + 1 << ": dist " << contract.failing_distance << " > gamma^k rho + slack "
            << contract.failing_bound << "\n";
        return verify_failed;
    }
    const auto disp = check_displacement_safety(trace);
    if (!disp.finite) {
        err << "displacement constant is not finite\n";
        return verify_failed;
    }
    double empirical = std::nan(""), analytic = std::nan("");
    if (trace.levels.size() >= 3) {
        const auto analysis = analyze(mask, 4);
        empirical = estimate_holder(trace);
        if (analysis.converges) {
            analytic = analysis.holder_exponent;
            if (empirical < analytic - 0.05) {
                err << "holder estimate " << empirical << " below analytic exponent " << analytic << " - 0.05\n";
                return verify_failed;
            }
        }
    }
    if (cfg.json) {
        json j = {{"contractivity", {{"pass", true}, {"worst_margin", contract.worst_margin}}},
                  {"displacement", {{"c_empirical", disp.c_empirical}, {"per_level", disp.per_level}}},
                  {"diagnostics", diagnostics_to_json(trace)}};
        j["holder"] = {{"empirical", std::isnan(empirical) ? json(nullptr) : json(empirical)},
                       {"analytic", std::isnan(analytic) ? json(nullptr) : json(analytic)}};
        out << j.dump(2) << "\n";
    } else {
        out << "contractivity: pass (gamma " << to_string(gamma) << ", " << trace.levels.size() << " levels)\n";
        out << "displacement: C_empirical " << disp.c_empirical << "\n";
        if (std::isnan(empirical)) out << "holder: skipped (fewer than 3 levels)\n";
        else out << "holder: empirical " << empirical << ", analytic " << analytic << "\n";
    }
    return ok;
}

} // namespace detail

inline int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const json doc = read_json_file(cfg.data);
    const std::string manifold = doc.at("manifold").get<std::string>();
    const ManifoldSpec spec = parse_manifold(manifold);
    switch (spec.kind) {
    case ManifoldSpec::Kind::euclidean: return detail::verify_manifold(Euclidean(spec.dim), doc, cfg, out, err);
    case ManifoldSpec::Kind::cylinder: return detail::verify_manifold(Euclidean(2), doc, cfg, out, err);
    case ManifoldSpec::Kind::hyperbolic: return detail::verify_manifold(Hyperbolic(), doc, cfg, out, err);
    case ManifoldSpec::Kind::spd: return detail::verify_manifold(Spd(spec.dim), doc, cfg, out, err);
    }
    return usage_error;
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Refinement of manifold-valued polygons by Riemannian subdivision schemes"};
    app.require_subcommand(1);
    RunConfig cfg;

    auto* analyze_cmd = app.add_subcommand("analyze", "exact contractivity analysis of a mask");
    analyze_cmd->add_option("--scheme", cfg.scheme, "built-in name or mask JSON file")->required();
    analyze_cmd->add_option("--levels", cfg.levels, "largest iterate m to analyze (default 4)");
    analyze_cmd->add_flag("--json", cfg.json, "machine-readable output");

    auto* refine_cmd = app.add_subcommand("refine", "refine a polygon or cylinder path");
    refine_cmd->add_option("--scheme", cfg.scheme)->required();
    refine_cmd->add_option("--data", cfg.data, "polygon or cylinder path JSON")->required();
    refine_cmd->add_option("--levels", cfg.levels, "number of refinement steps")->required();
    refine_cmd->add_option("--tol", cfg.tolerance, "center-of-mass tolerance");
    refine_cmd->add_option("--out", cfg.out, "trace output path (stdout if omitted)");
    refine_cmd->add_flag("--closed", cfg.closed, "treat the polygon as closed");

    auto* render_cmd = app.add_subcommand("render", "draw a hyperbolic trace in the Poincare disk");
    render_cmd->add_option("--data", cfg.data, "trace or polygon JSON")->required();
    render_cmd->add_option("--out", cfg.out, "SVG output path (stdout if omitted)");
    render_cmd->add_option("--select", cfg.select, "comma separated levels to draw (default all)")
        ->expected(0, 1)
        ->default_str("");
    render_cmd->add_option("--radius", cfg.radius_px, "disk radius in px")->default_val(200.0);
    render_cmd->add_flag("--geodesic-arcs", cfg.geodesic_arcs, "draw segments as geodesic arcs");
    render_cmd->add_flag("--no-markers", cfg.no_markers, "omit vertex markers");
    render_cmd->add_flag("--closed", cfg.closed, "close a polygon input");

    auto* verify_cmd = app.add_subcommand("verify", "check contractivity, displacement and regularity of a trace");
    verify_cmd->add_option("--data", cfg.data, "trace JSON")->required();
    verify_cmd->add_option("--scheme", cfg.scheme, "override the mask stored in the trace");
    verify_cmd->add_flag("--json", cfg.json);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? ok : usage_error;
    }
    if (cfg.tolerance < 0) {
        err << "--tol must be positive\n";
        return usage_error;
    }

    try {
        if (*analyze_cmd) return cmd_analyze(cfg, out);
        if (*refine_cmd) return cmd_refine(cfg, out, err);
        if (*render_cmd) return cmd_render(cfg, out, err);
        if (*verify_cmd) return cmd_verify(cfg, out, err);
    } catch (const NotAffineInvariant& e) {
        err << e.what() << "\n";
        return not_affine;
    } catch (const PolygonTooShort& e) {
        err << e.what() << "\n";
        return too_short;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return usage_error;
    }
    return usage_error;
}

} // namespace geosubdiv::cli
