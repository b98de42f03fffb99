#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "geosubdiv/cli.hpp"
#include "geosubdiv/geosubdiv.hpp"
#include "oracles.hpp"

using namespace geosubdiv;
namespace fs = std::filesystem;

namespace {

const fs::path source_dir = GEOSUBDIV_SOURCE_DIR;

std::string data(const std::string& name) { return (source_dir / "data" / name).string(); }

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "geosubdiv");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() / ("geosubdiv_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }
    std::string tmp(const std::string& name) const { return (dir_ / name).string(); }

    void write(const std::string& name, const std::string& text) const {
        std::ofstream f(dir_ / name);
        f << text;
    }

    fs::path dir_;
};

} // namespace

TEST_F(Cli, AnalyzeBlend) {
    const auto r = run_cli({"analyze", "--scheme", "blend-example1", "--json"});
    ASSERT_EQ(r.code, cli::ok) << r.err;
    const auto j = json::parse(r.out);
    EXPECT_EQ(parse_rational(j["contractivity_factor"].get<std::string>()), Rational(28, 32));
    EXPECT_EQ(parse_rational(j["iterates"][0]["gamma"].get<std::string>()), Rational(28, 32));
    EXPECT_TRUE(j["converges"].get<bool>());
    EXPECT_NEAR(j["holder_exponent"].get<double>(), 0.1926, 5e-4);

    const auto text = run_cli({"analyze", "--scheme", "blend-example1"});
    EXPECT_NE(text.out.find("holder exponent 0.1926"), std::string::npos) << text.out;
}

TEST_F(Cli, AnalyzeFourPointFamily) {
    const auto r = run_cli({"analyze", "--scheme", "fourpoint:1/16"});
    ASSERT_EQ(r.code, cli::ok);
    EXPECT_NE(r.out.find("1  5/4  5/8"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("holder exponent 0.6781"), std::string::npos);

    const auto wide = run_cli({"analyze", "--scheme", "fourpoint:1/4", "--json"});
    const auto j = json::parse(wide.out);
    EXPECT_EQ(j["iterates"][0]["gamma"], "1");
    EXPECT_EQ(j["witness"], 2);
    EXPECT_EQ(j["iterates"].size(), 4u);

    const auto two = run_cli({"analyze", "--scheme", "fourpoint2:1/16", "--levels", "1", "--json"});
    const auto k = json::parse(two.out);
    EXPECT_EQ(parse_rational(k["iterates"][0]["gamma"].get<std::string>()), Rational(84, 256));
    EXPECT_NEAR(k["holder_exponent"].get<double>(), 0.8039, 5e-4);
}

TEST_F(Cli, AnalyzeRejectsNonAffineMask) {
    write("bad.json", R"({"dilation": 2, "offset": 0, "coeffs": ["1"]})");
    const auto r = run_cli({"analyze", "--scheme", tmp("bad.json")});
    EXPECT_EQ(r.code, cli::not_affine);
    EXPECT_NE(r.err.find("residue 1"), std::string::npos) << r.err;
    EXPECT_EQ(run_cli({"analyze", "--scheme", data("mask_chaikin.json")}).code, cli::ok);
}

TEST_F(Cli, UsageErrors) {
    EXPECT_EQ(run_cli({}).code, cli::usage_error);
    EXPECT_EQ(run_cli({"analyze"}).code, cli::usage_error);
    EXPECT_EQ(run_cli({"analyze", "--scheme", "nope"}).code, cli::usage_error);
    EXPECT_EQ(run_cli({"refine", "--scheme", "chaikin", "--data", data("ramp.json"), "--levels", "1", "--tol", "-1"}).code,
              cli::usage_error);
}

TEST_F(Cli, RefineRampWithChaikin) {
    const auto r = run_cli({"refine", "--scheme", "chaikin", "--data", data("ramp.json"), "--levels", "2"});
    ASSERT_EQ(r.code, cli::ok) << r.err;
    const auto j = json::parse(r.out);
    const auto& l1 = j["levels"][1]["points"];
    const std::vector<double> expected = {0.25, 0.75, 1.25, 1.75, 2.25, 2.75};
    ASSERT_EQ(l1.size(), expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) EXPECT_DOUBLE_EQ(l1[i][0].get<double>(), expected[i]);
    EXPECT_EQ(j["levels"][2]["points"].size(), 10u);
}

TEST_F(Cli, RefineSquareIsDeterministicAndVerifies) {
    const std::vector<std::string> args = {"refine", "--scheme", "blend-example1", "--data", data("square.json"), "--levels", "4"};
    auto a = args, b = args;
    a.insert(a.end(), {"--out", tmp("a.json")});
    b.insert(b.end(), {"--out", tmp("b.json")});
    ASSERT_EQ(run_cli(a).code, cli::ok);
    ASSERT_EQ(run_cli(b).code, cli::ok);
    EXPECT_EQ(slurp(tmp("a.json")), slurp(tmp("b.json")));
    const auto j = json::parse(slurp(tmp("a.json")));
    EXPECT_EQ(j["levels"].size(), 5u);
    EXPECT_EQ(j["levels"][0]["disk"][0][0].get<double>(), 0.6);
    EXPECT_TRUE(j["diagnostics"]["certified"].get<bool>());
    EXPECT_EQ(run_cli({"verify", "--data", tmp("a.json")}).code, cli::ok);
}

TEST_F(Cli, RefineOctagonInterpolates) {
    ASSERT_EQ(run_cli({"refine", "--scheme", "fourpoint:1/16", "--data", data("octagon.json"), "--levels", "4", "--out",
                       tmp("t.json")})
                  .code,
              cli::ok);
    const auto trace = trace_from_json(Hyperbolic(), json::parse(slurp(tmp("t.json"))));
    for (std::size_t k = 1; k < trace.levels.size(); ++k)
        for (std::size_t i = 0; i < trace.levels[k - 1].size(); ++i)
            EXPECT_EQ(trace.levels[k].points[2 * i], trace.levels[k - 1].points[i]);
}

TEST_F(Cli, RefineErrors) {
    write("short.json", R"({"manifold": "euclidean:1", "closed": false, "points": [[0], [1], [2]]})");
    EXPECT_EQ(run_cli({"refine", "--scheme", "fourpoint:1/16", "--data", tmp("short.json"), "--levels", "1"}).code, cli::too_short);
    const auto r = run_cli({"refine", "--scheme", "blend-example1", "--data", data("square.json"), "--levels", "1", "--tol",
                            "1e-300", "--out", tmp("x.json")});
    EXPECT_EQ(r.code, cli::not_certified);
    write("mixed.json", R"({"manifold": "hyperbolic2", "closed": true,
        "points": [[0.1, 0.1], {"manifold": "euclidean:2", "coords": [0, 0]}, [0.2, 0.3]]})");
    EXPECT_EQ(run_cli({"refine", "--scheme", "chaikin", "--data", tmp("mixed.json"), "--levels", "1"}).code, cli::usage_error);
    write("outside.json", R"({"manifold": "hyperbolic2", "chart": "disk", "points": [[0.1, 0.1], [1.2, 0.0]]})");
    EXPECT_EQ(run_cli({"refine", "--scheme", "chaikin", "--data", tmp("outside.json"), "--levels", "1"}).code, cli::usage_error);
}

TEST_F(Cli, RefineSpdAndCylinder) {
    const auto spd = run_cli({"refine", "--scheme", "chaikin", "--data", data("spd_path.json"), "--levels", "2", "--out", tmp("spd.json")});
    ASSERT_EQ(spd.code, cli::ok) << spd.err;
    EXPECT_EQ(run_cli({"verify", "--data", tmp("spd.json")}).code, cli::ok);

    const auto cyl = run_cli({"refine", "--scheme", "chaikin", "--data", data("cylinder_path.json"), "--levels", "3", "--out",
                              tmp("cyl.json")});
    ASSERT_EQ(cyl.code, cli::ok) << cyl.err;
    const auto j = json::parse(slurp(tmp("cyl.json")));
    EXPECT_EQ(j["manifold"], "cylinder");
    EXPECT_EQ(j["levels"].size(), 4u);
    for (const auto& level : j["levels"]) {
        ASSERT_EQ(level["cylinder"].size(), level["points"].size());
        for (std::size_t i = 0; i < level["points"].size(); ++i) {
            const double u = level["points"][i][0].get<double>();
            const double angle = level["cylinder"][i][0].get<double>();
            EXPECT_NEAR(std::remainder(u - angle, two_pi), 0.0, 1e-12);
        }
    }
    EXPECT_EQ(run_cli({"verify", "--data", tmp("cyl.json")}).code, cli::ok);
}

TEST_F(Cli, TraceRoundTripReproducesDiagnostics) {
    const Hyperbolic h;
    const auto poly = polygon_from_json(h, read_json_file(data("square.json")));
    const auto trace = refine(h, blend_example(), poly, 3, 1e-10);
    const auto back = trace_from_json(h, json::parse(trace_to_json(h, blend_example(), trace).dump(2)));
    ASSERT_EQ(back.levels.size(), trace.levels.size());
    for (std::size_t k = 0; k < trace.levels.size(); ++k) {
        EXPECT_EQ(back.levels[k].points, trace.levels[k].points);
        EXPECT_EQ(back.levels[k].origin, trace.levels[k].origin);
        EXPECT_EQ(back.levels[k].spacing, trace.levels[k].spacing);
    }
    EXPECT_EQ(back.gamma, trace.gamma);
    EXPECT_EQ(back.max_edges, trace.max_edges);
    EXPECT_EQ(back.empirical_gammas, trace.empirical_gammas);
    EXPECT_EQ(back.displacement_constants, trace.displacement_constants);
    EXPECT_EQ(diagnostics_to_json(back), diagnostics_to_json(trace));
}

TEST_F(Cli, VerifyVacuousAndCorrupted) {
    ASSERT_EQ(run_cli({"refine", "--scheme", "blend-example1", "--data", data("square.json"), "--levels", "3", "--out",
                       tmp("t.json")})
                  .code,
              cli::ok);
    auto j = json::parse(slurp(tmp("t.json")));

    json one = j;
    one["levels"] = json::array({j["levels"][0]});
    one["diagnostics"]["solver"] = json::array();
    write("one.json", one.dump());
    EXPECT_EQ(run_cli({"verify", "--data", tmp("one.json")}).code, cli::ok);

    json bad = j;
    const auto far = Hyperbolic::from_disk({-0.95, 0.0});
    bad["levels"][2]["points"][3] = {far[0], far[1], far[2]};
    write("bad.json", bad.dump());
    const auto r = run_cli({"verify", "--data", tmp("bad.json")});
    EXPECT_EQ(r.code, cli::verify_failed);
    EXPECT_NE(r.err.find("level 2"), std::string::npos) << r.err;
}

TEST_F(Cli, RenderPolygonMarkers) {
    const auto r = run_cli({"render", "--data", data("square.json")});
    ASSERT_EQ(r.code, cli::ok) << r.err;
    for (const char* marker : {R"(cx="330.0000" cy="110.0000")", R"(cx="330.0000" cy="310.0000")", R"(cx="90.0000" cy="310.0000")",
                               R"(cx="90.0000" cy="110.0000")"})
        EXPECT_NE(r.out.find(marker), std::string::npos) << marker;
    EXPECT_NE(r.out.find(R"(<circle cx="210.0000" cy="210.0000" r="200.0000")"), std::string::npos);
}

TEST_F(Cli, RenderEmptySelectionAndErrors) {
    const auto r = run_cli({"render", "--data", data("square.json"), "--select="});
    ASSERT_EQ(r.code, cli::ok) << r.err;
    EXPECT_EQ(r.out.find("<path"), std::string::npos);
    EXPECT_NE(r.out.find("<circle"), std::string::npos);
    EXPECT_EQ(run_cli({"render", "--data", data("ramp.json")}).code, cli::not_hyperbolic);
    EXPECT_EQ(run_cli({"render", "--data", data("square.json"), "--select", "7"}).code, cli::usage_error);
}

TEST_F(Cli, RenderOctagonMatchesGolden) {
    ASSERT_EQ(run_cli({"refine", "--scheme", "fourpoint:1/16", "--data", data("octagon.json"), "--levels", "4", "--out",
                       tmp("t.json")})
                  .code,
              cli::ok);
    const auto a = run_cli({"render", "--data", tmp("t.json"), "--select", "0,4", "--geodesic-arcs"});
    const auto b = run_cli({"render", "--data", tmp("t.json"), "--select", "0,4", "--geodesic-arcs"});
    ASSERT_EQ(a.code, cli::ok) << a.err;
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(a.out, slurp(source_dir / "tests" / "golden" / "octagon_4.svg"));
}

TEST(Svg, GeodesicArcsAndChords) {
    SvgOptions opt;
    opt.geodesic_arcs = true;
    const DiskSvg svg(opt);
    // diameter: chord
    EXPECT_EQ(svg.segment({-0.5, 0.0}, {0.5, 0.0}).front(), 'L');
    // short segments: chord
    EXPECT_EQ(svg.segment({0.3, 0.3}, {0.3, 0.3 + 1e-5}).front(), 'L');
    const std::string arc = svg.segment({0.5, 0.0}, {0.0, 0.5});
    ASSERT_EQ(arc.front(), 'A');
    // circle orthogonal to the unit circle through (0.5,0) and (0,0.5): center (1.25,1.25), r^2 = 2 * 1.25^2 - 1
    const double r = std::sqrt(2 * 1.25 * 1.25 - 1) * 200;
    char buf[64];
    std::snprintf(buf, sizeof buf, "A%.4f %.4f 0 0 ", r, r);
    EXPECT_EQ(arc.rfind(buf, 0), 0u) << arc;
    // the minor arc bows toward the origin
    EXPECT_NE(arc.find(" 0 0 1 "), std::string::npos) << arc;
}

TEST(Svg, ArcMidpointsLieOnGeodesics) {
    SvgOptions opt;
    opt.geodesic_arcs = true;
    const DiskSvg svg(opt);
    const double c = opt.radius_px + opt.margin_px;
    auto to_disk = [&](const Eigen::Vector2d& s) { return Eigen::Vector2d((s[0] - c) / opt.radius_px, (c - s[1]) / opt.radius_px); };
    std::mt19937_64 rng(61);
    int arcs = 0;
    for (int t = 0; t < 1000; ++t) {
        const Eigen::Vector2d a = oracle::random_disk_point(rng, 0.9), b = oracle::random_disk_point(rng, 0.9);
        const std::string seg = svg.segment(a, b);
        if (seg.front() != 'A') continue;
        ++arcs;
        double r = 0, x = 0, y = 0;
        int rot = 0, large = 0, sweep = 0;
        ASSERT_EQ(std::sscanf(seg.c_str(), "A%lf %*f %d %d %d %lf %lf", &r, &rot, &large, &sweep, &x, &y), 6) << seg;
        const Eigen::Vector2d s0(c + opt.radius_px * a[0], c - opt.radius_px * a[1]);
        const Eigen::Vector2d m = to_disk(oracle::svg_arc_midpoint(s0, r, large, sweep, {x, y}));
        const double excess = oracle::disk_distance(a, m) + oracle::disk_distance(m, b) - oracle::disk_distance(a, b);
        EXPECT_LT(excess, 1e-3) << seg;
    }
    EXPECT_GT(arcs, 900);
}
