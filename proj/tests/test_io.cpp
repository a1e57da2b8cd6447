#include <catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "polyberg/io.hpp"

using namespace polyberg;
using namespace polyberg::io;
using Catch::Matchers::ContainsSubstring;

namespace {

json parse_text(const std::string& s) {
    std::istringstream in(s);
    return io::parse(in, "test");
}

} // namespace

TEST_CASE("channel set JSON roundtrip") {
    const ChannelSet f = random_channels(3, 5, 17);
    const json j = to_json(f);
    CHECK(channels_from_json(j) == f);
    CHECK(channels_from_json(parse_text(j.dump())) == f);
    CHECK(j["channels"][0]["basis"] == kLaguerreBasis);
}

TEST_CASE("channel set JSON errors") {
    CHECK_THROWS_AS(channels_from_json(parse_text(R"({"channels": []})")), io_error);
    CHECK_THROWS_AS(channels_from_json(parse_text(R"({"channels": [{"basis": "hermite", "coeffs": [[1, 0]]}]})")), io_error);
    CHECK_THROWS_AS(channels_from_json(parse_text(R"({"channels": [{"basis": "laguerre-alpha1", "coeffs": [[1]]}]})")), io_error);
    CHECK_THROWS_AS(channels_from_json(parse_text(
                        R"({"channels": [{"basis": "laguerre-alpha1", "coeffs": [[1, 0]]},
                                         {"basis": "laguerre-alpha1", "coeffs": [[1, 0], [0, 1]]}]})")),
                    io_error);
    CHECK_THROWS_AS(channels_from_json(parse_text(R"({"signals": []})")), io_error);
}

TEST_CASE("mux field JSON roundtrip and header validation") {
    const MuxField f = encode(random_channels(2, 4, 3));
    const MuxField g = mux_from_json(parse_text(to_json(f).dump()));
    CHECK(g.n == f.n);
    CHECK(g.M == f.M);
    CHECK(g.coeffs == f.coeffs);
    json bad = to_json(f);
    bad["n"] = 3;
    CHECK_THROWS_WITH(mux_from_json(bad), ContainsSubstring("header n"));
    bad = to_json(f);
    bad["M"] = 5;
    CHECK_THROWS_WITH(mux_from_json(bad), ContainsSubstring("header M"));
}

TEST_CASE("poly field JSON roundtrip") {
    const PolyField F = PolyField::from_coeffs({{1.0, cplx(0.0, 2.0)}, {0.5, -1.0}});
    const PolyField G = polyfield_from_json(parse_text(to_json(F).dump()));
    CHECK(G.coeffs() == F.coeffs());
    const HalfPlanePoint z(0.2, 0.9);
    CHECK(G(z) == F(z));
    json bad = to_json(F);
    bad["order"] = 3;
    CHECK_THROWS_AS(polyfield_from_json(bad), io_error);
}

TEST_CASE("malformed JSON reports the byte offset") {
    CHECK_THROWS_WITH(parse_text("{\"n\": 1,,}"), ContainsSubstring("at byte 9"));
    CHECK_THROWS_AS(parse_text(""), io_error);
}

TEST_CASE("grid spec overrides") {
    const GridSpec g = grid_spec_from_json(parse_text(R"({"n_x": 32, "x_map": "uniform"})"));
    CHECK(g.n_x == 32);
    CHECK(g.x_map == XMap::uniform);
    CHECK(g.n_s == default_grid_spec().n_s);
    const GridSpec h = grid_spec_from_json(to_json(g));
    CHECK(h.n_x == g.n_x);
    CHECK(h.s_min == g.s_min);
    CHECK(h.x_scale == g.x_scale);
    CHECK_THROWS_AS(grid_spec_from_json(parse_text(R"({"n_x": 1})")), io_error);
    CHECK_THROWS_AS(grid_spec_from_json(parse_text(R"({"n_x": 2.5})")), io_error);
    CHECK_THROWS_AS(grid_spec_from_json(parse_text(R"({"x_map": "log"})")), io_error);
    CHECK(to_json(make_grid(1.0, 4, 1.0, 2.0, 3))["node_count"] == 12);
}

TEST_CASE("verify config") {
    const VerifyConfig c = verify_config_from_json(
        parse_text(R"({"grid": {"n_x": 64}, "M": 8, "seed": 5, "tolerances": {"codec.crosstalk": 0.01}})"));
    CHECK(c.grid.n_x == 64);
    CHECK(c.M == 8);
    CHECK(c.seed == 5);
    CHECK(c.tolerances.at("codec.crosstalk") == 0.01);
    CHECK_THROWS_AS(verify_config_from_json(parse_text(R"({"M": 0})")), io_error);
    CHECK_THROWS_AS(verify_config_from_json(parse_text(R"({"seed": -1})")), io_error);
    CHECK_THROWS_AS(verify_config_from_json(parse_text(R"({"tolerances": {"x": "big"}})")), io_error);
}

TEST_CASE("verify report JSON") {
    VerifyReport r;
    r.checks.push_back({"a", "s", 0.5, 1.0, true, ""});
    r.checks.push_back({"b", "s", NAN, 1.0, false, "threw"});
    const json j = to_json(r);
    CHECK(j["passed"] == false);
    CHECK(j["checks"][0]["measured"] == 0.5);
    CHECK(j["checks"][1]["measured"].is_null());
    CHECK(j["checks"][1]["detail"] == "threw");
}

TEST_CASE("field CSV roundtrip is exact") {
    const HalfPlaneGrid g = make_grid(3.0, 4, 0.1, 7.0, 3);
    std::vector<cplx> v;
    for (const auto& p : g.nodes) v.push_back(basis_e(1, 2, p));
    std::ostringstream out;
    write_field_csv(out, g.nodes, v);
    std::istringstream in(out.str());
    const FieldSamples f = read_field_csv(in, "field.csv");
    CHECK(f.values == v);
    CHECK_NOTHROW(expect_grid_nodes(f, g, "field.csv"));
    CHECK_THROWS_AS(expect_grid_nodes(f, make_grid(3.0, 4, 0.1, 7.0, 4), "field.csv"), io_error);
}

TEST_CASE("field CSV errors name the line") {
    std::istringstream bad_header("x,y,re,im\n");
    CHECK_THROWS_WITH(read_field_csv(bad_header, "f.csv"), ContainsSubstring("header"));
    std::istringstream bad_cell("x,s,re,im\n0,1,2,3\n0,1,abc,3\n");
    CHECK_THROWS_WITH(read_field_csv(bad_cell, "f.csv"), ContainsSubstring("line 3"));
    std::istringstream bad_s("x,s,re,im\n0,-1,2,3\n");
    CHECK_THROWS_WITH(read_field_csv(bad_s, "f.csv"), ContainsSubstring("s must be > 0"));
    std::istringstream short_row("x,s,re,im\n0,1,2\n");
    CHECK_THROWS_AS(read_field_csv(short_row, "f.csv"), io_error);
}

TEST_CASE("time signal import recovers a closed-form spectrum") {
    // fhat = l_0^1 = sqrt(t) e^{-t/2} has f(x) = Gamma(3/2) (1/2 - ix)^{-3/2}.
    const auto f = [](double x) { return 0.5 * std::sqrt(kPi) * std::pow(cplx(0.5, -x), -1.5); };
    std::ostringstream csv;
    csv << "x,re,im\n";
    for (int k = -4000; k <= 4000; ++k) {
        const double x = 0.05 * k;
        csv << format_double(x) << ',' << format_double(f(x).real()) << ',' << format_double(f(x).imag()) << '\n';
    }
    std::istringstream in(csv.str());
    const TimeSignal s = read_time_signal_csv(in, "t.csv");
    CHECK(s.values.size() == 8001);
    const RPlusCoeffs c = fit_time_signal(s, 4);
    CHECK(std::abs(c.coeffs[0] - 1.0) < 1e-3);
    for (int m = 1; m < 4; ++m) CHECK(std::abs(c.coeffs[m]) < 1e-3);

    TimeSignal coarse = s;
    coarse.dx = 1.0;
    CHECK_THROWS_AS(fit_time_signal(coarse, 4), invalid_argument);

    std::istringstream uneven("x,re,im\n0,1,0\n1,1,0\n3,1,0\n");
    CHECK_THROWS_WITH(read_time_signal_csv(uneven, "t.csv"), ContainsSubstring("uniformly"));
}

TEST_CASE("frame scan CSV row") {
    FrameOptions opt;
    opt.M = 2;
    opt.trials = 2;
    const FrameReport r = frame_ratio(0, make_lattice(2.0, 1.0, {-1, 1}, {-2, 2}), opt);
    std::ostringstream out;
    write_frame_scan_header(out);
    write_frame_scan_row(out, r);
    const std::string text = out.str();
    CHECK(text.rfind("a,b,n,density_value,threshold,satisfied,lower_est,upper_est\n2,1,0,", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), ',') == 14);
    CHECK(to_json(r)["condition_satisfied"] == true);
}
