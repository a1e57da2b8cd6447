#pragma once

// JSON and CSV forms of the library types.  Complex numbers are [re, im] pairs.
// Requires nlohmann/json.

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#if __has_include(<nlohmann/json.hpp>)
#include <nlohmann/json.hpp>
#else
#include "json.hpp"
#endif

#include "polyberg/frames.hpp"
#include "polyberg/halfplane.hpp"
#include "polyberg/multiplex.hpp"
#include "polyberg/polyspace.hpp"
#include "polyberg/timesignal.hpp"
#include "polyberg/transforms.hpp"
#include "polyberg/verify.hpp"

namespace polyberg {

/// Malformed or schema-violating input.
class io_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace io {

using json = nlohmann::json;

inline constexpr const char* kLaguerreBasis = "laguerre-alpha1";

namespace detail {

inline void expect(bool ok, const std::string& msg) {
    if (!ok) throw io_error(msg);
}

inline const json& field(const json& j, const char* key, const std::string& where) {
    expect(j.is_object(), where + ": expected an object");
    const auto it = j.find(key);
    expect(it != j.end(), where + ": missing field \"" + key + "\"");
    return *it;
}

inline double number(const json& j, const std::string& where) {
    expect(j.is_number(), where + ": expected a number");
    return j.get<double>();
}

inline int integer(const json& j, const std::string& where) {
    expect(j.is_number_integer(), where + ": expected an integer");
    return j.get<int>();
}

} // namespace detail

inline json complex_to_json(cplx v) { return json::array({v.real(), v.imag()}); }

inline cplx complex_from_json(const json& j, const std::string& where) {
    detail::expect(j.is_array() && j.size() == 2, where + ": expected [re, im]");
    return {detail::number(j[0], where), detail::number(j[1], where)};
}

inline json vector_to_json(const std::vector<cplx>& v) {
    json a = json::array();
    for (const cplx& c : v) a.push_back(complex_to_json(c));
    return a;
}

inline std::vector<cplx> vector_from_json(const json& j, const std::string& where) {
    detail::expect(j.is_array(), where + ": expected an array of [re, im]");
    std::vector<cplx> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(complex_from_json(j[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

inline json table_to_json(const std::vector<std::vector<cplx>>& t) {
    json a = json::array();
    for (const auto& row : t) a.push_back(vector_to_json(row));
    return a;
}

inline std::vector<std::vector<cplx>> table_from_json(const json& j, const std::string& where) {
    detail::expect(j.is_array(), where + ": expected a table");
    std::vector<std::vector<cplx>> out;
    for (std::size_t k = 0; k < j.size(); ++k) out.push_back(vector_from_json(j[k], where + "[" + std::to_string(k) + "]"));
    return out;
}

// --- signals

inline json to_json(const RPlusCoeffs& f) { return {{"basis", kLaguerreBasis}, {"coeffs", vector_to_json(f.coeffs)}}; }

inline RPlusCoeffs rplus_from_json(const json& j, const std::string& where = "signal") {
    const json& basis = detail::field(j, "basis", where);
    detail::expect(basis.is_string() && basis.get<std::string>() == kLaguerreBasis,
                   where + ": basis must be \"" + std::string(kLaguerreBasis) + "\"");
    return RPlusCoeffs(vector_from_json(detail::field(j, "coeffs", where), where + ".coeffs"));
}

inline json to_json(const ChannelSet& f) {
    json a = json::array();
    for (const auto& c : f.channels) a.push_back(to_json(c));
    return {{"channels", a}};
}

inline ChannelSet channels_from_json(const json& j) {
    const json& a = detail::field(j, "channels", "channel set");
    detail::expect(a.is_array() && !a.empty(), "channel set: \"channels\" must be a non-empty array");
    std::vector<RPlusCoeffs> ch;
    for (std::size_t k = 0; k < a.size(); ++k) ch.push_back(rplus_from_json(a[k], "channels[" + std::to_string(k) + "]"));
    const std::size_t M = ch.front().modes();
    for (const auto& c : ch) detail::expect(c.modes() == M, "channel set: channels must share the mode count");
    return ChannelSet(std::move(ch));
}

// --- fields

inline json to_json(const MuxField& f) { return {{"n", f.n}, {"M", f.M}, {"coeffs", table_to_json(f.coeffs)}}; }

inline MuxField mux_from_json(const json& j) {
    MuxField f;
    f.n = detail::integer(detail::field(j, "n", "mux field"), "mux field.n");
    f.M = detail::integer(detail::field(j, "M", "mux field"), "mux field.M");
    f.coeffs = table_from_json(detail::field(j, "coeffs", "mux field"), "mux field.coeffs");
    detail::expect(f.coeffs.size() == static_cast<std::size_t>(f.n), "mux field: header n does not match the coefficient table");
    for (const auto& row : f.coeffs)
        detail::expect(row.size() == static_cast<std::size_t>(f.M), "mux field: header M does not match the coefficient table");
    return f;
}

inline json to_json(const PolyField& F) {
    return {{"order", F.declared_order()}, {"modes", F.modes()}, {"coeffs", table_to_json(F.coeffs())}};
}

inline PolyField polyfield_from_json(const json& j) {
    const int order = detail::integer(detail::field(j, "order", "field"), "field.order");
    const int modes = detail::integer(detail::field(j, "modes", "field"), "field.modes");
    auto t = table_from_json(detail::field(j, "coeffs", "field"), "field.coeffs");
    detail::expect(t.size() == static_cast<std::size_t>(order), "field: order does not match the coefficient table");
    for (const auto& row : t) detail::expect(row.size() == static_cast<std::size_t>(modes), "field: modes does not match the coefficient table");
    return PolyField::from_coeffs(std::move(t));
}

// --- geometry

inline std::string to_string(XMap m) { return m == XMap::uniform ? "uniform" : "tangent"; }

inline json to_json(const Measure& m) { return {{"kind", m.name()}, {"alpha", m.alpha}}; }

inline json to_json(const GridSpec& g) {
    return {{"X", g.X},         {"n_x", g.n_x},       {"s_min", g.s_min},           {"s_max", g.s_max},
            {"n_s", g.n_s},     {"x_map", to_string(g.x_map)}, {"x_scale", g.x_scale}};
}

/// Grid description: construction parameters, measure and node count.
inline json to_json(const HalfPlaneGrid& g) {
    json j = to_json(g.spec);
    j["measure"] = to_json(g.measure);
    j["node_count"] = g.size();
    return j;
}

/// Overrides present in j replace the corresponding fields of base.
inline GridSpec grid_spec_from_json(const json& j, GridSpec base = default_grid_spec()) {
    detail::expect(j.is_object(), "grid: expected an object");
    if (j.contains("X")) base.X = detail::number(j["X"], "grid.X");
    if (j.contains("n_x")) {
        const int v = detail::integer(j["n_x"], "grid.n_x");
        detail::expect(v >= 2, "grid.n_x: must be >= 2");
        base.n_x = static_cast<std::size_t>(v);
    }
    if (j.contains("s_min")) base.s_min = detail::number(j["s_min"], "grid.s_min");
    if (j.contains("s_max")) base.s_max = detail::number(j["s_max"], "grid.s_max");
    if (j.contains("n_s")) {
        const int v = detail::integer(j["n_s"], "grid.n_s");
        detail::expect(v >= 2, "grid.n_s: must be >= 2");
        base.n_s = static_cast<std::size_t>(v);
    }
    if (j.contains("x_scale")) base.x_scale = detail::number(j["x_scale"], "grid.x_scale");
    if (j.contains("x_map")) {
        detail::expect(j["x_map"].is_string(), "grid.x_map: expected a string");
        const auto m = j["x_map"].get<std::string>();
        detail::expect(m == "uniform" || m == "tangent", "grid.x_map: expected \"uniform\" or \"tangent\"");
        base.x_map = m == "uniform" ? XMap::uniform : XMap::tangent;
    }
    return base;
}

inline json to_json(const Lattice& l) {
    json pts = json::array();
    for (const auto& p : l.points) pts.push_back({{"m", p.m}, {"k", p.k}, {"x", p.z.x}, {"s", p.z.s}});
    return {{"a", l.a},
            {"b", l.b},
            {"m_range", json::array({l.m_range.lo, l.m_range.hi})},
            {"k_range", json::array({l.k_range.lo, l.k_range.hi})},
            {"points", pts}};
}

// --- reports

inline json to_json(const FrameReport& r) {
    return {{"a", r.a},
            {"b", r.b},
            {"n", r.n},
            {"lower_est", r.lower_est},
            {"upper_est", r.upper_est},
            {"ratio", r.ratio},
            {"density_value", r.density_value},
            {"threshold", r.threshold},
            {"condition_satisfied", r.condition_satisfied},
            {"dictionary_size", r.dictionary_size},
            {"seed", r.seed},
            {"trial_lower", r.trial_lower},
            {"trial_upper", r.trial_upper},
            {"lattice_size", r.lattice_size}};
}

inline json to_json(const ConditionReport& r) {
    return {{"value", r.value}, {"threshold", r.threshold}, {"satisfied", r.satisfied}, {"margin", r.margin}};
}

inline json to_json(const HCheckReport& r) {
    return {{"quasi_residual", r.quasi_residual},
            {"slope", r.slope},
            {"expected_slope", r.expected_slope},
            {"slope_rel_error", r.slope_rel_error}};
}

inline json to_json(const RoundTripReport& r, bool timings) {
    json j = {{"mode", r.mode == CodecMode::coefficient ? "coefficient" : "sampled"},
              {"channel_error", r.channel_error},
              {"crosstalk", r.crosstalk},
              {"gram_condition", r.diagnostics.gram_condition},
              {"gram_max_deviation", r.diagnostics.gram_max_deviation}};
    if (timings)
        j["seconds"] = {{"encode", r.encode_seconds}, {"render", r.render_seconds}, {"decode", r.decode_seconds}};
    return j;
}

inline json to_json(const VerifyReport& r) {
    json checks = json::array();
    for (const auto& c : r.checks) {
        json e = {{"name", c.name}, {"suite", c.suite}, {"tolerance", c.tolerance}, {"passed", c.passed}};
        e["measured"] = std::isfinite(c.measured) ? json(c.measured) : json(nullptr);
        if (!c.detail.empty()) e["detail"] = c.detail;
        checks.push_back(std::move(e));
    }
    return {{"passed", r.passed()},
            {"calibration",
             {{"orthogonality_constant", r.calibration.orthogonality_constant},
              {"isometry_constant", r.calibration.isometry_constant},
              {"admissibility", r.calibration.admissibility}}},
            {"checks", checks}};
}

/// Config file: {"grid": {...}, "M": int, "seed": int, "tolerances": {name: value}}.
inline VerifyConfig verify_config_from_json(const json& j, VerifyConfig base = {}) {
    detail::expect(j.is_object(), "config: expected an object");
    if (j.contains("grid")) base.grid = grid_spec_from_json(j["grid"], base.grid);
    if (j.contains("M")) {
        base.M = detail::integer(j["M"], "config.M");
        detail::expect(base.M >= 1 && base.M <= kMaxModes, "config.M: out of range");
    }
    if (j.contains("seed")) {
        detail::expect(j["seed"].is_number_unsigned(), "config.seed: expected a non-negative integer");
        base.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("tolerances")) {
        detail::expect(j["tolerances"].is_object(), "config.tolerances: expected an object");
        for (const auto& [k, v] : j["tolerances"].items()) base.tolerances[k] = detail::number(v, "config.tolerances." + k);
    }
    return base;
}

// --- text

/// Parse JSON text; syntax errors carry the byte offset.
inline json parse(std::istream& in, const std::string& name) {
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw io_error(name + ": malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what());
    }
}

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Field samples with header x,s,re,im.
inline void write_field_csv(std::ostream& out, std::span<const HalfPlanePoint> nodes, std::span<const cplx> values) {
    detail::expect(nodes.size() == values.size(), "write_field_csv: size mismatch");
    out << "x,s,re,im\n";
    for (std::size_t i = 0; i < nodes.size(); ++i)
        out << format_double(nodes[i].x) << ',' << format_double(nodes[i].s) << ',' << format_double(values[i].real())
            << ',' << format_double(values[i].imag()) << '\n';
}

struct FieldSamples {
    std::vector<HalfPlanePoint> nodes;
    std::vector<cplx> values;
};

inline FieldSamples read_field_csv(std::istream& in, const std::string& name) {
    FieldSamples out;
    std::string line;
    std::size_t lineno = 0;
    detail::expect(static_cast<bool>(std::getline(in, line)), name + ": empty file");
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    detail::expect(line == "x,s,re,im", name + ": expected header x,s,re,im");
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream row(line);
        double v[4];
        for (int c = 0; c < 4; ++c) {
            std::string cell;
            const bool ok = static_cast<bool>(std::getline(row, cell, ','));
            std::size_t used = 0;
            try {
                detail::expect(ok, "");
                v[c] = std::stod(cell, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            detail::expect(ok && used == cell.size() && used > 0,
                           name + ": line " + std::to_string(lineno) + ": expected 4 numeric columns");
        }
        detail::expect(v[1] > 0.0, name + ": line " + std::to_string(lineno) + ": s must be > 0");
        out.nodes.emplace_back(v[0], v[1]);
        out.values.emplace_back(v[2], v[3]);
    }
    return out;
}

/// Samples read from CSV must sit exactly on the nodes of the decoding grid.
inline void expect_grid_nodes(const FieldSamples& f, const HalfPlaneGrid& grid, const std::string& name) {
    detail::expect(f.nodes.size() == grid.size(), name + ": " + std::to_string(f.nodes.size()) +
                                                      " samples but the grid has " + std::to_string(grid.size()) +
                                                      " nodes (grid flags must match the rendering grid)");
    for (std::size_t i = 0; i < grid.size(); ++i)
        detail::expect(f.nodes[i] == grid.nodes[i],
                       name + ": sample " + std::to_string(i) + " is not at grid node " + polyberg::detail::describe_node(i, grid.nodes[i]));
}

/// Uniformly sampled time signal with header x,re,im.  Spacing must be uniform to 1e-9 relative.
inline TimeSignal read_time_signal_csv(std::istream& in, const std::string& name) {
    std::string line;
    detail::expect(static_cast<bool>(std::getline(in, line)), name + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    detail::expect(line == "x,re,im", name + ": expected header x,re,im");
    std::vector<double> xs;
    TimeSignal out;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream row(line);
        double v[3];
        for (int c = 0; c < 3; ++c) {
            std::string cell;
            const bool ok = static_cast<bool>(std::getline(row, cell, ','));
            std::size_t used = 0;
            try {
                detail::expect(ok, "");
                v[c] = std::stod(cell, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            detail::expect(ok && used == cell.size() && used > 0,
                           name + ": line " + std::to_string(lineno) + ": expected 3 numeric columns");
        }
        xs.push_back(v[0]);
        out.values.emplace_back(v[1], v[2]);
    }
    detail::expect(xs.size() >= 2, name + ": need at least 2 samples");
    out.x0 = xs.front();
    out.dx = (xs.back() - xs.front()) / static_cast<double>(xs.size() - 1);
    detail::expect(out.dx > 0.0, name + ": x must be increasing");
    for (std::size_t i = 0; i < xs.size(); ++i)
        detail::expect(std::abs(xs[i] - (out.x0 + out.dx * static_cast<double>(i))) <= 1e-9 * out.dx * static_cast<double>(xs.size()),
                       name + ": line " + std::to_string(i + 2) + ": samples are not uniformly spaced");
    return out;
}

inline void write_frame_scan_header(std::ostream& out) { out << "a,b,n,density_value,threshold,satisfied,lower_est,upper_est\n"; }

inline void write_frame_scan_row(std::ostream& out, const FrameReport& r) {
    out << format_double(r.a) << ',' << format_double(r.b) << ',' << r.n << ',' << format_double(r.density_value) << ','
        << format_double(r.threshold) << ',' << (r.condition_satisfied ? 1 : 0) << ','
        << format_double(r.lower_est) << ',' << format_double(r.upper_est) << '\n';
}

} // namespace io
} // namespace polyberg
