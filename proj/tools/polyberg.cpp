// polyberg: batch front end for verification, the channel codec, frame scans and field sampling.
//
// Exit codes: 0 success, 1 verification failure, 2 usage or input error, 3 numeric or invariant error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "polyberg.hpp"
#include "polyberg/io.hpp"

namespace {

using namespace polyberg;
using io::json;

enum Exit { kOk = 0, kVerifyFailed = 1, kUsage = 2, kNumeric = 3 };

struct Globals {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::optional<double> grid_X, grid_smin, grid_smax;
    std::optional<int> grid_nx, grid_ns;
    std::string grid_map;
};

void add_globals(CLI::App& app, Globals& g) {
    app.add_option("--config", g.config, "JSON config: {grid, M, seed, tolerances}")->check(CLI::ExistingFile);
    app.add_option("--seed", g.seed, "RNG seed");
    app.add_option("--out", g.out, "Output path (default: stdout)");
    app.add_option("--grid.X", g.grid_X, "Grid half-width in x")->check(CLI::PositiveNumber);
    app.add_option("--grid.nx", g.grid_nx, "Grid nodes in x")->check(CLI::Range(2, 1 << 20));
    app.add_option("--grid.smin", g.grid_smin, "Smallest s")->check(CLI::PositiveNumber);
    app.add_option("--grid.smax", g.grid_smax, "Largest s")->check(CLI::PositiveNumber);
    app.add_option("--grid.ns", g.grid_ns, "Grid nodes in s")->check(CLI::Range(2, 1 << 20));
    app.add_option("--grid.map", g.grid_map, "x node map")->check(CLI::IsMember({"uniform", "tangent"}));
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error(path + ": cannot open");
    return io::parse(in, path);
}

/// Config file first, then command-line overrides.
VerifyConfig resolve_config(const Globals& g) {
    VerifyConfig c;
    if (!g.config.empty()) c = io::verify_config_from_json(read_json_file(g.config), c);
    if (g.seed) c.seed = *g.seed;
    if (g.grid_X) c.grid.X = *g.grid_X;
    if (g.grid_nx) c.grid.n_x = static_cast<std::size_t>(*g.grid_nx);
    if (g.grid_smin) c.grid.s_min = *g.grid_smin;
    if (g.grid_smax) c.grid.s_max = *g.grid_smax;
    if (g.grid_ns) c.grid.n_s = static_cast<std::size_t>(*g.grid_ns);
    if (!g.grid_map.empty()) c.grid.x_map = g.grid_map == "uniform" ? XMap::uniform : XMap::tangent;
    return c;
}

/// Writes to --out or stdout.
class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw io_error(path + ": cannot open for writing");
        }
    }
    std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

private:
    std::ofstream file_;
};

void write_json(const std::string& path, const json& j) {
    Output o(path);
    o.stream() << j.dump(2) << '\n';
}

/// "x,s" point list entry.
HalfPlanePoint parse_point(const std::string& text) {
    const auto comma = text.find(',');
    if (comma == std::string::npos) throw io_error("point \"" + text + "\": expected x,s");
    try {
        std::size_t u1 = 0, u2 = 0;
        const std::string xs = text.substr(0, comma), ss = text.substr(comma + 1);
        const double x = std::stod(xs, &u1), s = std::stod(ss, &u2);
        if (u1 != xs.size() || u2 != ss.size()) throw io_error("");
        if (!(s > 0.0)) throw io_error("point \"" + text + "\": s must be > 0");
        return {x, s};
    } catch (const io_error& e) {
        if (*e.what()) throw;
    } catch (const std::exception&) {
    }
    throw io_error("point \"" + text + "\": expected x,s");
}

/// Comma list "1,2,5" or inclusive range "lo:hi:step".
std::vector<double> parse_values(const std::string& text, const std::string& what) {
    std::vector<double> v;
    auto num = [&](const std::string& t) {
        std::size_t used = 0;
        double d = 0.0;
        try {
            d = std::stod(t, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != t.size()) throw io_error(what + ": \"" + t + "\" is not a number");
        return d;
    };
    if (text.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(text);
        for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
        if (parts.size() != 3) throw io_error(what + ": range must be lo:hi:step");
        const double lo = num(parts[0]), hi = num(parts[1]), step = num(parts[2]);
        if (!(step > 0.0)) throw io_error(what + ": step must be > 0");
        const auto count = static_cast<long>(std::floor((hi - lo) / step + 1e-9)) + 1;
        if (count > 100000) throw io_error(what + ": range too long");
        for (long i = 0; i < count; ++i) v.push_back(lo + step * static_cast<double>(i));
    } else {
        std::stringstream ss(text);
        for (std::string p; std::getline(ss, p, ',');) v.push_back(num(p));
    }
    if (v.empty()) throw io_error(what + ": empty range");
    return v;
}

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

/// Samples a field at explicit points, or at every node of the configured grid.
template <class F>
void write_samples(const std::string& out_path, const std::vector<std::string>& at, const GridSpec& spec, const F& f) {
    std::vector<HalfPlanePoint> nodes;
    if (!at.empty())
        for (const auto& a : at) nodes.push_back(parse_point(a));
    else
        nodes = make_grid(spec).nodes;
    std::vector<cplx> values(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) values[i] = f(nodes[i]);
    Output o(out_path);
    io::write_field_csv(o.stream(), nodes, values);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"polyberg: polyanalytic Bergman transforms, channel codec and frame scans"};
    app.require_subcommand(1);
    Globals g;
    add_globals(app, g);

    // verify
    auto* verify = app.add_subcommand("verify", "Run the invariant suite and print the calibration report");
    verify->fallthrough();
    int verify_M = 0;
    verify->add_option("--M", verify_M, "Codec mode cutoff")->check(CLI::Range(1, kMaxModes));

    // mux
    auto* mux = app.add_subcommand("mux", "Encode a ChannelSet JSON into a MuxField JSON");
    mux->fallthrough();
    std::string mux_in, mux_render;
    mux->add_option("input", mux_in, "ChannelSet JSON")->required();
    mux->add_option("--render", mux_render, "Also write the sampled field on the grid to this CSV");

    // demux
    auto* demux = app.add_subcommand("demux", "Decode a MuxField JSON or a sampled CSV into a ChannelSet JSON");
    demux->fallthrough();
    std::string demux_in, demux_method = "projection", demux_reference;
    std::optional<int> demux_n, demux_M;
    demux->add_option("input", demux_in, "MuxField JSON or field CSV (x,s,re,im)")->required();
    demux->add_option("--n", demux_n, "Channel count (required for CSV)")->check(CLI::Range(1, kMaxChannels));
    demux->add_option("--M", demux_M, "Mode cutoff (required for CSV)")->check(CLI::Range(1, kMaxModes));
    demux->add_option("--method", demux_method, "Sampled decoder")->check(CLI::IsMember({"projection", "galerkin"}));
    demux->add_option("--reference", demux_reference, "ChannelSet JSON to report errors against");

    // frame-scan
    auto* scan = app.add_subcommand("frame-scan", "Frame-bound estimates and density condition over (a, b)");
    scan->fallthrough();
    std::string scan_a = "2", scan_b;
    int scan_n = 0, scan_M = 16, scan_trials = 50;
    double scan_alpha = 0.0;
    std::string scan_variant = "true";
    bool scan_json = false;
    scan->add_option("--a", scan_a, "Dilation values: list or lo:hi:step");
    scan->add_option("--b", scan_b, "Translation values: list or lo:hi:step")->required();
    scan->add_option("--n", scan_n, "True-space index")->check(CLI::Range(0, kMaxChannels - 1));
    scan->add_option("--alpha", scan_alpha, "Weight exponent")->check(CLI::NonNegativeNumber);
    scan->add_option("--M", scan_M, "Dictionary modes")->check(CLI::Range(1, kMaxModes));
    scan->add_option("--trials", scan_trials, "Random trials")->check(CLI::Range(1, 100000));
    scan->add_option("--variant", scan_variant, "true: single true space, super: first n+1 spaces")
        ->check(CLI::IsMember({"true", "super"}));
    scan->add_flag("--json", scan_json, "Emit full JSON reports instead of CSV");

    // basis
    auto* basis = app.add_subcommand("basis", "Sample e_{n,m}");
    basis->fallthrough();
    int basis_n = 0, basis_m = 0;
    bool basis_normalized = false;
    std::vector<std::string> basis_at;
    basis->add_option("--n", basis_n, "True-space index")->required()->check(CLI::Range(0, kMaxJetOrder));
    basis->add_option("--m", basis_m, "Mode index")->required()->check(CLI::Range(0, 1000));
    basis->add_flag("--normalized", basis_normalized, "Unit-norm version");
    basis->add_option("--at", basis_at, "Sample points x,s (default: every grid node)");

    // kernel
    auto* kernel = app.add_subcommand("kernel", "Sample w -> K^n(z, w)");
    kernel->fallthrough();
    int kernel_n = 0, kernel_modes = kDefaultKernelModes;
    std::string kernel_z, kernel_method = "rodrigues";
    std::vector<std::string> kernel_at;
    kernel->add_option("--n", kernel_n, "True-space index")->required()->check(CLI::Range(0, kMaxJetOrder));
    kernel->add_option("--z", kernel_z, "Fixed point x,s")->required();
    kernel->add_option("--method", kernel_method, "Kernel form")->check(CLI::IsMember({"rodrigues", "basis-sum"}));
    kernel->add_option("--modes", kernel_modes, "Basis-sum truncation")->check(CLI::Range(8, 4096));
    kernel->add_option("--at", kernel_at, "Sample points x,s (default: every grid node)");

    // import-time-signal
    auto* import = app.add_subcommand("import-time-signal", "Fit Laguerre coefficients to a sampled time signal");
    import->fallthrough();
    std::string import_in;
    int import_M = 16;
    import->add_option("input", import_in, "CSV with header x,re,im, uniformly spaced")->required();
    import->add_option("--M", import_M, "Mode count")->check(CLI::Range(1, kMaxModes));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        const VerifyConfig cfg = resolve_config(g);

        if (*verify) {
            VerifyConfig c = cfg;
            if (verify_M) c.M = verify_M;
            const VerifyReport r = run_verify(c);
            write_json(g.out, io::to_json(r));
            for (const auto& chk : r.checks)
                if (!chk.passed) std::cerr << "FAILED " << chk.name << ": measured " << chk.measured << ", tolerance "
                                           << chk.tolerance << (chk.detail.empty() ? "" : " (" + chk.detail + ")") << '\n';
            return r.passed() ? kOk : kVerifyFailed;
        }

        if (*mux) {
            const MuxField f = encode(io::channels_from_json(read_json_file(mux_in)));
            write_json(g.out, io::to_json(f));
            if (!mux_render.empty()) {
                const HalfPlaneGrid grid = make_grid(cfg.grid);
                const auto values = render(f, grid);
                Output o(mux_render);
                io::write_field_csv(o.stream(), grid.nodes, values);
            }
            return kOk;
        }

        if (*demux) {
            ChannelSet out;
            json side;
            if (ends_with(demux_in, ".csv")) {
                if (!demux_n || !demux_M) throw io_error("demux: CSV input needs --n and --M");
                std::ifstream in(demux_in);
                if (!in) throw io_error(demux_in + ": cannot open");
                const auto samples = io::read_field_csv(in, demux_in);
                const HalfPlaneGrid grid = make_grid(cfg.grid);
                io::expect_grid_nodes(samples, grid, demux_in);
                DecodeOptions opt;
                opt.method = demux_method == "galerkin" ? DecodeMethod::galerkin : DecodeMethod::projection;
                DecodeDiagnostics diag;
                out = decode_sampled(samples.values, grid, *demux_n, *demux_M, opt, &diag);
                side["gram_condition"] = diag.gram_condition;
                side["gram_max_deviation"] = diag.gram_max_deviation;
            } else {
                const MuxField f = io::mux_from_json(read_json_file(demux_in));
                if (demux_n && *demux_n != f.n)
                    throw io_error(demux_in + ": header n = " + std::to_string(f.n) + " but --n " + std::to_string(*demux_n));
                if (demux_M && *demux_M != f.M)
                    throw io_error(demux_in + ": header M = " + std::to_string(f.M) + " but --M " + std::to_string(*demux_M));
                out = decode(f);
            }
            if (!demux_reference.empty()) {
                const ChannelSet ref = io::channels_from_json(read_json_file(demux_reference));
                if (ref.size() != out.size() || ref.modes() != out.modes())
                    throw io_error(demux_reference + ": shape does not match the decoded channels");
                std::vector<double> err;
                for (std::size_t k = 0; k < out.size(); ++k) err.push_back(relative_error(out.channels[k], ref.channels[k]));
                side["channel_error"] = err;
            }
            write_json(g.out, io::to_json(out));
            if (!side.empty()) std::cerr << side.dump() << '\n';
            return kOk;
        }

        if (*scan) {
            const auto as = parse_values(scan_a, "--a");
            const auto bs = parse_values(scan_b, "--b");
            for (double a : as)
                if (!(a > 1.0)) throw io_error("--a: values must be > 1");
            for (double b : bs)
                if (!(b > 0.0)) throw io_error("--b: values must be > 0");
            FrameOptions opt;
            opt.M = scan_M;
            opt.trials = scan_trials;
            opt.seed = cfg.seed;
            opt.alpha = scan_alpha;
            opt.variant = scan_variant == "super" ? FrameVariant::superframe : FrameVariant::true_space;
            Output o(g.out);
            json rows = json::array();
            if (!scan_json) io::write_frame_scan_header(o.stream());
            for (double a : as)
                for (double b : bs) {
                    const FrameReport r = frame_ratio(scan_n, scan_lattice(a, b), opt);
                    if (scan_json) rows.push_back(io::to_json(r));
                    else io::write_frame_scan_row(o.stream(), r);
                }
            if (scan_json) o.stream() << rows.dump(2) << '\n';
            return kOk;
        }

        if (*basis) {
            write_samples(g.out, basis_at, cfg.grid, [&](const HalfPlanePoint& p) {
                return basis_normalized ? basis_e_normalized(basis_n, basis_m, p) : basis_e(basis_n, basis_m, p);
            });
            return kOk;
        }

        if (*kernel) {
            const HalfPlanePoint z = parse_point(kernel_z);
            const KernelSpec spec(kernel_n, kernel_method == "basis-sum" ? KernelMethod::basis_sum : KernelMethod::rodrigues,
                                  kernel_modes);
            write_samples(g.out, kernel_at, cfg.grid, [&](const HalfPlanePoint& w) { return kernel_true(spec, z, w); });
            return kOk;
        }

        if (*import) {
            std::ifstream in(import_in);
            if (!in) throw io_error(import_in + ": cannot open");
            const TimeSignal sig = io::read_time_signal_csv(in, import_in);
            write_json(g.out, io::to_json(fit_time_signal(sig, import_M)));
            return kOk;
        }
    } catch (const io_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kNumeric;
    }
    return kUsage;
}
