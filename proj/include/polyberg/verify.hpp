#pragma once

// Self-check suite: runs the library's invariants on a configurable grid and reports
// each measured value against its tolerance, plus the measured calibration constants.

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "polyberg/frames.hpp"
#include "polyberg/halfplane.hpp"
#include "polyberg/laguerre.hpp"
#include "polyberg/multiplex.hpp"
#include "polyberg/polyspace.hpp"
#include "polyberg/transforms.hpp"

namespace polyberg {

struct CheckResult {
    std::string name;
    std::string suite;
    double measured = 0.0;
    double tolerance = 0.0;
    bool passed = false;
    std::string detail;
};

struct Calibration {
    double orthogonality_constant = 0.0; ///< C in <W_g f, W_g f>_{s^-2} = C ||f||^2 K_g, expected 2 pi
    double isometry_constant = 0.0;      ///< ||Ber f||^2 / ||f||^2, expected pi
    std::vector<double> admissibility;   ///< K_{phi(n)}, expected 1/2
};

struct VerifyConfig {
    GridSpec grid = default_grid_spec();
    int M = kDefaultCodecModes;
    std::uint64_t seed = 0;
    /// Per-check tolerance overrides by check name.
    std::map<std::string, double> tolerances;
};

struct VerifyReport {
    std::vector<CheckResult> checks;
    Calibration calibration;
    bool passed() const {
        for (const auto& c : checks)
            if (!c.passed) return false;
        return !checks.empty();
    }
};

namespace detail {

class CheckRecorder {
public:
    CheckRecorder(VerifyReport& r, const VerifyConfig& c) : report_(r), config_(c) {}

    /// measured <= tolerance passes.
    void add(const std::string& suite, const std::string& name, double measured, double tol, std::string note = {}) {
        const auto it = config_.tolerances.find(name);
        if (it != config_.tolerances.end()) tol = it->second;
        report_.checks.push_back({name, suite, measured, tol, std::isfinite(measured) && measured <= tol, std::move(note)});
    }

    /// Runs body; a thrown library error becomes a failed check.
    void guarded(const std::string& suite, const std::string& name, const std::function<void()>& body) {
        try {
            body();
        } catch (const std::exception& e) {
            report_.checks.push_back({name, suite, std::nan(""), 0.0, false, e.what()});
        }
    }

private:
    VerifyReport& report_;
    const VerifyConfig& config_;
};

inline double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

} // namespace detail

inline VerifyReport run_verify(const VerifyConfig& cfg) {
    VerifyReport report;
    detail::CheckRecorder rec(report, cfg);
    const HalfPlaneGrid grid = make_grid(cfg.grid);
    const HalfPlaneGrid affine_grid = make_grid(cfg.grid, Measure::affine());

    // Laguerre functions: Gram of l_n^0, n <= 12, by Gauss-Laguerre order 128.
    rec.guarded("laguerre", "laguerre.gram_identity", [&] {
        double worst = 0.0;
        for (int i = 0; i <= 12; ++i)
            for (int j = 0; j <= 12; ++j)
                worst = std::max(worst, std::abs(inner_rplus(laguerre_rplus(i, 0.0), laguerre_rplus(j, 0.0)).real() -
                                                 (i == j ? 1.0 : 0.0)));
        rec.add("laguerre", "laguerre.gram_identity", worst, 1e-8);
    });

    // Admissibility of phi(n).
    rec.guarded("admissibility", "admissibility.phi_cross", [&] {
        double worst = 0.0;
        for (int i = 0; i <= 4; ++i) {
            report.calibration.admissibility.push_back(admissibility(AnalyzerProfile::phi(i)));
            for (int j = 0; j <= 4; ++j)
                worst = std::max(worst, std::abs(cross_admissibility(AnalyzerProfile::phi(i), AnalyzerProfile::phi(j)) -
                                                 (i == j ? 0.5 : 0.0)));
        }
        rec.add("admissibility", "admissibility.phi_cross", worst, 1e-10);
    });

    // Isometry constants of Ber and true_ber from the quadrature Gram of the first 8 modes.
    rec.guarded("isometry", "isometry.constant", [&] {
        double worst = 0.0;
        for (int n = 0; n <= 3; ++n) {
            const auto fill = [n](const HalfPlanePoint& p, std::span<cplx> out) {
                detail::true_ber_modes_t<double>(n, p.z(), out, Normalization::unitary);
            };
            const Eigen::MatrixXcd G = gram_u(fill, 8, grid);
            const ChannelSet f = random_channels(5, 8, cfg.seed + 17u * static_cast<std::uint64_t>(n));
            for (const auto& ch : f.channels) {
                const Eigen::Map<const Eigen::VectorXcd> c(ch.coeffs.data(), 8);
                const double ratio = c.dot(G.transpose() * c).real() / ch.norm2();
                if (n == 0 && report.calibration.isometry_constant == 0.0) report.calibration.isometry_constant = ratio;
                worst = std::max(worst, detail::rel(ratio, kPi));
            }
        }
        rec.add("isometry", "isometry.constant", worst, 1e-2, "max relative deviation from pi, n <= 3");
    });

    // Orthogonality constant C = ||W_phi f||^2_{s^-2 dxds} / (||f||^2 K_phi), from the wavelet transform itself.
    rec.guarded("isometry", "isometry.orthogonality_constant", [&] {
        double worst = 0.0;
        for (int n = 0; n <= 2; ++n) {
            const RPlusCoeffs f = RPlusCoeffs::mode(1);
            const AnalyzerProfile g = AnalyzerProfile::phi(n);
            const auto W = [&](const HalfPlanePoint& p) { return cwt(f, g, p.x, p.s); };
            const double C = norm2_u(W, affine_grid) / (f.norm2() * admissibility(g));
            if (n == 0) report.calibration.orthogonality_constant = C;
            worst = std::max(worst, detail::rel(C, 2.0 * kPi));
        }
        rec.add("isometry", "isometry.orthogonality_constant", worst, 1e-2, "max relative deviation from 2 pi");
    });

    // Three forms of true_ber.
    rec.guarded("transforms", "transforms.three_forms", [&] {
        double worst = 0.0;
        const ChannelSet f = random_channels(1, 6, cfg.seed + 3);
        for (int n = 0; n <= 4; ++n)
            for (const HalfPlanePoint z : {HalfPlanePoint(0.3, 0.8), HalfPlanePoint(-1.2, 1.7), HalfPlanePoint(2.0, 0.4)}) {
                const cplx a = true_ber(f.channels[0], n, z);
                for (const auto m : {OracleMethod::orders, OracleMethod::wavelet})
                    worst = std::max(worst, std::abs(a - true_ber_oracle(f.channels[0], n, z, m)) / std::abs(a));
            }
        rec.add("transforms", "transforms.three_forms", worst, 1e-9);
    });

    // Degrees of polyanalyticity.
    rec.guarded("polyspace", "polyspace.degree_ladder", [&] {
        const auto probes = default_degree_probes();
        int wrong = 0;
        for (int n = 0; n <= 3; ++n)
            for (int m = 0; m <= 2; ++m) {
                const auto d = polyanalytic_degree(PolyField::basis(n, m), probes);
                if (!d || *d != n + 1) ++wrong;
            }
        rec.add("polyspace", "polyspace.degree_ladder", wrong, 0.0, "count of e_{n,m} with degree != n+1");
    });

    // Kernels.
    rec.guarded("polyspace", "polyspace.kernel_closed_form", [&] {
        const std::vector<HalfPlanePoint> P = {{0.0, 1.0}, {0.5, 0.7}, {-1.0, 1.5}, {1.2, 2.0}, {-0.3, 0.6}};
        double closed = 0.0, methods = 0.0;
        for (const auto& z : P)
            for (const auto& w : P) {
                const cplx ref = -1.0 / (kPi * (z.z() - std::conj(w.z())) * (z.z() - std::conj(w.z())));
                closed = std::max(closed, std::abs(kernel_true(KernelSpec(0), z, w) - ref) / std::abs(ref));
                for (int n = 0; n <= 2; ++n) {
                    const cplx a = kernel_true(KernelSpec(n), z, w);
                    const cplx b = kernel_true(KernelSpec(n, KernelMethod::rodrigues), z, w);
                    methods = std::max(methods, std::abs(a - b) / std::abs(b));
                }
            }
        rec.add("polyspace", "polyspace.kernel_closed_form", closed, 1e-6);
        rec.add("polyspace", "polyspace.kernel_methods", methods, 1e-3);
    });

    rec.guarded("polyspace", "polyspace.kernel_reproducing", [&] {
        double worst = 0.0;
        const std::vector<HalfPlanePoint> P = {{0.2, 0.9}, {-0.8, 1.4}, {1.5, 0.6}};
        for (int n = 0; n <= 2; ++n) {
            const PolyField F = PolyField::basis(n, 1);
            for (const auto& z : P) {
                const cplx ref = F(z);
                const cplx got = inner_u(F, kernel_section(KernelSpec(n, KernelMethod::rodrigues), z), grid);
                worst = std::max(worst, std::abs(got - ref) / std::abs(ref));
            }
        }
        rec.add("polyspace", "polyspace.kernel_reproducing", worst, 1e-2);
    });

    // Quadrature resolution of the codec dictionary, and the sampled codec itself.
    rec.guarded("quadrature", "quadrature.codec_gram", [&] {
        const DecodeDiagnostics d = SampledDecoder(grid, 3, cfg.M, DecodeOptions{DecodeMethod::projection, 1e300}).diagnostics();
        rec.add("quadrature", "quadrature.codec_gram", d.gram_max_deviation, 1e-3, "max |G - I| over e~_{k,m}, k < 3");
    });

    rec.guarded("quadrature", "quadrature.convergence", [&] {
        // |int |F|^2 - pi/4| for F = (z + i)^-2 must at least halve when n_x and n_s double.
        const auto F = [](const HalfPlanePoint& p) {
            const cplx q = p.z() + cplx(0.0, 1.0);
            return 1.0 / (q * q);
        };
        GridSpec g = cfg.grid;
        std::vector<double> err;
        for (int d = 0; d < 4; ++d) {
            err.push_back(std::abs(norm2_u(F, make_grid(g)) - kPi / 4.0));
            g.n_x *= 2;
            g.n_s *= 2;
        }
        // Errors at the roundoff floor count as converged.
        const double floor = 1e-12;
        double worst = 0.0;
        for (std::size_t i = 0; i + 1 < err.size(); ++i)
            if (err[i] > floor) worst = std::max(worst, err[i + 1] / err[i]);
        rec.add("quadrature", "quadrature.convergence", worst, 0.5, "largest error ratio per doubling");
        rec.add("quadrature", "quadrature.absolute", err.front() / (kPi / 4.0), 1e-3, "relative error on the configured grid");
    });

    rec.guarded("codec", "codec.sampled_roundtrip", [&] {
        const RoundTripReport r = roundtrip(random_channels(3, cfg.M, cfg.seed + 5), CodecMode::sampled, grid);
        rec.add("codec", "codec.sampled_roundtrip", r.max_error(), 1e-3);
        rec.add("codec", "codec.crosstalk", r.max_crosstalk(), 1e-3);
    });

    // h and the density condition.
    rec.guarded("frames", "frames.h_quasi_periodicity", [&] {
        const HParams hp(2.0, 1.0, 200);
        std::vector<HalfPlanePoint> probes;
        for (int i = 0; i < 20; ++i) probes.emplace_back(-2.0 + 0.21 * i + 0.05, 0.3 + 0.17 * i);
        const HCheckReport h = h_checks(hp, probes);
        rec.add("frames", "frames.h_quasi_periodicity", h.quasi_residual, 1e-6);
        rec.add("frames", "frames.h_growth_slope", h.slope_rel_error, 5e-2);
        double worst = 0.0;
        for (int m = -10; m <= 10; ++m)
            for (int k = -5; k <= 5; ++k)
                worst = std::max(worst, std::abs(h_eval(HalfPlanePoint(std::ldexp(1.0, m) * k, std::ldexp(1.0, m)), HParams(2.0, 1.0, 60))));
        rec.add("frames", "frames.h_lattice_zeros", worst, 1e-10);
    });

    rec.guarded("frames", "frames.density_flips", [&] {
        int wrong = 0;
        wrong += !necessary_condition(2.0, 9.0, 0).satisfied;
        wrong += necessary_condition(2.0, 10.0, 0).satisfied;
        wrong += !necessary_condition(2.0, 18.0, 1).satisfied;
        wrong += necessary_condition(2.0, 19.0, 1).satisfied;
        wrong += std::abs(necessary_condition(2.0, 1.0, 0, 1.0).threshold - kPi) > 1e-15;
        rec.add("frames", "frames.density_flips", wrong, 0.0);
    });

    rec.guarded("frames", "frames.trend", [&] {
        FrameOptions opt;
        opt.M = 16;
        opt.trials = 50;
        opt.seed = cfg.seed;
        const double b1 = kPi / std::log(2.0);
        const FrameReport dense = frame_ratio(0, scan_lattice(2.0, b1), opt);
        const FrameReport sparse = frame_ratio(0, scan_lattice(2.0, 4.0 * b1, 4.0 * kScanXMax), opt);
        const double degradation = dense.lower_est / sparse.lower_est;
        rec.add("frames", "frames.trend", 10.0 / degradation, 1.0, "10 / (lower_est at pi over lower_est at 4 pi)");
    });

    return report;
}

} // namespace polyberg
