#pragma once

// Multiplexing n half-line signals into one polyanalytic field and back.
//
// Channel k's coefficients c[k][m] in l_m^1 become the coefficients of e_{k,m}, so
// the field is F = sum_k true_ber(f_k, k).  Coefficient mode decodes by reading the
// table back; sampled mode decodes by projecting grid samples onto e~_{k,m}.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "polyberg/errors.hpp"
#include "polyberg/halfplane.hpp"
#include "polyberg/polyspace.hpp"
#include "polyberg/transforms.hpp"

namespace polyberg {

inline constexpr int kMaxChannels = 8;
inline constexpr int kMaxModes = 64;

struct MuxField {
    int n = 0;
    int M = 0;
    std::vector<std::vector<cplx>> coeffs; ///< c[k][m]

    PolyField as_field() const { return PolyField::from_coeffs(coeffs); }
    bool operator==(const MuxField&) const = default;
};

inline void validate(const MuxField& f) {
    detail::require(f.n >= 1 && f.M >= 1, "MuxField: need n >= 1 and M >= 1");
    detail::require(f.coeffs.size() == static_cast<std::size_t>(f.n), "MuxField: coefficient table has wrong channel count");
    for (const auto& row : f.coeffs) {
        detail::require(row.size() == static_cast<std::size_t>(f.M), "MuxField: coefficient table has wrong mode count");
        for (const cplx& v : row)
            detail::require(std::isfinite(v.real()) && std::isfinite(v.imag()), "MuxField: non-finite coefficient");
    }
}

inline MuxField encode(const ChannelSet& f) {
    detail::require(f.size() >= 1, "encode: need at least one channel");
    detail::require(f.size() <= static_cast<std::size_t>(kMaxChannels), "encode: too many channels");
    detail::require(f.modes() >= 1 && f.modes() <= static_cast<std::size_t>(kMaxModes), "encode: mode cutoff out of range");
    MuxField out;
    out.n = static_cast<int>(f.size());
    out.M = static_cast<int>(f.modes());
    for (const auto& ch : f.channels) out.coeffs.push_back(ch.coeffs);
    return out;
}

inline ChannelSet decode(const MuxField& field) {
    validate(field);
    std::vector<RPlusCoeffs> ch;
    for (const auto& row : field.coeffs) ch.emplace_back(row);
    return ChannelSet(std::move(ch));
}

/// Field values at the grid nodes, in node order.
inline std::vector<cplx> render(const MuxField& field, const HalfPlaneGrid& grid) {
    validate(field);
    std::vector<cplx> out(grid.size());
    std::vector<cplx> e(static_cast<std::size_t>(field.M));
    for (std::size_t i = 0; i < grid.size(); ++i) {
        cplx acc{};
        for (int k = 0; k < field.n; ++k) {
            detail::true_ber_modes_t<double>(k, grid.nodes[i].z(), std::span<cplx>(e), Normalization::unitary);
            for (int m = 0; m < field.M; ++m) acc += field.coeffs[k][m] * e[m];
        }
        out[i] = acc;
    }
    return out;
}

enum class DecodeMethod { projection, galerkin };

struct DecodeOptions {
    DecodeMethod method = DecodeMethod::projection;
    /// Largest accepted condition number of the discrete Gram matrix of {e~_{k,m}}.
    double max_condition = 1.05;
};

struct DecodeDiagnostics {
    double gram_condition = 0.0;
    double gram_max_deviation = 0.0; ///< max |G - I|
};

namespace detail {

inline void codec_dictionary(int n, int M, const HalfPlanePoint& z, std::span<cplx> out) {
    for (int k = 0; k < n; ++k)
        basis_normalized_modes_t<double>(k, z.z(), out.subspan(static_cast<std::size_t>(k * M), static_cast<std::size_t>(M)));
}

} // namespace detail

/// Sampled-mode decoder for n channels of M modes on one grid.  The discrete Gram matrix
/// of {e~_{k,m}} is computed once; a condition number above the threshold means the grid
/// cannot separate the dictionary and construction fails with accuracy_error.
class SampledDecoder {
public:
    SampledDecoder(const HalfPlaneGrid& grid, int n, int M, const DecodeOptions& opt = {})
        : grid_(&grid), n_(n), M_(M), opt_(opt) {
        detail::require(n >= 1 && n <= kMaxChannels, "decode: channel count out of range");
        detail::require(M >= 1 && M <= kMaxModes, "decode: mode cutoff out of range");
        const auto fill = [n, M](const HalfPlanePoint& p, std::span<cplx> out) { detail::codec_dictionary(n, M, p, out); };
        gram_ = gram_u(fill, size(), grid);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram_, Eigen::EigenvaluesOnly);
        const double lo = es.eigenvalues()(0), hi = es.eigenvalues()(es.eigenvalues().size() - 1);
        diag_.gram_condition = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
        diag_.gram_max_deviation = (gram_ - Eigen::MatrixXcd::Identity(gram_.rows(), gram_.cols())).cwiseAbs().maxCoeff();
        if (!(diag_.gram_condition <= opt.max_condition)) {
            std::ostringstream os;
            os << "decode: grid too coarse, Gram condition number " << diag_.gram_condition << " exceeds "
               << opt.max_condition << " (max |G - I| = " << diag_.gram_max_deviation << ")";
            throw accuracy_error(os.str());
        }
        if (opt.method == DecodeMethod::galerkin) solver_.compute(gram_.transpose());
    }

    std::size_t size() const { return static_cast<std::size_t>(n_ * M_); }
    const DecodeDiagnostics& diagnostics() const { return diag_; }
    const Eigen::MatrixXcd& gram() const { return gram_; }

    /// c[k][m] = <F, e~_{k,m}> / sqrt(pi (m+1)); Galerkin solves G^T a = <F, e~> first.
    ChannelSet operator()(std::span<const cplx> samples) const {
        detail::require(samples.size() == grid_->size(), "decode: sample count does not match the grid");
        const auto fill = [n = n_, M = M_](const HalfPlanePoint& p, std::span<cplx> out) {
            detail::codec_dictionary(n, M, p, out);
        };
        Eigen::VectorXcd coords = project_u(samples, fill, size(), *grid_);
        if (opt_.method == DecodeMethod::galerkin) coords = solver_.solve(coords).eval();
        std::vector<RPlusCoeffs> ch;
        for (int k = 0; k < n_; ++k) {
            std::vector<cplx> c(static_cast<std::size_t>(M_));
            for (int m = 0; m < M_; ++m) c[m] = coords[k * M_ + m] / std::sqrt(basis_norm2(m));
            ch.emplace_back(std::move(c));
        }
        return ChannelSet(std::move(ch));
    }

private:
    const HalfPlaneGrid* grid_;
    int n_;
    int M_;
    DecodeOptions opt_;
    Eigen::MatrixXcd gram_;
    Eigen::LDLT<Eigen::MatrixXcd> solver_;
    DecodeDiagnostics diag_;
};

inline ChannelSet decode_sampled(std::span<const cplx> samples, const HalfPlaneGrid& grid, int n, int M,
                                 const DecodeOptions& opt = {}, DecodeDiagnostics* diag = nullptr) {
    const SampledDecoder dec(grid, n, M, opt);
    if (diag) *diag = dec.diagnostics();
    return dec(samples);
}

/// Standard complex Gaussian coefficients scaled by 1/sqrt(m+1), so every mode carries
/// the same expected energy.
inline ChannelSet random_channels(int n, int M, std::uint64_t seed) {
    detail::require(n >= 1 && M >= 1, "random_channels: need n, M >= 1");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::vector<RPlusCoeffs> ch;
    for (int k = 0; k < n; ++k) {
        std::vector<cplx> c(static_cast<std::size_t>(M));
        for (int m = 0; m < M; ++m) {
            const double re = normal(rng);
            const double im = normal(rng);
            c[m] = cplx(re, im) / std::sqrt(m + 1.0);
        }
        ch.emplace_back(std::move(c));
    }
    return ChannelSet(std::move(ch));
}

/// sqrt(||a - b||^2 / ||b||^2) in L^2(R+).
inline double relative_error(const RPlusCoeffs& a, const RPlusCoeffs& b) {
    detail::require(a.modes() == b.modes(), "relative_error: mode counts differ");
    std::vector<cplx> d(a.modes());
    for (std::size_t m = 0; m < d.size(); ++m) d[m] = a.coeffs[m] - b.coeffs[m];
    const double ref = b.norm2();
    const double err = RPlusCoeffs(std::move(d)).norm2();
    return ref > 0.0 ? std::sqrt(err / ref) : std::sqrt(err);
}

enum class CodecMode { coefficient, sampled };

struct RoundTripReport {
    CodecMode mode = CodecMode::coefficient;
    std::vector<double> channel_error;           ///< relative L^2 error per channel
    std::vector<std::vector<double>> crosstalk;  ///< X[k][j]: energy in j with only k sent, over ||f_k||^2
    double encode_seconds = 0.0;
    double render_seconds = 0.0;
    double decode_seconds = 0.0;
    DecodeDiagnostics diagnostics;

    double max_error() const {
        double e = 0.0;
        for (double v : channel_error) e = std::max(e, v);
        return e;
    }
    double max_crosstalk() const {
        double e = 0.0;
        for (std::size_t k = 0; k < crosstalk.size(); ++k)
            for (std::size_t j = 0; j < crosstalk[k].size(); ++j)
                if (j != k) e = std::max(e, crosstalk[k][j]);
        return e;
    }
};

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline ChannelSet codec_pass(const ChannelSet& f, CodecMode mode, const HalfPlaneGrid& grid,
                             const SampledDecoder* dec, RoundTripReport* timing) {
    auto t0 = std::chrono::steady_clock::now();
    const MuxField field = encode(f);
    if (timing) timing->encode_seconds += seconds_since(t0);
    t0 = std::chrono::steady_clock::now();
    if (mode == CodecMode::coefficient) {
        ChannelSet out = decode(field);
        if (timing) timing->decode_seconds += seconds_since(t0);
        return out;
    }
    const auto samples = render(field, grid);
    if (timing) timing->render_seconds += seconds_since(t0);
    t0 = std::chrono::steady_clock::now();
    ChannelSet out = (*dec)(samples);
    if (timing) timing->decode_seconds += seconds_since(t0);
    return out;
}

} // namespace detail

/// Encode, decode and compare; the crosstalk matrix comes from one pass per channel
/// with every other channel zeroed.
inline RoundTripReport roundtrip(const ChannelSet& f, CodecMode mode, const HalfPlaneGrid& grid,
                                 const DecodeOptions& opt = {}) {
    RoundTripReport r;
    r.mode = mode;
    std::optional<SampledDecoder> dec;
    if (mode == CodecMode::sampled) {
        const auto t0 = std::chrono::steady_clock::now();
        dec.emplace(grid, static_cast<int>(f.size()), static_cast<int>(f.modes()), opt);
        r.decode_seconds += detail::seconds_since(t0);
        r.diagnostics = dec->diagnostics();
    }
    const SampledDecoder* dp = dec ? &*dec : nullptr;
    const ChannelSet back = detail::codec_pass(f, mode, grid, dp, &r);
    for (std::size_t k = 0; k < f.size(); ++k) r.channel_error.push_back(relative_error(back.channels[k], f.channels[k]));

    const std::size_t n = f.size(), M = f.modes();
    r.crosstalk.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t k = 0; k < n; ++k) {
        std::vector<RPlusCoeffs> solo(n, RPlusCoeffs(std::vector<cplx>(M)));
        solo[k] = f.channels[k];
        const ChannelSet out = detail::codec_pass(ChannelSet(std::move(solo)), mode, grid, dp, nullptr);
        const double ref = f.channels[k].norm2();
        for (std::size_t j = 0; j < n; ++j) r.crosstalk[k][j] = ref > 0.0 ? out.channels[j].norm2() / ref : 0.0;
    }
    return r;
}

} // namespace polyberg
