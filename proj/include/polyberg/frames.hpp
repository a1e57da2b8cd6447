#pragma once

// Sampling sums over hyperbolic lattices, finite-dictionary frame estimates, the
// density condition b ln a < 2 pi (n+1)/(alpha+1), and the quasi-periodic product h.

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "polyberg/errors.hpp"
#include "polyberg/halfplane.hpp"
#include "polyberg/polyspace.hpp"
#include "polyberg/reduce.hpp"

namespace polyberg {

// ---------------------------------------------------------------------------
// Sampling sums

namespace detail {

inline std::string describe_lattice_point(const LatticePoint& p) {
    std::ostringstream os;
    os << "non-finite sample at lattice index (m=" << p.m << ", k=" << p.k << ")";
    return os.str();
}

} // namespace detail

/// sum over the lattice of s^2 |F(z)|^2.
template <class F>
double sampling_sum(const F& f, const Lattice& lattice) {
    return pairwise_sum<double>(lattice.size(), [&](std::size_t i) {
        const LatticePoint& p = lattice.points[i];
        const cplx v = f(p.z);
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw numeric_overflow(detail::describe_lattice_point(p));
        return p.z.s * p.z.s * std::norm(v);
    });
}

// ---------------------------------------------------------------------------
// Density condition

struct ConditionReport {
    double value = 0.0;     ///< b ln a
    double threshold = 0.0; ///< 2 pi (n+1) / (alpha+1)
    bool satisfied = false; ///< value < threshold
    double margin = 0.0;    ///< threshold - value
};

inline double density_threshold(int n, double alpha) {
    detail::require(n >= 0, "density threshold: n must be >= 0");
    detail::require(alpha >= 0.0 && std::isfinite(alpha), "density threshold: alpha must be >= 0");
    return 2.0 * kPi * (n + 1) / (alpha + 1.0);
}

/// Necessary condition for Gamma(a, b) to sample the first n+1 true spaces with weight
/// s^alpha.  For the vector (superframe) case pass n = 0.
inline ConditionReport necessary_condition(double a, double b, int n, double alpha = 0.0) {
    detail::require(a > 1.0 && std::isfinite(a), "necessary_condition: a must be > 1");
    detail::require(b > 0.0 && std::isfinite(b), "necessary_condition: b must be > 0");
    ConditionReport r;
    r.value = b * std::log(a);
    r.threshold = density_threshold(n, alpha);
    r.satisfied = r.value < r.threshold;
    r.margin = r.threshold - r.value;
    return r;
}

// ---------------------------------------------------------------------------
// Frame estimates

enum class FrameVariant { true_space, superframe };

struct FrameOptions {
    int M = kDefaultCodecModes;
    int trials = 50;
    std::uint64_t seed = 0;
    FrameVariant variant = FrameVariant::true_space;
    /// Also take the extreme Rayleigh quotients of the dictionary sampling matrix.
    bool spectral = true;
    double alpha = 0.0;
};

struct FrameReport {
    double a = 0.0;
    double b = 0.0;
    int n = 0;
    double lower_est = 0.0;
    double upper_est = 0.0;
    double ratio = 0.0; ///< lower_est / upper_est
    double density_value = 0.0;
    double threshold = 0.0;
    bool condition_satisfied = false; ///< density_value < threshold
    std::size_t dictionary_size = 0;
    std::uint64_t seed = 0;
    double trial_lower = 0.0; ///< min over the random trials alone
    double trial_upper = 0.0;
    std::size_t lattice_size = 0;
};

namespace detail {

/// Dictionary: e~_{n,m}, m < M (true space), or e~_{k,m}, k < n, m < M (superframe).
inline void frame_dictionary(int n, int M, FrameVariant variant, const HalfPlanePoint& z, std::span<cplx> out) {
    if (variant == FrameVariant::true_space) {
        basis_normalized_modes_t<double>(n, z.z(), out);
        return;
    }
    for (int k = 0; k < n; ++k)
        basis_normalized_modes_t<double>(k, z.z(), out.subspan(static_cast<std::size_t>(k * M), static_cast<std::size_t>(M)));
}

/// S(i, j) = sum_z s^2 d_i(z) conj(d_j(z)).
inline Eigen::MatrixXcd sampling_matrix(int n, int M, FrameVariant variant, const Lattice& lattice) {
    const std::size_t D = variant == FrameVariant::true_space ? static_cast<std::size_t>(M)
                                                              : static_cast<std::size_t>(n * M);
    const auto Di = static_cast<Eigen::Index>(D);
    return pairwise_reduce(
        lattice.size(),
        [&](std::size_t b, std::size_t e) {
            Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(Di, Di);
            Eigen::VectorXcd v(Di);
            for (std::size_t i = b; i < e; ++i) {
                const LatticePoint& p = lattice.points[i];
                frame_dictionary(n, M, variant, p.z, std::span<cplx>(v.data(), D));
                if (!v.allFinite()) throw numeric_overflow(describe_lattice_point(p));
                acc.noalias() += (p.z.s * p.z.s) * (v * v.adjoint());
            }
            return acc;
        },
        [](Eigen::MatrixXcd l, const Eigen::MatrixXcd& r) { return Eigen::MatrixXcd(l + r); });
}

} // namespace detail

/// Random unit vector in C^D for one trial; the stream depends only on (seed, trial).
inline Eigen::VectorXcd random_unit_vector(std::size_t D, std::uint64_t seed, std::uint64_t trial) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> normal;
    Eigen::VectorXcd c(static_cast<Eigen::Index>(D));
    for (Eigen::Index i = 0; i < c.size(); ++i) {
        const double re = normal(rng);
        const double im = normal(rng);
        c[i] = cplx(re, im);
    }
    return c / c.norm();
}

/// Sampling ratios sum s^2 |F|^2 / ||F||^2 over normalized dictionary combinations F.
/// lower_est is an upper bound on the lower frame bound A and upper_est a lower bound
/// on B; neither is the spectral bound itself.  With `spectral`, the extreme eigenvalues
/// of the dictionary sampling matrix (attained by unit combinations) join the trials.
inline FrameReport frame_ratio(int n, const Lattice& lattice, const FrameOptions& opt = {}) {
    detail::require(lattice.size() > 0, "frame_ratio: empty lattice");
    detail::require(opt.trials >= 1, "frame_ratio: trials must be >= 1");
    detail::require(opt.M >= 1, "frame_ratio: M must be >= 1");
    detail::require(n >= (opt.variant == FrameVariant::superframe ? 1 : 0), "frame_ratio: invalid order");

    const Eigen::MatrixXcd S = detail::sampling_matrix(n, opt.M, opt.variant, lattice);
    const auto D = static_cast<std::size_t>(S.rows());

    FrameReport r;
    r.a = lattice.a;
    r.b = lattice.b;
    r.n = n;
    r.dictionary_size = D;
    r.seed = opt.seed;
    r.lattice_size = lattice.size();
    r.trial_lower = std::numeric_limits<double>::infinity();
    r.trial_upper = 0.0;
    for (int t = 0; t < opt.trials; ++t) {
        const Eigen::VectorXcd c = random_unit_vector(D, opt.seed, static_cast<std::uint64_t>(t));
        const double q = c.dot(S * c).real();
        r.trial_lower = std::min(r.trial_lower, q);
        r.trial_upper = std::max(r.trial_upper, q);
    }
    r.lower_est = r.trial_lower;
    r.upper_est = r.trial_upper;
    if (opt.spectral) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(S, Eigen::EigenvaluesOnly);
        r.lower_est = std::min(r.lower_est, std::max(es.eigenvalues()(0), 0.0));
        r.upper_est = std::max(r.upper_est, es.eigenvalues()(es.eigenvalues().size() - 1));
    }
    r.ratio = r.upper_est > 0.0 ? r.lower_est / r.upper_est : 0.0;
    const int cond_n = opt.variant == FrameVariant::superframe ? 0 : n;
    r.density_value = lattice.b * std::log(lattice.a);
    r.threshold = density_threshold(cond_n, opt.alpha);
    r.condition_satisfied = r.density_value < r.threshold;
    return r;
}

/// Default scan lattice: levels with a^m in [2^-6, 2^6] and |x| <= x_max at each level.
inline constexpr double kScanXMax = 90.0;
inline constexpr std::size_t kMaxLatticePoints = 5'000'000;

inline Lattice scan_lattice(double a, double b, double x_max = kScanXMax) {
    detail::require(a > 1.0 && std::isfinite(a), "scan_lattice: a must be > 1");
    detail::require(b > 0.0 && std::isfinite(b), "scan_lattice: b must be > 0");
    const double la = std::log(a);
    const int lo = static_cast<int>(std::ceil(-6.0 * std::log(2.0) / la - 1e-12));
    const int hi = static_cast<int>(std::floor(6.0 * std::log(2.0) / la + 1e-12));
    double count = 0.0;
    for (int m = lo; m <= hi; ++m) count += 2.0 * std::floor(x_max / (std::pow(a, m) * b)) + 1.0;
    if (count > static_cast<double>(kMaxLatticePoints))
        throw invalid_argument("scan_lattice: lattice too dense for the scan window");
    return make_lattice_window(a, b, {lo, hi}, x_max);
}

// ---------------------------------------------------------------------------
// The product h(z)

namespace detail {

inline constexpr double kSinAsymptotic = 30.0;
inline constexpr double kPoleTolerance = 1e-14;

/// log(1 - e^{2 pi i y}); small when Im y is large and positive.
inline cplx log1m_expi(cplx y) {
    const double re = y.real() - std::nearbyint(y.real());
    return std::log(1.0 - std::exp(cplx(0.0, 2.0 * kPi) * cplx(re, y.imag())));
}

/// log sin(pi y) modulo 2 pi i, with the real part of y reduced by the nearest integer
/// so that integer points give an exact zero (real part -inf).
inline cplx log_sinpi(cplx y) {
    const cplx I(0.0, 1.0);
    const double n = std::nearbyint(y.real());
    const double parity = std::fmod(std::abs(n), 2.0) == 1.0 ? kPi : 0.0;
    const cplx yr(y.real() - n, y.imag());
    cplx out;
    if (yr.imag() > kSinAsymptotic) // sin w = (i/2) e^{-iw} (1 - e^{2iw})
        out = -I * kPi * yr + std::log(0.5 * I) + log1m_expi(yr);
    else if (yr.imag() < -kSinAsymptotic) // sin w = (-i/2) e^{iw} (1 - e^{-2iw})
        out = I * kPi * yr + std::log(-0.5 * I) + log1m_expi(std::conj(yr));
    else if (yr == cplx{})
        return {-std::numeric_limits<double>::infinity(), 0.0};
    else
        out = std::log(std::sin(kPi * yr));
    return out + I * parity;
}

/// log( sin(pi y1) / sin(pi y2) ) with d = y1 - y2 supplied exactly by the caller, so
/// that the large linear terms of the asymptotic forms cancel analytically.
inline cplx log_sin_ratio(cplx y1, cplx y2, cplx d) {
    const cplx I(0.0, 1.0);
    if (y1.imag() > kSinAsymptotic && y2.imag() > kSinAsymptotic)
        return -I * kPi * d + log1m_expi(y1) - log1m_expi(y2);
    if (y1.imag() < -kSinAsymptotic && y2.imag() < -kSinAsymptotic)
        return I * kPi * d + log1m_expi(std::conj(y1)) - log1m_expi(std::conj(y2));
    const cplx lden = log_sinpi(y2);
    if (lden.real() < std::log(kPoleTolerance)) throw pole_proximity("h: denominator factor vanishes");
    return log_sinpi(y1) - lden;
}

} // namespace detail

struct HParams {
    double a = 2.0;
    double b = 1.0;
    int trunc = 200;

    HParams() = default;
    HParams(double a_, double b_, int trunc_) : a(a_), b(b_), trunc(trunc_) {
        detail::require(a > 1.0 && std::isfinite(a), "h: a must be > 1");
        detail::require(b > 0.0 && std::isfinite(b), "h: b must be > 0");
        detail::require(trunc >= 8, "h: truncation must be >= 8");
    }
};

/// log h_K(z) (real part = log|h|); -inf real part at exact zeros.
inline cplx h_log(const HalfPlanePoint& zp, const HParams& p) {
    const cplx z = zp.z();
    const cplx I(0.0, 1.0);
    const double ib = 1.0 / p.b;
    const int K = p.trunc;
    std::vector<cplx> terms;
    terms.reserve(static_cast<std::size_t>(2 * K + 1));
    for (int k = 0; k <= K; ++k) {
        const double ak = std::pow(p.a, -k);
        const cplx y1 = ib * (I - z * ak);
        const cplx y2 = ib * (I + z * ak);
        terms.push_back(detail::log_sin_ratio(y1, y2, -2.0 * ib * z * ak));
    }
    for (int m = 1; m <= K; ++m) {
        const double am = std::pow(p.a, m);
        const double im = std::pow(p.a, -m);
        const cplx y1 = ib * (am * z - I * (am * im));
        const cplx y2 = ib * (am * z + I * (am * im));
        terms.push_back(cplx(2.0 * kPi * ib, 0.0) + detail::log_sin_ratio(y1, y2, -2.0 * I * ib));
    }
    cplx total{};
    for (const cplx& t : terms) {
        if (std::isinf(t.real()) && t.real() < 0) return {-std::numeric_limits<double>::infinity(), 0.0};
        total += t;
    }
    return total;
}

inline cplx h_eval(const HalfPlanePoint& z, const HParams& p) {
    const cplx l = h_log(z, p);
    if (std::isinf(l.real()) && l.real() < 0) return 0.0;
    if (!std::isfinite(l.real()) || !std::isfinite(l.imag()))
        throw numeric_overflow("h: non-finite log value");
    if (l.real() > std::log(std::numeric_limits<double>::max()))
        throw numeric_overflow("h: |h(z)| exceeds the double range");
    return std::exp(l);
}

struct HCheckReport {
    double quasi_residual = 0.0; ///< max |h(az) + e^{-2pi/b} h(z)| / |h(z)|
    double slope = 0.0;          ///< fitted d log|h(is)| / d log s
    double expected_slope = 0.0; ///< -2 pi / (b ln a)
    double slope_rel_error = 0.0;
};

/// Quasi-periodicity residual over the probes, and the least-squares slope of log|h(is)|
/// against log s at s = a^{j+1/2}, j = -3..2 (between the zeros at s = a^m).
inline HCheckReport h_checks(const HParams& p, std::span<const HalfPlanePoint> probes) {
    detail::require(!probes.empty(), "h_checks: need probes");
    HCheckReport r;
    const double c = std::exp(-2.0 * kPi / p.b);
    for (const auto& z : probes) {
        const cplx hz = h_eval(z, p);
        const cplx haz = h_eval(HalfPlanePoint(p.a * z.x, p.a * z.s), p);
        detail::require(std::abs(hz) > 0.0, "h_checks: probe is a zero of h");
        r.quasi_residual = std::max(r.quasi_residual, std::abs(haz + c * hz) / std::abs(hz));
    }
    std::vector<double> xs, ys;
    for (int j = -3; j <= 2; ++j) {
        const double s = std::pow(p.a, j + 0.5);
        xs.push_back(std::log(s));
        ys.push_back(h_log(HalfPlanePoint(0.0, s), p).real());
    }
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    r.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    r.expected_slope = -2.0 * kPi / (p.b * std::log(p.a));
    r.slope_rel_error = std::abs(r.slope - r.expected_slope) / std::abs(r.expected_slope);
    return r;
}

} // namespace polyberg
