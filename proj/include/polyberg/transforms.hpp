#pragma once

// Fourier-side wavelet transforms and Bergman transforms.
//
// Signals are their Fourier transforms fhat on (0, inf), stored as coefficients
// in the Laguerre family l_m^1.  Every transform is evaluated mode by mode in
// closed form; the analytic Bergman transform of l_m^1 is
//
//     Ber l_m^1(z) = (m+1) sigma^{-2-m} (sigma-1)^m,   sigma = 1/2 - i z,
//                  = -(m+1) (z - i/2)^m / (z + i/2)^{m+2},
//
// and derivatives in z come from Taylor-jet arithmetic on that rational form.

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "polyberg/errors.hpp"
#include "polyberg/halfplane.hpp"
#include "polyberg/jet.hpp"
#include "polyberg/laguerre.hpp"

namespace polyberg {

// ---------------------------------------------------------------------------
// Data model

/// fhat = sum_m coeffs[m] * l_m^1.
struct RPlusCoeffs {
    std::vector<cplx> coeffs;

    RPlusCoeffs() = default;
    explicit RPlusCoeffs(std::vector<cplx> c) : coeffs(std::move(c)) {
        for (const cplx& v : coeffs)
            detail::require(std::isfinite(v.real()) && std::isfinite(v.imag()), "RPlusCoeffs: non-finite entry");
    }
    /// The single basis element l_m^1.
    static RPlusCoeffs mode(int m, std::size_t modes = 0) {
        detail::require(m >= 0, "RPlusCoeffs::mode: m must be >= 0");
        std::vector<cplx> c(std::max<std::size_t>(modes, static_cast<std::size_t>(m) + 1));
        c[static_cast<std::size_t>(m)] = 1.0;
        return RPlusCoeffs(std::move(c));
    }

    std::size_t modes() const { return coeffs.size(); }

    /// ||fhat||^2 in L^2(R+); ||l_m^1||^2 = m + 1.
    double norm2() const {
        double acc = 0.0;
        for (std::size_t m = 0; m < coeffs.size(); ++m) acc += std::norm(coeffs[m]) * static_cast<double>(m + 1);
        return acc;
    }

    RPlusFunction as_function() const {
        return {0.5, 0.5, [c = coeffs](double t) {
                    if (c.empty()) return cplx{};
                    const auto l = laguerre_poly_all(static_cast<int>(c.size()) - 1, 1.0, t);
                    cplx acc{};
                    for (std::size_t m = 0; m < c.size(); ++m) acc += c[m] * l[m];
                    return std::sqrt(t) * acc;
                }};
    }

    bool operator==(const RPlusCoeffs&) const = default;
};

/// <f, g> in L^2(R+), exact from coefficients.
inline cplx inner_coeffs(const RPlusCoeffs& f, const RPlusCoeffs& g) {
    cplx acc{};
    const std::size_t n = std::min(f.modes(), g.modes());
    for (std::size_t m = 0; m < n; ++m) acc += f.coeffs[m] * std::conj(g.coeffs[m]) * static_cast<double>(m + 1);
    return acc;
}

/// n channels sharing one mode cutoff M.
struct ChannelSet {
    std::vector<RPlusCoeffs> channels;

    ChannelSet() = default;
    explicit ChannelSet(std::vector<RPlusCoeffs> ch) : channels(std::move(ch)) {
        detail::require(!channels.empty(), "ChannelSet: need at least one channel");
        const std::size_t M = channels.front().modes();
        for (const auto& c : channels) detail::require(c.modes() == M, "ChannelSet: channels must share the mode cutoff");
    }

    std::size_t size() const { return channels.size(); }
    std::size_t modes() const { return channels.empty() ? 0 : channels.front().modes(); }
    double norm2() const {
        double acc = 0.0;
        for (const auto& c : channels) acc += c.norm2();
        return acc;
    }
    bool operator==(const ChannelSet&) const = default;
};

enum class ProfileKind { phi, psi };

/// Fourier-side analysing wavelet: phi(n): t^{1/2} l_n^0(2t);  psi(alpha): t^alpha e^{-t}.
struct AnalyzerProfile {
    ProfileKind kind = ProfileKind::phi;
    int n = 0;
    double alpha = 0.0;

    static AnalyzerProfile phi(int n) {
        detail::require(n >= 0, "phi profile: n must be >= 0");
        return {ProfileKind::phi, n, 0.0};
    }
    static AnalyzerProfile psi(double alpha) {
        detail::require(alpha > -0.5, "psi profile: alpha must be > -1/2");
        return {ProfileKind::psi, 0, alpha};
    }

    double operator()(double t) const {
        if (t <= 0.0) return 0.0;
        if (kind == ProfileKind::phi) return std::sqrt(t) * laguerre_fn(n, 0.0, 2.0 * t);
        return std::pow(t, alpha) * std::exp(-t);
    }

    RPlusFunction as_function() const {
        if (kind == ProfileKind::phi)
            return {1.0, 0.5, [n = n](double t) { return cplx(std::sqrt(t) * laguerre_poly(n, 0.0, 2.0 * t)); }};
        return {1.0, alpha, [a = alpha](double t) { return cplx(std::pow(t, a)); }};
    }

    std::string label() const {
        return kind == ProfileKind::phi ? "phi(" + std::to_string(n) + ")" : "psi(" + std::to_string(alpha) + ")";
    }
};

/// The analysing vector (phi(0), ..., phi(n-1)).
inline std::vector<AnalyzerProfile> phi_vector(int n) {
    std::vector<AnalyzerProfile> v;
    for (int k = 0; k < n; ++k) v.push_back(AnalyzerProfile::phi(k));
    return v;
}

// ---------------------------------------------------------------------------
// Admissibility

/// int_0^inf g1(t) g2(t) t^{-1} dt.
inline double cross_admissibility(const AnalyzerProfile& g1, const AnalyzerProfile& g2) {
    return inner_rplus(g1.as_function(), g2.as_function(), -1.0).real();
}

/// K = int_0^inf g(t)^2 t^{-1} dt.
inline double admissibility(const AnalyzerProfile& g) { return cross_admissibility(g, g); }

// ---------------------------------------------------------------------------
// Analytic Bergman transform

namespace detail {

template <class T>
inline const std::complex<T> kHalfI{T(0), T(0.5)};

/// Jet of Ber fhat at z + eps, through order `order`.
template <class T>
Jet<T> ber_jet(std::span<const cplx> coeffs, std::complex<T> z, int order) {
    const auto zeta = Jet<T>::variable(order, z);
    const Jet<T> q = (zeta + kHalfI<T>).reciprocal();
    const Jet<T> u = (zeta - kHalfI<T>) * q;
    const Jet<T> base = -(q * q);
    Jet<T> acc(order);
    Jet<T> um = Jet<T>::constant(order, std::complex<T>(1));
    for (std::size_t m = 0; m < coeffs.size(); ++m) {
        if (coeffs[m] != cplx{})
            acc += (base * um) * (std::complex<T>(coeffs[m]) * T(m + 1));
        if (m + 1 < coeffs.size()) um = um * u;
    }
    return acc;
}

/// The multiplier s^n as a jet in z with z-bar held fixed: d s / dz = 1/(2i).
template <class T>
Jet<T> s_power_jet(T s, int n) {
    const std::complex<T> slope = std::complex<T>(1) / std::complex<T>(0, 2);
    return pow(Jet<T>::variable(n, std::complex<T>(s), slope), n);
}

} // namespace detail

/// k-th z-derivative of Ber l_m^1 at z.
inline cplx ber_mode(int m, const HalfPlanePoint& z, int k = 0) {
    detail::require(m >= 0 && k >= 0, "ber_mode: m and k must be >= 0");
    const cplx one = 1.0;
    std::vector<cplx> c(static_cast<std::size_t>(m) + 1);
    c.back() = one;
    const auto jet = detail::ber_jet<double>(c, z.z(), k);
    return jet[k] * factorial(k);
}

/// int_0^inf t^{alpha-1/2} fhat(t) e^{izt} dt by the terminating Gamma series of each
/// Laguerre mode.  Loses accuracy to cancellation for large mode indices.
inline cplx ber_alpha_series(const RPlusCoeffs& f, double alpha, const HalfPlanePoint& z) {
    detail::require(alpha >= 0.5, "ber_alpha: alpha must be >= 1/2");
    const cplx sigma = cplx(0.5, 0.0) - cplx(0.0, 1.0) * z.z();
    const cplx log_sigma = std::log(sigma);
    cplx total{};
    for (std::size_t m = 0; m < f.modes(); ++m) {
        if (f.coeffs[m] == cplx{}) continue;
        const int mi = static_cast<int>(m);
        cplx acc{};
        for (int j = 0; j <= mi; ++j) {
            // (-1)^j binom(m+1, m-j) / j! * Gamma(alpha+j+1) * sigma^{-(alpha+j+1)}
            const double lg = std::lgamma(mi + 2.0) - std::lgamma(mi - j + 1.0) - std::lgamma(j + 2.0) -
                              std::lgamma(j + 1.0) + std::lgamma(alpha + j + 1.0);
            const double sign = (j % 2) ? -1.0 : 1.0;
            acc += sign * std::exp(cplx(lg, 0.0) - (alpha + j + 1.0) * log_sigma);
        }
        total += f.coeffs[m] * acc;
    }
    return total;
}

/// Ber_alpha fhat(z) = int_0^inf t^{alpha-1/2} fhat(t) e^{izt} dt.  Integer alpha goes
/// through the derivative identity  (d/dz)^k Ber fhat = i^k Ber_{k+1} fhat.
inline cplx ber_alpha(const RPlusCoeffs& f, double alpha, const HalfPlanePoint& z) {
    detail::require(alpha >= 0.5 && std::isfinite(alpha), "ber_alpha: alpha must be >= 1/2");
    if (alpha == std::floor(alpha) && alpha <= kMaxJetOrder + 1) {
        const int k = static_cast<int>(alpha) - 1;
        const auto jet = detail::ber_jet<double>(f.coeffs, z.z(), k);
        return jet[k] * factorial(k) / ipow(cplx(0, 1), k);
    }
    return ber_alpha_series(f, alpha, z);
}

inline cplx ber(const RPlusCoeffs& f, const HalfPlanePoint& z) { return ber_alpha(f, 1.0, z); }

// ---------------------------------------------------------------------------
// True polyanalytic Bergman transform

/// unitary: (2i)^n/n! (d/dz)^n [s^n Ber fhat]  (isometric onto its range with the
///          same constant pi for every n, and W_{phi(n)} = s * true_ber exactly);
/// printed: 1/((2i)^n n!) (d/dz)^n [s^n Ber fhat]  = (-4)^{-n} times the unitary form.
enum class Normalization { unitary, printed };

inline cplx normalization_factor(int n, Normalization norm) {
    return norm == Normalization::unitary ? ipow(cplx(0, 2), n) : ipow(cplx(0, 2), -n);
}

namespace detail {

template <class T>
std::complex<T> true_ber_t(std::span<const cplx> coeffs, int n, std::complex<T> z, Normalization norm) {
    const auto F = ber_jet<T>(coeffs, z, n);
    const auto S = s_power_jet<T>(z.imag(), n);
    return Jet<T>::product_coefficient(S, F, n) * std::complex<T>(normalization_factor(n, norm));
}

/// true_ber of every single mode l_m^1, m < out.size(), in one pass.
template <class T>
void true_ber_modes_t(int n, std::complex<T> z, std::span<std::complex<T>> out, Normalization norm) {
    const auto zeta = Jet<T>::variable(n, z);
    const Jet<T> q = (zeta + kHalfI<T>).reciprocal();
    const Jet<T> u = (zeta - kHalfI<T>) * q;
    Jet<T> term = -(q * q); // Ber l_m^1 / (m+1) for m = 0
    const auto S = s_power_jet<T>(z.imag(), n);
    const std::complex<T> scale(normalization_factor(n, norm));
    for (std::size_t m = 0; m < out.size(); ++m) {
        out[m] = Jet<T>::product_coefficient(S, term, n) * scale * T(m + 1);
        if (m + 1 < out.size()) term = term * u;
    }
}

} // namespace detail

inline cplx true_ber(const RPlusCoeffs& f, int n, const HalfPlanePoint& z,
                     Normalization norm = Normalization::unitary) {
    detail::require(n >= 0 && n <= kMaxJetOrder, "true_ber: order out of range");
    return detail::true_ber_t<double>(f.coeffs, n, z.z(), norm);
}

enum class OracleMethod { orders, wavelet };

/// Constant c with true_ber(f, n, z, norm) = c * true_ber_oracle(f, n, z, method).
inline cplx oracle_method_constant(OracleMethod, int n, Normalization norm) {
    return norm == Normalization::unitary ? cplx(1) : 1.0 / ipow(cplx(-4, 0), n);
}

// ---------------------------------------------------------------------------
// Continuous wavelet transform, Fourier side

/// W_g f(x, s) = int_0^inf fhat(t) e^{ixt} s^{1/2} g(st) dt, closed form per mode.
/// For phi(n) this is s * int t e^{-sigma t} L_m^1(t) L_n^0(2 s t) dt, expanded as a
/// polynomial product against int t^{j+1} e^{-sigma t} dt = (j+1)! sigma^{-j-2}.
inline cplx cwt(const RPlusCoeffs& f, const AnalyzerProfile& g, double x, double s) {
    detail::require(s > 0.0 && std::isfinite(s) && std::isfinite(x), "cwt: need finite x and s > 0");
    const HalfPlanePoint z(x, s);
    if (g.kind == ProfileKind::psi)
        return std::pow(s, g.alpha + 0.5) * ber_alpha_series(f, g.alpha + 0.5, z);

    const cplx inv_sigma = 1.0 / (cplx(0.5, 0.0) - cplx(0.0, 1.0) * z.z());
    std::vector<double> window(static_cast<std::size_t>(g.n) + 1);
    for (int k = 0; k <= g.n; ++k)
        window[k] = binomial(g.n, k) * std::pow(-2.0 * s, k) / factorial(k);
    cplx total{};
    for (std::size_t m = 0; m < f.modes(); ++m) {
        if (f.coeffs[m] == cplx{}) continue;
        const auto lm = laguerre_coefficients(static_cast<int>(m), 1.0);
        std::vector<double> prod(lm.size() + window.size() - 1, 0.0);
        for (std::size_t i = 0; i < lm.size(); ++i)
            for (std::size_t k = 0; k < window.size(); ++k) prod[i + k] += lm[i] * window[k];
        cplx acc{};
        cplx pw = inv_sigma * inv_sigma;
        double fact = 1.0; // (j+1)!
        for (std::size_t j = 0; j < prod.size(); ++j) {
            fact *= static_cast<double>(j + 1);
            acc += prod[j] * fact * pw;
            pw *= inv_sigma;
        }
        total += f.coeffs[m] * acc;
    }
    return s * total;
}

inline cplx true_ber_oracle(const RPlusCoeffs& f, int n, const HalfPlanePoint& z, OracleMethod method) {
    detail::require(n >= 0, "true_ber_oracle: order must be >= 0");
    if (method == OracleMethod::wavelet) return cwt(f, AnalyzerProfile::phi(n), z.x, z.s) / z.s;
    // sum_k (-2)^k binom(n,k) / k! s^k Ber_{k+1} fhat, each Ber_{k+1} by its Gamma series.
    cplx acc{};
    for (int k = 0; k <= n; ++k)
        acc += binomial(n, k) * std::pow(-2.0 * z.s, k) / factorial(k) * ber_alpha_series(f, k + 1.0, z);
    return acc;
}

/// Vector transform: sum_k W_{g_k} f_k.
inline cplx vector_cwt(const ChannelSet& f, std::span<const AnalyzerProfile> g, double x, double s) {
    detail::require(f.size() == g.size(), "vector_cwt: channel count must equal profile count");
    cplx acc{};
    for (std::size_t k = 0; k < f.size(); ++k) acc += cwt(f.channels[k], g[k], x, s);
    return acc;
}

/// Polyanalytic Bergman transform: sum_k true_ber(f_k, k, z).
inline cplx poly_ber(const ChannelSet& f, const HalfPlanePoint& z, Normalization norm = Normalization::unitary) {
    cplx acc{};
    for (std::size_t k = 0; k < f.size(); ++k) acc += true_ber(f.channels[k], static_cast<int>(k), z, norm);
    return acc;
}

} // namespace polyberg
