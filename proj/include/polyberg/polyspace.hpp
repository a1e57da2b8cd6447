#pragma once

// True polyanalytic Bergman spaces: the basis e_{n,m} = true_ber(l_m^1, n), kernels,
// projections and the Wirtinger derivative test for polyanalyticity.
//
// With the unitary normalization ||e_{n,m}||^2 = pi (m+1) in L^2(U, dxds), and
// e~_{n,m} = e_{n,m} / sqrt(pi (m+1)) is orthonormal across n and m.

#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "polyberg/errors.hpp"
#include "polyberg/halfplane.hpp"
#include "polyberg/jet.hpp"
#include "polyberg/reduce.hpp"
#include "polyberg/transforms.hpp"

namespace polyberg {

inline constexpr int kDefaultKernelModes = 64;
inline constexpr int kDefaultCodecModes = 16;
inline constexpr double kDefaultStep = 1e-3;

// ---------------------------------------------------------------------------
// Basis

inline double basis_norm2(int m) { return kPi * (m + 1); }

inline cplx basis_e(int n, int m, const HalfPlanePoint& z) {
    detail::require(n >= 0 && m >= 0, "basis_e: n and m must be >= 0");
    return true_ber(RPlusCoeffs::mode(m), n, z);
}

inline cplx basis_e_normalized(int n, int m, const HalfPlanePoint& z) {
    return basis_e(n, m, z) / std::sqrt(basis_norm2(m));
}

namespace detail {

/// e~_{n,m}(z) for m < out.size().
template <class T>
void basis_normalized_modes_t(int n, std::complex<T> z, std::span<std::complex<T>> out) {
    true_ber_modes_t<T>(n, z, out, Normalization::unitary);
    for (std::size_t m = 0; m < out.size(); ++m) out[m] /= std::sqrt(T(kPi) * T(m + 1));
}

} // namespace detail

/// Ber_{beta/2} l_n^{beta-1}(z) = Gamma(beta+n)/n! sigma^{-beta-n} (sigma-1)^n, sigma = 1/2 - iz.
inline cplx psi_beta(int n, double beta, const HalfPlanePoint& z) {
    detail::require(n >= 0, "psi_beta: n must be >= 0");
    detail::require(beta > 1.0 && std::isfinite(beta), "psi_beta: beta must be > 1");
    const cplx sigma = cplx(0.5, 0.0) - cplx(0.0, 1.0) * z.z();
    const double lg = std::lgamma(beta + n) - std::lgamma(n + 1.0);
    return std::exp(cplx(lg, 0.0) - (beta + n) * std::log(sigma)) * ipow(sigma - 1.0, n);
}

/// The closed form (2i)^{beta+1} Gamma(beta+n)/n! ((z-i)/(z+i))^n (z+i)^{-beta}.  It agrees
/// with psi_beta only after the substitution z -> 2z; psi_printed(n, beta, 2z) = 2i psi_beta(n, beta, z).
inline cplx psi_printed(int n, double beta, cplx z) {
    detail::require(n >= 0, "psi_printed: n must be >= 0");
    detail::require(beta > 1.0 && std::isfinite(beta), "psi_printed: beta must be > 1");
    detail::require(z.imag() > 0.0, "psi_printed: z must lie in the upper half-plane");
    const cplx I(0.0, 1.0);
    const double lg = std::lgamma(beta + n) - std::lgamma(n + 1.0);
    return std::exp(cplx(lg, 0.0) + (beta + 1.0) * std::log(2.0 * I) - beta * std::log(z + I)) *
           ipow((z - I) / (z + I), n);
}

// ---------------------------------------------------------------------------
// Omega_n(z) = int_0^inf t l_n^0(2t) e^{izt} dt

namespace detail {

template <class T>
Jet<T> omega_jet(int n, const Jet<T>& zeta) {
    const std::complex<T> I(T(0), T(1));
    const Jet<T> q = (zeta + I).reciprocal();
    if (n == 0) return -(q * q);
    const Jet<T> ratio = (zeta - I) * q;
    const Jet<T> num = (-zeta) + std::complex<T>(T(0), T(2 * n + 1));
    return pow(ratio, n - 1) * num * pow(q, 3);
}

} // namespace detail

inline cplx omega(int n, cplx zeta) {
    detail::require(n >= 0, "omega: n must be >= 0");
    return detail::omega_jet<double>(n, Jet<double>::variable(0, zeta)).value();
}

inline cplx omega(int n, const HalfPlanePoint& z) { return omega(n, z.z()); }

// ---------------------------------------------------------------------------
// Reproducing kernels

enum class KernelMethod { basis_sum, rodrigues };

struct KernelSpec {
    int n = 0;
    KernelMethod method = KernelMethod::basis_sum;
    int M = kDefaultKernelModes;

    KernelSpec() = default;
    KernelSpec(int n_, KernelMethod method_ = KernelMethod::basis_sum, int M_ = kDefaultKernelModes)
        : n(n_), method(method_), M(M_) {
        detail::require(n >= 0 && n <= kMaxJetOrder, "KernelSpec: n out of range");
        detail::require(method != KernelMethod::basis_sum || M >= 8, "KernelSpec: basis_sum needs M >= 8");
    }
};

/// A kernel value with the size of the last retained basis term relative to the sum.
struct KernelValue {
    cplx value;
    double tail = 0.0;
    bool truncation_warning = false;
};

inline constexpr double kKernelTailWarning = 1e-6;

namespace detail {

template <class T>
std::complex<T> kernel_rodrigues_t(int n, std::complex<T> z, std::complex<T> w) {
    // (2i)^n/(pi n!) eta^{-2} (d/dz)^n [ s^n Omega_n((z-u)/eta) ],  w = u + i eta.
    const T eta = w.imag();
    const auto zeta = Jet<T>::variable(n, (z - std::complex<T>(w.real())) / eta, std::complex<T>(T(1) / eta));
    const auto om = omega_jet<T>(n, zeta);
    const auto S = s_power_jet<T>(z.imag(), n);
    return Jet<T>::product_coefficient(S, om, n) * std::complex<T>(ipow(cplx(0, 2), n)) / (T(kPi) * eta * eta);
}

inline KernelValue kernel_basis_sum(int n, int M, const HalfPlanePoint& z, const HalfPlanePoint& w) {
    std::vector<cplx> ez(static_cast<std::size_t>(M)), ew(static_cast<std::size_t>(M));
    basis_normalized_modes_t<double>(n, z.z(), ez);
    basis_normalized_modes_t<double>(n, w.z(), ew);
    const cplx v = pairwise_sum<cplx>(ez.size(), [&](std::size_t m) { return ez[m] * std::conj(ew[m]); }, 0);
    const double last = std::abs(ez.back() * std::conj(ew.back()));
    const double tail = std::abs(v) > 0.0 ? last / std::abs(v) : last;
    return {v, tail, tail > kKernelTailWarning};
}

} // namespace detail

inline KernelValue kernel_true_value(const KernelSpec& spec, const HalfPlanePoint& z, const HalfPlanePoint& w) {
    if (spec.method == KernelMethod::basis_sum) return detail::kernel_basis_sum(spec.n, spec.M, z, w);
    return {detail::kernel_rodrigues_t<double>(spec.n, z.z(), w.z()), 0.0, false};
}

/// K^n(z, w): F(z) = int F(w) K^n(z, w) dxds for F in the n-th true space.
inline cplx kernel_true(const KernelSpec& spec, const HalfPlanePoint& z, const HalfPlanePoint& w) {
    return kernel_true_value(spec, z, w).value;
}

/// Kernel of the first n true spaces together.
inline cplx kernel_poly(int n, const HalfPlanePoint& z, const HalfPlanePoint& w,
                        KernelMethod method = KernelMethod::basis_sum, int M = kDefaultKernelModes) {
    detail::require(n >= 1, "kernel_poly: n must be >= 1");
    cplx acc{};
    for (int k = 0; k < n; ++k) acc += kernel_true(KernelSpec(k, method, M), z, w);
    return acc;
}

/// Kernel of the wavelet space {s F(z)} in L^2(U, s^-2 dxds): k^n(z, w) = s eta K^n(z, w).
inline cplx kernel_wavelet(int n, const HalfPlanePoint& z, const HalfPlanePoint& w,
                           KernelMethod method = KernelMethod::basis_sum, int M = kDefaultKernelModes) {
    return z.s * w.s * kernel_true(KernelSpec(n, method, M), z, w);
}

/// w -> K^n(w, z), so that inner_u(F, kernel_section(spec, z)) = F(z).
inline std::function<cplx(const HalfPlanePoint&)> kernel_section(const KernelSpec& spec, const HalfPlanePoint& z) {
    return [spec, z](const HalfPlanePoint& w) { return kernel_true(spec, w, z); };
}

// ---------------------------------------------------------------------------
// Fields

/// Either a coefficient table F = sum_{k,m} c[k][m] e_{k,m} or an evaluable closure.
class PolyField {
public:
    using Closure = std::function<cplx(const HalfPlanePoint&)>;
    using Table = std::vector<std::vector<cplx>>;

    static PolyField from_coeffs(Table c) {
        detail::require(!c.empty(), "PolyField: need at least one channel");
        const std::size_t M = c.front().size();
        detail::require(M >= 1, "PolyField: need at least one mode");
        for (const auto& row : c) {
            detail::require(row.size() == M, "PolyField: ragged coefficient table");
            for (const cplx& v : row)
                detail::require(std::isfinite(v.real()) && std::isfinite(v.imag()), "PolyField: non-finite coefficient");
        }
        PolyField f;
        f.order_ = static_cast<int>(c.size());
        f.table_ = std::move(c);
        return f;
    }

    static PolyField from_closure(Closure fn, int declared_order) {
        detail::require(declared_order >= 1, "PolyField: declared order must be >= 1");
        detail::require(static_cast<bool>(fn), "PolyField: empty closure");
        PolyField f;
        f.order_ = declared_order;
        f.closure_ = std::move(fn);
        return f;
    }

    /// F = e_{n,m}.
    static PolyField basis(int n, int m) {
        Table t(static_cast<std::size_t>(n) + 1, std::vector<cplx>(static_cast<std::size_t>(m) + 1));
        t[n][m] = 1.0;
        return from_coeffs(std::move(t));
    }

    int declared_order() const { return order_; }
    bool has_coeffs() const { return !table_.empty(); }
    const Table& coeffs() const {
        detail::require(has_coeffs(), "PolyField: closure form has no coefficient table");
        return table_;
    }
    std::size_t modes() const { return has_coeffs() ? table_.front().size() : 0; }

    template <class T>
    std::complex<T> eval(std::complex<T> z) const {
        if (!has_coeffs()) {
            if constexpr (std::is_same_v<T, double>) return closure_(HalfPlanePoint::from_complex(z));
            else return std::complex<T>(closure_(HalfPlanePoint::from_complex(cplx(z))));
        }
        std::complex<T> acc{};
        for (std::size_t k = 0; k < table_.size(); ++k)
            acc += detail::true_ber_t<T>(table_[k], static_cast<int>(k), z, Normalization::unitary);
        return acc;
    }

    cplx operator()(const HalfPlanePoint& z) const { return eval<double>(z.z()); }

    /// Exact ||F||^2 in L^2(U, dxds) from the table.
    double norm2() const {
        double acc = 0.0;
        for (const auto& row : coeffs())
            for (std::size_t m = 0; m < row.size(); ++m) acc += std::norm(row[m]) * basis_norm2(static_cast<int>(m));
        return acc;
    }

private:
    int order_ = 1;
    Table table_;
    Closure closure_;
};

// ---------------------------------------------------------------------------
// Projections

/// Coordinates <F, e~_{k,m}>, m < M, by quadrature on the grid.
inline std::vector<cplx> project_true(const PolyField& F, int k, int M, const HalfPlaneGrid& grid) {
    detail::require(k >= 0 && k < F.declared_order(), "project_true: channel out of range");
    detail::require(M >= 1, "project_true: M must be >= 1");
    const auto fill = [k](const HalfPlanePoint& p, std::span<cplx> out) {
        detail::basis_normalized_modes_t<double>(k, p.z(), out);
    };
    const Eigen::VectorXcd v = project_u(F, fill, static_cast<std::size_t>(M), grid);
    return {v.data(), v.data() + v.size()};
}

/// The same coordinates read off a coefficient table: c[k][m] sqrt(pi (m+1)).
inline std::vector<cplx> project_true_exact(const PolyField& F, int k) {
    detail::require(k >= 0 && k < F.declared_order(), "project_true: channel out of range");
    const auto& row = F.coeffs()[static_cast<std::size_t>(k)];
    std::vector<cplx> out(row.size());
    for (std::size_t m = 0; m < row.size(); ++m) out[m] = row[m] * std::sqrt(basis_norm2(static_cast<int>(m)));
    return out;
}

/// F_k(z) = sum_m c_m e~_{k,m}(z) from normalized coordinates.
inline cplx true_component(std::span<const cplx> coords, int k, const HalfPlanePoint& z) {
    std::vector<cplx> e(coords.size());
    detail::basis_normalized_modes_t<double>(k, z.z(), e);
    cplx acc{};
    for (std::size_t m = 0; m < e.size(); ++m) acc += coords[m] * e[m];
    return acc;
}

/// F_k(z) = <F, K^k(., z)> by quadrature.
inline cplx true_component_kernel(const PolyField& F, int k, const HalfPlanePoint& z, const HalfPlaneGrid& grid,
                                  KernelMethod method = KernelMethod::rodrigues) {
    detail::require(k >= 0 && k < F.declared_order(), "project_true: channel out of range");
    return inner_u(F, kernel_section(KernelSpec(k, method), z), grid);
}

// ---------------------------------------------------------------------------
// Wirtinger derivatives

struct DbarEstimate {
    cplx value;
    bool ill_conditioned = false;
};

inline constexpr double kMinStableStep = 1e-6;

namespace detail {

/// Weights of the p-fold central difference: D^p f(x) = (2h)^{-p} sum_r C(p,r)(-1)^r f(x + (p-2r)h).
template <class T, class Eval>
std::complex<T> dbar_stencil(const Eval& f, T x, T s, int j, T h) {
    const int width = 2 * j + 1;
    std::vector<std::complex<T>> vals(static_cast<std::size_t>(width * width));
    std::vector<char> have(vals.size(), 0);
    const auto at = [&](int dx, int ds) -> const std::complex<T>& {
        const std::size_t idx = static_cast<std::size_t>((dx + j) * width + (ds + j));
        if (!have[idx]) {
            vals[idx] = f(std::complex<T>(x + T(dx) * h, s + T(ds) * h));
            have[idx] = 1;
        }
        return vals[idx];
    };
    // (d/dzbar)^j = 2^{-j} sum_k C(j,k) i^k Dx^{j-k} Ds^k
    std::complex<T> total{};
    for (int k = 0; k <= j; ++k) {
        const int p = j - k;
        std::complex<T> mixed{};
        for (int r = 0; r <= p; ++r) {
            for (int q = 0; q <= k; ++q) {
                const T w = T(binomial(p, r) * binomial(k, q)) * (((r + q) % 2) ? T(-1) : T(1));
                mixed += w * at(p - 2 * r, k - 2 * q);
            }
        }
        total += T(binomial(j, k)) * std::complex<T>(ipow(cplx(0, 1), k)) * mixed;
    }
    return total / (std::pow(T(2), T(j)) * std::pow(T(2) * h, T(j)));
}

} // namespace detail

/// Central-difference estimate of (d/dzbar)^j F at z on the (2j+1)^2 stencil of step h.
/// Fields callable with std::complex<long double> are sampled in extended precision.
template <class F>
DbarEstimate dbar_estimate(const F& f, const HalfPlanePoint& z, int j, double h = kDefaultStep) {
    detail::require(j >= 1, "dbar_power: j must be >= 1");
    detail::require(h > 0.0 && std::isfinite(h), "dbar_power: h must be > 0");
    detail::require(z.s - j * h > 0.0, "dbar_power: stencil leaves the upper half-plane");
    DbarEstimate out;
    out.ill_conditioned = h < kMinStableStep;
    if constexpr (std::is_invocable_r_v<std::complex<long double>, F, std::complex<long double>>) {
        using T = long double;
        out.value = cplx(detail::dbar_stencil<T>(f, T(z.x), T(z.s), j, T(h)));
    } else {
        const auto g = [&f](std::complex<double> p) -> cplx { return f(HalfPlanePoint::from_complex(p)); };
        out.value = detail::dbar_stencil<double>(g, z.x, z.s, j, h);
    }
    return out;
}

template <class F>
cplx dbar_power(const F& f, const HalfPlanePoint& z, int j, double h = kDefaultStep) {
    return dbar_estimate(f, z, j, h).value;
}

/// Extended-precision evaluator for a PolyField in coefficient form.
inline auto field_evaluator(const PolyField& F) {
    return [&F](std::complex<long double> z) { return F.eval<long double>(z); };
}

struct DegreeOptions {
    int j_max = 6;
    double h = kDefaultStep;
    double tol = 1e-4;
};

/// Smallest j <= j_max with max_probes |dbar^j F| / max_probes |F| < tol; nullopt when
/// none qualifies (not polyanalytic of order <= j_max).
template <class F>
std::optional<int> polyanalytic_degree(const F& f, std::span<const HalfPlanePoint> probes,
                                       const DegreeOptions& opt = {}) {
    detail::require(!probes.empty(), "polyanalytic_degree: need probes");
    double scale = 0.0;
    for (const auto& p : probes) {
        cplx v;
        if constexpr (std::is_invocable_v<F, std::complex<long double>>) v = cplx(f(std::complex<long double>(p.z())));
        else v = f(p);
        scale = std::max(scale, std::abs(v));
    }
    if (scale == 0.0) return 1;
    for (int j = 1; j <= opt.j_max; ++j) {
        double worst = 0.0;
        for (const auto& p : probes) worst = std::max(worst, std::abs(dbar_power(f, p, j, opt.h)));
        if (worst / scale < opt.tol) return j;
    }
    return std::nullopt;
}

inline std::optional<int> polyanalytic_degree(const PolyField& F, std::span<const HalfPlanePoint> probes,
                                              const DegreeOptions& opt = {}) {
    if (F.has_coeffs()) return polyanalytic_degree(field_evaluator(F), probes, opt);
    return polyanalytic_degree([&F](const HalfPlanePoint& p) { return F(p); }, probes, opt);
}

/// Probe set used by the degree checks.  The O(h^2) stencil error at j = 4 scales like
/// (h / distance to the poles at -i/2)^2, so the probes sit a few units up.
inline std::vector<HalfPlanePoint> default_degree_probes() {
    return {{0.0, 3.0}, {1.0, 3.5}, {-1.5, 4.0}, {2.0, 5.0}, {-0.5, 4.5}};
}

} // namespace polyberg
