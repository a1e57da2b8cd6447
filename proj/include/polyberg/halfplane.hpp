#pragma once

// Geometry and quadrature on the upper half-plane and on the positive half-line.

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <sstream>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>

#include "polyberg/errors.hpp"
#include "polyberg/laguerre.hpp"
#include "polyberg/reduce.hpp"

namespace polyberg {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

/// z = x + i s with s > 0.
struct HalfPlanePoint {
    double x = 0.0;
    double s = 1.0;

    HalfPlanePoint() = default;
    HalfPlanePoint(double x_, double s_) : x(x_), s(s_) {
        detail::require(std::isfinite(x) && std::isfinite(s) && s > 0.0,
                        "HalfPlanePoint: need finite x and s > 0");
    }
    static HalfPlanePoint from_complex(cplx z) { return {z.real(), z.imag()}; }

    cplx z() const { return {x, s}; }
    bool operator==(const HalfPlanePoint&) const = default;
};

enum class MeasureKind { plain, affine, weighted };

/// dxds, s^-2 dxds, or s^alpha dxds.
struct Measure {
    MeasureKind kind = MeasureKind::plain;
    double alpha = 0.0;

    static Measure plain() { return {MeasureKind::plain, 0.0}; }
    static Measure affine() { return {MeasureKind::affine, 0.0}; }
    static Measure weighted(double a) {
        detail::require(a > -1.0, "weighted measure needs alpha > -1");
        return {MeasureKind::weighted, a};
    }

    double density(double s) const {
        switch (kind) {
        case MeasureKind::plain: return 1.0;
        case MeasureKind::affine: return 1.0 / (s * s);
        case MeasureKind::weighted: return std::pow(s, alpha);
        }
        return 1.0;
    }

    /// Exact integral of the density over [lo, hi].
    double cell(double lo, double hi) const {
        switch (kind) {
        case MeasureKind::plain: return hi - lo;
        case MeasureKind::affine: return 1.0 / lo - 1.0 / hi;
        case MeasureKind::weighted:
            return (std::pow(hi, alpha + 1.0) - std::pow(lo, alpha + 1.0)) / (alpha + 1.0);
        }
        return hi - lo;
    }

    std::string name() const {
        switch (kind) {
        case MeasureKind::plain: return "plain";
        case MeasureKind::affine: return "affine";
        case MeasureKind::weighted: return "weighted";
        }
        return "plain";
    }
    bool operator==(const Measure&) const = default;
};

/// uniform: x nodes at the centres of equal cells on [-X, X].
/// tangent: x = (s + x_scale) tan(phi) with phi at the centres of equal cells on
///          (-pi/2, pi/2); covers the whole line, and at each level s turns the factors
///          ((z - i c)/(z + i c))^m of rational fields with poles near -i c into
///          trigonometric polynomials in phi.  X is unused.
enum class XMap { uniform, tangent };

struct GridSpec {
    double X = 60.0;
    std::size_t n_x = 256;
    double s_min = 1e-8;
    double s_max = 1e5;
    std::size_t n_s = 800;
    XMap x_map = XMap::tangent;
    double x_scale = 0.5;

    bool operator==(const GridSpec&) const = default;
};

/// Tensor grid in (x-parameter, log s).  Nodes sit at cell centres (geometric centre
/// in s); each weight is the x-cell width (times the Jacobian for the tangent map)
/// times the exact measure of the s-cell.  Ordering is x-major, then s.
struct HalfPlaneGrid {
    std::vector<HalfPlanePoint> nodes;
    std::vector<double> weights;
    Measure measure;
    GridSpec spec;

    std::size_t size() const { return nodes.size(); }
};

inline HalfPlaneGrid make_grid(const GridSpec& spec, Measure measure = Measure::plain()) {
    detail::require(spec.n_x >= 2 && spec.n_s >= 2, "make_grid: need at least 2 nodes per axis");
    detail::require(spec.s_min > 0.0 && spec.s_max > spec.s_min && std::isfinite(spec.s_max),
                    "make_grid: need 0 < s_min < s_max");
    if (spec.x_map == XMap::uniform)
        detail::require(spec.X > 0.0 && std::isfinite(spec.X), "make_grid: X must be > 0");
    else
        detail::require(spec.x_scale > 0.0 && std::isfinite(spec.x_scale), "make_grid: x_scale must be > 0");

    HalfPlaneGrid g;
    g.measure = measure;
    g.spec = spec;
    const std::size_t n_x = spec.n_x, n_s = spec.n_s;
    const double lmin = std::log(spec.s_min);
    const double dl = (std::log(spec.s_max) - lmin) / static_cast<double>(n_s);

    std::vector<double> s_node(n_s), s_weight(n_s);
    for (std::size_t j = 0; j < n_s; ++j) {
        const double lo = std::exp(lmin + dl * static_cast<double>(j));
        const double hi = (j + 1 == n_s) ? spec.s_max : std::exp(lmin + dl * static_cast<double>(j + 1));
        s_node[j] = std::exp(lmin + dl * (static_cast<double>(j) + 0.5));
        s_weight[j] = measure.cell(lo, hi);
    }
    g.nodes.reserve(n_x * n_s);
    g.weights.reserve(n_x * n_s);
    if (spec.x_map == XMap::uniform) {
        const double dx = 2.0 * spec.X / static_cast<double>(n_x);
        for (std::size_t i = 0; i < n_x; ++i) {
            const double x = -spec.X + dx * (static_cast<double>(i) + 0.5);
            for (std::size_t j = 0; j < n_s; ++j) {
                g.nodes.emplace_back(x, s_node[j]);
                g.weights.push_back(dx * s_weight[j]);
            }
        }
        return g;
    }
    const double dphi = kPi / static_cast<double>(n_x);
    for (std::size_t i = 0; i < n_x; ++i) {
        const double t = std::tan(-0.5 * kPi + dphi * (static_cast<double>(i) + 0.5));
        for (std::size_t j = 0; j < n_s; ++j) {
            const double r = s_node[j] + spec.x_scale;
            g.nodes.emplace_back(r * t, s_node[j]);
            g.weights.push_back(dphi * r * (1.0 + t * t) * s_weight[j]);
        }
    }
    return g;
}

/// Uniform-in-x grid on [-X, X] x [s_min, s_max].
inline HalfPlaneGrid make_grid(double X, std::size_t n_x, double s_min, double s_max, std::size_t n_s,
                               Measure measure = Measure::plain()) {
    return make_grid(GridSpec{X, n_x, s_min, s_max, n_s, XMap::uniform, 0.5}, measure);
}

/// Verification grid used by the invariant suites.
inline GridSpec default_grid_spec() { return GridSpec{}; }

namespace detail {

inline std::string describe_node(std::size_t i, const HalfPlanePoint& p) {
    std::ostringstream os;
    os << "non-finite sample at node " << i << " (x=" << p.x << ", s=" << p.s << ")";
    return os.str();
}

} // namespace detail

/// sum_j w_j F(z_j) conj(G(z_j)) with the deterministic tree order.
template <class F, class G>
cplx inner_u(const F& f, const G& g, const HalfPlaneGrid& grid) {
    return pairwise_sum<cplx>(grid.size(), [&](std::size_t i) {
        const HalfPlanePoint& p = grid.nodes[i];
        const cplx fv = f(p);
        const cplx gv = g(p);
        if (!std::isfinite(fv.real()) || !std::isfinite(fv.imag()) || !std::isfinite(gv.real()) ||
            !std::isfinite(gv.imag()))
            throw numeric_overflow(detail::describe_node(i, p));
        return grid.weights[i] * fv * std::conj(gv);
    });
}

template <class F>
double norm2_u(const F& f, const HalfPlaneGrid& grid) {
    return inner_u(f, f, grid).real();
}

/// Gram matrix G(i,j) = <b_i, b_j> for a family filled per node by fill(z, out),
/// out.size() == count.  One evaluation of the family per node; each reduction leaf
/// accumulates its block of nodes with a single matrix product.
template <class Fill>
Eigen::MatrixXcd gram_u(const Fill& fill, std::size_t count, const HalfPlaneGrid& grid) {
    const auto n = static_cast<Eigen::Index>(count);
    return pairwise_reduce(
        grid.size(),
        [&](std::size_t b, std::size_t e) {
            Eigen::MatrixXcd V(n, static_cast<Eigen::Index>(e - b));
            for (std::size_t i = b; i < e; ++i) {
                auto col = V.col(static_cast<Eigen::Index>(i - b));
                fill(grid.nodes[i], std::span<cplx>(col.data(), count));
                if (!col.allFinite()) throw numeric_overflow(detail::describe_node(i, grid.nodes[i]));
                col *= std::sqrt(grid.weights[i]);
            }
            Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(n, n);
            acc.noalias() += V * V.adjoint();
            return acc;
        },
        [](Eigen::MatrixXcd l, const Eigen::MatrixXcd& r) { return Eigen::MatrixXcd(l + r); });
}

/// Projections <F, b_j> for all j of a family, one pass over the grid.  F may be a
/// callable on HalfPlanePoint or a span of samples in node order.
template <class F, class Fill>
Eigen::VectorXcd project_u(const F& f, const Fill& fill, std::size_t count, const HalfPlaneGrid& grid) {
    const auto n = static_cast<Eigen::Index>(count);
    return pairwise_reduce(
        grid.size(),
        [&](std::size_t b, std::size_t e) {
            const auto len = static_cast<Eigen::Index>(e - b);
            Eigen::MatrixXcd V(n, len);
            Eigen::VectorXcd fw(len);
            for (std::size_t i = b; i < e; ++i) {
                const auto c = static_cast<Eigen::Index>(i - b);
                cplx fv;
                if constexpr (std::is_invocable_v<const F&, const HalfPlanePoint&>) fv = f(grid.nodes[i]);
                else fv = f[i];
                auto col = V.col(c);
                fill(grid.nodes[i], std::span<cplx>(col.data(), count));
                if (!std::isfinite(fv.real()) || !std::isfinite(fv.imag()) || !col.allFinite())
                    throw numeric_overflow(detail::describe_node(i, grid.nodes[i]));
                fw[c] = grid.weights[i] * fv;
            }
            Eigen::VectorXcd acc = V.conjugate() * fw;
            return acc;
        },
        [](Eigen::VectorXcd l, const Eigen::VectorXcd& r) { return Eigen::VectorXcd(l + r); });
}

// ---------------------------------------------------------------------------
// Half-line functions and quadrature

/// f(t) = e^{-decay t} smooth(t) on t > 0, smooth(t) ~ t^zero_power near 0.
struct RPlusFunction {
    double decay = 0.0;
    double zero_power = 0.0;
    std::function<cplx(double)> smooth;

    cplx operator()(double t) const { return t <= 0.0 ? cplx{} : std::exp(-decay * t) * smooth(t); }
};

inline RPlusFunction laguerre_rplus(int n, double alpha) {
    LaguerreParams p(n, alpha);
    return {0.5, 0.5 * alpha, [p](double t) {
                const double pw = p.alpha == 0.0 ? 1.0 : std::pow(t, 0.5 * p.alpha);
                return cplx(pw * laguerre_poly(p.n, p.alpha, t));
            }};
}

inline constexpr int kDefaultGaussLaguerreOrder = 128;

/// int_0^inf f(t) conj(g(t)) t^p dt by Gauss-Laguerre after rescaling t to absorb
/// the combined exponential decay.
inline cplx inner_rplus(const RPlusFunction& f, const RPlusFunction& g, double p = 0.0,
                        int order = kDefaultGaussLaguerreOrder) {
    detail::require(order >= 16, "inner_rplus: order must be >= 16");
    const double rate = f.decay + g.decay;
    detail::require(rate > 0.0, "inner_rplus: integrand does not decay exponentially");
    detail::require(f.zero_power + g.zero_power + p > -1.0, "inner_rplus: weight diverges at t = 0");
    const auto rule = gauss_laguerre(order);
    cplx acc{};
    for (std::size_t i = 0; i < rule->order(); ++i) {
        const double t = rule->nodes[i] / rate;
        acc += rule->weights[i] * f.smooth(t) * std::conj(g.smooth(t)) * std::pow(t, p);
    }
    return acc / rate;
}

// ---------------------------------------------------------------------------
// Hyperbolic geometry

struct Distances {
    double rho = 0.0; ///< pseudohyperbolic distance, in [0, 1)
    double d = 0.0;   ///< hyperbolic distance
};

inline Distances distances(const HalfPlanePoint& z1, const HalfPlanePoint& z2) {
    const cplx a = z1.z(), b = z2.z();
    const double rho = std::abs((a - b) / (a - std::conj(b)));
    return {rho, 0.5 * std::log((1.0 + rho) / (1.0 - rho))};
}

struct IndexRange {
    int lo = 0;
    int hi = 0; ///< inclusive

    std::size_t size() const { return hi < lo ? 0 : static_cast<std::size_t>(hi - lo + 1); }
    bool operator==(const IndexRange&) const = default;
};

struct LatticePoint {
    int m = 0;
    int k = 0;
    HalfPlanePoint z;
};

/// Gamma(a, b) = { a^m (b k + i) } truncated to the given index ranges,
/// enumerated in (m, k) lexicographic order.
struct Lattice {
    double a = 2.0;
    double b = 1.0;
    IndexRange m_range;
    IndexRange k_range;
    std::vector<LatticePoint> points;

    std::size_t size() const { return points.size(); }
};

inline Lattice make_lattice(double a, double b, IndexRange m_range, IndexRange k_range) {
    detail::require(a > 1.0 && std::isfinite(a), "make_lattice: a must be > 1");
    detail::require(b > 0.0 && std::isfinite(b), "make_lattice: b must be > 0");
    Lattice l{a, b, m_range, k_range, {}};
    l.points.reserve(m_range.size() * k_range.size());
    for (int m = m_range.lo; m <= m_range.hi; ++m) {
        const double am = std::pow(a, m);
        for (int k = k_range.lo; k <= k_range.hi; ++k) l.points.push_back({m, k, HalfPlanePoint(am * b * k, am)});
    }
    return l;
}

/// Lattice whose k range varies with m so that |x| <= x_max at every level.
inline Lattice make_lattice_window(double a, double b, IndexRange m_range, double x_max) {
    detail::require(a > 1.0 && std::isfinite(a), "make_lattice: a must be > 1");
    detail::require(b > 0.0 && std::isfinite(b), "make_lattice: b must be > 0");
    detail::require(x_max >= 0.0, "make_lattice_window: x_max must be >= 0");
    Lattice l{a, b, m_range, {0, -1}, {}};
    int kmax_all = 0;
    for (int m = m_range.lo; m <= m_range.hi; ++m) {
        const double am = std::pow(a, m);
        const int kmax = static_cast<int>(std::floor(x_max / (am * b)));
        kmax_all = std::max(kmax_all, kmax);
        for (int k = -kmax; k <= kmax; ++k) l.points.push_back({m, k, HalfPlanePoint(am * b * k, am)});
    }
    l.k_range = {-kmax_all, kmax_all};
    return l;
}

} // namespace polyberg
