#pragma once

// Laguerre polynomials, Laguerre functions and Gauss-Laguerre quadrature.

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "polyberg/errors.hpp"

namespace polyberg {

struct LaguerreParams {
    int n = 0;
    double alpha = 0.0;

    LaguerreParams(int degree, double order) : n(degree), alpha(order) {
        detail::require(n >= 0, "Laguerre degree must be nonnegative");
        detail::require(alpha >= 0.0, "Laguerre order parameter must be >= 0");
    }
};

/// L_n^alpha(x) by the three-term recurrence
///   (k+1) L_{k+1} = (2k+1+alpha-x) L_k - (k+alpha) L_{k-1}.
inline double laguerre_poly(int n, double alpha, double x) {
    detail::require(n >= 0, "laguerre_poly: n must be >= 0");
    detail::require(alpha > -1.0, "laguerre_poly: alpha must be > -1");
    detail::require(std::isfinite(x), "laguerre_poly: x must be finite");
    if (n == 0) return 1.0;
    double prev = 1.0;
    double cur = 1.0 + alpha - x;
    for (int k = 1; k < n; ++k) {
        const double next = ((2.0 * k + 1.0 + alpha - x) * cur - (k + alpha) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    return cur;
}

/// Values L_0^alpha(x), ..., L_{n}^alpha(x) in one pass.
inline std::vector<double> laguerre_poly_all(int n, double alpha, double x) {
    detail::require(n >= 0, "laguerre_poly_all: n must be >= 0");
    std::vector<double> out(static_cast<std::size_t>(n) + 1);
    out[0] = 1.0;
    if (n >= 1) out[1] = 1.0 + alpha - x;
    for (int k = 1; k < n; ++k)
        out[k + 1] = ((2.0 * k + 1.0 + alpha - x) * out[k] - (k + alpha) * out[k - 1]) / (k + 1.0);
    return out;
}

/// l_n^alpha(x) = 1_{x>=0} e^{-x/2} x^{alpha/2} L_n^alpha(x).  Exactly zero for x < 0.
inline double laguerre_fn(int n, double alpha, double x) {
    detail::require(std::isfinite(x), "laguerre_fn: x must be finite");
    LaguerreParams p(n, alpha);
    if (x < 0.0) return 0.0;
    const double pw = (p.alpha == 0.0) ? 1.0 : std::pow(x, 0.5 * p.alpha);
    return std::exp(-0.5 * x) * pw * laguerre_poly(p.n, p.alpha, x);
}

inline double log_gamma(double x) {
    detail::require(x > 0.0 && std::isfinite(x), "log_gamma: x must be > 0");
    return std::lgamma(x);
}

inline double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    k = std::min(k, n - k);
    double r = 1.0;
    for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;
    return std::round(r);
}

inline double factorial(int n) {
    double r = 1.0;
    for (int j = 2; j <= n; ++j) r *= j;
    return r;
}

/// Rising factorial (x)_k.
inline double pochhammer(double x, int k) {
    double r = 1.0;
    for (int j = 0; j < k; ++j) r *= x + j;
    return r;
}

/// Power-series coefficients of L_n^alpha: L_n^alpha(x) = sum_j coeff[j] x^j.
inline std::vector<double> laguerre_coefficients(int n, double alpha) {
    std::vector<double> c(static_cast<std::size_t>(n) + 1);
    // c_0 = binom(n+alpha, n); c_j = -c_{j-1} (n-j+1) / (j (alpha+j)).
    double c0 = 1.0;
    for (int j = 1; j <= n; ++j) c0 = c0 * (alpha + j) / j;
    c[0] = c0;
    for (int j = 1; j <= n; ++j) c[j] = -c[j - 1] * (n - j + 1) / (j * (alpha + j));
    // Integer alpha: integer binomial over j!, a single rounding.
    if (alpha == std::floor(alpha) && n + alpha <= 50)
        for (int j = 0; j <= n; ++j)
            c[j] = ((j % 2) ? -1.0 : 1.0) * binomial(n + static_cast<int>(alpha), n - j) / factorial(j);
    return c;
}

/// Nodes and weights for  int_0^inf e^{-t} t^alpha f(t) dt ~ sum w_i f(t_i).
struct GaussLaguerreRule {
    double alpha = 0.0;
    std::vector<double> nodes;
    std::vector<double> weights;

    std::size_t order() const { return nodes.size(); }
};

namespace detail {

inline GaussLaguerreRule build_gauss_laguerre(int order, double alpha) {
    // Golub-Welsch eigenvalues for the starting nodes, then Newton polish on L_n^alpha.
    const int n = order;
    Eigen::VectorXd diag(n), sub(std::max(n - 1, 1));
    for (int k = 0; k < n; ++k) diag[k] = 2.0 * k + alpha + 1.0;
    for (int k = 0; k + 1 < n; ++k) sub[k] = std::sqrt((k + 1.0) * (k + 1.0 + alpha));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub.head(std::max(n - 1, 0)), Eigen::EigenvaluesOnly);
    const Eigen::VectorXd& ev = solver.eigenvalues();

    GaussLaguerreRule rule;
    rule.alpha = alpha;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    // Newton polish and weights in extended precision; weights from
    //   w_i = Gamma(n+alpha+1) / (n! x_i [L_n^alpha'(x_i)]^2).
    using ld = long double;
    const auto lag = [alpha](int deg, ld x, ld& prev) {
        ld p0 = 1.0L, p1 = 1.0L + alpha - x;
        prev = p0;
        if (deg == 0) return p0;
        for (int k = 1; k < deg; ++k) {
            const ld p2 = ((2.0L * k + 1.0L + alpha - x) * p1 - (k + alpha) * p0) / (k + 1.0L);
            p0 = p1;
            p1 = p2;
        }
        prev = p0;
        return p1;
    };
    const ld log_norm = std::lgamma(static_cast<ld>(n) + alpha + 1.0L) - std::lgamma(static_cast<ld>(n) + 1.0L);
    for (int i = 0; i < n; ++i) {
        ld x = ev[i];
        ld deriv = 1.0L;
        for (int it = 0; it < 12; ++it) {
            ld lnm1 = 0.0L;
            const ld ln = lag(n, x, lnm1);
            deriv = (n * ln - (n + alpha) * lnm1) / x;
            const ld step = ln / deriv;
            x -= step;
            if (std::abs(step) <= 1e-19L * std::abs(x)) break;
        }
        ld lnm1 = 0.0L;
        const ld ln = lag(n, x, lnm1);
        deriv = (n * ln - (n + alpha) * lnm1) / x;
        const ld logw = log_norm - std::log(x) - 2.0L * std::log(std::abs(deriv));
        rule.nodes[i] = static_cast<double>(x);
        rule.weights[i] = static_cast<double>(std::exp(logw));
    }
    return rule;
}

} // namespace detail

/// Cached Gauss-Laguerre rule; exact for polynomials of degree <= 2*order-1.
inline std::shared_ptr<const GaussLaguerreRule> gauss_laguerre(int order, double alpha = 0.0) {
    detail::require(order >= 1, "gauss_laguerre: order must be >= 1");
    detail::require(alpha > -1.0, "gauss_laguerre: alpha must be > -1");
    static std::mutex mu;
    static std::map<std::pair<int, double>, std::shared_ptr<const GaussLaguerreRule>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(order, alpha);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    auto rule = std::make_shared<const GaussLaguerreRule>(detail::build_gauss_laguerre(order, alpha));
    cache.emplace(key, rule);
    return rule;
}

} // namespace polyberg
