#pragma once

// Import of a uniformly sampled time-side signal as Laguerre coefficients.  A convenience
// bridge only: the library works on the Fourier side throughout.
//
// Convention: f(x) = int_0^inf fhat(t) e^{ixt} dt, so fhat(t) = (1/2pi) int f(x) e^{-ixt} dx.
// fhat is evaluated by a direct Riemann sum at Gauss-Laguerre nodes and fitted to
// {l_m^1, m < M} by weighted least squares with the quadrature weights.

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "polyberg/errors.hpp"
#include "polyberg/laguerre.hpp"
#include "polyberg/transforms.hpp"

namespace polyberg {

struct TimeSignal {
    double x0 = 0.0;
    double dx = 1.0;
    std::vector<cplx> values;
};

/// Fourier-side value at t by the Riemann sum over the samples.
inline cplx time_signal_spectrum(const TimeSignal& f, double t) {
    cplx acc{};
    for (std::size_t k = 0; k < f.values.size(); ++k) {
        const double x = f.x0 + f.dx * static_cast<double>(k);
        acc += f.values[k] * std::polar(1.0, -x * t);
    }
    return acc * (f.dx / (2.0 * kPi));
}

/// Least-squares Laguerre fit of the spectrum.  order = 0 picks M + 8 nodes.  The
/// largest node must stay below the Nyquist frequency pi/dx.
inline RPlusCoeffs fit_time_signal(const TimeSignal& f, int M, int order = 0) {
    detail::require(M >= 1 && M <= 64, "fit_time_signal: M must be in [1, 64]");
    detail::require(f.values.size() >= 2, "fit_time_signal: need at least 2 samples");
    detail::require(std::isfinite(f.x0) && f.dx > 0.0 && std::isfinite(f.dx), "fit_time_signal: need finite x0 and dx > 0");
    if (order == 0) order = M + 8;
    detail::require(order >= M, "fit_time_signal: quadrature order must be >= M");
    const auto rule = gauss_laguerre(order);
    detail::require(rule->nodes.back() < kPi / f.dx,
                    "fit_time_signal: sampling step too coarse for the Laguerre nodes (largest node exceeds pi/dx)");
    const auto n = static_cast<Eigen::Index>(order);
    Eigen::MatrixXcd A(n, M);
    Eigen::VectorXcd y(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const double t = rule->nodes[static_cast<std::size_t>(j)];
        // Weight for plain dt: w e^t, folded into each row as its square root.
        const double sw = std::sqrt(rule->weights[static_cast<std::size_t>(j)]) * std::exp(0.5 * t);
        const auto l = laguerre_poly_all(M - 1, 1.0, t);
        const double env = std::exp(-0.5 * t) * std::sqrt(t);
        for (int m = 0; m < M; ++m) A(j, m) = sw * env * l[static_cast<std::size_t>(m)];
        y(j) = sw * time_signal_spectrum(f, t);
    }
    const Eigen::VectorXcd c = A.colPivHouseholderQr().solve(y);
    return RPlusCoeffs(std::vector<cplx>(c.data(), c.data() + c.size()));
}

} // namespace polyberg
