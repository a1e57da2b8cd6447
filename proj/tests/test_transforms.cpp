#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "polyberg/multiplex.hpp"
#include "polyberg/transforms.hpp"

using namespace polyberg;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const cplx I(0.0, 1.0);

bool close(cplx a, cplx b, double rel) { return std::abs(a - b) <= rel * std::abs(b); }

RPlusCoeffs coeffs(std::initializer_list<cplx> c) { return RPlusCoeffs(std::vector<cplx>(c)); }

/// int_0^inf fhat(t) e^{ixt} s^{1/2} phi_n(st) dt by Gauss-Laguerre in the variable (s + 1/2) t,
/// with fhat and phi_n evaluated pointwise from their Laguerre definitions.
cplx wavelet_by_quadrature(const RPlusCoeffs& f, int n, double x, double s) {
    const auto rule = gauss_laguerre(160);
    const double rate = s + 0.5;
    cplx acc{};
    for (std::size_t j = 0; j < rule->order(); ++j) {
        const double t = rule->nodes[j] / rate;
        cplx fhat{};
        for (std::size_t m = 0; m < f.modes(); ++m) fhat += f.coeffs[m] * std::sqrt(t) * laguerre_poly(static_cast<int>(m), 1.0, t);
        // e^{-t/2} of fhat and e^{-st} of phi_n are carried by the rule's weight e^{-rate t}.
        const double phi = std::sqrt(s * t) * laguerre_poly(n, 0.0, 2.0 * s * t);
        acc += rule->weights[j] * fhat * std::polar(1.0, x * t) * std::sqrt(s) * phi;
    }
    return acc / rate;
}

} // namespace

TEST_CASE("admissibility reference values") {
    CHECK_THAT(admissibility(AnalyzerProfile::psi(0.5)), WithinRel(0.5, 1e-12));
    CHECK_THAT(admissibility(AnalyzerProfile::psi(1.0)), WithinRel(0.25, 1e-12));
    CHECK_THAT(admissibility(AnalyzerProfile::phi(0)), WithinRel(0.5, 1e-12));
    CHECK_THAT(cross_admissibility(AnalyzerProfile::phi(0), AnalyzerProfile::phi(1)), WithinAbs(0.0, 1e-12));
    for (int i = 0; i <= 2; ++i)
        CHECK_THAT(cross_admissibility(AnalyzerProfile::phi(i), AnalyzerProfile::phi(i)), WithinRel(0.5, 1e-12));
    CHECK_THAT(cross_admissibility(AnalyzerProfile::psi(0.5), AnalyzerProfile::psi(0.5)), WithinRel(0.5, 1e-12));
}

TEST_CASE("ber_mode reference values") {
    const HalfPlanePoint i(0.0, 1.0);
    CHECK(close(ber_mode(0, i, 0), 4.0 / 9.0, 1e-14));
    CHECK(close(ber_mode(0, i, 1), 16.0 * I / 27.0, 1e-14));
    CHECK(close(ber_mode(1, i, 0), 8.0 / 27.0, 1e-14));
}

TEST_CASE("ber_alpha reference values and linearity") {
    const HalfPlanePoint i(0.0, 1.0);
    CHECK(close(ber_alpha(coeffs({1.0}), 1.0, i), 4.0 / 9.0, 1e-14));
    CHECK(close(ber_alpha(coeffs({0.0, 1.0}), 1.0, i), 8.0 / 27.0, 1e-14));
    CHECK(close(ber_alpha(coeffs({1.0, 1.0}), 1.0, i), 20.0 / 27.0, 1e-14));
    // Integer alpha by derivatives agrees with the Gamma series.
    const RPlusCoeffs f = coeffs({0.3, cplx(-0.2, 0.7), 1.1, cplx(0.0, -0.4)});
    for (double a : {1.0, 2.0, 3.0, 4.0})
        for (const HalfPlanePoint z : {HalfPlanePoint(0.4, 0.9), HalfPlanePoint(-2.0, 0.3)})
            CHECK(close(ber_alpha(f, a, z), ber_alpha_series(f, a, z), 1e-11));
    CHECK_THROWS_AS(ber_alpha(f, 0.25, i), invalid_argument);
}

TEST_CASE("Ber against direct quadrature of its defining integral") {
    const RPlusCoeffs f = coeffs({0.5, cplx(0.1, -0.3), -0.8});
    for (const HalfPlanePoint z : {HalfPlanePoint(0.0, 1.0), HalfPlanePoint(1.3, 0.6), HalfPlanePoint(-0.7, 2.2)})
        CHECK(close(ber(f, z), wavelet_by_quadrature(f, 0, z.x, z.s) / z.s, 1e-10));
}

TEST_CASE("true_ber reference values") {
    const HalfPlanePoint i(0.0, 1.0);
    const RPlusCoeffs f = coeffs({1.0});
    CHECK(close(true_ber(f, 1, i, Normalization::printed), 5.0 / 27.0, 1e-14));
    CHECK(close(true_ber(f, 1, i, Normalization::unitary), -20.0 / 27.0, 1e-14));
    const RPlusCoeffs g = coeffs({0.3, cplx(1.0, -2.0), 0.25});
    for (const HalfPlanePoint z : {HalfPlanePoint(0.5, 0.5), HalfPlanePoint(-3.0, 2.0)})
        CHECK(close(true_ber(g, 0, z), ber_alpha(g, 1.0, z), 1e-15));
    for (int n = 0; n <= 5; ++n)
        CHECK(close(true_ber(g, n, i, Normalization::printed), true_ber(g, n, i) / std::pow(-4.0, n), 1e-14));
}

TEST_CASE("true_ber oracles after calibration") {
    const HalfPlanePoint i(0.0, 1.0);
    const RPlusCoeffs f = coeffs({1.0});
    for (auto m : {OracleMethod::orders, OracleMethod::wavelet})
        CHECK(close(oracle_method_constant(m, 1, Normalization::printed) * true_ber_oracle(f, 1, i, m), 5.0 / 27.0, 1e-12));
}

TEST_CASE("true_ber equals the phi(n) wavelet transform over s, by quadrature") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> nd;
    for (int n = 0; n <= 4; ++n) {
        std::vector<cplx> c(5);
        for (auto& v : c) v = cplx(nd(rng), nd(rng));
        const RPlusCoeffs f(c);
        for (const HalfPlanePoint z : {HalfPlanePoint(0.2, 0.7), HalfPlanePoint(-1.5, 1.8), HalfPlanePoint(0.9, 0.35)}) {
            const cplx ref = wavelet_by_quadrature(f, n, z.x, z.s) / z.s;
            CHECK(close(true_ber(f, n, z), ref, 1e-9));
            CHECK(close(cwt(f, AnalyzerProfile::phi(n), z.x, z.s), z.s * ref, 1e-9));
        }
    }
}

TEST_CASE("cwt closed forms") {
    const RPlusCoeffs f = coeffs({1.0});
    CHECK(close(cwt(f, AnalyzerProfile::phi(0), 0.0, 1.0), 4.0 / 9.0, 1e-14));
    for (double s : {0.1, 0.5, 3.0, 20.0})
        CHECK(close(cwt(f, AnalyzerProfile::phi(0), 0.0, s), s / ((0.5 + s) * (0.5 + s)), 1e-13));
    // psi(alpha): s^{alpha+1/2} int t^alpha fhat e^{izt} dt.
    const HalfPlanePoint z(0.3, 0.8);
    CHECK(close(cwt(f, AnalyzerProfile::psi(0.5), z.x, z.s), z.s * ber(f, z), 1e-13));
}

TEST_CASE("cwt isometry on the affine measure") {
    const HalfPlaneGrid g = make_grid(default_grid_spec(), Measure::affine());
    const RPlusCoeffs f = coeffs({1.0});
    const auto W = [&](const HalfPlanePoint& p) { return cwt(f, AnalyzerProfile::phi(0), p.x, p.s); };
    CHECK_THAT(norm2_u(W, g), WithinRel(kPi, 1e-2));
}

TEST_CASE("vector_cwt and poly_ber") {
    const HalfPlanePoint i(0.0, 1.0);
    const ChannelSet one({coeffs({0.2, cplx(0.0, 1.0)})});
    const std::vector<AnalyzerProfile> g0 = {AnalyzerProfile::phi(0)};
    CHECK(vector_cwt(one, g0, 0.4, 1.3) == cwt(one.channels[0], g0[0], 0.4, 1.3));
    CHECK(close(poly_ber(one, i), ber_alpha(one.channels[0], 1.0, i), 1e-15));
    const ChannelSet two({coeffs({0.0}), coeffs({1.0})});
    CHECK(close(poly_ber(two, i, Normalization::printed), 5.0 / 27.0, 1e-14));
    CHECK_THROWS_AS(vector_cwt(two, g0, 0.0, 1.0), invalid_argument);
    // W_{phi_vec} f = s * poly_ber f in the unitary normalization.
    const ChannelSet f = random_channels(3, 4, 9);
    const auto g = phi_vector(3);
    const HalfPlanePoint z(0.6, 1.1);
    CHECK(close(vector_cwt(f, g, z.x, z.s), z.s * poly_ber(f, z), 1e-12));
}

TEST_CASE("RPlusCoeffs norm") {
    CHECK(coeffs({1.0, 1.0, cplx(0.0, 2.0)}).norm2() == 1.0 + 2.0 + 12.0);
    CHECK_THROWS_AS(coeffs({cplx(NAN, 0.0)}), invalid_argument);
    CHECK_THAT(inner_coeffs(coeffs({1.0, 2.0}), coeffs({3.0, cplx(0.0, 1.0)})).real(), WithinAbs(3.0, 1e-15));
}
