#include <catch_amalgamated.hpp>

#include <cmath>
#include <numeric>
#include <vector>

#include "polyberg/laguerre.hpp"

using namespace polyberg;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

struct Rational {
    long long p = 0, q = 1;
    Rational(long long p_ = 0, long long q_ = 1) : p(p_), q(q_) {
        if (q < 0) p = -p, q = -q;
        const long long g = std::gcd(p < 0 ? -p : p, q);
        if (g > 1) p /= g, q /= g;
    }
    Rational operator+(const Rational& o) const { return {p * o.q + o.p * q, q * o.q}; }
    Rational operator-(const Rational& o) const { return {p * o.q - o.p * q, q * o.q}; }
    Rational operator*(const Rational& o) const { return {p * o.p, q * o.q}; }
    Rational operator/(long long d) const { return {p, q * d}; }
    bool operator==(const Rational& o) const { return p == o.p && q == o.q; }
    double value() const { return static_cast<double>(p) / static_cast<double>(q); }
};

using Poly = std::vector<Rational>; // coefficient of x^k at index k

Poly derivative(const Poly& a) {
    Poly d(a.size() > 1 ? a.size() - 1 : 1);
    for (std::size_t k = 1; k < a.size(); ++k) d[k - 1] = a[k] * Rational(static_cast<long long>(k));
    return d;
}

/// e^x x^{-alpha} (d/dx)^n [e^{-x} x^{alpha+n}] / n!, using d/dx [e^{-x} p] = e^{-x} (p' - p).
Poly rodrigues(int n, int alpha) {
    Poly p(static_cast<std::size_t>(alpha + n + 1));
    p.back() = 1;
    for (int i = 0; i < n; ++i) {
        Poly d = derivative(p);
        Poly next(p.size());
        for (std::size_t k = 0; k < p.size(); ++k) next[k] = (k < d.size() ? d[k] : Rational(0)) - p[k];
        p = next;
    }
    long long fact = 1;
    for (int i = 2; i <= n; ++i) fact *= i;
    Poly out;
    for (std::size_t k = static_cast<std::size_t>(alpha); k < p.size(); ++k) {
        out.push_back(p[k] / fact);
    }
    for (int k = 0; k < alpha; ++k) REQUIRE(p[static_cast<std::size_t>(k)] == Rational(0));
    return out;
}

/// sum_k (-1)^k binom(n+alpha, n-k) x^k / k!.
Poly power_series(int n, int alpha) {
    auto binom = [](long long a, long long b) {
        long long r = 1;
        for (long long i = 1; i <= b; ++i) r = r * (a - b + i) / i;
        return r;
    };
    Poly out;
    long long fact = 1;
    for (int k = 0; k <= n; ++k) {
        if (k > 0) fact *= k;
        out.push_back(Rational((k % 2 ? -1 : 1) * binom(n + alpha, n - k), fact));
    }
    return out;
}

} // namespace

TEST_CASE("laguerre_poly reference values") {
    CHECK(laguerre_poly(0, 0.0, 3.7) == 1.0);
    CHECK_THAT(laguerre_poly(1, 0.0, 2.0), WithinAbs(-1.0, 1e-15));
    CHECK_THAT(laguerre_poly(2, 0.0, 1.0), WithinAbs(-0.5, 1e-15));
}

TEST_CASE("laguerre_fn reference values") {
    CHECK(laguerre_fn(0, 0.0, 0.0) == 1.0);
    CHECK(laguerre_fn(3, 1.0, -1.0) == 0.0);
    CHECK_THAT(laguerre_fn(1, 0.0, 2.0), WithinRel(-std::exp(-1.0), 1e-14));
}

TEST_CASE("log_gamma reference values") {
    CHECK_THAT(log_gamma(1.0), WithinAbs(0.0, 1e-15));
    CHECK_THAT(log_gamma(2.0), WithinAbs(0.0, 1e-15));
    CHECK_THAT(log_gamma(5.0), WithinRel(std::log(24.0), 1e-15));
}

TEST_CASE("three-term recurrence holds for n <= 32") {
    for (double alpha : {0.0, 1.0, 2.0})
        for (int n = 1; n < 32; ++n)
            for (double x = 0.0; x <= 50.0; x += 1.7) {
                const double lhs = (n + 1) * laguerre_poly(n + 1, alpha, x);
                const double rhs =
                    (2 * n + alpha + 1 - x) * laguerre_poly(n, alpha, x) - (n + alpha) * laguerre_poly(n - 1, alpha, x);
                const double scale = std::max({std::abs(lhs), std::abs((2 * n + alpha + 1 - x) * laguerre_poly(n, alpha, x)),
                                               std::abs((n + alpha) * laguerre_poly(n - 1, alpha, x)), 1e-300});
                CHECK(std::abs(lhs - rhs) <= 1e-10 * scale);
            }
}

TEST_CASE("Rodrigues form equals the power series exactly for n <= 6") {
    for (int alpha : {0, 1, 2})
        for (int n = 0; n <= 6; ++n) {
            const Poly r = rodrigues(n, alpha);
            const Poly s = power_series(n, alpha);
            REQUIRE(r.size() == s.size());
            for (std::size_t k = 0; k < r.size(); ++k) CHECK(r[k] == s[k]);
            const auto coeffs = laguerre_coefficients(n, alpha);
            REQUIRE(coeffs.size() == r.size());
            for (std::size_t k = 0; k < r.size(); ++k) CHECK_THAT(coeffs[k], WithinRel(r[k].value(), 1e-15));
            for (double x : {0.0, 0.3, 1.0, 4.5, 11.0}) {
                double ref = 0.0, pw = 1.0;
                for (const auto& c : r) ref += c.value() * pw, pw *= x;
                CHECK_THAT(laguerre_poly(n, alpha, x), WithinAbs(ref, 1e-12 * std::max(1.0, std::abs(ref))));
            }
        }
}

TEST_CASE("Laguerre function Gram matrix by Gauss-Laguerre order 128") {
    const auto rule = gauss_laguerre(128);
    for (double alpha : {0.0, 1.0}) {
        for (int i = 0; i <= 12; ++i)
            for (int j = 0; j <= 12; ++j) {
                // int l_i l_j dx = int e^{-x} x^alpha L_i L_j dx
                double acc = 0.0;
                for (std::size_t k = 0; k < rule->order(); ++k) {
                    const double x = rule->nodes[k];
                    acc += rule->weights[k] * std::pow(x, alpha) * laguerre_poly(i, alpha, x) * laguerre_poly(j, alpha, x);
                }
                const double expect = i == j ? std::exp(log_gamma(i + alpha + 1) - log_gamma(i + 1)) : 0.0;
                CHECK_THAT(acc, WithinAbs(expect, 1e-8));
            }
    }
}

TEST_CASE("Gauss-Laguerre rule integrates monomials exactly") {
    const auto rule = gauss_laguerre(40);
    for (int p = 0; p <= 20; ++p) {
        double acc = 0.0;
        for (std::size_t k = 0; k < rule->order(); ++k) acc += rule->weights[k] * std::pow(rule->nodes[k], p);
        CHECK_THAT(acc, WithinRel(factorial(p), 1e-12));
    }
}

TEST_CASE("combinatorial helpers") {
    CHECK(binomial(6, 2) == 15.0);
    CHECK(binomial(5, 0) == 1.0);
    CHECK(factorial(6) == 720.0);
    CHECK_THAT(pochhammer(0.5, 3), WithinRel(0.5 * 1.5 * 2.5, 1e-15));
}

TEST_CASE("invalid parameters are rejected") {
    CHECK_THROWS_AS(laguerre_poly(-1, 0.0, 1.0), invalid_argument);
    CHECK_THROWS_AS(laguerre_fn(1, 0.0, std::nan("")), invalid_argument);
}
