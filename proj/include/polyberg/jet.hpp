#pragma once

// Truncated Taylor series in one complex variable.  A Jet holds the
// coefficients c_0..c_order of f(z0 + eps); arithmetic propagates them
// exactly, so k-th derivatives of rational expressions are k! * c_k.

#include <array>
#include <complex>
#include <cstddef>

#include "polyberg/errors.hpp"

namespace polyberg {

inline constexpr int kMaxJetOrder = 23;

template <class T>
class Jet {
public:
    using value_type = std::complex<T>;

    Jet() = default;
    explicit Jet(int order) : order_(order) {
        detail::require(order >= 0 && order <= kMaxJetOrder, "Jet: order out of range");
    }

    static Jet constant(int order, value_type v) {
        Jet j(order);
        j.c_[0] = v;
        return j;
    }

    /// The independent variable z0 + eps scaled by `slope`: v + slope*eps.
    static Jet variable(int order, value_type v, value_type slope = value_type(1)) {
        Jet j(order);
        j.c_[0] = v;
        if (order >= 1) j.c_[1] = slope;
        return j;
    }

    int order() const { return order_; }
    value_type& operator[](int k) { return c_[k]; }
    const value_type& operator[](int k) const { return c_[k]; }
    value_type value() const { return c_[0]; }

    Jet& operator+=(const Jet& o) {
        for (int k = 0; k <= order_; ++k) c_[k] += o.c_[k];
        return *this;
    }
    Jet& operator-=(const Jet& o) {
        for (int k = 0; k <= order_; ++k) c_[k] -= o.c_[k];
        return *this;
    }
    Jet& operator*=(value_type s) {
        for (int k = 0; k <= order_; ++k) c_[k] *= s;
        return *this;
    }
    Jet& operator+=(value_type s) {
        c_[0] += s;
        return *this;
    }

    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
    friend Jet operator*(Jet a, value_type s) { return a *= s; }
    friend Jet operator*(value_type s, Jet a) { return a *= s; }
    friend Jet operator+(Jet a, value_type s) { return a += s; }
    friend Jet operator-(Jet a, value_type s) { return a += -s; }
    friend Jet operator-(Jet a) { return a *= value_type(-1); }

    friend Jet operator*(const Jet& a, const Jet& b) {
        Jet r(a.order_);
        for (int k = 0; k <= a.order_; ++k) {
            value_type acc{};
            for (int j = 0; j <= k; ++j) acc += a.c_[j] * b.c_[k - j];
            r.c_[k] = acc;
        }
        return r;
    }

    /// Series reciprocal; requires a nonzero constant term.
    Jet reciprocal() const {
        Jet r(order_);
        const value_type inv0 = value_type(1) / c_[0];
        r.c_[0] = inv0;
        for (int k = 1; k <= order_; ++k) {
            value_type acc{};
            for (int j = 1; j <= k; ++j) acc += c_[j] * r.c_[k - j];
            r.c_[k] = -acc * inv0;
        }
        return r;
    }

    friend Jet operator/(const Jet& a, const Jet& b) { return a * b.reciprocal(); }

    /// Coefficient of eps^k in the product a*b, without forming the product.
    static value_type product_coefficient(const Jet& a, const Jet& b, int k) {
        value_type acc{};
        for (int j = 0; j <= k; ++j) acc += a.c_[j] * b.c_[k - j];
        return acc;
    }

private:
    int order_ = 0;
    std::array<value_type, kMaxJetOrder + 1> c_{};
};

/// Integer power by repeated squaring; negative exponents go through the reciprocal.
template <class T>
Jet<T> pow(const Jet<T>& base, int e) {
    if (e < 0) return pow(base.reciprocal(), -e);
    Jet<T> result = Jet<T>::constant(base.order(), std::complex<T>(1));
    Jet<T> b = base;
    while (e > 0) {
        if (e & 1) result = result * b;
        e >>= 1;
        if (e) b = b * b;
    }
    return result;
}

/// Complex integer power without the branch handling of std::pow.
template <class T>
std::complex<T> ipow(std::complex<T> base, int e) {
    if (e < 0) return T(1) / ipow(base, -e);
    std::complex<T> r(1);
    while (e > 0) {
        if (e & 1) r *= base;
        e >>= 1;
        if (e) base *= base;
    }
    return r;
}

} // namespace polyberg
