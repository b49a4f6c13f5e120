// SPDX-License-Identifier: MIT
#pragma once

#include <cmath>

namespace mpf {

/// Value plus first and second partials in (a, b). Truncated second-order Taylor arithmetic.
template <class T = double>
struct Jet2
{
    T value{0};
    T da{0}, db{0};
    T daa{0}, dab{0}, dbb{0};

    static Jet2 constant(T v) { return Jet2{v}; }
    static Jet2 var_a(T a) { return Jet2{a, T(1), T(0)}; }
    static Jet2 var_b(T b) { return Jet2{b, T(0), T(1)}; }

    /// Apply a scalar function with derivatives g, g', g'' at value.
    Jet2 compose(T g0, T g1, T g2) const
    {
        return Jet2{g0,
                    g1 * da,
                    g1 * db,
                    g2 * da * da + g1 * daa,
                    g2 * da * db + g1 * dab,
                    g2 * db * db + g1 * dbb};
    }

    Jet2 operator-() const { return Jet2{-value, -da, -db, -daa, -dab, -dbb}; }

    Jet2& operator+=(const Jet2& o)
    {
        value += o.value; da += o.da; db += o.db;
        daa += o.daa; dab += o.dab; dbb += o.dbb;
        return *this;
    }
    Jet2& operator-=(const Jet2& o) { return *this += -o; }
    Jet2& operator*=(const Jet2& o) { return *this = *this * o; }
    Jet2& operator/=(const Jet2& o) { return *this = *this / o; }

    friend Jet2 operator+(Jet2 x, const Jet2& y) { return x += y; }
    friend Jet2 operator-(Jet2 x, const Jet2& y) { return x -= y; }

    friend Jet2 operator*(const Jet2& x, const Jet2& y)
    {
        return Jet2{x.value * y.value,
                    x.da * y.value + x.value * y.da,
                    x.db * y.value + x.value * y.db,
                    x.daa * y.value + T(2) * x.da * y.da + x.value * y.daa,
                    x.dab * y.value + x.da * y.db + x.db * y.da + x.value * y.dab,
                    x.dbb * y.value + T(2) * x.db * y.db + x.value * y.dbb};
    }

    friend Jet2 operator/(const Jet2& x, const Jet2& y) { return x * reciprocal(y); }

    friend Jet2 reciprocal(const Jet2& y)
    {
        const T r = T(1) / y.value;
        return y.compose(r, -r * r, T(2) * r * r * r);
    }

    friend Jet2 operator*(T s, Jet2 x)
    {
        x.value *= s; x.da *= s; x.db *= s;
        x.daa *= s; x.dab *= s; x.dbb *= s;
        return x;
    }
};

/// Integer power by repeated squaring; exact zeros survive (e.g. (a-b)^2 on the diagonal).
template <class T>
Jet2<T> ipow(Jet2<T> x, long n)
{
    if (n < 0) return reciprocal(ipow(x, -n));
    Jet2<T> r = Jet2<T>::constant(T(1));
    while (n > 0) {
        if (n & 1) r = r * x;
        n >>= 1;
        if (n) x = x * x;
    }
    return r;
}

/// Real power for a strictly positive base.
template <class T>
Jet2<T> rpow(const Jet2<T>& x, T p)
{
    using std::pow;
    const T v = x.value;
    const T g0 = pow(v, p);
    const T g1 = p * g0 / v;
    const T g2 = p * (p - T(1)) * g0 / (v * v);
    return x.compose(g0, g1, g2);
}

}  // namespace mpf
