// SPDX-License-Identifier: MIT
#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace mpf {

using Rational = boost::multiprecision::cpp_rational;

/// Dense polynomial in one variable, ascending coefficients.
template <class T>
struct Poly
{
    std::vector<T> c;

    Poly() = default;
    Poly(std::initializer_list<T> xs) : c(xs) {}
    explicit Poly(std::vector<T> xs) : c(std::move(xs)) {}

    static Poly monomial(const T& coef, std::size_t k)
    {
        Poly p;
        p.c.assign(k + 1, T(0));
        p.c[k] = coef;
        return p;
    }

    bool is_zero() const
    {
        return std::all_of(c.begin(), c.end(), [](const T& x) { return x == T(0); });
    }

    int degree() const
    {
        for (std::size_t i = c.size(); i-- > 0;)
            if (!(c[i] == T(0))) return static_cast<int>(i);
        return -1;
    }

    Poly& trim()
    {
        while (!c.empty() && c.back() == T(0)) c.pop_back();
        return *this;
    }

    template <class X>
    X operator()(const X& x) const
    {
        X acc(0);
        for (std::size_t i = c.size(); i-- > 0;) acc = acc * x + X(c[i]);
        return acc;
    }

    Poly derivative() const
    {
        Poly d;
        for (std::size_t i = 1; i < c.size(); ++i) d.c.push_back(c[i] * T(static_cast<long>(i)));
        return d;
    }

    const T& lead() const { return c[static_cast<std::size_t>(degree())]; }
};

template <class T>
Poly<T> operator+(const Poly<T>& x, const Poly<T>& y)
{
    Poly<T> r;
    r.c.assign(std::max(x.c.size(), y.c.size()), T(0));
    for (std::size_t i = 0; i < x.c.size(); ++i) r.c[i] = r.c[i] + x.c[i];
    for (std::size_t i = 0; i < y.c.size(); ++i) r.c[i] = r.c[i] + y.c[i];
    return r;
}

template <class T>
Poly<T> operator*(const T& s, const Poly<T>& x)
{
    Poly<T> r = x;
    for (auto& v : r.c) v = s * v;
    return r;
}

template <class T>
Poly<T> operator-(const Poly<T>& x)
{
    return T(-1) * x;
}

template <class T>
Poly<T> operator-(const Poly<T>& x, const Poly<T>& y)
{
    return x + (-y);
}

template <class T>
Poly<T> operator*(const Poly<T>& x, const Poly<T>& y)
{
    Poly<T> r;
    if (x.c.empty() || y.c.empty()) return r;
    r.c.assign(x.c.size() + y.c.size() - 1, T(0));
    for (std::size_t i = 0; i < x.c.size(); ++i)
        for (std::size_t j = 0; j < y.c.size(); ++j) r.c[i + j] = r.c[i + j] + x.c[i] * y.c[j];
    return r;
}

template <class T>
Poly<T> pow(Poly<T> x, unsigned n)
{
    Poly<T> r{T(1)};
    while (n) {
        if (n & 1) r = r * x;
        n >>= 1;
        if (n) x = x * x;
    }
    return r;
}

/// Euclidean division over a field.
template <class T>
std::pair<Poly<T>, Poly<T>> divmod(Poly<T> num, Poly<T> den)
{
    den.trim();
    if (den.c.empty()) throw std::domain_error("polynomial division by zero");
    num.trim();
    Poly<T> q;
    const int dd = den.degree();
    if (num.degree() < dd) return {q, num};
    q.c.assign(static_cast<std::size_t>(num.degree() - dd + 1), T(0));
    while (!num.c.empty() && num.degree() >= dd) {
        const int k = num.degree() - dd;
        const T f = num.lead() / den.lead();
        q.c[static_cast<std::size_t>(k)] = f;
        for (int i = 0; i <= dd; ++i) {
            auto& slot = num.c[static_cast<std::size_t>(i + k)];
            slot = slot - f * den.c[static_cast<std::size_t>(i)];
        }
        num.c[static_cast<std::size_t>(num.degree() < 0 ? 0 : dd + k)] = T(0);
        num.trim();
    }
    return {q, num};
}

// ---------------------------------------------------------------------------
// Sturm sequences
// ---------------------------------------------------------------------------

inline std::vector<Poly<Rational>> sturm_sequence(Poly<Rational> p)
{
    p.trim();
    std::vector<Poly<Rational>> seq{p, p.derivative().trim()};
    while (!seq.back().c.empty() && seq.back().degree() > 0) {
        auto r = divmod(seq[seq.size() - 2], seq.back()).second;
        r = -r;
        r.trim();
        if (r.c.empty()) break;
        seq.push_back(r);
    }
    if (seq.back().c.empty()) seq.pop_back();
    return seq;
}

inline int sign_variations(const std::vector<Poly<Rational>>& seq, const Rational& x)
{
    int changes = 0, last = 0;
    for (const auto& p : seq) {
        const Rational v = p(x);
        const int s = v > 0 ? 1 : v < 0 ? -1 : 0;
        if (s == 0) continue;
        if (last != 0 && s != last) ++changes;
        last = s;
    }
    return changes;
}

/// Number of distinct real roots in (lo, hi].
inline int count_roots(const Poly<Rational>& p, const Rational& lo, const Rational& hi)
{
    const auto seq = sturm_sequence(p);
    return sign_variations(seq, lo) - sign_variations(seq, hi);
}

struct NegativityCertificate
{
    bool negative = false;
    int roots_in_interval = 0;
    int stripped_power = 0;  // power of rho divided out before counting
    Rational sample_point;
    Rational sample_value;
    std::string method;
    std::size_t boxes = 0;           // enclosure method only
    std::optional<Rational> witness; // a point where p >= 0, when found
};

/// Exact check that p < 0 on (0, r].
inline NegativityCertificate certify_negative(Poly<Rational> p, const Rational& r)
{
    p.trim();
    if (p.c.empty()) throw std::invalid_argument("certify_negative: polynomial is identically zero");
    if (!(r > 0)) throw std::invalid_argument("certify_negative: needs r > 0");
    NegativityCertificate cert;
    cert.method = "sturm";
    // dividing by rho^k leaves the sign on (0, r] unchanged
    while (p.c.front() == 0) {
        p.c.erase(p.c.begin());
        ++cert.stripped_power;
    }
    cert.roots_in_interval = count_roots(p, Rational(0), r);
    cert.sample_point = r / 2;
    cert.sample_value = p(cert.sample_point);
    cert.negative = cert.roots_in_interval == 0 && cert.sample_value < 0;
    if (!cert.negative && cert.sample_value >= 0) cert.witness = cert.sample_point;
    return cert;
}

// ---------------------------------------------------------------------------
// Rational interval arithmetic
// ---------------------------------------------------------------------------

struct RInterval
{
    Rational lo, hi;

    RInterval() : lo(0), hi(0) {}
    RInterval(const Rational& x) : lo(x), hi(x) {}  // NOLINT: implicit point interval
    RInterval(int x) : lo(x), hi(x) {}              // NOLINT
    RInterval(long x) : lo(x), hi(x) {}             // NOLINT
    RInterval(Rational l, Rational h) : lo(std::move(l)), hi(std::move(h)) {}

    friend RInterval operator+(const RInterval& x, const RInterval& y) { return {x.lo + y.lo, x.hi + y.hi}; }
    friend RInterval operator-(const RInterval& x, const RInterval& y) { return {x.lo - y.hi, x.hi - y.lo}; }
    friend RInterval operator-(const RInterval& x) { return {-x.hi, -x.lo}; }
    friend RInterval operator*(const RInterval& x, const RInterval& y)
    {
        const Rational p[4] = {x.lo * y.lo, x.lo * y.hi, x.hi * y.lo, x.hi * y.hi};
        return {*std::min_element(p, p + 4), *std::max_element(p, p + 4)};
    }
    friend bool operator==(const RInterval& x, const RInterval& y) { return x.lo == y.lo && x.hi == y.hi; }
};

/// Dyadic enclosure of sqrt(q) with the given number of fractional bits.
inline RInterval sqrt_enclosure(const Rational& q, unsigned bits)
{
    using boost::multiprecision::cpp_int;
    const cpp_int scale = cpp_int(1) << (2 * bits);
    const cpp_int n = boost::multiprecision::numerator(q) * scale / boost::multiprecision::denominator(q);
    const cpp_int s = boost::multiprecision::sqrt(n);
    const cpp_int den = cpp_int(1) << bits;
    return {Rational(s, den), Rational(s + 1, den)};
}

namespace detail {

using boost::multiprecision::cpp_int;

// Fixed-point value n * 2^-bits with directed rounding.
inline cpp_int floor_fixed(const Rational& q, unsigned bits)
{
    const cpp_int n = boost::multiprecision::numerator(q) << bits;
    const cpp_int& d = boost::multiprecision::denominator(q);
    cpp_int f = n / d;
    if (f * d > n) --f;  // division truncates toward zero
    return f;
}

inline cpp_int ceil_fixed(const Rational& q, unsigned bits) { return -floor_fixed(-q, bits); }

inline cpp_int shr_floor(const cpp_int& x, unsigned bits)
{
    if (x >= 0) return x >> bits;
    const cpp_int m = -x;
    cpp_int q = m >> bits;
    if ((q << bits) != m) ++q;
    return -q;
}

inline cpp_int shr_ceil(const cpp_int& x, unsigned bits) { return -shr_floor(-x, bits); }

struct FixedPoly
{
    std::vector<cpp_int> lo, hi;
    unsigned bits;
};

// Bounds of p over [x0, x1], 0 <= x0 <= x1, all in units of 2^-bits.
inline std::pair<cpp_int, cpp_int> fixed_range(const FixedPoly& p, const cpp_int& x0, const cpp_int& x1)
{
    const unsigned k = p.bits;
    cpp_int up = 0, lo = 0;
    cpp_int p0l = cpp_int(1) << k, p0h = p0l, p1l = p0l, p1h = p0l;
    for (std::size_t i = 0; i < p.lo.size(); ++i) {
        // x^i lies in [p0l, p1h] for x in [x0, x1]
        const cpp_int t[4] = {p.lo[i] * p0l, p.lo[i] * p1h, p.hi[i] * p0l, p.hi[i] * p1h};
        up += shr_ceil(*std::max_element(t, t + 4), k);
        lo += shr_floor(*std::min_element(t, t + 4), k);
        p0l = shr_floor(p0l * x0, k);
        p0h = shr_ceil(p0h * x0, k);
        p1l = shr_floor(p1l * x1, k);
        p1h = shr_ceil(p1h * x1, k);
    }
    return {lo, up};
}

}  // namespace detail

/// Upper and lower bounds of p over [x0, x1] with 0 <= x0, corner-wise per term, exact.
inline RInterval range_on(const Poly<RInterval>& p, const Rational& x0, const Rational& x1)
{
    Rational up(0), lo(0), p0(1), p1(1);
    for (std::size_t i = 0; i < p.c.size(); ++i) {
        const auto& ci = p.c[i];
        const Rational t[4] = {ci.lo * p0, ci.lo * p1, ci.hi * p0, ci.hi * p1};
        up += *std::max_element(t, t + 4);
        lo += *std::min_element(t, t + 4);
        p0 *= x0;
        p1 *= x1;
    }
    return {lo, up};
}

/// Check p < 0 on (0, r] for interval coefficients by adaptive subdivision. Coefficients and
/// powers are carried as fixed-point integers with outward rounding at the given number of bits.
inline NegativityCertificate certify_negative_enclosure(const Poly<RInterval>& p, const Rational& r,
                                                        unsigned bits = 120, int max_depth = 60,
                                                        std::size_t max_boxes = 2000000)
{
    using detail::cpp_int;
    if (!(r > 0)) throw std::invalid_argument("certify_negative_enclosure: needs r > 0");
    NegativityCertificate cert;
    cert.method = "interval-enclosure";
    detail::FixedPoly fp;
    fp.bits = bits;
    for (const auto& c : p.c) {
        fp.lo.push_back(detail::floor_fixed(c.lo, bits));
        fp.hi.push_back(detail::ceil_fixed(c.hi, bits));
    }
    const Rational unit = Rational(cpp_int(1) << bits);
    struct Box
    {
        cpp_int x0, x1;
        int depth;
    };
    // covering (0, ceil(r)] is at least as strong as (0, r]
    std::vector<Box> stack{{cpp_int(0), detail::ceil_fixed(r, bits), 0}};
    while (!stack.empty()) {
        Box b = stack.back();
        stack.pop_back();
        ++cert.boxes;
        if (cert.boxes > max_boxes) return cert;
        if (detail::fixed_range(fp, b.x0, b.x1).second < 0) continue;
        const cpp_int mid = (b.x0 + b.x1) >> 1;
        const auto at_mid = detail::fixed_range(fp, mid, mid);
        if (at_mid.first >= 0) {
            cert.witness = Rational(mid) / unit;
            cert.sample_point = *cert.witness;
            cert.sample_value = Rational(at_mid.first) / unit;
            return cert;
        }
        if (b.depth >= max_depth || mid == b.x0) return cert;
        stack.push_back({mid, b.x1, b.depth + 1});
        stack.push_back({b.x0, mid, b.depth + 1});
    }
    cert.negative = true;
    cert.sample_point = r / 2;
    cert.sample_value = range_on(p, cert.sample_point, cert.sample_point).hi;
    return cert;
}

}  // namespace mpf
