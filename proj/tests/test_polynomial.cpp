// SPDX-License-Identifier: MIT
#include <gtest/gtest.h>

#include <cmath>

#include "mpf/polynomial.hpp"

using namespace mpf;

namespace {

Poly<Rational> q(std::initializer_list<long> xs)
{
    Poly<Rational> p;
    for (long x : xs) p.c.emplace_back(x);
    return p;
}

}  // namespace

TEST(Poly, Arithmetic)
{
    const auto x = q({-1, 1});           // rho - 1
    const auto y = q({1, 1});            // rho + 1
    const auto p = x * y;                // rho^2 - 1
    EXPECT_EQ(p.degree(), 2);
    EXPECT_EQ(p(Rational(3)), Rational(8));
    EXPECT_EQ((x + y)(Rational(5)), Rational(10));
    EXPECT_EQ((x - y)(Rational(5)), Rational(-2));
    EXPECT_EQ(pow(y, 3)(Rational(1)), Rational(8));
    EXPECT_EQ(p.derivative()(Rational(7)), Rational(14));
    EXPECT_EQ(p.lead(), Rational(1));
    const auto [quot, rem] = divmod(p, x);
    EXPECT_EQ(quot.degree(), 1);
    EXPECT_TRUE(rem.is_zero());
    EXPECT_EQ(quot(Rational(2)), Rational(3));
}

TEST(Poly, MonomialAndZero)
{
    const auto m = Poly<Rational>::monomial(Rational(3), 4);
    EXPECT_EQ(m.degree(), 4);
    EXPECT_EQ(m(Rational(2)), Rational(48));
    EXPECT_TRUE(q({0, 0}).is_zero());
    EXPECT_EQ(q({0, 0}).degree(), -1);
}

TEST(Sturm, CountsRoots)
{
    // (rho - 1/3)(rho - 1/2)(rho - 2) = rho^3 - 17/6 rho^2 + 11/6 rho - 1/3, scaled by 6
    const auto p = q({-2, 11, -17, 6});
    EXPECT_EQ(count_roots(p, Rational(0), Rational(1)), 2);
    EXPECT_EQ(count_roots(p, Rational(0), Rational(1, 3)), 1);
    EXPECT_EQ(count_roots(p, Rational(0), Rational(1, 4)), 0);
    EXPECT_EQ(count_roots(p, Rational(0), Rational(3)), 3);
    EXPECT_EQ(count_roots(q({1, 0, 1}), Rational(-10), Rational(10)), 0);
}

TEST(Certify, SignChangeIsNotNegative)
{
    const auto c = certify_negative(q({-1, 1}), Rational(2));
    EXPECT_FALSE(c.negative);
    EXPECT_EQ(c.roots_in_interval, 1);
    EXPECT_EQ(c.method, "sturm");
}

TEST(Certify, NegativePolynomial)
{
    const auto c = certify_negative(q({-1, 0, -3}), Rational(5));
    EXPECT_TRUE(c.negative);
    EXPECT_EQ(c.roots_in_interval, 0);
    EXPECT_LT(c.sample_value, 0);
}

TEST(Certify, StripsPowerOfRho)
{
    const auto c = certify_negative(q({0, 0, -1, 1}), Rational(1, 2));
    EXPECT_TRUE(c.negative);
    EXPECT_EQ(c.stripped_power, 2);
}

TEST(Certify, PositiveHasWitness)
{
    const auto c = certify_negative(q({1, 1}), Rational(1));
    EXPECT_FALSE(c.negative);
    ASSERT_TRUE(c.witness.has_value());
}

TEST(Certify, Errors)
{
    EXPECT_THROW(certify_negative(q({0, 0}), Rational(1)), std::invalid_argument);
    EXPECT_THROW(certify_negative(q({-1}), Rational(0)), std::invalid_argument);
}

TEST(Certify, AgreesWithDenseScan)
{
    const auto p = q({-6, 28, -138, 264, -158, 44, -26, 8});
    const auto c = certify_negative(p, Rational(1, 3));
    ASSERT_TRUE(c.negative);
    for (int i = 1; i <= 100000; ++i) {
        const double rho = i / 300000.0;
        double v = 0;
        for (std::size_t k = p.c.size(); k-- > 0;) v = v * rho + p.c[k].convert_to<double>();
        ASSERT_LT(v, 0) << rho;
    }
}

TEST(Interval, SqrtEnclosure)
{
    const auto s = sqrt_enclosure(Rational(2), 60);
    EXPECT_LE(s.lo * s.lo, Rational(2));
    EXPECT_GE(s.hi * s.hi, Rational(2));
    EXPECT_EQ(s.hi - s.lo, Rational(1, boost::multiprecision::cpp_int(1) << 60));
}

TEST(Interval, Arithmetic)
{
    const RInterval x(Rational(-1), Rational(2)), y(Rational(3), Rational(4));
    const auto m = x * y;
    EXPECT_EQ(m.lo, Rational(-4));
    EXPECT_EQ(m.hi, Rational(8));
    const auto d = x - y;
    EXPECT_EQ(d.lo, Rational(-5));
    EXPECT_EQ(d.hi, Rational(-1));
}

TEST(Interval, RangeContainsValues)
{
    Poly<RInterval> p;
    for (long c : {-3, 5, -2}) p.c.emplace_back(c);
    const auto r = range_on(p, Rational(0), Rational(2));
    for (int i = 0; i <= 20; ++i) {
        const Rational x(i, 10);
        const Rational v = Rational(-3) + 5 * x - 2 * x * x;
        EXPECT_LE(r.lo, v);
        EXPECT_GE(r.hi, v);
    }
}

TEST(Enclosure, FixedPointRounding)
{
    using detail::cpp_int;
    const Rational third(1, 3);
    const cpp_int f = detail::floor_fixed(third, 10), c = detail::ceil_fixed(third, 10);
    EXPECT_EQ(c - f, 1);
    EXPECT_LE(Rational(f, cpp_int(1) << 10), third);
    EXPECT_GE(Rational(c, cpp_int(1) << 10), third);
    EXPECT_EQ(detail::shr_floor(cpp_int(-5), 1), -3);
    EXPECT_EQ(detail::shr_ceil(cpp_int(-5), 1), -2);
    EXPECT_EQ(detail::shr_floor(cpp_int(5), 1), 2);
    EXPECT_EQ(detail::shr_ceil(cpp_int(5), 1), 3);
}

TEST(Enclosure, CertifiesIntervalCoefficients)
{
    // -(rho - sqrt2)^2 - 1/10 on (0, 1], with sqrt2 enclosed
    const auto s = sqrt_enclosure(Rational(2), 90);
    Poly<RInterval> p;
    p.c = {RInterval(Rational(-2)) - RInterval(Rational(1, 10)), RInterval(2) * s, RInterval(-1)};
    const auto c = certify_negative_enclosure(p, Rational(1));
    EXPECT_TRUE(c.negative);
    EXPECT_EQ(c.method, "interval-enclosure");
    EXPECT_GT(c.boxes, 0u);
}

TEST(Enclosure, FindsWitness)
{
    Poly<RInterval> p;
    p.c = {RInterval(-1), RInterval(2)};  // 2 rho - 1
    const auto c = certify_negative_enclosure(p, Rational(1));
    EXPECT_FALSE(c.negative);
    ASSERT_TRUE(c.witness.has_value());
    EXPECT_GE(*c.witness, Rational(1, 2));
}
