// SPDX-License-Identifier: MIT
#include <gtest/gtest.h>

#include <cmath>

#include "mpf/mpf.hpp"

using namespace mpf;

namespace {

double rel(double x, double y, double floor = 1e-300)
{
    return std::fabs(x - y) / std::max({std::fabs(x), std::fabs(y), floor});
}

}  // namespace

TEST(Properties, JetMatchesFiniteDifferencesOnCatalog)
{
    const double h = 1e-5;
    const auto pts = log_uniform_pairs(40, 21, 0.2, 5);
    for (const auto& e : catalog())
        for (double s : e.sample_sigmas) {
            const auto w = e.candidate(s);
            for (auto p : pts) {
                if (std::fabs(p.a - p.b) < 1e-2) continue;
                const auto j = w.jet(p.a, p.b);
                const auto ja = w.jet(p.a + h, p.b), jm = w.jet(p.a - h, p.b);
                const auto jb = w.jet(p.a, p.b + h), jn = w.jet(p.a, p.b - h);
                const double sc = std::fabs(j.value) / (p.a * p.b) + std::fabs(j.da) + std::fabs(j.db);
                EXPECT_LE(std::fabs(j.da - (ja.value - jm.value) / (2 * h)), 1e-6 * sc) << e.name;
                EXPECT_LE(std::fabs(j.db - (jb.value - jn.value) / (2 * h)), 1e-6 * sc) << e.name;
                const double sc2 = std::fabs(j.daa) + std::fabs(j.dab) + std::fabs(j.dbb) + sc;
                EXPECT_LE(std::fabs(j.daa - (ja.da - jm.da) / (2 * h)), 1e-6 * sc2) << e.name;
                EXPECT_LE(std::fabs(j.dab - (jb.da - jn.da) / (2 * h)), 1e-6 * sc2) << e.name;
                EXPECT_LE(std::fabs(j.dbb - (jb.db - jn.db) / (2 * h)), 1e-6 * sc2) << e.name;
            }
        }
}

TEST(Properties, JetSymmetryUnderSwap)
{
    const auto pts = log_uniform_pairs(100, 23);
    for (const auto& e : catalog()) {
        const auto w = e.candidate(e.sample_sigmas.front());
        for (auto p : pts) {
            const auto x = w.jet(p.a, p.b), y = w.jet(p.b, p.a);
            const double sv = std::fabs(x.value), s1 = std::fabs(x.da) + std::fabs(x.db);
            const double s2 = std::fabs(x.daa) + std::fabs(x.dab) + std::fabs(x.dbb);
            EXPECT_LE(std::fabs(x.value - y.value), 1e-10 * sv) << e.name;
            EXPECT_LE(std::fabs(x.da - y.db), 1e-10 * s1) << e.name;
            EXPECT_LE(std::fabs(x.daa - y.dbb), 1e-10 * s2) << e.name;
            EXPECT_LE(std::fabs(x.dab - y.dab), 1e-10 * s2) << e.name;
        }
    }
}

TEST(Properties, EulerResidualOnThousandSamples)
{
    const auto pts = log_uniform_pairs(1000, 29);
    for (const auto& e : catalog()) {
        const auto w = e.candidate(e.sample_sigmas.front());
        EXPECT_LE(check_euler(w, *w.degree_hint(), pts).max_residual, 1e-8) << e.name;
    }
}

TEST(Properties, VanishingIdentityAcrossFamilies)
{
    const auto grid = make_grid({2048, 0, 1e-6, 0});
    for (double xi : {0.0, 1.0, 2.0})
        for (double s : {-2.0, -1.0, 1.5, 2.0, 3.0, 7.0}) {
            const auto F = make_velocity({xi, s});
            const auto v = vanishing_function(F);
            for (double rho : grid) {
                const auto t = constant_term_scaled(v.jet(rho, 1.0), F.jet(rho, 1.0), rho, 1.0);
                ASSERT_LE(std::fabs(t.C), 1e-10 * t.sC) << xi << " " << s << " " << rho;
            }
        }
}

TEST(Properties, GradientTermSymmetryTwoHundredPoints)
{
    const auto pts = log_uniform_pairs(200, 31, 0.05, 20);
    for (const auto& e : catalog())
        for (double s : e.sample_sigmas) {
            const auto p = e.pair(s);
            for (auto q : pts) {
                const auto x = terms_scaled(p.w.jet(q.a, q.b), p.F.jet(q.a, q.b), q.a, q.b);
                const auto y = terms_scaled(p.w.jet(q.b, q.a), p.F.jet(q.b, q.a), q.b, q.a);
                ASSERT_LE(std::fabs(x.G - y.E), 1e-9 * std::max(x.sG, y.sE)) << e.name << " s=" << s;
            }
        }
}

TEST(Properties, AlphaVanishingAtRhoOne)
{
    for (double xi : {-1.0, 0.0, 0.5, 1.0, 2.0, 3.0})
        for (double s : {-2.0, -0.5, 1.5, 4.0}) EXPECT_LE(rel(alpha_vanishing_F(make_velocity({xi, s}), 1.0), 1.0), 1e-12);
}

TEST(Properties, BoundDirectionFollowsSignOfA)
{
    for (double xi : {-3.0, -1.0, 0.0, 1.0, 2.0})
        for (double s : {-2.0, -0.5, 0.5, 3.0})
            for (double rho : {1e-3, 0.2, 0.7}) {
                const auto b = alpha_bound(xi, s, rho);
                EXPECT_EQ(b.direction == BoundDirection::lower, (s > 0) == (b.A > 0));
                EXPECT_LE(rel(b.value * rho * b.A, b.B), 1e-12);
            }
}

TEST(Determinism, CheckMpfIndependentOfCallOrder)
{
    const auto p = lookup("expanding-norm").pair(-0.5);
    const GridConfig cfg{256, 256, 1e-6, 17};
    const auto first = to_json(check_mpf(p.w, p.F, p.spec, cfg)).dump();
    (void)check_mpf(lookup("andrews-gauss").candidate(2), make_velocity({0, 2}));
    EXPECT_EQ(to_json(check_mpf(p.w, p.F, p.spec, cfg)).dump(), first);
}

TEST(Determinism, SeedChangesOnlyRandomPart)
{
    const GridConfig a{64, 32, 1e-6, 1}, b{64, 32, 1e-6, 2};
    const auto ga = make_grid(a), gb = make_grid(b);
    for (std::size_t i = 0; i < 64; ++i) EXPECT_EQ(ga[i], gb[i]);
    bool differs = false;
    for (std::size_t i = 64; i < ga.size(); ++i) differs = differs || ga[i] != gb[i];
    EXPECT_TRUE(differs);
    EXPECT_EQ(make_grid(a), make_grid(a));
}

TEST(Determinism, SigmaDeltaRepeatable)
{
    const auto x = find_sigma_delta(PhiFamily::mean, 6.5, 1e-3);
    const auto y = find_sigma_delta(PhiFamily::mean, 6.5, 1e-3);
    EXPECT_EQ(x.delta_min, y.delta_min);
    EXPECT_EQ(to_json(x).dump(), to_json(y).dump());
}
