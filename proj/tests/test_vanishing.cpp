// SPDX-License-Identifier: MIT
#include <gtest/gtest.h>

#include <cmath>

#include "mpf/catalog.hpp"
#include "mpf/vanishing.hpp"

using namespace mpf;

namespace {

std::vector<double> uniform_grid(std::size_t n)
{
    std::vector<double> g;
    for (std::size_t i = 1; i <= n; ++i) g.push_back(static_cast<double>(i) / static_cast<double>(n + 1));
    return g;
}

}  // namespace

TEST(AlphaVanishing, MeanCurvatureIsInverseRho)
{
    const auto H = make_velocity({1, 1});
    for (double rho : {0.01, 0.2, 0.5, 0.9}) EXPECT_NEAR(alpha_vanishing_F(H, rho) * rho, 1, 1e-14);
}

TEST(AlphaVanishing, OneAtRhoOne)
{
    for (double xi : {0.0, 1.0, 2.0})
        for (double s : {-1.0, 1.5, 3.0}) {
            EXPECT_NEAR(alpha_vanishing_F(make_velocity({xi, s}), 1 - 1e-12), 1, 1e-9);
            EXPECT_NEAR(alpha_vanishing_beta(1.0, s, 1.0), 1, 1e-15);
        }
}

TEST(AlphaVanishing, MeanSixRoot)
{
    EXPECT_NEAR(alpha_vanishing_F(make_velocity({1, 6}), 1.0 / 3), 0, 1e-14);
    EXPECT_NEAR(alpha_vanishing_F(make_velocity({1, 6}), 0.5), 0, 1e-14);
}

TEST(AlphaVanishing, BetaFormula)
{
    EXPECT_NEAR(alpha_vanishing_beta(1, 2, 0.5), 8.0 / 7, 1e-15);
    EXPECT_NEAR(alpha_vanishing_beta(1e8, 2, 1e-8), 1, 1e-6);
}

TEST(AlphaVanishing, FamilyAgreesWithBetaForm)
{
    const auto grid = uniform_grid(1000);
    for (double xi : {0.0, 1.0, 2.0})
        for (double s : {1.5, 2.0, 3.0, 6.0, 10.0}) {
            const auto F = make_velocity({xi, s});
            for (double rho : grid) {
                const double x = alpha_vanishing_F(F, rho);
                const double y = alpha_vanishing_beta(std::pow(rho, xi - 1), s, rho);
                ASSERT_NEAR(x, y, 1e-10 * std::max(1.0, std::fabs(y))) << xi << " " << s << " " << rho;
            }
        }
}

TEST(AlphaVanishing, MatchesCandidateAlpha)
{
    const auto F = make_velocity({2, 3});
    const auto v = vanishing_function(F);
    for (double rho : {0.05, 0.4, 0.8}) {
        const auto j = v.jet(rho, 1.0);
        EXPECT_NEAR(-j.da / j.db, alpha_vanishing_F(F, rho), 1e-10 * alpha_vanishing_F(F, rho));
    }
}

TEST(Monotone, DecreasingInSigma)
{
    const auto grid = uniform_grid(1000);
    EXPECT_TRUE(check_monotone_sigma(beta_power(1), 2, 5, grid).holds);
    EXPECT_TRUE(check_monotone_sigma(beta_power(2), 1.5, 10, grid).holds);
    const auto eq = check_monotone_sigma(beta_power(1), 3, 3, grid);
    EXPECT_FALSE(eq.holds);
    EXPECT_EQ(eq.max_abs_margin, 0);
    EXPECT_THROW(check_monotone_sigma(beta_power(1), -1, 3, grid), std::invalid_argument);
}

TEST(UpperBound, BelowInverseRho)
{
    EXPECT_TRUE(check_upper_bound(beta_power(1), 1.01, {0.5}).holds);
    EXPECT_GT(check_upper_bound(beta_power(1), 1.01, {0.5}).min_margin, 0);
    EXPECT_TRUE(check_upper_bound(beta_power(2), 10, {0.9}).holds);
    EXPECT_TRUE(check_upper_bound(beta_power(0), 4, uniform_grid(1000)).holds);
    EXPECT_THROW(check_upper_bound(beta_power(1), 1, {0.5}), std::invalid_argument);
    EXPECT_NEAR(alpha_vanishing_beta(1, 1, 0.3), 1 / 0.3, 1e-14);
}

TEST(Limits, LeadingCoefficients)
{
    const auto a = limits_vanishing(1, 4);
    EXPECT_EQ(a.cls, AlphaClass::alpha2);
    EXPECT_DOUBLE_EQ(a.coefficient, 0.25);
    EXPECT_NEAR(a.numeric, 0.25, 1e-6);
    const auto b = limits_vanishing(0, 1.5);
    EXPECT_NEAR(b.coefficient, 1.0 / 3, 1e-15);
    EXPECT_NEAR(b.numeric, 1.0 / 3, 1e-6);
    const auto c = limits_vanishing(0, 2);
    EXPECT_EQ(c.cls, AlphaClass::alpha1);
    EXPECT_EQ(c.coefficient, 1);
    EXPECT_NEAR(c.numeric, 1, 1e-6);
}

TEST(RootsMean, SixHasTwoRoots)
{
    const auto r = roots_mean(6);
    ASSERT_EQ(r.size(), 2u);
    EXPECT_NEAR(r[0].root, 1.0 / 3, 1e-15);
    EXPECT_NEAR(r[1].root, 0.5, 1e-15);
    for (const auto& c : r) {
        EXPECT_LE(c.lo, c.root);
        EXPECT_GE(c.hi, c.root);
        EXPECT_LE(c.residual, 1e-10 * c.scale);
        ASSERT_TRUE(c.closed_form.has_value());
        EXPECT_NEAR(*c.closed_form, c.root, 1e-12);
    }
}

TEST(RootsMean, FiveHasNone) { EXPECT_TRUE(roots_mean(5).empty()); }

TEST(RootsMean, OnsetIsDoubleRoot)
{
    const auto r = roots_mean(3 + 2 * std::sqrt(2.0));
    ASSERT_EQ(r.size(), 1u);
    EXPECT_EQ(r[0].multiplicity, 2);
    EXPECT_NEAR(r[0].root, std::sqrt(2.0) - 1, 1e-7);
}

TEST(RootsMean, BisectionAgreesWithClosedForm)
{
    for (double s : {5.9, 6.0, 8.0, 20.0}) {
        const auto r = roots_mean(s);
        const auto cf = roots_mean_closed_form(s);
        ASSERT_EQ(r.size(), 2u);
        for (std::size_t i = 0; i < 2; ++i) EXPECT_NEAR(r[i].root, cf[i], 1e-12) << s;
    }
}

TEST(RootsNorm, TenHasTwoRoots)
{
    const auto r = roots_norm(10);
    ASSERT_EQ(r.size(), 2u);
    EXPECT_NEAR(r[0].root, 0.5, 1e-12);
    EXPECT_NEAR(r[1].root, (1 + std::sqrt(6.0)) / 5, 1e-12);
    for (const auto& c : r) EXPECT_LE(c.residual, 1e-10 * c.scale);
}

TEST(RootsNorm, NineHasNone)
{
    EXPECT_TRUE(roots_norm(9).empty());
    for (int i = 1; i < 10000; ++i) ASSERT_GT(norm_numerator(9, i / 10000.0), 0);
}

TEST(SigmaStar, ClosedFormAndBisectionAgree)
{
    const auto s = sigma_star();
    EXPECT_NEAR(s.closed_form, 9.444, 1e-3);
    EXPECT_NEAR(s.bisection, s.closed_form, 1e-6);
    EXPECT_NEAR(s.rho_star, 0.596, 1e-3);
    const double x = s.closed_form;
    EXPECT_NEAR(4 * x * x * x - 39 * x * x + 12 * x - 4, 0, 1e-9);
    EXPECT_TRUE(roots_norm(x - 0.01).empty());
    EXPECT_EQ(roots_norm(x + 0.01).size(), 2u);
}

TEST(SigmaStar, PrintedRadicalDiffers)
{
    const auto s = sigma_star();
    EXPECT_GT(std::fabs(s.printed_closed_form - s.closed_form), 1e-3);
}

TEST(Dominance, VanishingBelowCatalogMpf)
{
    const auto grid = uniform_grid(200);
    for (const auto& e : catalog()) {
        if (e.expected != Expected::mpf || e.generic_vanishing()) continue;
        for (double s : e.sample_sigmas) {
            if (!(s > 0)) continue;
            const auto p = e.pair(s);
            for (double rho : grid) {
                const auto j = p.w.jet(rho, 1.0);
                const double aw = -j.da / j.db, av = alpha_vanishing_F(p.F, rho);
                ASSERT_LE(av, aw + 1e-9 * std::max(1.0, std::fabs(aw))) << e.name << " s=" << s << " rho=" << rho;
            }
        }
    }
}

TEST(RootCertificate, JsonHasExactBrackets)
{
    const auto j = to_json(roots_mean(6).front());
    ASSERT_TRUE(j.contains("bracket"));
    ASSERT_EQ(j["bracket"].size(), 2u);
    EXPECT_TRUE(j["bracket"][0].is_string());
    EXPECT_LE(std::stod(j["bracket"][0].get<std::string>()), 1.0 / 3);
    EXPECT_GE(std::stod(j["bracket"][1].get<std::string>()), 1.0 / 3);
}
