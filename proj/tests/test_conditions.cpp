// SPDX-License-Identifier: MIT
#include <gtest/gtest.h>

#include <cmath>

#include "mpf/catalog.hpp"
#include "mpf/conditions.hpp"

using namespace mpf;

namespace {

CurvatureFunction andrews() { return parse_expression("(a-b)^2"); }
CurvatureFunction gauss2() { return make_velocity({0, 2}); }

double rel(double x, double y) { return std::fabs(x - y) / std::max({std::fabs(x), std::fabs(y), 1e-300}); }

}  // namespace

TEST(ConstantTerm, VanishingFunctionGivesZero)
{
    const auto F = make_velocity({1, 3});
    const auto v = vanishing_function(F);
    const auto s = ab_terms(v, F, 2, 5);
    EXPECT_LE(std::fabs(constant_term_C(v, F, 2, 5)), 1e-10 * std::fabs(v.jet(2.0, 5.0).da * 4 * F(2, 5)));
    EXPECT_EQ(s.form, Form::ab);
}

TEST(ConstantTerm, AndrewsWithGaussIsZero)
{
    for (auto [a, b] : {std::pair{0.3, 1.0}, {2.0, 5.0}, {7.0, 0.01}})
        EXPECT_LE(std::fabs(constant_term_C(andrews(), gauss2(), a, b)), 1e-12 * (a + b) * (a + b) * a * b);
}

TEST(ConstantTerm, DiagonalIsZero)
{
    for (const auto& e : catalog()) {
        const double s = e.sample_sigmas.front();
        const auto p = e.pair(s);
        EXPECT_EQ(constant_term_C(p.w, p.F, 1.3, 1.3), 0) << e.name;
    }
}

TEST(GradientTerms, SymmetryOnCatalog)
{
    const auto pts = log_uniform_pairs(100, 3, 0.05, 20);
    for (const auto& e : catalog()) {
        const auto p = e.pair(e.sample_sigmas.front());
        for (auto q : pts) {
            if (q.a == q.b) continue;
            const auto eg = gradient_terms_EG(p.w, p.F, q.a, q.b);
            const auto ge = gradient_terms_EG(p.w, p.F, q.b, q.a);
            EXPECT_LE(rel(eg.second, ge.first), 1e-9) << e.name << " at " << q.a << "," << q.b;
        }
    }
}

TEST(GradientTerms, AndrewsNonPositive)
{
    for (double rho : make_grid({256, 0, 1e-6, 0})) {
        const auto [E, G] = gradient_terms_EG(andrews(), gauss2(), rho, 1);
        EXPECT_LE(E, 1e-12);
        EXPECT_LE(G, 1e-12);
    }
}

TEST(GradientTerms, BeyondGaussTwoHasPositiveWitness)
{
    const auto w = parse_expression("(a-b)^2*(a*b)^s/(a*b)^2", 3);
    const auto F = make_velocity({0, 3});
    bool found = false;
    for (double rho : make_grid({512, 0, 1e-6, 0})) {
        const auto t = ab_terms(w, F, rho, 1);
        if (t.C > 0 || t.E > 0 || t.G > 0) found = true;
    }
    EXPECT_TRUE(found);
}

TEST(GradientTerms, DiagonalInputRejected)
{
    EXPECT_THROW(gradient_terms_EG(andrews(), gauss2(), 1, 1), mpf::domain_error);
}

TEST(DiagonalLimit, MatchesFinerSteps)
{
    const auto d = diagonal_limit_EG(andrews(), gauss2(), 1);
    const auto [E, G] = gradient_terms_EG(andrews(), gauss2(), 1, 1 + 1e-6);
    EXPECT_NEAR(d.E, E, 1e-6 * std::max(1.0, std::fabs(E)));
    EXPECT_NEAR(d.G, G, 1e-6 * std::max(1.0, std::fabs(G)));
    EXPECT_NEAR(d.E, d.G, 1e-6 * std::max(1.0, std::fabs(d.E)));
}

TEST(DiagonalLimit, SchulzeNonPositive)
{
    const auto p = lookup("schulze-mean").pair(3);
    const auto d = diagonal_limit_EG(p.w, p.F, 1);
    EXPECT_LE(d.E, diagonal_eta * d.sE);
    EXPECT_LE(d.G, diagonal_eta * d.sG);
}

TEST(RhoTerms, ConsistentWithAbForm)
{
    for (const auto& e : catalog()) {
        for (double s : e.sample_sigmas) {
            const auto p = e.pair(s);
            for (double rho : {0.01, 0.1, 0.37, 0.6, 0.93}) {
                const auto al = alpha_at(p.w, rho);
                const double beta = beta_of_family(p.spec, rho), beta_a = beta_a_of_family(p.spec, rho);
                const auto r = rho_terms(al.alpha, al.alpha_a, beta, beta_a, s, rho);
                const auto wj = p.w.jet(rho, 1.0);
                const auto Fj = p.F.jet(rho, 1.0);
                const auto t = terms_scaled(wj, Fj, rho, 1.0);
                const double k = wj.db * Fj.db;
                const double L = (beta * rho + 1) * (1 - rho);
                const std::string where = e.name + " s=" + std::to_string(s) + " rho=" + std::to_string(rho);
                // vanishing candidates have C = 0 up to rounding, so compare against the constituent scale
                EXPECT_LE(std::fabs(r.C * k / std::fabs(s) - t.C), 1e-9 * t.sC) << where;
                EXPECT_LE(std::fabs(r.E * k / L - t.E), 1e-9 * t.sE) << where;
                EXPECT_LE(std::fabs(r.G * k / (al.alpha * al.alpha * L) - t.G), 1e-9 * t.sG) << where;
                EXPECT_EQ(r.form, Form::rho);
            }
        }
    }
}

TEST(AlphaProfile, AndrewsIsAlpha1)
{
    const auto p = alpha_profile(andrews(), make_grid({64, 0, 1e-6, 0}));
    EXPECT_EQ(p.asymptotics.cls, AlphaClass::alpha1);
    EXPECT_NEAR(p.asymptotics.c, 1, 1e-6);
    EXPECT_TRUE(p.asymptotics.derivative_consistent);
    EXPECT_EQ(p.samples.size(), 64u);
}

TEST(AlphaProfile, SchnurerIsAlpha3)
{
    const auto a = fit_alpha_asymptotics(parse_expression("(a-b)^2/(a*b)^2"));
    EXPECT_EQ(a.cls, AlphaClass::alpha3);
    EXPECT_NEAR(a.c, 1, 1e-6);
    EXPECT_NEAR(a.d, 0, 1e-4);
}

TEST(AlphaProfile, SchulzeIsAlpha2WithInverseSigma)
{
    const auto a = fit_alpha_asymptotics(lookup("schulze-mean").candidate(3));
    EXPECT_EQ(a.cls, AlphaClass::alpha2);
    EXPECT_NEAR(a.c, 1.0 / 3, 1e-4);
    EXPECT_TRUE(a.derivative_consistent);
}

TEST(AlphaProfile, PositiveForCatalogMpf)
{
    const auto grid = make_grid({512, 64, 1e-6, 0});
    for (const auto& e : catalog()) {
        if (e.expected != Expected::mpf) continue;
        for (double s : e.sample_sigmas) {
            const auto p = alpha_profile(e.candidate(s), grid);
            EXPECT_GT(p.min_alpha, 0) << e.name << " s=" << s;
        }
    }
}

TEST(AlphaProfile, InverseSigmaForContractingPositiveXi)
{
    for (const auto& e : catalog()) {
        if (e.expected != Expected::mpf) continue;
        for (double s : e.sample_sigmas) {
            const auto spec = e.family.spec(s);
            if (!(s > 1 && spec.xi > 0) || e.name.rfind("nonvanishing", 0) == 0) continue;
            const auto a = fit_alpha_asymptotics(e.candidate(s));
            EXPECT_EQ(a.cls, AlphaClass::alpha2) << e.name;
            EXPECT_NEAR(a.c, 1 / s, 1e-4) << e.name << " s=" << s;
        }
    }
}

TEST(AlphaBound, LeadingOrders)
{
    const double rho = 1e-7;
    const auto pos = alpha_bound(1, 3, rho);
    EXPECT_EQ(pos.direction, BoundDirection::lower);
    EXPECT_NEAR(pos.value * 3 * rho, 1, 1e-5);
    const auto flat = alpha_bound(0, 2, rho);
    EXPECT_EQ(flat.direction, BoundDirection::lower);
    EXPECT_NEAR(flat.value, 1, 1e-5);
    // for xi = 0 the bound is B/(rho A) = (2 - sigma)/(sigma rho) to leading order
    const auto con = alpha_bound(0, 1.5, rho);
    EXPECT_NEAR(con.value * rho, (2 - 1.5) / 1.5, 1e-5);
    const auto exp = alpha_bound(0, -1, rho);
    EXPECT_EQ(exp.direction, BoundDirection::lower);
    EXPECT_NEAR(exp.value * rho, -3, 1e-5);
    EXPECT_THROW(alpha_bound(1, 0, 0.5), std::invalid_argument);
}

TEST(CheckMpf, AndrewsWithGaussPasses)
{
    const auto rep = check_mpf(andrews(), gauss2(), VelocityFamilySpec{0, 2});
    EXPECT_TRUE(rep.passed());
    for (int i = 0; i < 5; ++i) EXPECT_EQ(rep[i].status, Status::pass) << "condition " << i + 1;
    EXPECT_EQ(rep.alpha.cls, AlphaClass::alpha1);
}

TEST(CheckMpf, AndrewsWithMeanFailsConstantTerm)
{
    const auto rep = check_mpf(andrews(), make_velocity({1, 1}), VelocityFamilySpec{1, 1});
    EXPECT_EQ(rep.overall, Status::fail);
    EXPECT_EQ(rep[3].status, Status::fail);
    EXPECT_TRUE(rep[3].rho.has_value() || rep[3].ab.has_value());
    EXPECT_GT(rep[3].margin, 0);
}

TEST(CheckMpf, SchnurerInverseMeanPasses)
{
    const auto rep = check_mpf(parse_expression("(a-b)^2/((a+b)*a*b)"), make_velocity({1, -1}), VelocityFamilySpec{1, -1});
    EXPECT_TRUE(rep.passed());
    EXPECT_FALSE(rep.contracting);
}

TEST(CheckMpf, GenericVanishingFailsForMeanSeven)
{
    const auto p = lookup("generic-vanishing").pair(7);
    const auto rep = check_mpf(p.w, p.F, p.spec);
    EXPECT_EQ(rep.overall, Status::fail);
    EXPECT_TRUE(rep[3].status == Status::fail || rep[4].status == Status::fail);
}

TEST(CheckMpf, ReportIsDeterministic)
{
    const auto p = lookup("li-gauss").pair(-1);
    const auto x = to_json(check_mpf(p.w, p.F, p.spec, {256, 64, 1e-6, 9}));
    const auto y = to_json(check_mpf(p.w, p.F, p.spec, {256, 64, 1e-6, 9}));
    EXPECT_EQ(x.dump(), y.dump());
}

TEST(Grid, LayoutAndSeed)
{
    const auto g = make_grid({});
    ASSERT_EQ(g.size(), 2048u + 512u);
    EXPECT_NEAR(g.front(), 1e-6, 1e-18);
    EXPECT_NEAR(g[2047], 1 - 1e-6, 1e-15);
    for (double r : g) {
        EXPECT_GT(r, 0);
        EXPECT_LT(r, 1);
    }
    EXPECT_NE(make_grid({4, 4, 1e-6, 1}).back(), make_grid({4, 4, 1e-6, 2}).back());
}
