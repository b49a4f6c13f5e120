// SPDX-License-Identifier: MIT
#pragma once

#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "velocity.hpp"

namespace mpf {

struct Interval
{
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    bool lo_closed = false;
    bool hi_closed = false;

    static Interval point(double x) { return {x, x, true, true}; }

    bool contains(double x) const
    {
        const bool above = lo_closed ? x >= lo : x > lo;
        const bool below = hi_closed ? x <= hi : x < hi;
        return above && below;
    }

    std::string to_string() const
    {
        if (lo == hi && lo_closed && hi_closed) return "{" + format_number(lo) + "}";
        auto num = [](double v) {
            if (std::isinf(v)) return std::string(v > 0 ? "inf" : "-inf");
            return format_number(v);
        };
        return std::string(lo_closed ? "[" : "(") + num(lo) + ", " + num(hi) + (hi_closed ? "]" : ")");
    }
};

enum class Expected { mpf, vanishing_only, non_mpf };

inline std::string to_string(Expected e)
{
    switch (e) {
    case Expected::mpf: return "MPF";
    case Expected::vanishing_only: return "vanishing-only";
    case Expected::non_mpf: return "non-MPF";
    }
    return "?";
}

/// Which velocity a catalog candidate is paired with. sigma is always the parameter s.
struct FamilyRule
{
    enum class Kind { fixed_xi, xi_equals_sigma } kind = Kind::fixed_xi;
    double xi = 1;

    VelocityFamilySpec spec(double s) const { return {kind == Kind::xi_equals_sigma ? s : xi, s}; }
    std::string family_name() const
    {
        if (kind == Kind::xi_equals_sigma) return "trace";
        if (xi == 0) return "gauss";
        if (xi == 1) return "mean";
        if (xi == 2) return "norm";
        return "xi=" + format_number(xi);
    }
};

struct CandidatePair
{
    CurvatureFunction w;
    CurvatureFunction F;
    VelocityFamilySpec spec;
};

struct CatalogEntry
{
    std::string name;
    std::string expression;  // grammar text in a, b, s; empty for the generic vanishing family
    FamilyRule family;
    Interval sigma_range;
    std::string provenance;
    Expected expected = Expected::mpf;
    std::vector<double> sample_sigmas;
    std::string note;

    bool generic_vanishing() const { return expression.empty(); }

    CurvatureFunction velocity(double s) const { return make_velocity(family.spec(s)); }

    CurvatureFunction candidate(double s) const
    {
        if (generic_vanishing()) return vanishing_function(velocity(s));
        return parse_expression(expression, s);
    }

    CandidatePair pair(double s) const { return {candidate(s), velocity(s), family.spec(s)}; }

    std::string display_expression() const
    {
        return generic_vanishing() ? "(a-b)^2*F^2/(a*b)^2" : expression;
    }
};

namespace detail {

inline std::vector<CatalogEntry> build_catalog()
{
    using K = FamilyRule::Kind;
    const FamilyRule gauss{K::fixed_xi, 0}, mean{K::fixed_xi, 1}, norm{K::fixed_xi, 2}, trace{K::xi_equals_sigma, 0};
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<CatalogEntry> c;

    c.push_back({"andrews-gauss", "(a-b)^2", gauss, Interval::point(2), "B. Andrews", Expected::mpf, {2}, ""});
    c.push_back({"andrews-chen-gauss", "(a-b)^2*(a*b)^s/(a*b)^2", gauss, {1, 2, false, false},
                 "B. Andrews, X. Chen", Expected::mpf, {1.25, 1.5, 1.75}, ""});
    c.push_back({"li-gauss", "(a-b)^2*(a*b)^(s/2)/(a*b)", gauss, {-2, 0, false, false}, "Q. Li", Expected::mpf,
                 {-1.5, -1, -0.5}, ""});
    c.push_back({"schnurer-gauss", "(a-b)^2/(a*b)^2", gauss, Interval::point(-2), "O. Schnurer", Expected::mpf,
                 {-2}, ""});

    c.push_back({"schulze-mean", "(a-b)^2*(a+b)^(2*s)/(a*b)^2", mean, {1, 5.17, false, true},
                 "O. Schnurer, F. Schulze", Expected::mpf, {1.5, 2, 3, 4, 5, 5.17}, ""});
    c.push_back({"nonvanishing-mean-2", "(a-b)^2*(a^2+4*a*b+b^2)/((a+b)*(a*b))", mean, Interval::point(2),
                 "non-vanishing construction", Expected::mpf, {2}, ""});
    c.push_back({"nonvanishing-mean-3", "(a-b)^2*(a+b)^2*(a^2+a*b+b^2)/((a^2-a*b+b^2)*(a*b))", mean,
                 Interval::point(3), "O. Schnurer", Expected::mpf, {3},
                 "printed as (a-b)^2*(a+b)^2*(a^2+2*a*b+b^2)/((a^2-a*b+b^2)*(a*b)), which has C>0 near rho=0.135"});
    c.push_back({"nonvanishing-mean-4", "(a-b)^2*(a+b)^6*(a^2+a*b+b^2)/(a*b)^2", mean, Interval::point(4),
                 "O. Schnurer", Expected::mpf, {4}, ""});
    c.push_back({"nonvanishing-mean-5", "(a-b)^2*(a+b)^2*(16*(a+b)^8-(a*b)^4)/(a*b)^2", mean, Interval::point(5),
                 "non-vanishing construction", Expected::mpf, {5}, ""});
    c.push_back({"expanding-mean", "(a-b)^2*(a^2+b^2)*(a*b)^(s-2)/(a+b)", mean, {-1, 0, false, false},
                 "expanding construction", Expected::mpf, {-0.75, -0.5, -0.25}, ""});
    c.push_back({"schnurer-mean-inverse", "(a-b)^2/((a+b)*a*b)", mean, Interval::point(-1), "O. Schnurer",
                 Expected::mpf, {-1}, ""});

    c.push_back({"andrews-chen-norm", "(a-b)^2*(a^2+b^2)^s/(a*b)^2", norm, {1, 8.15, false, true},
                 "B. Andrews, X. Chen", Expected::mpf, {1.5, 2, 4, 8, 8.14},
                 "sharp upper end is about 8.1440; the stored range keeps the printed 8.15"});
    c.push_back({"expanding-norm", "(a-b)^2*(a^3+b^3)*(a*b)^s/(sqrt(a^2+b^2)*(a*b)^2)", norm, {-1, 0, true, false},
                 "expanding construction", Expected::mpf, {-1, -0.5, -0.25}, ""});

    c.push_back({"andrews-chen-trace", "(a-b)^2*(a^s+b^s)^2/(a*b)^2", trace, {1, inf, false, false},
                 "B. Andrews, X. Chen", Expected::mpf, {1.5, 2, 3, 5}, ""});
    c.push_back({"schnurer-trace-inverse", "(a-b)^2/(a*b)^2", trace, Interval::point(-1), "O. Schnurer",
                 Expected::mpf, {-1}, ""});

    c.push_back({"generic-vanishing", "", mean, {-inf, inf, false, false}, "O. Schnurer, F. Schulze; B. Andrews, X. Chen",
                 Expected::vanishing_only, {7}, "C vanishes identically for every velocity F"});

    // expected failures
    c.push_back({"andrews-vs-mean", "(a-b)^2", mean, Interval::point(1), "degree-one obstruction",
                 Expected::non_mpf, {1}, ""});
    c.push_back({"andrews-vs-gauss-sqrt", "(a-b)^2", gauss, {0, 1, false, true}, "degree obstruction",
                 Expected::non_mpf, {1, 0.5}, ""});
    c.push_back({"andrews-chen-gauss-beyond", "(a-b)^2*(a*b)^s/(a*b)^2", gauss, {2, inf, false, false},
                 "no MPF for K^(s/2), s>2", Expected::non_mpf, {3}, ""});
    return c;
}

}  // namespace detail

inline const std::vector<CatalogEntry>& catalog()
{
    static const std::vector<CatalogEntry> entries = detail::build_catalog();
    return entries;
}

inline const CatalogEntry& lookup(const std::string& name)
{
    for (const auto& e : catalog())
        if (e.name == name) return e;
    throw std::out_of_range("unknown catalog entry: " + name);
}

inline nlohmann::json to_json(const Interval& i)
{
    auto num = [](double v) -> nlohmann::json {
        if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
        return v;
    };
    return {{"lo", num(i.lo)}, {"hi", num(i.hi)}, {"lo_closed", i.lo_closed}, {"hi_closed", i.hi_closed},
            {"text", i.to_string()}};
}

inline nlohmann::json to_json(const CatalogEntry& e)
{
    nlohmann::json fam;
    if (e.family.kind == FamilyRule::Kind::xi_equals_sigma) fam = {{"xi", "sigma"}, {"name", "trace"}};
    else fam = {{"xi", e.family.xi}, {"name", e.family.family_name()}};
    nlohmann::json j{{"name", e.name},
                     {"expression", e.display_expression()},
                     {"family", fam},
                     {"sigma_range", to_json(e.sigma_range)},
                     {"provenance", e.provenance},
                     {"expected_verdict", to_string(e.expected)}};
    if (!e.note.empty()) j["note"] = e.note;
    return j;
}

inline nlohmann::json catalog_json()
{
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& e : catalog()) arr.push_back(to_json(e));
    return {{"version", 1}, {"entries", arr}};
}

}  // namespace mpf
