// SPDX-License-Identifier: MIT
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "expression.hpp"
#include "velocity.hpp"

namespace mpf {

// ---------------------------------------------------------------------------
// C, E, G in (a,b)-form
// ---------------------------------------------------------------------------

enum class Form { ab, rho };

struct TermTriple
{
    double C = 0, E = 0, G = 0;
    double a = 0, b = 0;  // ab-form location
    double rho = 0;       // rho-form location
    Form form = Form::ab;
};

/// Terms together with the largest absolute additive constituent of each (the local scale).
template <class T>
struct ScaledTerms
{
    T C{0}, E{0}, G{0};
    T sC{0}, sE{0}, sG{0};
    T alpha{0};
};

namespace detail {

template <class T>
T max_abs(std::initializer_list<T> xs)
{
    using std::abs;
    T m{0};
    for (const auto& x : xs) m = std::max<T>(m, abs(x));
    return m;
}

}  // namespace detail

template <class T>
ScaledTerms<T> constant_term_scaled(const Jet2<T>& w, const Jet2<T>& F, const T& a, const T& b)
{
    ScaledTerms<T> s;
    const T c1 = F.value * w.da * a * a;
    const T c2 = F.value * w.db * b * b;
    const T c3 = F.da * w.db * a * b * (a - b);
    const T c4 = -F.db * w.da * a * b * (a - b);
    s.C = c1 + c2 + c3 + c4;
    s.sC = detail::max_abs<T>({c1, c2, c3, c4});
    return s;
}

/// E and G need a != b and w_b != 0.
template <class T>
ScaledTerms<T> terms_scaled(const Jet2<T>& w, const Jet2<T>& F, const T& a, const T& b)
{
    auto s = constant_term_scaled(w, F, a, b);
    const T al = -w.da / w.db;
    const T q = (w.db * F.da - w.da * F.db) / (a - b);
    s.alpha = al;

    const T e[7] = {w.da * F.daa,        T(2) * w.da * F.dab * al, w.da * F.dbb * al * al, -F.da * w.daa,
                    -T(2) * F.da * w.dab * al, -F.da * w.dbb * al * al,  T(2) * q * al * al};
    const T ia2 = T(1) / (al * al);
    const T g[7] = {w.db * F.daa * ia2,        T(2) * w.db * F.dab / al, w.db * F.dbb, -F.db * w.daa * ia2,
                    -T(2) * F.db * w.dab / al, -F.db * w.dbb,            T(2) * q * ia2};
    for (int i = 0; i < 7; ++i) {
        using std::abs;
        s.E += e[i];
        s.G += g[i];
        s.sE = std::max<T>(s.sE, abs(e[i]));
        s.sG = std::max<T>(s.sG, abs(g[i]));
    }
    return s;
}

inline double constant_term_C(const CurvatureFunction& w, const CurvatureFunction& F, double a, double b)
{
    return constant_term_scaled(w.jet(a, b), F.jet(a, b), a, b).C;
}

inline std::pair<double, double> gradient_terms_EG(const CurvatureFunction& w, const CurvatureFunction& F, double a,
                                                   double b)
{
    if (a == b) throw domain_error("gradient_terms_EG: diagonal input, use diagonal_limit_EG");
    const auto wj = w.jet(a, b);
    if (wj.db == 0) throw domain_error("gradient_terms_EG: w_b vanishes, alpha undefined");
    const auto s = terms_scaled(wj, F.jet(a, b), a, b);
    return {s.E, s.G};
}

inline TermTriple ab_terms(const CurvatureFunction& w, const CurvatureFunction& F, double a, double b)
{
    const auto s = terms_scaled(w.jet(a, b), F.jet(a, b), a, b);
    TermTriple t;
    t.C = s.C; t.E = s.E; t.G = s.G;
    t.a = a; t.b = b; t.rho = a / b;
    return t;
}

struct DiagonalLimit
{
    double E = 0, G = 0;
    double sE = 0, sG = 0;
};

/// One-sided limit along b = a(1+h), h in {1e-4, 5e-5}, with one Richardson step.
inline DiagonalLimit diagonal_limit_EG(const CurvatureFunction& w, const CurvatureFunction& F, double a)
{
    auto at = [&](double h) {
        const double b = a * (1 + h);
        return terms_scaled(w.jet(a, b), F.jet(a, b), a, b);
    };
    const auto t1 = at(1e-4), t2 = at(5e-5);
    return {2 * t2.E - t1.E, 2 * t2.G - t1.G, t2.sE, t2.sG};
}

// ---------------------------------------------------------------------------
// rho-form
// ---------------------------------------------------------------------------

template <class T>
struct RhoTerms
{
    T C, E, G;
};

template <class T>
RhoTerms<T> rho_terms_t(const T& alpha, const T& alpha_a, const T& beta, const T& beta_a, const T& sigma, const T& rho)
{
    const T sg = sigma > T(0) ? T(1) : T(-1);
    const T one(1), two(2);
    const T ar1 = alpha * rho - one;
    const T br1 = beta * rho + one;
    const T om = one - rho;
    RhoTerms<T> r;
    r.C = sg * ((-alpha * rho * rho + one) * br1 + (alpha + beta) * (rho - one) * rho * sigma);
    r.E = -alpha_a * beta * ar1 * br1 * om - alpha * beta_a * ar1 * ar1 * om -
          alpha * (alpha + beta) * (alpha * (one + rho + om * sigma) + beta * om * (sigma - one) + two * alpha * beta * rho);
    r.G = -alpha_a * ar1 * br1 * om + beta_a * ar1 * ar1 * om -
          (alpha + beta) * (alpha * om * (one - sigma) + beta * (one + rho - om * sigma) + two);
    return r;
}

inline TermTriple rho_terms(double alpha, double alpha_a, double beta, double beta_a, double sigma, double rho)
{
    const auto r = rho_terms_t<double>(alpha, alpha_a, beta, beta_a, sigma, rho);
    TermTriple t;
    t.C = r.C; t.E = r.E; t.G = r.G;
    t.rho = rho; t.a = rho; t.b = 1;
    t.form = Form::rho;
    return t;
}

// ---------------------------------------------------------------------------
// alpha
// ---------------------------------------------------------------------------

struct AlphaSample
{
    double rho = 0;
    double alpha = 0;
    double alpha_a = 0;
};

template <class T = double>
AlphaSample alpha_at(const CurvatureFunction& w, const T& rho)
{
    const auto j = w.jet<T>(rho, T(1));
    if (j.db == T(0)) throw domain_error("alpha undefined: w_b vanishes");
    const T al = -j.da / j.db;
    const T al_a = -(j.daa * j.db - j.da * j.dab) / (j.db * j.db);
    return {static_cast<double>(rho), static_cast<double>(al), static_cast<double>(al_a)};
}

enum class AlphaClass { alpha1, alpha2, alpha3, unclassified };

inline std::string to_string(AlphaClass c)
{
    switch (c) {
    case AlphaClass::alpha1: return "alpha1";
    case AlphaClass::alpha2: return "alpha2";
    case AlphaClass::alpha3: return "alpha3";
    case AlphaClass::unclassified: return "unclassified";
    }
    return "?";
}

struct AlphaAsymptotics
{
    AlphaClass cls = AlphaClass::unclassified;
    double c = 0;
    double d = 0;
    double fit_residual = std::numeric_limits<double>::infinity();
    double growth = 0;              // estimated exponent p in alpha ~ rho^-p
    bool derivative_consistent = false;
    std::string detail;
};

inline constexpr double alpha_fit_threshold = 1e-3;

/// Fit the rho -> 0 class of alpha from rho_k = 2^-k, k = 10..40.
inline AlphaAsymptotics fit_alpha_asymptotics(const CurvatureFunction& w)
{
    AlphaAsymptotics out;
    std::vector<AlphaSample> s;
    try {
        for (int k = 10; k <= 40; ++k) s.push_back(alpha_at(w, std::ldexp(1.0, -k)));
    } catch (const std::exception& e) {
        out.detail = e.what();
        return out;
    }
    for (const auto& x : s)
        if (!(x.alpha > 0) || !std::isfinite(x.alpha) || !std::isfinite(x.alpha_a)) {
            out.detail = "alpha not positive and finite near rho = 0";
            return out;
        }
    const std::size_t last = s.size() - 1;
    out.growth = std::log2(s[last].alpha / s[last - 1].alpha);
    const double n = std::round(out.growth);
    if (n < 0 || n > 2 || std::fabs(out.growth - n) > 0.05) {
        out.detail = "growth exponent not in {0,1,2}";
        return out;
    }
    auto q = [&](std::size_t i) { return std::pow(s[i].rho, n) * s[i].alpha; };
    out.c = q(last);
    double res = 0;
    for (std::size_t i = last - 9; i <= last; ++i) res = std::max(res, std::fabs(q(i) - out.c) / std::fabs(out.c));
    out.fit_residual = res;
    if (res >= alpha_fit_threshold) {
        out.detail = "dyadic samples do not settle";
        return out;
    }
    const double r = s[last].rho, aa = s[last].alpha_a;
    if (n == 0) {
        out.cls = AlphaClass::alpha1;
        out.derivative_consistent = std::fabs(r * aa) <= alpha_fit_threshold * std::fabs(out.c);
    } else if (n == 1) {
        out.cls = AlphaClass::alpha2;
        out.derivative_consistent = std::fabs(r * r * aa + out.c) <= alpha_fit_threshold * std::fabs(out.c);
    } else {
        out.cls = AlphaClass::alpha3;
        out.derivative_consistent = std::fabs(r * r * r * aa + 2 * out.c) <= alpha_fit_threshold * 2 * std::fabs(out.c);
        // next-order coefficient from a difference quotient at moderate rho, where rounding is harmless
        const std::size_t k = 10;  // rho = 2^-20
        out.d = (q(k) - q(k + 1)) / (s[k].rho - s[k + 1].rho);
    }
    return out;
}

struct AlphaProfile
{
    std::vector<AlphaSample> samples;
    AlphaAsymptotics asymptotics;
    double min_alpha = std::numeric_limits<double>::infinity();
    double argmin_rho = 0;
};

inline AlphaProfile alpha_profile(const CurvatureFunction& w, const std::vector<double>& grid)
{
    AlphaProfile p;
    for (double rho : grid) {
        const auto s = alpha_at(w, rho);
        if (s.alpha < p.min_alpha || std::isnan(s.alpha)) {
            p.min_alpha = s.alpha;
            p.argmin_rho = rho;
        }
        p.samples.push_back(s);
    }
    p.asymptotics = fit_alpha_asymptotics(w);
    return p;
}

enum class BoundDirection { lower, upper };

struct AlphaBound
{
    double value = 0;
    BoundDirection direction = BoundDirection::lower;
    double A = 0, B = 0;
};

/// From C^alpha_beta <= 0: sgn(sigma)(B - alpha rho A) <= 0.
inline AlphaBound alpha_bound(double xi, double sigma, double rho)
{
    if (sigma == 0) throw std::invalid_argument("alpha_bound: sigma must be nonzero");
    snap_xi(xi);
    const double beta = std::pow(rho, xi - 1);
    const double A = sigma + rho * (1 - sigma) + beta * rho * rho;
    const double B = 1 + beta * rho * (1 - sigma + rho * sigma);
    if (A == 0) throw domain_error("alpha_bound: pole, A = 0");
    const bool lower = (sigma > 0) == (A > 0);
    return {B / (rho * A), lower ? BoundDirection::lower : BoundDirection::upper, A, B};
}

// ---------------------------------------------------------------------------
// MPF conditions
// ---------------------------------------------------------------------------

enum class Status { pass, fail, inconclusive };

inline std::string to_string(Status s)
{
    switch (s) {
    case Status::pass: return "pass";
    case Status::fail: return "fail";
    case Status::inconclusive: return "inconclusive";
    }
    return "?";
}

struct GridConfig
{
    std::size_t size = 2048;
    std::size_t random = 512;
    double rho_min = 1e-6;
    std::uint64_t seed = 0;
};

/// Log-uniform rho in [rho_min, 1-rho_min] followed by seeded uniform points.
inline std::vector<double> make_grid(const GridConfig& cfg)
{
    std::vector<double> g;
    g.reserve(cfg.size + cfg.random);
    const double l0 = std::log(cfg.rho_min), l1 = std::log1p(-cfg.rho_min);
    for (std::size_t i = 0; i < cfg.size; ++i) {
        const double t = cfg.size == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(cfg.size - 1);
        g.push_back(std::exp(l0 + t * (l1 - l0)));
    }
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> u(cfg.rho_min, 1 - cfg.rho_min);
    for (std::size_t i = 0; i < cfg.random; ++i) g.push_back(u(rng));
    return g;
}

struct ConditionResult
{
    Status status = Status::inconclusive;
    std::optional<double> rho;
    std::optional<Pair> ab;
    double margin = 0;
    std::string detail;
};

struct ConditionReport
{
    std::array<ConditionResult, 5> conditions;  // I..V
    Status overall = Status::inconclusive;
    double chi = 0;
    bool contracting = true;
    AlphaAsymptotics alpha;
    double min_alpha = 0;
    double min_alpha_rho = 0;

    bool passed() const { return overall == Status::pass; }
    const ConditionResult& operator[](int i) const { return conditions[static_cast<std::size_t>(i)]; }
};

inline constexpr double default_eta = 1e-9;
inline constexpr double band_factor = 1e3;     // inconclusive for eta < T/S <= 1e3 eta
inline constexpr double diagonal_eta = 1e-6;   // Richardson error of the diagonal limit

namespace detail {

inline Status band(double r, double eta)
{
    if (!std::isfinite(r)) return Status::inconclusive;
    if (r <= eta) return Status::pass;
    if (r <= band_factor * eta) return Status::inconclusive;
    return Status::fail;
}

inline Status combine(Status a, Status b)
{
    if (a == Status::fail || b == Status::fail) return Status::fail;
    if (a == Status::inconclusive || b == Status::inconclusive) return Status::inconclusive;
    return Status::pass;
}

}  // namespace detail

inline ConditionReport check_mpf(const CurvatureFunction& w, const CurvatureFunction& F,
                                 std::optional<VelocityFamilySpec> spec = std::nullopt,
                                 const GridConfig& cfg = {}, double eta = default_eta)
{
    ConditionReport rep;
    rep.contracting = spec ? spec->contracting() : F(1, 1) > 0;
    const auto grid = make_grid(cfg);

    // (I) positive off the diagonal, zero on it
    {
        auto& r = rep.conditions[0];
        r.status = Status::pass;
        double worst = std::numeric_limits<double>::infinity();
        for (double rho : grid) {
            double v;
            try {
                v = w(rho, 1);
            } catch (const std::exception& e) {
                r.status = Status::fail;
                r.rho = rho;
                r.detail = e.what();
                break;
            }
            if (v < worst || std::isnan(v)) {
                worst = v;
                r.rho = rho;
            }
            if (!(v > 0)) r.status = Status::fail;
        }
        r.margin = worst;
        if (r.status == Status::pass)
            for (double t : {0.5, 1.0, 2.0, 10.0}) {
                const double on = w(t, t), off = w(t, 2 * t);
                if (std::fabs(on) > eta * std::fabs(off)) {
                    r.status = Status::fail;
                    r.ab = Pair{t, t};
                    r.rho.reset();
                    r.margin = on;
                    r.detail = "w does not vanish on the diagonal";
                }
            }
    }

    // (II) sign of the degree
    {
        auto& r = rep.conditions[1];
        if (w.degree_hint()) {
            rep.chi = *w.degree_hint();
            r.detail = "degree read off the expression";
        } else {
            rep.chi = estimate_degree(w, log_uniform_pairs(200, cfg.seed)).degree;
            r.detail = "degree estimated from Euler quotients";
        }
        r.margin = rep.chi;
        const bool ok = rep.contracting ? rep.chi > 1e-9 : rep.chi < -1e-9;
        r.status = ok ? Status::pass : Status::fail;
    }

    // (III) sign of w_a on both sides of the diagonal
    {
        auto& r = rep.conditions[2];
        double worst = -std::numeric_limits<double>::infinity();
        bool failed_eval = false;
        for (double rho : grid) {
            try {
                const auto below = w.jet(rho, 1.0);  // a < b: need w_a < 0
                const auto above = w.jet(1.0, rho);  // a > b: need w_a > 0
                // Euler weights: a w_a and b w_b share the degree of w
                const double r1 = rho * below.da / (std::fabs(rho * below.da) + std::fabs(below.db));
                const double r2 = -above.da / (std::fabs(above.da) + std::fabs(rho * above.db));
                const double m = std::max(r1, r2);
                if (m > worst || std::isnan(m)) {
                    worst = std::isnan(m) ? std::numeric_limits<double>::infinity() : m;
                    r.rho = rho;
                }
            } catch (const std::exception& e) {
                failed_eval = true;
                r.rho = rho;
                r.detail = e.what();
                break;
            }
        }
        r.margin = worst;
        if (failed_eval || worst > eta) r.status = Status::fail;
        else if (worst > -eta) r.status = Status::inconclusive;
        else r.status = Status::pass;
    }

    // (IV) C, E, G non-positive
    {
        auto& r = rep.conditions[3];
        double worst = -std::numeric_limits<double>::infinity();
        std::string which;
        Status st = Status::pass;
        for (double rho : grid) {
            ScaledTerms<double> s;
            try {
                s = terms_scaled(w.jet(rho, 1.0), F.jet(rho, 1.0), rho, 1.0);
            } catch (const std::exception& e) {
                st = Status::fail;
                r.rho = rho;
                r.detail = e.what();
                break;
            }
            const double rc = s.sC > 0 ? s.C / s.sC : (s.C == 0 ? 0.0 : std::copysign(1.0, s.C));
            const double re = s.E / s.sE, rg = s.G / s.sG;
            for (auto [val, name] : {std::pair{rc, "C"}, std::pair{re, "E"}, std::pair{rg, "G"}}) {
                const double v = std::isnan(val) ? std::numeric_limits<double>::infinity() : val;
                if (v > worst) {
                    worst = v;
                    which = name;
                    r.rho = rho;
                }
                st = detail::combine(st, detail::band(val, eta));
            }
        }
        const auto dl = diagonal_limit_EG(w, F, 1.0);
        const double rd = std::max(dl.E / dl.sE, dl.G / dl.sG);
        const Status sd = detail::band(rd, diagonal_eta);
        r.status = detail::combine(st, sd);
        r.margin = worst;
        if (r.detail.empty()) r.detail = "worst term " + which;
        if (sd != Status::pass && st == Status::pass) {
            r.rho = 1.0;
            r.margin = rd;
            r.detail = "diagonal limit";
        }
    }

    // (V) alpha asymptotic class
    {
        auto& r = rep.conditions[4];
        rep.alpha = fit_alpha_asymptotics(w);
        const auto& a = rep.alpha;
        r.margin = a.fit_residual;
        r.rho = std::ldexp(1.0, -40);
        if (a.cls == AlphaClass::unclassified) {
            r.status = Status::inconclusive;
            r.detail = a.detail;
        } else if (!(a.c > 0)) {
            r.status = Status::fail;
            r.detail = "c not positive";
        } else {
            const bool admissible = rep.contracting ? a.cls != AlphaClass::alpha3 : a.cls != AlphaClass::alpha1;
            if (!admissible) {
                r.status = Status::fail;
                r.detail = to_string(a.cls) + " is not admissible for a " +
                           (rep.contracting ? "contracting" : "expanding") + " velocity";
            } else if (!a.derivative_consistent) {
                r.status = Status::inconclusive;
                r.detail = "alpha_a does not follow " + to_string(a.cls);
            } else {
                r.status = Status::pass;
                r.detail = to_string(a.cls);
            }
        }
    }

    // alpha positivity on the grid, reported alongside
    rep.min_alpha = std::numeric_limits<double>::infinity();
    for (double rho : grid) {
        try {
            const double al = alpha_at(w, rho).alpha;
            if (al < rep.min_alpha || std::isnan(al)) {
                rep.min_alpha = al;
                rep.min_alpha_rho = rho;
            }
        } catch (const std::exception&) {
            rep.min_alpha = std::numeric_limits<double>::quiet_NaN();
            rep.min_alpha_rho = rho;
            break;
        }
    }

    Status all = Status::pass;
    for (const auto& c : rep.conditions) all = detail::combine(all, c.status);
    rep.overall = all;
    return rep;
}

inline nlohmann::json to_json(const ConditionReport& rep)
{
    static const char* names[5] = {"I", "II", "III", "IV", "V"};
    nlohmann::json j;
    for (int i = 0; i < 5; ++i) {
        const auto& c = rep[i];
        nlohmann::json wit = nlohmann::json::object();
        if (c.rho) wit["rho"] = *c.rho;
        if (c.ab) wit["a"] = c.ab->a, wit["b"] = c.ab->b;
        j[names[i]] = {{"verdict", to_string(c.status)}, {"witness", wit}, {"margin", c.margin}, {"detail", c.detail}};
    }
    j["overall"] = to_string(rep.overall);
    j["chi"] = rep.chi;
    j["contracting"] = rep.contracting;
    j["alpha"] = {{"class", to_string(rep.alpha.cls)},
                  {"c", rep.alpha.c},
                  {"d", rep.alpha.d},
                  {"fit_residual", rep.alpha.fit_residual},
                  {"min_on_grid", rep.min_alpha},
                  {"argmin_rho", rep.min_alpha_rho}};
    return j;
}

}  // namespace mpf
