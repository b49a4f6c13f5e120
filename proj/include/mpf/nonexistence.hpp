// SPDX-License-Identifier: MIT
#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <json.hpp>

#include "catalog.hpp"
#include "conditions.hpp"
#include "polynomial.hpp"
#include "vanishing.hpp"

namespace mpf {

// ---------------------------------------------------------------------------
// Limit table of the necessary conditions
// ---------------------------------------------------------------------------

using HighFloat = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<250>>;

struct XiRegime
{
    double lo, hi;
    bool lo_in, hi_in;
    std::string text;

    bool contains(double x) const
    {
        return (lo_in ? x >= lo : x > lo) && (hi_in ? x <= hi : x < hi);
    }
};

namespace detail {

inline XiRegime xi_gt(double x, const std::string& t) { return {x, std::numeric_limits<double>::infinity(), false, false, "xi>" + t}; }
inline XiRegime xi_lt(double x, const std::string& t) { return {-std::numeric_limits<double>::infinity(), x, false, false, "xi<" + t}; }
inline XiRegime xi_eq(double x, const std::string& t) { return {x, x, true, true, "xi=" + t}; }
inline XiRegime xi_in(double a, double b, const std::string& ta, const std::string& tb)
{
    return {a, b, false, false, ta + "<xi<" + tb};
}

}  // namespace detail

using ScalingFn = std::function<double(double xi)>;
using LimitFn = std::function<double(double s, double c, double d, double xi)>;

struct LimitDef
{
    AlphaClass cls;
    char quantity;
    XiRegime regime;
    std::vector<double> sample_xi;
    ScalingFn scaling;
    LimitFn value;
    std::string formula;
    // as printed; equal to the above unless flagged
    ScalingFn printed_scaling;
    LimitFn printed_value;
    std::string printed_formula;
    std::string note;

    std::string id() const { return to_string(cls) + "/" + quantity + "/" + regime.text; }
    bool flagged() const { return !note.empty(); }
};

namespace detail {

inline double sgn(double s) { return s > 0 ? 1 : -1; }

inline std::vector<LimitDef> build_limit_defs()
{
    using A = AlphaClass;
    std::vector<LimitDef> t;
    auto add = [&](A cls, char q, XiRegime reg, std::vector<double> xs, ScalingFn p, LimitFn v, std::string f) {
        t.push_back({cls, q, std::move(reg), std::move(xs), p, v, f, p, v, f, ""});
    };
    auto cst = [](double k) -> ScalingFn { return [k](double) { return k; }; };

    // alpha1: alpha -> c
    add(A::alpha1, 'C', xi_gt(-1, "-1"), {-0.5, 0.5, 2}, cst(0), [](double s, double, double, double) { return sgn(s); },
        "sgn(s)");
    add(A::alpha1, 'C', xi_eq(-1, "-1"), {-1}, cst(0),
        [](double s, double, double, double) { return sgn(s) * (2 - s); }, "sgn(s)(2-s)");
    add(A::alpha1, 'C', xi_lt(-1, "-1"), {-1.5, -3}, [](double x) { return -(x + 1); },
        [](double s, double, double, double) { return sgn(s) * (1 - s); }, "sgn(s)(1-s)");
    add(A::alpha1, 'E', xi_gt(1, "1"), {1.5, 3}, cst(0),
        [](double s, double c, double, double) { return -c * c * c * (s + 1); }, "-c^3(s+1)");
    add(A::alpha1, 'G', xi_gt(1, "1"), {1.5, 3}, cst(0),
        [](double s, double c, double, double) { return c * (c * (s - 1) - 2); }, "c(c(s-1)-2)");
    add(A::alpha1, 'E', xi_eq(1, "1"), {1}, cst(0),
        [](double s, double c, double, double) { return -c * (c * c * (s + 1) + 1); }, "-c(c^2(s+1)+1)");
    add(A::alpha1, 'G', xi_eq(1, "1"), {1}, cst(0),
        [](double s, double c, double, double) { return c * (c * (s - 1) - 2) + 1; }, "c(c(s-1)-2)+1");
    add(A::alpha1, 'E', xi_in(0, 1, "0", "1"), {0.5}, [](double x) { return 1 - x; },
        [](double, double c, double, double x) { return -c * x; }, "-c xi");
    add(A::alpha1, 'G', xi_in(0, 1, "0", "1"), {0.5}, [](double x) { return 1 - x; },
        [](double, double, double, double x) { return x; }, "xi");
    add(A::alpha1, 'E', xi_eq(0, "0"), {0}, cst(0),
        [](double s, double c, double, double) { return -c * (c + 1) * (c * (s + 1) + s - 1); },
        "-c(c+1)(c(s+1)+s-1)");
    add(A::alpha1, 'G', xi_eq(0, "0"), {0}, cst(0),
        [](double s, double c, double, double) { return (c + 1) * (c * (s - 1) + s - 3); }, "(c+1)(c(s-1)+s-3)");
    add(A::alpha1, 'E', xi_in(-1, 0, "-1", "0"), {-0.5}, [](double x) { return 1 - x; },
        [](double, double c, double, double x) { return -c * x; }, "-c xi");
    add(A::alpha1, 'G', xi_in(-1, 0, "-1", "0"), {-0.5}, [](double x) { return 1 - x; },
        [](double, double, double, double x) { return x; }, "xi");
    add(A::alpha1, 'E', xi_eq(-1, "-1"), {-1}, cst(2),
        [](double s, double c, double, double) { return -c * (s - 2); }, "-c(s-2)");
    add(A::alpha1, 'G', xi_eq(-1, "-1"), {-1}, cst(2), [](double s, double, double, double) { return s - 2; },
        "s-2");
    add(A::alpha1, 'E', xi_lt(-1, "-1"), {-1.5, -3}, [](double x) { return -2 * x; },
        [](double s, double c, double, double) { return -c * (s - 1); }, "-c(s-1)");
    add(A::alpha1, 'G', xi_lt(-1, "-1"), {-1.5, -3}, [](double x) { return -2 * x; },
        [](double s, double, double, double) { return s - 1; }, "s-1");

    // alpha2: alpha = c/rho
    add(A::alpha2, 'C', xi_gt(-1, "-1"), {-0.5, 0, 0.5, 2}, cst(0),
        [](double s, double c, double, double) { return -sgn(s) * (c * s - 1); }, "-sgn(s)(c s-1)");
    add(A::alpha2, 'C', xi_eq(-1, "-1"), {-1}, cst(0),
        [](double s, double c, double, double) { return -sgn(s) * (c * s + s - 2); }, "-sgn(s)(c s+s-2)");
    add(A::alpha2, 'C', xi_lt(-1, "-1"), {-1.5, -3}, [](double x) { return -(x + 1); },
        [](double s, double, double, double) { return sgn(s) * (1 - s); }, "sgn(s)(1-s)");
    t.back().printed_scaling = cst(0);
    t.back().printed_formula = "sgn(s)(1-s) at rho^0";
    t.back().note = "printed without scaling; C grows like rho^(xi+1), the value holds at scaling rho^-(xi+1)";
    add(A::alpha2, 'E', xi_gt(-1, "-1"), {-0.5, 0, 0.5, 2}, cst(3),
        [](double s, double c, double, double) { return -c * c * c * (s + 1); }, "-c^3(s+1)");
    add(A::alpha2, 'G', xi_gt(-1, "-1"), {-0.5, 0, 0.5, 2}, cst(2),
        [](double s, double c, double, double) { return c * (c * s - 1); }, "c(c s-1)");
    t.back().printed_value = [](double s, double c, double, double) { return -(1 - c * s); };
    t.back().printed_formula = "-(-c s+1)";
    t.back().note = "printed value misses a factor c";
    add(A::alpha2, 'E', xi_eq(-1, "-1"), {-1}, cst(3),
        [](double s, double c, double, double) { return -c * (c + 1) * (c * s + 2 * c + s); }, "-c(c+1)(c s+2c+s)");
    add(A::alpha2, 'G', xi_eq(-1, "-1"), {-1}, cst(2),
        [](double s, double c, double, double) { return (c + 1) * (c * s + s - 2); }, "(c+1)(c s+s-2)");
    add(A::alpha2, 'E', xi_lt(-1, "-1"), {-1.5, -3}, [](double x) { return 1 - 2 * x; },
        [](double s, double c, double, double) { return -c * (c + s); }, "-c(c+s)");
    add(A::alpha2, 'G', xi_lt(-1, "-1"), {-1.5, -3}, [](double x) { return -2 * x; },
        [](double s, double, double, double) { return s - 1; }, "s-1");

    // alpha3: alpha = (c + d rho)/rho^2
    add(A::alpha3, 'C', xi_gt(-2, "-2"), {-1.5, -0.5, 1}, cst(1),
        [](double s, double c, double, double) { return c * s; }, "c s");
    add(A::alpha3, 'C', xi_eq(-2, "-2"), {-2}, cst(1),
        [](double s, double c, double, double) { return c * s + c + s - 1; }, "c s+c+s-1");
    add(A::alpha3, 'C', xi_lt(-2, "-2"), {-2.5, -4}, [](double x) { return -(x + 1); },
        [](double s, double c, double, double) { return c + s - 1; }, "c+s-1");
    add(A::alpha3, 'E', xi_gt(-1, "-1"), {-0.5, 0.5, 2}, cst(6),
        [](double s, double c, double, double) { return -c * c * c * (s + 1); }, "-c^3(s+1)");
    add(A::alpha3, 'G', xi_gt(-1, "-1"), {-0.5, 0.5, 2}, cst(4),
        [](double s, double c, double, double) { return c * c * (s + 1); }, "c^2(s+1)");
    add(A::alpha3, 'E', xi_eq(-1, "-1"), {-1}, cst(6),
        [](double s, double c, double, double) { return -c * c * c * (s + 2); }, "-c^3(s+2)");
    add(A::alpha3, 'G', xi_eq(-1, "-1"), {-1}, cst(4),
        [](double s, double c, double, double) { return c * c * (s + 2); }, "c^2(s+2)");
    add(A::alpha3, 'E', xi_in(-2, -1, "-2", "-1"), {-1.5}, [](double x) { return 5 - x; },
        [](double, double c, double, double x) { return -c * c * c * (x + 2); }, "-c^3(xi+2)");
    add(A::alpha3, 'G', xi_in(-2, -1, "-2", "-1"), {-1.5}, [](double x) { return 3 - x; },
        [](double, double c, double, double x) { return c * c * (x + 2); }, "c^2(xi+2)");
    t.back().printed_scaling = [](double x) { return 2 - x; };
    t.back().printed_formula = "c^2(xi+2) at rho^-(xi-2)";
    t.back().note = "printed scaling rho^-(xi-2); the value holds at rho^-(xi-3)";
    add(A::alpha3, 'E', xi_eq(-2, "-2"), {-2}, cst(6),
        [](double s, double c, double d, double) { return -c * (c * c * (s + 3) + 2 * c * (s + 2) + s + 1 + d); },
        "-c(c^2(s+3)+2c(s+2)+s+1+d)");
    add(A::alpha3, 'G', xi_eq(-2, "-2"), {-2}, cst(4),
        [](double s, double c, double d, double) { return c * c * (s + 1) + 2 * c * s + s - 1 - c * d; },
        "c^2(s+1)+2c s+s-1-c d");
    add(A::alpha3, 'E', xi_in(-3, -2, "-3", "-2"), {-2.5}, [](double x) { return 5 - x; },
        [](double, double c, double, double x) { return -c * c * c * (x + 2); }, "-c^3(xi+2)");
    add(A::alpha3, 'G', xi_in(-3, -2, "-3", "-2"), {-2.5}, [](double x) { return 3 - x; },
        [](double, double c, double, double x) { return c * c * (x + 2); }, "c^2(xi+2)");
    t.back().printed_value = [](double, double c, double, double x) { return -c * c * c * (x + 2); };
    t.back().printed_formula = "-c^3(xi+2)";
    t.back().note = "printed value repeats the E limit; the G limit is c^2(xi+2)";
    add(A::alpha3, 'E', xi_eq(-3, "-3"), {-3}, cst(8),
        [](double s, double c, double d, double) { return c * (c * c - 2 * c - s - 1 - d); }, "c(c^2-2c-s-1-d)");
    add(A::alpha3, 'G', xi_eq(-3, "-3"), {-3}, cst(6),
        [](double s, double c, double, double) { return -c * c + s - 1; }, "-c^2+s-1");
    add(A::alpha3, 'E', xi_lt(-3, "-3"), {-4}, [](double x) { return 2 - 2 * x; },
        [](double s, double c, double d, double) { return -c * (2 * c + s + 1 + d); }, "-c(2c+s+1+d)");
    add(A::alpha3, 'G', xi_lt(-3, "-3"), {-4}, [](double x) { return -2 * x; },
        [](double s, double, double, double) { return s - 1; }, "s-1");
    return t;
}

}  // namespace detail

inline const std::vector<LimitDef>& limit_defs()
{
    static const std::vector<LimitDef> defs = detail::build_limit_defs();
    return defs;
}

struct LimitRecord
{
    std::string id;
    AlphaClass alpha_class = AlphaClass::alpha1;
    char quantity = 'C';
    std::string xi_regime;
    double xi = 0, sigma = 0, c = 0, d = 0;
    double scaling_exponent = 0;
    double printed_scaling_exponent = 0;
    std::string limit_formula;
    std::string printed_formula;
    double limit_value = 0;
    double printed_value = 0;
    double numeric = 0;          // rho^p T at rho = 2^-120, p the scaling exponent
    double numeric_printed = 0;  // same at the printed scaling
    double drift = 0;            // change between rho = 2^-100 and 2^-120
    bool matches = false;
    bool printed_matches = false;
    bool flagged = false;
    std::string note;
};

inline constexpr double limit_rel_tol = 1e-4;

inline bool limit_close(double num, double val)
{
    return std::isfinite(num) && std::fabs(num - val) <= limit_rel_tol * std::max(std::fabs(val), 1.0);
}

/// rho^p T(rho) for the alpha ansatz with beta = rho^xi (pre-shift xi), in 250-digit arithmetic.
inline HighFloat scaled_limit_term(AlphaClass cls, char q, double xi, double s, double c, double d, double p, int k)
{
    using boost::multiprecision::pow;
    const HighFloat rho = boost::multiprecision::ldexp(HighFloat(1), -k);
    const HighFloat X(xi), S(s), Cc(c), D(d);
    HighFloat alpha, alpha_a;
    switch (cls) {
    case AlphaClass::alpha1: alpha = Cc; alpha_a = 0; break;
    case AlphaClass::alpha2: alpha = Cc / rho; alpha_a = -Cc / (rho * rho); break;
    case AlphaClass::alpha3:
        alpha = (Cc + D * rho) / (rho * rho);
        alpha_a = -(2 * Cc + D * rho) / (rho * rho * rho);
        break;
    default: throw std::invalid_argument("scaled_limit_term: unclassified");
    }
    const HighFloat beta = xi == 0 ? HighFloat(1) : HighFloat(pow(rho, X));
    const HighFloat beta_a = xi == 0 ? HighFloat(0) : HighFloat(X * pow(rho, X - 1));
    const auto t = rho_terms_t<HighFloat>(alpha, alpha_a, beta, beta_a, S, rho);
    const HighFloat& T = q == 'C' ? t.C : q == 'E' ? t.E : t.G;
    return HighFloat(pow(rho, HighFloat(p))) * T;
}

inline void check_class_sign(AlphaClass cls, double sigma)
{
    if (sigma == 0) throw std::invalid_argument("limit_table: sigma must be nonzero");
    if (cls == AlphaClass::alpha1 && sigma < 0)
        throw std::invalid_argument("limit_table: alpha1 is a contracting class, regime not covered for sigma<0");
    if (cls == AlphaClass::alpha3 && sigma > 0)
        throw std::invalid_argument("limit_table: alpha3 is an expanding class, regime not covered for sigma>0");
    if (cls == AlphaClass::unclassified) throw std::invalid_argument("limit_table: unclassified alpha");
}

inline LimitRecord evaluate_limit(const LimitDef& def, double xi, double s, double c, double d)
{
    LimitRecord r;
    r.id = def.id();
    r.alpha_class = def.cls;
    r.quantity = def.quantity;
    r.xi_regime = def.regime.text;
    r.xi = xi;
    r.sigma = s;
    r.c = c;
    r.d = d;
    r.scaling_exponent = def.scaling(xi);
    r.printed_scaling_exponent = def.printed_scaling(xi);
    r.limit_formula = def.formula;
    r.printed_formula = def.printed_formula;
    r.limit_value = def.value(s, c, d, xi);
    r.printed_value = def.printed_value(s, c, d, xi);
    const HighFloat v120 = scaled_limit_term(def.cls, def.quantity, xi, s, c, d, r.scaling_exponent, 120);
    const HighFloat v100 = scaled_limit_term(def.cls, def.quantity, xi, s, c, d, r.scaling_exponent, 100);
    r.numeric = v120.convert_to<double>();
    r.drift = boost::multiprecision::abs(v120 - v100).convert_to<double>();
    r.numeric_printed = r.printed_scaling_exponent == r.scaling_exponent
                            ? r.numeric
                            : scaled_limit_term(def.cls, def.quantity, xi, s, c, d, r.printed_scaling_exponent, 120)
                                  .convert_to<double>();
    r.matches = limit_close(r.numeric, r.limit_value);
    r.printed_matches = limit_close(r.numeric_printed, r.printed_value);
    r.flagged = def.flagged();
    r.note = def.note;
    return r;
}

/// All C, E, G limit records whose regime contains xi. Takes the pre-shift xi: beta = rho^xi,
/// so a velocity family with parameter xi_F enters as xi = xi_F - 1.
inline std::vector<LimitRecord> limit_table(AlphaClass cls, double xi, double sigma, double c, double d = 0)
{
    check_class_sign(cls, sigma);
    std::vector<LimitRecord> out;
    for (const auto& def : limit_defs())
        if (def.cls == cls && def.regime.contains(xi)) out.push_back(evaluate_limit(def, xi, sigma, c, d));
    return out;
}

/// Every table entry over the sampled (xi, sigma, c, d) points of its regime.
inline std::vector<LimitRecord> limit_sweep()
{
    const double sigmas[] = {-2, -0.5, 0.5, 2, 7};
    const double cs[] = {0.3, 1, 2};
    const double ds[] = {-1, 0, 1};
    std::vector<LimitRecord> out;
    for (const auto& def : limit_defs())
        for (double xi : def.sample_xi)
            for (double s : sigmas) {
                if (def.cls == AlphaClass::alpha1 && s < 0) continue;
                if (def.cls == AlphaClass::alpha3 && s > 0) continue;
                for (double c : cs) {
                    if (def.cls != AlphaClass::alpha3) {
                        out.push_back(evaluate_limit(def, xi, s, c, 0));
                        continue;
                    }
                    for (double d : ds) out.push_back(evaluate_limit(def, xi, s, c, d));
                }
            }
    return out;
}

inline nlohmann::json to_json(const LimitRecord& r)
{
    nlohmann::json j{{"id", r.id},
                     {"alpha_class", to_string(r.alpha_class)},
                     {"quantity", std::string(1, r.quantity)},
                     {"xi_regime", r.xi_regime},
                     {"xi", r.xi},
                     {"sigma", r.sigma},
                     {"c", r.c},
                     {"d", r.d},
                     {"scaling_exponent", r.scaling_exponent},
                     {"limit_formula", r.limit_formula},
                     {"limit_value", r.limit_value},
                     {"numeric", r.numeric},
                     {"matches", r.matches},
                     {"flagged", r.flagged}};
    if (r.flagged) {
        j["printed_formula"] = r.printed_formula;
        j["printed_scaling_exponent"] = r.printed_scaling_exponent;
        j["printed_value"] = r.printed_value;
        j["printed_matches"] = r.printed_matches;
        j["note"] = r.note;
    }
    return j;
}

// ---------------------------------------------------------------------------
// Verdicts
// ---------------------------------------------------------------------------

enum class Outcome { non_existent, exists, constraint, open };

inline std::string to_string(Outcome o)
{
    switch (o) {
    case Outcome::non_existent: return "non-existent";
    case Outcome::exists: return "exists";
    case Outcome::constraint: return "constraint";
    case Outcome::open: return "open";
    }
    return "?";
}

struct Verdict
{
    VelocityFamilySpec spec;
    Outcome outcome = Outcome::open;
    std::string witness;     // catalog entry name when outcome is exists
    std::string constraint;  // "c=1/sigma" or a sigma interval
    std::string source;
    std::string note;
};

inline Verdict degree_obstruction(double sigma)
{
    if (!(sigma > 0)) throw std::invalid_argument("degree_obstruction: needs sigma > 0");
    Verdict v;
    v.spec = {1, sigma};
    if (sigma == 1) {
        v.outcome = Outcome::non_existent;
        v.source = "degree-one lemma: no MPF for contracting velocities homogeneous of degree one";
    } else if (sigma < 1) {
        v.outcome = Outcome::non_existent;
        v.source = "degree lemma: no MPF for contracting velocities of degree in (0,1)";
    } else {
        v.outcome = Outcome::open;
        v.source = "no conclusion from the degree lemmas";
    }
    return v;
}

/// Table of the necessary conditions, in the family xi.
inline Verdict necessary_conditions(double xi, double sigma)
{
    if (sigma == 0) throw std::invalid_argument("necessary_conditions: sigma must be nonzero");
    snap_xi(xi);
    if (sigma > 0 && sigma <= 1) {
        Verdict v = degree_obstruction(sigma);
        v.spec = {xi, sigma};
        return v;
    }
    Verdict v;
    v.spec = {xi, sigma};
    v.source = "necessary conditions for MPF, limits of C, E, G as rho->0";
    if (sigma > 1) {
        if (xi > 0) {
            v.outcome = Outcome::constraint;
            v.constraint = "c=1/sigma";
        } else if (xi == 0) {
            if (sigma <= 2) {
                v.outcome = Outcome::constraint;
                v.constraint = "sigma in (1,2]";
            } else {
                v.outcome = Outcome::non_existent;
            }
        } else {
            v.outcome = Outcome::non_existent;
        }
        return v;
    }
    if (xi > 0) {
        if (sigma >= -1) {
            v.outcome = Outcome::constraint;
            v.constraint = "sigma in [-1,0)";
        } else {
            v.outcome = Outcome::non_existent;
        }
    } else if (xi == 0) {
        if (sigma >= -2) {
            v.outcome = Outcome::constraint;
            v.constraint = "sigma in [-2,0)";
        } else {
            v.outcome = Outcome::non_existent;
        }
    } else {
        v.outcome = Outcome::open;
    }
    return v;
}

// ---------------------------------------------------------------------------
// Phi
// ---------------------------------------------------------------------------

enum class PhiFamily { mean, norm };

inline std::string to_string(PhiFamily f) { return f == PhiFamily::mean ? "mean" : "norm"; }

template <class T>
Poly<T> phi_rho()
{
    return Poly<T>{T(0), T(1)};
}

/// rho + rho^k + (1-rho) s, with k = 2 (mean) or 3 (norm).
template <class T>
Poly<T> phi_core(PhiFamily f, const T& s)
{
    const auto r = phi_rho<T>();
    const Poly<T> one{T(1)};
    const Poly<T> rk = pow(r, f == PhiFamily::mean ? 2u : 3u);
    return r + rk + (one - r) * Poly<T>{s};
}

template <class T>
Poly<T> phi1_poly(PhiFamily f, const T& s)
{
    const auto r = phi_rho<T>();
    const Poly<T> one{T(1)};
    const Poly<T> rk = pow(r, f == PhiFamily::mean ? 2u : 3u);
    return -((one - r) * pow(one + rk, 2) * phi_core(f, s));
}

/// Phi2 with the corrected coefficients, or as printed when printed = true.
template <class T>
Poly<T> phi2_poly(PhiFamily f, const T& s, bool printed = false)
{
    const T one(1), two(2), three(3), four(4), five(5);
    Poly<T> p;
    auto push = [&p](const T& v) { p.c.push_back(v); };
    if (f == PhiFamily::mean) {
        push(T(0));
        push(three * s - one);
        push(T(-4) * s * (s - one));
        push(s * (T(8) * s - T(9)) + T(7));
        push(printed ? T(-(s * s - one)) : T(T(-4) * (s * s - one)));
        push(five * s + one);
        push(T(-4) * (s - one));
        push(s + one);
    } else {
        push(T(0));
        push(three * s - one);
        push(T(-3) * (s - one));
        push(-(s * (five * s - T(9)) + four));
        push(printed ? T(s * (T(13) * s - T(19)) * s + T(12)) : T(s * (T(13) * s - T(19)) + T(12)));
        push(T(-2) * (s - one) * (T(7) * s - four));
        push(two * (s - one) * (five * s - T(6)));
        push(printed ? T(-(five * s * (s - three) - four)) : T(-(five * s * (s - three) + four)));
        push((s - four) * (s - one));
        push(-(s - one));
        push(s + one);
    }
    return p;
}

template <class T>
Poly<T> phi3_poly(PhiFamily f, const T& s)
{
    const auto r = phi_rho<T>();
    const Poly<T> one{T(1)};
    return pow(r, 2) * pow(one - r, 2) * Poly<T>{s - T(1)} * pow(phi_core(f, s), 2);
}

/// delta Phi1 + Phi2, the numerator whose sign decides the argument.
template <class T>
Poly<T> phi_tilde(PhiFamily f, const T& s, const T& delta, bool printed = false)
{
    return Poly<T>{delta} * phi1_poly(f, s) + phi2_poly(f, s, printed);
}

/// The integer polynomials as printed for (sigma0, delta) = (6, 1) and (10, 1).
inline Poly<Rational> printed_tilde(PhiFamily f)
{
    auto q = [](std::initializer_list<long> xs) {
        Poly<Rational> p;
        for (long x : xs) p.c.emplace_back(x);
        return p;
    };
    if (f == PhiFamily::mean) return q({-6, 28, -138, 264, -158, 44, -26, 8});
    return q({-10, 48, -36, -435, 1161, -1206, 780, -333, 45, -10, 12});
}

/// Smaller root of the vanishing alpha numerator at sigma0, if any.
inline std::optional<double> phi_rho0(PhiFamily f, double sigma0)
{
    if (!(sigma0 > 1)) return std::nullopt;
    const auto roots = f == PhiFamily::mean ? roots_mean(sigma0) : roots_norm(sigma0);
    if (roots.empty()) return std::nullopt;
    return roots.front().root;
}

struct PhiDecomposition
{
    PhiFamily family = PhiFamily::mean;
    double sigma0 = 0;
    Poly<double> phi1, phi2, phi3;
    std::optional<double> rho0;
};

inline PhiDecomposition phi_decomposition(PhiFamily f, double sigma0)
{
    return {f, sigma0, phi1_poly(f, sigma0), phi2_poly(f, sigma0), phi3_poly(f, sigma0), phi_rho0(f, sigma0)};
}

/// Forward-mode derivative in rho, used to assemble Phi independently of the printed polynomials.
struct Dual
{
    double v = 0, d = 0;
    Dual() = default;
    Dual(double x) : v(x) {}  // NOLINT
    Dual(double x, double dx) : v(x), d(dx) {}
    friend Dual operator+(Dual x, Dual y) { return {x.v + y.v, x.d + y.d}; }
    friend Dual operator-(Dual x, Dual y) { return {x.v - y.v, x.d - y.d}; }
    friend Dual operator*(Dual x, Dual y) { return {x.v * y.v, x.d * y.v + x.v * y.d}; }
    friend Dual operator/(Dual x, Dual y) { return {x.v / y.v, (x.d * y.v - x.v * y.d) / (y.v * y.v)}; }
};

/// G^alpha_beta / ((alpha rho-1)(beta rho+1)(1-rho)) with alpha = alpha_v of the family at sigma0.
inline double phi_assembled(PhiFamily f, double rho, double sigma0, double delta)
{
    const Dual r(rho, 1.0);
    const Dual beta = f == PhiFamily::mean ? Dual(1.0) : r;
    const Dual a = alpha_vanishing_beta_t<Dual>(beta, Dual(sigma0), r);
    const double b = beta.v, ba = beta.d;
    const auto t = rho_terms_t<double>(a.v, a.d, b, ba, sigma0 + delta, rho);
    const double K = (a.v * rho - 1) * (b * rho + 1) * (1 - rho);
    return t.G / K;
}

struct PhiValue
{
    double value = 0;      // (delta Phi1 + Phi2)/Phi3
    double assembled = 0;  // from G^alpha_beta directly
    PhiDecomposition decomposition;
};

inline PhiValue phi(PhiFamily f, double rho, double sigma0, double delta)
{
    if (!(rho > 0 && rho < 1)) throw std::invalid_argument("phi: needs 0 < rho < 1");
    if (!(sigma0 > 1)) throw std::invalid_argument("phi: needs sigma0 > 1");
    if (!(delta >= 0)) throw std::invalid_argument("phi: needs delta >= 0");
    PhiValue v;
    v.decomposition = phi_decomposition(f, sigma0);
    const auto& d = v.decomposition;
    v.value = (delta * d.phi1(rho) + d.phi2(rho)) / d.phi3(rho);
    v.assembled = phi_assembled(f, rho, sigma0, delta);
    return v;
}

// ---------------------------------------------------------------------------
// Threshold search
// ---------------------------------------------------------------------------

struct ScanResult
{
    bool negative = false;
    double witness = 0;  // a point where p >= 0 was seen, when not negative
    std::size_t evaluations = 0;
};

/// p < 0 on (0, r] for r <= 1, by a dense scan whose gaps are closed with the derivative bound
/// M = sum |c_i| i.
inline ScanResult scan_negative(const Poly<double>& p, double r, std::size_t segments = 1024, int max_depth = 50)
{
    if (!(r > 0 && r <= 1)) throw std::invalid_argument("scan_negative: needs 0 < r <= 1");
    double M = 0;
    for (std::size_t i = 1; i < p.c.size(); ++i) M += std::fabs(p.c[i]) * static_cast<double>(i);
    ScanResult res;
    struct Seg
    {
        double x0, x1, f0, f1;
        int depth;
    };
    std::vector<Seg> stack;
    double prev = 0, fprev = p(0.0);
    for (std::size_t i = 1; i <= segments; ++i) {
        const double x = r * static_cast<double>(i) / static_cast<double>(segments);
        const double fx = p(x);
        stack.push_back({prev, x, fprev, fx, 0});
        prev = x;
        fprev = fx;
    }
    res.evaluations = segments + 1;
    std::reverse(stack.begin(), stack.end());
    while (!stack.empty()) {
        const Seg s = stack.back();
        stack.pop_back();
        if ((s.x0 > 0 && s.f0 >= 0) || s.f1 >= 0) {
            res.witness = s.f1 >= 0 ? s.x1 : s.x0;
            return res;
        }
        if (0.5 * (s.f0 + s.f1) + 0.5 * M * (s.x1 - s.x0) < 0) continue;
        if (s.depth >= max_depth) {
            res.witness = s.x0;
            return res;
        }
        const double m = 0.5 * (s.x0 + s.x1);
        const double fm = p(m);
        ++res.evaluations;
        stack.push_back({m, s.x1, fm, s.f1, s.depth + 1});
        stack.push_back({s.x0, m, s.f0, fm, s.depth + 1});
    }
    res.negative = true;
    return res;
}

/// Dyadic enclosure of the family's root onset: 3+2sqrt2 (mean) or the real root of
/// 4s^3-39s^2+12s-4 (norm).
inline RInterval onset_enclosure(PhiFamily f, unsigned bits = 83)
{
    if (f == PhiFamily::mean) {
        const auto r2 = sqrt_enclosure(Rational(2), bits);
        return {3 + 2 * r2.lo, 3 + 2 * r2.hi};
    }
    auto disc = [](const Rational& s) { return ((4 * s - 39) * s + 12) * s - 4; };
    Rational lo(9), hi(10);
    const Rational width = Rational(1) / (Rational(boost::multiprecision::cpp_int(1) << bits));
    while (hi - lo > width) {
        const Rational mid = (lo + hi) / 2;
        (disc(mid) < 0 ? lo : hi) = mid;
    }
    return {lo, hi};
}

inline double onset(PhiFamily f)
{
    return f == PhiFamily::mean ? 3 + 2 * std::sqrt(2.0) : sigma_star().closed_form;
}

struct SigmaDeltaResult
{
    PhiFamily family = PhiFamily::mean;
    double sigma0 = 0;
    bool sigma0_is_onset = false;
    double rho0 = 0;
    double delta_min = 0;
    double sigma_delta = 0;
    double tolerance = 0;
    bool certified = false;
    std::string certification;  // method used for the final delta
    std::size_t boxes = 0;
};

inline constexpr double delta_cap = 2.0;

namespace detail {

inline Rational to_rational(double x)
{
    int e = 0;
    const double m = std::frexp(x, &e);
    const auto mi = static_cast<long long>(std::ldexp(m, 53));
    Rational q(mi);
    e -= 53;
    const Rational p2(boost::multiprecision::cpp_int(1) << std::abs(e));
    return e >= 0 ? Rational(q * p2) : Rational(q / p2);
}

}  // namespace detail

/// Exact check of delta Phi1 + Phi2 < 0 on (0, r] at sigma0 given as a double (taken exactly).
inline NegativityCertificate certify_phi_exact(PhiFamily f, double sigma0, double delta, double r)
{
    const Rational s = detail::to_rational(sigma0), d = detail::to_rational(delta);
    return certify_negative(phi_tilde<Rational>(f, s, d), detail::to_rational(r));
}

/// Same check with sigma0 the exact onset, enclosed by rational intervals.
inline NegativityCertificate certify_phi_onset(PhiFamily f, double delta, double r)
{
    const RInterval s = onset_enclosure(f);
    const RInterval d(detail::to_rational(delta));
    return certify_negative_enclosure(phi_tilde<RInterval>(f, s, d), detail::to_rational(r));
}

/// Smallest delta in [0, 2] (to tol) with delta Phi1 + Phi2 < 0 on (0, rho0]. Without sigma0
/// the family's root onset is used and certified with interval enclosures.
inline SigmaDeltaResult find_sigma_delta(PhiFamily f, std::optional<double> sigma0 = std::nullopt, double tol = 1e-4,
                                         bool certify = true)
{
    SigmaDeltaResult res;
    res.family = f;
    res.tolerance = tol;
    res.sigma0_is_onset = !sigma0;
    res.sigma0 = sigma0 ? *sigma0 : onset(f);
    // a double sigma0 may fall a hair below the exact onset
    double rho0;
    if (res.sigma0_is_onset) {
        rho0 = f == PhiFamily::mean ? std::sqrt(2.0) - 1 : sigma_star().rho_star;
    } else {
        const auto r = phi_rho0(f, res.sigma0);
        if (!r) throw std::invalid_argument("find_sigma_delta: sigma0 is below the root onset of the vanishing alpha");
        rho0 = *r;
    }
    res.rho0 = rho0;
    const double r_hi = std::min(1.0, rho0 + 1e-9);
    auto feasible = [&](double delta) { return scan_negative(phi_tilde<double>(f, res.sigma0, delta), r_hi).negative; };
    if (!feasible(delta_cap)) throw std::runtime_error("find_sigma_delta: no delta found below the cap 2");
    double lo = 0, hi = delta_cap;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (feasible(mid) ? hi : lo) = mid;
    }
    if (certify) {
        // the scan is in double; confirm exactly, stepping up by tol/4 if the margin was too thin
        for (int k = 0; k < 4 && !res.certified; ++k) {
            const double delta = hi + k * tol / 4;
            const auto cert = res.sigma0_is_onset ? certify_phi_onset(f, delta, r_hi)
                                                  : certify_phi_exact(f, res.sigma0, delta, r_hi);
            res.boxes += cert.boxes;
            if (cert.negative) {
                res.certified = true;
                res.certification = cert.method;
                hi = delta;
            }
        }
        if (!res.certified) res.certification = "failed";
    } else {
        res.certification = "scan";
    }
    res.delta_min = hi;
    res.sigma_delta = res.sigma0 + hi;
    return res;
}

/// Hand-bound feasibility: is delta Phi1 + Phi2 < 0 on (0, rho0] at the given sigma0 and delta?
struct Feasibility
{
    double sigma0 = 0, delta = 0, rho0 = 0;
    bool scan_negative = false;
    NegativityCertificate certificate;
    double sigma_delta() const { return sigma0 + delta; }
};

inline Feasibility check_feasibility(PhiFamily f, double sigma0, double delta)
{
    Feasibility r;
    r.sigma0 = sigma0;
    r.delta = delta;
    const auto rho0 = phi_rho0(f, sigma0);
    if (!rho0) throw std::invalid_argument("check_feasibility: sigma0 is below the root onset");
    r.rho0 = *rho0;
    const double r_hi = std::min(1.0, *rho0 + 1e-9);
    r.scan_negative = scan_negative(phi_tilde<double>(f, sigma0, delta), r_hi).negative;
    r.certificate = certify_phi_exact(f, sigma0, delta, r_hi);
    return r;
}

/// The two thresholds, computed once and certified at the exact onsets.
inline const SigmaDeltaResult& phi_threshold(PhiFamily f)
{
    static const SigmaDeltaResult mean = find_sigma_delta(PhiFamily::mean);
    static const SigmaDeltaResult norm = find_sigma_delta(PhiFamily::norm);
    return f == PhiFamily::mean ? mean : norm;
}

// ---------------------------------------------------------------------------
// Corollary tables
// ---------------------------------------------------------------------------

enum class Family { gauss, mean, norm, trace };

inline std::string to_string(Family f)
{
    switch (f) {
    case Family::gauss: return "gauss";
    case Family::mean: return "mean";
    case Family::norm: return "norm";
    case Family::trace: return "trace";
    }
    return "?";
}

inline Family parse_family(const std::string& s)
{
    if (s == "gauss") return Family::gauss;
    if (s == "mean") return Family::mean;
    if (s == "norm") return Family::norm;
    if (s == "trace") return Family::trace;
    throw std::invalid_argument("unknown family: " + s);
}

inline VelocityFamilySpec family_spec(Family f, double sigma)
{
    switch (f) {
    case Family::gauss: return {0, sigma};
    case Family::mean: return {1, sigma};
    case Family::norm: return {2, sigma};
    case Family::trace: return {sigma, sigma};
    }
    return {1, sigma};
}

// the printed norm row (1, 8.15] is only witnessed up to here
inline constexpr double andrews_chen_norm_sharp = 8.144;

namespace detail {

inline Verdict witness_verdict(Family f, double sigma, const std::string& name)
{
    const auto& e = lookup(name);
    Verdict v;
    v.spec = family_spec(f, sigma);
    v.outcome = Outcome::exists;
    v.witness = name;
    v.source = e.provenance;
    return v;
}

inline Verdict with_spec(Verdict v, Family f, double sigma)
{
    v.spec = family_spec(f, sigma);
    return v;
}

inline Verdict open_verdict(Family f, double sigma, std::string source)
{
    Verdict v;
    v.spec = family_spec(f, sigma);
    v.outcome = Outcome::open;
    v.source = std::move(source);
    return v;
}

inline Verdict phi_verdict(Family f, double sigma, PhiFamily pf)
{
    const auto& th = phi_threshold(pf);
    Verdict v;
    v.spec = family_spec(f, sigma);
    v.outcome = Outcome::non_existent;
    v.source = "Phi inequality at the root onset, sigma_delta = " + format_number(th.sigma_delta);
    return v;
}

}  // namespace detail

inline Verdict classify(Family f, double sigma)
{
    if (sigma == 0) throw std::invalid_argument("classify: sigma must be nonzero");
    using namespace detail;
    if (sigma > 0 && sigma <= 1) return with_spec(degree_obstruction(sigma), f, sigma);
    switch (f) {
    case Family::gauss:
        if (sigma > 2) return with_spec(necessary_conditions(0, sigma), f, sigma);
        if (sigma == 2) return witness_verdict(f, sigma, "andrews-gauss");
        if (sigma > 1) return witness_verdict(f, sigma, "andrews-chen-gauss");
        if (sigma > -2) return witness_verdict(f, sigma, "li-gauss");
        if (sigma == -2) return witness_verdict(f, sigma, "schnurer-gauss");
        return with_spec(necessary_conditions(0, sigma), f, sigma);
    case Family::mean:
        if (sigma >= phi_threshold(PhiFamily::mean).sigma_delta) return phi_verdict(f, sigma, PhiFamily::mean);
        if (sigma > 5.17) return open_verdict(f, sigma, "between the Schulze range and sigma_delta");
        if (sigma > 1) return witness_verdict(f, sigma, "schulze-mean");
        if (sigma > -1) return witness_verdict(f, sigma, "expanding-mean");
        if (sigma == -1) return witness_verdict(f, sigma, "schnurer-mean-inverse");
        return with_spec(necessary_conditions(1, sigma), f, sigma);
    case Family::norm:
        if (sigma >= phi_threshold(PhiFamily::norm).sigma_delta) return phi_verdict(f, sigma, PhiFamily::norm);
        if (sigma > 8.15) return open_verdict(f, sigma, "between the Andrews-Chen range and sigma_delta");
        if (sigma > andrews_chen_norm_sharp) {
            auto v = open_verdict(f, sigma, "inside the printed Andrews-Chen range (1, 8.15]");
            v.note = "the witness fails condition IV above about 8.1440";
            return v;
        }
        if (sigma > 1) return witness_verdict(f, sigma, "andrews-chen-norm");
        if (sigma >= -1) return witness_verdict(f, sigma, "expanding-norm");
        return with_spec(necessary_conditions(2, sigma), f, sigma);
    case Family::trace:
        if (sigma > 1) return witness_verdict(f, sigma, "andrews-chen-trace");
        if (sigma == -1) return witness_verdict(f, sigma, "schnurer-trace-inverse");
        return with_spec(necessary_conditions(sigma, sigma), f, sigma);
    }
    throw std::invalid_argument("classify: unknown family");
}

struct TableRow
{
    Interval interval;
    std::string display;  // sigma range as shown in the table
    Verdict verdict;
};

namespace detail {

inline std::string fixed(double v, int digits)
{
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(digits);
    os << v;
    return os.str();
}

inline double representative(const Interval& i)
{
    if (i.lo == i.hi) return i.lo;
    if (std::isinf(i.hi)) return i.lo + 1;
    if (std::isinf(i.lo)) return i.hi - 1;
    if (i.lo == 0 && i.hi == 1) return 0.5;
    return 0.5 * (i.lo + i.hi);
}

}  // namespace detail

inline std::vector<TableRow> classify_table(Family f)
{
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<std::pair<Interval, std::string>> rows;
    switch (f) {
    case Family::gauss:
        rows = {{{2, inf, false, false}, "sigma > 2"},
                {Interval::point(2), "sigma = 2"},
                {{1, 2, false, false}, "sigma in (1,2)"},
                {{0, 1, false, true}, "sigma in (0,1]"},
                {{-2, 0, false, false}, "sigma in (-2,0)"},
                {Interval::point(-2), "sigma = -2"},
                {{-inf, -2, false, false}, "sigma < -2"}};
        break;
    case Family::mean: {
        const double sd = phi_threshold(PhiFamily::mean).sigma_delta;
        const std::string sds = detail::fixed(sd, 2);
        rows = {{{sd, inf, true, false}, "sigma >= " + sds},
                {{5.17, sd, false, false}, "sigma in (5.17," + sds + ")"},
                {{1, 5.17, false, true}, "sigma in (1,5.17]"},
                {{0, 1, false, true}, "sigma in (0,1]"},
                {{-1, 0, false, false}, "sigma in (-1,0)"},
                {Interval::point(-1), "sigma = -1"},
                {{-inf, -1, false, false}, "sigma < -1"}};
        break;
    }
    case Family::norm: {
        const double sd = phi_threshold(PhiFamily::norm).sigma_delta;
        const std::string sds = detail::fixed(sd, 3);
        rows = {{{sd, inf, true, false}, "sigma >= " + sds},
                {{8.15, sd, false, false}, "sigma in (8.15," + sds + ")"},
                {{1, 8.15, false, true}, "sigma in (1,8.15]"},
                {{0, 1, false, true}, "sigma in (0,1]"},
                {{-1, 0, true, false}, "sigma in [-1,0)"},
                {{-inf, -1, false, false}, "sigma < -1"}};
        break;
    }
    case Family::trace:
        rows = {{{1, inf, false, false}, "sigma > 1"},
                {{0, 1, false, true}, "sigma in (0,1]"},
                {{-1, 0, false, false}, "sigma in (-1,0)"},
                {Interval::point(-1), "sigma = -1"},
                {{-inf, -1, false, false}, "sigma < -1"}};
        break;
    }
    std::vector<TableRow> out;
    for (auto& [iv, text] : rows) {
        TableRow row{iv, text, classify(f, detail::representative(iv))};
        if (f == Family::norm && iv.hi == 8.15)
            row.verdict.note = "witness verified up to about 8.1440; the printed end is 8.15";
        out.push_back(std::move(row));
    }
    return out;
}

inline std::string verdict_label(const Verdict& v)
{
    if (v.outcome == Outcome::exists) return "MPF exists";
    if (v.outcome == Outcome::non_existent) return "no MPF";
    if (v.outcome == Outcome::constraint) return "constraint " + v.constraint;
    return "open";
}

inline std::string markdown_table(Family f)
{
    std::ostringstream os;
    os << "| sigma | verdict | witness | source |\n|---|---|---|---|\n";
    for (const auto& r : classify_table(f)) {
        os << "| " << r.display << " | " << verdict_label(r.verdict) << " | "
           << (r.verdict.witness.empty() ? "-" : r.verdict.witness) << " | " << r.verdict.source;
        if (!r.verdict.note.empty()) os << "; " << r.verdict.note;
        os << " |\n";
    }
    return os.str();
}

inline nlohmann::json to_json(const Verdict& v)
{
    nlohmann::json j{{"xi", v.spec.xi}, {"sigma", v.spec.sigma}, {"outcome", to_string(v.outcome)},
                     {"source", v.source}};
    if (!v.witness.empty()) {
        j["witness"] = v.witness;
        j["witness_expression"] = lookup(v.witness).display_expression();
    }
    if (!v.constraint.empty()) j["constraint"] = v.constraint;
    if (!v.note.empty()) j["note"] = v.note;
    return j;
}

inline nlohmann::json table_json(Family f)
{
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : classify_table(f)) {
        auto j = to_json(r.verdict);
        j["range"] = r.display;
        j["interval"] = to_json(r.interval);
        rows.push_back(j);
    }
    return {{"family", to_string(f)}, {"rows", rows}};
}

inline nlohmann::json to_json(const SigmaDeltaResult& r)
{
    return {{"family", to_string(r.family)},     {"sigma0", r.sigma0},
            {"sigma0_is_onset", r.sigma0_is_onset}, {"rho0", r.rho0},
            {"delta_min", r.delta_min},          {"sigma_delta", r.sigma_delta},
            {"tolerance", r.tolerance},          {"certified", r.certified},
            {"certification", r.certification}};
}

}  // namespace mpf
