// SPDX-License-Identifier: MIT
#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "conditions.hpp"
#include "velocity.hpp"

namespace mpf {

/// alpha of any vanishing function of F at (rho, 1).
inline double alpha_vanishing_F(const CurvatureFunction& F, double rho)
{
    const auto j = F.jet(rho, 1.0);
    const double den = rho * (rho * j.value + (1 - rho) * j.db);
    if (den == 0) throw domain_error("alpha_vanishing_F: pole");
    return (j.value - rho * (1 - rho) * j.da) / den;
}

template <class T>
T alpha_vanishing_beta_t(const T& beta, const T& sigma, const T& rho)
{
    const T one(1);
    return (one + beta * rho * (one - (one - rho) * sigma)) / (rho * ((one - rho) * sigma + rho * (beta * rho + one)));
}

inline double alpha_vanishing_beta(double beta, double sigma, double rho)
{
    return alpha_vanishing_beta_t<double>(beta, sigma, rho);
}

using BetaFn = std::function<double(double)>;

inline BetaFn beta_power(double xi)
{
    return [xi](double rho) { return std::pow(rho, xi - 1); };
}

struct GridCheck
{
    bool holds = true;
    double worst_rho = 0;
    double min_margin = std::numeric_limits<double>::infinity();
    double max_abs_margin = 0;
};

/// alpha_{v,beta,s1} > alpha_{v,beta,s2} for s1 < s2.
inline GridCheck check_monotone_sigma(const BetaFn& beta, double s1, double s2, const std::vector<double>& grid)
{
    if (!(s1 > 0) || !(s2 > 0)) throw std::invalid_argument("check_monotone_sigma: sigma must be positive");
    GridCheck g;
    for (double rho : grid) {
        const double b = beta(rho);
        const double gap = alpha_vanishing_beta(b, s1, rho) - alpha_vanishing_beta(b, s2, rho);
        g.max_abs_margin = std::max(g.max_abs_margin, std::fabs(gap));
        if (gap < g.min_margin) {
            g.min_margin = gap;
            g.worst_rho = rho;
        }
        if (!(gap > 0)) g.holds = false;
    }
    return g;
}

/// alpha_{v,beta,sigma} < 1/rho for sigma > 1.
inline GridCheck check_upper_bound(const BetaFn& beta, double sigma, const std::vector<double>& grid)
{
    if (!(sigma > 1)) throw std::invalid_argument("check_upper_bound: needs sigma > 1");
    GridCheck g;
    for (double rho : grid) {
        const double m = 1 / rho - alpha_vanishing_beta(beta(rho), sigma, rho);
        g.max_abs_margin = std::max(g.max_abs_margin, std::fabs(m));
        if (m < g.min_margin) {
            g.min_margin = m;
            g.worst_rho = rho;
        }
        if (!(m > 0)) g.holds = false;
    }
    return g;
}

struct VanishingLimit
{
    AlphaClass cls = AlphaClass::unclassified;
    double coefficient = 0;  // c in alpha = c/rho (alpha2) or alpha -> c (alpha1)
    double numeric = 0;      // extrapolated from dyadic samples
};

inline VanishingLimit limits_vanishing(double xi, double sigma)
{
    if (!(sigma > 0)) throw std::invalid_argument("limits_vanishing: needs sigma > 0");
    snap_xi(xi);
    if (xi < 0) throw std::invalid_argument("limits_vanishing: xi < 0 is not covered");
    VanishingLimit r;
    const bool flat = xi == 0 && sigma == 2;
    r.cls = flat ? AlphaClass::alpha1 : AlphaClass::alpha2;
    r.coefficient = xi > 0 ? 1 / sigma : flat ? 1.0 : (2 - sigma) / sigma;
    // the o(1/rho) remainder is O(1) or O(rho^xi); one Richardson step on the last two samples
    auto q = [&](int k) {
        const double rho = std::ldexp(1.0, -k);
        const double a = alpha_vanishing_beta(std::pow(rho, xi - 1), sigma, rho);
        return flat ? a : rho * a;
    };
    r.numeric = 2 * q(40) - q(39);
    return r;
}

// ---------------------------------------------------------------------------
// Roots of the mean and norm numerators
// ---------------------------------------------------------------------------

enum class RootMethod { bisection, closed_form, double_root };

inline std::string to_string(RootMethod m)
{
    switch (m) {
    case RootMethod::bisection: return "bisection";
    case RootMethod::closed_form: return "closed-form";
    case RootMethod::double_root: return "double-root";
    }
    return "?";
}

struct RootCertificate
{
    double root = 0;
    double lo = 0, hi = 0;
    double residual = 0;
    double scale = 1;  // sum of absolute terms of the polynomial at the root
    RootMethod method = RootMethod::bisection;
    std::optional<double> closed_form;
    int multiplicity = 1;
};

/// Bisection on a bracket with a sign change. Runs to adjacent doubles.
template <class Fn>
std::pair<double, double> bisect(const Fn& f, double lo, double hi)
{
    double flo = f(lo);
    for (int i = 0; i < 2000; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double fm = f(mid);
        if (fm == 0) return {mid, mid};
        if ((fm < 0) == (flo < 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return {lo, hi};
}

inline double mean_numerator(double sigma, double rho) { return 1 + rho - (1 - rho) * rho * sigma; }

inline double mean_numerator_scale(double sigma, double rho)
{
    return 1 + rho + std::fabs(sigma) * rho + std::fabs(sigma) * rho * rho;
}

inline double norm_numerator(double sigma, double rho)
{
    return 1 + rho * rho - (1 - rho) * rho * rho * sigma;
}

inline double norm_numerator_scale(double sigma, double rho)
{
    return 1 + rho * rho + std::fabs(sigma) * rho * rho * (1 + rho);
}

namespace detail {

template <class Fn, class Sc>
RootCertificate certify_bracket(const Fn& f, const Sc& scale, double lo, double hi, std::optional<double> closed)
{
    const auto [l, h] = bisect(f, lo, hi);
    RootCertificate c;
    c.lo = l;
    c.hi = h;
    c.root = std::fabs(f(l)) <= std::fabs(f(h)) ? l : h;
    c.residual = std::fabs(f(c.root));
    c.scale = scale(c.root);
    c.method = RootMethod::bisection;
    c.closed_form = closed;
    // keep the bracket strict around the reported root
    if (c.lo == c.hi) {
        c.lo = std::nextafter(c.root, -1.0);
        c.hi = std::nextafter(c.root, 2.0);
    }
    return c;
}

}  // namespace detail

/// Closed-form roots (sigma-1 -+ sqrt(sigma^2-6 sigma+1))/(2 sigma).
inline std::vector<double> roots_mean_closed_form(double sigma)
{
    const double disc = sigma * sigma - 6 * sigma + 1;
    if (disc < 0) return {};
    const double sq = std::sqrt(disc);
    return {(sigma - 1 - sq) / (2 * sigma), (sigma - 1 + sq) / (2 * sigma)};
}

inline std::vector<RootCertificate> roots_mean(double sigma)
{
    if (!(sigma > 1)) throw std::invalid_argument("roots_mean: needs sigma > 1");
    auto f = [sigma](double r) { return mean_numerator(sigma, r); };
    auto sc = [sigma](double r) { return mean_numerator_scale(sigma, r); };
    const double disc = sigma * sigma - 6 * sigma + 1;
    const double vertex = (sigma - 1) / (2 * sigma);
    if (std::fabs(disc) <= 1e-12 * sigma * sigma) {
        RootCertificate c;
        c.root = vertex;
        c.closed_form = vertex;
        c.residual = std::fabs(f(vertex));
        c.scale = sc(vertex);
        c.method = RootMethod::double_root;
        c.multiplicity = 2;
        // the derivative 2 sigma rho + 1 - sigma changes sign across the bracket
        c.lo = vertex - 1e-9;
        c.hi = vertex + 1e-9;
        return {c};
    }
    if (disc < 0) return {};
    const auto cf = roots_mean_closed_form(sigma);
    return {detail::certify_bracket(f, sc, 0.0, vertex, cf[0]), detail::certify_bracket(f, sc, vertex, 1.0, cf[1])};
}

/// The three roots of sigma rho^3 + (1-sigma) rho^2 + 1 via the complex radical form (principal branches).
inline std::array<std::complex<double>, 3> roots_norm_closed_form(double s)
{
    using C = std::complex<double>;
    const C i(0, 1);
    const double r3 = std::sqrt(3.0);
    const C rad = 4 - 12 * s + 39 * s * s - 4 * s * s * s;
    const C vr = std::pow(C(-2 + 6 * s - 33 * s * s + 2 * s * s * s) + 3 * r3 * s * std::sqrt(rad), 1.0 / 3.0);
    const double c23 = std::cbrt(4.0), c13 = std::cbrt(2.0);
    const double m = (s - 1) * (s - 1);
    const C r0 = (s - 1 - (1.0 + r3 * i) / c23 * m / vr - (1.0 - r3 * i) / (2 * c13) * vr) / (3 * s);
    const C rm = (s - 1 - (1.0 - r3 * i) / c23 * m / vr - (1.0 + r3 * i) / (2 * c13) * vr) / (3 * s);
    const C rp = (s - 1 + 2.0 / c23 * m / vr + 1.0 / c13 * vr) / (3 * s);
    return {r0, rm, rp};
}

inline std::vector<RootCertificate> roots_norm(double sigma)
{
    if (!(sigma > 1)) throw std::invalid_argument("roots_norm: needs sigma > 1");
    auto f = [sigma](double r) { return norm_numerator(sigma, r); };
    auto sc = [sigma](double r) { return norm_numerator_scale(sigma, r); };
    const double crit = 2 * (sigma - 1) / (3 * sigma);
    const double fc = f(crit);
    const auto cf = roots_norm_closed_form(sigma);
    if (std::fabs(fc) <= 1e-12) {
        RootCertificate c;
        c.root = crit;
        c.closed_form = cf[1].real();
        c.residual = std::fabs(fc);
        c.scale = sc(crit);
        c.method = RootMethod::double_root;
        c.multiplicity = 2;
        c.lo = crit - 1e-9;
        c.hi = crit + 1e-9;
        return {c};
    }
    if (fc > 0) return {};
    return {detail::certify_bracket(f, sc, 0.0, crit, cf[1].real()),
            detail::certify_bracket(f, sc, crit, 1.0, cf[2].real())};
}

struct SigmaStar
{
    double closed_form = 0;          // corrected radical
    double printed_closed_form = 0;  // radical as printed (known typo)
    double bisection = 0;
    double rho_star = 0;
};

/// Onset power of roots in the norm case, where 4 s^3 - 39 s^2 + 12 s - 4 = 0.
inline SigmaStar sigma_star()
{
    SigmaStar s;
    const double r2 = std::sqrt(2.0);
    s.closed_form = (39 + std::cbrt(51759 + 5832 * r2) + std::cbrt(51759 - 5832 * r2)) / 12;
    s.printed_closed_form = (39 + std::cbrt(51759 - 5832 * r2) + 8 * std::cbrt(71 + 8 * r2)) / 12;
    auto has_root = [](double sigma) {
        const double crit = 2 * (sigma - 1) / (3 * sigma);
        return norm_numerator(sigma, crit) <= 0;
    };
    double lo = 2, hi = 20;
    for (int i = 0; i < 200 && hi - lo > 0; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (has_root(mid) ? hi : lo) = mid;
    }
    s.bisection = hi;
    s.rho_star = 2 * (s.bisection - 1) / (3 * s.bisection);
    return s;
}

inline nlohmann::json to_json(const RootCertificate& c)
{
    auto exact = [](double v) {
        std::ostringstream os;
        os.precision(17);
        os << v;
        return os.str();
    };
    nlohmann::json j{{"root", c.root},
                     {"bracket", {exact(c.lo), exact(c.hi)}},
                     {"residual", c.residual},
                     {"method", to_string(c.method)},
                     {"multiplicity", c.multiplicity}};
    if (c.closed_form) j["closed_form"] = *c.closed_form;
    return j;
}

}  // namespace mpf
