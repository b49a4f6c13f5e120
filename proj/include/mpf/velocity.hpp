// SPDX-License-Identifier: MIT
#pragma once

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "expression.hpp"

namespace mpf {

/// F^sigma_xi = sgn(sigma) (a^xi + b^xi)^(sigma/xi), or sgn(sigma) (ab)^(sigma/2) for xi = 0.
struct VelocityFamilySpec
{
    double xi = 1;
    double sigma = 1;

    bool contracting() const { return sigma > 0; }
    bool operator==(const VelocityFamilySpec&) const = default;
};

inline constexpr double xi_zero_snap = 1e-12;

/// Snap |xi| < 1e-12 to the xi = 0 branch. Returns true when snapping happened.
inline bool snap_xi(double& xi)
{
    if (xi != 0 && std::fabs(xi) < xi_zero_snap) {
        xi = 0;
        return true;
    }
    return false;
}

inline std::string format_number(double v)
{
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

inline CurvatureFunction make_velocity(VelocityFamilySpec spec)
{
    if (spec.sigma == 0) throw std::invalid_argument("make_velocity: sigma must be nonzero");
    snap_xi(spec.xi);
    const double sgn = spec.sigma > 0 ? 1.0 : -1.0;
    const std::string xs = format_number(spec.xi), ss = format_number(spec.sigma);
    NodePtr core;
    std::string text;
    if (spec.xi == 0) {
        core = ex::pow(ex::mul(ex::var_a(), ex::var_b()), spec.sigma / 2);
        text = "(a*b)^(" + ss + "/2)";
    } else {
        auto sum = ex::add(ex::pow(ex::var_a(), spec.xi), ex::pow(ex::var_b(), spec.xi));
        core = ex::pow(sum, spec.sigma / spec.xi);
        text = "(a^(" + xs + ")+b^(" + xs + "))^(" + ss + "/" + xs + ")";
    }
    if (sgn < 0) {
        core = ex::neg(core);
        text = "-" + text;
    }
    return CurvatureFunction(core, text, spec.sigma);
}

/// beta = F_a/F_b at (rho, 1) for the family: rho^(xi-1).
inline double beta_of_family(const VelocityFamilySpec& spec, double rho)
{
    double xi = spec.xi;
    snap_xi(xi);
    return std::pow(rho, xi - 1);
}

/// d beta / d a at (rho, 1) for the family.
inline double beta_a_of_family(const VelocityFamilySpec& spec, double rho)
{
    double xi = spec.xi;
    snap_xi(xi);
    return (xi - 1) * std::pow(rho, xi - 2);
}

inline double beta_general(const CurvatureFunction& F, double a, double b)
{
    const auto j = F.jet(a, b);
    if (j.db == 0) throw domain_error("beta_general: F_b vanishes");
    return j.da / j.db;
}

/// (a-b)^2 F^2 / (ab)^2, the vanishing function of any velocity F.
inline CurvatureFunction vanishing_function(const CurvatureFunction& F)
{
    auto d = ex::pow(ex::sub(ex::var_a(), ex::var_b()), 2);
    auto n = ex::mul(d, ex::pow(F.root(), 2));
    auto root = ex::div(n, ex::pow(ex::mul(ex::var_a(), ex::var_b()), 2));
    std::optional<double> chi;
    if (F.degree_hint()) chi = 2 * *F.degree_hint() - 2;
    return CurvatureFunction(root, "(a-b)^2*(" + F.text() + ")^2/(a*b)^2", chi);
}

}  // namespace mpf
