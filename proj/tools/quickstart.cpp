// SPDX-License-Identifier: MIT
// Check a pinching quantity against H^3 and print the mean curvature table.

#include <iostream>

#include <mpf/mpf.hpp>

int main()
{
    const double sigma = 3;
    const auto w = mpf::parse_expression("(a-b)^2*(a+b)^(2*s)/(a*b)^2", sigma);
    const mpf::VelocityFamilySpec H3{1, sigma};
    const auto report = mpf::check_mpf(w, mpf::make_velocity(H3), H3);

    std::cout << "overall: " << mpf::to_string(report.overall) << "\n";
    std::cout << "alpha ~ " << report.alpha.c << "/rho, expected 1/sigma = " << 1 / sigma << "\n\n";
    std::cout << mpf::markdown_table(mpf::Family::mean);
}
