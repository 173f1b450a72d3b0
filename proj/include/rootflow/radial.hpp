#pragma once

#include "rootflow/closedforms.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace rootflow {

// Radial distribution function Psi(x) = mass of zeros with modulus <= x
// (right-continuous). quantile(q) = inf{x : Psi(x) >= q} for q in (0, mass];
// quantile_right(q) = inf{x : Psi(x) > q}, which differs only across gaps.
struct RadialCDF {
    std::function<double(double)> cdf;
    std::function<double(double)> quantile;
    std::function<double(double)> quantile_right;
    double support_max = 0.0;  // may be +inf
    double mass = 1.0;         // may be +inf

    // Atoms (circles of zeros) and flat stretches (void annuli, void disk)
    // of the law, listed exactly; t > 0 laws have none of either.
    struct Circle {
        double radius, mass;
    };
    struct Gap {
        double r_lo, r_hi, level;  // Psi == level on [r_lo, r_hi)
    };
    std::vector<Circle> circles;
    std::vector<Gap> gaps;

    // Set when this is a catalogued closed-form law at the given time.
    std::optional<SolutionId> family;
    double time = 0.0;

    double operator()(double x) const { return cdf(x); }
};

}  // namespace rootflow
