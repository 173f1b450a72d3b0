#pragma once

// Cauchy-Stieltjes machinery for real-rooted polynomials. G_t is evaluated by
// subordination: G_t(z) = G_0(w) where w solves z = w - t / G_0(w), which is
// the change of variables w_t(y) = w_0(y + t) y / (y + t) written without y.
// The y-parametrized route (nested bisection through w_0) is kept for points
// right of the support as an independent check.

#include "rootflow/closedforms.hpp"
#include "rootflow/ensembles.hpp"
#include "rootflow/numeric.hpp"

#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace rootflow {

struct RealMeasure {
    double a = 0.0, b = 0.0;       // hull of atoms and density support
    std::vector<RealAtom> atoms;
    std::function<double(double)> density;  // continuous part on (lo, hi); may be empty
    double lo = 0.0, hi = 0.0;
    double density_mass = 0.0;

    double total_mass() const;
    double atom_mass_at(double x) const;
    void validate() const;
};

RealMeasure atoms_measure(std::span<const double> locations, std::span<const double> masses);
RealMeasure arcsine_measure(double a, double b);
// Continuous measure on (lo, hi); the mass is computed by quadrature.
RealMeasure density_measure(double lo, double hi, std::function<double(double)> density);
RealMeasure measure_from_law(const RealLaw& law);
RealMeasure shifted(const RealMeasure& mu, double c);

// Signals when z is real and lies on an atom or inside the density support.
cplx cauchy_transform(const RealMeasure& mu, cplx z);
cplx cauchy_derivative(const RealMeasure& mu, cplx z);

// Solution w > 0 of y = w G(w + b) - i.e. in the chart where the right end
// of the hull sits at 0. Requires mu({b}) < y < m.
double w0(const RealMeasure& mu, double y);

// Subordination point w(z) with Im w >= Im z >= 0, found by Newton
// continuation from far above the axis.
cplx subordination(const RealMeasure& mu0, double t, cplx z);

// Signals for real x inside the support band of mu_t, or t outside [0, m).
cplx g_at_time(const RealMeasure& mu0, double t, cplx z);
// G_t(x) for real x > b through w_t(y) = x - b solved by nested bisection.
double g_at_time_w(const RealMeasure& mu0, double t, double x);

// Density of the continuous part of mu_t from the boundary value G_t(x + i0).
double line_density(const RealMeasure& mu0, double t, double x);

// Closed intervals carrying the continuous part of mu_t.
std::vector<std::pair<double, double>> support_bands(const RealMeasure& mu0, double t);

std::vector<double> stieltjes_invert(const std::function<cplx(cplx)>& G, std::span<const double> grid,
                                     double y_offset = 1e-6, bool richardson = true);

// Mass of -y Im G(p + iy) extrapolated to y = 0 from y in {1e-4, ..., 1e-7}
// by fitting c0 + c1 y^(1/2) + c2 y + c3 y^(3/2); the half powers absorb a
// band edge sitting on the pole. Masses below 1e-8 are dropped.
std::vector<RealAtom> atom_recovery(const std::function<cplx(cplx)>& G, std::span<const double> candidate_poles);

// R(lambda) = z lambda - 1 where G(z) = lambda, z right of the support.
double r_transform(const std::function<double(double)>& G, double right_edge, double lambda);
double r_transform(const RealMeasure& mu, double lambda);

struct TransformedMeasure {
    double t = 0.0;
    double mass = 0.0;
    std::vector<std::pair<double, double>> bands;
    std::vector<RealAtom> atoms;
    std::function<cplx(cplx)> G;
    std::function<double(double)> density;
};
TransformedMeasure transform_measure(const RealMeasure& mu0, double t);

// Rebuilds mu_t from its recovered atoms and boundary density, rescales it to
// a probability measure on x / (1 - t), and returns the largest deviation of
// its R-transform from R_0 / (1 - t) over the lambda grid.
double free_power_check(const RealMeasure& mu0, double t, std::span<const double> lambdas, int nodes_per_band = 200);

}  // namespace rootflow
