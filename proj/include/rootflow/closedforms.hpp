#pragma once

// Explicit limiting laws for the zeros of repeated derivatives. Complex-case
// functions return the radial distribution function Psi(x, t) (total mass
// 1 - t) and its density psi; real-case functions return line densities.
// Formulas hold on the closed support; density is zero outside it.

#include <iosfwd>
#include <span>
#include <vector>

namespace rootflow {

struct RadialValue {
    double Psi;
    double psi;
};

RadialValue kac(double x, double t);
RadialValue circle_mixture(double x, double t, std::span<const double> radii, std::span<const double> weights);
RadialValue weyl_family(double x, double t, double alpha);
RadialValue interval_uniform(double x, double t, double r1, double r2);
RadialValue elliptic(double x, double t, double alpha);
RadialValue hyperbolic(double x, double t, double alpha);

// Implicit-equation solutions for any alpha, by bisection; the named
// functions above route special alphas to their closed forms.
RadialValue weyl_implicit(double x, double t, double alpha);
RadialValue elliptic_implicit(double x, double t, double alpha);
RadialValue hyperbolic_implicit(double x, double t, double alpha);

// Occupied radial windows of a circle mixture at time t, innermost first.
struct Window {
    double lo, hi;
};
std::vector<Window> circle_mixture_windows(double t, std::span<const double> radii, std::span<const double> weights);

struct RealAtom {
    double x;
    double mass;
};

// Zeros of derivatives of x^(m1 n) (x+1)^(m2 n): continuous part on
// (x_minus, x_plus) plus surviving atoms at 0 and -1.
struct TwoAtomValue {
    double density;
    double x_minus, x_plus;
    std::vector<RealAtom> atoms;
};
TwoAtomValue two_atom_real(double x, double t, double m1, double m2);

// The same law transported to [-1, 1]: derivatives of (x^2 - 1)^n.
TwoAtomValue symmetric_two_atom_real(double x, double t);

// Evolution of the arcsine law on [-1, 1]; s is the derivative fraction.
double arcsine_real(double x, double s);

enum class Family { kac, circle_mixture, weyl, interval_uniform, elliptic, hyperbolic, two_atom_real, arcsine_real };

struct SolutionId {
    Family family = Family::kac;
    std::vector<double> radii, weights;  // circle_mixture
    double alpha = 1.0;                  // weyl, elliptic, hyperbolic
    double r1 = 0.0, r2 = 1.0;           // interval_uniform
    double m1 = 1.0, m2 = 1.0;           // two_atom_real

    void validate() const;
    bool complex_case() const { return family != Family::two_atom_real && family != Family::arcsine_real; }
    // Total mass at t = 0 (infinite for the hyperbolic family).
    double initial_mass() const;
};

RadialValue evaluate_radial(const SolutionId& id, double x, double t);
// Continuous part of a real-case law.
double evaluate_line_density(const SolutionId& id, double x, double t);
std::vector<RealAtom> line_atoms(const SolutionId& id, double t);

// CSV with header x,Psi,psi for complex laws or x,density for real laws.
void write_solution_csv(std::ostream& out, const SolutionId& id, double t, std::span<const double> grid);

}  // namespace rootflow
