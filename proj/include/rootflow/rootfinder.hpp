#pragma once

#include "rootflow/polynomial.hpp"

#include <iosfwd>
#include <vector>

namespace rootflow {

struct RootSet {
    std::vector<cplx> roots;          // zeros of the deflated polynomial
    std::vector<double> residual_log; // log|p(z)| - log(sum |c_k||z|^k)
    int origin_multiplicity = 0;      // exact zeros at 0 removed before iterating
    int iterations_used = 0;
    bool converged = true;
};

double default_tolerance(int degree);

// Aberth-Ehrlich iteration with Jacobi sweeps.
RootSet find_roots(const Poly& p, double tol, int max_iter = 500);
inline RootSet find_roots(const Poly& p) { return find_roots(p, default_tolerance(p.degree())); }

// Newton-polygon starting points: one circle per polygon edge.
std::vector<cplx> initial_guesses(const Poly& p);

// Real roots in [a, b] of a polynomial with real coefficients that is
// assumed real-rooted there, located by bisection on brackets inherited from
// the roots of the next derivative.
std::vector<double> find_real_roots(const Poly& p, double a, double b, double tol = 1e-13);

// CSV rows: re, im, modulus, residual_log.
void write_roots_csv(std::ostream& out, const RootSet& rs);

}  // namespace rootflow
