#pragma once

#include "rootflow/numeric.hpp"

#include <iosfwd>
#include <span>
#include <vector>

namespace rootflow {

// Dense polynomial sum_k coeffs[k] z^k with extended-exponent coefficients.
class Poly {
public:
    // Trailing (highest-index) zero coefficients are trimmed; an all-zero
    // sequence is rejected.
    explicit Poly(std::vector<XComplex> coeffs, int derivative_order = 0);

    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    int derivative_order() const { return derivative_order_; }
    const std::vector<XComplex>& coeffs() const { return coeffs_; }
    const XComplex& operator[](int k) const { return coeffs_[static_cast<std::size_t>(k)]; }
    const XComplex& leading() const { return coeffs_.back(); }

private:
    std::vector<XComplex> coeffs_;
    int derivative_order_ = 0;
};

Poly from_roots(std::span<const cplx> roots);
Poly derivative(const Poly& p, int m);
// Coefficients P^(k)(0) / Gamma(k - alpha + 1) for k >= floor(alpha), zero below.
Poly fractional_derivative(const Poly& p, double alpha);
XComplex evaluate(const Poly& p, cplx z);

// p(z) and p'(z) sharing one power-of-two scale; only their ratio and
// log-magnitudes are meaningful without the scale.
struct ScaledValue {
    cplx p;
    cplx dp;
    std::int64_t exp;
};
ScaledValue evaluate_with_derivative(const Poly& p, cplx z);
// log sum_k |c_k| |z|^k, the natural scale for residuals at z.
double log_abs_scale(const Poly& p, double modulus);

struct Stripped {
    Poly poly;
    int multiplicity;
};
// Removes low-order coefficients that sit below the double noise floor
// relative to the largest coefficient (and exact zeros). `tol` widens the
// guard by that many nats.
Stripped strip_origin_zeros(const Poly& p, double tol = 0.0);
// Removes only exactly-zero low-order coefficients.
Stripped strip_exact_origin_zeros(const Poly& p);

// CSV rows: index, re_significand, im_significand, exponent.
void write_coefficients_csv(std::ostream& out, const Poly& p);

}  // namespace rootflow
