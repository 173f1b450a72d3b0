#include "rootflow/numeric.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace rootflow {

namespace {

constexpr double kLn2 = 0.69314718055994530942;

// ldexp that tolerates shifts outside the int range.
double shift(double x, std::int64_t k) {
    if (k > 4000) k = 4000;
    if (k < -4000) k = -4000;
    return std::ldexp(x, static_cast<int>(k));
}

}  // namespace

XComplex XComplex::from(cplx s, std::int64_t e) {
    XComplex r;
    const double m = std::abs(s);
    if (m == 0.0 || !std::isfinite(m)) {
        if (m == 0.0) return r;
        r.sig = s;  // non-finite input passes through unnormalized
        r.exp = e;
        return r;
    }
    int k = 0;
    std::frexp(m, &k);  // m = f * 2^k, f in [0.5, 1)
    r.sig = cplx(std::ldexp(s.real(), 1 - k), std::ldexp(s.imag(), 1 - k));
    r.exp = e + k - 1;
    // hypot rounding can leave the modulus a hair outside [1, 2)
    const double m2 = std::abs(r.sig);
    if (m2 >= 2.0) {
        r.sig *= 0.5;
        ++r.exp;
    } else if (m2 < 1.0) {
        r.sig *= 2.0;
        --r.exp;
    }
    return r;
}

XComplex XComplex::from_log(double log_magnitude, double phase) {
    if (log_magnitude == -std::numeric_limits<double>::infinity()) return {};
    const double e2 = std::floor(log_magnitude / kLn2);
    const double frac = log_magnitude - e2 * kLn2;
    return from(std::polar(std::exp(frac), phase), static_cast<std::int64_t>(e2));
}

cplx XComplex::to_complex() const {
    return {shift(sig.real(), exp), shift(sig.imag(), exp)};
}

XReal XReal::from(double s, std::int64_t e) {
    XReal r;
    if (s == 0.0) return r;
    if (!std::isfinite(s)) {
        r.sig = s;
        r.exp = e;
        return r;
    }
    int k = 0;
    const double f = std::frexp(s, &k);
    r.sig = 2.0 * f;
    r.exp = e + k - 1;
    return r;
}

XReal XReal::from_log(double log_magnitude, bool negative) {
    const XComplex c = XComplex::from_log(log_magnitude);
    XReal r;
    r.sig = negative ? -c.sig.real() : c.sig.real();
    r.exp = c.exp;
    return r;
}

double XReal::to_double() const { return shift(sig, exp); }

XComplex xc_mul(const XComplex& a, const XComplex& b) {
    if (a.is_zero() || b.is_zero()) return {};
    return XComplex::from(a.sig * b.sig, a.exp + b.exp);
}

XComplex xc_add(const XComplex& a, const XComplex& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    const std::int64_t d = a.exp - b.exp;
    if (d > kAddCutoff) return a;
    if (d < -kAddCutoff) return b;
    if (d >= 0) {
        const cplx s = a.sig + cplx(shift(b.sig.real(), -d), shift(b.sig.imag(), -d));
        return XComplex::from(s, a.exp);
    }
    const cplx s = b.sig + cplx(shift(a.sig.real(), d), shift(a.sig.imag(), d));
    return XComplex::from(s, b.exp);
}

XComplex xc_div(const XComplex& a, const XComplex& b) {
    if (b.is_zero()) throw std::domain_error("xc_div: division by zero");
    if (a.is_zero()) return {};
    return XComplex::from(a.sig / b.sig, a.exp - b.exp);
}

XComplex xc_scale_pow2(const XComplex& a, std::int64_t k) {
    if (a.is_zero()) return a;
    XComplex r = a;
    r.exp += k;
    return r;
}

double log_abs(const XComplex& a) {
    if (a.is_zero()) throw std::domain_error("log_abs: zero argument");
    return std::log(std::abs(a.sig)) + static_cast<double>(a.exp) * kLn2;
}

XReal xr_mul(const XReal& a, const XReal& b) {
    if (a.is_zero() || b.is_zero()) return {};
    return XReal::from(a.sig * b.sig, a.exp + b.exp);
}

XReal xr_add(const XReal& a, const XReal& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    const std::int64_t d = a.exp - b.exp;
    if (d > kAddCutoff) return a;
    if (d < -kAddCutoff) return b;
    if (d >= 0) return XReal::from(a.sig + shift(b.sig, -d), a.exp);
    return XReal::from(b.sig + shift(a.sig, d), b.exp);
}

double log_abs(const XReal& a) {
    if (a.is_zero()) throw std::domain_error("log_abs: zero argument");
    return std::log(std::abs(a.sig)) + static_cast<double>(a.exp) * kLn2;
}

double log_gamma(double x) {
    if (!(x > 0.0)) throw std::domain_error("log_gamma: argument must be positive");
    return boost::math::lgamma(x);
}

}  // namespace rootflow
