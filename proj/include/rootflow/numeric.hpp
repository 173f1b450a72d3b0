#pragma once

#include <complex>
#include <cstdint>

namespace rootflow {

using cplx = std::complex<double>;

// Complex number with a double significand and a separate power-of-two
// exponent. The significand is either canonical zero (with exponent 0) or has
// modulus in [1, 2).
struct XComplex {
    cplx sig{};
    std::int64_t exp = 0;

    XComplex() = default;
    XComplex(cplx z) : XComplex(from(z, 0)) {}
    XComplex(double x) : XComplex(from(cplx(x, 0.0), 0)) {}

    // Renormalizes an arbitrary (significand, exponent) pair.
    static XComplex from(cplx s, std::int64_t e);
    // exp(log_magnitude + i*phase)
    static XComplex from_log(double log_magnitude, double phase = 0.0);

    bool is_zero() const { return sig == cplx{}; }
    // Value as an ordinary complex; may overflow to inf or underflow to 0.
    cplx to_complex() const;
    XComplex operator-() const {
        XComplex r = *this;
        r.sig = -r.sig;
        return r;
    }

    friend bool operator==(const XComplex&, const XComplex&) = default;
};

// Same representation restricted to the real axis.
struct XReal {
    double sig = 0.0;
    std::int64_t exp = 0;

    XReal() = default;
    XReal(double x) : XReal(from(x, 0)) {}
    static XReal from(double s, std::int64_t e);
    static XReal from_log(double log_magnitude, bool negative = false);

    bool is_zero() const { return sig == 0.0; }
    double to_double() const;
    int sign() const { return (sig > 0) - (sig < 0); }
    XReal operator-() const {
        XReal r = *this;
        r.sig = -r.sig;
        return r;
    }
    friend bool operator==(const XReal&, const XReal&) = default;
};

inline constexpr std::int64_t kAddCutoff = 106;

XComplex xc_mul(const XComplex& a, const XComplex& b);
XComplex xc_add(const XComplex& a, const XComplex& b);
XComplex xc_div(const XComplex& a, const XComplex& b);
XComplex xc_scale_pow2(const XComplex& a, std::int64_t k);
double log_abs(const XComplex& a);

XReal xr_mul(const XReal& a, const XReal& b);
XReal xr_add(const XReal& a, const XReal& b);
double log_abs(const XReal& a);

inline XComplex operator*(const XComplex& a, const XComplex& b) { return xc_mul(a, b); }
inline XComplex operator+(const XComplex& a, const XComplex& b) { return xc_add(a, b); }
inline XComplex operator-(const XComplex& a, const XComplex& b) { return xc_add(a, -b); }
inline XComplex operator/(const XComplex& a, const XComplex& b) { return xc_div(a, b); }
inline XReal operator*(const XReal& a, const XReal& b) { return xr_mul(a, b); }
inline XReal operator+(const XReal& a, const XReal& b) { return xr_add(a, b); }
inline XReal operator-(const XReal& a, const XReal& b) { return xr_add(a, -b); }

// ln Gamma(x) for x > 0.
double log_gamma(double x);

}  // namespace rootflow
