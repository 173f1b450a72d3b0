#include "rootflow/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace rootflow {

namespace {

constexpr double kLn2 = 0.69314718055994530942;

double shift(double x, std::int64_t k) {
    if (k < -2000) return 0.0;
    if (k > 2000) k = 2000;
    return std::ldexp(x, static_cast<int>(k));
}

cplx shift(cplx z, std::int64_t k) { return {shift(z.real(), k), shift(z.imag(), k)}; }

// Sum of XComplex terms with a lazily maintained common exponent.
class Accumulator {
public:
    void add(cplx sig, std::int64_t e) {
        if (sig == cplx{}) return;
        if (empty_) {
            s_ = sig;
            e_ = e;
            empty_ = false;
            return;
        }
        if (e > e_) {
            s_ = shift(s_, e_ - e);
            e_ = e;
            s_ += sig;
        } else {
            s_ += shift(sig, e - e_);
        }
    }
    XComplex value() const { return empty_ ? XComplex{} : XComplex::from(s_, e_); }

private:
    cplx s_{};
    std::int64_t e_ = 0;
    bool empty_ = true;
};

std::vector<XComplex> convolve(const std::vector<XComplex>& a, const std::vector<XComplex>& b) {
    std::vector<XComplex> out(a.size() + b.size() - 1);
    for (std::size_t k = 0; k < out.size(); ++k) {
        Accumulator acc;
        const std::size_t lo = k >= b.size() ? k - b.size() + 1 : 0;
        const std::size_t hi = std::min(k, a.size() - 1);
        for (std::size_t i = lo; i <= hi; ++i) {
            const XComplex& x = a[i];
            const XComplex& y = b[k - i];
            if (x.is_zero() || y.is_zero()) continue;
            acc.add(x.sig * y.sig, x.exp + y.exp);
        }
        out[k] = acc.value();
    }
    return out;
}

// Recursive even/odd split of an angularly sorted list: every subtree of the
// product tree then holds roots spread around the whole circle, which keeps
// the intermediate products balanced.
void interleave(std::span<const cplx> in, std::vector<cplx>& out) {
    if (in.size() <= 1) {
        out.insert(out.end(), in.begin(), in.end());
        return;
    }
    std::vector<cplx> even, odd;
    for (std::size_t i = 0; i < in.size(); ++i) (i % 2 == 0 ? even : odd).push_back(in[i]);
    interleave(even, out);
    interleave(odd, out);
}

// ln((k+m)!/k!)
double log_falling(int k, int m) { return log_gamma(k + m + 1.0) - log_gamma(k + 1.0); }

XComplex factorial_ratio(int k, int m) {
    if (m <= 64) {
        XComplex f(1.0);
        for (int j = 1; j <= m; ++j) f = f * XComplex(static_cast<double>(k + j));
        return f;
    }
    return XComplex::from_log(log_falling(k, m));
}

}  // namespace

Poly::Poly(std::vector<XComplex> coeffs, int derivative_order)
    : coeffs_(std::move(coeffs)), derivative_order_(derivative_order) {
    while (!coeffs_.empty() && coeffs_.back().is_zero()) coeffs_.pop_back();
    if (coeffs_.empty()) throw std::invalid_argument("Poly: zero polynomial");
}

Poly from_roots(std::span<const cplx> roots) {
    if (roots.empty()) throw std::invalid_argument("from_roots: empty root list");
    for (const cplx& r : roots)
        if (!std::isfinite(r.real()) || !std::isfinite(r.imag()))
            throw std::invalid_argument("from_roots: non-finite root");

    std::vector<cplx> sorted(roots.begin(), roots.end());
    std::stable_sort(sorted.begin(), sorted.end(), [](cplx a, cplx b) {
        const double aa = std::arg(a), ab = std::arg(b);
        if (aa != ab) return aa < ab;
        return std::abs(a) < std::abs(b);
    });
    std::vector<cplx> order;
    order.reserve(sorted.size());
    interleave(sorted, order);

    std::vector<std::vector<XComplex>> level;
    level.reserve(order.size());
    for (const cplx& r : order) level.push_back({XComplex(-r), XComplex(1.0)});
    while (level.size() > 1) {
        std::vector<std::vector<XComplex>> next;
        next.reserve((level.size() + 1) / 2);
        for (std::size_t i = 0; i + 1 < level.size(); i += 2) next.push_back(convolve(level[i], level[i + 1]));
        if (level.size() % 2 == 1) next.push_back(std::move(level.back()));
        level = std::move(next);
    }
    return Poly(std::move(level.front()));
}

Poly derivative(const Poly& p, int m) {
    if (m < 0 || m > p.degree()) throw std::invalid_argument("derivative: order out of range");
    if (m == 0) return p;
    std::vector<XComplex> out(static_cast<std::size_t>(p.degree() - m + 1));
    for (int k = 0; k < static_cast<int>(out.size()); ++k) out[k] = p[k + m] * factorial_ratio(k, m);
    return Poly(std::move(out), p.derivative_order() + m);
}

Poly fractional_derivative(const Poly& p, double alpha) {
    if (!(alpha >= 0.0 && alpha <= p.degree()))
        throw std::invalid_argument("fractional_derivative: alpha outside [0, degree]");
    const int start = static_cast<int>(std::floor(alpha));
    std::vector<XComplex> out(p.coeffs().size());
    for (int k = start; k <= p.degree(); ++k) {
        if (p[k].is_zero()) continue;
        const double lf = log_gamma(k + 1.0) - log_gamma(k - alpha + 1.0);
        out[k] = p[k] * XComplex::from_log(lf);
    }
    return Poly(std::move(out), p.derivative_order());
}

ScaledValue evaluate_with_derivative(const Poly& p, cplx z) {
    const auto& c = p.coeffs();
    cplx s = c.back().sig, ds{};
    std::int64_t e = c.back().exp;
    for (int k = p.degree() - 1; k >= 0; --k) {
        ds = ds * z + s;
        s = s * z;
        const XComplex& ck = c[static_cast<std::size_t>(k)];
        if (!ck.is_zero()) {
            const std::int64_t d = ck.exp - e;
            if (d > 0) {
                s = shift(s, -d);
                ds = shift(ds, -d);
                e = ck.exp;
                s += ck.sig;
            } else {
                s += shift(ck.sig, d);
            }
        }
        const double mag = std::max({std::abs(s.real()), std::abs(s.imag()), std::abs(ds.real()),
                                     std::abs(ds.imag())});
        if (mag > 0x1.0p+500 || (mag < 0x1.0p-500 && mag != 0.0)) {
            int q = 0;
            std::frexp(mag, &q);
            s = shift(s, -q);
            ds = shift(ds, -q);
            e += q;
        }
    }
    return {s, ds, e};
}

XComplex evaluate(const Poly& p, cplx z) {
    const ScaledValue v = evaluate_with_derivative(p, z);
    return XComplex::from(v.p, v.exp);
}

double log_abs_scale(const Poly& p, double modulus) {
    // Horner on magnitudes in log space would be slow; reuse the scaled
    // evaluator on |c_k| at the positive real point.
    std::vector<XComplex> mags;
    mags.reserve(p.coeffs().size());
    for (const XComplex& c : p.coeffs()) mags.push_back(XComplex::from(cplx(std::abs(c.sig), 0.0), c.exp));
    const ScaledValue v = evaluate_with_derivative(Poly(std::move(mags)), cplx(modulus, 0.0));
    return std::log(std::abs(v.p)) + static_cast<double>(v.exp) * kLn2;
}

Stripped strip_exact_origin_zeros(const Poly& p) {
    int k = 0;
    while (k < p.degree() && p[k].is_zero()) ++k;
    if (k == 0) return {p, 0};
    std::vector<XComplex> rest(p.coeffs().begin() + k, p.coeffs().end());
    return {Poly(std::move(rest), p.derivative_order()), k};
}

Stripped strip_origin_zeros(const Poly& p, double tol) {
    if (tol < 0.0) throw std::invalid_argument("strip_origin_zeros: negative tolerance");
    double max_log = -std::numeric_limits<double>::infinity();
    for (const XComplex& c : p.coeffs())
        if (!c.is_zero()) max_log = std::max(max_log, log_abs(c));
    const double guard = 0.9 * 53.0 * kLn2 + std::log(std::max(1, p.degree())) + tol;
    int k = 0;
    while (k < p.degree() && (p[k].is_zero() || log_abs(p[k]) < max_log - guard)) ++k;
    if (k == 0) return {p, 0};
    std::vector<XComplex> rest(p.coeffs().begin() + k, p.coeffs().end());
    return {Poly(std::move(rest), p.derivative_order()), k};
}

void write_coefficients_csv(std::ostream& out, const Poly& p) {
    out << "index,re_significand,im_significand,exponent\n";
    const auto old = out.precision(17);
    for (int k = 0; k <= p.degree(); ++k)
        out << k << ',' << p[k].sig.real() << ',' << p[k].sig.imag() << ',' << p[k].exp << '\n';
    out.precision(old);
}

}  // namespace rootflow
