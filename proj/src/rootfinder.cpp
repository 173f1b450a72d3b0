#include "rootflow/rootfinder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace rootflow {

namespace {

constexpr double kAngularOffset = 0.7;

int sign_at(const Poly& p, double x) {
    const double v = evaluate_with_derivative(p, cplx(x, 0.0)).p.real();
    return (v > 0) - (v < 0);
}

}  // namespace

double default_tolerance(int degree) { return degree <= 2000 ? 1e-10 : 1e-8; }

std::vector<cplx> initial_guesses(const Poly& p) {
    const int d = p.degree();
    if (d < 1) throw std::invalid_argument("initial_guesses: degree must be at least 1");
    std::vector<int> idx;
    std::vector<double> lg;
    for (int k = 0; k <= d; ++k) {
        if (p[k].is_zero()) continue;
        idx.push_back(k);
        lg.push_back(log_abs(p[k]));
    }
    // upper convex hull of (k, log|c_k|)
    std::vector<std::size_t> hull;
    for (std::size_t i = 0; i < idx.size(); ++i) {
        while (hull.size() >= 2) {
            const std::size_t a = hull[hull.size() - 2], b = hull.back();
            const double cross = (idx[b] - idx[a]) * (lg[i] - lg[a]) - (lg[b] - lg[a]) * (idx[i] - idx[a]);
            if (cross >= 0) hull.pop_back();
            else break;
        }
        hull.push_back(i);
    }

    std::vector<cplx> out(static_cast<std::size_t>(idx.front()), cplx{});
    for (std::size_t h = 0; h + 1 < hull.size(); ++h) {
        const int i = idx[hull[h]], j = idx[hull[h + 1]];
        const int count = j - i;
        const double radius = std::exp((lg[hull[h]] - lg[hull[h + 1]]) / count);
        for (int l = 0; l < count; ++l) {
            const double angle = 2.0 * std::numbers::pi * (static_cast<double>(l) / count + static_cast<double>(i) / d) +
                                 kAngularOffset;
            out.push_back(std::polar(radius, angle));
        }
    }
    return out;
}

RootSet find_roots(const Poly& p, double tol, int max_iter) {
    if (p.degree() < 1) throw std::invalid_argument("find_roots: degree must be at least 1");
    const Stripped s = strip_exact_origin_zeros(p);
    RootSet rs;
    rs.origin_multiplicity = s.multiplicity;
    const Poly& q = s.poly;
    const int d = q.degree();
    if (d == 0) return rs;

    std::vector<cplx> z = initial_guesses(q);
    std::vector<cplx> next = z;
    std::vector<char> done(static_cast<std::size_t>(d), 0);
    int remaining = d;
    int it = 0;
    while (remaining > 0 && it < max_iter) {
        ++it;
        for (int k = 0; k < d; ++k) {
            if (done[k]) continue;
            const ScaledValue v = evaluate_with_derivative(q, z[k]);
            if (v.p == cplx{}) {
                done[k] = 1;
                --remaining;
                continue;
            }
            const cplx ratio = v.dp / v.p;
            cplx repulsion{};
            for (int j = 0; j < d; ++j)
                if (j != k) repulsion += 1.0 / (z[k] - z[j]);
            const cplx den = ratio - repulsion;
            const cplx delta = den == cplx{} ? cplx{} : 1.0 / den;
            if (!std::isfinite(delta.real()) || !std::isfinite(delta.imag())) continue;
            next[k] = z[k] - delta;
            if (std::abs(delta) < tol * std::max(1.0, std::abs(z[k]))) {
                done[k] = 1;
                --remaining;
            }
        }
        z = next;
    }
    rs.iterations_used = it;
    rs.roots = z;
    rs.residual_log.reserve(z.size());
    for (const cplx& r : z) {
        const XComplex v = evaluate(q, r);
        const double lv = v.is_zero() ? -std::numeric_limits<double>::infinity() : log_abs(v);
        rs.residual_log.push_back(lv - log_abs_scale(q, std::abs(r)));
    }
    // On ill-conditioned inputs the steps stall at rounding noise; a point
    // whose residual is at the evaluation's rounding level is as good as it gets.
    const double noise = std::log(16.0 * (d + 1) * std::numeric_limits<double>::epsilon());
    for (int k = 0; k < d; ++k)
        if (!done[k] && rs.residual_log[k] <= noise) --remaining;
    rs.converged = remaining == 0;
    return rs;
}

std::vector<double> find_real_roots(const Poly& p, double a, double b, double tol) {
    if (!(a < b)) throw std::invalid_argument("find_real_roots: empty interval");
    const int d = p.degree();
    std::vector<double> below;  // roots of the next derivative
    for (int k = d - 1; k >= 0; --k) {
        const Poly q = derivative(p, k);
        std::vector<double> pts{a};
        for (double r : below)
            if (r > a && r < b) pts.push_back(r);
        pts.push_back(b);
        std::vector<int> sg(pts.size());
        for (std::size_t i = 0; i < pts.size(); ++i) sg[i] = sign_at(q, pts[i]);

        std::vector<double> found;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (sg[i] == 0 && (found.empty() || found.back() != pts[i])) found.push_back(pts[i]);
            if (i + 1 == pts.size() || sg[i] * sg[i + 1] >= 0) continue;
            double lo = pts[i], hi = pts[i + 1];
            const int slo = sg[i];
            while (hi - lo > tol * std::max(1.0, std::abs(lo))) {
                const double mid = 0.5 * (lo + hi);
                if (mid <= lo || mid >= hi) break;
                const int sm = sign_at(q, mid);
                if (sm == 0) {
                    lo = hi = mid;
                    break;
                }
                (sm == slo ? lo : hi) = mid;
            }
            found.push_back(0.5 * (lo + hi));
        }
        if (static_cast<int>(found.size()) != q.degree())
            throw std::runtime_error("find_real_roots: bracket count does not match degree; "
                                     "polynomial is not real-rooted in the interval");
        below = std::move(found);
    }
    return below;
}

void write_roots_csv(std::ostream& out, const RootSet& rs) {
    out << "re,im,modulus,residual_log\n";
    const auto old = out.precision(17);
    for (int k = 0; k < rs.origin_multiplicity; ++k) out << "0,0,0,-inf\n";
    for (std::size_t k = 0; k < rs.roots.size(); ++k)
        out << rs.roots[k].real() << ',' << rs.roots[k].imag() << ',' << std::abs(rs.roots[k]) << ','
            << rs.residual_log[k] << '\n';
    out.precision(old);
}

}  // namespace rootflow
