#include "rootflow/closedforms.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace rootflow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_time(double t, double limit, const char* who) {
    if (!(t >= 0.0 && t < limit)) throw std::domain_error(std::string(who) + ": time out of range");
}

// Root of an increasing function on (lo, hi) by bisection down to adjacent doubles.
template <class F>
double bisect(F&& f, double lo, double hi) {
    for (int i = 0; i < 2000; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (f(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double safe_log(double v) { return v > 0.0 ? std::log(v) : -kInf; }

}  // namespace

RadialValue kac(double x, double t) {
    check_time(t, 1.0, "kac");
    if (t == 0.0) return {x >= 1.0 ? 1.0 : 0.0, 0.0};
    if (x <= 0.0) return {0.0, 0.0};
    if (x > 1.0 - t) return {1.0 - t, 0.0};
    return {x * t / (1.0 - x), t / ((1.0 - x) * (1.0 - x))};
}

namespace {

struct MixtureLayout {
    std::vector<double> r, before, after;  // nonzero-weight circles with P_{l-1}, P_l
};

MixtureLayout layout(std::span<const double> radii, std::span<const double> weights) {
    if (radii.empty() || radii.size() != weights.size())
        throw std::invalid_argument("circle_mixture: radii and weights must be nonempty and of equal length");
    double sum = 0.0;
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (!(radii[i] > 0.0) || (i > 0 && !(radii[i] > radii[i - 1])))
            throw std::invalid_argument("circle_mixture: radii must be positive and strictly increasing");
        if (!(weights[i] >= 0.0)) throw std::invalid_argument("circle_mixture: negative weight");
        sum += weights[i];
    }
    if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument("circle_mixture: weights must sum to 1");
    MixtureLayout out;
    double acc = 0.0;
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (weights[i] == 0.0) continue;
        out.r.push_back(radii[i]);
        out.before.push_back(acc);
        acc = i + 1 == radii.size() ? 1.0 : acc + weights[i];
        out.after.push_back(acc);
    }
    out.after.back() = 1.0;
    return out;
}

}  // namespace

std::vector<Window> circle_mixture_windows(double t, std::span<const double> radii, std::span<const double> weights) {
    check_time(t, 1.0, "circle_mixture");
    const MixtureLayout L = layout(radii, weights);
    std::vector<Window> out;
    for (std::size_t l = 0; l < L.r.size(); ++l) {
        if (L.after[l] <= t) continue;  // killed circle (right limit at P_l = t)
        if (t == 0.0) {
            out.push_back({L.r[l], L.r[l]});
        } else if (L.before[l] <= t) {
            out.push_back({0.0, L.r[l] * (L.after[l] - t) / L.after[l]});
        } else {
            out.push_back({L.r[l] * (L.before[l] - t) / L.before[l], L.r[l] * (L.after[l] - t) / L.after[l]});
        }
    }
    return out;
}

RadialValue circle_mixture(double x, double t, std::span<const double> radii, std::span<const double> weights) {
    check_time(t, 1.0, "circle_mixture");
    const MixtureLayout L = layout(radii, weights);
    if (t == 0.0) {
        double psi0 = 0.0;
        for (std::size_t l = 0; l < L.r.size(); ++l)
            if (L.r[l] <= x) psi0 = L.after[l];
        return {psi0, 0.0};
    }
    if (x <= 0.0) return {0.0, 0.0};
    for (std::size_t l = 0; l < L.r.size(); ++l) {
        if (L.after[l] <= t) continue;
        const bool disk = L.before[l] <= t;
        const double lo = disk ? 0.0 : L.r[l] * (L.before[l] - t) / L.before[l];
        const double hi = L.r[l] * (L.after[l] - t) / L.after[l];
        if (x < lo) return {L.before[l] - t, 0.0};
        if (x <= hi) {
            const double d = L.r[l] - x;
            return {t * x / d, t * L.r[l] / (d * d)};
        }
    }
    return {1.0 - t, 0.0};
}

RadialValue weyl_implicit(double x, double t, double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("weyl_family: alpha must be positive");
    check_time(t, 1.0, "weyl_family");
    if (x <= 0.0) return {0.0, 0.0};
    if (x > 1.0 - t) return {1.0 - t, 0.0};
    const double lx = std::log(x);
    auto F = [&](double p) { return (alpha - 1.0) * safe_log(p + t) + safe_log(p); };
    const double P = bisect([&](double p) { return F(p) - lx; }, 0.0, 1.0 - t);
    const double dF = (alpha * P + t) / (P * (P + t));
    return {P, 1.0 / (x * dF)};
}

RadialValue weyl_family(double x, double t, double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("weyl_family: alpha must be positive");
    check_time(t, 1.0, "weyl_family");
    if (x <= 0.0) return {0.0, 0.0};
    if (x > 1.0 - t) return {1.0 - t, 0.0};
    if (alpha == 1.0) return {x, 1.0};
    if (alpha == 0.5) {
        const double s = std::sqrt(x * x + 4.0 * t);
        return {(x * x + x * s) / 2.0, x + (x * x + 2.0 * t) / s};
    }
    if (alpha == 2.0) {
        const double s = std::sqrt(t * t + 4.0 * x);
        return {(s - t) / 2.0, 1.0 / s};
    }
    return weyl_implicit(x, t, alpha);
}

RadialValue interval_uniform(double x, double t, double r1, double r2) {
    if (!(r1 >= 0.0 && r2 > r1)) throw std::invalid_argument("interval_uniform: need 0 <= r1 < r2");
    check_time(t, 1.0, "interval_uniform");
    if (x <= 0.0) return {0.0, 0.0};
    if (x > (1.0 - t) * r2) return {1.0 - t, 0.0};
    const double d = r2 - r1;
    const double a = r1 + d * t - x;
    const double s = std::sqrt(a * a + 4.0 * t * d * x);
    if (s == 0.0) return {0.0, 0.0};
    return {(x - d * t - r1 + s) / (2.0 * d), 1.0 / (2.0 * d) + (x + d * t - r1) / (2.0 * d * s)};
}

RadialValue elliptic_implicit(double x, double t, double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("elliptic: alpha must be positive");
    check_time(t, 1.0, "elliptic");
    if (x <= 0.0) return {0.0, 0.0};
    if (x == kInf) return {1.0 - t, 0.0};
    const double lx = std::log(x);
    auto F = [&](double p) {
        return (alpha - 1.0) * safe_log(p + t) - alpha * safe_log(1.0 - p - t) + safe_log(p);
    };
    const double P = bisect([&](double p) { return F(p) - lx; }, 0.0, 1.0 - t);
    const double dF = (alpha - 1.0) / (P + t) + alpha / (1.0 - P - t) + 1.0 / P;
    return {P, 1.0 / (x * dF)};
}

RadialValue elliptic(double x, double t, double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("elliptic: alpha must be positive");
    check_time(t, 1.0, "elliptic");
    if (x <= 0.0) return {0.0, 0.0};
    if (alpha == 1.0) return {x * (1.0 - t) / (1.0 + x), (1.0 - t) / ((1.0 + x) * (1.0 + x))};
    if (alpha == 0.5) {
        const double x2 = x * x, q = 1.0 + x2;
        const double s = std::sqrt(x2 - 4.0 * (t - 1.0) * t);
        const double P = (-(2.0 * t - 1.0) * x2 + x * s) / (2.0 * q);
        const double p = -x * (2.0 * t - 1.0) / (q * q) +
                         (x2 - 2.0 * t * t + 2.0 * t * t * x2 + 2.0 * t - 2.0 * t * x2) / (q * q * s);
        return {P, p};
    }
    return elliptic_implicit(x, t, alpha);
}

RadialValue hyperbolic_implicit(double x, double t, double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("hyperbolic: alpha must be positive");
    if (!(t >= 0.0)) throw std::domain_error("hyperbolic: time must be nonnegative");
    if (x <= 0.0) return {0.0, 0.0};
    if (x >= 1.0) return {kInf, kInf};
    const double lx = std::log(x);
    auto F = [&](double p) {
        return (alpha - 1.0) * safe_log(p + t) - alpha * std::log(p + 1.0 + t) + safe_log(p);
    };
    double hi = 1.0;
    while (F(hi) < lx) hi *= 2.0;
    const double P = bisect([&](double p) { return F(p) - lx; }, 0.0, hi);
    const double dF = (alpha - 1.0) / (P + t) - alpha / (P + 1.0 + t) + 1.0 / P;
    return {P, 1.0 / (x * dF)};
}

RadialValue hyperbolic(double x, double t, double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("hyperbolic: alpha must be positive");
    if (!(t >= 0.0)) throw std::domain_error("hyperbolic: time must be nonnegative");
    if (x <= 0.0) return {0.0, 0.0};
    if (x >= 1.0) return {kInf, kInf};
    if (alpha == 1.0) return {x * (t + 1.0) / (1.0 - x), (t + 1.0) / ((1.0 - x) * (1.0 - x))};
    if (alpha == 0.5) {
        const double x2 = x * x, q = 1.0 - x2;
        const double s = std::sqrt(x2 + 4.0 * (t + 1.0) * t);
        const double P = ((2.0 * t + 1.0) * x2 + x * s) / (2.0 * q);
        const double p = x * (2.0 * t + 1.0) / (q * q) +
                         (x2 + 2.0 * t * t + 2.0 * t * t * x2 + 2.0 * t + 2.0 * t * x2) / (q * q * s);
        return {P, p};
    }
    return hyperbolic_implicit(x, t, alpha);
}

TwoAtomValue two_atom_real(double x, double t, double m1, double m2) {
    if (!(m1 > 0.0 && m2 > 0.0)) throw std::invalid_argument("two_atom_real: masses must be positive");
    const double M = m1 + m2;
    check_time(t, M, "two_atom_real");
    const double D = 2.0 * std::sqrt(m1 * m2 * t * (M - t));
    const double base = (t - m1) * m1 - m2 * (t + m1);
    TwoAtomValue v{0.0, (base - D) / (M * M), (base + D) / (M * M), {}};
    if (x > v.x_minus && x < v.x_plus) {
        const double r = (v.x_plus - x) * (x - v.x_minus);
        v.density = M * std::sqrt(r) / (2.0 * std::numbers::pi * std::abs(x) * (1.0 + x));
    }
    if (t < m2) v.atoms.push_back({-1.0, m2 - t});
    if (t < m1) v.atoms.push_back({0.0, m1 - t});
    return v;
}

TwoAtomValue symmetric_two_atom_real(double x, double t) {
    check_time(t, 2.0, "symmetric_two_atom_real");
    const double h = std::sqrt(t * (2.0 - t));
    TwoAtomValue v{0.0, -h, h, {}};
    if (x * x < t * (2.0 - t))
        v.density = std::sqrt(1.0 - (t - 1.0) * (t - 1.0) - x * x) / (std::numbers::pi * (1.0 - x * x));
    if (t < 1.0) {
        v.atoms.push_back({-1.0, 1.0 - t});
        v.atoms.push_back({1.0, 1.0 - t});
    }
    return v;
}

double arcsine_real(double x, double s) {
    check_time(s, 1.0, "arcsine_real");
    const double x2 = x * x;
    if (!(x2 < 1.0 - s * s)) return 0.0;
    return std::sqrt(1.0 - x2 - s * s) / (std::numbers::pi * (1.0 - x2));
}

void SolutionId::validate() const {
    switch (family) {
        case Family::kac:
        case Family::arcsine_real:
            return;
        case Family::circle_mixture:
            (void)layout(radii, weights);
            return;
        case Family::weyl:
        case Family::elliptic:
        case Family::hyperbolic:
            if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
            return;
        case Family::interval_uniform:
            if (!(r1 >= 0.0 && r2 > r1)) throw std::invalid_argument("interval_uniform: need 0 <= r1 < r2");
            return;
        case Family::two_atom_real:
            if (!(m1 > 0.0 && m2 > 0.0)) throw std::invalid_argument("two_atom_real: masses must be positive");
            return;
    }
}

double SolutionId::initial_mass() const {
    if (family == Family::hyperbolic) return kInf;
    if (family == Family::two_atom_real) return m1 + m2;
    return 1.0;
}

RadialValue evaluate_radial(const SolutionId& id, double x, double t) {
    switch (id.family) {
        case Family::kac: return kac(x, t);
        case Family::circle_mixture: return circle_mixture(x, t, id.radii, id.weights);
        case Family::weyl: return weyl_family(x, t, id.alpha);
        case Family::interval_uniform: return interval_uniform(x, t, id.r1, id.r2);
        case Family::elliptic: return elliptic(x, t, id.alpha);
        case Family::hyperbolic: return hyperbolic(x, t, id.alpha);
        default: throw std::invalid_argument("evaluate_radial: not a complex-case family");
    }
}

double evaluate_line_density(const SolutionId& id, double x, double t) {
    if (id.family == Family::two_atom_real) return two_atom_real(x, t, id.m1, id.m2).density;
    if (id.family == Family::arcsine_real) return arcsine_real(x, t);
    throw std::invalid_argument("evaluate_line_density: not a real-case family");
}

std::vector<RealAtom> line_atoms(const SolutionId& id, double t) {
    if (id.family == Family::two_atom_real) return two_atom_real(0.0, t, id.m1, id.m2).atoms;
    if (id.family == Family::arcsine_real) return {};
    throw std::invalid_argument("line_atoms: not a real-case family");
}

void write_solution_csv(std::ostream& out, const SolutionId& id, double t, std::span<const double> grid) {
    id.validate();
    out.precision(17);
    if (id.complex_case()) {
        out << "x,Psi,psi\n";
        for (double x : grid) {
            const RadialValue v = evaluate_radial(id, x, t);
            out << x << ',' << v.Psi << ',' << v.psi << '\n';
        }
    } else {
        out << "x,density\n";
        for (double x : grid) out << x << ',' << evaluate_line_density(id, x, t) << '\n';
    }
}

}  // namespace rootflow
