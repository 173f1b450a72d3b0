#include "rootflow/realline.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace rootflow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;

double scale_of(const RealMeasure& mu) { return (mu.b - mu.a) + std::max(std::abs(mu.a), std::abs(mu.b)) + 1.0; }

// sum over the measure of 1/(z-u)^power, power 1 or 2
cplx kernel_sum(const RealMeasure& mu, cplx z, int power) {
    if (z.imag() == 0.0) {
        const double x = z.real();
        for (const auto& at : mu.atoms)
            if (x == at.x) throw std::domain_error("cauchy_transform: z is an atom of the measure");
        if (mu.density && x >= mu.lo && x <= mu.hi)
            throw std::domain_error("cauchy_transform: z lies on the support");
    }
    cplx s{};
    for (const auto& at : mu.atoms) {
        const cplx d = z - at.x;
        s += at.mass / (power == 1 ? d : d * d);
    }
    if (mu.density) {
        const double c = 0.5 * (mu.lo + mu.hi), h = 0.5 * (mu.hi - mu.lo);
        auto f = [&](double th) {
            const double u = c + h * std::cos(th);
            const cplx d = z - u;
            return cplx(mu.density(u) * h * std::sin(th)) / (power == 1 ? d : d * d);
        };
        s += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, kPi, 15, 1e-13);
    }
    return s;
}

template <class F>
double bisect_increasing(F&& f, double lo, double hi) {
    for (int i = 0; i < 3000; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (f(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

void check_time(const RealMeasure& mu, double t) {
    if (!(t >= 0.0 && t < mu.total_mass())) throw std::domain_error("realline: t must lie in [0, m)");
}

}  // namespace

double RealMeasure::total_mass() const {
    double m = density_mass;
    for (const auto& at : atoms) m += at.mass;
    return m;
}

double RealMeasure::atom_mass_at(double x) const {
    double m = 0.0;
    for (const auto& at : atoms)
        if (at.x == x) m += at.mass;
    return m;
}

void RealMeasure::validate() const {
    if (!(total_mass() > 0.0)) throw std::invalid_argument("RealMeasure: total mass must be positive");
    for (const auto& at : atoms) {
        if (!(at.mass > 0.0)) throw std::invalid_argument("RealMeasure: atom masses must be positive");
        if (at.x < a || at.x > b) throw std::invalid_argument("RealMeasure: atom outside the support interval");
    }
    if (density && !(lo < hi && lo >= a && hi <= b)) throw std::invalid_argument("RealMeasure: bad density support");
}

RealMeasure atoms_measure(std::span<const double> locations, std::span<const double> masses) {
    if (locations.empty() || locations.size() != masses.size())
        throw std::invalid_argument("atoms_measure: locations and masses must be nonempty and of equal length");
    RealMeasure mu;
    mu.a = *std::min_element(locations.begin(), locations.end());
    mu.b = *std::max_element(locations.begin(), locations.end());
    for (std::size_t i = 0; i < locations.size(); ++i) mu.atoms.push_back({locations[i], masses[i]});
    std::sort(mu.atoms.begin(), mu.atoms.end(), [](auto& p, auto& q) { return p.x < q.x; });
    mu.validate();
    return mu;
}

RealMeasure arcsine_measure(double a, double b) {
    if (!(b > a)) throw std::invalid_argument("arcsine_measure: interval must be nondegenerate");
    RealMeasure mu;
    mu.a = mu.lo = a;
    mu.b = mu.hi = b;
    mu.density = [a, b](double u) {
        const double q = (b - u) * (u - a);
        return q > 0.0 ? 1.0 / (kPi * std::sqrt(q)) : 0.0;
    };
    mu.density_mass = 1.0;
    return mu;
}

RealMeasure density_measure(double lo, double hi, std::function<double(double)> density) {
    if (!(hi > lo)) throw std::invalid_argument("density_measure: interval must be nondegenerate");
    RealMeasure mu;
    mu.a = mu.lo = lo;
    mu.b = mu.hi = hi;
    mu.density = std::move(density);
    const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
    mu.density_mass = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        [&](double th) { return mu.density(c + h * std::cos(th)) * h * std::sin(th); }, 0.0, kPi, 15, 1e-14);
    mu.validate();
    return mu;
}

RealMeasure measure_from_law(const RealLaw& law) {
    law.validate();
    if (law.kind == RealKind::arcsine) return arcsine_measure(law.a, law.b);
    return atoms_measure(law.locations, law.masses);
}

RealMeasure shifted(const RealMeasure& mu, double c) {
    RealMeasure out = mu;
    out.a += c;
    out.b += c;
    out.lo += c;
    out.hi += c;
    for (auto& at : out.atoms) at.x += c;
    if (mu.density) {
        auto f = mu.density;
        out.density = [f, c](double u) { return f(u - c); };
    }
    return out;
}

cplx cauchy_transform(const RealMeasure& mu, cplx z) { return kernel_sum(mu, z, 1); }
cplx cauchy_derivative(const RealMeasure& mu, cplx z) { return -kernel_sum(mu, z, 2); }

double w0(const RealMeasure& mu, double y) {
    const double m = mu.total_mass(), floor = mu.atom_mass_at(mu.b);
    if (!(y > floor && y < m)) throw std::domain_error("w0: y must lie strictly between mu({b}) and m");
    auto f = [&](double w) { return w * cauchy_transform(mu, w + mu.b).real() - y; };
    double hi = 1.0;
    for (int i = 0; i < 2000 && f(hi) < 0.0; ++i) hi *= 2.0;
    return bisect_increasing(f, 0.0, hi);
}

cplx subordination(const RealMeasure& mu0, double t, cplx z) {
    check_time(mu0, t);
    if (z.imag() < 0.0) throw std::invalid_argument("subordination: z must lie in the closed upper half plane");
    if (t == 0.0) return z;
    const double m = mu0.total_mass(), S = scale_of(mu0), c = 0.5 * (mu0.a + mu0.b);

    auto newton = [&](cplx zk, cplx& w) {
        cplx cur = w;
        double prev = kInf;
        for (int it = 0; it < 100; ++it) {
            cplx G, dG;
            try {
                G = cauchy_transform(mu0, cur);
                dG = cauchy_derivative(mu0, cur);
            } catch (const std::domain_error&) {
                return false;
            }
            const cplx F = cur - t / G - zk, dF = 1.0 + t * dG / (G * G);
            const cplx step = -F / dF;
            if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) return false;
            cur += step;
            if (cur.imag() < zk.imag()) cur.imag(zk.imag());
            const double size = std::abs(step), tol = std::abs(cur) + S;
            // second test: stagnation at the quadrature noise floor
            if (size <= 1e-15 * tol || (size <= 1e-10 * tol && size > 0.5 * prev)) {
                w = cur;
                return true;
            }
            prev = size;
        }
        return false;
    };

    const double target = z.imag(), floor_y = std::max(target, 1e-13 * S);
    double y = 10.0 * (S + std::abs(z.real() - c)) + target;
    const cplx top(z.real(), y);
    cplx w = c + (top - c) * (m / (m - t));
    if (!newton(top, w)) throw std::runtime_error("subordination: no convergence far from the axis");
    double ratio = 0.5;
    while (y > floor_y) {
        const double next = std::max(y * ratio, floor_y);
        cplx trial = w;
        if (newton(cplx(z.real(), next), trial)) {
            w = trial;
            y = next;
            ratio = std::max(ratio * ratio, 0.05);
        } else {
            ratio = std::sqrt(ratio);
            if (ratio > 0.999) throw std::runtime_error("subordination: continuation stalled");
        }
    }
    if (target == 0.0 && !newton(z, w)) throw std::runtime_error("subordination: no convergence on the axis");
    if (target != 0.0 && y != target && !newton(z, w)) throw std::runtime_error("subordination: no convergence");
    return w;
}

cplx g_at_time(const RealMeasure& mu0, double t, cplx z) {
    check_time(mu0, t);
    if (z.imag() < 0.0) return std::conj(g_at_time(mu0, t, std::conj(z)));
    if (t == 0.0) return cauchy_transform(mu0, z);
    cplx w;
    try {
        w = subordination(mu0, t, z);
    } catch (const std::runtime_error&) {
        if (z.imag() == 0.0) throw std::domain_error("g_at_time: x lies inside the support band");
        throw;
    }
    if (z.imag() == 0.0) {
        if (std::abs(w.imag()) > 1e-7 * scale_of(mu0)) throw std::domain_error("g_at_time: x lies inside the support band");
        return cauchy_transform(mu0, w.real()).real();
    }
    return cauchy_transform(mu0, w);
}

double g_at_time_w(const RealMeasure& mu0, double t, double x) {
    check_time(mu0, t);
    if (!(x > mu0.b)) throw std::domain_error("g_at_time_w: x must lie right of the support");
    const double xs = x - mu0.b, m = mu0.total_mass();
    const double ylo = std::max(0.0, mu0.atom_mass_at(mu0.b) - t), yhi = m - t;
    auto wt = [&](double y) { return w0(mu0, y + t) * y / (y + t); };
    const double y = bisect_increasing([&](double y) { return wt(y) - xs; }, ylo, yhi);
    return y / xs;
}

double line_density(const RealMeasure& mu0, double t, double x) {
    check_time(mu0, t);
    if (t == 0.0) return mu0.density && x > mu0.lo && x < mu0.hi ? mu0.density(x) : 0.0;
    cplx w;
    try {
        w = subordination(mu0, t, cplx(x, 0.0));
    } catch (const std::runtime_error&) {
        return 0.0;
    }
    if (w.imag() <= 1e-12 * scale_of(mu0)) return 0.0;
    return -cauchy_transform(mu0, w).imag() / kPi;
}

std::vector<std::pair<double, double>> support_bands(const RealMeasure& mu0, double t) {
    check_time(mu0, t);
    if (t == 0.0) {
        if (mu0.density) return {{mu0.lo, mu0.hi}};
        return {};
    }
    const double S = scale_of(mu0);

    struct Block {
        double lo, hi;
        bool atom;
    };
    std::vector<Block> blocks;
    for (const auto& at : mu0.atoms) blocks.push_back({at.x, at.x, true});
    if (mu0.density) blocks.push_back({mu0.lo, mu0.hi, false});
    std::sort(blocks.begin(), blocks.end(), [](auto& p, auto& q) { return p.lo < q.lo; });
    std::vector<Block> merged;
    for (const auto& bl : blocks) {
        if (!merged.empty() && bl.lo <= merged.back().hi) {
            merged.back().hi = std::max(merged.back().hi, bl.hi);
            merged.back().atom = false;
        } else {
            merged.push_back(bl);
        }
    }

    auto zmap = [&](double w) { return w - t / cauchy_transform(mu0, w).real(); };
    auto zprime = [&](double w) {
        const double G = cauchy_transform(mu0, w).real(), dG = cauchy_derivative(mu0, w).real();
        if (G == 0.0) return -kInf;
        return 1.0 + t * dG / (G * G);
    };
    // limit of z at the end of a gap next to a block
    auto end_value = [&](const Block& bl, double w) {
        if (bl.atom && t < mu0.atom_mass_at(bl.lo)) return bl.lo;
        return zmap(w);
    };

    std::vector<std::pair<double, double>> images;
    const int N = 400;
    for (std::size_t g = 0; g <= merged.size(); ++g) {
        const double L = g == 0 ? -kInf : merged[g - 1].hi;
        const double R = g == merged.size() ? kInf : merged[g].lo;
        std::vector<double> pts;
        const double span = std::isfinite(L) && std::isfinite(R) ? R - L : S;
        for (int k = 0; k < N; ++k) {
            const double d = std::exp(std::log(1e-13 * span) + (std::log(std::isfinite(L) && std::isfinite(R) ? 0.5 * span : 1e8 * S) -
                                                                 std::log(1e-13 * span)) * k / (N - 1));
            if (std::isfinite(L)) pts.push_back(L + d);
            if (std::isfinite(R)) pts.push_back(R - d);
        }
        std::sort(pts.begin(), pts.end());
        pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
        std::vector<double> zp(pts.size());
        for (std::size_t i = 0; i < pts.size(); ++i) zp[i] = zprime(pts[i]);

        auto crossing = [&](std::size_t i) {
            return bisect_increasing([&](double w) { return zp[i] > 0 ? -zprime(w) : zprime(w); }, pts[i], pts[i + 1]);
        };
        std::size_t i = 0;
        while (i < pts.size()) {
            if (!(zp[i] > 0.0)) {
                ++i;
                continue;
            }
            const std::size_t start = i;
            while (i + 1 < pts.size() && zp[i + 1] > 0.0) ++i;
            double zlo, zhi;
            if (start == 0)
                zlo = std::isfinite(L) ? end_value(merged[g - 1], pts[0]) : -kInf;
            else
                zlo = zmap(crossing(start - 1));
            if (i + 1 == pts.size())
                zhi = std::isfinite(R) ? end_value(merged[g], pts.back()) : kInf;
            else
                zhi = zmap(crossing(i));
            images.push_back({zlo, zhi});
            ++i;
        }
    }
    std::sort(images.begin(), images.end());
    std::vector<std::pair<double, double>> bands;
    double reach = -kInf;
    for (const auto& [lo, hi] : images) {
        if (lo > reach + 1e-12 * S && std::isfinite(reach)) bands.push_back({reach, lo});
        reach = std::max(reach, hi);
    }
    return bands;
}

std::vector<double> stieltjes_invert(const std::function<cplx(cplx)>& G, std::span<const double> grid, double y_offset,
                                     bool richardson) {
    if (!(y_offset > 0.0)) throw std::invalid_argument("stieltjes_invert: y_offset must be positive");
    std::vector<double> out;
    out.reserve(grid.size());
    for (double x : grid) {
        const double rho = -G(cplx(x, y_offset)).imag() / kPi;
        if (!richardson) {
            out.push_back(rho);
            continue;
        }
        const double half = -G(cplx(x, 0.5 * y_offset)).imag() / kPi;
        out.push_back(2.0 * half - rho);
    }
    return out;
}

std::vector<RealAtom> atom_recovery(const std::function<cplx(cplx)>& G, std::span<const double> candidate_poles) {
    constexpr int K = 4;
    const double ys[K] = {1e-4, 1e-5, 1e-6, 1e-7};
    std::vector<RealAtom> out;
    for (double p : candidate_poles) {
        double A[K][K + 1];
        for (int i = 0; i < K; ++i) {
            const double r = std::sqrt(ys[i]);
            A[i][0] = 1.0;
            A[i][1] = r;
            A[i][2] = ys[i];
            A[i][3] = ys[i] * r;
            A[i][K] = -ys[i] * G(cplx(p, ys[i])).imag();
        }
        for (int col = 0; col < K; ++col) {
            int piv = col;
            for (int r = col + 1; r < K; ++r)
                if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
            std::swap(A[col], A[piv]);
            for (int r = col + 1; r < K; ++r) {
                const double f = A[r][col] / A[col][col];
                for (int k = col; k <= K; ++k) A[r][k] -= f * A[col][k];
            }
        }
        double c[K];
        for (int r = K - 1; r >= 0; --r) {
            double s = A[r][K];
            for (int k = r + 1; k < K; ++k) s -= A[r][k] * c[k];
            c[r] = s / A[r][r];
        }
        if (c[0] >= 1e-8) out.push_back({p, c[0]});
    }
    return out;
}

double r_transform(const std::function<double(double)>& G, double right_edge, double lambda) {
    if (!(lambda > 0.0)) throw std::domain_error("r_transform: lambda must be positive");
    const double eps = 1e-14 * (1.0 + std::abs(right_edge));
    if (!(G(right_edge + eps) > lambda)) throw std::domain_error("r_transform: lambda beyond G at the support edge");
    double hi = right_edge + 1.0;
    for (int i = 0; i < 2000 && G(hi) > lambda; ++i) hi = right_edge + 2.0 * (hi - right_edge);
    const double z = bisect_increasing([&](double x) { return lambda - G(x); }, right_edge + eps, hi);
    return z * lambda - 1.0;
}

double r_transform(const RealMeasure& mu, double lambda) {
    return r_transform([&](double x) { return cauchy_transform(mu, x).real(); }, mu.b, lambda);
}

TransformedMeasure transform_measure(const RealMeasure& mu0, double t) {
    check_time(mu0, t);
    TransformedMeasure tm;
    tm.t = t;
    tm.mass = mu0.total_mass() - t;
    tm.bands = support_bands(mu0, t);
    tm.G = [mu0, t](cplx z) { return g_at_time(mu0, t, z); };
    tm.density = [mu0, t](double x) { return line_density(mu0, t, x); };
    std::vector<double> poles;
    for (const auto& at : mu0.atoms) poles.push_back(at.x);
    tm.atoms = atom_recovery(tm.G, poles);
    return tm;
}

double free_power_check(const RealMeasure& mu0, double t, std::span<const double> lambdas, int nodes_per_band) {
    if (std::abs(mu0.total_mass() - 1.0) > 1e-10) throw std::invalid_argument("free_power_check: mu0 must be a probability measure");
    if (!(t > 0.0 && t < 1.0)) throw std::domain_error("free_power_check: t must lie in (0, 1)");
    const TransformedMeasure tm = transform_measure(mu0, t);
    const double s = 1.0 - t;

    // Gauss-Chebyshev in theta: exact to spectral accuracy for square-root
    // and inverse-square-root edges alike.
    std::vector<double> loc, wt;
    double edge = -kInf;
    for (const auto& [e1, e2] : tm.bands) {
        const double c = 0.5 * (e1 + e2), h = 0.5 * (e2 - e1);
        for (int k = 0; k < nodes_per_band; ++k) {
            const double th = (k + 0.5) * kPi / nodes_per_band;
            const double u = c + h * std::cos(th);
            loc.push_back(u / s);
            wt.push_back(kPi / nodes_per_band * tm.density(u) * h * std::sin(th) / s);
        }
        edge = std::max(edge, e2 / s);
    }
    for (const auto& at : tm.atoms) {
        loc.push_back(at.x / s);
        wt.push_back(at.mass / s);
        edge = std::max(edge, at.x / s);
    }
    auto Gstar = [&](double w) {
        double g = 0.0;
        for (std::size_t i = 0; i < loc.size(); ++i) g += wt[i] / (w - loc[i]);
        return g;
    };
    double worst = 0.0;
    for (double lam : lambdas) {
        const double R0 = r_transform(mu0, lam);
        const double Rs = r_transform(Gstar, edge, lam);
        worst = std::max(worst, std::abs(Rs - R0 / s));
    }
    return worst;
}

}  // namespace rootflow
