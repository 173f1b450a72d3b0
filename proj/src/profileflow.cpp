#include "rootflow/profileflow.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace rootflow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double flowed_log(double quantile, double x, double t) {
    if (x <= 0.0) return -kInf;
    return std::log(quantile) + (t == 0.0 ? 0.0 : std::log(x / (x + t)));
}

void fill_grid(Profile& p, int n) {
    if (n < 1) throw std::invalid_argument("profile grid needs at least one node");
    const double top = std::isfinite(p.mass) ? p.mass - p.time : 10.0;
    p.grid.clear();
    p.grid.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double x = top * (i + 1) / n;
        p.grid.push_back({x, p.dminus(x), p.dplus(x)});
    }
}

}  // namespace

double Profile::dminus(double x) const { return flowed_log(base.quantile(x + time), x, time); }

double Profile::dplus(double x) const {
    if (std::isfinite(mass) && x + time >= mass) return kInf;
    return flowed_log(base.quantile_right(x + time), x, time);
}

Profile profile_from_cdf(const RadialCDF& psi0, int grid_size) {
    if (!(psi0.mass > 0.0)) throw std::invalid_argument("profile_from_cdf: total mass must be positive");
    if (psi0.cdf(0.0) > 0.0) throw std::domain_error("profile_from_cdf: atom at radius 0");
    Profile p;
    p.mass = psi0.mass;
    p.base = psi0;
    p.void_disk_log_radius = -kInf;
    double level = 0.0;
    for (const auto& c : psi0.circles) {
        level = psi0.cdf(c.radius) - c.mass;
        p.plateaus.push_back({level, level + c.mass, std::log(c.radius)});
    }
    for (const auto& g : psi0.gaps) {
        if (g.level == 0.0)
            p.void_disk_log_radius = std::log(g.r_hi);
        else
            p.jumps.push_back({g.level, std::log(g.r_lo), std::log(g.r_hi)});
    }
    fill_grid(p, grid_size);
    return p;
}

Profile flow_profile(const Profile& v, double t, int grid_size) {
    if (!(t >= 0.0 && t < v.mass - v.time)) throw std::domain_error("flow_profile: t must lie in [0, m)");
    if (t == 0.0) return v;
    Profile p;
    p.mass = v.mass;
    p.time = v.time + t;
    p.base = v.base;
    p.void_disk_log_radius = -kInf;
    for (const auto& j : v.jumps)
        if (j.x > t) p.jumps.push_back({j.x - t, p.dminus(j.x - t), p.dplus(j.x - t)});
    fill_grid(p, grid_size);
    return p;
}

RadialCDF cdf_at_time(const RadialCDF& psi0, double t) {
    if (!(t >= 0.0 && t < psi0.mass)) throw std::domain_error("cdf_at_time: t must lie in [0, m)");
    if (t == 0.0) return psi0;
    RadialCDF out;
    out.mass = psi0.mass - t;
    out.time = psi0.time + t;
    out.family = psi0.family;
    const auto q0 = psi0.quantile, q0r = psi0.quantile_right;
    const double mass = out.mass;
    out.quantile = [q0, t](double q) { return q <= 0.0 ? 0.0 : q0(q + t) * (q / (q + t)); };
    out.quantile_right = [q0r, t, mass](double q) {
        if (q >= mass) return kInf;
        return q < 0.0 ? 0.0 : q0r(q + t) * (q / (q + t));
    };
    out.support_max = std::isfinite(mass) ? out.quantile(mass) : psi0.support_max;
    const auto quant = out.quantile;
    const double top = out.support_max;
    out.cdf = [quant, mass, top](double r) {
        if (r <= 0.0) return 0.0;
        if (r >= top) return mass;
        // largest q with quantile(q) <= r
        double lo = 0.0, hi = std::isfinite(mass) ? mass : 1.0;
        if (!std::isfinite(mass))
            while (quant(hi) <= r) {
                lo = hi;
                hi *= 2.0;
            }
        for (int i = 0; i < 2000; ++i) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            (quant(mid) <= r ? lo : hi) = mid;
        }
        return lo;
    };
    for (const auto& g : psi0.gaps)
        if (g.level > t) {
            const double s = (g.level - t) / g.level;
            out.gaps.push_back({g.r_lo * s, g.r_hi * s, g.level - t});
        }
    return out;
}

double density_at_time(const RadialCDF& psi0, double t, double x, bool closed_form) {
    if (closed_form && psi0.family && psi0.family->complex_case())
        return evaluate_radial(*psi0.family, x, psi0.time + t).psi;
    const RadialCDF pt = cdf_at_time(psi0, t);
    if (x <= 0.0 || x > pt.support_max) return 0.0;
    const double h = std::max(1e-6, 1e-6 * x);
    // one-sided second-order stencils at the ends of the support
    if (x + h > pt.support_max) return (3.0 * pt.cdf(x) - 4.0 * pt.cdf(x - h) + pt.cdf(x - 2.0 * h)) / (2.0 * h);
    if (x - h < 0.0) return (-3.0 * pt.cdf(x) + 4.0 * pt.cdf(x + h) - pt.cdf(x + 2.0 * h)) / (2.0 * h);
    return (pt.cdf(x + h) - pt.cdf(x - h)) / (2.0 * h);
}

FeatureReport track_features(const Profile& v, double t) {
    const double T = v.time + t;
    if (!(t >= 0.0 && T < v.mass)) throw std::domain_error("track_features: t must lie in [0, m)");
    FeatureReport r;
    r.t = T;
    if (T == 0.0) {
        r.void_disk_radius = std::isfinite(v.void_disk_log_radius) ? std::exp(v.void_disk_log_radius) : 0.0;
        for (const auto& c : v.base.circles) r.circles.push_back({c.radius, c.mass});
    }
    for (const auto& g : v.base.gaps) {
        if (g.level == 0.0 || g.level <= T) continue;
        const double s = (g.level - T) / g.level;
        r.annuli.push_back({g.r_lo * s, g.r_hi * s, g.level});
    }
    return r;
}

double pde_residual(const std::function<double(double, double)>& Psi, std::span<const std::pair<double, double>> points) {
    double worst = 0.0;
    for (const auto& [x, t] : points) {
        if (!(x > 0.0 && t > 0.0)) throw std::domain_error("pde_check: grid must lie in x > 0, t > 0");
        const double P = Psi(x, t);
        if (!(P > 0.0)) throw std::domain_error("pde_check: grid touches the region Psi = 0");
        const double hx = 1e-5 * x, ht = 1e-5 * t;
        const double dx = (Psi(x + hx, t) - Psi(x - hx, t)) / (2.0 * hx);
        const double dt = (Psi(x, t + ht) - Psi(x, t - ht)) / (2.0 * ht);
        worst = std::max(worst, std::abs(dt - (x * dx / P - 1.0)));
    }
    return worst;
}

double pde_check_profile(const RadialCDF& psi0, std::span<const std::pair<double, double>> points, bool closed_form) {
    if (closed_form && psi0.family && psi0.family->complex_case()) {
        const SolutionId id = *psi0.family;
        const double t0 = psi0.time;
        return pde_residual([&](double x, double t) { return evaluate_radial(id, x, t0 + t).Psi; }, points);
    }
    return pde_residual([&](double x, double t) { return cdf_at_time(psi0, t).cdf(x); }, points);
}

void write_cdf_csv(std::ostream& out, const RadialCDF& psi0, double t, std::span<const double> grid) {
    const RadialCDF pt = cdf_at_time(psi0, t);
    out.precision(17);
    out << "x,Psi,psi\n";
    for (double x : grid) out << x << ',' << pt.cdf(x) << ',' << density_at_time(psi0, t, x) << '\n';
}

}  // namespace rootflow
