#include "rootflow/ensembles.hpp"

#include "rootflow/rng.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace rootflow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void need_alpha(double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("radial law: alpha must be positive");
}

RadialCDF mixture_cdf(const RadialLaw& law) {
    std::vector<double> r, P;
    double acc = 0.0;
    for (std::size_t i = 0; i < law.radii.size(); ++i) {
        acc += law.weights[i];
        if (law.weights[i] == 0.0) continue;
        r.push_back(law.radii[i]);
        P.push_back(acc);
    }
    P.back() = 1.0;

    RadialCDF out;
    out.mass = 1.0;
    out.support_max = r.back();
    out.cdf = [r, P](double x) {
        double v = 0.0;
        for (std::size_t l = 0; l < r.size() && r[l] <= x; ++l) v = P[l];
        return v;
    };
    out.quantile = [r, P](double q) {
        if (q <= 0.0) return 0.0;
        for (std::size_t l = 0; l < r.size(); ++l)
            if (P[l] >= q) return r[l];
        return r.back();
    };
    out.quantile_right = [r, P](double q) {
        if (q < 0.0) return 0.0;
        for (std::size_t l = 0; l < r.size(); ++l)
            if (P[l] > q) return r[l];
        return kInf;
    };
    out.gaps.push_back({0.0, r[0], 0.0});
    for (std::size_t l = 0; l < r.size(); ++l) {
        out.circles.push_back({r[l], P[l] - (l ? P[l - 1] : 0.0)});
        if (l + 1 < r.size()) out.gaps.push_back({r[l], r[l + 1], P[l]});
    }
    return out;
}

}  // namespace

void RadialLaw::validate() const {
    switch (kind) {
        case RadialKind::circle_mixture: {
            if (radii.empty() || radii.size() != weights.size())
                throw std::invalid_argument("circleMixture: radii and weights must be nonempty and of equal length");
            double sum = 0.0;
            for (std::size_t i = 0; i < radii.size(); ++i) {
                if (!(radii[i] > 0.0) || (i && !(radii[i] > radii[i - 1])))
                    throw std::invalid_argument("circleMixture: radii must be positive and strictly increasing");
                if (!(weights[i] >= 0.0)) throw std::invalid_argument("circleMixture: negative weight");
                sum += weights[i];
            }
            if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument("circleMixture: weights must sum to 1");
            return;
        }
        case RadialKind::interval_uniform:
            if (!(r1 >= 0.0 && r2 > r1)) throw std::invalid_argument("intervalUniform: need 0 <= r1 < r2");
            return;
        default: need_alpha(alpha);
    }
}

RadialCDF law_cdf(const RadialLaw& law) {
    law.validate();
    RadialCDF out;
    const double a = law.alpha;
    switch (law.kind) {
        case RadialKind::circle_mixture:
            out = mixture_cdf(law);
            break;
        case RadialKind::power_radial:
            out.support_max = 1.0;
            out.cdf = [a](double x) { return x <= 0.0 ? 0.0 : x >= 1.0 ? 1.0 : std::pow(x, 1.0 / a); };
            out.quantile = [a](double q) { return q <= 0.0 ? 0.0 : std::pow(std::min(q, 1.0), a); };
            break;
        case RadialKind::interval_uniform: {
            const double r1 = law.r1, d = law.r2 - law.r1;
            out.support_max = law.r2;
            out.cdf = [r1, d](double x) { return std::clamp((x - r1) / d, 0.0, 1.0); };
            out.quantile = [r1, d](double q) { return q <= 0.0 ? 0.0 : r1 + std::min(q, 1.0) * d; };
            if (r1 > 0.0) out.gaps.push_back({0.0, r1, 0.0});
            break;
        }
        case RadialKind::elliptic_radial:
            out.support_max = kInf;
            out.cdf = [a](double x) {
                if (x <= 0.0) return 0.0;
                const double u = std::pow(x, 1.0 / a);
                return std::isinf(u) ? 1.0 : u / (1.0 + u);
            };
            out.quantile = [a](double q) { return q <= 0.0 ? 0.0 : q >= 1.0 ? kInf : std::pow(q / (1.0 - q), a); };
            break;
        case RadialKind::hyperbolic_radial:
            out.mass = kInf;
            out.support_max = 1.0;
            out.cdf = [a](double x) {
                if (x <= 0.0) return 0.0;
                if (x >= 1.0) return kInf;
                const double u = std::pow(x, 1.0 / a);
                return u / (1.0 - u);
            };
            out.quantile = [a](double q) { return q <= 0.0 ? 0.0 : q == kInf ? 1.0 : std::pow(q / (1.0 + q), a); };
            break;
    }
    if (!out.quantile_right) {
        const auto q = out.quantile;
        const double m = out.mass;
        out.quantile_right = [q, m](double x) { return x >= m ? kInf : q(x); };
    }
    out.family = catalogued(law);
    return out;
}

std::optional<SolutionId> catalogued(const RadialLaw& law) {
    SolutionId id;
    switch (law.kind) {
        case RadialKind::circle_mixture:
            id.family = Family::circle_mixture;
            id.radii = law.radii;
            id.weights = law.weights;
            break;
        case RadialKind::power_radial:
            id.family = Family::weyl;
            id.alpha = law.alpha;
            break;
        case RadialKind::interval_uniform:
            id.family = Family::interval_uniform;
            id.r1 = law.r1;
            id.r2 = law.r2;
            break;
        case RadialKind::elliptic_radial:
            id.family = Family::elliptic;
            id.alpha = law.alpha;
            break;
        case RadialKind::hyperbolic_radial:
            id.family = Family::hyperbolic;
            id.alpha = law.alpha;
            break;
    }
    return id;
}

RadialLaw radial_law(const SolutionId& id) {
    RadialLaw law;
    switch (id.family) {
        case Family::kac: break;
        case Family::circle_mixture:
            law.radii = id.radii;
            law.weights = id.weights;
            break;
        case Family::weyl:
            law.kind = RadialKind::power_radial;
            law.alpha = id.alpha;
            break;
        case Family::interval_uniform:
            law.kind = RadialKind::interval_uniform;
            law.r1 = id.r1;
            law.r2 = id.r2;
            break;
        case Family::elliptic:
            law.kind = RadialKind::elliptic_radial;
            law.alpha = id.alpha;
            break;
        case Family::hyperbolic:
            law.kind = RadialKind::hyperbolic_radial;
            law.alpha = id.alpha;
            break;
        default: throw std::invalid_argument("radial_law: not a complex-case family");
    }
    return law;
}

std::vector<cplx> sample_roots(const RadialLaw& law, int n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("sample_roots: n must be positive");
    if (law.kind == RadialKind::hyperbolic_radial)
        throw std::invalid_argument("sample_roots: the hyperbolic law has infinite mass and cannot be sampled");
    const RadialCDF F = law_cdf(law);
    const Philox rng(seed);
    std::vector<cplx> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const auto [u, v] = rng.uniform2(0, static_cast<std::uint64_t>(i));
        out[static_cast<std::size_t>(i)] = std::polar(F.quantile(u), 2.0 * std::numbers::pi * v);
    }
    return out;
}

void RealLaw::validate() const {
    if (kind == RealKind::arcsine) {
        if (!(b > a)) throw std::invalid_argument("arcsine: interval must be nondegenerate");
        return;
    }
    if (locations.empty() || locations.size() != masses.size())
        throw std::invalid_argument("atoms: locations and masses must be nonempty and of equal length");
    for (double m : masses)
        if (!(m > 0.0)) throw std::invalid_argument("atoms: masses must be positive");
}

double RealLaw::total_mass() const {
    if (kind == RealKind::arcsine) return 1.0;
    return std::accumulate(masses.begin(), masses.end(), 0.0);
}

std::vector<std::int64_t> atom_counts(const RealLaw& law, std::int64_t total) {
    law.validate();
    const double M = law.total_mass();
    std::vector<std::int64_t> c(law.masses.size());
    std::vector<std::pair<double, std::size_t>> rem;
    std::int64_t used = 0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double exact = static_cast<double>(total) * law.masses[i] / M;
        c[i] = static_cast<std::int64_t>(std::floor(exact));
        used += c[i];
        rem.push_back({exact - static_cast<double>(c[i]), i});
    }
    std::stable_sort(rem.begin(), rem.end(), [](auto& x, auto& y) { return x.first > y.first; });
    for (std::size_t j = 0; used < total; ++j, ++used) ++c[rem[j % rem.size()].second];
    return c;
}

std::vector<double> sample_real_roots(const RealLaw& law, int n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("sample_real_roots: n must be positive");
    law.validate();
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n));
    if (law.kind == RealKind::atoms) {
        const auto c = atom_counts(law, n);
        for (std::size_t i = 0; i < c.size(); ++i) out.insert(out.end(), static_cast<std::size_t>(c[i]), law.locations[i]);
    } else {
        const Philox rng(seed);
        const double mid = 0.5 * (law.a + law.b), half = 0.5 * (law.b - law.a);
        for (int i = 0; i < n; ++i)
            out.push_back(mid + half * std::cos(std::numbers::pi * rng.uniform2(0, static_cast<std::uint64_t>(i)).first));
    }
    std::sort(out.begin(), out.end());
    return out;
}

CoefficientKind parse_coefficient_kind(const std::string& name) {
    if (name == "kac") return CoefficientKind::kac;
    if (name == "weyl") return CoefficientKind::weyl;
    if (name == "elliptic") return CoefficientKind::elliptic;
    if (name == "exponential") return CoefficientKind::exponential;
    if (name == "hyperbolic") return CoefficientKind::hyperbolic;
    throw std::invalid_argument("unknown coefficient ensemble: " + name);
}

NoiseKind parse_noise_kind(const std::string& name) {
    if (name == "gaussian") return NoiseKind::gaussian;
    if (name == "rademacher") return NoiseKind::rademacher;
    if (name == "uniform") return NoiseKind::uniform;
    throw std::invalid_argument("unknown coefficient noise: " + name);
}

double log_weight(CoefficientKind kind, int k, int n, double alpha) {
    const double lk1 = log_gamma(k + 1.0);
    switch (kind) {
        case CoefficientKind::kac: return 0.0;
        case CoefficientKind::weyl: return alpha * (k * std::log(static_cast<double>(n)) - lk1);
        case CoefficientKind::elliptic: return alpha * (log_gamma(n + 1.0) - lk1 - log_gamma(n - k + 1.0));
        case CoefficientKind::exponential: return k * std::log(static_cast<double>(n)) - lk1;
        case CoefficientKind::hyperbolic: return alpha * (log_gamma(static_cast<double>(n) + k) - log_gamma(n) - lk1);
    }
    throw std::invalid_argument("log_weight: unknown kind");
}

namespace {

cplx draw_noise(const Philox& rng, NoiseKind noise, std::uint64_t idx) {
    if (noise == NoiseKind::gaussian) {
        const auto [g1, g2] = rng.normal2(1, idx);
        return cplx(g1, g2) / std::numbers::sqrt2;
    }
    if (noise == NoiseKind::rademacher) return rng.uniform2(1, idx).first < 0.5 ? -1.0 : 1.0;
    return std::numbers::sqrt3 * (2.0 * rng.uniform2(1, idx).first - 1.0);
}

}  // namespace

Poly coefficient_ensemble(CoefficientKind kind, int n, double alpha, std::uint64_t seed, NoiseKind noise,
                          std::int64_t noise_offset) {
    if (n < 1) throw std::invalid_argument("coefficient_ensemble: n must be positive");
    if (kind != CoefficientKind::kac && kind != CoefficientKind::exponential) need_alpha(alpha);
    const Philox rng(seed);
    std::vector<XComplex> c(static_cast<std::size_t>(n) + 1);
    for (int k = 0; k <= n; ++k) {
        const cplx xi = draw_noise(rng, noise, static_cast<std::uint64_t>(k + noise_offset));
        c[static_cast<std::size_t>(k)] = XComplex(xi) * XComplex::from_log(log_weight(kind, k, n, alpha));
    }
    return Poly(std::move(c));
}

std::vector<double> profile_values(const RadialLaw& law, int n) {
    law.validate();
    if (n < 1) throw std::invalid_argument("profile_values: n must be positive");
    const RadialCDF psi = law_cdf(law);
    if (!(psi.mass == 1.0)) throw std::invalid_argument("profile_values: law must have unit mass");
    std::vector<double> cuts;
    for (int k = 0; k <= n; ++k) cuts.push_back(static_cast<double>(k) / n);
    if (law.kind == RadialKind::circle_mixture) {
        double P = 0.0;
        for (double w : law.weights) cuts.push_back(P += w);
    }
    std::sort(cuts.begin(), cuts.end());
    auto logq = [&](double q) { return std::log(psi.quantile(q)); };
    // tanh-sinh copes with the log singularity at q = 0
    boost::math::quadrature::tanh_sinh<double> ts;
    std::vector<double> v(static_cast<std::size_t>(n) + 1, 0.0);
    double acc = 0.0;
    std::size_t j = 0;
    for (int k = 1; k <= n; ++k) {
        const double xk = static_cast<double>(k) / n;
        for (; j + 1 < cuts.size() && cuts[j + 1] <= xk; ++j)
            if (cuts[j + 1] > cuts[j])
                acc += ts.integrate(logq, cuts[j], cuts[j + 1]);
        v[static_cast<std::size_t>(k)] = acc;
    }
    return v;
}

Poly profile_ensemble(const RadialLaw& law, int n, std::uint64_t seed, NoiseKind noise) {
    const std::vector<double> v = profile_values(law, n);
    const Philox rng(seed);
    std::vector<XComplex> c(static_cast<std::size_t>(n) + 1);
    for (int k = 0; k <= n; ++k)
        c[static_cast<std::size_t>(k)] =
            XComplex(draw_noise(rng, noise, static_cast<std::uint64_t>(k))) * XComplex::from_log(-n * v[static_cast<std::size_t>(k)]);
    return Poly(std::move(c));
}

}  // namespace rootflow
