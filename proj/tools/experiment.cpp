#include "experiment.hpp"

#include "plot.hpp"

#include "rootflow/critical.hpp"
#include "rootflow/polynomial.hpp"
#include "rootflow/profileflow.hpp"
#include "rootflow/realline.hpp"
#include "rootflow/rootfinder.hpp"
#include "rootflow/verify.hpp"

#include <boost/version.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#ifndef ROOTFLOW_VERSION
#define ROOTFLOW_VERSION "unknown"
#endif

namespace rootflow::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::set<std::string> kModes{"simulate", "theory", "compare", "real", "pde-check", "fractional"};

template <class T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("field '") + key + "': " + e.what());
    }
}

std::vector<double> number_list(const json& j, const char* key) {
    const json& v = j.at(key);
    if (v.is_number()) return {v.get<double>()};
    if (!v.is_array()) throw ConfigError(std::string("field '") + key + "' must be a number or a list of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number()) throw ConfigError(std::string("field '") + key + "' must hold numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

RadialLaw parse_radial(const json& j, const std::string& kind) {
    RadialLaw law;
    if (kind == "circleMixture") {
        law.kind = RadialKind::circle_mixture;
        law.radii = number_list(j, "radii");
        law.weights = number_list(j, "weights");
    } else if (kind == "kac") {
        law.radii = {1.0};
        law.weights = {1.0};
    } else if (kind == "powerRadial") {
        law.kind = RadialKind::power_radial;
        law.alpha = get_or(j, "alpha", 1.0);
    } else if (kind == "uniformDisk") {
        law.kind = RadialKind::power_radial;
        law.alpha = 0.5;
    } else if (kind == "intervalUniform") {
        law.kind = RadialKind::interval_uniform;
        law.r1 = get_or(j, "r1", 0.0);
        law.r2 = get_or(j, "r2", 1.0);
    } else if (kind == "ellipticRadial") {
        law.kind = RadialKind::elliptic_radial;
        law.alpha = get_or(j, "alpha", 1.0);
    } else if (kind == "hyperbolicRadial") {
        law.kind = RadialKind::hyperbolic_radial;
        law.alpha = get_or(j, "alpha", 1.0);
    } else {
        throw ConfigError("unknown law kind '" + kind + "'");
    }
    try {
        law.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("law: ") + e.what());
    }
    return law;
}

// Radial law whose zeros a coefficient ensemble follows in the limit.
RadialLaw limit_law(CoefficientKind kind, double alpha) {
    RadialLaw law;
    switch (kind) {
        case CoefficientKind::kac: break;
        case CoefficientKind::weyl:
            law.kind = RadialKind::power_radial;
            law.alpha = alpha;
            break;
        case CoefficientKind::exponential:
            law.kind = RadialKind::power_radial;
            law.alpha = 1.0;
            break;
        case CoefficientKind::elliptic:
            law.kind = RadialKind::elliptic_radial;
            law.alpha = alpha;
            break;
        case CoefficientKind::hyperbolic:
            law.kind = RadialKind::hyperbolic_radial;
            law.alpha = alpha;
            break;
    }
    return law;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

// All files go through here so the manifest lists exactly what was written.
class Writer {
public:
    explicit Writer(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

    void write(const std::string& name, const std::string& content) {
        std::ofstream f(dir_ / name, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + (dir_ / name).string());
        f << content;
        char hex[17];
        std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fnv1a(content)));
        artifacts_.push_back({{"file", name}, {"bytes", content.size()}, {"fnv1a64", hex}});
    }
    const json& artifacts() const { return artifacts_; }

private:
    fs::path dir_;
    json artifacts_ = json::array();
};

std::string svg(std::span<const Series> series, const PlotStyle& style) {
    std::ostringstream os;
    emit_plot(os, series, style);
    return os.str();
}

std::vector<double> times_for(const ExperimentConfig& cfg) {
    if (!cfg.t.empty()) return cfg.t;
    if (cfg.mode == "pde-check") return {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    return {0.5};
}

std::vector<double> sorted_unique(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

std::int64_t order_for(double t, int n) { return static_cast<std::int64_t>(std::floor(t * n)); }

RadialCDF initial_cdf(const LawSpec& law) {
    if (law.domain == LawSpec::Domain::coefficients) return law_cdf(limit_law(law.ensemble, law.alpha));
    return law_cdf(law.radial);
}

struct ComplexSnapshot {
    double t;
    std::int64_t order;
    std::vector<cplx> roots;
    bool converged;
};

Poly initial_poly(const ExperimentConfig& cfg, std::uint64_t seed) {
    const int n = cfg.degree_unit();
    switch (cfg.law.domain) {
        case LawSpec::Domain::radial: return from_roots(sample_roots(cfg.law.radial, n, seed));
        case LawSpec::Domain::coefficients:
            return coefficient_ensemble(cfg.law.ensemble, n, cfg.law.alpha, seed, cfg.law.noise);
        case LawSpec::Domain::profile: return profile_ensemble(cfg.law.radial, n, seed, cfg.law.noise);
        case LawSpec::Domain::real: break;
    }
    throw ConfigError("a complex law is required");
}

std::vector<ComplexSnapshot> simulate_complex(const ExperimentConfig& cfg, const std::vector<double>& ts, std::uint64_t seed) {
    const int n = cfg.degree_unit();
    std::vector<ComplexSnapshot> out;
    if (cfg.law.domain == LawSpec::Domain::radial && cfg.pipeline == "flow") {
        ComplexRootFlow flow(sample_roots(cfg.law.radial, n, seed));
        std::int64_t done = 0;
        for (double t : ts) {
            const std::int64_t m = order_for(t, n);
            flow.advance(m - done);
            done = m;
            out.push_back({t, m, flow.roots(), flow.stats().unconverged == 0});
        }
        return out;
    }
    const Poly p = initial_poly(cfg, seed);
    for (double t : ts) {
        const std::int64_t m = order_for(t, n);
        RootSet rs = find_roots(derivative(p, static_cast<int>(m)));
        out.push_back({t, m, std::move(rs.roots), rs.converged});
    }
    return out;
}

struct RealSnapshot {
    double t;
    std::int64_t order;
    std::vector<double> points;
    std::vector<std::int64_t> mult;
    bool converged;
};

std::vector<RealSnapshot> simulate_real(const ExperimentConfig& cfg, const std::vector<double>& ts, std::uint64_t seed) {
    const int n = cfg.degree_unit();
    const RealLaw& law = cfg.law.real;
    std::optional<RealRootFlow> flow;
    if (law.kind == RealKind::atoms) {
        const auto counts = atom_counts(law, std::llround(law.total_mass() * n));
        std::vector<double> pts;
        std::vector<std::int64_t> mult;
        for (std::size_t i = 0; i < counts.size(); ++i)
            if (counts[i] > 0) {
                pts.push_back(law.locations[i]);
                mult.push_back(counts[i]);
            }
        flow.emplace(pts, mult, RealRootFlow::Options{});
    } else {
        flow.emplace(sample_real_roots(law, n, seed));
    }
    std::vector<RealSnapshot> out;
    std::int64_t done = 0;
    for (double t : ts) {
        const std::int64_t m = order_for(t, n);
        flow->advance(m - done);
        done = m;
        out.push_back({t, m, flow->points(), flow->multiplicities(), flow->stats().unconverged == 0});
    }
    return out;
}

LineTheory real_theory(const RealLaw& law, double t) {
    if (law.kind == RealKind::arcsine) {
        const double c = 0.5 * (law.a + law.b), h = 0.5 * (law.b - law.a), e = h * std::sqrt(1.0 - t * t);
        return {[c, h, t](double x) { return arcsine_real((x - c) / h, t) / h; }, c - e, c + e, {}};
    }
    if (law.locations.size() == 2) {
        // affine map sending the first atom to 0 and the second to -1
        const double L0 = law.locations[0], L1 = law.locations[1], m1 = law.masses[0], m2 = law.masses[1];
        const double s = L0 - L1;
        const auto v = two_atom_real(-0.5, t, m1, m2);
        LineTheory th{[=](double x) { return two_atom_real((x - L0) / s, t, m1, m2).density / std::abs(s); },
                      std::min(L0 + v.x_minus * s, L0 + v.x_plus * s), std::max(L0 + v.x_minus * s, L0 + v.x_plus * s), {}};
        if (t == 0.0) th.lo = th.hi = L0;
        for (const auto& a : v.atoms) th.atoms.push_back({L0 + a.x * s, a.mass});
        return th;
    }
    const RealMeasure mu0 = measure_from_law(law);
    if (t == 0.0) return {[](double) { return 0.0; }, 0.0, 0.0, mu0.atoms};
    const TransformedMeasure tm = transform_measure(mu0, t);
    LineTheory th{tm.density, tm.bands.front().first, tm.bands.back().second, tm.atoms};
    return th;
}

json report_json(const ComparisonReport& r, double ks_tol) {
    json w = json::array();
    for (const auto& x : r.windows)
        w.push_back({{"empirical", {x.emp_lo, x.emp_hi}},
                     {"theory", {finite_or_null(x.theory_lo), finite_or_null(x.theory_hi)}},
                     {"ks", x.ks},
                     {"count", x.count}});
    json atoms = json::array();
    for (const auto& a : r.emp_atoms) atoms.push_back({{"x", a.x}, {"mass", a.mass}});
    json hist = json::array();
    for (const auto& b : r.histogram) hist.push_back(b.count);
    return {{"meta", {{"seed", r.meta.seed}, {"n", r.meta.n}, {"t", r.meta.t}, {"law", r.meta.law}}},
            {"ks_distance", r.ks},
            {"ks_threshold", ks_tol},
            {"pass", r.ks <= ks_tol},
            {"mass_error", r.mass_error},
            {"support_endpoints",
             {{"empirical", {r.emp_lo, r.emp_hi}}, {"theory", {finite_or_null(r.theory_lo), finite_or_null(r.theory_hi)}}}},
            {"max_bin_deviation", r.max_bin_deviation},
            {"windows_match", r.windows_match},
            {"windows", w},
            {"empirical_atoms", atoms},
            {"bin_counts", hist}};
}

std::vector<Bar> density_bars(const std::vector<HistogramBin>& h, double total) {
    std::vector<Bar> bars;
    for (const auto& b : h) bars.push_back({b.left, b.right, static_cast<double>(b.count) / (total * (b.right - b.left))});
    return bars;
}

struct RunState {
    Writer& out;
    std::ostream& log;
    bool converged = true;
    bool checks_pass = true;
    json report = json::object();
};

double plot_xmax(const RadialCDF& pt) {
    if (std::isfinite(pt.support_max)) return pt.support_max * 1.05;
    if (std::isfinite(pt.mass)) return pt.quantile(0.99 * pt.mass);
    return 1.0;
}

void theory_complex(const ExperimentConfig& cfg, const std::vector<double>& ts, RunState& st) {
    const RadialCDF psi0 = initial_cdf(cfg.law);
    std::ostringstream csv;
    csv.precision(17);
    csv << "t,x,Psi,psi\n";
    std::vector<Series> curves;
    for (double t : ts) {
        const RadialCDF pt = cdf_at_time(psi0, t);
        const double xmax = plot_xmax(pt);
        Series s{Series::Kind::curve, {}, {}, "t=" + fmt(t)};
        for (int i = 0; i < 400; ++i) {
            const double x = xmax * (i + 0.5) / 400;
            const double d = density_at_time(psi0, t, x);
            csv << t << ',' << x << ',' << pt.cdf(x) << ',' << d << '\n';
            s.points.push_back({x, d});
        }
        curves.push_back(std::move(s));
    }
    st.out.write("theory.csv", csv.str());
    if (cfg.plots) st.out.write("theory.svg", svg(curves, {"radial density", "|z|", "psi(x, t)"}));
}

void theory_real(const ExperimentConfig& cfg, const std::vector<double>& ts, RunState& st) {
    std::ostringstream csv;
    csv.precision(17);
    csv << "t,x,density\n";
    json atoms = json::array();
    std::vector<Series> curves;
    for (double t : ts) {
        const LineTheory th = real_theory(cfg.law.real, t);
        for (const auto& a : th.atoms) atoms.push_back({{"t", t}, {"x", a.x}, {"mass", a.mass}});
        if (!(th.hi > th.lo)) continue;
        Series s{Series::Kind::curve, {}, {}, "t=" + fmt(t)};
        for (int i = 0; i < 400; ++i) {
            const double x = th.lo + (th.hi - th.lo) * (i + 0.5) / 400;
            const double d = th.density(x);
            csv << t << ',' << x << ',' << d << '\n';
            s.points.push_back({x, d});
        }
        curves.push_back(std::move(s));
    }
    st.out.write("theory.csv", csv.str());
    st.report["theory_atoms"] = atoms;
    if (cfg.plots && !curves.empty()) st.out.write("theory.svg", svg(curves, {"density of zeros", "x", "density"}));
}

void run_simulate(const ExperimentConfig& cfg, const std::vector<double>& ts, bool compare, RunState& st) {
    const int n = cfg.degree_unit();
    std::map<double, std::vector<cplx>> pooled;
    std::ostringstream csv;
    csv.precision(17);
    csv << "t,realization,order,re,im\n";
    for (int r = 0; r < cfg.realizations; ++r) {
        st.log << "realization " << r + 1 << "/" << cfg.realizations << '\n';
        for (auto& snap : simulate_complex(cfg, ts, cfg.seed + static_cast<std::uint64_t>(r))) {
            st.converged = st.converged && snap.converged;
            for (const cplx& z : snap.roots) csv << snap.t << ',' << r << ',' << snap.order << ',' << z.real() << ',' << z.imag() << '\n';
            auto& pool = pooled[snap.t];
            pool.insert(pool.end(), snap.roots.begin(), snap.roots.end());
        }
    }
    st.out.write("roots.csv", csv.str());
    if (cfg.plots)
        for (const auto& [t, roots] : pooled) {
            Series s{Series::Kind::scatter, {}, {}, "zeros"};
            for (const cplx& z : roots) s.points.push_back({z.real(), z.imag()});
            if (s.points.empty()) continue;
            PlotStyle style{"zeros at t=" + fmt(t), "Re z", "Im z"};
            style.equal_aspect = true;
            st.out.write("roots_t" + fmt(t) + ".svg", svg(std::span(&s, 1), style));
        }
    if (!compare) return;

    const RadialCDF psi0 = initial_cdf(cfg.law);
    if (!std::isfinite(psi0.mass)) throw ConfigError("compare needs a law of finite mass");
    std::ostringstream hist;
    hist.precision(17);
    hist << "t,bin_left,bin_right,count,theory_mass\n";
    json runs = json::array();
    for (const auto& [t, roots] : pooled) {
        const RadialCDF pt = cdf_at_time(psi0, t);
        const std::int64_t total = static_cast<std::int64_t>(n) * cfg.realizations;
        const ComparisonReport rep = compare_radial(roots, pt, {cfg.seed, total, t, cfg.law.name()}, cfg.bins);
        runs.push_back(report_json(rep, cfg.tol.ks));
        st.checks_pass = st.checks_pass && rep.ks <= cfg.tol.ks;
        st.log << "t=" << t << " ks=" << rep.ks << (rep.ks <= cfg.tol.ks ? " ok" : " above threshold") << '\n';
        for (const auto& b : rep.histogram)
            hist << t << ',' << b.left << ',' << b.right << ',' << b.count << ',' << b.theory_mass << '\n';
        if (cfg.plots) {
            std::vector<Series> s(2);
            s[0] = {Series::Kind::histogram, {}, density_bars(rep.histogram, static_cast<double>(total)), "zeros"};
            s[1] = {Series::Kind::curve, {}, {}, "theory", "#c0392b"};
            for (const auto& b : rep.histogram) {
                const double x = 0.5 * (b.left + b.right);
                s[1].points.push_back({x, density_at_time(psi0, t, x)});
            }
            st.out.write("compare_t" + fmt(t) + ".svg", svg(s, {"radial parts at t=" + fmt(t), "|z|", "density"}));
        }
    }
    st.out.write("histogram.csv", hist.str());
    st.report["runs"] = runs;
}

void run_real(const ExperimentConfig& cfg, const std::vector<double>& ts, RunState& st) {
    const int n = cfg.degree_unit();
    std::ostringstream csv, hist;
    csv.precision(17);
    hist.precision(17);
    csv << "t,realization,order,x,multiplicity\n";
    hist << "t,bin_left,bin_right,count,theory_mass\n";
    std::map<double, std::vector<double>> pooled;
    // atom laws are deterministic, so extra realizations would only repeat
    const int reps = cfg.law.real.kind == RealKind::atoms ? 1 : cfg.realizations;
    for (int r = 0; r < reps; ++r)
        for (auto& snap : simulate_real(cfg, ts, cfg.seed + static_cast<std::uint64_t>(r))) {
            st.converged = st.converged && snap.converged;
            auto& pool = pooled[snap.t];
            for (std::size_t i = 0; i < snap.points.size(); ++i) {
                csv << snap.t << ',' << r << ',' << snap.order << ',' << snap.points[i] << ',' << snap.mult[i] << '\n';
                pool.insert(pool.end(), static_cast<std::size_t>(snap.mult[i]), snap.points[i]);
            }
        }
    st.out.write("roots.csv", csv.str());
    json runs = json::array();
    for (const auto& [t, roots] : pooled) {
        const LineTheory th = real_theory(cfg.law.real, t);
        const std::int64_t total = static_cast<std::int64_t>(n) * reps;
        const ComparisonReport rep = compare_real(roots, th, {cfg.seed, total, t, cfg.law.name()}, cfg.bins);
        runs.push_back(report_json(rep, cfg.tol.ks));
        st.checks_pass = st.checks_pass && rep.ks <= cfg.tol.ks;
        st.log << "t=" << t << " ks=" << rep.ks << '\n';
        for (const auto& b : rep.histogram)
            hist << t << ',' << b.left << ',' << b.right << ',' << b.count << ',' << b.theory_mass << '\n';
        if (cfg.plots && !rep.histogram.empty()) {
            std::vector<Series> s(2);
            s[0] = {Series::Kind::histogram, {}, density_bars(rep.histogram, static_cast<double>(total)), "zeros"};
            s[1] = {Series::Kind::curve, {}, {}, "theory", "#c0392b"};
            for (const auto& b : rep.histogram) {
                const double x = 0.5 * (b.left + b.right);
                s[1].points.push_back({x, th.density(x)});
            }
            st.out.write("compare_t" + fmt(t) + ".svg", svg(s, {"real zeros at t=" + fmt(t), "x", "density"}));
        }
    }
    st.out.write("histogram.csv", hist.str());
    st.report["runs"] = runs;
}

std::vector<SolutionId> pde_families(const ExperimentConfig& cfg) {
    if (cfg.law_given) {
        const RadialLaw law = cfg.law.domain == LawSpec::Domain::coefficients ? limit_law(cfg.law.ensemble, cfg.law.alpha)
                                                                               : cfg.law.radial;
        if (!cfg.law.complex_case()) throw ConfigError("pde-check covers the complex families");
        if (auto id = catalogued(law)) return {*id};
        throw ConfigError("pde-check needs a law with a closed form");
    }
    std::vector<SolutionId> ids;
    auto add = [&](Family f, double alpha = 1.0) {
        SolutionId id;
        id.family = f;
        id.alpha = alpha;
        ids.push_back(id);
        return &ids.back();
    };
    add(Family::kac);
    for (const auto& [r, w] : {std::pair<std::vector<double>, std::vector<double>>{{1, 2}, {0.5, 0.5}},
                               {{1, 2, 3}, {1.0 / 3, 1.0 / 3, 1.0 / 3}},
                               {{1, 3}, {0.25, 0.75}}}) {
        auto* id = add(Family::circle_mixture);
        id->radii = r;
        id->weights = w;
    }
    for (double a : {0.5, 1.0, 2.0}) add(Family::weyl, a);
    auto* iu = add(Family::interval_uniform);
    iu->r1 = 0.5;
    iu->r2 = 1.5;
    for (double a : {0.5, 1.0}) add(Family::elliptic, a);
    for (double a : {0.5, 1.0}) add(Family::hyperbolic, a);
    return ids;
}

std::string family_name(const SolutionId& id) {
    switch (id.family) {
        case Family::kac: return "kac";
        case Family::circle_mixture: {
            std::string s = "circleMixture(";
            for (std::size_t i = 0; i < id.radii.size(); ++i) s += (i ? "," : "") + fmt(id.radii[i]);
            return s + ")";
        }
        case Family::weyl: return "weyl(" + fmt(id.alpha) + ")";
        case Family::interval_uniform: return "intervalUniform(" + fmt(id.r1) + "," + fmt(id.r2) + ")";
        case Family::elliptic: return "elliptic(" + fmt(id.alpha) + ")";
        case Family::hyperbolic: return "hyperbolic(" + fmt(id.alpha) + ")";
        default: return "real";
    }
}

void run_pde(const ExperimentConfig& cfg, const std::vector<double>& ts, RunState& st) {
    json rows = json::array();
    for (const auto& id : pde_families(cfg)) {
        const double res = pde_check_family(id, ts);
        const bool ok = res < cfg.tol.pde;
        st.checks_pass = st.checks_pass && ok;
        st.log << family_name(id) << " residual " << res << (ok ? "" : "  FAIL") << '\n';
        rows.push_back({{"family", family_name(id)}, {"max_residual", res}, {"pass", ok}});
    }
    st.report["pde_check"] = rows;
    st.report["threshold"] = cfg.tol.pde;
}

void run_fractional(const ExperimentConfig& cfg, RunState& st) {
    const Poly p = initial_poly(cfg, cfg.seed);
    std::ostringstream csv;
    csv.precision(17);
    csv << "alpha,re,im\n";
    json rows = json::array();
    for (double a : cfg.alpha) {
        const RootSet rs = find_roots(fractional_derivative(p, a));
        st.converged = st.converged && rs.converged;
        for (int k = 0; k < rs.origin_multiplicity; ++k) csv << a << ",0,0\n";
        for (const cplx& z : rs.roots) csv << a << ',' << z.real() << ',' << z.imag() << '\n';
        rows.push_back({{"alpha", a},
                        {"roots", rs.roots.size()},
                        {"origin_multiplicity", rs.origin_multiplicity},
                        {"converged", rs.converged}});
        if (cfg.plots && !rs.roots.empty()) {
            Series s{Series::Kind::scatter, {}, {}, "zeros"};
            for (const cplx& z : rs.roots) s.points.push_back({z.real(), z.imag()});
            PlotStyle style{"zeros of the order " + fmt(a) + " derivative", "Re z", "Im z"};
            style.equal_aspect = true;
            st.out.write("fractional_a" + fmt(a) + ".svg", svg(std::span(&s, 1), style));
        }
    }
    st.out.write("roots.csv", csv.str());
    st.report["fractional"] = rows;
}

}  // namespace

double LawSpec::initial_mass() const { return domain == Domain::real ? real.total_mass() : 1.0; }

std::string LawSpec::name() const { return raw.value("kind", std::string("law")); }

LawSpec parse_law(const json& j) {
    if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
        throw ConfigError("law must be an object with a string 'kind'");
    LawSpec out;
    out.raw = j;
    const std::string kind = j.at("kind").get<std::string>();
    try {
        if (kind == "coefficients") {
            out.domain = LawSpec::Domain::coefficients;
            out.ensemble = parse_coefficient_kind(get_or<std::string>(j, "ensemble", "kac"));
            out.alpha = get_or(j, "alpha", 1.0);
            out.noise = parse_noise_kind(get_or<std::string>(j, "noise", "gaussian"));
            if (!(out.alpha > 0.0)) throw ConfigError("alpha must be positive");
        } else if (kind == "profile") {
            out.domain = LawSpec::Domain::profile;
            if (!j.contains("law")) throw ConfigError("profile law needs a nested 'law'");
            const json& inner = j.at("law");
            out.radial = parse_radial(inner, inner.value("kind", std::string()));
            out.noise = parse_noise_kind(get_or<std::string>(j, "noise", "gaussian"));
            if (out.radial.kind == RadialKind::hyperbolic_radial) throw ConfigError("profile law must have unit mass");
        } else if (kind == "atoms" || kind == "twoAtomReal") {
            out.domain = LawSpec::Domain::real;
            out.real.kind = RealKind::atoms;
            if (kind == "twoAtomReal") {
                out.real.locations = {0.0, -1.0};
                out.real.masses = {get_or(j, "m1", 1.0), get_or(j, "m2", 1.0)};
            } else {
                out.real.locations = number_list(j, "locations");
                out.real.masses = number_list(j, "masses");
            }
            out.real.validate();
        } else if (kind == "arcsine") {
            out.domain = LawSpec::Domain::real;
            out.real.kind = RealKind::arcsine;
            out.real.a = get_or(j, "a", -1.0);
            out.real.b = get_or(j, "b", 1.0);
            out.real.validate();
        } else {
            out.domain = LawSpec::Domain::radial;
            out.radial = parse_radial(j, kind);
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("law: ") + e.what());
    } catch (const std::exception& e) {
        throw ConfigError(std::string("law: ") + e.what());
    }
    return out;
}

ExperimentConfig parse_config(const json& in) {
    const json& j = in.contains("config") && in.contains("artifacts") ? in.at("config") : in;
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    static const std::set<std::string> known{"mode", "law", "n", "t", "alpha", "seed", "realizations", "bins",
                                             "pipeline", "tolerances", "out", "plots"};
    for (const auto& [k, v] : j.items())
        if (!known.count(k)) throw ConfigError("unknown config field '" + k + "'");
    ExperimentConfig cfg;
    cfg.mode = get_or<std::string>(j, "mode", cfg.mode);
    if (j.contains("law")) {
        cfg.law = parse_law(j.at("law"));
        cfg.law_given = true;
    }
    cfg.n = get_or(j, "n", 0);
    if (j.contains("t")) cfg.t = number_list(j, "t");
    if (j.contains("alpha")) cfg.alpha = number_list(j, "alpha");
    cfg.seed = get_or<std::uint64_t>(j, "seed", cfg.seed);
    cfg.realizations = get_or(j, "realizations", cfg.realizations);
    cfg.bins = get_or(j, "bins", cfg.bins);
    cfg.pipeline = get_or<std::string>(j, "pipeline", cfg.pipeline);
    if (j.contains("tolerances")) {
        const json& tj = j.at("tolerances");
        cfg.tol.ks = get_or(tj, "ks", cfg.tol.ks);
        cfg.tol.pde = get_or(tj, "pde", cfg.tol.pde);
        cfg.tol.mass = get_or(tj, "mass", cfg.tol.mass);
    }
    cfg.out = get_or<std::string>(j, "out", cfg.out);
    cfg.plots = get_or(j, "plots", cfg.plots);
    return cfg;
}

json to_json(const ExperimentConfig& cfg) {
    json j{{"mode", cfg.mode},
           {"n", cfg.degree_unit()},
           {"t", times_for(cfg)},
           {"seed", cfg.seed},
           {"realizations", cfg.realizations},
           {"bins", cfg.bins},
           {"pipeline", cfg.pipeline},
           {"tolerances", {{"ks", cfg.tol.ks}, {"pde", cfg.tol.pde}, {"mass", cfg.tol.mass}}},
           {"out", cfg.out},
           {"plots", cfg.plots}};
    if (cfg.law_given) j["law"] = cfg.law.raw;
    if (!cfg.alpha.empty()) j["alpha"] = cfg.alpha;
    return j;
}

void validate(const ExperimentConfig& cfg) {
    if (!kModes.count(cfg.mode)) throw ConfigError("unknown mode '" + cfg.mode + "'");
    if (cfg.n < 0) throw ConfigError("n must be positive");
    if (cfg.realizations < 1) throw ConfigError("realizations must be positive");
    if (cfg.bins < 1) throw ConfigError("bins must be positive");
    if (cfg.pipeline != "flow" && cfg.pipeline != "coefficients") throw ConfigError("pipeline must be 'flow' or 'coefficients'");
    if (!(cfg.tol.ks > 0.0 && cfg.tol.pde > 0.0 && cfg.tol.mass > 0.0)) throw ConfigError("tolerances must be positive");
    const double m = cfg.law.initial_mass();
    for (double t : times_for(cfg))
        if (!(t >= 0.0 && t < m)) throw ConfigError("t = " + fmt(t) + " is outside [0, " + fmt(m) + ")");
    if (cfg.mode == "real" && cfg.law.complex_case()) throw ConfigError("real mode needs a real law (atoms, twoAtomReal, arcsine)");
    if ((cfg.mode == "simulate" || cfg.mode == "compare" || cfg.mode == "fractional") && !cfg.law.complex_case())
        throw ConfigError("mode '" + cfg.mode + "' needs a complex law; use mode 'real'");
    if (cfg.mode == "fractional") {
        if (cfg.alpha.empty()) throw ConfigError("fractional mode needs an 'alpha' list");
        for (double a : cfg.alpha)
            if (!(a >= 0.0 && a < cfg.degree_unit())) throw ConfigError("alpha out of range");
    }
    if (cfg.law.domain == LawSpec::Domain::radial && cfg.law.radial.kind == RadialKind::hyperbolic_radial &&
        cfg.mode != "theory" && cfg.mode != "pde-check")
        throw ConfigError("the hyperbolic law has infinite mass and cannot be sampled");
}

int run(const ExperimentConfig& cfg, std::ostream& log) {
    validate(cfg);
    Writer out(cfg.out);
    RunState st{out, log};
    const std::vector<double> ts = sorted_unique(times_for(cfg));

    if (cfg.mode == "simulate" || cfg.mode == "compare") {
        run_simulate(cfg, ts, cfg.mode == "compare", st);
        if (cfg.mode == "compare") theory_complex(cfg, ts, st);
    } else if (cfg.mode == "theory") {
        if (cfg.law.complex_case()) theory_complex(cfg, ts, st);
        else theory_real(cfg, ts, st);
    } else if (cfg.mode == "real") {
        run_real(cfg, ts, st);
        theory_real(cfg, ts, st);
    } else if (cfg.mode == "pde-check") {
        run_pde(cfg, ts, st);
    } else {
        run_fractional(cfg, st);
    }

    int code = kOk;
    if (!st.converged) code = kNonConvergence;
    else if (!st.checks_pass) code = kCheckFailed;
    st.report["converged"] = st.converged;
    st.report["pass"] = st.checks_pass;
    out.write("report.json", st.report.dump(2) + "\n");

    json manifest{{"tool", "rootflow"},
                  {"version", ROOTFLOW_VERSION},
                  {"compiler", __VERSION__},
                  {"boost", BOOST_LIB_VERSION},
                  {"config", to_json(cfg)},
                  {"artifacts", out.artifacts()},
                  {"converged", st.converged},
                  {"exit_code", code}};
    std::ofstream(fs::path(cfg.out) / "manifest.json") << manifest.dump(2) << '\n';
    if (!st.converged) log << "root finding did not converge; outputs are partial\n";
    return code;
}

}  // namespace rootflow::cli
