#include "rootflow/verify.hpp"

#include "rootflow/profileflow.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace rootflow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double theta_integral(const std::function<double(double)>& density, double c, double h, double th0, double th1) {
    if (th1 <= th0) return 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        [&](double th) { return density(c + h * std::cos(th)) * h * std::sin(th); }, th0, th1, 15, 1e-12);
}

std::vector<HistogramBin> make_bins(double lo, double hi, int bins) {
    if (bins < 1) throw std::invalid_argument("histogram: need at least one bin");
    if (!(hi > lo)) hi = lo + 1.0;
    std::vector<HistogramBin> out(static_cast<std::size_t>(bins));
    for (int i = 0; i < bins; ++i) out[static_cast<std::size_t>(i)] = {lo + (hi - lo) * i / bins, lo + (hi - lo) * (i + 1) / bins, 0, 0.0};
    out.back().right = hi;
    return out;
}

void fill_counts(std::vector<HistogramBin>& bins, std::span<const double> values) {
    const double lo = bins.front().left, hi = bins.back().right;
    for (double v : values) {
        if (v < lo || v > hi) continue;
        auto i = static_cast<std::size_t>((v - lo) / (hi - lo) * static_cast<double>(bins.size()));
        ++bins[std::min(i, bins.size() - 1)].count;
    }
}

}  // namespace

EmpiricalCDF::EmpiricalCDF(std::vector<double> values) : sorted_(std::move(values)) {
    if (sorted_.empty()) throw std::invalid_argument("EmpiricalCDF: empty sample");
    std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalCDF::operator()(double x) const {
    return static_cast<double>(std::upper_bound(sorted_.begin(), sorted_.end(), x) - sorted_.begin()) /
           static_cast<double>(sorted_.size());
}

double EmpiricalCDF::left_limit(double x) const {
    return static_cast<double>(std::lower_bound(sorted_.begin(), sorted_.end(), x) - sorted_.begin()) /
           static_cast<double>(sorted_.size());
}

EmpiricalCDF empirical_radial_cdf(std::span<const cplx> roots) {
    std::vector<double> r;
    r.reserve(roots.size());
    for (const cplx& z : roots) r.push_back(std::abs(z));
    return EmpiricalCDF(std::move(r));
}

double ks_distance(const EmpiricalCDF& emp, const std::function<double(double)>& theory, double theory_mass) {
    if (!(theory_mass > 0.0)) throw std::invalid_argument("ks_distance: theory mass must be positive");
    double d = 0.0;
    const auto& x = emp.sorted();
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (i && x[i] == x[i - 1]) continue;
        const double F = std::min(1.0, theory(x[i]) / theory_mass);
        const double Fl = std::min(1.0, theory(std::nextafter(x[i], -kInf)) / theory_mass);
        d = std::max({d, std::abs(emp(x[i]) - F), std::abs(emp.left_limit(x[i]) - Fl)});
    }
    return d;
}

double ks_distance(const EmpiricalCDF& a, const EmpiricalCDF& b) {
    double d = 0.0;
    for (const EmpiricalCDF* s : {&a, &b})
        for (double x : s->sorted()) d = std::max({d, std::abs(a(x) - b(x)), std::abs(a.left_limit(x) - b.left_limit(x))});
    return d;
}

std::vector<std::pair<double, double>> detect_windows(std::span<const double> sorted, double gap_fraction, int min_count,
                                                      double density_fraction) {
    std::vector<std::pair<double, double>> out;
    if (sorted.empty()) return out;
    if (min_count < 1) throw std::invalid_argument("detect_windows: min_count must be positive");
    std::vector<double> mag(sorted.size());
    std::transform(sorted.begin(), sorted.end(), mag.begin(), [](double v) { return std::abs(v); });
    const auto top = mag.begin() + static_cast<std::ptrdiff_t>(0.99 * static_cast<double>(mag.size() - 1));
    std::nth_element(mag.begin(), top, mag.end());
    const double L = gap_fraction * *top;
    const std::size_t n = sorted.size(), k = static_cast<std::size_t>(min_count);
    double span = L;
    if (density_fraction > 0.0) span = std::min(span, static_cast<double>(k) * *top / (density_fraction * static_cast<double>(n)));

    std::vector<char> dense(n, 0);
    for (std::size_t i = 0; i + k < n; ++i)
        if (sorted[i + k] - sorted[i] <= span) std::fill(dense.begin() + static_cast<std::ptrdiff_t>(i),
                                                      dense.begin() + static_cast<std::ptrdiff_t>(i + k + 1), 1);
    bool open = false;
    double start = 0.0, last = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!dense[i]) continue;
        if (open && sorted[i] - last > L) {
            out.push_back({start, last});
            open = false;
        }
        if (!open) {
            start = sorted[i];
            open = true;
        }
        last = sorted[i];
    }
    if (open) out.push_back({start, last});
    return out;
}

std::vector<std::pair<double, double>> theory_windows(const RadialCDF& psi) {
    auto gaps = psi.gaps;
    std::sort(gaps.begin(), gaps.end(), [](auto& p, auto& q) { return p.r_lo < q.r_lo; });
    std::vector<std::pair<double, double>> out;
    double start = 0.0;
    for (const auto& g : gaps) {
        // a window can be a single circle of zeros, [r, r]
        if (g.r_lo > start || (g.r_lo == start && start > 0.0)) out.push_back({start, g.r_lo});
        start = g.r_hi;
    }
    out.push_back({start, psi.support_max});
    return out;
}

ComparisonReport compare_radial(std::span<const cplx> roots, const RadialCDF& theory, const ReportMeta& meta, int bins) {
    if (meta.n < 1) throw std::invalid_argument("compare_radial: n must be positive");
    ComparisonReport rep;
    rep.meta = meta;
    const EmpiricalCDF emp = empirical_radial_cdf(roots);
    const auto& r = emp.sorted();
    const double n = static_cast<double>(meta.n);
    rep.ks = ks_distance(emp, theory.cdf, theory.mass);
    rep.mass_error = std::abs(static_cast<double>(r.size()) / n - theory.mass);
    rep.emp_lo = r.front();
    rep.emp_hi = r.back();
    const auto tw = theory_windows(theory);
    rep.theory_lo = tw.front().first;
    rep.theory_hi = theory.support_max;

    const double top = std::isfinite(theory.support_max) ? std::max(theory.support_max, r.back()) : r.back();
    rep.histogram = make_bins(0.0, top, bins);
    fill_counts(rep.histogram, r);
    for (auto& b : rep.histogram) {
        b.theory_mass = theory.cdf(b.right) - theory.cdf(b.left);
        rep.max_bin_deviation = std::max(rep.max_bin_deviation, std::abs(static_cast<double>(b.count) / n - b.theory_mass));
    }

    const auto ew = detect_windows(r, 0.05, std::max(2, static_cast<int>(std::lround(0.002 * static_cast<double>(r.size())))), 0.2);
    rep.windows_match = ew.size() == tw.size();
    if (rep.windows_match) {
        for (std::size_t w = 0; w < ew.size(); ++w) {
            std::vector<double> inside;
            for (double v : r)
                if (v >= ew[w].first && v <= ew[w].second) inside.push_back(v);
            const double lo = tw[w].first, hi = tw[w].second;
            const double base = lo > 0.0 ? theory.cdf(std::nextafter(lo, -kInf)) : 0.0, top_mass = std::isfinite(hi) ? theory.cdf(hi) : theory.mass;
            const double span = top_mass - base;
            WindowReport wr{ew[w].first, ew[w].second, lo, hi, 1.0, static_cast<std::int64_t>(inside.size())};
            if (span > 0.0)
                wr.ks = ks_distance(EmpiricalCDF(std::move(inside)),
                                    [&](double x) { return std::clamp(theory.cdf(x) - base, 0.0, span); }, span);
            rep.windows.push_back(wr);
        }
    }
    return rep;
}

std::function<double(double)> line_cdf(const std::function<double(double)>& density, double lo, double hi) {
    const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
    const double total = theta_integral(density, c, h, 0.0, std::numbers::pi);
    if (!(total > 0.0)) throw std::invalid_argument("line_cdf: density has no mass");
    return [density, c, h, lo, hi, total](double x) {
        if (x <= lo) return 0.0;
        if (x >= hi) return 1.0;
        const double th = std::acos(std::clamp((x - c) / h, -1.0, 1.0));
        return std::clamp(theta_integral(density, c, h, th, std::numbers::pi) / total, 0.0, 1.0);
    };
}

double line_mass(const std::function<double(double)>& density, double lo, double hi) {
    return theta_integral(density, 0.5 * (lo + hi), 0.5 * (hi - lo), 0.0, std::numbers::pi);
}

ComparisonReport compare_real(std::span<const double> roots, const LineTheory& theory, const ReportMeta& meta, int bins,
                              double atom_tol) {
    if (meta.n < 1) throw std::invalid_argument("compare_real: n must be positive");
    ComparisonReport rep;
    rep.meta = meta;
    const double n = static_cast<double>(meta.n);
    std::vector<double> cont;
    std::vector<std::int64_t> hits(theory.atoms.size(), 0);
    for (double x : roots) {
        bool atom = false;
        for (std::size_t j = 0; j < theory.atoms.size(); ++j)
            if (std::abs(x - theory.atoms[j].x) <= atom_tol) {
                ++hits[j];
                atom = true;
                break;
            }
        if (!atom) cont.push_back(x);
    }
    double theory_total = 0.0;
    for (std::size_t j = 0; j < theory.atoms.size(); ++j) {
        rep.emp_atoms.push_back({theory.atoms[j].x, static_cast<double>(hits[j]) / n});
        theory_total += theory.atoms[j].mass;
    }
    rep.theory_lo = theory.lo;
    rep.theory_hi = theory.hi;
    const bool has_density = theory.hi > theory.lo;
    const double cmass = has_density ? line_mass(theory.density, theory.lo, theory.hi) : 0.0;
    theory_total += cmass;
    rep.mass_error = std::abs(static_cast<double>(roots.size()) / n - theory_total);
    if (cont.empty() || !has_density) return rep;

    const EmpiricalCDF emp(cont);
    const auto F = line_cdf(theory.density, theory.lo, theory.hi);
    rep.ks = ks_distance(emp, F, 1.0);
    rep.emp_lo = emp.sorted().front();
    rep.emp_hi = emp.sorted().back();
    rep.histogram = make_bins(theory.lo, theory.hi, bins);
    fill_counts(rep.histogram, emp.sorted());
    for (auto& b : rep.histogram) {
        b.theory_mass = (F(b.right) - F(b.left)) * cmass;
        rep.max_bin_deviation = std::max(rep.max_bin_deviation, std::abs(static_cast<double>(b.count) / n - b.theory_mass));
    }
    return rep;
}

double mass_check(const std::function<double(double)>& density, double lo, double hi, std::span<const RealAtom> atoms,
                  double expected) {
    double m = 0.0;
    if (std::isinf(hi)) {
        boost::math::quadrature::exp_sinh<double> q;
        m = q.integrate(density, lo, hi);
    } else if (hi > lo) {
        const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
        m = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
            [&](double th) { return density(c + h * std::cos(th)) * h * std::sin(th); }, 0.0, std::numbers::pi, 30, 1e-14);
    }
    for (const auto& a : atoms) m += a.mass;
    return std::abs(m - expected);
}

std::vector<std::pair<double, double>> pde_grid(const RadialCDF& psi0, std::span<const double> ts, int per_window,
                                                double margin, double x_cap) {
    std::vector<std::pair<double, double>> out;
    for (double t : ts)
        for (auto [lo, hi] : theory_windows(cdf_at_time(psi0, t))) {
            hi = std::min(hi, x_cap);
            const double w = hi - lo;
            if (!(w > 0.0)) continue;
            for (int i = 0; i < per_window; ++i)
                out.push_back({lo + w * (margin + (1.0 - 2.0 * margin) * i / std::max(1, per_window - 1)), t});
        }
    return out;
}

double pde_check_family(const SolutionId& id, std::span<const double> ts) {
    const auto g = pde_grid(law_cdf(radial_law(id)), ts);
    return pde_residual([&](double x, double t) { return evaluate_radial(id, x, t).Psi; }, g);
}

void write_histogram_csv(std::ostream& out, std::span<const HistogramBin> bins) {
    out.precision(17);
    out << "bin_left,bin_right,count,theory_mass\n";
    for (const auto& b : bins) out << b.left << ',' << b.right << ',' << b.count << ',' << b.theory_mass << '\n';
}

}  // namespace rootflow
