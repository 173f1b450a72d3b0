#pragma once

#include "rootflow/closedforms.hpp"
#include "rootflow/ensembles.hpp"
#include "rootflow/numeric.hpp"
#include "rootflow/radial.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace rootflow {

class EmpiricalCDF {
public:
    explicit EmpiricalCDF(std::vector<double> values);

    // fraction of the sample <= x
    double operator()(double x) const;
    double left_limit(double x) const;  // fraction < x
    std::size_t size() const { return sorted_.size(); }
    const std::vector<double>& sorted() const { return sorted_; }

private:
    std::vector<double> sorted_;
};

EmpiricalCDF empirical_radial_cdf(std::span<const cplx> roots);

// sup |F_emp - F / mass| over the sample points and their left limits; the
// theory side is normalized by its total mass.
double ks_distance(const EmpiricalCDF& emp, const std::function<double(double)>& theory, double theory_mass = 1.0);
// Two-sample sup distance.
double ks_distance(const EmpiricalCDF& a, const EmpiricalCDF& b);

// Maximal runs of the sorted sample separated by gaps wider than L =
// gap_fraction * s, s the 99th percentile of |value|. A point is kept only if
// some min_count + 1 consecutive points containing it span at most L, and,
// when density_fraction > 0, at most min_count * s / (density_fraction * N):
// local density at least that fraction of the mean density N / s. Sparse
// stragglers then neither bridge windows nor stretch their ends.
std::vector<std::pair<double, double>> detect_windows(std::span<const double> sorted, double gap_fraction = 0.05,
                                                      int min_count = 1, double density_fraction = 0.0);

// Occupied windows of a radial law: [0, support_max] minus its gaps.
std::vector<std::pair<double, double>> theory_windows(const RadialCDF& psi);

struct HistogramBin {
    double left, right;
    std::int64_t count;
    double theory_mass;  // mass of the predicted law in the bin, in units of the initial mass
};

struct WindowReport {
    double emp_lo, emp_hi, theory_lo, theory_hi;
    double ks;
    std::int64_t count;
};

struct ReportMeta {
    std::uint64_t seed = 0;
    std::int64_t n = 0;  // initial degree
    double t = 0.0;
    std::string law;
};

struct ComparisonReport {
    ReportMeta meta;
    double ks = 0.0;
    double mass_error = 0.0;
    double emp_lo = 0.0, emp_hi = 0.0, theory_lo = 0.0, theory_hi = 0.0;
    std::vector<HistogramBin> histogram;
    double max_bin_deviation = 0.0;
    std::vector<WindowReport> windows;  // complex case; empty if the window counts disagree
    bool windows_match = true;
    std::vector<RealAtom> emp_atoms;    // real case
};

// Complex roots of the [tn]-th derivative against Psi(., t) (mass m - t in
// units of the initial mass n).
// Windows are detected with min_count = 0.2% of the sample (at least 2) and
// density_fraction 0.2.
ComparisonReport compare_radial(std::span<const cplx> roots, const RadialCDF& theory, const ReportMeta& meta, int bins = 50);

// Real roots against a continuous density on (lo, hi) plus atoms. Roots
// within atom_tol of an atom are counted toward it and left out of the KS.
struct LineTheory {
    std::function<double(double)> density;
    double lo, hi;
    std::vector<RealAtom> atoms;
};
ComparisonReport compare_real(std::span<const double> roots, const LineTheory& theory, const ReportMeta& meta,
                              int bins = 50, double atom_tol = 1e-6);

// CDF of a density on (lo, hi), normalized to 1, integrated in the angle
// variable x = c + h cos(theta) so square-root edges cost nothing.
std::function<double(double)> line_cdf(const std::function<double(double)>& density, double lo, double hi);
double line_mass(const std::function<double(double)>& density, double lo, double hi);

// |integral of the density + atom masses - expected|; hi may be +inf.
double mass_check(const std::function<double(double)>& density, double lo, double hi, std::span<const RealAtom> atoms,
                  double expected);

// (x, t) points strictly inside the occupied windows of psi0 flowed to each
// t, kept a relative margin away from every window end; infinite windows are
// cut at x_cap.
std::vector<std::pair<double, double>> pde_grid(const RadialCDF& psi0, std::span<const double> ts, int per_window = 12,
                                                double margin = 0.05, double x_cap = 5.0);
// Largest radial-equation residual of a complex closed form over pde_grid.
double pde_check_family(const SolutionId& id, std::span<const double> ts);

void write_histogram_csv(std::ostream& out, std::span<const HistogramBin> bins);

}  // namespace rootflow
