#pragma once

#include "rootflow/closedforms.hpp"
#include "rootflow/numeric.hpp"
#include "rootflow/polynomial.hpp"
#include "rootflow/radial.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rootflow {

enum class RadialKind { circle_mixture, power_radial, interval_uniform, elliptic_radial, hyperbolic_radial };

struct RadialLaw {
    RadialKind kind = RadialKind::circle_mixture;
    std::vector<double> radii{1.0}, weights{1.0};  // circle_mixture
    double alpha = 1.0;                            // power, elliptic, hyperbolic
    double r1 = 0.0, r2 = 1.0;                     // interval_uniform

    void validate() const;
};

// Psi_0 of the law with its circles and gaps listed. Power-radial Psi_0 is
// x^(1/alpha) on [0, 1]; elliptic is u/(1+u) and hyperbolic u/(1-u) with
// u = x^(1/alpha), the latter of infinite total mass.
RadialCDF law_cdf(const RadialLaw& law);
std::optional<SolutionId> catalogued(const RadialLaw& law);
// Initial law of a complex-case family; Kac is the unit circle.
RadialLaw radial_law(const SolutionId& id);

// n i.i.d. zeros: modulus by inverse CDF, argument uniform. Draw i uses
// counter (stream 0, index i).
std::vector<cplx> sample_roots(const RadialLaw& law, int n, std::uint64_t seed);

enum class RealKind { atoms, arcsine };

struct RealLaw {
    RealKind kind = RealKind::arcsine;
    std::vector<double> locations, masses;  // atoms
    double a = -1.0, b = 1.0;               // arcsine interval

    void validate() const;
    double total_mass() const;
};

// Largest-remainder split of `total` points proportionally to the masses;
// ties go to the earlier atom.
std::vector<std::int64_t> atom_counts(const RealLaw& law, std::int64_t total);

// Atoms: n points placed deterministically by atom_counts, sorted. Arcsine:
// n i.i.d. draws c + h cos(pi U).
std::vector<double> sample_real_roots(const RealLaw& law, int n, std::uint64_t seed);

enum class CoefficientKind { kac, weyl, elliptic, exponential, hyperbolic };
enum class NoiseKind { gaussian, rademacher, uniform };

CoefficientKind parse_coefficient_kind(const std::string& name);
NoiseKind parse_noise_kind(const std::string& name);

// log f_{k,n} of the deterministic coefficient weights.
double log_weight(CoefficientKind kind, int k, int n, double alpha);

// sum_k xi_k f_{k,n} z^k. Noise xi_k uses counter (stream 1, index
// k + noise_offset), so polynomials that share an offset share noise.
// Gaussian noise is standard complex (E|xi|^2 = 1); Rademacher is +-1;
// uniform is real uniform with unit variance.
Poly coefficient_ensemble(CoefficientKind kind, int n, double alpha, std::uint64_t seed,
                          NoiseKind noise = NoiseKind::gaussian, std::int64_t noise_offset = 0);

// v(k/n) = integral of log Q_0 over [0, k/n] for a unit-mass radial law, so
// that coefficients e^{-n v(k/n)} put the zeros on that law.
std::vector<double> profile_values(const RadialLaw& law, int n);
// sum_k xi_k e^{-n v(k/n)} z^k with the noise of coefficient_ensemble.
Poly profile_ensemble(const RadialLaw& law, int n, std::uint64_t seed, NoiseKind noise = NoiseKind::gaussian);

}  // namespace rootflow
