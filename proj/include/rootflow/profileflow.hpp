#pragma once

// Exponential-profile flow. The profile derivative v'(x) is the log of the
// quantile function of the radial law; differentiating [tn] times maps it to
// v'(x + t) + log(x / (x + t)). Everything here is evaluated through that
// quantile relation, so the grid stored in a Profile is only a tabulation.

#include "rootflow/radial.hpp"

#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

namespace rootflow {

struct Profile {
    struct Node {
        double x, dminus, dplus;
    };
    struct Jump {
        double x, dminus, dplus;
    };
    struct Plateau {
        double x_lo, x_hi, value;
    };

    double mass = 1.0;   // domain is (0, mass - time]
    double time = 0.0;
    RadialCDF base;      // the time-zero law
    std::vector<Node> grid;
    std::vector<Jump> jumps;        // void annuli
    std::vector<Plateau> plateaus;  // circles of zeros (time zero only)
    double void_disk_log_radius;    // v'_+(0); -inf when there is no void disk

    double dminus(double x) const;
    double dplus(double x) const;
};

Profile profile_from_cdf(const RadialCDF& psi0, int grid_size = 4096);
Profile flow_profile(const Profile& v, double t, int grid_size = 4096);

RadialCDF cdf_at_time(const RadialCDF& psi0, double t);

// psi(x, t) by a centered difference of cdf_at_time, or straight from the
// catalogue when psi0 is a known family and closed_form is set.
double density_at_time(const RadialCDF& psi0, double t, double x, bool closed_form = true);

struct FeatureReport {
    struct Annulus {
        double r_minus, r_plus, source_x0;
    };
    struct Circle {
        double radius, mass;
    };
    double t = 0.0;
    double void_disk_radius = 0.0;
    std::vector<Annulus> annuli;
    std::vector<Circle> circles;
};

FeatureReport track_features(const Profile& v, double t);

// Max over (x, t) points of |d_t Psi - (x d_x Psi / Psi - 1)| by central
// differences with relative step 1e-5.
double pde_residual(const std::function<double(double, double)>& Psi, std::span<const std::pair<double, double>> points);
double pde_check_profile(const RadialCDF& psi0, std::span<const std::pair<double, double>> points,
                         bool closed_form = true);

// CSV with header x,Psi,psi.
void write_cdf_csv(std::ostream& out, const RadialCDF& psi0, double t, std::span<const double> grid);

}  // namespace rootflow
