#include "doctest.h"

#include "rootflow/closedforms.hpp"
#include "rootflow/profileflow.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

using namespace rootflow;
using doctest::Approx;

namespace {

double integrate(const std::function<double(double)>& f, double a, double b) {
    boost::math::quadrature::tanh_sinh<double> q;
    return q.integrate(f, a, b);
}

double radial_mass(const SolutionId& id, double t, double upper) {
    return integrate([&](double x) { return evaluate_radial(id, x, t).psi; }, 0.0, upper);
}

std::vector<std::pair<double, double>> interior_grid(double support_top_at_t0) {
    std::vector<std::pair<double, double>> g;
    for (double x : {0.1, 0.2, 0.3, 0.4})
        for (double t : {0.2, 0.3, 0.4, 0.5, 0.6})
            if (x < (1.0 - t) * support_top_at_t0 - 0.01) g.push_back({x, t});
    return g;
}

SolutionId sid(Family f, double alpha = 1.0) {
    SolutionId id;
    id.family = f;
    id.alpha = alpha;
    return id;
}

}  // namespace

TEST_CASE("kac evolution") {
    CHECK(kac(0.5, 0.5).psi == Approx(2.0).epsilon(1e-15));
    CHECK(kac(0.8, 0.5).psi == 0.0);
    CHECK(kac(0.8, 0.5).Psi == Approx(0.5));
    const double t = 0.3;
    CHECK(std::abs(radial_mass(sid(Family::kac), t, 1.0 - t) - (1.0 - t)) < 1e-10);
    CHECK(kac(0.4, 0.3).Psi == Approx(0.4 * 0.3 / 0.6).epsilon(1e-15));
}

TEST_CASE("circle mixture windows and mass") {
    const std::vector<double> r{1, 2, 3}, w{1.0 / 3, 1.0 / 3, 1.0 / 3};
    const auto win = circle_mixture_windows(0.2, r, w);
    REQUIRE(win.size() == 3);
    CHECK(win[0].lo == 0.0);
    CHECK(win[0].hi == Approx(0.4).epsilon(1e-12));
    CHECK(win[1].lo == Approx(0.8).epsilon(1e-12));
    CHECK(win[1].hi == Approx(1.4).epsilon(1e-12));
    CHECK(win[2].lo == Approx(2.1).epsilon(1e-12));
    CHECK(win[2].hi == Approx(2.4).epsilon(1e-12));

    double mass = 0.0;
    for (const auto& s : win) mass += integrate([&](double x) { return circle_mixture(x, 0.2, r, w).psi; }, s.lo, s.hi);
    CHECK(std::abs(mass - 0.8) < 1e-8);

    // in a gap Psi is flat at P_l - t
    CHECK(circle_mixture(0.6, 0.2, r, w).psi == 0.0);
    CHECK(circle_mixture(0.6, 0.2, r, w).Psi == Approx(1.0 / 3 - 0.2));

    const std::vector<double> one{1.0}, unit{1.0};
    for (double x : {0.1, 0.3, 0.55})
        for (double t : {0.1, 0.4}) {
            CHECK(circle_mixture(x, t, one, unit).psi == Approx(kac(x, t).psi).epsilon(1e-14));
            CHECK(circle_mixture(x, t, one, unit).Psi == Approx(kac(x, t).Psi).epsilon(1e-14));
        }
    CHECK_THROWS(circle_mixture(0.5, 1.0, r, w));
}

TEST_CASE("circle mixture takes the right limit at transition instants") {
    const std::vector<double> r{1, 2, 3}, w{1.0 / 3, 1.0 / 3, 1.0 / 3};
    const auto win = circle_mixture_windows(1.0 / 3, r, w);
    REQUIRE(win.size() == 2);
    CHECK(win[0].lo == 0.0);  // the second circle now reaches the origin
}

TEST_CASE("weyl family closed forms") {
    for (double x : {0.1, 0.4, 0.7}) CHECK(weyl_family(x, 0.2, 1.0).psi == 1.0);
    CHECK(weyl_family(0.5, 0.25, 0.5).psi == Approx(0.5 + 0.75 / std::sqrt(1.25)).epsilon(1e-14));
    CHECK(weyl_family(0.5, 0.25, 0.5).psi == Approx(1.1708).epsilon(1e-4));
    CHECK(weyl_family(0.3, 0.2, 2.0).psi == Approx(1.0 / std::sqrt(1.24)).epsilon(1e-14));
    CHECK(weyl_family(0.3, 0.2, 2.0).psi == Approx(0.89803).epsilon(1e-5));
    CHECK(weyl_family(0.9, 0.2, 2.0).psi == 0.0);
}

TEST_CASE("implicit weyl solve agrees with the closed forms") {
    for (double a : {0.5, 1.0, 2.0})
        for (double t : {0.0, 0.1, 0.35, 0.7})
            for (double x = 0.02; x < 1.0 - t; x += 0.05) {
                const RadialValue c = weyl_family(x, t, a), s = weyl_implicit(x, t, a);
                CHECK(std::abs(c.Psi - s.Psi) < 1e-10);
                CHECK(std::abs(c.psi - s.psi) < 1e-10 * std::max(1.0, c.psi));
            }
}

TEST_CASE("interval uniform") {
    for (double x : {0.1, 0.3, 0.6}) CHECK(interval_uniform(x, 0.3, 0.0, 1.0).psi == Approx(1.0).epsilon(1e-14));
    const double near = interval_uniform(0.3, 0.4, 1.0, 1.0 + 1e-4).psi;
    CHECK(std::abs(near / kac(0.3, 0.4).psi - 1.0) < 0.01);
    SolutionId id = sid(Family::interval_uniform);
    id.r1 = 1.0;
    id.r2 = 2.0;
    CHECK(std::abs(radial_mass(id, 0.5, 1.0) - 0.5) < 1e-8);
}

TEST_CASE("elliptic family") {
    CHECK(elliptic(1.0, 0.5, 1.0).psi == Approx(0.125).epsilon(1e-15));
    // alpha = 1/2 at t = 0 is 2x / (1 + x^2)^2
    for (double x : {0.3, 1.0, 2.5}) CHECK(elliptic(x, 0.0, 0.5).psi == Approx(2 * x / std::pow(1 + x * x, 2)).epsilon(1e-12));
    CHECK(elliptic(1.0, 0.0, 0.5).psi == Approx(0.5).epsilon(1e-14));
    // exact antiderivative -(1 - t) / (1 + x) on (0, inf)
    const double t = 0.4;
    CHECK(elliptic(1e300, t, 1.0).Psi == Approx(1.0 - t).epsilon(1e-12));
    for (double a : {0.5, 1.0})
        for (double tt : {0.1, 0.5})
            for (double x : {0.2, 1.0, 3.0}) {
                CHECK(std::abs(elliptic(x, tt, a).Psi - elliptic_implicit(x, tt, a).Psi) < 1e-10);
                CHECK(std::abs(elliptic(x, tt, a).psi - elliptic_implicit(x, tt, a).psi) < 1e-9);
            }
}

TEST_CASE("hyperbolic family") {
    CHECK(hyperbolic(0.5, 1.0, 1.0).psi == Approx(8.0).epsilon(1e-15));
    CHECK(hyperbolic(0.5, 0.0, 0.5).psi == Approx(16.0 / 9.0).epsilon(1e-14));
    CHECK(hyperbolic(0.5, 1.0, 0.5).Psi == Approx((0.75 + std::sqrt(2.0625)) / 1.5).epsilon(1e-14));
    CHECK(hyperbolic(0.5, 1.0, 0.5).Psi == Approx(1.45743).epsilon(1e-5));
    CHECK(std::isinf(hyperbolic(1.0, 0.3, 0.5).psi));
    for (double a : {0.5, 1.0})
        for (double t : {0.0, 0.7, 3.0})
            for (double x : {0.1, 0.5, 0.9})
                CHECK(std::abs(hyperbolic(x, t, a).Psi / hyperbolic_implicit(x, t, a).Psi - 1.0) < 1e-10);
}

TEST_CASE("two atom real law") {
    const TwoAtomValue mid = two_atom_real(-0.5, 1.0, 1.0, 1.0);
    CHECK(mid.x_minus == Approx(-1.0).epsilon(1e-14));
    CHECK(std::abs(mid.x_plus) < 1e-15);

    const TwoAtomValue start = two_atom_real(-0.3, 0.0, 1.0, 3.0);
    CHECK(start.x_minus == Approx(-0.25));
    CHECK(start.x_plus == Approx(-0.25));
    CHECK(start.density == 0.0);
    REQUIRE(start.atoms.size() == 2);
    CHECK(start.atoms[0].mass == 3.0);
    CHECK(start.atoms[1].mass == 1.0);

    CHECK(two_atom_real(-0.3, 2.0, 1.0, 4.0).density ==
          Approx(two_atom_real(-0.7, 3.0, 1.0, 4.0).density).epsilon(1e-12));
    CHECK(two_atom_real(-0.3, 2.0, 1.0, 4.0).density > 0.0);

    // total mass of continuous part plus atoms is m1 + m2 - t
    for (double t : {0.5, 1.5, 3.0}) {
        const TwoAtomValue v = two_atom_real(0.0, t, 1.0, 4.0);
        double mass = integrate([&](double x) { return two_atom_real(x, t, 1.0, 4.0).density; }, v.x_minus, v.x_plus);
        for (const auto& a : v.atoms) mass += a.mass;
        CHECK(std::abs(mass - (5.0 - t)) < 1e-8);
    }
}

TEST_CASE("two atom law transported to [-1, 1]") {
    for (double t : {0.3, 1.0, 1.6})
        for (double y = -0.95; y < 1.0; y += 0.1) {
            const double u = two_atom_real((y - 1.0) / 2.0, t, 1.0, 1.0).density / 2.0;
            CHECK(std::abs(u - symmetric_two_atom_real(y, t).density) < 1e-12);
        }
}

TEST_CASE("arcsine evolution") {
    CHECK(arcsine_real(0.0, 0.0) == Approx(1.0 / std::numbers::pi).epsilon(1e-15));
    CHECK(arcsine_real(0.0, 0.6) == Approx(0.8 / std::numbers::pi).epsilon(1e-15));
    CHECK(arcsine_real(0.0, 0.6) == Approx(0.25465).epsilon(1e-4));
    CHECK(arcsine_real(0.9, 0.6) == 0.0);
    const double s = 0.5, e = std::sqrt(1 - s * s);
    CHECK(std::abs(integrate([&](double x) { return arcsine_real(x, s); }, -e, e) - (1.0 - s)) < 1e-8);
    // shifted by one unit of time it is the symmetric two-atom law
    for (double x : {-0.4, 0.0, 0.3}) CHECK(arcsine_real(x, s) == Approx(symmetric_two_atom_real(x, 1.0 + s).density).epsilon(1e-12));
}

TEST_CASE("every complex closed form solves the radial equation") {
    std::vector<SolutionId> ids{sid(Family::kac), sid(Family::weyl, 0.5), sid(Family::weyl, 1.0), sid(Family::weyl, 2.0),
                                sid(Family::weyl, 0.7), sid(Family::elliptic, 0.5), sid(Family::elliptic, 1.0),
                                sid(Family::elliptic, 1.8), sid(Family::hyperbolic, 0.5), sid(Family::hyperbolic, 1.0)};
    SolutionId iu = sid(Family::interval_uniform);
    iu.r1 = 1.0;
    iu.r2 = 2.0;
    ids.push_back(iu);
    SolutionId cm = sid(Family::circle_mixture);
    cm.radii = {1.0, 2.0, 3.0};
    cm.weights = {0.5, 0.3, 0.2};
    ids.push_back(cm);
    for (const auto& id : ids) {
        std::vector<std::pair<double, double>> g;
        for (auto [x, t] : interior_grid(1.0)) {
            if (id.family == Family::circle_mixture) t *= 0.4;  // stay in the first window
            if (id.family == Family::circle_mixture && x > 0.9 * (0.5 - t) / 0.5) continue;
            g.push_back({x, t});
        }
        REQUIRE(!g.empty());
        const double res = pde_residual([&](double x, double t) { return evaluate_radial(id, x, t).Psi; }, g);
        CHECK(res < 1e-6);
    }
}

TEST_CASE("every finite-mass closed form carries mass initial minus t") {
    boost::math::quadrature::exp_sinh<double> half_line;
    for (double t : {0.15, 0.55}) {
        for (double a : {0.5, 1.0, 2.0, 0.7}) {
            CHECK(std::abs(radial_mass(sid(Family::weyl, a), t, 1.0 - t) - (1.0 - t)) < 1e-8);
            const double m = half_line.integrate([&](double x) { return elliptic(x, t, a).psi; });
            CHECK(std::abs(m - (1.0 - t)) < 1e-8);
        }
        CHECK(std::abs(radial_mass(sid(Family::kac), t, 1.0 - t) - (1.0 - t)) < 1e-8);
    }
}

TEST_CASE("solution csv") {
    std::ostringstream out;
    const std::vector<double> grid{0.1, 0.2};
    write_solution_csv(out, sid(Family::kac), 0.5, grid);
    CHECK(out.str().rfind("x,Psi,psi\n", 0) == 0);
    std::ostringstream line;
    write_solution_csv(line, sid(Family::arcsine_real), 0.5, grid);
    CHECK(line.str().rfind("x,density\n", 0) == 0);
    SolutionId bad = sid(Family::weyl, -1.0);
    CHECK_THROWS(write_solution_csv(out, bad, 0.5, grid));
}
