#include "doctest.h"

#include "rootflow/closedforms.hpp"
#include "rootflow/realline.hpp"
#include "rootflow/rng.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <numbers>

using namespace rootflow;
using doctest::Approx;

namespace {

RealMeasure two_atoms(double m1, double m2) {
    const std::vector<double> loc{0.0, -1.0}, mass{m1, m2};
    return atoms_measure(loc, mass);
}

// the quadratic-root closed form of G_t for x > 0
double g_two_atom(double x, double t, double m1, double m2) {
    const double M = m1 + m2, q = t - m1 - x * M;
    return (m1 - t + x * (M - 2 * t) + std::sqrt(q * q + 4 * x * t * m2)) / (2 * x * (1 + x));
}

}  // namespace

TEST_CASE("cauchy transform") {
    const RealMeasure mu = two_atoms(1.0, 3.0);
    for (double x : {0.5, 2.0, -2.5}) CHECK(cauchy_transform(mu, x).real() == Approx(1.0 / x + 3.0 / (x + 1.0)).epsilon(1e-15));
    CHECK(std::abs(1e4 * cauchy_transform(mu, 1e4).real() - 4.0) < 1e-3);
    CHECK_THROWS_AS(cauchy_transform(mu, 0.0), std::domain_error);

    const RealMeasure arc = arcsine_measure(-1.0, 1.0);
    CHECK(cauchy_transform(arc, 2.0).real() == Approx(1.0 / std::sqrt(3.0)).epsilon(1e-10));
    CHECK(std::abs(1e4 * cauchy_transform(arc, 1e4).real() - 1.0) < 1e-3);
    CHECK_THROWS_AS(cauchy_transform(arc, 0.3), std::domain_error);
    const cplx z(0.3, 0.2);
    CHECK(std::abs(cauchy_transform(arc, z) - 1.0 / (std::sqrt(z - 1.0) * std::sqrt(z + 1.0))) < 1e-10);
    CHECK(std::abs(cauchy_derivative(arc, z) + z / std::pow(std::sqrt(z - 1.0) * std::sqrt(z + 1.0), 3)) < 1e-9);
}

TEST_CASE("density measure mass") {
    const RealMeasure semi =
        density_measure(-2.0, 2.0, [](double u) { return std::sqrt(std::max(0.0, 4 - u * u)) / (2 * std::numbers::pi); });
    boost::math::quadrature::tanh_sinh<double> q;
    const double direct = q.integrate([](double u) { return std::sqrt(4 - u * u) / (2 * std::numbers::pi); }, -2.0, 2.0);
    CHECK(std::abs(semi.total_mass() - direct) < 1e-10);
    CHECK(semi.total_mass() == Approx(1.0).epsilon(1e-12));
    // Wigner law has G(z) = (z - sqrt(z^2 - 4)) / 2
    CHECK(cauchy_transform(semi, 3.0).real() == Approx((3.0 - std::sqrt(5.0)) / 2).epsilon(1e-10));
}

TEST_CASE("w0 inverts y = w G(w)") {
    const RealMeasure mu = two_atoms(1.0, 1.0);
    CHECK(w0(mu, 1.5) == Approx(1.0).epsilon(1e-14));
    for (double y = 1.01; y < 1.995; y += 0.01) CHECK(std::abs(w0(mu, y) - (y - 1.0) / (2.0 - y)) < 1e-10);
    const RealMeasure uneven = two_atoms(1.0, 4.0);
    for (double y : {1.1, 2.5, 4.9}) CHECK(w0(uneven, y) == Approx((y - 1.0) / (5.0 - y)).epsilon(1e-12));
    CHECK_THROWS(w0(mu, 1.0));
    CHECK_THROWS(w0(mu, 2.0));
    // increasing in y, unbounded as y reaches m
    CHECK(w0(mu, 1.999999) > 1e5);
}

TEST_CASE("G_t of the two-atom law") {
    const RealMeasure mu = two_atoms(1.0, 4.0);
    CHECK(g_at_time(mu, 0.0, 0.7).real() == cauchy_transform(mu, 0.7).real());
    CHECK(std::abs(1e4 * g_at_time(mu, 2.0, 1e4).real() - 3.0) < 1e-3);

    const RealMeasure sym = two_atoms(1.0, 1.0);
    CHECK(g_at_time(sym, 1.0, 1.0).real() == Approx(std::sqrt(8.0) / 4.0).epsilon(1e-12));
    CHECK(g_at_time_w(sym, 1.0, 1.0) == Approx(std::sqrt(8.0) / 4.0).epsilon(1e-10));

    for (double t : {0.3, 1.0, 2.5, 4.5})
        for (double x : {0.05, 0.4, 2.0, 30.0}) {
            const double ref = g_two_atom(x, t, 1.0, 4.0);
            CHECK(g_at_time(mu, t, x).real() == Approx(ref).epsilon(1e-11));
            CHECK(g_at_time_w(mu, t, x) == Approx(ref).epsilon(1e-9));
        }
    // between the atoms, outside the band
    const TwoAtomValue v = two_atom_real(0.0, 0.3, 1.0, 4.0);
    CHECK(std::isfinite(g_at_time(mu, 0.3, 0.5 * (v.x_plus + 0.0)).real()));
    CHECK_THROWS_AS(g_at_time(mu, 0.3, 0.5 * (v.x_minus + v.x_plus)), std::domain_error);
    CHECK_THROWS(g_at_time(mu, 5.0, 1.0));
    CHECK_THROWS(g_at_time_w(mu, 1.0, -0.5));
}

TEST_CASE("G_t at large x carries the remaining mass") {
    const RealMeasure arc = arcsine_measure(-1.0, 1.0);
    for (const RealMeasure& mu : {two_atoms(1.0, 4.0), arc}) {
        const double m = mu.total_mass(), x = 100.0 * (std::abs(mu.a) + std::abs(mu.b));
        for (double f : {0.1, 0.5, 0.9}) {
            const double t = f * m;
            CHECK(std::abs(x * g_at_time(mu, t, x).real() / (m - t) - 1.0) < 0.01);
        }
    }
}

TEST_CASE("Herglotz property on random points") {
    const RealMeasure arc = arcsine_measure(-1.0, 1.0);
    const Philox rng(5);
    for (const RealMeasure& mu : {two_atoms(1.0, 4.0), arc}) {
        for (std::uint64_t i = 0; i < 40; ++i) {
            const auto [u, v] = rng.uniform2(0, i);
            const cplx z(4.0 * u - 2.5, std::pow(10.0, -6.0 + 6.0 * v));
            const double t = mu.total_mass() * rng.uniform2(1, i).first * 0.95;
            CHECK(g_at_time(mu, t, z).imag() < 0.0);
            CHECK(std::abs(g_at_time(mu, t, std::conj(z)) - std::conj(g_at_time(mu, t, z))) == 0.0);
        }
    }
}

TEST_CASE("Stieltjes inversion") {
    const RealMeasure dirac = atoms_measure(std::vector<double>{0.0}, std::vector<double>{1.0});
    const auto G0 = [&](cplx z) { return cauchy_transform(dirac, z); };
    const std::vector<double> at0{0.0};
    CHECK(stieltjes_invert(G0, at0, 0.01, false)[0] == Approx(100.0 / std::numbers::pi).epsilon(1e-14));
    CHECK_THROWS(stieltjes_invert(G0, at0, 0.0));

    const RealMeasure sym = two_atoms(1.0, 1.0);
    std::vector<double> grid;
    for (double x = -0.9; x <= -0.1 + 1e-12; x += 0.05) grid.push_back(x);
    const auto rho = stieltjes_invert([&](cplx z) { return g_at_time(sym, 1.0, z); }, grid, 1e-6);
    for (std::size_t i = 0; i < grid.size(); ++i) CHECK(std::abs(rho[i] - two_atom_real(grid[i], 1.0, 1.0, 1.0).density) < 1e-3);

    const RealMeasure arc = arcsine_measure(-1.0, 1.0);
    const double s = 0.5, edge = std::sqrt(1 - s * s), guard = 10.0 * std::sqrt(1e-6);
    std::vector<double> inner;
    for (double x = -edge + guard; x < edge - guard; x += 0.04) inner.push_back(x);
    const auto ra = stieltjes_invert([&](cplx z) { return g_at_time(arc, s, z); }, inner, 1e-6);
    for (std::size_t i = 0; i < inner.size(); ++i) CHECK(std::abs(ra[i] - arcsine_real(inner[i], s)) < 1e-3);
}

TEST_CASE("boundary density from subordination matches closed forms") {
    const RealMeasure mu = two_atoms(1.0, 4.0);
    for (double t : {0.5, 2.0, 4.0}) {
        const TwoAtomValue v = two_atom_real(0.0, t, 1.0, 4.0);
        for (double f = 0.05; f < 1.0; f += 0.1) {
            const double x = v.x_minus + f * (v.x_plus - v.x_minus);
            CHECK(line_density(mu, t, x) == Approx(two_atom_real(x, t, 1.0, 4.0).density).epsilon(1e-8));
        }
        CHECK(line_density(mu, t, v.x_plus + 0.01) == 0.0);
    }
    const RealMeasure arc = arcsine_measure(-1.0, 1.0);
    for (double x : {-0.8, -0.3, 0.0, 0.5}) CHECK(line_density(arc, 0.4, x) == Approx(arcsine_real(x, 0.4)).epsilon(1e-8));
}

TEST_CASE("support bands") {
    const RealMeasure mu = two_atoms(1.0, 4.0);
    for (double t : {0.3, 1.0, 2.0, 4.2}) {
        const auto bands = support_bands(mu, t);
        const TwoAtomValue v = two_atom_real(0.0, t, 1.0, 4.0);
        REQUIRE(bands.size() == 1);
        CHECK(bands[0].first == Approx(v.x_minus).epsilon(1e-9));
        CHECK(bands[0].second == Approx(v.x_plus).epsilon(1e-9));
    }
    const auto arc = support_bands(arcsine_measure(-1.0, 1.0), 0.6);
    REQUIRE(arc.size() == 1);
    CHECK(arc[0].second == Approx(0.8).epsilon(1e-9));
    CHECK(arc[0].first == Approx(-0.8).epsilon(1e-9));

    // translating the initial law translates the bands
    for (double c : {3.0, -7.5}) {
        const auto moved = support_bands(shifted(mu, c), 2.0);
        const auto base = support_bands(mu, 2.0);
        REQUIRE(moved.size() == 1);
        CHECK(std::abs(moved[0].first - base[0].first - c) < 1e-12 * (1 + std::abs(c)));
        CHECK(std::abs(moved[0].second - base[0].second - c) < 1e-12 * (1 + std::abs(c)));
    }
}

TEST_CASE("atom recovery") {
    const RealMeasure mu = two_atoms(1.0, 4.0);
    const std::vector<double> poles{0.0, -1.0};
    auto atoms_at = [&](double t) { return atom_recovery([&](cplx z) { return g_at_time(mu, t, z); }, poles); };

    const auto half = atoms_at(0.5);
    REQUIRE(half.size() == 2);
    CHECK(half[0].mass == Approx(0.5).epsilon(1e-6));
    CHECK(half[1].mass == Approx(3.5).epsilon(1e-6));

    const auto at_m1 = atoms_at(1.0);
    REQUIRE(at_m1.size() == 1);
    CHECK(at_m1[0].x == -1.0);
    CHECK(at_m1[0].mass == Approx(3.0).epsilon(1e-6));

    const auto start = atoms_at(0.0);
    REQUIRE(start.size() == 2);
    CHECK(std::abs(start[0].mass - 1.0) < 1e-6);
    CHECK(std::abs(start[1].mass - 4.0) < 1e-6);
}

TEST_CASE("mass of the inverted density") {
    const RealMeasure mu = two_atoms(1.0, 4.0);
    const double t = 0.5, y = 1e-6;
    boost::math::quadrature::tanh_sinh<double> q;
    auto rho = [&](double x) { return -g_at_time(mu, t, cplx(x, y)).imag() / std::numbers::pi; };
    // split at the atoms and the band edges
    const TwoAtomValue v = two_atom_real(0.0, t, 1.0, 4.0);
    const std::vector<double> cuts{-3.0, -1.0, v.x_minus, v.x_plus, 0.0, 2.0};
    double mass = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) mass += q.integrate(rho, cuts[i], cuts[i + 1]);
    CHECK(std::abs(mass - (5.0 - t)) < 1e-3);
}

TEST_CASE("R-transform") {
    const RealMeasure dirac = atoms_measure(std::vector<double>{0.0}, std::vector<double>{1.0});
    for (double lam : {0.01, 0.3, 2.0}) CHECK(std::abs(r_transform(dirac, lam)) < 1e-12);
    const RealMeasure shifted_dirac = atoms_measure(std::vector<double>{2.0}, std::vector<double>{3.0});
    CHECK(r_transform(shifted_dirac, 0.25) == Approx(2.0 * 0.25 + 3.0 - 1.0).epsilon(1e-12));

    const RealMeasure bern = two_atoms(0.5, 0.5);
    std::vector<double> R;
    for (double lam = 0.01; lam <= 0.4 + 1e-12; lam += 0.01) R.push_back(r_transform(bern, lam));
    for (double r : R) CHECK(std::isfinite(r));
    for (std::size_t i = 2; i < R.size(); ++i) CHECK(std::abs(R[i] - 2 * R[i - 1] + R[i - 2]) < 1e-3);
    // analytic at 0: quadratic extrapolation from 2h, 3h, 4h predicts h
    const double h = 0.01;
    const double pred = 3 * r_transform(bern, 2 * h) - 3 * r_transform(bern, 3 * h) + r_transform(bern, 4 * h);
    CHECK(std::abs(pred - r_transform(bern, h)) < 1e-6);
    CHECK_THROWS(r_transform(bern, -0.1));
    CHECK_THROWS(r_transform(arcsine_measure(-1, 1), 0.0));
}

TEST_CASE("free convolution power") {
    std::vector<double> lambdas;
    for (double lam = 0.01; lam <= 0.2 + 1e-12; lam += 0.01) lambdas.push_back(lam);
    CHECK(free_power_check(two_atoms(0.5, 0.5), 0.5, lambdas) < 1e-5);
    CHECK(free_power_check(two_atoms(0.2, 0.8), 0.3, lambdas) < 1e-5);
    CHECK(free_power_check(two_atoms(0.5, 0.5), 1e-6, lambdas) < 1e-5);
    CHECK(free_power_check(arcsine_measure(-1.0, 1.0), 0.5, lambdas) < 1e-4);
    CHECK_THROWS(free_power_check(two_atoms(1.0, 1.0), 0.5, lambdas));
}
