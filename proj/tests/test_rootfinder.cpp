#include "doctest.h"

#include "rootflow/rootfinder.hpp"
#include "rootflow/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace rootflow;

namespace {

// max over a of min over b of |a - b|, symmetrized
double hausdorff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    auto one = [](const std::vector<cplx>& x, const std::vector<cplx>& y) {
        double worst = 0;
        for (const cplx& p : x) {
            double best = INFINITY;
            for (const cplx& q : y) best = std::min(best, std::abs(p - q));
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::max(one(a, b), one(b, a));
}

double min_separation(const std::vector<cplx>& r) {
    double m = INFINITY;
    for (std::size_t i = 0; i < r.size(); ++i)
        for (std::size_t j = i + 1; j < r.size(); ++j) m = std::min(m, std::abs(r[i] - r[j]));
    return m;
}

std::vector<cplx> circle_roots(std::size_t n, std::uint64_t seed) {
    const Philox g(seed);
    std::vector<cplx> r;
    for (std::size_t i = 0; i < n; ++i) r.push_back(std::polar(1.0, 2.0 * std::numbers::pi * g.uniform2(0, i).first));
    return r;
}

Poly poly_from_real(const std::vector<double>& c) {
    std::vector<XComplex> x;
    for (double v : c) x.emplace_back(v);
    return Poly(x);
}

Poly real_power(const std::vector<double>& roots, int n) {
    std::vector<cplx> all;
    for (int i = 0; i < n; ++i)
        for (double r : roots) all.emplace_back(r, 0.0);
    return from_roots(all);
}

}  // namespace

TEST_CASE("find_roots small examples") {
    const RootSet a = find_roots(poly_from_real({-1, 0, 1}));
    REQUIRE(a.converged);
    REQUIRE(a.roots.size() == 2);
    CHECK(hausdorff(a.roots, {1.0, -1.0}) < 1e-12);

    const RootSet c = find_roots(poly_from_real({-1, 0, 0, 1}), 1e-14);
    std::vector<cplx> cube;
    for (int k = 0; k < 3; ++k) cube.push_back(std::polar(1.0, 2.0 * std::numbers::pi * k / 3.0));
    CHECK(c.converged);
    CHECK(hausdorff(c.roots, cube) < 1e-12);
    for (double r : c.residual_log) CHECK(r < -30.0);

    const RootSet z = find_roots(poly_from_real({0, 0, 1, 1}));
    CHECK(z.origin_multiplicity == 2);
    CHECK(hausdorff(z.roots, {-1.0}) < 1e-12);
}

TEST_CASE("round trip on well-conditioned root sets") {
    SUBCASE("i.i.d. unit-circle zeros at moderate degree") {
        const auto r = circle_roots(40, 17);
        REQUIRE(min_separation(r) > 1e-3);
        const RootSet rs = find_roots(from_roots(r));
        CHECK(rs.converged);
        CHECK(hausdorff(rs.roots, r) < 1e-6);
    }
    SUBCASE("perturbed roots of unity at degree 500") {
        const Philox g(5);
        std::vector<cplx> r;
        const int n = 500;
        for (int k = 0; k < n; ++k) {
            const auto [u, v] = g.uniform2(0, static_cast<std::uint64_t>(k));
            r.push_back(std::polar(1.0 + 0.002 * (u - 0.5), 2.0 * std::numbers::pi * (k + 0.1 * (v - 0.5)) / n));
        }
        REQUIRE(min_separation(r) > 1e-3);
        const RootSet rs = find_roots(from_roots(r));
        CHECK(rs.converged);
        CHECK(hausdorff(rs.roots, r) < 1e-6);
    }
    SUBCASE("zeros of a degree-300 Kac polynomial") {
        const Philox g(8);
        std::vector<XComplex> c;
        for (int k = 0; k <= 300; ++k) {
            const auto [x, y] = g.normal2(0, static_cast<std::uint64_t>(k));
            c.emplace_back(cplx(x, y));
        }
        const RootSet first = find_roots(Poly(c), 1e-14);
        REQUIRE(first.converged);
        REQUIRE(min_separation(first.roots) > 1e-3);
        const RootSet again = find_roots(from_roots(first.roots));
        CHECK(again.converged);
        CHECK(hausdorff(again.roots, first.roots) < 1e-6);
    }
}

TEST_CASE("initial guesses follow the Newton polygon") {
    const Poly flat(std::vector<XComplex>(50, XComplex(1.0)));
    for (const cplx& z : initial_guesses(flat)) CHECK(std::abs(std::abs(z) - 1.0) < 1e-12);

    const auto g8 = initial_guesses(poly_from_real({-8, 0, 0, 1}));
    REQUIRE(g8.size() == 3);
    for (const cplx& z : g8) CHECK(std::abs(std::abs(z) - 2.0) < 1e-12);

    // three equally weighted circles of radii 1, 2, 3
    const Philox g(33);
    std::vector<cplx> roots;
    for (int k = 0; k < 300; ++k) {
        const double radius = 1.0 + k % 3;
        roots.push_back(std::polar(radius, 2.0 * std::numbers::pi * g.uniform2(0, static_cast<std::uint64_t>(k)).first));
    }
    auto guesses = initial_guesses(from_roots(roots));
    REQUIRE(guesses.size() == 300);
    std::sort(guesses.begin(), guesses.end(), [](cplx a, cplx b) { return std::abs(a) < std::abs(b); });
    // single polygon edges near the block boundaries stray far at this degree;
    // the typical radius of each third is what the polygon pins down
    for (int third = 0; third < 3; ++third) {
        const double median = std::abs(guesses[static_cast<std::size_t>(third * 100 + 50)]);
        CHECK(std::abs(median / (third + 1.0) - 1.0) < 0.15);
    }
}

TEST_CASE("find_real_roots") {
    const auto r = find_real_roots(poly_from_real({-1, 0, 1}), -2, 2);
    REQUIRE(r.size() == 2);
    CHECK(r[0] == doctest::Approx(-1.0).epsilon(1e-13));
    CHECK(r[1] == doctest::Approx(1.0).epsilon(1e-13));

    const Poly legendre = derivative(real_power({-1.0, 1.0}, 8), 8);
    const auto lr = find_real_roots(legendre, -1, 1);
    REQUIRE(lr.size() == 8);
    for (std::size_t i = 0; i < 8; ++i) CHECK(std::abs(lr[i] + lr[7 - i]) < 1e-12);
    const RootSet ab = find_roots(legendre, 1e-14);
    std::vector<cplx> lc(lr.begin(), lr.end());
    CHECK(hausdorff(ab.roots, lc) < 1e-10);

    const Poly q = derivative(real_power({0.0, -1.0}, 10), 10);
    const auto qr = find_real_roots(q, -1, 0);
    CHECK(qr.size() == 10);
    for (double x : qr) {
        CHECK(x > -1.0);
        CHECK(x < 0.0);
    }

    CHECK_THROWS(find_real_roots(poly_from_real({1, 0, 1}), -2, 2));
}

TEST_CASE("critical points interlace the zeros of real-rooted polynomials") {
    const Philox g(71);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<cplx> roots;
        const int n = 5 + trial;
        for (int k = 0; k < n; ++k) roots.emplace_back(2.0 * g.uniform2(trial, k).first - 1.0, 0.0);
        const Poly p = from_roots(roots);
        const auto crit = find_real_roots(derivative(p, 1), -1, 1);
        std::vector<double> zs;
        for (const cplx& z : roots) zs.push_back(z.real());
        std::sort(zs.begin(), zs.end());
        REQUIRE(crit.size() == zs.size() - 1);
        for (std::size_t i = 0; i + 1 < zs.size(); ++i) {
            CHECK(crit[i] > zs[i]);
            CHECK(crit[i] < zs[i + 1]);
        }
    }
}

TEST_CASE("find_roots is deterministic") {
    const Poly p = from_roots(circle_roots(60, 2));
    const RootSet a = find_roots(p), b = find_roots(p);
    CHECK(a.roots == b.roots);
    CHECK(a.iterations_used == b.iterations_used);
}
