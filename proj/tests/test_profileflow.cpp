#include "doctest.h"

#include "rootflow/ensembles.hpp"
#include "rootflow/profileflow.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <sstream>

using namespace rootflow;
using doctest::Approx;

namespace {

RadialLaw circles(std::vector<double> r, std::vector<double> w) {
    RadialLaw law;
    law.radii = std::move(r);
    law.weights = std::move(w);
    return law;
}

RadialLaw power(double alpha) {
    RadialLaw law;
    law.kind = RadialKind::power_radial;
    law.alpha = alpha;
    return law;
}

std::vector<std::pair<double, double>> grid_below(double top) {
    std::vector<std::pair<double, double>> g;
    for (double x : {0.1, 0.2, 0.3, 0.4})
        for (double t : {0.2, 0.3, 0.4, 0.5, 0.6})
            if (x < (1.0 - t) * top - 0.01) g.push_back({x, t});
    return g;
}

}  // namespace

TEST_CASE("profiles of the initial laws") {
    const Profile kac = profile_from_cdf(law_cdf(circles({1.0}, {1.0})));
    for (const auto& node : kac.grid) CHECK(node.dminus == 0.0);
    CHECK(kac.plateaus.size() == 1);
    CHECK(kac.void_disk_log_radius == 0.0);

    const double third = 1.0 / 3.0;
    const Profile three = profile_from_cdf(law_cdf(circles({1, 2, 3}, {third, third, 1 - 2 * third})));
    for (double x = 0.01; x < 1.0; x += 0.01) {
        const double expect = x <= third ? 0.0 : x <= 2 * third ? std::log(2.0) : std::log(3.0);
        CHECK(three.dminus(x) == Approx(expect).epsilon(1e-15));
    }
    REQUIRE(three.plateaus.size() == 3);
    CHECK(three.plateaus[1].x_lo == Approx(third));
    CHECK(three.plateaus[1].value == Approx(std::log(2.0)));
    REQUIRE(three.jumps.size() == 2);
    CHECK(three.jumps[0].x == Approx(third));
    CHECK(three.jumps[0].dplus == Approx(std::log(2.0)));

    for (double a : {0.5, 2.0}) {
        const Profile w = profile_from_cdf(law_cdf(power(a)), 64);
        for (const auto& node : w.grid) CHECK(node.dminus == Approx(a * std::log(node.x)).epsilon(1e-13));
        CHECK(w.jumps.empty());
        CHECK(w.plateaus.empty());
    }
}

TEST_CASE("profile invariants: ordering and monotonicity") {
    const Profile p = profile_from_cdf(law_cdf(circles({0.5, 1.0, 4.0}, {0.2, 0.5, 0.3})), 512);
    for (double t : {0.0, 0.1, 0.45}) {
        const Profile q = flow_profile(p, t, 512);
        for (std::size_t i = 0; i < q.grid.size(); ++i) {
            CHECK(q.grid[i].dminus <= q.grid[i].dplus);
            if (i) CHECK(q.grid[i].dminus >= q.grid[i - 1].dplus);
        }
    }
}

TEST_CASE("atom at the origin is rejected") {
    RadialCDF bad = law_cdf(power(1.0));
    bad.cdf = [](double x) { return x < 0 ? 0.0 : 0.3 + 0.7 * std::min(x, 1.0); };
    CHECK_THROWS_AS(profile_from_cdf(bad), std::domain_error);
}

TEST_CASE("flow of the kac profile") {
    const Profile p = profile_from_cdf(law_cdf(circles({1.0}, {1.0})));
    const Profile q = flow_profile(p, 0.4, 128);
    for (const auto& node : q.grid) CHECK(node.dminus == Approx(std::log(node.x / (node.x + 0.4))).epsilon(1e-14));
    CHECK(q.grid.back().x == Approx(0.6));
    CHECK(std::isinf(q.dminus(0.0)));
    CHECK_THROWS(flow_profile(p, 1.0));
    CHECK_THROWS(flow_profile(p, -0.1));

    const Profile same = flow_profile(p, 0.0);
    REQUIRE(same.grid.size() == p.grid.size());
    for (std::size_t i = 0; i < p.grid.size(); ++i) CHECK(same.grid[i].dminus == p.grid[i].dminus);
}

TEST_CASE("flow dissolves plateaus into a strictly increasing profile") {
    const Profile p = profile_from_cdf(law_cdf(circles({1, 2, 3}, {0.25, 0.5, 0.25})), 2048);
    const Profile q = flow_profile(p, 0.3, 2048);
    for (std::size_t i = 1; i < q.grid.size(); ++i) CHECK(q.grid[i].dminus > q.grid[i - 1].dminus);
    // the jump at x0 = 0.75 moved to 0.45
    REQUIRE(q.jumps.size() == 1);
    CHECK(q.jumps[0].x == Approx(0.45));
    CHECK(q.jumps[0].dplus - q.jumps[0].dminus == Approx(std::log(1.5)));
}

TEST_CASE("cdf at time against closed forms") {
    const RadialCDF kac = law_cdf(circles({1.0}, {1.0}));
    const RadialCDF kt = cdf_at_time(kac, 0.3);
    CHECK(kt.mass == Approx(0.7));
    for (double x = 0.05; x < 0.7; x += 0.05) CHECK(kt.cdf(x) == Approx(x * 0.3 / (1.0 - x)).epsilon(1e-13));
    CHECK(kt.cdf(0.8) == Approx(0.7));

    const RadialCDF w1 = cdf_at_time(law_cdf(power(1.0)), 0.2);
    for (double x = 0.05; x < 0.8; x += 0.05) CHECK(w1.cdf(x) == Approx(x).epsilon(1e-13));

    const RadialCDF wh = cdf_at_time(law_cdf(power(0.5)), 0.25);
    CHECK(wh.cdf(0.5) == Approx((0.25 + std::sqrt(0.3125)) / 2.0).epsilon(1e-13));
    CHECK(wh.cdf(0.5) == Approx(0.4045085).epsilon(1e-7));

    CHECK_THROWS(cdf_at_time(kac, 1.0));
    CHECK_THROWS(cdf_at_time(kac, -0.2));
}

TEST_CASE("flowed cdf matches every catalogued family") {
    RadialLaw iu;
    iu.kind = RadialKind::interval_uniform;
    iu.r1 = 1.0;
    iu.r2 = 2.0;
    RadialLaw el;
    el.kind = RadialKind::elliptic_radial;
    el.alpha = 0.5;
    RadialLaw hy;
    hy.kind = RadialKind::hyperbolic_radial;
    hy.alpha = 0.5;
    for (const RadialLaw& law : {circles({1, 2, 3}, {0.3, 0.3, 0.4}), power(0.7), iu, el, hy}) {
        const RadialCDF psi0 = law_cdf(law);
        for (double t : {0.1, 0.45, 0.8}) {
            const RadialCDF pt = cdf_at_time(psi0, t);
            for (double x : {0.05, 0.2, 0.5, 0.9, 1.3, 2.2}) {
                if (law.kind == RadialKind::hyperbolic_radial && x >= 1.0) continue;
                const double ref = evaluate_radial(*psi0.family, x, t).Psi;
                CHECK(std::abs(pt.cdf(x) - ref) < 1e-10 * std::max(1.0, ref));
            }
        }
    }
}

TEST_CASE("density at time") {
    const RadialCDF kac = law_cdf(circles({1.0}, {1.0}));
    CHECK(density_at_time(kac, 0.5, 0.5) == Approx(2.0).epsilon(1e-14));
    CHECK(density_at_time(kac, 0.5, 0.5, false) == Approx(2.0).epsilon(1e-6));
    CHECK(density_at_time(kac, 0.5, 0.7, false) == 0.0);

    const RadialCDF w2 = law_cdf(power(2.0));
    CHECK(std::abs(density_at_time(w2, 0.2, 0.3, false) - 1.0 / std::sqrt(1.24)) < 1e-6);

    // total mass by quadrature of the finite-difference density
    for (double t : {0.2, 0.6}) {
        const double top = cdf_at_time(w2, t).support_max;
        const double m = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
            [&](double x) { return density_at_time(w2, t, x, false); }, 0.0, top, 8, 1e-10);
        CHECK(std::abs(m - (1.0 - t)) < 1e-6);
    }
}

TEST_CASE("features of a two-circle law") {
    const Profile p = profile_from_cdf(law_cdf(circles({1.0, 2.0}, {0.5, 0.5})));
    REQUIRE(p.jumps.size() == 1);
    CHECK(p.jumps[0].x == 0.5);
    CHECK(p.jumps[0].dminus == 0.0);
    CHECK(p.jumps[0].dplus == Approx(std::log(2.0)));

    const FeatureReport r0 = track_features(p, 0.0);
    CHECK(r0.void_disk_radius == 1.0);
    CHECK(r0.circles.size() == 2);

    for (double t : {0.01, 0.2, 0.4, 0.49}) {
        const FeatureReport r = track_features(p, t);
        REQUIRE(r.annuli.size() == 1);
        CHECK(r.annuli[0].r_minus == Approx((0.5 - t) / 0.5).epsilon(1e-14));
        CHECK(r.annuli[0].r_plus == Approx(2.0 * (0.5 - t) / 0.5).epsilon(1e-14));
        CHECK(std::abs(r.annuli[0].r_plus / r.annuli[0].r_minus - 2.0) < 1e-12);
        CHECK(r.circles.empty());
        CHECK(r.void_disk_radius == 0.0);
    }
    CHECK(track_features(p, 0.2).annuli[0].r_minus == Approx(0.6));
    CHECK(track_features(p, 0.4).annuli[0].r_plus == Approx(0.4));
    CHECK(track_features(p, 0.5).annuli.empty());
    CHECK(track_features(p, 0.7).annuli.empty());

    // features of a flowed profile are measured from its own base time
    const Profile q = flow_profile(p, 0.1);
    CHECK(track_features(q, 0.1).annuli[0].r_minus == Approx(0.6));

    // the flowed CDF is flat across the annulus
    const RadialCDF pt = cdf_at_time(p.base, 0.2);
    CHECK(pt.cdf(0.61) == Approx(0.3));
    CHECK(pt.cdf(1.19) == Approx(0.3));
    CHECK(pt.cdf(1.21) > 0.3);
}

TEST_CASE("radial equation residual") {
    const auto g = grid_below(1.0);
    CHECK(pde_check_profile(law_cdf(circles({1.0}, {1.0})), g) < 1e-6);
    CHECK(pde_check_profile(law_cdf(power(0.5)), g) < 1e-6);
    // x^3 on [0, 1], numerically flowed
    CHECK(pde_check_profile(law_cdf(power(1.0 / 3.0)), g, false) < 1e-4);
    const std::vector<std::pair<double, double>> outside{{-0.1, 0.3}};
    CHECK_THROWS_AS(pde_check_profile(law_cdf(power(0.5)), outside), std::domain_error);
}

TEST_CASE("semigroup, support, mass and inverse consistency") {
    for (const RadialLaw& law : {circles({1, 2, 3}, {0.2, 0.5, 0.3}), power(0.4), power(1.7)}) {
        const RadialCDF psi0 = law_cdf(law);
        const double v1 = std::log(psi0.quantile(1.0));
        for (auto [s, t] : {std::pair{0.1, 0.2}, std::pair{0.35, 0.3}, std::pair{0.05, 0.85}}) {
            const RadialCDF two = cdf_at_time(cdf_at_time(psi0, s), t);
            const RadialCDF one = cdf_at_time(psi0, s + t);
            for (double q = 0.01; q < one.mass; q += 0.013) CHECK(std::abs(two.quantile(q) - one.quantile(q)) < 1e-8);
            CHECK(one.support_max <= (1.0 - s - t) * std::exp(v1) * (1 + 1e-15));
            CHECK(std::abs(one.cdf(1e6) - (1.0 - s - t)) < 1e-10);
            for (double q = 0.01; q < one.mass; q += 0.017) CHECK(std::abs(one.cdf(one.quantile(q)) - q) < 1e-10);
        }
    }
}

TEST_CASE("cdf csv export") {
    std::ostringstream out;
    const std::vector<double> grid{0.1, 0.2, 0.3};
    write_cdf_csv(out, law_cdf(circles({1.0}, {1.0})), 0.5, grid);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "x,Psi,psi");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 3);
}
