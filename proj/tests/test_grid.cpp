#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "zetalab/grid.hpp"

using namespace zetalab;
using Catch::Approx;

namespace {
// independent root refinement: plain bisection on theta
double bisect_theta(double phi, double lo, double hi) {
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        if (theta(mid) < phi) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}
}  // namespace

TEST_CASE("grid params derive H, lambda1 and the constraint flag") {
    GridParams p = GridParams::make(1e6, 0.43, 0.15, 0.75, 2, kPi / 2, 0.1);
    CHECK(p.H == Approx(std::pow(1e6, 0.43)));
    CHECK(p.lambda1() == Approx(0.5175).margin(1e-12));
    CHECK(p.constraint_chain_ok());  // 2*0.015 + 0.3 < 0.43
    GridParams preset = GridParams::preset("T1e6");
    CHECK_FALSE(preset.constraint_chain_ok());  // 0.66 > 0.5, flagged at desk scale
    CHECK(preset.H == Approx(1000.0));
    CHECK_THROWS_AS(GridParams::preset("T1e99"), std::domain_error);
    CHECK_THROWS_AS(GridParams::make(10.0, 0.5, 0.3, 0.75, 2, 1.0, 0.1), std::domain_error);
    CHECK_THROWS_AS(GridParams::make(1e6, 0.5, 0.3, 0.75, 2, 4.0, 0.1), std::domain_error);
}

TEST_CASE("first grid point is the classical one") {
    GridPoint g = solve_grid_point(0, 0.0);
    CHECK(g.t == Approx(17.8455995404108608).margin(1e-6));
    CHECK(g.residual <= 1e-9);
    // bisection oracle around it
    double t_b = bisect_theta(0.0, 15.0, 20.0);
    CHECK(g.t == Approx(t_b).margin(1e-9));
}

TEST_CASE("solver hits requested residual at large nu") {
    GridPoint g = solve_grid_point(1'000'000, 0.5);
    long double resid = std::abs(detail::theta_impl(static_cast<long double>(g.t)) -
                                 (kPiL * 1'000'000L + 0.5L));
    CHECK(static_cast<double>(resid) <= 1e-9);
}

TEST_CASE("solver domain errors") {
    CHECK_THROWS_AS(solve_grid_point(0, 4.0), std::domain_error);
    CHECK_THROWS_AS(solve_grid_point(-5, 0.0), std::domain_error);  // phi below theta(10)
}

TEST_CASE("adjacency identities across the tau wrap") {
    // theta targets: pi nu + pi = pi (nu+1) = pi (nu+2) - pi, so the full
    // wrap lands two indices ahead, and the half wrap one index ahead
    CHECK(solve_grid_point(100, kPi).t == Approx(solve_grid_point(102, -kPi).t).margin(1e-9));
    CHECK(solve_grid_point(100, kPi).t == Approx(solve_grid_point(101, 0.0).t).margin(1e-9));
    std::mt19937 rng(99);
    // keep t below ~8e6 so double rounding of t stays under 1e-9
    std::uniform_int_distribution<int64_t> unu(100, 17'000'000);
    for (int i = 0; i < 100; ++i) {
        int64_t nu = unu(rng);
        CHECK(std::abs(solve_grid_point(nu, kPi).t - solve_grid_point(nu + 2, -kPi).t) <= 1e-9);
        CHECK(std::abs(solve_grid_point(nu, kPi / 2).t -
                       solve_grid_point(nu + 1, -kPi / 2).t) <= 1e-9);
    }
}

TEST_CASE("enumeration count matches the main term within 2") {
    GridParams p = GridParams::preset("T1e6");
    auto grid = enumerate_grid(p, 0.0);
    double main = counting_main_term(p);
    CHECK(std::abs(static_cast<double>(grid.size()) - main) <= 2.0);
    // ~1906 points expected at T = 1e6, H = 1e3
    CHECK(grid.size() > 1900);
    CHECK(grid.size() < 1911);

    // membership cross-check at the edges: the anchor t_nu(0) lies inside,
    // the neighbours outside
    auto [nu_lo, nu_hi] = window_nu_range(p);
    CHECK(solve_grid_point(nu_lo, 0.0).t >= p.T);
    CHECK(solve_grid_point(nu_lo - 1, 0.0).t < p.T);
    CHECK(solve_grid_point(nu_hi, 0.0).t <= p.T + p.H);
    CHECK(solve_grid_point(nu_hi + 1, 0.0).t > p.T + p.H);
}

TEST_CASE("a shrinking window holds at most one point") {
    // H = T^epsilon -> 1+ as epsilon -> 0; at T = 1e3 the grid spacing
    // pi/theta' ~ 1.24 exceeds that, so the window catches 0 or 1 points
    GridParams p = GridParams::make(1e3, 0.001, 0.3, 0.75, 2, kPi / 2, 0.1);
    CHECK(p.H == Approx(std::pow(1e3, 0.001)));
    auto grid = enumerate_grid(p, 0.0);
    CHECK(grid.size() <= 1);
}

TEST_CASE("grid t values strictly increase and residuals stay small") {
    GridParams p = GridParams::preset("T1e5");
    auto grid = enumerate_grid(p, 0.3);
    REQUIRE(grid.size() > 100);
    for (size_t i = 0; i < grid.size(); ++i) {
        CHECK(grid[i].residual <= 1e-9);
        if (i) CHECK(grid[i].t > grid[i - 1].t);
    }
}

TEST_CASE("interval spacing follows 4x/ln(T/2pi)") {
    for (double x : {kPi / 4, kPi / 2}) {
        GridParams p = GridParams::make(1e6, 0.5, 0.3, 0.75, 2, x, 0.1);
        DisconnectedSet set = build_g_set(p);
        REQUIRE(!set.intervals.empty());
        const double expected = 4.0 * x / p.log_main();
        double maxdev = 0.0;
        for (const auto& [lo, hi] : set.intervals)
            maxdev = std::max(maxdev, std::abs((hi - lo) / expected - 1.0));
        CHECK(maxdev <= 1e-3);
        if (x == kPi / 4) {
            // ~0.2622 at T = 1e6; uniform to three significant digits
            CHECK(expected == Approx(0.26218).margin(5e-4));
        }
    }
}

TEST_CASE("intervals at x = pi/2 nearly abut") {
    GridParams p = GridParams::preset("T1e5");
    DisconnectedSet set = build_g_set(p);
    double gap_sum = 0.0, len_sum = 0.0;
    for (size_t i = 1; i < set.intervals.size(); ++i) {
        gap_sum += set.intervals[i].first - set.intervals[i - 1].second;
        len_sum += set.intervals[i].second - set.intervals[i].first;
    }
    CHECK(gap_sum / len_sum <= 0.1);
}

TEST_CASE("monotone nesting of G(x)") {
    GridParams p1 = GridParams::make(1e5, 0.5, 0.3, 0.75, 2, 0.5, 0.1);
    GridParams p2 = GridParams::make(1e5, 0.5, 0.3, 0.75, 2, 1.2, 0.1);
    DisconnectedSet a = build_g_set(p1), b = build_g_set(p2);
    REQUIRE(a.intervals.size() == b.intervals.size());
    for (size_t i = 0; i < a.intervals.size(); ++i) {
        CHECK(a.intervals[i].first >= b.intervals[i].first);
        CHECK(a.intervals[i].second <= b.intervals[i].second);
    }
}

TEST_CASE("measure approaches (2x/pi) H and vanishes with x") {
    GridParams p = GridParams::preset("T1e6");
    DisconnectedSet set = build_g_set(p);
    CHECK(measure(set) / p.H == Approx(1.0).margin(0.02));  // x = pi/2

    GridParams tiny = GridParams::make(1e6, 0.5, 0.3, 0.75, 2, 1e-6, 0.1);
    CHECK(measure(build_g_set(tiny)) < 1e-3);
    CHECK(measure(DisconnectedSet{}) == 0.0);
}

TEST_CASE("measure is additive under splitting the window") {
    GridParams whole = GridParams::preset("T1e5");
    double half_h = whole.H / 2;
    GridParams h1 = whole, h2 = whole;
    h1.H = half_h;
    h2.T = whole.T + half_h;
    h2.H = half_h;
    double m_whole = measure(build_g_set(whole));
    double m_halves = measure(build_g_set(h1)) + measure(build_g_set(h2));
    double one_len = 4.0 * whole.x / whole.log_main();
    CHECK(std::abs(m_whole - m_halves) <= one_len + 1e-9);
}
