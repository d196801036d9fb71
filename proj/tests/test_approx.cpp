#include <catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "zetalab/approx.hpp"

using namespace zetalab;
using Catch::Approx;

TEST_CASE("cutoff one keeps only the leading term") {
    DivisorTable t = sieve_dk(1, 2);
    DirichletApprox a = dirichlet_partial(1, 0.75, 123.4, 1, t);
    CHECK(a.value == std::complex<double>(1.0, 0.0));
    CHECK(a.u == 1.0);
    CHECK(a.v == 0.0);
}

TEST_CASE("u and v are exactly the parts of value") {
    DivisorTable t = sieve_dk(2, 200);
    for (double tt : {50.0, 500.0, 5000.0}) {
        DirichletApprox a = dirichlet_partial(2, 0.6, tt, 150, t);
        CHECK(a.u == a.value.real());
        CHECK(a.v == a.value.imag());
        // |partial|^2 = U^2 + V^2, the finite-cutoff pointwise identity
        CHECK(a.u * a.u + a.v * a.v == Approx(std::norm(a.value)).epsilon(1e-14));
    }
}

TEST_CASE("direct and sieve summation paths agree") {
    DivisorTable t = sieve_dk(2, 20000);
    detail::DirichletSummer ws;
    for (double tt : {300.0, 7000.0}) {
        DirichletApprox slow = dirichlet_partial(2, 0.75, tt, 20000, t);  // direct loop
        DirichletApprox fast = dirichlet_partial(2, 0.75, tt, 20000, t, &ws);
        CHECK(std::abs(slow.value - fast.value) < 1e-10);
    }
}

TEST_CASE("table mismatch errors") {
    DivisorTable t = sieve_dk(2, 50);
    CHECK_THROWS_AS(dirichlet_partial(3, 0.75, 10.0, 40, t), std::invalid_argument);
    CHECK_THROWS_AS(dirichlet_partial(2, 0.75, 10.0, 200, t), std::invalid_argument);
}

TEST_CASE("long polynomial tracks zeta itself") {
    // k = 1, sigma = 0.75, t = 1e4, cutoff = 1e4: the partial sum is within
    // a measured desk-scale residual of the reference evaluator
    DivisorTable t = sieve_dk(1, 10000);
    DirichletApprox a = dirichlet_partial(1, 0.75, 1e4, 10000, t);
    auto z = zeta({0.75, 1e4}, auto_precision(1e4, 1e-11));
    CHECK(std::abs(a.value - z) <= 0.05);
}

TEST_CASE("residual equals the classical Dirichlet tail") {
    const double sigma = 0.75, tt = 1e4;
    const uint32_t cutoff = 100;
    DivisorTable t = sieve_dk(1, cutoff);
    DirichletApprox a = dirichlet_partial(1, sigma, tt, cutoff, t);
    auto z = zeta({sigma, tt}, auto_precision(tt, 1e-11));
    const double residual = std::abs(z - a.value);
    CHECK(residual <= 10.0 * std::pow(static_cast<double>(cutoff), -sigma));

    // direct tail summation oracle: sum_{cutoff <= n <= M} n^{-s} plus the
    // Euler-Maclaurin continuation beyond M
    const std::complex<double> s(sigma, tt);
    std::complex<double> tail = 0.0;
    const uint32_t M = 60000;
    for (uint32_t n = cutoff; n <= M; ++n)
        tail += std::exp(-s * std::log(static_cast<double>(n)));
    const double lnM = std::log(static_cast<double>(M));
    tail += std::exp((1.0 - s) * lnM) / (s - 1.0) - 0.5 * std::exp(-s * lnM) +
            (1.0 / 12.0) * s * std::exp(-s * lnM) / static_cast<double>(M);
    CHECK(residual == Approx(std::abs(tail)).margin(1e-6));
}

TEST_CASE("square of the k=1 polynomial matches the k=2 polynomial defect") {
    for (uint32_t cutoff : {8u, 16u, 32u}) {
        DivisorTable d1 = sieve_dk(1, cutoff);
        DivisorTable d2 = sieve_dk(2, cutoff);
        const double tt = 1000.0;
        auto z = zeta({0.75, tt}, auto_precision(tt, 1e-12));
        auto z2 = z * z;
        double r2 = std::abs(z2 - dirichlet_partial(2, 0.75, tt, cutoff, d2).value);
        auto p1 = dirichlet_partial(1, 0.75, tt, cutoff, d1).value;
        double rsq = std::abs(z2 - p1 * p1);
        CHECK(r2 <= 2.0 * rsq);
        CHECK(rsq <= 2.0 * r2);
    }
}

TEST_CASE("k=2 polynomial equals the product-restricted Cauchy square") {
    // d_2 = 1 * 1: sum_{n<N} d_2(n) n^{-s} = sum_{ab<N} (ab)^{-s}, exactly
    const uint32_t N = 100;
    DivisorTable d2 = sieve_dk(2, N);
    const std::complex<double> s(0.75, 321.0);
    std::complex<double> brute = 0.0;
    for (uint32_t a = 1; a < N; ++a)
        for (uint32_t b = 1; static_cast<uint64_t>(a) * b < N; ++b)
            brute += std::exp(-s * std::log(static_cast<double>(a) * b));
    auto poly = dirichlet_partial(2, 0.75, 321.0, N, d2).value;
    CHECK(std::abs(poly - brute) < 1e-11);
}

TEST_CASE("residual scan fits a positive decay exponent across the ladder") {
    // the k=2 decay exponent is ~0.02 at this delta; 512 samples per window
    // keep the median noise well below the signal
    std::vector<ResidualDiagnostics> k1, k2;
    for (double T : {1e4, 1e5, 1e6, 1e7}) {
        GridParams p1 = GridParams::make(T, T < 5e6 ? 0.5 : 0.35, 0.3, 0.75, 1, kPi / 2, 0.1);
        GridParams p2 = p1;
        p2.k = 2;
        k1.push_back(residual_scan(p1, 512));
        k2.push_back(residual_scan(p2, 512));
    }
    auto median = [](const ResidualDiagnostics& d) {
        std::vector<double> rs;
        for (auto& [t, r] : d.samples) rs.push_back(r);
        std::nth_element(rs.begin(), rs.begin() + rs.size() / 2, rs.end());
        return rs[rs.size() / 2];
    };
    // decay of the medians across three decades of T
    CHECK(median(k1.back()) < median(k1.front()));
    CHECK(median(k2.back()) < median(k2.front()));
    CHECK(fit_residual_exponent(k1) > 0.0);
    CHECK(fit_residual_exponent(k2) > 0.0);
    CHECK_THROWS_AS(residual_scan(GridParams::preset("T1e4"), 5), std::domain_error);
}

TEST_CASE("tail term bound arithmetic") {
    GridParams p = GridParams::make(1e6, 0.43, 0.15, 0.75, 2, kPi / 2, 0.1);
    CHECK(p.lambda1() == Approx(1.0 - 0.15 - 0.43 + 0.1125 - 0.015).margin(1e-15));
    CHECK(std::log10(tail_term_bound(p)) == Approx(-3.105).margin(1e-12));

    // lambda_1 decreases in epsilon
    GridParams q = GridParams::make(1e6, 0.50, 0.15, 0.75, 2, kPi / 2, 0.1);
    CHECK(q.lambda1() < p.lambda1());

    GridParams bad = GridParams::make(1e6, 0.9, 0.8, 0.75, 2, kPi / 2, 0.4);
    CHECK(bad.lambda1() < 0.0);
    CHECK_THROWS_AS(tail_term_bound(bad), std::domain_error);
}

TEST_CASE("discarded range stays below ten times the bound") {
    // delta = 0.5 makes the discard range [T^d, t^d] actually contain an
    // integer; the explicit bound still dominates the sampled sums
    GridParams p = GridParams::make(1e6, 0.5, 0.5, 0.75, 2, kPi / 2, 0.1);
    DivisorTable t = sieve_dk(2, 1200);
    const double bound = tail_term_bound(p);
    for (double tt : {1e6 + 100.0, 1e6 + 500.0, 1e6 + 999.0}) {
        const double lo = std::pow(p.T, p.delta), hi = std::pow(tt, p.delta);
        std::complex<double> s(p.sigma, tt);
        std::complex<double> acc = 0.0;
        for (uint32_t n = static_cast<uint32_t>(std::ceil(lo));
             n <= static_cast<uint32_t>(std::floor(hi)); ++n)
            acc += t.values[n] * std::exp(-s * std::log(static_cast<double>(n)));
        CHECK(std::abs(acc) <= 10.0 * bound);
    }
}
