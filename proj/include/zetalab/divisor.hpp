#pragma once

// Generalized divisor functions and the series F(sigma, omega):
//   d_k(n)      number of ordered k-tuples with product n (integer k),
//               built by iterated Dirichlet convolution of the ones function;
//   d_omega(n)  coefficient of n^{-s} in zeta^omega(s), multiplicative with
//               d_omega(p^a) = prod_{j<a} (omega+j) / a!;
//   F(sigma, omega) = sum_n d_omega(n)^2 / n^{2 sigma}.
//
// The F series converges like N^{1-2 sigma} times slowly-varying log powers,
// far too slowly to truncate blindly.  f_series therefore reports the partial
// sum together with a tail estimate (fitted log-power density, integrated
// past the horizon) and a tail bound obtained by bracketing the measured
// per-bin decay ratio against its pure-power limit 10^{-(2 sigma - 1)/4}.

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>

#include "zetalab/common.hpp"
#include "zetalab/special_fn.hpp"

namespace zetalab {

struct DivisorTable {
    double order = 1.0;        // omega
    uint32_t limit = 0;        // N
    std::vector<double> values;  // index 1..N; values[0] unused

    double at(uint32_t n) const { return values[n]; }
};

inline constexpr uint32_t kDivisorTableBudget = 1u << 25;  // entries per table
inline constexpr uint64_t kFactorizationBudget = 1'000'000'000'000ull;

// out[m] = sum_{d | m} a[d] * b[m/d], tables of equal limit
inline std::vector<double> dirichlet_convolve(const std::vector<double>& a,
                                              const std::vector<double>& b) {
    const uint32_t n = static_cast<uint32_t>(a.size()) - 1;
    std::vector<double> out(n + 1, 0.0);
    for (uint32_t d = 1; d <= n; ++d) {
        if (a[d] == 0.0) continue;
        for (uint32_t m = d, q = 1; m <= n; m += d, ++q) out[m] += a[d] * b[q];
    }
    return out;
}

inline DivisorTable sieve_dk(int k, uint32_t limit) {
    if (k < 1) throw std::domain_error("sieve_dk: k must be >= 1");
    if (limit < 1) throw std::domain_error("sieve_dk: limit must be >= 1");
    if (limit > kDivisorTableBudget)
        throw budget_error("sieve_dk: limit exceeds table budget");
    DivisorTable t;
    t.order = static_cast<double>(k);
    t.limit = limit;
    t.values.assign(limit + 1, 1.0);
    t.values[0] = 0.0;
    std::vector<double> ones(t.values);
    for (int step = 1; step < k; ++step) t.values = dirichlet_convolve(t.values, ones);
    return t;
}

// d_omega(p^a) = binom(omega + a - 1, a)
inline double prime_power_coeff(double omega, uint32_t a) {
    double v = 1.0;
    for (uint32_t j = 0; j < a; ++j) v *= (omega + j) / (j + 1);
    return v;
}

// multiplicative sieve; agrees with sieve_dk for integer omega and is the
// fast path used by f_series
inline DivisorTable sieve_d_omega(double omega, uint32_t limit) {
    if (!(omega > 0.0)) throw std::domain_error("sieve_d_omega: omega must be positive");
    if (limit > kDivisorTableBudget)
        throw budget_error("sieve_d_omega: limit exceeds table budget");
    auto spf_holder = detail::spf_table(limit);
    const auto& spf = *spf_holder;
    DivisorTable t;
    t.order = omega;
    t.limit = limit;
    t.values.assign(static_cast<size_t>(limit) + 1, 0.0);
    if (limit >= 1) t.values[1] = 1.0;
    for (uint32_t n = 2; n <= limit; ++n) {
        uint32_t p = spf[n];
        uint32_t m = n, a = 0;
        while (m % p == 0) {
            m /= p;
            ++a;
        }
        t.values[n] = t.values[m] * prime_power_coeff(omega, a);
    }
    return t;
}

inline double d_omega(double omega, uint64_t n) {
    if (!(omega > 0.0)) throw std::domain_error("d_omega: omega must be positive");
    if (n < 1) throw std::domain_error("d_omega: n must be >= 1");
    if (n > kFactorizationBudget)
        throw budget_error("d_omega: n exceeds factorization budget");
    double v = 1.0;
    uint64_t m = n;
    for (uint64_t p = 2; p * p <= m; p += (p == 2 ? 1 : 2)) {
        if (m % p) continue;
        uint32_t a = 0;
        while (m % p == 0) {
            m /= p;
            ++a;
        }
        v *= prime_power_coeff(omega, a);
    }
    if (m > 1) v *= omega;  // leftover prime, exponent 1
    return v;
}

// ---------------------------------------------------------------------
// F(sigma, omega)
// ---------------------------------------------------------------------

struct SeriesValue {
    double sigma = 0.0;
    double order = 0.0;
    uint32_t truncation = 0;
    double partial_sum = 0.0;
    double tail_estimate = 0.0;
    double tail_bound = 0.0;

    // reported value: partial sum corrected by the estimated tail, with
    // tail_bound as its uncertainty
    double value() const { return partial_sum + tail_estimate; }
};

namespace detail {

struct TailFit {
    double estimate = 0.0;
    double bound = 0.0;
};

// sum_{n>N} d^2(n) n^{-2 sigma}, estimated and bracketed from the last
// computed bins.  Bins are quarter-decades; the per-bin ratio of a pure
// n^{-2 sigma} density is rho_q = 10^{-(2 sigma - 1)/4}, and the measured
// last ratio drifts monotonically toward it, so the two bracket the tail.
inline TailFit estimate_tail(const DivisorTable& table, double sigma, uint32_t N) {
    const double alpha = 2.0 * sigma - 1.0;
    const double rho_q = std::pow(10.0, -alpha / 4.0);

    constexpr int kBins = 12;  // three decades
    double edge[kBins + 1];
    for (int j = 0; j <= kBins; ++j)
        edge[j] = static_cast<double>(N) * std::pow(10.0, -j / 4.0);

    double term_sum[kBins] = {0};    // sum of d^2 n^{-2 sigma} per bin
    double density_sum[kBins] = {0};  // sum of d^2 per bin
    for (int j = 0; j < kBins; ++j) {
        uint32_t hi = static_cast<uint32_t>(std::floor(edge[j]));
        uint32_t lo = static_cast<uint32_t>(std::floor(edge[j + 1])) + 1;
        for (uint32_t n = lo; n <= hi; ++n) {
            double d2 = table.values[n] * table.values[n];
            density_sum[j] += d2;
            term_sum[j] += d2 * std::pow(static_cast<double>(n), -2.0 * sigma);
        }
    }

    // fit density ~ C (ln x)^beta on the top two decades
    double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int j = 0; j < 8; ++j) {
        double width = edge[j] - edge[j + 1];
        if (density_sum[j] <= 0.0 || width <= 0.0) continue;
        double xc = std::sqrt(edge[j] * edge[j + 1]);
        double x = std::log(std::log(xc));
        double y = std::log(density_sum[j] / width);
        sw += 1;
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    double beta = 0.0, lnC = 0.0;
    double den = sw * sxx - sx * sx;
    if (sw >= 3 && std::abs(den) > 1e-12) {
        beta = (sw * sxy - sx * sy) / den;
        lnC = (sy - beta * sx) / sw;
    } else if (sw >= 1) {
        lnC = sy / sw;
    }
    const double C = std::exp(lnC);

    // integral of C (ln x)^beta x^{-2 sigma} over (N, inf); substituting
    // x = N e^{u/alpha} turns it into an e^{-u}-weighted 1-d integral
    const double lnN = std::log(static_cast<double>(N));
    double integral = 0.0;
    {
        const int M = 800;
        const double ulim = 46.0;
        const double h = ulim / M;
        auto g = [&](double u) { return std::exp(-u) * std::pow(lnN + u / alpha, beta); };
        double sum = g(0.0) + g(ulim);
        for (int i = 1; i < M; ++i) sum += (i % 2 ? 4.0 : 2.0) * g(i * h);
        integral = C * std::pow(static_cast<double>(N), -alpha) / alpha * (sum * h / 3.0);
    }
    // half-term correction for sum-vs-integral at the edge
    integral += 0.5 * C * std::pow(lnN, beta) * std::pow(static_cast<double>(N), -2.0 * sigma);

    // bracket from the measured decay ratio
    double r_now = rho_q;
    if (term_sum[1] > 0.0 && term_sum[2] > 0.0 && term_sum[0] > 0.0)
        r_now = std::sqrt(term_sum[0] / term_sum[2]);
    double lo_r = std::min(r_now, rho_q);
    double hi_r = std::max(r_now, rho_q);
    TailFit out;
    if (hi_r >= 0.995) {
        out.estimate = integral;
        out.bound = std::numeric_limits<double>::infinity();
        return out;
    }
    double floor_tail = term_sum[0] * lo_r / (1.0 - lo_r);
    double ceil_tail = term_sum[0] * hi_r / (1.0 - hi_r);
    out.estimate = std::clamp(integral, floor_tail, ceil_tail);
    out.bound = 1.25 * std::max(ceil_tail - out.estimate, out.estimate - floor_tail);
    return out;
}

inline const DivisorTable& shared_table(double omega, uint32_t min_limit) {
    static std::mutex mu;
    static std::map<double, std::shared_ptr<DivisorTable>> cache;
    std::lock_guard<std::mutex> lk(mu);
    auto it = cache.find(omega);
    if (it != cache.end() && it->second->limit >= min_limit) return *it->second;
    auto t = std::make_shared<DivisorTable>(sieve_d_omega(omega, min_limit));
    cache[omega] = t;
    return *t;
}

}  // namespace detail

// partial sum, tail estimate and tail bound at one fixed truncation
inline SeriesValue f_series_at(double sigma, double omega, uint32_t truncation) {
    if (!(sigma > 0.5 && sigma <= 1.0))
        throw std::domain_error("f_series: requires 1/2 < sigma <= 1");
    if (!(omega > 0.0)) throw std::domain_error("f_series: omega must be positive");
    if (truncation < 64) throw std::domain_error("f_series: truncation below 64");
    const DivisorTable& table = detail::shared_table(omega, truncation);
    double partial = 0.0;
    for (uint32_t n = 1; n <= truncation; ++n) {
        double d = table.values[n];
        partial += d * d * std::pow(static_cast<double>(n), -2.0 * sigma);
    }
    detail::TailFit tail = detail::estimate_tail(table, sigma, truncation);
    return SeriesValue{sigma, omega, truncation, partial, tail.estimate, tail.bound};
}

inline SeriesValue f_series(double sigma, double omega, double rel_tol,
                            uint32_t term_budget = 8'000'000, bool strict = false) {
    if (!(rel_tol > 0.0)) throw std::domain_error("f_series: rel_tol must be positive");
    term_budget = std::min(std::max(term_budget, 65536u), kDivisorTableBudget);

    SeriesValue best;
    for (uint32_t N = std::min<uint32_t>(65536, term_budget);; N = std::min(N * 2, term_budget)) {
        best = f_series_at(sigma, omega, N);
        if (best.tail_bound <= rel_tol * best.value()) return best;
        if (N >= term_budget) break;
    }
    if (strict)
        throw convergence_error("f_series: rel_tol unreachable within the term budget");
    return best;
}

inline void write_table_csv(const DivisorTable& t, std::ostream& os) {
    os << "n,d\n";
    char line[64];
    for (uint32_t n = 1; n <= t.limit; ++n) {
        std::snprintf(line, sizeof line, "%u,%.17g\n", n, t.values[n]);
        os << line;
    }
}

}  // namespace zetalab
