#pragma once

// Dirichlet-polynomial approximation of zeta^k:
//   zeta^k(s) ~ sum_{n < cutoff} d_k(n) n^{-s},  cutoff = floor(T^delta),
// split into U_k + i V_k:
//   U_k = 1 + sum_{2 <= n < cutoff} d_k(n) n^{-sigma} cos(t ln n)
//   V_k =   - sum_{2 <= n < cutoff} d_k(n) n^{-sigma} sin(t ln n)
// plus measured stand-ins for the error exponents: residual scans against
// the Euler-Maclaurin evaluator and the explicit discard bound T^{-lambda_1},
// lambda_1 = 1 - delta - epsilon + delta sigma - delta eta.

#include <cmath>
#include <complex>
#include <span>

#include "zetalab/common.hpp"
#include "zetalab/divisor.hpp"
#include "zetalab/grid.hpp"
#include "zetalab/special_fn.hpp"

namespace zetalab {

struct DirichletApprox {
    int k = 1;
    double sigma = 0.75;
    uint32_t cutoff = 0;               // exclusive: terms 2 <= n < cutoff
    std::complex<double> value{1.0, 0.0};
    double u = 1.0;                    // U_k
    double v = 0.0;                    // V_k
};

inline DirichletApprox dirichlet_partial(int k, double sigma, double t, uint32_t cutoff,
                                         const DivisorTable& table,
                                         detail::DirichletSummer* ws = nullptr) {
    if (table.order != static_cast<double>(k))
        throw std::invalid_argument("dirichlet_partial: table order does not match k");
    if (cutoff >= 2 && table.limit < cutoff - 1)
        throw std::invalid_argument("dirichlet_partial: table too small for cutoff");
    if (!(sigma > 0.0)) throw std::domain_error("dirichlet_partial: sigma must be positive");

    double u = 1.0, v = 0.0;
    if (cutoff > 2) {
        if (ws && cutoff > 4096) {
            ws->fill(sigma, t, cutoff - 1);
            std::complex<double> p = ws->coeff_sum(table.values.data(), 2, cutoff);
            u += p.real();
            v += p.imag();
        } else {
            for (uint32_t n = 2; n < cutoff; ++n) {
                double c = table.values[n] * std::pow(static_cast<double>(n), -sigma);
                double ph = t * std::log(static_cast<double>(n));
                u += c * std::cos(ph);
                v -= c * std::sin(ph);
            }
        }
    }
    DirichletApprox a;
    a.k = k;
    a.sigma = sigma;
    a.cutoff = cutoff;
    a.u = u;
    a.v = v;
    a.value = {u, v};
    return a;
}

// ---------------------------------------------------------------------
// residual diagnostics: |zeta^k(s) - partial| sampled over a window
// ---------------------------------------------------------------------
struct ResidualDiagnostics {
    std::vector<std::pair<double, double>> samples;  // (t, residual)
    double fitted_exponent = 0.0;  // least-squares slope of -log r vs log t
    std::pair<double, double> window{0.0, 0.0};      // (T, H)
};

inline ResidualDiagnostics residual_scan(const GridParams& p, int sample_count,
                                         int threads = 0) {
    if (sample_count < 10)
        throw std::domain_error("residual_scan: sample_count must be >= 10");
    const uint32_t cutoff = p.poly_cutoff();
    const DivisorTable table = sieve_dk(p.k, std::max<uint32_t>(cutoff, 2));
    const double tol = p.T >= 5e6 ? 1e-6 : (p.T >= 5e5 ? 1e-7 : 1e-8);

    ResidualDiagnostics diag;
    diag.window = {p.T, p.H};
    diag.samples.resize(sample_count);
    parallel_for_chunks(sample_count, threads, [&](size_t b, size_t e) {
        detail::DirichletSummer ws;
        for (size_t i = b; i < e; ++i) {
            double t = p.T + (static_cast<double>(i) + 0.5) * p.H / sample_count;
            std::complex<double> z = zeta({p.sigma, t}, auto_precision(t, tol), &ws);
            std::complex<double> zk = z;
            for (int j = 1; j < p.k; ++j) zk *= z;
            DirichletApprox a = dirichlet_partial(p.k, p.sigma, t, cutoff, table, &ws);
            diag.samples[i] = {t, std::abs(zk - a.value)};
        }
    });

    double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [t, r] : diag.samples) {
        if (r <= 0.0) continue;
        double lx = std::log(t), ly = std::log(r);
        sw += 1;
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    double den = sw * sxx - sx * sx;
    diag.fitted_exponent = (std::abs(den) > 1e-12 && sw >= 3)
                               ? -(sw * sxy - sx * sy) / den
                               : 0.0;
    return diag;
}

// ladder fit: -slope of log(median residual) against log T across windows;
// a positive result is the desk-scale echo of lambda_2 > 0
inline double fit_residual_exponent(std::span<const ResidualDiagnostics> windows) {
    double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& d : windows) {
        std::vector<double> rs;
        rs.reserve(d.samples.size());
        for (const auto& [t, r] : d.samples)
            if (r > 0.0) rs.push_back(r);
        if (rs.empty()) continue;
        std::nth_element(rs.begin(), rs.begin() + rs.size() / 2, rs.end());
        double med = rs[rs.size() / 2];
        double lx = std::log(d.window.first), ly = std::log(med);
        sw += 1;
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    double den = sw * sxx - sx * sx;
    if (sw < 2 || std::abs(den) < 1e-12) return 0.0;
    return -(sw * sxy - sx * sy) / den;
}

// explicit bound T^{-lambda_1} for the discarded range T^delta <= n <= t^delta
inline double tail_term_bound(const GridParams& p) {
    const double l1 = p.lambda1();
    if (!(l1 > 0.0))
        throw std::domain_error("tail_term_bound: lambda_1 <= 0 (parameter regime)");
    return std::pow(p.T, -l1);
}

inline void write_residual_csv(std::span<const ResidualDiagnostics> windows, std::ostream& os) {
    os << "T,t,residual\n";
    char line[128];
    for (const auto& d : windows)
        for (const auto& [t, r] : d.samples) {
            std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g\n", d.window.first, t, r);
            os << line;
        }
}

}  // namespace zetalab
