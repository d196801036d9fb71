#pragma once

// The theta grid: roots of theta(t_nu(tau)) = pi nu + tau, windows
// [T, T+H] with H = T^epsilon, and the disconnected sets
//   G(x) = union over window of (t_nu(-x), t_nu(x)),  0 < x <= pi/2.
//
// Window membership is anchored at tau = 0 (t_nu in [T, T+H]); the points
// t_nu(tau) of a member may protrude past the window edge by up to
// ~pi / theta'(T).

#include <cmath>
#include <string_view>
#include <utility>

#include "zetalab/common.hpp"
#include "zetalab/special_fn.hpp"

namespace zetalab {

struct GridParams {
    double T = 1e6;
    double epsilon = 0.5;
    double H = 1e3;  // T^epsilon, derived
    double delta = 0.3;
    double sigma = 0.75;
    int k = 2;
    double x = kPi / 2;
    double eta = 0.1;

    double lambda1() const { return 1.0 - delta - epsilon + delta * sigma - delta * eta; }
    // the paper's constraint chain; usually violated at desk scale and flagged
    bool constraint_chain_ok() const { return 2.0 * delta * eta + 2.0 * delta < epsilon; }
    uint32_t poly_cutoff() const { return static_cast<uint32_t>(std::floor(std::pow(T, delta))); }
    double log_main() const { return std::log(T / kTwoPi); }  // ln(T/2pi)

    static GridParams make(double T, double epsilon, double delta, double sigma, int k,
                           double x, double eta) {
        if (!(T >= 1e3)) throw std::domain_error("GridParams: T must be >= 1e3");
        if (!(epsilon > 0.0 && epsilon < 1.0))
            throw std::domain_error("GridParams: epsilon must lie in (0,1)");
        if (!(delta > 0.0 && delta < 1.0))
            throw std::domain_error("GridParams: delta must lie in (0,1)");
        if (!(sigma > 0.5 && sigma < 1.0))
            throw std::domain_error("GridParams: sigma must lie in (1/2,1)");
        if (!(x > 0.0 && x <= kPi / 2))
            throw std::domain_error("GridParams: x must lie in (0, pi/2]");
        if (!(eta > 0.0)) throw std::domain_error("GridParams: eta must be positive");
        if (k < 1) throw std::domain_error("GridParams: k must be >= 1");
        GridParams p{T, epsilon, std::pow(T, epsilon), delta, sigma, k, x, eta};
        return p;
    }

    // desk-scale presets; delta = 0.3 keeps >= 30 Dirichlet terms everywhere,
    // and T1e7 narrows epsilon to keep zeta work affordable
    static GridParams preset(std::string_view name) {
        if (name == "T1e4") return make(1e4, 0.5, 0.3, 0.75, 2, kPi / 2, 0.1);
        if (name == "T1e5") return make(1e5, 0.5, 0.3, 0.75, 2, kPi / 2, 0.1);
        if (name == "T1e6") return make(1e6, 0.5, 0.3, 0.75, 2, kPi / 2, 0.1);
        if (name == "T1e7") return make(1e7, 0.35, 0.3, 0.75, 2, kPi / 2, 0.1);
        throw std::domain_error("GridParams: unknown preset '" + std::string(name) + "'");
    }
};

struct GridPoint {
    int64_t nu = 0;
    double tau = 0.0;
    double t = 0.0;
    double residual = 0.0;  // |theta(t) - (pi nu + tau)|
};

// ---------------------------------------------------------------------
// root solve: Newton with theta' and a maintained bracket, seeded by
// fixed-point iteration of t -> 2 (phi + t/2 + pi/8) / ln(t/2pi)
// ---------------------------------------------------------------------
inline GridPoint solve_grid_point(int64_t nu, double tau) {
    if (!(tau >= -kPi && tau <= kPi))
        throw std::domain_error("solve_grid_point: tau must lie in [-pi, pi]");
    const long double phi = kPiL * static_cast<long double>(nu) + static_cast<long double>(tau);
    const long double theta10 = detail::theta_impl(10.0L);
    if (!(phi >= theta10))
        throw std::domain_error("solve_grid_point: pi*nu + tau below theta(10)");

    long double t0 = 20.0L;
    for (int i = 0; i < 3; ++i) {
        long double ln = std::log(t0 / kTwoPiL);
        if (ln < 0.3L) ln = 0.3L;
        t0 = 2.0L * (phi + t0 / 2 + kPiL / 8) / ln;
        if (t0 < 12.0L) t0 = 12.0L;
    }

    long double lo = std::max(10.0L, t0 / 2), hi = 2 * t0;
    auto f = [&](long double t) { return detail::theta_impl(t) - phi; };
    long double flo = f(lo), fhi = f(hi);
    for (int i = 0; i < 80 && flo > 0.0L; ++i) {
        hi = lo;
        lo = std::max(10.0L, lo / 2);
        flo = f(lo);
        if (lo == 10.0L && flo > 0.0L) throw convergence_error("solve_grid_point: no lower bracket");
    }
    for (int i = 0; i < 80 && fhi < 0.0L; ++i) {
        lo = hi;
        hi *= 2;
        fhi = f(hi);
    }
    if (!(flo <= 0.0L && fhi >= 0.0L))
        throw convergence_error("solve_grid_point: bracketing failed");

    const long double tol = std::max(1e-11L, std::abs(phi) * 5e-18L);
    long double t = std::clamp(t0, lo, hi);
    long double ft = f(t);
    bool done = false;
    for (int it = 0; it < 100; ++it) {
        if (std::abs(ft) <= tol) {
            done = true;
            break;
        }
        if (ft > 0.0L) hi = t;
        else lo = t;
        long double dt = ft / theta_deriv_ext(std::max(t, 10.5L));
        long double next = t - dt;
        if (!(next > lo && next < hi)) next = (lo + hi) / 2;  // bisection fallback
        if (next == t) {
            done = std::abs(ft) <= 4 * tol;
            break;
        }
        t = next;
        ft = f(t);
    }
    if (!done) throw convergence_error("solve_grid_point: Newton/bisection did not converge");

    GridPoint g;
    g.nu = nu;
    g.tau = tau;
    g.t = static_cast<double>(t);
    g.residual = static_cast<double>(std::abs(ft));
    return g;
}

// ---------------------------------------------------------------------
// enumeration over a window; membership by the tau = 0 anchor
// ---------------------------------------------------------------------
inline std::pair<int64_t, int64_t> window_nu_range(const GridParams& p) {
    long double lo = detail::theta_impl(static_cast<long double>(p.T)) / kPiL;
    long double hi = detail::theta_impl(static_cast<long double>(p.T) +
                                        static_cast<long double>(p.H)) / kPiL;
    return {static_cast<int64_t>(std::ceil(lo)), static_cast<int64_t>(std::floor(hi))};
}

inline std::vector<GridPoint> enumerate_grid(const GridParams& p, double tau, int threads = 0) {
    auto [nu_lo, nu_hi] = window_nu_range(p);
    if (nu_hi < nu_lo) return {};
    const size_t count = static_cast<size_t>(nu_hi - nu_lo + 1);
    std::vector<GridPoint> out(count);
    parallel_for_chunks(count, threads, [&](size_t b, size_t e) {
        for (size_t i = b; i < e; ++i) out[i] = solve_grid_point(nu_lo + static_cast<int64_t>(i), tau);
    });
    return out;
}

// predicted count, Eq.-style main term (1/2pi) H ln(T/2pi)
inline double counting_main_term(const GridParams& p) { return p.H * p.log_main() / kTwoPi; }

// ---------------------------------------------------------------------
// G(x)
// ---------------------------------------------------------------------
struct DisconnectedSet {
    std::vector<std::pair<double, double>> intervals;  // (t_nu(-x), t_nu(x)), ordered
    GridParams params;
};

inline DisconnectedSet build_g_set(const GridParams& p, int threads = 0) {
    auto [nu_lo, nu_hi] = window_nu_range(p);
    DisconnectedSet set;
    set.params = p;
    if (nu_hi < nu_lo) return set;
    const size_t count = static_cast<size_t>(nu_hi - nu_lo + 1);
    set.intervals.resize(count);
    const double x = p.x;
    parallel_for_chunks(count, threads, [&](size_t b, size_t e) {
        for (size_t i = b; i < e; ++i) {
            int64_t nu = nu_lo + static_cast<int64_t>(i);
            set.intervals[i] = {solve_grid_point(nu, -x).t, solve_grid_point(nu, x).t};
        }
    });
    const double overlap_tol = 4e-9;  // twice the solver residual in t units
    for (size_t i = 0; i < count; ++i) {
        if (!(set.intervals[i].first < set.intervals[i].second))
            throw convergence_error("build_g_set: degenerate interval");
        if (i && set.intervals[i].first < set.intervals[i - 1].second - overlap_tol)
            throw convergence_error("build_g_set: intervals overlap (solver inconsistency)");
    }
    return set;
}

inline double measure(const DisconnectedSet& set) {
    double m = 0.0;
    for (const auto& [lo, hi] : set.intervals) m += hi - lo;
    return m;
}

inline double measure_main_term(const GridParams& p) { return 2.0 * p.x / kPi * p.H; }

inline void write_grid_csv(const std::vector<GridPoint>& grid, std::ostream& os) {
    os << "nu,tau,t,residual\n";
    char line[128];
    for (const auto& g : grid) {
        std::snprintf(line, sizeof line, "%lld,%.17g,%.17g,%.3e\n",
                      static_cast<long long>(g.nu), g.tau, g.t, g.residual);
        os << line;
    }
}

inline void write_intervals_csv(const DisconnectedSet& set, std::ostream& os) {
    os << "nu,lo,hi\n";
    auto [nu_lo, nu_hi] = window_nu_range(set.params);
    char line[128];
    for (size_t i = 0; i < set.intervals.size(); ++i) {
        std::snprintf(line, sizeof line, "%lld,%.17g,%.17g\n",
                      static_cast<long long>(nu_lo + static_cast<int64_t>(i)),
                      set.intervals[i].first, set.intervals[i].second);
        os << line;
    }
}

}  // namespace zetalab
