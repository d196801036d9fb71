#pragma once

// Gauss-Legendre quadrature.  Nodes and weights come from Newton iteration
// on P_n (the usual gauleg construction); rules are cached per order.

#include <cmath>
#include <map>
#include <mutex>
#include <span>
#include <utility>
#include <vector>

#include "zetalab/common.hpp"

namespace zetalab {

struct QuadratureRule {
    std::vector<double> nodes;    // on (-1, 1), ascending
    std::vector<double> weights;  // sum to 2
};

inline QuadratureRule gauss_legendre(int order) {
    if (order < 1) throw std::domain_error("gauss_legendre: order must be >= 1");
    static std::mutex mu;
    static std::map<int, QuadratureRule> cache;
    {
        std::lock_guard<std::mutex> lk(mu);
        auto it = cache.find(order);
        if (it != cache.end()) return it->second;
    }
    QuadratureRule rule;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    const int m = (order + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(kPi * (i + 0.75) / (order + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 0; j < order; ++j) {
                double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
            }
            pp = order * (z * p1 - p2) / (z * z - 1.0);
            double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) < 1e-15) break;
        }
        rule.nodes[i] = -z;
        rule.nodes[order - 1 - i] = z;
        double w = 2.0 / ((1.0 - z * z) * pp * pp);
        rule.weights[i] = w;
        rule.weights[order - 1 - i] = w;
    }
    std::lock_guard<std::mutex> lk(mu);
    cache.emplace(order, rule);
    return rule;
}

// all quadrature nodes of a rule mapped onto a list of intervals, in
// (interval, node) order; weights carry the half-length factor
inline void map_nodes(std::span<const std::pair<double, double>> intervals, int order,
                      std::vector<double>& ts, std::vector<double>& ws) {
    QuadratureRule rule = gauss_legendre(order);
    ts.clear();
    ws.clear();
    ts.reserve(intervals.size() * order);
    ws.reserve(intervals.size() * order);
    for (const auto& [lo, hi] : intervals) {
        const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
        for (int j = 0; j < order; ++j) {
            ts.push_back(mid + half * rule.nodes[j]);
            ws.push_back(half * rule.weights[j]);
        }
    }
}

// integral of sampled values against map_nodes weights, summed in index order
inline double weighted_sum(std::span<const double> values, std::span<const double> ws) {
    double acc = 0.0;
    for (size_t i = 0; i < values.size(); ++i) acc += ws[i] * values[i];
    return acc;
}

template <class F>
double integrate_intervals(std::span<const std::pair<double, double>> intervals, F&& f,
                           int order) {
    std::vector<double> ts, ws;
    map_nodes(intervals, order, ts, ws);
    double acc = 0.0;
    for (size_t i = 0; i < ts.size(); ++i) acc += ws[i] * f(ts[i]);
    return acc;
}

}  // namespace zetalab
