// Test-only reference implementations, kept independent of the library's
// algorithms: BFS connectivity, exhaustive shortest-path enumeration, and a
// quadrature-based normal tail for the z-test.
#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "grk/graph.hpp"

namespace oracle {

inline bool bfs_connected(const grk::Graph& g, int a, int b) {
    std::vector<bool> seen(static_cast<std::size_t>(g.node_count()), false);
    std::vector<int> queue{a};
    seen[static_cast<std::size_t>(a)] = true;
    for (std::size_t h = 0; h < queue.size(); ++h) {
        int u = queue[h];
        if (u == b) return true;
        for (const auto& [v, w] : g.neighbors(u)) {
            (void)w;
            if (!seen[static_cast<std::size_t>(v)]) {
                seen[static_cast<std::size_t>(v)] = true;
                queue.push_back(v);
            }
        }
    }
    return a == b;
}

// Minimal total weight over all simple paths, by brute-force DFS enumeration.
// Only usable on small graphs.
inline std::optional<std::int64_t> enumerate_shortest(const grk::Graph& g, int s, int t) {
    std::optional<std::int64_t> best;
    std::vector<bool> used(static_cast<std::size_t>(g.node_count()), false);
    std::function<void(int, std::int64_t)> dfs = [&](int u, std::int64_t cost) {
        if (u == t) {
            if (!best || cost < *best) best = cost;
            return;
        }
        used[static_cast<std::size_t>(u)] = true;
        for (const auto& [v, w] : g.neighbors(u))
            if (!used[static_cast<std::size_t>(v)]) dfs(v, cost + w);
        used[static_cast<std::size_t>(u)] = false;
    };
    dfs(s, 0);
    return best;
}

// Standard normal upper tail by Simpson's rule on the density; step chosen so
// the quadrature error is far below 1e-9 on the ranges we test.
inline double normal_upper_tail(double z) {
    if (z < 0) return 1.0 - normal_upper_tail(-z);
    if (z > 40.0) return 0.0;
    const double hi = z + 15.0;  // remaining tail is far below 1e-9
    const int n = 20000;         // even; Simpson error ~1e-12 at this step

    const double h = (hi - z) / n;
    auto pdf = [](double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); };
    double sum = pdf(z) + pdf(hi);
    for (int i = 1; i < n; ++i) sum += pdf(z + i * h) * (i % 2 ? 4.0 : 2.0);
    return sum * h / 3.0;
}

inline void two_prop_z_reference(std::int64_t k1, std::int64_t n1, std::int64_t k2,
                                 std::int64_t n2, double& z_out, double& p_out) {
    long double p1 = static_cast<long double>(k1) / n1;
    long double p2 = static_cast<long double>(k2) / n2;
    long double pooled = static_cast<long double>(k1 + k2) / (n1 + n2);
    if (pooled == 0.0L || pooled == 1.0L) {
        z_out = 0.0;
        p_out = 1.0;
        return;
    }
    long double se = sqrtl(pooled * (1.0L - pooled) * (1.0L / n1 + 1.0L / n2));
    z_out = static_cast<double>((p1 - p2) / se);
    p_out = 2.0 * normal_upper_tail(std::fabs(z_out));
    if (p_out > 1.0) p_out = 1.0;
}

}  // namespace oracle
