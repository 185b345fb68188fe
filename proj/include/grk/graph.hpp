#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "grk/rng.hpp"

namespace grk {

// Undirected graph, nodes 0..n-1, optional positive integer edge weights.
// Edges are stored normalized (u < v) and sorted lexicographically; the
// weight vector, when present, is parallel to the edge list.
class Graph {
public:
    Graph(int node_count, std::vector<std::pair<int, int>> edges,
          std::optional<std::vector<int>> weights = std::nullopt)
        : n_(node_count) {
        if (n_ <= 0) throw std::invalid_argument("Graph: node_count must be positive");
        for (auto& [u, v] : edges) {
            if (u == v) throw std::invalid_argument("Graph: self-loop");
            if (u < 0 || u >= n_ || v < 0 || v >= n_)
                throw std::invalid_argument("Graph: edge endpoint out of range");
            if (u > v) std::swap(u, v);
        }
        std::vector<std::size_t> order(edges.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return edges[a] < edges[b]; });
        edges_.reserve(edges.size());
        if (weights) {
            if (weights->size() != edges.size())
                throw std::invalid_argument("Graph: weight count mismatch");
            weights_.emplace();
            weights_->reserve(edges.size());
        }
        for (std::size_t i : order) {
            if (!edges_.empty() && edges_.back() == edges[i])
                throw std::invalid_argument("Graph: duplicate edge");
            edges_.push_back(edges[i]);
            if (weights) {
                int w = (*weights)[i];
                if (w <= 0) throw std::invalid_argument("Graph: non-positive weight");
                weights_->push_back(w);
            }
        }
        adj_.assign(n_, {});
        for (std::size_t i = 0; i < edges_.size(); ++i) {
            int w = weights_ ? (*weights_)[i] : 1;
            adj_[edges_[i].first].push_back({edges_[i].second, w});
            adj_[edges_[i].second].push_back({edges_[i].first, w});
        }
        for (auto& nb : adj_) std::sort(nb.begin(), nb.end());
    }

    int node_count() const { return n_; }
    bool weighted() const { return weights_.has_value(); }
    bool has_node(int v) const { return v >= 0 && v < n_; }
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }
    const std::optional<std::vector<int>>& weights() const { return weights_; }
    const std::vector<std::pair<int, int>>& neighbors(int v) const { return adj_.at(v); }

    bool has_edge(int u, int v) const {
        if (!has_node(u) || !has_node(v) || u == v) return false;
        if (u > v) std::swap(u, v);
        return std::binary_search(edges_.begin(), edges_.end(), std::make_pair(u, v));
    }

    // Weight of an existing edge; 1 for unweighted graphs.
    int edge_weight(int u, int v) const {
        if (u > v) std::swap(u, v);
        auto it = std::lower_bound(edges_.begin(), edges_.end(), std::make_pair(u, v));
        if (it == edges_.end() || *it != std::make_pair(u, v))
            throw std::invalid_argument("edge_weight: no such edge");
        return weights_ ? (*weights_)[static_cast<std::size_t>(it - edges_.begin())] : 1;
    }

private:
    int n_;
    std::vector<std::pair<int, int>> edges_;
    std::optional<std::vector<int>> weights_;
    std::vector<std::vector<std::pair<int, int>>> adj_;  // (neighbor, weight)
};

struct PathWitness {
    std::vector<int> nodes;
    std::int64_t total_weight = 0;
};

struct GenGraphConfig {
    int node_min = 5;
    int node_max = 15;
    double edge_probability = 0.3;
    bool weighted = false;
    int weight_min = 1;
    int weight_max = 10;

    void validate() const {
        if (node_min < 2 || node_max < node_min)
            throw std::invalid_argument("GenGraphConfig: bad node range");
        if (!(edge_probability > 0.0 && edge_probability < 1.0))
            throw std::invalid_argument("GenGraphConfig: edge_probability outside (0,1)");
        if (weight_min < 1 || weight_max < weight_min)
            throw std::invalid_argument("GenGraphConfig: bad weight range");
    }
};

// Connectivity via union-find; the test suite cross-checks against BFS.
inline bool is_connected(const Graph& g, int a, int b) {
    if (!g.has_node(a) || !g.has_node(b))
        throw std::invalid_argument("is_connected: invalid node id");
    if (a == b) return true;
    std::vector<int> parent(static_cast<std::size_t>(g.node_count()));
    for (int i = 0; i < g.node_count(); ++i) parent[static_cast<std::size_t>(i)] = i;
    auto find = [&](int x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] =
                parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    };
    for (const auto& [u, v] : g.edges()) {
        int ru = find(u), rv = find(v);
        if (ru != rv) parent[static_cast<std::size_t>(ru)] = rv;
    }
    return find(a) == find(b);
}

// Dijkstra with lowest-node-id tie-breaking so the witness is reproducible.
inline std::optional<PathWitness> shortest_path_length(const Graph& g, int s, int t) {
    if (!g.weighted()) throw std::invalid_argument("shortest_path_length: unweighted graph");
    if (!g.has_node(s) || !g.has_node(t))
        throw std::invalid_argument("shortest_path_length: invalid node id");
    constexpr std::int64_t kInf = INT64_MAX / 4;
    std::vector<std::int64_t> dist(static_cast<std::size_t>(g.node_count()), kInf);
    std::vector<int> prev(static_cast<std::size_t>(g.node_count()), -1);
    dist[static_cast<std::size_t>(s)] = 0;
    using Item = std::pair<std::int64_t, int>;  // (dist, node); node id breaks ties
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    pq.push({0, s});
    while (!pq.empty()) {
        auto [d, u] = pq.top();
        pq.pop();
        if (d > dist[static_cast<std::size_t>(u)]) continue;
        for (const auto& [v, w] : g.neighbors(u)) {
            std::int64_t nd = d + w;
            auto& dv = dist[static_cast<std::size_t>(v)];
            if (nd < dv || (nd == dv && prev[static_cast<std::size_t>(v)] > u)) {
                dv = nd;
                prev[static_cast<std::size_t>(v)] = u;
                pq.push({nd, v});
            }
        }
    }
    if (dist[static_cast<std::size_t>(t)] >= kInf) return std::nullopt;
    PathWitness w;
    w.total_weight = dist[static_cast<std::size_t>(t)];
    for (int v = t; v != -1; v = prev[static_cast<std::size_t>(v)]) w.nodes.push_back(v);
    std::reverse(w.nodes.begin(), w.nodes.end());
    return w;
}

struct PathCheck {
    bool valid = false;
    std::optional<std::int64_t> total_weight;
};

inline PathCheck validate_path(const Graph& g, const std::vector<int>& nodes) {
    if (nodes.empty()) throw std::invalid_argument("validate_path: empty node list");
    for (int v : nodes)
        if (!g.has_node(v)) return {};
    std::int64_t total = 0;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        if (!g.has_edge(nodes[i], nodes[i + 1])) return {};
        total += g.edge_weight(nodes[i], nodes[i + 1]);
    }
    if (!g.weighted()) return {true, std::nullopt};
    return {true, total};
}

// Natural-language serialization used in every prompt. Bit-exact template:
// each edge appears once, under its smaller endpoint, neighbors ascending.
inline std::string render_graph_text(const Graph& g) {
    std::string out = "The graph has " + std::to_string(g.node_count()) +
                      " nodes, numbered from 0 to " + std::to_string(g.node_count() - 1) + ".";
    for (int i = 0; i < g.node_count(); ++i) {
        out += "\nNode " + std::to_string(i) + " is connected to: ";
        bool first = true;
        for (const auto& [j, w] : g.neighbors(i)) {
            if (j <= i) continue;
            if (!first) out += ", ";
            out += "node " + std::to_string(j);
            if (g.weighted()) out += " (weight " + std::to_string(w) + ")";
            first = false;
        }
        if (first) out += "none";
        out += ".";
    }
    return out;
}

inline Graph gen_graph(const GenGraphConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    Rng rng(Rng::derive(seed, hash_str("gen_graph")));
    int n = static_cast<int>(rng.uniform(cfg.node_min, cfg.node_max));
    std::vector<std::pair<int, int>> edges;
    std::vector<int> weights;
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
            if (rng.bernoulli(cfg.edge_probability)) {
                edges.emplace_back(u, v);
                if (cfg.weighted)
                    weights.push_back(static_cast<int>(rng.uniform(cfg.weight_min, cfg.weight_max)));
            }
    if (cfg.weighted) return Graph(n, std::move(edges), std::move(weights));
    return Graph(n, std::move(edges));
}

inline nlohmann::json graph_to_json(const Graph& g) {
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& [u, v] : g.edges()) edges.push_back({u, v});
    nlohmann::json j;
    j["n"] = g.node_count();
    j["edges"] = std::move(edges);
    j["weights"] = g.weighted() ? nlohmann::json(*g.weights()) : nlohmann::json(nullptr);
    return j;
}

inline Graph graph_from_json(const nlohmann::json& j) {
    std::vector<std::pair<int, int>> edges;
    for (const auto& e : j.at("edges"))
        edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
    std::optional<std::vector<int>> weights;
    if (!j.at("weights").is_null()) weights = j.at("weights").get<std::vector<int>>();
    return Graph(j.at("n").get<int>(), std::move(edges), std::move(weights));
}

}  // namespace grk
