#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "grk/graph.hpp"
#include "grk/parser.hpp"
#include "grk/rng.hpp"

namespace grk {

// Ground truth: connectivity verdict or shortest-path length.
using GroundTruth = std::variant<bool, std::int64_t>;

struct TaskInstance {
    std::string id;
    TaskKind kind;
    Graph graph;
    int source = 0;
    int target = 0;
    GroundTruth ground_truth;
};

struct GenerationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DatasetSpec {
    int train_count_per_kind = 500;
    int test_count_per_kind = 500;
    GenGraphConfig graph;  // weighted flag is overridden per kind
    std::uint64_t master_seed = 0;
    // Connectivity label quotas ("yes" per split); default is an exact 50/50.
    std::optional<int> train_yes_quota;
    std::optional<int> test_yes_quota;

    void validate() const {
        if (train_count_per_kind <= 0 || test_count_per_kind <= 0)
            throw std::invalid_argument("DatasetSpec: counts must be positive");
        graph.validate();
        if (train_yes_quota && (*train_yes_quota < 0 || *train_yes_quota > train_count_per_kind))
            throw std::invalid_argument("DatasetSpec: train_yes_quota out of range");
        if (test_yes_quota && (*test_yes_quota < 0 || *test_yes_quota > test_count_per_kind))
            throw std::invalid_argument("DatasetSpec: test_yes_quota out of range");
    }
};

struct Dataset {
    std::vector<TaskInstance> train;
    std::vector<TaskInstance> test;
};

inline constexpr int kRejectionBudget = 10000;

// Deterministic instance generation; rejection-samples graphs until the
// requested connectivity label (or s-t connectivity, for shortest_path) holds.
inline TaskInstance gen_instance(TaskKind kind, const GenGraphConfig& cfg,
                                 std::optional<bool> label, std::uint64_t seed,
                                 std::string id = "adhoc-0") {
    cfg.validate();
    if (kind == TaskKind::shortest_path && !cfg.weighted)
        throw std::invalid_argument("gen_instance: shortest_path requires a weighted config");
    for (int attempt = 0; attempt < kRejectionBudget; ++attempt) {
        std::uint64_t attempt_seed = Rng::derive(seed, static_cast<std::uint64_t>(attempt));
        Graph g = gen_graph(cfg, attempt_seed);
        Rng rng(Rng::derive(attempt_seed, hash_str("endpoints")));
        int s = static_cast<int>(rng.uniform(0, g.node_count() - 1));
        int t = static_cast<int>(rng.uniform(0, g.node_count() - 2));
        if (t >= s) ++t;  // uniform over pairs with s != t
        if (kind == TaskKind::connectivity) {
            bool conn = is_connected(g, s, t);
            if (label && conn != *label) continue;
            return {std::move(id), kind, std::move(g), s, t, GroundTruth(conn)};
        }
        auto sp = shortest_path_length(g, s, t);
        if (!sp) continue;
        return {std::move(id), kind, std::move(g), s, t, GroundTruth(sp->total_weight)};
    }
    throw GenerationError(std::string("gen_instance: rejection budget exhausted for kind=") +
                          to_string(kind) +
                          (label ? std::string(", label=") + (*label ? "yes" : "no") : ""));
}

inline constexpr const char* kConnectivityInstruction =
    "Answer in exactly this format:\n"
    "<think>your reasoning</think>\n"
    "<response>\n"
    "one step per line, each of the form: U -> V\n"
    "where every line asserts that the edge between node U and node V exists in the graph\n"
    "</response>\n"
    "<answer>yes or no</answer>";

inline constexpr const char* kShortestPathInstruction =
    "Answer in exactly this format:\n"
    "<think>your reasoning</think>\n"
    "<response>\n"
    "one step per line, each of the form: U -> V : W ; total=T\n"
    "where every line walks one edge of weight W and T is the running total of weights so far\n"
    "</response>\n"
    "<answer>path=a->b->...->z ; length=L</answer>";

inline std::string render_prompt(const TaskInstance& inst) {
    std::string q;
    if (inst.kind == TaskKind::connectivity) {
        q = "Question: Is there a path between node " + std::to_string(inst.source) +
            " and node " + std::to_string(inst.target) + "?";
    } else {
        q = "Question: What is the shortest path from node " + std::to_string(inst.source) +
            " to node " + std::to_string(inst.target) + ", and what is its total weight?";
    }
    const char* instr = inst.kind == TaskKind::connectivity ? kConnectivityInstruction
                                                            : kShortestPathInstruction;
    return render_graph_text(inst.graph) + "\n\n" + q + "\n\n" + instr;
}

namespace detail {

// BFS visiting neighbors in ascending order; returns (parent array, discovery
// order of tree edges). parent[source] == source.
struct BfsResult {
    std::vector<int> parent;
    std::vector<std::pair<int, int>> tree_edges;  // (parent, child) in discovery order
};

inline BfsResult bfs_from(const Graph& g, int source) {
    BfsResult r;
    r.parent.assign(static_cast<std::size_t>(g.node_count()), -1);
    r.parent[static_cast<std::size_t>(source)] = source;
    std::vector<int> queue{source};
    for (std::size_t head = 0; head < queue.size(); ++head) {
        int u = queue[head];
        for (const auto& [v, w] : g.neighbors(u)) {
            (void)w;
            if (r.parent[static_cast<std::size_t>(v)] != -1) continue;
            r.parent[static_cast<std::size_t>(v)] = u;
            r.tree_edges.emplace_back(u, v);
            queue.push_back(v);
        }
    }
    return r;
}

}  // namespace detail

// Canonical maximal-reward completion: every step verifies as correct and the
// answer matches ground truth.
inline std::string render_gold_response(const TaskInstance& inst) {
    std::vector<std::string> lines;
    std::string answer;
    if (inst.kind == TaskKind::connectivity) {
        bool connected = std::get<bool>(inst.ground_truth);
        auto bfs = detail::bfs_from(inst.graph, inst.source);
        if (connected) {
            std::vector<int> path;
            for (int v = inst.target; v != inst.source; v = bfs.parent[static_cast<std::size_t>(v)])
                path.push_back(v);
            path.push_back(inst.source);
            std::reverse(path.begin(), path.end());
            for (std::size_t i = 0; i + 1 < path.size(); ++i)
                lines.push_back(std::to_string(path[i]) + " -> " + std::to_string(path[i + 1]));
            answer = "yes";
        } else {
            // The explored component of the source; any correct edge assertion
            // earns the step reward, and zero steps is a valid degenerate gold.
            for (const auto& [u, v] : bfs.tree_edges)
                lines.push_back(std::to_string(u) + " -> " + std::to_string(v));
            answer = "no";
        }
    } else {
        auto sp = shortest_path_length(inst.graph, inst.source, inst.target);
        if (!sp) throw std::logic_error("render_gold_response: disconnected shortest_path instance");
        std::int64_t total = 0;
        std::string path_str = std::to_string(sp->nodes.front());
        for (std::size_t i = 0; i + 1 < sp->nodes.size(); ++i) {
            int u = sp->nodes[i], v = sp->nodes[i + 1];
            int w = inst.graph.edge_weight(u, v);
            total += w;
            lines.push_back(std::to_string(u) + " -> " + std::to_string(v) + " : " +
                            std::to_string(w) + " ; total=" + std::to_string(total));
            path_str += "->" + std::to_string(v);
        }
        answer = "path=" + path_str + " ; length=" + std::to_string(sp->total_weight);
    }
    std::string body;
    for (const auto& l : lines) body += l + "\n";
    return "<think>Walk the graph from node " + std::to_string(inst.source) + " toward node " +
           std::to_string(inst.target) + ", checking each edge against the graph.</think>\n" +
           "<response>\n" + body + "</response>\n" + "<answer>" + answer + "</answer>";
}

inline Dataset build_dataset(const DatasetSpec& spec) {
    spec.validate();
    Dataset ds;
    for (const char* split : {"train", "test"}) {
        bool is_train = std::string_view(split) == "train";
        auto& out = is_train ? ds.train : ds.test;
        int count = is_train ? spec.train_count_per_kind : spec.test_count_per_kind;
        auto quota = is_train ? spec.train_yes_quota : spec.test_yes_quota;
        int yes_quota = quota ? *quota : count / 2 + count % 2;
        for (TaskKind kind : {TaskKind::connectivity, TaskKind::shortest_path}) {
            GenGraphConfig cfg = spec.graph;
            cfg.weighted = kind == TaskKind::shortest_path;
            std::uint64_t stream =
                Rng::derive(spec.master_seed, hash_str(split) * 3 + hash_str(to_string(kind)));
            for (int i = 0; i < count; ++i) {
                std::optional<bool> label;
                if (kind == TaskKind::connectivity) label = i < yes_quota;
                std::string id = std::string(to_string(kind)) + "-" + split + "-" + std::to_string(i);
                out.push_back(gen_instance(kind, cfg, label,
                                           Rng::derive(stream, static_cast<std::uint64_t>(i)),
                                           std::move(id)));
            }
        }
    }
    return ds;
}

inline nlohmann::json instance_to_json(const TaskInstance& inst) {
    nlohmann::json j;
    j["id"] = inst.id;
    j["kind"] = to_string(inst.kind);
    j["graph"] = graph_to_json(inst.graph);
    j["source"] = inst.source;
    j["target"] = inst.target;
    if (inst.kind == TaskKind::connectivity)
        j["ground_truth"] = std::get<bool>(inst.ground_truth);
    else
        j["ground_truth"] = std::get<std::int64_t>(inst.ground_truth);
    j["prompt"] = render_prompt(inst);
    j["gold"] = render_gold_response(inst);
    return j;
}

inline TaskInstance instance_from_json(const nlohmann::json& j) {
    auto kind = task_kind_from_string(j.at("kind").get<std::string>());
    if (!kind) throw std::invalid_argument("instance_from_json: unknown kind");
    GroundTruth gt;
    if (*kind == TaskKind::connectivity)
        gt = j.at("ground_truth").get<bool>();
    else
        gt = j.at("ground_truth").get<std::int64_t>();
    return {j.at("id").get<std::string>(), *kind, graph_from_json(j.at("graph")),
            j.at("source").get<int>(), j.at("target").get<int>(), gt};
}

inline std::string dataset_to_jsonl(const std::vector<TaskInstance>& split) {
    std::string out;
    for (const auto& inst : split) out += instance_to_json(inst).dump() + "\n";
    return out;
}

}  // namespace grk
