#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "grk/parser.hpp"
#include "grk/reward.hpp"
#include "grk/rng.hpp"
#include "grk/taskgen.hpp"

namespace grk {

// Controlled corruptions of a gold completion. The applicability table lives
// in docs/perturbations.md; inapplicable (instance, op) combinations throw.
enum class PerturbationOp {
    flip_answer,
    hallucinate_edge,
    corrupt_weight,
    corrupt_total,
    drop_step,
    shuffle_steps,
    break_format,
    blank_response,
};

inline constexpr std::array<PerturbationOp, 8> kAllPerturbationOps = {
    PerturbationOp::flip_answer,    PerturbationOp::hallucinate_edge,
    PerturbationOp::corrupt_weight, PerturbationOp::corrupt_total,
    PerturbationOp::drop_step,      PerturbationOp::shuffle_steps,
    PerturbationOp::break_format,   PerturbationOp::blank_response,
};

inline const char* to_string(PerturbationOp op) {
    switch (op) {
        case PerturbationOp::flip_answer: return "flip_answer";
        case PerturbationOp::hallucinate_edge: return "hallucinate_edge";
        case PerturbationOp::corrupt_weight: return "corrupt_weight";
        case PerturbationOp::corrupt_total: return "corrupt_total";
        case PerturbationOp::drop_step: return "drop_step";
        case PerturbationOp::shuffle_steps: return "shuffle_steps";
        case PerturbationOp::break_format: return "break_format";
        case PerturbationOp::blank_response: return "blank_response";
    }
    return "?";
}

inline std::optional<PerturbationOp> perturbation_op_from_string(std::string_view s) {
    for (auto op : kAllPerturbationOps)
        if (s == to_string(op)) return op;
    return std::nullopt;
}

namespace detail {

struct CompletionParts {
    std::string think;
    std::vector<std::string> step_lines;
    std::string answer;
    bool drop_answer_close = false;
};

inline CompletionParts split_completion(std::string_view completion) {
    auto parsed = extract_sections(completion);
    if (!parsed.format_ok)
        throw std::invalid_argument("perturb: base completion is not in canonical format");
    return {parsed.think, parsed.step_lines, parsed.answer_raw, false};
}

inline std::string render_parts(const CompletionParts& p) {
    std::string body;
    for (const auto& l : p.step_lines) body += l + "\n";
    std::string out = "<think>" + p.think + "</think>\n<response>\n" + body + "</response>\n" +
                      "<answer>" + p.answer;
    if (!p.drop_answer_close) out += "</answer>";
    return out;
}

inline std::string render_sp_step(int u, int v, std::int64_t w, std::int64_t t) {
    return std::to_string(u) + " -> " + std::to_string(v) + " : " + std::to_string(w) +
           " ; total=" + std::to_string(t);
}

// True when the op can change the completion of this instance at its locus.
inline bool op_applicable(PerturbationOp op, const TaskInstance& inst,
                          const CompletionParts& parts) {
    bool sp = inst.kind == TaskKind::shortest_path;
    switch (op) {
        case PerturbationOp::flip_answer:
        case PerturbationOp::break_format:
            return true;
        case PerturbationOp::hallucinate_edge:
        case PerturbationOp::blank_response:
            return !parts.step_lines.empty();
        case PerturbationOp::corrupt_weight:
        case PerturbationOp::corrupt_total:
        case PerturbationOp::drop_step:
            return sp && !parts.step_lines.empty();
        case PerturbationOp::shuffle_steps:
            // Order only matters for shortest-path chains; "no"-connectivity
            // responses are included as the documented reward-neutral case.
            return parts.step_lines.size() >= 2 &&
                   (sp || (inst.kind == TaskKind::connectivity &&
                           !std::get<bool>(inst.ground_truth)));
    }
    return false;
}

inline void apply_op(CompletionParts& parts, const TaskInstance& inst, PerturbationOp op,
                     Rng& rng) {
    if (!op_applicable(op, inst, parts))
        throw std::invalid_argument(std::string("perturb: op ") + to_string(op) +
                                    " not applicable to instance " + inst.id);
    switch (op) {
        case PerturbationOp::flip_answer: {
            auto payload = parse_answer(inst.kind, parts.answer);
            if (auto* c = std::get_if<AnswerPayload::Connectivity>(&payload.data)) {
                parts.answer = c->claim ? "no" : "yes";
            } else if (auto* s = std::get_if<AnswerPayload::ShortestPath>(&payload.data)) {
                std::string path = std::to_string(s->path.front());
                for (std::size_t i = 1; i < s->path.size(); ++i)
                    path += "->" + std::to_string(s->path[i]);
                parts.answer = "path=" + path + " ; length=" + std::to_string(s->length + 1);
            } else {
                throw std::invalid_argument("perturb: flip_answer on unparseable answer");
            }
            return;
        }
        case PerturbationOp::hallucinate_edge: {
            auto idx = static_cast<std::size_t>(
                rng.uniform(0, static_cast<std::int64_t>(parts.step_lines.size()) - 1));
            Step step = parse_step(inst.kind, parts.step_lines[idx]);
            int ghost = inst.graph.node_count();  // first id outside the graph
            if (auto* c = std::get_if<Step::Connectivity>(&step.data)) {
                parts.step_lines[idx] =
                    std::to_string(c->u) + " -> " + std::to_string(ghost);
            } else if (auto* s = std::get_if<Step::ShortestPath>(&step.data)) {
                parts.step_lines[idx] =
                    render_sp_step(s->u, ghost, s->claimed_weight, s->claimed_total);
            } else {
                throw std::invalid_argument("perturb: hallucinate_edge on unparsable step");
            }
            return;
        }
        case PerturbationOp::corrupt_weight: {
            auto idx = static_cast<std::size_t>(
                rng.uniform(0, static_cast<std::int64_t>(parts.step_lines.size()) - 1));
            Step step = parse_step(inst.kind, parts.step_lines[idx]);
            auto* s = std::get_if<Step::ShortestPath>(&step.data);
            if (!s) throw std::invalid_argument("perturb: corrupt_weight on unparsable step");
            parts.step_lines[idx] =
                render_sp_step(s->u, s->v, s->claimed_weight + 1, s->claimed_total);
            return;
        }
        case PerturbationOp::corrupt_total: {
            auto idx = static_cast<std::size_t>(
                rng.uniform(0, static_cast<std::int64_t>(parts.step_lines.size()) - 1));
            Step step = parse_step(inst.kind, parts.step_lines[idx]);
            auto* s = std::get_if<Step::ShortestPath>(&step.data);
            if (!s) throw std::invalid_argument("perturb: corrupt_total on unparsable step");
            parts.step_lines[idx] =
                render_sp_step(s->u, s->v, s->claimed_weight, s->claimed_total + 1);
            return;
        }
        case PerturbationOp::drop_step:
            // Dropping the first step breaks the running-total base of the
            // remaining chain (or empties a single-step chain).
            parts.step_lines.erase(parts.step_lines.begin());
            return;
        case PerturbationOp::shuffle_steps: {
            auto& lines = parts.step_lines;
            auto before = lines;
            for (std::size_t i = lines.size() - 1; i > 0; --i) {
                auto j = static_cast<std::size_t>(rng.uniform(0, static_cast<std::int64_t>(i)));
                std::swap(lines[i], lines[j]);
            }
            if (lines == before) std::rotate(lines.begin(), lines.begin() + 1, lines.end());
            return;
        }
        case PerturbationOp::break_format:
            parts.drop_answer_close = true;
            return;
        case PerturbationOp::blank_response:
            parts.step_lines.clear();
            return;
    }
}

}  // namespace detail

inline bool perturbation_applicable(PerturbationOp op, const TaskInstance& inst,
                                    std::string_view gold) {
    return detail::op_applicable(op, inst, detail::split_completion(gold));
}

inline std::string perturb(const TaskInstance& inst, std::string_view gold, PerturbationOp op,
                           std::uint64_t seed) {
    auto parts = detail::split_completion(gold);
    Rng rng(Rng::derive(seed, hash_str(to_string(op)) ^ hash_str(inst.id.c_str())));
    detail::apply_op(parts, inst, op, rng);
    return detail::render_parts(parts);
}

// A mock policy corrupts gold completions with independent per-op
// probabilities; all-zero probabilities emit gold unchanged.
struct MockPolicy {
    std::map<PerturbationOp, double> probs;
    std::uint64_t seed = 0;

    void validate() const {
        for (const auto& [op, p] : probs) {
            (void)op;
            if (p < 0.0 || p > 1.0)
                throw std::invalid_argument("MockPolicy: probability outside [0,1]");
        }
    }
};

inline std::vector<std::string> sample_policy(const TaskInstance& inst, const MockPolicy& policy,
                                              int n) {
    if (n < 1) throw std::invalid_argument("sample_policy: n must be >= 1");
    policy.validate();
    std::string gold = render_gold_response(inst);
    std::vector<std::string> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        Rng rng(Rng::derive(policy.seed,
                            hash_str(inst.id.c_str()) + static_cast<std::uint64_t>(i) * 2654435761ULL));
        auto parts = detail::split_completion(gold);
        for (auto op : kAllPerturbationOps) {
            auto it = policy.probs.find(op);
            if (it == policy.probs.end() || it->second <= 0.0) continue;
            bool fire = rng.bernoulli(it->second);
            if (fire && detail::op_applicable(op, inst, parts))
                detail::apply_op(parts, inst, op, rng);
        }
        out.push_back(detail::render_parts(parts));
    }
    return out;
}

struct PreferencePair {
    std::string prompt_id;
    std::string chosen;
    std::string rejected;
    double reward_gap = 0.0;
};

// One (argmax, argmin) pair per prompt; all-pairs is available behind a flag.
inline std::vector<PreferencePair> build_preference_pairs(
    const std::string& prompt_id, const std::vector<std::pair<std::string, double>>& scored,
    double margin, bool all_pairs = false) {
    if (scored.empty()) throw std::invalid_argument("build_preference_pairs: empty input");
    if (margin < 0.0) throw std::invalid_argument("build_preference_pairs: negative margin");
    std::vector<PreferencePair> out;
    if (all_pairs) {
        for (std::size_t i = 0; i < scored.size(); ++i)
            for (std::size_t j = 0; j < scored.size(); ++j)
                if (scored[i].second - scored[j].second > margin)
                    out.push_back({prompt_id, scored[i].first, scored[j].first,
                                   scored[i].second - scored[j].second});
        return out;
    }
    std::size_t best = 0, worst = 0;
    for (std::size_t i = 1; i < scored.size(); ++i) {
        if (scored[i].second > scored[best].second) best = i;
        if (scored[i].second < scored[worst].second) worst = i;
    }
    double gap = scored[best].second - scored[worst].second;
    if (gap > margin)
        out.push_back({prompt_id, scored[best].first, scored[worst].first, gap});
    return out;
}

inline nlohmann::json preference_pair_json(const PreferencePair& p) {
    return {{"prompt_id", p.prompt_id},
            {"chosen", p.chosen},
            {"rejected", p.rejected},
            {"reward_gap", p.reward_gap}};
}

struct GroupAdvantages {
    std::vector<double> rewards;
    std::vector<double> advantages;
};

// GRPO-style normalization: (r - mean) / population std, all zeros for
// constant groups.
inline GroupAdvantages group_advantages(const std::vector<double>& rewards) {
    if (rewards.empty()) throw std::invalid_argument("group_advantages: empty reward list");
    double mean = 0.0;
    for (double r : rewards) mean += r;
    mean /= static_cast<double>(rewards.size());
    double var = 0.0;
    for (double r : rewards) var += (r - mean) * (r - mean);
    var /= static_cast<double>(rewards.size());
    GroupAdvantages out{rewards, {}};
    out.advantages.reserve(rewards.size());
    if (var == 0.0) {
        out.advantages.assign(rewards.size(), 0.0);
        return out;
    }
    double sd = std::sqrt(var);
    for (double r : rewards) out.advantages.push_back((r - mean) / sd);
    return out;
}

}  // namespace grk
