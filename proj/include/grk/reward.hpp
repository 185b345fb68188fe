#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "grk/graph.hpp"
#include "grk/parser.hpp"
#include "grk/score.hpp"
#include "grk/taskgen.hpp"

namespace grk {

enum class RewardMode { solution, process };

inline const char* to_string(RewardMode m) {
    return m == RewardMode::solution ? "solution" : "process";
}

inline std::optional<RewardMode> reward_mode_from_string(std::string_view s) {
    if (s == "solution") return RewardMode::solution;
    if (s == "process") return RewardMode::process;
    return std::nullopt;
}

struct RewardConfig {
    Score overall_format{1, 5};     // 0.2
    Score process_format{1, 10};    // 0.1
    Score step_correct{1, 20};      // +0.05
    Score step_incorrect{0};
    Score answer_correct{1};        // +1
    Score answer_incorrect{0};
    Score hallucination{-2};        // -2
    Score format_penalty{0};

    void validate() const {
        if (!(hallucination < step_incorrect) || !(step_incorrect <= step_correct))
            throw std::invalid_argument("RewardConfig: need hallucination < step_incorrect <= step_correct");
        if (!(answer_incorrect < answer_correct))
            throw std::invalid_argument("RewardConfig: need answer_incorrect < answer_correct");
    }
};

enum class Verdict { correct, incorrect, hallucinated };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::correct: return "correct";
        case Verdict::incorrect: return "incorrect";
        case Verdict::hallucinated: return "hallucinated";
    }
    return "?";
}

struct StepVerdict {
    Verdict verdict;
    std::string reason;
    Score awarded;
};

struct RewardBreakdown {
    Score overall_format;
    Score process_format;
    Score process_mean;   // 0 when no steps or in solution mode
    Score answer;
    Score answer_hallucination;  // shortest-path answer-path penalty, else 0
    Score total;
    std::vector<StepVerdict> step_verdicts;
    bool answer_correct_flag = false;
};

inline StepVerdict verify_connectivity_step(const Graph& g, const Step& step,
                                            const RewardConfig& cfg = {}) {
    if (auto* s = std::get_if<Step::Connectivity>(&step.data)) {
        if (!g.has_node(s->u) || !g.has_node(s->v))
            return {Verdict::hallucinated, "node not in graph", cfg.hallucination};
        if (!g.has_edge(s->u, s->v))
            return {Verdict::hallucinated, "edge not in graph", cfg.hallucination};
        return {Verdict::correct, "edge exists", cfg.step_correct};
    }
    return {Verdict::incorrect, "unparsable step", cfg.step_incorrect};
}

// Chain context carried between consecutive shortest-path steps.
struct StepChain {
    std::optional<std::int64_t> prev_total;
    std::optional<int> prev_head;
};

inline StepVerdict verify_shortest_path_step(const Graph& g, const Step& step,
                                             const StepChain& chain,
                                             const RewardConfig& cfg = {}) {
    auto* s = std::get_if<Step::ShortestPath>(&step.data);
    if (!s) return {Verdict::incorrect, "unparsable step", cfg.step_incorrect};
    if (!g.has_node(s->u) || !g.has_node(s->v))
        return {Verdict::hallucinated, "node not in graph", cfg.hallucination};
    if (!g.has_edge(s->u, s->v))
        return {Verdict::hallucinated, "edge not in graph", cfg.hallucination};
    if (s->claimed_weight != g.edge_weight(s->u, s->v))
        return {Verdict::hallucinated, "wrong edge weight", cfg.hallucination};
    std::int64_t base = chain.prev_total.value_or(0);
    if (s->claimed_total != base + s->claimed_weight)
        return {Verdict::incorrect, "running total mismatch", cfg.step_incorrect};
    if (chain.prev_head && *chain.prev_head != s->u)
        return {Verdict::incorrect, "step does not continue the previous one", cfg.step_incorrect};
    return {Verdict::correct, "valid edge, weight and running total", cfg.step_correct};
}

struct AnswerScore {
    Score answer;
    Score answer_hallucination;
    bool correct = false;
};

inline AnswerScore check_answer(const TaskInstance& inst, const AnswerPayload& payload,
                                const RewardConfig& cfg = {}) {
    if (inst.kind == TaskKind::connectivity) {
        auto* p = std::get_if<AnswerPayload::Connectivity>(&payload.data);
        if (!p) return {cfg.answer_incorrect, Score(0), false};
        bool correct = p->claim == std::get<bool>(inst.ground_truth);
        return {correct ? cfg.answer_correct : cfg.answer_incorrect, Score(0), correct};
    }
    auto* p = std::get_if<AnswerPayload::ShortestPath>(&payload.data);
    if (!p) return {cfg.answer_incorrect, Score(0), false};
    auto check = validate_path(inst.graph, p->path);
    if (!check.valid)
        return {cfg.answer_incorrect, cfg.hallucination, false};  // hallucinated path element
    bool correct = p->path.front() == inst.source && p->path.back() == inst.target &&
                   check.total_weight == p->length &&
                   p->length == std::get<std::int64_t>(inst.ground_truth);
    return {correct ? cfg.answer_correct : cfg.answer_incorrect, Score(0), correct};
}

inline RewardBreakdown score_response(const TaskInstance& inst, std::string_view completion,
                                      RewardMode mode, const RewardConfig& cfg = {}) {
    RewardBreakdown b{};
    auto parsed = extract_sections(completion);
    b.overall_format = parsed.format_ok ? cfg.overall_format : cfg.format_penalty;

    if (mode == RewardMode::process) {
        auto steps = parse_steps(inst.kind, parsed.step_lines);
        bool all_parse = true;
        StepChain chain;
        Score sum{0};
        for (const auto& step : steps) {
            StepVerdict v = inst.kind == TaskKind::connectivity
                                ? verify_connectivity_step(inst.graph, step, cfg)
                                : verify_shortest_path_step(inst.graph, step, chain, cfg);
            if (!step.parsed()) all_parse = false;
            if (auto* sp = std::get_if<Step::ShortestPath>(&step.data)) {
                chain.prev_total = sp->claimed_total;
                chain.prev_head = sp->v;
            }
            sum += v.awarded;
            b.step_verdicts.push_back(std::move(v));
        }
        // Process format pays for grammar conformance only; step truth is paid
        // per step. Empty step lists average to 0.
        b.process_format = all_parse ? cfg.process_format : Score(0);
        b.process_mean =
            steps.empty() ? Score(0) : sum / static_cast<std::int64_t>(steps.size());
    }

    auto payload = parse_answer(inst.kind, parsed.answer_raw);
    auto ans = check_answer(inst, payload, cfg);
    b.answer = ans.answer;
    b.answer_hallucination = ans.answer_hallucination;
    b.answer_correct_flag = ans.correct;
    b.total = b.overall_format + b.process_format + b.process_mean + b.answer +
              b.answer_hallucination;
    return b;
}

inline nlohmann::json reward_record_json(const std::string& id, RewardMode mode,
                                         const RewardBreakdown& b) {
    nlohmann::json verdicts = nlohmann::json::array();
    for (const auto& v : b.step_verdicts)
        verdicts.push_back({{"verdict", to_string(v.verdict)}, {"reason", v.reason}});
    return {{"id", id},
            {"mode", to_string(mode)},
            {"components",
             {{"overall_format", b.overall_format.to_double()},
              {"process_format", b.process_format.to_double()},
              {"process_mean", b.process_mean.to_double()},
              {"answer", b.answer.to_double()},
              {"answer_hallucination", b.answer_hallucination.to_double()}}},
            {"total", b.total.to_double()},
            {"answer_correct", b.answer_correct_flag},
            {"step_verdicts", std::move(verdicts)}};
}

// Reward constants overrides from JSON, e.g. {"step_correct": 0.1}. Values are
// decimals; they are converted exactly at four decimal places.
inline RewardConfig reward_config_from_json(const nlohmann::json& j) {
    RewardConfig cfg;
    auto set = [&](const char* key, Score& field) {
        if (j.contains(key)) field = Score::from_double(j.at(key).get<double>());
    };
    set("overall_format", cfg.overall_format);
    set("process_format", cfg.process_format);
    set("step_correct", cfg.step_correct);
    set("step_incorrect", cfg.step_incorrect);
    set("answer_correct", cfg.answer_correct);
    set("answer_incorrect", cfg.answer_incorrect);
    set("hallucination", cfg.hallucination);
    set("format_penalty", cfg.format_penalty);
    cfg.validate();
    return cfg;
}

}  // namespace grk
