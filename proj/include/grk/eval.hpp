#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "grk/reward.hpp"
#include "grk/taskgen.hpp"

namespace grk {

struct Transcript {
    std::string id;
    std::string completion;
    nlohmann::json meta = nlohmann::json::object();
};

inline Transcript transcript_from_json(const nlohmann::json& j) {
    Transcript t;
    t.id = j.at("id").get<std::string>();
    t.completion = j.at("completion").get<std::string>();
    if (j.contains("meta")) t.meta = j.at("meta");
    return t;
}

struct ScoredRecord {
    std::string id;
    bool ok = false;
    std::string error;  // set when the id did not resolve
    TaskKind kind = TaskKind::connectivity;
    bool format_ok = false;
    RewardBreakdown breakdown;
};

// One record per transcript, input order preserved; unresolvable ids become
// error entries without stopping the stream.
inline std::vector<ScoredRecord> score_transcripts(
    const std::vector<TaskInstance>& dataset, const std::vector<Transcript>& transcripts,
    RewardMode mode, const RewardConfig& cfg = {}) {
    std::map<std::string, const TaskInstance*> by_id;
    for (const auto& inst : dataset) by_id[inst.id] = &inst;
    std::vector<ScoredRecord> out;
    out.reserve(transcripts.size());
    for (const auto& t : transcripts) {
        ScoredRecord rec;
        rec.id = t.id;
        auto it = by_id.find(t.id);
        if (it == by_id.end()) {
            rec.error = "unknown instance id";
            out.push_back(std::move(rec));
            continue;
        }
        rec.ok = true;
        rec.kind = it->second->kind;
        rec.format_ok = extract_sections(t.completion).format_ok;
        rec.breakdown = score_response(*it->second, t.completion, mode, cfg);
        out.push_back(std::move(rec));
    }
    return out;
}

struct EvalReport {
    std::size_t total_count = 0;
    std::size_t error_count = 0;
    std::map<std::string, std::size_t> counts;      // per kind
    std::map<std::string, double> accuracy;         // per kind
    double overall_accuracy = 0.0;
    double mean_total_reward = 0.0;
    double format_failure_rate = 0.0;
};

inline EvalReport accuracy_report(const std::vector<ScoredRecord>& records) {
    if (records.empty()) throw std::invalid_argument("accuracy_report: no records");
    EvalReport rep;
    std::map<std::string, std::size_t> correct;
    std::size_t correct_total = 0, format_failed = 0, scored = 0;
    double reward_sum = 0.0;
    for (const auto& r : records) {
        ++rep.total_count;
        if (!r.ok) {
            ++rep.error_count;
            continue;
        }
        ++scored;
        const char* k = to_string(r.kind);
        ++rep.counts[k];
        if (r.breakdown.answer_correct_flag) {
            ++correct[k];
            ++correct_total;
        }
        if (!r.format_ok) ++format_failed;
        reward_sum += r.breakdown.total.to_double();
    }
    if (scored == 0) throw std::invalid_argument("accuracy_report: no scorable records");
    for (const auto& [k, n] : rep.counts)
        rep.accuracy[k] = static_cast<double>(correct[k]) / static_cast<double>(n);
    rep.overall_accuracy = static_cast<double>(correct_total) / static_cast<double>(scored);
    rep.mean_total_reward = reward_sum / static_cast<double>(scored);
    rep.format_failure_rate = static_cast<double>(format_failed) / static_cast<double>(scored);
    return rep;
}

inline nlohmann::json report_to_json(const EvalReport& rep) {
    nlohmann::json per_kind = nlohmann::json::object();
    for (const auto& [k, a] : rep.accuracy)
        per_kind[k] = {{"accuracy", a}, {"count", rep.counts.at(k)}};
    return {{"overall_accuracy", rep.overall_accuracy},
            {"per_kind", per_kind},
            {"mean_total_reward", rep.mean_total_reward},
            {"format_failure_rate", rep.format_failure_rate},
            {"total_count", rep.total_count},
            {"error_count", rep.error_count}};
}

// Plain-text table in the "overall (connectivity, shortest path)" layout.
inline std::string report_to_table(const EvalReport& rep) {
    char buf[256];
    auto acc = [&](const char* k) {
        auto it = rep.accuracy.find(k);
        return it == rep.accuracy.end() ? 0.0 : it->second;
    };
    std::snprintf(buf, sizeof(buf),
                  "accuracy              %.3f (%.3f, %.3f)\n"
                  "mean total reward     %.4f\n"
                  "format failure rate   %.3f\n"
                  "records               %zu (%zu errors)\n",
                  rep.overall_accuracy, acc("connectivity"), acc("shortest_path"),
                  rep.mean_total_reward, rep.format_failure_rate, rep.total_count,
                  rep.error_count);
    return buf;
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

struct SignificanceResult {
    double z = 0.0;
    double p_two_sided = 1.0;
    bool significant_at_001 = false;
};

// Pooled two-proportion z-test with two-sided p; degenerate pooled proportion
// (0 or 1) yields z = 0, p = 1.
inline SignificanceResult two_proportion_z_test(std::int64_t k1, std::int64_t n1,
                                                std::int64_t k2, std::int64_t n2) {
    if (n1 < 1 || n2 < 1 || k1 < 0 || k1 > n1 || k2 < 0 || k2 > n2)
        throw std::invalid_argument("two_proportion_z_test: bounds violated");
    double p1 = static_cast<double>(k1) / static_cast<double>(n1);
    double p2 = static_cast<double>(k2) / static_cast<double>(n2);
    double pooled = static_cast<double>(k1 + k2) / static_cast<double>(n1 + n2);
    SignificanceResult res;
    if (pooled == 0.0 || pooled == 1.0) return res;
    double se = std::sqrt(pooled * (1.0 - pooled) *
                          (1.0 / static_cast<double>(n1) + 1.0 / static_cast<double>(n2)));
    res.z = (p1 - p2) / se;
    res.p_two_sided = 2.0 * (1.0 - normal_cdf(std::fabs(res.z)));
    if (res.p_two_sided < 0.0) res.p_two_sided = 0.0;
    if (res.p_two_sided > 1.0) res.p_two_sided = 1.0;
    res.significant_at_001 = res.p_two_sided < 0.01;
    return res;
}

// Product-moment correlation; nullopt when either input is constant.
inline std::optional<double> pearson(const std::vector<double>& xs,
                                     const std::vector<double>& ys) {
    if (xs.size() != ys.size()) throw std::invalid_argument("pearson: length mismatch");
    if (xs.size() < 2) throw std::invalid_argument("pearson: need at least two points");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) { mx += xs[i]; my += ys[i]; }
    mx /= static_cast<double>(xs.size());
    my /= static_cast<double>(ys.size());
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return std::nullopt;
    double r = sxy / std::sqrt(sxx * syy);
    if (r > 1.0) r = 1.0;
    if (r < -1.0) r = -1.0;
    return r;
}

struct QuadrantCounts {
    // single-step x multi-step; "single correct" means all sub-results correct
    std::size_t cc = 0, cw = 0, wc = 0, ww = 0;
    double p_cc = 0.0, p_cw = 0.0, p_wc = 0.0, p_ww = 0.0;
    std::size_t total() const { return cc + cw + wc + ww; }
};

struct ProbedQuestion {
    std::vector<bool> single_step_results;
    bool multi_correct = false;
};

inline QuadrantCounts quadrant_analysis(const std::vector<ProbedQuestion>& paired) {
    if (paired.empty()) throw std::invalid_argument("quadrant_analysis: empty input");
    QuadrantCounts q;
    for (const auto& p : paired) {
        if (p.single_step_results.empty())
            throw std::invalid_argument("quadrant_analysis: question without single-step results");
        bool single_ok = true;
        for (bool b : p.single_step_results) single_ok = single_ok && b;
        if (single_ok && p.multi_correct) ++q.cc;
        else if (single_ok && !p.multi_correct) ++q.cw;
        else if (!single_ok && p.multi_correct) ++q.wc;
        else ++q.ww;
    }
    double n = static_cast<double>(q.total());
    q.p_cc = static_cast<double>(q.cc) / n;
    q.p_cw = static_cast<double>(q.cw) / n;
    q.p_wc = static_cast<double>(q.wc) / n;
    q.p_ww = static_cast<double>(q.ww) / n;
    return q;
}

struct PrecedenceConstraint {
    int before = 0;
    int after = 0;
};

// Fraction of precedence constraints honored by a step sequence; a constraint
// naming a missing step counts as unsatisfied.
inline double constraint_satisfaction(const std::vector<int>& sequence,
                                      const std::vector<PrecedenceConstraint>& constraints) {
    if (constraints.empty())
        throw std::invalid_argument("constraint_satisfaction: no constraints");
    std::map<int, std::size_t> pos;
    for (std::size_t i = 0; i < sequence.size(); ++i) {
        if (!pos.emplace(sequence[i], i).second)
            throw std::invalid_argument("constraint_satisfaction: duplicate step in sequence");
    }
    std::size_t satisfied = 0;
    for (const auto& c : constraints) {
        if (c.before == c.after)
            throw std::invalid_argument("constraint_satisfaction: degenerate constraint");
        auto b = pos.find(c.before);
        auto a = pos.find(c.after);
        if (b != pos.end() && a != pos.end() && b->second < a->second) ++satisfied;
    }
    return static_cast<double>(satisfied) / static_cast<double>(constraints.size());
}

}  // namespace grk
