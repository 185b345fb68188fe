#pragma once

#include <cctype>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace grk {

enum class TaskKind { connectivity, shortest_path };

inline const char* to_string(TaskKind k) {
    return k == TaskKind::connectivity ? "connectivity" : "shortest_path";
}

inline std::optional<TaskKind> task_kind_from_string(std::string_view s) {
    if (s == "connectivity") return TaskKind::connectivity;
    if (s == "shortest_path") return TaskKind::shortest_path;
    return std::nullopt;
}

enum class DiagCode {
    missing_tag,
    duplicate_tag,
    tag_order,
    empty_answer,
    bad_step_line,
    bad_answer_grammar,
};

inline const char* to_string(DiagCode c) {
    switch (c) {
        case DiagCode::missing_tag: return "missing_tag";
        case DiagCode::duplicate_tag: return "duplicate_tag";
        case DiagCode::tag_order: return "tag_order";
        case DiagCode::empty_answer: return "empty_answer";
        case DiagCode::bad_step_line: return "bad_step_line";
        case DiagCode::bad_answer_grammar: return "bad_answer_grammar";
    }
    return "?";
}

struct ParseDiagnostic {
    DiagCode code;
    std::optional<int> line;
    std::string detail;
};

struct ParsedResponse {
    std::string think;
    std::vector<std::string> step_lines;  // nonempty lines of the response section
    std::string answer_raw;
    bool format_ok = false;
};

// A reasoning step. Connectivity steps assert one edge; shortest-path steps
// additionally claim the edge weight and a running total.
struct Step {
    struct Connectivity { int u, v; };
    struct ShortestPath { int u, v; std::int64_t claimed_weight, claimed_total; };
    struct Unparsed { std::string raw; };
    std::variant<Connectivity, ShortestPath, Unparsed> data;

    bool parsed() const { return !std::holds_alternative<Unparsed>(data); }
};

struct AnswerPayload {
    struct Connectivity { bool claim; };
    struct ShortestPath { std::vector<int> path; std::int64_t length; };
    struct Unparseable {};
    std::variant<Connectivity, ShortestPath, Unparseable> data;

    bool parseable() const { return !std::holds_alternative<Unparseable>(data); }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

inline void skip_ws(std::string_view s, std::size_t& i) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
}

inline bool eat(std::string_view s, std::size_t& i, std::string_view lit, bool ci = false) {
    if (s.size() - i < lit.size()) return false;
    for (std::size_t k = 0; k < lit.size(); ++k) {
        char a = s[i + k], b = lit[k];
        if (ci) a = static_cast<char>(std::tolower(static_cast<unsigned char>(a)));
        if (a != b) return false;
    }
    i += lit.size();
    return true;
}

inline std::optional<std::int64_t> eat_int(std::string_view s, std::size_t& i) {
    std::size_t start = i;
    std::int64_t v = 0;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
        if (v > (INT64_MAX - 9) / 10) return std::nullopt;  // overflow guard
        v = v * 10 + (s[i] - '0');
        ++i;
    }
    if (i == start) return std::nullopt;
    return v;
}

// "U -> V", single spaces optional.
inline std::optional<std::pair<int, int>> parse_edge_head(std::string_view s, std::size_t& i) {
    skip_ws(s, i);
    auto u = eat_int(s, i);
    if (!u || *u > INT32_MAX) return std::nullopt;
    skip_ws(s, i);
    if (!eat(s, i, "->")) return std::nullopt;
    skip_ws(s, i);
    auto v = eat_int(s, i);
    if (!v || *v > INT32_MAX) return std::nullopt;
    return std::make_pair(static_cast<int>(*u), static_cast<int>(*v));
}

}  // namespace detail

// Splits a completion on the literal <think>/<response>/<answer> tag pairs.
// Never fails: any malformation yields format_ok=false plus diagnostics.
inline ParsedResponse extract_sections(std::string_view completion,
                                       std::vector<ParseDiagnostic>* diags = nullptr) {
    ParsedResponse out;
    std::vector<ParseDiagnostic> local;
    auto& d = diags ? *diags : local;

    struct Section { const char* open; const char* close; std::string body; std::size_t open_pos = 0; bool ok = false; };
    Section secs[3] = {{"<think>", "</think>", "", 0, false},
                       {"<response>", "</response>", "", 0, false},
                       {"<answer>", "</answer>", "", 0, false}};
    bool ok = true;
    for (auto& sec : secs) {
        auto open = completion.find(sec.open);
        if (open == std::string_view::npos) {
            d.push_back({DiagCode::missing_tag, std::nullopt, std::string(sec.open) + " not found"});
            ok = false;
            continue;
        }
        if (completion.find(sec.open, open + 1) != std::string_view::npos) {
            d.push_back({DiagCode::duplicate_tag, std::nullopt, std::string(sec.open) + " appears more than once"});
            ok = false;
            continue;
        }
        auto close = completion.find(sec.close, open);
        if (close == std::string_view::npos) {
            d.push_back({DiagCode::missing_tag, std::nullopt, std::string(sec.close) + " not found"});
            ok = false;
            continue;
        }
        if (completion.find(sec.close, close + 1) != std::string_view::npos) {
            d.push_back({DiagCode::duplicate_tag, std::nullopt, std::string(sec.close) + " appears more than once"});
            ok = false;
            continue;
        }
        std::size_t body_start = open + std::string_view(sec.open).size();
        sec.body = std::string(detail::trim(completion.substr(body_start, close - body_start)));
        sec.open_pos = open;
        sec.ok = true;
    }
    if (ok && !(secs[0].open_pos < secs[1].open_pos && secs[1].open_pos < secs[2].open_pos)) {
        d.push_back({DiagCode::tag_order, std::nullopt, "sections out of think < response < answer order"});
        ok = false;
    }
    if (secs[2].ok && secs[2].body.empty()) {
        d.push_back({DiagCode::empty_answer, std::nullopt, "answer section is empty"});
        ok = false;
    }

    if (secs[0].ok) out.think = secs[0].body;
    if (secs[2].ok) out.answer_raw = secs[2].body;
    if (secs[1].ok) {
        std::string_view body = secs[1].body;
        std::size_t pos = 0;
        while (pos <= body.size()) {
            auto nl = body.find('\n', pos);
            auto line = detail::trim(body.substr(pos, nl == std::string_view::npos ? nl : nl - pos));
            if (!line.empty()) out.step_lines.emplace_back(line);
            if (nl == std::string_view::npos) break;
            pos = nl + 1;
        }
    }
    out.format_ok = ok;
    return out;
}

inline Step parse_step(TaskKind kind, std::string_view raw) {
    std::size_t i = 0;
    auto edge = detail::parse_edge_head(raw, i);
    if (edge) {
        if (kind == TaskKind::connectivity) {
            detail::skip_ws(raw, i);
            if (i == raw.size()) return {Step::Connectivity{edge->first, edge->second}};
        } else {
            detail::skip_ws(raw, i);
            if (detail::eat(raw, i, ":")) {
                detail::skip_ws(raw, i);
                auto w = detail::eat_int(raw, i);
                detail::skip_ws(raw, i);
                if (w && detail::eat(raw, i, ";")) {
                    detail::skip_ws(raw, i);
                    if (detail::eat(raw, i, "total", true)) {
                        detail::skip_ws(raw, i);
                        if (detail::eat(raw, i, "=")) {
                            detail::skip_ws(raw, i);
                            auto t = detail::eat_int(raw, i);
                            detail::skip_ws(raw, i);
                            if (t && i == raw.size() && *w > 0 && *t > 0)
                                return {Step::ShortestPath{edge->first, edge->second, *w, *t}};
                        }
                    }
                }
            }
        }
    }
    return {Step::Unparsed{std::string(raw)}};
}

inline std::vector<Step> parse_steps(TaskKind kind, const std::vector<std::string>& step_lines) {
    std::vector<Step> out;
    out.reserve(step_lines.size());
    for (const auto& line : step_lines) out.push_back(parse_step(kind, line));
    return out;
}

inline AnswerPayload parse_answer(TaskKind kind, std::string_view answer_raw) {
    auto s = detail::trim(answer_raw);
    if (kind == TaskKind::connectivity) {
        std::size_t i = 0;
        if (detail::eat(s, i, "yes", true) && i == s.size()) return {AnswerPayload::Connectivity{true}};
        i = 0;
        if (detail::eat(s, i, "no", true) && i == s.size()) return {AnswerPayload::Connectivity{false}};
        return {AnswerPayload::Unparseable{}};
    }
    // path=a->b->...->z ; length=L
    std::size_t i = 0;
    if (!detail::eat(s, i, "path", true)) return {AnswerPayload::Unparseable{}};
    detail::skip_ws(s, i);
    if (!detail::eat(s, i, "=")) return {AnswerPayload::Unparseable{}};
    std::vector<int> path;
    while (true) {
        detail::skip_ws(s, i);
        auto v = detail::eat_int(s, i);
        if (!v || *v > INT32_MAX) return {AnswerPayload::Unparseable{}};
        path.push_back(static_cast<int>(*v));
        detail::skip_ws(s, i);
        if (!detail::eat(s, i, "->")) break;
    }
    if (path.size() < 2) return {AnswerPayload::Unparseable{}};
    if (!detail::eat(s, i, ";")) return {AnswerPayload::Unparseable{}};
    detail::skip_ws(s, i);
    if (!detail::eat(s, i, "length", true)) return {AnswerPayload::Unparseable{}};
    detail::skip_ws(s, i);
    if (!detail::eat(s, i, "=")) return {AnswerPayload::Unparseable{}};
    detail::skip_ws(s, i);
    auto len = detail::eat_int(s, i);
    detail::skip_ws(s, i);
    if (!len || i != s.size()) return {AnswerPayload::Unparseable{}};
    return {AnswerPayload::ShortestPath{std::move(path), *len}};
}

}  // namespace grk
