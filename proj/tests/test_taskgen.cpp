#include <doctest.h>

#include <set>
#include <string>

#include "grk/reward.hpp"
#include "grk/taskgen.hpp"

using namespace grk;

namespace {

GenGraphConfig cfg_for(TaskKind kind) {
    GenGraphConfig cfg;
    cfg.weighted = kind == TaskKind::shortest_path;
    return cfg;
}

DatasetSpec tiny_spec(int count) {
    DatasetSpec spec;
    spec.train_count_per_kind = count;
    spec.test_count_per_kind = count;
    spec.master_seed = 7;
    return spec;
}

}  // namespace

TEST_CASE("gen_instance honors the requested connectivity label") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        auto no = gen_instance(TaskKind::connectivity, cfg_for(TaskKind::connectivity), false, seed);
        CHECK_FALSE(is_connected(no.graph, no.source, no.target));
        CHECK_FALSE(std::get<bool>(no.ground_truth));
        auto yes = gen_instance(TaskKind::connectivity, cfg_for(TaskKind::connectivity), true, seed);
        CHECK(is_connected(yes.graph, yes.source, yes.target));
        CHECK(yes.source != yes.target);
    }
}

TEST_CASE("gen_instance shortest_path instances are connected with positive length") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        auto inst = gen_instance(TaskKind::shortest_path, cfg_for(TaskKind::shortest_path),
                                 std::nullopt, seed);
        CHECK(std::get<std::int64_t>(inst.ground_truth) >= 1);
        CHECK(is_connected(inst.graph, inst.source, inst.target));
    }
}

TEST_CASE("gen_instance is deterministic") {
    auto a = gen_instance(TaskKind::shortest_path, cfg_for(TaskKind::shortest_path), std::nullopt, 5);
    auto b = gen_instance(TaskKind::shortest_path, cfg_for(TaskKind::shortest_path), std::nullopt, 5);
    CHECK(instance_to_json(a).dump() == instance_to_json(b).dump());
}

TEST_CASE("gen_instance rejects impossible configs") {
    GenGraphConfig unweighted;
    CHECK_THROWS_AS(gen_instance(TaskKind::shortest_path, unweighted, std::nullopt, 0),
                    std::invalid_argument);
    // an (almost) complete graph essentially never disconnects two nodes
    GenGraphConfig dense;
    dense.node_min = dense.node_max = 6;
    dense.edge_probability = 0.999999;
    CHECK_THROWS_AS(gen_instance(TaskKind::connectivity, dense, false, 0), GenerationError);
}

TEST_CASE("build_dataset shape, quotas and determinism") {
    auto ds = build_dataset(tiny_spec(8));
    CHECK(ds.train.size() == 16);
    CHECK(ds.test.size() == 16);
    int yes = 0, no = 0;
    std::set<std::string> ids;
    for (const auto& inst : ds.train) {
        CHECK(ids.insert(inst.id).second);
        if (inst.kind == TaskKind::connectivity)
            (std::get<bool>(inst.ground_truth) ? yes : no)++;
    }
    CHECK(yes == 4);
    CHECK(no == 4);

    auto again = build_dataset(tiny_spec(8));
    CHECK(dataset_to_jsonl(ds.train) == dataset_to_jsonl(again.train));
    CHECK(dataset_to_jsonl(ds.test) == dataset_to_jsonl(again.test));

    // splits are disjoint as (graph, source, target) triples
    std::set<std::string> train_keys;
    for (const auto& inst : ds.train)
        train_keys.insert(graph_to_json(inst.graph).dump() + "|" + std::to_string(inst.source) +
                          "|" + std::to_string(inst.target));
    for (const auto& inst : ds.test)
        CHECK_FALSE(train_keys.contains(graph_to_json(inst.graph).dump() + "|" +
                                        std::to_string(inst.source) + "|" +
                                        std::to_string(inst.target)));
}

TEST_CASE("build_dataset minimal case") {
    DatasetSpec spec = tiny_spec(1);
    auto ds = build_dataset(spec);
    CHECK(ds.train.size() == 2);
    CHECK(ds.train[0].id == "connectivity-train-0");
    CHECK(ds.train[1].id == "shortest_path-train-0");
    DatasetSpec bad = spec;
    bad.train_count_per_kind = 0;
    CHECK_THROWS_AS(build_dataset(bad), std::invalid_argument);
}

TEST_CASE("render_prompt layout") {
    auto inst = gen_instance(TaskKind::connectivity, cfg_for(TaskKind::connectivity), true, 3);
    auto prompt = render_prompt(inst);
    CHECK(prompt.rfind("The graph has", 0) == 0);
    CHECK(prompt.find("Question: Is there a path between node") != std::string::npos);
    CHECK(prompt.size() >= std::string(kConnectivityInstruction).size());
    CHECK(prompt.substr(prompt.size() - std::string(kConnectivityInstruction).size()) ==
          kConnectivityInstruction);
    CHECK(render_prompt(inst) == prompt);

    auto sp = gen_instance(TaskKind::shortest_path, cfg_for(TaskKind::shortest_path), std::nullopt, 3);
    auto sp_prompt = render_prompt(sp);
    CHECK(sp_prompt.find("Question: What is the shortest path from node") != std::string::npos);
    CHECK(sp_prompt.substr(sp_prompt.size() - std::string(kShortestPathInstruction).size()) ==
          kShortestPathInstruction);
}

TEST_CASE("gold responses verify and earn the maximal constants") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        for (auto kind : {TaskKind::connectivity, TaskKind::shortest_path}) {
            std::optional<bool> label;
            if (kind == TaskKind::connectivity) label = seed % 2 == 0;
            auto inst = gen_instance(kind, cfg_for(kind), label, seed);
            auto gold = render_gold_response(inst);
            auto b = score_response(inst, gold, RewardMode::process);
            CAPTURE(inst.id);
            CAPTURE(gold);
            CHECK(b.answer_correct_flag);
            CHECK(b.answer_hallucination == Score(0));
            for (const auto& v : b.step_verdicts) CHECK(v.verdict == Verdict::correct);
            Score expected = b.step_verdicts.empty() ? Score(13, 10) : Score(27, 20);
            CHECK(b.total == expected);
        }
    }
}

TEST_CASE("gold round-trips through the parser") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        for (auto kind : {TaskKind::connectivity, TaskKind::shortest_path}) {
            auto inst = gen_instance(kind, cfg_for(kind), std::nullopt, seed + 1000);
            auto gold = render_gold_response(inst);
            auto parsed = extract_sections(gold);
            REQUIRE(parsed.format_ok);
            auto steps = parse_steps(kind, parsed.step_lines);
            for (const auto& s : steps) CHECK(s.parsed());
            auto payload = parse_answer(kind, parsed.answer_raw);
            REQUIRE(payload.parseable());
            if (kind == TaskKind::connectivity) {
                CHECK(std::get<AnswerPayload::Connectivity>(payload.data).claim ==
                      std::get<bool>(inst.ground_truth));
            } else {
                const auto& sp = std::get<AnswerPayload::ShortestPath>(payload.data);
                CHECK(sp.length == std::get<std::int64_t>(inst.ground_truth));
                CHECK(sp.path.front() == inst.source);
                CHECK(sp.path.back() == inst.target);
                CHECK(sp.path.size() == steps.size() + 1);
            }
        }
    }
}

TEST_CASE("gold shortest_path triangle example") {
    Graph g(3, {{0, 1}, {1, 2}, {0, 2}}, std::vector<int>{1, 2, 5});
    TaskInstance inst{"shortest_path-test-0", TaskKind::shortest_path, g, 0, 2,
                      GroundTruth(std::int64_t{3})};
    auto gold = render_gold_response(inst);
    CHECK(gold.find("0 -> 1 : 1 ; total=1\n1 -> 2 : 2 ; total=3") != std::string::npos);
    CHECK(gold.find("<answer>path=0->1->2 ; length=3</answer>") != std::string::npos);
}

TEST_CASE("gold no-connectivity with isolated source has zero steps") {
    Graph g(3, {{1, 2}});
    TaskInstance inst{"connectivity-test-0", TaskKind::connectivity, g, 0, 2, GroundTruth(false)};
    auto gold = render_gold_response(inst);
    auto parsed = extract_sections(gold);
    CHECK(parsed.format_ok);
    CHECK(parsed.step_lines.empty());
    CHECK(parsed.answer_raw == "no");
    auto b = score_response(inst, gold, RewardMode::process);
    CHECK(b.total == Score(13, 10));  // 0.2 + 0.1 + 0 + 1.0
}

TEST_CASE("instance JSON round-trip") {
    auto inst = gen_instance(TaskKind::shortest_path, cfg_for(TaskKind::shortest_path),
                             std::nullopt, 11, "shortest_path-train-3");
    auto j = instance_to_json(inst);
    CHECK(j["id"] == "shortest_path-train-3");
    CHECK(j.contains("prompt"));
    CHECK(j.contains("gold"));
    auto back = instance_from_json(j);
    CHECK(instance_to_json(back).dump() == j.dump());
}
