#include <doctest.h>

#include "grk/reward.hpp"
#include "grk/rollout.hpp"

using namespace grk;

namespace {

Graph triangle() { return Graph(3, {{0, 1}, {1, 2}, {0, 2}}, std::vector<int>{1, 2, 5}); }

TaskInstance conn_inst(bool gt) {
    Graph g(3, {{0, 1}, {1, 2}});
    return {"connectivity-test-0", TaskKind::connectivity, g, 0, 2, GroundTruth(gt)};
}

TaskInstance sp_inst() {
    return {"shortest_path-test-0", TaskKind::shortest_path, triangle(), 0, 2,
            GroundTruth(std::int64_t{3})};
}

}  // namespace

TEST_CASE("Score arithmetic is exact") {
    CHECK(Score(1, 5) + Score(1, 10) + Score(1, 20) + Score(1) == Score(27, 20));
    CHECK(Score(1, 20) / 1 == Score(1, 20));
    CHECK((Score(1, 20) + Score(1, 20) + Score(1, 20)) / 3 == Score(1, 20));
    CHECK((Score(1, 20) + Score(-2)) / 2 == Score(-39, 40));
    CHECK(Score::from_double(0.05) == Score(1, 20));
    CHECK(Score::from_double(-2.0) == Score(-2));
    CHECK(Score(2, 4) == Score(1, 2));
    CHECK(Score(-2) < Score(0));
}

TEST_CASE("reward config defaults match the published constants") {
    RewardConfig cfg;
    CHECK(cfg.step_correct == Score(1, 20));
    CHECK(cfg.hallucination == Score(-2));
    CHECK(cfg.answer_correct == Score(1));
    CHECK(cfg.overall_format == Score(1, 5));
    CHECK(cfg.process_format == Score(1, 10));
    CHECK(cfg.step_incorrect == Score(0));
    CHECK(cfg.answer_incorrect == Score(0));
    CHECK(cfg.format_penalty == Score(0));
    cfg.validate();
    RewardConfig bad;
    bad.hallucination = Score(1);
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("verify_connectivity_step") {
    Graph g(3, {{0, 1}});
    auto ok = verify_connectivity_step(g, parse_step(TaskKind::connectivity, "0 -> 1"));
    CHECK(ok.verdict == Verdict::correct);
    CHECK(ok.awarded == Score(1, 20));

    auto ghost = verify_connectivity_step(g, parse_step(TaskKind::connectivity, "0 -> 9"));
    CHECK(ghost.verdict == Verdict::hallucinated);
    CHECK(ghost.awarded == Score(-2));

    auto missing = verify_connectivity_step(g, parse_step(TaskKind::connectivity, "0 -> 2"));
    CHECK(missing.verdict == Verdict::hallucinated);

    auto junk = verify_connectivity_step(g, parse_step(TaskKind::connectivity, "free text"));
    CHECK(junk.verdict == Verdict::incorrect);
    CHECK(junk.awarded == Score(0));
}

TEST_CASE("verify_shortest_path_step") {
    auto g = triangle();
    StepChain start;
    auto first = verify_shortest_path_step(
        g, parse_step(TaskKind::shortest_path, "0 -> 1 : 1 ; total=1"), start);
    CHECK(first.verdict == Verdict::correct);

    auto wrong_weight = verify_shortest_path_step(
        g, parse_step(TaskKind::shortest_path, "1 -> 2 : 7 ; total=8"), start);
    CHECK(wrong_weight.verdict == Verdict::hallucinated);

    StepChain after{1, 1};
    auto bad_total = verify_shortest_path_step(
        g, parse_step(TaskKind::shortest_path, "1 -> 2 : 2 ; total=9"), after);
    CHECK(bad_total.verdict == Verdict::incorrect);

    auto good = verify_shortest_path_step(
        g, parse_step(TaskKind::shortest_path, "1 -> 2 : 2 ; total=3"), after);
    CHECK(good.verdict == Verdict::correct);

    StepChain elsewhere{1, 0};  // previous head is node 0, step starts at 1
    auto broken_chain = verify_shortest_path_step(
        g, parse_step(TaskKind::shortest_path, "1 -> 2 : 2 ; total=3"), elsewhere);
    CHECK(broken_chain.verdict == Verdict::incorrect);

    auto ghost = verify_shortest_path_step(
        g, parse_step(TaskKind::shortest_path, "0 -> 9 : 1 ; total=1"), start);
    CHECK(ghost.verdict == Verdict::hallucinated);
}

TEST_CASE("check_answer connectivity") {
    auto inst = conn_inst(true);
    auto right = check_answer(inst, parse_answer(TaskKind::connectivity, "yes"));
    CHECK(right.correct);
    CHECK(right.answer == Score(1));
    auto wrong = check_answer(inst, parse_answer(TaskKind::connectivity, "no"));
    CHECK_FALSE(wrong.correct);
    CHECK(wrong.answer == Score(0));
    auto unparseable = check_answer(inst, parse_answer(TaskKind::connectivity, "maybe"));
    CHECK_FALSE(unparseable.correct);
}

TEST_CASE("check_answer shortest path") {
    auto inst = sp_inst();
    auto right = check_answer(inst, parse_answer(TaskKind::shortest_path, "path=0->1->2 ; length=3"));
    CHECK(right.correct);
    CHECK(right.answer == Score(1));

    // hallucinated path element: edge 0-3 does not exist
    auto ghost = check_answer(inst, parse_answer(TaskKind::shortest_path, "path=0->3 ; length=5"));
    CHECK_FALSE(ghost.correct);
    CHECK(ghost.answer == Score(0));
    CHECK(ghost.answer_hallucination == Score(-2));

    // valid path, wrong length claim
    auto wrong_len = check_answer(inst, parse_answer(TaskKind::shortest_path, "path=0->2 ; length=5"));
    CHECK_FALSE(wrong_len.correct);
    CHECK(wrong_len.answer_hallucination == Score(0));

    // claimed length disagrees with the path's true weight
    auto mismatch = check_answer(inst, parse_answer(TaskKind::shortest_path, "path=0->1->2 ; length=4"));
    CHECK_FALSE(mismatch.correct);
    CHECK(mismatch.answer_hallucination == Score(0));

    // wrong endpoints
    auto detour = check_answer(inst, parse_answer(TaskKind::shortest_path, "path=1->2 ; length=2"));
    CHECK_FALSE(detour.correct);
}

TEST_CASE("score_response worked examples") {
    auto inst = conn_inst(true);
    std::string gold = render_gold_response(inst);

    auto process = score_response(inst, gold, RewardMode::process);
    CHECK(process.total == Score(27, 20));  // 0.2 + 0.1 + 0.05 + 1.0 = 1.35

    auto solution = score_response(inst, gold, RewardMode::solution);
    CHECK(solution.total == Score(6, 5));  // 0.2 + 1.0 = 1.2
    CHECK(solution.process_mean == Score(0));
    CHECK(solution.process_format == Score(0));

    // single hallucinated step, correct answer: 0.2 + 0.1 + (-2) + 1.0 = -0.7
    std::string halluc =
        "<think>x</think>\n<response>\n0 -> 9\n</response>\n<answer>yes</answer>";
    auto b = score_response(inst, halluc, RewardMode::process);
    CHECK(b.total == Score(-7, 10));
    REQUIRE(b.step_verdicts.size() == 1);
    CHECK(b.step_verdicts[0].verdict == Verdict::hallucinated);
}

TEST_CASE("score_response format handling") {
    auto inst = conn_inst(true);
    auto broken = score_response(inst, "no tags at all", RewardMode::process);
    CHECK(broken.overall_format == Score(0));
    CHECK_FALSE(broken.answer_correct_flag);
    CHECK(broken.total == Score(1, 10));  // vacuous process_format only

    // unparsable step line forfeits process_format but not overall format
    std::string messy =
        "<think>x</think>\n<response>\n0 -> 1\nI think it's fine\n</response>\n<answer>yes</answer>";
    auto b = score_response(inst, messy, RewardMode::process);
    CHECK(b.overall_format == Score(1, 5));
    CHECK(b.process_format == Score(0));
    CHECK(b.process_mean == Score(1, 40));  // mean of {0.05, 0}
}

TEST_CASE("answer hallucination penalty applies in solution mode too") {
    auto inst = sp_inst();
    std::string completion =
        "<think>x</think>\n<response>\n</response>\n<answer>path=0->3 ; length=5</answer>";
    auto b = score_response(inst, completion, RewardMode::solution);
    CHECK(b.answer_hallucination == Score(-2));
    CHECK(b.total == Score(1, 5) + Score(-2));
}

TEST_CASE("breakdown identity holds exactly") {
    auto inst = sp_inst();
    std::string samples[] = {
        render_gold_response(inst),
        "<think></think><response>garbage</response><answer>nope</answer>",
        "<answer>path=0->1->2 ; length=3</answer>",
        "<think>t</think>\n<response>\n0 -> 1 : 1 ; total=1\n1 -> 2 : 2 ; total=9\n</response>\n"
        "<answer>path=0->1->2 ; length=3</answer>",
    };
    for (const auto& s : samples) {
        for (auto mode : {RewardMode::solution, RewardMode::process}) {
            auto b = score_response(inst, s, mode);
            CHECK(b.total == b.overall_format + b.process_format + b.process_mean + b.answer +
                                 b.answer_hallucination);
        }
    }
}

TEST_CASE("answer_correct_flag is mode independent") {
    auto inst = conn_inst(false);
    std::string gold = render_gold_response(inst);
    std::string flipped = perturb(inst, gold, PerturbationOp::flip_answer, 1);
    for (const auto& c : {gold, flipped}) {
        auto p = score_response(inst, c, RewardMode::process);
        auto s = score_response(inst, c, RewardMode::solution);
        CHECK(p.answer_correct_flag == s.answer_correct_flag);
    }
}

TEST_CASE("replacing a correct step with a hallucinated one never raises the total") {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        GenGraphConfig cfg;
        cfg.weighted = true;
        auto inst = gen_instance(TaskKind::shortest_path, cfg, std::nullopt, seed);
        std::string gold = render_gold_response(inst);
        auto base = score_response(inst, gold, RewardMode::process);
        auto mutated = perturb(inst, gold, PerturbationOp::hallucinate_edge, seed);
        auto worse = score_response(inst, mutated, RewardMode::process);
        CHECK(worse.total < base.total);
    }
}

TEST_CASE("reward ordering under defaults") {
    auto inst = conn_inst(true);
    std::string gold = render_gold_response(inst);
    std::string wrong_answer = perturb(inst, gold, PerturbationOp::flip_answer, 1);
    std::string halluc_step = perturb(inst, wrong_answer, PerturbationOp::hallucinate_edge, 1);
    auto r_gold = score_response(inst, gold, RewardMode::process).total;
    auto r_wrong = score_response(inst, wrong_answer, RewardMode::process).total;
    auto r_halluc = score_response(inst, halluc_step, RewardMode::process).total;
    CHECK(r_gold > r_wrong);
    CHECK(r_wrong > r_halluc);
}

TEST_CASE("reward record JSON shape") {
    auto inst = conn_inst(true);
    auto b = score_response(inst, render_gold_response(inst), RewardMode::process);
    auto j = reward_record_json(inst.id, RewardMode::process, b);
    CHECK(j["id"] == inst.id);
    CHECK(j["mode"] == "process");
    CHECK(j["total"] == 1.35);
    CHECK(j["answer_correct"] == true);
    CHECK(j["components"]["overall_format"] == 0.2);
    CHECK(j["components"]["process_mean"] == 0.05);
    CHECK(j["step_verdicts"].size() == b.step_verdicts.size());
}

TEST_CASE("reward config overrides from JSON") {
    auto cfg = reward_config_from_json(nlohmann::json{{"step_correct", 0.1}, {"hallucination", -1.5}});
    CHECK(cfg.step_correct == Score(1, 10));
    CHECK(cfg.hallucination == Score(-3, 2));
    CHECK(cfg.answer_correct == Score(1));
    CHECK_THROWS_AS(reward_config_from_json(nlohmann::json{{"answer_correct", -1.0}}),
                    std::invalid_argument);
}
