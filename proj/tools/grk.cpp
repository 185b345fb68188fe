// grk: synthetic graph-reasoning task generator, verifiable reward scorer and
// evaluation toolkit. See README.md for the JSONL schemas.

#include <atomic>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <httplib.h>
#include <json.hpp>

#include "grk/eval.hpp"
#include "grk/graph.hpp"
#include "grk/reward.hpp"
#include "grk/rollout.hpp"
#include "grk/taskgen.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitPartialFailure = 2;

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

std::vector<json> read_jsonl(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::vector<json> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            out.push_back(json::parse(line));
        } catch (const json::exception& e) {
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

std::vector<grk::TaskInstance> load_dataset(const fs::path& path) {
    std::vector<grk::TaskInstance> out;
    for (const auto& j : read_jsonl(path)) out.push_back(grk::instance_from_json(j));
    return out;
}

grk::RewardConfig load_reward_config(const std::string& flag_path) {
    std::string path = flag_path;
    if (path.empty()) {
        if (const char* env = std::getenv("GRK_REWARD_CONFIG")) path = env;
    }
    if (path.empty()) return {};
    return grk::reward_config_from_json(json::parse(read_file(path)));
}

grk::DatasetSpec spec_from_json(const json& j) {
    grk::DatasetSpec spec;
    if (j.contains("train_count_per_kind")) spec.train_count_per_kind = j["train_count_per_kind"];
    if (j.contains("test_count_per_kind")) spec.test_count_per_kind = j["test_count_per_kind"];
    if (j.contains("master_seed")) spec.master_seed = j["master_seed"];
    if (j.contains("train_yes_quota")) spec.train_yes_quota = j["train_yes_quota"].get<int>();
    if (j.contains("test_yes_quota")) spec.test_yes_quota = j["test_yes_quota"].get<int>();
    if (j.contains("graph")) {
        const auto& g = j["graph"];
        if (g.contains("node_min")) spec.graph.node_min = g["node_min"];
        if (g.contains("node_max")) spec.graph.node_max = g["node_max"];
        if (g.contains("edge_probability")) spec.graph.edge_probability = g["edge_probability"];
        if (g.contains("weight_min")) spec.graph.weight_min = g["weight_min"];
        if (g.contains("weight_max")) spec.graph.weight_max = g["weight_max"];
    }
    spec.validate();
    return spec;
}

// One ScoreRequest in, one ScoreResponse out; never throws.
json handle_score_request(const json& req, const std::vector<grk::TaskInstance>& dataset,
                          grk::RewardMode default_mode, const grk::RewardConfig& cfg) {
    json resp;
    resp["request_id"] = req.contains("request_id") ? req["request_id"] : json(nullptr);
    try {
        grk::RewardMode mode = default_mode;
        if (req.contains("mode")) {
            auto m = grk::reward_mode_from_string(req["mode"].get<std::string>());
            if (!m) throw std::invalid_argument("unknown mode");
            mode = *m;
        }
        std::string completion = req.at("completion").get<std::string>();
        std::optional<grk::TaskInstance> inline_inst;
        const grk::TaskInstance* inst = nullptr;
        if (req.contains("instance")) {
            inline_inst = grk::instance_from_json(req["instance"]);
            inst = &*inline_inst;
        } else if (req.contains("id")) {
            auto id = req["id"].get<std::string>();
            for (const auto& d : dataset)
                if (d.id == id) { inst = &d; break; }
            if (!inst) throw std::invalid_argument("unknown dataset id: " + id);
        } else {
            throw std::invalid_argument("request needs \"instance\" or \"id\"");
        }
        auto breakdown = grk::score_response(*inst, completion, mode, cfg);
        resp["record"] = grk::reward_record_json(inst->id, mode, breakdown);
    } catch (const std::exception& e) {
        resp["error"] = e.what();
    }
    return resp;
}

std::atomic<bool> g_interrupted{false};
httplib::Server* g_server = nullptr;

void on_signal(int) {
    g_interrupted = true;
    if (g_server) g_server->stop();
}

int cmd_gen(const std::string& spec_path, const std::string& out_dir,
            std::optional<std::uint64_t> seed_override) {
    grk::DatasetSpec spec = spec_path.empty() ? grk::DatasetSpec{}
                                              : spec_from_json(json::parse(read_file(spec_path)));
    if (seed_override) spec.master_seed = *seed_override;
    spec.validate();
    auto ds = grk::build_dataset(spec);
    write_file(fs::path(out_dir) / "train.jsonl", grk::dataset_to_jsonl(ds.train));
    write_file(fs::path(out_dir) / "test.jsonl", grk::dataset_to_jsonl(ds.test));
    std::cout << "wrote " << ds.train.size() << " train and " << ds.test.size()
              << " test instances to " << out_dir << "\n";
    return kExitOk;
}

int cmd_score(const std::string& dataset_path, const std::string& transcripts_path,
              const std::string& mode_str, const std::string& cfg_path,
              const std::string& out_dir) {
    auto mode = grk::reward_mode_from_string(mode_str);
    if (!mode) throw CLI::ValidationError("--mode", "must be solution or process");
    auto dataset = load_dataset(dataset_path);
    std::vector<grk::Transcript> transcripts;
    for (const auto& j : read_jsonl(transcripts_path))
        transcripts.push_back(grk::transcript_from_json(j));
    if (transcripts.empty()) throw std::runtime_error("transcript file is empty");
    auto cfg = load_reward_config(cfg_path);
    auto records = grk::score_transcripts(dataset, transcripts, *mode, cfg);

    std::string records_out;
    bool any_error = false;
    for (const auto& r : records) {
        if (r.ok) {
            records_out += grk::reward_record_json(r.id, *mode, r.breakdown).dump() + "\n";
        } else {
            any_error = true;
            records_out += json{{"id", r.id}, {"error", r.error}}.dump() + "\n";
        }
    }
    auto report = grk::accuracy_report(records);
    write_file(fs::path(out_dir) / "records.jsonl", records_out);
    write_file(fs::path(out_dir) / "report.json", grk::report_to_json(report).dump(2) + "\n");
    std::cout << grk::report_to_table(report);
    return any_error ? kExitPartialFailure : kExitOk;
}

int cmd_probe(const std::string& input_path, const std::string& kind) {
    auto lines = read_jsonl(input_path);
    if (kind == "quadrant") {
        std::vector<grk::ProbedQuestion> qs;
        for (const auto& j : lines)
            qs.push_back({j.at("single").get<std::vector<bool>>(), j.at("multi").get<bool>()});
        auto q = grk::quadrant_analysis(qs);
        json out = {{"counts", {{"cc", q.cc}, {"cw", q.cw}, {"wc", q.wc}, {"ww", q.ww}}},
                    {"proportions", {{"cc", q.p_cc}, {"cw", q.p_cw}, {"wc", q.p_wc}, {"ww", q.p_ww}}},
                    {"total", q.total()}};
        std::cout << out.dump(2) << "\n";
        return kExitOk;
    }
    if (kind == "constraints") {
        json out = json::array();
        double sum = 0.0;
        for (const auto& j : lines) {
            std::vector<grk::PrecedenceConstraint> cs;
            for (const auto& c : j.at("constraints"))
                cs.push_back({c.at(0).get<int>(), c.at(1).get<int>()});
            double frac = grk::constraint_satisfaction(j.at("sequence").get<std::vector<int>>(), cs);
            sum += frac;
            out.push_back({{"qid", j.value("qid", "")}, {"satisfied_fraction", frac}});
        }
        std::cout << json{{"per_question", out},
                          {"mean_satisfied_fraction", lines.empty() ? 0.0 : sum / lines.size()}}
                         .dump(2)
                  << "\n";
        return kExitOk;
    }
    throw CLI::ValidationError("--kind", "must be quadrant or constraints");
}

int cmd_sweep(const std::string& dataset_path, const std::string& policies_path,
              const std::string& cfg_path, int samples_per_instance, double margin,
              const std::string& pairs_out, const std::string& out_path) {
    auto dataset = load_dataset(dataset_path);
    if (dataset.empty()) throw std::runtime_error("dataset is empty");
    auto cfg = load_reward_config(cfg_path);
    auto policies_json = json::parse(read_file(policies_path));

    std::string pairs_jsonl;
    json results = json::array();
    std::vector<double> accs, mean_rewards;
    for (const auto& pj : policies_json.at("policies")) {
        grk::MockPolicy policy;
        policy.seed = pj.value("seed", 0ULL);
        for (const auto& [name, prob] : pj.at("probs").items()) {
            auto op = grk::perturbation_op_from_string(name);
            if (!op) throw std::runtime_error("unknown perturbation op: " + name);
            policy.probs[*op] = prob.get<double>();
        }
        std::size_t correct = 0, total = 0;
        double reward_sum = 0.0;
        for (const auto& inst : dataset) {
            auto completions = grk::sample_policy(inst, policy, samples_per_instance);
            std::vector<std::pair<std::string, double>> scored;
            for (const auto& c : completions) {
                auto b = grk::score_response(inst, c, grk::RewardMode::process, cfg);
                scored.emplace_back(c, b.total.to_double());
                reward_sum += b.total.to_double();
                if (b.answer_correct_flag) ++correct;
                ++total;
            }
            if (!pairs_out.empty())
                for (const auto& p : grk::build_preference_pairs(inst.id, scored, margin))
                    pairs_jsonl += grk::preference_pair_json(p).dump() + "\n";
        }
        double acc = static_cast<double>(correct) / static_cast<double>(total);
        double mean_reward = reward_sum / static_cast<double>(total);
        accs.push_back(acc);
        mean_rewards.push_back(mean_reward);
        results.push_back({{"policy", pj}, {"accuracy", acc}, {"mean_process_reward", mean_reward}});
    }
    json out = {{"policies", results}};
    if (accs.size() >= 2) {
        auto r = grk::pearson(accs, mean_rewards);
        out["pearson_accuracy_vs_reward"] = r ? json(*r) : json(nullptr);
    }
    if (!pairs_out.empty()) write_file(pairs_out, pairs_jsonl);
    if (!out_path.empty()) write_file(out_path, out.dump(2) + "\n");
    std::cout << out.dump(2) << "\n";
    return kExitOk;
}

int cmd_serve(bool stdio, const std::string& addr, const std::string& dataset_path,
              const std::string& mode_str, const std::string& cfg_path) {
    auto mode = grk::reward_mode_from_string(mode_str);
    if (!mode) throw CLI::ValidationError("--mode", "must be solution or process");
    auto cfg = load_reward_config(cfg_path);
    std::vector<grk::TaskInstance> dataset;
    if (!dataset_path.empty()) dataset = load_dataset(dataset_path);

    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);

    if (stdio) {
        std::string line;
        while (!g_interrupted && std::getline(std::cin, line)) {
            if (line.empty()) continue;
            json resp;
            try {
                resp = handle_score_request(json::parse(line), dataset, *mode, cfg);
            } catch (const json::exception& e) {
                resp = {{"request_id", nullptr}, {"error", std::string("malformed request: ") + e.what()}};
            }
            std::cout << resp.dump() << "\n" << std::flush;
        }
        return kExitOk;
    }

    auto colon = addr.rfind(':');
    if (colon == std::string::npos) throw CLI::ValidationError("--addr", "expected HOST:PORT");
    std::string host = addr.substr(0, colon);
    int port = std::stoi(addr.substr(colon + 1));
    httplib::Server svr;
    g_server = &svr;
    svr.Post("/v1/score", [&](const httplib::Request& req, httplib::Response& res) {
        json resp;
        int status = 200;
        try {
            resp = handle_score_request(json::parse(req.body), dataset, *mode, cfg);
            if (resp.contains("error")) status = 400;
        } catch (const json::exception& e) {
            resp = {{"request_id", nullptr}, {"error", std::string("malformed request: ") + e.what()}};
            status = 400;
        }
        res.status = status;
        res.set_content(resp.dump(), "application/json");
    });
    std::cerr << "listening on " << host << ":" << port << "\n";
    svr.listen(host, port);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"synthetic graph-reasoning tasks, verifiable rewards and evaluation"};
    app.require_subcommand(1);

    std::string spec_path, out_dir = "out", dataset_path, transcripts_path;
    std::string mode_str = "process", cfg_path, probe_input, probe_kind = "quadrant";
    std::string policies_path, pairs_out, sweep_out, addr;
    std::uint64_t seed = 0;
    bool seed_set = false, stdio = false;
    int samples = 4;
    double margin = 0.0;

    auto* gen = app.add_subcommand("gen", "generate a synthetic dataset");
    gen->add_option("--spec", spec_path, "dataset spec JSON file");
    gen->add_option("--out", out_dir, "output directory");
    gen->add_option("--seed", seed, "master seed override")->each([&](const std::string&) { seed_set = true; });

    auto* score = app.add_subcommand("score", "score a transcript file against a dataset");
    score->add_option("--dataset", dataset_path, "dataset JSONL")->required();
    score->add_option("--transcripts", transcripts_path, "transcript JSONL")->required();
    score->add_option("--mode", mode_str, "solution or process");
    score->add_option("--reward-config", cfg_path, "reward constants JSON");
    score->add_option("--out", out_dir, "output directory");

    auto* probe = app.add_subcommand("probe", "quadrant or constraint probe analysis");
    probe->add_option("--input", probe_input, "probe JSONL")->required();
    probe->add_option("--kind", probe_kind, "quadrant or constraints");

    auto* sweep = app.add_subcommand("sweep", "mock-policy sweep with reward correlation");
    sweep->add_option("--dataset", dataset_path, "dataset JSONL")->required();
    sweep->add_option("--policies", policies_path, "policy sweep config JSON")->required();
    sweep->add_option("--reward-config", cfg_path, "reward constants JSON");
    sweep->add_option("--samples", samples, "rollouts per instance per policy");
    sweep->add_option("--margin", margin, "preference pair margin");
    sweep->add_option("--pairs-out", pairs_out, "preference pair JSONL output");
    sweep->add_option("--out", sweep_out, "sweep result JSON output");

    auto* serve = app.add_subcommand("serve", "long-lived scoring endpoint");
    serve->add_flag("--stdio", stdio, "one ScoreRequest JSON per stdin line");
    serve->add_option("--addr", addr, "bind address HOST:PORT for POST /v1/score");
    serve->add_option("--dataset", dataset_path, "dataset JSONL for id lookups");
    serve->add_option("--mode", mode_str, "default reward mode");
    serve->add_option("--reward-config", cfg_path, "reward constants JSON");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed())
            return cmd_gen(spec_path, out_dir,
                           seed_set ? std::optional<std::uint64_t>(seed) : std::nullopt);
        if (score->parsed())
            return cmd_score(dataset_path, transcripts_path, mode_str, cfg_path, out_dir);
        if (probe->parsed()) return cmd_probe(probe_input, probe_kind);
        if (sweep->parsed())
            return cmd_sweep(dataset_path, policies_path, cfg_path, samples, margin, pairs_out,
                             sweep_out);
        if (serve->parsed()) {
            if (stdio == !addr.empty()) {
                // exactly one of --stdio / --addr
                std::cerr << "serve: pass exactly one of --stdio or --addr\n";
                return kExitValidation;
            }
            return cmd_serve(stdio, addr, dataset_path, mode_str, cfg_path);
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitOk;
}
