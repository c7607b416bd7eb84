#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "codeeq/judgeval.hpp"

#include <httplib.h>
#include <json.hpp>

#include <atomic>
#include <cmath>
#include <thread>

#ifndef CODEEQ_DATA_DIR
#define CODEEQ_DATA_DIR "data"
#endif

using namespace codeeq;
using Decision = JudgeVerdict::Decision;

namespace {

const Corpus& corpus() {
    static Corpus c = [] {
        RejectionReport report;
        return ingest(std::string(CODEEQ_DATA_DIR) + "/mini_corpus.jsonl", {},
                      report);
    }();
    return c;
}

const std::vector<BenchmarkInstance>& dataset() {
    static std::vector<BenchmarkInstance> d = [] {
        GenerationConfig cfg;
        cfg.master_seed = 2024;
        for (auto& q : cfg.quotas) q = {3, 3};
        return generate_dataset(corpus(), cfg).instances;
    }();
    return d;
}

std::optional<JudgeVerdict> verdict(Decision d) {
    JudgeVerdict v;
    v.decision = d;
    return v;
}

PairLabel label(bool equivalent,
                Prefix prefix = Prefix::Fe) {
    PairLabel l;
    l.prefix = prefix;
    l.flag = equivalent ? Variant::Sp : Variant::Np;
    l.ground_truth_equivalent = equivalent;
    return l;
}

}  // namespace

TEST_CASE("prompts embed both programs and the expected instructions") {
    std::string basic = build_prompt(PromptStyle::Basic, "print(1)", "print(2)");
    CHECK(basic.find("answer only with one word: Yes or No") !=
          std::string::npos);
    CHECK(basic.find("Program 1: print(1)\nProgram 2: print(2)") !=
          std::string::npos);
    CHECK(basic.find("{prog") == std::string::npos);

    std::string cot = build_prompt(PromptStyle::Cot, "a = 1", "b = 2");
    CHECK(cot.find("reasoning step-by-step") != std::string::npos);
    CHECK(cot.find("FINAL_ANSWER_IS_YES\nFINAL_ANSWER_IS_NO") !=
          std::string::npos);
    CHECK(cot.find("Program 1: a = 1\nProgram 2: b = 2") != std::string::npos);
    CHECK(cot.find("{prog") == std::string::npos);
    CHECK(basic != cot);
}

TEST_CASE("basic verdicts accept only a bare yes or no") {
    CHECK(parse_verdict(PromptStyle::Basic, "Yes").decision == Decision::Yes);
    CHECK(parse_verdict(PromptStyle::Basic, "no").decision == Decision::No);
    CHECK(parse_verdict(PromptStyle::Basic, "  YES \n").decision ==
          Decision::Yes);
    CHECK(parse_verdict(PromptStyle::Basic, "Yes.").decision ==
          Decision::Unparseable);
    CHECK(parse_verdict(PromptStyle::Basic, "I think yes").decision ==
          Decision::Unparseable);
    CHECK(parse_verdict(PromptStyle::Basic, "").decision ==
          Decision::Unparseable);
}

TEST_CASE("cot verdicts use the last sentinel") {
    CHECK(parse_verdict(PromptStyle::Cot,
                        "reasoning...\nFINAL_ANSWER_IS_YES")
              .decision == Decision::Yes);
    CHECK(parse_verdict(PromptStyle::Cot,
                        "step 1\nstep 2\nFINAL_ANSWER_IS_NO")
              .decision == Decision::No);
    CHECK(parse_verdict(PromptStyle::Cot,
                        "maybe FINAL_ANSWER_IS_YES but actually\n"
                        "FINAL_ANSWER_IS_NO")
              .decision == Decision::No);
    CHECK(parse_verdict(PromptStyle::Cot,
                        "FINAL_ANSWER_IS_NO wait\nFINAL_ANSWER_IS_YES")
              .decision == Decision::Yes);
    CHECK(parse_verdict(PromptStyle::Cot, "the answer is yes").decision ==
          Decision::Unparseable);
    // raw text is preserved for the report
    CHECK(parse_verdict(PromptStyle::Cot, "abc").raw_response == "abc");
}

TEST_CASE("metrics match a hand-computed confusion matrix") {
    // TP=3 FP=1 FN=2 TN=4
    std::vector<std::optional<JudgeVerdict>> verdicts = {
        verdict(Decision::Yes), verdict(Decision::Yes), verdict(Decision::Yes),
        verdict(Decision::Yes), verdict(Decision::No),  verdict(Decision::No),
        verdict(Decision::No),  verdict(Decision::No),  verdict(Decision::No),
        verdict(Decision::No)};
    std::vector<PairLabel> labels = {
        label(true),  label(true),  label(true),  label(false), label(true),
        label(true),  label(false), label(false), label(false), label(false)};
    MetricsReport m = compute_metrics(verdicts, labels);
    CHECK(m.total == 10);
    CHECK(m.acc == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(m.w_acc == doctest::Approx(0.7).epsilon(1e-12));  // 3/5 and 4/5
    CHECK(m.pos_f1 == doctest::Approx(6.0 / 9.0).epsilon(1e-12));
    CHECK(m.neg_f1 == doctest::Approx(8.0 / 11.0).epsilon(1e-12));
    CHECK(m.mac_f1 ==
          doctest::Approx((6.0 / 9.0 + 8.0 / 11.0) / 2.0).epsilon(1e-12));
    CHECK(m.mic_f1_binary == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(m.mic_f1_pooled_cells ==
          doctest::Approx(14.0 / 17.0).epsilon(1e-12));  // 2*7/(2*7+3)
    CHECK(m.unparseable == 0);
    CHECK(m.skipped == 0);
}

TEST_CASE("constant-no scoring on a 25 percent positive mix") {
    std::vector<std::optional<JudgeVerdict>> verdicts;
    std::vector<PairLabel> labels;
    for (int i = 0; i < 16; ++i) {
        verdicts.push_back(verdict(Decision::No));
        labels.push_back(label(i < 4));
    }
    MetricsReport m = compute_metrics(verdicts, labels);
    CHECK(m.acc == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(m.w_acc == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(m.pos_f1 == 0.0);
    CHECK(m.neg_f1 == doctest::Approx(2.0 * 0.75 / 1.75).epsilon(1e-12));
}

TEST_CASE("unparseable verdicts always score as the wrong class") {
    std::vector<std::optional<JudgeVerdict>> verdicts = {
        verdict(Decision::Unparseable), verdict(Decision::Unparseable)};
    std::vector<PairLabel> labels = {label(true), label(false)};
    MetricsReport m = compute_metrics(verdicts, labels);
    CHECK(m.acc == 0.0);
    CHECK(m.unparseable == 2);
}

TEST_CASE("skipped instances leave every denominator") {
    std::vector<std::optional<JudgeVerdict>> verdicts = {
        verdict(Decision::Yes), std::nullopt, verdict(Decision::No)};
    std::vector<PairLabel> labels = {label(true), label(true), label(false)};
    MetricsReport m = compute_metrics(verdicts, labels);
    CHECK(m.total == 2);
    CHECK(m.skipped == 1);
    CHECK(m.acc == 1.0);

    std::vector<std::optional<JudgeVerdict>> none = {std::nullopt};
    CHECK_THROWS_AS(compute_metrics(none, {label(true)}), EmptyInput);
    CHECK_THROWS_AS(compute_metrics({}, {}), EmptyInput);
}

TEST_CASE("single-class batches warn instead of dividing by zero") {
    std::vector<std::optional<JudgeVerdict>> verdicts = {
        verdict(Decision::No), verdict(Decision::No)};
    std::vector<PairLabel> labels = {label(false), label(false)};
    MetricsReport m = compute_metrics(verdicts, labels);
    CHECK(m.acc == 1.0);
    CHECK(m.pos_f1 == 0.0);
    CHECK(!m.warnings.empty());
}

TEST_CASE("oracle judge scores perfectly on generated data") {
    OracleJudge oracle(corpus());
    EvaluationResult result = evaluate(dataset(), oracle, PromptStyle::Basic);
    CHECK(result.perturbed.acc == 1.0);
    CHECK(result.perturbed.w_acc == 1.0);
    CHECK(result.original.acc == 1.0);
    CHECK(result.perturbed.skipped == 0);
    for (const auto& [cell, a] : result.perturbed.cell_accuracy)
        CHECK(a == 1.0);
}

TEST_CASE("syntactic judge only accepts identical unperturbed pairs") {
    SyntacticJudge judge;
    EvaluationResult result = evaluate(dataset(), judge, PromptStyle::Basic);
    // on originals: id pairs are identical (correct Yes), fe pairs are not
    CHECK(result.original.cell_accuracy.at("id-sp") == 1.0);
    CHECK(result.original.cell_accuracy.at("fe-sp") == 0.0);
    CHECK(result.original.cell_accuracy.at("ne-np") == 1.0);
    // on perturbed pairs nothing stays identical, so all positives are missed
    CHECK(result.perturbed.cell_accuracy.at("id-sp") == 0.0);
    CHECK(result.perturbed.cell_accuracy.at("ne-np") == 1.0);
}

TEST_CASE("evaluation is thread-count independent") {
    OracleJudge oracle(corpus());
    EvaluationResult one = evaluate(dataset(), oracle, PromptStyle::Cot, 1);
    EvaluationResult four = evaluate(dataset(), oracle, PromptStyle::Cot, 4);
    CHECK(one.to_json() == four.to_json());
    CHECK(one.style == PromptStyle::Cot);
    CHECK(one.to_text().find("Per-category accuracy") != std::string::npos);
}

TEST_CASE("judge outages become skips, not crashes") {
    class FlakyJudge : public Judge {
      public:
        JudgeVerdict judge_instance(const BenchmarkInstance& instance,
                                    bool) override {
            if (instance.index % 2 == 1) throw JudgeUnavailable("down");
            JudgeVerdict v;
            v.decision = Decision::No;
            return v;
        }
        std::string name() const override { return "flaky"; }
    };
    FlakyJudge judge;
    EvaluationResult result = evaluate(dataset(), judge, PromptStyle::Basic);
    CHECK(result.perturbed.skipped > 0);
    CHECK(result.perturbed.total + result.perturbed.skipped ==
          static_cast<long long>(dataset().size()));
    CHECK(result.to_text().find("Skipped") != std::string::npos);
}

TEST_CASE("remote judge speaks the chat protocol") {
    httplib::Server server;
    std::atomic<int> calls{0};
    std::string last_auth;
    std::string last_body;
    server.Post("/v1/chat/completions",
                [&](const httplib::Request& req, httplib::Response& res) {
                    calls += 1;
                    last_auth = req.get_header_value("Authorization");
                    last_body = req.body;
                    nlohmann::json reply = {
                        {"choices",
                         {{{"message", {{"content", "FINAL_ANSWER_IS_NO"}}}}}}};
                    res.set_content(reply.dump(), "application/json");
                });
    int port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    std::thread serving([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    RemoteJudgeConfig cfg;
    cfg.endpoint =
        "http://127.0.0.1:" + std::to_string(port) + "/v1/chat/completions";
    cfg.model = "test-model";
    cfg.api_key = "sk-test";
    cfg.style = PromptStyle::Cot;
    RemoteJudge judge(cfg);
    JudgeVerdict v = judge.judge_instance(dataset()[0], false);
    CHECK(v.decision == Decision::No);
    CHECK(v.latency_ms >= 0.0);
    CHECK(calls == 1);
    CHECK(last_auth == "Bearer sk-test");
    nlohmann::json body = nlohmann::json::parse(last_body);
    CHECK(body["model"] == "test-model");
    CHECK(body["temperature"] == 0);
    std::string content = body["messages"][0]["content"];
    CHECK(content.find("FINAL_ANSWER_IS_YES") != std::string::npos);
    CHECK(content.find(dataset()[0].perturbed[0]) != std::string::npos);

    server.stop();
    serving.join();
}

TEST_CASE("remote judge retries then reports unavailability") {
    httplib::Server server;
    std::atomic<int> calls{0};
    server.Post("/v1/chat/completions",
                [&](const httplib::Request&, httplib::Response& res) {
                    calls += 1;
                    res.status = 500;
                });
    int port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    std::thread serving([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    RemoteJudgeConfig cfg;
    cfg.endpoint =
        "http://127.0.0.1:" + std::to_string(port) + "/v1/chat/completions";
    cfg.model = "test-model";
    cfg.timeout_seconds = 5;
    RemoteJudge judge(cfg);
    CHECK_THROWS_AS(judge.judge_instance(dataset()[0], false),
                    JudgeUnavailable);
    CHECK(calls == 2);

    server.stop();
    serving.join();

    RemoteJudgeConfig dead = cfg;
    dead.endpoint = "http://127.0.0.1:1/v1/chat/completions";
    dead.timeout_seconds = 1;
    RemoteJudge unreachable(dead);
    CHECK_THROWS_AS(unreachable.judge_instance(dataset()[0], false),
                    JudgeUnavailable);
}
