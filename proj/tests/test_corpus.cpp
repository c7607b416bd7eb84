#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "codeeq/corpus.hpp"

#include <set>

#ifndef CODEEQ_DATA_DIR
#define CODEEQ_DATA_DIR "data"
#endif

using namespace codeeq;

namespace {

Corpus ingest_str(const std::string& jsonl, RejectionReport& report,
                  IngestOptions options = {}) {
    return ingest_text(jsonl, options, report, "inline");
}

const char* kEchoTests =
    "\"tests\": [{\"input\": \"1\\n\", \"output\": \"1\\n\"},"
    " {\"input\": \"7\\n\", \"output\": \"7\\n\"}]";

}  // namespace

TEST_CASE("bundled corpus ingests cleanly") {
    RejectionReport report;
    Corpus corpus =
        ingest(std::string(CODEEQ_DATA_DIR) + "/mini_corpus.jsonl", {}, report);
    CHECK(corpus.clusters.size() == 12);
    CHECK(report.counts.empty());
    std::set<std::string> names;
    for (const auto& cluster : corpus.clusters) {
        names.insert(cluster.problem_id);
        CHECK(cluster.correct.size() == 4);
        CHECK(cluster.incorrect.size() == 2);
        CHECK(cluster.suite.cases.size() >= 5);
        for (const auto& p : cluster.correct) {
            CHECK(p.correct);
            CHECK(passes_suite(*p.ast, cluster.suite).passed);
            // stored source is the canonical form
            CHECK(pretty_print(*p.ast) == p.source);
        }
        for (const auto& p : cluster.incorrect)
            CHECK(!passes_suite(*p.ast, cluster.suite).passed);
    }
    CHECK(names.size() == 12);
}

TEST_CASE("missing file raises IoError") {
    RejectionReport report;
    CHECK_THROWS_AS(ingest("/nonexistent/corpus.jsonl", {}, report), IoError);
}

TEST_CASE("empty input yields an empty corpus") {
    RejectionReport report;
    Corpus corpus = ingest_str("", report);
    CHECK(corpus.clusters.empty());
    CHECK(report.counts.empty());
    CHECK(ingest_str("\n  \n", report).clusters.empty());
}

TEST_CASE("unparseable submissions are dropped but the cluster survives") {
    RejectionReport report;
    std::string line =
        std::string("{\"name\": \"echo\", ") + kEchoTests +
        ", \"solutions\": [\"print(input())\", \"import os\", \"x = (\"]}";
    Corpus corpus = ingest_str(line + "\n", report);
    REQUIRE(corpus.clusters.size() == 1);
    CHECK(corpus.clusters[0].correct.size() == 1);
    CHECK(report.counts.at("unsupported_construct") == 1);
    CHECK(report.counts.at("syntax_error") == 1);
    CHECK(report.log.size() == 2);
}

TEST_CASE("cluster with no passing solutions is dropped") {
    RejectionReport report;
    std::string line = std::string("{\"name\": \"echo\", ") + kEchoTests +
                       ", \"solutions\": [\"print(0)\"]}";
    Corpus corpus = ingest_str(line + "\n", report);
    CHECK(corpus.clusters.empty());
    CHECK(report.counts.at("no_correct_solutions") == 1);
}

TEST_CASE("clusters whose only correct solutions hang get a distinct reason") {
    RejectionReport report;
    std::string line =
        std::string("{\"name\": \"echo\", ") + kEchoTests +
        ", \"solutions\": [\"while True:\\n    x = 1\\n\"]}";
    Corpus corpus = ingest_str(line + "\n", report);
    CHECK(corpus.clusters.empty());
    CHECK(report.counts.at("all_correct_exceeded_budget") == 1);
}

TEST_CASE("min_tests filters small suites") {
    RejectionReport report;
    std::string line = std::string("{\"name\": \"echo\", ") + kEchoTests +
                       ", \"solutions\": [\"print(input())\"]}";
    IngestOptions options;
    options.min_tests = 3;
    Corpus corpus = ingest_str(line + "\n", report, options);
    CHECK(corpus.clusters.empty());
    CHECK(report.counts.at("too_few_tests") == 1);
}

TEST_CASE("reverification overrides declared verdicts") {
    RejectionReport report;
    std::string line =
        std::string("{\"name\": \"echo\", ") + kEchoTests +
        ", \"solutions\": [\"print(input())\", \"print(99)\"]"
        ", \"incorrect_solutions\": [\"x = input()\\nprint(x)\"]}";
    Corpus corpus = ingest_str(line + "\n", report);
    REQUIRE(corpus.clusters.size() == 1);
    // the mislabeled pair swaps sides under reverification
    CHECK(corpus.clusters[0].correct.size() == 2);
    CHECK(corpus.clusters[0].incorrect.size() == 1);
    CHECK(corpus.clusters[0].incorrect[0].id == "echo/s1");

    RejectionReport report2;
    IngestOptions trust;
    trust.reverify = false;
    Corpus declared = ingest_str(line + "\n", report2, trust);
    CHECK(declared.clusters[0].correct.size() == 2);
    CHECK(declared.clusters[0].incorrect.size() == 1);
    CHECK(declared.clusters[0].incorrect[0].id == "echo/i0");
}

TEST_CASE("schema violations carry line and field") {
    RejectionReport report;
    auto check_error = [&](const std::string& jsonl, int line,
                           const std::string& field) {
        try {
            ingest_str(jsonl, report);
            FAIL("expected SchemaError for: ", jsonl);
        } catch (const SchemaError& e) {
            CHECK(e.line() == line);
            CHECK(e.field() == field);
        }
    };
    check_error("not json\n", 1, "");
    check_error("{\"tests\": [], \"solutions\": []}\n", 1, "name");
    check_error("{\"name\": \"p\", \"solutions\": []}\n", 1, "tests");
    check_error(std::string("{\"name\": \"p\", ") + kEchoTests + "}\n", 1,
                "solutions");
    check_error(std::string("{\"name\": \"p\", ") + kEchoTests +
                    ", \"solutions\": [1]}\n",
                1, "solutions");
    std::string good = std::string("{\"name\": \"p\", ") + kEchoTests +
                       ", \"solutions\": [\"print(input())\"]}";
    check_error(good + "\n" + good + "\n", 2, "name");  // duplicate id
    check_error(good + "\n{\"name\": 3}\n", 2, "name");
}

TEST_CASE("rejection report serializes counts and log") {
    RejectionReport report;
    report.add("syntax_error", "p/s0");
    report.add("syntax_error", "p/s1");
    std::string j = report.to_json();
    CHECK(j.find("\"syntax_error\": 2") != std::string::npos);
    CHECK(j.find("p/s1") != std::string::npos);
}

TEST_CASE("corpus round-trips through to_jsonl") {
    RejectionReport report;
    Corpus corpus =
        ingest(std::string(CODEEQ_DATA_DIR) + "/mini_corpus.jsonl", {}, report);
    std::string dumped = to_jsonl(corpus);
    RejectionReport report2;
    Corpus again = ingest_str(dumped, report2);
    CHECK(report2.counts.empty());
    REQUIRE(again.clusters.size() == corpus.clusters.size());
    for (std::size_t i = 0; i < again.clusters.size(); ++i) {
        CHECK(again.clusters[i].problem_id == corpus.clusters[i].problem_id);
        REQUIRE(again.clusters[i].correct.size() ==
                corpus.clusters[i].correct.size());
        for (std::size_t k = 0; k < again.clusters[i].correct.size(); ++k)
            CHECK(again.clusters[i].correct[k].source ==
                  corpus.clusters[i].correct[k].source);
    }
    CHECK(to_jsonl(again) == dumped);
}

TEST_CASE("split is disjoint, seeded, and size-checked") {
    RejectionReport report;
    Corpus corpus =
        ingest(std::string(CODEEQ_DATA_DIR) + "/mini_corpus.jsonl", {}, report);
    SplitCounts counts{8, 2, 2};
    SplitResult a = split(corpus, counts, 42);
    SplitResult b = split(corpus, counts, 42);
    SplitResult c = split(corpus, counts, 43);

    CHECK(a.train.clusters.size() == 8);
    CHECK(a.val.clusters.size() == 2);
    CHECK(a.test.clusters.size() == 2);
    CHECK(a.train.split_tag == "train");
    CHECK(a.test.split_tag == "test");

    std::set<std::string> seen;
    for (const auto* part : {&a.train, &a.val, &a.test})
        for (const auto& cluster : part->clusters)
            CHECK(seen.insert(cluster.problem_id).second);
    CHECK(seen.size() == 12);

    auto names = [](const Corpus& part) {
        std::vector<std::string> out;
        for (const auto& cl : part.clusters) out.push_back(cl.problem_id);
        return out;
    };
    CHECK(names(a.train) == names(b.train));
    CHECK(names(a.val) == names(b.val));
    CHECK(names(a.train) != names(c.train));

    CHECK_THROWS_AS(split(corpus, SplitCounts{10, 2, 2}, 1),
                    InsufficientClusters);
}
