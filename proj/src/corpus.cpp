#include "codeeq/corpus.hpp"

#include "codeeq/transforms.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace codeeq {

using json = nlohmann::json;

void RejectionReport::add(const std::string& reason, const std::string& item) {
    counts[reason] += 1;
    log.push_back(reason + ": " + item);
}

std::string RejectionReport::to_json() const {
    json j;
    j["counts"] = json::object();
    for (const auto& [reason, count] : counts) j["counts"][reason] = count;
    j["log"] = log;
    return j.dump(2);
}

namespace {

// Verdict of one submission under the cluster suite. Budget blowups count
// as failures but are tracked so all-timeout clusters get a distinct drop
// reason.
struct Verdict {
    bool passes = false;
    bool timed_out = false;
};

Verdict verify(const Ast& ast, const TestSuite& suite) {
    Verdict v;
    SuiteReport report = passes_suite(ast, suite);
    v.passes = report.passed;
    for (const auto& c : report.cases)
        if (c.outcome.status == RunStatus::StepBudgetExceeded)
            v.timed_out = true;
    return v;
}

struct RawSubmission {
    std::string text;
    bool declared_correct;
    std::string id;
};

std::optional<SolutionCluster> build_cluster(const json& j, int line,
                                             const IngestOptions& options,
                                             RejectionReport& report) {
    if (!j.is_object()) throw SchemaError(line, "", "expected an object");
    if (!j.contains("name") || !j["name"].is_string())
        throw SchemaError(line, "name", "missing or not a string");
    std::string name = j["name"].get<std::string>();

    SolutionCluster cluster;
    cluster.problem_id = name;
    if (j.contains("difficulty") && !j["difficulty"].is_null()) {
        if (!j["difficulty"].is_number())
            throw SchemaError(line, "difficulty", "not a number");
        cluster.difficulty = j["difficulty"].get<double>();
    }

    if (!j.contains("tests") || !j["tests"].is_array())
        throw SchemaError(line, "tests", "missing or not an array");
    cluster.suite.problem_id = name;
    for (const auto& t : j["tests"]) {
        if (!t.is_object() || !t.contains("input") || !t.contains("output") ||
            !t["input"].is_string() || !t["output"].is_string())
            throw SchemaError(line, "tests",
                              "each test needs string input and output");
        cluster.suite.cases.push_back(
            {t["input"].get<std::string>(), t["output"].get<std::string>()});
    }
    if (cluster.suite.cases.size() < static_cast<size_t>(options.min_tests)) {
        report.add("too_few_tests", name);
        return std::nullopt;
    }

    auto read_sources = [&](const char* field,
                            bool declared) -> std::vector<RawSubmission> {
        std::vector<RawSubmission> out;
        if (!j.contains(field)) return out;
        if (!j[field].is_array())
            throw SchemaError(line, field, "not an array");
        int i = 0;
        for (const auto& s : j[field]) {
            if (!s.is_string())
                throw SchemaError(line, field, "solutions must be strings");
            std::string id = name + "/" + (declared ? "s" : "i") +
                             std::to_string(i++);
            out.push_back({s.get<std::string>(), declared, id});
        }
        return out;
    };
    if (!j.contains("solutions"))
        throw SchemaError(line, "solutions", "missing");
    std::vector<RawSubmission> raw = read_sources("solutions", true);
    for (auto& s : read_sources("incorrect_solutions", false))
        raw.push_back(std::move(s));

    bool any_declared_correct_timed_out = false;
    bool any_declared_correct_parsed = false;
    for (const auto& sub : raw) {
        Ast ast;
        try {
            ast = parse(sub.text);
        } catch (const ParseError& e) {
            report.add(e.kind() == ParseErrorKind::UnsupportedConstruct
                           ? "unsupported_construct"
                           : "syntax_error",
                       sub.id + " (" + e.what() + ")");
            continue;
        }
        if (sub.declared_correct) any_declared_correct_parsed = true;
        bool correct = sub.declared_correct;
        if (options.reverify) {
            Verdict v = verify(ast, cluster.suite);
            correct = v.passes;
            if (sub.declared_correct && v.timed_out)
                any_declared_correct_timed_out = true;
        }
        Program p;
        p.id = sub.id;
        p.source = pretty_print(ast);
        p.ast = std::make_shared<const Ast>(parse(p.source));
        p.correct = correct;
        (correct ? cluster.correct : cluster.incorrect).push_back(std::move(p));
    }

    if (cluster.correct.empty()) {
        if (any_declared_correct_parsed && any_declared_correct_timed_out)
            report.add("all_correct_exceeded_budget", name);
        else
            report.add("no_correct_solutions", name);
        return std::nullopt;
    }
    return cluster;
}

}  // namespace

Corpus ingest_text(const std::string& jsonl, const IngestOptions& options,
                   RejectionReport& report, const std::string& source_name) {
    Corpus corpus;
    corpus.source_name = source_name;
    std::istringstream in(jsonl);
    std::string line;
    int line_no = 0;
    std::set<std::string> seen_ids;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw SchemaError(line_no, "", e.what());
        }
        auto cluster = build_cluster(j, line_no, options, report);
        if (!cluster) continue;
        if (!seen_ids.insert(cluster->problem_id).second)
            throw SchemaError(line_no, "name",
                              "duplicate problem id " + cluster->problem_id);
        corpus.clusters.push_back(std::move(*cluster));
    }
    return corpus;
}

Corpus ingest(const std::string& path, const IngestOptions& options,
              RejectionReport& report) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return ingest_text(buf.str(), options, report, path);
}

std::string to_jsonl(const Corpus& corpus) {
    std::string out;
    for (const auto& cluster : corpus.clusters) {
        json j;
        j["name"] = cluster.problem_id;
        if (cluster.difficulty) j["difficulty"] = *cluster.difficulty;
        j["tests"] = json::array();
        for (const auto& c : cluster.suite.cases)
            j["tests"].push_back(
                {{"input", c.stdin_text}, {"output", c.expected_stdout}});
        j["solutions"] = json::array();
        for (const auto& p : cluster.correct) j["solutions"].push_back(p.source);
        j["incorrect_solutions"] = json::array();
        for (const auto& p : cluster.incorrect)
            j["incorrect_solutions"].push_back(p.source);
        out += j.dump();
        out += '\n';
    }
    return out;
}

SplitResult split(const Corpus& corpus, SplitCounts counts,
                  std::uint64_t seed) {
    std::size_t total = counts.train + counts.val + counts.test;
    if (total > corpus.clusters.size())
        throw InsufficientClusters(
            "requested " + std::to_string(total) + " clusters, corpus has " +
            std::to_string(corpus.clusters.size()));

    std::vector<std::size_t> order(corpus.clusters.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(seed);
    for (std::size_t i = order.size(); i > 1; --i)
        std::swap(order[i - 1], order[rng.below(i)]);

    SplitResult result;
    result.train.source_name = corpus.source_name;
    result.train.split_tag = "train";
    result.val.source_name = corpus.source_name;
    result.val.split_tag = "val";
    result.test.source_name = corpus.source_name;
    result.test.split_tag = "test";
    std::size_t pos = 0;
    for (std::size_t i = 0; i < counts.train; ++i)
        result.train.clusters.push_back(corpus.clusters[order[pos++]]);
    for (std::size_t i = 0; i < counts.val; ++i)
        result.val.clusters.push_back(corpus.clusters[order[pos++]]);
    for (std::size_t i = 0; i < counts.test; ++i)
        result.test.clusters.push_back(corpus.clusters[order[pos++]]);
    return result;
}

}  // namespace codeeq
