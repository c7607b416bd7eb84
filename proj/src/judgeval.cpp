#include "codeeq/judgeval.hpp"

#include <httplib.h>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <iomanip>
#include <sstream>
#include <thread>

namespace codeeq {

using json = nlohmann::json;

const char* to_string(PromptStyle style) {
    return style == PromptStyle::Basic ? "basic" : "cot";
}

bool prompt_style_from_string(const std::string& s, PromptStyle& out) {
    if (s == "basic") {
        out = PromptStyle::Basic;
        return true;
    }
    if (s == "cot") {
        out = PromptStyle::Cot;
        return true;
    }
    return false;
}

namespace {

const char* kBasicTemplate =
    "Given two programs, you must check if they solve the same problem - "
    "that is, for any input, they must produce identical outputs.\n"
    "Your task is to answer only with one word: Yes or No.\n"
    "No explanation, no extra words, no formatting.\n"
    "\n"
    "Program 1: {prog1}\n"
    "Program 2: {prog2}";

const char* kCotTemplate =
    "You are given two programs. Your task is to analyze whether they solve "
    "the same problem \xE2\x80\x94 meaning, for any given input, both "
    "programs must always produce identical outputs.\n"
    "\n"
    "Start by reasoning step-by-step through the logic and structure of both "
    "programs. You must write your reasoning steps.\n"
    "\n"
    "After your analysis, you must end your response with exactly one of the "
    "following:\n"
    "FINAL_ANSWER_IS_YES\n"
    "FINAL_ANSWER_IS_NO\n"
    "\n"
    "Only use this exact format for the final answer, and do not write "
    "anything after it.\n"
    "\n"
    "Program 1: {prog1}\n"
    "Program 2: {prog2}";

void replace_slot(std::string& text, const std::string& slot,
                  const std::string& value) {
    std::size_t pos = text.find(slot);
    if (pos != std::string::npos) text.replace(pos, slot.size(), value);
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) {
        return static_cast<char>(std::tolower(c));
    });
    return s;
}

}  // namespace

std::string build_prompt(PromptStyle style, const std::string& prog1,
                         const std::string& prog2) {
    std::string out =
        style == PromptStyle::Basic ? kBasicTemplate : kCotTemplate;
    replace_slot(out, "{prog1}", prog1);
    replace_slot(out, "{prog2}", prog2);
    return out;
}

JudgeVerdict parse_verdict(PromptStyle style, const std::string& response) {
    JudgeVerdict v;
    v.raw_response = response;
    if (style == PromptStyle::Basic) {
        std::string t = lower(trim(response));
        if (t == "yes")
            v.decision = JudgeVerdict::Decision::Yes;
        else if (t == "no")
            v.decision = JudgeVerdict::Decision::No;
        return v;
    }
    std::size_t yes = response.rfind("FINAL_ANSWER_IS_YES");
    std::size_t no = response.rfind("FINAL_ANSWER_IS_NO");
    if (yes == std::string::npos && no == std::string::npos) return v;
    if (yes == std::string::npos)
        v.decision = JudgeVerdict::Decision::No;
    else if (no == std::string::npos)
        v.decision = JudgeVerdict::Decision::Yes;
    else
        // the later sentinel wins; note YES at position p also matches the
        // NO search only as a distinct substring, so compare positions
        v.decision = yes > no ? JudgeVerdict::Decision::Yes
                              : JudgeVerdict::Decision::No;
    return v;
}

JudgeVerdict OracleJudge::judge_instance(const BenchmarkInstance& instance,
                                         bool original_set) {
    const auto& pair = original_set ? instance.original : instance.perturbed;
    Ast a = parse(pair[0]);
    Ast b = parse(pair[1]);
    TestSuite suite = relevant_suite(corpus_, instance);
    bool same = !outputs_diverge(a, b, suite).has_value();
    JudgeVerdict v;
    v.decision =
        same ? JudgeVerdict::Decision::Yes : JudgeVerdict::Decision::No;
    v.raw_response = same ? "Yes" : "No";
    return v;
}

JudgeVerdict SyntacticJudge::judge_instance(const BenchmarkInstance& instance,
                                            bool original_set) {
    const auto& pair = original_set ? instance.original : instance.perturbed;
    bool same = ast_equal(parse(pair[0]), parse(pair[1]));
    JudgeVerdict v;
    v.decision =
        same ? JudgeVerdict::Decision::Yes : JudgeVerdict::Decision::No;
    v.raw_response = same ? "Yes" : "No";
    return v;
}

JudgeVerdict ConstantNoJudge::judge_instance(const BenchmarkInstance&, bool) {
    JudgeVerdict v;
    v.decision = JudgeVerdict::Decision::No;
    v.raw_response = "No";
    return v;
}

namespace {

// splits "http://host:port/path" into client base and request path
bool split_endpoint(const std::string& endpoint, std::string& base,
                    std::string& path) {
    std::size_t scheme = endpoint.find("://");
    if (scheme == std::string::npos) return false;
    std::size_t slash = endpoint.find('/', scheme + 3);
    if (slash == std::string::npos) {
        base = endpoint;
        path = "/";
    } else {
        base = endpoint.substr(0, slash);
        path = endpoint.substr(slash);
    }
    return true;
}

}  // namespace

JudgeVerdict RemoteJudge::judge_instance(const BenchmarkInstance& instance,
                                         bool original_set) {
    const auto& pair = original_set ? instance.original : instance.perturbed;
    std::string prompt = build_prompt(config_.style, pair[0], pair[1]);
    json body = {
        {"model", config_.model},
        {"messages", json::array({{{"role", "user"}, {"content", prompt}}})},
        {"temperature", 0},
    };
    std::string base, path;
    if (!split_endpoint(config_.endpoint, base, path))
        throw JudgeUnavailable("bad endpoint: " + config_.endpoint);

    std::string failure;
    for (int attempt = 0; attempt < 2; ++attempt) {
        httplib::Client client(base);
        client.set_read_timeout(config_.timeout_seconds, 0);
        client.set_connection_timeout(config_.timeout_seconds, 0);
        httplib::Headers headers;
        if (!config_.api_key.empty())
            headers.emplace("Authorization", "Bearer " + config_.api_key);
        auto t0 = std::chrono::steady_clock::now();
        auto res = client.Post(path, headers, body.dump(), "application/json");
        double ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
        if (!res) {
            failure = "transport error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status != 200) {
            failure = "http status " + std::to_string(res->status);
            continue;
        }
        std::string content;
        try {
            json reply = json::parse(res->body);
            content = reply.at("choices").at(0).at("message").at("content")
                          .get<std::string>();
        } catch (const json::exception& e) {
            failure = std::string("bad response shape: ") + e.what();
            continue;
        }
        JudgeVerdict v = parse_verdict(config_.style, content);
        v.latency_ms = ms;
        return v;
    }
    throw JudgeUnavailable(failure);
}

MetricsReport compute_metrics(
    const std::vector<std::optional<JudgeVerdict>>& verdicts,
    const std::vector<PairLabel>& labels) {
    if (verdicts.size() != labels.size())
        throw std::invalid_argument("verdicts and labels not aligned");
    MetricsReport report;
    long long tp = 0, fp = 0, fn = 0, tn = 0;
    std::map<std::string, std::pair<long long, long long>> cells;
    for (std::size_t i = 0; i < verdicts.size(); ++i) {
        if (!verdicts[i]) {
            report.skipped += 1;
            continue;
        }
        report.total += 1;
        bool truth = labels[i].ground_truth_equivalent;
        bool predicted;
        if (verdicts[i]->decision == JudgeVerdict::Decision::Unparseable) {
            report.unparseable += 1;
            predicted = !truth;  // format violations score as wrong
        } else {
            predicted = verdicts[i]->decision == JudgeVerdict::Decision::Yes;
        }
        if (predicted && truth) ++tp;
        if (predicted && !truth) ++fp;
        if (!predicted && truth) ++fn;
        if (!predicted && !truth) ++tn;
        std::string cell = std::string(to_string(labels[i].prefix)) + "-" +
                           to_string(labels[i].flag);
        cells[cell].first += predicted == truth ? 1 : 0;
        cells[cell].second += 1;
    }
    if (report.total == 0) throw EmptyInput();

    long long correct = tp + tn;
    report.acc = static_cast<double>(correct) /
                 static_cast<double>(report.total);
    double acc_pos = 0.0, acc_neg = 0.0;
    if (tp + fn > 0)
        acc_pos = static_cast<double>(tp) / static_cast<double>(tp + fn);
    else
        report.warnings.push_back("no positive instances; positive terms = 0");
    if (tn + fp > 0)
        acc_neg = static_cast<double>(tn) / static_cast<double>(tn + fp);
    else
        report.warnings.push_back("no negative instances; negative terms = 0");
    report.w_acc = (acc_pos + acc_neg) / 2.0;
    double pos_den = static_cast<double>(2 * tp + fp + fn);
    report.pos_f1 = pos_den > 0 ? 2.0 * static_cast<double>(tp) / pos_den : 0.0;
    double neg_den = static_cast<double>(2 * tn + fn + fp);
    report.neg_f1 = neg_den > 0 ? 2.0 * static_cast<double>(tn) / neg_den : 0.0;
    report.mac_f1 = (report.pos_f1 + report.neg_f1) / 2.0;
    report.mic_f1_binary = report.acc;
    // each category cell is a one-class task: pooled 2C / (2C + E)
    long long errors = report.total - correct;
    report.mic_f1_pooled_cells =
        static_cast<double>(2 * correct) /
        static_cast<double>(2 * correct + errors);
    for (const auto& [cell, t] : cells)
        report.cell_accuracy[cell] =
            static_cast<double>(t.first) / static_cast<double>(t.second);
    return report;
}

std::string MetricsReport::to_json() const {
    json j;
    j["acc"] = acc;
    j["w_acc"] = w_acc;
    j["pos_f1"] = pos_f1;
    j["neg_f1"] = neg_f1;
    j["mac_f1"] = mac_f1;
    j["mic_f1_pooled_cells"] = mic_f1_pooled_cells;
    j["mic_f1_binary"] = mic_f1_binary;
    j["total"] = total;
    j["unparseable"] = unparseable;
    j["skipped"] = skipped;
    for (const auto& [cell, a] : cell_accuracy) j["cell_accuracy"][cell] = a;
    j["warnings"] = warnings;
    return j.dump(2);
}

std::string EvaluationResult::to_json() const {
    json j;
    j["judge"] = judge_name;
    j["style"] = to_string(style);
    j["original"] = json::parse(original.to_json());
    j["perturbed"] = json::parse(perturbed.to_json());
    return j.dump(2);
}

std::string EvaluationResult::to_text() const {
    std::ostringstream out;
    out << "Judge: " << judge_name << "  Style: " << to_string(style) << "\n";
    auto row = [&](const char* name, const MetricsReport& m) {
        out << std::left << std::setw(10) << name << std::right << std::fixed
            << std::setprecision(3) << std::setw(8) << m.acc << std::setw(8)
            << m.w_acc << std::setw(8) << m.mac_f1 << std::setw(8)
            << m.mic_f1_pooled_cells << std::setw(8) << m.pos_f1
            << std::setw(8) << m.neg_f1 << "\n";
    };
    out << std::left << std::setw(10) << "Set" << std::right << std::setw(8)
        << "Acc" << std::setw(8) << "W-Acc" << std::setw(8) << "Mac-F1"
        << std::setw(8) << "Mic-F1" << std::setw(8) << "PosF1" << std::setw(8)
        << "NegF1" << "\n";
    row("original", original);
    row("perturbed", perturbed);
    out << "\nPer-category accuracy (perturbed set):\n";
    for (const auto& [cell, a] : perturbed.cell_accuracy)
        out << "  " << std::left << std::setw(8) << cell << std::fixed
            << std::setprecision(3) << a << "\n";
    if (perturbed.skipped + original.skipped > 0)
        out << "Skipped (judge unavailable): "
            << perturbed.skipped + original.skipped << "\n";
    return out.str();
}

EvaluationResult evaluate(const std::vector<BenchmarkInstance>& instances,
                          Judge& judge, PromptStyle style, int jobs) {
    std::vector<std::optional<JudgeVerdict>> original_verdicts(
        instances.size());
    std::vector<std::optional<JudgeVerdict>> perturbed_verdicts(
        instances.size());
    std::vector<PairLabel> original_labels(instances.size());
    std::vector<PairLabel> perturbed_labels(instances.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= instances.size()) return;
            const auto& inst = instances[i];
            perturbed_labels[i] = inst.label;
            original_labels[i] = inst.label;
            original_labels[i].ground_truth_equivalent =
                original_equivalent(inst.label.prefix);
            try {
                original_verdicts[i] = judge.judge_instance(inst, true);
            } catch (const JudgeUnavailable&) {
            }
            try {
                perturbed_verdicts[i] = judge.judge_instance(inst, false);
            } catch (const JudgeUnavailable&) {
            }
        }
    };
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        for (int w = 0; w < jobs; ++w) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
    }

    EvaluationResult result;
    result.judge_name = judge.name();
    result.style = style;
    result.original = compute_metrics(original_verdicts, original_labels);
    result.perturbed = compute_metrics(perturbed_verdicts, perturbed_labels);
    return result;
}

}  // namespace codeeq
