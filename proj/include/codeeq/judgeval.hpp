#pragma once

// Evaluation harness: prompt construction, judge backends (oracle,
// syntactic, constant-No, remote chat endpoint), verdict parsing, and the
// metrics family used in the result tables.

#include "codeeq/pairgen.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace codeeq {

enum class PromptStyle { Basic, Cot };

const char* to_string(PromptStyle style);
bool prompt_style_from_string(const std::string& s, PromptStyle& out);

struct JudgeVerdict {
    enum class Decision { Yes, No, Unparseable };
    Decision decision = Decision::Unparseable;
    std::string raw_response;
    double latency_ms = 0.0;
};

/// Byte-exact template fill; {prog1} and {prog2} are the only slots.
std::string build_prompt(PromptStyle style, const std::string& prog1,
                         const std::string& prog2);

JudgeVerdict parse_verdict(PromptStyle style, const std::string& response);

class JudgeUnavailable : public std::runtime_error {
  public:
    explicit JudgeUnavailable(const std::string& detail)
        : std::runtime_error(detail) {}
};

class Judge {
  public:
    virtual ~Judge() = default;
    /// Judges one pair; `original_set` selects which of the two parallel
    /// sets is shown. May throw JudgeUnavailable.
    virtual JudgeVerdict judge_instance(const BenchmarkInstance& instance,
                                        bool original_set) = 0;
    virtual std::string name() const = 0;
};

/// Ground-truth oracle: Yes iff the pair's outputs agree on the relevant
/// suite (the union of both suites for cross-problem pairs).
class OracleJudge : public Judge {
  public:
    explicit OracleJudge(const Corpus& corpus) : corpus_(corpus) {}
    JudgeVerdict judge_instance(const BenchmarkInstance& instance,
                                bool original_set) override;
    std::string name() const override { return "oracle"; }

  private:
    const Corpus& corpus_;
};

/// Yes iff the two programs are structurally identical.
class SyntacticJudge : public Judge {
  public:
    JudgeVerdict judge_instance(const BenchmarkInstance& instance,
                                bool original_set) override;
    std::string name() const override { return "syntactic"; }
};

class ConstantNoJudge : public Judge {
  public:
    JudgeVerdict judge_instance(const BenchmarkInstance& instance,
                                bool original_set) override;
    std::string name() const override { return "constant-no"; }
};

struct RemoteJudgeConfig {
    std::string endpoint;  // e.g. http://host:port/v1/chat/completions
    std::string model;
    std::string api_key;  // filled from the environment, never logged
    PromptStyle style = PromptStyle::Basic;
    int timeout_seconds = 60;
};

/// JSON-over-HTTP chat judge with deterministic decoding (temperature 0).
/// Retries once on transport error, then throws JudgeUnavailable.
class RemoteJudge : public Judge {
  public:
    explicit RemoteJudge(RemoteJudgeConfig config)
        : config_(std::move(config)) {}
    JudgeVerdict judge_instance(const BenchmarkInstance& instance,
                                bool original_set) override;
    std::string name() const override { return "remote"; }

  private:
    RemoteJudgeConfig config_;
};

struct MetricsReport {
    std::map<std::string, double> cell_accuracy;  // "id-sp" .. "di-np"
    double acc = 0.0;
    double w_acc = 0.0;
    double pos_f1 = 0.0;
    double neg_f1 = 0.0;
    double mac_f1 = 0.0;
    // two readings of micro-F1; the pooled-cells one differs from accuracy
    double mic_f1_pooled_cells = 0.0;
    double mic_f1_binary = 0.0;
    long long total = 0;
    long long unparseable = 0;
    long long skipped = 0;
    std::vector<std::string> warnings;

    std::string to_json() const;
};

class EmptyInput : public std::runtime_error {
  public:
    EmptyInput() : std::runtime_error("no judged instances to score") {}
};

/// Verdict-vs-label scoring. A nullopt verdict means the instance was
/// skipped (judge unavailable) and is excluded from every denominator;
/// Unparseable verdicts count as incorrect.
MetricsReport compute_metrics(
    const std::vector<std::optional<JudgeVerdict>>& verdicts,
    const std::vector<PairLabel>& labels);

struct EvaluationResult {
    MetricsReport original;
    MetricsReport perturbed;
    std::string judge_name;
    PromptStyle style = PromptStyle::Basic;

    std::string to_json() const;
    /// Human-readable table mirroring the results-table layout.
    std::string to_text() const;
};

EvaluationResult evaluate(const std::vector<BenchmarkInstance>& instances,
                          Judge& judge, PromptStyle style, int jobs = 1);

}  // namespace codeeq
