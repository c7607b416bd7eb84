#pragma once

// Problem corpus: clusters of human solutions grouped by problem, each with
// a test suite that serves as the ground-truth verdict oracle.

#include "codeeq/interp.hpp"
#include "codeeq/syntax.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace codeeq {

/// A parsed, verdict-carrying program. `source` is the canonical printed
/// form of `ast`.
struct Program {
    std::string id;
    std::shared_ptr<const Ast> ast;
    std::string source;
    bool correct = false;
};

struct Submission {
    SourceText source;
    std::optional<bool> declared_correct;
    std::string id;
};

struct SolutionCluster {
    std::string problem_id;
    std::optional<double> difficulty;
    TestSuite suite;
    std::vector<Program> correct;
    std::vector<Program> incorrect;
};

struct Corpus {
    std::vector<SolutionCluster> clusters;
    std::string source_name;
    std::string split_tag;
};

struct IngestOptions {
    bool reverify = true;
    int min_tests = 1;
};

/// Per-reason counts plus a line-oriented log of every dropped item.
struct RejectionReport {
    std::map<std::string, int> counts;
    std::vector<std::string> log;

    void add(const std::string& reason, const std::string& item);
    std::string to_json() const;
};

class SchemaError : public std::runtime_error {
  public:
    SchemaError(int line, std::string field, const std::string& message)
        : std::runtime_error("line " + std::to_string(line) + ", field '" +
                             field + "': " + message),
          line_(line),
          field_(std::move(field)) {}
    int line() const { return line_; }
    const std::string& field() const { return field_; }

  private:
    int line_;
    std::string field_;
};

class IoError : public std::runtime_error {
  public:
    explicit IoError(const std::string& message)
        : std::runtime_error(message) {}
};

class InsufficientClusters : public std::runtime_error {
  public:
    explicit InsufficientClusters(const std::string& message)
        : std::runtime_error(message) {}
};

/// One problem per JSONL line: {name, difficulty, tests:[{input,output}],
/// solutions:[...], incorrect_solutions:[...]}.
Corpus ingest(const std::string& path, const IngestOptions& options,
              RejectionReport& report);
Corpus ingest_text(const std::string& jsonl, const IngestOptions& options,
                   RejectionReport& report, const std::string& source_name);

std::string to_jsonl(const Corpus& corpus);

struct SplitCounts {
    std::size_t train = 0;
    std::size_t val = 0;
    std::size_t test = 0;
};

struct SplitResult {
    Corpus train;
    Corpus val;
    Corpus test;
};

/// Disjoint problem-level split after a seeded shuffle.
SplitResult split(const Corpus& corpus, SplitCounts counts,
                  std::uint64_t seed);

}  // namespace codeeq
