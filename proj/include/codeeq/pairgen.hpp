#pragma once

// Benchmark pair generation: category-driven pair sampling, seeded
// perturbation chains with an sp/np plan, interpreter validation, and
// parallel original/perturbed dataset emission.

#include "codeeq/corpus.hpp"
#include "codeeq/transforms.hpp"

#include <array>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace codeeq {

enum class Prefix { Id, Fe, Ne, Di };
inline constexpr int kPrefixCount = 4;

const char* to_string(Prefix p);
bool prefix_from_string(const std::string& s, Prefix& out);

/// Equivalence of the unperturbed pair is fixed by its category.
inline bool original_equivalent(Prefix p) {
    return p == Prefix::Id || p == Prefix::Fe;
}

struct PairLabel {
    Prefix prefix;
    int k = 1;
    Variant flag = Variant::Sp;
    bool ground_truth_equivalent = false;
};

struct BenchmarkInstance {
    std::string id;
    std::size_t index = 0;
    PairLabel label;
    std::array<std::string, 2> problem_ids;
    std::array<std::string, 2> original;   // canonical sources
    std::array<std::string, 2> perturbed;  // canonical sources
    std::vector<TransformRecord> trace;
    std::uint64_t seed = 0;
};

struct CellQuota {
    int sp = 0;
    int np = 0;
};

struct GenerationConfig {
    int k_max = 5;
    int max_tries = 10;
    int instance_retries = 50;
    double p_same = 0.5;  // unconstrained mode only
    std::array<CellQuota, kPrefixCount> quotas{};
    int free_count = 0;  // > 0 switches to p_same sampling
    std::uint64_t master_seed = 0;
    std::vector<TransformKind> allowed_kinds;  // empty = all seven
    int jobs = 1;
};

struct KindVariantStats {
    long long applied = 0;
    long long inapplicable = 0;
    long long validation_rejected = 0;
};

struct GenStats {
    // indexed [kind][variant]
    std::array<std::array<KindVariantStats, 2>, kTransformKindCount> per_kind{};
    long long instance_retries = 0;
    std::map<std::string, long long> cell_counts;

    void merge(const GenStats& other);
    std::string to_json() const;
    /// Per-kind sp/np error percentages, "Error bounds" table layout.
    std::string error_bounds_table() const;
};

struct DatasetResult {
    std::vector<BenchmarkInstance> instances;
    GenStats stats;
};

class NoEligibleCluster : public std::runtime_error {
  public:
    explicit NoEligibleCluster(Prefix prefix)
        : std::runtime_error(std::string("no cluster admits prefix ") +
                             to_string(prefix)),
          prefix_(prefix) {}
    Prefix prefix() const { return prefix_; }

  private:
    Prefix prefix_;
};

class GenerationExhausted : public std::runtime_error {
  public:
    GenerationExhausted(Prefix prefix, Variant flag, GenStats partial)
        : std::runtime_error(std::string("generation exhausted for ") +
                             to_string(prefix) + "/" + to_string(flag)),
          prefix_(prefix),
          flag_(flag),
          partial_(std::move(partial)) {}
    Prefix prefix() const { return prefix_; }
    Variant flag() const { return flag_; }
    const GenStats& partial_stats() const { return partial_; }

  private:
    Prefix prefix_;
    Variant flag_;
    GenStats partial_;
};

/// One seeded draw from the category's eligible-pair universe.
std::pair<Program, Program> sample_pair(const Corpus& corpus, Prefix prefix,
                                        std::uint64_t seed);

BenchmarkInstance generate_instance(const Corpus& corpus, Prefix prefix,
                                    Variant flag, const GenerationConfig& cfg,
                                    std::uint64_t seed,
                                    GenStats* stats = nullptr);

DatasetResult generate_dataset(const Corpus& corpus,
                               const GenerationConfig& cfg);

/// Looks up the suite(s) relevant to an instance: the shared cluster suite,
/// or for di the union of both clusters' suites.
TestSuite relevant_suite(const Corpus& corpus,
                         const BenchmarkInstance& instance);

std::string instance_to_json(const BenchmarkInstance& instance);
std::string instance_original_to_json(const BenchmarkInstance& instance);
std::string dataset_to_jsonl(const std::vector<BenchmarkInstance>& instances);
std::string dataset_originals_to_jsonl(
    const std::vector<BenchmarkInstance>& instances);
std::vector<BenchmarkInstance> dataset_from_jsonl(const std::string& jsonl);

/// Yes/No predictor over an instance's perturbed pair.
using EquivalencePredictor = std::function<bool(const BenchmarkInstance&)>;

struct VarianceReport {
    // cell -> accuracy per repetition
    std::map<std::string, std::vector<double>> accuracies;
    std::map<std::string, double> mean;
    std::map<std::string, double> stddev;
    std::string to_text() const;
};

/// Stability protocol: regenerate the dataset `repetitions` times
/// under derived seeds and report per-category accuracy spread of the
/// supplied judge.
VarianceReport variance_report(const Corpus& corpus,
                               const GenerationConfig& cfg, int repetitions,
                               const EquivalencePredictor& predict);

}  // namespace codeeq
