#include "codeeq/pairgen.hpp"

#include <json.hpp>

#include <atomic>
#include <cmath>
#include <mutex>
#include <iomanip>
#include <sstream>
#include <thread>

namespace codeeq {

using json = nlohmann::json;

const char* to_string(Prefix p) {
    switch (p) {
        case Prefix::Id: return "id";
        case Prefix::Fe: return "fe";
        case Prefix::Ne: return "ne";
        case Prefix::Di: return "di";
    }
    return "?";
}

bool prefix_from_string(const std::string& s, Prefix& out) {
    for (int i = 0; i < kPrefixCount; ++i) {
        auto p = static_cast<Prefix>(i);
        if (s == to_string(p)) {
            out = p;
            return true;
        }
    }
    return false;
}

void GenStats::merge(const GenStats& other) {
    for (int k = 0; k < kTransformKindCount; ++k)
        for (int v = 0; v < 2; ++v) {
            per_kind[k][v].applied += other.per_kind[k][v].applied;
            per_kind[k][v].inapplicable += other.per_kind[k][v].inapplicable;
            per_kind[k][v].validation_rejected +=
                other.per_kind[k][v].validation_rejected;
        }
    instance_retries += other.instance_retries;
    for (const auto& [cell, n] : other.cell_counts) cell_counts[cell] += n;
}

namespace {

double error_pct(const KindVariantStats& s) {
    long long attempts = s.applied + s.validation_rejected;
    if (attempts == 0) return 0.0;
    return 100.0 * static_cast<double>(s.validation_rejected) /
           static_cast<double>(attempts);
}

}  // namespace

std::string GenStats::to_json() const {
    json j;
    for (int k = 0; k < kTransformKindCount; ++k) {
        json row;
        for (int v = 0; v < 2; ++v) {
            const auto& s = per_kind[k][v];
            const char* name = v == 0 ? "sp" : "np";
            row[name] = {{"applied", s.applied},
                         {"inapplicable", s.inapplicable},
                         {"validation_rejected", s.validation_rejected},
                         {"error_pct", error_pct(s)}};
        }
        j["per_kind"][to_string(static_cast<TransformKind>(k))] = row;
    }
    j["instance_retries"] = instance_retries;
    for (const auto& [cell, n] : cell_counts) j["cell_counts"][cell] = n;
    return j.dump(2);
}

std::string GenStats::error_bounds_table() const {
    std::ostringstream out;
    out << std::left << std::setw(22) << "Perturbation" << std::right
        << std::setw(14) << "Sp Error (%)" << std::setw(14) << "Np Error (%)"
        << "\n";
    out << std::fixed << std::setprecision(2);
    for (int k = 0; k < kTransformKindCount; ++k) {
        out << std::left << std::setw(22)
            << to_string(static_cast<TransformKind>(k)) << std::right
            << std::setw(14) << error_pct(per_kind[k][0]) << std::setw(14)
            << error_pct(per_kind[k][1]) << "\n";
    }
    return out.str();
}

namespace {

struct PlannedPair {
    Program a;
    Program b;
    std::size_t cluster_a = 0;
    std::size_t cluster_b = 0;
};

std::vector<PlannedPair> pair_universe(const Corpus& corpus, Prefix prefix) {
    std::vector<PlannedPair> out;
    const auto& cs = corpus.clusters;
    switch (prefix) {
        case Prefix::Id:
            for (std::size_t c = 0; c < cs.size(); ++c)
                for (const auto& p : cs[c].correct)
                    out.push_back({p, p, c, c});
            break;
        case Prefix::Fe:
            for (std::size_t c = 0; c < cs.size(); ++c) {
                const auto& ps = cs[c].correct;
                for (std::size_t i = 0; i < ps.size(); ++i)
                    for (std::size_t j = i + 1; j < ps.size(); ++j)
                        if (!ast_equal(*ps[i].ast, *ps[j].ast))
                            out.push_back({ps[i], ps[j], c, c});
            }
            break;
        case Prefix::Ne:
            for (std::size_t c = 0; c < cs.size(); ++c)
                for (const auto& ok : cs[c].correct)
                    for (const auto& bad : cs[c].incorrect)
                        out.push_back({ok, bad, c, c});
            break;
        case Prefix::Di:
            for (std::size_t c1 = 0; c1 < cs.size(); ++c1)
                for (std::size_t c2 = c1 + 1; c2 < cs.size(); ++c2)
                    for (const auto& p1 : cs[c1].correct)
                        for (const auto& p2 : cs[c2].correct)
                            out.push_back({p1, p2, c1, c2});
            break;
    }
    return out;
}

TestSuite union_suite(const TestSuite& a, const TestSuite& b) {
    TestSuite u;
    u.problem_id = a.problem_id + "+" + b.problem_id;
    u.cases = a.cases;
    u.cases.insert(u.cases.end(), b.cases.begin(), b.cases.end());
    return u;
}

const std::vector<TransformKind>& all_kinds() {
    static const std::vector<TransformKind> kinds = [] {
        std::vector<TransformKind> v;
        for (int i = 0; i < kTransformKindCount; ++i)
            v.push_back(static_cast<TransformKind>(i));
        return v;
    }();
    return kinds;
}

// One full chain attempt. Stats are charged even when the attempt is later
// discarded; the emitted dataset reflects only validated chains.
bool try_chain(const Corpus& corpus, Prefix prefix, Variant flag,
               const GenerationConfig& cfg, PlannedPair pair,
               std::uint64_t attempt_seed, GenStats& stats,
               BenchmarkInstance& out) {
    Rng rng(attempt_seed);
    if (rng.below(2) == 1) {
        std::swap(pair.a, pair.b);
        std::swap(pair.cluster_a, pair.cluster_b);
    }
    int k = 1 + static_cast<int>(rng.below(cfg.k_max));
    int k_neg = flag == Variant::Np ? 1 + static_cast<int>(rng.below(k)) : 0;

    const std::vector<TransformKind>& kinds =
        cfg.allowed_kinds.empty() ? all_kinds() : cfg.allowed_kinds;
    const TestSuite* suites[2] = {&corpus.clusters[pair.cluster_a].suite,
                                  &corpus.clusters[pair.cluster_b].suite};
    Ast cur[2] = {clone(*pair.a.ast), clone(*pair.b.ast)};
    std::vector<TransformRecord> trace;

    for (int step = 0; step < k; ++step) {
        Variant v = step < k - k_neg ? Variant::Sp : Variant::Np;
        bool done = false;
        int side = static_cast<int>(rng.below(2));
        for (int side_try = 0; side_try < 2 && !done; ++side_try, side ^= 1) {
            for (int t = 0; t < cfg.max_tries && !done; ++t) {
                TransformKind kind = kinds[rng.below(kinds.size())];
                std::uint64_t step_seed = rng.fork();
                TransformOutcome outcome = apply(kind, v, cur[side], step_seed);
                auto& kv = stats.per_kind[static_cast<int>(kind)]
                                         [v == Variant::Sp ? 0 : 1];
                if (std::holds_alternative<Inapplicable>(outcome)) {
                    kv.inapplicable += 1;
                    continue;
                }
                Applied applied = std::get<Applied>(std::move(outcome));
                bool diverged =
                    outputs_diverge(cur[side], applied.ast, *suites[side])
                        .has_value();
                // sp must keep the program observably identical to its own
                // pre-step behavior; np must observably change it
                if ((v == Variant::Sp) == diverged) {
                    kv.validation_rejected += 1;
                    continue;
                }
                kv.applied += 1;
                cur[side] = std::move(applied.ast);
                trace.push_back(std::move(applied.record));
                done = true;
            }
        }
        if (!done) return false;
    }

    bool ground_truth = flag == Variant::Sp && original_equivalent(prefix);
    TestSuite pair_suite = pair.cluster_a == pair.cluster_b
                               ? *suites[0]
                               : union_suite(*suites[0], *suites[1]);
    bool diverged = outputs_diverge(cur[0], cur[1], pair_suite).has_value();
    if (ground_truth == diverged) return false;
    if (ground_truth) {
        if (!passes_suite(cur[0], *suites[0]).passed) return false;
        if (!passes_suite(cur[1], *suites[1]).passed) return false;
    }

    out.label = {prefix, k, flag, ground_truth};
    out.problem_ids = {corpus.clusters[pair.cluster_a].problem_id,
                       corpus.clusters[pair.cluster_b].problem_id};
    out.original = {pair.a.source, pair.b.source};
    out.perturbed = {pretty_print(cur[0]), pretty_print(cur[1])};
    out.trace = std::move(trace);
    out.seed = attempt_seed;
    return true;
}

BenchmarkInstance generate_with_pair(
    const Corpus& corpus, Prefix prefix, Variant flag,
    const GenerationConfig& cfg, const std::vector<PlannedPair>& universe,
    const PlannedPair* planned, std::uint64_t seed, GenStats& stats) {
    if (universe.empty()) throw NoEligibleCluster(prefix);
    for (int attempt = 0; attempt < cfg.instance_retries; ++attempt) {
        std::uint64_t attempt_seed =
            hash_combine(seed, static_cast<std::uint64_t>(attempt));
        PlannedPair pair;
        if (attempt == 0 && planned) {
            pair = *planned;
        } else {
            Rng prng(hash_combine(attempt_seed, 0x5151));
            pair = universe[prng.below(universe.size())];
        }
        BenchmarkInstance inst;
        if (try_chain(corpus, prefix, flag, cfg, pair, attempt_seed, stats,
                      inst)) {
            inst.id = std::string(to_string(prefix)) + "-" + to_string(flag);
            return inst;
        }
        stats.instance_retries += 1;
    }
    throw GenerationExhausted(prefix, flag, stats);
}

void seeded_shuffle(std::vector<std::size_t>& v, std::uint64_t seed) {
    Rng rng(seed);
    for (std::size_t i = v.size(); i > 1; --i)
        std::swap(v[i - 1], v[rng.below(i)]);
}

struct Job {
    std::size_t global_index;
    Prefix prefix;
    Variant flag;
    PlannedPair pair;
    bool has_pair;
    std::uint64_t seed;
    std::string id;
};

}  // namespace

std::pair<Program, Program> sample_pair(const Corpus& corpus, Prefix prefix,
                                        std::uint64_t seed) {
    auto universe = pair_universe(corpus, prefix);
    if (universe.empty()) throw NoEligibleCluster(prefix);
    Rng rng(seed);
    PlannedPair p = universe[rng.below(universe.size())];
    if (rng.below(2) == 1) std::swap(p.a, p.b);
    return {p.a, p.b};
}

BenchmarkInstance generate_instance(const Corpus& corpus, Prefix prefix,
                                    Variant flag, const GenerationConfig& cfg,
                                    std::uint64_t seed, GenStats* stats) {
    GenStats local;
    auto universe = pair_universe(corpus, prefix);
    BenchmarkInstance inst = generate_with_pair(corpus, prefix, flag, cfg,
                                                universe, nullptr, seed, local);
    if (stats) stats->merge(local);
    return inst;
}

DatasetResult generate_dataset(const Corpus& corpus,
                               const GenerationConfig& cfg) {
    std::vector<Job> jobs;

    if (cfg.free_count > 0) {
        // unconstrained mode: categories fall out of p_same sampling
        for (int i = 0; i < cfg.free_count; ++i) {
            std::uint64_t iseed = hash_combine(
                cfg.master_seed, 0x0F0F0F0FULL + static_cast<std::uint64_t>(i));
            Rng rng(iseed);
            double u = static_cast<double>(rng.next() >> 11) /
                       static_cast<double>(1ULL << 53);
            Prefix prefix;
            PlannedPair pair;
            if (u < cfg.p_same) {
                const auto& cs = corpus.clusters;
                bool found = false;
                for (int tries = 0; tries < 100 && !found; ++tries) {
                    std::size_t c = rng.below(cs.size());
                    std::vector<Program> all = cs[c].correct;
                    all.insert(all.end(), cs[c].incorrect.begin(),
                               cs[c].incorrect.end());
                    if (all.size() < 2) continue;
                    std::size_t x = rng.below(all.size());
                    std::size_t y = rng.below(all.size());
                    if (x == y) continue;
                    if (!all[x].correct && !all[y].correct) continue;
                    pair = {all[x], all[y], c, c};
                    if (all[x].correct && all[y].correct)
                        prefix = ast_equal(*all[x].ast, *all[y].ast)
                                     ? Prefix::Id
                                     : Prefix::Fe;
                    else
                        prefix = Prefix::Ne;
                    found = true;
                }
                if (!found) throw NoEligibleCluster(Prefix::Fe);
            } else {
                prefix = Prefix::Di;
                std::size_t c1 = rng.below(corpus.clusters.size());
                std::size_t c2 = rng.below(corpus.clusters.size());
                while (c2 == c1) c2 = rng.below(corpus.clusters.size());
                const auto& k1 = corpus.clusters[c1].correct;
                const auto& k2 = corpus.clusters[c2].correct;
                pair = {k1[rng.below(k1.size())], k2[rng.below(k2.size())], c1,
                        c2};
            }
            Variant flag = rng.below(2) == 0 ? Variant::Sp : Variant::Np;
            std::string id = std::string(to_string(prefix)) + "-" +
                             to_string(flag) + "-" + std::to_string(i);
            jobs.push_back(
                {jobs.size(), prefix, flag, pair, true, iseed, std::move(id)});
        }
    } else {
        for (int pi = 0; pi < kPrefixCount; ++pi) {
            Prefix prefix = static_cast<Prefix>(pi);
            auto universe = pair_universe(corpus, prefix);
            for (int vi = 0; vi < 2; ++vi) {
                Variant flag = vi == 0 ? Variant::Sp : Variant::Np;
                int quota = vi == 0 ? cfg.quotas[pi].sp : cfg.quotas[pi].np;
                if (quota > 0 && universe.empty())
                    throw NoEligibleCluster(prefix);
                std::uint64_t cell_seed = hash_combine(
                    cfg.master_seed,
                    static_cast<std::uint64_t>(pi) * 2 + vi + 0xC3110ULL);
                // distinct pairs until the universe is exhausted, then a
                // reshuffled pass
                std::vector<std::size_t> perm(universe.size());
                for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
                std::size_t epoch = 0;
                seeded_shuffle(perm, hash_combine(cell_seed, epoch));
                for (int j = 0; j < quota; ++j) {
                    std::size_t pos = static_cast<std::size_t>(j) %
                                      universe.size();
                    if (j > 0 && pos == 0) {
                        ++epoch;
                        seeded_shuffle(perm, hash_combine(cell_seed, epoch));
                    }
                    std::uint64_t iseed = hash_combine(
                        cell_seed, static_cast<std::uint64_t>(j));
                    std::string id = std::string(to_string(prefix)) + "-" +
                                     to_string(flag) + "-" + std::to_string(j);
                    jobs.push_back({jobs.size(), prefix, flag,
                                    universe[perm[pos]], true, iseed,
                                    std::move(id)});
                }
            }
        }
    }

    DatasetResult result;
    result.instances.resize(jobs.size());
    std::vector<GenStats> worker_stats;
    int jobs_n = cfg.jobs > 0 ? cfg.jobs : 1;
    worker_stats.resize(static_cast<std::size_t>(jobs_n));
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mu;

    // per-prefix universes shared across workers, read-only
    std::array<std::vector<PlannedPair>, kPrefixCount> universes;
    for (int pi = 0; pi < kPrefixCount; ++pi)
        universes[pi] = pair_universe(corpus, static_cast<Prefix>(pi));

    auto worker = [&](int w) {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= jobs.size() || failed.load()) return;
            Job& job = jobs[i];
            try {
                BenchmarkInstance inst = generate_with_pair(
                    corpus, job.prefix, job.flag, cfg,
                    universes[static_cast<int>(job.prefix)], &job.pair,
                    job.seed, worker_stats[static_cast<std::size_t>(w)]);
                inst.id = job.id;
                inst.index = job.global_index;
                result.instances[i] = std::move(inst);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mu);
                if (!first_error) first_error = std::current_exception();
                failed.store(true);
                return;
            }
        }
    };
    if (jobs_n == 1) {
        worker(0);
    } else {
        std::vector<std::thread> threads;
        for (int w = 0; w < jobs_n; ++w) threads.emplace_back(worker, w);
        for (auto& t : threads) t.join();
    }
    for (const auto& s : worker_stats) result.stats.merge(s);
    if (first_error) {
        try {
            std::rethrow_exception(first_error);
        } catch (const GenerationExhausted& e) {
            throw GenerationExhausted(e.prefix(), e.flag(), result.stats);
        }
    }
    for (const auto& inst : result.instances) {
        std::string cell = std::string(to_string(inst.label.prefix)) + "-" +
                           to_string(inst.label.flag);
        result.stats.cell_counts[cell] += 1;
    }
    return result;
}

TestSuite relevant_suite(const Corpus& corpus,
                         const BenchmarkInstance& instance) {
    const TestSuite* found[2] = {nullptr, nullptr};
    for (const auto& c : corpus.clusters) {
        if (c.problem_id == instance.problem_ids[0]) found[0] = &c.suite;
        if (c.problem_id == instance.problem_ids[1]) found[1] = &c.suite;
    }
    if (!found[0] || !found[1])
        throw std::runtime_error("instance references unknown problem ids");
    if (instance.problem_ids[0] == instance.problem_ids[1]) return *found[0];
    return union_suite(*found[0], *found[1]);
}

namespace {

json record_to_json(const TransformRecord& r) {
    return {{"kind", to_string(r.kind)},
            {"variant", to_string(r.variant)},
            {"site", {r.site.start_line, r.site.start_col, r.site.end_line,
                      r.site.end_col}},
            {"seed", r.seed},
            {"detail", r.detail}};
}

}  // namespace

std::string instance_to_json(const BenchmarkInstance& inst) {
    json j;
    j["id"] = inst.id;
    j["prefix"] = to_string(inst.label.prefix);
    j["k"] = inst.label.k;
    j["flag"] = to_string(inst.label.flag);
    j["ground_truth"] = inst.label.ground_truth_equivalent;
    j["problem_ids"] = {inst.problem_ids[0], inst.problem_ids[1]};
    j["original"] = {inst.original[0], inst.original[1]};
    j["perturbed"] = {inst.perturbed[0], inst.perturbed[1]};
    j["trace"] = json::array();
    for (const auto& r : inst.trace) j["trace"].push_back(record_to_json(r));
    j["seed"] = inst.seed;
    return j.dump();
}

std::string instance_original_to_json(const BenchmarkInstance& inst) {
    json j;
    j["id"] = inst.id;
    j["prefix"] = to_string(inst.label.prefix);
    j["k"] = inst.label.k;
    j["flag"] = to_string(inst.label.flag);
    j["ground_truth"] = original_equivalent(inst.label.prefix);
    j["problem_ids"] = {inst.problem_ids[0], inst.problem_ids[1]};
    j["original"] = {inst.original[0], inst.original[1]};
    return j.dump();
}

std::string dataset_to_jsonl(const std::vector<BenchmarkInstance>& instances) {
    std::string out;
    for (const auto& inst : instances) {
        out += instance_to_json(inst);
        out += '\n';
    }
    return out;
}

std::string dataset_originals_to_jsonl(
    const std::vector<BenchmarkInstance>& instances) {
    std::string out;
    for (const auto& inst : instances) {
        out += instance_original_to_json(inst);
        out += '\n';
    }
    return out;
}

std::vector<BenchmarkInstance> dataset_from_jsonl(const std::string& jsonl) {
    std::vector<BenchmarkInstance> out;
    std::istringstream in(jsonl);
    std::string line;
    std::size_t index = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line);
        BenchmarkInstance inst;
        inst.id = j.at("id").get<std::string>();
        inst.index = index++;
        Prefix prefix;
        if (!prefix_from_string(j.at("prefix").get<std::string>(), prefix))
            throw std::runtime_error("bad prefix in dataset line");
        Variant flag;
        if (!variant_from_string(j.at("flag").get<std::string>(), flag))
            throw std::runtime_error("bad flag in dataset line");
        inst.label = {prefix, j.at("k").get<int>(), flag,
                      j.at("ground_truth").get<bool>()};
        inst.problem_ids = {j.at("problem_ids")[0].get<std::string>(),
                            j.at("problem_ids")[1].get<std::string>()};
        inst.original = {j.at("original")[0].get<std::string>(),
                         j.at("original")[1].get<std::string>()};
        if (j.contains("perturbed"))
            inst.perturbed = {j.at("perturbed")[0].get<std::string>(),
                              j.at("perturbed")[1].get<std::string>()};
        else
            inst.perturbed = inst.original;
        if (j.contains("seed")) inst.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("trace"))
            for (const auto& r : j.at("trace")) {
                TransformRecord rec;
                transform_kind_from_string(r.at("kind").get<std::string>(),
                                           rec.kind);
                variant_from_string(r.at("variant").get<std::string>(),
                                    rec.variant);
                rec.site = {r.at("site")[0].get<int>(),
                            r.at("site")[1].get<int>(),
                            r.at("site")[2].get<int>(),
                            r.at("site")[3].get<int>()};
                rec.seed = r.at("seed").get<std::uint64_t>();
                rec.detail = r.at("detail").get<std::string>();
                inst.trace.push_back(std::move(rec));
            }
        out.push_back(std::move(inst));
    }
    return out;
}

std::string VarianceReport::to_text() const {
    std::ostringstream out;
    out << std::left << std::setw(10) << "Category" << std::right
        << std::setw(10) << "Mean" << std::setw(10) << "Stddev" << "\n";
    out << std::fixed << std::setprecision(4);
    for (const auto& [cell, m] : mean)
        out << std::left << std::setw(10) << cell << std::right
            << std::setw(10) << m << std::setw(10) << stddev.at(cell) << "\n";
    return out.str();
}

VarianceReport variance_report(const Corpus& corpus,
                               const GenerationConfig& cfg, int repetitions,
                               const EquivalencePredictor& predict) {
    if (repetitions < 2)
        throw std::invalid_argument("variance_report needs >= 2 repetitions");
    VarianceReport report;
    for (int rep = 0; rep < repetitions; ++rep) {
        GenerationConfig c = cfg;
        c.master_seed = hash_combine(cfg.master_seed,
                                     0xAB0000ULL + static_cast<std::uint64_t>(rep));
        DatasetResult data = generate_dataset(corpus, c);
        std::map<std::string, std::pair<long long, long long>> tally;
        for (const auto& inst : data.instances) {
            std::string cell = std::string(to_string(inst.label.prefix)) +
                               "-" + to_string(inst.label.flag);
            bool correct =
                predict(inst) == inst.label.ground_truth_equivalent;
            tally[cell].first += correct ? 1 : 0;
            tally[cell].second += 1;
        }
        for (const auto& [cell, t] : tally)
            report.accuracies[cell].push_back(
                static_cast<double>(t.first) / static_cast<double>(t.second));
    }
    for (const auto& [cell, accs] : report.accuracies) {
        double sum = 0;
        for (double a : accs) sum += a;
        double mean = sum / static_cast<double>(accs.size());
        double var = 0;
        for (double a : accs) var += (a - mean) * (a - mean);
        var /= static_cast<double>(accs.size() - 1);
        report.mean[cell] = mean;
        report.stddev[cell] = std::sqrt(var);
    }
    return report;
}

}  // namespace codeeq
