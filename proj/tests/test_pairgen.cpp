#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "codeeq/pairgen.hpp"

#include <set>

#ifndef CODEEQ_DATA_DIR
#define CODEEQ_DATA_DIR "data"
#endif

using namespace codeeq;

namespace {

const Corpus& corpus() {
    static Corpus c = [] {
        RejectionReport report;
        return ingest(std::string(CODEEQ_DATA_DIR) + "/mini_corpus.jsonl", {},
                      report);
    }();
    return c;
}

const SolutionCluster& cluster_of(const std::string& problem_id) {
    for (const auto& cl : corpus().clusters)
        if (cl.problem_id == problem_id) return cl;
    throw std::runtime_error("unknown problem " + problem_id);
}

GenerationConfig small_config(std::uint64_t seed) {
    GenerationConfig cfg;
    cfg.master_seed = seed;
    for (auto& q : cfg.quotas) q = {2, 2};
    return cfg;
}

}  // namespace

TEST_CASE("sample_pair respects per-category membership rules") {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        auto [a, b] = sample_pair(corpus(), Prefix::Id, seed);
        CHECK(a.id == b.id);
        CHECK(a.correct);
        CHECK(ast_equal(*a.ast, *b.ast));

        auto [c, d] = sample_pair(corpus(), Prefix::Fe, seed);
        CHECK(c.correct);
        CHECK(d.correct);
        CHECK(c.id != d.id);
        CHECK(!ast_equal(*c.ast, *d.ast));
        // same problem: ids share the cluster prefix
        CHECK(c.id.substr(0, c.id.find('/')) == d.id.substr(0, d.id.find('/')));

        auto [e, f] = sample_pair(corpus(), Prefix::Ne, seed);
        // presentation order is randomized; exactly one side is correct
        CHECK(e.correct != f.correct);
        CHECK(e.id.substr(0, e.id.find('/')) == f.id.substr(0, f.id.find('/')));

        auto [g, h] = sample_pair(corpus(), Prefix::Di, seed);
        CHECK(g.correct);
        CHECK(h.correct);
        CHECK(g.id.substr(0, g.id.find('/')) != h.id.substr(0, h.id.find('/')));
    }
    CHECK(sample_pair(corpus(), Prefix::Fe, 9).first.id ==
          sample_pair(corpus(), Prefix::Fe, 9).first.id);
}

TEST_CASE("sample_pair fails cleanly when no cluster qualifies") {
    Corpus tiny;
    tiny.clusters.push_back(cluster_of("sum-two"));
    tiny.clusters[0].correct.resize(1);
    tiny.clusters[0].incorrect.clear();
    CHECK_THROWS_AS(sample_pair(tiny, Prefix::Fe, 0), NoEligibleCluster);
    CHECK_THROWS_AS(sample_pair(tiny, Prefix::Ne, 0), NoEligibleCluster);
    CHECK_THROWS_AS(sample_pair(tiny, Prefix::Di, 0), NoEligibleCluster);
    CHECK(sample_pair(tiny, Prefix::Id, 0).first.correct);
}

TEST_CASE("generate_instance invariants hold across categories and seeds") {
    GenerationConfig cfg;
    for (auto prefix : {Prefix::Id, Prefix::Fe, Prefix::Ne, Prefix::Di}) {
        for (auto flag : {Variant::Sp, Variant::Np}) {
            for (std::uint64_t seed = 0; seed < 8; ++seed) {
                BenchmarkInstance inst =
                    generate_instance(corpus(), prefix, flag, cfg, seed);
                CAPTURE(to_string(prefix));
                CAPTURE(seed);
                CHECK(inst.label.prefix == prefix);
                CHECK(inst.label.flag == flag);
                CHECK(inst.label.k >= 1);
                CHECK(inst.label.k <= cfg.k_max);
                CHECK(inst.trace.size() ==
                      static_cast<std::size_t>(inst.label.k));

                // flag consistency: np chains end with >= 1 np step, sp
                // chains are pure
                int np_steps = 0;
                for (const auto& step : inst.trace)
                    if (step.variant == Variant::Np) ++np_steps;
                if (flag == Variant::Sp)
                    CHECK(np_steps == 0);
                else
                    CHECK(np_steps >= 1);

                // ground truth: equivalent category and sp-only chain
                bool expect_equiv =
                    original_equivalent(prefix) && flag == Variant::Sp;
                CHECK(inst.label.ground_truth_equivalent == expect_equiv);

                // behavioral check against the relevant suite
                TestSuite suite = relevant_suite(corpus(), inst);
                CHECK(suite.cases.size() >= 5);
                bool diverged = outputs_diverge(parse(inst.perturbed[0]),
                                                parse(inst.perturbed[1]),
                                                suite)
                                    .has_value();
                CHECK(diverged == !inst.label.ground_truth_equivalent);
                if (inst.label.ground_truth_equivalent) {
                    CHECK(passes_suite(parse(inst.perturbed[0]), suite).passed);
                    CHECK(passes_suite(parse(inst.perturbed[1]), suite).passed);
                }

                // sources are canonical
                for (const auto& side : inst.perturbed)
                    CHECK(pretty_print(parse(side)) == side);
                for (const auto& side : inst.original)
                    CHECK(pretty_print(parse(side)) == side);
            }
        }
    }
}

TEST_CASE("quota mode produces exactly the requested cells") {
    DatasetResult result = generate_dataset(corpus(), small_config(7));
    CHECK(result.instances.size() == 16);
    std::map<std::string, int> cells;
    std::set<std::string> ids;
    for (const auto& inst : result.instances) {
        std::string cell = std::string(to_string(inst.label.prefix)) + "-" +
                           to_string(inst.label.flag);
        cells[cell] += 1;
        CHECK(ids.insert(inst.id).second);
        CHECK(inst.id.rfind(cell + "-", 0) == 0);
    }
    CHECK(cells.size() == 8);
    for (const auto& [cell, count] : cells) CHECK(count == 2);
    CHECK(result.stats.cell_counts.at("id-sp") == 2);

    int positives = 0;
    for (const auto& inst : result.instances)
        positives += inst.label.ground_truth_equivalent ? 1 : 0;
    CHECK(positives == 4);  // id-sp and fe-sp only
}

TEST_CASE("generation is deterministic and thread-count independent") {
    GenerationConfig cfg = small_config(123);
    DatasetResult a = generate_dataset(corpus(), cfg);
    DatasetResult b = generate_dataset(corpus(), cfg);
    cfg.jobs = 4;
    DatasetResult c = generate_dataset(corpus(), cfg);
    CHECK(dataset_to_jsonl(a.instances) == dataset_to_jsonl(b.instances));
    CHECK(dataset_to_jsonl(a.instances) == dataset_to_jsonl(c.instances));
    CHECK(dataset_originals_to_jsonl(a.instances) ==
          dataset_originals_to_jsonl(c.instances));
    CHECK(a.stats.to_json() == c.stats.to_json());

    GenerationConfig other = small_config(124);
    DatasetResult d = generate_dataset(corpus(), other);
    CHECK(dataset_to_jsonl(a.instances) != dataset_to_jsonl(d.instances));
}

TEST_CASE("serialization round-trips every field") {
    DatasetResult result = generate_dataset(corpus(), small_config(99));
    std::string jsonl = dataset_to_jsonl(result.instances);
    std::vector<BenchmarkInstance> back = dataset_from_jsonl(jsonl);
    REQUIRE(back.size() == result.instances.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
        const auto& x = result.instances[i];
        const auto& y = back[i];
        CHECK(x.id == y.id);
        CHECK(x.index == y.index);
        CHECK(x.seed == y.seed);
        CHECK(x.label.prefix == y.label.prefix);
        CHECK(x.label.flag == y.label.flag);
        CHECK(x.label.k == y.label.k);
        CHECK(x.label.ground_truth_equivalent ==
              y.label.ground_truth_equivalent);
        CHECK(x.problem_ids == y.problem_ids);
        CHECK(x.original == y.original);
        CHECK(x.perturbed == y.perturbed);
        REQUIRE(x.trace.size() == y.trace.size());
        for (std::size_t t = 0; t < x.trace.size(); ++t) {
            CHECK(x.trace[t].kind == y.trace[t].kind);
            CHECK(x.trace[t].variant == y.trace[t].variant);
            CHECK(x.trace[t].seed == y.trace[t].seed);
            CHECK(x.trace[t].detail == y.trace[t].detail);
        }
    }
    CHECK(dataset_to_jsonl(back) == jsonl);
}

TEST_CASE("stats track application outcomes") {
    DatasetResult result = generate_dataset(corpus(), small_config(5));
    long long applied = 0;
    for (const auto& per_variant : result.stats.per_kind)
        for (const auto& s : per_variant)
            applied += s.applied;
    long long steps = 0;
    for (const auto& inst : result.instances) steps += inst.label.k;
    // every emitted step was counted, plus possibly discarded attempts
    CHECK(applied >= steps);
    std::string table = result.stats.error_bounds_table();
    CHECK(table.find("if_else_swap") != std::string::npos);
    CHECK(table.find("Sp Error") != std::string::npos);
}

TEST_CASE("impossible kind restrictions exhaust with partial stats") {
    GenerationConfig cfg = small_config(1);
    cfg.allowed_kinds = {TransformKind::ForWhileSwap};
    cfg.instance_retries = 3;
    // restrict to clusters without for loops so the kind can never apply
    Corpus loopfree;
    for (const auto& cl : corpus().clusters) {
        bool has_for = false;
        for (const auto* side : {&cl.correct, &cl.incorrect})
            for (const auto& p : *side)
                if (p.source.find("for ") != std::string::npos) has_for = true;
        if (!has_for) loopfree.clusters.push_back(cl);
    }
    REQUIRE(loopfree.clusters.size() >= 2);
    try {
        generate_dataset(loopfree, cfg);
        FAIL("expected GenerationExhausted");
    } catch (const GenerationExhausted& e) {
        long long inapplicable = 0;
        for (const auto& per_variant : e.partial_stats().per_kind)
            for (const auto& s : per_variant) inapplicable += s.inapplicable;
        CHECK(inapplicable > 0);
    }
}

TEST_CASE("unconstrained mode samples labels with p_same") {
    GenerationConfig cfg;
    cfg.master_seed = 31;
    cfg.free_count = 40;
    cfg.p_same = 0.5;
    DatasetResult result = generate_dataset(corpus(), cfg);
    CHECK(result.instances.size() == 40);
    int positives = 0;
    for (const auto& inst : result.instances) {
        positives += inst.label.ground_truth_equivalent ? 1 : 0;
        CHECK(inst.label.ground_truth_equivalent ==
              (original_equivalent(inst.label.prefix) &&
               inst.label.flag == Variant::Sp));
    }
    // positives need a same-problem correct pair and an sp flag, so they
    // are a minority but must occur
    CHECK(positives > 0);
    CHECK(positives < 20);

    cfg.p_same = 0.0;
    for (const auto& inst : generate_dataset(corpus(), cfg).instances)
        CHECK(!inst.label.ground_truth_equivalent);
}

TEST_CASE("variance protocol reports zero spread for deterministic judges") {
    GenerationConfig cfg = small_config(77);
    VarianceReport report = variance_report(
        corpus(), cfg, 3,
        [](const BenchmarkInstance&) { return false; });
    REQUIRE(!report.accuracies.empty());
    for (const auto& [cell, accs] : report.accuracies) {
        REQUIRE(accs.size() == 3);
        CHECK(report.stddev.at(cell) == 0.0);
        double mean = report.mean.at(cell);
        bool positive_cell = cell == "id-sp" || cell == "fe-sp";
        CHECK(mean == (positive_cell ? 0.0 : 1.0));
    }
    std::string text = report.to_text();
    CHECK(text.find("id-sp") != std::string::npos);
}
