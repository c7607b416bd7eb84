// Acceptance gate: one line per criterion, PASS or FAIL, nonzero exit on
// any failure. Each check is self-contained and uses independent
// recomputation where the criterion demands an oracle.

#include "codeeq/judgeval.hpp"

#include "ast_gen.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#ifndef CODEEQ_DATA_DIR
#define CODEEQ_DATA_DIR "data"
#endif
#ifndef CODEEQ_CLI_PATH
#define CODEEQ_CLI_PATH "./build/codeeq"
#endif

using namespace codeeq;

namespace {

int g_failures = 0;
std::vector<std::string> g_notes;

void report(int number, const std::string& name, bool ok) {
    std::cout << (ok ? "PASS" : "FAIL") << "  criterion " << number << ": "
              << name << "\n";
    if (!ok) ++g_failures;
}

void note(const std::string& text) { g_notes.push_back(text); }

const Corpus& corpus() {
    static Corpus c = [] {
        RejectionReport rejections;
        return ingest(std::string(CODEEQ_DATA_DIR) + "/mini_corpus.jsonl", {},
                      rejections);
    }();
    return c;
}

std::string apply_text(TransformKind kind, Variant variant,
                       const std::string& src, std::uint64_t seed) {
    TransformOutcome outcome = apply(kind, variant, parse(src), seed);
    if (auto* applied = std::get_if<Applied>(&outcome))
        return pretty_print(applied->ast);
    return "";
}

bool seed_reaches(TransformKind kind, Variant variant, const std::string& src,
                  const std::string& expected, int max_seed = 256) {
    std::string want = pretty_print(parse(expected));
    for (int seed = 0; seed < max_seed; ++seed)
        if (apply_text(kind, variant, src, seed) == want) return true;
    return false;
}

std::string sha256_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return "<missing>";
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string data = buf.str();
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i)
        hex << std::hex << std::setw(2) << std::setfill('0')
            << static_cast<int>(digest[i]);
    return hex.str();
}

// ---------------------------------------------------------------------------

bool criterion_listing_fidelity() {
    bool ok = true;

    // 1: if-else branch swap
    std::string l1 =
        "if a < b:\n    print(\"A\")\nelse:\n    print(\"B\")\n";
    ok &= apply_text(TransformKind::IfElseSwap, Variant::Sp, l1, 0) ==
          "if not (a < b):\n    print(\"B\")\nelse:\n    print(\"A\")\n";
    ok &= apply_text(TransformKind::IfElseSwap, Variant::Np, l1, 0) ==
          "if not (a < b):\n    print(\"A\")\nelse:\n    print(\"B\")\n";

    // 2: for-to-while rewrite
    std::string l2 = "for i in range(10):\n    print(i)\n";
    ok &= apply_text(TransformKind::ForWhileSwap, Variant::Sp, l2, 0) ==
          "i = 0\nwhile i < 10:\n    print(i)\n    i += 1\n";
    ok &= seed_reaches(TransformKind::ForWhileSwap, Variant::Np, l2,
                       "i = 1\nwhile i < 10:\n    print(i)\n    i += 1\n");

    // 3: boolean flag inversion
    std::string l3 = "Flag = True\nif Flag:\n    print(\"Go\")\n";
    ok &= apply_text(TransformKind::BoolInvert, Variant::Sp, l3, 0) ==
          "Flag = False\nif not (Flag):\n    print(\"Go\")\n";
    ok &= apply_text(TransformKind::BoolInvert, Variant::Np, l3, 0) ==
          "Flag = False\nif Flag:\n    print(\"Go\")\n";

    // 4: statement reorder; the np example swaps a dependent pair so the
    // reordered program reads a name before it is assigned
    std::string l4 = "a = 5\nb = 0\nprint(2 * a)\n";
    ok &= seed_reaches(TransformKind::StmtReorder, Variant::Sp, l4,
                       "a = 5\nprint(2 * a)\nb = 0\n");
    std::string l4_np = apply_text(TransformKind::StmtReorder, Variant::Np,
                                   "a = 5\nprint(2 * a)\nb = 0\n", 0);
    ok &= l4_np == "print(2 * a)\na = 5\nb = 0\n";
    ok &= run(parse(l4_np), "").error == RuntimeErrorKind::UndefinedName;

    // 5: expression reformatting, modulo the fresh temp name
    std::string l5 = "ans = a + b - c\n";
    {
        Ast sp = parse(apply_text(TransformKind::ExprReformat, Variant::Sp,
                                  l5, 0));
        const auto& hoist = std::get<Assign>(sp.body[0]->node);
        const auto& main_line = std::get<Assign>(sp.body[1]->node);
        ok &= pretty_print_expr(*hoist.value) == "a + b";
        ok &= pretty_print_expr(*main_line.value) == hoist.target + " - c";
        bool saw_np = false;
        for (int seed = 0; seed < 64 && !saw_np; ++seed) {
            Ast np = parse(apply_text(TransformKind::ExprReformat, Variant::Np,
                                      l5, seed));
            const auto& h = std::get<Assign>(np.body[0]->node);
            const auto& m = std::get<Assign>(np.body[1]->node);
            saw_np = pretty_print_expr(*h.value) == "a + b" &&
                     pretty_print_expr(*m.value) == h.target + " + b - c";
        }
        ok &= saw_np;
    }

    // 6: condition flip on an else-less if
    std::string l6 = "if a < b:\n    print(\"bigger\")\n";
    ok &= apply_text(TransformKind::IfFlip, Variant::Sp, l6, 0) ==
          "if not (a >= b):\n    print(\"bigger\")\n";
    ok &= seed_reaches(TransformKind::IfFlip, Variant::Np, l6,
                       "if a >= b:\n    print(\"bigger\")\n");

    // 7: variable renaming, modulo fresh-name choice
    std::string l7 =
        "x = 10\ny = 15\nif x > y:\n    print(\"bigger\")\nelse:\n"
        "    print(\"smaller\")\n";
    {
        std::string sp = apply_text(TransformKind::VarRename, Variant::Sp, l7,
                                    0);
        ok &= !sp.empty();
        RunOutcome orig = run(parse(l7), "");
        RunOutcome renamed = run(parse(sp), "");
        ok &= renamed.status == RunStatus::Completed;
        ok &= renamed.stdout_text == orig.stdout_text;
        std::string np = apply_text(TransformKind::VarRename, Variant::Np, l7,
                                    0);
        ok &= run(parse(np), "").error == RuntimeErrorKind::UndefinedName;
    }
    return ok;
}

bool criterion_sp_soundness() {
    GenStats stats;
    long long emitted = 0;
    long long emitted_passing = 0;
    for (const auto& cluster : corpus().clusters) {
        for (const auto& program : cluster.correct) {
            for (int k = 0; k < kTransformKindCount; ++k) {
                for (std::uint64_t seed = 0; seed < 16; ++seed) {
                    auto kind = static_cast<TransformKind>(k);
                    TransformOutcome outcome =
                        apply(kind, Variant::Sp, *program.ast, seed);
                    auto& kv = stats.per_kind[k][0];
                    if (std::holds_alternative<Inapplicable>(outcome)) {
                        kv.inapplicable += 1;
                        continue;
                    }
                    const Ast& out = std::get<Applied>(outcome).ast;
                    if (outputs_diverge(*program.ast, out, cluster.suite)) {
                        kv.validation_rejected += 1;  // caught pre-emission
                        continue;
                    }
                    kv.applied += 1;
                    emitted += 1;
                    if (passes_suite(out, cluster.suite).passed)
                        emitted_passing += 1;
                }
            }
        }
    }
    note("criterion 2: " + std::to_string(emitted) +
         " sp applications emitted, " + std::to_string(emitted_passing) +
         " pass their suites\n" + stats.error_bounds_table());
    return emitted >= 1000 && emitted_passing == emitted;
}

DatasetResult& table1_dataset() {
    static DatasetResult result = [] {
        GenerationConfig cfg;
        cfg.master_seed = 1;
        cfg.quotas[static_cast<int>(Prefix::Id)] = {200, 200};
        cfg.quotas[static_cast<int>(Prefix::Fe)] = {1000, 1000};
        cfg.quotas[static_cast<int>(Prefix::Ne)] = {1000, 1000};
        cfg.quotas[static_cast<int>(Prefix::Di)] = {200, 200};
        cfg.jobs = 4;
        return generate_dataset(corpus(), cfg);
    }();
    return result;
}

bool criterion_np_detectability() {
    long long checked = 0;
    for (const auto& inst : table1_dataset().instances) {
        if (inst.label.flag != Variant::Np) continue;
        if (inst.label.prefix != Prefix::Id && inst.label.prefix != Prefix::Fe)
            continue;
        ++checked;
        TestSuite suite = relevant_suite(corpus(), inst);
        if (!outputs_diverge(parse(inst.perturbed[0]),
                             parse(inst.perturbed[1]), suite))
            return false;
    }
    note("criterion 3: " + std::to_string(checked) +
         " id/fe np instances all diverge");
    return checked == 1200;
}

bool criterion_table1_distribution() {
    const auto& instances = table1_dataset().instances;
    if (instances.size() != 4800) return false;
    long long positives = 0;
    std::map<std::string, int> cells;
    std::set<int> ks;
    for (const auto& inst : instances) {
        positives += inst.label.ground_truth_equivalent ? 1 : 0;
        cells[std::string(to_string(inst.label.prefix)) + "-" +
              to_string(inst.label.flag)] += 1;
        ks.insert(inst.label.k);
        if (inst.label.k < 1 || inst.label.k > 5) return false;
    }
    bool ok = positives == 1200;
    ok &= cells["id-sp"] == 200 && cells["id-np"] == 200;
    ok &= cells["fe-sp"] == 1000 && cells["fe-np"] == 1000;
    ok &= cells["ne-sp"] == 1000 && cells["ne-np"] == 1000;
    ok &= cells["di-sp"] == 200 && cells["di-np"] == 200;
    ok &= ks == std::set<int>{1, 2, 3, 4, 5};
    note("criterion 4: 4800 instances, " + std::to_string(positives) +
         " positives (25%)");
    return ok;
}

bool criterion_baseline_arithmetic() {
    ConstantNoJudge constant_no;
    EvaluationResult no_result =
        evaluate(table1_dataset().instances, constant_no, PromptStyle::Basic,
                 4);
    bool ok = std::abs(no_result.perturbed.acc - 0.750) < 1e-9;
    ok &= std::abs(no_result.perturbed.w_acc - 0.500) < 1e-9;
    ok &= no_result.perturbed.pos_f1 == 0.0;
    ok &= std::abs(no_result.perturbed.neg_f1 - 0.857) < 1e-3;

    OracleJudge oracle(corpus());
    EvaluationResult oracle_result =
        evaluate(table1_dataset().instances, oracle, PromptStyle::Basic, 4);
    ok &= oracle_result.perturbed.acc == 1.0;
    note("criterion 5: constant-No Acc " +
         std::to_string(no_result.perturbed.acc) + ", NegF1 " +
         std::to_string(no_result.perturbed.neg_f1) + "; oracle Acc " +
         std::to_string(oracle_result.perturbed.acc));
    return ok;
}

// deliberately naive re-implementation used as the scoring oracle
struct BruteMetrics {
    double acc, w_acc, pos_f1, neg_f1, mac_f1, mic_pooled, mic_binary;
    std::map<std::string, double> cell_accuracy;
};

BruteMetrics brute_force(const std::vector<std::optional<JudgeVerdict>>& vs,
                         const std::vector<PairLabel>& ls) {
    double tp = 0, fp = 0, fn = 0, tn = 0;
    std::map<std::string, std::pair<double, double>> cells;
    for (std::size_t i = 0; i < vs.size(); ++i) {
        if (!vs[i].has_value()) continue;
        bool truth = ls[i].ground_truth_equivalent;
        bool yes;
        switch (vs[i]->decision) {
            case JudgeVerdict::Decision::Yes: yes = true; break;
            case JudgeVerdict::Decision::No: yes = false; break;
            default: yes = !truth; break;
        }
        tp += yes && truth;
        fp += yes && !truth;
        fn += !yes && truth;
        tn += !yes && !truth;
        std::string cell = std::string(to_string(ls[i].prefix)) + "-" +
                           to_string(ls[i].flag);
        cells[cell].first += yes == truth;
        cells[cell].second += 1;
    }
    BruteMetrics m{};
    double n = tp + fp + fn + tn;
    m.acc = (tp + tn) / n;
    double ap = tp + fn > 0 ? tp / (tp + fn) : 0;
    double an = tn + fp > 0 ? tn / (tn + fp) : 0;
    m.w_acc = (ap + an) / 2;
    m.pos_f1 = 2 * tp + fp + fn > 0 ? 2 * tp / (2 * tp + fp + fn) : 0;
    m.neg_f1 = 2 * tn + fp + fn > 0 ? 2 * tn / (2 * tn + fp + fn) : 0;
    m.mac_f1 = (m.pos_f1 + m.neg_f1) / 2;
    m.mic_binary = m.acc;
    double c = tp + tn, e = fp + fn;
    m.mic_pooled = 2 * c / (2 * c + e);
    for (const auto& [cell, t] : cells)
        m.cell_accuracy[cell] = t.first / t.second;
    return m;
}

bool criterion_metrics_oracle() {
    std::mt19937_64 gen(404);
    for (int batch = 0; batch < 100; ++batch) {
        std::size_t n = 1 + gen() % 50;
        std::vector<std::optional<JudgeVerdict>> vs;
        std::vector<PairLabel> ls;
        bool any = false;
        for (std::size_t i = 0; i < n; ++i) {
            PairLabel l;
            l.prefix = static_cast<Prefix>(gen() % 4);
            l.flag = gen() % 2 ? Variant::Sp : Variant::Np;
            l.k = 1 + static_cast<int>(gen() % 5);
            l.ground_truth_equivalent = gen() % 2 == 0;
            ls.push_back(l);
            switch (gen() % 5) {
                case 0: vs.push_back(std::nullopt); break;
                case 1: {
                    JudgeVerdict v;
                    v.decision = JudgeVerdict::Decision::Unparseable;
                    vs.push_back(v);
                    any = true;
                    break;
                }
                default: {
                    JudgeVerdict v;
                    v.decision = gen() % 2 ? JudgeVerdict::Decision::Yes
                                           : JudgeVerdict::Decision::No;
                    vs.push_back(v);
                    any = true;
                }
            }
        }
        if (!any) {
            JudgeVerdict v;
            v.decision = JudgeVerdict::Decision::No;
            vs.back() = v;
        }
        MetricsReport got = compute_metrics(vs, ls);
        BruteMetrics want = brute_force(vs, ls);
        auto close = [](double a, double b) { return std::abs(a - b) < 1e-12; };
        if (!close(got.acc, want.acc) || !close(got.w_acc, want.w_acc) ||
            !close(got.pos_f1, want.pos_f1) ||
            !close(got.neg_f1, want.neg_f1) ||
            !close(got.mac_f1, want.mac_f1) ||
            !close(got.mic_f1_binary, want.mic_binary) ||
            !close(got.mic_f1_pooled_cells, want.mic_pooled))
            return false;
        if (got.cell_accuracy.size() != want.cell_accuracy.size())
            return false;
        for (const auto& [cell, a] : want.cell_accuracy)
            if (!close(got.cell_accuracy.at(cell), a)) return false;
    }
    return true;
}

bool criterion_cli_determinism() {
    namespace fs = std::filesystem;
    fs::path base = fs::temp_directory_path() / "codeeq_accept";
    fs::remove_all(base);
    std::string corpus_path = std::string(CODEEQ_DATA_DIR) +
                              "/mini_corpus.jsonl";
    auto run_cli = [&](const std::string& out_dir, int jobs) {
        fs::create_directories(base / out_dir);
        std::string cmd = std::string(CODEEQ_CLI_PATH) + " generate --corpus " +
                          corpus_path + " --out " +
                          (base / out_dir).string() + " --seed 9 --quotas " +
                          "id=10/10,fe=25/25,ne=25/25,di=10/10 --jobs " +
                          std::to_string(jobs) + " > /dev/null 2>&1";
        return std::system(cmd.c_str()) == 0;
    };
    if (!run_cli("a", 1) || !run_cli("b", 1) || !run_cli("c", 4)) return false;
    std::string ha = sha256_file((base / "a" / "perturbed.jsonl").string());
    std::string hb = sha256_file((base / "b" / "perturbed.jsonl").string());
    std::string hc = sha256_file((base / "c" / "perturbed.jsonl").string());
    std::string oa = sha256_file((base / "a" / "originals.jsonl").string());
    std::string oc = sha256_file((base / "c" / "originals.jsonl").string());
    note("criterion 7: perturbed.jsonl sha256 " + ha);
    return ha != "<missing>" && ha == hb && ha == hc && oa == oc;
}

bool criterion_roundtrip_property() {
    for (std::uint64_t seed = 0; seed < 10000; ++seed) {
        Ast ast = testgen::random_ast(seed);
        std::string printed = pretty_print(ast);
        Ast reparsed = parse(printed);
        if (!ast_equal(ast, reparsed)) return false;
        if (pretty_print(reparsed) != printed) return false;
    }
    return true;
}

bool criterion_variance_protocol() {
    GenerationConfig cfg;
    cfg.master_seed = 55;
    for (auto& q : cfg.quotas) q = {6, 6};
    cfg.jobs = 2;

    VarianceReport constant_no = variance_report(
        corpus(), cfg, 4, [](const BenchmarkInstance&) { return false; });
    VarianceReport syntactic = variance_report(
        corpus(), cfg, 4, [](const BenchmarkInstance& inst) {
            return ast_equal(parse(inst.perturbed[0]),
                             parse(inst.perturbed[1]));
        });
    bool ok = !constant_no.accuracies.empty();
    for (const auto& report : {&constant_no, &syntactic}) {
        for (const auto& [cell, accs] : report->accuracies) {
            ok &= accs.size() == 4;
            ok &= report->stddev.at(cell) == 0.0;
        }
    }
    note("criterion 9 report:\n" + constant_no.to_text());
    return ok;
}

}  // namespace

int main() {
    using clock = std::chrono::steady_clock;
    auto timed = [&](int number, const std::string& name, auto&& fn) {
        auto t0 = clock::now();
        bool ok = false;
        try {
            ok = fn();
        } catch (const std::exception& e) {
            note("criterion " + std::to_string(number) +
                 " threw: " + e.what());
        }
        double s = std::chrono::duration<double>(clock::now() - t0).count();
        report(number, name, ok);
        std::cout << "      (" << std::fixed << std::setprecision(1) << s
                  << "s)\n";
    };

    timed(1, "listing fidelity", criterion_listing_fidelity);
    timed(2, "sp soundness with error-bounds table", criterion_sp_soundness);
    timed(3, "np detectability on id/fe cells", criterion_np_detectability);
    timed(4, "quota distribution 4800/1200", criterion_table1_distribution);
    timed(5, "baseline judge arithmetic", criterion_baseline_arithmetic);
    timed(6, "metrics vs brute-force oracle", criterion_metrics_oracle);
    timed(7, "cli generation determinism", criterion_cli_determinism);
    timed(8, "10k parser round-trips", criterion_roundtrip_property);
    timed(9, "variance protocol", criterion_variance_protocol);

    std::cout << "\n";
    for (const auto& n : g_notes) std::cout << n << "\n";
    std::cout << (g_failures == 0 ? "ALL CRITERIA PASSED"
                                  : "FAILURES: " + std::to_string(g_failures))
              << "\n";
    return g_failures == 0 ? 0 : 1;
}
