#include "codeeq/judgeval.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;
using namespace codeeq;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitMissingFile = 2;
constexpr int kExitGenerationExhausted = 3;
constexpr int kExitJudgeUnavailable = 4;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
    fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << content;
    if (!out) throw IoError("cannot write " + path);
}

bool parse_quotas(const std::string& text,
                  std::array<CellQuota, kPrefixCount>& quotas) {
    // "id=200/200,fe=1000/1000,ne=1000/1000,di=200/200"
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        std::size_t eq = item.find('=');
        std::size_t slash = item.find('/', eq);
        if (eq == std::string::npos || slash == std::string::npos)
            return false;
        Prefix prefix;
        if (!prefix_from_string(item.substr(0, eq), prefix)) return false;
        try {
            quotas[static_cast<int>(prefix)].sp =
                std::stoi(item.substr(eq + 1, slash - eq - 1));
            quotas[static_cast<int>(prefix)].np =
                std::stoi(item.substr(slash + 1));
        } catch (const std::exception&) {
            return false;
        }
    }
    return true;
}

bool parse_kinds(const std::string& text, std::vector<TransformKind>& kinds) {
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        TransformKind kind;
        if (!transform_kind_from_string(item, kind)) return false;
        kinds.push_back(kind);
    }
    return true;
}

int require_readable(const std::string& path) {
    if (!fs::exists(path)) {
        std::cerr << "error: no such file: " << path << "\n";
        return kExitMissingFile;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Code-equivalence benchmark generator and evaluator"};
    app.require_subcommand(1);
    app.set_config("--config", "", "TOML-style config file; flags override");

    std::string corpus_path;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    int jobs = static_cast<int>(std::thread::hardware_concurrency());
    if (jobs < 1) jobs = 1;

    // ingest ---------------------------------------------------------------
    auto* ingest_cmd =
        app.add_subcommand("ingest", "Load a corpus, verify, split, report");
    int min_tests = 1;
    bool no_reverify = false;
    int n_train = 0, n_val = 0, n_test = 0;
    ingest_cmd->add_option("--corpus", corpus_path, "corpus JSONL")->required();
    ingest_cmd->add_option("--out", out_dir, "output directory");
    ingest_cmd->add_option("--seed", seed, "split shuffle seed");
    ingest_cmd->add_option("--min-tests", min_tests, "minimum suite size");
    ingest_cmd->add_flag("--no-reverify", no_reverify,
                         "trust declared verdicts");
    ingest_cmd->add_option("--train", n_train, "train cluster count");
    ingest_cmd->add_option("--val", n_val, "validation cluster count");
    ingest_cmd->add_option("--test", n_test, "test cluster count");

    // transform ------------------------------------------------------------
    auto* transform_cmd =
        app.add_subcommand("transform", "Apply one perturbation to a file");
    std::string program_path, kind_name, variant_name = "sp";
    transform_cmd->add_option("file", program_path, "program file")->required();
    transform_cmd->add_option("--kind", kind_name, "transform kind")
        ->required();
    transform_cmd->add_option("--variant", variant_name, "sp or np");
    transform_cmd->add_option("--seed", seed, "transform seed");

    // generate -------------------------------------------------------------
    auto* generate_cmd =
        app.add_subcommand("generate", "Build a benchmark dataset");
    std::string quota_text = "id=200/200,fe=1000/1000,ne=1000/1000,di=200/200";
    std::string kinds_text;
    int k_max = 5, max_tries = 10, free_count = 0;
    double p_same = 0.5;
    generate_cmd->add_option("--corpus", corpus_path, "corpus JSONL")
        ->required();
    generate_cmd->add_option("--out", out_dir, "output directory");
    generate_cmd->add_option("--seed", seed, "master seed");
    generate_cmd->add_option("--quotas", quota_text,
                             "per-category counts, id=SP/NP,...");
    generate_cmd->add_option("--k-max", k_max, "perturbation budget");
    generate_cmd->add_option("--max-tries", max_tries,
                             "kind redraws per step");
    generate_cmd->add_option("--kinds", kinds_text,
                             "comma-separated allowed kinds");
    generate_cmd->add_option("--count", free_count,
                             "unconstrained mode: total instances");
    generate_cmd->add_option("--p-same", p_same,
                             "unconstrained mode: same-cluster probability");
    generate_cmd->add_option("--jobs", jobs, "worker threads");

    // evaluate -------------------------------------------------------------
    auto* evaluate_cmd =
        app.add_subcommand("evaluate", "Judge a dataset and report metrics");
    std::string dataset_path, judge_name = "oracle", style_name = "basic";
    std::string endpoint, model;
    evaluate_cmd->add_option("--corpus", corpus_path, "corpus JSONL")
        ->required();
    evaluate_cmd->add_option("--dataset", dataset_path, "dataset JSONL")
        ->required();
    evaluate_cmd->add_option("--out", out_dir, "output directory");
    evaluate_cmd
        ->add_option("--judge", judge_name,
                     "oracle | syntactic | constant-no | remote")
        ->check(CLI::IsMember({"oracle", "syntactic", "constant-no",
                               "remote"}));
    evaluate_cmd->add_option("--style", style_name, "basic | cot")
        ->check(CLI::IsMember({"basic", "cot"}));
    evaluate_cmd->add_option("--endpoint", endpoint,
                             "remote judge chat endpoint URL");
    evaluate_cmd->add_option("--model", model, "remote judge model name");
    evaluate_cmd->add_option("--jobs", jobs, "concurrent judge requests");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*ingest_cmd) {
            if (int rc = require_readable(corpus_path)) return rc;
            IngestOptions options;
            options.reverify = !no_reverify;
            options.min_tests = min_tests;
            RejectionReport report;
            Corpus corpus = ingest(corpus_path, options, report);
            if (n_train + n_val + n_test == 0)
                n_test = static_cast<int>(corpus.clusters.size());
            SplitResult splits =
                split(corpus,
                      {static_cast<std::size_t>(n_train),
                       static_cast<std::size_t>(n_val),
                       static_cast<std::size_t>(n_test)},
                      seed);
            write_file(out_dir + "/train.jsonl", to_jsonl(splits.train));
            write_file(out_dir + "/val.jsonl", to_jsonl(splits.val));
            write_file(out_dir + "/test.jsonl", to_jsonl(splits.test));
            write_file(out_dir + "/rejection_report.json", report.to_json());
            std::cout << "clusters: " << corpus.clusters.size() << " (train "
                      << splits.train.clusters.size() << ", val "
                      << splits.val.clusters.size() << ", test "
                      << splits.test.clusters.size() << ")\n";
            return kExitOk;
        }

        if (*transform_cmd) {
            if (int rc = require_readable(program_path)) return rc;
            TransformKind kind;
            if (!transform_kind_from_string(kind_name, kind)) {
                std::cerr << "error: unknown kind " << kind_name << "\n";
                return kExitInputError;
            }
            Variant variant;
            if (!variant_from_string(variant_name, variant)) {
                std::cerr << "error: variant must be sp or np\n";
                return kExitInputError;
            }
            Ast ast = parse(read_file(program_path));
            TransformOutcome outcome = apply(kind, variant, ast, seed);
            if (auto* applied = std::get_if<Applied>(&outcome))
                std::cout << pretty_print(applied->ast);
            else
                std::cout << "inapplicable: "
                          << std::get<Inapplicable>(outcome).reason << "\n";
            return kExitOk;
        }

        if (*generate_cmd) {
            if (int rc = require_readable(corpus_path)) return rc;
            GenerationConfig cfg;
            cfg.k_max = k_max;
            cfg.max_tries = max_tries;
            cfg.master_seed = seed;
            cfg.jobs = jobs;
            cfg.free_count = free_count;
            cfg.p_same = p_same;
            if (!parse_quotas(quota_text, cfg.quotas)) {
                std::cerr << "error: bad --quotas format\n";
                return kExitInputError;
            }
            if (!kinds_text.empty() &&
                !parse_kinds(kinds_text, cfg.allowed_kinds)) {
                std::cerr << "error: bad --kinds list\n";
                return kExitInputError;
            }
            RejectionReport report;
            Corpus corpus = ingest(corpus_path, {}, report);
            try {
                DatasetResult result = generate_dataset(corpus, cfg);
                write_file(out_dir + "/perturbed.jsonl",
                           dataset_to_jsonl(result.instances));
                write_file(out_dir + "/originals.jsonl",
                           dataset_originals_to_jsonl(result.instances));
                write_file(out_dir + "/stats.json", result.stats.to_json());
                write_file(out_dir + "/error_bounds.txt",
                           result.stats.error_bounds_table());
                std::cout << "instances: " << result.instances.size() << "\n";
                return kExitOk;
            } catch (const GenerationExhausted& e) {
                write_file(out_dir + "/stats.json",
                           e.partial_stats().to_json());
                std::cerr << "error: " << e.what()
                          << " (partial stats written)\n";
                return kExitGenerationExhausted;
            }
        }

        if (*evaluate_cmd) {
            if (int rc = require_readable(corpus_path)) return rc;
            if (int rc = require_readable(dataset_path)) return rc;
            RejectionReport report;
            Corpus corpus = ingest(corpus_path, {}, report);
            auto instances = dataset_from_jsonl(read_file(dataset_path));
            PromptStyle style;
            prompt_style_from_string(style_name, style);
            std::unique_ptr<Judge> judge;
            if (judge_name == "oracle")
                judge = std::make_unique<OracleJudge>(corpus);
            else if (judge_name == "syntactic")
                judge = std::make_unique<SyntacticJudge>();
            else if (judge_name == "constant-no")
                judge = std::make_unique<ConstantNoJudge>();
            else {
                RemoteJudgeConfig rc;
                rc.endpoint = endpoint;
                rc.model = model;
                rc.style = style;
                if (const char* key = std::getenv("CODEEQ_API_KEY"))
                    rc.api_key = key;
                if (rc.endpoint.empty()) {
                    std::cerr << "error: remote judge needs --endpoint\n";
                    return kExitInputError;
                }
                judge = std::make_unique<RemoteJudge>(rc);
            }
            EvaluationResult result =
                evaluate(instances, *judge, style, jobs);
            write_file(out_dir + "/metrics.json", result.to_json());
            write_file(out_dir + "/metrics.txt", result.to_text());
            std::cout << result.to_text();
            if (result.original.skipped + result.perturbed.skipped > 0)
                return kExitJudgeUnavailable;
            return kExitOk;
        }
    } catch (const SchemaError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const ParseError& e) {
        std::cerr << "error: parse failure: " << e.what() << "\n";
        return kExitInputError;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitMissingFile;
    } catch (const JudgeUnavailable& e) {
        std::cerr << "error: judge unavailable: " << e.what() << "\n";
        return kExitJudgeUnavailable;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    return kExitOk;
}
