// Python bindings for the main pipeline operations.

#include "codeeq/judgeval.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace codeeq;

namespace {

std::string canonical_source(const std::string& source) {
    return pretty_print(parse(source));
}

py::dict apply_transform(const std::string& source, const std::string& kind,
                         const std::string& variant, std::uint64_t seed) {
    TransformKind k;
    if (!transform_kind_from_string(kind, k))
        throw py::value_error("unknown transform kind: " + kind);
    Variant v;
    if (!variant_from_string(variant, v))
        throw py::value_error("variant must be 'sp' or 'np'");
    TransformOutcome outcome = apply(k, v, parse(source), seed);
    py::dict out;
    if (auto* applied = std::get_if<Applied>(&outcome)) {
        out["ok"] = true;
        out["source"] = pretty_print(applied->ast);
        out["detail"] = applied->record.detail;
    } else {
        out["ok"] = false;
        out["reason"] = std::get<Inapplicable>(outcome).reason;
    }
    return out;
}

py::dict run_program(const std::string& source, const std::string& stdin_text,
                     long long step_budget) {
    RunOutcome outcome = run(parse(source), stdin_text, step_budget);
    py::dict out;
    const char* status = "completed";
    if (outcome.status == RunStatus::RuntimeError) status = "runtime_error";
    if (outcome.status == RunStatus::StepBudgetExceeded)
        status = "step_budget_exceeded";
    out["status"] = status;
    out["stdout"] = outcome.stdout_text;
    out["error"] = to_string(outcome.error);
    out["steps"] = outcome.steps_used;
    return out;
}

py::dict ingest_summary(const std::string& path) {
    RejectionReport report;
    Corpus corpus = ingest(path, {}, report);
    py::dict out;
    py::list clusters;
    for (const auto& c : corpus.clusters) {
        py::dict row;
        row["problem_id"] = c.problem_id;
        row["tests"] = c.suite.cases.size();
        row["correct"] = c.correct.size();
        row["incorrect"] = c.incorrect.size();
        clusters.append(row);
    }
    out["clusters"] = clusters;
    out["rejections"] = report.to_json();
    return out;
}

py::dict generate(const std::string& corpus_path, py::dict quotas,
                  std::uint64_t seed, int k_max, int max_tries, int jobs) {
    RejectionReport report;
    Corpus corpus = ingest(corpus_path, {}, report);
    GenerationConfig cfg;
    cfg.master_seed = seed;
    cfg.k_max = k_max;
    cfg.max_tries = max_tries;
    cfg.jobs = jobs;
    for (auto item : quotas) {
        Prefix prefix;
        if (!prefix_from_string(py::cast<std::string>(item.first), prefix))
            throw py::value_error("quota keys must be id/fe/ne/di");
        auto cell = py::cast<std::pair<int, int>>(item.second);
        cfg.quotas[static_cast<int>(prefix)] = {cell.first, cell.second};
    }
    DatasetResult result = generate_dataset(corpus, cfg);
    py::dict out;
    out["perturbed_jsonl"] = dataset_to_jsonl(result.instances);
    out["originals_jsonl"] = dataset_originals_to_jsonl(result.instances);
    out["stats_json"] = result.stats.to_json();
    out["count"] = result.instances.size();
    return out;
}

py::dict evaluate_dataset(const std::string& corpus_path,
                          const std::string& dataset_jsonl,
                          const std::string& judge_name,
                          const std::string& style_name, int jobs) {
    RejectionReport report;
    Corpus corpus = ingest(corpus_path, {}, report);
    auto instances = dataset_from_jsonl(dataset_jsonl);
    PromptStyle style;
    if (!prompt_style_from_string(style_name, style))
        throw py::value_error("style must be 'basic' or 'cot'");
    std::unique_ptr<Judge> judge;
    if (judge_name == "oracle")
        judge = std::make_unique<OracleJudge>(corpus);
    else if (judge_name == "syntactic")
        judge = std::make_unique<SyntacticJudge>();
    else if (judge_name == "constant-no")
        judge = std::make_unique<ConstantNoJudge>();
    else
        throw py::value_error("judge must be oracle/syntactic/constant-no");
    EvaluationResult result = evaluate(instances, *judge, style, jobs);
    py::dict out;
    out["json"] = result.to_json();
    out["text"] = result.to_text();
    out["perturbed_acc"] = result.perturbed.acc;
    out["original_acc"] = result.original.acc;
    return out;
}

std::string prompt(const std::string& style_name, const std::string& p1,
                   const std::string& p2) {
    PromptStyle style;
    if (!prompt_style_from_string(style_name, style))
        throw py::value_error("style must be 'basic' or 'cot'");
    return build_prompt(style, p1, p2);
}

std::string verdict(const std::string& style_name,
                    const std::string& response) {
    PromptStyle style;
    if (!prompt_style_from_string(style_name, style))
        throw py::value_error("style must be 'basic' or 'cot'");
    JudgeVerdict v = parse_verdict(style, response);
    switch (v.decision) {
        case JudgeVerdict::Decision::Yes: return "yes";
        case JudgeVerdict::Decision::No: return "no";
        default: return "unparseable";
    }
}

}  // namespace

PYBIND11_MODULE(_codeeq, m) {
    m.doc() = "Code-equivalence benchmark generation and evaluation";
    m.def("canonicalize", &canonical_source, py::arg("source"),
          "Parse and pretty-print a program in canonical form");
    m.def("apply_transform", &apply_transform, py::arg("source"),
          py::arg("kind"), py::arg("variant"), py::arg("seed") = 0);
    m.def("run_program", &run_program, py::arg("source"),
          py::arg("stdin_text") = "",
          py::arg("step_budget") = kDefaultStepBudget);
    m.def("ingest_summary", &ingest_summary, py::arg("path"));
    m.def("generate", &generate, py::arg("corpus_path"), py::arg("quotas"),
          py::arg("seed") = 0, py::arg("k_max") = 5, py::arg("max_tries") = 10,
          py::arg("jobs") = 1);
    m.def("evaluate_dataset", &evaluate_dataset, py::arg("corpus_path"),
          py::arg("dataset_jsonl"), py::arg("judge") = "oracle",
          py::arg("style") = "basic", py::arg("jobs") = 1);
    m.def("build_prompt", &prompt, py::arg("style"), py::arg("prog1"),
          py::arg("prog2"));
    m.def("parse_verdict", &verdict, py::arg("style"), py::arg("response"));
    m.attr("transform_kinds") =
        py::make_tuple("if_else_swap", "for_while_swap", "if_flip",
                       "var_rename", "bool_invert", "stmt_reorder",
                       "expr_reformat");
}
