#pragma once

// Deterministic tree-walking interpreter for MiniPy with an explicit
// stdin/stdout model and a statement step budget. This is the semantic
// oracle behind all transform validation.

#include "codeeq/syntax.hpp"

#include <optional>
#include <string>
#include <vector>

namespace codeeq {

struct TestCase {
    std::string stdin_text;
    std::string expected_stdout;
};

struct TestSuite {
    std::string problem_id;
    std::vector<TestCase> cases;  // at least 1
};

enum class RunStatus { Completed, RuntimeError, StepBudgetExceeded };

enum class RuntimeErrorKind {
    None,
    UndefinedName,
    InputExhausted,
    TypeError,
    ValueError,
    IndexError,
    ZeroDivision,
};

const char* to_string(RuntimeErrorKind kind);

struct RunOutcome {
    RunStatus status = RunStatus::Completed;
    RuntimeErrorKind error = RuntimeErrorKind::None;
    Span error_span;
    std::string stdout_text;  // whatever was emitted before termination
    long long steps_used = 0;
};

inline constexpr long long kDefaultStepBudget = 1'000'000;

/// Runs a program to completion, error, or budget exhaustion. Deterministic:
/// the same (ast, stdin, budget) always yields the same outcome. Errors are
/// reported inside the RunOutcome, never thrown.
RunOutcome run(const Ast& ast, const std::string& stdin_text,
               long long step_budget = kDefaultStepBudget);

/// Online-judge style comparison: strip trailing whitespace per line and
/// trailing newlines, then require exact equality.
std::string normalize_output(const std::string& text);

struct CaseResult {
    bool passed = false;
    RunOutcome outcome;
};

struct SuiteReport {
    bool passed = false;
    std::vector<CaseResult> cases;
};

SuiteReport passes_suite(const Ast& ast, const TestSuite& suite,
                         long long step_budget = kDefaultStepBudget);

/// First test case on which the two programs observably differ: normalized
/// stdout mismatch, or a status-class mismatch (error/timeout vs completed).
std::optional<TestCase> outputs_diverge(
    const Ast& a, const Ast& b, const TestSuite& suite,
    long long step_budget = kDefaultStepBudget);

}  // namespace codeeq
