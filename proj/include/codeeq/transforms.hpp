#pragma once

// The seven perturbation kinds, each with a semantic-preserving (sp) and a
// semantic-non-preserving (np) variant, plus the static analyses they need.

#include "codeeq/syntax.hpp"

#include <cstdint>
#include <set>
#include <string>
#include <variant>

namespace codeeq {

enum class TransformKind {
    IfElseSwap,
    ForWhileSwap,
    IfFlip,
    VarRename,
    BoolInvert,
    StmtReorder,
    ExprReformat,
};

inline constexpr int kTransformKindCount = 7;

enum class Variant { Sp, Np };

const char* to_string(TransformKind kind);
const char* to_string(Variant v);
bool transform_kind_from_string(const std::string& s, TransformKind& out);
bool variant_from_string(const std::string& s, Variant& out);

struct TransformRecord {
    TransformKind kind;
    Variant variant;
    Span site;  // node in the pre-transform Ast
    std::uint64_t seed;
    std::string detail;
};

struct Applied {
    Ast ast;
    TransformRecord record;
};

struct Inapplicable {
    std::string reason;
};

using TransformOutcome = std::variant<Applied, Inapplicable>;

/// Small deterministic generator; every transform draw flows through this so
/// results are a pure function of the seed.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next();
    /// uniform draw in [0, n)
    std::uint64_t below(std::uint64_t n);
    std::uint64_t fork();  // derived independent stream

  private:
    std::uint64_t state_;
};

std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b);

enum class NegationStyle {
    /// `not (e)`; eliminates an existing top-level `not`.
    NotWrap,
    /// invert the operator of a top-level comparison, otherwise NotWrap.
    InvertCompare,
    /// `not (inverted)` surface form; for non-comparisons `not (not (e))`.
    DoubleNegation,
};

ExprPtr negate_condition(const Expr& e,
                         NegationStyle style = NegationStyle::InvertCompare);

struct RwSets {
    std::set<std::string> reads;
    std::set<std::string> writes;
    bool does_io = false;
};

class CompoundStatementError : public std::runtime_error {
  public:
    CompoundStatementError()
        : std::runtime_error("read/write sets are defined for simple "
                             "statements only") {}
};

/// Conservative read/write/io sets of a simple statement. Throws
/// CompoundStatementError on If/While/ForRange.
RwSets read_write_sets(const Stmt& stmt);

/// Fresh 5-lowercase-letter identifier, deterministic in the seed, avoiding
/// `existing`, builtins and keywords. Re-draws on collision; gives up after
/// 100 draws.
std::string fresh_name(const std::set<std::string>& existing,
                       std::uint64_t seed);

/// Applies one seeded perturbation. The site is chosen uniformly among the
/// applicable sites; an Applied result always differs structurally from the
/// input and round-trips cleanly through the printer and parser.
TransformOutcome apply(TransformKind kind, Variant variant, const Ast& ast,
                       std::uint64_t seed);

/// All names assigned anywhere in the program (Assign/AugAssign targets and
/// loop variables) plus every referenced name.
std::set<std::string> collect_names(const Ast& ast);

}  // namespace codeeq
