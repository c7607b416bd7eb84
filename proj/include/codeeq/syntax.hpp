#pragma once

// MiniPy syntax layer: AST, parser and canonical printer for the imperative
// Python subset the rest of the pipeline transforms and executes.

#include <boost/multiprecision/cpp_int.hpp>

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace codeeq {

using BigInt = boost::multiprecision::cpp_int;

/// 1-based source range. Siblings never overlap.
struct Span {
    int start_line = 0;
    int start_col = 0;
    int end_line = 0;
    int end_col = 0;
};

enum class BinOpKind { Add, Sub, Mul, FloorDiv, Mod, Pow };
enum class CmpOpKind { Eq, Ne, Lt, Le, Gt, Ge };
enum class BoolOpKind { And, Or };
enum class Builtin { Input, Print, Int, Str, Len };

const char* to_string(BinOpKind op);
const char* to_string(CmpOpKind op);
const char* to_string(BoolOpKind op);
const char* to_string(Builtin fn);

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

struct IntLit {
    BigInt value;  // non-negative; negative numbers are Neg(IntLit)
};
struct StrLit {
    std::string value;
};
struct BoolLit {
    bool value;
};
struct ListLit {
    std::vector<ExprPtr> items;
};
struct NameRef {
    std::string id;
};
struct BinOp {
    ExprPtr lhs;
    BinOpKind op;
    ExprPtr rhs;
};
struct Compare {
    ExprPtr lhs;
    CmpOpKind op;
    ExprPtr rhs;
};
struct BoolOp {
    ExprPtr lhs;
    BoolOpKind op;
    ExprPtr rhs;
};
struct NotOp {
    ExprPtr operand;
};
struct NegOp {
    ExprPtr operand;
};
struct IndexOp {
    ExprPtr base;
    ExprPtr index;
};
struct CallOp {
    Builtin fn;
    std::vector<ExprPtr> args;
};

struct Expr {
    std::variant<IntLit, StrLit, BoolLit, ListLit, NameRef, BinOp, Compare,
                 BoolOp, NotOp, NegOp, IndexOp, CallOp>
        node;
    Span span;
};

struct Stmt;
using StmtPtr = std::unique_ptr<Stmt>;
using Block = std::vector<StmtPtr>;  // non-empty when used as a suite

struct Assign {
    std::string target;
    ExprPtr value;
};
struct AugAssign {
    std::string target;
    BinOpKind op;
    ExprPtr value;
};
struct ExprStmt {
    ExprPtr expr;  // always a CallOp
};
struct If {
    ExprPtr cond;
    Block then_body;
    Block else_body;  // empty means no else clause
};
struct While {
    ExprPtr cond;
    Block body;
};
struct ForRange {
    std::string var;
    ExprPtr start;  // may be null (defaults to 0)
    ExprPtr stop;
    ExprPtr step;  // may be null (defaults to 1)
    Block body;
};
struct BreakStmt {};
struct ContinueStmt {};

struct Stmt {
    std::variant<Assign, AugAssign, ExprStmt, If, While, ForRange, BreakStmt,
                 ContinueStmt>
        node;
    Span span;
};

struct Ast {
    Block body;  // a whole program may be empty
};

/// Raw program text plus where it came from.
struct SourceText {
    std::string text;
    std::string origin = "synthetic";
};

enum class ParseErrorKind { Syntax, UnsupportedConstruct };

class ParseError : public std::runtime_error {
  public:
    ParseError(ParseErrorKind kind, Span span, std::string message)
        : std::runtime_error(std::move(message)), kind_(kind), span_(span) {}
    ParseErrorKind kind() const { return kind_; }
    const Span& span() const { return span_; }

  private:
    ParseErrorKind kind_;
    Span span_;
};

/// Parses MiniPy source. Throws ParseError on malformed input or on valid
/// Python that falls outside the subset (UnsupportedConstruct).
Ast parse(const SourceText& src);
Ast parse(const std::string& text);

/// Canonical form: 4-space indents, one statement per line, minimal
/// parentheses except `not (...)` which always parenthesizes its operand.
std::string pretty_print(const Ast& ast);
std::string pretty_print_expr(const Expr& e);

/// Structural equality, spans ignored.
bool ast_equal(const Ast& a, const Ast& b);
bool expr_equal(const Expr& a, const Expr& b);
bool stmt_equal(const Stmt& a, const Stmt& b);

Ast clone(const Ast& ast);
StmtPtr clone(const Stmt& s);
ExprPtr clone(const Expr& e);

bool is_keyword(const std::string& name);
bool is_builtin_name(const std::string& name);

}  // namespace codeeq
