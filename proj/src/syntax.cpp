#include "codeeq/syntax.hpp"

#include <array>
#include <cctype>
#include <cstring>
#include <sstream>
#include <unordered_set>

namespace codeeq {

const char* to_string(BinOpKind op) {
    switch (op) {
        case BinOpKind::Add: return "+";
        case BinOpKind::Sub: return "-";
        case BinOpKind::Mul: return "*";
        case BinOpKind::FloorDiv: return "//";
        case BinOpKind::Mod: return "%";
        case BinOpKind::Pow: return "**";
    }
    return "?";
}

const char* to_string(CmpOpKind op) {
    switch (op) {
        case CmpOpKind::Eq: return "==";
        case CmpOpKind::Ne: return "!=";
        case CmpOpKind::Lt: return "<";
        case CmpOpKind::Le: return "<=";
        case CmpOpKind::Gt: return ">";
        case CmpOpKind::Ge: return ">=";
    }
    return "?";
}

const char* to_string(BoolOpKind op) {
    return op == BoolOpKind::And ? "and" : "or";
}

const char* to_string(Builtin fn) {
    switch (fn) {
        case Builtin::Input: return "input";
        case Builtin::Print: return "print";
        case Builtin::Int: return "int";
        case Builtin::Str: return "str";
        case Builtin::Len: return "len";
    }
    return "?";
}

bool is_keyword(const std::string& name) {
    static const std::unordered_set<std::string> kw = {
        "if",     "else",   "elif",   "while",  "for",      "in",
        "break",  "continue", "not",  "and",    "or",       "True",
        "False",  "None",   "def",    "return", "import",   "from",
        "class",  "try",    "except", "finally", "with",    "as",
        "lambda", "global", "nonlocal", "pass", "assert",   "raise",
        "del",    "yield",  "is"};
    return kw.count(name) > 0;
}

bool is_builtin_name(const std::string& name) {
    return name == "input" || name == "print" || name == "int" ||
           name == "str" || name == "len" || name == "range";
}

namespace {

enum class Tok {
    Name,
    Int,
    Str,
    Op,
    Newline,
    Indent,
    Dedent,
    End,
};

struct Token {
    Tok kind;
    std::string text;   // name/op text, or decoded string value
    BigInt int_value;
    Span span;
};

[[noreturn]] void syntax_error(Span sp, const std::string& msg) {
    throw ParseError(ParseErrorKind::Syntax, sp, msg);
}

[[noreturn]] void unsupported(Span sp, const std::string& construct) {
    throw ParseError(ParseErrorKind::UnsupportedConstruct, sp,
                     "unsupported construct: " + construct);
}

class Lexer {
  public:
    explicit Lexer(std::string text) : text_(std::move(text)) {
        // normalize newlines
        std::string out;
        out.reserve(text_.size());
        for (size_t i = 0; i < text_.size(); ++i) {
            if (text_[i] == '\r') {
                if (i + 1 < text_.size() && text_[i + 1] == '\n') continue;
                out.push_back('\n');
            } else {
                out.push_back(text_[i]);
            }
        }
        text_ = std::move(out);
        indents_.push_back(0);
    }

    std::vector<Token> run() {
        std::vector<Token> toks;
        bool at_line_start = true;
        while (pos_ < text_.size()) {
            if (at_line_start) {
                size_t indent = 0;
                while (pos_ < text_.size() &&
                       (text_[pos_] == ' ' || text_[pos_] == '\t')) {
                    if (text_[pos_] == '\t')
                        syntax_error(here(), "tab in indentation");
                    ++indent;
                    advance();
                }
                if (pos_ >= text_.size()) break;
                if (text_[pos_] == '\n') {  // blank line
                    advance_line();
                    continue;
                }
                if (text_[pos_] == '#') {
                    skip_comment();
                    if (pos_ < text_.size()) advance_line();
                    continue;
                }
                emit_indentation(toks, indent);
                at_line_start = false;
                continue;
            }
            char c = text_[pos_];
            if (c == ' ' || c == '\t') {
                advance();
                continue;
            }
            if (c == '#') {
                skip_comment();
                continue;
            }
            if (c == '\n') {
                toks.push_back({Tok::Newline, "\n", 0, here()});
                advance_line();
                at_line_start = true;
                continue;
            }
            if (std::isdigit(static_cast<unsigned char>(c))) {
                toks.push_back(lex_number());
                continue;
            }
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                toks.push_back(lex_name());
                continue;
            }
            if (c == '"' || c == '\'') {
                toks.push_back(lex_string());
                continue;
            }
            toks.push_back(lex_op());
        }
        if (!toks.empty() && toks.back().kind != Tok::Newline)
            toks.push_back({Tok::Newline, "\n", 0, here()});
        while (indents_.size() > 1) {
            indents_.pop_back();
            toks.push_back({Tok::Dedent, "", 0, here()});
        }
        toks.push_back({Tok::End, "", 0, here()});
        return toks;
    }

  private:
    Span here() const { return Span{line_, col_, line_, col_}; }

    void advance() {
        ++pos_;
        ++col_;
    }
    void advance_line() {
        ++pos_;
        ++line_;
        col_ = 1;
    }
    void skip_comment() {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
    }

    void emit_indentation(std::vector<Token>& toks, size_t indent) {
        if (indent > indents_.back()) {
            indents_.push_back(indent);
            toks.push_back({Tok::Indent, "", 0, here()});
            return;
        }
        while (indent < indents_.back()) {
            indents_.pop_back();
            toks.push_back({Tok::Dedent, "", 0, here()});
        }
        if (indent != indents_.back())
            syntax_error(here(), "inconsistent dedent");
    }

    Token lex_number() {
        Span sp = here();
        std::string digits;
        while (pos_ < text_.size() &&
               std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            digits.push_back(text_[pos_]);
            advance();
        }
        if (pos_ < text_.size() && (text_[pos_] == '.' || text_[pos_] == 'e' ||
                                    text_[pos_] == 'E' || text_[pos_] == 'j'))
            unsupported(sp, "non-integer numeric literal");
        sp.end_line = line_;
        sp.end_col = col_ - 1;
        Token t{Tok::Int, digits, BigInt(digits), sp};
        return t;
    }

    Token lex_name() {
        Span sp = here();
        std::string id;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                text_[pos_] == '_')) {
            id.push_back(text_[pos_]);
            advance();
        }
        sp.end_line = line_;
        sp.end_col = col_ - 1;
        if ((id == "f" || id == "r" || id == "b") && pos_ < text_.size() &&
            (text_[pos_] == '"' || text_[pos_] == '\''))
            unsupported(sp, "string prefix");
        return {Tok::Name, id, 0, sp};
    }

    Token lex_string() {
        Span sp = here();
        char quote = text_[pos_];
        advance();
        std::string value;
        while (true) {
            if (pos_ >= text_.size() || text_[pos_] == '\n')
                syntax_error(sp, "unterminated string literal");
            char c = text_[pos_];
            if (c == quote) {
                advance();
                break;
            }
            if (c == '\\') {
                advance();
                if (pos_ >= text_.size())
                    syntax_error(sp, "unterminated string literal");
                char e = text_[pos_];
                switch (e) {
                    case 'n': value.push_back('\n'); break;
                    case 't': value.push_back('\t'); break;
                    case 'r': value.push_back('\r'); break;
                    case '\\': value.push_back('\\'); break;
                    case '\'': value.push_back('\''); break;
                    case '"': value.push_back('"'); break;
                    case '0': value.push_back('\0'); break;
                    default:
                        value.push_back('\\');
                        value.push_back(e);
                        break;
                }
                advance();
                continue;
            }
            value.push_back(c);
            advance();
        }
        sp.end_line = line_;
        sp.end_col = col_ - 1;
        return {Tok::Str, value, 0, sp};
    }

    Token lex_op() {
        Span sp = here();
        static const std::array<const char*, 22> two = {
            "**=", "//=", "==", "!=", "<=", ">=", "**", "//", "+=", "-=",
            "*=",  "%=",  "/=", "->", ":=", "<<", ">>", "&=", "|=", "^=",
            "@=",  "..."};
        for (const char* op : two) {
            size_t n = std::strlen(op);
            if (text_.compare(pos_, n, op) == 0) {
                for (size_t i = 0; i < n; ++i) advance();
                sp.end_line = line_;
                sp.end_col = col_ - 1;
                return {Tok::Op, op, 0, sp};
            }
        }
        char c = text_[pos_];
        advance();
        sp.end_line = line_;
        sp.end_col = col_ - 1;
        return {Tok::Op, std::string(1, c), 0, sp};
    }

    std::string text_;
    size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
    std::vector<size_t> indents_;
};

class Parser {
  public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    Ast parse_program() {
        Ast ast;
        while (!at(Tok::End)) {
            if (accept_newline()) continue;
            parse_statement_line(ast.body);
        }
        return ast;
    }

  private:
    const Token& cur() const { return toks_[idx_]; }
    const Token& peek(size_t n = 1) const {
        return toks_[std::min(idx_ + n, toks_.size() - 1)];
    }
    bool at(Tok k) const { return cur().kind == k; }
    bool at_op(const char* op) const {
        return cur().kind == Tok::Op && cur().text == op;
    }
    bool at_name(const char* name) const {
        return cur().kind == Tok::Name && cur().text == name;
    }
    Token take() { return toks_[idx_++]; }
    void expect_op(const char* op) {
        if (!at_op(op)) syntax_error(cur().span, std::string("expected '") + op + "'");
        take();
    }
    bool accept_newline() {
        if (at(Tok::Newline)) {
            take();
            return true;
        }
        return false;
    }
    void expect_newline() {
        if (!at(Tok::Newline) && !at(Tok::End))
            syntax_error(cur().span, "expected end of line");
        if (at(Tok::Newline)) take();
    }

    // One physical line: either a compound statement or `;`-separated
    // simple statements.
    void parse_statement_line(Block& out) {
        if (is_compound_start()) {
            out.push_back(parse_compound());
            return;
        }
        out.push_back(parse_simple());
        while (at_op(";")) {
            take();
            if (at(Tok::Newline) || at(Tok::End)) break;
            out.push_back(parse_simple());
        }
        expect_newline();
    }

    bool is_compound_start() const {
        return at_name("if") || at_name("while") || at_name("for");
    }

    StmtPtr parse_compound() {
        if (at_name("if")) return parse_if(/*is_elif=*/false);
        if (at_name("while")) return parse_while();
        return parse_for();
    }

    Block parse_suite() {
        expect_op(":");
        if (accept_newline()) {
            if (!at(Tok::Indent))
                syntax_error(cur().span, "expected an indented block");
            take();
            Block body;
            while (!at(Tok::Dedent) && !at(Tok::End)) {
                if (accept_newline()) continue;
                parse_statement_line(body);
            }
            if (at(Tok::Dedent)) take();
            if (body.empty()) syntax_error(cur().span, "empty block");
            return body;
        }
        // inline suite: simple statements on the same line
        Block body;
        body.push_back(parse_simple());
        while (at_op(";")) {
            take();
            if (at(Tok::Newline) || at(Tok::End)) break;
            body.push_back(parse_simple());
        }
        expect_newline();
        return body;
    }

    StmtPtr parse_if(bool is_elif) {
        Span sp = cur().span;
        take();  // if / elif
        If node;
        node.cond = parse_expression();
        node.then_body = parse_suite();
        while (accept_newline()) {}
        if (at_name("elif")) {
            Block else_body;
            else_body.push_back(parse_if(true));
            node.else_body = std::move(else_body);
        } else if (at_name("else")) {
            take();
            node.else_body = parse_suite();
        }
        (void)is_elif;
        auto st = std::make_unique<Stmt>();
        st->node = std::move(node);
        st->span = sp;
        return st;
    }

    StmtPtr parse_while() {
        Span sp = take().span;
        While node;
        node.cond = parse_expression();
        node.body = parse_suite();
        auto st = std::make_unique<Stmt>();
        st->node = std::move(node);
        st->span = sp;
        return st;
    }

    StmtPtr parse_for() {
        Span sp = take().span;
        if (cur().kind != Tok::Name || is_keyword(cur().text) ||
            is_builtin_name(cur().text))
            syntax_error(cur().span, "expected loop variable");
        ForRange node;
        node.var = take().text;
        if (at_op(","))
            unsupported(cur().span, "tuple loop target");
        if (!at_name("in")) syntax_error(cur().span, "expected 'in'");
        take();
        if (!at_name("range"))
            unsupported(cur().span, "for loop over a non-range iterable");
        take();
        expect_op("(");
        std::vector<ExprPtr> args;
        args.push_back(parse_expression());
        while (at_op(",")) {
            take();
            if (at_op(")")) break;
            args.push_back(parse_expression());
        }
        expect_op(")");
        if (args.size() > 3)
            syntax_error(cur().span, "range takes at most 3 arguments");
        if (args.size() == 1) {
            node.stop = std::move(args[0]);
        } else if (args.size() == 2) {
            node.start = std::move(args[0]);
            node.stop = std::move(args[1]);
        } else {
            node.start = std::move(args[0]);
            node.stop = std::move(args[1]);
            node.step = std::move(args[2]);
        }
        node.body = parse_suite();
        auto st = std::make_unique<Stmt>();
        st->node = std::move(node);
        st->span = sp;
        return st;
    }

    StmtPtr parse_simple() {
        Span sp = cur().span;
        if (cur().kind == Tok::Name) {
            const std::string& id = cur().text;
            if (id == "break") {
                take();
                return make_stmt(BreakStmt{}, sp);
            }
            if (id == "continue") {
                take();
                return make_stmt(ContinueStmt{}, sp);
            }
            if (id == "def" || id == "class" || id == "import" ||
                id == "from" || id == "return" || id == "try" ||
                id == "with" || id == "lambda" || id == "global" ||
                id == "nonlocal" || id == "pass" || id == "assert" ||
                id == "raise" || id == "del" || id == "yield")
                unsupported(sp, "'" + id + "' statement");
            if (id == "else" || id == "elif")
                syntax_error(sp, "'" + id + "' without matching 'if'");
            // assignment?
            if (!is_keyword(id) && !is_builtin_name(id)) {
                const Token& nxt = peek();
                if (nxt.kind == Tok::Op) {
                    if (nxt.text == "=") {
                        std::string target = take().text;
                        take();
                        Assign node;
                        node.target = std::move(target);
                        node.value = parse_expression();
                        if (at_op("="))
                            unsupported(sp, "chained assignment");
                        return make_stmt(std::move(node), sp);
                    }
                    if (nxt.text == ",")
                        unsupported(sp, "tuple assignment");
                    BinOpKind aug;
                    if (aug_op(nxt.text, aug)) {
                        std::string target = take().text;
                        take();
                        AugAssign node;
                        node.target = std::move(target);
                        node.op = aug;
                        node.value = parse_expression();
                        return make_stmt(std::move(node), sp);
                    }
                    if (nxt.text == "/=")
                        unsupported(sp, "true-division augmented assignment");
                }
            }
        }
        // expression statement; must be a builtin call
        ExprPtr e = parse_expression();
        if (at_op("="))
            unsupported(sp, "assignment to a non-name target");
        if (!std::holds_alternative<CallOp>(e->node))
            unsupported(sp, "expression statement that is not a call");
        ExprStmt node;
        node.expr = std::move(e);
        return make_stmt(std::move(node), sp);
    }

    static bool aug_op(const std::string& text, BinOpKind& out) {
        if (text == "+=") { out = BinOpKind::Add; return true; }
        if (text == "-=") { out = BinOpKind::Sub; return true; }
        if (text == "*=") { out = BinOpKind::Mul; return true; }
        if (text == "//=") { out = BinOpKind::FloorDiv; return true; }
        if (text == "%=") { out = BinOpKind::Mod; return true; }
        if (text == "**=") { out = BinOpKind::Pow; return true; }
        return false;
    }

    template <typename Node>
    StmtPtr make_stmt(Node&& node, Span sp) {
        auto st = std::make_unique<Stmt>();
        st->node = std::forward<Node>(node);
        st->span = sp;
        return st;
    }

    template <typename Node>
    ExprPtr make_expr(Node&& node, Span sp) {
        auto e = std::make_unique<Expr>();
        e->node = std::forward<Node>(node);
        e->span = sp;
        return e;
    }

    // expression := or_expr ('if' ... -> unsupported)
    ExprPtr parse_expression() {
        ExprPtr e = parse_or();
        if (at_name("if")) unsupported(cur().span, "conditional expression");
        if (at_name("for")) unsupported(cur().span, "comprehension");
        return e;
    }

    ExprPtr parse_or() {
        ExprPtr lhs = parse_and();
        while (at_name("or")) {
            Span sp = take().span;
            ExprPtr rhs = parse_and();
            Span full = lhs->span;
            full.end_line = rhs->span.end_line;
            full.end_col = rhs->span.end_col;
            (void)sp;
            BoolOp node{std::move(lhs), BoolOpKind::Or, std::move(rhs)};
            lhs = make_expr(std::move(node), full);
        }
        return lhs;
    }

    ExprPtr parse_and() {
        ExprPtr lhs = parse_not();
        while (at_name("and")) {
            take();
            ExprPtr rhs = parse_not();
            Span full = lhs->span;
            full.end_line = rhs->span.end_line;
            full.end_col = rhs->span.end_col;
            BoolOp node{std::move(lhs), BoolOpKind::And, std::move(rhs)};
            lhs = make_expr(std::move(node), full);
        }
        return lhs;
    }

    ExprPtr parse_not() {
        if (at_name("not")) {
            Span sp = take().span;
            ExprPtr operand = parse_not();
            sp.end_line = operand->span.end_line;
            sp.end_col = operand->span.end_col;
            NotOp node{std::move(operand)};
            return make_expr(std::move(node), sp);
        }
        return parse_comparison();
    }

    ExprPtr parse_comparison() {
        ExprPtr lhs = parse_arith();
        CmpOpKind op;
        if (!cmp_op(op)) {
            if (at_name("in") || at_name("is"))
                unsupported(cur().span, "'" + cur().text + "' comparison");
            return lhs;
        }
        take();
        ExprPtr rhs = parse_arith();
        CmpOpKind op2;
        if (cmp_op(op2) || at_name("in") || at_name("is"))
            unsupported(cur().span, "chained comparison");
        Span full = lhs->span;
        full.end_line = rhs->span.end_line;
        full.end_col = rhs->span.end_col;
        Compare node{std::move(lhs), op, std::move(rhs)};
        return make_expr(std::move(node), full);
    }

    bool cmp_op(CmpOpKind& out) const {
        if (cur().kind != Tok::Op) return false;
        const std::string& t = cur().text;
        if (t == "==") { out = CmpOpKind::Eq; return true; }
        if (t == "!=") { out = CmpOpKind::Ne; return true; }
        if (t == "<") { out = CmpOpKind::Lt; return true; }
        if (t == "<=") { out = CmpOpKind::Le; return true; }
        if (t == ">") { out = CmpOpKind::Gt; return true; }
        if (t == ">=") { out = CmpOpKind::Ge; return true; }
        return false;
    }

    ExprPtr parse_arith() {
        ExprPtr lhs = parse_term();
        while (at_op("+") || at_op("-")) {
            BinOpKind op = cur().text == "+" ? BinOpKind::Add : BinOpKind::Sub;
            take();
            ExprPtr rhs = parse_term();
            Span full = lhs->span;
            full.end_line = rhs->span.end_line;
            full.end_col = rhs->span.end_col;
            BinOp node{std::move(lhs), op, std::move(rhs)};
            lhs = make_expr(std::move(node), full);
        }
        return lhs;
    }

    ExprPtr parse_term() {
        ExprPtr lhs = parse_factor();
        while (at_op("*") || at_op("//") || at_op("%") || at_op("/")) {
            if (at_op("/")) unsupported(cur().span, "true division");
            BinOpKind op = cur().text == "*"    ? BinOpKind::Mul
                           : cur().text == "//" ? BinOpKind::FloorDiv
                                                : BinOpKind::Mod;
            take();
            ExprPtr rhs = parse_factor();
            Span full = lhs->span;
            full.end_line = rhs->span.end_line;
            full.end_col = rhs->span.end_col;
            BinOp node{std::move(lhs), op, std::move(rhs)};
            lhs = make_expr(std::move(node), full);
        }
        return lhs;
    }

    ExprPtr parse_factor() {
        if (at_op("-")) {
            Span sp = take().span;
            ExprPtr operand = parse_factor();
            sp.end_line = operand->span.end_line;
            sp.end_col = operand->span.end_col;
            NegOp node{std::move(operand)};
            return make_expr(std::move(node), sp);
        }
        if (at_op("+")) {  // unary plus: drop it
            take();
            return parse_factor();
        }
        if (at_op("~")) unsupported(cur().span, "bitwise operator");
        return parse_power();
    }

    ExprPtr parse_power() {
        ExprPtr base = parse_postfix();
        if (at_op("**")) {
            take();
            ExprPtr exp = parse_factor();
            Span full = base->span;
            full.end_line = exp->span.end_line;
            full.end_col = exp->span.end_col;
            BinOp node{std::move(base), BinOpKind::Pow, std::move(exp)};
            return make_expr(std::move(node), full);
        }
        return base;
    }

    ExprPtr parse_postfix() {
        ExprPtr e = parse_atom();
        while (true) {
            if (at_op("[")) {
                Span sp = e->span;
                take();
                if (at_op(":")) unsupported(cur().span, "slice");
                ExprPtr index = parse_expression();
                if (at_op(":")) unsupported(cur().span, "slice");
                if (!at_op("]")) syntax_error(cur().span, "expected ']'");
                Span close = take().span;
                sp.end_line = close.end_line;
                sp.end_col = close.end_col;
                IndexOp node{std::move(e), std::move(index)};
                e = make_expr(std::move(node), sp);
                continue;
            }
            if (at_op(".")) unsupported(cur().span, "attribute access");
            if (at_op("(")) unsupported(e->span, "call of a non-builtin");
            break;
        }
        return e;
    }

    ExprPtr parse_atom() {
        Span sp = cur().span;
        if (at(Tok::Int)) {
            Token t = take();
            return make_expr(IntLit{t.int_value}, t.span);
        }
        if (at(Tok::Str)) {
            Token t = take();
            return make_expr(StrLit{t.text}, t.span);
        }
        if (at_op("(")) {
            take();
            if (at_op(")")) unsupported(sp, "empty tuple");
            ExprPtr inner = parse_expression();
            if (at_op(",")) unsupported(cur().span, "tuple");
            expect_op(")");
            return inner;
        }
        if (at_op("[")) {
            take();
            ListLit node;
            if (!at_op("]")) {
                node.items.push_back(parse_expression());
                while (at_op(",")) {
                    take();
                    if (at_op("]")) break;
                    node.items.push_back(parse_expression());
                }
            }
            if (!at_op("]")) syntax_error(cur().span, "expected ']'");
            Span close = take().span;
            sp.end_line = close.end_line;
            sp.end_col = close.end_col;
            return make_expr(std::move(node), sp);
        }
        if (at_op("{")) unsupported(sp, "dict or set literal");
        if (cur().kind == Tok::Name) {
            const std::string& id = cur().text;
            if (id == "True" || id == "False") {
                take();
                return make_expr(BoolLit{id == "True"}, sp);
            }
            if (id == "None") unsupported(sp, "None literal");
            Builtin fn;
            if (builtin_of(id, fn)) {
                take();
                if (!at_op("("))
                    unsupported(sp, "builtin reference without call");
                take();
                CallOp node;
                node.fn = fn;
                if (!at_op(")")) {
                    node.args.push_back(parse_call_arg());
                    while (at_op(",")) {
                        take();
                        if (at_op(")")) break;
                        node.args.push_back(parse_call_arg());
                    }
                }
                if (!at_op(")")) syntax_error(cur().span, "expected ')'");
                Span close = take().span;
                sp.end_line = close.end_line;
                sp.end_col = close.end_col;
                check_arity(node, sp);
                return make_expr(std::move(node), sp);
            }
            if (id == "range")
                unsupported(sp, "range outside a for loop");
            if (is_keyword(id))
                syntax_error(sp, "unexpected keyword '" + id + "'");
            take();
            if (at_op("(")) unsupported(sp, "call of a non-builtin");
            return make_expr(NameRef{id}, sp);
        }
        syntax_error(sp, "unexpected token '" + cur().text + "'");
    }

    ExprPtr parse_call_arg() {
        if (cur().kind == Tok::Name && peek().kind == Tok::Op &&
            peek().text == "=")
            unsupported(cur().span, "keyword argument");
        if (at_op("*")) unsupported(cur().span, "starred argument");
        return parse_expression();
    }

    static bool builtin_of(const std::string& id, Builtin& out) {
        if (id == "input") { out = Builtin::Input; return true; }
        if (id == "print") { out = Builtin::Print; return true; }
        if (id == "int") { out = Builtin::Int; return true; }
        if (id == "str") { out = Builtin::Str; return true; }
        if (id == "len") { out = Builtin::Len; return true; }
        return false;
    }

    static void check_arity(const CallOp& call, Span sp) {
        switch (call.fn) {
            case Builtin::Input:
                if (!call.args.empty())
                    unsupported(sp, "input() with a prompt argument");
                break;
            case Builtin::Print:
                break;  // any number of args
            case Builtin::Int:
            case Builtin::Str:
            case Builtin::Len:
                if (call.args.size() != 1)
                    syntax_error(sp, std::string(to_string(call.fn)) +
                                         "() takes exactly one argument");
                break;
        }
    }

    std::vector<Token> toks_;
    size_t idx_ = 0;
};

// ---------------------------------------------------------------------------
// Printer

int expr_precedence(const Expr& e) {
    return std::visit(
        [](const auto& node) -> int {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, BoolOp>)
                return node.op == BoolOpKind::Or ? 1 : 2;
            else if constexpr (std::is_same_v<T, NotOp>)
                return 3;
            else if constexpr (std::is_same_v<T, Compare>)
                return 4;
            else if constexpr (std::is_same_v<T, BinOp>) {
                switch (node.op) {
                    case BinOpKind::Add:
                    case BinOpKind::Sub: return 5;
                    case BinOpKind::Mul:
                    case BinOpKind::FloorDiv:
                    case BinOpKind::Mod: return 6;
                    case BinOpKind::Pow: return 8;
                }
                return 5;
            } else if constexpr (std::is_same_v<T, NegOp>)
                return 7;
            else if constexpr (std::is_same_v<T, IndexOp> ||
                               std::is_same_v<T, CallOp>)
                return 9;
            else
                return 10;
        },
        e.node);
}

void print_expr(std::ostream& os, const Expr& e, int min_prec);

void print_str_lit(std::ostream& os, const std::string& s) {
    os << '"';
    for (char c : s) {
        switch (c) {
            case '\\': os << "\\\\"; break;
            case '"': os << "\\\""; break;
            case '\n': os << "\\n"; break;
            case '\t': os << "\\t"; break;
            case '\r': os << "\\r"; break;
            default: os << c; break;
        }
    }
    os << '"';
}

void print_expr_inner(std::ostream& os, const Expr& e) {
    std::visit(
        [&](const auto& node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, IntLit>) {
                os << node.value.str();
            } else if constexpr (std::is_same_v<T, StrLit>) {
                print_str_lit(os, node.value);
            } else if constexpr (std::is_same_v<T, BoolLit>) {
                os << (node.value ? "True" : "False");
            } else if constexpr (std::is_same_v<T, ListLit>) {
                os << '[';
                for (size_t i = 0; i < node.items.size(); ++i) {
                    if (i) os << ", ";
                    print_expr(os, *node.items[i], 0);
                }
                os << ']';
            } else if constexpr (std::is_same_v<T, NameRef>) {
                os << node.id;
            } else if constexpr (std::is_same_v<T, BinOp>) {
                if (node.op == BinOpKind::Pow) {
                    print_expr(os, *node.lhs, 9);
                    os << " ** ";
                    print_expr(os, *node.rhs, 7);
                } else {
                    int p = expr_precedence(e);
                    print_expr(os, *node.lhs, p);
                    os << ' ' << to_string(node.op) << ' ';
                    print_expr(os, *node.rhs, p + 1);
                }
            } else if constexpr (std::is_same_v<T, Compare>) {
                print_expr(os, *node.lhs, 5);
                os << ' ' << to_string(node.op) << ' ';
                print_expr(os, *node.rhs, 5);
            } else if constexpr (std::is_same_v<T, BoolOp>) {
                int p = expr_precedence(e);
                print_expr(os, *node.lhs, p);
                os << ' ' << to_string(node.op) << ' ';
                print_expr(os, *node.rhs, p + 1);
            } else if constexpr (std::is_same_v<T, NotOp>) {
                // canonical form: operand always parenthesized
                os << "not (";
                print_expr(os, *node.operand, 0);
                os << ')';
            } else if constexpr (std::is_same_v<T, NegOp>) {
                os << '-';
                print_expr(os, *node.operand, 7);
            } else if constexpr (std::is_same_v<T, IndexOp>) {
                print_expr(os, *node.base, 9);
                os << '[';
                print_expr(os, *node.index, 0);
                os << ']';
            } else if constexpr (std::is_same_v<T, CallOp>) {
                os << to_string(node.fn) << '(';
                for (size_t i = 0; i < node.args.size(); ++i) {
                    if (i) os << ", ";
                    print_expr(os, *node.args[i], 0);
                }
                os << ')';
            }
        },
        e.node);
}

void print_expr(std::ostream& os, const Expr& e, int min_prec) {
    bool parens = expr_precedence(e) < min_prec;
    if (parens) os << '(';
    print_expr_inner(os, e);
    if (parens) os << ')';
}

void print_block(std::ostream& os, const Block& block, int indent);

void print_stmt(std::ostream& os, const Stmt& s, int indent) {
    std::string pad(static_cast<size_t>(indent) * 4, ' ');
    std::visit(
        [&](const auto& node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, Assign>) {
                os << pad << node.target << " = ";
                print_expr(os, *node.value, 0);
                os << '\n';
            } else if constexpr (std::is_same_v<T, AugAssign>) {
                os << pad << node.target << ' ' << to_string(node.op) << "= ";
                print_expr(os, *node.value, 0);
                os << '\n';
            } else if constexpr (std::is_same_v<T, ExprStmt>) {
                os << pad;
                print_expr(os, *node.expr, 0);
                os << '\n';
            } else if constexpr (std::is_same_v<T, If>) {
                os << pad << "if ";
                print_expr(os, *node.cond, 0);
                os << ":\n";
                print_block(os, node.then_body, indent + 1);
                if (!node.else_body.empty()) {
                    os << pad << "else:\n";
                    print_block(os, node.else_body, indent + 1);
                }
            } else if constexpr (std::is_same_v<T, While>) {
                os << pad << "while ";
                print_expr(os, *node.cond, 0);
                os << ":\n";
                print_block(os, node.body, indent + 1);
            } else if constexpr (std::is_same_v<T, ForRange>) {
                os << pad << "for " << node.var << " in range(";
                if (node.start) {
                    print_expr(os, *node.start, 0);
                    os << ", ";
                }
                print_expr(os, *node.stop, 0);
                if (node.step) {
                    os << ", ";
                    print_expr(os, *node.step, 0);
                }
                os << "):\n";
                print_block(os, node.body, indent + 1);
            } else if constexpr (std::is_same_v<T, BreakStmt>) {
                os << pad << "break\n";
            } else if constexpr (std::is_same_v<T, ContinueStmt>) {
                os << pad << "continue\n";
            }
        },
        s.node);
}

void print_block(std::ostream& os, const Block& block, int indent) {
    for (const auto& s : block) print_stmt(os, *s, indent);
}

}  // namespace

Ast parse(const SourceText& src) { return parse(src.text); }

Ast parse(const std::string& text) {
    Lexer lexer(text);
    Parser parser(lexer.run());
    return parser.parse_program();
}

std::string pretty_print(const Ast& ast) {
    std::ostringstream os;
    print_block(os, ast.body, 0);
    return os.str();
}

std::string pretty_print_expr(const Expr& e) {
    std::ostringstream os;
    print_expr(os, e, 0);
    return os.str();
}

// ---------------------------------------------------------------------------
// Structural equality & cloning

bool expr_equal(const Expr& a, const Expr& b) {
    if (a.node.index() != b.node.index()) return false;
    return std::visit(
        [&](const auto& na) -> bool {
            using T = std::decay_t<decltype(na)>;
            const auto& nb = std::get<T>(b.node);
            if constexpr (std::is_same_v<T, IntLit>)
                return na.value == nb.value;
            else if constexpr (std::is_same_v<T, StrLit>)
                return na.value == nb.value;
            else if constexpr (std::is_same_v<T, BoolLit>)
                return na.value == nb.value;
            else if constexpr (std::is_same_v<T, ListLit>) {
                if (na.items.size() != nb.items.size()) return false;
                for (size_t i = 0; i < na.items.size(); ++i)
                    if (!expr_equal(*na.items[i], *nb.items[i])) return false;
                return true;
            } else if constexpr (std::is_same_v<T, NameRef>)
                return na.id == nb.id;
            else if constexpr (std::is_same_v<T, BinOp>)
                return na.op == nb.op && expr_equal(*na.lhs, *nb.lhs) &&
                       expr_equal(*na.rhs, *nb.rhs);
            else if constexpr (std::is_same_v<T, Compare>)
                return na.op == nb.op && expr_equal(*na.lhs, *nb.lhs) &&
                       expr_equal(*na.rhs, *nb.rhs);
            else if constexpr (std::is_same_v<T, BoolOp>)
                return na.op == nb.op && expr_equal(*na.lhs, *nb.lhs) &&
                       expr_equal(*na.rhs, *nb.rhs);
            else if constexpr (std::is_same_v<T, NotOp>)
                return expr_equal(*na.operand, *nb.operand);
            else if constexpr (std::is_same_v<T, NegOp>)
                return expr_equal(*na.operand, *nb.operand);
            else if constexpr (std::is_same_v<T, IndexOp>)
                return expr_equal(*na.base, *nb.base) &&
                       expr_equal(*na.index, *nb.index);
            else if constexpr (std::is_same_v<T, CallOp>) {
                if (na.fn != nb.fn || na.args.size() != nb.args.size())
                    return false;
                for (size_t i = 0; i < na.args.size(); ++i)
                    if (!expr_equal(*na.args[i], *nb.args[i])) return false;
                return true;
            }
        },
        a.node);
}

namespace {
bool block_equal(const Block& a, const Block& b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i)
        if (!stmt_equal(*a[i], *b[i])) return false;
    return true;
}
}  // namespace

bool stmt_equal(const Stmt& a, const Stmt& b) {
    if (a.node.index() != b.node.index()) return false;
    return std::visit(
        [&](const auto& na) -> bool {
            using T = std::decay_t<decltype(na)>;
            const auto& nb = std::get<T>(b.node);
            if constexpr (std::is_same_v<T, Assign>)
                return na.target == nb.target &&
                       expr_equal(*na.value, *nb.value);
            else if constexpr (std::is_same_v<T, AugAssign>)
                return na.target == nb.target && na.op == nb.op &&
                       expr_equal(*na.value, *nb.value);
            else if constexpr (std::is_same_v<T, ExprStmt>)
                return expr_equal(*na.expr, *nb.expr);
            else if constexpr (std::is_same_v<T, If>)
                return expr_equal(*na.cond, *nb.cond) &&
                       block_equal(na.then_body, nb.then_body) &&
                       block_equal(na.else_body, nb.else_body);
            else if constexpr (std::is_same_v<T, While>)
                return expr_equal(*na.cond, *nb.cond) &&
                       block_equal(na.body, nb.body);
            else if constexpr (std::is_same_v<T, ForRange>) {
                if (na.var != nb.var) return false;
                auto opt_eq = [](const ExprPtr& x, const ExprPtr& y) {
                    if (!x || !y) return !x && !y;
                    return expr_equal(*x, *y);
                };
                return opt_eq(na.start, nb.start) && opt_eq(na.stop, nb.stop) &&
                       opt_eq(na.step, nb.step) && block_equal(na.body, nb.body);
            } else
                return true;  // Break / Continue carry no payload
        },
        a.node);
}

bool ast_equal(const Ast& a, const Ast& b) { return block_equal(a.body, b.body); }

ExprPtr clone(const Expr& e) {
    auto out = std::make_unique<Expr>();
    out->span = e.span;
    out->node = std::visit(
        [](const auto& node) -> decltype(out->node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, IntLit> ||
                          std::is_same_v<T, StrLit> ||
                          std::is_same_v<T, BoolLit> ||
                          std::is_same_v<T, NameRef>) {
                return node;
            } else if constexpr (std::is_same_v<T, ListLit>) {
                ListLit c;
                for (const auto& item : node.items) c.items.push_back(clone(*item));
                return c;
            } else if constexpr (std::is_same_v<T, BinOp>) {
                return BinOp{clone(*node.lhs), node.op, clone(*node.rhs)};
            } else if constexpr (std::is_same_v<T, Compare>) {
                return Compare{clone(*node.lhs), node.op, clone(*node.rhs)};
            } else if constexpr (std::is_same_v<T, BoolOp>) {
                return BoolOp{clone(*node.lhs), node.op, clone(*node.rhs)};
            } else if constexpr (std::is_same_v<T, NotOp>) {
                return NotOp{clone(*node.operand)};
            } else if constexpr (std::is_same_v<T, NegOp>) {
                return NegOp{clone(*node.operand)};
            } else if constexpr (std::is_same_v<T, IndexOp>) {
                return IndexOp{clone(*node.base), clone(*node.index)};
            } else {
                CallOp c;
                c.fn = node.fn;
                for (const auto& a : node.args) c.args.push_back(clone(*a));
                return c;
            }
        },
        e.node);
    return out;
}

namespace {
Block clone_block(const Block& b) {
    Block out;
    out.reserve(b.size());
    for (const auto& s : b) out.push_back(clone(*s));
    return out;
}
}  // namespace

StmtPtr clone(const Stmt& s) {
    auto out = std::make_unique<Stmt>();
    out->span = s.span;
    out->node = std::visit(
        [](const auto& node) -> decltype(out->node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, Assign>) {
                return Assign{node.target, clone(*node.value)};
            } else if constexpr (std::is_same_v<T, AugAssign>) {
                return AugAssign{node.target, node.op, clone(*node.value)};
            } else if constexpr (std::is_same_v<T, ExprStmt>) {
                return ExprStmt{clone(*node.expr)};
            } else if constexpr (std::is_same_v<T, If>) {
                return If{clone(*node.cond), clone_block(node.then_body),
                          clone_block(node.else_body)};
            } else if constexpr (std::is_same_v<T, While>) {
                return While{clone(*node.cond), clone_block(node.body)};
            } else if constexpr (std::is_same_v<T, ForRange>) {
                ForRange c;
                c.var = node.var;
                if (node.start) c.start = clone(*node.start);
                c.stop = clone(*node.stop);
                if (node.step) c.step = clone(*node.step);
                c.body = clone_block(node.body);
                return c;
            } else {
                return node;
            }
        },
        s.node);
    return out;
}

Ast clone(const Ast& ast) {
    Ast out;
    out.body = clone_block(ast.body);
    return out;
}

}  // namespace codeeq
