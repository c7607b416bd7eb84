#include "codeeq/interp.hpp"

#include <map>
#include <memory>
#include <sstream>

namespace codeeq {

const char* to_string(RuntimeErrorKind kind) {
    switch (kind) {
        case RuntimeErrorKind::None: return "none";
        case RuntimeErrorKind::UndefinedName: return "undefined name";
        case RuntimeErrorKind::InputExhausted: return "input exhausted";
        case RuntimeErrorKind::TypeError: return "type error";
        case RuntimeErrorKind::ValueError: return "value error";
        case RuntimeErrorKind::IndexError: return "index out of range";
        case RuntimeErrorKind::ZeroDivision: return "division by zero";
    }
    return "?";
}

namespace {

struct Value;
using ValueList = std::vector<Value>;

struct Value {
    std::variant<BigInt, bool, std::string, std::shared_ptr<ValueList>> v;

    static Value of_int(BigInt i) { return Value{std::move(i)}; }
    static Value of_bool(bool b) { return Value{b}; }
    static Value of_str(std::string s) { return Value{std::move(s)}; }
};

struct InterpError {
    RuntimeErrorKind kind;
    Span span;
};

struct BudgetExceeded {};

enum class Flow { Normal, Break, Continue };

class Interp {
  public:
    Interp(const std::string& stdin_text, long long budget) : budget_(budget) {
        size_t start = 0;
        while (start <= stdin_text.size()) {
            size_t nl = stdin_text.find('\n', start);
            if (nl == std::string::npos) {
                if (start < stdin_text.size())
                    lines_.push_back(stdin_text.substr(start));
                break;
            }
            lines_.push_back(stdin_text.substr(start, nl - start));
            start = nl + 1;
        }
    }

    RunOutcome exec_program(const Ast& ast) {
        RunOutcome out;
        try {
            exec_block(ast.body);
            out.status = RunStatus::Completed;
        } catch (const InterpError& e) {
            out.status = RunStatus::RuntimeError;
            out.error = e.kind;
            out.error_span = e.span;
        } catch (const BudgetExceeded&) {
            out.status = RunStatus::StepBudgetExceeded;
        }
        out.stdout_text = stdout_.str();
        out.steps_used = steps_;
        return out;
    }

  private:
    void tick(const Span& sp) {
        if (++steps_ > budget_) {
            (void)sp;
            throw BudgetExceeded{};
        }
    }

    // Extra cost for size-producing operations, so loops that grow strings,
    // lists, numbers, or output cannot do unbounded work within the
    // statement budget.
    void charge(std::size_t units) {
        steps_ += static_cast<long long>(units);
        if (steps_ > budget_) throw BudgetExceeded{};
    }

    void charge_big(const BigInt& r) {
        static const BigInt kThreshold = BigInt(1) << 64;
        if (r >= kThreshold || -r >= kThreshold)
            charge(static_cast<std::size_t>(
                       boost::multiprecision::msb(r < 0 ? BigInt(-r) : r)) /
                   256);
    }

    Flow exec_block(const Block& block) {
        for (const auto& s : block) {
            Flow f = exec_stmt(*s);
            if (f != Flow::Normal) return f;
        }
        return Flow::Normal;
    }

    Flow exec_stmt(const Stmt& s) {
        tick(s.span);
        return std::visit(
            [&](const auto& node) -> Flow {
                using T = std::decay_t<decltype(node)>;
                if constexpr (std::is_same_v<T, Assign>) {
                    env_[node.target] = eval(*node.value);
                    return Flow::Normal;
                } else if constexpr (std::is_same_v<T, AugAssign>) {
                    auto it = env_.find(node.target);
                    if (it == env_.end())
                        throw InterpError{RuntimeErrorKind::UndefinedName,
                                          s.span};
                    it->second = binop(node.op, it->second,
                                       eval(*node.value), s.span);
                    return Flow::Normal;
                } else if constexpr (std::is_same_v<T, ExprStmt>) {
                    eval(*node.expr);
                    return Flow::Normal;
                } else if constexpr (std::is_same_v<T, If>) {
                    if (truthy(eval(*node.cond)))
                        return exec_block(node.then_body);
                    if (!node.else_body.empty())
                        return exec_block(node.else_body);
                    return Flow::Normal;
                } else if constexpr (std::is_same_v<T, While>) {
                    while (truthy(eval(*node.cond))) {
                        tick(s.span);
                        Flow f = exec_block(node.body);
                        if (f == Flow::Break) break;
                    }
                    return Flow::Normal;
                } else if constexpr (std::is_same_v<T, ForRange>) {
                    BigInt start = 0;
                    if (node.start) start = to_int(eval(*node.start), s.span);
                    BigInt stop = to_int(eval(*node.stop), s.span);
                    BigInt step = 1;
                    if (node.step) step = to_int(eval(*node.step), s.span);
                    if (step == 0)
                        throw InterpError{RuntimeErrorKind::ValueError,
                                          s.span};
                    for (BigInt i = start;
                         step > 0 ? i < stop : i > stop; i += step) {
                        tick(s.span);
                        env_[node.var] = Value::of_int(i);
                        Flow f = exec_block(node.body);
                        if (f == Flow::Break) break;
                    }
                    return Flow::Normal;
                } else if constexpr (std::is_same_v<T, BreakStmt>) {
                    return Flow::Break;
                } else {
                    return Flow::Continue;
                }
            },
            s.node);
    }

    Value eval(const Expr& e) {
        return std::visit(
            [&](const auto& node) -> Value {
                using T = std::decay_t<decltype(node)>;
                if constexpr (std::is_same_v<T, IntLit>) {
                    return Value::of_int(node.value);
                } else if constexpr (std::is_same_v<T, StrLit>) {
                    return Value::of_str(node.value);
                } else if constexpr (std::is_same_v<T, BoolLit>) {
                    return Value::of_bool(node.value);
                } else if constexpr (std::is_same_v<T, ListLit>) {
                    auto list = std::make_shared<ValueList>();
                    for (const auto& item : node.items)
                        list->push_back(eval(*item));
                    return Value{list};
                } else if constexpr (std::is_same_v<T, NameRef>) {
                    auto it = env_.find(node.id);
                    if (it == env_.end())
                        throw InterpError{RuntimeErrorKind::UndefinedName,
                                          e.span};
                    return it->second;
                } else if constexpr (std::is_same_v<T, BinOp>) {
                    Value lhs = eval(*node.lhs);
                    Value rhs = eval(*node.rhs);
                    return binop(node.op, lhs, rhs, e.span);
                } else if constexpr (std::is_same_v<T, Compare>) {
                    Value lhs = eval(*node.lhs);
                    Value rhs = eval(*node.rhs);
                    return Value::of_bool(compare(node.op, lhs, rhs, e.span));
                } else if constexpr (std::is_same_v<T, BoolOp>) {
                    Value lhs = eval(*node.lhs);
                    if (node.op == BoolOpKind::And)
                        return truthy(lhs) ? eval(*node.rhs) : lhs;
                    return truthy(lhs) ? lhs : eval(*node.rhs);
                } else if constexpr (std::is_same_v<T, NotOp>) {
                    return Value::of_bool(!truthy(eval(*node.operand)));
                } else if constexpr (std::is_same_v<T, NegOp>) {
                    Value v = eval(*node.operand);
                    return Value::of_int(-to_int(v, e.span));
                } else if constexpr (std::is_same_v<T, IndexOp>) {
                    Value base = eval(*node.base);
                    BigInt idx = to_int(eval(*node.index), e.span);
                    return index_into(base, idx, e.span);
                } else {
                    return call(node, e.span);
                }
            },
            e.node);
    }

    Value call(const CallOp& node, Span sp) {
        switch (node.fn) {
            case Builtin::Input: {
                if (next_line_ >= lines_.size())
                    throw InterpError{RuntimeErrorKind::InputExhausted, sp};
                return Value::of_str(lines_[next_line_++]);
            }
            case Builtin::Print: {
                std::string line;
                for (size_t i = 0; i < node.args.size(); ++i) {
                    if (i) line += ' ';
                    line += to_display(eval(*node.args[i]));
                }
                line += '\n';
                charge(line.size() / 16);
                stdout_ << line;
                return Value::of_int(0);  // print() yields None; unused here
            }
            case Builtin::Int: {
                Value v = eval(*node.args[0]);
                if (std::holds_alternative<BigInt>(v.v)) return v;
                if (std::holds_alternative<bool>(v.v))
                    return Value::of_int(std::get<bool>(v.v) ? 1 : 0);
                if (std::holds_alternative<std::string>(v.v))
                    return Value::of_int(parse_int(std::get<std::string>(v.v), sp));
                throw InterpError{RuntimeErrorKind::TypeError, sp};
            }
            case Builtin::Str: {
                std::string s = to_display(eval(*node.args[0]));
                charge(s.size() / 16);
                return Value::of_str(std::move(s));
            }
            case Builtin::Len: {
                Value v = eval(*node.args[0]);
                if (std::holds_alternative<std::string>(v.v))
                    return Value::of_int(
                        BigInt(std::get<std::string>(v.v).size()));
                if (std::holds_alternative<std::shared_ptr<ValueList>>(v.v))
                    return Value::of_int(BigInt(
                        std::get<std::shared_ptr<ValueList>>(v.v)->size()));
                throw InterpError{RuntimeErrorKind::TypeError, sp};
            }
        }
        throw InterpError{RuntimeErrorKind::TypeError, sp};
    }

    BigInt parse_int(const std::string& raw, Span sp) {
        size_t b = raw.find_first_not_of(" \t\r\n");
        size_t e = raw.find_last_not_of(" \t\r\n");
        if (b == std::string::npos)
            throw InterpError{RuntimeErrorKind::ValueError, sp};
        std::string s = raw.substr(b, e - b + 1);
        size_t i = 0;
        if (s[i] == '+' || s[i] == '-') ++i;
        if (i >= s.size())
            throw InterpError{RuntimeErrorKind::ValueError, sp};
        for (size_t j = i; j < s.size(); ++j)
            if (!std::isdigit(static_cast<unsigned char>(s[j])))
                throw InterpError{RuntimeErrorKind::ValueError, sp};
        return BigInt(s);
    }

    static bool is_numeric(const Value& v) {
        return std::holds_alternative<BigInt>(v.v) ||
               std::holds_alternative<bool>(v.v);
    }

    BigInt to_int(const Value& v, Span sp) {
        if (std::holds_alternative<BigInt>(v.v)) return std::get<BigInt>(v.v);
        if (std::holds_alternative<bool>(v.v))
            return std::get<bool>(v.v) ? 1 : 0;
        throw InterpError{RuntimeErrorKind::TypeError, sp};
    }

    Value binop(BinOpKind op, const Value& lhs, const Value& rhs, Span sp) {
        // string/list concatenation and repetition first
        if (op == BinOpKind::Add) {
            if (std::holds_alternative<std::string>(lhs.v) &&
                std::holds_alternative<std::string>(rhs.v)) {
                const auto& a = std::get<std::string>(lhs.v);
                const auto& b = std::get<std::string>(rhs.v);
                charge((a.size() + b.size()) / 16);
                return Value::of_str(a + b);
            }
            if (std::holds_alternative<std::shared_ptr<ValueList>>(lhs.v) &&
                std::holds_alternative<std::shared_ptr<ValueList>>(rhs.v)) {
                auto out = std::make_shared<ValueList>(
                    *std::get<std::shared_ptr<ValueList>>(lhs.v));
                const auto& r = *std::get<std::shared_ptr<ValueList>>(rhs.v);
                out->insert(out->end(), r.begin(), r.end());
                charge(out->size() / 4);
                return Value{out};
            }
        }
        if (op == BinOpKind::Mul) {
            const Value* seq = nullptr;
            const Value* count = nullptr;
            if (is_numeric(rhs) && !is_numeric(lhs)) {
                seq = &lhs;
                count = &rhs;
            } else if (is_numeric(lhs) && !is_numeric(rhs)) {
                seq = &rhs;
                count = &lhs;
            }
            if (seq) {
                BigInt n = to_int(*count, sp);
                if (n < 0) n = 0;
                if (n > 1'000'000)
                    throw InterpError{RuntimeErrorKind::ValueError, sp};
                long long reps = n.convert_to<long long>();
                if (std::holds_alternative<std::string>(seq->v)) {
                    const auto& s = std::get<std::string>(seq->v);
                    charge(s.size() * static_cast<std::size_t>(reps) / 16);
                    std::string out;
                    for (long long i = 0; i < reps; ++i) out += s;
                    return Value::of_str(std::move(out));
                }
                if (std::holds_alternative<std::shared_ptr<ValueList>>(seq->v)) {
                    const auto& l =
                        *std::get<std::shared_ptr<ValueList>>(seq->v);
                    charge(l.size() * static_cast<std::size_t>(reps) / 4);
                    auto out = std::make_shared<ValueList>();
                    for (long long i = 0; i < reps; ++i)
                        out->insert(out->end(), l.begin(), l.end());
                    return Value{out};
                }
            }
        }
        BigInt a = to_int(lhs, sp);
        BigInt b = to_int(rhs, sp);
        switch (op) {
            case BinOpKind::Add: {
                BigInt r = a + b;
                charge_big(r);
                return Value::of_int(std::move(r));
            }
            case BinOpKind::Sub: {
                BigInt r = a - b;
                charge_big(r);
                return Value::of_int(std::move(r));
            }
            case BinOpKind::Mul: {
                BigInt r = a * b;
                charge_big(r);
                return Value::of_int(std::move(r));
            }
            case BinOpKind::FloorDiv: {
                if (b == 0)
                    throw InterpError{RuntimeErrorKind::ZeroDivision, sp};
                BigInt q = a / b;
                if ((a % b != 0) && ((a < 0) != (b < 0))) --q;  // floor
                return Value::of_int(q);
            }
            case BinOpKind::Mod: {
                if (b == 0)
                    throw InterpError{RuntimeErrorKind::ZeroDivision, sp};
                BigInt r = a % b;
                if (r != 0 && ((r < 0) != (b < 0))) r += b;
                return Value::of_int(r);
            }
            case BinOpKind::Pow: {
                if (b < 0)  // float result: outside the integer subset
                    throw InterpError{RuntimeErrorKind::ValueError, sp};
                if (b > 1'000'000)
                    throw InterpError{RuntimeErrorKind::ValueError, sp};
                BigInt result = 1;
                BigInt base = a;
                unsigned long long exp = b.convert_to<unsigned long long>();
                while (exp) {
                    if (exp & 1) {
                        result *= base;
                        charge_big(result);
                    }
                    base *= base;
                    if (exp > 1) charge_big(base);
                    exp >>= 1;
                }
                return Value::of_int(result);
            }
        }
        throw InterpError{RuntimeErrorKind::TypeError, sp};
    }

    // three-way ordering; throws on unordered types
    int order(const Value& lhs, const Value& rhs, Span sp) {
        if (is_numeric(lhs) && is_numeric(rhs)) {
            BigInt a = to_int(lhs, sp);
            BigInt b = to_int(rhs, sp);
            return a < b ? -1 : (a == b ? 0 : 1);
        }
        if (std::holds_alternative<std::string>(lhs.v) &&
            std::holds_alternative<std::string>(rhs.v)) {
            const auto& a = std::get<std::string>(lhs.v);
            const auto& b = std::get<std::string>(rhs.v);
            return a < b ? -1 : (a == b ? 0 : 1);
        }
        if (std::holds_alternative<std::shared_ptr<ValueList>>(lhs.v) &&
            std::holds_alternative<std::shared_ptr<ValueList>>(rhs.v)) {
            const auto& a = *std::get<std::shared_ptr<ValueList>>(lhs.v);
            const auto& b = *std::get<std::shared_ptr<ValueList>>(rhs.v);
            for (size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
                int c = order(a[i], b[i], sp);
                if (c != 0) return c;
            }
            return a.size() < b.size() ? -1 : (a.size() == b.size() ? 0 : 1);
        }
        throw InterpError{RuntimeErrorKind::TypeError, sp};
    }

    bool equal_values(const Value& lhs, const Value& rhs) {
        if (is_numeric(lhs) && is_numeric(rhs)) {
            BigInt a = std::holds_alternative<bool>(lhs.v)
                           ? BigInt(std::get<bool>(lhs.v) ? 1 : 0)
                           : std::get<BigInt>(lhs.v);
            BigInt b = std::holds_alternative<bool>(rhs.v)
                           ? BigInt(std::get<bool>(rhs.v) ? 1 : 0)
                           : std::get<BigInt>(rhs.v);
            return a == b;
        }
        if (lhs.v.index() != rhs.v.index()) return false;
        if (std::holds_alternative<std::string>(lhs.v))
            return std::get<std::string>(lhs.v) == std::get<std::string>(rhs.v);
        const auto& a = *std::get<std::shared_ptr<ValueList>>(lhs.v);
        const auto& b = *std::get<std::shared_ptr<ValueList>>(rhs.v);
        if (a.size() != b.size()) return false;
        for (size_t i = 0; i < a.size(); ++i)
            if (!equal_values(a[i], b[i])) return false;
        return true;
    }

    bool compare(CmpOpKind op, const Value& lhs, const Value& rhs, Span sp) {
        switch (op) {
            case CmpOpKind::Eq: return equal_values(lhs, rhs);
            case CmpOpKind::Ne: return !equal_values(lhs, rhs);
            case CmpOpKind::Lt: return order(lhs, rhs, sp) < 0;
            case CmpOpKind::Le: return order(lhs, rhs, sp) <= 0;
            case CmpOpKind::Gt: return order(lhs, rhs, sp) > 0;
            case CmpOpKind::Ge: return order(lhs, rhs, sp) >= 0;
        }
        return false;
    }

    Value index_into(const Value& base, const BigInt& raw_idx, Span sp) {
        if (std::holds_alternative<std::string>(base.v)) {
            const auto& s = std::get<std::string>(base.v);
            BigInt idx = raw_idx;
            if (idx < 0) idx += BigInt(s.size());
            if (idx < 0 || idx >= BigInt(s.size()))
                throw InterpError{RuntimeErrorKind::IndexError, sp};
            return Value::of_str(
                std::string(1, s[idx.convert_to<size_t>()]));
        }
        if (std::holds_alternative<std::shared_ptr<ValueList>>(base.v)) {
            const auto& l = *std::get<std::shared_ptr<ValueList>>(base.v);
            BigInt idx = raw_idx;
            if (idx < 0) idx += BigInt(l.size());
            if (idx < 0 || idx >= BigInt(l.size()))
                throw InterpError{RuntimeErrorKind::IndexError, sp};
            return l[idx.convert_to<size_t>()];
        }
        throw InterpError{RuntimeErrorKind::TypeError, sp};
    }

    bool truthy(const Value& v) {
        if (std::holds_alternative<BigInt>(v.v))
            return std::get<BigInt>(v.v) != 0;
        if (std::holds_alternative<bool>(v.v)) return std::get<bool>(v.v);
        if (std::holds_alternative<std::string>(v.v))
            return !std::get<std::string>(v.v).empty();
        return !std::get<std::shared_ptr<ValueList>>(v.v)->empty();
    }

    std::string to_display(const Value& v) {
        if (std::holds_alternative<BigInt>(v.v))
            return std::get<BigInt>(v.v).str();
        if (std::holds_alternative<bool>(v.v))
            return std::get<bool>(v.v) ? "True" : "False";
        if (std::holds_alternative<std::string>(v.v))
            return std::get<std::string>(v.v);
        std::string out = "[";
        const auto& l = *std::get<std::shared_ptr<ValueList>>(v.v);
        for (size_t i = 0; i < l.size(); ++i) {
            if (i) out += ", ";
            out += to_repr(l[i]);
        }
        return out + "]";
    }

    std::string to_repr(const Value& v) {
        if (std::holds_alternative<std::string>(v.v)) {
            std::string out = "'";
            for (char c : std::get<std::string>(v.v)) {
                if (c == '\'' || c == '\\') out.push_back('\\');
                if (c == '\n') {
                    out += "\\n";
                    continue;
                }
                out.push_back(c);
            }
            return out + "'";
        }
        return to_display(v);
    }

    std::vector<std::string> lines_;
    size_t next_line_ = 0;
    std::map<std::string, Value> env_;
    std::ostringstream stdout_;
    long long steps_ = 0;
    long long budget_;
};

}  // namespace

RunOutcome run(const Ast& ast, const std::string& stdin_text,
               long long step_budget) {
    Interp interp(stdin_text, step_budget);
    return interp.exec_program(ast);
}

std::string normalize_output(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    size_t start = 0;
    while (start < text.size()) {
        size_t nl = text.find('\n', start);
        size_t end = (nl == std::string::npos) ? text.size() : nl;
        size_t last = end;
        while (last > start && (text[last - 1] == ' ' || text[last - 1] == '\t' ||
                                text[last - 1] == '\r'))
            --last;
        out.append(text, start, last - start);
        out.push_back('\n');
        if (nl == std::string::npos) break;
        start = nl + 1;
    }
    while (!out.empty() && out.back() == '\n') out.pop_back();
    return out;
}

SuiteReport passes_suite(const Ast& ast, const TestSuite& suite,
                         long long step_budget) {
    SuiteReport report;
    report.passed = true;
    for (const auto& tc : suite.cases) {
        CaseResult cr;
        cr.outcome = run(ast, tc.stdin_text, step_budget);
        cr.passed = cr.outcome.status == RunStatus::Completed &&
                    normalize_output(cr.outcome.stdout_text) ==
                        normalize_output(tc.expected_stdout);
        report.passed = report.passed && cr.passed;
        report.cases.push_back(std::move(cr));
    }
    return report;
}

std::optional<TestCase> outputs_diverge(const Ast& a, const Ast& b,
                                        const TestSuite& suite,
                                        long long step_budget) {
    for (const auto& tc : suite.cases) {
        RunOutcome ra = run(a, tc.stdin_text, step_budget);
        RunOutcome rb = run(b, tc.stdin_text, step_budget);
        if (ra.status != rb.status) return tc;
        if (normalize_output(ra.stdout_text) != normalize_output(rb.stdout_text))
            return tc;
    }
    return std::nullopt;
}

}  // namespace codeeq
