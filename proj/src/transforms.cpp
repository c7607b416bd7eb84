#include "codeeq/transforms.hpp"

#include <algorithm>
#include <functional>
#include <map>

namespace codeeq {

const char* to_string(TransformKind kind) {
    switch (kind) {
        case TransformKind::IfElseSwap: return "if_else_swap";
        case TransformKind::ForWhileSwap: return "for_while_swap";
        case TransformKind::IfFlip: return "if_flip";
        case TransformKind::VarRename: return "var_rename";
        case TransformKind::BoolInvert: return "bool_invert";
        case TransformKind::StmtReorder: return "stmt_reorder";
        case TransformKind::ExprReformat: return "expr_reformat";
    }
    return "?";
}

const char* to_string(Variant v) { return v == Variant::Sp ? "sp" : "np"; }

bool transform_kind_from_string(const std::string& s, TransformKind& out) {
    for (int i = 0; i < kTransformKindCount; ++i) {
        auto k = static_cast<TransformKind>(i);
        if (s == to_string(k)) {
            out = k;
            return true;
        }
    }
    return false;
}

bool variant_from_string(const std::string& s, Variant& out) {
    if (s == "sp") {
        out = Variant::Sp;
        return true;
    }
    if (s == "np") {
        out = Variant::Np;
        return true;
    }
    return false;
}

std::uint64_t Rng::next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t Rng::below(std::uint64_t n) { return n ? next() % n : 0; }

std::uint64_t Rng::fork() { return next(); }

std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a ^ (b + 0x9E3779B97F4A7C15ULL + (a << 6) + (a >> 2));
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

namespace {

ExprPtr make_expr_node(std::decay_t<decltype(Expr{}.node)>&& node,
                       Span span = {}) {
    auto e = std::make_unique<Expr>();
    e->node = std::move(node);
    e->span = span;
    return e;
}

StmtPtr make_stmt_node(std::decay_t<decltype(Stmt{}.node)>&& node,
                       Span span = {}) {
    auto s = std::make_unique<Stmt>();
    s->node = std::move(node);
    s->span = span;
    return s;
}

ExprPtr int_lit(long long v) {
    if (v < 0) return make_expr_node(NegOp{make_expr_node(IntLit{BigInt(-v)})});
    return make_expr_node(IntLit{BigInt(v)});
}

CmpOpKind invert_cmp(CmpOpKind op) {
    switch (op) {
        case CmpOpKind::Eq: return CmpOpKind::Ne;
        case CmpOpKind::Ne: return CmpOpKind::Eq;
        case CmpOpKind::Lt: return CmpOpKind::Ge;
        case CmpOpKind::Le: return CmpOpKind::Gt;
        case CmpOpKind::Gt: return CmpOpKind::Le;
        case CmpOpKind::Ge: return CmpOpKind::Lt;
    }
    return op;
}

// ---------------------------------------------------------------------------
// Generic walkers

void walk_exprs_in_stmt(Stmt& s, const std::function<void(ExprPtr&)>& fn);

void walk_block_exprs(Block& b, const std::function<void(ExprPtr&)>& fn) {
    for (auto& s : b) walk_exprs_in_stmt(*s, fn);
}

void walk_exprs_in_stmt(Stmt& s, const std::function<void(ExprPtr&)>& fn) {
    std::visit(
        [&](auto& node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, Assign> ||
                          std::is_same_v<T, AugAssign>) {
                fn(node.value);
            } else if constexpr (std::is_same_v<T, ExprStmt>) {
                fn(node.expr);
            } else if constexpr (std::is_same_v<T, If>) {
                fn(node.cond);
                walk_block_exprs(node.then_body, fn);
                walk_block_exprs(node.else_body, fn);
            } else if constexpr (std::is_same_v<T, While>) {
                fn(node.cond);
                walk_block_exprs(node.body, fn);
            } else if constexpr (std::is_same_v<T, ForRange>) {
                if (node.start) fn(node.start);
                fn(node.stop);
                if (node.step) fn(node.step);
                walk_block_exprs(node.body, fn);
            }
        },
        s.node);
}

void for_each_block(Block& root, const std::function<void(Block&)>& fn) {
    fn(root);
    for (auto& s : root) {
        std::visit(
            [&](auto& node) {
                using T = std::decay_t<decltype(node)>;
                if constexpr (std::is_same_v<T, If>) {
                    for_each_block(node.then_body, fn);
                    if (!node.else_body.empty())
                        for_each_block(node.else_body, fn);
                } else if constexpr (std::is_same_v<T, While> ||
                                     std::is_same_v<T, ForRange>) {
                    for_each_block(node.body, fn);
                }
            },
            s->node);
    }
}

void for_each_stmt(Block& root, const std::function<void(Stmt&)>& fn) {
    for_each_block(root, [&](Block& b) {
        for (auto& s : b) fn(*s);
    });
}

void collect_names_expr(const Expr& e, std::set<std::string>& out) {
    std::visit(
        [&](const auto& node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, NameRef>) {
                out.insert(node.id);
            } else if constexpr (std::is_same_v<T, ListLit>) {
                for (const auto& item : node.items)
                    collect_names_expr(*item, out);
            } else if constexpr (std::is_same_v<T, BinOp> ||
                                 std::is_same_v<T, Compare> ||
                                 std::is_same_v<T, BoolOp>) {
                collect_names_expr(*node.lhs, out);
                collect_names_expr(*node.rhs, out);
            } else if constexpr (std::is_same_v<T, NotOp> ||
                                 std::is_same_v<T, NegOp>) {
                collect_names_expr(*node.operand, out);
            } else if constexpr (std::is_same_v<T, IndexOp>) {
                collect_names_expr(*node.base, out);
                collect_names_expr(*node.index, out);
            } else if constexpr (std::is_same_v<T, CallOp>) {
                for (const auto& a : node.args) collect_names_expr(*a, out);
            }
        },
        e.node);
}

std::set<std::string> assigned_names(Block& root) {
    std::set<std::string> out;
    for_each_stmt(root, [&](Stmt& s) {
        std::visit(
            [&](auto& node) {
                using T = std::decay_t<decltype(node)>;
                if constexpr (std::is_same_v<T, Assign> ||
                              std::is_same_v<T, AugAssign>)
                    out.insert(node.target);
                else if constexpr (std::is_same_v<T, ForRange>)
                    out.insert(node.var);
            },
            s.node);
    });
    return out;
}

bool expr_has_call(const Expr& e) {
    bool found = false;
    std::visit(
        [&](const auto& node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, CallOp>) {
                found = true;
            } else if constexpr (std::is_same_v<T, ListLit>) {
                for (const auto& item : node.items)
                    if (expr_has_call(*item)) found = true;
            } else if constexpr (std::is_same_v<T, BinOp> ||
                                 std::is_same_v<T, Compare> ||
                                 std::is_same_v<T, BoolOp>) {
                found = expr_has_call(*node.lhs) || expr_has_call(*node.rhs);
            } else if constexpr (std::is_same_v<T, NotOp> ||
                                 std::is_same_v<T, NegOp>) {
                found = expr_has_call(*node.operand);
            } else if constexpr (std::is_same_v<T, IndexOp>) {
                found = expr_has_call(*node.base) || expr_has_call(*node.index);
            }
        },
        e.node);
    return found;
}

void expr_rw(const Expr& e, RwSets& rw) {
    std::visit(
        [&](const auto& node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, NameRef>) {
                rw.reads.insert(node.id);
            } else if constexpr (std::is_same_v<T, ListLit>) {
                for (const auto& item : node.items) expr_rw(*item, rw);
            } else if constexpr (std::is_same_v<T, BinOp> ||
                                 std::is_same_v<T, Compare> ||
                                 std::is_same_v<T, BoolOp>) {
                expr_rw(*node.lhs, rw);
                expr_rw(*node.rhs, rw);
            } else if constexpr (std::is_same_v<T, NotOp> ||
                                 std::is_same_v<T, NegOp>) {
                expr_rw(*node.operand, rw);
            } else if constexpr (std::is_same_v<T, IndexOp>) {
                expr_rw(*node.base, rw);
                expr_rw(*node.index, rw);
            } else if constexpr (std::is_same_v<T, CallOp>) {
                if (node.fn == Builtin::Input || node.fn == Builtin::Print)
                    rw.does_io = true;
                for (const auto& a : node.args) expr_rw(*a, rw);
            }
        },
        e.node);
}

bool is_simple(const Stmt& s) {
    return std::holds_alternative<Assign>(s.node) ||
           std::holds_alternative<AugAssign>(s.node) ||
           std::holds_alternative<ExprStmt>(s.node);
}

bool disjoint(const std::set<std::string>& a, const std::set<std::string>& b) {
    for (const auto& x : a)
        if (b.count(x)) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Individual transforms. Each returns a (site, detail) pair on success and
// mutates `work` in place; nullopt means no applicable site.

struct SiteResult {
    Span site;
    std::string detail;
};

using MaybeSite = std::optional<SiteResult>;

MaybeSite do_if_else_swap(Ast& work, Variant variant, Rng& rng) {
    std::vector<Stmt*> sites;
    for_each_stmt(work.body, [&](Stmt& s) {
        if (auto* n = std::get_if<If>(&s.node))
            if (!n->else_body.empty()) sites.push_back(&s);
    });
    if (sites.empty()) return std::nullopt;
    Stmt* chosen = sites[rng.below(sites.size())];
    auto& node = std::get<If>(chosen->node);
    node.cond = negate_condition(*node.cond, NegationStyle::NotWrap);
    if (variant == Variant::Sp) std::swap(node.then_body, node.else_body);
    return SiteResult{chosen->span,
                      variant == Variant::Sp ? "negate and swap branches"
                                             : "negate, branches kept"};
}

bool block_has_toplevel_continue(const Block& b) {
    for (const auto& s : b) {
        bool found = std::visit(
            [&](const auto& node) -> bool {
                using T = std::decay_t<decltype(node)>;
                if constexpr (std::is_same_v<T, ContinueStmt>)
                    return true;
                else if constexpr (std::is_same_v<T, If>)
                    return block_has_toplevel_continue(node.then_body) ||
                           block_has_toplevel_continue(node.else_body);
                else
                    return false;  // nested loops own their continue
            },
            s->node);
        if (found) return true;
    }
    return false;
}

bool block_assigns(const Block& b, const std::string& var) {
    bool found = false;
    Block& mb = const_cast<Block&>(b);
    for_each_stmt(mb, [&](Stmt& s) {
        std::visit(
            [&](auto& node) {
                using T = std::decay_t<decltype(node)>;
                if constexpr (std::is_same_v<T, Assign> ||
                              std::is_same_v<T, AugAssign>) {
                    if (node.target == var) found = true;
                } else if constexpr (std::is_same_v<T, ForRange>) {
                    if (node.var == var) found = true;
                }
            },
            s.node);
    });
    return found;
}

// literal step: absent (=1), IntLit, or Neg(IntLit); returns 0 if not literal
long long literal_step(const ForRange& node) {
    if (!node.step) return 1;
    if (auto* i = std::get_if<IntLit>(&node.step->node)) {
        if (i->value == 0 || i->value > 1'000'000) return 0;
        return i->value.convert_to<long long>();
    }
    if (auto* n = std::get_if<NegOp>(&node.step->node)) {
        if (auto* i = std::get_if<IntLit>(&n->operand->node)) {
            if (i->value == 0 || i->value > 1'000'000) return 0;
            return -i->value.convert_to<long long>();
        }
    }
    return 0;
}

MaybeSite do_for_while_swap(Ast& work, Variant variant, Rng& rng) {
    struct Site {
        Block* block;
        size_t index;
    };
    std::vector<Site> sites;
    for_each_block(work.body, [&](Block& b) {
        for (size_t i = 0; i < b.size(); ++i) {
            auto* n = std::get_if<ForRange>(&b[i]->node);
            if (!n) continue;
            if (literal_step(*n) == 0) continue;
            if (block_has_toplevel_continue(n->body)) continue;
            if (block_assigns(n->body, n->var)) continue;
            sites.push_back({&b, i});
        }
    });
    if (sites.empty()) return std::nullopt;
    Site chosen = sites[rng.below(sites.size())];
    Span site_span = (*chosen.block)[chosen.index]->span;
    auto node = std::get<ForRange>(std::move((*chosen.block)[chosen.index]->node));
    long long step = literal_step(node);

    int np_mode = -1;
    if (variant == Variant::Np) np_mode = static_cast<int>(rng.below(4));

    ExprPtr init = node.start ? std::move(node.start) : int_lit(0);
    if (np_mode == 0) {  // off-by-one initialization
        if (auto* i = std::get_if<IntLit>(&init->node))
            init = make_expr_node(IntLit{i->value + 1});
        else
            init = make_expr_node(
                BinOp{std::move(init), BinOpKind::Add, int_lit(1)});
    }
    CmpOpKind cmp = step > 0 ? CmpOpKind::Lt : CmpOpKind::Gt;
    if (np_mode == 1) cmp = step > 0 ? CmpOpKind::Le : CmpOpKind::Ge;
    ExprPtr cond = make_expr_node(Compare{
        make_expr_node(NameRef{node.var}), cmp, std::move(node.stop)});

    Block body = std::move(node.body);
    long long inc = step;
    if (np_mode == 3) inc = step * 2;
    if (np_mode != 2)  // mode 2 drops the update entirely
        body.push_back(make_stmt_node(
            AugAssign{node.var, BinOpKind::Add, int_lit(inc)}));

    Block replacement;
    replacement.push_back(make_stmt_node(Assign{node.var, std::move(init)}));
    replacement.push_back(make_stmt_node(While{std::move(cond), std::move(body)}));

    chosen.block->erase(chosen.block->begin() +
                        static_cast<std::ptrdiff_t>(chosen.index));
    chosen.block->insert(chosen.block->begin() +
                             static_cast<std::ptrdiff_t>(chosen.index),
                         std::make_move_iterator(replacement.begin()),
                         std::make_move_iterator(replacement.end()));

    std::string detail = "for->while";
    static const char* modes[] = {"init off-by-one", "flawed condition",
                                  "update dropped", "update doubled"};
    if (np_mode >= 0) detail += std::string(", ") + modes[np_mode];
    return SiteResult{site_span, detail};
}

MaybeSite do_if_flip(Ast& work, Variant variant, Rng& rng) {
    std::vector<Stmt*> sites;
    for_each_stmt(work.body, [&](Stmt& s) {
        if (auto* n = std::get_if<If>(&s.node)) {
            if (variant == Variant::Sp) {
                // double-negation must actually change the condition
                ExprPtr candidate =
                    negate_condition(*n->cond, NegationStyle::DoubleNegation);
                if (!expr_equal(*candidate, *n->cond)) sites.push_back(&s);
            } else {
                sites.push_back(&s);
            }
        }
    });
    if (sites.empty()) return std::nullopt;
    Stmt* chosen = sites[rng.below(sites.size())];
    auto& node = std::get<If>(chosen->node);
    std::string detail;
    if (variant == Variant::Sp) {
        node.cond = negate_condition(*node.cond, NegationStyle::DoubleNegation);
        detail = "double-negation surface form";
    } else {
        bool is_compare = std::holds_alternative<Compare>(node.cond->node);
        bool invert = is_compare && rng.below(2) == 0;
        if (invert) {
            node.cond =
                negate_condition(*node.cond, NegationStyle::InvertCompare);
            detail = "relational operator inverted";
        } else {
            node.cond = negate_condition(*node.cond, NegationStyle::NotWrap);
            detail = "condition negated";
        }
    }
    return SiteResult{chosen->span, detail};
}

struct NameOccurrence {
    std::string* slot;  // points at the identifier to rewrite
    bool is_use;        // NameRef in an expression (non-defining)
};

std::vector<NameOccurrence> occurrences_of(Ast& work, const std::string& var) {
    std::vector<NameOccurrence> out;
    for_each_stmt(work.body, [&](Stmt& s) {
        std::visit(
            [&](auto& node) {
                using T = std::decay_t<decltype(node)>;
                if constexpr (std::is_same_v<T, Assign> ||
                              std::is_same_v<T, AugAssign>) {
                    if (node.target == var) out.push_back({&node.target, false});
                } else if constexpr (std::is_same_v<T, ForRange>) {
                    if (node.var == var) out.push_back({&node.var, false});
                }
            },
            s.node);
        walk_exprs_in_stmt(s, [&](ExprPtr& e) {
            std::function<void(Expr&)> visit_expr = [&](Expr& ex) {
                std::visit(
                    [&](auto& n) {
                        using U = std::decay_t<decltype(n)>;
                        if constexpr (std::is_same_v<U, NameRef>) {
                            if (n.id == var) out.push_back({&n.id, true});
                        } else if constexpr (std::is_same_v<U, ListLit>) {
                            for (auto& item : n.items) visit_expr(*item);
                        } else if constexpr (std::is_same_v<U, BinOp> ||
                                             std::is_same_v<U, Compare> ||
                                             std::is_same_v<U, BoolOp>) {
                            visit_expr(*n.lhs);
                            visit_expr(*n.rhs);
                        } else if constexpr (std::is_same_v<U, NotOp> ||
                                             std::is_same_v<U, NegOp>) {
                            visit_expr(*n.operand);
                        } else if constexpr (std::is_same_v<U, IndexOp>) {
                            visit_expr(*n.base);
                            visit_expr(*n.index);
                        } else if constexpr (std::is_same_v<U, CallOp>) {
                            for (auto& a : n.args) visit_expr(*a);
                        }
                    },
                    ex.node);
            };
            visit_expr(*e);
        });
    });
    return out;
}

MaybeSite do_var_rename(Ast& work, Variant variant, Rng& rng) {
    std::set<std::string> vars_set = assigned_names(work.body);
    std::vector<std::string> vars(vars_set.begin(), vars_set.end());
    if (vars.empty()) return std::nullopt;

    std::string np_victim;
    if (variant == Variant::Np) {
        std::vector<std::string> eligible;
        for (const auto& v : vars) {
            auto occ = occurrences_of(work, v);
            size_t uses = 0;
            for (const auto& o : occ) uses += o.is_use ? 1 : 0;
            if (occ.size() >= 2 && uses >= 1) eligible.push_back(v);
        }
        if (eligible.empty()) return std::nullopt;
        np_victim = eligible[rng.below(eligible.size())];
    }

    size_t m = 1 + rng.below(vars.size());
    // seeded selection of m distinct variables
    std::vector<std::string> pool = vars;
    std::vector<std::string> chosen;
    for (size_t i = 0; i < m; ++i) {
        size_t j = rng.below(pool.size());
        chosen.push_back(pool[j]);
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(j));
    }
    if (variant == Variant::Np &&
        std::find(chosen.begin(), chosen.end(), np_victim) == chosen.end())
        chosen[rng.below(chosen.size())] = np_victim;

    std::set<std::string> taken = collect_names(work);
    std::string detail;
    std::map<std::string, std::string> mapping;
    for (const auto& v : chosen) {
        std::string fresh = fresh_name(taken, rng.fork());
        taken.insert(fresh);
        mapping[v] = fresh;
        if (!detail.empty()) detail += ", ";
        detail += v + "->" + fresh;
    }
    for (const auto& [old_name, new_name] : mapping) {
        for (auto& occ : occurrences_of(work, old_name)) *occ.slot = new_name;
    }
    if (variant == Variant::Np) {
        const std::string& renamed = mapping[np_victim];
        auto occ = occurrences_of(work, renamed);
        std::vector<NameOccurrence> uses;
        for (auto& o : occ)
            if (o.is_use) uses.push_back(o);
        // eligibility guaranteed a use exists
        NameOccurrence broken = uses[rng.below(uses.size())];
        std::string corrupt = fresh_name(taken, rng.fork());
        *broken.slot = corrupt;
        detail += ", broke one use of " + np_victim + " as " + corrupt;
    }
    return SiteResult{Span{}, detail};
}

MaybeSite do_bool_invert(Ast& work, Variant variant, Rng& rng) {
    struct Info {
        std::vector<BoolLit*> literal_assigns;  // in program order
        std::vector<Expr*> bool_uses;           // NameRef or NotOp(NameRef)
        bool disqualified = false;
    };
    std::map<std::string, Info> info;

    auto note_nonbool_use = [&](const std::string& id) {
        info[id].disqualified = true;
    };
    std::function<void(Expr&, bool)> scan = [&](Expr& e, bool bool_pos) {
        std::visit(
            [&](auto& n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, NameRef>) {
                    if (bool_pos)
                        info[n.id].bool_uses.push_back(&e);
                    else
                        note_nonbool_use(n.id);
                } else if constexpr (std::is_same_v<T, NotOp>) {
                    if (bool_pos) {
                        if (auto* name = std::get_if<NameRef>(&n.operand->node)) {
                            info[name->id].bool_uses.push_back(&e);
                            return;
                        }
                    }
                    scan(*n.operand, bool_pos);
                } else if constexpr (std::is_same_v<T, BoolOp>) {
                    scan(*n.lhs, bool_pos);
                    scan(*n.rhs, bool_pos);
                } else if constexpr (std::is_same_v<T, BinOp> ||
                                     std::is_same_v<T, Compare>) {
                    scan(*n.lhs, false);
                    scan(*n.rhs, false);
                } else if constexpr (std::is_same_v<T, NegOp>) {
                    scan(*n.operand, false);
                } else if constexpr (std::is_same_v<T, IndexOp>) {
                    scan(*n.base, false);
                    scan(*n.index, false);
                } else if constexpr (std::is_same_v<T, ListLit>) {
                    for (auto& item : n.items) scan(*item, false);
                } else if constexpr (std::is_same_v<T, CallOp>) {
                    for (auto& a : n.args) scan(*a, false);
                }
            },
            e.node);
    };

    std::function<void(Block&)> scan_block = [&](Block& b) {
        for (auto& s : b) {
            std::visit(
                [&](auto& node) {
                    using T = std::decay_t<decltype(node)>;
                    if constexpr (std::is_same_v<T, Assign>) {
                        if (auto* lit = std::get_if<BoolLit>(&node.value->node))
                            info[node.target].literal_assigns.push_back(lit);
                        else {
                            info[node.target].disqualified = true;
                            scan(*node.value, false);
                        }
                    } else if constexpr (std::is_same_v<T, AugAssign>) {
                        info[node.target].disqualified = true;
                        scan(*node.value, false);
                    } else if constexpr (std::is_same_v<T, ExprStmt>) {
                        scan(*node.expr, false);
                    } else if constexpr (std::is_same_v<T, If>) {
                        scan(*node.cond, true);
                        scan_block(node.then_body);
                        scan_block(node.else_body);
                    } else if constexpr (std::is_same_v<T, While>) {
                        scan(*node.cond, true);
                        scan_block(node.body);
                    } else if constexpr (std::is_same_v<T, ForRange>) {
                        info[node.var].disqualified = true;
                        if (node.start) scan(*node.start, false);
                        scan(*node.stop, false);
                        if (node.step) scan(*node.step, false);
                        scan_block(node.body);
                    }
                },
                s->node);
        }
    };
    scan_block(work.body);

    std::vector<std::string> candidates;
    for (auto& [name, in] : info)
        if (!in.disqualified && !in.literal_assigns.empty())
            candidates.push_back(name);
    if (candidates.empty()) return std::nullopt;

    const std::string& var = candidates[rng.below(candidates.size())];
    Info& in = info[var];
    if (variant == Variant::Sp) {
        for (BoolLit* lit : in.literal_assigns) lit->value = !lit->value;
        for (Expr* use : in.bool_uses) {
            if (auto* name = std::get_if<NameRef>(&use->node)) {
                auto inner = make_expr_node(NameRef{name->id}, use->span);
                use->node = NotOp{std::move(inner)};
            } else {
                auto& not_node = std::get<NotOp>(use->node);
                std::string id = std::get<NameRef>(not_node.operand->node).id;
                use->node = NameRef{std::move(id)};
            }
        }
        return SiteResult{Span{}, "flip literals and toggle uses of " + var};
    }
    in.literal_assigns.front()->value = !in.literal_assigns.front()->value;
    return SiteResult{Span{}, "flip initialization of " + var + " only"};
}

MaybeSite do_stmt_reorder(Ast& work, Variant variant, Rng& rng) {
    struct Site {
        Block* block;
        size_t index;  // swap index and index+1
    };
    std::vector<Site> sites;
    for_each_block(work.body, [&](Block& b) {
        for (size_t i = 0; i + 1 < b.size(); ++i) {
            if (!is_simple(*b[i]) || !is_simple(*b[i + 1])) continue;
            if (stmt_equal(*b[i], *b[i + 1])) continue;  // swap is a no-op
            RwSets rw1 = read_write_sets(*b[i]);
            RwSets rw2 = read_write_sets(*b[i + 1]);
            if (variant == Variant::Sp) {
                std::set<std::string> touch2 = rw2.reads;
                touch2.insert(rw2.writes.begin(), rw2.writes.end());
                std::set<std::string> touch1 = rw1.reads;
                touch1.insert(rw1.writes.begin(), rw1.writes.end());
                bool independent = disjoint(rw1.writes, touch2) &&
                                   disjoint(rw2.writes, touch1);
                if (independent && !(rw1.does_io && rw2.does_io))
                    sites.push_back({&b, i});
            } else {
                if (!disjoint(rw1.writes, rw2.reads)) sites.push_back({&b, i});
            }
        }
    });
    if (sites.empty()) return std::nullopt;
    Site chosen = sites[rng.below(sites.size())];
    Span site = (*chosen.block)[chosen.index]->span;
    std::swap((*chosen.block)[chosen.index], (*chosen.block)[chosen.index + 1]);
    return SiteResult{site, variant == Variant::Sp
                                ? "swap independent neighbors"
                                : "swap dependent neighbors"};
}

// leftmost-innermost call-free binary sub-expression
Expr* find_hoistable(Expr& e) {
    Expr* result = nullptr;
    std::visit(
        [&](auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, BinOp>) {
                if (!expr_has_call(e)) {
                    Expr* inner = find_hoistable(*n.lhs);
                    result = inner ? inner : &e;
                    return;
                }
                result = find_hoistable(*n.lhs);
                if (!result) result = find_hoistable(*n.rhs);
            } else if constexpr (std::is_same_v<T, Compare> ||
                                 std::is_same_v<T, BoolOp>) {
                result = find_hoistable(*n.lhs);
                if (!result) result = find_hoistable(*n.rhs);
            } else if constexpr (std::is_same_v<T, NotOp> ||
                                 std::is_same_v<T, NegOp>) {
                result = find_hoistable(*n.operand);
            } else if constexpr (std::is_same_v<T, IndexOp>) {
                result = find_hoistable(*n.base);
                if (!result) result = find_hoistable(*n.index);
            } else if constexpr (std::is_same_v<T, ListLit>) {
                for (auto& item : n.items) {
                    result = find_hoistable(*item);
                    if (result) return;
                }
            } else if constexpr (std::is_same_v<T, CallOp>) {
                for (auto& a : n.args) {
                    result = find_hoistable(*a);
                    if (result) return;
                }
            }
        },
        e.node);
    return result;
}

MaybeSite do_expr_reformat(Ast& work, Variant variant, Rng& rng) {
    struct Site {
        Block* block;
        size_t index;
    };
    std::vector<Site> sites;
    for_each_block(work.body, [&](Block& b) {
        for (size_t i = 0; i < b.size(); ++i) {
            auto* n = std::get_if<Assign>(&b[i]->node);
            if (!n) continue;
            if (find_hoistable(*n->value)) sites.push_back({&b, i});
        }
    });
    if (sites.empty()) return std::nullopt;
    Site chosen = sites[rng.below(sites.size())];
    Span site = (*chosen.block)[chosen.index]->span;
    auto& assign = std::get<Assign>((*chosen.block)[chosen.index]->node);
    Expr* sub = find_hoistable(*assign.value);

    std::set<std::string> taken = collect_names(work);
    std::string temp = fresh_name(taken, rng.fork());
    ExprPtr hoisted = clone(*sub);
    std::string detail = "hoist " + pretty_print_expr(*hoisted) + " into " + temp;

    if (variant == Variant::Sp) {
        sub->node = NameRef{temp};
    } else {
        auto& bin = std::get<BinOp>(sub->node);
        bool use_rhs = rng.below(2) == 0;
        ExprPtr operand = clone(use_rhs ? *bin.rhs : *bin.lhs);
        detail += std::string(", re-introduced ") +
                  (use_rhs ? "right" : "left") + " operand";
        BinOpKind op = bin.op;
        sub->node =
            BinOp{make_expr_node(NameRef{temp}), op, std::move(operand)};
    }
    chosen.block->insert(
        chosen.block->begin() + static_cast<std::ptrdiff_t>(chosen.index),
        make_stmt_node(Assign{temp, std::move(hoisted)}));
    return SiteResult{site, detail};
}

}  // namespace

ExprPtr negate_condition(const Expr& e, NegationStyle style) {
    switch (style) {
        case NegationStyle::NotWrap: {
            if (auto* n = std::get_if<NotOp>(&e.node))
                return clone(*n->operand);  // double negation elimination
            return make_expr_node(NotOp{clone(e)});
        }
        case NegationStyle::InvertCompare: {
            if (auto* c = std::get_if<Compare>(&e.node)) {
                return make_expr_node(Compare{clone(*c->lhs),
                                              invert_cmp(c->op),
                                              clone(*c->rhs)});
            }
            return negate_condition(e, NegationStyle::NotWrap);
        }
        case NegationStyle::DoubleNegation: {
            ExprPtr inner = negate_condition(e, NegationStyle::InvertCompare);
            return make_expr_node(NotOp{std::move(inner)});
        }
    }
    return clone(e);
}

RwSets read_write_sets(const Stmt& stmt) {
    RwSets rw;
    if (const auto* a = std::get_if<Assign>(&stmt.node)) {
        expr_rw(*a->value, rw);
        rw.writes.insert(a->target);
        return rw;
    }
    if (const auto* a = std::get_if<AugAssign>(&stmt.node)) {
        expr_rw(*a->value, rw);
        rw.reads.insert(a->target);
        rw.writes.insert(a->target);
        return rw;
    }
    if (const auto* a = std::get_if<ExprStmt>(&stmt.node)) {
        expr_rw(*a->expr, rw);
        return rw;
    }
    if (std::holds_alternative<BreakStmt>(stmt.node) ||
        std::holds_alternative<ContinueStmt>(stmt.node))
        return rw;
    throw CompoundStatementError();
}

std::string fresh_name(const std::set<std::string>& existing,
                       std::uint64_t seed) {
    Rng rng(seed);
    for (int attempt = 0; attempt < 100; ++attempt) {
        std::string name;
        for (int i = 0; i < 5; ++i)
            name.push_back(static_cast<char>('a' + rng.below(26)));
        if (existing.count(name)) continue;
        if (is_keyword(name) || is_builtin_name(name)) continue;
        return name;
    }
    throw std::runtime_error("fresh_name: exhausted 100 draws");
}

std::set<std::string> collect_names(const Ast& ast) {
    std::set<std::string> out;
    Ast& m = const_cast<Ast&>(ast);
    for_each_stmt(m.body, [&](Stmt& s) {
        std::visit(
            [&](auto& node) {
                using T = std::decay_t<decltype(node)>;
                if constexpr (std::is_same_v<T, Assign> ||
                              std::is_same_v<T, AugAssign>)
                    out.insert(node.target);
                else if constexpr (std::is_same_v<T, ForRange>)
                    out.insert(node.var);
            },
            s.node);
        walk_exprs_in_stmt(s, [&](ExprPtr& e) { collect_names_expr(*e, out); });
    });
    return out;
}

TransformOutcome apply(TransformKind kind, Variant variant, const Ast& ast,
                       std::uint64_t seed) {
    Ast work = clone(ast);
    Rng rng(hash_combine(seed, static_cast<std::uint64_t>(kind) * 8 +
                                   (variant == Variant::Np ? 1 : 0)));
    MaybeSite site;
    switch (kind) {
        case TransformKind::IfElseSwap:
            site = do_if_else_swap(work, variant, rng);
            break;
        case TransformKind::ForWhileSwap:
            site = do_for_while_swap(work, variant, rng);
            break;
        case TransformKind::IfFlip:
            site = do_if_flip(work, variant, rng);
            break;
        case TransformKind::VarRename:
            site = do_var_rename(work, variant, rng);
            break;
        case TransformKind::BoolInvert:
            site = do_bool_invert(work, variant, rng);
            break;
        case TransformKind::StmtReorder:
            site = do_stmt_reorder(work, variant, rng);
            break;
        case TransformKind::ExprReformat:
            site = do_expr_reformat(work, variant, rng);
            break;
    }
    if (!site)
        return Inapplicable{std::string("no applicable site for ") +
                            to_string(kind) + "/" + to_string(variant)};
    if (ast_equal(work, ast))
        return Inapplicable{"transform produced no structural change"};
    // canonicalize so spans are fresh and the result provably round-trips
    Ast canonical = parse(pretty_print(work));
    TransformRecord record{kind, variant, site->site, seed,
                           std::move(site->detail)};
    return Applied{std::move(canonical), std::move(record)};
}

}  // namespace codeeq
