/*
 * Copyright 2026 The fpgame Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef FPGAME_CPFLOW_HPP
#define FPGAME_CPFLOW_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fpgame/flat_env.hpp"
#include "fpgame/game.hpp"
#include "fpgame/text.hpp"

/*
 * Constant propagation for a small while language. The analysis order is
 * reversed: ⊥ means "nothing known", so all equations are ν and the
 * greatest solution is the most precise one.
 */

namespace fpg::cp {

struct Expr
{
    enum class Kind { lit, var, add, sub, mul };

    Kind kind = Kind::lit;
    std::int64_t value = 0;
    std::string name;
    std::vector<Expr> args;

    static Expr literal(std::int64_t v)
    {
        Expr e;
        e.value = v;
        return e;
    }
    static Expr variable(std::string n)
    {
        Expr e;
        e.kind = Kind::var;
        e.name = std::move(n);
        return e;
    }
    static Expr binary(Kind k, Expr a, Expr b)
    {
        Expr e;
        e.kind = k;
        e.args = {std::move(a), std::move(b)};
        return e;
    }

    friend bool operator==(const Expr&, const Expr&) = default;
};

inline std::string to_string(const Expr& e, int level = 0)
{
    switch (e.kind) {
    case Expr::Kind::lit:
        return e.value < 0 && level > 0 ? "(" + std::to_string(e.value) + ")" : std::to_string(e.value);
    case Expr::Kind::var:
        return e.name;
    case Expr::Kind::add:
    case Expr::Kind::sub: {
        std::string s = to_string(e.args[0], 0) + (e.kind == Expr::Kind::add ? "+" : "-") + to_string(e.args[1], 1);
        return level > 0 ? "(" + s + ")" : s;
    }
    case Expr::Kind::mul: {
        std::string s = to_string(e.args[0], 1) + "*" + to_string(e.args[1], 2);
        return level > 1 ? "(" + s + ")" : s;
    }
    }
    return "";
}

inline void collect_variables(const Expr& e, std::set<std::string>& out)
{
    if (e.kind == Expr::Kind::var) out.insert(e.name);
    for (const auto& a : e.args) collect_variables(a, out);
}

inline void collect_literals(const Expr& e, std::set<std::int64_t>& out)
{
    if (e.kind == Expr::Kind::lit) out.insert(e.value);
    for (const auto& a : e.args) collect_literals(a, out);
}

// Integer arithmetic on known values; overflow counts as not constant.
inline std::optional<std::int64_t> apply_binary(Expr::Kind k, std::int64_t a, std::int64_t b)
{
    std::int64_t r;
    bool overflow = false;
    switch (k) {
    case Expr::Kind::add:
        overflow = __builtin_add_overflow(a, b, &r);
        break;
    case Expr::Kind::sub:
        overflow = __builtin_sub_overflow(a, b, &r);
        break;
    case Expr::Kind::mul:
        overflow = __builtin_mul_overflow(a, b, &r);
        break;
    default:
        throw contract_violation("not a binary operator");
    }
    if (overflow) return std::nullopt;
    return r;
}

// Value of e under a variable lookup; any unknown operand makes the result unknown.
template <class Lookup>
std::optional<std::int64_t> evaluate(const Expr& e, const Lookup& lookup)
{
    switch (e.kind) {
    case Expr::Kind::lit:
        return e.value;
    case Expr::Kind::var:
        return lookup(e.name);
    default: {
        auto a = evaluate(e.args[0], lookup);
        auto b = evaluate(e.args[1], lookup);
        if (!a || !b) return std::nullopt;
        return apply_binary(e.kind, *a, *b);
    }
    }
}

/**
 * Program as a list of blocks numbered from 1 in source order. A block is
 * an assignment or the "*" condition of a loop.
 */
struct Block
{
    enum class Kind { assign, loop };

    Kind kind;
    std::string var;  // for assignments
    Expr expr;
    std::size_t line;
};

struct Stmt
{
    std::size_t block;  // 0-based
    std::vector<Stmt> body;  // loop body
};

struct WhileProgram
{
    std::vector<Block> blocks;
    std::vector<Stmt> stmts;
    std::vector<std::string> variables;  // sorted

    std::size_t block_count() const { return blocks.size(); }
};

inline std::string format_block(const WhileProgram& p, std::size_t k)
{
    const Block& b = p.blocks[k];
    if (b.kind == Block::Kind::loop) return "while [*]" + std::to_string(k + 1) + " do";
    return "[" + b.var + ":=" + to_string(b.expr) + "]" + std::to_string(k + 1);
}

namespace detail {

class Parser
{
public:
    explicit Parser(std::string_view src) : ts_(text::tokenize(src, {":=", ";", "+", "-", "*", "(", ")"})) { }

    WhileProgram parse()
    {
        if (ts_.at_end()) ts_.fail("expected a statement");
        prog_.stmts = statements();
        if (!ts_.at_end()) ts_.fail("expected ';' or end of program");
        std::set<std::string> vars;
        for (const auto& b : prog_.blocks) {
            if (b.kind == Block::Kind::assign) vars.insert(b.var);
            collect_variables(b.expr, vars);
        }
        prog_.variables.assign(vars.begin(), vars.end());
        return std::move(prog_);
    }

private:
    std::vector<Stmt> statements()
    {
        std::vector<Stmt> r;
        r.push_back(statement());
        while (ts_.accept(";")) r.push_back(statement());
        return r;
    }

    Stmt statement()
    {
        const auto& t = ts_.peek();
        if (ts_.is("while")) {
            ts_.next();
            Stmt s{new_block({Block::Kind::loop, "", Expr{}, t.line}), {}};
            ts_.expect("*");
            ts_.expect("do");
            s.body = statements();
            ts_.expect("od");
            return s;
        }
        if (t.kind != text::Token::ident || t.text == "do" || t.text == "od") ts_.fail("expected a statement");
        std::string var = ts_.next().text;
        ts_.expect(":=");
        return {new_block({Block::Kind::assign, var, expression(), t.line}), {}};
    }

    std::size_t new_block(Block b)
    {
        prog_.blocks.push_back(std::move(b));
        return prog_.blocks.size() - 1;
    }

    Expr expression()
    {
        Expr e = term();
        for (;;) {
            if (ts_.accept("+")) {
                e = Expr::binary(Expr::Kind::add, std::move(e), term());
            } else if (ts_.accept("-")) {
                e = Expr::binary(Expr::Kind::sub, std::move(e), term());
            } else {
                return e;
            }
        }
    }

    Expr term()
    {
        Expr e = factor();
        while (ts_.accept("*")) e = Expr::binary(Expr::Kind::mul, std::move(e), factor());
        return e;
    }

    Expr factor()
    {
        if (ts_.accept("(")) {
            Expr e = expression();
            ts_.expect(")");
            return e;
        }
        bool negative = ts_.accept("-");
        const auto& t = ts_.peek();
        if (t.kind == text::Token::number) {
            std::int64_t v;
            try {
                v = std::stoll(t.text);
            } catch (const std::exception&) {
                ts_.fail("integer literal out of range");
            }
            ts_.next();
            return Expr::literal(negative ? -v : v);
        }
        if (negative) ts_.fail("expected an integer literal after '-'");
        if (t.kind == text::Token::ident && t.text != "while" && t.text != "do" && t.text != "od") {
            return Expr::variable(ts_.next().text);
        }
        ts_.fail("expected an expression");
    }

    text::TokenStream ts_;
    WhileProgram prog_;
};

// Entry block and exit blocks of a statement list; records flow edges.
inline std::pair<std::size_t, std::vector<std::size_t>> flow(const std::vector<Stmt>& stmts,
                                                             std::vector<std::set<std::size_t>>& preds)
{
    std::size_t entry = 0;
    std::vector<std::size_t> exits;
    for (std::size_t k = 0; k < stmts.size(); k++) {
        const Stmt& s = stmts[k];
        std::size_t head = s.block;
        std::vector<std::size_t> out{head};
        if (!s.body.empty()) {
            auto [body_entry, body_exits] = flow(s.body, preds);
            preds[body_entry].insert(head);
            for (auto e : body_exits) preds[head].insert(e);
        }
        if (k == 0) {
            entry = head;
        } else {
            for (auto e : exits) preds[head].insert(e);
        }
        exits = out;
    }
    return {entry, exits};
}

}

inline WhileProgram parse_while(std::string_view src) { return detail::Parser(src).parse(); }

// Flow predecessors of each block, in increasing block order.
inline std::vector<std::vector<std::size_t>> predecessors(const WhileProgram& p)
{
    std::vector<std::set<std::size_t>> preds(p.block_count());
    detail::flow(p.stmts, preds);
    std::vector<std::vector<std::size_t>> r;
    for (const auto& s : preds) r.emplace_back(s.begin(), s.end());
    return r;
}

using System = EquationSystem<FlatEnvLattice>;
using CpTerm = Term<FlatEnv>;

inline std::set<std::int64_t> program_literals(const WhileProgram& p)
{
    std::set<std::int64_t> r;
    for (const auto& b : p.blocks) {
        if (b.kind == Block::Kind::assign) collect_literals(b.expr, r);
    }
    return r;
}

/**
 * Literals closed under the program's operators, as long as the result
 * stays within cap values. Most loops make this infinite; see
 * relevant_universe for what the game pipeline uses instead.
 */
inline std::set<std::int64_t> closure_universe(const WhileProgram& p, std::size_t cap = 10000)
{
    std::set<Expr::Kind> ops;
    std::function<void(const Expr&)> scan = [&](const Expr& e) {
        if (!e.args.empty()) ops.insert(e.kind);
        for (const auto& a : e.args) scan(a);
    };
    for (const auto& b : p.blocks) {
        if (b.kind == Block::Kind::assign) scan(b.expr);
    }
    std::set<std::int64_t> v = program_literals(p);
    for (bool grew = true; grew;) {
        grew = false;
        std::vector<std::int64_t> cur(v.begin(), v.end());
        for (auto k : ops) {
            for (auto a : cur) {
                for (auto b : cur) {
                    auto r = apply_binary(k, a, b);
                    if (r && v.insert(*r).second) {
                        grew = true;
                        if (v.size() > cap) {
                            throw resource_error("the closure of the program literals exceeds " + std::to_string(cap) +
                                                 " values; use the Kleene-only analysis");
                        }
                    }
                }
            }
        }
    }
    return v;
}

// Program literals, the constants of the given environments and any extra values.
inline std::set<std::int64_t> relevant_universe(const WhileProgram& p, const std::vector<FlatEnv>& envs,
                                                const std::set<std::int64_t>& extra = {})
{
    std::set<std::int64_t> v = program_literals(p);
    for (const auto& e : envs) {
        for (const auto& z : e.values) {
            if (z) v.insert(*z);
        }
    }
    v.insert(extra.begin(), extra.end());
    return v;
}

/**
 * ρ ↦ ρ[x ↦ e(ρ)]. Moves at ⊥[y↦z]: for y ≠ x the argument must already
 * know y; for y = x some assignment of e's variables with value z must be
 * known, or the argument is ⊤.
 */
inline OperatorPtr<FlatEnv> update_operator(std::shared_ptr<const FlatEnvLattice> lat, const std::string& var,
                                            const Expr& e, std::size_t assignment_cap = 1000000)
{
    auto op = std::make_shared<Operator<FlatEnv>>();
    op->name = "[" + var + "↦" + to_string(e) + "]";
    op->arity = 1;
    const std::size_t x = lat->var_index(var);
    op->apply = [lat, x, e](const std::vector<FlatEnv>& a) {
        if (a[0].top) return lat->top();
        auto v = evaluate(e, [&](const std::string& n) { return a[0].values[lat->var_index(n)]; });
        return lat->update(a[0], x, v);
    };
    std::set<std::string> used;
    collect_variables(e, used);
    std::vector<std::string> vars(used.begin(), used.end());
    op->moves = [lat, x, e, vars, assignment_cap](std::size_t k) {
        const std::size_t n = lat->universe().size();
        const std::size_t y = k / n;
        const std::int64_t z = lat->universe()[k % n];
        if (y != x) return MoveFormula::atom(k, 0);
        if (vars.empty()) {
            auto v = evaluate(e, [](const std::string&) { return std::optional<std::int64_t>(); });
            return v == z ? MoveFormula::truth() : MoveFormula::top_of(0);
        }
        std::size_t combos = 1;
        for (std::size_t j = 0; j < vars.size(); j++) {
            if (combos > assignment_cap / std::max<std::size_t>(n, 1)) {
                throw resource_error("too many assignments to enumerate for " + to_string(e));
            }
            combos *= n;
        }
        std::vector<MoveFormula> ds;
        std::vector<std::size_t> digits(vars.size(), 0);
        for (std::size_t c = 0; c < combos; c++) {
            std::size_t rest = c;
            for (std::size_t j = vars.size(); j-- > 0;) {
                digits[j] = rest % n;
                rest /= n;
            }
            auto lookup = [&](const std::string& name) {
                auto j = static_cast<std::size_t>(std::lower_bound(vars.begin(), vars.end(), name) - vars.begin());
                return std::optional<std::int64_t>(lat->universe()[digits[j]]);
            };
            if (evaluate(e, lookup) != z) continue;
            std::vector<MoveFormula> cs;
            for (std::size_t j = 0; j < vars.size(); j++) {
                cs.push_back(MoveFormula::atom(*lat->basis_index(lat->var_index(vars[j]), lat->universe()[digits[j]]), 0));
            }
            ds.push_back(MoveFormula::all_of(std::move(cs)));
        }
        if (ds.empty()) return MoveFormula::top_of(0);
        return MoveFormula::any_of(std::move(ds));
    };
    return op;
}

/**
 * One ν-equation per block entry: ρ_1 = ⊥, and otherwise the meet over
 * flow predecessors j of the transfer of block j applied to ρ_j.
 */
inline System build_equations(const WhileProgram& p, std::shared_ptr<const FlatEnvLattice> lat)
{
    auto preds = predecessors(p);
    std::vector<OperatorPtr<FlatEnv>> transfer(p.block_count());
    for (std::size_t k = 0; k < p.block_count(); k++) {
        if (p.blocks[k].kind == Block::Kind::assign) transfer[k] = update_operator(lat, p.blocks[k].var, p.blocks[k].expr);
    }
    std::vector<System::Equation> eqs;
    for (std::size_t k = 0; k < p.block_count(); k++) {
        std::string name = "ρ" + std::to_string(k + 1);
        if (k == 0) {
            eqs.push_back({name, Sign::nu, CpTerm::constant(lat->bottom(), "⊥")});
            continue;
        }
        std::vector<CpTerm> parts;
        for (auto j : preds[k]) {
            parts.push_back(transfer[j] ? CpTerm::apply(transfer[j], {CpTerm::variable(j)}) : CpTerm::variable(j));
        }
        eqs.push_back({name, Sign::nu, parts.size() == 1 ? parts[0] : CpTerm::meet(std::move(parts))});
    }
    return System(lat, std::move(eqs));
}

inline std::string format_term(const CpTerm& t, const System& sys)
{
    switch (t.kind()) {
    case CpTerm::Kind::constant:
        return t.label().empty() ? sys.lattice().format(t.value()) : t.label();
    case CpTerm::Kind::variable:
        return sys[t.var()].name;
    case CpTerm::Kind::meet:
    case CpTerm::Kind::join: {
        std::vector<std::string> parts;
        for (const auto& c : t.children()) parts.push_back(format_term(c, sys));
        return text::join(parts, t.kind() == CpTerm::Kind::meet ? " ⊓ " : " ⊔ ");
    }
    case CpTerm::Kind::apply:
        return format_term(t.children()[0], sys) + t.op()->name;
    }
    return "";
}

// "ρ2 =ν ρ1[y↦6]" per line.
inline std::string format_equations(const System& sys)
{
    std::string r;
    for (std::size_t i = 0; i < sys.size(); i++) r += sys[i].name + " =ν " + format_term(sys[i].rhs, sys) + "\n";
    return r;
}

struct Query
{
    std::string var;
    std::int64_t value;
    std::size_t block;  // 1-based, as written
};

// "x=7@4": variable x has value 7 at the entry of block 4.
inline Query parse_query(const std::string& s, const WhileProgram& p)
{
    auto eq = s.find('=');
    auto at = s.find('@');
    if (eq == std::string::npos || at == std::string::npos || at < eq) {
        throw usage_error("expected a query like x=7@4, got '" + s + "'");
    }
    Query q;
    q.var = std::string(text::trim(std::string_view(s).substr(0, eq)));
    try {
        std::size_t used = 0;
        std::string v(text::trim(std::string_view(s).substr(eq + 1, at - eq - 1)));
        q.value = std::stoll(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        std::string b(text::trim(std::string_view(s).substr(at + 1)));
        q.block = std::stoul(b, &used);
        if (used != b.size()) throw std::invalid_argument(b);
    } catch (const std::exception&) {
        throw usage_error("expected a query like x=7@4, got '" + s + "'");
    }
    if (!std::binary_search(p.variables.begin(), p.variables.end(), q.var)) {
        throw usage_error("unknown variable '" + q.var + "'");
    }
    if (q.block < 1 || q.block > p.block_count()) {
        throw usage_error("block " + std::to_string(q.block) + " is out of range 1.." + std::to_string(p.block_count()));
    }
    return q;
}

/**
 * The analysis: the greatest solution by Kleene iteration, and the system
 * rebuilt over the universe of relevant constants so its basis covers
 * every constant in the solution and the query.
 */
struct Analysis
{
    std::shared_ptr<const FlatEnvLattice> lattice;
    System system;
    std::vector<FlatEnv> solution;
};

inline Analysis analyze(const WhileProgram& p, const std::set<std::int64_t>& extra = {})
{
    auto lit = std::make_shared<const FlatEnvLattice>(p.variables, program_literals(p));
    auto sol = solve_kleene(build_equations(p, lit));
    auto lat = std::make_shared<const FlatEnvLattice>(p.variables, relevant_universe(p, sol, extra));
    System sys = build_equations(p, lat);
    return {lat, std::move(sys), std::move(sol)};
}

inline std::vector<FlatEnv> solve_cp(const WhileProgram& p) { return analyze(p).solution; }

inline Position query_position(const Analysis& a, const Query& q)
{
    return {*a.lattice->basis_index(a.lattice->var_index(q.var), q.value), q.block - 1};
}

inline bool query_constant(const Analysis& a, const Query& q)
{
    const auto& lat = *a.lattice;
    return lat.leq(lat.basis()[query_position(a, q).basis], a.solution[q.block - 1]);
}

struct GameReport
{
    bool holds;
    Transcript transcript;
};

// All plays from the query position with ∃ following the least measure.
inline GameReport game_transcript(const Analysis& a, const Query& q, const MeasureOptions& opt = {})
{
    auto moves = derive_symbolic_moves(a.system);
    Position start = query_position(a, q);
    auto r = solve_measure_local(a.system, moves, start, opt);
    auto t = explore_plays(a.system, measure_strategy(a.system, moves, r), start);
    return {!r.at(start).is_star(), std::move(t)};
}

}

#endif
