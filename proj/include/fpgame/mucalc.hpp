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

#ifndef FPGAME_MUCALC_HPP
#define FPGAME_MUCALC_HPP

#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "fpgame/game.hpp"
#include "fpgame/powerset.hpp"
#include "fpgame/text.hpp"

namespace fpg::mu {

/**
 * μ-calculus formula. The constant and implies kinds only occur in the
 * latticed variant: a lattice constant downset(g...) and the residuation
 * downset(g...) => φ.
 */
struct Formula
{
    enum class Kind { tt, ff, prop, var, conj, disj, box, dia, fix, constant, implies };

    Kind kind = Kind::tt;
    std::string name;                 // proposition, variable or binder
    Sign sign = Sign::mu;             // for fix
    std::vector<std::string> generators;  // for constant and implies
    std::vector<Formula> children;

    static Formula of(Kind k, std::vector<Formula> cs = {})
    {
        Formula f;
        f.kind = k;
        f.children = std::move(cs);
        return f;
    }
    static Formula named(Kind k, std::string n, std::vector<Formula> cs = {})
    {
        Formula f = of(k, std::move(cs));
        f.name = std::move(n);
        return f;
    }

    static Formula truth() { return of(Kind::tt); }
    static Formula falsity() { return of(Kind::ff); }
    static Formula prop(std::string n) { return named(Kind::prop, std::move(n)); }
    static Formula var(std::string n) { return named(Kind::var, std::move(n)); }
    static Formula conj(Formula a, Formula b) { return of(Kind::conj, {std::move(a), std::move(b)}); }
    static Formula disj(Formula a, Formula b) { return of(Kind::disj, {std::move(a), std::move(b)}); }
    static Formula box(Formula a) { return of(Kind::box, {std::move(a)}); }
    static Formula dia(Formula a) { return of(Kind::dia, {std::move(a)}); }
    static Formula fix(Sign s, std::string x, Formula body)
    {
        Formula f = named(Kind::fix, std::move(x), {std::move(body)});
        f.sign = s;
        return f;
    }
    static Formula constant(std::vector<std::string> g)
    {
        Formula f = of(Kind::constant);
        f.generators = std::move(g);
        return f;
    }
    static Formula implies(std::vector<std::string> g, Formula a)
    {
        Formula f = of(Kind::implies, {std::move(a)});
        f.generators = std::move(g);
        return f;
    }

    friend bool operator==(const Formula&, const Formula&) = default;

    std::size_t depth() const
    {
        std::size_t d = 0;
        for (const auto& c : children) d = std::max(d, c.depth());
        return d + 1;
    }
};

namespace detail {

inline std::string generators_text(const std::vector<std::string>& g) { return "downset(" + text::join(g, " ") + ")"; }

// level: 0 = disjunction, 1 = conjunction, 2 = prefix operand
inline std::string print(const Formula& f, int level)
{
    using K = Formula::Kind;
    switch (f.kind) {
    case K::tt:
        return "tt";
    case K::ff:
        return "ff";
    case K::prop:
    case K::var:
        return f.name;
    case K::constant:
        return generators_text(f.generators);
    case K::box:
        return "[]" + print(f.children[0], 2);
    case K::dia:
        return "<>" + print(f.children[0], 2);
    case K::implies:
        return generators_text(f.generators) + " => " + print(f.children[0], 2);
    case K::conj: {
        std::string s = print(f.children[0], 1) + " /\\ " + print(f.children[1], 2);
        return level > 1 ? "(" + s + ")" : s;
    }
    case K::disj: {
        std::string s = print(f.children[0], 0) + " \\/ " + print(f.children[1], 1);
        return level > 0 ? "(" + s + ")" : s;
    }
    case K::fix: {
        std::string s = std::string(sign_name(f.sign)) + " " + f.name + ". " + print(f.children[0], 0);
        return level >= 0 ? "(" + s + ")" : s;
    }
    }
    return "";
}

}

// Concrete syntax accepted by parse_formula; binders are parenthesized except at the top.
inline std::string to_string(const Formula& f) { return detail::print(f, -1); }

struct ParseOptions
{
    bool lattice_constants = false;
    // identifiers treated as variables when not bound by a fixpoint
    std::set<std::string> free_variables;
    bool allow_fixpoints = true;
};

namespace detail {

class Parser
{
public:
    Parser(std::string_view src, const ParseOptions& opt, std::size_t first_line)
        : ts_(text::tokenize(src, {"/\\", "\\/", "[]", "<>", "(", ")", ".", "=>"}, first_line)), opt_(opt) { }

    Formula parse()
    {
        Formula f = disjunction();
        if (!ts_.at_end()) ts_.fail("unexpected input after formula");
        return f;
    }

private:
    Formula disjunction()
    {
        Formula f = conjunction();
        while (ts_.accept("\\/")) f = Formula::disj(std::move(f), conjunction());
        return f;
    }

    Formula conjunction()
    {
        Formula f = unary();
        while (ts_.accept("/\\")) f = Formula::conj(std::move(f), unary());
        return f;
    }

    Formula unary()
    {
        if (ts_.accept("[]")) return Formula::box(unary());
        if (ts_.accept("<>")) return Formula::dia(unary());
        if (ts_.is("mu") || ts_.is("nu")) {
            if (!opt_.allow_fixpoints) ts_.fail("fixpoint operators are not allowed here");
            Sign s = ts_.next().text == "mu" ? Sign::mu : Sign::nu;
            std::string x = ts_.expect_ident().text;
            ts_.expect(".");
            return Formula::fix(s, std::move(x), disjunction());
        }
        if (ts_.is("downset")) {
            if (!opt_.lattice_constants) ts_.fail("lattice constants are not allowed here");
            ts_.next();
            ts_.expect("(");
            std::vector<std::string> gens;
            while (!ts_.is(")")) gens.push_back(ts_.expect_ident().text);
            ts_.expect(")");
            if (ts_.accept("=>")) return Formula::implies(std::move(gens), unary());
            return Formula::constant(std::move(gens));
        }
        if (ts_.accept("(")) {
            Formula f = disjunction();
            ts_.expect(")");
            return f;
        }
        if (ts_.accept("tt")) return Formula::truth();
        if (ts_.accept("ff")) return Formula::falsity();
        if (ts_.peek().kind == text::Token::ident) return Formula::prop(ts_.next().text);
        ts_.fail("expected a formula");
    }

    text::TokenStream ts_;
    const ParseOptions& opt_;
};

inline void collect_free(const Formula& f, std::set<std::string>& bound, std::set<std::string>& out)
{
    if (f.kind == Formula::Kind::prop && !bound.count(f.name)) out.insert(f.name);
    if (f.kind == Formula::Kind::fix) {
        bool fresh = bound.insert(f.name).second;
        collect_free(f.children[0], bound, out);
        if (fresh) bound.erase(f.name);
        return;
    }
    for (const auto& c : f.children) collect_free(c, bound, out);
}

// Resolve identifiers to variables or propositions and make binder names unique.
inline Formula resolve(const Formula& f, std::map<std::string, std::string>& scope, std::set<std::string>& used,
                       const ParseOptions& opt)
{
    using K = Formula::Kind;
    if (f.kind == K::prop) {
        if (auto it = scope.find(f.name); it != scope.end()) return Formula::var(it->second);
        if (opt.free_variables.count(f.name)) return Formula::var(f.name);
        return f;
    }
    if (f.kind == K::fix) {
        std::string fresh = f.name;
        while (used.count(fresh)) fresh += "'";
        used.insert(fresh);
        auto saved = scope.find(f.name) == scope.end() ? std::optional<std::string>() : scope[f.name];
        scope[f.name] = fresh;
        Formula body = resolve(f.children[0], scope, used, opt);
        if (saved) {
            scope[f.name] = *saved;
        } else {
            scope.erase(f.name);
        }
        return Formula::fix(f.sign, fresh, std::move(body));
    }
    Formula r = f;
    for (auto& c : r.children) c = resolve(c, scope, used, opt);
    return r;
}

}

/**
 * Parse a formula. Prefix operators bind tightest, then /\, then \/;
 * a fixpoint body extends as far right as possible. Bound variables are
 * renamed apart (x, x', x'', ...) so every binder name is unique and
 * differs from every free name.
 */
inline Formula parse_formula(std::string_view src, const ParseOptions& opt = {}, std::size_t first_line = 1)
{
    Formula raw = detail::Parser(src, opt, first_line).parse();
    std::set<std::string> bound, used;
    detail::collect_free(raw, bound, used);
    used.insert(opt.free_variables.begin(), opt.free_variables.end());
    std::map<std::string, std::string> scope;
    return detail::resolve(raw, scope, used, opt);
}

inline void free_variables(const Formula& f, std::set<std::string>& bound, std::set<std::string>& out)
{
    if (f.kind == Formula::Kind::var && !bound.count(f.name)) out.insert(f.name);
    if (f.kind == Formula::Kind::fix) {
        bool fresh = bound.insert(f.name).second;
        free_variables(f.children[0], bound, out);
        if (fresh) bound.erase(f.name);
        return;
    }
    for (const auto& c : f.children) free_variables(c, bound, out);
}

inline std::set<std::string> free_variables(const Formula& f)
{
    std::set<std::string> bound, out;
    free_variables(f, bound, out);
    return out;
}

/**
 * Finite Kripke structure. Text format, one declaration per line:
 *
 *   states: a b
 *   edges: a->a a->b b->b
 *   label p: b
 */
struct Kripke
{
    std::vector<std::string> states;
    std::vector<std::vector<std::size_t>> succ;
    std::map<std::string, Bits> labels;
    std::shared_ptr<const PowersetLattice> lattice;

    std::size_t state_index(const std::string& s) const { return lattice->index_of(s); }

    Bits label(const std::string& p) const
    {
        auto it = labels.find(p);
        return it == labels.end() ? lattice->bottom() : it->second;
    }
};

inline Kripke make_kripke(std::vector<std::string> states, const std::vector<std::pair<std::string, std::string>>& edges,
                          const std::map<std::string, std::vector<std::string>>& labels)
{
    Kripke k;
    k.lattice = std::make_shared<const PowersetLattice>(states);
    k.states = std::move(states);
    k.succ.assign(k.states.size(), {});
    for (const auto& [a, b] : edges) k.succ[k.state_index(a)].push_back(k.state_index(b));
    for (auto& s : k.succ) {
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
    }
    for (const auto& [p, members] : labels) k.labels[p] = k.lattice->make(members);
    return k;
}

namespace detail {

struct KripkeText
{
    std::vector<std::string> states;
    std::vector<std::pair<std::string, std::string>> edges;
    std::map<std::string, std::vector<std::string>> labels;
    std::vector<std::string> other;  // lines left for extended formats, with line numbers
    std::vector<std::size_t> other_lines;
};

inline std::pair<std::string, std::string> parse_arrow(const std::string& w, std::size_t line)
{
    auto arrow = w.find("->");
    if (arrow == std::string::npos || arrow == 0 || arrow + 2 >= w.size()) {
        throw parse_error("expected an edge like a->b, got '" + w + "'", line, 1);
    }
    return {w.substr(0, arrow), w.substr(arrow + 2)};
}

inline KripkeText split_kripke(std::string_view src)
{
    KripkeText r;
    std::size_t line_no = 0;
    std::istringstream in{std::string(src)};
    std::string raw;
    bool have_states = false;
    while (std::getline(in, raw)) {
        line_no++;
        std::string_view line = text::trim(raw);
        if (line.empty() || line.front() == '#') continue;
        if (line.starts_with("states:")) {
            auto ws = text::words(line.substr(7));
            r.states.insert(r.states.end(), ws.begin(), ws.end());
            have_states = true;
        } else if (line.starts_with("edges:")) {
            for (const auto& w : text::words(line.substr(6))) r.edges.push_back(parse_arrow(w, line_no));
        } else if (line.starts_with("label ")) {
            auto colon = line.find(':');
            if (colon == std::string_view::npos) throw parse_error("expected 'label p: states'", line_no, 1);
            std::string p(text::trim(line.substr(6, colon - 6)));
            if (p.empty()) throw parse_error("missing proposition name", line_no, 7);
            auto& members = r.labels[p];
            for (const auto& w : text::words(line.substr(colon + 1))) members.push_back(w);
        } else {
            r.other.emplace_back(line);
            r.other_lines.push_back(line_no);
        }
    }
    if (!have_states) throw parse_error("missing 'states:' line", line_no + 1, 1);
    return r;
}

inline std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw usage_error("cannot read '" + path.string() + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}

inline Kripke parse_kripke(std::string_view src)
{
    auto t = detail::split_kripke(src);
    if (!t.other.empty()) throw parse_error("unrecognized line '" + t.other.front() + "'", t.other_lines.front(), 1);
    return make_kripke(t.states, t.edges, t.labels);
}

inline Kripke load_kripke(const std::filesystem::path& path) { return parse_kripke(detail::read_file(path)); }

// ◇X = {s | some successor of s is in X}; moves at {s}: ∨ over successors.
inline OperatorPtr<Bits> diamond_operator(const Kripke& k)
{
    auto op = std::make_shared<Operator<Bits>>();
    op->name = "dia";
    op->arity = 1;
    op->apply = [k](const std::vector<Bits>& a) {
        Bits r(k.states.size());
        for (std::size_t s = 0; s < k.states.size(); s++) {
            for (auto t : k.succ[s]) {
                if (a[0].test(t)) r.set(s);
            }
        }
        return r;
    };
    op->moves = [k](std::size_t s) {
        std::vector<MoveFormula> ds;
        for (auto t : k.succ[s]) ds.push_back(MoveFormula::atom(t, 0));
        return MoveFormula::any_of(std::move(ds));
    };
    return op;
}

// □X = {s | all successors of s are in X}; moves at {s}: ∧ over successors.
inline OperatorPtr<Bits> box_operator(const Kripke& k)
{
    auto op = std::make_shared<Operator<Bits>>();
    op->name = "box";
    op->arity = 1;
    op->apply = [k](const std::vector<Bits>& a) {
        Bits r(k.states.size());
        for (std::size_t s = 0; s < k.states.size(); s++) {
            bool all = true;
            for (auto t : k.succ[s]) all = all && a[0].test(t);
            if (all) r.set(s);
        }
        return r;
    };
    op->moves = [k](std::size_t s) {
        std::vector<MoveFormula> cs;
        for (auto t : k.succ[s]) cs.push_back(MoveFormula::atom(t, 0));
        return MoveFormula::all_of(std::move(cs));
    };
    return op;
}

using System = EquationSystem<PowersetLattice>;
using MuTerm = Term<Bits>;

struct Operators
{
    OperatorPtr<Bits> dia;
    OperatorPtr<Bits> box;

    explicit Operators(const Kripke& k) : dia(diamond_operator(k)), box(box_operator(k)) { }
};

/**
 * Translate a fixpoint-free formula into a term. Variables are looked up
 * in vars; fixpoints must have been replaced beforehand.
 */
inline MuTerm formula_to_term(const Formula& f, const Kripke& k, const Operators& ops,
                              const std::map<std::string, std::size_t>& vars)
{
    using K = Formula::Kind;
    switch (f.kind) {
    case K::tt:
        return MuTerm::constant(k.lattice->top(), "tt");
    case K::ff:
        return MuTerm::constant(k.lattice->bottom(), "ff");
    case K::prop:
        return MuTerm::constant(k.label(f.name), f.name);
    case K::var: {
        auto it = vars.find(f.name);
        if (it == vars.end()) throw contract_violation("free variable '" + f.name + "'");
        return MuTerm::variable(it->second);
    }
    case K::conj:
    case K::disj: {
        std::vector<MuTerm> cs;
        for (const auto& c : f.children) cs.push_back(formula_to_term(c, k, ops, vars));
        return f.kind == K::conj ? MuTerm::meet(std::move(cs)) : MuTerm::join(std::move(cs));
    }
    case K::box:
        return MuTerm::apply(ops.box, {formula_to_term(f.children[0], k, ops, vars)});
    case K::dia:
        return MuTerm::apply(ops.dia, {formula_to_term(f.children[0], k, ops, vars)});
    case K::fix:
        throw contract_violation("nested fixpoint in a term");
    case K::constant:
    case K::implies:
        throw usage_error("lattice constants need the latticed interpretation");
    }
    throw contract_violation("malformed formula");
}

namespace detail {

inline void collect_binders(const Formula& f, std::vector<const Formula*>& out)
{
    if (f.kind == Formula::Kind::fix) out.push_back(&f);
    for (const auto& c : f.children) collect_binders(c, out);
}

// The formula with every fixpoint subformula replaced by its variable.
inline Formula strip_binders(const Formula& f)
{
    Formula r = f;
    for (auto& c : r.children) {
        c = c.kind == Formula::Kind::fix ? Formula::var(c.name) : strip_binders(c);
    }
    return r;
}

}

namespace detail {

struct BinderEquation
{
    std::string name;
    Sign sign;
    Formula body;  // fixpoint-free; nested binders replaced by their variables
};

// The equations of a closed formula, outermost binder last.
inline std::vector<BinderEquation> binder_equations(const Formula& phi_in)
{
    if (auto fv = free_variables(phi_in); !fv.empty()) {
        throw contract_violation("formula has free variable '" + *fv.begin() + "'");
    }
    Formula phi = phi_in;
    if (phi.kind != Formula::Kind::fix) {
        std::vector<const Formula*> bs;
        collect_binders(phi, bs);
        std::string x = "x";
        auto taken = [&](const std::string& n) {
            return std::any_of(bs.begin(), bs.end(), [&](const Formula* b) { return b->name == n; });
        };
        while (taken(x)) x += "'";
        phi = Formula::fix(Sign::mu, x, phi);
    }
    std::vector<const Formula*> binders;
    collect_binders(phi, binders);
    std::reverse(binders.begin(), binders.end());
    std::set<std::string> names;
    std::vector<BinderEquation> r;
    for (const auto* b : binders) {
        if (!names.insert(b->name).second) {
            throw contract_violation("binder '" + b->name + "' is not unique; parse the formula to rename it");
        }
        Formula body = b->children[0].kind == Formula::Kind::fix ? Formula::var(b->children[0].name)
                                                                 : strip_binders(b->children[0]);
        r.push_back({b->name, b->sign, std::move(body)});
    }
    return r;
}

inline std::map<std::string, std::size_t> variable_indices(const std::vector<BinderEquation>& eqs)
{
    std::map<std::string, std::size_t> vars;
    for (std::size_t i = 0; i < eqs.size(); i++) vars.emplace(eqs[i].name, i);
    return vars;
}

}

/**
 * Hierarchical equation system of a closed formula. There is one equation
 * per binder; binders are numbered by position from right to left in the
 * text, so the outermost binder is the last equation. A formula that is
 * not a fixpoint is first wrapped as μx.φ with a fresh x.
 */
inline System to_equation_system(const Formula& phi, const Kripke& k)
{
    auto binders = detail::binder_equations(phi);
    auto vars = detail::variable_indices(binders);
    Operators ops(k);
    std::vector<System::Equation> eqs;
    for (const auto& b : binders) eqs.push_back({b.name, b.sign, formula_to_term(b.body, k, ops, vars)});
    return System(k.lattice, std::move(eqs));
}

namespace detail {

inline Formula term_to_formula(const MuTerm& t, const System& sys)
{
    using K = MuTerm::Kind;
    const auto& lat = sys.lattice();
    switch (t.kind()) {
    case K::constant:
        if (t.label() == "tt" || (t.label().empty() && t.value() == lat.top())) return Formula::truth();
        if (t.label() == "ff" || (t.label().empty() && t.value() == lat.bottom())) return Formula::falsity();
        if (t.label().empty()) throw usage_error("unlabelled constant " + lat.format(t.value()));
        return Formula::prop(t.label());
    case K::variable:
        return Formula::var(sys[t.var()].name);
    case K::join:
    case K::meet: {
        if (t.children().empty()) return t.kind() == K::join ? Formula::falsity() : Formula::truth();
        Formula r = term_to_formula(t.children()[0], sys);
        for (std::size_t k = 1; k < t.children().size(); k++) {
            Formula c = term_to_formula(t.children()[k], sys);
            r = t.kind() == K::join ? Formula::disj(std::move(r), std::move(c)) : Formula::conj(std::move(r), std::move(c));
        }
        return r;
    }
    case K::apply:
        if (t.op()->name == "dia") return Formula::dia(term_to_formula(t.children()[0], sys));
        if (t.op()->name == "box") return Formula::box(term_to_formula(t.children()[0], sys));
        throw usage_error("operator '" + t.op()->name + "' has no formula counterpart");
    }
    throw usage_error("malformed term");
}

inline Formula substitute(const Formula& f, const std::map<std::string, Formula>& sub)
{
    if (f.kind == Formula::Kind::var) {
        auto it = sub.find(f.name);
        return it == sub.end() ? f : it->second;
    }
    if (f.kind == Formula::Kind::fix && sub.count(f.name)) {
        std::map<std::string, Formula> inner = sub;
        inner.erase(f.name);
        return Formula::fix(f.sign, f.name, substitute(f.children[0], inner));
    }
    Formula r = f;
    for (auto& c : r.children) c = substitute(c, sub);
    return r;
}

}

/**
 * Formulas of an equation system: φ_i = η_i x_i. ψ_i[x_j := φ_j] for
 * j < i, where the φ_j of the earlier equations are updated with x_i := φ_i
 * after each step. The last formula is equivalent to the whole system.
 */
inline std::vector<Formula> from_equation_system(const System& sys)
{
    std::vector<Formula> phis;
    for (std::size_t i = 0; i < sys.size(); i++) {
        std::map<std::string, Formula> sub;
        for (std::size_t j = 0; j < i; j++) sub.emplace(sys[j].name, phis[j]);
        Formula body = detail::substitute(detail::term_to_formula(sys[i].rhs, sys), sub);
        Formula phi_i = Formula::fix(sys[i].sign, sys[i].name, std::move(body));
        std::map<std::string, Formula> back{{sys[i].name, phi_i}};
        for (auto& p : phis) p = detail::substitute(p, back);
        phis.push_back(std::move(phi_i));
    }
    return phis;
}

// Semantics by naive fixpoint iteration.
inline Bits direct_semantics(const Formula& f, const Kripke& k, std::map<std::string, Bits> env = {})
{
    using K = Formula::Kind;
    const auto& lat = *k.lattice;
    switch (f.kind) {
    case K::tt:
        return lat.top();
    case K::ff:
        return lat.bottom();
    case K::prop:
        return k.label(f.name);
    case K::var: {
        auto it = env.find(f.name);
        if (it == env.end()) throw contract_violation("free variable '" + f.name + "'");
        return it->second;
    }
    case K::conj:
        return direct_semantics(f.children[0], k, env) & direct_semantics(f.children[1], k, env);
    case K::disj:
        return direct_semantics(f.children[0], k, env) | direct_semantics(f.children[1], k, env);
    case K::box:
    case K::dia: {
        Bits x = direct_semantics(f.children[0], k, env);
        Bits r(k.states.size());
        for (std::size_t s = 0; s < k.states.size(); s++) {
            bool any = false, all = true;
            for (auto t : k.succ[s]) {
                any = any || x.test(t);
                all = all && x.test(t);
            }
            if (f.kind == K::box ? all : any) r.set(s);
        }
        return r;
    }
    case K::fix: {
        Bits x = f.sign == Sign::mu ? lat.bottom() : lat.top();
        for (;;) {
            env[f.name] = x;
            Bits n = direct_semantics(f.children[0], k, env);
            if (n == x) return x;
            x = std::move(n);
        }
    }
    case K::constant:
    case K::implies:
        throw usage_error("lattice constants need the latticed interpretation");
    }
    throw contract_violation("malformed formula");
}

inline SymbolicMoves symbolic_moves_mu(const System& sys) { return derive_symbolic_moves(sys); }

struct ModelCheckResult
{
    bool holds;
    System system;
    ProgressMeasure measure;
    Position query;
};

// Local progress-measure solving from ({s}, m).
inline ModelCheckResult model_check(const Kripke& k, const Formula& phi, const std::string& state,
                                    const MeasureOptions& opt = {})
{
    System sys = to_equation_system(phi, k);
    auto moves = symbolic_moves_mu(sys);
    Position q{k.state_index(state), sys.size() - 1};
    auto r = solve_measure_local(sys, moves, q, opt);
    bool holds = !r.at(q).is_star();
    return {holds, std::move(sys), std::move(r), q};
}

/**
 * Equation file: a "kts: path" line naming the structure (relative to the
 * file) and one "name =mu formula" or "name =nu formula" line per equation,
 * innermost first.
 */
struct EquationFile
{
    std::filesystem::path structure;
    std::vector<std::tuple<std::string, Sign, std::string, std::size_t>> equations;  // name, sign, body, line
};

inline EquationFile split_equation_file(std::string_view src, const std::string& header)
{
    EquationFile r;
    std::istringstream in{std::string(src)};
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        line_no++;
        std::string_view line = text::trim(raw);
        if (line.empty() || line.front() == '#') continue;
        if (line.starts_with(header + ":")) {
            r.structure = std::string(text::trim(line.substr(header.size() + 1)));
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string_view::npos || eq + 3 > line.size()) {
            throw parse_error("expected 'x =mu formula' or 'x =nu formula'", line_no, 1);
        }
        std::string name(text::trim(line.substr(0, eq)));
        std::string_view rest = line.substr(eq + 1);
        Sign s;
        if (rest.starts_with("mu")) {
            s = Sign::mu;
        } else if (rest.starts_with("nu")) {
            s = Sign::nu;
        } else {
            throw parse_error("expected =mu or =nu", line_no, eq + 2);
        }
        if (name.empty()) throw parse_error("missing variable name", line_no, 1);
        r.equations.emplace_back(name, s, std::string(rest.substr(2)), line_no);
    }
    if (r.structure.empty()) throw parse_error("missing '" + header + ":' line", line_no + 1, 1);
    if (r.equations.empty()) throw parse_error("no equations", line_no + 1, 1);
    return r;
}

struct LoadedSystem
{
    Kripke structure;
    System system;
};

inline LoadedSystem parse_equation_file(std::string_view src, const std::filesystem::path& base_dir)
{
    auto file = split_equation_file(src, "kts");
    Kripke k = load_kripke(file.structure.is_absolute() ? file.structure : base_dir / file.structure);
    ParseOptions opt;
    opt.allow_fixpoints = false;
    std::map<std::string, std::size_t> vars;
    for (const auto& [name, s, body, line] : file.equations) {
        if (!vars.emplace(name, vars.size()).second) throw parse_error("duplicate variable '" + name + "'", line, 1);
        opt.free_variables.insert(name);
    }
    Operators ops(k);
    std::vector<System::Equation> eqs;
    for (const auto& [name, s, body, line] : file.equations) {
        Formula f = parse_formula(body, opt, line);
        eqs.push_back({name, s, formula_to_term(f, k, ops, vars)});
    }
    return {k, System(k.lattice, std::move(eqs))};
}

inline LoadedSystem load_equation_file(const std::filesystem::path& path)
{
    return parse_equation_file(detail::read_file(path), path.parent_path());
}

}

#endif
