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

#ifndef FPGAME_LATTICED_HPP
#define FPGAME_LATTICED_HPP

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "fpgame/downset.hpp"
#include "fpgame/mucalc.hpp"
#include "fpgame/pointwise.hpp"

/*
 * Latticed μ-calculus. Truth values are downsets of a product poset, a
 * formula denotes a valuation in L^S, and transitions carry weights in L.
 */

namespace fpg::mv {

using Truth = DownsetLattice;
using Valuations = PointwiseLattice<DownsetLattice>;
using Valuation = Valuations::element;
using System = EquationSystem<Valuations>;
using MvTerm = Term<Valuation>;

// Downsets of the product poset, checked for distributivity when small enough to enumerate.
inline std::shared_ptr<const Truth> build_upgrade_lattice(Poset products)
{
    auto lat = std::make_shared<const Truth>(std::move(products));
    if (lat->poset().size() <= 6 && !is_distributive(*lat)) throw config_error("truth lattice is not distributive");
    return lat;
}

// Words like "p<=q<=r" or "s"; each chain link declares an order pair.
inline Poset parse_products(const std::vector<std::string>& words, std::size_t line = 1)
{
    std::vector<std::string> names;
    std::set<std::string> seen;
    std::vector<std::pair<std::string, std::string>> below;
    for (const auto& w : words) {
        std::vector<std::string> chain;
        std::size_t start = 0;
        for (;;) {
            auto k = w.find("<=", start);
            chain.push_back(w.substr(start, k == std::string::npos ? std::string::npos : k - start));
            if (k == std::string::npos) break;
            start = k + 2;
        }
        for (std::size_t k = 0; k < chain.size(); k++) {
            if (chain[k].empty()) throw parse_error("malformed product order '" + w + "'", line, 1);
            if (seen.insert(chain[k]).second) names.push_back(chain[k]);
            if (k > 0) below.emplace_back(chain[k - 1], chain[k]);
        }
    }
    if (names.empty()) throw parse_error("no products declared", line, 1);
    return Poset(std::move(names), below);
}

/**
 * Multi-valued transition system. Text format extends the Kripke format:
 *
 *   products: p<=q r
 *   states: a b
 *   edges: a->b               # weight ⊤
 *   edge b->a : downset(p)
 *   label ok: a               # value ⊤ at a
 *   label ok: b : downset(q)
 */
struct MVTS
{
    std::vector<std::string> states;
    std::shared_ptr<const Truth> truth;
    std::shared_ptr<const Valuations> valuations;
    std::vector<std::vector<Bits>> weight;  // weight[x][y] = R(x, y)
    std::map<std::string, Valuation> labels;

    std::size_t state_index(const std::string& s) const { return valuations->state_index(s); }

    Valuation label(const std::string& p) const
    {
        auto it = labels.find(p);
        return it == labels.end() ? valuations->bottom() : it->second;
    }

    // Position of b_x in the basis of L^S; b must be a product name.
    std::size_t basis_index(const std::string& state, const std::string& product) const
    {
        return valuations->basis_index(state_index(state), truth->poset().index_of(product));
    }
};

inline MVTS make_mvts(std::vector<std::string> states, std::shared_ptr<const Truth> truth)
{
    MVTS m;
    m.truth = std::move(truth);
    m.valuations = std::make_shared<const Valuations>(states, m.truth);
    m.states = std::move(states);
    m.weight.assign(m.states.size(), std::vector<Bits>(m.states.size(), m.truth->bottom()));
    return m;
}

// Boolean truth lattice over one product; the structure is the given Kripke structure.
inline MVTS from_kripke(const mu::Kripke& k)
{
    MVTS m = make_mvts(k.states, build_upgrade_lattice(Poset::antichain({"t"})));
    for (std::size_t x = 0; x < k.states.size(); x++) {
        for (auto y : k.succ[x]) m.weight[x][y] = m.truth->top();
    }
    for (const auto& [p, set] : k.labels) {
        Valuation v = m.valuations->bottom();
        for (auto x = set.find_first(); x != Bits::npos; x = set.find_next(x)) v[x] = m.truth->top();
        m.labels[p] = v;
    }
    return m;
}

inline MVTS parse_mvts(std::string_view src)
{
    auto t = mu::detail::split_kripke(src);
    std::optional<Poset> products;
    std::vector<std::tuple<std::string, std::string, std::string, std::size_t>> weighted;
    for (std::size_t k = 0; k < t.other.size(); k++) {
        const std::string& line = t.other[k];
        const std::size_t line_no = t.other_lines[k];
        if (line.starts_with("products:")) {
            if (products) throw parse_error("duplicate 'products:' line", line_no, 1);
            products = parse_products(text::words(std::string_view(line).substr(9)), line_no);
        } else if (line.starts_with("edge ")) {
            auto colon = line.find(':');
            if (colon == std::string::npos) throw parse_error("expected 'edge a->b : downset(...)'", line_no, 1);
            auto [a, b] = mu::detail::parse_arrow(std::string(text::trim(std::string_view(line).substr(5, colon - 5))),
                                                  line_no);
            weighted.emplace_back(a, b, std::string(text::trim(std::string_view(line).substr(colon + 1))), line_no);
        } else {
            throw parse_error("unrecognized line '" + line + "'", line_no, 1);
        }
    }
    if (!products) throw parse_error("missing 'products:' line", 1, 1);
    MVTS m = make_mvts(t.states, build_upgrade_lattice(std::move(*products)));
    const Truth& lat = *m.truth;
    for (const auto& [a, b] : t.edges) {
        m.weight[m.state_index(a)][m.state_index(b)] = lat.top();
    }
    for (const auto& [a, b, w, line_no] : weighted) {
        Bits v;
        try {
            v = lat.parse(w);
        } catch (const usage_error& e) {
            throw parse_error(e.what(), line_no, 1);
        }
        auto& slot = m.weight[m.state_index(a)][m.state_index(b)];
        slot = lat.join(slot, v);
    }
    for (const auto& [p, members] : t.labels) {
        // members are the words after "label p:"; an optional ": downset(...)" gives the value
        auto sep = std::find(members.begin(), members.end(), ":");
        Bits value = lat.top();
        if (sep != members.end()) {
            value = lat.parse(text::join(std::vector<std::string>(sep + 1, members.end()), " "));
        }
        Valuation v = m.label(p);
        for (auto it = members.begin(); it != sep; it++) {
            auto x = m.state_index(*it);
            v[x] = lat.join(v[x], value);
        }
        m.labels[p] = v;
    }
    return m;
}

inline MVTS load_mvts(const std::filesystem::path& path) { return parse_mvts(mu::detail::read_file(path)); }

// (◇u)(x) = ⊔_y R(x,y) ⊓ u(y)
inline Valuation diamond_mv(const MVTS& m, const Valuation& u)
{
    const Truth& lat = *m.truth;
    Valuation r = m.valuations->bottom();
    for (std::size_t x = 0; x < m.states.size(); x++) {
        for (std::size_t y = 0; y < m.states.size(); y++) r[x] = lat.join(r[x], lat.meet(m.weight[x][y], u[y]));
    }
    return r;
}

// (□u)(x) = ⊓_y (R(x,y) ⇒ u(y))
inline Valuation box_mv(const MVTS& m, const Valuation& u)
{
    const Truth& lat = *m.truth;
    Valuation r = m.valuations->top();
    for (std::size_t x = 0; x < m.states.size(); x++) {
        for (std::size_t y = 0; y < m.states.size(); y++) r[x] = lat.meet(r[x], lat.implies(m.weight[x][y], u[y]));
    }
    return r;
}

// (l ⇒ u)(x) = l ⇒ u(x)
inline Valuation implies_mv(const MVTS& m, const Bits& l, const Valuation& u)
{
    Valuation r = u;
    for (auto& v : r) v = m.truth->implies(l, v);
    return r;
}

namespace detail {

// Inner basis indices b' with b' ⊑ b and b' ⊑ bound.
inline std::vector<std::size_t> basis_below(const Truth& lat, std::size_t b, const Bits& bound)
{
    std::vector<std::size_t> r;
    for (std::size_t k = 0; k < lat.basis().size(); k++) {
        if (lat.leq(lat.basis()[k], lat.basis()[b]) && lat.leq(lat.basis()[k], bound)) r.push_back(k);
    }
    return r;
}

}

inline OperatorPtr<Valuation> diamond_operator(std::shared_ptr<const MVTS> m)
{
    auto op = std::make_shared<Operator<Valuation>>();
    op->name = "dia";
    op->arity = 1;
    op->apply = [m](const std::vector<Valuation>& a) { return diamond_mv(*m, a[0]); };
    op->moves = [m](std::size_t k) {
        auto [x, b] = m->valuations->split_basis(k);
        std::vector<MoveFormula> ds;
        for (std::size_t y = 0; y < m->states.size(); y++) {
            if (m->truth->leq(m->truth->basis()[b], m->weight[x][y])) {
                ds.push_back(MoveFormula::atom(m->valuations->basis_index(y, b), 0));
            }
        }
        return MoveFormula::any_of(std::move(ds));
    };
    return op;
}

inline OperatorPtr<Valuation> box_operator(std::shared_ptr<const MVTS> m)
{
    auto op = std::make_shared<Operator<Valuation>>();
    op->name = "box";
    op->arity = 1;
    op->apply = [m](const std::vector<Valuation>& a) { return box_mv(*m, a[0]); };
    op->moves = [m](std::size_t k) {
        auto [x, b] = m->valuations->split_basis(k);
        std::vector<MoveFormula> cs;
        for (std::size_t y = 0; y < m->states.size(); y++) {
            for (auto b2 : detail::basis_below(*m->truth, b, m->weight[x][y])) {
                cs.push_back(MoveFormula::atom(m->valuations->basis_index(y, b2), 0));
            }
        }
        return MoveFormula::all_of(std::move(cs));
    };
    return op;
}

inline OperatorPtr<Valuation> implies_operator(std::shared_ptr<const MVTS> m, Bits l, std::string label)
{
    auto op = std::make_shared<Operator<Valuation>>();
    op->name = label + " =>";
    op->arity = 1;
    op->apply = [m, l](const std::vector<Valuation>& a) { return implies_mv(*m, l, a[0]); };
    op->moves = [m, l](std::size_t k) {
        auto [x, b] = m->valuations->split_basis(k);
        std::vector<MoveFormula> cs;
        for (auto b2 : detail::basis_below(*m->truth, b, l)) {
            cs.push_back(MoveFormula::atom(m->valuations->basis_index(x, b2), 0));
        }
        return MoveFormula::all_of(std::move(cs));
    };
    return op;
}

class TermBuilder
{
public:
    explicit TermBuilder(std::shared_ptr<const MVTS> m)
        : m_(std::move(m)), dia_(diamond_operator(m_)), box_(box_operator(m_)) { }

    MvTerm operator()(const mu::Formula& f, const std::map<std::string, std::size_t>& vars)
    {
        using K = mu::Formula::Kind;
        const Valuations& val = *m_->valuations;
        switch (f.kind) {
        case K::tt:
            return MvTerm::constant(val.top(), "tt");
        case K::ff:
            return MvTerm::constant(val.bottom(), "ff");
        case K::prop:
            return MvTerm::constant(m_->label(f.name), f.name);
        case K::constant:
            return MvTerm::constant(val.constant(m_->truth->generated(f.generators)),
                                    mu::detail::generators_text(f.generators));
        case K::var: {
            auto it = vars.find(f.name);
            if (it == vars.end()) throw contract_violation("free variable '" + f.name + "'");
            return MvTerm::variable(it->second);
        }
        case K::conj:
        case K::disj: {
            std::vector<MvTerm> cs;
            for (const auto& c : f.children) cs.push_back((*this)(c, vars));
            return f.kind == K::conj ? MvTerm::meet(std::move(cs)) : MvTerm::join(std::move(cs));
        }
        case K::box:
            return MvTerm::apply(box_, {(*this)(f.children[0], vars)});
        case K::dia:
            return MvTerm::apply(dia_, {(*this)(f.children[0], vars)});
        case K::implies: {
            std::string label = mu::detail::generators_text(f.generators);
            auto& op = implies_[label];
            if (!op) op = implies_operator(m_, m_->truth->generated(f.generators), label);
            return MvTerm::apply(op, {(*this)(f.children[0], vars)});
        }
        case K::fix:
            break;
        }
        throw contract_violation("nested fixpoint in a term");
    }

private:
    std::shared_ptr<const MVTS> m_;
    OperatorPtr<Valuation> dia_, box_;
    std::map<std::string, OperatorPtr<Valuation>> implies_;
};

inline mu::ParseOptions formula_options()
{
    mu::ParseOptions opt;
    opt.lattice_constants = true;
    return opt;
}

inline mu::Formula parse_formula(std::string_view src) { return mu::parse_formula(src, formula_options()); }

// Same equation order as the boolean translation: outermost binder last.
inline System to_equation_system(const mu::Formula& phi, std::shared_ptr<const MVTS> m)
{
    auto binders = mu::detail::binder_equations(phi);
    auto vars = mu::detail::variable_indices(binders);
    TermBuilder build(m);
    std::vector<System::Equation> eqs;
    for (const auto& b : binders) eqs.push_back({b.name, b.sign, build(b.body, vars)});
    return System(m->valuations, std::move(eqs));
}

// Semantics by naive fixpoint iteration on L^S.
inline Valuation direct_semantics(const mu::Formula& f, const MVTS& m, std::map<std::string, Valuation> env = {})
{
    using K = mu::Formula::Kind;
    const Valuations& val = *m.valuations;
    switch (f.kind) {
    case K::tt:
        return val.top();
    case K::ff:
        return val.bottom();
    case K::prop:
        return m.label(f.name);
    case K::constant:
        return val.constant(m.truth->generated(f.generators));
    case K::var: {
        auto it = env.find(f.name);
        if (it == env.end()) throw contract_violation("free variable '" + f.name + "'");
        return it->second;
    }
    case K::conj:
        return val.meet(direct_semantics(f.children[0], m, env), direct_semantics(f.children[1], m, env));
    case K::disj:
        return val.join(direct_semantics(f.children[0], m, env), direct_semantics(f.children[1], m, env));
    case K::box:
        return box_mv(m, direct_semantics(f.children[0], m, env));
    case K::dia:
        return diamond_mv(m, direct_semantics(f.children[0], m, env));
    case K::implies:
        return implies_mv(m, m.truth->generated(f.generators), direct_semantics(f.children[0], m, env));
    case K::fix: {
        Valuation x = f.sign == Sign::mu ? val.bottom() : val.top();
        for (;;) {
            env[f.name] = x;
            Valuation n = direct_semantics(f.children[0], m, env);
            if (n == x) return x;
            x = std::move(n);
        }
    }
    }
    throw contract_violation("malformed formula");
}

struct ModelCheckResult
{
    bool holds;
    System system;
    ProgressMeasure measure;
    Position query;
};

// Does φ hold at state x to degree at least ↓product? Local measure from (↓product_x, m).
inline ModelCheckResult mv_model_check(std::shared_ptr<const MVTS> m, const mu::Formula& phi, const std::string& state,
                                       const std::string& product, const MeasureOptions& opt = {})
{
    System sys = to_equation_system(phi, m);
    auto moves = derive_symbolic_moves(sys);
    Position q{m->basis_index(state, product), sys.size() - 1};
    auto r = solve_measure_local(sys, moves, q, opt);
    bool holds = !r.at(q).is_star();
    return {holds, std::move(sys), std::move(r), q};
}

struct LoadedSystem
{
    std::shared_ptr<const MVTS> structure;
    System system;
};

// Equation file whose "kts:" line names an MVTS file; bodies may use lattice constants.
inline LoadedSystem parse_equation_file(std::string_view src, const std::filesystem::path& base_dir)
{
    auto file = mu::split_equation_file(src, "kts");
    auto m = std::make_shared<const MVTS>(
        load_mvts(file.structure.is_absolute() ? file.structure : base_dir / file.structure));
    mu::ParseOptions opt = formula_options();
    opt.allow_fixpoints = false;
    std::map<std::string, std::size_t> vars;
    for (const auto& [name, s, body, line] : file.equations) {
        if (!vars.emplace(name, vars.size()).second) throw parse_error("duplicate variable '" + name + "'", line, 1);
        opt.free_variables.insert(name);
    }
    TermBuilder build(m);
    std::vector<System::Equation> eqs;
    for (const auto& [name, s, body, line] : file.equations) {
        eqs.push_back({name, s, build(mu::parse_formula(body, opt, line), vars)});
    }
    return {m, System(m->valuations, std::move(eqs))};
}

inline LoadedSystem load_equation_file(const std::filesystem::path& path)
{
    return parse_equation_file(mu::detail::read_file(path), path.parent_path());
}

}

#endif
