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

#ifndef FPGAME_SYMBOLIC_HPP
#define FPGAME_SYMBOLIC_HPP

#include <functional>
#include <map>
#include <utility>
#include <vector>

#include "fpgame/eqsys.hpp"
#include "fpgame/move_formula.hpp"

namespace fpg {

/**
 * The family φ_b^i of symbolic ∃-moves, one formula per position (b, i).
 * Formulas are produced on demand by a generator and cached.
 */
class SymbolicMoves
{
public:
    using Generator = std::function<MoveFormula(std::size_t, std::size_t)>;

    SymbolicMoves(std::size_t basis_count, std::size_t m, Generator gen)
        : basis_count_(basis_count), m_(m), gen_(std::move(gen)) { }

    std::size_t basis_count() const { return basis_count_; }
    std::size_t size() const { return m_; }

    const MoveFormula& at(std::size_t b, std::size_t i) const
    {
        if (b >= basis_count_ || i >= m_) throw usage_error("position outside the game");
        auto key = std::make_pair(b, i);
        auto it = cache_.find(key);
        if (it == cache_.end()) {
            if (!gen_) throw config_error("symbolic moves have no generator");
            it = cache_.emplace(key, gen_(b, i)).first;
        }
        return it->second;
    }

private:
    std::size_t basis_count_;
    std::size_t m_;
    Generator gen_;
    mutable std::map<std::pair<std::size_t, std::size_t>, MoveFormula> cache_;
};

/**
 * Replace every atom [b', j] of outer by the inner formula φ^j_{b'}.
 * top(j) atoms are passed through unchanged.
 */
inline MoveFormula compose_moves(const MoveFormula& outer,
                                 const std::function<MoveFormula(std::size_t, std::size_t)>& inner)
{
    if (!inner) throw config_error("missing inner move family");
    return outer.substitute(inner, [](std::size_t j) { return MoveFormula::top_of(j); });
}

// Moves of a k-ary monotone function by enumerating L^k.
template <FiniteLattice L>
MoveFormula enumerated_moves(const L& lat, std::size_t b, std::size_t arity,
                             const std::function<element_t<L>(const tuple_t<L>&)>& f)
{
    const auto& target = lat.basis().at(b);
    std::vector<tuple_t<L>> xs;
    for (auto& args : all_tuples(lat, arity)) {
        if (lat.leq(target, f(args))) xs.push_back(std::move(args));
    }
    std::vector<MoveFormula> ds;
    for (const auto& l : minimal_tuples(lat, xs)) ds.push_back(formula_for_tuple(lat, l));
    return MoveFormula::any_of(std::move(ds));
}

/**
 * Compositional symbolic moves for right-hand-side terms: a variable x_j
 * gives [b, j], a constant gives true or false, meet gives a conjunction,
 * join a disjunction (when the basis is join-prime), and an operator
 * application substitutes the argument formulas into the operator's own
 * move rule.
 */
template <FiniteLattice L>
class TermMoves
{
public:
    using element = element_t<L>;
    using term_type = Term<element>;

    explicit TermMoves(std::shared_ptr<const L> lat) : lat_(std::move(lat)) { }

    MoveFormula operator()(const term_type& t, std::size_t b)
    {
        auto key = std::make_pair(t.id(), b);
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        MoveFormula r = compute(t, b);
        memo_.emplace(key, r);
        return r;
    }

private:
    using K = typename term_type::Kind;

    MoveFormula compute(const term_type& t, std::size_t b)
    {
        const L& lat = *lat_;
        switch (t.kind()) {
        case K::variable:
            return MoveFormula::atom(b, t.var());
        case K::constant:
            return lat.leq(lat.basis().at(b), t.value()) ? MoveFormula::truth() : MoveFormula::falsity();
        case K::meet: {
            std::vector<MoveFormula> cs;
            for (const auto& c : t.children()) cs.push_back((*this)(c, b));
            return MoveFormula::all_of(std::move(cs));
        }
        case K::join: {
            if constexpr (L::join_prime_basis) {
                std::vector<MoveFormula> cs;
                for (const auto& c : t.children()) cs.push_back((*this)(c, b));
                return MoveFormula::any_of(std::move(cs));
            } else {
                auto f = [&lat](const tuple_t<L>& args) { return join_all(lat, args); };
                return compose_args(enumerated_moves<L>(lat, b, t.children().size(), f), t);
            }
        }
        case K::apply: {
            const auto& op = *t.op();
            MoveFormula outer = op.moves ? op.moves(b)
                                         : enumerated_moves<L>(lat, b, op.arity, [&op](const tuple_t<L>& a) {
                                               if (!op.apply) throw config_error("operator '" + op.name + "' has no interpretation");
                                               return op.apply(a);
                                           });
            return compose_args(outer, t);
        }
        }
        throw config_error("malformed term");
    }

    // Replace argument atoms [b', k] by the moves of the k-th argument.
    MoveFormula compose_args(const MoveFormula& outer, const term_type& t)
    {
        const auto& args = t.children();
        return outer.substitute(
            [&](std::size_t b2, std::size_t k) {
                if (k >= args.size()) throw config_error("move rule refers to a missing argument");
                return (*this)(args[k], b2);
            },
            [&](std::size_t k) {
                if (k >= args.size()) throw config_error("move rule refers to a missing argument");
                if (args[k].kind() != K::variable) throw config_error("top atoms are only supported on variable arguments");
                return MoveFormula::top_of(args[k].var());
            });
    }

    std::shared_ptr<const L> lat_;
    std::map<std::pair<const void*, std::size_t>, MoveFormula> memo_;
};

template <FiniteLattice L>
SymbolicMoves derive_symbolic_moves(const EquationSystem<L>& sys)
{
    auto tm = std::make_shared<TermMoves<L>>(sys.lattice_ptr());
    auto eqs = sys.equations();
    return SymbolicMoves(sys.lattice().basis().size(), sys.size(),
                         [tm, eqs](std::size_t b, std::size_t i) { return (*tm)(eqs[i].rhs, b); });
}

/**
 * A selection for one equation: for every basis index b a set of moves
 * whose upward closure is E(b, f_i).
 */
template <FiniteLattice L>
using Selection = std::vector<std::vector<tuple_t<L>>>;

// Minimal elements of E(b, f_i) for every b, by enumeration of L^m.
template <FiniteLattice L>
Selection<L> least_selection(const EquationSystem<L>& sys, std::size_t i)
{
    const L& lat = sys.lattice();
    const auto tuples = all_tuples(lat, sys.size());
    Selection<L> sel(lat.basis().size());
    for (std::size_t b = 0; b < lat.basis().size(); b++) {
        std::vector<tuple_t<L>> xs;
        for (const auto& l : tuples) {
            if (lat.leq(lat.basis()[b], sys.apply(i, l))) xs.push_back(l);
        }
        sel[b] = minimal_tuples(lat, xs);
    }
    return sel;
}

// Symbolic moves read off per-equation selections.
template <FiniteLattice L>
SymbolicMoves selection_moves(std::shared_ptr<const L> lat, std::vector<Selection<L>> sels)
{
    const std::size_t basis_count = lat->basis().size();
    const std::size_t m = sels.size();
    return SymbolicMoves(basis_count, m, [lat, sels = std::move(sels)](std::size_t b, std::size_t i) {
        std::vector<MoveFormula> ds;
        for (const auto& l : sels.at(i).at(b)) ds.push_back(formula_for_tuple(*lat, l));
        return MoveFormula::any_of(std::move(ds));
    });
}

}

#endif
