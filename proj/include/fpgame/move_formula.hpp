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

#ifndef FPGAME_MOVE_FORMULA_HPP
#define FPGAME_MOVE_FORMULA_HPP

#include <algorithm>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "fpgame/lattice.hpp"

namespace fpg {

/**
 * Positive boolean formula over atoms [b, j] (basis element index b,
 * equation index j). A tuple l satisfies [b, j] iff basis[b] ⊑ l_j. The
 * extra atom top(j) holds iff l_j = ⊤; it is only needed for lattices
 * whose top is not reachable through basis atoms alone.
 *
 * any_of and all_of flatten, drop neutral children, absorb the constant
 * and sort, so structurally equal formulas compare equal.
 */
class MoveFormula
{
public:
    enum class Kind { atom, top, any, all };

    static MoveFormula atom(std::size_t basis, std::size_t index) { return MoveFormula(Kind::atom, basis, index); }
    static MoveFormula top_of(std::size_t index) { return MoveFormula(Kind::top, 0, index); }
    static MoveFormula truth() { return MoveFormula(Kind::all, 0, 0); }
    static MoveFormula falsity() { return MoveFormula(Kind::any, 0, 0); }

    static MoveFormula any_of(std::vector<MoveFormula> cs) { return combine(Kind::any, std::move(cs)); }
    static MoveFormula all_of(std::vector<MoveFormula> cs) { return combine(Kind::all, std::move(cs)); }

    Kind kind() const { return kind_; }
    std::size_t basis() const { return basis_; }
    std::size_t index() const { return index_; }
    const std::vector<MoveFormula>& children() const { return children_; }

    bool is_true() const { return kind_ == Kind::all && children_.empty(); }
    bool is_false() const { return kind_ == Kind::any && children_.empty(); }

    // Node count; top(j) counts as one atom per basis element.
    std::size_t size(std::size_t basis_count) const
    {
        if (kind_ == Kind::atom) return 1;
        if (kind_ == Kind::top) return std::max<std::size_t>(basis_count, 1);
        std::size_t s = 1;
        for (const auto& c : children_) s += c.size(basis_count);
        return s;
    }

    // Calls f(basis, index) for every atom occurrence, expanding top(j).
    template <class F>
    void for_each_atom(std::size_t basis_count, F&& f) const
    {
        switch (kind_) {
        case Kind::atom:
            f(basis_, index_);
            break;
        case Kind::top:
            for (std::size_t b = 0; b < basis_count; b++) f(b, index_);
            break;
        default:
            for (const auto& c : children_) c.for_each_atom(basis_count, f);
        }
    }

    /**
     * Replace every atom [b, j] by atom_fn(b, j) and every top(j) by
     * top_fn(j).
     */
    MoveFormula substitute(const std::function<MoveFormula(std::size_t, std::size_t)>& atom_fn,
                           const std::function<MoveFormula(std::size_t)>& top_fn) const
    {
        switch (kind_) {
        case Kind::atom:
            return atom_fn(basis_, index_);
        case Kind::top:
            return top_fn(index_);
        default: {
            std::vector<MoveFormula> cs;
            cs.reserve(children_.size());
            for (const auto& c : children_) cs.push_back(c.substitute(atom_fn, top_fn));
            return combine(kind_, std::move(cs));
        }
        }
    }

    std::string str(const std::function<std::string(std::size_t)>& basis_name) const
    {
        switch (kind_) {
        case Kind::atom:
            return "[" + basis_name(basis_) + "," + std::to_string(index_ + 1) + "]";
        case Kind::top:
            return "[⊤," + std::to_string(index_ + 1) + "]";
        default:
            if (children_.empty()) return kind_ == Kind::all ? "true" : "false";
            std::string s;
            for (std::size_t k = 0; k < children_.size(); k++) {
                if (k) s += kind_ == Kind::all ? " ∧ " : " ∨ ";
                const auto& c = children_[k];
                bool paren = c.kind_ == Kind::any || c.kind_ == Kind::all;
                s += paren ? "(" + c.str(basis_name) + ")" : c.str(basis_name);
            }
            return s;
        }
    }

    friend int compare(const MoveFormula& a, const MoveFormula& b)
    {
        if (a.kind_ != b.kind_) return a.kind_ < b.kind_ ? -1 : 1;
        if (a.index_ != b.index_) return a.index_ < b.index_ ? -1 : 1;
        if (a.basis_ != b.basis_) return a.basis_ < b.basis_ ? -1 : 1;
        const std::size_t n = std::min(a.children_.size(), b.children_.size());
        for (std::size_t k = 0; k < n; k++) {
            if (int c = compare(a.children_[k], b.children_[k])) return c;
        }
        if (a.children_.size() != b.children_.size()) return a.children_.size() < b.children_.size() ? -1 : 1;
        return 0;
    }

    friend bool operator==(const MoveFormula& a, const MoveFormula& b) { return compare(a, b) == 0; }
    friend bool operator<(const MoveFormula& a, const MoveFormula& b) { return compare(a, b) < 0; }

private:
    MoveFormula(Kind k, std::size_t b, std::size_t i) : kind_(k), basis_(b), index_(i) { }

    static MoveFormula combine(Kind k, std::vector<MoveFormula> cs)
    {
        std::vector<MoveFormula> flat;
        for (auto& c : cs) {
            if (c.kind_ == k) {
                for (auto& g : c.children_) flat.push_back(std::move(g));
            } else if ((k == Kind::any && c.is_true()) || (k == Kind::all && c.is_false())) {
                return c;
            } else {
                flat.push_back(std::move(c));
            }
        }
        std::sort(flat.begin(), flat.end());
        flat.erase(std::unique(flat.begin(), flat.end()), flat.end());
        if (flat.size() == 1) return std::move(flat.front());
        MoveFormula r(k, 0, 0);
        r.children_ = std::move(flat);
        return r;
    }

    Kind kind_;
    std::size_t basis_;
    std::size_t index_;
    std::vector<MoveFormula> children_;
};

template <FiniteLattice L>
bool satisfies(const L& lat, const MoveFormula& phi, const tuple_t<L>& l)
{
    switch (phi.kind()) {
    case MoveFormula::Kind::atom:
        return lat.leq(lat.basis().at(phi.basis()), l.at(phi.index()));
    case MoveFormula::Kind::top:
        return l.at(phi.index()) == lat.top();
    case MoveFormula::Kind::any:
        return std::any_of(phi.children().begin(), phi.children().end(),
                           [&](const MoveFormula& c) { return satisfies(lat, c, l); });
    case MoveFormula::Kind::all:
        return std::all_of(phi.children().begin(), phi.children().end(),
                           [&](const MoveFormula& c) { return satisfies(lat, c, l); });
    }
    return false;
}

// ⟦φ⟧ ⊆ L^m by enumeration. Intended as a test oracle on small lattices.
template <FiniteLattice L>
std::vector<tuple_t<L>> formula_semantics(const L& lat, const MoveFormula& phi, std::size_t m)
{
    std::vector<tuple_t<L>> r;
    for (auto& l : all_tuples(lat, m)) {
        if (satisfies(lat, phi, l)) r.push_back(std::move(l));
    }
    return r;
}

template <FiniteLattice L>
std::vector<tuple_t<L>> minimal_tuples(const L& lat, const std::vector<tuple_t<L>>& xs)
{
    std::vector<tuple_t<L>> r;
    for (const auto& x : xs) {
        bool minimal = true;
        for (const auto& y : xs) {
            if (y != x && tuple_leq(lat, y, x)) {
                minimal = false;
                break;
            }
        }
        if (minimal) r.push_back(x);
    }
    return r;
}

// ψ_l = ∧{[b, j] | b ⊑ l_j}, whose semantics is ↑l.
template <FiniteLattice L>
MoveFormula formula_for_tuple(const L& lat, const tuple_t<L>& l)
{
    std::vector<MoveFormula> atoms;
    for (std::size_t j = 0; j < l.size(); j++) {
        for (auto b : decompose(lat, l[j])) atoms.push_back(MoveFormula::atom(b, j));
    }
    return MoveFormula::all_of(std::move(atoms));
}

/**
 * A formula whose semantics is the upward-closed set X ⊆ L^m. The
 * disjuncts range over the minimal elements of X. Throws
 * contract_violation when X is not upward closed.
 */
template <FiniteLattice L>
MoveFormula formula_for_upset(const L& lat, const std::vector<tuple_t<L>>& xs, std::size_t m)
{
    std::set<tuple_t<L>> members(xs.begin(), xs.end());
    for (const auto& y : all_tuples(lat, m)) {
        if (members.count(y)) continue;
        for (const auto& x : xs) {
            if (tuple_leq(lat, x, y)) throw contract_violation("move set is not upward closed");
        }
    }
    std::vector<MoveFormula> ds;
    for (const auto& l : minimal_tuples(lat, xs)) ds.push_back(formula_for_tuple(lat, l));
    return MoveFormula::any_of(std::move(ds));
}

}

#endif
