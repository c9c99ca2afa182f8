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

#ifndef FPGAME_MEASURE_HPP
#define FPGAME_MEASURE_HPP

#include <deque>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fpgame/eqsys.hpp"
#include "fpgame/ordinal.hpp"
#include "fpgame/symbolic.hpp"

namespace fpg {

// An ∃-position (b, i): basis element index b, equation index i.
struct Position
{
    std::size_t basis;
    std::size_t index;

    friend auto operator<=>(const Position&, const Position&) = default;
};

/**
 * Map from ∃-positions to lifted ordinal vectors. Positions that were not
 * explored (local solving) are absent.
 */
class ProgressMeasure
{
public:
    ProgressMeasure() = default;
    ProgressMeasure(std::size_t basis_count, std::size_t m) : basis_count_(basis_count), m_(m) { }

    static ProgressMeasure zero(std::size_t basis_count, std::size_t m)
    {
        ProgressMeasure r(basis_count, m);
        for (std::size_t b = 0; b < basis_count; b++) {
            for (std::size_t i = 0; i < m; i++) r.set({b, i}, LiftedVector::zero(m));
        }
        return r;
    }

    std::size_t basis_count() const { return basis_count_; }
    std::size_t size() const { return m_; }

    bool contains(Position p) const { return values_.count(p) != 0; }

    const LiftedVector& at(Position p) const
    {
        auto it = values_.find(p);
        if (it == values_.end()) throw usage_error("position not covered by this measure");
        return it->second;
    }

    void set(Position p, LiftedVector v) { values_[p] = std::move(v); }

    const std::map<Position, LiftedVector>& entries() const { return values_; }

    friend bool operator==(const ProgressMeasure&, const ProgressMeasure&) = default;

private:
    std::size_t basis_count_ = 0;
    std::size_t m_ = 0;
    std::map<Position, LiftedVector> values_;
};

// Per-system data needed to evaluate the measure equations.
struct MeasureShape
{
    std::size_t basis_count;
    std::vector<Sign> signs;
    std::uint32_t bound;

    template <FiniteLattice L>
    static MeasureShape of(const EquationSystem<L>& sys)
    {
        MeasureShape s{sys.lattice().basis().size(), {}, static_cast<std::uint32_t>(sys.lattice().height())};
        for (std::size_t i = 0; i < sys.size(); i++) s.signs.push_back(sys.sign(i));
        return s;
    }

    std::size_t size() const { return signs.size(); }
};

/**
 * Value of φ at a position with equation index i: ∨ becomes the
 * ⪯_i-minimum, ∧ the supremum, and an atom [b', j] evaluates to
 * R(b')(j) + δ_i, truncated at i. The empty disjunction is ★, the empty
 * conjunction the zero vector.
 */
template <class Lookup>
LiftedVector evaluate_moves(const MoveFormula& phi, std::size_t i, const MeasureShape& shape, Lookup&& lookup)
{
    const std::size_t m = shape.size();
    switch (phi.kind()) {
    case MoveFormula::Kind::atom:
        return truncate(add_delta(lookup(Position{phi.basis(), phi.index()}), i, shape.signs[i], shape.bound), i);
    case MoveFormula::Kind::top: {
        LiftedVector best = LiftedVector::zero(m);
        for (std::size_t b = 0; b < shape.basis_count; b++) {
            auto v = add_delta(lookup(Position{b, phi.index()}), i, shape.signs[i], shape.bound);
            if (compare_from(v, best) > 0) best = std::move(v);
        }
        return truncate(best, i);
    }
    case MoveFormula::Kind::any: {
        LiftedVector best = LiftedVector::star();
        for (const auto& c : phi.children()) {
            auto v = evaluate_moves(c, i, shape, lookup);
            if (compare_from(v, best, i) < 0) best = std::move(v);
        }
        return best;
    }
    case MoveFormula::Kind::all: {
        LiftedVector best = LiftedVector::zero(m);
        for (const auto& c : phi.children()) {
            auto v = evaluate_moves(c, i, shape, lookup);
            if (v.is_star()) return v;
            if (compare_from(v, best) > 0) best = std::move(v);
        }
        return best;
    }
    }
    return LiftedVector::star();
}

// One application of the measure equations at (b, i).
inline LiftedVector phi_step(const MeasureShape& shape, const SymbolicMoves& moves, const ProgressMeasure& r, Position p)
{
    return evaluate_moves(moves.at(p.basis, p.index), p.index, shape, [&](Position q) -> const LiftedVector& { return r.at(q); });
}

/**
 * Positions and their successors: (b, i) → (b', j) whenever the atom
 * [b', j] occurs in φ_b^i.
 */
struct DependencyGraph
{
    std::vector<Position> nodes;
    std::map<Position, std::size_t> ids;
    std::vector<std::vector<std::size_t>> succ;
    std::vector<std::vector<std::size_t>> pred;
    std::size_t max_formula_size = 0;

    std::size_t edge_count() const
    {
        std::size_t e = 0;
        for (const auto& s : succ) e += s.size();
        return e;
    }
};

// The graph reachable from seeds. Throws resource_error above cap positions.
inline DependencyGraph build_dependency_graph(const SymbolicMoves& moves, const std::vector<Position>& seeds,
                                              std::size_t cap = 1'000'000)
{
    DependencyGraph g;
    auto add = [&](Position p) {
        auto [it, fresh] = g.ids.emplace(p, g.nodes.size());
        if (fresh) {
            if (g.nodes.size() >= cap) {
                throw resource_error("more than " + std::to_string(cap) + " positions reachable");
            }
            g.nodes.push_back(p);
            g.succ.emplace_back();
        }
        return it->second;
    };
    for (auto p : seeds) add(p);
    for (std::size_t n = 0; n < g.nodes.size(); n++) {
        const auto& phi = moves.at(g.nodes[n].basis, g.nodes[n].index);
        g.max_formula_size = std::max(g.max_formula_size, phi.size(moves.basis_count()));
        std::vector<std::size_t> out;
        phi.for_each_atom(moves.basis_count(), [&](std::size_t b, std::size_t j) { out.push_back(add({b, j})); });
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        g.succ[n] = std::move(out);
    }
    g.pred.assign(g.nodes.size(), {});
    for (std::size_t n = 0; n < g.nodes.size(); n++) {
        for (auto s : g.succ[n]) g.pred[s].push_back(n);
    }
    return g;
}

inline std::vector<Position> all_positions(std::size_t basis_count, std::size_t m)
{
    std::vector<Position> r;
    for (std::size_t b = 0; b < basis_count; b++) {
        for (std::size_t i = 0; i < m; i++) r.push_back({b, i});
    }
    return r;
}

enum class Schedule { fifo, lifo };

struct MeasureOptions
{
    Schedule schedule = Schedule::fifo;
    std::size_t position_cap = 1'000'000;
};

struct MeasureStats
{
    std::size_t positions = 0;
    std::size_t edges = 0;
    std::size_t max_formula_size = 0;
    std::size_t evaluations = 0;
    std::size_t updates = 0;
};

/**
 * Least solution of the measure equations on the positions reachable from
 * seeds, by a worklist started at the zero measure. When a value grows,
 * its predecessors in the dependency graph are rescheduled.
 */
inline ProgressMeasure solve_measure_from(const MeasureShape& shape, const SymbolicMoves& moves,
                                          const std::vector<Position>& seeds, const MeasureOptions& opt = {},
                                          MeasureStats* stats = nullptr)
{
    const std::size_t m = shape.size();
    DependencyGraph g = build_dependency_graph(moves, seeds, opt.position_cap);
    const std::size_t n = g.nodes.size();
    std::vector<LiftedVector> value(n, LiftedVector::zero(m));
    std::vector<const MoveFormula*> phi(n);
    for (std::size_t k = 0; k < n; k++) phi[k] = &moves.at(g.nodes[k].basis, g.nodes[k].index);

    std::deque<std::size_t> work;
    std::vector<bool> queued(n, true);
    for (std::size_t k = 0; k < n; k++) work.push_back(k);
    auto lookup = [&](Position q) -> const LiftedVector& { return value[g.ids.at(q)]; };

    MeasureStats st;
    st.positions = n;
    st.edges = g.edge_count();
    st.max_formula_size = g.max_formula_size;
    while (!work.empty()) {
        std::size_t k;
        if (opt.schedule == Schedule::fifo) {
            k = work.front();
            work.pop_front();
        } else {
            k = work.back();
            work.pop_back();
        }
        queued[k] = false;
        st.evaluations++;
        LiftedVector v = evaluate_moves(*phi[k], g.nodes[k].index, shape, lookup);
        if (v == value[k]) continue;
        value[k] = std::move(v);
        st.updates++;
        for (auto p : g.pred[k]) {
            if (!queued[p]) {
                queued[p] = true;
                work.push_back(p);
            }
        }
    }
    if (stats) *stats = st;

    ProgressMeasure r(shape.basis_count, m);
    for (std::size_t k = 0; k < n; k++) r.set(g.nodes[k], value[k]);
    return r;
}

// Global mode: every position.
template <FiniteLattice L>
ProgressMeasure solve_measure(const EquationSystem<L>& sys, const SymbolicMoves& moves, const MeasureOptions& opt = {},
                              MeasureStats* stats = nullptr)
{
    auto shape = MeasureShape::of(sys);
    return solve_measure_from(shape, moves, all_positions(shape.basis_count, sys.size()), opt, stats);
}

// Local mode: only positions reachable from start.
template <FiniteLattice L>
ProgressMeasure solve_measure_local(const EquationSystem<L>& sys, const SymbolicMoves& moves, Position start,
                                    const MeasureOptions& opt = {}, MeasureStats* stats = nullptr)
{
    return solve_measure_from(MeasureShape::of(sys), moves, {start}, opt, stats);
}

// u_i = ⊔{b | R(b)(i) ≠ ★}
template <FiniteLattice L>
tuple_t<L> measure_to_solution(const EquationSystem<L>& sys, const ProgressMeasure& r)
{
    const L& lat = sys.lattice();
    tuple_t<L> u(sys.size(), lat.bottom());
    for (const auto& [p, v] : r.entries()) {
        if (!v.is_star()) u[p.index] = lat.join(u[p.index], lat.basis()[p.basis]);
    }
    return u;
}

// Positions (b', j) with b' ⊑ l_j, ordered by j then b'.
template <FiniteLattice L>
std::vector<Position> a_moves(const L& lat, const tuple_t<L>& l)
{
    std::vector<Position> r;
    for (std::size_t j = 0; j < l.size(); j++) {
        for (auto b : decompose(lat, l[j])) r.push_back({b, j});
    }
    return r;
}

// a_moves restricted to the maximal b' for each index.
template <FiniteLattice L>
std::vector<Position> reduced_a_moves(const L& lat, const tuple_t<L>& l)
{
    std::vector<Position> r;
    const auto& basis = lat.basis();
    for (std::size_t j = 0; j < l.size(); j++) {
        auto below = decompose(lat, l[j]);
        for (auto b : below) {
            bool maximal = true;
            for (auto c : below) {
                if (c != b && lat.leq(basis[b], basis[c]) && !(basis[b] == basis[c])) maximal = false;
            }
            if (maximal) r.push_back({b, j});
        }
    }
    return r;
}

// E(b, i) = {l ∈ L^m | b ⊑ f_i(l)} by enumeration.
template <FiniteLattice L>
std::vector<tuple_t<L>> e_moves(const EquationSystem<L>& sys, Position p, std::size_t cap = default_enumeration_cap)
{
    const L& lat = sys.lattice();
    std::vector<tuple_t<L>> r;
    for (auto& l : all_tuples(lat, sys.size(), cap)) {
        if (lat.leq(lat.basis().at(p.basis), sys.apply(p.index, l))) r.push_back(std::move(l));
    }
    return r;
}

namespace detail {

// Each position maps to a list of candidate moves, each given by its ∀-answers.
using MoveTable = std::map<Position, std::vector<std::vector<Position>>>;

inline ProgressMeasure iterate_table(const MeasureShape& shape, const MoveTable& table)
{
    const std::size_t m = shape.size();
    ProgressMeasure r = ProgressMeasure::zero(shape.basis_count, m);
    for (bool changed = true; changed;) {
        changed = false;
        for (const auto& [p, candidates] : table) {
            std::vector<LiftedVector> vals;
            for (const auto& answers : candidates) {
                std::vector<LiftedVector> succ;
                for (auto q : answers) succ.push_back(add_delta(r.at(q), p.index, shape.signs[p.index], shape.bound));
                vals.push_back(sup(succ, m));
            }
            LiftedVector v = min_trunc(p.index, vals);
            if (v != r.at(p)) {
                r.set(p, std::move(v));
                changed = true;
            }
        }
    }
    return r;
}

}

/**
 * Least measure straight from the definition: the minimum over all of
 * E(b, i), the supremum over all of A(l). Exponential; a test oracle.
 */
template <FiniteLattice L>
ProgressMeasure solve_measure_raw(const EquationSystem<L>& sys)
{
    auto shape = MeasureShape::of(sys);
    const L& lat = sys.lattice();
    const auto tuples = all_tuples(lat, sys.size());
    detail::MoveTable table;
    for (auto p : all_positions(shape.basis_count, sys.size())) {
        auto& c = table[p];
        for (const auto& l : tuples) {
            if (lat.leq(lat.basis()[p.basis], sys.apply(p.index, l))) c.push_back(a_moves(lat, l));
        }
    }
    return detail::iterate_table(shape, table);
}

// Least measure using selections for ∃ and reduced answers for ∀.
template <FiniteLattice L>
ProgressMeasure solve_measure_selection(const EquationSystem<L>& sys, const std::vector<Selection<L>>& sels)
{
    auto shape = MeasureShape::of(sys);
    const L& lat = sys.lattice();
    detail::MoveTable table;
    for (auto p : all_positions(shape.basis_count, sys.size())) {
        auto& c = table[p];
        for (const auto& l : sels.at(p.index).at(p.basis)) c.push_back(reduced_a_moves(lat, l));
    }
    return detail::iterate_table(shape, table);
}

/**
 * Literal check of the progress-measure conditions: every non-★ position
 * has a move l ∈ E(b, i) such that each answer (b', j) ∈ A(l) satisfies
 * R(b)(i) ≻_i R(b')(j) for μ, and ⪰_i for ν.
 */
template <FiniteLattice L>
bool is_progress_measure(const EquationSystem<L>& sys, const ProgressMeasure& r)
{
    const L& lat = sys.lattice();
    for (const auto& [p, v] : r.entries()) {
        if (v.is_star()) continue;
        bool found = false;
        for (const auto& l : e_moves(sys, p)) {
            bool ok = true;
            for (auto q : a_moves(lat, l)) {
                if (!r.contains(q)) {
                    ok = false;
                    break;
                }
                auto c = compare_from(v, r.at(q), p.index);
                if (sys.sign(p.index) == Sign::mu ? !(c > 0) : (c < 0)) {
                    ok = false;
                    break;
                }
            }
            if (ok) {
                found = true;
                break;
            }
        }
        if (!found) return false;
    }
    return true;
}

// One line per position: element, 1-based index and value, tab separated.
template <FiniteLattice L>
std::string dump_measure(const EquationSystem<L>& sys, const ProgressMeasure& r)
{
    std::ostringstream os;
    for (const auto& [p, v] : r.entries()) {
        os << sys.lattice().format(sys.lattice().basis()[p.basis]) << '\t' << p.index + 1 << '\t' << v.str() << '\n';
    }
    return os.str();
}

}

#endif
