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

#ifndef FPGAME_GAME_HPP
#define FPGAME_GAME_HPP

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fpgame/measure.hpp"

namespace fpg {

enum class Player { exists, forall };

template <FiniteLattice L>
std::string format_position(const L& lat, Position p)
{
    return "(" + lat.format(lat.basis().at(p.basis)) + "," + std::to_string(p.index + 1) + ")";
}

/**
 * A memoryless ∃ strategy read off a progress measure: at (b, i) pick the
 * move from φ_b^i whose worst ∀-answer is least under ⪯_i. Disjunctions
 * pick their best child, conjunctions join the children's moves.
 * Returns nothing when R(b)(i) = ★.
 */
template <FiniteLattice L>
std::optional<tuple_t<L>> suggest_existential_move(const EquationSystem<L>& sys, const SymbolicMoves& moves,
                                                   const ProgressMeasure& r, Position p)
{
    if (!r.contains(p) || r.at(p).is_star()) return std::nullopt;
    const L& lat = sys.lattice();
    const auto shape = MeasureShape::of(sys);
    const auto star = LiftedVector::star();
    auto lookup = [&](Position q) -> const LiftedVector& { return r.contains(q) ? r.at(q) : star; };

    struct Choice
    {
        LiftedVector value;
        tuple_t<L> move;
    };
    std::function<Choice(const MoveFormula&)> choose = [&](const MoveFormula& phi) -> Choice {
        tuple_t<L> bot(sys.size(), lat.bottom());
        switch (phi.kind()) {
        case MoveFormula::Kind::atom:
            bot[phi.index()] = lat.basis()[phi.basis()];
            return {evaluate_moves(phi, p.index, shape, lookup), bot};
        case MoveFormula::Kind::top:
            bot[phi.index()] = lat.top();
            return {evaluate_moves(phi, p.index, shape, lookup), bot};
        case MoveFormula::Kind::any: {
            std::optional<Choice> best;
            for (const auto& c : phi.children()) {
                Choice ch = choose(c);
                if (!best || compare_from(ch.value, best->value, p.index) < 0) best = std::move(ch);
            }
            if (!best) return {LiftedVector::star(), bot};
            return *best;
        }
        case MoveFormula::Kind::all: {
            Choice acc{LiftedVector::zero(sys.size()), bot};
            for (const auto& c : phi.children()) {
                Choice ch = choose(c);
                if (compare_from(ch.value, acc.value) > 0) acc.value = ch.value;
                for (std::size_t j = 0; j < sys.size(); j++) acc.move[j] = lat.join(acc.move[j], ch.move[j]);
            }
            return acc;
        }
        }
        return {LiftedVector::star(), bot};
    };

    Choice c = choose(moves.at(p.basis, p.index));
    if (c.value.is_star()) return std::nullopt;
    if (!lat.leq(lat.basis()[p.basis], sys.apply(p.index, c.move))) {
        throw config_error("symbolic moves disagree with the system at " + format_position(lat, p));
    }
    return c.move;
}

template <FiniteLattice L>
using ExistsStrategy = std::function<std::optional<tuple_t<L>>(Position)>;

template <FiniteLattice L>
using ForallStrategy = std::function<Position(const tuple_t<L>&, const std::vector<Position>&)>;

template <FiniteLattice L>
ExistsStrategy<L> measure_strategy(const EquationSystem<L>& sys, const SymbolicMoves& moves, const ProgressMeasure& r)
{
    return [&sys, &moves, &r](Position p) { return suggest_existential_move(sys, moves, r, p); };
}

// ∀ answers with the legal move of greatest measure (★ first), ties to the first.
template <FiniteLattice L>
ForallStrategy<L> greedy_forall(const ProgressMeasure& r)
{
    return [&r](const tuple_t<L>&, const std::vector<Position>& legal) {
        Position best = legal.front();
        auto value = [&](Position q) { return r.contains(q) ? r.at(q) : LiftedVector::star(); };
        for (auto q : legal) {
            if (compare_from(value(q), value(best)) > 0) best = q;
        }
        return best;
    };
}

enum class Outcome { exists_wins, forall_wins, undecided };
enum class EndReason { forall_stuck, exists_stuck, cycle, step_cap };

template <FiniteLattice L>
struct PlayEvent
{
    Player mover;
    Position from;         // the ∃-position the round started at
    tuple_t<L> move;       // ∃'s tuple
    std::optional<Position> answer;  // ∀'s answer, for forall events
};

struct PlayResult
{
    Outcome outcome = Outcome::undecided;
    EndReason reason = EndReason::step_cap;
    std::size_t cycle_index = 0;
    Sign cycle_sign = Sign::nu;
    std::size_t steps = 0;

    std::string verdict() const
    {
        switch (reason) {
        case EndReason::forall_stuck:
            return "∃ wins (∀ stuck)";
        case EndReason::exists_stuck:
            return "∀ wins (∃ stuck)";
        case EndReason::cycle:
            return std::string(outcome == Outcome::exists_wins ? "∃" : "∀") + " wins (cycle, highest index " +
                   std::to_string(cycle_index + 1) + " is " + sign_symbol(cycle_sign) + ")";
        case EndReason::step_cap:
            return "undecided (step cap reached)";
        }
        return "";
    }
};

/**
 * Plays from an ∃-position. A player without a move loses. The play
 * stops at the first repeated position; the cycle is won by ∃ iff its
 * highest ∃-index is a ν-equation. Rounds beyond step_cap are undecided.
 */
template <FiniteLattice L>
PlayResult play(const EquationSystem<L>& sys, Position start, const ExistsStrategy<L>& exists,
                const ForallStrategy<L>& forall, std::size_t step_cap = 10000,
                const std::function<void(const PlayEvent<L>&)>& observe = {})
{
    const L& lat = sys.lattice();
    PlayResult res;
    std::map<Position, std::size_t> seen;
    std::vector<Position> history;
    Position p = start;
    for (;;) {
        if (auto it = seen.find(p); it != seen.end()) {
            std::size_t h = 0;
            for (std::size_t k = it->second; k < history.size(); k++) h = std::max(h, history[k].index);
            res.reason = EndReason::cycle;
            res.cycle_index = h;
            res.cycle_sign = sys.sign(h);
            res.outcome = res.cycle_sign == Sign::nu ? Outcome::exists_wins : Outcome::forall_wins;
            return res;
        }
        if (res.steps >= step_cap) return res;
        seen.emplace(p, history.size());
        history.push_back(p);
        res.steps++;

        auto move = exists(p);
        if (!move) {
            res.reason = EndReason::exists_stuck;
            res.outcome = Outcome::forall_wins;
            return res;
        }
        if (move->size() != sys.size() || !lat.leq(lat.basis()[p.basis], sys.apply(p.index, *move))) {
            throw usage_error("illegal ∃ move " + format_tuple(lat, *move) + " at " + format_position(lat, p));
        }
        if (observe) observe({Player::exists, p, *move, std::nullopt});

        auto legal = a_moves(lat, *move);
        if (legal.empty()) {
            res.reason = EndReason::forall_stuck;
            res.outcome = Outcome::exists_wins;
            return res;
        }
        Position q = forall(*move, legal);
        if (std::find(legal.begin(), legal.end(), q) == legal.end()) {
            throw usage_error("illegal ∀ move " + format_position(lat, q));
        }
        if (observe) observe({Player::forall, p, *move, q});
        p = q;
    }
}

/**
 * Exhaustive ∀ against a fixed memoryless ∃ strategy. ∀ wins when it can
 * reach a position where ∃ has no move, or a reachable cycle whose
 * highest index is a μ-equation.
 */
template <FiniteLattice L>
bool forall_can_refute(const EquationSystem<L>& sys, const ExistsStrategy<L>& exists, Position start)
{
    const L& lat = sys.lattice();
    std::map<Position, std::size_t> id;
    std::vector<Position> nodes;
    std::vector<std::vector<std::size_t>> succ;
    auto add = [&](Position p) {
        auto [it, fresh] = id.emplace(p, nodes.size());
        if (fresh) {
            nodes.push_back(p);
            succ.emplace_back();
        }
        return it->second;
    };
    add(start);
    for (std::size_t n = 0; n < nodes.size(); n++) {
        auto move = exists(nodes[n]);
        if (!move || !lat.leq(lat.basis()[nodes[n].basis], sys.apply(nodes[n].index, *move))) return true;
        for (auto q : a_moves(lat, *move)) {
            std::size_t t = add(q);
            succ[n].push_back(t);
        }
    }
    // A μ-index h loses for ∃ if some h-node lies on a cycle through nodes of index ≤ h.
    for (std::size_t h = 0; h < sys.size(); h++) {
        if (sys.sign(h) != Sign::mu) continue;
        for (std::size_t s = 0; s < nodes.size(); s++) {
            if (nodes[s].index != h) continue;
            std::vector<bool> visited(nodes.size(), false);
            std::vector<std::size_t> stack{s};
            while (!stack.empty()) {
                std::size_t n = stack.back();
                stack.pop_back();
                for (auto t : succ[n]) {
                    if (nodes[t].index > h) continue;
                    if (t == s) return true;
                    if (!visited[t]) {
                        visited[t] = true;
                        stack.push_back(t);
                    }
                }
            }
        }
    }
    return false;
}

struct Transcript
{
    std::string text;
    bool exists_wins_everywhere = true;
};

/**
 * Unfolds every ∀ answer against a fixed ∃ strategy, one line per round,
 * indented by depth. A branch ends when a player is stuck or a position
 * repeats on the current path.
 */
template <FiniteLattice L>
Transcript explore_plays(const EquationSystem<L>& sys, const ExistsStrategy<L>& exists, Position start,
                         bool reduced_answers = false, std::size_t depth_cap = 1000)
{
    const L& lat = sys.lattice();
    Transcript t;
    std::vector<Position> path;
    std::function<void(Position, std::size_t, const std::string&)> visit = [&](Position p, std::size_t depth,
                                                                            const std::string& prefix) {
        std::string indent(2 * depth, ' ');
        std::string line = indent + prefix + format_position(lat, p);
        auto onpath = std::find(path.begin(), path.end(), p);
        if (onpath != path.end()) {
            std::size_t h = 0;
            for (auto it = onpath; it != path.end(); ++it) h = std::max(h, it->index);
            bool win = sys.sign(h) == Sign::nu;
            t.exists_wins_everywhere = t.exists_wins_everywhere && win;
            t.text += line + "\n" + indent + "  " + (win ? "∃" : "∀") + " wins (cycle, highest index " +
                      std::to_string(h + 1) + " is " + sign_symbol(sys.sign(h)) + ")\n";
            return;
        }
        if (depth >= depth_cap) {
            t.exists_wins_everywhere = false;
            t.text += line + "\n" + indent + "  undecided (depth cap reached)\n";
            return;
        }
        auto move = exists(p);
        if (!move) {
            t.exists_wins_everywhere = false;
            t.text += line + "\n" + indent + "  ∀ wins (∃ stuck)\n";
            return;
        }
        t.text += line + " ∃→ " + format_tuple(lat, *move) + "\n";
        auto answers = reduced_answers ? reduced_a_moves(lat, *move) : a_moves(lat, *move);
        if (answers.empty()) {
            t.text += indent + "  ∃ wins (∀ stuck)\n";
            return;
        }
        path.push_back(p);
        for (auto q : answers) visit(q, depth + 1, "∀→ ");
        path.pop_back();
    };
    visit(start, 0, "");
    return t;
}

}

#endif
