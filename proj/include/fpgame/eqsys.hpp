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

#ifndef FPGAME_EQSYS_HPP
#define FPGAME_EQSYS_HPP

#include <algorithm>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "fpgame/lattice.hpp"
#include "fpgame/term.hpp"

namespace fpg {

template <FiniteLattice L>
element_t<L> eval_term(const L& lat, const Term<element_t<L>>& t, const tuple_t<L>& env)
{
    using K = typename Term<element_t<L>>::Kind;
    switch (t.kind()) {
    case K::constant:
        return t.value();
    case K::variable:
        if (t.var() >= env.size()) throw contract_violation("variable x" + std::to_string(t.var() + 1) + " is unbound");
        return env[t.var()];
    case K::join: {
        element_t<L> r = lat.bottom();
        for (const auto& c : t.children()) r = lat.join(r, eval_term(lat, c, env));
        return r;
    }
    case K::meet: {
        element_t<L> r = lat.top();
        for (const auto& c : t.children()) r = lat.meet(r, eval_term(lat, c, env));
        return r;
    }
    case K::apply: {
        if (!t.op()->apply) throw config_error("operator '" + t.op()->name + "' has no interpretation");
        std::vector<element_t<L>> args;
        args.reserve(t.children().size());
        for (const auto& c : t.children()) args.push_back(eval_term(lat, c, env));
        return t.op()->apply(args);
    }
    }
    throw config_error("malformed term");
}

/**
 * An ordered system x_i =η_i f_i(x_0..x_{m-1}) over a finite lattice.
 * Equations are solved innermost first: x_0 is the innermost fixpoint,
 * x_{m-1} the outermost.
 */
template <FiniteLattice L>
class EquationSystem
{
public:
    using lattice_type = L;
    using element = element_t<L>;
    using term_type = Term<element>;

    struct Equation
    {
        std::string name;
        Sign sign;
        term_type rhs;
    };

    EquationSystem(std::shared_ptr<const L> lattice, std::vector<Equation> eqs)
        : lattice_(std::move(lattice)), eqs_(std::move(eqs))
    {
        for (const auto& e : eqs_) {
            for (auto v : e.rhs.variables()) {
                if (v >= eqs_.size()) {
                    throw contract_violation("equation " + e.name + " refers to x" + std::to_string(v + 1) +
                                             " but the system has " + std::to_string(eqs_.size()) + " equations");
                }
            }
        }
    }

    const L& lattice() const { return *lattice_; }
    const std::shared_ptr<const L>& lattice_ptr() const { return lattice_; }
    std::size_t size() const { return eqs_.size(); }
    const std::vector<Equation>& equations() const { return eqs_; }
    const Equation& operator[](std::size_t i) const { return eqs_.at(i); }
    Sign sign(std::size_t i) const { return eqs_.at(i).sign; }

    // f_i(l)
    element apply(std::size_t i, const tuple_t<L>& l) const
    {
        if (l.size() != eqs_.size()) throw usage_error("tuple length does not match the system");
        return eval_term(*lattice_, eqs_.at(i).rhs, l);
    }

    std::string format_tuple(const tuple_t<L>& l) const { return fpg::format_tuple(*lattice_, l); }

private:
    std::shared_ptr<const L> lattice_;
    std::vector<Equation> eqs_;
};

namespace detail {

template <class Elem>
Term<Elem> substitute_term(const Term<Elem>& t, std::size_t i, const Elem& value)
{
    using K = typename Term<Elem>::Kind;
    switch (t.kind()) {
    case K::constant:
        return t;
    case K::variable:
        if (t.var() == i) return Term<Elem>::constant(value);
        return t.var() > i ? Term<Elem>::variable(t.var() - 1) : t;
    default: {
        std::vector<Term<Elem>> cs;
        for (const auto& c : t.children()) cs.push_back(substitute_term(c, i, value));
        if (t.kind() == K::join) return Term<Elem>::join(std::move(cs));
        if (t.kind() == K::meet) return Term<Elem>::meet(std::move(cs));
        return Term<Elem>::apply(t.op(), std::move(cs));
    }
    }
}

}

// E[x_i := l]: drop equation i, replace x_i by the constant l and renumber.
template <FiniteLattice L>
EquationSystem<L> substitute(const EquationSystem<L>& sys, std::size_t i, const element_t<L>& l)
{
    if (i >= sys.size()) throw usage_error("no equation x" + std::to_string(i + 1));
    std::vector<typename EquationSystem<L>::Equation> eqs;
    for (std::size_t k = 0; k < sys.size(); k++) {
        if (k == i) continue;
        eqs.push_back({sys[k].name, sys[k].sign, detail::substitute_term(sys[k].rhs, i, l)});
    }
    return EquationSystem<L>(sys.lattice_ptr(), std::move(eqs));
}

/**
 * Solution by the recursive definition: x_{k-1} is the η-fixpoint of the
 * function obtained by first solving x_0..x_{k-2} parametrically. Partial
 * solutions are memoized on (k, fixed tail).
 */
template <FiniteLattice L>
class KleeneSolver
{
public:
    using element = element_t<L>;
    using tuple = tuple_t<L>;

    explicit KleeneSolver(const EquationSystem<L>& sys) : sys_(sys) { }

    tuple solve() { return prefix(sys_.size(), {}); }

    // Solution of equations 0..k-1 with x_k..x_{m-1} fixed to tail.
    tuple prefix(std::size_t k, const tuple& tail)
    {
        if (k == 0) return {};
        auto key = std::make_pair(k, tail);
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        auto g = [&](const element& x) { return partial(k - 1, x, tail); };
        element u = fix(g, sys_.sign(k - 1));
        tuple inner_tail{u};
        inner_tail.insert(inner_tail.end(), tail.begin(), tail.end());
        tuple r = prefix(k - 1, inner_tail);
        r.push_back(u);
        memo_.emplace(std::move(key), r);
        return r;
    }

    // f_{i,l}(x) = f_i(sol(E[x_{i+1..} := tail][x_i := x]), x, tail)
    element partial(std::size_t i, const element& x, const tuple& tail)
    {
        tuple inner_tail{x};
        inner_tail.insert(inner_tail.end(), tail.begin(), tail.end());
        tuple env = prefix(i, inner_tail);
        env.insert(env.end(), inner_tail.begin(), inner_tail.end());
        evaluations_++;
        return sys_.apply(i, env);
    }

    // Kleene chain of g from ⊥ (μ) or ⊤ (ν) up to and including its limit.
    template <class G>
    std::vector<element> chain(G&& g, Sign s)
    {
        const L& lat = sys_.lattice();
        std::vector<element> c{s == Sign::mu ? lat.bottom() : lat.top()};
        for (;;) {
            element n = g(c.back());
            if (n == c.back()) return c;
            if (c.size() > lat.height()) throw config_error("fixpoint iteration did not stabilize; is every operator monotone?");
            c.push_back(std::move(n));
        }
    }

    template <class G>
    element fix(G&& g, Sign s)
    {
        return chain(std::forward<G>(g), s).back();
    }

    std::size_t evaluations() const { return evaluations_; }

private:
    const EquationSystem<L>& sys_;
    std::map<std::pair<std::size_t, tuple>, tuple> memo_;
    std::size_t evaluations_ = 0;
};

template <FiniteLattice L>
tuple_t<L> solve_kleene(const EquationSystem<L>& sys)
{
    return KleeneSolver<L>(sys).solve();
}

// u = f(u)
template <FiniteLattice L>
bool is_pre_solution(const EquationSystem<L>& sys, const tuple_t<L>& u)
{
    if (u.size() != sys.size()) return false;
    for (std::size_t i = 0; i < sys.size(); i++) {
        if (sys.apply(i, u) != u[i]) return false;
    }
    return true;
}

namespace detail {

template <FiniteLattice L>
bool check_approximant(const EquationSystem<L>& sys, const tuple_t<L>& l, Sign approximated)
{
    if (l.size() != sys.size()) return false;
    KleeneSolver<L> solver(sys);
    for (std::size_t i = 0; i < sys.size(); i++) {
        tuple_t<L> tail(l.begin() + static_cast<std::ptrdiff_t>(i + 1), l.end());
        auto g = [&](const element_t<L>& x) { return solver.partial(i, x, tail); };
        auto c = solver.chain(g, sys.sign(i));
        if (sys.sign(i) == approximated) {
            if (std::find(c.begin(), c.end(), l[i]) == c.end()) return false;
        } else if (c.back() != l[i]) {
            return false;
        }
    }
    return true;
}

}

/**
 * l is a μ-approximant when every ν-component is the exact fixpoint of
 * f_{i,l} and every μ-component is some Kleene iterate of f_{i,l} from ⊥.
 */
template <FiniteLattice L>
bool check_mu_approximant(const EquationSystem<L>& sys, const tuple_t<L>& l)
{
    return detail::check_approximant(sys, l, Sign::mu);
}

// Dual: ν-components are iterates from ⊤, μ-components exact.
template <FiniteLattice L>
bool check_nu_approximant(const EquationSystem<L>& sys, const tuple_t<L>& l)
{
    return detail::check_approximant(sys, l, Sign::nu);
}

}

#endif
