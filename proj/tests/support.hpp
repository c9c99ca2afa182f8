#ifndef FPGAME_TEST_SUPPORT_HPP
#define FPGAME_TEST_SUPPORT_HPP

#include <fstream>
#include <random>
#include <sstream>
#include <set>
#include <string>
#include <vector>

#include "fpgame/downset.hpp"
#include "fpgame/latticed.hpp"
#include "fpgame/mucalc.hpp"

namespace test {

inline std::string slurp(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

inline std::string data(const std::string& name) { return std::string(FPGAME_TEST_DATA) + "/" + name; }

// Random partial order: a random DAG on a fixed topological order.
inline fpg::Poset random_poset(std::mt19937& rng, std::size_t n)
{
    std::vector<std::string> names;
    for (std::size_t k = 0; k < n; k++) names.push_back("p" + std::to_string(k));
    std::vector<std::pair<std::string, std::string>> below;
    std::bernoulli_distribution edge(0.35);
    for (std::size_t i = 0; i < n; i++) {
        for (std::size_t j = i + 1; j < n; j++) {
            if (edge(rng)) below.emplace_back(names[i], names[j]);
        }
    }
    return fpg::Poset(names, below);
}

template <class T>
const T& pick(std::mt19937& rng, const std::vector<T>& xs)
{
    return xs[std::uniform_int_distribution<std::size_t>(0, xs.size() - 1)(rng)];
}

inline std::size_t uniform(std::mt19937& rng, std::size_t lo, std::size_t hi)
{
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline fpg::mu::Kripke random_kripke(std::mt19937& rng, std::size_t n)
{
    std::vector<std::string> states;
    for (std::size_t k = 0; k < n; k++) states.push_back("s" + std::to_string(k));
    std::vector<std::pair<std::string, std::string>> edges;
    std::bernoulli_distribution coin(0.4);
    for (const auto& a : states) {
        for (const auto& b : states) {
            if (coin(rng)) edges.emplace_back(a, b);
        }
    }
    std::map<std::string, std::vector<std::string>> labels{{"p", {}}, {"q", {}}};
    for (auto& [p, members] : labels) {
        for (const auto& s : states) {
            if (coin(rng)) members.push_back(s);
        }
    }
    return fpg::mu::make_kripke(states, edges, labels);
}

// Right-hand side over the powerset of a Kripke structure.
inline fpg::mu::MuTerm random_mu_term(std::mt19937& rng, const fpg::mu::Kripke& k, const fpg::mu::Operators& ops,
                                      std::size_t m, std::size_t depth)
{
    using T = fpg::mu::MuTerm;
    std::size_t choice = depth <= 1 ? uniform(rng, 0, 2) : uniform(rng, 0, 6);
    switch (choice) {
    case 0:
    case 1:
        return T::variable(uniform(rng, 0, m - 1));
    case 2: {
        fpg::Bits c(k.states.size());
        for (std::size_t s = 0; s < c.size(); s++) c[s] = uniform(rng, 0, 1);
        return T::constant(c);
    }
    case 3:
        return T::join({random_mu_term(rng, k, ops, m, depth - 1), random_mu_term(rng, k, ops, m, depth - 1)});
    case 4:
        return T::meet({random_mu_term(rng, k, ops, m, depth - 1), random_mu_term(rng, k, ops, m, depth - 1)});
    case 5:
        return T::apply(ops.dia, {random_mu_term(rng, k, ops, m, depth - 1)});
    default:
        return T::apply(ops.box, {random_mu_term(rng, k, ops, m, depth - 1)});
    }
}

struct PowersetInstance
{
    fpg::mu::Kripke structure;
    fpg::mu::System system;
};

inline PowersetInstance random_powerset_system(std::mt19937& rng, std::size_t max_ground, std::size_t max_m,
                                               std::size_t max_depth)
{
    auto k = random_kripke(rng, uniform(rng, 1, max_ground));
    fpg::mu::Operators ops(k);
    std::size_t m = uniform(rng, 1, max_m);
    std::vector<fpg::mu::System::Equation> eqs;
    for (std::size_t i = 0; i < m; i++) {
        eqs.push_back({"x" + std::to_string(i + 1), uniform(rng, 0, 1) ? fpg::Sign::mu : fpg::Sign::nu,
                       random_mu_term(rng, k, ops, m, uniform(rng, 1, max_depth))});
    }
    return {k, fpg::mu::System(k.lattice, std::move(eqs))};
}

using DTerm = fpg::Term<fpg::Bits>;
using DSystem = fpg::EquationSystem<fpg::DownsetLattice>;

// c ⇒ x on a downset lattice, with its move rule ∧{[b', 0] | b' ⊑ c, b' ⊑ b}.
inline fpg::OperatorPtr<fpg::Bits> residual_operator(std::shared_ptr<const fpg::DownsetLattice> lat, fpg::Bits c)
{
    auto op = std::make_shared<fpg::Operator<fpg::Bits>>();
    op->name = "implies " + lat->format(c);
    op->apply = [lat, c](const std::vector<fpg::Bits>& a) { return lat->implies(c, a[0]); };
    op->moves = [lat, c](std::size_t b) {
        std::vector<fpg::MoveFormula> cs;
        for (std::size_t k = 0; k < lat->basis().size(); k++) {
            const auto& bk = lat->basis()[k];
            if (lat->leq(bk, c) && lat->leq(bk, lat->basis()[b])) cs.push_back(fpg::MoveFormula::atom(k, 0));
        }
        return fpg::MoveFormula::all_of(std::move(cs));
    };
    return op;
}

// Monotone step function: lo below the threshold t, hi from t upwards. No move rule.
inline fpg::OperatorPtr<fpg::Bits> threshold_operator(std::shared_ptr<const fpg::DownsetLattice> lat, fpg::Bits t,
                                                      fpg::Bits lo, fpg::Bits hi)
{
    auto op = std::make_shared<fpg::Operator<fpg::Bits>>();
    op->name = "threshold";
    op->apply = [lat, t, lo, hi](const std::vector<fpg::Bits>& a) { return lat->leq(t, a[0]) ? hi : lo; };
    return op;
}

inline DTerm random_downset_term(std::mt19937& rng, const std::shared_ptr<const fpg::DownsetLattice>& lat,
                                 std::size_t m, std::size_t depth)
{
    const auto elems = lat->elements(1024);
    std::size_t choice = depth <= 1 ? uniform(rng, 0, 2) : uniform(rng, 0, 6);
    switch (choice) {
    case 0:
    case 1:
        return DTerm::variable(uniform(rng, 0, m - 1));
    case 2:
        return DTerm::constant(pick(rng, elems));
    case 3:
        return DTerm::join({random_downset_term(rng, lat, m, depth - 1), random_downset_term(rng, lat, m, depth - 1)});
    case 4:
        return DTerm::meet({random_downset_term(rng, lat, m, depth - 1), random_downset_term(rng, lat, m, depth - 1)});
    case 5:
        return DTerm::apply(residual_operator(lat, pick(rng, elems)), {random_downset_term(rng, lat, m, depth - 1)});
    default: {
        auto lo = pick(rng, elems);
        auto hi = lat->join(lo, pick(rng, elems));
        return DTerm::apply(threshold_operator(lat, pick(rng, elems), lo, hi),
                            {random_downset_term(rng, lat, m, depth - 1)});
    }
    }
}

inline DSystem random_downset_system(std::mt19937& rng, std::size_t max_poset, std::size_t max_m, std::size_t max_depth)
{
    auto lat = std::make_shared<const fpg::DownsetLattice>(random_poset(rng, uniform(rng, 1, max_poset)));
    std::size_t m = uniform(rng, 1, max_m);
    std::vector<DSystem::Equation> eqs;
    for (std::size_t i = 0; i < m; i++) {
        eqs.push_back({"x" + std::to_string(i + 1), uniform(rng, 0, 1) ? fpg::Sign::mu : fpg::Sign::nu,
                       random_downset_term(rng, lat, m, uniform(rng, 1, max_depth))});
    }
    return DSystem(lat, std::move(eqs));
}

// Closed formula over propositions p, q with at most the given depth.
inline fpg::mu::Formula random_formula(std::mt19937& rng, std::size_t depth, std::vector<std::string>& scope,
                                       std::size_t& fresh)
{
    using F = fpg::mu::Formula;
    std::size_t choice = depth <= 1 ? uniform(rng, 0, 3) : uniform(rng, 0, 9);
    switch (choice) {
    case 0:
        return uniform(rng, 0, 1) ? F::truth() : F::falsity();
    case 1:
        return F::prop(uniform(rng, 0, 1) ? "p" : "q");
    case 2:
    case 3:
        if (scope.empty()) return F::prop("p");
        return F::var(pick(rng, scope));
    case 4:
        return F::conj(random_formula(rng, depth - 1, scope, fresh), random_formula(rng, depth - 1, scope, fresh));
    case 5:
        return F::disj(random_formula(rng, depth - 1, scope, fresh), random_formula(rng, depth - 1, scope, fresh));
    case 6:
        return F::box(random_formula(rng, depth - 1, scope, fresh));
    case 7:
        return F::dia(random_formula(rng, depth - 1, scope, fresh));
    default: {
        std::string x = "x" + std::to_string(++fresh);
        scope.push_back(x);
        F body = random_formula(rng, depth - 1, scope, fresh);
        scope.pop_back();
        return F::fix(uniform(rng, 0, 1) ? fpg::Sign::mu : fpg::Sign::nu, x, std::move(body));
    }
    }
}

inline fpg::mu::Formula random_formula(std::mt19937& rng, std::size_t depth)
{
    std::vector<std::string> scope;
    std::size_t fresh = 0;
    return random_formula(rng, depth, scope, fresh);
}

// Every partial order on n labelled elements p0..p(n-1).
inline std::vector<fpg::Poset> all_posets(std::size_t n)
{
    std::vector<std::string> names;
    for (std::size_t k = 0; k < n; k++) names.push_back("p" + std::to_string(k));
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < n; i++) {
        for (std::size_t j = 0; j < n; j++) {
            if (i != j) pairs.emplace_back(i, j);
        }
    }
    std::set<std::vector<bool>> seen;
    std::vector<fpg::Poset> r;
    for (unsigned long mask = 0; mask < (1ul << pairs.size()); mask++) {
        std::vector<std::pair<std::string, std::string>> below;
        for (std::size_t k = 0; k < pairs.size(); k++) {
            if (mask >> k & 1) below.emplace_back(names[pairs[k].first], names[pairs[k].second]);
        }
        try {
            fpg::Poset p(names, below);
            std::vector<bool> key;
            for (std::size_t i = 0; i < n; i++) {
                for (std::size_t j = 0; j < n; j++) key.push_back(p.leq(i, j));
            }
            if (seen.insert(key).second) r.push_back(std::move(p));
        } catch (const fpg::usage_error&) {
        }
    }
    return r;
}

// Random weights and labels p, q over a random truth lattice.
inline std::shared_ptr<const fpg::mv::MVTS> random_mvts(std::mt19937& rng, std::size_t states, std::size_t products)
{
    std::vector<std::string> names;
    for (std::size_t k = 0; k < states; k++) names.push_back("s" + std::to_string(k));
    auto m = fpg::mv::make_mvts(names, fpg::mv::build_upgrade_lattice(random_poset(rng, products)));
    const auto elems = m.truth->elements(1024);
    std::bernoulli_distribution coin(0.5);
    for (auto& row : m.weight) {
        for (auto& w : row) w = coin(rng) ? pick(rng, elems) : m.truth->bottom();
    }
    for (std::string p : {"p", "q"}) {
        auto v = m.valuations->bottom();
        for (auto& x : v) x = pick(rng, elems);
        m.labels[p] = v;
    }
    return std::make_shared<const fpg::mv::MVTS>(std::move(m));
}

// Closed latticed formula over propositions p, q and constants generated by the given products.
inline fpg::mu::Formula random_mv_formula(std::mt19937& rng, std::size_t depth, const std::vector<std::string>& products,
                                          std::vector<std::string>& scope, std::size_t& fresh)
{
    using F = fpg::mu::Formula;
    auto gens = [&] {
        std::vector<std::string> g;
        for (const auto& p : products) {
            if (uniform(rng, 0, 2) == 0) g.push_back(p);
        }
        return g;
    };
    std::size_t choice = depth <= 1 ? uniform(rng, 0, 4) : uniform(rng, 0, 11);
    auto sub = [&] { return random_mv_formula(rng, depth - 1, products, scope, fresh); };
    switch (choice) {
    case 0:
        return uniform(rng, 0, 1) ? F::truth() : F::falsity();
    case 1:
        return F::prop(uniform(rng, 0, 1) ? "p" : "q");
    case 2:
    case 3:
        if (scope.empty()) return F::prop("p");
        return F::var(pick(rng, scope));
    case 4:
        return F::constant(gens());
    case 5: {
        F a = sub();
        return F::conj(std::move(a), sub());
    }
    case 6: {
        F a = sub();
        return F::disj(std::move(a), sub());
    }
    case 7:
        return F::box(sub());
    case 8:
        return F::dia(sub());
    case 9:
        return F::implies(gens(), sub());
    default: {
        std::string x = "x" + std::to_string(++fresh);
        scope.push_back(x);
        F body = sub();
        scope.pop_back();
        return F::fix(uniform(rng, 0, 1) ? fpg::Sign::mu : fpg::Sign::nu, x, std::move(body));
    }
    }
}

inline fpg::mu::Formula random_mv_formula(std::mt19937& rng, std::size_t depth, const std::vector<std::string>& products)
{
    std::vector<std::string> scope;
    std::size_t fresh = 0;
    return random_mv_formula(rng, depth, products, scope, fresh);
}

}

#endif
