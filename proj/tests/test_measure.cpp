#include <catch_amalgamated.hpp>

#include "fpgame/measure.hpp"
#include "fpgame/mucalc.hpp"
#include "support.hpp"

using namespace fpg;

namespace {

mu::LoadedSystem load(const std::string& name) { return mu::load_equation_file(test::data(name)); }

template <class L>
std::string show(const EquationSystem<L>& sys, const MoveFormula& phi)
{
    return phi.str([&](std::size_t b) { return sys.lattice().format(sys.lattice().basis()[b]); });
}

template <class L>
std::vector<Selection<L>> least_selections(const EquationSystem<L>& sys)
{
    std::vector<Selection<L>> sels;
    for (std::size_t i = 0; i < sys.size(); i++) sels.push_back(least_selection(sys, i));
    return sels;
}

// The properties every least measure must have, checked against Kleene solving.
template <class L>
void check_measure(const EquationSystem<L>& sys)
{
    const L& lat = sys.lattice();
    auto moves = derive_symbolic_moves(sys);
    auto u = solve_kleene(sys);
    MeasureStats st;
    auto r = solve_measure(sys, moves, {}, &st);
    auto lifo = solve_measure(sys, moves, {Schedule::lifo});
    CHECK(r == lifo);
    CHECK(st.edges <= lat.basis().size() * sys.size() * st.max_formula_size);
    for (const auto& [p, v] : r.entries()) {
        CHECK(!v.is_star() == lat.leq(lat.basis()[p.basis], u[p.index]));
        if (!v.is_star()) {
            for (std::size_t j = 0; j < sys.size(); j++) {
                if (sys.sign(j) == Sign::nu) CHECK(v[j] == 0);
            }
        }
        CHECK(phi_step(MeasureShape::of(sys), moves, r, p) == v);
        for (const auto& [q, w] : r.entries()) {
            if (q.index == p.index && lat.leq(lat.basis()[p.basis], lat.basis()[q.basis])) {
                CHECK(compare_from(v, w) <= 0);
            }
        }
    }
    CHECK(measure_to_solution(sys, r) == u);
    CHECK(is_progress_measure(sys, r));
    CHECK(solve_measure_raw(sys) == r);
    CHECK(solve_measure_selection(sys, least_selections(sys)) == r);
    for (std::size_t b = 0; b < lat.basis().size(); b++) {
        for (std::size_t i = 0; i < sys.size(); i++) {
            auto local = solve_measure_local(sys, moves, {b, i});
            for (const auto& [p, v] : local.entries()) CHECK(r.at(p) == v);
            auto sem = formula_semantics(lat, moves.at(b, i), sys.size());
            CHECK(sem == e_moves(sys, {b, i}));
        }
    }
}

}

TEST_CASE("running example: symbolic moves")
{
    auto [k, sys] = load("fig1.eqs");
    auto moves = derive_symbolic_moves(sys);
    const std::size_t a = 0, b = 1;
    CHECK(show(sys, moves.at(a, 0)) == "[{a},1] ∨ [{b},1]");
    CHECK(moves.at(b, 0).is_true());
    CHECK(show(sys, moves.at(a, 1)) == "[{a},1] ∧ [{a},2] ∧ [{b},2]");
    CHECK(show(sys, moves.at(b, 1)) == "[{b},1] ∧ [{b},2]");
}

TEST_CASE("running example: least measure")
{
    auto [k, sys] = load("fig1.eqs");
    auto moves = derive_symbolic_moves(sys);
    auto r = solve_measure(sys, moves);
    CHECK(r.at({0, 0}) == LiftedVector({1, 0}));
    CHECK(r.at({0, 1}) == LiftedVector({0, 0}));
    CHECK(r.at({1, 0}) == LiftedVector({0, 0}));
    CHECK(r.at({1, 1}) == LiftedVector({0, 0}));
    CHECK(dump_measure(sys, r) == "{a}\t1\t(1,0)\n{a}\t2\t(0,0)\n{b}\t1\t(0,0)\n{b}\t2\t(0,0)\n");
    check_measure(sys);
}

TEST_CASE("running example: least selection")
{
    auto [k, sys] = load("fig1.eqs");
    const auto& lat = sys.lattice();
    auto s1 = least_selection(sys, 0);
    auto s2 = least_selection(sys, 1);
    auto names = [&](const std::vector<tuple_t<PowersetLattice>>& ts) {
        std::vector<std::string> r;
        for (const auto& t : ts) r.push_back(format_tuple(lat, t));
        std::sort(r.begin(), r.end());
        return r;
    };
    CHECK(names(s1[0]) == std::vector<std::string>{"({a}, ∅)", "({b}, ∅)"});
    CHECK(names(s1[1]) == std::vector<std::string>{"(∅, ∅)"});
    CHECK(names(s2[0]) == std::vector<std::string>{"({a}, {a,b})"});
    CHECK(names(s2[1]) == std::vector<std::string>{"({b}, {b})"});
}

TEST_CASE("formula for an upward-closed move set")
{
    PowersetLattice lat({"a", "b"});
    const auto b = lat.parse("{b}");
    std::vector<tuple_t<PowersetLattice>> up;
    for (const auto& l : all_tuples(lat, 2)) {
        if (lat.leq(b, l[0])) up.push_back(l);
    }
    CHECK(formula_for_upset(lat, up, 2) == MoveFormula::atom(1, 0));
    CHECK(formula_for_upset(lat, all_tuples(lat, 2), 2).is_true());
    CHECK(formula_for_upset(lat, {}, 2).is_false());
    CHECK_THROWS_AS(formula_for_upset(lat, {{b, lat.bottom()}}, 2), contract_violation);
    CHECK(formula_semantics(lat, formula_for_upset(lat, up, 2), 2) == up);
}

TEST_CASE("formula constructors simplify")
{
    auto x = MoveFormula::atom(0, 0);
    auto y = MoveFormula::atom(1, 0);
    CHECK(MoveFormula::any_of({x, MoveFormula::truth()}).is_true());
    CHECK(MoveFormula::all_of({x, MoveFormula::falsity()}).is_false());
    CHECK(MoveFormula::all_of({y, x, x}) == MoveFormula::all_of({x, y}));
    CHECK(MoveFormula::any_of({x}) == x);
    CHECK(MoveFormula::all_of({MoveFormula::all_of({x, y}), x}).children().size() == 2);
    CHECK(MoveFormula::all_of({x, y}).size(4) == 3);
    CHECK(MoveFormula::top_of(1).size(4) == 4);
}

TEST_CASE("compose_moves substitutes inner formulas")
{
    auto outer = MoveFormula::any_of({MoveFormula::atom(0, 0), MoveFormula::atom(1, 0)});
    auto inner = [](std::size_t b, std::size_t) {
        return b == 0 ? MoveFormula::falsity() : MoveFormula::atom(1, 1);
    };
    CHECK(compose_moves(outer, inner) == MoveFormula::atom(1, 1));
    CHECK_THROWS_AS(compose_moves(outer, {}), config_error);
}

TEST_CASE("empty disjunction is star and empty conjunction is zero")
{
    MeasureShape shape{2, {Sign::mu, Sign::nu}, 2};
    auto r = ProgressMeasure::zero(2, 2);
    auto lookup = [&](Position q) -> const LiftedVector& { return r.at(q); };
    CHECK(evaluate_moves(MoveFormula::falsity(), 0, shape, lookup).is_star());
    CHECK(evaluate_moves(MoveFormula::truth(), 0, shape, lookup) == LiftedVector::zero(2));
    CHECK(evaluate_moves(MoveFormula::atom(1, 1), 0, shape, lookup) == LiftedVector({1, 0}));
    r.set({1, 1}, LiftedVector::star());
    CHECK(evaluate_moves(MoveFormula::all_of({MoveFormula::atom(0, 0), MoveFormula::atom(1, 1)}), 0, shape, lookup)
              .is_star());
}

TEST_CASE("the running example measure is a progress measure and a smaller one is not")
{
    auto [k, sys] = load("fig1.eqs");
    auto r = solve_measure(sys, derive_symbolic_moves(sys));
    CHECK(is_progress_measure(sys, r));
    auto smaller = r;
    smaller.set({0, 0}, LiftedVector::zero(2));
    CHECK_FALSE(is_progress_measure(sys, smaller));
}

TEST_CASE("measures on random powerset systems")
{
    std::mt19937 rng(21);
    for (int trial = 0; trial < 60; trial++) {
        auto inst = test::random_powerset_system(rng, 3, 3, 3);
        check_measure(inst.system);
    }
}

TEST_CASE("measures on random downset systems")
{
    std::mt19937 rng(22);
    for (int trial = 0; trial < 60; trial++) {
        auto sys = test::random_downset_system(rng, 3, 3, 3);
        check_measure(sys);
    }
}

TEST_CASE("local mode respects the position cap")
{
    auto [k, sys] = load("fig1.eqs");
    auto moves = derive_symbolic_moves(sys);
    MeasureOptions opt;
    opt.position_cap = 2;
    CHECK_THROWS_AS(solve_measure_local(sys, moves, {0, 1}, opt), resource_error);
}
