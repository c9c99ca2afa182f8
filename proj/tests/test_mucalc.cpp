#include <catch_amalgamated.hpp>

#include "fpgame/mucalc.hpp"
#include "support.hpp"

using namespace fpg;
using mu::Formula;

namespace {

mu::Kripke fig1() { return mu::load_kripke(test::data("fig1.kts")); }

std::string moves_text(const mu::System& sys, const SymbolicMoves& moves, std::size_t b, std::size_t i)
{
    const auto& lat = sys.lattice();
    return moves.at(b, i).str([&](std::size_t k) { return lat.format(lat.basis()[k]); });
}

}

TEST_CASE("formula parsing")
{
    auto phi = mu::parse_formula("nu x2. ((mu x1. (p \\/ <>x1)) /\\ []x2)");
    using F = Formula;
    auto expected = F::fix(Sign::nu, "x2",
                           F::conj(F::fix(Sign::mu, "x1", F::disj(F::prop("p"), F::dia(F::var("x1")))),
                                   F::box(F::var("x2"))));
    CHECK(phi == expected);
    CHECK(mu::parse_formula("tt") == F::truth());
    CHECK(mu::to_string(phi) == "nu x2. (mu x1. p \\/ <>x1) /\\ []x2");
    CHECK(mu::parse_formula(mu::to_string(phi)) == phi);

    SECTION("precedence")
    {
        CHECK(mu::parse_formula("p \\/ q /\\ <>p") == F::disj(F::prop("p"), F::conj(F::prop("q"), F::dia(F::prop("p")))));
        CHECK(mu::parse_formula("[]p /\\ q") == F::conj(F::box(F::prop("p")), F::prop("q")));
        CHECK(mu::parse_formula("mu x. p \\/ x") == F::fix(Sign::mu, "x", F::disj(F::prop("p"), F::var("x"))));
        CHECK(mu::parse_formula("<>mu x. x") == F::dia(F::fix(Sign::mu, "x", F::var("x"))));
    }

    SECTION("bound variables are renamed apart")
    {
        auto f = mu::parse_formula("(mu x. <>x) /\\ (nu x. []x)");
        CHECK(mu::to_string(f) == "(mu x. <>x) /\\ (nu x'. []x')");
        auto g = mu::parse_formula("mu x. x /\\ mu x. x");
        CHECK(mu::to_string(g) == "mu x. x /\\ (mu x'. x')");
        // a free proposition named like a binder keeps its name
        auto h = mu::parse_formula("x /\\ mu x. <>x");
        CHECK(mu::to_string(h) == "x /\\ (mu x'. <>x')");
        CHECK(h.children[0] == F::prop("x"));
    }

    SECTION("errors carry positions")
    {
        try {
            mu::parse_formula("p /\\\n  (q \\/ )");
            FAIL("no error");
        } catch (const parse_error& e) {
            CHECK(e.line() == 2);
            CHECK(e.column() == 9);
        }
        CHECK_THROWS_AS(mu::parse_formula("p q"), parse_error);
        CHECK_THROWS_AS(mu::parse_formula("mu . p"), parse_error);
        CHECK_THROWS_AS(mu::parse_formula("downset(a)"), parse_error);
        CHECK_THROWS_AS(mu::parse_formula(""), parse_error);
    }
}

TEST_CASE("Kripke parsing")
{
    auto k = fig1();
    CHECK(k.states == std::vector<std::string>{"a", "b"});
    CHECK(k.succ == std::vector<std::vector<std::size_t>>{{0, 1}, {1}});
    CHECK(k.lattice->format(k.label("p")) == "{b}");
    CHECK(k.label("q").none());
    CHECK_THROWS_AS(mu::parse_kripke("edges: a->b\n"), parse_error);
    CHECK_THROWS_AS(mu::parse_kripke("states: a\nedges: a->\n"), parse_error);
    CHECK_THROWS_AS(mu::parse_kripke("states: a\nedges: a->b\n"), usage_error);
    CHECK_THROWS_AS(mu::parse_kripke("states: a\nlabel p: c\n"), usage_error);
    try {
        mu::parse_kripke("states: a\n\nfoo\n");
        FAIL("no error");
    } catch (const parse_error& e) {
        CHECK(e.line() == 3);
    }
}

TEST_CASE("equation systems of formulas")
{
    auto k = fig1();
    auto phi = mu::parse_formula("nu x2. ((mu x1. (p \\/ <>x1)) /\\ []x2)");
    auto sys = mu::to_equation_system(phi, k);
    REQUIRE(sys.size() == 2);
    CHECK(sys[0].name == "x1");
    CHECK(sys[0].sign == Sign::mu);
    CHECK(sys[1].name == "x2");
    CHECK(sys[1].sign == Sign::nu);
    auto from_file = mu::load_equation_file(test::data("fig1.eqs")).system;
    CHECK(solve_kleene(sys) == solve_kleene(from_file));
    auto moves = mu::symbolic_moves_mu(sys);
    CHECK(moves_text(sys, moves, 0, 0) == "[{a},1] ∨ [{b},1]");
    CHECK(moves_text(sys, moves, 0, 1) == "[{a},1] ∧ [{a},2] ∧ [{b},2]");

    SECTION("the swapped formula")
    {
        auto phi2 = mu::parse_formula("nu x2. ([]x2 /\\ mu x1. ((p /\\ <>x2) \\/ <>x1))");
        auto sys2 = mu::to_equation_system(phi2, k);
        CHECK(sys2[0].name == "x1");
        CHECK(sys2[1].name == "x2");
        auto u = solve_kleene(sys2);
        CHECK(u[0] == k.lattice->top());
        CHECK(u[1] == k.lattice->top());
    }

    SECTION("trivial and non-fixpoint formulas")
    {
        auto s = mu::to_equation_system(mu::parse_formula("mu x. tt"), k);
        REQUIRE(s.size() == 1);
        CHECK(solve_kleene(s)[0] == k.lattice->top());
        auto w = mu::to_equation_system(mu::parse_formula("<>p /\\ mu x. x"), k);
        REQUIRE(w.size() == 2);
        CHECK(w[1].name == "x'");
        CHECK(w[1].sign == Sign::mu);
    }

    SECTION("free variables are rejected")
    {
        mu::ParseOptions opt;
        opt.free_variables = {"y"};
        CHECK_THROWS_AS(mu::to_equation_system(mu::parse_formula("<>y", opt), k), contract_violation);
    }

    SECTION("box without successors")
    {
        auto dead = mu::parse_kripke("states: a\n");
        auto s = mu::to_equation_system(mu::parse_formula("nu x. []ff"), dead);
        CHECK(moves_text(s, mu::symbolic_moves_mu(s), 0, 0) == "true");
    }
}

TEST_CASE("formulas of equation systems")
{
    auto k = fig1();
    auto sys = mu::load_equation_file(test::data("fig1.eqs")).system;
    auto phis = mu::from_equation_system(sys);
    REQUIRE(phis.size() == 2);
    CHECK(mu::to_string(phis[0]) == "mu x1. p \\/ <>x1");
    CHECK(mu::direct_semantics(phis[1], k) == k.lattice->top());
    CHECK(mu::from_equation_system(mu::System(k.lattice, {})).empty());
}

TEST_CASE("direct semantics")
{
    auto k = fig1();
    const auto& lat = *k.lattice;
    CHECK(mu::direct_semantics(mu::parse_formula("nu x2. ((mu x1. (p \\/ <>x1)) /\\ []x2)"), k) == lat.top());
    CHECK(mu::direct_semantics(mu::parse_formula("<>tt"), k) == lat.top());
    CHECK(mu::direct_semantics(mu::parse_formula("ff"), k) == lat.bottom());
    CHECK(mu::direct_semantics(mu::parse_formula("mu x. p /\\ <>x"), k) == lat.bottom());
    CHECK_THROWS_AS(mu::direct_semantics(Formula::var("y"), k), contract_violation);
}

TEST_CASE("model checking")
{
    auto k = fig1();
    CHECK(mu::model_check(k, mu::parse_formula("nu x2. ((mu x1. (p \\/ <>x1)) /\\ []x2)"), "a").holds);
    CHECK(mu::model_check(k, mu::parse_formula("nu x2. ([]x2 /\\ mu x1. ((p /\\ <>x2) \\/ <>x1))"), "a").holds);
    CHECK_FALSE(mu::model_check(k, mu::parse_formula("mu x. p /\\ <>x"), "a").holds);
    CHECK_THROWS_AS(mu::model_check(k, mu::parse_formula("tt"), "c"), usage_error);
}

TEST_CASE("round trip through equation systems")
{
    std::mt19937 rng(41);
    for (int trial = 0; trial < 200; trial++) {
        auto k = test::random_kripke(rng, test::uniform(rng, 1, 4));
        auto phi = mu::parse_formula(mu::to_string(test::random_formula(rng, 4)));
        INFO(mu::to_string(phi));
        auto sem = mu::direct_semantics(phi, k);
        auto sys = mu::to_equation_system(phi, k);
        CHECK(solve_kleene(sys).back() == sem);
        CHECK(mu::direct_semantics(mu::from_equation_system(sys).back(), k) == sem);
        auto moves = mu::symbolic_moves_mu(sys);
        auto r = solve_measure(sys, moves);
        for (std::size_t s = 0; s < k.states.size(); s++) {
            CHECK(mu::model_check(k, phi, k.states[s]).holds == sem.test(s));
            CHECK(!r.at({s, sys.size() - 1}).is_star() == sem.test(s));
        }
    }
}

TEST_CASE("symbolic moves denote the existential moves")
{
    std::mt19937 rng(42);
    for (int trial = 0; trial < 60; trial++) {
        auto k = test::random_kripke(rng, test::uniform(rng, 1, 2));
        auto phi = mu::parse_formula(mu::to_string(test::random_formula(rng, 3)));
        auto sys = mu::to_equation_system(phi, k);
        if (sys.size() > 3) continue;
        auto moves = mu::symbolic_moves_mu(sys);
        for (std::size_t b = 0; b < k.states.size(); b++) {
            for (std::size_t i = 0; i < sys.size(); i++) {
                CHECK(formula_semantics(sys.lattice(), moves.at(b, i), sys.size()) == e_moves(sys, {b, i}));
            }
        }
    }
}
