#include <catch_amalgamated.hpp>

#include "fpgame/latticed.hpp"
#include "support.hpp"

using namespace fpg;

namespace {

std::shared_ptr<const mv::MVTS> upgrade() { return std::make_shared<const mv::MVTS>(mv::load_mvts(test::data("upgrade.mvts"))); }

}

TEST_CASE("residuation")
{
    auto boolean = mv::build_upgrade_lattice(Poset::antichain({"t"}));
    CHECK(boolean->implies(boolean->top(), boolean->bottom()) == boolean->bottom());
    CHECK(boolean->implies(boolean->bottom(), boolean->bottom()) == boolean->top());

    std::size_t lattices = 0;
    for (std::size_t n = 1; n <= 4; n++) {
        for (const auto& poset : test::all_posets(n)) {
            DownsetLattice lat(poset);
            lattices++;
            const auto xs = lat.elements(64);
            bool galois = true, splitting = true, extremes = true;
            for (const auto& l : xs) {
                extremes = extremes && lat.implies(lat.top(), lat.bottom()) == lat.bottom();
                for (const auto& m : xs) {
                    auto r = lat.implies(l, m);
                    if (lat.leq(l, m)) extremes = extremes && r == lat.top();
                    for (const auto& x : xs) galois = galois && (lat.leq(lat.meet(l, x), m) == lat.leq(x, r));
                }
            }
            for (const auto& b : lat.basis()) {
                for (const auto& u : xs) {
                    for (const auto& v : xs) {
                        splitting = splitting && (lat.leq(b, lat.join(u, v)) == (lat.leq(b, u) || lat.leq(b, v)));
                    }
                }
            }
            CHECK(galois);
            CHECK(splitting);
            CHECK(extremes);
        }
    }
    // 1 + 3 + 19 + 219 labelled posets
    CHECK(lattices == 242);
}

TEST_CASE("MVTS parsing")
{
    auto m = upgrade();
    const auto& lat = *m->truth;
    CHECK(m->states == std::vector<std::string>{"s", "t"});
    CHECK(lat.format(m->weight[0][1]) == "downset(p)");
    CHECK(lat.format(m->weight[1][1]) == "downset(q)");
    CHECK(m->weight[0][0] == lat.bottom());
    CHECK(m->valuations->format(m->label("goal")) == "[s: downset(), t: downset(q)]");
    CHECK(m->valuations->format(m->label("cheap")) == "[s: downset(p), t: downset()]");
    CHECK_THROWS_AS(mv::parse_mvts("states: a\n"), parse_error);
    CHECK_THROWS_AS(mv::parse_mvts("products: p\nstates: a\nedge a->a\n"), parse_error);
    CHECK_THROWS_AS(mv::parse_mvts("products: p\nstates: a\nedge a->a : downset(z)\n"), parse_error);
    CHECK_THROWS_AS(mv::parse_mvts("products: p<=\nstates: a\n"), parse_error);
    CHECK_THROWS_AS(mv::parse_mvts("products: p<=q q<=p\nstates: a\n"), usage_error);
}

TEST_CASE("modal operators")
{
    auto m = upgrade();
    const auto& val = *m->valuations;
    auto none = mv::make_mvts({"a", "b"}, m->truth);
    auto u = val.parse("[s: downset(p), t: downset(q)]");
    CHECK(mv::diamond_mv(none, u) == val.bottom());
    CHECK(mv::box_mv(none, u) == val.top());
    CHECK(mv::box_mv(*m, val.top()) == val.top());
    CHECK(val.format(mv::diamond_mv(*m, u)) == "[s: downset(p), t: downset(q)]");
    CHECK(val.format(mv::box_mv(*m, val.parse("[s: downset(q)]"))) == "[s: downset(), t: downset()]");
    CHECK(val.format(mv::box_mv(*m, val.parse("[t: downset(p)]"))) == "[s: downset(q), t: downset(p)]");
}

TEST_CASE("symbolic moves of the latticed operators")
{
    auto m = upgrade();
    auto sys = mv::to_equation_system(mv::parse_formula("<>goal /\\ []goal /\\ (downset(p) => cheap)"), m);
    auto moves = derive_symbolic_moves(sys);
    const auto& val = *m->valuations;
    auto name = [&](std::size_t k) { return val.format(val.basis()[k]); };
    auto sp = m->basis_index("s", "p"), sq = m->basis_index("s", "q");
    // only the ↓p part of the edge s->t carries over
    auto dia = mv::diamond_operator(m);
    CHECK(dia->moves(sp).str(name) == "[[s: downset(), t: downset(p)],1]");
    CHECK(dia->moves(sq).str(name) == "false");
    CHECK(mv::box_operator(m)->moves(sq).str(name) == "[[s: downset(), t: downset(p)],1]");
    auto imp = mv::implies_operator(m, m->truth->generated({"p"}), "downset(p)");
    CHECK(imp->moves(sq).str(name) == "[[s: downset(p), t: downset()],1]");
    CHECK(mv::box_operator(std::make_shared<const mv::MVTS>(mv::make_mvts({"a"}, m->truth)))->moves(0).str(name) ==
          "true");
    CHECK(sys.size() == 1);
    CHECK(formula_semantics(sys.lattice(), moves.at(sp, 0), 1) == e_moves(sys, {sp, 0}));
}

TEST_CASE("degrees of truth along an upgrade chain")
{
    auto m = upgrade();
    auto phi = mv::parse_formula("<>tt");
    CHECK(mv::mv_model_check(m, phi, "s", "p").holds);
    CHECK_FALSE(mv::mv_model_check(m, phi, "s", "q").holds);
    CHECK(mv::mv_model_check(m, phi, "t", "q").holds);
    auto reach = mv::parse_formula("mu x. goal \\/ <>x");
    CHECK(mv::mv_model_check(m, reach, "s", "p").holds);
    CHECK_FALSE(mv::mv_model_check(m, reach, "s", "q").holds);
    CHECK(m->valuations->format(mv::direct_semantics(reach, *m)) == "[s: downset(p), t: downset(q)]");
    CHECK_THROWS_AS(mv::mv_model_check(m, phi, "s", "r"), usage_error);
    CHECK_THROWS_AS(mv::mv_model_check(m, phi, "u", "p"), usage_error);
}

TEST_CASE("one product reduces to the boolean calculus")
{
    std::mt19937 rng(51);
    for (int trial = 0; trial < 100; trial++) {
        auto k = test::random_kripke(rng, test::uniform(rng, 1, 3));
        auto m = std::make_shared<const mv::MVTS>(mv::from_kripke(k));
        auto phi = mu::parse_formula(mu::to_string(test::random_formula(rng, 3)));
        INFO(mu::to_string(phi));
        auto sem = mu::direct_semantics(phi, k);
        auto mvsem = mv::direct_semantics(phi, *m);
        for (std::size_t x = 0; x < k.states.size(); x++) {
            CHECK((mvsem[x] == m->truth->top()) == sem.test(x));
            CHECK(mv::mv_model_check(m, phi, k.states[x], "t").holds == mu::model_check(k, phi, k.states[x]).holds);
        }
        auto bsys = mu::to_equation_system(phi, k);
        auto msys = mv::to_equation_system(phi, m);
        auto bm = derive_symbolic_moves(bsys);
        auto mm = derive_symbolic_moves(msys);
        for (std::size_t x = 0; x < k.states.size(); x++) {
            for (std::size_t i = 0; i < bsys.size(); i++) CHECK(bm.at(x, i) == mm.at(x, i));
        }
    }
}

TEST_CASE("symbolic moves denote the existential moves on small structures")
{
    std::mt19937 rng(52);
    std::size_t checked = 0;
    for (int trial = 0; trial < 80; trial++) {
        auto m = test::random_mvts(rng, test::uniform(rng, 1, 2), test::uniform(rng, 1, 2));
        auto phi = test::random_mv_formula(rng, 3, m->truth->poset().names());
        auto sys = mv::to_equation_system(phi, m);
        if (sys.size() > 2) continue;
        checked++;
        auto moves = derive_symbolic_moves(sys);
        for (std::size_t b = 0; b < sys.lattice().basis().size(); b++) {
            for (std::size_t i = 0; i < sys.size(); i++) {
                CHECK(formula_semantics(sys.lattice(), moves.at(b, i), sys.size()) == e_moves(sys, {b, i}));
            }
        }
    }
    CHECK(checked >= 60);
}

TEST_CASE("model checking agrees with Kleene iteration")
{
    std::mt19937 rng(53);
    for (int trial = 0; trial < 150; trial++) {
        auto m = test::random_mvts(rng, test::uniform(rng, 1, 3), test::uniform(rng, 1, 3));
        auto phi = mu::parse_formula(mu::to_string(test::random_mv_formula(rng, 3, m->truth->poset().names())),
                                     mv::formula_options());
        INFO(mu::to_string(phi));
        auto sys = mv::to_equation_system(phi, m);
        auto u = solve_kleene(sys).back();
        CHECK(mv::direct_semantics(phi, *m) == u);
        const auto& lat = *m->truth;
        for (std::size_t x = 0; x < m->states.size(); x++) {
            for (const auto& p : lat.poset().names()) {
                bool expected = lat.leq(lat.principal(lat.poset().index_of(p)), u[x]);
                CHECK(mv::mv_model_check(m, phi, m->states[x], p).holds == expected);
            }
        }
    }
}

TEST_CASE("equation files over an MVTS")
{
    auto src = "kts: upgrade.mvts\nx1 =mu goal \\/ <>x1\nx2 =nu downset(p) => x1\n";
    auto [m, sys] = mv::parse_equation_file(src, FPGAME_TEST_DATA);
    auto u = solve_kleene(sys);
    CHECK(sys.lattice().format(u[0]) == "[s: downset(p), t: downset(q)]");
    CHECK(sys.lattice().format(u[1]) == "[s: downset(q), t: downset(q)]");
}
