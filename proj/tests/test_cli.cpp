#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <sys/wait.h>

#include "cli.hpp"
#include "support.hpp"

using namespace fpg;

namespace {

struct Run
{
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args, const std::string& input = "")
{
    for (auto& a : args) {
        if (a.starts_with("@")) a = test::data(a.substr(1));
    }
    std::istringstream in(input);
    std::ostringstream out, err;
    int code = cli::run(args, {in, out, err});
    return {code, out.str(), err.str()};
}

// The installed binary, for exit statuses as the shell sees them.
int run_binary(const std::string& args)
{
    int status = std::system((std::string(FPGAME_CLI) + " " + args + " >/dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const std::string running_formula = "nu x2.((mu x1.(p \\/ <>x1)) /\\ []x2)";

}

TEST_CASE("mc")
{
    auto r = run({"mc", "@fig1.kts", running_formula, "--state", "a"});
    CHECK(r.code == 0);
    CHECK(r.out == "holds\nmeasure at ({a},2): (0,0)\n");
    auto no = run({"mc", "@fig1.kts", "mu x. p /\\ <>x", "--state", "a"});
    CHECK(no.code == 1);
    CHECK(no.out == "does not hold\nmeasure at ({a},1): ★\n");
    auto bad = run({"mc", "@fig1.kts", "mu x. <>", "--state", "a"});
    CHECK(bad.code == 2);
    CHECK(bad.err == "error: in formula: 1:9: expected a formula, found end of input\n");
    CHECK(run({"mc", "@fig1.kts", "p", "--state", "z"}).code == 2);
    CHECK(run({"mc", "@missing.kts", "p", "--state", "a"}).code == 2);
}

TEST_CASE("solve and check over the powerset lattice")
{
    auto s = run({"solve", "@fig1.eqs"});
    CHECK(s.code == 0);
    CHECK(s.out == "x1 = {a,b}\nx2 = {a,b}\n");
    auto c = run({"check", "@fig1.eqs", "--basis", "{a}", "--index", "1"});
    CHECK(c.code == 0);
    CHECK(c.out == "holds\nmeasure at ({a},1): (1,0)\n");
    auto f = run({"check", "@failing.eqs", "--basis", "{a}", "--index", "1"});
    CHECK(f.code == 1);
    CHECK(f.out == "does not hold\nmeasure at ({a},1): ★\n");
    CHECK(run({"check", "@fig1.eqs", "--basis", "{a,b}", "--index", "1"}).code == 2);
    CHECK(run({"check", "@fig1.eqs", "--basis", "{a}", "--index", "3"}).code == 2);
    CHECK(run({"check", "@fig1.eqs", "--basis", "{a}"}).code == 2);
}

TEST_CASE("solve and check over the other lattices")
{
    auto mv = run({"solve", "@upgrade.eqs", "--lattice", "mv"});
    CHECK(mv.code == 0);
    CHECK(mv.out == "x1 = [s: downset(p), t: downset(q)]\n");
    CHECK(run({"check", "@upgrade.eqs", "--lattice", "mv", "--basis", "[s: downset(p)]", "--index", "1"}).code == 0);
    CHECK(run({"check", "@upgrade.eqs", "--lattice", "mv", "--basis", "[s: downset(q)]", "--index", "1"}).code == 1);
    auto cp = run({"solve", "@fig3.whl", "--lattice", "cp"});
    CHECK(cp.code == 0);
    CHECK(cp.out == "ρ1 = ⊥\nρ2 = ⊥[y↦6]\nρ3 = ⊥[x↦7]\nρ4 = ⊥[x↦7]\n");
    CHECK(run({"check", "@fig3.whl", "--lattice", "cp", "--basis", "⊥[x↦7]", "--index", "4"}).code == 0);
    CHECK(run({"check", "@fig3.whl", "--lattice", "cp", "--basis", "bot[y->6]", "--index", "4"}).code == 1);
    CHECK(run({"solve", "@fig1.eqs", "--lattice", "reals"}).code == 2);
}

TEST_CASE("play with scripted forall choices")
{
    auto finite = run({"play", "@fig1.eqs", "--basis", "{a}", "--index", "2"}, "1\n1\n");
    CHECK(finite.code == 0);
    CHECK(finite.out ==
          "play from ({a},2), you are ∀\n"
          "∃ plays ({a}, {a,b}) at ({a},2)\n"
          "∀ to move against ({a}, {a,b}):\n"
          "  1) ({a},1)\n"
          "  2) ({a},2)\n"
          "  3) ({b},2)\n"
          "> 1\n"
          "∀ plays ({a},1)\n"
          "∃ plays ({b}, ∅) at ({a},1)\n"
          "∀ to move against ({b}, ∅):\n"
          "  1) ({b},1)\n"
          "> 1\n"
          "∀ plays ({b},1)\n"
          "∃ plays (∅, ∅) at ({b},1)\n"
          "∃ wins (∀ stuck)\n");
    auto cycle = run({"play", "@fig1.eqs", "--basis", "{a}", "--index", "2"}, "2\n");
    CHECK(cycle.code == 0);
    CHECK(cycle.out.ends_with("∀ plays ({a},2)\n∃ wins (cycle, highest index 2 is ν)\n"));
    // invalid choices re-prompt without changing the position
    auto retry = run({"play", "@fig1.eqs", "--basis", "{a}", "--index", "2"}, "x\n0\n4\n2\n");
    CHECK(retry.code == 0);
    CHECK(retry.out.find("invalid choice 'x', enter a number from 1 to 3\n> 0\ninvalid choice '0'") != std::string::npos);
    CHECK(retry.out.substr(retry.out.find("∀ plays")) == cycle.out.substr(cycle.out.find("∀ plays")));
    // running out of input is a usage error
    CHECK(run({"play", "@fig1.eqs", "--basis", "{a}", "--index", "2"}, "1\n").code == 2);
}

TEST_CASE("play as exists and from a script file")
{
    auto lose = run({"play", "@fig1.eqs", "--basis", "{a}", "--index", "2", "--human", "exists"}, "1\n1\n");
    CHECK(lose.code == 1);
    CHECK(lose.out.ends_with("∀ wins (cycle, highest index 1 is μ)\n"));
    auto stuck = run({"play", "@failing.eqs", "--basis", "{a}", "--index", "1"});
    CHECK(stuck.code == 1);
    CHECK(stuck.out == "play from ({a},1), you are ∀\n∀ wins (∃ stuck)\n");
    const std::string script = std::filesystem::temp_directory_path() / "fpgame_test_script.txt";
    {
        std::ofstream f(script);
        f << "1\n1\n";
    }
    auto scripted = run({"play", "@fig1.eqs", "--basis", "{a}", "--index", "2", "--script", script});
    CHECK(scripted.out == run({"play", "@fig1.eqs", "--basis", "{a}", "--index", "2"}, "1\n1\n").out);
    std::filesystem::remove(script);
    CHECK(run({"play", "@fig1.eqs", "--basis", "{a}", "--index", "2", "--script", "/nonexistent"}).code == 2);
    auto capped = run({"play", "@fig1.eqs", "--basis", "{a}", "--index", "2", "--steps", "1"}, "1\n");
    CHECK(capped.code == 3);
    CHECK(capped.out.ends_with("undecided (step cap reached)\n"));
}

TEST_CASE("cp")
{
    auto yes = run({"cp", "@fig3.whl", "--query", "x=7@4"});
    CHECK(yes.code == 0);
    CHECK(yes.out ==
          "ρ1 =ν ⊥\n"
          "ρ2 =ν ρ1[y↦6]\n"
          "ρ3 =ν ρ2[x↦y+1] ⊓ ρ4[y↦x+y]\n"
          "ρ4 =ν ρ3\n"
          "ρ1 = ⊥\n"
          "ρ2 = ⊥[y↦6]\n"
          "ρ3 = ⊥[x↦7]\n"
          "ρ4 = ⊥[x↦7]\n"
          "x=7@4: holds\n"
          "(⊥[x↦7],4) ∃→ (⊥, ⊥, ⊥[x↦7], ⊥)\n"
          "  ∀→ (⊥[x↦7],3) ∃→ (⊥, ⊥[y↦6], ⊥, ⊥[x↦7])\n"
          "    ∀→ (⊥[y↦6],2) ∃→ (⊥, ⊥, ⊥, ⊥)\n"
          "      ∃ wins (∀ stuck)\n"
          "    ∀→ (⊥[x↦7],4)\n"
          "      ∃ wins (cycle, highest index 4 is ν)\n");
    auto no = run({"cp", "@fig3.whl", "--query", "y=6@4"});
    CHECK(no.code == 1);
    CHECK(no.out.ends_with("y=6@4: does not hold\n(⊥[y↦6],4)\n  ∀ wins (∃ stuck)\n"));
    CHECK(run({"cp", "@fig3.whl"}).code == 0);
    CHECK(run({"cp", "@fig3.whl", "--query", "z=1@4"}).code == 2);
    CHECK(run({"cp", "@fig3.whl", "--query", "x=7@9"}).code == 2);
}

TEST_CASE("mvmc")
{
    auto yes = run({"mvmc", "@upgrade.mvts", "<>tt", "--state", "s", "--degree", "p"});
    CHECK(yes.code == 0);
    CHECK(yes.out == "holds\nmeasure at ([s: downset(p), t: downset()],1): (0)\n");
    CHECK(run({"mvmc", "@upgrade.mvts", "<>tt", "--state", "s", "--degree", "q"}).code == 1);
    CHECK(run({"mvmc", "@upgrade.mvts", "<>tt", "--state", "s", "--degree", "r"}).code == 2);
}

TEST_CASE("smt emission")
{
    auto opt = run({"smt", "@ex75.req"});
    CHECK(opt.code == 0);
    CHECK(opt.out == test::slurp(test::data("ex75_opt.smt2")));
    auto check = run({"smt", "@ex75.req", "--mode", "check", "--value", "3/4", "--index", "1"});
    CHECK(check.out == test::slurp(test::data("ex75_check.smt2")));
    const std::string out = std::filesystem::temp_directory_path() / "fpgame_test_out.smt2";
    auto to_file = run({"smt", "@ex75.req", "--out", out});
    CHECK(to_file.code == 0);
    CHECK(to_file.out.empty());
    CHECK(test::slurp(out) == opt.out);
    std::filesystem::remove(out);
    CHECK(run({"smt", "@ex75.req", "--mode", "check", "--value", "3/2"}).code == 2);
    CHECK(run({"smt", "@ex75.req", "--index", "2"}).code == 2);
    CHECK(run({"smt", "@ex75.req", "--mode", "maybe"}).code == 2);
    CHECK(run({"smt", "@ex75.req", "--solver", "/nonexistent/solver"}).code == 3);
}

TEST_CASE("smt with an external solver", "[z3]")
{
    if (!real::solver_available("z3")) SKIP("z3 not found in PATH");
    auto opt = run({"smt", "@ex75.req", "--solver", "z3"});
    CHECK(opt.code == 0);
    CHECK(opt.out.ends_with("sat\nv = 3/4\n"));
    auto above = run({"smt", "@ex75.req", "--mode", "check", "--value", "19/25", "--solver", "z3", "--json"});
    CHECK(above.code == 1);
    CHECK(above.out == "{\n  \"command\": \"smt\",\n  \"status\": \"unsat\",\n  \"exit\": 1\n}\n");
}

TEST_CASE("json envelopes have a stable key order")
{
    auto r = run({"--json", "check", "@fig1.eqs", "--basis", "{a}", "--index", "1"});
    CHECK(r.out ==
          "{\n  \"command\": \"check\",\n  \"status\": \"holds\",\n  \"exit\": 0,\n"
          "  \"position\": \"({a},1)\",\n  \"measure\": \"(1,0)\"\n}\n");
    auto after = run({"check", "@fig1.eqs", "--basis", "{a}", "--index", "1", "--json"});
    CHECK(after.out == r.out);
    auto s = nlohmann::json::parse(run({"solve", "@fig1.eqs", "--json"}).out);
    CHECK(s["solution"]["x2"] == "{a,b}");
}

TEST_CASE("usage errors")
{
    CHECK(run({}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({"--help"}).code == 0);
    CHECK(run({"solve", "@fig1.eqs", "--bogus"}).code == 2);
}

TEST_CASE("exit statuses of the binary")
{
    const std::string d = std::string(FPGAME_TEST_DATA) + "/";
    CHECK(run_binary("mc " + d + "fig1.kts '" + running_formula + "' --state a") == 0);
    CHECK(run_binary("check " + d + "failing.eqs --basis '{a}' --index 1") == 1);
    CHECK(run_binary("check " + d + "fig1.eqs --basis '{q}' --index 1") == 2);
    CHECK(run_binary("cp " + d + "fig3.whl --query x=7@4") == 0);
    CHECK(run_binary("smt " + d + "ex75.req --solver /nonexistent/solver") == 3);
    CHECK(run_binary("") == 2);
}
