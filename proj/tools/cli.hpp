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

#ifndef FPGAME_TOOLS_CLI_HPP
#define FPGAME_TOOLS_CLI_HPP

#include <charconv>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fpgame/cpflow.hpp"
#include "fpgame/game.hpp"
#include "fpgame/latticed.hpp"
#include "fpgame/measure.hpp"
#include "fpgame/mucalc.hpp"
#include "fpgame/smtreal.hpp"
#include "fpgame/solver.hpp"

namespace fpg::cli {

using json = nlohmann::ordered_json;

enum Exit { ok = 0, negative = 1, usage = 2, resource = 3 };

struct Streams
{
    std::istream& in;
    std::ostream& out;
    std::ostream& err;
};

namespace detail {

template <class F>
auto parse_argument(const std::string& what, F&& parse)
{
    try {
        return parse();
    } catch (const parse_error& e) {
        throw usage_error("in " + what + ": " + e.what());
    }
}

// Shared by every subcommand: the report text plus the JSON envelope.
struct Report
{
    std::string command;
    int exit = Exit::ok;
    std::string status;
    std::string text;
    json details = json::object();

    void emit(std::ostream& out, bool as_json) const
    {
        if (!as_json) {
            out << text;
            return;
        }
        json j;
        j["command"] = command;
        j["status"] = status;
        j["exit"] = exit;
        for (const auto& [k, v] : details.items()) j[k] = v;
        out << j.dump(2) << "\n";
    }
};

template <FiniteLattice L>
std::size_t find_basis(const L& lat, const std::string& s)
{
    const auto& basis = lat.basis();
    for (std::size_t k = 0; k < basis.size(); k++) {
        if (lat.format(basis[k]) == s) return k;
    }
    auto e = lat.parse(s);
    for (std::size_t k = 0; k < basis.size(); k++) {
        if (basis[k] == e) return k;
    }
    throw usage_error("'" + s + "' is not a basis element of the lattice");
}

inline std::size_t check_index(std::size_t index, std::size_t m)
{
    if (index < 1 || index > m) {
        throw usage_error("index " + std::to_string(index) + " is out of range 1.." + std::to_string(m));
    }
    return index - 1;
}

template <FiniteLattice L>
std::string measure_line(const EquationSystem<L>& sys, const ProgressMeasure& r, Position p)
{
    return "measure at " + format_position(sys.lattice(), p) + ": " + r.at(p).str() + "\n";
}

template <FiniteLattice L>
Report solve_report(const EquationSystem<L>& sys)
{
    auto moves = derive_symbolic_moves(sys);
    auto r = solve_measure(sys, moves);
    auto u = measure_to_solution(sys, r);
    Report rep{"solve", Exit::ok, "solved", {}, {}};
    json sol = json::object();
    for (std::size_t i = 0; i < sys.size(); i++) {
        const std::string v = sys.lattice().format(u[i]);
        rep.text += sys[i].name + " = " + v + "\n";
        sol[sys[i].name] = v;
    }
    rep.details["solution"] = sol;
    return rep;
}

template <FiniteLattice L>
Report check_report(const EquationSystem<L>& sys, const std::string& basis, std::size_t index)
{
    Position p{find_basis(sys.lattice(), basis), check_index(index, sys.size())};
    auto moves = derive_symbolic_moves(sys);
    auto r = solve_measure_local(sys, moves, p);
    const bool holds = !r.at(p).is_star();
    Report rep{"check", holds ? Exit::ok : Exit::negative, holds ? "holds" : "does not hold", {}, {}};
    rep.text = rep.status + "\n" + measure_line(sys, r, p);
    rep.details["position"] = format_position(sys.lattice(), p);
    rep.details["measure"] = r.at(p).str();
    return rep;
}

// Reads the next option number, re-prompting on anything else.
inline std::size_t choose(std::istream& in, std::ostream& out, std::size_t count)
{
    std::string line;
    for (;;) {
        out << "> ";
        if (!std::getline(in, line)) throw usage_error("input ended before the play was decided");
        std::string_view v = text::trim(line);
        out << v << "\n";
        std::size_t k = 0;
        auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), k);
        if (ec == std::errc() && ptr == v.data() + v.size() && k >= 1 && k <= count) return k - 1;
        out << "invalid choice '" << v << "', enter a number from 1 to " << count << "\n";
    }
}

/**
 * One play from (b, i). The human side picks from numbered menus; the
 * machine plays ∃ by the least progress measure and ∀ greedily by it.
 */
template <FiniteLattice L>
Report play_report(const EquationSystem<L>& sys, const std::string& basis, std::size_t index, Player human,
                   std::istream& in, std::size_t step_cap)
{
    const L& lat = sys.lattice();
    Position start{find_basis(lat, basis), check_index(index, sys.size())};
    auto moves = derive_symbolic_moves(sys);
    auto r = solve_measure(sys, moves);
    std::ostringstream os;
    ExistsStrategy<L> exists = measure_strategy(sys, moves, r);
    ForallStrategy<L> forall = greedy_forall<L>(r);
    if (human == Player::exists) {
        exists = [&](Position p) -> std::optional<tuple_t<L>> {
            auto options = e_moves(sys, p);
            if (options.empty()) return std::nullopt;
            os << "∃ to move at " << format_position(lat, p) << ":\n";
            for (std::size_t k = 0; k < options.size(); k++) {
                os << "  " << k + 1 << ") " << format_tuple(lat, options[k]) << "\n";
            }
            return options[choose(in, os, options.size())];
        };
    } else {
        forall = [&](const tuple_t<L>& l, const std::vector<Position>& legal) {
            os << "∀ to move against " << format_tuple(lat, l) << ":\n";
            for (std::size_t k = 0; k < legal.size(); k++) {
                os << "  " << k + 1 << ") " << format_position(lat, legal[k]) << "\n";
            }
            return legal[choose(in, os, legal.size())];
        };
    }
    std::function<void(const PlayEvent<L>&)> observe = [&](const PlayEvent<L>& e) {
        if (e.mover == Player::exists) {
            os << "∃ plays " << format_tuple(lat, e.move) << " at " << format_position(lat, e.from) << "\n";
        } else {
            os << "∀ plays " << format_position(lat, *e.answer) << "\n";
        }
    };
    os << "play from " << format_position(lat, start) << ", you are " << (human == Player::exists ? "∃" : "∀") << "\n";
    auto res = play(sys, start, exists, forall, step_cap, observe);
    os << res.verdict() << "\n";
    Report rep{"play", Exit::ok, {}, os.str(), {}};
    switch (res.outcome) {
    case Outcome::exists_wins:
        rep.status = "exists wins";
        break;
    case Outcome::forall_wins:
        rep.status = "forall wins";
        rep.exit = Exit::negative;
        break;
    case Outcome::undecided:
        rep.status = "undecided";
        rep.exit = Exit::resource;
        break;
    }
    rep.details["verdict"] = res.verdict();
    rep.details["rounds"] = res.steps;
    return rep;
}

}

/**
 * Runs one command line. Reports go to `out`, diagnostics to `err`;
 * the result is the exit status.
 */
inline int run(const std::vector<std::string>& args, Streams io)
{
    CLI::App app{"Fixpoint games: solving and checking systems of fixpoint equations over lattices", "fpgame"};
    app.require_subcommand(1);
    app.fallthrough();  // --json may follow the subcommand
    bool as_json = false;
    app.add_flag("--json", as_json, "Print a JSON result envelope");

    std::string file, formula, state, basis, lattice = "powerset", query, degree, human = "forall", script;
    std::size_t index = 0, step_cap = 10000;
    auto lattice_names = CLI::IsMember({"powerset", "mv", "cp"});

    auto* mc = app.add_subcommand("mc", "Model-check a μ-calculus formula on a Kripke structure");
    mc->add_option("kts", file, "Kripke structure file")->required();
    mc->add_option("formula", formula, "Formula")->required();
    mc->add_option("--state", state, "State to check")->required();

    auto* solve = app.add_subcommand("solve", "Solve an equation system and print its solution");
    solve->add_option("file", file, "Equation file (a while program for --lattice cp)")->required();
    solve->add_option("--lattice", lattice, "powerset, mv or cp")->check(lattice_names);

    auto* check = app.add_subcommand("check", "Does a basis element lie below a solution component?");
    check->add_option("file", file, "Equation file")->required();
    check->add_option("--basis", basis, "Basis element, as printed")->required();
    check->add_option("--index", index, "Equation index, from 1")->required();
    check->add_option("--lattice", lattice, "powerset, mv or cp")->check(lattice_names);

    auto* playc = app.add_subcommand("play", "Play the fixpoint game against the machine");
    playc->add_option("file", file, "Equation file")->required();
    playc->add_option("--basis", basis, "Basis element of the start position")->required();
    playc->add_option("--index", index, "Equation index of the start position, from 1")->required();
    playc->add_option("--human", human, "Side played by you: exists or forall")->check(CLI::IsMember({"exists", "forall"}));
    playc->add_option("--script", script, "Read option numbers from this file instead of standard input");
    playc->add_option("--lattice", lattice, "powerset, mv or cp")->check(lattice_names);
    playc->add_option("--steps", step_cap, "Round limit");

    auto* cpc = app.add_subcommand("cp", "Constant propagation on a while program");
    cpc->add_option("file", file, "While program")->required();
    cpc->add_option("--query", query, "Query such as x=7@4");

    auto* mvmc = app.add_subcommand("mvmc", "Latticed model checking on a transition system with upgrades");
    mvmc->add_option("mvts", file, "Transition system file")->required();
    mvmc->add_option("formula", formula, "Formula")->required();
    mvmc->add_option("--state", state, "State to check")->required();
    mvmc->add_option("--degree", degree, "Product p: does the formula hold to degree ↓p?")->required();

    std::string mode = "opt", value = "0", solver, out_file;
    double timeout = 60;
    auto* smt = app.add_subcommand("smt", "Emit (and optionally solve) the game formula for equations over [0,1]");
    smt->add_option("file", file, "Real equation file")->required();
    smt->add_option("--mode", mode, "check or opt")->check(CLI::IsMember({"check", "opt"}));
    smt->add_option("--value", value, "Value to check, e.g. 3/4");
    smt->add_option("--index", index, "Equation index, from 1 (default: the last)");
    smt->add_option("--solver", solver, "Solver command, e.g. z3");
    smt->add_option("--timeout", timeout, "Solver time limit in seconds");
    smt->add_option("--out", out_file, "Write the script here instead of standard output");

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, io.out, io.err);
        return code == 0 ? Exit::ok : Exit::usage;
    }

    try {
        detail::Report rep;
        if (*mc) {
            auto phi = detail::parse_argument("formula", [&] { return mu::parse_formula(formula); });
            auto res = mu::model_check(mu::load_kripke(file), phi, state);
            rep = {"mc", res.holds ? Exit::ok : Exit::negative, res.holds ? "holds" : "does not hold", {}, {}};
            rep.text = rep.status + "\n" + detail::measure_line(res.system, res.measure, res.query);
            rep.details["measure"] = res.measure.at(res.query).str();
        } else if (*mvmc) {
            auto phi = detail::parse_argument("formula", [&] { return mv::parse_formula(formula); });
            auto m = std::make_shared<const mv::MVTS>(mv::load_mvts(file));
            auto res = mv::mv_model_check(m, phi, state, degree);
            rep = {"mvmc", res.holds ? Exit::ok : Exit::negative, res.holds ? "holds" : "does not hold", {}, {}};
            rep.text = rep.status + "\n" + detail::measure_line(res.system, res.measure, res.query);
            rep.details["measure"] = res.measure.at(res.query).str();
        } else if (*solve || *check || *playc) {
            std::ifstream script_in;
            if (!script.empty()) {
                script_in.open(script);
                if (!script_in) throw usage_error("cannot read script '" + script + "'");
            }
            std::istream& in = script.empty() ? io.in : script_in;
            const Player side = human == "exists" ? Player::exists : Player::forall;
            auto dispatch = [&](const auto& sys) {
                if (*solve) return detail::solve_report(sys);
                if (*check) return detail::check_report(sys, basis, index);
                return detail::play_report(sys, basis, index, side, in, step_cap);
            };
            if (lattice == "powerset") {
                rep = dispatch(mu::load_equation_file(file).system);
            } else if (lattice == "mv") {
                rep = dispatch(mv::load_equation_file(file).system);
            } else {
                auto a = cp::analyze(cp::parse_while(mu::detail::read_file(file)));
                rep = dispatch(a.system);
                if (*solve) {
                    // the exact analysis result, by block, rather than over the basis universe
                    rep.text.clear();
                    for (std::size_t i = 0; i < a.solution.size(); i++) {
                        rep.text += a.system[i].name + " = " + a.lattice->format(a.solution[i]) + "\n";
                    }
                }
            }
            if (*solve) rep.command = "solve";
        } else if (*cpc) {
            auto prog = cp::parse_while(mu::detail::read_file(file));
            std::set<std::int64_t> extra;
            std::optional<cp::Query> q;
            if (!query.empty()) {
                q = cp::parse_query(query, prog);
                extra.insert(q->value);
            }
            auto a = cp::analyze(prog, extra);
            rep.command = "cp";
            rep.text = cp::format_equations(a.system);
            json sol = json::array();
            for (std::size_t i = 0; i < a.solution.size(); i++) {
                rep.text += a.system[i].name + " = " + a.lattice->format(a.solution[i]) + "\n";
                sol.push_back(a.lattice->format(a.solution[i]));
            }
            rep.details["solution"] = sol;
            rep.status = "solved";
            if (q) {
                auto g = cp::game_transcript(a, *q);
                rep.status = g.holds ? "holds" : "does not hold";
                rep.exit = g.holds ? Exit::ok : Exit::negative;
                rep.text += query + ": " + rep.status + "\n" + g.transcript.text;
                rep.details["transcript"] = g.transcript.text;
            }
        } else if (*smt) {
            auto sys = real::parse_real_system(mu::detail::read_file(file));
            auto params = real::derive_decrease_params(sys);
            for (const auto& w : params.warnings) io.err << "warning: " << w << "\n";
            real::Query q;
            q.mode = mode == "check" ? real::Query::Mode::check : real::Query::Mode::optimize;
            q.index = index == 0 ? sys.size() - 1 : detail::check_index(index, sys.size());
            q.value = real::parse_rational(value);
            if (q.value < 0 || q.value > 1) throw usage_error("--value must lie in [0,1]");
            const std::string s = real::emit_smtlib(sys, params, q);
            rep.command = "smt";
            rep.status = "emitted";
            if (out_file.empty() && solver.empty()) {
                rep.text = s;
            } else if (!out_file.empty()) {
                std::ofstream f(out_file);
                if (!(f << s)) throw environment_error("cannot write '" + out_file + "'");
                rep.details["script"] = out_file;
            }
            if (!solver.empty()) {
                auto res = real::run_external_solver(s, solver, timeout, q.mode == real::Query::Mode::optimize);
                for (const auto& w : res.warnings) io.err << "warning: " << w << "\n";
                rep.status = real::status_name(res.status);
                rep.text += rep.status + "\n";
                if (res.value) {
                    rep.text += "v = " + real::format_rational(*res.value) + "\n";
                    rep.details["value"] = real::format_rational(*res.value);
                } else if (res.status == real::SolverResult::Status::sat && q.mode == real::Query::Mode::optimize) {
                    rep.text += res.output;
                    rep.details["output"] = res.output;
                }
                rep.exit = res.status == real::SolverResult::Status::sat     ? Exit::ok
                           : res.status == real::SolverResult::Status::unsat ? Exit::negative
                                                                              : Exit::resource;
            }
        }
        rep.emit(io.out, as_json);
        return rep.exit;
    } catch (const parse_error& e) {
        io.err << "error: " << file << ":" << e.what() << "\n";
        return Exit::usage;
    } catch (const usage_error& e) {
        io.err << "error: " << e.what() << "\n";
        return Exit::usage;
    } catch (const contract_violation& e) {
        io.err << "error: " << e.what() << "\n";
        return Exit::usage;
    } catch (const config_error& e) {
        io.err << "error: " << e.what() << "\n";
        return Exit::usage;
    } catch (const resource_error& e) {
        io.err << "error: " << e.what() << "\n";
        return Exit::resource;
    } catch (const environment_error& e) {
        io.err << "error: " << e.what() << "\n";
        return Exit::resource;
    }
}

}

#endif
