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

#ifndef FPGAME_SOLVER_HPP
#define FPGAME_SOLVER_HPP

#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <optional>
#include <string>
#include <vector>

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include "fpgame/smtreal.hpp"

namespace fpg::real {

struct SolverResult
{
    enum class Status { sat, unsat, unknown };

    Status status = Status::unknown;
    std::optional<Rational> value;  // model value of v, if one was requested and parsed
    std::string output;
    std::vector<std::string> warnings;
    bool timed_out = false;
};

inline const char* status_name(SolverResult::Status s)
{
    switch (s) {
    case SolverResult::Status::sat:
        return "sat";
    case SolverResult::Status::unsat:
        return "unsat";
    default:
        return "unknown";
    }
}

namespace detail {

inline std::vector<std::string> sexpr_tokens(std::string_view s)
{
    std::vector<std::string> out;
    std::size_t k = 0;
    while (k < s.size()) {
        char c = s[k];
        if (std::isspace(static_cast<unsigned char>(c))) {
            k++;
        } else if (c == '(' || c == ')') {
            out.emplace_back(1, c);
            k++;
        } else if (c == '|') {
            auto e = s.find('|', k + 1);
            if (e == std::string_view::npos) e = s.size() - 1;
            out.emplace_back(s.substr(k, e - k + 1));
            k = e + 1;
        } else {
            std::size_t e = k;
            while (e < s.size() && !std::isspace(static_cast<unsigned char>(s[e])) && s[e] != '(' && s[e] != ')') e++;
            out.emplace_back(s.substr(k, e - k));
            k = e;
        }
    }
    return out;
}

// Real value term: decimal, (/ a b), (- x); nullopt on anything else.
inline std::optional<Rational> read_value(const std::vector<std::string>& ts, std::size_t& k)
{
    if (k >= ts.size()) return std::nullopt;
    if (ts[k] != "(") {
        try {
            return parse_rational(ts[k++]);
        } catch (const usage_error&) {
            return std::nullopt;
        }
    }
    if (k + 1 >= ts.size()) return std::nullopt;
    const std::string head = ts[k + 1];
    k += 2;
    std::optional<Rational> r;
    if (head == "-") {
        auto a = read_value(ts, k);
        if (!a) return std::nullopt;
        r = -*a;
        if (k < ts.size() && ts[k] != ")") {
            auto b = read_value(ts, k);
            if (!b) return std::nullopt;
            r = *a - *b;
        }
    } else if (head == "/") {
        auto a = read_value(ts, k);
        auto b = read_value(ts, k);
        if (!a || !b || *b == 0) return std::nullopt;
        r = *a / *b;
    } else {
        return std::nullopt;
    }
    if (k >= ts.size() || ts[k] != ")") return std::nullopt;
    k++;
    return r;
}

}

// Value of the constant v in a (get-model) answer.
inline std::optional<Rational> model_value(std::string_view model, const std::string& name = "v")
{
    auto ts = detail::sexpr_tokens(model);
    for (std::size_t k = 0; k + 4 < ts.size(); k++) {
        if (ts[k] == "define-fun" && (ts[k + 1] == name || ts[k + 1] == "|" + name + "|") && ts[k + 2] == "(" &&
            ts[k + 3] == ")" && ts[k + 4] == "Real") {
            std::size_t j = k + 5;
            return detail::read_value(ts, j);
        }
    }
    return std::nullopt;
}

inline SolverResult parse_solver_output(const std::string& out, bool want_model)
{
    SolverResult r;
    r.output = out;
    std::istringstream in(out);
    std::string first;
    while (std::getline(in, first) && text::trim(first).empty()) { }
    const std::string status(text::trim(first));
    if (status == "sat") {
        r.status = SolverResult::Status::sat;
    } else if (status == "unsat") {
        r.status = SolverResult::Status::unsat;
    } else {
        r.status = SolverResult::Status::unknown;
        if (status != "unknown") r.warnings.push_back("unexpected solver output: " + status);
    }
    if (want_model && r.status == SolverResult::Status::sat) {
        std::string rest((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        r.value = model_value(rest);
        if (!r.value) r.warnings.push_back("could not read a value for v from the model");
    }
    return r;
}

/**
 * Runs `command script.smt2` with a wall-clock limit in seconds. The
 * command is split on spaces; its first word is looked up in PATH.
 * A timeout kills the solver and reports unknown.
 */
inline SolverResult run_external_solver(const std::string& script, const std::string& command = "z3",
                                        double timeout_seconds = 60, bool want_model = true)
{
    auto argv_words = text::words(command);
    if (argv_words.empty()) throw usage_error("empty solver command");
    namespace fs = std::filesystem;
    std::string tmpl = (fs::temp_directory_path() / "fpgame-XXXXXX.smt2").string();
    int fd = mkstemps(tmpl.data(), 5);
    if (fd < 0) throw environment_error("cannot create a temporary file");
    {
        std::ofstream f(tmpl);
        f << script;
    }
    close(fd);
    struct Cleanup
    {
        std::string path;
        ~Cleanup() { std::error_code ec; fs::remove(path, ec); }
    } cleanup{tmpl};

    int pipefd[2];
    if (pipe(pipefd) != 0) throw environment_error("cannot create a pipe");
    int errpipe[2];  // reports exec failure to the parent
    if (pipe(errpipe) != 0) throw environment_error("cannot create a pipe");
    fcntl(errpipe[1], F_SETFD, FD_CLOEXEC);
    argv_words.push_back(tmpl);
    std::vector<char*> argv;
    for (auto& w : argv_words) argv.push_back(w.data());
    argv.push_back(nullptr);

    pid_t pid = fork();
    if (pid < 0) throw environment_error("cannot fork");
    if (pid == 0) {
        close(pipefd[0]);
        close(errpipe[0]);
        dup2(pipefd[1], STDOUT_FILENO);
        dup2(pipefd[1], STDERR_FILENO);
        execvp(argv[0], argv.data());
        char e = 1;
        [[maybe_unused]] auto n = write(errpipe[1], &e, 1);
        _exit(127);
    }
    close(pipefd[1]);
    close(errpipe[1]);
    char e;
    bool exec_failed = read(errpipe[0], &e, 1) == 1;
    close(errpipe[0]);
    if (exec_failed) {
        close(pipefd[0]);
        waitpid(pid, nullptr, 0);
        throw environment_error("cannot run solver '" + argv_words[0] + "'");
    }

    std::string out;
    bool timed_out = false;
    const auto deadline = std::chrono::steady_clock::now() + std::chrono::duration<double>(timeout_seconds);
    for (;;) {
        auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
        if (left.count() <= 0) {
            timed_out = true;
            break;
        }
        pollfd p{pipefd[0], POLLIN, 0};
        int ready = poll(&p, 1, static_cast<int>(std::min<long long>(left.count(), 1000)));
        if (ready < 0 && errno != EINTR) break;
        if (ready <= 0) continue;
        char buf[4096];
        auto n = read(pipefd[0], buf, sizeof buf);
        if (n <= 0) break;
        out.append(buf, static_cast<std::size_t>(n));
    }
    close(pipefd[0]);
    if (timed_out) kill(pid, SIGKILL);
    waitpid(pid, nullptr, 0);

    if (timed_out) {
        SolverResult r;
        r.output = out;
        r.timed_out = true;
        r.warnings.push_back("solver timed out after " + std::to_string(timeout_seconds) + " s");
        return r;
    }
    return parse_solver_output(out, want_model);
}

// True if `command` names something runnable in PATH.
inline bool solver_available(const std::string& command = "z3")
{
    auto w = text::words(command);
    if (w.empty()) return false;
    if (w[0].find('/') != std::string::npos) return access(w[0].c_str(), X_OK) == 0;
    const char* path = std::getenv("PATH");
    if (!path) return false;
    for (const auto& dir : text::split(path, ':')) {
        if (access((std::filesystem::path(dir) / w[0]).c_str(), X_OK) == 0) return true;
    }
    return false;
}

}

#endif
