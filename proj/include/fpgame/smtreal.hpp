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

#ifndef FPGAME_SMTREAL_HPP
#define FPGAME_SMTREAL_HPP

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "fpgame/common.hpp"
#include "fpgame/text.hpp"

/*
 * Equation systems over the real interval [0,1] with piecewise-linear
 * right-hand sides, and their encoding as a finite quantified formula.
 * All arithmetic is exact.
 */

namespace fpg::real {

// Expression templates off: results can be stored with auto and passed to std::min.
using Rational = boost::multiprecision::number<boost::multiprecision::cpp_rational_backend, boost::multiprecision::et_off>;
using Integer = boost::multiprecision::cpp_int;

// "3/4", "1", "-1/2"
inline std::string format_rational(const Rational& r)
{
    Integer n = boost::multiprecision::numerator(r), d = boost::multiprecision::denominator(r);
    return d == 1 ? n.str() : n.str() + "/" + d.str();
}

// Accepts "3", "-3/4", "0.75" and "3/4.5".
inline Rational parse_rational(std::string_view s)
{
    auto decimal = [](std::string_view t) -> Rational {
        t = text::trim(t);
        bool negative = !t.empty() && t.front() == '-';
        if (negative) t.remove_prefix(1);
        auto dot = t.find('.');
        std::string digits(t.substr(0, dot));
        std::string frac = dot == std::string_view::npos ? "" : std::string(t.substr(dot + 1));
        if ((digits.empty() && frac.empty()) ||
            !std::all_of(digits.begin(), digits.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }) ||
            !std::all_of(frac.begin(), frac.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
            throw usage_error("malformed number '" + std::string(t) + "'");
        }
        Integer n(digits.empty() ? "0" : digits);
        Integer scale = 1;
        for (char c : frac) {
            n = n * 10 + (c - '0');
            scale *= 10;
        }
        Rational r(n, scale);
        return negative ? Rational(-r) : r;
    };
    auto slash = s.find('/');
    if (slash == std::string_view::npos) return decimal(s);
    Rational d = decimal(s.substr(slash + 1));
    if (d == 0) throw usage_error("division by zero in '" + std::string(s) + "'");
    return decimal(s.substr(0, slash)) / d;
}

// SMT-LIB real literal: 3.0, (/ 3.0 4.0), (- (/ 1.0 2.0))
inline std::string smt_rational(const Rational& r)
{
    if (r < 0) return "(- " + smt_rational(-r) + ")";
    Integer n = boost::multiprecision::numerator(r), d = boost::multiprecision::denominator(r);
    if (d == 1) return n.str() + ".0";
    return "(/ " + n.str() + ".0 " + d.str() + ".0)";
}

// x ↦ slope·x + offset
struct Affine
{
    Rational slope = 0;
    Rational offset = 0;

    Rational operator()(const Rational& x) const { return slope * x + offset; }
    friend bool operator==(const Affine&, const Affine&) = default;
};

/**
 * Piecewise-linear function on [0,1]. Piece k covers [starts[k],
 * starts[k+1]) and the last piece [starts.back(), 1], which may be the
 * single point 1.
 */
struct PiecewiseLinear
{
    std::vector<Rational> starts{0};
    std::vector<Affine> maps{Affine{}};

    Rational end(std::size_t k) const { return k + 1 < starts.size() ? starts[k + 1] : Rational(1); }

    std::size_t piece_of(const Rational& x) const
    {
        auto it = std::upper_bound(starts.begin(), starts.end(), x);
        return static_cast<std::size_t>(it - starts.begin()) - 1;
    }

    Rational operator()(const Rational& x) const
    {
        if (x < 0 || x > 1) throw contract_violation("argument " + format_rational(x) + " outside [0,1]");
        return maps[piece_of(x)](x);
    }

    static PiecewiseLinear constant(const Rational& c) { return {{0}, {Affine{0, c}}}; }
    static PiecewiseLinear identity() { return {{0}, {Affine{1, 0}}}; }

    // Slope ≥ 0 on every piece and no downward jump at breakpoints.
    bool monotone() const
    {
        for (std::size_t k = 0; k < maps.size(); k++) {
            if (maps[k].slope < 0) return false;
            if (k + 1 < maps.size() && maps[k](starts[k + 1]) > maps[k + 1](starts[k + 1])) return false;
        }
        return true;
    }

    bool within_unit() const
    {
        for (std::size_t k = 0; k < maps.size(); k++) {
            for (const auto& x : {starts[k], end(k)}) {
                if (maps[k](x) < 0 || maps[k](x) > 1) return false;
            }
        }
        return true;
    }

    // Merge adjacent pieces with the same map.
    PiecewiseLinear simplified() const
    {
        PiecewiseLinear r{{starts[0]}, {maps[0]}};
        for (std::size_t k = 1; k < maps.size(); k++) {
            if (maps[k] == r.maps.back()) continue;
            r.starts.push_back(starts[k]);
            r.maps.push_back(maps[k]);
        }
        return r;
    }
};

namespace detail {

inline PiecewiseLinear refine(const PiecewiseLinear& f, const std::vector<Rational>& starts)
{
    PiecewiseLinear r;
    r.starts = starts;
    r.maps.clear();
    for (const auto& s : starts) r.maps.push_back(f.maps[f.piece_of(s)]);
    return r;
}

inline std::vector<Rational> merged_starts(const PiecewiseLinear& f, const PiecewiseLinear& g)
{
    std::set<Rational> s(f.starts.begin(), f.starts.end());
    s.insert(g.starts.begin(), g.starts.end());
    return {s.begin(), s.end()};
}

}

inline PiecewiseLinear add(const PiecewiseLinear& f, const PiecewiseLinear& g)
{
    auto starts = detail::merged_starts(f, g);
    auto a = detail::refine(f, starts), b = detail::refine(g, starts);
    for (std::size_t k = 0; k < a.maps.size(); k++) {
        a.maps[k] = {a.maps[k].slope + b.maps[k].slope, a.maps[k].offset + b.maps[k].offset};
    }
    return a.simplified();
}

inline PiecewiseLinear scale(const Rational& c, const PiecewiseLinear& f)
{
    PiecewiseLinear r = f;
    for (auto& m : r.maps) m = {c * m.slope, c * m.offset};
    return r.simplified();
}

// Pointwise min (or max), splitting pieces where the two maps cross.
inline PiecewiseLinear min_max(const PiecewiseLinear& f, const PiecewiseLinear& g, bool take_min)
{
    auto starts = detail::merged_starts(f, g);
    auto a = detail::refine(f, starts), b = detail::refine(g, starts);
    PiecewiseLinear r;
    r.starts.clear();
    r.maps.clear();
    for (std::size_t k = 0; k < a.maps.size(); k++) {
        Rational lo = a.starts[k], hi = a.end(k);
        std::vector<Rational> cuts{lo};
        if (a.maps[k].slope != b.maps[k].slope) {
            Rational t = (b.maps[k].offset - a.maps[k].offset) / (a.maps[k].slope - b.maps[k].slope);
            if (lo < t && t < hi) cuts.push_back(t);
        }
        for (std::size_t c = 0; c < cuts.size(); c++) {
            Rational mid = (cuts[c] + (c + 1 < cuts.size() ? cuts[c + 1] : hi)) / 2;
            bool a_smaller = a.maps[k](mid) <= b.maps[k](mid);
            r.starts.push_back(cuts[c]);
            r.maps.push_back(a_smaller == take_min ? a.maps[k] : b.maps[k]);
        }
    }
    return r.simplified();
}

// g ∘ f, cutting the pieces of f where they cross a breakpoint of g. The
// result may end with the one-point piece [1,1].
inline PiecewiseLinear compose(const PiecewiseLinear& g, const PiecewiseLinear& f)
{
    PiecewiseLinear r;
    r.starts.clear();
    r.maps.clear();
    for (std::size_t k = 0; k < f.maps.size(); k++) {
        const Rational lo = f.starts[k], hi = f.end(k);
        const Affine& m = f.maps[k];
        std::set<Rational> cuts{lo};
        if (m.slope > 0) {
            for (const auto& t : g.starts) {
                Rational x = (t - m.offset) / m.slope;
                // a jump of g at f(1) needs the one-point piece [1,1]
                if (lo < x && (x < hi || (x == 1 && k + 1 == f.maps.size()))) cuts.insert(x);
            }
        }
        for (const auto& c : cuts) {
            const Affine& outer = g.maps[g.piece_of(m(c))];
            r.starts.push_back(c);
            r.maps.push_back({outer.slope * m.slope, outer.slope * m.offset + outer.offset});
        }
    }
    return r.simplified();
}

/**
 * Exact least fixpoint: the infimum of the pre-fixpoints {x | f(x) ≤ x},
 * computed piece by piece. Requires f monotone.
 */
inline Rational least_fixpoint(const PiecewiseLinear& f)
{
    std::optional<Rational> best;
    for (std::size_t k = 0; k < f.maps.size(); k++) {
        const Rational lo = f.starts[k], hi = f.end(k);
        const bool closed = k + 1 == f.maps.size();
        const auto& [p, q] = f.maps[k];
        std::optional<Rational> inf;
        if (p < 1) {
            Rational c = q / (1 - p);
            if (c < hi || (closed && c == hi)) inf = std::max(lo, c);
        } else if (p == 1) {
            if (q <= 0) inf = lo;
        } else if (lo <= q / (1 - p)) {
            inf = lo;
        }
        if (inf && (!best || *inf < *best)) best = inf;
    }
    return *best;
}

// Exact greatest fixpoint: the supremum of the post-fixpoints {x | x ≤ f(x)}.
inline Rational greatest_fixpoint(const PiecewiseLinear& f)
{
    std::optional<Rational> best;
    for (std::size_t k = 0; k < f.maps.size(); k++) {
        const Rational lo = f.starts[k], hi = f.end(k);
        const bool closed = k + 1 == f.maps.size();
        const auto& [p, q] = f.maps[k];
        std::optional<Rational> sup;
        if (p < 1) {
            Rational c = q / (1 - p);
            if (lo <= c) sup = std::min(hi, c);
        } else if (p == 1) {
            if (q >= 0) sup = hi;
        } else {
            Rational c = q / (1 - p);
            if (c < hi || (closed && c == hi)) sup = hi;
        }
        if (sup && (!best || *sup > *best)) best = sup;
    }
    return *best;
}

/**
 * Right-hand side term: constants, variables, sums, scaling by a
 * constant, min, max and piecewise-linear functions of one variable.
 */
struct RealTerm
{
    enum class Kind { constant, variable, sum, scale, min, max, pw };

    Kind kind = Kind::constant;
    Rational value = 0;    // constant, or factor for scale
    std::size_t var = 0;   // variable, or argument of pw
    std::vector<RealTerm> args;
    PiecewiseLinear pieces;  // for pw

    static RealTerm constant(Rational c)
    {
        RealTerm t;
        t.value = std::move(c);
        return t;
    }
    static RealTerm variable(std::size_t x)
    {
        RealTerm t;
        t.kind = Kind::variable;
        t.var = x;
        return t;
    }
    static RealTerm of(Kind k, std::vector<RealTerm> args, Rational factor = 0)
    {
        RealTerm t;
        t.kind = k;
        t.args = std::move(args);
        t.value = std::move(factor);
        return t;
    }
    static RealTerm piecewise(std::size_t x, PiecewiseLinear f)
    {
        RealTerm t;
        t.kind = Kind::pw;
        t.var = x;
        t.pieces = std::move(f);
        return t;
    }

    bool is_constant() const { return kind == Kind::constant; }
};

inline void collect_variables(const RealTerm& t, std::set<std::size_t>& out)
{
    if (t.kind == RealTerm::Kind::variable || t.kind == RealTerm::Kind::pw) out.insert(t.var);
    for (const auto& a : t.args) collect_variables(a, out);
}

inline std::set<std::size_t> variables_of(const RealTerm& t)
{
    std::set<std::size_t> r;
    collect_variables(t, r);
    return r;
}

inline Rational evaluate(const RealTerm& t, const std::vector<Rational>& env)
{
    using K = RealTerm::Kind;
    switch (t.kind) {
    case K::constant:
        return t.value;
    case K::variable:
        return env.at(t.var);
    case K::sum: {
        Rational r = 0;
        for (const auto& a : t.args) r += evaluate(a, env);
        return r;
    }
    case K::scale:
        return t.value * evaluate(t.args[0], env);
    case K::min:
    case K::max: {
        Rational r = evaluate(t.args[0], env);
        for (std::size_t k = 1; k < t.args.size(); k++) {
            Rational v = evaluate(t.args[k], env);
            r = t.kind == K::min ? std::min(r, v) : std::max(r, v);
        }
        return r;
    }
    case K::pw:
        return t.pieces(env.at(t.var));
    }
    throw contract_violation("malformed term");
}

// The term as a function of variable x alone; other variables must not occur.
inline PiecewiseLinear to_piecewise(const RealTerm& t, std::size_t x)
{
    using K = RealTerm::Kind;
    switch (t.kind) {
    case K::constant:
        return PiecewiseLinear::constant(t.value);
    case K::variable:
        if (t.var != x) throw contract_violation("term mentions a second variable");
        return PiecewiseLinear::identity();
    case K::sum: {
        PiecewiseLinear r = PiecewiseLinear::constant(0);
        for (const auto& a : t.args) r = add(r, to_piecewise(a, x));
        return r;
    }
    case K::scale:
        return scale(t.value, to_piecewise(t.args[0], x));
    case K::min:
    case K::max: {
        PiecewiseLinear r = to_piecewise(t.args[0], x);
        for (std::size_t k = 1; k < t.args.size(); k++) r = min_max(r, to_piecewise(t.args[k], x), t.kind == K::min);
        return r;
    }
    case K::pw:
        if (t.var != x) throw contract_violation("term mentions a second variable");
        return t.pieces;
    }
    throw contract_violation("malformed term");
}

struct RealEquation
{
    std::string name;
    Sign sign;
    RealTerm rhs;
};

class RealSystem
{
public:
    RealSystem() = default;

    explicit RealSystem(std::vector<RealEquation> eqs) : eqs_(std::move(eqs))
    {
        for (std::size_t i = 0; i < eqs_.size(); i++) {
            for (auto x : variables_of(eqs_[i].rhs)) {
                if (x >= eqs_.size()) throw contract_violation("variable index out of range");
            }
            check_monotone(eqs_[i].rhs, eqs_[i].name);
            const std::vector<Rational> zeros(eqs_.size(), 0), ones(eqs_.size(), 1);
            if (evaluate(eqs_[i].rhs, zeros) < 0 || evaluate(eqs_[i].rhs, ones) > 1) {
                throw config_error("right-hand side of " + eqs_[i].name + " leaves [0,1]");
            }
        }
    }

    std::size_t size() const { return eqs_.size(); }
    const RealEquation& operator[](std::size_t i) const { return eqs_.at(i); }
    const std::vector<RealEquation>& equations() const { return eqs_; }

    // Variables each right-hand side depends on, in index order.
    std::vector<std::vector<std::size_t>> dependencies() const
    {
        std::vector<std::vector<std::size_t>> r;
        for (const auto& e : eqs_) {
            auto vs = variables_of(e.rhs);
            r.emplace_back(vs.begin(), vs.end());
        }
        return r;
    }

private:
    static void check_monotone(const RealTerm& t, const std::string& name)
    {
        if (t.kind == RealTerm::Kind::scale && t.value < 0 && !variables_of(t.args[0]).empty()) {
            throw config_error("right-hand side of " + name + " is not monotone");
        }
        if (t.kind == RealTerm::Kind::pw && !t.pieces.monotone()) {
            throw config_error("piecewise function in " + name + " is not monotone");
        }
        if (t.kind == RealTerm::Kind::pw && !t.pieces.within_unit()) {
            throw config_error("piecewise function in " + name + " leaves [0,1]");
        }
        for (const auto& a : t.args) check_monotone(a, name);
    }

    std::vector<RealEquation> eqs_;
};

// Exact solution of a single equation x = f(x).
inline Rational solve_single(const RealSystem& sys)
{
    if (sys.size() != 1) throw usage_error("exact solving needs a single equation");
    auto f = to_piecewise(sys[0].rhs, 0);
    return sys[0].sign == Sign::mu ? least_fixpoint(f) : greatest_fixpoint(f);
}

namespace detail {

class TermParser
{
public:
    TermParser(std::string_view src, std::size_t line, const std::map<std::string, std::size_t>& vars, std::size_t self)
        : self_(self), ts_(text::tokenize(src, {"(", ")", "[", "]", ",", ";", ":", "+", "-", "*", "/", "."}, line)), vars_(vars) { }

    RealTerm parse()
    {
        RealTerm t = sum();
        if (!ts_.at_end()) ts_.fail("unexpected input after term");
        return t;
    }

private:
    RealTerm sum()
    {
        std::vector<RealTerm> parts;
        bool negate = ts_.accept("-");
        parts.push_back(negate ? times(-1, product()) : product());
        for (;;) {
            if (ts_.accept("+")) {
                parts.push_back(product());
            } else if (ts_.accept("-")) {
                parts.push_back(times(-1, product()));
            } else {
                break;
            }
        }
        if (parts.size() == 1) return parts[0];
        Rational c = 0;
        std::vector<RealTerm> rest;
        for (auto& p : parts) {
            if (p.is_constant()) {
                c += p.value;
            } else {
                rest.push_back(std::move(p));
            }
        }
        if (rest.empty()) return RealTerm::constant(c);
        if (c != 0) rest.insert(rest.begin(), RealTerm::constant(c));
        return rest.size() == 1 ? rest[0] : RealTerm::of(RealTerm::Kind::sum, std::move(rest));
    }

    static RealTerm times(const Rational& c, RealTerm t)
    {
        if (t.is_constant()) return RealTerm::constant(c * t.value);
        if (c == 1) return t;
        if (t.kind == RealTerm::Kind::scale) return RealTerm::of(RealTerm::Kind::scale, {t.args[0]}, c * t.value);
        return RealTerm::of(RealTerm::Kind::scale, {std::move(t)}, c);
    }

    RealTerm product()
    {
        RealTerm t = factor();
        for (;;) {
            if (ts_.accept("*")) {
                const auto& at = ts_.peek();
                RealTerm u = factor();
                if (t.is_constant()) {
                    t = times(t.value, std::move(u));
                } else if (u.is_constant()) {
                    t = times(u.value, std::move(t));
                } else {
                    throw parse_error("product of two non-constant terms is not linear", at.line, at.column);
                }
            } else if (ts_.accept("/")) {
                const auto& at = ts_.peek();
                RealTerm u = factor();
                if (!u.is_constant() || u.value == 0) {
                    throw parse_error("division needs a non-zero constant divisor", at.line, at.column);
                }
                t = times(1 / u.value, std::move(t));
            } else {
                return t;
            }
        }
    }

    Rational number()
    {
        const auto& t = ts_.peek();
        if (t.kind != text::Token::number) ts_.fail("expected a number");
        std::string s = ts_.next().text;
        if (ts_.is(".") && ts_.peek(1).kind == text::Token::number) {
            ts_.next();
            s += "." + ts_.next().text;
        }
        return parse_rational(s);
    }

    // n or n/d
    Rational bound()
    {
        Rational r = number();
        if (ts_.accept("/")) {
            const auto& at = ts_.peek();
            Rational d = number();
            if (d == 0) throw parse_error("division by zero", at.line, at.column);
            r /= d;
        }
        return r;
    }

    RealTerm factor()
    {
        if (ts_.peek().kind == text::Token::number) return RealTerm::constant(number());
        if (ts_.accept("(")) {
            RealTerm t = sum();
            ts_.expect(")");
            return t;
        }
        if (ts_.is("min") || ts_.is("max")) {
            auto kind = ts_.next().text == "min" ? RealTerm::Kind::min : RealTerm::Kind::max;
            ts_.expect("(");
            std::vector<RealTerm> args{sum()};
            while (ts_.accept(",")) args.push_back(sum());
            ts_.expect(")");
            return args.size() == 1 ? args[0] : RealTerm::of(kind, std::move(args));
        }
        if (ts_.is("pw")) return piecewise();
        if (ts_.peek().kind == text::Token::ident) {
            const auto& t = ts_.peek();
            auto it = vars_.find(t.text);
            if (it == vars_.end()) ts_.fail("unknown variable");
            ts_.next();
            return RealTerm::variable(it->second);
        }
        ts_.fail("expected a term");
    }

    // pw([0,1/2): 1/4 + 1/2*x ; [1/2,1]: 3/8 + 1/2*x)
    RealTerm piecewise()
    {
        ts_.next();
        ts_.expect("(");
        PiecewiseLinear f;
        f.starts.clear();
        f.maps.clear();
        std::optional<std::size_t> arg;
        Rational expected = 0;
        for (;;) {
            const auto& at = ts_.peek();
            ts_.expect("[");
            Rational lo = bound();
            ts_.expect(",");
            Rational hi = bound();
            bool closed = ts_.accept("]");
            if (!closed) ts_.expect(")");
            if (lo != expected) throw parse_error("pieces must cover [0,1] without gaps", at.line, at.column);
            if (hi <= lo) throw parse_error("empty piece", at.line, at.column);
            ts_.expect(":");
            const auto& body_at = ts_.peek();
            RealTerm body = sum();
            auto vs = variables_of(body);
            if (vs.size() > 1 || (!vs.empty() && arg && *vs.begin() != *arg)) {
                throw parse_error("pieces must be affine in one variable", body_at.line, body_at.column);
            }
            if (!vs.empty()) arg = *vs.begin();
            PiecewiseLinear g = to_piecewise(body, vs.empty() ? 0 : *vs.begin());
            if (g.maps.size() != 1) throw parse_error("pieces must be affine", body_at.line, body_at.column);
            f.starts.push_back(lo);
            f.maps.push_back(g.maps[0]);
            expected = hi;
            if (closed) {
                if (hi != 1) throw parse_error("the last piece must end with 1]", at.line, at.column);
                break;
            }
            if (hi == 1) throw parse_error("the last piece must be closed: [a,1]", at.line, at.column);
            ts_.expect(";");
        }
        ts_.expect(")");
        return RealTerm::piecewise(arg.value_or(self_), std::move(f));
    }

    std::size_t self_;  // argument of a pw whose pieces are all constant
    text::TokenStream ts_;
    const std::map<std::string, std::size_t>& vars_;
};

}

/**
 * Real equation file: one "name =mu term" or "name =nu term" per line,
 * innermost first; '#' starts a comment line.
 */
inline RealSystem parse_real_system(std::string_view src)
{
    std::vector<std::tuple<std::string, Sign, std::string, std::size_t>> lines;
    std::istringstream in{std::string(src)};
    std::string raw;
    std::size_t line_no = 0;
    std::map<std::string, std::size_t> vars;
    while (std::getline(in, raw)) {
        line_no++;
        std::string_view line = text::trim(raw);
        if (line.empty() || line.front() == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string_view::npos) throw parse_error("expected 'x =mu term' or 'x =nu term'", line_no, 1);
        std::string name(text::trim(line.substr(0, eq)));
        std::string_view rest = line.substr(eq + 1);
        Sign s;
        if (rest.starts_with("mu")) {
            s = Sign::mu;
        } else if (rest.starts_with("nu")) {
            s = Sign::nu;
        } else {
            throw parse_error("expected =mu or =nu", line_no, eq + 2);
        }
        if (name.empty() || !(std::isalpha(static_cast<unsigned char>(name[0])) || name[0] == '_')) {
            throw parse_error("malformed variable name '" + name + "'", line_no, 1);
        }
        if (!vars.emplace(name, vars.size()).second) throw parse_error("duplicate variable '" + name + "'", line_no, 1);
        lines.emplace_back(name, s, std::string(raw), line_no);
    }
    if (lines.empty()) throw parse_error("no equations", line_no + 1, 1);
    std::vector<RealEquation> eqs;
    for (const auto& [name, s, raw_line, n] : lines) {
        // blank out everything up to the sign so columns stay right
        std::string body = raw_line;
        auto eq = body.find('=');
        std::fill(body.begin(), body.begin() + static_cast<std::ptrdiff_t>(eq + 3), ' ');
        eqs.push_back({name, s, detail::TermParser(body, n, vars, eqs.size()).parse()});
    }
    return RealSystem(std::move(eqs));
}

// Printed in the input syntax.
inline std::string to_string(const RealTerm& t, const RealSystem& sys)
{
    using K = RealTerm::Kind;
    auto piece = [&](const Affine& a, std::size_t x) {
        std::string v = sys[x].name;
        if (a.slope == 0) return format_rational(a.offset);
        std::string lin = a.slope == 1 ? v : format_rational(a.slope) + "*" + v;
        if (a.offset == 0) return lin;
        return format_rational(a.offset) + " + " + lin;
    };
    switch (t.kind) {
    case K::constant:
        return format_rational(t.value);
    case K::variable:
        return sys[t.var].name;
    case K::sum: {
        std::vector<std::string> parts;
        for (const auto& a : t.args) parts.push_back(to_string(a, sys));
        return text::join(parts, " + ");
    }
    case K::scale: {
        std::string inner = to_string(t.args[0], sys);
        if (t.args[0].kind == K::sum) inner = "(" + inner + ")";
        return format_rational(t.value) + "*" + inner;
    }
    case K::min:
    case K::max: {
        std::vector<std::string> parts;
        for (const auto& a : t.args) parts.push_back(to_string(a, sys));
        return std::string(t.kind == K::min ? "min(" : "max(") + text::join(parts, ", ") + ")";
    }
    case K::pw: {
        std::vector<std::string> parts;
        for (std::size_t k = 0; k < t.pieces.maps.size(); k++) {
            bool last = k + 1 == t.pieces.maps.size();
            parts.push_back("[" + format_rational(t.pieces.starts[k]) + "," + format_rational(t.pieces.end(k)) +
                            (last ? "]" : ")") + ": " + piece(t.pieces.maps[k], t.var));
        }
        return "pw(" + text::join(parts, " ; ") + ")";
    }
    }
    return "";
}

/**
 * Parameters of the decrease predicate: a_0 = 0 < a_1 < ... < a_l and
 * c in (0,1]. decrease(v,b,l) holds iff l is some a_i, or a_l ≤ b and
 * b-l ≥ c(v-b), or a_i ≤ b < a_{i+1} and b-l ≥ c(a_{i+1}-b).
 */
struct DecreaseParams
{
    std::vector<Rational> a{0};
    Rational c = 1;
    std::vector<std::string> warnings;
};

inline void validate(const DecreaseParams& p)
{
    if (p.a.empty() || p.a[0] != 0) throw config_error("decrease constants must start with 0");
    for (std::size_t k = 1; k < p.a.size(); k++) {
        if (p.a[k] <= p.a[k - 1]) throw config_error("decrease constants must increase strictly");
    }
    if (p.a.back() > 1) throw config_error("decrease constants must lie in [0,1]");
    if (p.c <= 0 || p.c > 1) throw config_error("decrease ratio c must lie in (0,1]");
}

inline bool decrease_holds(const DecreaseParams& p, const Rational& v, const Rational& b, const Rational& l)
{
    if (std::find(p.a.begin(), p.a.end(), l) != p.a.end()) return true;
    if (p.a.back() <= b && b - l >= p.c * (v - b)) return true;
    for (std::size_t i = 0; i + 1 < p.a.size(); i++) {
        if (p.a[i] <= b && b < p.a[i + 1] && b - l >= p.c * (p.a[i + 1] - b)) return true;
    }
    return false;
}

namespace detail {

struct Shape
{
    std::set<Rational> breaks;
    std::vector<Rational> slopes;
};

// Breakpoints and slopes of f, plus the points where a piece other than
// the last meets the diagonal: below the least fixpoint those are the
// places where ∃ has to stop descending.
inline void add_pieces(const PiecewiseLinear& f, Shape& s)
{
    s.breaks.insert(f.starts.begin(), f.starts.end());
    for (std::size_t k = 0; k < f.maps.size(); k++) {
        const auto& [p, q] = f.maps[k];
        s.slopes.push_back(p);
        if (k + 1 < f.maps.size() && p < 1) {
            Rational fix = q / (1 - p);
            if (f.starts[k] <= fix && fix < f.end(k)) s.breaks.insert(fix);
        }
    }
}

inline void collect_shape(const RealTerm& t, Shape& s)
{
    if (t.kind == RealTerm::Kind::pw) add_pieces(t.pieces, s);
    if (t.kind == RealTerm::Kind::scale && t.args[0].kind == RealTerm::Kind::variable) s.slopes.push_back(t.value);
    if (t.kind == RealTerm::Kind::variable) s.slopes.push_back(1);
    for (const auto& a : t.args) collect_shape(a, s);
}

}

/**
 * a = the breakpoints of the μ equations (without 1) together with the
 * diagonal crossings of their pieces other than the last; c = min over
 * slopes 0 < p < 1 of (1-p)/p, at most 1. A univariate right-hand side
 * contributes its combined piecewise form, otherwise its pw subterms and
 * the coefficients of its variables count. Slopes ≥ 1 in a μ equation
 * only cost completeness and are reported as warnings.
 */
inline DecreaseParams derive_decrease_params(const RealSystem& sys)
{
    DecreaseParams p;
    std::set<Rational> breaks{0};
    for (const auto& e : sys.equations()) {
        detail::Shape s;
        auto vs = variables_of(e.rhs);
        if (vs.size() == 1) {
            detail::add_pieces(to_piecewise(e.rhs, *vs.begin()), s);
        } else {
            detail::collect_shape(e.rhs, s);
        }
        for (const auto& b : s.breaks) {
            if (b < 1 && e.sign == Sign::mu) breaks.insert(b);
        }
        for (const auto& slope : s.slopes) {
            if (slope > 0 && slope < 1) {
                p.c = std::min(p.c, (1 - slope) / slope);
            } else if (slope >= 1 && e.sign == Sign::mu) {
                std::string w = "slope " + format_rational(slope) + " in " + e.name + " may make the game incomplete";
                if (std::find(p.warnings.begin(), p.warnings.end(), w) == p.warnings.end()) p.warnings.push_back(w);
            }
        }
    }
    p.a.assign(breaks.begin(), breaks.end());
    return p;
}

/**
 * Finite game tree of the modified game. Children of a node with index j
 * are the indices f_j depends on: for any other index ∃ plays 0, which
 * leaves ∀ no move there. A node is a leaf iff its nearest ancestor with
 * the same index is separated from it by smaller indices only.
 */
struct GameNode
{
    std::size_t index;
    std::optional<std::size_t> parent;
    std::optional<std::size_t> leaf_of;  // the ancestor closing the cycle
    std::vector<std::size_t> children;
    std::size_t depth = 0;

    bool leaf() const { return leaf_of.has_value(); }
};

struct GameTree
{
    std::vector<GameNode> nodes;  // preorder, root first

    std::size_t leaf_count() const
    {
        return static_cast<std::size_t>(std::count_if(nodes.begin(), nodes.end(), [](const GameNode& n) { return n.leaf(); }));
    }

    std::size_t depth() const
    {
        std::size_t d = 0;
        for (const auto& n : nodes) d = std::max(d, n.depth);
        return d;
    }

    // Index sequence in preorder with leaves marked, e.g. "1(1* 2(1(1* 2*) 2*))" in 1-based indices.
    std::string shape(std::size_t n = 0) const
    {
        const auto& node = nodes[n];
        std::string s = std::to_string(node.index + 1);
        if (node.leaf()) return s + "*";
        if (node.children.empty()) return s;
        std::vector<std::string> cs;
        for (auto c : node.children) cs.push_back(shape(c));
        return s + "(" + text::join(cs, " ") + ")";
    }
};

inline GameTree build_game_tree(const std::vector<std::vector<std::size_t>>& deps, std::size_t start,
                                std::size_t node_cap = 100000)
{
    if (start >= deps.size()) throw usage_error("start index out of range");
    GameTree t;
    std::function<void(std::size_t, std::optional<std::size_t>, std::size_t)> grow =
        [&](std::size_t index, std::optional<std::size_t> parent, std::size_t depth) {
            if (t.nodes.size() >= node_cap) {
                throw resource_error("game tree exceeds " + std::to_string(node_cap) + " nodes");
            }
            std::size_t id = t.nodes.size();
            t.nodes.push_back({index, parent, std::nullopt, {}, depth});
            if (parent) t.nodes[*parent].children.push_back(id);
            for (auto a = parent; a; a = t.nodes[*a].parent) {
                if (t.nodes[*a].index == index) {
                    t.nodes[id].leaf_of = *a;
                    return;
                }
                if (t.nodes[*a].index > index) break;
            }
            for (auto k : deps[index]) grow(k, id, depth + 1);
        };
    grow(start, std::nullopt, 0);
    return t;
}

inline GameTree build_game_tree(const RealSystem& sys, std::size_t start, std::size_t node_cap = 100000)
{
    return build_game_tree(sys.dependencies(), start, node_cap);
}

// Every index depends on every index: the unpruned tree.
inline std::vector<std::vector<std::size_t>> full_dependencies(std::size_t m)
{
    std::vector<std::size_t> all(m);
    std::iota(all.begin(), all.end(), 0);
    return std::vector<std::vector<std::size_t>>(m, all);
}

namespace detail {

// S-expression with a width-based pretty printer.
struct SExpr
{
    std::string atom;
    std::vector<SExpr> items;
    std::string comment;  // printed after the expression when it gets its own lines

    static SExpr a(std::string s) { return {std::move(s), {}, {}}; }
    static SExpr list(std::vector<SExpr> xs, std::string comment = {}) { return {{}, std::move(xs), std::move(comment)}; }

    bool is_atom() const { return items.empty() && !atom.empty(); }

    std::string flat() const
    {
        if (is_atom()) return atom;
        std::string s = "(";
        for (std::size_t k = 0; k < items.size(); k++) s += (k ? " " : "") + items[k].flat();
        return s + ")";
    }

    void print(std::string& out, std::size_t indent, std::size_t width) const
    {
        std::string f = flat();
        if (is_atom() || indent + f.size() <= width) {
            out += f;
            return;
        }
        out += "(";
        // everything but the last item stays on the first line when short; and/or list one per line
        const bool listing = items[0].atom == "and" || items[0].atom == "or";
        std::size_t k = 1;
        out += items[0].flat();
        for (; k + 1 < items.size() && !listing && items[k].flat().size() < 40; k++) out += " " + items[k].flat();
        if (!comment.empty()) out += " ; " + comment;
        for (; k < items.size(); k++) {
            out += "\n" + std::string(indent + 2, ' ');
            items[k].print(out, indent + 2, width);
        }
        out += ")";
    }
};

inline SExpr num(const Rational& r)
{
    return SExpr::a(smt_rational(r));
}

inline SExpr op(std::string head, std::vector<SExpr> args)
{
    args.insert(args.begin(), SExpr::a(std::move(head)));
    return SExpr::list(std::move(args));
}

inline bool simple_symbol(const std::string& s)
{
    if (s.empty() || std::isdigit(static_cast<unsigned char>(s[0]))) return false;
    return std::all_of(s.begin(), s.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || std::string_view("~!@$%^&*_-+=<>.?/").find(c) != std::string_view::npos;
    });
}

inline std::string symbol(const std::string& s) { return simple_symbol(s) ? s : "|" + s + "|"; }

inline SExpr affine(const Affine& m, const SExpr& x)
{
    if (m.slope == 0) return num(m.offset);
    SExpr lin = m.slope == 1 ? x : op("*", {num(m.slope), x});
    if (m.offset == 0) return lin;
    return op("+", {num(m.offset), lin});
}

inline SExpr term_sexpr(const RealTerm& t, const std::vector<SExpr>& vars)
{
    using K = RealTerm::Kind;
    switch (t.kind) {
    case K::constant:
        return num(t.value);
    case K::variable:
        return vars[t.var];
    case K::sum: {
        std::vector<SExpr> xs;
        for (const auto& a : t.args) xs.push_back(term_sexpr(a, vars));
        return op("+", std::move(xs));
    }
    case K::scale:
        return op("*", {num(t.value), term_sexpr(t.args[0], vars)});
    case K::min:
    case K::max: {
        SExpr r = term_sexpr(t.args[0], vars);
        for (std::size_t k = 1; k < t.args.size(); k++) {
            SExpr b = term_sexpr(t.args[k], vars);
            r = op("ite", {op(t.kind == K::min ? "<=" : ">=", {r, b}), r, b});
        }
        return r;
    }
    case K::pw: {
        const auto& f = t.pieces;
        const SExpr& x = vars[t.var];
        SExpr r = affine(f.maps.back(), x);
        for (std::size_t k = f.maps.size() - 1; k-- > 0;) {
            r = op("ite", {op("<", {x, num(f.starts[k + 1])}), affine(f.maps[k], x), r});
        }
        return r;
    }
    }
    throw contract_violation("malformed term");
}

}

struct Query
{
    enum class Mode { check, optimize };

    Mode mode = Mode::optimize;
    std::size_t index = 0;  // equation the game starts at
    Rational value = 0;     // for check mode
};

/**
 * SMT-LIB script for the modified game. The game tree is spelled out with
 * a universally quantified b and existentially quantified l's per inner
 * node; leaves compare against the values recorded at the node that
 * closes the cycle.
 */
inline std::string emit_smtlib(const RealSystem& sys, const DecreaseParams& params, const Query& q,
                               std::size_t width = 100)
{
    using detail::op;
    using detail::SExpr;
    validate(params);
    if (q.index >= sys.size()) throw usage_error("query index out of range");
    const auto deps = sys.dependencies();
    const GameTree tree = build_game_tree(deps, q.index);
    const SExpr zero = detail::num(0), one = detail::num(1);
    std::string out;
    auto emit = [&](const SExpr& e) {
        e.print(out, 0, width);
        out += "\n";
    };

    out += "; modified fixpoint game, " + std::to_string(sys.size()) + (sys.size() == 1 ? " equation" : " equations") +
           ", start index " + std::to_string(q.index + 1) + "\n";
    out += "(set-logic LRA)\n\n";

    out += "; right-hand sides\n";
    for (std::size_t i = 0; i < sys.size(); i++) {
        out += "; " + sys[i].name + " =" + sign_name(sys[i].sign) + " " + to_string(sys[i].rhs, sys) + "\n";
        std::vector<SExpr> params_list, vars(sys.size());
        for (auto x : deps[i]) {
            vars[x] = SExpr::a(detail::symbol(sys[x].name));
            params_list.push_back(SExpr::list({vars[x], SExpr::a("Real")}));
        }
        emit(op("define-fun", {SExpr::a("f" + std::to_string(i + 1)), SExpr::list(params_list), SExpr::a("Real"),
                               detail::term_sexpr(sys[i].rhs, vars)}));
    }

    out += "\n; decrease with a = (";
    for (std::size_t k = 0; k < params.a.size(); k++) out += (k ? ", " : "") + format_rational(params.a[k]);
    out += "), c = " + format_rational(params.c) + "\n";
    {
        const SExpr v = SExpr::a("v"), b = SExpr::a("b"), l = SExpr::a("l");
        std::vector<SExpr> clauses;
        for (const auto& a : params.a) clauses.push_back(op("=", {l, detail::num(a)}));
        clauses.push_back(op("and", {op("<=", {detail::num(params.a.back()), b}),
                                     op(">=", {op("-", {b, l}), op("*", {detail::num(params.c), op("-", {v, b})})})}));
        for (std::size_t i = 0; i + 1 < params.a.size(); i++) {
            const SExpr next = detail::num(params.a[i + 1]);
            clauses.push_back(op("and", {op("<=", {detail::num(params.a[i]), b}), op("<", {b, next}),
                                         op(">=", {op("-", {b, l}), op("*", {detail::num(params.c), op("-", {next, b})})})}));
        }
        emit(op("define-fun", {SExpr::a("decrease"),
                               SExpr::list({SExpr::list({v, SExpr::a("Real")}), SExpr::list({b, SExpr::a("Real")}),
                                            SExpr::list({l, SExpr::a("Real")})}),
                               SExpr::a("Bool"), op("or", std::move(clauses))}));
    }

    // v of each inner node: the root's parameter, else the parent's l for its index
    std::vector<SExpr> vexpr(tree.nodes.size());
    auto bname = [](std::size_t n) { return SExpr::a("b" + std::to_string(n)); };
    auto lname = [](std::size_t n, std::size_t k) { return SExpr::a("l" + std::to_string(n) + "_" + std::to_string(k + 1)); };
    std::function<SExpr(std::size_t)> node_formula = [&](std::size_t n) -> SExpr {
        const GameNode& node = tree.nodes[n];
        const std::size_t j = node.index;
        std::vector<SExpr> body;
        std::vector<SExpr> bound;
        std::vector<SExpr> args;
        for (auto k : deps[j]) {
            bound.push_back(SExpr::list({lname(n, k), SExpr::a("Real")}));
            body.push_back(op("<=", {zero, lname(n, k)}));
            body.push_back(op("<=", {lname(n, k), one}));
            args.push_back(lname(n, k));
        }
        SExpr fj = args.empty() ? SExpr::a("f" + std::to_string(j + 1)) : op("f" + std::to_string(j + 1), args);
        body.push_back(op(">=", {fj, bname(n)}));
        for (auto c : node.children) {
            const GameNode& child = tree.nodes[c];
            const SExpr l = lname(n, child.index);
            if (child.leaf()) {
                const std::size_t a = *child.leaf_of;
                if (sys[child.index].sign == Sign::nu) {
                    body.push_back(op("<=", {l, vexpr[a]}));
                } else {
                    body.push_back(op("<=", {l, bname(a)}));
                    body.push_back(op("decrease", {vexpr[a], bname(a), l}));
                }
            } else {
                vexpr[c] = l;
                body.push_back(node_formula(c));
            }
        }
        SExpr conj = body.size() == 1 ? body[0] : op("and", std::move(body));
        SExpr inner = bound.empty() ? conj : SExpr::list({SExpr::a("exists"), SExpr::list(bound), conj});
        SExpr guard = op("and", {op("<", {zero, bname(n)}), op("<", {bname(n), vexpr[n]})});
        return SExpr::list({SExpr::a("forall"), SExpr::list({SExpr::list({bname(n), SExpr::a("Real")})}),
                            op("=>", {guard, inner})});
    };
    vexpr[0] = SExpr::a("v");
    out += "\n; game tree " + tree.shape() + "\n";
    emit(op("define-fun", {SExpr::a("win-game"), SExpr::list({SExpr::list({SExpr::a("v"), SExpr::a("Real")})}),
                           SExpr::a("Bool"), node_formula(0)}));

    out += "\n(declare-const v Real)\n";
    if (q.mode == Query::Mode::check) {
        out += "(assert (= v " + smt_rational(q.value) + "))\n";
        out += "(assert (win-game v))\n";
        out += "(check-sat)\n";
    } else {
        out += "(assert (and (<= 0.0 v) (<= v 1.0)))\n";
        out += "(assert (win-game v))\n";
        out += "; v is the greatest value for which the game is won\n";
        emit(op("assert", {SExpr::list({SExpr::a("forall"), SExpr::list({SExpr::list({SExpr::a("w"), SExpr::a("Real")})}),
                                        op("=>", {op("and", {op("<=", {zero, SExpr::a("w")}), op("<=", {SExpr::a("w"), one}),
                                                             op("win-game", {SExpr::a("w")})}),
                                                  op("<=", {SExpr::a("w"), SExpr::a("v")})})})}));
        out += "(check-sat)\n(get-model)\n";
    }
    return out;
}

}

#endif
