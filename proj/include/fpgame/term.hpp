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

#ifndef FPGAME_TERM_HPP
#define FPGAME_TERM_HPP

#include <functional>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "fpgame/common.hpp"
#include "fpgame/move_formula.hpp"

namespace fpg {

/**
 * A monotone function symbol. moves(b), when present, returns the
 * symbolic ∃-moves for basis element b: a formula over atoms [b', k] where
 * k is the argument position, denoting {args | basis[b] ⊑ apply(args)}.
 * Operators without a move rule fall back to enumeration.
 */
template <class Elem>
struct Operator
{
    std::string name;
    std::size_t arity = 1;
    std::function<Elem(const std::vector<Elem>&)> apply;
    std::function<MoveFormula(std::size_t)> moves;
};

template <class Elem>
using OperatorPtr = std::shared_ptr<const Operator<Elem>>;

/**
 * Immutable right-hand-side term. Join and meet are n-ary; the empty
 * join is ⊥ and the empty meet is ⊤. Constants may carry a label used
 * when printing or translating back to formulas.
 */
template <class Elem>
class Term
{
public:
    enum class Kind { constant, variable, join, meet, apply };

    static Term constant(Elem value, std::string label = {})
    {
        Node n;
        n.kind = Kind::constant;
        n.value = std::move(value);
        n.label = std::move(label);
        return Term(std::move(n));
    }

    static Term variable(std::size_t index)
    {
        Node n;
        n.kind = Kind::variable;
        n.var = index;
        return Term(std::move(n));
    }

    static Term join(std::vector<Term> cs) { return nary(Kind::join, std::move(cs)); }
    static Term meet(std::vector<Term> cs) { return nary(Kind::meet, std::move(cs)); }

    static Term apply(OperatorPtr<Elem> op, std::vector<Term> args)
    {
        if (!op) throw config_error("application of a null operator");
        if (args.size() != op->arity) {
            throw config_error("operator '" + op->name + "' expects " + std::to_string(op->arity) + " arguments");
        }
        Node n;
        n.kind = Kind::apply;
        n.op = std::move(op);
        n.children = std::move(args);
        return Term(std::move(n));
    }

    Kind kind() const { return node_->kind; }
    const Elem& value() const { return node_->value; }
    const std::string& label() const { return node_->label; }
    std::size_t var() const { return node_->var; }
    const OperatorPtr<Elem>& op() const { return node_->op; }
    const std::vector<Term>& children() const { return node_->children; }

    // Stable identity of the shared node, for memoization.
    const void* id() const { return node_.get(); }

    void collect_variables(std::set<std::size_t>& out) const
    {
        if (kind() == Kind::variable) out.insert(var());
        for (const auto& c : children()) c.collect_variables(out);
    }

    std::set<std::size_t> variables() const
    {
        std::set<std::size_t> r;
        collect_variables(r);
        return r;
    }

    std::size_t depth() const
    {
        std::size_t d = 0;
        for (const auto& c : children()) d = std::max(d, c.depth());
        return d + 1;
    }

private:
    struct Node
    {
        Kind kind;
        Elem value{};
        std::string label;
        std::size_t var = 0;
        OperatorPtr<Elem> op;
        std::vector<Term> children;
    };

    explicit Term(Node n) : node_(std::make_shared<const Node>(std::move(n))) { }

    static Term nary(Kind k, std::vector<Term> cs)
    {
        Node n;
        n.kind = k;
        n.children = std::move(cs);
        return Term(std::move(n));
    }

    std::shared_ptr<const Node> node_;
};

}

#endif
