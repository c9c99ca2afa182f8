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

#ifndef FPGAME_POINTWISE_HPP
#define FPGAME_POINTWISE_HPP

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "fpgame/lattice.hpp"
#include "fpgame/text.hpp"

namespace fpg {

/**
 * The function lattice L^S over a finite index set S, ordered pointwise.
 * The basis consists of b_x (b at x, ⊥ elsewhere), enumerated state by
 * state in the order of inner().basis().
 */
template <FiniteLattice L>
class PointwiseLattice
{
public:
    using element = std::vector<element_t<L>>;
    static constexpr bool join_prime_basis = L::join_prime_basis;

    PointwiseLattice(std::vector<std::string> states, std::shared_ptr<const L> inner)
        : states_(std::move(states)), inner_(std::move(inner))
    {
        for (std::size_t x = 0; x < states_.size(); x++) {
            if (!index_.emplace(states_[x], x).second) throw usage_error("duplicate state '" + states_[x] + "'");
            for (const auto& b : inner_->basis()) basis_.push_back(at(x, b));
        }
    }

    const L& inner() const { return *inner_; }
    std::shared_ptr<const L> inner_ptr() const { return inner_; }
    const std::vector<std::string>& states() const { return states_; }

    std::size_t state_index(const std::string& name) const
    {
        auto it = index_.find(name);
        if (it == index_.end()) throw usage_error("unknown state '" + name + "'");
        return it->second;
    }

    // b at state x, ⊥ elsewhere.
    element at(std::size_t x, const element_t<L>& b) const
    {
        element r(states_.size(), inner_->bottom());
        r[x] = b;
        return r;
    }

    std::size_t basis_index(std::size_t x, std::size_t inner_basis) const
    {
        return x * inner_->basis().size() + inner_basis;
    }

    // (state, inner basis index) of a basis index
    std::pair<std::size_t, std::size_t> split_basis(std::size_t k) const
    {
        const std::size_t n = inner_->basis().size();
        return {k / n, k % n};
    }

    element constant(const element_t<L>& c) const { return element(states_.size(), c); }

    bool leq(const element& a, const element& b) const
    {
        check(a);
        check(b);
        for (std::size_t x = 0; x < a.size(); x++) {
            if (!inner_->leq(a[x], b[x])) return false;
        }
        return true;
    }

    element join(const element& a, const element& b) const
    {
        check(a);
        check(b);
        element r(a.size(), inner_->bottom());
        for (std::size_t x = 0; x < a.size(); x++) r[x] = inner_->join(a[x], b[x]);
        return r;
    }

    element meet(const element& a, const element& b) const
    {
        check(a);
        check(b);
        element r(a.size(), inner_->bottom());
        for (std::size_t x = 0; x < a.size(); x++) r[x] = inner_->meet(a[x], b[x]);
        return r;
    }

    element bottom() const { return constant(inner_->bottom()); }
    element top() const { return constant(inner_->top()); }
    const std::vector<element>& basis() const { return basis_; }
    std::size_t height() const { return states_.size() * inner_->height(); }

    std::vector<element> elements(std::size_t cap) const { return all_tuples(*inner_, states_.size(), cap); }

    std::string format(const element& a) const
    {
        check(a);
        std::vector<std::string> parts;
        for (std::size_t x = 0; x < a.size(); x++) parts.push_back(states_[x] + ": " + inner_->format(a[x]));
        return "[" + text::join(parts, ", ") + "]";
    }

    // "[a: v, b: w]"; unlisted states are ⊥.
    element parse(const std::string& s) const
    {
        std::string_view v = text::trim(s);
        if (v.size() < 2 || v.front() != '[' || v.back() != ']') {
            throw usage_error("expected [state: value, ...], got '" + s + "'");
        }
        element r = bottom();
        v = v.substr(1, v.size() - 2);
        if (text::trim(v).empty()) return r;
        std::size_t depth = 0, start = 0;
        std::vector<std::string> parts;
        for (std::size_t k = 0; k <= v.size(); k++) {
            if (k == v.size() || (v[k] == ',' && depth == 0)) {
                parts.emplace_back(text::trim(v.substr(start, k - start)));
                start = k + 1;
            } else if (v[k] == '(' || v[k] == '{' || v[k] == '[') {
                depth++;
            } else if (v[k] == ')' || v[k] == '}' || v[k] == ']') {
                depth--;
            }
        }
        for (const auto& part : parts) {
            auto colon = part.find(':');
            if (colon == std::string::npos) throw usage_error("malformed entry '" + part + "'");
            r[state_index(std::string(text::trim(std::string_view(part).substr(0, colon))))] =
                inner_->parse(part.substr(colon + 1));
        }
        return r;
    }

private:
    void check(const element& a) const
    {
        if (a.size() != states_.size()) throw usage_error("element does not belong to this function lattice");
    }

    std::vector<std::string> states_;
    std::shared_ptr<const L> inner_;
    std::map<std::string, std::size_t> index_;
    std::vector<element> basis_;
};

}

#endif
