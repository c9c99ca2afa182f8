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

#ifndef FPGAME_DOWNSET_HPP
#define FPGAME_DOWNSET_HPP

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "fpgame/powerset.hpp"

namespace fpg {

// A finite partial order, stored as its reflexive-transitive closure.
class Poset
{
public:
    Poset() = default;

    Poset(std::vector<std::string> names, const std::vector<std::pair<std::string, std::string>>& below)
        : names_(std::move(names)), leq_(names_.size(), std::vector<bool>(names_.size(), false))
    {
        for (std::size_t k = 0; k < names_.size(); k++) {
            if (!index_.emplace(names_[k], k).second) throw usage_error("duplicate element '" + names_[k] + "'");
            leq_[k][k] = true;
        }
        for (const auto& [a, b] : below) leq_[index_of(a)][index_of(b)] = true;
        const std::size_t n = names_.size();
        for (std::size_t k = 0; k < n; k++) {
            for (std::size_t i = 0; i < n; i++) {
                for (std::size_t j = 0; j < n; j++) {
                    if (leq_[i][k] && leq_[k][j]) leq_[i][j] = true;
                }
            }
        }
        for (std::size_t i = 0; i < n; i++) {
            for (std::size_t j = i + 1; j < n; j++) {
                if (leq_[i][j] && leq_[j][i]) {
                    throw usage_error("order is not antisymmetric on '" + names_[i] + "' and '" + names_[j] + "'");
                }
            }
        }
    }

    // Discrete order on the given names.
    static Poset antichain(std::vector<std::string> names) { return Poset(std::move(names), {}); }

    std::size_t size() const { return names_.size(); }
    const std::vector<std::string>& names() const { return names_; }
    bool leq(std::size_t a, std::size_t b) const { return leq_[a][b]; }

    std::size_t index_of(const std::string& name) const
    {
        auto it = index_.find(name);
        if (it == index_.end()) throw usage_error("unknown poset element '" + name + "'");
        return it->second;
    }

private:
    std::vector<std::string> names_;
    std::vector<std::vector<bool>> leq_;
    std::map<std::string, std::size_t> index_;
};

/**
 * Downward-closed subsets of a finite poset under inclusion. By Birkhoff
 * duality every finite distributive lattice arises this way. The basis is
 * the principal downsets ↓p, which are exactly the join-irreducibles.
 */
class DownsetLattice
{
public:
    using element = Bits;
    static constexpr bool join_prime_basis = true;

    explicit DownsetLattice(Poset poset) : poset_(std::move(poset))
    {
        for (std::size_t p = 0; p < poset_.size(); p++) basis_.push_back(principal(p));
    }

    const Poset& poset() const { return poset_; }

    element principal(std::size_t p) const
    {
        Bits b(poset_.size());
        for (std::size_t q = 0; q < poset_.size(); q++) {
            if (poset_.leq(q, p)) b.set(q);
        }
        return b;
    }

    // The downset generated by the named elements.
    element generated(const std::vector<std::string>& gens) const
    {
        Bits b(poset_.size());
        for (const auto& g : gens) b |= principal(poset_.index_of(g));
        return b;
    }

    bool is_downset(const element& a) const
    {
        if (a.size() != poset_.size()) return false;
        for (auto p = a.find_first(); p != Bits::npos; p = a.find_next(p)) {
            if (!principal(p).is_subset_of(a)) return false;
        }
        return true;
    }

    bool leq(const element& a, const element& b) const
    {
        check(a);
        check(b);
        return a.is_subset_of(b);
    }

    element join(const element& a, const element& b) const
    {
        check(a);
        check(b);
        return a | b;
    }

    element meet(const element& a, const element& b) const
    {
        check(a);
        check(b);
        return a & b;
    }

    // l ⇒ m = {p | ↓p ∩ l ⊆ m}
    element implies(const element& l, const element& m) const
    {
        check(l);
        check(m);
        Bits r(poset_.size());
        for (std::size_t p = 0; p < poset_.size(); p++) {
            if ((principal(p) & l).is_subset_of(m)) r.set(p);
        }
        return r;
    }

    element bottom() const { return Bits(poset_.size()); }
    element top() const { return ~Bits(poset_.size()); }
    const std::vector<element>& basis() const { return basis_; }
    std::size_t height() const { return poset_.size(); }

    std::vector<element> elements(std::size_t cap) const
    {
        const std::size_t n = poset_.size();
        if (n >= 40 || (std::size_t{1} << n) > cap) {
            throw resource_error("downset lattice over " + std::to_string(n) + " elements exceeds the enumeration cap");
        }
        std::vector<element> r;
        for (unsigned long v = 0; v < (1ul << n); v++) {
            Bits b(n, v);
            if (is_downset(b)) r.push_back(std::move(b));
        }
        return r;
    }

    // Printed by its maximal elements: downset(p q).
    std::string format(const element& a) const
    {
        check(a);
        std::vector<std::string> gens;
        for (auto p = a.find_first(); p != Bits::npos; p = a.find_next(p)) {
            bool maximal = true;
            for (auto q = a.find_first(); q != Bits::npos; q = a.find_next(q)) {
                if (q != p && poset_.leq(p, q)) maximal = false;
            }
            if (maximal) gens.push_back(poset_.names()[p]);
        }
        return "downset(" + text::join(gens, " ") + ")";
    }

    element parse(const std::string& s) const
    {
        std::string_view v = text::trim(s);
        if (!v.starts_with("downset(") || !v.ends_with(")")) {
            throw usage_error("expected downset(...), got '" + s + "'");
        }
        v.remove_prefix(8);
        v.remove_suffix(1);
        std::string inner(v);
        std::replace(inner.begin(), inner.end(), ',', ' ');
        return generated(text::words(inner));
    }

private:
    void check(const element& a) const
    {
        if (a.size() != poset_.size()) throw usage_error("element does not belong to this downset lattice");
    }

    Poset poset_;
    std::vector<element> basis_;
};

static_assert(FiniteLattice<DownsetLattice>);

}

#endif
