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

#ifndef FPGAME_POWERSET_HPP
#define FPGAME_POWERSET_HPP

#include <map>
#include <string>
#include <vector>

#include <boost/dynamic_bitset.hpp>

#include "fpgame/lattice.hpp"
#include "fpgame/text.hpp"

namespace fpg {

using Bits = boost::dynamic_bitset<>;

/**
 * Subsets of a finite ground set ordered by inclusion. The basis is the
 * set of singletons, in ground-set order.
 */
class PowersetLattice
{
public:
    using element = Bits;
    static constexpr bool join_prime_basis = true;

    explicit PowersetLattice(std::vector<std::string> ground) : names_(std::move(ground))
    {
        for (std::size_t k = 0; k < names_.size(); k++) {
            if (!index_.emplace(names_[k], k).second) throw usage_error("duplicate element '" + names_[k] + "'");
            basis_.push_back(singleton(k));
        }
    }

    std::size_t ground_size() const { return names_.size(); }
    const std::vector<std::string>& names() const { return names_; }

    std::size_t index_of(const std::string& name) const
    {
        auto it = index_.find(name);
        if (it == index_.end()) throw usage_error("unknown element '" + name + "'");
        return it->second;
    }

    element singleton(std::size_t k) const
    {
        Bits b(names_.size());
        b.set(k);
        return b;
    }

    element make(const std::vector<std::string>& members) const
    {
        Bits b(names_.size());
        for (const auto& n : members) b.set(index_of(n));
        return b;
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

    element bottom() const { return Bits(names_.size()); }
    element top() const { return ~Bits(names_.size()); }
    const std::vector<element>& basis() const { return basis_; }
    std::size_t height() const { return names_.size(); }

    std::vector<element> elements(std::size_t cap) const
    {
        if (names_.size() >= 63 || (std::size_t{1} << names_.size()) > cap) {
            throw resource_error("powerset of " + std::to_string(names_.size()) + " elements exceeds the enumeration cap");
        }
        std::vector<element> r;
        for (unsigned long v = 0; v < (1ul << names_.size()); v++) r.emplace_back(names_.size(), v);
        return r;
    }

    std::string format(const element& a) const
    {
        check(a);
        if (a.none()) return "∅";
        std::vector<std::string> members;
        for (auto k = a.find_first(); k != Bits::npos; k = a.find_next(k)) members.push_back(names_[k]);
        return "{" + text::join(members, ",") + "}";
    }

    element parse(const std::string& s) const { return make(text::brace_list(s)); }

private:
    void check(const element& a) const
    {
        if (a.size() != names_.size()) throw usage_error("element does not belong to this powerset lattice");
    }

    std::vector<std::string> names_;
    std::map<std::string, std::size_t> index_;
    std::vector<element> basis_;
};

static_assert(FiniteLattice<PowersetLattice>);

}

#endif
