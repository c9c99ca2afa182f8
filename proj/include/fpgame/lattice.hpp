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

#ifndef FPGAME_LATTICE_HPP
#define FPGAME_LATTICE_HPP

#include <algorithm>
#include <concepts>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fpgame/common.hpp"

namespace fpg {

/**
 * A finite lattice with a designated basis (⊥ excluded). Elements are
 * immutable values with structural equality and a canonical total order,
 * so they can key ordered containers.
 *
 * On a finite lattice the way-below relation coincides with ⊑, so no
 * separate operation is required. height() counts strict covers on a
 * longest chain.
 */
template <class L>
concept FiniteLattice = requires(const L& lat, const typename L::element& a, std::size_t cap,
                                 const std::string& text) {
    typename L::element;
    requires std::totally_ordered<typename L::element>;
    { lat.leq(a, a) } -> std::same_as<bool>;
    { lat.join(a, a) } -> std::same_as<typename L::element>;
    { lat.meet(a, a) } -> std::same_as<typename L::element>;
    { lat.bottom() } -> std::same_as<typename L::element>;
    { lat.top() } -> std::same_as<typename L::element>;
    { lat.basis() } -> std::same_as<const std::vector<typename L::element>&>;
    { lat.height() } -> std::same_as<std::size_t>;
    { lat.elements(cap) } -> std::same_as<std::vector<typename L::element>>;
    { lat.format(a) } -> std::same_as<std::string>;
    { lat.parse(text) } -> std::same_as<typename L::element>;
    // true when b ⊑ x ⊔ y implies b ⊑ x or b ⊑ y for every basis element b
    { L::join_prime_basis } -> std::convertible_to<bool>;
};

template <FiniteLattice L>
using element_t = typename L::element;

template <FiniteLattice L>
using tuple_t = std::vector<typename L::element>;

inline constexpr std::size_t default_enumeration_cap = 1u << 20;

template <FiniteLattice L>
element_t<L> join_all(const L& lat, const std::vector<element_t<L>>& xs)
{
    element_t<L> r = lat.bottom();
    for (const auto& x : xs) r = lat.join(r, x);
    return r;
}

template <FiniteLattice L>
element_t<L> meet_all(const L& lat, const std::vector<element_t<L>>& xs)
{
    element_t<L> r = lat.top();
    for (const auto& x : xs) r = lat.meet(r, x);
    return r;
}

template <FiniteLattice L>
bool way_below(const L& lat, const element_t<L>& b, const element_t<L>& l)
{
    return lat.leq(b, l);
}

// Indices of the basis elements below l.
template <FiniteLattice L>
std::vector<std::size_t> decompose(const L& lat, const element_t<L>& l)
{
    std::vector<std::size_t> r;
    const auto& basis = lat.basis();
    for (std::size_t k = 0; k < basis.size(); k++) {
        if (lat.leq(basis[k], l)) r.push_back(k);
    }
    return r;
}

template <FiniteLattice L>
class BasisIndex
{
public:
    explicit BasisIndex(const L& lat)
    {
        const auto& basis = lat.basis();
        for (std::size_t k = 0; k < basis.size(); k++) index_.emplace(basis[k], k);
    }

    std::optional<std::size_t> find(const element_t<L>& b) const
    {
        auto it = index_.find(b);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

private:
    std::map<element_t<L>, std::size_t> index_;
};

template <FiniteLattice L>
bool tuple_leq(const L& lat, const tuple_t<L>& a, const tuple_t<L>& b)
{
    if (a.size() != b.size()) throw usage_error("tuples of different length");
    for (std::size_t k = 0; k < a.size(); k++) {
        if (!lat.leq(a[k], b[k])) return false;
    }
    return true;
}

template <FiniteLattice L>
std::string format_tuple(const L& lat, const tuple_t<L>& t)
{
    std::string s = "(";
    for (std::size_t k = 0; k < t.size(); k++) {
        if (k) s += ", ";
        s += lat.format(t[k]);
    }
    return s + ")";
}

// All of L^m in lexicographic order of element indices.
template <FiniteLattice L>
std::vector<tuple_t<L>> all_tuples(const L& lat, std::size_t m, std::size_t cap = default_enumeration_cap)
{
    const auto elems = lat.elements(cap);
    std::size_t total = 1;
    for (std::size_t k = 0; k < m; k++) {
        if (total > cap / std::max<std::size_t>(elems.size(), 1)) {
            throw resource_error("L^" + std::to_string(m) + " exceeds the enumeration cap of " +
                                 std::to_string(cap) + " tuples");
        }
        total *= elems.size();
    }
    std::vector<tuple_t<L>> r;
    r.reserve(total);
    std::vector<std::size_t> digit(m, 0);
    for (std::size_t n = 0; n < total; n++) {
        tuple_t<L> t;
        t.reserve(m);
        for (std::size_t k = 0; k < m; k++) t.push_back(elems[digit[k]]);
        r.push_back(std::move(t));
        for (std::size_t k = m; k-- > 0;) {
            if (++digit[k] < elems.size()) break;
            digit[k] = 0;
        }
    }
    return r;
}

template <FiniteLattice L>
bool is_distributive(const L& lat, std::size_t cap = 4096)
{
    const auto xs = lat.elements(cap);
    for (const auto& a : xs) {
        for (const auto& b : xs) {
            for (const auto& c : xs) {
                if (lat.meet(a, lat.join(b, c)) != lat.join(lat.meet(a, b), lat.meet(a, c))) return false;
            }
        }
    }
    return true;
}

/**
 * Residuation l ⇒ m = ⊔{l' | l ⊓ l' ⊑ m}, by enumeration. On a
 * distributive lattice this is the relative pseudo-complement.
 */
template <FiniteLattice L>
element_t<L> residuate(const L& lat, const element_t<L>& l, const element_t<L>& m)
{
    element_t<L> r = lat.bottom();
    for (const auto& x : lat.elements(default_enumeration_cap)) {
        if (lat.leq(lat.meet(l, x), m)) r = lat.join(r, x);
    }
    return r;
}

}

#endif
