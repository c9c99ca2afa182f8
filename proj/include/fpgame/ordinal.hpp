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

#ifndef FPGAME_ORDINAL_HPP
#define FPGAME_ORDINAL_HPP

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fpgame/common.hpp"

namespace fpg {

using OrdinalVector = std::vector<std::uint32_t>;

/**
 * An ordinal vector of fixed length m, or the top element ★.
 * Component 0 is least significant, component m-1 most significant.
 * Indices are 0-based throughout the library.
 */
class LiftedVector
{
public:
    LiftedVector() = default;
    explicit LiftedVector(OrdinalVector v) : components_(std::move(v)) { }

    static LiftedVector star()
    {
        LiftedVector r;
        r.star_ = true;
        return r;
    }

    static LiftedVector zero(std::size_t m) { return LiftedVector(OrdinalVector(m, 0)); }

    bool is_star() const { return star_; }
    std::size_t size() const { return components_.size(); }
    const OrdinalVector& components() const { return components_; }
    std::uint32_t operator[](std::size_t k) const { return components_[k]; }

    friend bool operator==(const LiftedVector&, const LiftedVector&) = default;

    std::string str() const
    {
        if (star_) return "★";
        std::string s = "(";
        for (std::size_t k = 0; k < components_.size(); k++) {
            if (k) s += ",";
            s += std::to_string(components_[k]);
        }
        return s + ")";
    }

private:
    bool star_ = false;
    OrdinalVector components_;
};

/**
 * Compare under ⪯_i: only components i..m-1 count, the last one first.
 * ★ is above every vector and equal to itself.
 */
inline std::strong_ordering compare_from(const LiftedVector& a, const LiftedVector& b, std::size_t i = 0)
{
    if (a.is_star() || b.is_star()) return a.is_star() <=> b.is_star();
    if (a.size() != b.size()) throw usage_error("ordinal vectors of different length");
    for (std::size_t k = a.size(); k-- > i;) {
        if (a[k] != b[k]) return a[k] <=> b[k];
    }
    return std::strong_ordering::equal;
}

// Zero every component below i.
inline LiftedVector truncate(const LiftedVector& v, std::size_t i)
{
    if (v.is_star()) return v;
    OrdinalVector c = v.components();
    for (std::size_t k = 0; k < i && k < c.size(); k++) c[k] = 0;
    return LiftedVector(std::move(c));
}

// ⪯_i-minimum of s, truncated at i; ★ when s has no proper vector.
inline LiftedVector min_trunc(std::size_t i, std::span<const LiftedVector> s)
{
    const LiftedVector* best = nullptr;
    for (const auto& v : s) {
        if (v.is_star()) continue;
        if (!best || compare_from(v, *best, i) < 0) best = &v;
    }
    return best ? truncate(*best, i) : LiftedVector::star();
}

// ⪯-supremum; the empty supremum is the zero vector of length m.
inline LiftedVector sup(std::span<const LiftedVector> s, std::size_t m)
{
    LiftedVector best = LiftedVector::zero(m);
    for (const auto& v : s) {
        if (compare_from(v, best) > 0) best = v;
    }
    return best;
}

/**
 * v + δ_i^η. For ν this is v itself. For μ component i grows by one,
 * and the result saturates to ★ once it exceeds bound.
 */
inline LiftedVector add_delta(const LiftedVector& v, std::size_t i, Sign sign, std::uint32_t bound)
{
    if (v.is_star() || sign == Sign::nu) return v;
    OrdinalVector c = v.components();
    if (c[i] >= bound) return LiftedVector::star();
    c[i]++;
    return LiftedVector(std::move(c));
}

}

#endif
