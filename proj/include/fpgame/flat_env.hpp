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

#ifndef FPGAME_FLAT_ENV_HPP
#define FPGAME_FLAT_ENV_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fpgame/lattice.hpp"
#include "fpgame/text.hpp"

namespace fpg {

/**
 * An abstract environment for constant propagation: either the
 * contradictory environment ⊤ or a map from variables to a constant,
 * where an absent value means "not known to be constant".
 */
struct FlatEnv
{
    bool top = false;
    std::vector<std::optional<std::int64_t>> values;

    friend auto operator<=>(const FlatEnv&, const FlatEnv&) = default;
    friend bool operator==(const FlatEnv&, const FlatEnv&) = default;
};

/**
 * Environments ordered by "knows more constants": ρ ⊑ ρ' iff every
 * constant of ρ is also a constant of ρ' with the same value. Joining
 * conflicting constants yields ⊤.
 *
 * The basis consists of the single-constant environments ⊥[x↦z] for z in
 * a declared finite universe of integers.
 */
class FlatEnvLattice
{
public:
    using element = FlatEnv;
    static constexpr bool join_prime_basis = false;

    FlatEnvLattice(std::vector<std::string> vars, std::set<std::int64_t> universe)
        : vars_(std::move(vars)), universe_(universe.begin(), universe.end())
    {
        for (std::size_t k = 0; k < vars_.size(); k++) {
            if (!index_.emplace(vars_[k], k).second) throw usage_error("duplicate variable '" + vars_[k] + "'");
        }
        for (std::size_t k = 0; k < vars_.size(); k++) {
            for (auto z : universe_) basis_.push_back(update(bottom(), k, z));
        }
    }

    const std::vector<std::string>& variables() const { return vars_; }
    const std::vector<std::int64_t>& universe() const { return universe_; }

    std::size_t var_index(const std::string& name) const
    {
        auto it = index_.find(name);
        if (it == index_.end()) throw usage_error("unknown variable '" + name + "'");
        return it->second;
    }

    // ρ[x ↦ v]; updating ⊤ gives ⊤.
    element update(const element& rho, std::size_t var, std::optional<std::int64_t> v) const
    {
        check(rho);
        if (rho.top) return rho;
        element r = rho;
        r.values[var] = v;
        return r;
    }

    // Index of ⊥[x↦z] in basis(), if z is in the universe.
    std::optional<std::size_t> basis_index(std::size_t var, std::int64_t z) const
    {
        auto it = std::lower_bound(universe_.begin(), universe_.end(), z);
        if (it == universe_.end() || *it != z) return std::nullopt;
        return var * universe_.size() + static_cast<std::size_t>(it - universe_.begin());
    }

    bool leq(const element& a, const element& b) const
    {
        check(a);
        check(b);
        if (b.top) return true;
        if (a.top) return false;
        for (std::size_t k = 0; k < vars_.size(); k++) {
            if (a.values[k] && a.values[k] != b.values[k]) return false;
        }
        return true;
    }

    element join(const element& a, const element& b) const
    {
        check(a);
        check(b);
        if (a.top) return a;
        if (b.top) return b;
        element r = a;
        for (std::size_t k = 0; k < vars_.size(); k++) {
            if (!b.values[k]) continue;
            if (r.values[k] && r.values[k] != b.values[k]) return top();
            r.values[k] = b.values[k];
        }
        return r;
    }

    element meet(const element& a, const element& b) const
    {
        check(a);
        check(b);
        if (a.top) return b;
        if (b.top) return a;
        element r = a;
        for (std::size_t k = 0; k < vars_.size(); k++) {
            if (r.values[k] != b.values[k]) r.values[k].reset();
        }
        return r;
    }

    element bottom() const { return element{false, std::vector<std::optional<std::int64_t>>(vars_.size())}; }
    element top() const { return element{true, std::vector<std::optional<std::int64_t>>(vars_.size())}; }
    const std::vector<element>& basis() const { return basis_; }
    std::size_t height() const { return vars_.size() + 1; }

    // Environments over the universe, plus ⊤.
    std::vector<element> elements(std::size_t cap) const
    {
        const std::size_t choices = universe_.size() + 1;
        std::size_t total = 1;
        for (std::size_t k = 0; k < vars_.size(); k++) {
            if (total > cap / choices) throw resource_error("flat environment lattice exceeds the enumeration cap");
            total *= choices;
        }
        std::vector<element> r;
        std::vector<std::size_t> digit(vars_.size(), 0);
        for (std::size_t n = 0; n < total; n++) {
            element e = bottom();
            for (std::size_t k = 0; k < vars_.size(); k++) {
                if (digit[k]) e.values[k] = universe_[digit[k] - 1];
            }
            r.push_back(std::move(e));
            for (std::size_t k = vars_.size(); k-- > 0;) {
                if (++digit[k] < choices) break;
                digit[k] = 0;
            }
        }
        r.push_back(top());
        return r;
    }

    std::string format(const element& a) const
    {
        check(a);
        if (a.top) return "⊤";
        std::vector<std::string> parts;
        for (std::size_t k = 0; k < vars_.size(); k++) {
            if (a.values[k]) parts.push_back(vars_[k] + "↦" + std::to_string(*a.values[k]));
        }
        if (parts.empty()) return "⊥";
        return "⊥[" + text::join(parts, ",") + "]";
    }

    // Accepts the printed form, with "bot"/"top" and "->" as ASCII spellings.
    element parse(const std::string& s) const
    {
        std::string v(text::trim(s));
        auto replace_all = [&](const std::string& from, const std::string& to) {
            for (std::size_t p = v.find(from); p != std::string::npos; p = v.find(from, p + to.size())) {
                v.replace(p, from.size(), to);
            }
        };
        replace_all("⊥", "bot");
        replace_all("⊤", "top");
        replace_all("↦", "->");
        if (v == "top") return top();
        if (!v.starts_with("bot")) throw usage_error("expected an environment like bot[x->7], got '" + s + "'");
        std::string_view rest = text::trim(std::string_view(v).substr(3));
        element e = bottom();
        if (rest.empty()) return e;
        if (rest.front() != '[' || rest.back() != ']') throw usage_error("malformed environment '" + s + "'");
        for (const auto& part : text::split(rest.substr(1, rest.size() - 2), ',')) {
            auto arrow = part.find("->");
            if (arrow == std::string::npos) throw usage_error("malformed binding '" + part + "'");
            std::size_t var = var_index(std::string(text::trim(std::string_view(part).substr(0, arrow))));
            try {
                e.values[var] = std::stoll(part.substr(arrow + 2));
            } catch (const std::exception&) {
                throw usage_error("malformed constant in '" + part + "'");
            }
        }
        return e;
    }

private:
    void check(const element& a) const
    {
        if (a.values.size() != vars_.size()) throw usage_error("element does not belong to this environment lattice");
    }

    std::vector<std::string> vars_;
    std::vector<std::int64_t> universe_;
    std::map<std::string, std::size_t> index_;
    std::vector<element> basis_;
};

static_assert(FiniteLattice<FlatEnvLattice>);

}

#endif
