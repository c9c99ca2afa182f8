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

#ifndef FPGAME_TEXT_HPP
#define FPGAME_TEXT_HPP

#include <algorithm>
#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "fpgame/common.hpp"

namespace fpg::text {

struct Token
{
    enum Kind { ident, number, symbol, end };

    Kind kind;
    std::string text;
    std::size_t line;
    std::size_t column;
};

/**
 * Shared tokenizer for the small input languages. Identifiers may contain
 * digits, '_' and trailing primes. Symbols are matched longest first.
 * A '#' starts a comment running to the end of the line.
 */
inline std::vector<Token> tokenize(std::string_view src, std::vector<std::string> symbols,
                                   std::size_t first_line = 1)
{
    std::sort(symbols.begin(), symbols.end(),
              [](const std::string& a, const std::string& b) { return a.size() > b.size(); });
    std::vector<Token> out;
    std::size_t line = first_line, col = 1, k = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t j = 0; j < n; j++, k++) {
            if (src[k] == '\n') {
                line++;
                col = 1;
            } else {
                col++;
            }
        }
    };
    while (k < src.size()) {
        unsigned char c = src[k];
        if (std::isspace(c)) {
            advance(1);
            continue;
        }
        if (c == '#') {
            while (k < src.size() && src[k] != '\n') advance(1);
            continue;
        }
        if (std::isalpha(c) || c == '_') {
            std::size_t e = k;
            while (e < src.size() && (std::isalnum(static_cast<unsigned char>(src[e])) || src[e] == '_')) e++;
            while (e < src.size() && src[e] == '\'') e++;
            out.push_back({Token::ident, std::string(src.substr(k, e - k)), line, col});
            advance(e - k);
            continue;
        }
        if (std::isdigit(c)) {
            std::size_t e = k;
            while (e < src.size() && std::isdigit(static_cast<unsigned char>(src[e]))) e++;
            out.push_back({Token::number, std::string(src.substr(k, e - k)), line, col});
            advance(e - k);
            continue;
        }
        bool matched = false;
        for (const auto& s : symbols) {
            if (src.substr(k, s.size()) == s) {
                out.push_back({Token::symbol, s, line, col});
                advance(s.size());
                matched = true;
                break;
            }
        }
        if (!matched) throw parse_error(std::string("unexpected character '") + src[k] + "'", line, col);
    }
    out.push_back({Token::end, "", line, col});
    return out;
}

class TokenStream
{
public:
    explicit TokenStream(std::vector<Token> tokens) : tokens_(std::move(tokens)) { }

    const Token& peek(std::size_t ahead = 0) const
    {
        return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
    }

    Token next()
    {
        Token t = peek();
        if (pos_ < tokens_.size() - 1) pos_++;
        return t;
    }

    bool at_end() const { return peek().kind == Token::end; }

    bool is(std::string_view s) const
    {
        const auto& t = peek();
        return t.kind != Token::end && t.text == s && t.kind != Token::number;
    }

    bool accept(std::string_view s)
    {
        if (!is(s)) return false;
        next();
        return true;
    }

    Token expect(std::string_view s)
    {
        if (!is(s)) fail("expected '" + std::string(s) + "'");
        return next();
    }

    Token expect_ident()
    {
        if (peek().kind != Token::ident) fail("expected identifier");
        return next();
    }

    [[noreturn]] void fail(const std::string& msg) const
    {
        const auto& t = peek();
        std::string found = t.kind == Token::end ? "end of input" : "'" + t.text + "'";
        throw parse_error(msg + ", found " + found, t.line, t.column);
    }

private:
    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
};

inline std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string> split(std::string_view s, char sep)
{
    std::vector<std::string> r;
    std::size_t start = 0;
    for (std::size_t k = 0; k <= s.size(); k++) {
        if (k == s.size() || s[k] == sep) {
            r.emplace_back(trim(s.substr(start, k - start)));
            start = k + 1;
        }
    }
    return r;
}

inline std::vector<std::string> words(std::string_view s)
{
    std::vector<std::string> r;
    std::size_t k = 0;
    while (k < s.size()) {
        while (k < s.size() && std::isspace(static_cast<unsigned char>(s[k]))) k++;
        std::size_t e = k;
        while (e < s.size() && !std::isspace(static_cast<unsigned char>(s[e]))) e++;
        if (e > k) r.emplace_back(s.substr(k, e - k));
        k = e;
    }
    return r;
}

// Names inside "{a,b}" or "{a b}"; "∅" and "{}" give the empty list.
inline std::vector<std::string> brace_list(std::string_view s)
{
    s = trim(s);
    if (s == "∅") return {};
    if (s.size() < 2 || s.front() != '{' || s.back() != '}') {
        throw usage_error("expected a set like {a,b}, got '" + std::string(s) + "'");
    }
    std::string inner(s.substr(1, s.size() - 2));
    std::replace(inner.begin(), inner.end(), ',', ' ');
    return words(inner);
}

template <class Range>
std::string join(const Range& parts, std::string_view sep)
{
    std::string r;
    bool first = true;
    for (const auto& p : parts) {
        if (!first) r += sep;
        r += p;
        first = false;
    }
    return r;
}

}

#endif
