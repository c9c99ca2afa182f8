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

#ifndef FPGAME_COMMON_HPP
#define FPGAME_COMMON_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fpg {

enum class Sign { mu, nu };

inline const char* sign_name(Sign s) { return s == Sign::mu ? "mu" : "nu"; }
inline const char* sign_symbol(Sign s) { return s == Sign::mu ? "μ" : "ν"; }

/**
 * Error hierarchy. The CLI maps usage_error and parse_error to exit code 2,
 * resource_error and environment_error to exit code 3.
 */
class error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Bad input from the caller: mismatched lattices, malformed element text.
class usage_error : public error
{
public:
    using error::error;
};

// A precondition of an operation was violated (e.g. free variables, non-upset).
class contract_violation : public error
{
public:
    using error::error;
};

// Inconsistent setup: unknown operator, missing move rule, non-monotone function.
class config_error : public error
{
public:
    using error::error;
};

// A size guard or cap was exceeded.
class resource_error : public error
{
public:
    using error::error;
};

// Missing external tool or similar.
class environment_error : public error
{
public:
    using error::error;
};

class parse_error : public usage_error
{
public:
    parse_error(const std::string& msg, std::size_t line, std::size_t column)
        : usage_error(std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
          line_(line), column_(column) { }

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

}

#endif
