// Copyright (C) 2026 occtrack contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace occtrack {

/// Caller supplied a value outside the operation's domain.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical routine could not produce a result (e.g. a singular covariance).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed text or binary input. Carries the 1-based line number for text
/// inputs, or 0 when the error is not tied to a line.
class ParseError : public InputError {
public:
    ParseError(std::size_t line, const std::string& what)
        : InputError(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace occtrack
