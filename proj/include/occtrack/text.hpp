// Copyright (C) 2026 occtrack contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "occtrack/error.hpp"

namespace occtrack::text {

inline std::string_view trim(std::string_view s) {
    const auto ws = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
    while (!s.empty() && ws(s.front())) {
        s.remove_prefix(1);
    }
    while (!s.empty() && ws(s.back())) {
        s.remove_suffix(1);
    }
    return s;
}

inline bool blank(std::string_view s) { return trim(s).empty(); }

inline std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const std::size_t next = s.find(sep, pos);
        if (next == std::string_view::npos) {
            out.push_back(trim(s.substr(pos)));
            return out;
        }
        out.push_back(trim(s.substr(pos, next - pos)));
        pos = next + 1;
    }
}

/// Whole-field finite real; a leading '+' is accepted.
inline double to_double(std::string_view field, std::size_t line, std::string_view name) {
    std::string_view f = trim(field);
    if (!f.empty() && f.front() == '+') {
        f.remove_prefix(1);
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
    if (f.empty() || ec != std::errc{} || ptr != f.data() + f.size() || !std::isfinite(v)) {
        throw ParseError(line, std::string(name) + " is not a finite number: '" + std::string(field) + "'");
    }
    return v;
}

/// Whole-field integer; reals with a zero fraction ("3.0") are accepted too.
inline long to_long(std::string_view field, std::size_t line, std::string_view name) {
    std::string_view f = trim(field);
    if (!f.empty() && f.front() == '+') {
        f.remove_prefix(1);
    }
    long v = 0;
    const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
    if (!f.empty() && ec == std::errc{} && ptr == f.data() + f.size()) {
        return v;
    }
    const double d = to_double(field, line, name);
    if (d != std::floor(d) || std::abs(d) > 2e9) {
        throw ParseError(line, std::string(name) + " is not an integer: '" + std::string(field) + "'");
    }
    return static_cast<long>(d);
}

/// Shortest decimal that reads back to the same double.
inline std::string shortest(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

/// Fixed two-decimal rendering, with negative zero printed as zero.
inline std::string fixed2(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 2);
    std::string s(buf, ptr);
    if (s == "-0.00") {
        s = "0.00";
    }
    return s;
}

}  // namespace occtrack::text
