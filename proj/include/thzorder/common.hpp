// SPDX-License-Identifier: Apache-2.0
//
// thzorder - derivative-order classification of terahertz Gaussian pulses
// Copyright (C) 2026 The thzorder authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef THZORDER_COMMON_HPP
#define THZORDER_COMMON_HPP

#include <charconv>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>

namespace thzorder
{

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kBoltzmann = 1.380649e-23;    // J/K
inline constexpr double kRoomTemperature = 296.0;     // K

// ================================================================================================
// Errors
// ================================================================================================

// Every error carries a short machine-readable kind ("config", "range", "parse", ...) so the CLI can
// print a single "error: <kind>: <message>" line.
class Error : public std::runtime_error
{
public:
    Error(std::string kind, const std::string &message)
        : std::runtime_error(message), kind_(std::move(kind)) {}

    const std::string &kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

struct ConfigError : Error
{
    explicit ConfigError(const std::string &m) : Error("config", m) {}
};

struct RangeError : Error
{
    explicit RangeError(const std::string &m) : Error("range", m) {}
};

struct ParseError : Error
{
    explicit ParseError(const std::string &m) : Error("parse", m) {}
};

struct ValidationError : Error
{
    explicit ValidationError(const std::string &m) : Error("validation", m) {}
};

struct DegenerateInputError : Error
{
    explicit DegenerateInputError(const std::string &m) : Error("degenerate", m) {}
};

// ================================================================================================
// Frequency band [low, high] in Hz
// ================================================================================================

struct Band
{
    double low = 1.0e12;
    double high = 10.0e12;

    double width() const { return high - low; }
    bool contains(double f) const { return f >= low && f <= high; }
    bool valid() const { return std::isfinite(low) && std::isfinite(high) && low < high; }

    friend bool operator==(const Band &, const Band &) = default;
};

// Channel band used throughout: 1 to 10 THz.
inline constexpr Band kDefaultChannelBand{1.0e12, 10.0e12};

// ================================================================================================
// Lossless number formatting (shortest representation that parses back bit-exact)
// ================================================================================================

inline std::string format_double(double value)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc())
        throw std::runtime_error("format_double: conversion failed");
    return std::string(buf, ptr);
}

// Parses the whole of `text` (surrounding blanks allowed) as a double. Returns false on any junk.
inline bool parse_double(std::string_view text, double &out)
{
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t'))
        text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r'))
        text.remove_suffix(1);
    if (text.empty())
        return false;
    if (text.front() == '+')
        text.remove_prefix(1);
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc() && ptr == text.data() + text.size();
}

} // namespace thzorder

#endif
