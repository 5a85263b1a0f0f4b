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

#ifndef THZORDER_CONFIG_HPP
#define THZORDER_CONFIG_HPP

#include "common.hpp"
#include "experiment.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

// Run configuration: flat "key = value" lines grouped under [section] headers, '#' comments.
// Unit-bearing keys carry their unit as a suffix and are converted to SI on load:
//
//   [pulse]       orders = 1,4,10   center_frequency_thz = 6   power_uw = 1
//   [channel]     path_length_cm = 50   absorption = builtin:summer-air
//                 antenna_center_thz   band_low_thz = 1   band_high_thz = 10
//   [array]       num_elements = 8   spacing_um = 15   snapshot_duration_ps = 8
//   [doa]         true_doa_deg = 15.7125   angle_start_deg   angle_end_deg   angle_step_deg
//   [classifier]  spread_band_low_thz   spread_band_high_thz
//   [experiment]  trials_per_order = 200   seed = 1   noise = true   workers = 0
//   [output]      out_dir = results   verbosity = 1

namespace thzorder
{

struct RunConfig
{
    TrialConfig trial;
    std::string out_dir = "results";
    int verbosity = 1;
};

namespace detail
{
inline std::string trim(std::string s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

inline double to_number(const std::string &key, const std::string &value)
{
    double v = 0.0;
    if (!parse_double(value, v) || !std::isfinite(v))
        throw ConfigError(key + ": expected a number, got '" + value + "'");
    return v;
}

inline long long to_integer(const std::string &key, const std::string &value)
{
    const double v = to_number(key, value);
    if (v != std::floor(v))
        throw ConfigError(key + ": expected an integer, got '" + value + "'");
    return static_cast<long long>(v);
}

inline bool to_bool(const std::string &key, const std::string &value)
{
    if (value == "true" || value == "yes" || value == "1")
        return true;
    if (value == "false" || value == "no" || value == "0")
        return false;
    throw ConfigError(key + ": expected true/false, got '" + value + "'");
}

inline std::vector<int> to_orders(const std::string &key, const std::string &value)
{
    std::vector<int> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(static_cast<int>(to_integer(key, trim(item))));
    if (out.empty())
        throw ConfigError(key + ": empty list");
    return out;
}
} // namespace detail

// Applies one "section.key = value" assignment; unknown keys are rejected.
inline void apply_config_value(RunConfig &cfg, const std::string &key, const std::string &value)
{
    using namespace detail;
    auto &t = cfg.trial;
    const std::map<std::string, std::function<void()>> setters = {
        {"pulse.orders", [&] { t.orders = to_orders(key, value); }},
        {"pulse.center_frequency_thz", [&] { t.center_frequency = to_number(key, value) * 1e12; }},
        {"pulse.power_uw", [&] { t.power = to_number(key, value) * 1e-6; }},
        {"channel.path_length_cm", [&] { t.path_length = to_number(key, value) * 1e-2; }},
        {"channel.absorption", [&] { t.absorption = value; }},
        {"channel.antenna_center_thz", [&] { t.antenna_center = to_number(key, value) * 1e12; }},
        {"channel.band_low_thz", [&] { t.band.low = to_number(key, value) * 1e12; }},
        {"channel.band_high_thz", [&] { t.band.high = to_number(key, value) * 1e12; }},
        {"array.num_elements", [&] { t.num_elements = static_cast<int>(to_integer(key, value)); }},
        {"array.spacing_um", [&] { t.element_spacing = to_number(key, value) * 1e-6; }},
        {"array.snapshot_duration_ps", [&] { t.snapshot_duration = to_number(key, value) * 1e-12; }},
        {"doa.true_doa_deg", [&] { t.true_doa = to_number(key, value); }},
        {"doa.angle_start_deg", [&] { t.angles.start = to_number(key, value); }},
        {"doa.angle_end_deg", [&] { t.angles.end = to_number(key, value); }},
        {"doa.angle_step_deg", [&] { t.angles.step = to_number(key, value); }},
        {"classifier.spread_band_low_thz",
         [&] {
             auto band = t.spread_band.value_or(t.band);
             band.low = to_number(key, value) * 1e12;
             t.spread_band = band;
         }},
        {"classifier.spread_band_high_thz",
         [&] {
             auto band = t.spread_band.value_or(t.band);
             band.high = to_number(key, value) * 1e12;
             t.spread_band = band;
         }},
        {"experiment.trials_per_order", [&] { t.trials_per_order = static_cast<int>(to_integer(key, value)); }},
        {"experiment.seed",
         [&] {
             std::uint64_t seed = 0;
             auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), seed);
             if (ec != std::errc() || ptr != value.data() + value.size())
                 throw ConfigError(key + ": expected an unsigned 64-bit integer, got '" + value + "'");
             t.base_seed = seed;
         }},
        {"experiment.noise", [&] { t.noise = to_bool(key, value); }},
        {"experiment.workers", [&] { t.workers = static_cast<unsigned>(to_integer(key, value)); }},
        {"output.out_dir", [&] { cfg.out_dir = value; }},
        {"output.verbosity", [&] { cfg.verbosity = static_cast<int>(to_integer(key, value)); }},
    };
    const auto it = setters.find(key);
    if (it == setters.end())
        throw ConfigError("unknown key '" + key + "'");
    it->second();
}

inline RunConfig parse_run_config(std::istream &in, const std::string &source = "<config>")
{
    RunConfig cfg;
    std::string section, line;
    std::set<std::string> seen;
    std::size_t line_no = 0;
    while (std::getline(in, line))
    {
        ++line_no;
        const std::string where = source + ":" + std::to_string(line_no) + ": ";
        line = detail::trim(line);
        if (line.empty() || line.front() == '#' || line.front() == ';')
            continue;
        if (line.front() == '[')
        {
            if (line.back() != ']')
                throw ConfigError(where + "malformed section header '" + line + "'");
            section = detail::trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(where + "expected 'key = value'");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        const std::string full = section.empty() ? key : section + "." + key;
        if (!seen.insert(full).second)
            throw ConfigError(where + "duplicate key '" + full + "'");
        try
        {
            apply_config_value(cfg, full, value);
        }
        catch (const ConfigError &e)
        {
            throw ConfigError(where + e.what());
        }
    }
    if (cfg.verbosity < 0)
        throw ConfigError(source + ": verbosity must be >= 0");
    cfg.trial.validate();
    return cfg;
}

inline RunConfig load_run_config(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config '" + path.string() + "'");
    return parse_run_config(in, path.string());
}

} // namespace thzorder

#endif
