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

#ifndef THZORDER_CHANNEL_HPP
#define THZORDER_CHANNEL_HPP

#include "common.hpp"
#include "pulse.hpp"

#include <algorithm>
#include <cmath>
#include <concepts>
#include <complex>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

// Terahertz channel: spreading loss, molecular absorption loss and molecular absorption noise,
// driven by a sampled absorption coefficient k(f).

namespace thzorder
{

// ================================================================================================
// Absorption coefficient table
// ================================================================================================

struct AbsorptionSpecies
{
    std::string name;
    double mole_fraction = 0.0;        // x_q in [0, 1]
    std::vector<double> coefficients;  // K_q(f) in 1/m, on the table's frequency samples
};

class AbsorptionTable
{
public:
    AbsorptionTable(std::vector<double> frequencies, std::vector<double> coefficients)
        : frequencies_(std::move(frequencies)), coefficients_(std::move(coefficients))
    {
        validate();
    }

    // k(f) = sum_q x_q K_q(f)
    static AbsorptionTable from_species(std::vector<double> frequencies, std::vector<AbsorptionSpecies> species)
    {
        std::vector<double> combined(frequencies.size(), 0.0);
        for (const auto &s : species)
        {
            if (!(s.mole_fraction >= 0.0 && s.mole_fraction <= 1.0))
                throw ValidationError("AbsorptionTable: mole fraction of '" + s.name + "' outside [0, 1]");
            if (s.coefficients.size() != frequencies.size())
                throw ValidationError("AbsorptionTable: species '" + s.name + "' has wrong sample count");
            for (std::size_t i = 0; i < combined.size(); ++i)
            {
                if (!(s.coefficients[i] >= 0.0) || !std::isfinite(s.coefficients[i]))
                    throw ValidationError("AbsorptionTable: species '" + s.name + "' has a negative coefficient");
                combined[i] += s.mole_fraction * s.coefficients[i];
            }
        }
        AbsorptionTable table(std::move(frequencies), std::move(combined));
        table.species_ = std::move(species);
        return table;
    }

    std::span<const double> frequencies() const { return frequencies_; }
    std::span<const double> coefficients() const { return coefficients_; }
    const std::vector<AbsorptionSpecies> &species() const { return species_; }
    std::size_t size() const { return frequencies_.size(); }
    Band range() const { return {frequencies_.front(), frequencies_.back()}; }

    // Linear interpolation; no extrapolation outside the sampled range.
    double coefficient(double f) const
    {
        if (!(f >= frequencies_.front() && f <= frequencies_.back()))
            throw RangeError("absorption table: frequency " + format_double(f) + " Hz outside [" +
                             format_double(frequencies_.front()) + ", " + format_double(frequencies_.back()) + "]");
        auto it = std::upper_bound(frequencies_.begin(), frequencies_.end(), f);
        if (it == frequencies_.end())
            return coefficients_.back();
        const auto i = static_cast<std::size_t>(it - frequencies_.begin());
        const double f0 = frequencies_[i - 1], f1 = frequencies_[i];
        const double w = (f - f0) / (f1 - f0);
        return (1.0 - w) * coefficients_[i - 1] + w * coefficients_[i];
    }

private:
    void validate() const
    {
        if (frequencies_.size() != coefficients_.size())
            throw ValidationError("AbsorptionTable: frequency and coefficient counts differ");
        if (frequencies_.size() < 2)
            throw ValidationError("AbsorptionTable: need at least two samples");
        for (std::size_t i = 0; i < frequencies_.size(); ++i)
        {
            if (!std::isfinite(frequencies_[i]) || !std::isfinite(coefficients_[i]))
                throw ValidationError("AbsorptionTable: non-finite sample at index " + std::to_string(i));
            if (coefficients_[i] < 0.0)
                throw ValidationError("AbsorptionTable: negative coefficient at index " + std::to_string(i));
            if (i > 0 && !(frequencies_[i] > frequencies_[i - 1]))
                throw ValidationError("AbsorptionTable: frequencies not strictly increasing at index " +
                                      std::to_string(i));
        }
    }

    std::vector<double> frequencies_;
    std::vector<double> coefficients_;
    std::vector<AbsorptionSpecies> species_;
};

inline double absorption_coefficient(const AbsorptionTable &table, double f) { return table.coefficient(f); }

// ================================================================================================
// Channel parameters
// ================================================================================================

struct ChannelParams
{
    double path_length = 0.5;        // d_r, m
    double antenna_center = 6.0e12;  // f_o, Hz
    double light_speed = kSpeedOfLight;
    double room_temperature = kRoomTemperature;
    double boltzmann = kBoltzmann;
    Band band = kDefaultChannelBand;

    void validate() const
    {
        if (!(path_length > 0.0) || !std::isfinite(path_length))
            throw ValidationError("ChannelParams: path length must be positive");
        if (!(antenna_center > 0.0) || !std::isfinite(antenna_center))
            throw ValidationError("ChannelParams: antenna center frequency must be positive");
        if (!band.valid())
            throw ValidationError("ChannelParams: empty band");
    }
};

// (c0 / (4 pi d_r f_o)) exp(-j 2 pi f d_r / c0)
inline std::complex<double> spreading_loss(double f, const ChannelParams &p)
{
    if (!(p.path_length > 0.0))
        throw ValidationError("spreading_loss: path length must be positive");
    const double magnitude = p.light_speed / (4.0 * kPi * p.path_length * p.antenna_center);
    return std::polar(magnitude, -2.0 * kPi * f * p.path_length / p.light_speed);
}

// exp(-0.5 k(f) d_r)
inline double absorption_loss(double f, const ChannelParams &p, const AbsorptionTable &table)
{
    return std::exp(-0.5 * table.coefficient(f) * p.path_length);
}

inline std::complex<double> channel_response(double f, const ChannelParams &p, const AbsorptionTable &table)
{
    return spreading_loss(f, p) * absorption_loss(f, p, table);
}

namespace detail
{
// 1 - exp(-k d), without cancellation for small k d
inline double emissivity(double k, double d) { return -std::expm1(-k * d); }
} // namespace detail

// T_0 (1 - exp(-k(f) d_r))
inline double molecular_noise_temperature(double f, const ChannelParams &p, const AbsorptionTable &table)
{
    return p.room_temperature * detail::emissivity(table.coefficient(f), p.path_length);
}

// Background atmospheric noise, evaluated at the configured (finite) path length.
inline double background_noise_psd(double f, const ChannelParams &p, const AbsorptionTable &table)
{
    const double aperture = p.light_speed / (std::sqrt(4.0 * kPi) * p.antenna_center);
    return p.boltzmann * molecular_noise_temperature(f, p, table) * aperture * aperture;
}

// Self-induced noise from the transmitted pulse PSD (W/Hz).
inline double self_noise_psd(double f, const ChannelParams &p, const AbsorptionTable &table, double pulse_psd)
{
    const double spread = p.light_speed / (4.0 * kPi * p.path_length * p.antenna_center);
    return pulse_psd * detail::emissivity(table.coefficient(f), p.path_length) * spread * spread;
}

inline double total_noise_psd(double f, const ChannelParams &p, const AbsorptionTable &table, double pulse_psd)
{
    return background_noise_psd(f, p, table) + self_noise_psd(f, p, table, pulse_psd);
}

// Integral of S_N over [f_b - w/2, f_b + w/2] (W). Composite Simpson, split at the absorption
// table's sample points (k is linear between them) with at least 8 sub-intervals per bin.
template <std::invocable<double> PsdFn>
double noise_variance_per_bin(double f_b, double bin_width, const ChannelParams &p, const AbsorptionTable &table,
                              PsdFn &&pulse_psd)
{
    if (!(bin_width > 0.0))
        throw ValidationError("noise_variance_per_bin: bin width must be positive");
    const double lo = f_b - 0.5 * bin_width;
    const double hi = f_b + 0.5 * bin_width;
    const Band range = table.range();
    if (lo < range.low || hi > range.high)
        throw RangeError("noise_variance_per_bin: bin [" + format_double(lo) + ", " + format_double(hi) +
                         "] Hz not inside absorption table range");

    std::vector<double> edges{lo};
    const auto freqs = table.frequencies();
    for (auto it = std::upper_bound(freqs.begin(), freqs.end(), lo); it != freqs.end() && *it < hi; ++it)
        edges.push_back(*it);
    edges.push_back(hi);

    const double max_step = bin_width / 8.0;
    auto integrand = [&](double f) { return total_noise_psd(f, p, table, pulse_psd(f)); };
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i)
        if (edges[i + 1] > edges[i])
            sum += detail::simpson(integrand, edges[i], edges[i + 1], max_step);
    return sum;
}

inline double noise_variance_per_bin(double f_b, double bin_width, const ChannelParams &p,
                                     const AbsorptionTable &table, const PulseSpec &pulse)
{
    return noise_variance_per_bin(f_b, bin_width, p, table, [&](double f) { return pulse.psd(f); });
}

// ================================================================================================
// Synthetic absorption tables (Lorentzian lines)
// ================================================================================================

struct AbsorptionLine
{
    double center = 0.0;      // Hz
    double strength = 0.0;    // 1/m at line center
    double half_width = 0.0;  // Hz (HWHM)
};

inline double lorentzian_absorption(std::span<const AbsorptionLine> lines, double f)
{
    double k = 0.0;
    for (const auto &line : lines)
    {
        const double dx = f - line.center;
        const double hw2 = line.half_width * line.half_width;
        k += line.strength * hw2 / (dx * dx + hw2);
    }
    return k;
}

// k(f) = sum strength hw^2 / ((f - center)^2 + hw^2) sampled every `resolution` Hz over the band
// (the upper band edge is always included).
inline AbsorptionTable synthetic_absorption_table(std::span<const AbsorptionLine> lines, Band band, double resolution)
{
    if (!band.valid())
        throw ValidationError("synthetic_absorption_table: empty band");
    if (!(resolution > 0.0))
        throw ValidationError("synthetic_absorption_table: resolution must be positive");
    for (const auto &line : lines)
        if (!(line.strength >= 0.0) || !(line.half_width > 0.0))
            throw ValidationError("synthetic_absorption_table: lines need strength >= 0 and half width > 0");

    const auto steps = static_cast<std::size_t>(std::floor(band.width() / resolution + 1e-9));
    std::vector<double> freqs, coeffs;
    freqs.reserve(steps + 2);
    for (std::size_t i = 0; i <= steps; ++i)
        freqs.push_back(band.low + static_cast<double>(i) * resolution);
    if (freqs.back() < band.high)
    {
        if (band.high - freqs.back() < 1e-6 * resolution)
            freqs.back() = band.high;
        else
            freqs.push_back(band.high);
    }
    coeffs.reserve(freqs.size());
    for (double f : freqs)
        coeffs.push_back(lorentzian_absorption(lines, f));
    return AbsorptionTable(std::move(freqs), std::move(coeffs));
}

// Builtin presets are sampled on this padded range so that bins at the channel band edges
// integrate entirely inside the table.
inline constexpr Band kBuiltinTableRange{0.5e12, 10.5e12};
inline constexpr double kBuiltinTableResolution = 0.5e9;

// Line lists loosely shaped like humid air: many strong resonances with low-absorption windows
// in between. Positions follow the main water vapour lines below 3.5 THz and a regular comb above.
inline std::vector<AbsorptionLine> builtin_absorption_lines(const std::string &name)
{
    static constexpr double centers_thz[] = {
        0.557, 0.752, 0.988, 1.097, 1.113, 1.163, 1.208, 1.229, 1.411, 1.603, 1.661, 1.670, 1.717, 1.762, 1.794,
        1.867, 1.919, 2.041, 2.074, 2.164, 2.196, 2.222, 2.264, 2.344, 2.392, 2.531, 2.640, 2.685, 2.774, 2.969,
        3.014, 3.169, 3.331, 3.537, 3.655, 3.808, 3.977, 4.166, 4.434, 4.723, 4.985, 5.268, 5.575, 5.860, 6.160,
        6.455, 6.765, 7.050, 7.320, 7.640, 7.950, 8.255, 8.580, 8.900, 9.210, 9.525, 9.860, 10.180};

    double scale = 0.0;
    if (name == "summer-air")
        scale = 12.0;
    else if (name == "dry-air")
        scale = 1.2;
    else if (name == "vacuum")
        return {};
    else
        throw ConfigError("unknown builtin absorption preset '" + name + "' (known: summer-air, dry-air, vacuum)");

    std::vector<AbsorptionLine> lines;
    int i = 0;
    for (double c : centers_thz)
    {
        const double weight = 1.0 + static_cast<double>((i * 7) % 5);  // 1..5
        lines.push_back({c * 1e12, scale * weight, 10.0e9});
        ++i;
    }
    return lines;
}

inline AbsorptionTable builtin_absorption_table(const std::string &name)
{
    const auto lines = builtin_absorption_lines(name);
    return synthetic_absorption_table(lines, kBuiltinTableRange, kBuiltinTableResolution);
}

// ================================================================================================
// CSV ingestion: "frequency_hz,k_per_m", optional header, '#' comments
// ================================================================================================

inline AbsorptionTable parse_absorption_csv(std::istream &in, const std::string &source = "<stream>")
{
    std::vector<double> freqs, coeffs;
    std::string line;
    std::size_t line_no = 0;
    bool header_allowed = true;
    auto fail = [&](const std::string &what) {
        throw ParseError(source + ":" + std::to_string(line_no) + ": " + what);
    };

    while (std::getline(in, line))
    {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#')
            continue;

        const auto comma = line.find(',');
        if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos)
            fail("expected two comma-separated columns");
        double f = 0.0, k = 0.0;
        const bool f_ok = parse_double(std::string_view(line).substr(0, comma), f);
        const bool k_ok = parse_double(std::string_view(line).substr(comma + 1), k);
        if (!f_ok && !k_ok && header_allowed)
        {
            header_allowed = false;
            continue;
        }
        header_allowed = false;
        if (!f_ok || !k_ok || !std::isfinite(f) || !std::isfinite(k))
            fail("malformed numeric row '" + line + "'");
        if (k < 0.0)
            fail("negative absorption coefficient " + format_double(k));
        if (!freqs.empty() && !(f > freqs.back()))
            fail("frequencies must be strictly increasing (" + format_double(f) + " after " +
                 format_double(freqs.back()) + ")");
        freqs.push_back(f);
        coeffs.push_back(k);
    }
    if (freqs.size() < 2)
        throw ParseError(source + ": need at least two data rows");
    return AbsorptionTable(std::move(freqs), std::move(coeffs));
}

inline AbsorptionTable load_absorption_csv(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open absorption table '" + path.string() + "'");
    return parse_absorption_csv(in, path.string());
}

inline void write_absorption_csv(const AbsorptionTable &table, std::ostream &out)
{
    out << "frequency_hz,k_per_m\n";
    const auto f = table.frequencies();
    const auto k = table.coefficients();
    for (std::size_t i = 0; i < f.size(); ++i)
        out << format_double(f[i]) << ',' << format_double(k[i]) << '\n';
}

inline void save_absorption_csv(const AbsorptionTable &table, const std::filesystem::path &path)
{
    std::ofstream out(path);
    if (!out)
        throw ParseError("cannot write absorption table '" + path.string() + "'");
    write_absorption_csv(table, out);
}

// "builtin:<name>" or "file:<path>"
inline AbsorptionTable resolve_absorption_source(const std::string &source)
{
    if (source.rfind("builtin:", 0) == 0)
        return builtin_absorption_table(source.substr(8));
    if (source.rfind("file:", 0) == 0)
        return load_absorption_csv(source.substr(5));
    throw ConfigError("absorption source must be 'builtin:<name>' or 'file:<path>', got '" + source + "'");
}

} // namespace thzorder

#endif
