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

#ifndef THZORDER_EXPERIMENT_HPP
#define THZORDER_EXPERIMENT_HPP

#include "array.hpp"
#include "channel.hpp"
#include "classifier.hpp"
#include "common.hpp"
#include "doa.hpp"
#include "pulse.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

// Monte Carlo harness: seeded single-pulse trials and TPR sweeps over path length, snapshot
// duration and antenna count.

namespace thzorder
{

struct TrialConfig
{
    std::vector<int> orders{1, 4, 10};
    double center_frequency = 6.0e12;         // Hz
    double power = kDefaultPulsePower;        // W
    double path_length = 0.5;                 // m
    double snapshot_duration = 8.0e-12;       // s
    int num_elements = 8;
    double element_spacing = kDefaultElementSpacing;  // m
    AngleGrid angles{};
    std::string absorption = "builtin:summer-air";
    double true_doa = 15.7125;                // degrees
    int trials_per_order = 200;
    std::uint64_t base_seed = 1;
    bool noise = true;
    std::optional<double> antenna_center;     // f_o; defaults to the pulse center frequency
    Band band = kDefaultChannelBand;
    std::optional<Band> spread_band;          // restrict the spread sums (and references) to this band
    unsigned workers = 0;                     // 0 = hardware concurrency

    ChannelParams channel_params() const
    {
        ChannelParams p;
        p.path_length = path_length;
        p.antenna_center = antenna_center.value_or(center_frequency);
        p.band = band;
        return p;
    }

    ArrayConfig array_config() const { return {num_elements, element_spacing}; }

    void validate() const
    {
        if (orders.empty())
            throw ConfigError("orders: at least one pulse order is required");
        auto sorted = orders;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw ConfigError("orders: duplicate order");
        for (int n : orders)
            if (n < 1 || n > kMaxPulseOrder)
                throw ConfigError("orders: " + std::to_string(n) + " outside 1.." + std::to_string(kMaxPulseOrder));
        if (!(center_frequency > 0.0) || !band.valid() || !(band.low < center_frequency && center_frequency < band.high))
            throw ConfigError("center frequency must lie strictly inside the channel band");
        if (!(power > 0.0) || !std::isfinite(power))
            throw ConfigError("power must be positive");
        if (!(path_length > 0.0) || !std::isfinite(path_length))
            throw ConfigError("path length must be positive");
        if (trials_per_order < 1)
            throw ConfigError("trials per order must be >= 1");
        if (antenna_center && !(*antenna_center > 0.0))
            throw ConfigError("antenna center frequency must be positive");
        if (spread_band && !spread_band->valid())
            throw ConfigError("spread band is empty");

        const ArrayConfig array = array_config();
        try
        {
            array.validate();
        }
        catch (const Error &e)
        {
            throw ConfigError(e.what());
        }
        array.check_aliasing(band.high);
        angles.validate();
        if (!(true_doa >= angles.start && true_doa <= angles.end))
            throw ConfigError("true DOA lies outside the angle search grid");

        check_snapshot_duration();
        static_cast<void>(FrequencyGrid(band, snapshot_duration));
    }

    // A snapshot must be at least 2 ps long and must hold the whole pulse (99.99 % energy span)
    // of every configured order.
    void check_snapshot_duration() const
    {
        if (!(snapshot_duration >= kMinSnapshotDuration * (1.0 - 1e-12)))
            throw ConfigError("snapshot duration " + format_double(snapshot_duration * 1e12) +
                              " ps is below the 2 ps minimum (the observation window must exceed the "
                              "longest pulse duration)");
        for (int n : orders)
        {
            const double duration = pulse_duration(PulseSpec(n, center_frequency, power));
            if (snapshot_duration < duration)
                throw ConfigError("snapshot duration " + format_double(snapshot_duration * 1e12) +
                                  " ps is shorter than the " + format_double(duration * 1e12) +
                                  " ps duration of the order-" + std::to_string(n) + " pulse");
        }
    }
};

// ================================================================================================
// Seeds
// ================================================================================================

inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// seed = h(h(h(h(base) ^ sweep_index) ^ order) ^ trial), h = splitmix64. Any trial can be replayed
// from these four numbers alone.
inline std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t sweep_index, std::uint64_t order,
                                 std::uint64_t trial)
{
    std::uint64_t h = splitmix64(base_seed);
    h = splitmix64(h ^ sweep_index);
    h = splitmix64(h ^ order);
    return splitmix64(h ^ trial);
}

// ================================================================================================
// Single trials
// ================================================================================================

// Everything a trial needs that does not depend on the seed or the transmitted order.
class TrialRunner
{
public:
    explicit TrialRunner(TrialConfig config)
        : TrialRunner(config, std::make_shared<const AbsorptionTable>(resolve_absorption_source(config.absorption)))
    {
    }

    TrialRunner(TrialConfig config, std::shared_ptr<const AbsorptionTable> table)
        : config_(validated(std::move(config))), table_(std::move(table)),
          grid_(config_.band, config_.snapshot_duration),
          references_(build_reference_table(config_.orders, config_.center_frequency,
                                            config_.spread_band.value_or(config_.band)))
    {
        if (config_.noise)
            for (int order : config_.orders)
                variances_.emplace(order, noise_variances(order));
    }

    const TrialConfig &config() const { return config_; }
    const ReferenceTable &references() const { return references_; }
    const FrequencyGrid &grid() const { return grid_; }
    const AbsorptionTable &table() const { return *table_; }

    // synthesize -> IMUSIC DOA -> PSD -> spread -> nearest reference
    ClassificationResult run(int order, std::uint64_t seed) const
    {
        const PulseSpec pulse(order, config_.center_frequency, config_.power);
        const ChannelParams params = config_.channel_params();
        const ArrayConfig array = config_.array_config();

        std::vector<double> uncached;
        std::span<const double> variances;
        if (config_.noise)
        {
            const auto it = variances_.find(order);
            variances = it != variances_.end() ? std::span<const double>(it->second)
                                               : std::span<const double>(uncached = noise_variances(order));
        }
        const auto snapshots =
            synthesize_snapshots(pulse, params, *table_, array, config_.true_doa, grid_, 1, seed, variances);
        const auto cov = sample_covariance(snapshots);
        const auto spectrum = imusic_spectrum(cov, config_.angles, array);
        const double doa = estimate_doa(spectrum);
        const auto psd = estimate_psd(cov, doa, array);
        const double spread = rms_spread_estimate(psd, config_.center_frequency, config_.spread_band);
        return classify_order(spread, references_, doa);
    }

private:
    static TrialConfig validated(TrialConfig config)
    {
        config.validate();
        return config;
    }

    // The noise variances depend on the order (self-induced noise) but not on the seed.
    std::vector<double> noise_variances(int order) const
    {
        return bin_noise_variances(PulseSpec(order, config_.center_frequency, config_.power),
                                   config_.channel_params(), *table_, grid_);
    }

    TrialConfig config_;
    std::shared_ptr<const AbsorptionTable> table_;
    FrequencyGrid grid_;
    ReferenceTable references_;
    std::map<int, std::vector<double>> variances_;
};

inline ClassificationResult run_trial(const TrialConfig &config, int true_order, std::uint64_t seed)
{
    return TrialRunner(config).run(true_order, seed);
}

// ================================================================================================
// Sweeps
// ================================================================================================

enum class SweepVariable
{
    path_length,        // m
    snapshot_duration,  // s
    num_elements,
};

inline std::string to_string(SweepVariable v)
{
    switch (v)
    {
    case SweepVariable::path_length: return "path_length";
    case SweepVariable::snapshot_duration: return "snapshot_duration";
    case SweepVariable::num_elements: return "num_elements";
    }
    return "?";
}

inline SweepVariable parse_sweep_variable(const std::string &name)
{
    if (name == "path_length")
        return SweepVariable::path_length;
    if (name == "snapshot_duration")
        return SweepVariable::snapshot_duration;
    if (name == "num_elements")
        return SweepVariable::num_elements;
    throw ConfigError("unknown sweep variable '" + name + "' (path_length, snapshot_duration, num_elements)");
}

struct SweepPoint
{
    double value = 0.0;
    std::vector<double> tpr;      // per order, same order as TprReport::orders
    double average_tpr = 0.0;
    std::vector<int> correct;     // empty when read back from CSV
    int trials_per_order = 0;
};

struct TprReport
{
    SweepVariable variable = SweepVariable::path_length;
    std::vector<int> orders;
    std::vector<SweepPoint> points;
};

inline TrialConfig apply_sweep_value(TrialConfig config, SweepVariable variable, double value)
{
    switch (variable)
    {
    case SweepVariable::path_length: config.path_length = value; break;
    case SweepVariable::snapshot_duration: config.snapshot_duration = value; break;
    case SweepVariable::num_elements:
        if (value != std::floor(value) || value < 2)
            throw ConfigError("num_elements sweep values must be integers >= 2");
        config.num_elements = static_cast<int>(value);
        break;
    }
    return config;
}

// Validates every sweep point without running anything.
inline void validate_sweep(const TrialConfig &config, SweepVariable variable, const std::vector<double> &values)
{
    if (values.empty())
        throw ConfigError("sweep needs at least one value");
    for (double v : values)
        apply_sweep_value(config, variable, v).validate();
}

namespace detail
{
// Runs fn(i) for i in [0, count) on up to `workers` threads; the first exception is rethrown.
template <typename Fn>
void parallel_for(std::size_t count, unsigned workers, Fn &&fn)
{
    if (workers == 0)
        workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(count, 1)));
    if (workers <= 1)
    {
        for (std::size_t i = 0; i < count; ++i)
            fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++)
            {
                try
                {
                    fn(i);
                }
                catch (...)
                {
                    std::lock_guard lock(failure_mutex);
                    if (!failure)
                        failure = std::current_exception();
                    next = count;
                }
            }
        });
    for (auto &t : pool)
        t.join();
    if (failure)
        std::rethrow_exception(failure);
}
} // namespace detail

inline TprReport tpr_sweep(const TrialConfig &config, SweepVariable variable, const std::vector<double> &values)
{
    validate_sweep(config, variable, values);
    auto table = std::make_shared<const AbsorptionTable>(resolve_absorption_source(config.absorption));

    TprReport report;
    report.variable = variable;
    report.orders = config.orders;
    const auto n_orders = config.orders.size();
    const auto trials = static_cast<std::size_t>(config.trials_per_order);

    for (std::size_t s = 0; s < values.size(); ++s)
    {
        const TrialRunner runner(apply_sweep_value(config, variable, values[s]), table);
        std::vector<char> hit(n_orders * trials, 0);
        detail::parallel_for(hit.size(), config.workers, [&](std::size_t task) {
            const std::size_t o = task / trials;
            const std::size_t t = task % trials;
            const int order = config.orders[o];
            const auto seed = derive_seed(config.base_seed, s, static_cast<std::uint64_t>(order), t);
            hit[task] = runner.run(order, seed).estimated_order == order ? 1 : 0;
        });

        SweepPoint point;
        point.value = values[s];
        point.trials_per_order = config.trials_per_order;
        double sum = 0.0;
        for (std::size_t o = 0; o < n_orders; ++o)
        {
            int correct = 0;
            for (std::size_t t = 0; t < trials; ++t)
                correct += hit[o * trials + t];
            point.correct.push_back(correct);
            point.tpr.push_back(static_cast<double>(correct) / static_cast<double>(trials));
            sum += point.tpr.back();
        }
        point.average_tpr = sum / static_cast<double>(n_orders);
        report.points.push_back(std::move(point));
    }
    return report;
}

// ================================================================================================
// Report files
// ================================================================================================

inline void write_report_csv(const TprReport &report, std::ostream &out)
{
    out << "sweep_value";
    for (int n : report.orders)
        out << ",tpr_order_" << n;
    out << ",avg_tpr\n";
    for (const auto &p : report.points)
    {
        out << format_double(p.value);
        for (double t : p.tpr)
            out << ',' << format_double(t);
        out << ',' << format_double(p.average_tpr) << '\n';
    }
}

inline TprReport read_report_csv(std::istream &in, SweepVariable variable = SweepVariable::path_length)
{
    TprReport report;
    report.variable = variable;
    std::string line;
    if (!std::getline(in, line))
        throw ParseError("report: missing header");
    {
        std::stringstream header(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(header, cell, ','))
            cells.push_back(cell);
        if (cells.size() < 2 || cells.front() != "sweep_value" || cells.back() != "avg_tpr")
            throw ParseError("report: unexpected header '" + line + "'");
        for (std::size_t i = 1; i + 1 < cells.size(); ++i)
        {
            const std::string prefix = "tpr_order_";
            if (cells[i].rfind(prefix, 0) != 0)
                throw ParseError("report: unexpected column '" + cells[i] + "'");
            const std::string digits = cells[i].substr(prefix.size());
            int order = 0;
            const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), order);
            if (ec != std::errc() || ptr != digits.data() + digits.size())
                throw ParseError("report: unexpected column '" + cells[i] + "'");
            report.orders.push_back(order);
        }
    }
    std::size_t line_no = 1;
    while (std::getline(in, line))
    {
        ++line_no;
        if (line.empty())
            continue;
        std::stringstream row(line);
        std::string cell;
        std::vector<double> values;
        while (std::getline(row, cell, ','))
        {
            double v = 0.0;
            if (!parse_double(cell, v))
                throw ParseError("report: line " + std::to_string(line_no) + ": bad number '" + cell + "'");
            values.push_back(v);
        }
        if (values.size() != report.orders.size() + 2)
            throw ParseError("report: line " + std::to_string(line_no) + ": wrong column count");
        SweepPoint p;
        p.value = values.front();
        p.tpr.assign(values.begin() + 1, values.end() - 1);
        p.average_tpr = values.back();
        report.points.push_back(std::move(p));
    }
    return report;
}

// gnuplot script drawing per-order and average TPR against the swept variable.
inline void write_plot_script(const TprReport &report, const std::string &csv_name, std::ostream &out)
{
    std::string x_expr = "1", x_label;
    switch (report.variable)
    {
    case SweepVariable::path_length:
        x_expr = "($1*100)";
        x_label = "Path length [cm]";
        break;
    case SweepVariable::snapshot_duration:
        x_expr = "($1*1e12)";
        x_label = "Snapshot observation duration [ps]";
        break;
    case SweepVariable::num_elements: x_label = "Number of antenna elements"; break;
    }
    const std::string stem = std::filesystem::path(csv_name).stem().string();
    out << "# gnuplot " << csv_name << "\n"
        << "set datafile separator ','\n"
        << "set terminal pngcairo size 800,500\n"
        << "set output '" << stem << ".png'\n"
        << "set xlabel '" << x_label << "'\n"
        << "set ylabel 'TPR'\n"
        << "set yrange [0:1.05]\n"
        << "set grid\n"
        << "set key bottom right\n"
        << "plot \\\n";
    for (std::size_t i = 0; i < report.orders.size(); ++i)
        out << "  '" << csv_name << "' using " << x_expr << ":" << (i + 2) << " skip 1 with linespoints title 'order "
            << report.orders[i] << "', \\\n";
    out << "  '" << csv_name << "' using " << x_expr << ":" << (report.orders.size() + 2)
        << " skip 1 with linespoints lw 2 title 'average'\n";
}

// Writes <csv_path> and a gnuplot script next to it (same stem, .gp).
inline void emit_report(const TprReport &report, const std::filesystem::path &csv_path)
{
    if (csv_path.has_parent_path())
        std::filesystem::create_directories(csv_path.parent_path());
    {
        std::ofstream csv(csv_path);
        if (!csv)
            throw ConfigError("cannot write report '" + csv_path.string() + "'");
        write_report_csv(report, csv);
    }
    auto script_path = csv_path;
    script_path.replace_extension(".gp");
    std::ofstream script(script_path);
    if (!script)
        throw ConfigError("cannot write plot script '" + script_path.string() + "'");
    write_plot_script(report, csv_path.filename().string(), script);
}

} // namespace thzorder

#endif
