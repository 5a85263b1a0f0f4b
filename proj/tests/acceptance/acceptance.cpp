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
//
// Acceptance suite: one [PASS]/[FAIL] line per criterion, exit status 1 if any criterion fails.

#include "thzorder/thzorder.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace thzorder;

namespace
{

struct Outcome
{
    bool pass = false;
    std::string detail;
};

int failures = 0;

void report(const std::string &id, const std::string &title, const std::function<Outcome()> &check)
{
    Outcome o;
    try
    {
        o = check();
    }
    catch (const std::exception &e)
    {
        o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << id << " " << title << ": " << o.detail << std::endl;
}

double rel(double value, double expected) { return std::abs(value - expected) / std::abs(expected); }

std::string fmt(double v, int digits = 4)
{
    std::ostringstream s;
    s.precision(digits);
    s << v;
    return s.str();
}

// Published half-power band and spread values in THz: order, f_c, f_low, f_high, B_3dB, spread.
constexpr std::array<std::array<double, 6>, 20> kBandTable{{
    {1, 3, 1.444, 4.909, 3.464, 1.451},  {2, 3, 1.850, 4.324, 2.473, 1.038},  {3, 3, 2.045, 4.071, 2.026, 0.855},
    {4, 3, 2.164, 3.922, 1.757, 0.744},  {5, 3, 2.248, 3.821, 1.573, 0.666},  {6, 3, 2.310, 3.747, 1.437, 0.609},
    {7, 3, 2.359, 3.690, 1.331, 0.564},  {8, 3, 2.398, 3.644, 1.245, 0.528},  {9, 3, 2.431, 3.606, 1.174, 0.498},
    {10, 3, 2.459, 3.574, 1.114, 0.472}, {1, 6, 2.889, 9.819, 6.929, 2.119},  {2, 6, 3.701, 8.649, 4.947, 1.809},
    {3, 6, 4.090, 8.142, 4.052, 1.597},  {4, 6, 4.329, 7.844, 3.515, 1.436},  {5, 6, 4.496, 7.643, 3.147, 1.309},
    {6, 6, 4.620, 7.495, 2.874, 1.207},  {7, 6, 4.718, 7.381, 2.662, 1.124},  {8, 6, 4.797, 7.289, 2.491, 1.054},
    {9, 6, 4.863, 7.213, 2.349, 0.995},  {10, 6, 4.919, 7.149, 2.229, 0.945},
}};

Outcome band_table()
{
    double worst = 0.0;
    for (const auto &row : kBandTable)
    {
        const PulseSpec pulse(static_cast<int>(row[0]), row[1] * 1e12);
        const auto band = half_power_band(pulse);
        const double spread = analytic_rms_spread(pulse, kDefaultChannelBand, kSpreadResolution);
        worst = std::max({worst, rel(band.f_low / 1e12, row[2]), rel(band.f_high / 1e12, row[3]),
                          rel(band.bandwidth_3db / 1e12, row[4]), rel(spread / 1e12, row[5])});
    }
    return {worst <= 0.01, "80 values, max relative error " + fmt(worst * 100, 3) + " % (limit 1 %)"};
}

struct NoiselessRun
{
    int trials = 0, correct = 0;
    double worst_doa_error = 0.0;
};

const NoiselessRun &noiseless_runs()
{
    static const NoiselessRun run = [] {
        NoiselessRun r;
        for (double fc : {3e12, 6e12})
            for (double d : {0.01, 0.10, 0.50})
            {
                TrialConfig c;
                c.noise = false;
                c.num_elements = 8;
                c.snapshot_duration = 8e-12;
                c.center_frequency = fc;
                c.path_length = d;
                const TrialRunner runner(c);
                for (int order : {1, 4, 10})
                    for (std::uint64_t seed = 0; seed < 50; ++seed)
                    {
                        const auto result = runner.run(order, derive_seed(c.base_seed, 0, order, seed));
                        ++r.trials;
                        r.correct += result.estimated_order == order ? 1 : 0;
                        r.worst_doa_error = std::max(r.worst_doa_error, std::abs(result.doa_estimate - c.true_doa));
                    }
            }
        return r;
    }();
    return run;
}

Outcome noiseless_oracle()
{
    const auto &r = noiseless_runs();
    return {r.correct == r.trials, std::to_string(r.correct) + "/" + std::to_string(r.trials) + " correct"};
}

Outcome doa_accuracy()
{
    const auto &r = noiseless_runs();
    return {r.worst_doa_error <= 0.025 + 1e-9,
            "max |doa - 15.7125| = " + fmt(r.worst_doa_error) + " deg over " + std::to_string(r.trials) + " trials"};
}

Outcome covariance_convergence()
{
    const auto table = builtin_absorption_table("summer-air");
    const PulseSpec pulse(4, 6e12);
    ChannelParams params;
    params.path_length = 0.5;
    params.antenna_center = 6e12;
    const ArrayConfig array{8, kDefaultElementSpacing};
    const auto grid = build_frequency_grid(kDefaultChannelBand, 8e-12);
    const std::size_t bin = 40;  // 6 THz
    const auto y = synthesize_snapshots(pulse, params, table, array, 15.7125, grid, 1000, 1, true);
    const auto sample = sample_covariance(y.bins[bin]);
    const auto exact = analytic_covariance(pulse, params, table, array, 15.7125, grid[bin], grid.bin_width());
    const double err = (sample - exact).norm() / exact.norm();
    return {err <= 0.05, "K = 1000 at " + fmt(grid[bin] / 1e12) + " THz, Frobenius error " + fmt(err * 100, 3) +
                             " % (limit 5 %)"};
}

TrialConfig noisy_base()
{
    TrialConfig c;
    c.center_frequency = 6e12;
    c.num_elements = 8;
    c.path_length = 0.5;
    c.trials_per_order = 200;
    c.absorption = "builtin:summer-air";
    return c;
}

Outcome noisy_trend()
{
    const std::vector<double> durations{2e-12, 3e-12, 3.25e-12, 4e-12, 6e-12, 8e-12, 10e-12,
                                        12e-12, 16e-12, 20e-12, 25e-12, 32e-12, 40e-12, 48e-12};
    auto near = noisy_base();
    auto far = noisy_base();
    far.path_length = 0.75;
    const auto at50 = tpr_sweep(near, SweepVariable::snapshot_duration, durations);
    const auto at75 = tpr_sweep(far, SweepVariable::snapshot_duration, durations);

    const std::size_t i16 = 8;
    const double tpr16 = at50.points[i16].average_tpr;
    int ordered = 0;
    std::string violations;
    for (std::size_t i = 0; i < durations.size(); ++i)
    {
        if (at50.points[i].average_tpr >= at75.points[i].average_tpr)
            ++ordered;
        else
            violations += " " + fmt(durations[i] * 1e12) + "ps";
    }
    const bool pass = tpr16 >= 0.95 && ordered == static_cast<int>(durations.size());
    return {pass, "avg TPR at 50 cm / 16 ps = " + fmt(tpr16) + " (limit 0.95); 50 cm >= 75 cm at " +
                      std::to_string(ordered) + "/" + std::to_string(durations.size()) + " durations" +
                      (violations.empty() ? "" : " (violated at" + violations + ")") + "; 75 cm / 16 ps = " +
                      fmt(at75.points[i16].average_tpr)};
}

Outcome antenna_count()
{
    auto c = noisy_base();
    c.snapshot_duration = 16e-12;
    const auto report = tpr_sweep(c, SweepVariable::num_elements, {4, 8, 16});
    double lo = 1.0, hi = 0.0;
    std::string values;
    for (const auto &p : report.points)
    {
        lo = std::min(lo, p.average_tpr);
        hi = std::max(hi, p.average_tpr);
        values += " N=" + fmt(p.value) + ":" + fmt(p.average_tpr);
    }
    return {hi - lo <= 0.05, "avg TPR" + values + ", spread " + fmt((hi - lo) * 100, 3) + " pp (limit 5 pp)"};
}

Outcome properties()
{
    std::vector<std::string> failed;

    // normalization
    double worst_norm = 0.0;
    for (double fc : {3e12, 6e12})
        for (int n = 1; n <= kMaxPulseOrder; ++n)
        {
            const PulseSpec p(n, fc);
            const double hi = fc * 6.0;
            const double integral = detail::simpson([&](double f) { return p.psd(f); }, 0.0, hi, 1e8);
            worst_norm = std::max(worst_norm, rel(integral, p.power()));
        }
    if (worst_norm > 1e-6)
        failed.push_back("normalization " + fmt(worst_norm));

    // spread monotonic in order
    for (double fc : {3e12, 6e12})
        for (int n = 1; n < kMaxPulseOrder; ++n)
            if (!(analytic_rms_spread(PulseSpec(n + 1, fc)) < analytic_rms_spread(PulseSpec(n, fc))))
                failed.push_back("monotonicity at order " + std::to_string(n));

    // exact PSD recovery without noise
    const auto table = builtin_absorption_table("summer-air");
    const ArrayConfig array{8, kDefaultElementSpacing};
    const auto grid = build_frequency_grid(kDefaultChannelBand, 8e-12);
    double worst_psd = 0.0;
    for (int n : {1, 4, 10})
        for (double d : {0.01, 0.5})
        {
            const PulseSpec pulse(n, 6e12);
            ChannelParams params;
            params.path_length = d;
            const auto cov =
                sample_covariance(synthesize_snapshots(pulse, params, table, array, 15.7125, grid, 1, 0, false));
            const auto psd = estimate_psd(cov, 15.7125, array);
            for (std::size_t b = 0; b < grid.size(); ++b)
            {
                const double expected = pulse.psd(grid[b]) * std::norm(channel_response(grid[b], params, table));
                if (expected > 0.0)
                    worst_psd = std::max(worst_psd, rel(psd.values[b], expected));
            }
        }
    if (worst_psd > 1e-9)
        failed.push_back("PSD recovery " + fmt(worst_psd));

    // scale invariance of the spread estimate
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst_scale = 0.0;
    for (int trial = 0; trial < 100; ++trial)
    {
        PsdEstimate psd{grid, std::vector<double>(grid.size())};
        for (auto &v : psd.values)
            v = u(rng);
        PsdEstimate scaled = psd;
        const double c = std::pow(10.0, 60.0 * u(rng) - 30.0);
        for (auto &v : scaled.values)
            v *= c;
        worst_scale = std::max(worst_scale, rel(rms_spread_estimate(scaled, 6e12), rms_spread_estimate(psd, 6e12)));
    }
    if (worst_scale > 1e-12)
        failed.push_back("scale invariance " + fmt(worst_scale));

    // two full sweep runs give byte-identical CSV files
    const auto dir = std::filesystem::temp_directory_path() / "thzorder_acceptance";
    std::filesystem::remove_all(dir);
    auto c = noisy_base();
    c.trials_per_order = 20;
    c.base_seed = 99;
    const std::vector<double> lengths{0.01, 0.10, 0.25, 0.50, 0.75};
    emit_report(tpr_sweep(c, SweepVariable::path_length, lengths), dir / "first.csv");
    emit_report(tpr_sweep(c, SweepVariable::path_length, lengths), dir / "second.csv");
    auto slurp = [](const std::filesystem::path &p) {
        std::ifstream in(p, std::ios::binary);
        std::stringstream s;
        s << in.rdbuf();
        return s.str();
    };
    const bool identical = slurp(dir / "first.csv") == slurp(dir / "second.csv") && !slurp(dir / "first.csv").empty();
    std::filesystem::remove_all(dir);
    if (!identical)
        failed.push_back("sweep CSVs differ");

    std::string detail = "normalization " + fmt(worst_norm, 2) + ", PSD recovery " + fmt(worst_psd, 2) +
                         ", scale invariance " + fmt(worst_scale, 2) + ", spread monotone, sweep CSVs " +
                         (identical ? "identical" : "differ");
    if (!failed.empty())
    {
        detail += "; failed:";
        for (const auto &f : failed)
            detail += " " + f;
    }
    return {failed.empty(), detail};
}

} // namespace

int main()
{
    report("AC1", "band table reproduction", band_table);
    report("AC2", "noiseless pipeline oracle", noiseless_oracle);
    report("AC3", "DOA accuracy", doa_accuracy);
    report("AC4", "covariance convergence", covariance_convergence);
    report("AC5", "noisy-regime trend", noisy_trend);
    report("AC6", "antenna-count insensitivity", antenna_count);
    report("AC7", "property suites", properties);
    std::cout << (failures == 0 ? "all acceptance criteria passed" : std::to_string(failures) + " criteria failed")
              << std::endl;
    return failures == 0 ? 0 : 1;
}
