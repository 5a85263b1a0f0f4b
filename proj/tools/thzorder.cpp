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
// Command-line front end:
//
//   thzorder table    [--out DIR]
//   thzorder classify --order N [--config PATH] [--seed S] [--no-noise] [--absorption SRC]
//   thzorder sweep    (--preset fig5|fig6|fig8 | --sweep VAR --values LIST) [--config PATH]
//                     [--seed S] [--out DIR] [--no-noise] [--absorption SRC] [--trials N] [--dry-run]
//
// Every failure prints exactly one line "error: <kind>: <message>" to stderr and exits non-zero.

#include "thzorder/thzorder.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace
{

using namespace thzorder;

struct CommonOptions
{
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    bool no_noise = false;
    std::string absorption;
};

RunConfig load_config(const CommonOptions &opt)
{
    RunConfig cfg = opt.config_path.empty() ? RunConfig{} : load_run_config(opt.config_path);
    if (opt.seed)
        cfg.trial.base_seed = *opt.seed;
    if (opt.no_noise)
        cfg.trial.noise = false;
    if (!opt.absorption.empty())
        cfg.trial.absorption = opt.absorption;
    if (!opt.out_dir.empty())
        cfg.out_dir = opt.out_dir;
    cfg.trial.validate();
    return cfg;
}

std::string one_line(std::string s)
{
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

// ------------------------------------------------------------------------------------------------
// table
// ------------------------------------------------------------------------------------------------

void write_band_table(std::ostream &out)
{
    out << "order,center_frequency_thz,f_low_thz,f_high_thz,bandwidth_3db_thz,rms_spread_thz\n";
    for (double fc : {3.0e12, 6.0e12})
        for (int n = 1; n <= kMaxPulseOrder; ++n)
        {
            const auto band = half_power_band(PulseSpec(n, fc));
            out << n << ',' << format_double(fc / 1e12) << ',' << format_double(band.f_low / 1e12) << ','
                << format_double(band.f_high / 1e12) << ',' << format_double(band.bandwidth_3db / 1e12) << ','
                << format_double(band.rms_spread / 1e12) << '\n';
        }
}

int cmd_table(const std::string &out_dir)
{
    std::ostringstream csv;
    write_band_table(csv);
    std::cout << csv.str();
    if (!out_dir.empty())
    {
        std::filesystem::create_directories(out_dir);
        std::ofstream file(std::filesystem::path(out_dir) / "band_table.csv");
        if (!file)
            throw ConfigError("cannot write " + out_dir + "/band_table.csv");
        file << csv.str();
    }
    return 0;
}

// ------------------------------------------------------------------------------------------------
// classify
// ------------------------------------------------------------------------------------------------

int cmd_classify(const CommonOptions &opt, int order)
{
    const RunConfig cfg = load_config(opt);
    const std::uint64_t seed = opt.seed.value_or(cfg.trial.base_seed);
    const auto result = TrialRunner(cfg.trial).run(order, seed);
    std::string record = to_record(result);
    record.insert(1, "\"true_order\":" + std::to_string(order) + ",\"seed\":" + std::to_string(seed) + ",");
    std::cout << record << '\n';
    return 0;
}

// ------------------------------------------------------------------------------------------------
// sweep
// ------------------------------------------------------------------------------------------------

struct SweepJob
{
    std::string name;
    TrialConfig config;
    SweepVariable variable;
    std::vector<double> values;
};

std::vector<SweepJob> preset_jobs(const std::string &preset, const TrialConfig &base)
{
    std::vector<SweepJob> jobs;
    if (preset == "fig5")
    {
        const std::vector<double> lengths{0.01, 0.10, 0.25, 0.50, 0.75};
        for (double fc : {3.0e12, 6.0e12})
        {
            TrialConfig c = base;
            c.center_frequency = fc;
            c.num_elements = 8;
            jobs.push_back({"fig5_fc" + format_double(fc / 1e12) + "thz", c, SweepVariable::path_length, lengths});
        }
    }
    else if (preset == "fig6")
    {
        std::vector<double> durations;
        for (double ps : {2.0, 3.0, 3.25, 4.0, 6.0, 8.0, 10.0, 12.0, 16.0, 20.0, 25.0, 32.0, 40.0, 48.0})
            durations.push_back(ps * 1e-12);
        for (double d : {0.50, 0.75})
        {
            TrialConfig c = base;
            c.center_frequency = 6.0e12;
            c.num_elements = 8;
            c.path_length = d;
            jobs.push_back({"fig6_" + format_double(d * 100) + "cm", c, SweepVariable::snapshot_duration, durations});
        }
    }
    else if (preset == "fig8")
    {
        TrialConfig c = base;
        c.center_frequency = 6.0e12;
        jobs.push_back({"fig8", c, SweepVariable::num_elements, {4, 8, 16}});
    }
    else
    {
        throw ConfigError("unknown preset '" + preset + "' (fig5, fig6, fig8)");
    }
    return jobs;
}

// "path_length_cm" / "snapshot_duration_ps" / "num_elements" with values in that unit.
SweepJob custom_job(const std::string &variable, const std::string &values, const TrialConfig &base)
{
    double scale = 1.0;
    SweepVariable var;
    if (variable == "path_length_cm")
    {
        var = SweepVariable::path_length;
        scale = 1e-2;
    }
    else if (variable == "snapshot_duration_ps")
    {
        var = SweepVariable::snapshot_duration;
        scale = 1e-12;
    }
    else if (variable == "num_elements")
    {
        var = SweepVariable::num_elements;
    }
    else
    {
        throw ConfigError("unknown sweep variable '" + variable +
                          "' (path_length_cm, snapshot_duration_ps, num_elements)");
    }
    std::vector<double> parsed;
    std::stringstream ss(values);
    std::string item;
    while (std::getline(ss, item, ','))
    {
        double v = 0.0;
        if (!parse_double(item, v))
            throw ConfigError("sweep value '" + item + "' is not a number");
        parsed.push_back(v * scale);
    }
    return {"sweep_" + variable, base, var, parsed};
}

int cmd_sweep(const CommonOptions &opt, const std::string &preset, const std::string &variable,
              const std::string &values, std::optional<int> trials, bool dry_run)
{
    RunConfig cfg = load_config(opt);
    if (trials)
        cfg.trial.trials_per_order = *trials;

    std::vector<SweepJob> jobs;
    if (!preset.empty())
    {
        if (!variable.empty())
            throw ConfigError("--preset and --sweep are mutually exclusive");
        jobs = preset_jobs(preset, cfg.trial);
    }
    else
    {
        if (variable.empty() || values.empty())
            throw ConfigError("sweep needs --preset or both --sweep and --values");
        jobs.push_back(custom_job(variable, values, cfg.trial));
    }

    for (const auto &job : jobs)
        validate_sweep(job.config, job.variable, job.values);
    if (dry_run)
    {
        for (const auto &job : jobs)
            std::cout << "ok: " << job.name << " (" << to_string(job.variable) << ", " << job.values.size()
                      << " points, " << job.config.trials_per_order << " trials/order)\n";
        return 0;
    }

    const std::filesystem::path out_dir = cfg.out_dir;
    std::filesystem::create_directories(out_dir);
    for (const auto &job : jobs)
    {
        if (cfg.verbosity > 0)
            std::cerr << "running " << job.name << " (" << job.values.size() << " points)\n";
        const auto report = tpr_sweep(job.config, job.variable, job.values);
        const auto csv = out_dir / (job.name + ".csv");
        emit_report(report, csv);
        std::cout << csv.string() << '\n';
    }
    return 0;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Derivative-order classification of terahertz Gaussian pulses"};
    app.require_subcommand(1);

    CommonOptions opt;
    auto add_common = [&](CLI::App *sub) {
        sub->add_option("--config", opt.config_path, "Run configuration file");
        sub->add_option("--seed", opt.seed, "Seed (base seed for sweeps, trial seed for classify)");
        sub->add_flag("--no-noise", opt.no_noise, "Disable molecular absorption noise");
        sub->add_option("--absorption", opt.absorption, "builtin:NAME or file:PATH");
    };

    std::string table_out;
    auto *table = app.add_subcommand("table", "Half-power band and RMS spread for orders 1..10 at 3 and 6 THz");
    table->add_option("--out", table_out, "Also write band_table.csv into this directory");

    int order = 0;
    auto *classify = app.add_subcommand("classify", "Run one seeded single-pulse trial");
    add_common(classify);
    classify->add_option("--order", order, "Transmitted derivative order")->required();

    std::string preset, variable, values;
    std::optional<int> trials;
    bool dry_run = false;
    auto *sweep = app.add_subcommand("sweep", "TPR sweep, writes CSV and gnuplot script");
    add_common(sweep);
    sweep->add_option("--out", opt.out_dir, "Output directory");
    sweep->add_option("--preset", preset, "fig5 | fig6 | fig8");
    sweep->add_option("--sweep", variable, "path_length_cm | snapshot_duration_ps | num_elements");
    sweep->add_option("--values", values, "Comma-separated sweep values in the variable's unit");
    sweep->add_option("--trials", trials, "Trials per order (overrides config)");
    sweep->add_flag("--dry-run", dry_run, "Validate the sweep without running it");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::CallForAllHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError &e)
    {
        std::cerr << "error: usage: " << one_line(e.what()) << '\n';
        return 2;
    }

    try
    {
        if (*table)
            return cmd_table(table_out);
        if (*classify)
            return cmd_classify(opt, order);
        if (*sweep)
            return cmd_sweep(opt, preset, variable, values, trials, dry_run);
    }
    catch (const thzorder::Error &e)
    {
        std::cerr << "error: " << e.kind() << ": " << one_line(e.what()) << '\n';
        return 2;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: internal: " << one_line(e.what()) << '\n';
        return 3;
    }
    return 0;
}
