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

#include <catch2/catch_amalgamated.hpp>

#include "thzorder/channel.hpp"

#include <cmath>
#include <filesystem>
#include <random>
#include <sstream>
#include <vector>

using namespace thzorder;
using Catch::Approx;

namespace
{

AbsorptionTable flat_table(double k, Band range = {0.5e12, 10.5e12})
{
    return AbsorptionTable({range.low, range.high}, {k, k});
}

ChannelParams params_at(double d, double fo = 6e12)
{
    ChannelParams p;
    p.path_length = d;
    p.antenna_center = fo;
    return p;
}

// Independent piecewise-linear lookup over raw samples.
double lerp_samples(const std::vector<double> &f, const std::vector<double> &k, double x)
{
    for (std::size_t i = 1; i < f.size(); ++i)
        if (x <= f[i])
            return k[i - 1] + (k[i] - k[i - 1]) * (x - f[i - 1]) / (f[i] - f[i - 1]);
    return k.back();
}

} // namespace

TEST_CASE("absorption_coefficient interpolates linearly", "[channel]")
{
    const AbsorptionTable t({1e12, 2e12, 4e12}, {0.0, 3.0, 1.0});
    CHECK(absorption_coefficient(t, 1e12) == 0.0);
    CHECK(absorption_coefficient(t, 2e12) == 3.0);
    CHECK(absorption_coefficient(t, 4e12) == 1.0);
    CHECK(absorption_coefficient(t, 1.5e12) == Approx(1.5));
    CHECK(absorption_coefficient(t, 3e12) == Approx(2.0));
    CHECK_THROWS_AS(absorption_coefficient(t, 0.999e12), RangeError);
    CHECK_THROWS_AS(absorption_coefficient(t, 4.001e12), RangeError);
}

TEST_CASE("AbsorptionTable from species", "[channel]")
{
    const std::vector<double> f{1e12, 2e12, 3e12};
    const std::vector<double> k{0.5, 2.0, 1.25};

    SECTION("equal halves of one species reproduce it")
    {
        const auto t = AbsorptionTable::from_species(f, {{"h2o", 0.5, k}, {"h2o-copy", 0.5, k}});
        for (double x : {1e12, 1.7e12, 2.5e12, 3e12})
            CHECK(t.coefficient(x) == Approx(lerp_samples(f, k, x)).epsilon(1e-12));
        REQUIRE(t.species().size() == 2);
    }

    SECTION("combined samples are the mole-fraction weighted sum")
    {
        const std::vector<double> k2{4.0, 0.0, 8.0};
        const auto t = AbsorptionTable::from_species(f, {{"a", 0.2, k}, {"b", 0.7, k2}});
        for (std::size_t i = 0; i < f.size(); ++i)
            CHECK(t.coefficients()[i] == Approx(0.2 * k[i] + 0.7 * k2[i]).epsilon(1e-9));
    }

    SECTION("invalid species")
    {
        CHECK_THROWS_AS(AbsorptionTable::from_species(f, {{"a", 1.5, k}}), ValidationError);
        CHECK_THROWS_AS(AbsorptionTable::from_species(f, {{"a", 0.5, {1.0, 2.0}}}), ValidationError);
        CHECK_THROWS_AS(AbsorptionTable::from_species(f, {{"a", 0.5, {1.0, -2.0, 1.0}}}), ValidationError);
    }

    SECTION("invalid samples")
    {
        CHECK_THROWS_AS(AbsorptionTable({1e12, 1e12}, {0.0, 0.0}), ValidationError);
        CHECK_THROWS_AS(AbsorptionTable({1e12, 2e12}, {0.0, -1.0}), ValidationError);
        CHECK_THROWS_AS(AbsorptionTable({1e12}, {0.0}), ValidationError);
    }
}

TEST_CASE("spreading_loss", "[channel]")
{
    // c0 / (4 pi 0.5 m 6 THz)
    CHECK(std::abs(spreading_loss(3e12, params_at(0.5))) == Approx(7.95224193206157e-06).epsilon(1e-12));
    CHECK(std::abs(spreading_loss(3e12, params_at(0.5))) == Approx(7.958e-6).epsilon(1e-3));
    CHECK(std::abs(spreading_loss(4e12, params_at(1.0))) ==
          Approx(0.5 * std::abs(spreading_loss(4e12, params_at(0.5)))).epsilon(1e-14));

    const auto at_zero = spreading_loss(0.0, params_at(0.3));
    CHECK(at_zero.imag() == 0.0);
    CHECK(at_zero.real() > 0.0);

    const double f = 5.5e12, d = 0.25;
    const double phase = std::arg(spreading_loss(f, params_at(d)));
    CHECK(std::remainder(phase + 2.0 * kPi * f * d / kSpeedOfLight, 2.0 * kPi) == Approx(0.0).margin(1e-9));

    CHECK_THROWS_AS(spreading_loss(f, params_at(0.0)), ValidationError);
    CHECK_THROWS_AS(spreading_loss(f, params_at(-1.0)), ValidationError);
}

TEST_CASE("absorption_loss", "[channel]")
{
    CHECK(absorption_loss(5e12, params_at(0.7), flat_table(0.0)) == 1.0);
    // k d = 2 ln 2
    CHECK(absorption_loss(5e12, params_at(0.5), flat_table(4.0 * std::log(2.0))) == Approx(0.5).epsilon(1e-14));

    const auto table = builtin_absorption_table("summer-air");
    double previous = 1.0;
    for (double d = 0.01; d < 2.0; d += 0.05)
    {
        const double g = absorption_loss(1.097e12, params_at(d), table);
        CHECK(g > 0.0);
        CHECK(g <= previous);
        previous = g;
    }
    CHECK_THROWS_AS(absorption_loss(11e12, params_at(0.5), table), RangeError);
}

TEST_CASE("channel_response", "[channel]")
{
    const auto table = builtin_absorption_table("summer-air");
    const auto lossless = flat_table(0.0);
    for (double f : {1.0e12, 2.2e12, 4.7e12, 6.0e12, 9.9e12})
    {
        const auto p = params_at(0.5);
        const auto h = channel_response(f, p, table);
        const auto s = spreading_loss(f, p);
        CHECK(std::abs(channel_response(f, p, lossless)) == Approx(std::abs(s)).epsilon(1e-15));
        CHECK(std::abs(h) <= std::abs(s));
        CHECK(std::arg(h) == Approx(std::arg(s)).margin(1e-12));

        // strictly decreasing in d
        CHECK(std::abs(channel_response(f, params_at(0.6), table)) < std::abs(h));
    }
}

TEST_CASE("molecular noise temperature and background noise", "[channel]")
{
    const auto p = params_at(0.5);
    CHECK(molecular_noise_temperature(5e12, p, flat_table(0.0)) == 0.0);
    CHECK(molecular_noise_temperature(5e12, p, flat_table(200.0)) == Approx(296.0).epsilon(1e-12));
    CHECK(molecular_noise_temperature(5e12, p, flat_table(5.0)) < 296.0);

    const auto table = builtin_absorption_table("summer-air");
    double previous = 0.0;
    for (double d = 0.01; d < 1.0; d += 0.05)
    {
        const double t = molecular_noise_temperature(2.2e12, params_at(d), table);
        CHECK(t > previous);
        CHECK(t < 296.0);
        previous = t;
    }

    const double aperture = kSpeedOfLight / (std::sqrt(4.0 * kPi) * 6e12);
    const double saturation = kBoltzmann * 296.0 * aperture * aperture;
    CHECK(background_noise_psd(5e12, p, flat_table(0.0)) == 0.0);
    CHECK(background_noise_psd(5e12, p, flat_table(500.0)) == Approx(saturation).epsilon(1e-12));
    // k d = ln 2
    CHECK(background_noise_psd(5e12, p, flat_table(2.0 * std::log(2.0))) == Approx(0.5 * saturation).epsilon(1e-12));
}

TEST_CASE("self and total noise", "[channel]")
{
    const auto p = params_at(0.5);
    const auto absorbing = flat_table(3.0);
    CHECK(self_noise_psd(5e12, p, absorbing, 0.0) == 0.0);
    CHECK(self_noise_psd(5e12, p, flat_table(0.0), 1e-18) == 0.0);
    CHECK(self_noise_psd(5e12, p, absorbing, 3e-18) == Approx(3.0 * self_noise_psd(5e12, p, absorbing, 1e-18)));

    const double spread = kSpeedOfLight / (4.0 * kPi * 0.5 * 6e12);
    CHECK(self_noise_psd(5e12, p, absorbing, 2e-18) ==
          Approx(2e-18 * (1.0 - std::exp(-1.5)) * spread * spread).epsilon(1e-12));

    const auto table = builtin_absorption_table("summer-air");
    for (double f = 1e12; f <= 10e12; f += 0.37e12)
    {
        const double b = background_noise_psd(f, p, table);
        const double s = self_noise_psd(f, p, table, 1e-19);
        const double t = total_noise_psd(f, p, table, 1e-19);
        CHECK(t == b + s);
        CHECK(t >= std::max(b, s));
    }
}

TEST_CASE("noise_variance_per_bin", "[channel]")
{
    const auto p = params_at(0.5);

    SECTION("constant PSD integrates to PSD times width")
    {
        const auto table = flat_table(2.0);
        const double width = 125e9;
        const double psd = total_noise_psd(4e12, p, table, 1e-20);
        CHECK(noise_variance_per_bin(4e12, width, p, table, [](double) { return 1e-20; }) ==
              Approx(psd * width).epsilon(1e-12));
    }

    SECTION("zero noise band")
    {
        CHECK(noise_variance_per_bin(4e12, 125e9, p, flat_table(0.0), PulseSpec(4, 6e12)) == 0.0);
    }

    SECTION("matches a fine trapezoid oracle on a Lorentzian line")
    {
        const std::vector<AbsorptionLine> lines{{4.03e12, 25.0, 10e9}};
        const auto table = synthetic_absorption_table(lines, {0.5e12, 10.5e12}, 1e9);
        const std::vector<double> fs(table.frequencies().begin(), table.frequencies().end());
        const std::vector<double> ks(table.coefficients().begin(), table.coefficients().end());
        const PulseSpec pulse(4, 6e12);

        const double width = 125e9;
        for (double fb : {4.0e12, 4.03e12, 4.09e12})
        {
            // 800 trapezoid panels: 100x the 8 sub-samples the integrator guarantees
            const int panels = 800;
            const double h = width / panels;
            const double spread = kSpeedOfLight / (4.0 * kPi * 0.5 * 6e12);
            const double aperture = kSpeedOfLight / (std::sqrt(4.0 * kPi) * 6e12);
            double sum = 0.0;
            for (int i = 0; i <= panels; ++i)
            {
                const double f = fb - 0.5 * width + h * i;
                const double e = 1.0 - std::exp(-lerp_samples(fs, ks, f) * 0.5);
                const double s = kBoltzmann * 296.0 * e * aperture * aperture + pulse.psd(f) * e * spread * spread;
                sum += (i == 0 || i == panels ? 0.5 : 1.0) * s;
            }
            const double oracle = sum * h;
            CHECK(noise_variance_per_bin(fb, width, p, table, pulse) == Approx(oracle).epsilon(1e-4));
        }
    }

    SECTION("bins must lie inside the table")
    {
        const auto table = flat_table(1.0, {1e12, 10e12});
        CHECK_THROWS_AS(noise_variance_per_bin(1e12, 125e9, p, table, PulseSpec(1, 6e12)), RangeError);
        CHECK_THROWS_AS(noise_variance_per_bin(5e12, 0.0, p, table, PulseSpec(1, 6e12)), ValidationError);
    }
}

TEST_CASE("synthetic_absorption_table", "[channel]")
{
    SECTION("no lines gives an all-zero table")
    {
        const auto t = synthetic_absorption_table({}, {1e12, 2e12}, 0.1e12);
        CHECK(t.size() == 11);
        for (double k : t.coefficients())
            CHECK(k == 0.0);
    }

    SECTION("Lorentzian peak and half width")
    {
        const std::vector<AbsorptionLine> lines{{3e12, 7.0, 20e9}};
        const auto t = synthetic_absorption_table(lines, {2e12, 4e12}, 1e9);
        CHECK(t.coefficient(3e12) == Approx(7.0).epsilon(1e-12));
        CHECK(t.coefficient(3.02e12) == Approx(3.5).epsilon(1e-12));
        CHECK(t.coefficient(2.98e12) == Approx(3.5).epsilon(1e-12));
        CHECK(t.range() == Band{2e12, 4e12});
    }

    SECTION("builtin presets")
    {
        const auto summer = builtin_absorption_table("summer-air");
        const auto dry = builtin_absorption_table("dry-air");
        const auto vacuum = builtin_absorption_table("vacuum");
        CHECK(summer.range() == kBuiltinTableRange);
        double peak = 0.0, window = 1e9;
        for (double f = 1e12; f <= 10e12; f += 1e9)
        {
            peak = std::max(peak, summer.coefficient(f));
            window = std::min(window, summer.coefficient(f));
            CHECK(dry.coefficient(f) == Approx(0.1 * summer.coefficient(f)).epsilon(1e-12));
            CHECK(vacuum.coefficient(f) == 0.0);
        }
        CHECK(peak > 10.0);   // strong resonances
        CHECK(window < 0.5);  // transparent windows
        CHECK_THROWS_AS(builtin_absorption_table("martian"), ConfigError);
    }
}

TEST_CASE("absorption CSV", "[channel]")
{
    SECTION("well-formed file with header and comments")
    {
        std::istringstream in("# exported table\nfrequency_hz,k_per_m\n1e12,0.5\n2e12, 1.5\n\n3e12,0\n");
        const auto t = parse_absorption_csv(in);
        CHECK(t.size() == 3);
        CHECK(t.coefficient(2e12) == 1.5);
    }

    SECTION("headerless file")
    {
        std::istringstream in("1e12,0.5\n2e12,1.5\n");
        CHECK(parse_absorption_csv(in).size() == 2);
    }

    auto error_of = [](const std::string &text) {
        std::istringstream in(text);
        try
        {
            parse_absorption_csv(in, "t.csv");
        }
        catch (const ParseError &e)
        {
            return std::string(e.what());
        }
        return std::string("no error");
    };

    SECTION("descending frequencies name the offending line")
    {
        CHECK_THAT(error_of("frequency_hz,k_per_m\n2e12,1\n3e12,1\n2.5e12,1\n"),
                   Catch::Matchers::StartsWith("t.csv:4:"));
    }

    SECTION("negative coefficients")
    {
        CHECK_THAT(error_of("1e12,1\n2e12,-0.1\n"), Catch::Matchers::StartsWith("t.csv:2:"));
    }

    SECTION("malformed rows")
    {
        CHECK_THAT(error_of("1e12,1\n2e12;1\n"), Catch::Matchers::StartsWith("t.csv:2:"));
        CHECK_THAT(error_of("1e12,1\n2e12,x\n"), Catch::Matchers::StartsWith("t.csv:2:"));
        CHECK_THAT(error_of("1e12,1,3\n"), Catch::Matchers::StartsWith("t.csv:1:"));
        CHECK_THAT(error_of("1e12,1\n"), Catch::Matchers::ContainsSubstring("two data rows"));
    }

    SECTION("save then load is bit-exact")
    {
        const auto original = builtin_absorption_table("summer-air");
        const auto path = std::filesystem::temp_directory_path() / "thzorder_roundtrip.csv";
        save_absorption_csv(original, path);
        const auto loaded = load_absorption_csv(path);
        std::filesystem::remove(path);
        REQUIRE(loaded.size() == original.size());
        for (std::size_t i = 0; i < loaded.size(); ++i)
        {
            CHECK(loaded.frequencies()[i] == original.frequencies()[i]);
            CHECK(loaded.coefficients()[i] == original.coefficients()[i]);
        }
    }

    SECTION("sources")
    {
        CHECK(resolve_absorption_source("builtin:vacuum").coefficient(5e12) == 0.0);
        CHECK_THROWS_AS(resolve_absorption_source("summer-air"), ConfigError);
        CHECK_THROWS_AS(resolve_absorption_source("file:/nonexistent/table.csv"), ParseError);
    }
}

TEST_CASE("random tables keep loss and temperature bounds", "[channel][property]")
{
    std::mt19937_64 rng(GENERATE(take(10, random<std::uint64_t>(0, 1u << 30))));
    std::uniform_real_distribution<double> k_dist(0.0, 10.0), d_dist(0.001, 3.0), f_dist(1e12, 10e12);
    std::vector<double> fs, ks;
    for (int i = 0; i <= 100; ++i)
    {
        fs.push_back(0.5e12 + i * 0.1e12);
        ks.push_back(k_dist(rng));
    }
    const AbsorptionTable table(fs, ks);
    for (int i = 0; i < 50; ++i)
    {
        const auto p = params_at(d_dist(rng));
        const double f = f_dist(rng);
        const double g = absorption_loss(f, p, table);
        CHECK(g > 0.0);
        CHECK(g <= 1.0);
        const double t = molecular_noise_temperature(f, p, table);
        CHECK(t >= 0.0);
        CHECK(t < 296.0);
    }
}
