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

#ifndef THZORDER_ARRAY_HPP
#define THZORDER_ARRAY_HPP

#include "channel.hpp"
#include "common.hpp"
#include "pulse.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

// Uniform linear array reception in the frequency domain. Element 1 sits at the origin, element i
// at (i - 1) d_s; a far-field plane wave from angle theta (degrees from broadside) reaches element i
// with delay (i - 1) d_s sin(theta) / c0.

namespace thzorder
{

using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

inline constexpr double kDefaultElementSpacing = 15.0e-6;  // m
inline constexpr double kMinSnapshotDuration = 2.0e-12;    // s

inline double degrees_to_radians(double deg) { return deg * kPi / 180.0; }

struct ArrayConfig
{
    int num_elements = 8;
    double spacing = kDefaultElementSpacing;

    void validate() const
    {
        if (num_elements < 2)
            throw ValidationError("ArrayConfig: need at least 2 elements, got " + std::to_string(num_elements));
        if (!(spacing > 0.0) || !std::isfinite(spacing))
            throw ValidationError("ArrayConfig: element spacing must be positive");
    }

    // d_s <= c0 / (2 f_max). The customary 15 um spacing for a 10 THz upper edge exceeds the exact
    // half wavelength (14.99 um) by 0.07 %, so a 0.1 % allowance is applied.
    void check_aliasing(double f_max, double light_speed = kSpeedOfLight) const
    {
        const double half_wavelength = light_speed / (2.0 * f_max);
        if (spacing > half_wavelength * (1.0 + 1e-3))
            throw ConfigError("ArrayConfig: element spacing " + format_double(spacing) +
                              " m exceeds half the minimum wavelength (" + format_double(half_wavelength) +
                              " m); the array would alias spatially");
    }
};

// ================================================================================================
// Frequency grid: L = floor(B dT) + 1 bins spaced 1/dT starting at the lower band edge
// ================================================================================================

class FrequencyGrid
{
public:
    FrequencyGrid() = default;

    FrequencyGrid(Band band, double snapshot_duration)
        : band_(band), snapshot_duration_(snapshot_duration)
    {
        if (!band.valid())
            throw ConfigError("FrequencyGrid: empty band");
        if (!(snapshot_duration > 0.0) || !std::isfinite(snapshot_duration))
            throw ConfigError("FrequencyGrid: snapshot duration must be positive");
        const double product = band.width() * snapshot_duration;
        const auto count = static_cast<std::size_t>(std::floor(product + 1e-9)) + 1;
        if (count < 2)
            throw ConfigError("FrequencyGrid: snapshot duration " + format_double(snapshot_duration) +
                              " s gives fewer than 2 frequency bins over the band");
        bins_.reserve(count);
        for (std::size_t b = 0; b < count; ++b)
            bins_.push_back(std::min(band.low + static_cast<double>(b) / snapshot_duration, band.high));
    }

    const Band &band() const { return band_; }
    double snapshot_duration() const { return snapshot_duration_; }
    double bin_width() const { return 1.0 / snapshot_duration_; }
    std::size_t size() const { return bins_.size(); }
    double operator[](std::size_t b) const { return bins_[b]; }
    const std::vector<double> &bins() const { return bins_; }

private:
    Band band_{};
    double snapshot_duration_ = 0.0;
    std::vector<double> bins_;
};

inline FrequencyGrid build_frequency_grid(Band band, double snapshot_duration)
{
    return FrequencyGrid(band, snapshot_duration);
}

// tau_i = (i - 1) d_s sin(theta) / c0, i is 1-based
inline double element_delay(int index, double spacing, double angle_deg, double light_speed = kSpeedOfLight)
{
    if (index < 1)
        throw ValidationError("element_delay: element index is 1-based");
    return static_cast<double>(index - 1) * spacing * std::sin(degrees_to_radians(angle_deg)) / light_speed;
}

inline ComplexVector steering_vector(double f, double angle_deg, const ArrayConfig &config,
                                     double light_speed = kSpeedOfLight)
{
    ComplexVector a(config.num_elements);
    for (int i = 0; i < config.num_elements; ++i)
    {
        const double tau = element_delay(i + 1, config.spacing, angle_deg, light_speed);
        a(i) = std::polar(1.0, -2.0 * kPi * f * tau);
    }
    return a;
}

// ================================================================================================
// Snapshots and covariances
// ================================================================================================

// Per-bin N x K Fourier coefficient matrices.
struct SnapshotMatrix
{
    FrequencyGrid grid;
    std::vector<ComplexMatrix> bins;
};

// Per-bin N x N covariance matrices.
struct CovarianceEstimate
{
    FrequencyGrid grid;
    std::vector<ComplexMatrix> bins;
};

// Noise variance of one Fourier coefficient at bin f_b: the noise PSD averaged over the bin,
// so it shares units (W/Hz) with the signal term |P_n(f_b)|^2 |H(f_b)|^2.
inline double bin_noise_variance(double f_b, double bin_width, const ChannelParams &params,
                                 const AbsorptionTable &table, const PulseSpec &pulse)
{
    return noise_variance_per_bin(f_b, bin_width, params, table, pulse) / bin_width;
}

inline std::vector<double> bin_noise_variances(const PulseSpec &pulse, const ChannelParams &params,
                                               const AbsorptionTable &table, const FrequencyGrid &grid)
{
    std::vector<double> out;
    out.reserve(grid.size());
    for (double f : grid.bins())
        out.push_back(bin_noise_variance(f, grid.bin_width(), params, table, pulse));
    return out;
}

// Y(f_b) = H(f_b) a(f_b, theta) P_n(f_b) [1 ... 1] + V(f_b), V circular Gaussian with per-bin variance
// `variances[b]`, white across elements and snapshots; empty `variances` means noiseless. All draws
// come from one generator seeded with `seed`, in bin order.
inline SnapshotMatrix synthesize_snapshots(const PulseSpec &pulse, const ChannelParams &params,
                                           const AbsorptionTable &table, const ArrayConfig &config,
                                           double angle_deg, const FrequencyGrid &grid, int snapshots,
                                           std::uint64_t seed, std::span<const double> variances)
{
    if (snapshots < 1)
        throw ValidationError("synthesize_snapshots: need at least one snapshot");
    if (!variances.empty() && variances.size() != grid.size())
        throw ValidationError("synthesize_snapshots: one noise variance per bin required");
    params.validate();
    config.validate();

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    SnapshotMatrix out;
    out.grid = grid;
    out.bins.reserve(grid.size());
    for (std::size_t b = 0; b < grid.size(); ++b)
    {
        const double f = grid[b];
        const std::complex<double> source = channel_response(f, params, table) * pulse.spectrum(f);
        const ComplexVector column = steering_vector(f, angle_deg, config, params.light_speed) * source;

        ComplexMatrix y = column.replicate(1, snapshots);
        if (!variances.empty())
        {
            const double scale = std::sqrt(0.5 * variances[b]);
            for (int k = 0; k < snapshots; ++k)
                for (int i = 0; i < config.num_elements; ++i)
                {
                    const double re = gauss(rng);
                    const double im = gauss(rng);
                    y(i, k) += std::complex<double>(scale * re, scale * im);
                }
        }
        out.bins.push_back(std::move(y));
    }
    return out;
}

inline SnapshotMatrix synthesize_snapshots(const PulseSpec &pulse, const ChannelParams &params,
                                           const AbsorptionTable &table, const ArrayConfig &config,
                                           double angle_deg, const FrequencyGrid &grid, int snapshots,
                                           std::uint64_t seed, bool noise = true)
{
    const auto variances = noise ? bin_noise_variances(pulse, params, table, grid) : std::vector<double>{};
    return synthesize_snapshots(pulse, params, table, config, angle_deg, grid, snapshots, seed,
                                std::span<const double>(variances));
}

// R = (1/K) Y Y^H, assembled so the result is exactly Hermitian.
inline ComplexMatrix sample_covariance(const ComplexMatrix &y)
{
    const auto n = y.rows();
    const auto k = y.cols();
    if (k < 1)
        throw ValidationError("sample_covariance: no snapshots");
    ComplexMatrix r(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
    {
        r(i, i) = y.row(i).squaredNorm() / static_cast<double>(k);
        for (Eigen::Index j = 0; j < i; ++j)
        {
            const std::complex<double> v = y.row(i).dot(y.row(j)) / static_cast<double>(k);
            // Eigen's dot conjugates the first argument: dot = sum conj(y_i) y_j
            r(i, j) = std::conj(v);
            r(j, i) = v;
        }
    }
    return r;
}

inline CovarianceEstimate sample_covariance(const SnapshotMatrix &y)
{
    CovarianceEstimate out;
    out.grid = y.grid;
    out.bins.reserve(y.bins.size());
    for (const auto &m : y.bins)
        out.bins.push_back(sample_covariance(m));
    return out;
}

// |P_n|^2 |H|^2 a a^H + sigma^2 I at one bin.
inline ComplexMatrix analytic_covariance(const PulseSpec &pulse, const ChannelParams &params,
                                         const AbsorptionTable &table, const ArrayConfig &config, double angle_deg,
                                         double f_b, double bin_width, bool noise = true)
{
    const double signal = pulse.psd(f_b) * std::norm(channel_response(f_b, params, table));
    const double variance = noise ? bin_noise_variance(f_b, bin_width, params, table, pulse) : 0.0;
    const ComplexVector a = steering_vector(f_b, angle_deg, config, params.light_speed);
    ComplexMatrix r = signal * (a * a.adjoint());
    r.diagonal().array() += variance;
    return r;
}

} // namespace thzorder

#endif
