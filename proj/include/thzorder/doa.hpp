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

#ifndef THZORDER_DOA_HPP
#define THZORDER_DOA_HPP

#include "array.hpp"
#include "common.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

// Incoherent wideband MUSIC: narrowband MUSIC per frequency bin, pseudo-spectra summed over bins.

namespace thzorder
{

struct AngleGrid
{
    double start = -90.0;  // degrees
    double end = 90.0;
    double step = 0.025;

    void validate() const
    {
        if (!(step > 0.0) || !std::isfinite(step))
            throw ConfigError("AngleGrid: step must be positive");
        if (!(end > start))
            throw ConfigError("AngleGrid: need end > start");
        if (size() < 2)
            throw ConfigError("AngleGrid: grid must contain at least two angles");
    }

    std::size_t size() const { return static_cast<std::size_t>(std::floor((end - start) / step + 1e-9)) + 1; }
    double angle(std::size_t i) const { return start + static_cast<double>(i) * step; }
};

struct MusicSpectrum
{
    AngleGrid angles;
    std::vector<double> scores;
};

namespace detail
{
inline void require_hermitian(const ComplexMatrix &r, const char *who)
{
    if (r.rows() != r.cols() || r.rows() == 0)
        throw ValidationError(std::string(who) + ": covariance must be square and non-empty");
    const double scale = std::max(r.norm(), std::numeric_limits<double>::min());
    if ((r - r.adjoint()).norm() > 1e-10 * scale)
        throw ValidationError(std::string(who) + ": covariance is not Hermitian");
}
} // namespace detail

// Eigenvectors of the N - num_sources smallest eigenvalues, as orthonormal columns.
inline ComplexMatrix noise_subspace(const ComplexMatrix &r, int num_sources = 1)
{
    detail::require_hermitian(r, "noise_subspace");
    const auto n = static_cast<int>(r.rows());
    if (num_sources < 0 || num_sources >= n)
        throw ValidationError("noise_subspace: num_sources must be in [0, N)");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(r);
    if (eig.info() != Eigen::Success)
        throw ValidationError("noise_subspace: eigendecomposition failed");
    // eigenvalues come back in increasing order
    return eig.eigenvectors().leftCols(n - num_sources);
}

namespace detail
{
// Per-angle unit phasors z(theta) = exp(-j 2 pi f d_s sin(theta) / c0), the element-to-element phase
// step of the steering vector at frequency f. Stepping to the next bin of a uniform grid multiplies
// by a fixed phasor; the values are re-anchored exactly every `kReanchor` bins and on any
// non-uniform step.
class SteeringPhases
{
public:
    SteeringPhases(const AngleGrid &angles, const ArrayConfig &config, double light_speed)
        : delay_(angles.size()), zr_(angles.size()), zi_(angles.size()), wr_(angles.size()), wi_(angles.size())
    {
        for (std::size_t t = 0; t < delay_.size(); ++t)
            delay_[t] = config.spacing * std::sin(degrees_to_radians(angles.angle(t))) / light_speed;
    }

    void set(double f)
    {
        for (std::size_t t = 0; t < delay_.size(); ++t)
        {
            const double phi = -2.0 * kPi * f * delay_[t];
            zr_[t] = std::cos(phi);
            zi_[t] = std::sin(phi);
        }
        f_ = f;
        since_anchor_ = 0;
    }

    void advance(double f)
    {
        const double step = f - f_;
        const bool uniform = step_ > 0.0 && std::abs(step - step_) <= 1e-9 * step_;
        if (!uniform || ++since_anchor_ >= kReanchor)
        {
            if (step > 0.0)
            {
                step_ = step;
                for (std::size_t t = 0; t < delay_.size(); ++t)
                {
                    const double phi = -2.0 * kPi * step * delay_[t];
                    wr_[t] = std::cos(phi);
                    wi_[t] = std::sin(phi);
                }
            }
            set(f);
            return;
        }
        for (std::size_t t = 0; t < delay_.size(); ++t)
        {
            const double r = zr_[t] * wr_[t] - zi_[t] * wi_[t];
            zi_[t] = zr_[t] * wi_[t] + zi_[t] * wr_[t];
            zr_[t] = r;
        }
        f_ = f;
    }

    const double *re() const { return zr_.data(); }
    const double *im() const { return zi_.data(); }
    std::size_t size() const { return delay_.size(); }

private:
    static constexpr int kReanchor = 64;
    std::vector<double> delay_, zr_, zi_, wr_, wi_;
    double f_ = 0.0;
    double step_ = 0.0;
    int since_anchor_ = 0;
};

// Adds a^H a / (a^H E_n E_n^H a) for one bin to `scores`, denominators clamped at 1e-18 a^H a.
//
// E_n E_n^H = I - E_s E_s^H for the complete orthonormal eigenbasis, so the denominator is evaluated
// as N - ||E_s^H a||^2, which costs O(N num_sources) per angle instead of O(N^2).
inline void accumulate_music(const ComplexMatrix &r, const SteeringPhases &phases, int num_sources,
                             std::vector<double> &scores)
{
    require_hermitian(r, "imusic_spectrum");
    const auto n = static_cast<int>(r.rows());
    if (num_sources < 1 || num_sources >= n)
        throw ValidationError("imusic_spectrum: num_sources must be in [1, N)");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(r);
    if (eig.info() != Eigen::Success)
        throw ValidationError("imusic_spectrum: eigendecomposition failed");
    const ComplexMatrix signal = eig.eigenvectors().rightCols(num_sources);

    const double norm_a = static_cast<double>(n);  // a^H a
    const double floor_den = 1e-18 * norm_a;

    // E_s^H a = sum_i conj(e_i) z^i, evaluated by Horner for all angles at once.
    const std::size_t count = phases.size();
    const double *zr = phases.re();
    const double *zi = phases.im();
    std::vector<double> projected(count, 0.0), pr(count), pi(count);
    for (int s = 0; s < num_sources; ++s)
    {
        auto coeff = [&](int i) { return std::conj(signal(i, s)); };
        const auto top = coeff(n - 1);
        std::fill(pr.begin(), pr.end(), top.real());
        std::fill(pi.begin(), pi.end(), top.imag());
        for (int i = n - 2; i >= 0; --i)
        {
            const auto c = coeff(i);
            const double cr = c.real(), ci = c.imag();
            for (std::size_t t = 0; t < count; ++t)
            {
                const double r = pr[t] * zr[t] - pi[t] * zi[t] + cr;
                pi[t] = pr[t] * zi[t] + pi[t] * zr[t] + ci;
                pr[t] = r;
            }
        }
        for (std::size_t t = 0; t < count; ++t)
            projected[t] += pr[t] * pr[t] + pi[t] * pi[t];
    }
    for (std::size_t t = 0; t < count; ++t)
        scores[t] += norm_a / std::max(norm_a - projected[t], floor_den);
}
} // namespace detail

// Narrowband MUSIC pseudo-spectrum of one covariance at frequency f.
inline MusicSpectrum music_spectrum(const ComplexMatrix &r, double f, const AngleGrid &angles,
                                    const ArrayConfig &config, int num_sources = 1,
                                    double light_speed = kSpeedOfLight)
{
    angles.validate();
    config.validate();
    if (r.rows() != config.num_elements)
        throw ValidationError("music_spectrum: covariance size does not match array size");
    detail::SteeringPhases phases(angles, config, light_speed);
    phases.set(f);
    MusicSpectrum out{angles, std::vector<double>(angles.size(), 0.0)};
    detail::accumulate_music(r, phases, num_sources, out.scores);
    return out;
}

// P(theta) = sum over all grid bins of the narrowband MUSIC pseudo-spectra, summed in bin order.
inline MusicSpectrum imusic_spectrum(const CovarianceEstimate &cov, const AngleGrid &angles,
                                     const ArrayConfig &config, int num_sources = 1,
                                     double light_speed = kSpeedOfLight)
{
    angles.validate();
    config.validate();
    if (cov.bins.empty())
        throw ValidationError("imusic_spectrum: need at least one frequency bin");
    if (cov.bins.size() != cov.grid.size())
        throw ValidationError("imusic_spectrum: covariance count does not match the frequency grid");

    detail::SteeringPhases phases(angles, config, light_speed);
    MusicSpectrum out{angles, std::vector<double>(angles.size(), 0.0)};
    for (std::size_t b = 0; b < cov.bins.size(); ++b)
    {
        if (cov.bins[b].rows() != config.num_elements)
            throw ValidationError("imusic_spectrum: covariance size does not match array size");
        if (b == 0)
            phases.set(cov.grid[b]);
        else
            phases.advance(cov.grid[b]);
        detail::accumulate_music(cov.bins[b], phases, num_sources, out.scores);
    }
    return out;
}

// Angle of the maximal score; exact ties go to the smallest |angle| (first seen on a further tie).
inline double estimate_doa(const MusicSpectrum &spectrum)
{
    if (spectrum.scores.empty())
        throw ValidationError("estimate_doa: empty spectrum");
    std::size_t best = 0;
    for (std::size_t i = 1; i < spectrum.scores.size(); ++i)
    {
        const double s = spectrum.scores[i];
        const double top = spectrum.scores[best];
        if (s > top || (s == top && std::abs(spectrum.angles.angle(i)) < std::abs(spectrum.angles.angle(best))))
            best = i;
    }
    return spectrum.angles.angle(best);
}

inline void write_spectrum_csv(const MusicSpectrum &spectrum, std::ostream &out)
{
    out << "angle_deg,score\n";
    for (std::size_t i = 0; i < spectrum.scores.size(); ++i)
        out << format_double(spectrum.angles.angle(i)) << ',' << format_double(spectrum.scores[i]) << '\n';
}

} // namespace thzorder

#endif
