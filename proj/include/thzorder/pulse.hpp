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

#ifndef THZORDER_PULSE_HPP
#define THZORDER_PULSE_HPP

#include "common.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <iterator>
#include <string>
#include <vector>

// Frequency-domain model of the n-th time derivative of a Gaussian pulse:
//
//     P_n(f) = a_n (j 2 pi f)^n exp(-0.5 (2 pi sigma f)^2),   f_c = sqrt(n) / (2 pi sigma)
//
// The amplitude a_n is chosen so that the one-sided PSD |P_n(f)|^2 integrates to the configured
// power over f in (0, inf). All evaluation goes through the scaled variable x = 2 pi sigma f, which
// keeps the intermediate powers of f inside double range for every supported order.

namespace thzorder
{

inline constexpr int kMaxPulseOrder = 10;
inline constexpr double kDefaultPulsePower = 1.0e-6;  // W
inline constexpr double kSpreadResolution = 1.0e9;    // Hz, coarsest grid for spread integrals

// sigma = sqrt(n) / (2 pi f_c)
inline double sigma_from_center(int order, double center_frequency)
{
    if (order < 1)
        throw ValidationError("sigma_from_center: order must be >= 1, got " + std::to_string(order));
    if (!(center_frequency > 0.0) || !std::isfinite(center_frequency))
        throw ValidationError("sigma_from_center: center frequency must be positive and finite");
    return std::sqrt(static_cast<double>(order)) / (2.0 * kPi * center_frequency);
}

// Closed form of a_n from  int_0^inf a_n^2 (2 pi f)^(2n) exp(-(2 pi sigma f)^2) df = power,
// i.e.  a_n^2 = 4 pi power sigma^(2n+1) / Gamma(n + 1/2). Evaluated in log space.
inline double normalization_constant(int order, double sigma, double power)
{
    if (order < 1)
        throw ValidationError("normalization_constant: order must be >= 1");
    if (!std::isfinite(sigma) || !std::isfinite(power))
        throw ValidationError("normalization_constant: non-finite input");
    if (!(sigma > 0.0) || !(power > 0.0))
        throw ValidationError("normalization_constant: sigma and power must be positive");
    const double n = order;
    const double log_a2 = std::log(4.0 * kPi * power) + (2.0 * n + 1.0) * std::log(sigma) - std::lgamma(n + 0.5);
    return std::exp(0.5 * log_a2);
}

class PulseSpec
{
public:
    PulseSpec(int order, double center_frequency, double power = kDefaultPulsePower)
        : order_(order), center_frequency_(center_frequency), power_(power)
    {
        if (order < 1 || order > kMaxPulseOrder)
            throw ValidationError("PulseSpec: order must be in 1.." + std::to_string(kMaxPulseOrder) +
                                  ", got " + std::to_string(order));
        sigma_ = sigma_from_center(order, center_frequency);
        norm_constant_ = normalization_constant(order, sigma_, power);
        const double n = order;
        psd_scale_ = 4.0 * kPi * power * sigma_ * std::exp(-std::lgamma(n + 0.5));
    }

    int order() const { return order_; }
    double center_frequency() const { return center_frequency_; }
    double power() const { return power_; }
    double sigma() const { return sigma_; }
    double norm_constant() const { return norm_constant_; }

    // |P_n(f)|^2 in W/Hz.  a_n^2 (2 pi f)^(2n) = psd_scale x^(2n) with x = 2 pi sigma f.
    double psd(double f) const
    {
        const double x = 2.0 * kPi * sigma_ * f;
        if (x == 0.0)
            return 0.0;
        return psd_scale_ * std::exp(2.0 * order_ * std::log(std::abs(x)) - x * x);
    }

    // P_n(f), complex amplitude in sqrt(W/Hz).
    std::complex<double> spectrum(double f) const
    {
        const double x = 2.0 * kPi * sigma_ * f;
        const double real_part = std::sqrt(psd_scale_) * std::pow(x, order_) * std::exp(-0.5 * x * x);
        // j^n cycles through 1, j, -1, -j
        switch (order_ % 4)
        {
        case 0: return {real_part, 0.0};
        case 1: return {0.0, real_part};
        case 2: return {-real_part, 0.0};
        default: return {0.0, -real_part};
        }
    }

private:
    int order_;
    double center_frequency_;
    double power_;
    double sigma_ = 0.0;
    double norm_constant_ = 0.0;
    double psd_scale_ = 0.0;
};

inline std::complex<double> pulse_spectrum(const PulseSpec &spec, double f) { return spec.spectrum(f); }

struct BandDescriptor
{
    double f_low = 0.0;
    double f_high = 0.0;
    double bandwidth_3db = 0.0;
    double rms_spread = 0.0;
};

namespace detail
{
// Composite Simpson over [a, b] with at least `max_step` resolution.
template <typename Fn>
double simpson(Fn &&fn, double a, double b, double max_step)
{
    auto intervals = static_cast<long>(std::ceil((b - a) / max_step));
    intervals = std::max(intervals, 2L);
    if (intervals % 2 != 0)
        ++intervals;
    const double h = (b - a) / static_cast<double>(intervals);
    double sum = fn(a) + fn(b);
    for (long i = 1; i < intervals; ++i)
        sum += (i % 2 == 1 ? 4.0 : 2.0) * fn(a + h * static_cast<double>(i));
    return sum * h / 3.0;
}
} // namespace detail

// Gamma = sqrt( int_B (f - f_c)^2 S(f) df / int_B S(f) df ), Simpson on a grid of at most `resolution`.
inline double analytic_rms_spread(const PulseSpec &spec, Band band = kDefaultChannelBand,
                                  double resolution = kSpreadResolution)
{
    if (!band.valid())
        throw ValidationError("analytic_rms_spread: empty band");
    if (!(resolution > 0.0) || resolution > kSpreadResolution)
        throw ValidationError("analytic_rms_spread: resolution must be in (0, 1 GHz]");
    const double fc = spec.center_frequency();
    if (!(band.low < fc && fc < band.high))
        throw ValidationError("analytic_rms_spread: center frequency must lie strictly inside the band");
    const double mass = detail::simpson([&](double f) { return spec.psd(f); }, band.low, band.high, resolution);
    if (!(mass > 0.0))
        throw DegenerateInputError("analytic_rms_spread: no pulse energy inside band");
    const double moment = detail::simpson([&](double f) { return (f - fc) * (f - fc) * spec.psd(f); },
                                          band.low, band.high, resolution);
    return std::sqrt(moment / mass);
}

// Half-power frequencies around f_c found by bisection; the Gamma field is filled over the
// default channel band.
inline BandDescriptor half_power_band(const PulseSpec &spec, double tolerance = 1.0e6)
{
    const double fc = spec.center_frequency();
    const double half = 0.5 * spec.psd(fc);
    auto above = [&](double f) { return spec.psd(f) >= half; };
    auto bisect = [&](double inside, double outside) {
        while (std::abs(outside - inside) > tolerance)
        {
            const double mid = 0.5 * (inside + outside);
            (above(mid) ? inside : outside) = mid;
        }
        return 0.5 * (inside + outside);
    };
    double upper = 2.0 * fc;
    while (above(upper))
        upper *= 2.0;

    BandDescriptor out;
    out.f_low = bisect(fc, 0.0);
    out.f_high = bisect(fc, upper);
    out.bandwidth_3db = out.f_high - out.f_low;
    out.rms_spread = analytic_rms_spread(spec);
    return out;
}

// Time span (s) centred on the pulse that holds `energy_fraction` of its energy. The time-domain
// pulse is the n-th derivative of exp(-t^2 / 2 sigma^2), so |p(t)|^2 ~ He_n(u)^2 exp(-u^2), u = t / sigma.
inline double pulse_duration(const PulseSpec &spec, double energy_fraction = 0.9999)
{
    if (!(energy_fraction > 0.0 && energy_fraction < 1.0))
        throw ValidationError("pulse_duration: energy fraction must be in (0, 1)");
    const int n = spec.order();
    auto density = [n](double u) {
        double prev = 1.0, cur = u;  // He_0, He_1
        for (int k = 1; k < n; ++k)
        {
            const double next = u * cur - k * prev;
            prev = cur;
            cur = next;
        }
        return cur * cur * std::exp(-u * u);
    };
    const double u_max = std::sqrt(2.0 * n + 1.0) + 12.0;
    const int steps = 20000;
    const double h = u_max / steps;
    std::vector<double> cumulative(steps + 1, 0.0);
    for (int i = 0; i < steps; ++i)
    {
        const double a = i * h;
        cumulative[i + 1] = cumulative[i] + h / 6.0 * (density(a) + 4.0 * density(a + 0.5 * h) + density(a + h));
    }
    const double target = energy_fraction * cumulative.back();
    const auto it = std::lower_bound(cumulative.begin(), cumulative.end(), target);
    const auto i = static_cast<std::size_t>(std::distance(cumulative.begin(), it));
    double u = u_max;
    if (i > 0 && i < cumulative.size())
    {
        const double w = (target - cumulative[i - 1]) / (cumulative[i] - cumulative[i - 1]);
        u = (static_cast<double>(i - 1) + w) * h;
    }
    return 2.0 * u * spec.sigma();
}

} // namespace thzorder

#endif
