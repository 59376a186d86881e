// SPDX-License-Identifier: Apache-2.0
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

#include "dfrc/waveform.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "dfrc/fft.hpp"
#include "dfrc/random.hpp"

namespace dfrc
{

std::string to_string(Modulation m) { return m == Modulation::dpsk ? "dpsk" : "msk"; }

Modulation modulation_from_string(const std::string &s)
{
    if (s == "dpsk" || s == "DPSK")
        return Modulation::dpsk;
    if (s == "msk" || s == "MSK")
        return Modulation::msk;
    throw InvalidArgument("unknown modulation '" + s + "' (expected dpsk or msk)");
}

// ---- ModulationParams ---------------------------------------------------

ModulationParams ModulationParams::make(std::size_t n_chips, double chip_duration, double sample_rate,
                                        double carrier_freq)
{
    ModulationParams p;
    p.n_chips = n_chips;
    p.chip_duration = chip_duration;
    p.baseband_freq = chip_duration > 0.0 ? 1.0 / (2.0 * chip_duration) : 0.0;
    p.sample_rate = sample_rate;
    p.carrier_freq = carrier_freq;
    return p;
}

void ModulationParams::validate() const
{
    if (n_chips == 0)
        throw InvalidArgument("modulation: n_chips must be >= 1");
    if (!(chip_duration > 0.0) || !std::isfinite(chip_duration))
        throw InvalidArgument("modulation: chip_duration must be positive");
    if (!(sample_rate > 0.0) || !std::isfinite(sample_rate))
        throw InvalidArgument("modulation: sample_rate must be positive");
    const double fb = 1.0 / (2.0 * chip_duration);
    if (std::abs(baseband_freq - fb) > 1e-12 * fb)
        throw InvalidArgument("modulation: baseband_freq must equal 1/(2 chip_duration)");
    if (!(carrier_freq >= 0.0) || !std::isfinite(carrier_freq))
        throw InvalidArgument("modulation: carrier_freq must be finite and >= 0");
    (void)samples_per_chip();
}

std::size_t ModulationParams::samples_per_chip() const
{
    const double r = sample_rate * chip_duration;
    const double k = std::round(r);
    if (k < 1.0 || std::abs(r - k) > 1e-9 * std::max(1.0, r))
        throw InvalidArgument("modulation: sample_rate * chip_duration must be a positive integer (got " +
                              std::to_string(r) + ")");
    return static_cast<std::size_t>(k);
}

std::size_t WaveformAlphabet::bits_per_symbol() const
{
    return waveforms.empty() ? 0 : static_cast<std::size_t>(std::countr_zero(waveforms.size()));
}

void WaveformAlphabet::validate() const
{
    if (waveforms.empty())
        throw InvalidArgument("alphabet: no waveforms");
    if (!std::has_single_bit(waveforms.size()))
        throw InvalidArgument("alphabet: K must be a power of two");
    const auto &ref = waveforms.front();
    for (const auto &w : waveforms)
    {
        if (w.size() != ref.size() || w.size() == 0)
            throw InvalidArgument("alphabet: waveforms must share one non-zero length");
        if (w.params.n_chips != ref.params.n_chips || w.params.sample_rate != ref.params.sample_rate ||
            w.params.chip_duration != ref.params.chip_duration)
            throw InvalidArgument("alphabet: waveforms must share modulation parameters");
    }
}

// ---- synthesis ----------------------------------------------------------

ChipSequence generate_chip_sequence(std::size_t n, std::uint64_t seed)
{
    if (n == 0)
        throw InvalidArgument("generate_chip_sequence: n must be >= 1");
    Rng rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    ChipSequence out;
    out.seed = seed;
    out.chips.resize(n);
    for (auto &c : out.chips)
        c = gauss(rng) >= 0.0 ? 1 : -1;
    return out;
}

namespace
{

// s_d on chip n: exp(j pi (x + 1) / 2) is +1 for x = -1 and -1 for x = +1.
double symbol_value(int chip) { return chip > 0 ? -1.0 : 1.0; }

void check_chips(const ChipSequence &chips, const ModulationParams &params)
{
    params.validate();
    if (chips.chips.size() != params.n_chips)
        throw InvalidArgument("chip sequence length " + std::to_string(chips.chips.size()) +
                              " does not match n_chips " + std::to_string(params.n_chips));
    for (int c : chips.chips)
        if (c != 1 && c != -1)
            throw InvalidArgument("chip values must be -1 or +1");
}

} // namespace

BasebandWaveform synth_dpsk(const ChipSequence &chips, const ModulationParams &params)
{
    check_chips(chips, params);
    const auto spc = static_cast<long long>(params.samples_per_chip());
    const auto n_samples = static_cast<long long>(params.n_samples());

    BasebandWaveform wf;
    wf.params = params;
    wf.kind = Modulation::dpsk;
    wf.seed = chips.seed;
    wf.samples.resize(static_cast<std::size_t>(n_samples));

    for (long long p = 0; p < n_samples; ++p)
    {
        const double t = static_cast<double>(p) / params.sample_rate;
        const double arg = 2.0 * pi * params.baseband_freq * t;

        // Chip index of t - tau_c / 2, i.e. floor((p - spc/2) / spc), exact in
        // integers; times before the first half chip hold chip 0.
        long long delayed = 2 * p - spc;
        delayed = delayed < 0 ? 0 : delayed / (2 * spc);
        const long long current = p / spc;

        const double re = symbol_value(chips.chips[static_cast<std::size_t>(delayed)]) * std::abs(std::cos(arg));
        const double im = symbol_value(chips.chips[static_cast<std::size_t>(current)]) * std::abs(std::sin(arg));
        wf.samples[static_cast<std::size_t>(p)] = {re, im};
    }
    return wf;
}

BasebandWaveform synth_msk(const ChipSequence &chips, const ModulationParams &params, double theta0)
{
    check_chips(chips, params);
    if (!std::isfinite(theta0))
        throw InvalidArgument("synth_msk: theta0 must be finite");
    const std::size_t spc = params.samples_per_chip();
    const double slope = pi * params.baseband_freq;

    BasebandWaveform wf;
    wf.params = params;
    wf.kind = Modulation::msk;
    wf.seed = chips.seed;
    wf.samples.resize(params.n_samples());

    double theta = theta0;
    for (std::size_t n = 0; n < params.n_chips; ++n)
    {
        const double s = symbol_value(chips.chips[n]);
        for (std::size_t i = 0; i < spc; ++i)
        {
            const std::size_t p = n * spc + i;
            const double t = static_cast<double>(p) / params.sample_rate;
            wf.samples[p] = std::polar(1.0, -(theta + s * slope * t));
        }
        if (n + 1 < params.n_chips)
        {
            const double boundary = static_cast<double>(n + 1) * params.chip_duration;
            const double s_next = symbol_value(chips.chips[n + 1]);
            theta += (s - s_next) * slope * boundary;
        }
    }
    return wf;
}

WaveformAlphabet make_alphabet(std::size_t K, const ModulationParams &params, Modulation kind,
                               std::uint64_t seed)
{
    if (K == 0 || !std::has_single_bit(K))
        throw InvalidArgument("make_alphabet: K must be a power of two >= 1");
    params.validate();

    WaveformAlphabet alphabet;
    std::vector<std::vector<int>> used;
    for (std::size_t k = 0; k < K; ++k)
    {
        // Redraw on an exact duplicate or sign-flipped duplicate (which gives
        // the same waveform up to a constant and so cannot carry a symbol).
        for (std::uint64_t attempt = 0;; ++attempt)
        {
            auto chips = generate_chip_sequence(params.n_chips, derive_seed(seed, {k, attempt}));
            std::vector<int> neg(chips.chips.size());
            std::transform(chips.chips.begin(), chips.chips.end(), neg.begin(), [](int c) { return -c; });
            const bool clash = std::any_of(used.begin(), used.end(), [&](const std::vector<int> &u) {
                return u == chips.chips || u == neg;
            });
            if (clash && attempt < 64)
                continue;
            used.push_back(chips.chips);
            alphabet.waveforms.push_back(kind == Modulation::dpsk ? synth_dpsk(chips, params)
                                                                  : synth_msk(chips, params));
            break;
        }
    }
    return alphabet;
}

// ---- passband -------------------------------------------------------------

namespace
{

std::size_t upsampling_factor(const BasebandWaveform &wf, double carrier_freq, double pass_rate)
{
    wf.params.validate();
    if (!(carrier_freq > 0.0) || !std::isfinite(carrier_freq))
        throw InvalidArgument("passband: carrier frequency must be positive");
    if (!(pass_rate > 2.0 * (carrier_freq + wf.params.baseband_freq)))
        throw InvalidArgument("passband: pass_rate must exceed 2 (f_c + f_b)");
    const double r = pass_rate / wf.params.sample_rate;
    const double u = std::round(r);
    if (u < 1.0 || std::abs(r - u) > 1e-9 * r)
        throw InvalidArgument("passband: pass_rate must be an integer multiple of the sample rate");
    return static_cast<std::size_t>(u);
}

} // namespace

std::vector<double> to_passband(const BasebandWaveform &wf, double carrier_freq, double pass_rate)
{
    const std::size_t up = upsampling_factor(wf, carrier_freq, pass_rate);
    std::vector<double> out(wf.size() * up);
    for (std::size_t q = 0; q < out.size(); ++q)
    {
        const double t = static_cast<double>(q) / pass_rate;
        out[q] = std::real(wf.samples[q / up] * std::polar(1.0, 2.0 * pi * carrier_freq * t));
    }
    return out;
}

std::vector<double> to_passband_polar(const BasebandWaveform &wf, double carrier_freq, double pass_rate)
{
    const std::size_t up = upsampling_factor(wf, carrier_freq, pass_rate);
    std::vector<double> out(wf.size() * up);
    for (std::size_t q = 0; q < out.size(); ++q)
    {
        const double t = static_cast<double>(q) / pass_rate;
        const cd env = wf.samples[q / up];
        out[q] = std::abs(env) * std::cos(2.0 * pi * carrier_freq * t + std::arg(env));
    }
    return out;
}

std::vector<cd> demodulate_iq(std::span<const double> passband, double carrier_freq, double pass_rate,
                              double baseband_freq)
{
    if (!(carrier_freq > 0.0) || !std::isfinite(carrier_freq))
        throw InvalidArgument("demodulate_iq: carrier frequency must be positive");
    if (!(pass_rate > 2.0 * (carrier_freq + baseband_freq)))
        throw InvalidArgument("demodulate_iq: pass_rate must exceed 2 (f_c + f_b)");

    const std::size_t n = passband.size();
    std::vector<cd> mixed(n);
    for (std::size_t q = 0; q < n; ++q)
    {
        const double w = 2.0 * pi * carrier_freq * static_cast<double>(q) / pass_rate;
        mixed[q] = {2.0 * passband[q] * std::cos(w), -2.0 * passband[q] * std::sin(w)};
    }

    // Centered moving average over one carrier period.
    const auto period = static_cast<std::ptrdiff_t>(std::max(1.0, std::round(pass_rate / carrier_freq)));
    std::vector<cd> prefix(n + 1, cd{});
    for (std::size_t q = 0; q < n; ++q)
        prefix[q + 1] = prefix[q] + mixed[q];

    std::vector<cd> out(n);
    const auto total = static_cast<std::ptrdiff_t>(n);
    for (std::ptrdiff_t q = 0; q < total; ++q)
    {
        const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, q - period / 2);
        const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(total, lo + period);
        out[static_cast<std::size_t>(q)] = (prefix[static_cast<std::size_t>(hi)] - prefix[static_cast<std::size_t>(lo)]) /
                                           static_cast<double>(hi - lo);
    }
    return out;
}

std::vector<cd> decimate_held(std::span<const cd> envelope, std::size_t factor)
{
    if (factor == 0)
        throw InvalidArgument("decimate_held: factor must be >= 1");
    std::vector<cd> out(envelope.size() / factor);
    for (std::size_t p = 0; p < out.size(); ++p)
        out[p] = envelope[p * factor + factor / 2];
    return out;
}

double normalized_xcorr_peak(std::span<const cd> a, std::span<const cd> b)
{
    if (a.empty() || b.empty())
        return 0.0;
    std::vector<cd> rev(b.rbegin(), b.rend());
    for (auto &v : rev)
        v = std::conj(v);
    auto xc = fft::convolve(a, rev);
    double peak = 0.0;
    for (const auto &v : xc)
        peak = std::max(peak, std::abs(v));
    auto energy = [](std::span<const cd> s) {
        return std::accumulate(s.begin(), s.end(), 0.0, [](double acc, cd v) { return acc + std::norm(v); });
    };
    return peak / std::sqrt(energy(a) * energy(b));
}

} // namespace dfrc
