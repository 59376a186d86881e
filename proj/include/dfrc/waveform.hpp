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

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dfrc/types.hpp"

namespace dfrc
{

enum class Modulation
{
    dpsk,
    msk
};

std::string to_string(Modulation m);
Modulation modulation_from_string(const std::string &s);

/// Chip timing and sampling of one transmit pulse.
struct ModulationParams
{
    std::size_t n_chips = 0;
    double chip_duration = 0.0; // seconds
    double baseband_freq = 0.0; // Hz, 1 / (2 chip_duration)
    double sample_rate = 0.0;   // Hz
    double carrier_freq = 0.0;  // Hz, passband only (0 = unset)

    /// Fills baseband_freq from the chip duration.
    static ModulationParams make(std::size_t n_chips, double chip_duration, double sample_rate,
                                 double carrier_freq = 0.0);

    /// Throws InvalidArgument if an invariant is violated.
    void validate() const;

    std::size_t samples_per_chip() const;
    std::size_t n_samples() const { return n_chips * samples_per_chip(); }
    double pulse_duration() const { return static_cast<double>(n_chips) * chip_duration; }
};

struct ChipSequence
{
    std::vector<int> chips; // each -1 or +1
    std::uint64_t seed = 0;
};

struct BasebandWaveform
{
    std::vector<cd> samples;
    ModulationParams params;
    Modulation kind = Modulation::dpsk;
    std::uint64_t seed = 0; // chip sequence seed, for provenance

    std::size_t size() const { return samples.size(); }
    std::span<const cd> view() const { return samples; }
};

/// K waveforms sharing one ModulationParams and length; K is a power of two.
struct WaveformAlphabet
{
    std::vector<BasebandWaveform> waveforms;

    std::size_t size() const { return waveforms.size(); }
    std::size_t length() const { return waveforms.empty() ? 0 : waveforms.front().size(); }
    std::size_t bits_per_symbol() const;
    const BasebandWaveform &operator[](std::size_t k) const { return waveforms[k]; }

    void validate() const;
};

/// Binary chips x(n) = sign of a standard normal draw.
ChipSequence generate_chip_sequence(std::size_t n, std::uint64_t seed);

/// Psi(t) = s_d(t - tau_c/2) |cos(2 pi f_b t)| + j s_d(t) |sin(2 pi f_b t)|,
/// s_d(t) = exp(j pi (x(n) + 1) / 2) on chip n.
BasebandWaveform synth_dpsk(const ChipSequence &chips, const ModulationParams &params);

/// Psi(t) = exp(-j (theta_n + s_d(t) pi f_b t)) with theta_n chosen per chip
/// so that the phase is continuous at every chip boundary.
BasebandWaveform synth_msk(const ChipSequence &chips, const ModulationParams &params, double theta0 = 0.0);

/// K waveforms from chip seeds derived from `seed`.
WaveformAlphabet make_alphabet(std::size_t K, const ModulationParams &params, Modulation kind,
                               std::uint64_t seed);

/// Re(Psi(t) exp(j 2 pi f_c t)) on a grid of pass_rate; the envelope is held
/// constant over each baseband sample. pass_rate must be an integer multiple
/// of the baseband sample rate and exceed 2 (f_c + f_b).
std::vector<double> to_passband(const BasebandWaveform &wf, double carrier_freq, double pass_rate);

/// Same signal through the polar form |Psi| cos(2 pi f_c t + theta(t)).
std::vector<double> to_passband_polar(const BasebandWaveform &wf, double carrier_freq, double pass_rate);

/// I(t) + jQ(t): mix with 2cos / -2sin and smooth with a centered moving
/// average spanning one carrier period. Output stays at pass_rate.
std::vector<cd> demodulate_iq(std::span<const double> passband, double carrier_freq, double pass_rate,
                              double baseband_freq = 0.0);

/// Picks the center sample of every `factor`-sample hold interval.
std::vector<cd> decimate_held(std::span<const cd> envelope, std::size_t factor);

/// Peak of |<a shifted, b>| / (|a||b|) over all lags.
double normalized_xcorr_peak(std::span<const cd> a, std::span<const cd> b);

} // namespace dfrc
