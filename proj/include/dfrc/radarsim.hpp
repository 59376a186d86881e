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
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dfrc/types.hpp"
#include "dfrc/waveform.hpp"

namespace dfrc
{

enum class ScattererKind
{
    target,
    clutter
};

std::string to_string(ScattererKind k);

struct Scatterer
{
    std::size_t range_cell = 0;
    double normalized_doppler = 0.0; // cycles per pulse, f_d T_PRI
    cd reflectivity{0.0, 0.0};
    ScattererKind kind = ScattererKind::target;
};

struct TargetSpec
{
    std::size_t range_cell = 0;
    double normalized_doppler = 0.0;
    std::optional<double> snr_db; // overrides SceneConfig::snr_db
};

/// Scene description before any random draw.
struct SceneConfig
{
    std::size_t n_range_gates = 450;
    std::size_t n_pulses = 50;
    double t_pri = 0.2;           // seconds
    double wavelength = 0.3;      // meters
    double gate_spacing = 0.0;    // meters; 0 selects c / (2 sample_rate)
    double sample_rate = 3000.0;  // Hz, fast-time rate used for the default spacing
    double cnr_db = 50.0;         // -inf disables clutter
    double snr_db = 10.0;
    double clutter_doppler_max = 0.1;
    double noise_variance = 1.0;  // 0 disables receiver noise
    std::vector<TargetSpec> targets;

    /// 450 gates, M = 50 and the six targets around the central gates.
    static SceneConfig six_target();
    static std::vector<TargetSpec> six_targets();

    void validate() const;
    double resolved_gate_spacing() const;
};

struct Scene
{
    std::vector<Scatterer> scatterers;
    std::size_t n_range_gates = 0;
    std::size_t n_pulses = 0;
    double t_pri = 0.0;
    double wavelength = 0.0;
    double gate_spacing = 0.0;
    double cnr_db = 0.0;
    double snr_db = 0.0;
    double noise_variance = 1.0;
    std::uint64_t noise_seed = 0;

    std::size_t n_targets() const;
    std::size_t n_clutter() const;
};

/// Per-PRI symbol selection of an NCPI.
struct PulseTrain
{
    std::vector<std::size_t> symbol_indices;
    std::uint64_t seed = 0;

    std::size_t size() const { return symbol_indices.size(); }
    std::size_t operator[](std::size_t m) const { return symbol_indices[m]; }
};

/// Fast-time x slow-time samples; row r holds delay gate_offset + r.
struct DataMatrix
{
    CMatrix entries;
    std::ptrdiff_t gate_offset = 0;

    std::size_t rows() const { return static_cast<std::size_t>(entries.rows()); }
    std::size_t cols() const { return static_cast<std::size_t>(entries.cols()); }
};

/// Clutter: one scatterer per gate, CN(0, CNR) reflectivity, Doppler
/// uniform in [-clutter_doppler_max, clutter_doppler_max]. Targets: the
/// configured list with reflectivity sqrt(SNR).
Scene generate_scene(const SceneConfig &config, std::uint64_t seed);

/// Range phase exp(-j 4 pi R / lambda), R = range_cell * gate_spacing.
cd range_phase(const Scene &scene, std::size_t range_cell);

/// Length n_range_gates + L - 1: sum over scatterers of beta exp(-j4piR/lambda)
/// exp(j 2 pi nu m) x(p - cell), plus CN(0, noise_variance) noise drawn from
/// the per-pulse stream derive_seed(noise_seed, {m}).
CVector simulate_received_pulse(const Scene &scene, std::span<const cd> waveform, std::size_t m);
inline CVector simulate_received_pulse(const Scene &scene, const BasebandWaveform &wf, std::size_t m)
{
    return simulate_received_pulse(scene, wf.view(), m);
}

/// Column m uses alphabet[train[m]].
DataMatrix simulate_ncpi(const Scene &scene, const WaveformAlphabet &alphabet, const PulseTrain &train);
DataMatrix simulate_ncpi(const Scene &scene, std::span<const std::vector<cd>> alphabet, const PulseTrain &train);

/// Uniform symbol draw over [0, K).
PulseTrain random_pulse_train(std::size_t M, std::size_t K, std::uint64_t seed);

/// g exp(j 2 pi f_d t) x(t) + CN(0, 10^(-snr/10)) noise on the waveform's
/// sample grid; snr_db = +inf disables noise.
CVector simulate_comm_received(std::span<const cd> waveform, double sample_rate, cd path_gain, double doppler_hz,
                               double snr_db, std::uint64_t seed);
inline CVector simulate_comm_received(const BasebandWaveform &wf, cd path_gain, double doppler_hz, double snr_db,
                                      std::uint64_t seed)
{
    return simulate_comm_received(wf.view(), wf.params.sample_rate, path_gain, doppler_hz, snr_db, seed);
}

/// dB to linear power; -inf maps to 0.
double db_to_power(double db);

} // namespace dfrc
