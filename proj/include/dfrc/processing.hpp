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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dfrc/filterdesign.hpp"
#include "dfrc/radarsim.hpp"

namespace dfrc
{

enum class DopplerWindow
{
    rectangular,
    blackman_harris
};

std::string to_string(DopplerWindow w);
DopplerWindow doppler_window_from_string(const std::string &s);

/// Symmetric M-point window (all ones for rectangular).
std::vector<double> doppler_window(DopplerWindow w, std::size_t M);

struct RangeDopplerMap
{
    RMatrix magnitudes;               // gates x Doppler bins
    std::vector<double> doppler_axis; // cycles per pulse, ascending, (-0.5, 0.5]
    std::vector<std::ptrdiff_t> range_axis;
    DopplerWindow window = DopplerWindow::rectangular;

    std::size_t n_gates() const { return static_cast<std::size_t>(magnitudes.rows()); }
    std::size_t n_bins() const { return static_cast<std::size_t>(magnitudes.cols()); }
    /// Map column holding normalized Doppler k / M.
    std::size_t bin_of(std::ptrdiff_t k) const;
};

struct Detection
{
    std::ptrdiff_t gate = 0;
    std::size_t bin = 0;
    double doppler = 0.0;
    double magnitude = 0.0;
};

struct DetectionResult
{
    std::vector<Detection> detections;
    double threshold = 0.0; // absolute magnitude
    double median = 0.0;
    std::size_t truth_matches = 0;
    std::vector<bool> matched; // per truth entry, when truth was supplied
};

struct CurvePoint
{
    double x = 0.0; // SNR, dB
    double y = 0.0; // probability
    std::size_t trials = 0;
    std::size_t hits = 0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
};

struct DetectionOptions
{
    double threshold_db = 10.0;        // over the map median
    double clutter_exclusion = 0.1;    // |nu| <= this is ignored
    double doppler_tolerance_bins = 0.5;
};

struct RadarChainOptions
{
    std::optional<Flavor> mode; // default_apply_mode(bank) when unset
    DopplerWindow window = DopplerWindow::blackman_harris;
    DetectionOptions detection;
    std::size_t threads = 1;
};

/// Mode for a bank when none is requested: circular banks run circularly.
Flavor default_apply_mode(const FilterBank &bank);

/// Column m filtered with h_{train[m]}. Output row g holds range gate
/// data.gate_offset + g, for the n_gates = rows - L + 1 gates.
///   linear:   y = (column * h)[g + peak_index]
///   circular: n = L + L_f - 1 point circular convolution; when the column is
///             longer than n it is cut into windows of n samples starting at
///             every L_f-th gate.
DataMatrix apply_filterbank(const DataMatrix &data, const FilterBank &bank, const PulseTrain &train, Flavor mode);

/// Per gate: window over slow time, M-point FFT, bins reordered so that
/// column b holds k = b - (M-1)/2.
RangeDopplerMap range_doppler_map(const DataMatrix &filtered, DopplerWindow window = DopplerWindow::rectangular);

/// Local maxima (3x3, Doppler wraps) strictly above median * 10^(thr/20)
/// with |nu| > clutter_exclusion.
DetectionResult detect_targets(const RangeDopplerMap &map, double clutter_exclusion, double threshold_db);

/// Marks each truth entry found at its gate within `tolerance_bins` of nu M.
void match_truth(DetectionResult &result, const RangeDopplerMap &map, std::span<const TargetSpec> truth,
                 double tolerance_bins = 0.5);

/// One radar trial: simulate, filter, map and detect.
DetectionResult run_radar_trial(const Scene &scene, std::span<const std::vector<cd>> alphabet,
                                const PulseTrain &train, const FilterBank &bank, std::span<const TargetSpec> truth,
                                const RadarChainOptions &opts, RangeDopplerMap *map_out = nullptr);

/// Two-sided 95% Wilson score interval.
std::pair<double, double> wilson_interval(std::size_t hits, std::size_t trials, double z = 1.959963984540054);

/// Pd over an SNR grid for each bank, with common random numbers: trial t at
/// grid point i uses derive_seed(seed, {i, t}) for the scene, train and noise
/// of every bank. A trial counts when every template target is detected.
std::vector<std::vector<CurvePoint>> estimate_pd(std::span<const FilterBank> banks,
                                                 std::span<const std::vector<cd>> alphabet,
                                                 std::span<const double> snr_grid, std::size_t trials,
                                                 const SceneConfig &scene_template, std::uint64_t seed,
                                                 const RadarChainOptions &opts);

struct SerOptions
{
    std::optional<Flavor> mode; // default_apply_mode(bank) when unset
    cd path_gain{1.0, 0.0};
    double doppler_hz = 0.0;
    std::size_t threads = 1;
};

/// Symbol decision: the filter whose output has the largest peak magnitude.
std::size_t decide_symbol(std::span<const cd> received, const FilterBank &bank, Flavor mode);

/// SER over an SNR grid per bank; symbol and noise of trial t at grid point i
/// derive from derive_seed(seed, {i, t}) and are shared by all banks.
std::vector<std::vector<CurvePoint>> simulate_ser(std::span<const std::vector<cd>> alphabet,
                                                  std::span<const FilterBank> banks, double sample_rate,
                                                  std::span<const double> snr_grid, std::size_t trials,
                                                  std::uint64_t seed, const SerOptions &opts = {});

/// SNR at which a decreasing curve crosses `level`, interpolating log10(y)
/// linearly in x. Empty if the curve never crosses.
std::optional<double> snr_at_level(std::span<const CurvePoint> curve, double level);

} // namespace dfrc
