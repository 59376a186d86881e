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

#include "dfrc/radarsim.hpp"

#include <cmath>

#include "dfrc/fft.hpp"
#include "dfrc/random.hpp"

namespace dfrc
{

namespace
{

// Above this many scatterers a pulse is synthesized by FFT convolution.
constexpr std::size_t kDirectScatterers = 32;

} // namespace

std::string to_string(ScattererKind k) { return k == ScattererKind::target ? "target" : "clutter"; }

double db_to_power(double db)
{
    if (std::isinf(db) && db < 0.0)
        return 0.0;
    return std::pow(10.0, db / 10.0);
}

std::vector<TargetSpec> SceneConfig::six_targets()
{
    return {{225, 0.3, {}}, {228, 0.3, {}}, {221, 0.3, {}}, {235, -0.3, {}}, {215, -0.25, {}}, {245, 0.2, {}}};
}

SceneConfig SceneConfig::six_target()
{
    SceneConfig c;
    c.targets = six_targets();
    return c;
}

double SceneConfig::resolved_gate_spacing() const
{
    return gate_spacing > 0.0 ? gate_spacing : speed_of_light / (2.0 * sample_rate);
}

void SceneConfig::validate() const
{
    if (n_range_gates == 0)
        throw InvalidArgument("scene: n_range_gates must be >= 1");
    if (n_pulses == 0)
        throw InvalidArgument("scene: n_pulses must be >= 1");
    if (!(t_pri > 0.0) || !std::isfinite(t_pri))
        throw InvalidArgument("scene: t_pri must be positive");
    if (!(wavelength > 0.0) || !std::isfinite(wavelength))
        throw InvalidArgument("scene: wavelength must be positive");
    if (!(gate_spacing >= 0.0) || !std::isfinite(gate_spacing))
        throw InvalidArgument("scene: gate_spacing must be >= 0");
    if (!(sample_rate > 0.0) || !std::isfinite(sample_rate))
        throw InvalidArgument("scene: sample_rate must be positive");
    if (std::isnan(cnr_db) || cnr_db == std::numeric_limits<double>::infinity())
        throw InvalidArgument("scene: cnr_db must be finite or -inf");
    if (!std::isfinite(snr_db))
        throw InvalidArgument("scene: snr_db must be finite");
    if (!(clutter_doppler_max >= 0.0 && clutter_doppler_max <= 0.5))
        throw InvalidArgument("scene: clutter_doppler_max must lie in [0, 0.5]");
    if (!(noise_variance >= 0.0) || !std::isfinite(noise_variance))
        throw InvalidArgument("scene: noise_variance must be >= 0");
    for (const auto &t : targets)
    {
        if (t.range_cell >= n_range_gates)
            throw InvalidArgument("scene: target range_cell " + std::to_string(t.range_cell) + " outside [0, " +
                                  std::to_string(n_range_gates) + ")");
        if (!(std::abs(t.normalized_doppler) <= 0.5))
            throw InvalidArgument("scene: target normalized_doppler must lie in [-0.5, 0.5]");
        if (t.snr_db && !std::isfinite(*t.snr_db))
            throw InvalidArgument("scene: target snr_db must be finite");
    }
}

std::size_t Scene::n_targets() const
{
    std::size_t n = 0;
    for (const auto &s : scatterers)
        n += s.kind == ScattererKind::target;
    return n;
}

std::size_t Scene::n_clutter() const { return scatterers.size() - n_targets(); }

Scene generate_scene(const SceneConfig &config, std::uint64_t seed)
{
    config.validate();
    Scene s;
    s.n_range_gates = config.n_range_gates;
    s.n_pulses = config.n_pulses;
    s.t_pri = config.t_pri;
    s.wavelength = config.wavelength;
    s.gate_spacing = config.resolved_gate_spacing();
    s.cnr_db = config.cnr_db;
    s.snr_db = config.snr_db;
    s.noise_variance = config.noise_variance;
    s.noise_seed = derive_seed(seed, {0x6e6f697365}); // "noise"

    // Powers are referenced to unit noise variance, whether or not noise is drawn.
    const double cnr = db_to_power(config.cnr_db);
    if (cnr > 0.0)
    {
        auto rng = make_rng(seed, {0x636c7574}); // "clut"
        std::uniform_real_distribution<double> nu(-config.clutter_doppler_max, config.clutter_doppler_max);
        for (std::size_t g = 0; g < config.n_range_gates; ++g)
        {
            Scatterer c;
            c.kind = ScattererKind::clutter;
            c.range_cell = g;
            c.reflectivity = complex_normal(rng, cnr);
            c.normalized_doppler = nu(rng);
            s.scatterers.push_back(c);
        }
    }
    for (const auto &t : config.targets)
    {
        Scatterer x;
        x.kind = ScattererKind::target;
        x.range_cell = t.range_cell;
        x.normalized_doppler = t.normalized_doppler;
        x.reflectivity = std::sqrt(db_to_power(t.snr_db.value_or(config.snr_db)));
        s.scatterers.push_back(x);
    }
    return s;
}

cd range_phase(const Scene &scene, std::size_t range_cell)
{
    const double R = static_cast<double>(range_cell) * scene.gate_spacing;
    // Reduce modulo one wavelength before scaling to keep the phase accurate.
    const double frac = std::fmod(2.0 * R / scene.wavelength, 1.0);
    return std::polar(1.0, -2.0 * pi * frac);
}

CVector simulate_received_pulse(const Scene &scene, std::span<const cd> waveform, std::size_t m)
{
    if (m >= scene.n_pulses)
        throw InvalidArgument("simulate_received_pulse: pulse index " + std::to_string(m) + " >= M = " +
                              std::to_string(scene.n_pulses));
    if (waveform.empty())
        throw InvalidArgument("simulate_received_pulse: empty waveform");
    const std::size_t L = waveform.size();
    const std::size_t rows = scene.n_range_gates + L - 1;
    CVector y = CVector::Zero(static_cast<Eigen::Index>(rows));
    const Eigen::Map<const CVector> x(waveform.data(), static_cast<Eigen::Index>(L));

    auto amplitude = [&](const Scatterer &sc) {
        if (sc.range_cell >= scene.n_range_gates)
            throw InvalidArgument("simulate_received_pulse: scatterer outside the gate span");
        const double slow = std::fmod(sc.normalized_doppler * static_cast<double>(m), 1.0);
        return sc.reflectivity * range_phase(scene, sc.range_cell) * std::polar(1.0, 2.0 * pi * slow);
    };

    if (scene.scatterers.size() <= kDirectScatterers)
    {
        for (const auto &sc : scene.scatterers)
            y.segment(static_cast<Eigen::Index>(sc.range_cell), static_cast<Eigen::Index>(L)) += amplitude(sc) * x;
    }
    else
    {
        // Dense scenes: gate amplitudes convolved with the pulse.
        std::vector<cd> gates(scene.n_range_gates, cd(0.0));
        for (const auto &sc : scene.scatterers)
            gates[sc.range_cell] += amplitude(sc);
        const auto conv = fft::convolve(gates, waveform);
        y = Eigen::Map<const CVector>(conv.data(), static_cast<Eigen::Index>(rows));
    }
    if (scene.noise_variance > 0.0)
    {
        auto rng = make_rng(scene.noise_seed, {m});
        for (Eigen::Index i = 0; i < y.size(); ++i)
            y(i) += complex_normal(rng, scene.noise_variance);
    }
    return y;
}

DataMatrix simulate_ncpi(const Scene &scene, std::span<const std::vector<cd>> alphabet, const PulseTrain &train)
{
    if (train.size() != scene.n_pulses)
        throw InvalidArgument("simulate_ncpi: pulse train has " + std::to_string(train.size()) +
                              " symbols but the scene has M = " + std::to_string(scene.n_pulses));
    if (alphabet.empty())
        throw InvalidArgument("simulate_ncpi: empty alphabet");
    const std::size_t L = alphabet.front().size();
    for (const auto &w : alphabet)
        if (w.size() != L)
            throw InvalidArgument("simulate_ncpi: alphabet waveforms must share one length");

    DataMatrix d;
    d.entries.resize(static_cast<Eigen::Index>(scene.n_range_gates + L - 1), static_cast<Eigen::Index>(scene.n_pulses));
    for (std::size_t m = 0; m < scene.n_pulses; ++m)
    {
        if (train[m] >= alphabet.size())
            throw InvalidArgument("simulate_ncpi: symbol index " + std::to_string(train[m]) + " >= K");
        d.entries.col(static_cast<Eigen::Index>(m)) = simulate_received_pulse(scene, alphabet[train[m]], m);
    }
    return d;
}

DataMatrix simulate_ncpi(const Scene &scene, const WaveformAlphabet &alphabet, const PulseTrain &train)
{
    std::vector<std::vector<cd>> raw;
    for (const auto &w : alphabet.waveforms)
        raw.push_back(w.samples);
    return simulate_ncpi(scene, raw, train);
}

PulseTrain random_pulse_train(std::size_t M, std::size_t K, std::uint64_t seed)
{
    if (K == 0)
        throw InvalidArgument("random_pulse_train: K must be >= 1");
    PulseTrain t;
    t.seed = seed;
    auto rng = make_rng(seed, {0x7472}); // "tr"
    std::uniform_int_distribution<std::size_t> pick(0, K - 1);
    t.symbol_indices.resize(M);
    for (auto &s : t.symbol_indices)
        s = pick(rng);
    return t;
}

CVector simulate_comm_received(std::span<const cd> waveform, double sample_rate, cd path_gain, double doppler_hz,
                               double snr_db, std::uint64_t seed)
{
    if (!(sample_rate > 0.0) || !std::isfinite(sample_rate))
        throw InvalidArgument("simulate_comm_received: sample_rate must be positive");
    if (!std::isfinite(doppler_hz) || !std::isfinite(path_gain.real()) || !std::isfinite(path_gain.imag()))
        throw InvalidArgument("simulate_comm_received: non-finite channel");
    if (std::isnan(snr_db))
        throw InvalidArgument("simulate_comm_received: snr_db is NaN");

    CVector y(static_cast<Eigen::Index>(waveform.size()));
    for (std::size_t p = 0; p < waveform.size(); ++p)
    {
        const double t = static_cast<double>(p) / sample_rate;
        y(static_cast<Eigen::Index>(p)) = path_gain * std::polar(1.0, 2.0 * pi * doppler_hz * t) * waveform[p];
    }
    const bool noiseless = std::isinf(snr_db) && snr_db > 0.0;
    if (!noiseless)
    {
        const double var = db_to_power(-snr_db);
        auto rng = make_rng(seed);
        for (Eigen::Index i = 0; i < y.size(); ++i)
            y(i) += complex_normal(rng, var);
    }
    return y;
}

} // namespace dfrc
