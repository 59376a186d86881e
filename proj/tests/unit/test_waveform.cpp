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

#include "doctest.h"

#include <algorithm>
#include <numeric>

#include "dfrc/waveform.hpp"
#include "../oracles.hpp"

using namespace dfrc;

namespace
{

ModulationParams nominal_params() { return ModulationParams::make(30, 1e-3, 3000.0); }

double max_modulus_error(std::span<const cd> s)
{
    double worst = 0.0;
    for (const auto &x : s)
        worst = std::max(worst, std::abs(std::abs(x) - 1.0));
    return worst;
}

ChipSequence constant_chips(std::size_t n, int v)
{
    ChipSequence c;
    c.chips.assign(n, v);
    return c;
}

} // namespace

TEST_SUITE("waveform")
{
    TEST_CASE("chip sequences take values in {-1, +1} and are deterministic")
    {
        const auto a = generate_chip_sequence(4, 99);
        CHECK(a.chips.size() == 4);
        for (int c : a.chips)
            CHECK((c == -1 || c == 1));
        CHECK(generate_chip_sequence(64, 5).chips == generate_chip_sequence(64, 5).chips);
        CHECK(generate_chip_sequence(64, 5).chips != generate_chip_sequence(64, 6).chips);
        CHECK_THROWS_AS(generate_chip_sequence(0, 1), InvalidArgument);
    }

    TEST_CASE("chip sequence mean is near zero over 1e5 chips")
    {
        for (std::uint64_t seed : {1u, 2u, 3u})
        {
            const auto c = generate_chip_sequence(100000, seed);
            const double mean = std::accumulate(c.chips.begin(), c.chips.end(), 0.0) / 1e5;
            CHECK(std::abs(mean) <= 0.02);
        }
    }

    TEST_CASE("modulation parameter invariants")
    {
        const auto p = nominal_params();
        CHECK(p.baseband_freq == doctest::Approx(500.0).epsilon(1e-12));
        CHECK(p.samples_per_chip() == 3);
        CHECK(p.n_samples() == 90);
        CHECK(p.pulse_duration() == doctest::Approx(0.030));
        CHECK_THROWS_AS(ModulationParams::make(30, 1e-3, 2500.5).validate(), InvalidArgument);
        CHECK_THROWS_AS(ModulationParams::make(0, 1e-3, 3000.0).validate(), InvalidArgument);
    }

    TEST_CASE("DPSK with all chips -1 has a unit envelope")
    {
        const auto wf = synth_dpsk(constant_chips(30, -1), nominal_params());
        CHECK(wf.size() == 90);
        CHECK(max_modulus_error(wf.view()) <= 1e-9);
    }

    TEST_CASE("DPSK matches a pointwise evaluation of its defining formula")
    {
        for (std::uint64_t seed = 1; seed <= 5; ++seed)
        {
            const auto chips = generate_chip_sequence(30, seed);
            const auto wf = synth_dpsk(chips, nominal_params());
            const auto ref = oracle::dpsk_reference(chips.chips, 1e-3, 3000.0);
            CHECK(oracle::rel_diff(wf.samples, ref) <= 1e-12);
        }
        // Even samples per chip too.
        const auto chips = generate_chip_sequence(12, 8);
        const auto wf = synth_dpsk(chips, ModulationParams::make(12, 1e-3, 8000.0));
        CHECK(oracle::rel_diff(wf.samples, oracle::dpsk_reference(chips.chips, 1e-3, 8000.0)) <= 1e-12);
    }

    TEST_CASE("DPSK and MSK are constant modulus")
    {
        for (std::uint64_t seed = 1; seed <= 20; ++seed)
        {
            const auto chips = generate_chip_sequence(30, seed);
            CHECK(max_modulus_error(synth_dpsk(chips, nominal_params()).view()) <= 1e-9);
            CHECK(max_modulus_error(synth_msk(chips, nominal_params(), 0.3).view()) <= 1e-12);
        }
    }

    TEST_CASE("MSK with s_d = +1 is the linear phase ramp")
    {
        const auto p = nominal_params();
        const auto wf = synth_msk(constant_chips(30, -1), p, 0.0);
        for (std::size_t i = 0; i < wf.size(); ++i)
        {
            const double t = static_cast<double>(i) / p.sample_rate;
            CHECK(std::abs(wf.samples[i] - std::polar(1.0, -oracle::kPi * p.baseband_freq * t)) <= 1e-12);
        }
    }

    TEST_CASE("MSK phase is continuous across chip boundaries")
    {
        const auto p = nominal_params();
        const double bound = oracle::kPi * p.baseband_freq / p.sample_rate + 1e-9;
        for (std::uint64_t seed = 1; seed <= 10; ++seed)
        {
            const auto wf = synth_msk(generate_chip_sequence(30, seed), p, 0.7);
            double worst = 0.0;
            for (std::size_t i = 1; i < wf.size(); ++i)
                worst = std::max(worst, std::abs(std::arg(wf.samples[i] * std::conj(wf.samples[i - 1]))));
            CHECK(worst <= bound);
        }
    }

    TEST_CASE("synthesis rejects mismatched chip counts")
    {
        CHECK_THROWS_AS(synth_dpsk(constant_chips(29, 1), nominal_params()), InvalidArgument);
        CHECK_THROWS_AS(synth_msk(constant_chips(31, 1), nominal_params()), InvalidArgument);
    }

    TEST_CASE("alphabet: shared parameters, determinism and distinctness")
    {
        const auto a = make_alphabet(4, nominal_params(), Modulation::dpsk, 1);
        const auto b = make_alphabet(4, nominal_params(), Modulation::dpsk, 1);
        CHECK(a.size() == 4);
        CHECK(a.bits_per_symbol() == 2);
        for (std::size_t k = 0; k < 4; ++k)
        {
            CHECK(a[k].samples == b[k].samples);
            CHECK(a[k].size() == 90);
        }
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = i + 1; j < 4; ++j)
                CHECK(normalized_xcorr_peak(a[i].view(), a[j].view()) < 1.0 - 1e-6);
        CHECK_THROWS_AS(make_alphabet(3, nominal_params(), Modulation::dpsk, 1), InvalidArgument);
    }

    TEST_CASE("passband of a constant envelope is the carrier")
    {
        BasebandWaveform wf;
        wf.params = ModulationParams::make(4, 1e-3, 3000.0);
        wf.samples.assign(12, cd{1.0, 0.0});
        const double fc = 15000.0, fp = 150000.0;
        const auto pb = to_passband(wf, fc, fp);
        for (std::size_t i = 0; i < pb.size(); ++i)
            CHECK(pb[i] == doctest::Approx(std::cos(2.0 * oracle::kPi * fc * static_cast<double>(i) / fp)).epsilon(1e-12));
    }

    TEST_CASE("passband rectangular and polar forms agree")
    {
        const auto wf = synth_dpsk(generate_chip_sequence(30, 3), nominal_params());
        const auto a = to_passband(wf, 15000.0, 150000.0);
        const auto b = to_passband_polar(wf, 15000.0, 150000.0);
        REQUIRE(a.size() == b.size());
        double worst = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i)
            worst = std::max(worst, std::abs(a[i] - b[i]));
        CHECK(worst <= 1e-9);
    }

    TEST_CASE("undersampled carrier is rejected")
    {
        const auto wf = synth_dpsk(generate_chip_sequence(30, 3), nominal_params());
        CHECK_THROWS_AS(to_passband(wf, 15000.0, 30000.0), InvalidArgument);
    }

    TEST_CASE("demodulating cos and -sin gives 1 and j")
    {
        const double fc = 10000.0, fp = 200000.0;
        const std::size_t n = 2000;
        std::vector<double> c(n), s(n);
        for (std::size_t i = 0; i < n; ++i)
        {
            const double t = static_cast<double>(i) / fp;
            c[i] = std::cos(2.0 * oracle::kPi * fc * t);
            s[i] = -std::sin(2.0 * oracle::kPi * fc * t);
        }
        const auto bc = demodulate_iq(c, fc, fp);
        const auto bs = demodulate_iq(s, fc, fp);
        for (std::size_t i = 100; i + 100 < n; ++i)
        {
            CHECK(std::abs(bc[i] - cd(1.0, 0.0)) <= 1e-6);
            CHECK(std::abs(bs[i] - cd(0.0, 1.0)) <= 1e-6);
        }
    }

    TEST_CASE("passband round trip recovers the baseband waveform")
    {
        const auto p = nominal_params();
        const double fc = 30000.0, fp = 300000.0;
        for (auto kind : {Modulation::dpsk, Modulation::msk})
        {
            const auto chips = generate_chip_sequence(30, 12);
            const auto wf = kind == Modulation::dpsk ? synth_dpsk(chips, p) : synth_msk(chips, p);
            const auto env = demodulate_iq(to_passband(wf, fc, fp), fc, fp, p.baseband_freq);
            const auto back = decimate_held(env, static_cast<std::size_t>(fp / p.sample_rate));
            REQUIRE(back.size() == wf.size());
            // Skip the first and last sample, where the smoothing window runs off the record.
            std::vector<cd> a(back.begin() + 1, back.end() - 1), b(wf.samples.begin() + 1, wf.samples.end() - 1);
            CHECK(oracle::rel_diff(a, b) <= 0.02);
        }
    }
}
