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

// Acceptance run on the full-scale setup. Prints one PASS/FAIL line per
// criterion and exits non-zero if any fails.
//
// usage: dfrc_acceptance <dfrc_unit binary> <full-scale config>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <limits>
#include <sstream>
#include <thread>

#include "dfrc/config.hpp"
#include "dfrc/random.hpp"
#include "dfrc/selftest.hpp"

using namespace dfrc;

namespace
{

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(int id, const std::string &name, bool ok, const std::string &detail)
{
    std::cout << (ok ? "PASS" : "FAIL") << " criterion " << id << " (" << name << "): " << detail << std::endl;
    failures += !ok;
}

std::string fmt(const char *f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

double worst_psl(const DesignReport &r) { return *std::max_element(r.psl_db.begin(), r.psl_db.end()); }

struct Designed
{
    FilterBank bank;
    DesignReport report;
    double seconds = 0.0;
};

Designed design(DesignKind kind, const WaveformAlphabet &a, std::size_t L_f)
{
    const auto t0 = Clock::now();
    Designed d;
    switch (kind)
    {
    case DesignKind::coherent_linear:
        d.bank = design_coherent_linear(a, L_f);
        break;
    case DesignKind::coherent_circular:
        d.bank = design_coherent_circular(a, L_f);
        break;
    default:
        d.bank = design_uncoherent_ls_baseline(a, L_f);
        break;
    }
    d.seconds = seconds_since(t0);
    d.report = evaluate_filterbank(d.bank, a);
    return d;
}

} // namespace

int main(int argc, char **argv)
{
    if (argc != 3)
    {
        std::cerr << "usage: dfrc_acceptance <dfrc_unit> <config.json>\n";
        return 2;
    }
    const std::string unit_binary = argv[1];
    const ExperimentConfig cfg = load_config(argv[2]);
    const std::size_t threads = std::max(1u, std::thread::hardware_concurrency());
    const auto alphabet = make_alphabet(cfg.K, cfg.modulation, cfg.kind, cfg.alphabet_seed);
    const auto samples = alphabet_samples(alphabet);
    const std::size_t L = alphabet.length();
    const std::size_t L_f = cfg.resolved_L_f();
    std::cout << "setup: K=" << cfg.K << " L=" << L << " L_f=" << L_f << " gates=" << cfg.scene.n_range_gates
              << " M=" << cfg.scene.n_pulses << " threads=" << threads << std::endl;

    // 1. Closed forms against the nullspace-projection oracle.
    {
        const auto t0 = Clock::now();
        const auto rep = run_oracle_selftest(100, 7, 1e-8);
        const double s = seconds_since(t0);
        report(1, "oracle equivalence", rep.passed() && s < 10.0,
               "max rel error " + fmt("%.2e", rep.max_rel_error) + " over " + std::to_string(rep.cases.size()) +
                   " instances (<= 1e-8), " + fmt("%.2f", s) + " s (< 10 s)");
    }

    // 2. Coherency of the designed banks.
    const auto t_design = Clock::now();
    const Designed lin = design(DesignKind::coherent_linear, alphabet, L_f);
    const Designed circ = design(DesignKind::coherent_circular, alphabet, L_f);
    const Designed base = design(DesignKind::baseline_ls, alphabet, L_f);
    const double design_s = seconds_since(t_design);
    report(2, "full coherency",
           lin.report.coherence_error <= 1e-6 && circ.report.coherence_error <= 1e-6 &&
               base.report.coherence_error > 1e-2 && design_s < 30.0,
           "coherence linear " + fmt("%.2e", lin.report.coherence_error) + ", circular " +
               fmt("%.2e", circ.report.coherence_error) + " (<= 1e-6), baseline " +
               fmt("%.3f", base.report.coherence_error) + " (> 1e-2); design " + fmt("%.1f", design_s) +
               " s (< 30 s)");

    // 3. Constraint and stationarity on every coherent bank.
    {
        bool ok = true;
        std::ostringstream det;
        for (const auto *d : {&lin, &circ})
        {
            const auto sys = assemble_block_system(samples, L_f, d->bank.peak_index, d->bank.flavor);
            const CVector h = d->bank.stacked();
            const double c = (sys.Xtil * h).norm() / sys.e.norm();
            const double g = kkt_projected_gradient(sys, h) / (sys.X.adjoint() * sys.e).norm();
            ok = ok && c <= 1e-8 && g <= 1e-8;
            det << to_string(d->bank.design) << ": |Xtil h|/|e| " << fmt("%.1e", c) << ", grad " << fmt("%.1e", g)
                << "; ";
        }
        report(3, "constraint and KKT", ok, det.str() + "limits 1e-8");
    }

    // 4. Strict PSL ordering.
    {
        const double pc = worst_psl(circ.report), pl = worst_psl(lin.report), pb = worst_psl(base.report);
        report(4, "sidelobe ordering", pc < pl && pl < pb,
               "worst PSL circular " + fmt("%.1f", pc) + " dB, linear " + fmt("%.1f", pl) + " dB, baseline " +
                   fmt("%.1f", pb) + " dB (need circular < linear < baseline)");
    }

    const std::vector<FilterBank> banks{lin.bank, circ.bank, base.bank};

    // 5. Scenario detection over 50 seeded trials per clutter level.
    {
        const auto t0 = Clock::now();
        const std::size_t trials = 50;
        bool ok = true;
        std::ostringstream det;
        for (std::size_t si = 0; si < cfg.radar.scenarios.size(); ++si)
        {
            const auto &sc = cfg.radar.scenarios[si];
            SceneConfig scfg = cfg.scene;
            scfg.cnr_db = sc.cnr_db;
            scfg.snr_db = sc.snr_db;
            const std::size_t n_t = scfg.targets.size();
            std::vector<std::size_t> full(banks.size(), 0), partial(banks.size(), 0);
            for (std::size_t t = 0; t < trials; ++t)
            {
                const std::uint64_t seed = derive_seed(cfg.master_seed, {si, t});
                const Scene scene = generate_scene(scfg, seed);
                const PulseTrain train = random_pulse_train(scfg.n_pulses, cfg.K, derive_seed(seed, {1}));
                for (std::size_t b = 0; b < banks.size(); ++b)
                {
                    const auto r = run_radar_trial(scene, samples, train, banks[b], scfg.targets, cfg.chain);
                    full[b] += r.truth_matches == n_t;
                    partial[b] += r.truth_matches < n_t;
                }
            }
            const double need = sc.cnr_db >= 70.0 ? 0.90 : 0.95;
            const auto frac = [&](std::size_t n) { return static_cast<double>(n) / static_cast<double>(trials); };
            ok = ok && frac(full[0]) >= need && frac(full[1]) >= need;
            if (sc.cnr_db >= 70.0)
                ok = ok && frac(partial[2]) >= 0.90;
            det << "CNR " << sc.cnr_db << " dB: 6/6 in linear " << full[0] << ", circular " << full[1]
                << ", baseline " << full[2] << " of " << trials << "; ";
        }
        const double s = seconds_since(t0);
        report(5, "scenario detection", ok && s < 300.0,
               det.str() + fmt("%.1f", s) + " s (coherent >= 95%/90%, baseline <= 5 targets in >= 90% at 70 dB)");
    }

    // 6. Pd dominance with common random numbers.
    {
        const auto t0 = Clock::now();
        SceneConfig tmpl = cfg.scene;
        tmpl.cnr_db = cfg.pd.cnr_db;
        tmpl.targets = cfg.pd.targets;
        RadarChainOptions chain = cfg.chain;
        chain.threads = threads;
        const std::size_t trials = std::max<std::size_t>(cfg.pd.trials, 500);
        const auto curves =
            estimate_pd(banks, samples, cfg.pd.snr_grid, trials, tmpl, derive_seed(cfg.master_seed, {0x7064}), chain);
        bool dominate = true;
        std::size_t separated = 0;
        std::ostringstream det;
        for (std::size_t i = 0; i < cfg.pd.snr_grid.size(); ++i)
        {
            const auto &pb = curves[2][i];
            bool sep = true;
            for (std::size_t c = 0; c < 2; ++c)
            {
                dominate = dominate && curves[c][i].y >= pb.y;
                sep = sep && curves[c][i].ci_lo > pb.ci_hi;
            }
            separated += sep;
            det << cfg.pd.snr_grid[i] << ":" << fmt("%.2f", curves[0][i].y) << "/" << fmt("%.2f", curves[1][i].y)
                << "/" << fmt("%.2f", pb.y) << " ";
        }
        report(6, "Pd dominance", dominate && separated >= 2,
               "SNR:Pd linear/circular/baseline " + det.str() + "; CI-separated points " + std::to_string(separated) +
                   " (>= 2), " + std::to_string(trials) + " trials/point, " + fmt("%.1f", seconds_since(t0)) + " s");
    }

    // 7. SER gain at 1e-2 and the noiseless limit.
    {
        const auto t0 = Clock::now();
        std::vector<double> grid = cfg.ser.snr_grid;
        grid.push_back(std::numeric_limits<double>::infinity());
        SerOptions opts;
        opts.threads = threads;
        opts.path_gain = cfg.ser.path_gain;
        opts.doppler_hz = cfg.ser.doppler_hz;
        const std::size_t trials = std::max<std::size_t>(cfg.ser.trials, 10000);
        const auto curves = simulate_ser(samples, banks, cfg.modulation.sample_rate, grid, trials,
                                         derive_seed(cfg.master_seed, {0x736572}), opts);
        bool noiseless = true;
        std::vector<std::optional<double>> at(3);
        for (std::size_t b = 0; b < 3; ++b)
        {
            noiseless = noiseless && curves[b].back().hits == 0;
            at[b] = snr_at_level(std::span(curves[b]).first(cfg.ser.snr_grid.size()), 1e-2);
        }
        bool ok = noiseless;
        std::ostringstream det;
        for (std::size_t c = 0; c < 2; ++c)
        {
            if (!at[c] || !at[2])
            {
                ok = false;
                continue;
            }
            const double gain = *at[2] - *at[c];
            ok = ok && std::abs(gain - 2.0) <= 1.5;
            det << to_string(banks[c].design) << " gain " << fmt("%.2f", gain) << " dB; ";
        }
        auto show = [&](std::size_t b) { return at[b] ? fmt("%.2f", *at[b]) : std::string("none"); };
        report(7, "SER gain", ok,
               "SNR at SER 1e-2: linear " + show(0) + ", circular " + show(1) + ", baseline " + show(2) + " dB; " +
                   det.str() + "noiseless errors " + (noiseless ? "0" : "nonzero") + "; need gain 2.0 +- 1.5 dB, " +
                   std::to_string(trials) + " trials/point, " + fmt("%.1f", seconds_since(t0)) + " s");
    }

    // 8. Feasibility gate at the lower bound.
    {
        const std::size_t bound = (cfg.K - 1) * (L - 1);
        bool below = false;
        std::string bound_text;
        try
        {
            (void)design_coherent_linear(alphabet, bound - 1);
        }
        catch (const DimensionError &e)
        {
            below = true;
            bound_text = e.bound();
        }
        bool at_ok = false;
        std::string warn;
        try
        {
            const auto b = design_coherent_linear(alphabet, bound);
            at_ok = !b.warnings.empty();
            for (const auto &w : b.warnings)
                std::cout << "  warning at L_f=" << bound << ": " << w << std::endl;
            warn = std::to_string(b.warnings.size()) + " warning(s)";
        }
        catch (const Error &e)
        {
            warn = std::string("failed: ") + e.what();
        }
        report(8, "feasibility gate", below && at_ok,
               "L_f=" + std::to_string(bound - 1) + (below ? " dimension-error [" + bound_text + "]" : " no error") +
                   "; L_f=" + std::to_string(bound) + " " + warn);
    }

    // 9. Unit suites within budget.
    {
        const auto t0 = Clock::now();
        const std::string cmd = "\"" + unit_binary + "\" --no-intro --minimal > /dev/null 2>&1";
        const int rc = std::system(cmd.c_str());
        const double s = seconds_since(t0);
        report(9, "unit suites", rc == 0 && s < 60.0,
               std::string("dfrc_unit ") + (rc == 0 ? "passed" : "failed") + " in " + fmt("%.1f", s) + " s (< 60 s)");
    }

    std::cout << (failures ? std::to_string(failures) + " criterion/criteria failed" : "all criteria passed")
              << std::endl;
    return failures ? 1 : 0;
}
