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

// dfrc: design filter banks, run radar scenes, Pd and SER curves.
//
//   dfrc design   --config cfg.json
//   dfrc radar    --config cfg.json [--full-map]
//   dfrc pd       --config cfg.json
//   dfrc ser      --config cfg.json
//   dfrc selftest [--instances 100] [--seed 7]
//
// Exit status: 0 success, 1 runtime error, 2 config or feasibility error.
// Errors are reported as one JSON object on stderr.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dfrc/config.hpp"
#include "dfrc/io.hpp"
#include "dfrc/random.hpp"
#include "dfrc/selftest.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace dfrc;

namespace
{

constexpr const char *kVersion = "0.1.0";

struct Options
{
    std::string config_path;
    std::string output;
    bool gnuplot = false;
    bool full_map = false;
    bool dump_system = false;
    bool quiet = false;
    std::size_t instances = 100;
    std::uint64_t selftest_seed = 7;
};

bool g_quiet = false;

void log(const std::string &msg)
{
    if (!g_quiet)
        std::cerr << "[dfrc] " << msg << "\n";
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fixed(double v, int digits = 3)
{
    std::ostringstream os;
    os << std::fixed << std::setprecision(digits) << v;
    return os.str();
}

/// Output directory: --output, then DFRC_OUTPUT_ROOT, then the config.
fs::path output_root(const Options &opt, const ExperimentConfig &cfg, const std::string &command)
{
    fs::path root = cfg.output_dir;
    if (const char *env = std::getenv("DFRC_OUTPUT_ROOT"); env && *env)
        root = env;
    if (!opt.output.empty())
        root = opt.output;
    return root / command;
}

/// Buffers every output; nothing touches disk until commit(), and each file
/// is then written atomically with the manifest last.
class Outputs
{
public:
    Outputs(fs::path root, std::string hash) : root_(std::move(root)), hash_(std::move(hash)) {}

    const std::string &hash() const { return hash_; }

    void text(const std::string &rel, std::string content) { files_.emplace_back(rel, std::move(content)); }

    void object(const std::string &rel, json j)
    {
        j["config_hash"] = hash_;
        text(rel, j.dump(2) + "\n");
    }

    void binary(const std::string &rel, const std::vector<char> &bytes)
    {
        files_.emplace_back(rel, std::string(bytes.begin(), bytes.end()));
    }

    void commit(json manifest)
    {
        json listed = json::array();
        for (const auto &[rel, content] : files_)
        {
            io::atomic_write(root_ / rel, content);
            listed.push_back(rel);
        }
        manifest["files"] = listed;
        manifest["config_hash"] = hash_;
        io::atomic_write(root_ / "manifest.json", manifest.dump(2) + "\n");
        log("wrote " + std::to_string(files_.size() + 1) + " files to " + root_.string());
    }

private:
    fs::path root_;
    std::string hash_;
    std::vector<std::pair<std::string, std::string>> files_;
};

json base_manifest(const std::string &command, const ExperimentConfig &cfg)
{
    return {{"tool", "dfrc"},
            {"version", kVersion},
            {"command", command},
            {"config", cfg.source},
            {"seeds", {{"alphabet", cfg.alphabet_seed}, {"master", cfg.master_seed}}},
            {"threads", cfg.threads}};
}

FilterBank make_bank(const ExperimentConfig &cfg, DesignKind kind, const WaveformAlphabet &alphabet)
{
    const auto L_f = cfg.resolved_L_f();
    switch (kind)
    {
    case DesignKind::coherent_linear:
        return design_coherent_linear(alphabet, L_f, cfg.peak_index);
    case DesignKind::coherent_circular:
        return design_coherent_circular(alphabet, L_f, cfg.peak_index);
    case DesignKind::baseline_ls:
        return design_uncoherent_ls_baseline(alphabet, L_f, cfg.peak_index);
    case DesignKind::baseline_penalized:
        return design_penalized_iterative_baseline(alphabet, cfg.penalized.mu, cfg.penalized.iters, L_f,
                                                   cfg.peak_index);
    }
    throw InvalidArgument("unknown design kind");
}

std::vector<FilterBank> make_banks(const ExperimentConfig &cfg, const WaveformAlphabet &alphabet)
{
    std::vector<FilterBank> banks;
    for (auto kind : cfg.designs)
    {
        try
        {
            banks.push_back(make_bank(cfg, kind, alphabet));
        }
        catch (const ConditioningError &e)
        {
            throw ConditioningError(to_string(kind) + ": " + e.what(), e.condition());
        }
        const auto &b = banks.back();
        log(to_string(kind) + ": L_f = " + std::to_string(b.L_f) + ", " + fixed(b.elapsed_s) + " s");
        for (const auto &w : b.warnings)
            log("warning (" + to_string(kind) + "): " + w);
    }
    return banks;
}

/// index, then |y_k| in dB for each waveform.
std::string responses_csv(const std::vector<std::vector<cd>> &resp, const std::string &hash)
{
    std::ostringstream os;
    os << "# config_hash: " << hash << "\nindex";
    for (std::size_t k = 0; k < resp.size(); ++k)
        os << ",mag_db_" << k;
    os << "\n" << std::setprecision(17);
    for (std::size_t i = 0; i < resp.front().size(); ++i)
    {
        os << i;
        for (const auto &r : resp)
        {
            const double m = std::abs(r[i]);
            os << "," << (m > 0.0 ? 20.0 * std::log10(m) : kSidelobeFloorDb);
        }
        os << "\n";
    }
    return os.str();
}

std::string gnuplot_responses(const std::vector<FilterBank> &banks, std::size_t K)
{
    std::ostringstream os;
    os << "set datafile separator ','\nset xlabel 'sample'\nset ylabel '|y| (dB)'\nset grid\n";
    for (const auto &b : banks)
    {
        const auto name = to_string(b.design);
        os << "set title '" << name << "'\nplot ";
        for (std::size_t k = 0; k < K; ++k)
            os << (k ? ", " : "") << "'responses/" << name << ".csv' using 1:" << k + 2 << " with lines title 'k="
               << k << "'";
        os << "\npause -1\n";
    }
    return os.str();
}

std::string gnuplot_map(const std::string &csv, const std::string &title)
{
    return "set datafile separator ','\nset title '" + title +
           "'\nset xlabel 'Doppler bin'\nset ylabel 'gate'\nset view map\n"
           "splot '" + csv + "' matrix rowheaders columnheaders using 2:1:(20*log10($3+1e-300)) with image\n"
           "pause -1\n";
}

std::string gnuplot_curves(const std::vector<FilterBank> &banks, const std::string &prefix, const std::string &ylabel,
                           bool logy)
{
    std::ostringstream os;
    os << "set datafile separator ','\nset xlabel 'SNR (dB)'\nset ylabel '" << ylabel << "'\nset grid\n";
    if (logy)
        os << "set logscale y\n";
    os << "plot ";
    for (std::size_t i = 0; i < banks.size(); ++i)
        os << (i ? ", " : "") << "'" << prefix << to_string(banks[i].design) << ".csv' using 1:2 with linespoints title '"
           << to_string(banks[i].design) << "'";
    os << "\npause -1\n";
    return os.str();
}

WaveformAlphabet build_alphabet(const ExperimentConfig &cfg)
{
    return make_alphabet(cfg.K, cfg.modulation, cfg.kind, cfg.alphabet_seed);
}

// ---- subcommands ----------------------------------------------------------

json cmd_design(const Options &opt, const ExperimentConfig &cfg)
{
    const auto t0 = std::chrono::steady_clock::now();
    Outputs out(output_root(opt, cfg, "design"), io::config_hash(cfg.source));
    const auto alphabet = build_alphabet(cfg);
    const auto samples = alphabet_samples(alphabet);

    json wfs = json::array();
    for (std::size_t k = 0; k < alphabet.size(); ++k)
    {
        out.text("waveforms/waveform_" + std::to_string(k) + ".csv", io::waveform_csv(alphabet[k], out.hash()));
        wfs.push_back(io::to_json(alphabet[k]));
    }
    out.object("waveforms/alphabet.json", {{"kind", to_string(cfg.kind)}, {"waveforms", wfs}});

    const auto feas = check_feasibility(cfg.K, cfg.L(), cfg.resolved_L_f());
    const auto banks = make_banks(cfg, alphabet);

    json summary = json::array();
    for (const auto &bank : banks)
    {
        const auto name = to_string(bank.design);
        const auto report = evaluate_filterbank(bank, samples);
        out.text("banks/" + name + ".csv", io::filterbank_csv(bank, out.hash()));
        out.object("banks/" + name + ".json", {{"bank", io::to_json(bank)}, {"report", io::to_json(report)}});
        out.text("responses/" + name + ".csv", responses_csv(filter_responses(bank, samples), out.hash()));

        if (opt.dump_system && bank.design != DesignKind::baseline_ls &&
            bank.design != DesignKind::baseline_penalized)
        {
            const auto sys = assemble_block_system(alphabet, bank.L_f, bank.peak_index, bank.flavor);
            out.text("system/" + name + "_X.csv", io::matrix_csv(sys.X, out.hash()));
            out.text("system/" + name + "_Xtil.csv", io::matrix_csv(sys.Xtil, out.hash()));
            out.object("system/" + name + ".json", io::block_system_sidecar(sys, out.hash()));
        }

        double psl_max = -std::numeric_limits<double>::infinity();
        for (double v : report.psl_db)
            psl_max = std::max(psl_max, v);
        summary.push_back({{"design", name},
                           {"coherence_error", io::number(report.coherence_error)},
                           {"psl_db_max", io::number(psl_max)},
                           {"constraint_residual", io::number(report.constraint_residual)},
                           {"warnings", bank.warnings}});
    }
    out.object("summary.json", {{"K", cfg.K},
                                {"L", cfg.L()},
                                {"L_f", cfg.resolved_L_f()},
                                {"feasibility",
                                 {{"lower_lhs", feas.lower_lhs},
                                  {"middle", feas.middle},
                                  {"upper_rhs", feas.upper_rhs},
                                  {"on_lower_bound", feas.on_lower_bound()}}},
                                {"designs", summary}});
    if (opt.gnuplot)
        out.text("responses.gp", gnuplot_responses(banks, cfg.K));

    out.commit(base_manifest("design", cfg));
    return {{"command", "design"}, {"designs", summary}, {"elapsed_s", seconds_since(t0)}};
}

json cmd_radar(const Options &opt, const ExperimentConfig &cfg)
{
    const auto t0 = std::chrono::steady_clock::now();
    Outputs out(output_root(opt, cfg, "radar"), io::config_hash(cfg.source));
    const auto alphabet = build_alphabet(cfg);
    const auto samples = alphabet_samples(alphabet);
    const auto banks = make_banks(cfg, alphabet);

    std::ptrdiff_t first = cfg.radar.plot_first_gate, last = cfg.radar.plot_last_gate;
    if (opt.full_map)
        first = last = -1;
    else if (first < 0)
    {
        const auto G = static_cast<std::ptrdiff_t>(cfg.scene.n_range_gates);
        first = std::max<std::ptrdiff_t>(0, G / 2 - 50);
        last = std::min<std::ptrdiff_t>(G - 1, first + 99);
    }

    json scenarios = json::array();
    json seeds = json::array();
    for (std::size_t si = 0; si < cfg.radar.scenarios.size(); ++si)
    {
        const auto &sc = cfg.radar.scenarios[si];
        SceneConfig scfg = cfg.scene;
        scfg.cnr_db = sc.cnr_db;
        scfg.snr_db = sc.snr_db;
        const std::string dir = "scenario_" + sc.name + "/";

        std::vector<std::size_t> full(banks.size(), 0), match_sum(banks.size(), 0);
        for (std::size_t t = 0; t < cfg.radar.trials; ++t)
        {
            const std::uint64_t seed = derive_seed(cfg.master_seed, {si, t});
            seeds.push_back({{"scenario", sc.name}, {"trial", t}, {"seed", seed}});
            const Scene scene = generate_scene(scfg, seed);
            const PulseTrain train = random_pulse_train(scfg.n_pulses, alphabet.size(), derive_seed(seed, {1}));
            const DataMatrix data = simulate_ncpi(scene, samples, train);

            if (t == 0)
            {
                out.object(dir + "scene.json", {{"scene", io::to_json(scene, true)}, {"pulse_train", io::to_json(train)}});
                if (cfg.radar.export_data)
                {
                    out.binary(dir + "data_matrix.bin", io::datamatrix_binary(data, out.hash()));
                    out.object(dir + "data_matrix.json",
                               io::datamatrix_header(data, out.hash(), std::to_string(scene.noise_seed)));
                }
            }

            for (std::size_t b = 0; b < banks.size(); ++b)
            {
                const auto &bank = banks[b];
                const auto filtered = apply_filterbank(data, bank, train, cfg.chain.mode.value_or(default_apply_mode(bank)));
                const auto map = range_doppler_map(filtered, cfg.chain.window);
                auto det = detect_targets(map, cfg.chain.detection.clutter_exclusion, cfg.chain.detection.threshold_db);
                match_truth(det, map, scfg.targets, cfg.chain.detection.doppler_tolerance_bins);
                match_sum[b] += det.truth_matches;
                if (det.truth_matches == scfg.targets.size())
                    ++full[b];
                if (t == 0)
                {
                    const auto name = to_string(bank.design);
                    out.text(dir + "map_" + name + ".csv", io::rdmap_csv(map, out.hash(), first, last));
                    out.text(dir + "detections_" + name + ".csv", io::detections_csv(det, out.hash()));
                    out.object(dir + "detections_" + name + ".json", io::to_json(det));
                    if (b == 0)
                        out.object(dir + "map_axes.json", io::rdmap_axes_json(map));
                    if (opt.gnuplot)
                        out.text(dir + "map_" + name + ".gp",
                                 gnuplot_map("map_" + name + ".csv", sc.name + " " + name));
                }
            }
        }

        json per = json::array();
        for (std::size_t b = 0; b < banks.size(); ++b)
        {
            const double n = static_cast<double>(cfg.radar.trials);
            per.push_back({{"design", to_string(banks[b].design)},
                           {"trials_all_detected", full[b]},
                           {"fraction_all_detected", static_cast<double>(full[b]) / n},
                           {"mean_targets_detected", static_cast<double>(match_sum[b]) / n}});
            log("scenario " + sc.name + " " + to_string(banks[b].design) + ": all " +
                std::to_string(scfg.targets.size()) + " targets in " + std::to_string(full[b]) + "/" +
                std::to_string(cfg.radar.trials) + " trials");
        }
        scenarios.push_back({{"name", sc.name},
                             {"cnr_db", io::number(sc.cnr_db)},
                             {"snr_db", io::number(sc.snr_db)},
                             {"n_targets", scfg.targets.size()},
                             {"trials", cfg.radar.trials},
                             {"designs", per}});
    }

    out.object("summary.json", {{"window", to_string(cfg.chain.window)},
                                {"threshold_db", cfg.chain.detection.threshold_db},
                                {"plot_gates", {first, last}},
                                {"scenarios", scenarios}});
    auto manifest = base_manifest("radar", cfg);
    manifest["trial_seeds"] = seeds;
    out.commit(manifest);
    return {{"command", "radar"}, {"scenarios", scenarios}, {"elapsed_s", seconds_since(t0)}};
}

json curves_summary(const std::vector<FilterBank> &banks, const std::vector<std::vector<CurvePoint>> &curves)
{
    json j = json::array();
    for (std::size_t b = 0; b < banks.size(); ++b)
    {
        json pts = json::array();
        for (const auto &p : curves[b])
            pts.push_back(io::to_json(p));
        j.push_back({{"design", to_string(banks[b].design)}, {"points", pts}});
    }
    return j;
}

json cmd_pd(const Options &opt, const ExperimentConfig &cfg)
{
    const auto t0 = std::chrono::steady_clock::now();
    Outputs out(output_root(opt, cfg, "pd"), io::config_hash(cfg.source));
    const auto alphabet = build_alphabet(cfg);
    const auto samples = alphabet_samples(alphabet);
    const auto banks = make_banks(cfg, alphabet);

    SceneConfig tmpl = cfg.scene;
    tmpl.cnr_db = cfg.pd.cnr_db;
    tmpl.targets = cfg.pd.targets;
    RadarChainOptions chain = cfg.chain;
    chain.threads = cfg.threads;
    const std::uint64_t seed = derive_seed(cfg.master_seed, {0x7064}); // "pd"
    const auto curves = estimate_pd(banks, samples, cfg.pd.snr_grid, cfg.pd.trials, tmpl, seed, chain);

    for (std::size_t b = 0; b < banks.size(); ++b)
        out.text("pd_" + to_string(banks[b].design) + ".csv", io::curve_csv(curves[b], out.hash()));
    const auto summary = curves_summary(banks, curves);
    out.object("pd.json", {{"trials_per_point", cfg.pd.trials},
                           {"cnr_db", io::number(cfg.pd.cnr_db)},
                           {"seed", seed},
                           {"curves", summary}});
    if (opt.gnuplot)
        out.text("pd.gp", gnuplot_curves(banks, "pd_", "Pd", false));
    auto manifest = base_manifest("pd", cfg);
    manifest["seeds"]["pd"] = seed;
    out.commit(manifest);
    return {{"command", "pd"}, {"curves", summary}, {"elapsed_s", seconds_since(t0)}};
}

json cmd_ser(const Options &opt, const ExperimentConfig &cfg)
{
    const auto t0 = std::chrono::steady_clock::now();
    Outputs out(output_root(opt, cfg, "ser"), io::config_hash(cfg.source));
    const auto alphabet = build_alphabet(cfg);
    const auto samples = alphabet_samples(alphabet);
    const auto banks = make_banks(cfg, alphabet);

    std::vector<double> grid = cfg.ser.snr_grid;
    if (cfg.ser.include_noiseless)
        grid.push_back(std::numeric_limits<double>::infinity());
    SerOptions sopt;
    sopt.path_gain = cfg.ser.path_gain;
    sopt.doppler_hz = cfg.ser.doppler_hz;
    sopt.threads = cfg.threads;
    sopt.mode = cfg.chain.mode;
    const std::uint64_t seed = derive_seed(cfg.master_seed, {0x736572}); // "ser"
    const auto curves =
        simulate_ser(samples, banks, cfg.modulation.sample_rate, grid, cfg.ser.trials, seed, sopt);

    json levels = json::array();
    for (std::size_t b = 0; b < banks.size(); ++b)
    {
        out.text("ser_" + to_string(banks[b].design) + ".csv", io::curve_csv(curves[b], out.hash()));
        const auto at = snr_at_level(curves[b], 1e-2);
        levels.push_back({{"design", to_string(banks[b].design)}, {"snr_at_ser_1e-2", at ? json(*at) : json(nullptr)}});
    }
    const auto summary = curves_summary(banks, curves);
    out.object("ser.json", {{"trials_per_point", cfg.ser.trials},
                            {"seed", seed},
                            {"snr_at_level", levels},
                            {"curves", summary}});
    if (opt.gnuplot)
        out.text("ser.gp", gnuplot_curves(banks, "ser_", "SER", true));
    auto manifest = base_manifest("ser", cfg);
    manifest["seeds"]["ser"] = seed;
    out.commit(manifest);
    return {{"command", "ser"}, {"snr_at_level", levels}, {"elapsed_s", seconds_since(t0)}};
}

int cmd_selftest(const Options &opt)
{
    const auto rep = run_oracle_selftest(opt.instances, opt.selftest_seed);
    std::size_t failed = 0, trivial = 0;
    for (const auto &c : rep.cases)
    {
        failed += c.passed ? 0 : 1;
        trivial += c.trivial ? 1 : 0;
    }
    json j{{"command", "selftest"},
           {"instances", rep.cases.size()},
           {"failed", failed},
           {"empty_nullspace", trivial},
           {"max_rel_error", rep.max_rel_error},
           {"tolerance", rep.tolerance},
           {"elapsed_s", rep.elapsed_s},
           {"passed", rep.passed()}};
    std::cout << j.dump(2) << "\n";
    return rep.passed() ? 0 : 1;
}

int report_error(const std::exception &e, int code)
{
    json j{{"status", "error"}, {"exit_code", code}, {"message", e.what()}};
    if (const auto *d = dynamic_cast<const Error *>(&e))
        j["kind"] = d->kind();
    else
        j["kind"] = "runtime-error";
    if (const auto *d = dynamic_cast<const DimensionError *>(&e))
        j["bound"] = d->bound();
    if (const auto *c = dynamic_cast<const ConditioningError *>(&e))
        j["condition"] = io::number(c->condition());
    std::cerr << j.dump() << "\n";
    return code;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"DFRC receive filter design and simulation"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    Options opt;

    auto add_common = [&](CLI::App *sub) {
        sub->add_option("config,-c,--config", opt.config_path, "JSON experiment config")->required()->check(CLI::ExistingFile);
        sub->add_option("-o,--output", opt.output, "output root (overrides DFRC_OUTPUT_ROOT and the config)");
        sub->add_flag("--gnuplot", opt.gnuplot, "also write gnuplot scripts");
        sub->add_flag("-q,--quiet", opt.quiet, "no progress log on stderr");
    };
    auto *design = app.add_subcommand("design", "design filter banks and write taps, responses and metrics");
    add_common(design);
    design->add_flag("--dump-system", opt.dump_system, "write the assembled block matrices as CSV");
    auto *radar = app.add_subcommand("radar", "simulate radar scenarios and write range-Doppler maps");
    add_common(radar);
    radar->add_flag("--full-map", opt.full_map, "write every gate of the map CSV");
    auto *pd = app.add_subcommand("pd", "probability of detection curves");
    add_common(pd);
    auto *ser = app.add_subcommand("ser", "symbol error rate curves");
    add_common(ser);
    auto *self = app.add_subcommand("selftest", "closed form vs nullspace oracle on random instances");
    self->add_option("--instances", opt.instances, "number of random instances")->check(CLI::PositiveNumber);
    self->add_option("--seed", opt.selftest_seed, "instance seed");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::CallForVersion &e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError &e)
    {
        return report_error(std::runtime_error(e.what()), 2);
    }
    g_quiet = opt.quiet;

    try
    {
        if (*self)
            return cmd_selftest(opt);

        ExperimentConfig cfg;
        try
        {
            cfg = load_config(opt.config_path);
        }
        catch (const Error &e)
        {
            return report_error(e, 2);
        }
        catch (const nlohmann::json::exception &e)
        {
            return report_error(InvalidArgument(std::string("config: ") + e.what()), 2);
        }

        json result;
        if (*design)
            result = cmd_design(opt, cfg);
        else if (*radar)
            result = cmd_radar(opt, cfg);
        else if (*pd)
            result = cmd_pd(opt, cfg);
        else
            result = cmd_ser(opt, cfg);
        result["status"] = "ok";
        result["config_hash"] = io::config_hash(cfg.source);
        std::cout << result.dump(2) << "\n";
        return 0;
    }
    catch (const DimensionError &e)
    {
        return report_error(e, 2);
    }
    catch (const InvalidArgument &e)
    {
        return report_error(e, 2);
    }
    catch (const std::exception &e)
    {
        return report_error(e, 1);
    }
}
