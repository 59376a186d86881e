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

#include "dfrc/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace dfrc
{

namespace
{

using json = nlohmann::json;

/// Reads keys of one JSON object and rejects any key it was not asked about.
class Section
{
public:
    Section(const json &j, std::string path) : j_(j), path_(std::move(path))
    {
        if (!j_.is_object())
            throw InvalidArgument("config: '" + path_ + "' must be an object");
    }

    bool has(const std::string &key)
    {
        known_.insert(key);
        return j_.contains(key) && !j_.at(key).is_null();
    }

    const json &raw(const std::string &key)
    {
        known_.insert(key);
        return j_.at(key);
    }

    std::string where(const std::string &key) const { return path_.empty() ? key : path_ + "." + key; }

    double number(const std::string &key, double def)
    {
        if (!has(key))
            return def;
        const auto &v = j_.at(key);
        if (v.is_string())
        {
            const auto s = v.get<std::string>();
            if (s == "-inf")
                return -std::numeric_limits<double>::infinity();
            if (s == "inf" || s == "+inf")
                return std::numeric_limits<double>::infinity();
        }
        if (!v.is_number())
            throw InvalidArgument("config: '" + where(key) + "' must be a number");
        return v.get<double>();
    }

    std::uint64_t unsigned_int(const std::string &key, std::uint64_t def)
    {
        if (!has(key))
            return def;
        const auto &v = j_.at(key);
        if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0))
            throw InvalidArgument("config: '" + where(key) + "' must be a non-negative integer");
        return v.get<std::uint64_t>();
    }

    bool boolean(const std::string &key, bool def)
    {
        if (!has(key))
            return def;
        if (!j_.at(key).is_boolean())
            throw InvalidArgument("config: '" + where(key) + "' must be true or false");
        return j_.at(key).get<bool>();
    }

    std::string string(const std::string &key, const std::string &def)
    {
        if (!has(key))
            return def;
        if (!j_.at(key).is_string())
            throw InvalidArgument("config: '" + where(key) + "' must be a string");
        return j_.at(key).get<std::string>();
    }

    std::vector<double> numbers(const std::string &key, std::vector<double> def)
    {
        if (!has(key))
            return def;
        const auto &v = j_.at(key);
        if (!v.is_array())
            throw InvalidArgument("config: '" + where(key) + "' must be an array of numbers");
        std::vector<double> out;
        for (const auto &x : v)
        {
            if (x.is_string() && (x == "inf" || x == "+inf"))
                out.push_back(std::numeric_limits<double>::infinity());
            else if (x.is_number())
                out.push_back(x.get<double>());
            else
                throw InvalidArgument("config: '" + where(key) + "' must be an array of numbers");
        }
        return out;
    }

    /// Throws on keys that were never queried.
    void finish() const
    {
        for (const auto &[k, v] : j_.items())
            if (!known_.count(k))
                throw InvalidArgument("config: unknown key '" + where(k) + "'");
    }

private:
    const json &j_;
    std::string path_;
    std::set<std::string> known_;
};

std::vector<TargetSpec> parse_targets(const json &arr, const std::string &path)
{
    if (!arr.is_array())
        throw InvalidArgument("config: '" + path + "' must be an array of targets");
    std::vector<TargetSpec> out;
    for (std::size_t i = 0; i < arr.size(); ++i)
    {
        Section t(arr[i], path + "[" + std::to_string(i) + "]");
        if (!t.has("range_cell") || !t.has("normalized_doppler"))
            throw InvalidArgument("config: '" + path + "[" + std::to_string(i) +
                                  "]' needs range_cell and normalized_doppler");
        TargetSpec s;
        s.range_cell = t.unsigned_int("range_cell", 0);
        s.normalized_doppler = t.number("normalized_doppler", 0.0);
        if (t.has("snr_db"))
            s.snr_db = t.number("snr_db", 0.0);
        t.finish();
        out.push_back(s);
    }
    return out;
}

std::vector<double> default_grid(double lo, double hi, double step)
{
    std::vector<double> g;
    for (double x = lo; x <= hi + 1e-9; x += step)
        g.push_back(x);
    return g;
}

} // namespace

ExperimentConfig parse_config(const json &doc)
{
    ExperimentConfig c;
    c.source = doc;
    Section top(doc, "");

    // modulation
    {
        json empty = json::object();
        Section m(top.has("modulation") ? top.raw("modulation") : empty, "modulation");
        c.kind = modulation_from_string(m.string("kind", "dpsk"));
        const auto n_chips = m.unsigned_int("n_chips", 30);
        const double chip = m.number("chip_duration", 1e-3);
        const double fs = m.number("sample_rate", 3000.0);
        const double fc = m.number("carrier_freq", 0.0);
        m.finish();
        c.modulation = ModulationParams::make(n_chips, chip, fs, fc);
        c.modulation.validate();
    }

    c.K = top.unsigned_int("K", 4);
    if (c.K == 0 || (c.K & (c.K - 1)) != 0)
        throw InvalidArgument("config: K must be a power of two (got " + std::to_string(c.K) + ")");
    c.alphabet_seed = top.unsigned_int("alphabet_seed", 1);
    if (top.has("L_f"))
    {
        c.L_f = top.unsigned_int("L_f", 0);
        if (*c.L_f == 0)
            throw InvalidArgument("config: L_f must be >= 1");
    }
    if (top.has("peak_index"))
        c.peak_index = top.unsigned_int("peak_index", 0);

    if (top.has("designs"))
    {
        const auto &d = top.raw("designs");
        if (!d.is_array() || d.empty())
            throw InvalidArgument("config: 'designs' must be a non-empty array of design names");
        for (const auto &x : d)
        {
            if (!x.is_string())
                throw InvalidArgument("config: 'designs' entries must be strings");
            c.designs.push_back(design_kind_from_string(x.get<std::string>()));
        }
    }
    else
        c.designs = {DesignKind::coherent_linear, DesignKind::coherent_circular, DesignKind::baseline_ls};

    if (top.has("penalized"))
    {
        Section p(top.raw("penalized"), "penalized");
        c.penalized.mu = p.number("mu", c.penalized.mu);
        c.penalized.iters = p.unsigned_int("iters", c.penalized.iters);
        p.finish();
        if (!(c.penalized.mu >= 0.0) || !std::isfinite(c.penalized.mu) || c.penalized.iters == 0)
            throw InvalidArgument("config: penalized needs mu >= 0 and iters >= 1");
    }

    // scene
    c.scene = SceneConfig::six_target();
    c.scene.sample_rate = c.modulation.sample_rate;
    if (top.has("scene"))
    {
        Section s(top.raw("scene"), "scene");
        c.scene.n_range_gates = s.unsigned_int("n_range_gates", c.scene.n_range_gates);
        c.scene.n_pulses = s.unsigned_int("n_pulses", c.scene.n_pulses);
        c.scene.t_pri = s.number("t_pri", c.scene.t_pri);
        c.scene.wavelength = s.number("wavelength", c.scene.wavelength);
        c.scene.gate_spacing = s.number("gate_spacing", c.scene.gate_spacing);
        c.scene.cnr_db = s.number("cnr_db", c.scene.cnr_db);
        c.scene.snr_db = s.number("snr_db", c.scene.snr_db);
        c.scene.clutter_doppler_max = s.number("clutter_doppler_max", c.scene.clutter_doppler_max);
        c.scene.noise_variance = s.number("noise_variance", c.scene.noise_variance);
        if (s.has("targets"))
            c.scene.targets = parse_targets(s.raw("targets"), "scene.targets");
        s.finish();
    }
    c.scene.validate();

    // processing chain
    if (top.has("processing"))
    {
        Section p(top.raw("processing"), "processing");
        c.chain.window = doppler_window_from_string(p.string("window", to_string(c.chain.window)));
        if (p.has("mode"))
            c.chain.mode = flavor_from_string(p.string("mode", "linear"));
        c.chain.detection.threshold_db = p.number("threshold_db", c.chain.detection.threshold_db);
        c.chain.detection.clutter_exclusion = p.number("clutter_exclusion", c.chain.detection.clutter_exclusion);
        c.chain.detection.doppler_tolerance_bins =
            p.number("doppler_tolerance_bins", c.chain.detection.doppler_tolerance_bins);
        p.finish();
        if (!std::isfinite(c.chain.detection.threshold_db))
            throw InvalidArgument("config: processing.threshold_db must be finite");
    }

    // radar
    c.radar.scenarios = {{"A", 50.0, 10.0}, {"B", 70.0, 10.0}};
    if (top.has("radar"))
    {
        Section r(top.raw("radar"), "radar");
        if (r.has("scenarios"))
        {
            const auto &arr = r.raw("scenarios");
            if (!arr.is_array() || arr.empty())
                throw InvalidArgument("config: 'radar.scenarios' must be a non-empty array");
            c.radar.scenarios.clear();
            for (std::size_t i = 0; i < arr.size(); ++i)
            {
                Section s(arr[i], "radar.scenarios[" + std::to_string(i) + "]");
                RadarScenario sc;
                sc.name = s.string("name", "S" + std::to_string(i));
                sc.cnr_db = s.number("cnr_db", c.scene.cnr_db);
                sc.snr_db = s.number("snr_db", c.scene.snr_db);
                s.finish();
                c.radar.scenarios.push_back(sc);
            }
        }
        c.radar.trials = r.unsigned_int("trials", c.radar.trials);
        c.radar.export_data = r.boolean("export_data", c.radar.export_data);
        if (r.has("plot_gates"))
        {
            const auto g = r.numbers("plot_gates", {});
            if (g.size() != 2 || g[0] < 0 || g[1] < g[0])
                throw InvalidArgument("config: 'radar.plot_gates' must be [first, last]");
            c.radar.plot_first_gate = static_cast<std::ptrdiff_t>(g[0]);
            c.radar.plot_last_gate = static_cast<std::ptrdiff_t>(g[1]);
        }
        r.finish();
        if (c.radar.trials == 0)
            throw InvalidArgument("config: radar.trials must be >= 1");
    }
    for (const auto &sc : c.radar.scenarios)
    {
        SceneConfig s = c.scene;
        s.cnr_db = sc.cnr_db;
        s.snr_db = sc.snr_db;
        s.validate();
    }

    // pd
    c.pd.snr_grid = default_grid(-15.0, 0.0, 3.0);
    c.pd.targets = {{c.scene.n_range_gates / 2, 0.3, {}}};
    if (top.has("pd"))
    {
        Section p(top.raw("pd"), "pd");
        c.pd.snr_grid = p.numbers("snr_grid", c.pd.snr_grid);
        c.pd.trials = p.unsigned_int("trials", c.pd.trials);
        c.pd.cnr_db = p.number("cnr_db", c.pd.cnr_db);
        if (p.has("targets"))
            c.pd.targets = parse_targets(p.raw("targets"), "pd.targets");
        p.finish();
    }
    if (c.pd.trials == 0 || c.pd.snr_grid.empty() || c.pd.targets.empty())
        throw InvalidArgument("config: pd needs trials >= 1, a non-empty snr_grid and at least one target");
    {
        SceneConfig s = c.scene;
        s.cnr_db = c.pd.cnr_db;
        s.targets = c.pd.targets;
        s.validate();
    }

    // ser
    c.ser.snr_grid = default_grid(-4.0, 12.0, 2.0);
    if (top.has("ser"))
    {
        Section s(top.raw("ser"), "ser");
        c.ser.snr_grid = s.numbers("snr_grid", c.ser.snr_grid);
        c.ser.trials = s.unsigned_int("trials", c.ser.trials);
        c.ser.include_noiseless = s.boolean("include_noiseless", c.ser.include_noiseless);
        if (s.has("path_gain"))
        {
            const auto g = s.numbers("path_gain", {});
            if (g.size() != 2)
                throw InvalidArgument("config: 'ser.path_gain' must be [real, imag]");
            c.ser.path_gain = {g[0], g[1]};
        }
        c.ser.doppler_hz = s.number("doppler_hz", c.ser.doppler_hz);
        s.finish();
    }
    if (c.ser.trials == 0 || c.ser.snr_grid.empty())
        throw InvalidArgument("config: ser needs trials >= 1 and a non-empty snr_grid");

    if (top.has("seeds"))
    {
        Section s(top.raw("seeds"), "seeds");
        c.master_seed = s.unsigned_int("master", c.master_seed);
        s.finish();
    }
    c.threads = top.unsigned_int("threads", c.threads);
    if (c.threads == 0)
        throw InvalidArgument("config: threads must be >= 1");
    c.output_dir = top.string("output_dir", c.output_dir);
    top.finish();

    // Cross-module preconditions, checked before any compute.
    const std::size_t L = c.L();
    const std::size_t L_f = c.resolved_L_f();
    const std::size_t n = L + L_f - 1;
    if (c.peak_index && *c.peak_index >= n)
        throw InvalidArgument("config: peak_index " + std::to_string(*c.peak_index) + " outside [0, " +
                              std::to_string(n) + ")");
    for (auto d : c.designs)
        if (d == DesignKind::coherent_linear)
        {
            const auto f = check_feasibility(c.K, L, L_f);
            if (!f.feasible)
                throw DimensionError("infeasible dimensions: " + f.violated, f.violated);
        }
    if (c.chain.mode == Flavor::circular)
        for (auto d : c.designs)
            if (d != DesignKind::coherent_circular)
                throw InvalidArgument("config: processing.mode = circular needs circular banks only (got " +
                                      to_string(d) + ")");
    return c;
}

ExperimentConfig load_config(const std::string &path)
{
    std::ifstream is(path);
    if (!is)
        throw InvalidArgument("config: cannot open '" + path + "'");
    json doc;
    try
    {
        doc = json::parse(is, nullptr, true, /*ignore_comments=*/true);
    }
    catch (const json::parse_error &e)
    {
        throw InvalidArgument("config: '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_config(doc);
}

json config_schema()
{
    return {
        {"modulation", {{"kind", "dpsk | msk (dpsk)"},
                        {"n_chips", "int (30)"},
                        {"chip_duration", "seconds (0.001)"},
                        {"sample_rate", "Hz (3000)"},
                        {"carrier_freq", "Hz, passband utilities only (0)"}}},
        {"K", "alphabet size, power of two (4)"},
        {"alphabet_seed", "chip sequence seed (1)"},
        {"L_f", "filter length (K (L-1))"},
        {"peak_index", "desired response peak (floor((L+L_f-1)/2))"},
        {"designs", "subset of coherent-linear, coherent-circular, baseline-LS, baseline-penalized"},
        {"penalized", {{"mu", "penalty weight (10)"}, {"iters", "sweeps (50)"}}},
        {"scene", {{"n_range_gates", "450"},
                   {"n_pulses", "M (50)"},
                   {"t_pri", "seconds (0.2)"},
                   {"wavelength", "meters (0.3)"},
                   {"gate_spacing", "meters (0: c / (2 sample_rate))"},
                   {"cnr_db", "dB or \"-inf\" (50)"},
                   {"snr_db", "dB (10)"},
                   {"clutter_doppler_max", "cycles per pulse (0.1)"},
                   {"noise_variance", "(1; 0 disables noise)"},
                   {"targets", "[{range_cell, normalized_doppler, snr_db?}] (six default targets)"}}},
        {"processing", {{"window", "blackman-harris | rectangular (blackman-harris)"},
                        {"mode", "linear | circular (per bank flavor)"},
                        {"threshold_db", "over map median (10)"},
                        {"clutter_exclusion", "|nu| ignored up to (0.1)"},
                        {"doppler_tolerance_bins", "truth match tolerance (0.5)"}}},
        {"radar", {{"scenarios", "[{name, cnr_db, snr_db}] (A: 50/10, B: 70/10)"},
                   {"trials", "seeded repetitions per scenario (1)"},
                   {"export_data", "write the raw data matrix (true)"},
                   {"plot_gates", "[first, last] gates in map CSV (central 100)"}}},
        {"pd", {{"snr_grid", "dB list (-15..0 step 3)"},
                {"trials", "per point (500)"},
                {"cnr_db", "(50)"},
                {"targets", "(one target at the central gate, nu 0.3)"}}},
        {"ser", {{"snr_grid", "dB list (-4..12 step 2)"},
                 {"trials", "per point (10000)"},
                 {"include_noiseless", "append an SNR = inf point (true)"},
                 {"path_gain", "[re, im] ([1, 0])"},
                 {"doppler_hz", "(0)"}}},
        {"seeds", {{"master", "Monte Carlo master seed (2024)"}}},
        {"threads", "worker threads for Monte Carlo (1)"},
        {"output_dir", "output root, overridden by DFRC_OUTPUT_ROOT and --output (dfrc_out)"}};
}

} // namespace dfrc
