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

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "dfrc/filterdesign.hpp"
#include "dfrc/processing.hpp"
#include "dfrc/radarsim.hpp"
#include "dfrc/waveform.hpp"

namespace dfrc
{

struct PenalizedConfig
{
    double mu = 10.0;
    std::size_t iters = 50;
};

struct RadarScenario
{
    std::string name;
    double cnr_db = 50.0;
    double snr_db = 10.0;
};

struct RadarConfig
{
    std::vector<RadarScenario> scenarios; // default: A (CNR 50) and B (CNR 70), SNR 10
    std::size_t trials = 1;
    bool export_data = true;
    std::ptrdiff_t plot_first_gate = -1; // -1: central 100 gates
    std::ptrdiff_t plot_last_gate = -1;
};

struct PdConfig
{
    std::vector<double> snr_grid;
    std::size_t trials = 500;
    double cnr_db = 50.0;
    std::vector<TargetSpec> targets; // default: one target at the central gate, nu = 0.3
};

struct SerConfig
{
    std::vector<double> snr_grid;
    std::size_t trials = 10000;
    bool include_noiseless = true;
    cd path_gain{1.0, 0.0};
    double doppler_hz = 0.0;
};

/// Everything one CLI run needs; parsed from a JSON document.
struct ExperimentConfig
{
    Modulation kind = Modulation::dpsk;
    ModulationParams modulation;
    std::size_t K = 4;
    std::uint64_t alphabet_seed = 1;
    std::optional<std::size_t> L_f;
    std::optional<std::size_t> peak_index;
    std::vector<DesignKind> designs;
    PenalizedConfig penalized;
    SceneConfig scene;
    RadarChainOptions chain;
    RadarConfig radar;
    PdConfig pd;
    SerConfig ser;
    std::uint64_t master_seed = 2024;
    std::size_t threads = 1;
    std::string output_dir = "dfrc_out";
    nlohmann::json source; // the document as given

    std::size_t L() const { return modulation.n_samples(); }
    std::size_t resolved_L_f() const { return L_f.value_or(default_filter_length(K, L())); }
};

/// Parses and validates; unknown keys, wrong types and violated module
/// preconditions raise InvalidArgument (or DimensionError for L_f).
ExperimentConfig parse_config(const nlohmann::json &doc);
ExperimentConfig load_config(const std::string &path);

/// Schema description (key -> type, default, meaning) for documentation.
nlohmann::json config_schema();

} // namespace dfrc
