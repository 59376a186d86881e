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

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "dfrc/convmat.hpp"
#include "dfrc/filterdesign.hpp"
#include "dfrc/processing.hpp"
#include "dfrc/radarsim.hpp"
#include "dfrc/waveform.hpp"

namespace dfrc::io
{

using json = nlohmann::json;

/// 16 hex digits of FNV-1a over the compact, key-sorted JSON text.
std::string config_hash(const json &config);

/// Writes to a sibling temporary file and renames it over `path`, so readers
/// never observe a partial file. Parent directories are created.
void atomic_write(const std::filesystem::path &path, const std::string &content);
void atomic_write(const std::filesystem::path &path, const std::vector<char> &content);

/// Non-finite doubles become null (JSON has no inf / NaN).
json number(double v);

// ---- JSON views -----------------------------------------------------------

json to_json(const ModulationParams &p);
json to_json(const BasebandWaveform &wf);
json to_json(const FilterBank &bank);
json to_json(const DesignReport &rep);
json to_json(const Scene &scene, bool include_scatterers = false);
json to_json(const PulseTrain &train);
json to_json(const DetectionResult &det);
json to_json(const CurvePoint &p);

// ---- CSV ------------------------------------------------------------------

/// Every CSV starts with a "# config_hash: <hash>" comment line.
std::string waveform_csv(const BasebandWaveform &wf, const std::string &hash);
/// index, then real_k, imag_k for each filter.
std::string filterbank_csv(const FilterBank &bank, const std::string &hash);
/// gate, then one magnitude column per Doppler bin (header carries nu).
std::string rdmap_csv(const RangeDopplerMap &map, const std::string &hash, std::ptrdiff_t first_gate = -1,
                      std::ptrdiff_t last_gate = -1);
json rdmap_axes_json(const RangeDopplerMap &map);
/// x, y, ci_lo, ci_hi, trials, hits.
std::string curve_csv(const std::vector<CurvePoint> &curve, const std::string &hash);
std::string detections_csv(const DetectionResult &det, const std::string &hash);
/// row, col, real, imag (small matrices only).
std::string matrix_csv(const CMatrix &m, const std::string &hash);

// ---- binary DataMatrix ----------------------------------------------------

/// Header: magic "DFRCDM01", u64 rows, u64 cols, i64 gate_offset, 16 hash
/// bytes; then column-major interleaved (re, im) little-endian doubles.
std::vector<char> datamatrix_binary(const DataMatrix &d, const std::string &hash);
DataMatrix read_datamatrix_binary(const std::vector<char> &bytes, std::string *hash = nullptr);
json datamatrix_header(const DataMatrix &d, const std::string &hash, const std::string &scene_digest);
std::string datamatrix_csv(const DataMatrix &d, const std::string &hash);

/// Debug dump of a block system: X and Xtil as CSV plus a JSON sidecar.
json block_system_sidecar(const BlockSystem &sys, const std::string &hash);

} // namespace dfrc::io
