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
#include <span>
#include <string>

#include "dfrc/types.hpp"
#include "dfrc/waveform.hpp"

namespace dfrc
{

/// (L + L_f - 1) x L_f Toeplitz matrix: entry(r, c) = x(r - c) for 0 <= r - c < L.
struct LinearConvMatrix
{
    CMatrix entries;
    std::size_t source = 0;
    std::size_t L = 0;
    std::size_t L_f = 0;
};

/// Order (L + L_f - 1) circulant whose first column is the zero padded waveform.
struct CircularConvMatrix
{
    CMatrix entries;
    std::size_t source = 0;
    std::size_t L = 0;
    std::size_t L_f = 0;
};

/// Stacked objective X h = e and coherency constraint Xtil h = 0.
///
/// X = blockdiag(Psi_1 .. Psi_K); Xtil has K-1 block rows [.. Psi_k, -Psi_{k+1} ..];
/// e stacks K copies of the unit impulse at peak_index.
struct BlockSystem
{
    CMatrix X;
    CMatrix Xtil;
    CVector e;
    Flavor flavor = Flavor::linear;
    std::size_t K = 0;
    std::size_t L = 0;
    std::size_t L_f = 0;
    std::size_t peak_index = 0;

    /// Rows of one block: L + L_f - 1 for both flavors.
    std::size_t block_rows() const { return L + L_f - 1; }
    /// Columns of one block: L_f (linear) or L + L_f - 1 (circular).
    std::size_t block_cols() const { return flavor == Flavor::linear ? L_f : L + L_f - 1; }
};

struct Feasibility
{
    bool feasible = true;
    std::size_t lower_lhs = 0; // (K-1)(L+L_f-1)
    std::size_t middle = 0;    // K L_f
    std::size_t upper_rhs = 0; // K (L+L_f-1)
    std::string violated;      // empty when feasible

    /// True when the lower bound holds with equality (K >= 2).
    bool on_lower_bound() const { return feasible && lower_lhs == middle && lower_lhs != 0; }
};

LinearConvMatrix build_linear_conv(std::span<const cd> waveform, std::size_t L_f, std::size_t source = 0);
inline LinearConvMatrix build_linear_conv(const BasebandWaveform &wf, std::size_t L_f, std::size_t source = 0)
{
    return build_linear_conv(wf.view(), L_f, source);
}

CircularConvMatrix build_circular_conv(std::span<const cd> waveform, std::size_t L_f, std::size_t source = 0);
inline CircularConvMatrix build_circular_conv(const BasebandWaveform &wf, std::size_t L_f, std::size_t source = 0)
{
    return build_circular_conv(wf.view(), L_f, source);
}

/// (K-1)(L+L_f-1) <= K L_f <= K(L+L_f-1); the lower bound is skipped for K = 1.
Feasibility check_feasibility(std::size_t K, std::size_t L, std::size_t L_f);

/// floor((L + L_f - 1) / 2).
std::size_t default_peak_index(std::size_t L, std::size_t L_f);

/// K (L - 1), the default filter length (at least 1).
std::size_t default_filter_length(std::size_t K, std::size_t L);

BlockSystem assemble_block_system(const WaveformAlphabet &alphabet, std::size_t L_f,
                                  std::optional<std::size_t> peak_index, Flavor flavor);

/// Same, from raw waveforms (all of equal length).
BlockSystem assemble_block_system(std::span<const std::vector<cd>> waveforms, std::size_t L_f,
                                  std::optional<std::size_t> peak_index, Flavor flavor);

} // namespace dfrc
