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

#include "dfrc/convmat.hpp"

#include <algorithm>

namespace dfrc
{

std::string to_string(Flavor f) { return f == Flavor::linear ? "linear" : "circular"; }

Flavor flavor_from_string(const std::string &s)
{
    if (s == "linear")
        return Flavor::linear;
    if (s == "circular")
        return Flavor::circular;
    throw InvalidArgument("unknown flavor '" + s + "' (expected linear or circular)");
}

LinearConvMatrix build_linear_conv(std::span<const cd> waveform, std::size_t L_f, std::size_t source)
{
    if (L_f == 0)
        throw InvalidArgument("build_linear_conv: L_f must be >= 1");
    if (waveform.empty())
        throw InvalidArgument("build_linear_conv: empty waveform");
    const auto L = static_cast<Eigen::Index>(waveform.size());
    const auto cols = static_cast<Eigen::Index>(L_f);

    LinearConvMatrix m;
    m.source = source;
    m.L = waveform.size();
    m.L_f = L_f;
    m.entries = CMatrix::Zero(L + cols - 1, cols);
    const Eigen::Map<const CVector> x(waveform.data(), L);
    for (Eigen::Index c = 0; c < cols; ++c)
        m.entries.col(c).segment(c, L) = x;
    return m;
}

CircularConvMatrix build_circular_conv(std::span<const cd> waveform, std::size_t L_f, std::size_t source)
{
    if (L_f == 0)
        throw InvalidArgument("build_circular_conv: L_f must be >= 1");
    if (waveform.empty())
        throw InvalidArgument("build_circular_conv: empty waveform");
    const std::size_t n = waveform.size() + L_f - 1;

    CircularConvMatrix m;
    m.source = source;
    m.L = waveform.size();
    m.L_f = L_f;
    m.entries = CMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t c = 0; c < n; ++c)
        for (std::size_t i = 0; i < waveform.size(); ++i)
            m.entries(static_cast<Eigen::Index>((c + i) % n), static_cast<Eigen::Index>(c)) = waveform[i];
    return m;
}

Feasibility check_feasibility(std::size_t K, std::size_t L, std::size_t L_f)
{
    Feasibility f;
    const std::size_t n = L + L_f - 1;
    f.lower_lhs = K > 0 ? (K - 1) * n : 0;
    f.middle = K * L_f;
    f.upper_rhs = K * n;

    if (K == 0 || L == 0 || L_f == 0)
    {
        f.feasible = false;
        f.violated = "K, L and L_f must all be >= 1";
        return f;
    }
    if (K >= 2 && f.lower_lhs > f.middle)
    {
        f.feasible = false;
        f.violated = "(K-1)(L+L_f-1) = " + std::to_string(f.lower_lhs) + " > K*L_f = " + std::to_string(f.middle);
        return f;
    }
    if (f.middle > f.upper_rhs)
    {
        f.feasible = false;
        f.violated = "K*L_f = " + std::to_string(f.middle) + " > K(L+L_f-1) = " + std::to_string(f.upper_rhs);
    }
    return f;
}

std::size_t default_peak_index(std::size_t L, std::size_t L_f) { return (L + L_f - 1) / 2; }

std::size_t default_filter_length(std::size_t K, std::size_t L)
{
    return std::max<std::size_t>(1, K * (L > 0 ? L - 1 : 0));
}

BlockSystem assemble_block_system(std::span<const std::vector<cd>> waveforms, std::size_t L_f,
                                  std::optional<std::size_t> peak_index, Flavor flavor)
{
    if (waveforms.empty())
        throw InvalidArgument("assemble_block_system: no waveforms");
    if (L_f == 0)
        throw InvalidArgument("assemble_block_system: L_f must be >= 1");
    const std::size_t L = waveforms.front().size();
    for (const auto &w : waveforms)
        if (w.size() != L || L == 0)
            throw InvalidArgument("assemble_block_system: waveforms must share one non-zero length");

    BlockSystem sys;
    sys.K = waveforms.size();
    sys.L = L;
    sys.L_f = L_f;
    sys.flavor = flavor;

    if (flavor == Flavor::linear)
    {
        const auto feas = check_feasibility(sys.K, L, L_f);
        if (!feas.feasible)
            throw DimensionError("infeasible dimensions: " + feas.violated, feas.violated);
    }

    const std::size_t rows = sys.block_rows();
    sys.peak_index = peak_index.value_or(default_peak_index(L, L_f));
    if (sys.peak_index >= rows)
        throw InvalidArgument("assemble_block_system: peak_index " + std::to_string(sys.peak_index) +
                              " outside [0, " + std::to_string(rows) + ")");

    const auto r = static_cast<Eigen::Index>(rows);
    const auto c = static_cast<Eigen::Index>(sys.block_cols());
    const auto K = static_cast<Eigen::Index>(sys.K);

    std::vector<CMatrix> blocks;
    blocks.reserve(sys.K);
    for (std::size_t k = 0; k < sys.K; ++k)
        blocks.push_back(flavor == Flavor::linear ? build_linear_conv(waveforms[k], L_f, k).entries
                                                  : build_circular_conv(waveforms[k], L_f, k).entries);

    sys.X = CMatrix::Zero(K * r, K * c);
    for (Eigen::Index k = 0; k < K; ++k)
        sys.X.block(k * r, k * c, r, c) = blocks[static_cast<std::size_t>(k)];

    sys.Xtil = CMatrix::Zero((K - 1) * r, K * c);
    for (Eigen::Index k = 0; k + 1 < K; ++k)
    {
        sys.Xtil.block(k * r, k * c, r, c) = blocks[static_cast<std::size_t>(k)];
        sys.Xtil.block(k * r, (k + 1) * c, r, c) = -blocks[static_cast<std::size_t>(k + 1)];
    }

    sys.e = CVector::Zero(K * r);
    for (Eigen::Index k = 0; k < K; ++k)
        sys.e(k * r + static_cast<Eigen::Index>(sys.peak_index)) = 1.0;
    return sys;
}

BlockSystem assemble_block_system(const WaveformAlphabet &alphabet, std::size_t L_f,
                                  std::optional<std::size_t> peak_index, Flavor flavor)
{
    alphabet.validate();
    std::vector<std::vector<cd>> raw;
    raw.reserve(alphabet.size());
    for (const auto &w : alphabet.waveforms)
        raw.push_back(w.samples);
    return assemble_block_system(std::span<const std::vector<cd>>(raw), L_f, peak_index, flavor);
}

} // namespace dfrc
