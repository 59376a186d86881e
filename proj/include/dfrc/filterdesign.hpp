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

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "dfrc/convmat.hpp"
#include "dfrc/types.hpp"
#include "dfrc/waveform.hpp"

namespace dfrc
{

enum class DesignKind
{
    coherent_linear,
    coherent_circular,
    baseline_ls,
    baseline_penalized
};

std::string to_string(DesignKind d);
DesignKind design_kind_from_string(const std::string &s);

/// Gram blocks (and circulant spectra) above this condition number are rejected.
inline constexpr double kConditionLimit = 1e12;
/// Relative pivot threshold used to drop linearly dependent constraint rows.
inline constexpr double kRankThreshold = 1e-10;
/// Floor applied to PSL / ISL when the sidelobes vanish.
inline constexpr double kSidelobeFloorDb = -300.0;

/// K receive filters designed against one waveform alphabet.
struct FilterBank
{
    std::vector<CVector> filters;
    Flavor flavor = Flavor::linear;
    DesignKind design = DesignKind::coherent_linear;
    std::size_t peak_index = 0;
    std::size_t L = 0;
    std::size_t L_f = 0;

    double cond_gram = std::numeric_limits<double>::quiet_NaN();
    double cond_D = std::numeric_limits<double>::quiet_NaN();
    std::size_t constraint_rank = 0;
    std::size_t constraint_rows = 0;
    double mu = 0.0;                       // penalized baseline only
    std::vector<double> objective_history; // penalized baseline only
    std::vector<std::string> warnings;
    double elapsed_s = 0.0;

    std::size_t K() const { return filters.size(); }
    std::size_t length() const { return filters.empty() ? 0 : static_cast<std::size_t>(filters.front().size()); }
    /// [h_1; h_2; ...; h_K].
    CVector stacked() const;
};

struct DesignReport
{
    double coherence_error = 0.0;
    std::vector<double> psl_db;
    std::vector<double> isl_db;
    double objective_residual = 0.0;
    double constraint_residual = 0.0;
    double cond_gram = std::numeric_limits<double>::quiet_NaN();
    double cond_D = std::numeric_limits<double>::quiet_NaN();
    double mainlobe = 0.0; // |y_1(peak_index)|
};

/// Result of the closed-form solve on an assembled system.
struct ClosedFormSolution
{
    CVector h; // stacked
    double cond_gram = 0.0;
    double cond_D = 0.0;
    std::size_t constraint_rank = 0;
    std::size_t constraint_rows = 0;
};

/// h = G^-1 X^H e - G^-1 Xtil^H D^-1 Xtil G^-1 X^H e with G = X^H X and
/// D = Xtil G^-1 Xtil^H, for block-diagonal X. No inverse is formed: each
/// block is QR factored (Psi_k = Q_k R_k), D^-1 is applied through a
/// column-pivoted QR of the whitened constraint, and redundant constraint
/// rows are dropped at kRankThreshold.
ClosedFormSolution solve_closed_form(const BlockSystem &sys);

/// Nullspace reference: Z spans null(Xtil) (SVD), h = Z argmin ||X Z w - e||.
/// Throws InfeasibleError when the nullspace is empty.
CVector solve_constrained_ls_oracle(const CMatrix &X, const CMatrix &Xtil, const CVector &e,
                                    double rank_tol = kRankThreshold);

FilterBank design_coherent_linear(const WaveformAlphabet &alphabet, std::optional<std::size_t> L_f = {},
                                  std::optional<std::size_t> peak_index = {});

/// Spectral solve: the circulant blocks share one DFT basis, so the problem
/// splits into one K x K system per frequency bin. `dense` routes through the
/// assembled block system instead (reference path, O((K n)^3)).
FilterBank design_coherent_circular(const WaveformAlphabet &alphabet, std::optional<std::size_t> L_f = {},
                                    std::optional<std::size_t> peak_index = {}, bool dense = false);

/// Independent per-waveform least squares: h_k = argmin ||Psi_k h_k - e_k||.
FilterBank design_uncoherent_ls_baseline(const WaveformAlphabet &alphabet, std::optional<std::size_t> L_f = {},
                                         std::optional<std::size_t> peak_index = {});

/// Block-coordinate descent on
///   sum_k ||Psi_k h_k - e_k||^2 + mu sum_k ||Psi_k h_k - Psi_{k+1} h_{k+1}||^2,
/// started from the LS baseline. Each block update is exact, so the recorded
/// objective is non-increasing.
FilterBank design_penalized_iterative_baseline(const WaveformAlphabet &alphabet, double mu, std::size_t iters,
                                               std::optional<std::size_t> L_f = {},
                                               std::optional<std::size_t> peak_index = {});

/// Same designs on raw waveforms.
FilterBank design_coherent_linear(std::span<const std::vector<cd>> waveforms, std::size_t L_f,
                                  std::optional<std::size_t> peak_index = {});
FilterBank design_coherent_circular(std::span<const std::vector<cd>> waveforms, std::size_t L_f,
                                    std::optional<std::size_t> peak_index = {}, bool dense = false);
FilterBank design_uncoherent_ls_baseline(std::span<const std::vector<cd>> waveforms, std::size_t L_f,
                                         std::optional<std::size_t> peak_index = {});
FilterBank design_penalized_iterative_baseline(std::span<const std::vector<cd>> waveforms, double mu,
                                               std::size_t iters, std::size_t L_f,
                                               std::optional<std::size_t> peak_index = {});

/// Per-waveform responses Psi_k h_k (linear flavor) or the n-point circular
/// responses (circular flavor), each of length L + L_f - 1.
std::vector<std::vector<cd>> filter_responses(const FilterBank &bank, std::span<const std::vector<cd>> waveforms);

/// max_k ||y_k - y_ref|| / ||y_ref||.
double coherence_error(const std::vector<std::vector<cd>> &responses, std::size_t reference = 0);

/// 20 log10(max sidelobe / mainlobe) with a one-sample guard each side of the
/// peak (cyclic distance when `cyclic`); floored at kSidelobeFloorDb.
double peak_sidelobe_db(std::span<const cd> response, std::size_t peak_index, bool cyclic = false);
double integrated_sidelobe_db(std::span<const cd> response, std::size_t peak_index, bool cyclic = false);

DesignReport evaluate_filterbank(const FilterBank &bank, const WaveformAlphabet &alphabet);
DesignReport evaluate_filterbank(const FilterBank &bank, std::span<const std::vector<cd>> waveforms);

/// Norm of the component of X^H (X h - e) inside null(Xtil), via the oracle basis.
double kkt_projected_gradient(const BlockSystem &sys, const CVector &h, double rank_tol = kRankThreshold);

std::vector<std::vector<cd>> alphabet_samples(const WaveformAlphabet &alphabet);

} // namespace dfrc
