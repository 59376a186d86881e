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

#include "dfrc/filterdesign.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "dfrc/fft.hpp"

namespace dfrc
{

namespace
{

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string sci(double v)
{
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << v;
    return os.str();
}

/// Thin QR of one convolution block plus the singular values of R.
struct BlockFactor
{
    CMatrix Q; // r x c, orthonormal columns
    CMatrix R; // c x c, upper triangular
    double smax = 0.0;
    double smin = 0.0;
};

BlockFactor factor_block(const CMatrix &psi, std::size_t k)
{
    const auto c = psi.cols();
    Eigen::HouseholderQR<CMatrix> qr(psi);
    BlockFactor f;
    f.R = qr.matrixQR().topRows(c).triangularView<Eigen::Upper>();
    f.Q = qr.householderQ() * CMatrix::Identity(psi.rows(), c);
    const Eigen::VectorXd s = Eigen::BDCSVD<CMatrix>(f.R).singularValues();
    f.smax = s(0);
    f.smin = s(s.size() - 1);
    const double cond = f.smin > 0.0 ? (f.smax / f.smin) * (f.smax / f.smin) : std::numeric_limits<double>::infinity();
    if (!(cond < kConditionLimit))
        throw ConditioningError("Gram matrix of waveform " + std::to_string(k) + " is ill conditioned (cond " +
                                    sci(cond) + " >= " + sci(kConditionLimit) + ")",
                                cond);
    return f;
}

double gram_condition(const std::vector<BlockFactor> &fs)
{
    double smax = 0.0, smin = std::numeric_limits<double>::infinity();
    for (const auto &f : fs)
    {
        smax = std::max(smax, f.smax);
        smin = std::min(smin, f.smin);
    }
    return (smax / smin) * (smax / smin);
}

CVector impulse(std::size_t n, std::size_t peak)
{
    CVector e = CVector::Zero(static_cast<Eigen::Index>(n));
    e(static_cast<Eigen::Index>(peak)) = 1.0;
    return e;
}

std::size_t resolve_peak(std::size_t L, std::size_t L_f, std::optional<std::size_t> peak_index)
{
    const std::size_t n = L + L_f - 1;
    const std::size_t p = peak_index.value_or(default_peak_index(L, L_f));
    if (p >= n)
        throw InvalidArgument("peak_index " + std::to_string(p) + " outside [0, " + std::to_string(n) + ")");
    return p;
}

std::size_t check_waveforms(std::span<const std::vector<cd>> waveforms)
{
    if (waveforms.empty())
        throw InvalidArgument("design: empty alphabet");
    const std::size_t L = waveforms.front().size();
    if (L == 0)
        throw InvalidArgument("design: empty waveform");
    for (const auto &w : waveforms)
        if (w.size() != L)
            throw InvalidArgument("design: waveforms must share one length");
    return L;
}

void split_stacked(FilterBank &bank, const CVector &h, std::size_t K, std::size_t len)
{
    bank.filters.clear();
    for (std::size_t k = 0; k < K; ++k)
        bank.filters.push_back(h.segment(static_cast<Eigen::Index>(k * len), static_cast<Eigen::Index>(len)));
}

void flag_trivial(FilterBank &bank)
{
    double norm = 0.0;
    for (const auto &f : bank.filters)
        norm = std::max(norm, f.norm());
    if (norm == 0.0)
        bank.warnings.push_back("trivial solution: the coherency constraint admits only h = 0");
}

void attach_solution_metadata(FilterBank &bank, const ClosedFormSolution &s)
{
    bank.cond_gram = s.cond_gram;
    bank.cond_D = s.cond_D;
    bank.constraint_rank = s.constraint_rank;
    bank.constraint_rows = s.constraint_rows;
    if (s.constraint_rank < s.constraint_rows)
        bank.warnings.push_back("D is singular: " + std::to_string(s.constraint_rows - s.constraint_rank) +
                                " of " + std::to_string(s.constraint_rows) +
                                " coherency constraints are linearly dependent and were dropped (cond(D) estimate " +
                                sci(s.cond_D) + ")");
    else if (s.cond_D > kConditionLimit)
        bank.warnings.push_back("D is ill conditioned (cond(D) estimate " + sci(s.cond_D) + ")");
}

} // namespace

std::string to_string(DesignKind d)
{
    switch (d)
    {
    case DesignKind::coherent_linear:
        return "coherent-linear";
    case DesignKind::coherent_circular:
        return "coherent-circular";
    case DesignKind::baseline_ls:
        return "baseline-LS";
    case DesignKind::baseline_penalized:
        return "baseline-penalized";
    }
    return "unknown";
}

DesignKind design_kind_from_string(const std::string &s)
{
    if (s == "coherent-linear")
        return DesignKind::coherent_linear;
    if (s == "coherent-circular")
        return DesignKind::coherent_circular;
    if (s == "baseline-LS" || s == "baseline-ls" || s == "baseline")
        return DesignKind::baseline_ls;
    if (s == "baseline-penalized")
        return DesignKind::baseline_penalized;
    throw InvalidArgument("unknown design '" + s +
                          "' (expected coherent-linear, coherent-circular, baseline-LS or baseline-penalized)");
}

CVector FilterBank::stacked() const
{
    const auto len = static_cast<Eigen::Index>(length());
    CVector h(len * static_cast<Eigen::Index>(K()));
    for (std::size_t k = 0; k < K(); ++k)
        h.segment(static_cast<Eigen::Index>(k) * len, len) = filters[k];
    return h;
}

std::vector<std::vector<cd>> alphabet_samples(const WaveformAlphabet &alphabet)
{
    std::vector<std::vector<cd>> out;
    out.reserve(alphabet.size());
    for (const auto &w : alphabet.waveforms)
        out.push_back(w.samples);
    return out;
}

// ---- closed form ----------------------------------------------------------

ClosedFormSolution solve_closed_form(const BlockSystem &sys)
{
    const auto K = static_cast<Eigen::Index>(sys.K);
    const auto r = static_cast<Eigen::Index>(sys.block_rows());
    const auto c = static_cast<Eigen::Index>(sys.block_cols());
    if (sys.X.rows() != K * r || sys.X.cols() != K * c || sys.e.size() != K * r ||
        sys.Xtil.rows() != (K - 1) * r || sys.Xtil.cols() != K * c)
        throw InvalidArgument("solve_closed_form: inconsistent block system dimensions");

    // G_k = Psi_k^H Psi_k = R_k^H R_k and Psi_k R_k^-1 = Q_k.
    std::vector<BlockFactor> fs;
    fs.reserve(sys.K);
    for (Eigen::Index k = 0; k < K; ++k)
        fs.push_back(factor_block(sys.X.block(k * r, k * c, r, c), static_cast<std::size_t>(k)));

    ClosedFormSolution out;
    out.cond_gram = gram_condition(fs);
    out.constraint_rows = static_cast<std::size_t>((K - 1) * r);

    // cw = R^-H X^H e, the whitened unconstrained solution.
    CVector cw(K * c);
    for (Eigen::Index k = 0; k < K; ++k)
        cw.segment(k * c, c) = fs[static_cast<std::size_t>(k)].Q.adjoint() * sys.e.segment(k * r, r);

    CVector z = cw;
    out.cond_D = 1.0;
    if (K > 1)
    {
        // B = Xtil R^-1 keeps the block pattern [Q_k, -Q_{k+1}]; D = B B^H.
        CMatrix Bh = CMatrix::Zero(K * c, (K - 1) * r);
        for (Eigen::Index k = 0; k + 1 < K; ++k)
        {
            const auto sel = sys.Xtil.block(k * r, 0, r, K * c);
            // Whitening must act on the actual constraint entries, not only on the pattern.
            for (Eigen::Index j = 0; j < K; ++j)
            {
                const auto blk = sel.block(0, j * c, r, c);
                if (blk.isZero(0.0))
                    continue;
                const auto &R = fs[static_cast<std::size_t>(j)].R;
                // (blk R^-1)^H = R^-H blk^H
                Bh.block(j * c, k * r, c, r) =
                    R.adjoint().triangularView<Eigen::Lower>().solve(blk.adjoint());
            }
        }
        Eigen::ColPivHouseholderQR<CMatrix> qr(Bh);
        qr.setThreshold(kRankThreshold);
        const auto rank = qr.rank();
        out.constraint_rank = static_cast<std::size_t>(rank);

        const auto diag = qr.matrixQR().diagonal().cwiseAbs();
        const double dmax = diag.size() > 0 ? diag(0) : 0.0;
        const double dmin = diag.size() > 0 ? diag.minCoeff() : 0.0;
        out.cond_D = dmin > 0.0 ? (dmax / dmin) * (dmax / dmin) : std::numeric_limits<double>::infinity();

        // z = cw - B^H D^-1 B cw: remove the component of cw in range(B^H).
        if (rank == K * c)
            z.setZero(); // range(B^H) is everything: only h = 0 is feasible
        else
        {
            CVector v = qr.householderQ().adjoint() * cw;
            v.tail(v.size() - rank).setZero();
            z = cw - qr.householderQ() * v;
        }
    }

    out.h.resize(K * c);
    for (Eigen::Index k = 0; k < K; ++k)
        out.h.segment(k * c, c) =
            fs[static_cast<std::size_t>(k)].R.triangularView<Eigen::Upper>().solve(z.segment(k * c, c));
    return out;
}

CVector solve_constrained_ls_oracle(const CMatrix &X, const CMatrix &Xtil, const CVector &e, double rank_tol)
{
    if (X.rows() != e.size())
        throw InvalidArgument("oracle: X and e disagree in rows");
    if (Xtil.rows() > 0 && Xtil.cols() != X.cols())
        throw InvalidArgument("oracle: X and Xtil disagree in columns");
    const auto n = X.cols();

    CMatrix Z;
    if (Xtil.rows() == 0)
        Z = CMatrix::Identity(n, n);
    else
    {
        Eigen::BDCSVD<CMatrix> svd(Xtil, Eigen::ComputeFullV);
        const auto &s = svd.singularValues();
        Eigen::Index rank = 0;
        const double smax = s.size() > 0 ? s(0) : 0.0;
        for (Eigen::Index i = 0; i < s.size(); ++i)
            if (s(i) > rank_tol * smax)
                ++rank;
        if (rank == n)
            throw InfeasibleError("oracle: the constraint matrix has an empty nullspace");
        Z = svd.matrixV().rightCols(n - rank);
    }
    const CMatrix XZ = X * Z;
    const CVector w = Eigen::CompleteOrthogonalDecomposition<CMatrix>(XZ).solve(e);
    return Z * w;
}

double kkt_projected_gradient(const BlockSystem &sys, const CVector &h, double rank_tol)
{
    const CVector g = sys.X.adjoint() * (sys.X * h - sys.e);
    if (sys.Xtil.rows() == 0)
        return g.norm();
    Eigen::ColPivHouseholderQR<CMatrix> qr(sys.Xtil.adjoint());
    qr.setThreshold(rank_tol);
    CVector v = qr.householderQ().adjoint() * g;
    v.head(qr.rank()).setZero();
    return v.norm();
}

// ---- designs ----------------------------------------------------------------

FilterBank design_coherent_linear(std::span<const std::vector<cd>> waveforms, std::size_t L_f,
                                  std::optional<std::size_t> peak_index)
{
    const auto t0 = Clock::now();
    const std::size_t L = check_waveforms(waveforms);
    const auto sys = assemble_block_system(waveforms, L_f, peak_index, Flavor::linear);
    const auto sol = solve_closed_form(sys);

    FilterBank bank;
    bank.flavor = Flavor::linear;
    bank.design = DesignKind::coherent_linear;
    bank.peak_index = sys.peak_index;
    bank.L = L;
    bank.L_f = L_f;
    split_stacked(bank, sol.h, sys.K, L_f);
    attach_solution_metadata(bank, sol);
    const auto feas = check_feasibility(sys.K, L, L_f);
    if (feas.on_lower_bound())
        bank.warnings.push_back("L_f sits on the lower feasibility bound (K-1)(L+L_f-1) = K*L_f = " +
                                std::to_string(feas.middle) + "; D is square and the solution is fragile");
    flag_trivial(bank);
    bank.elapsed_s = seconds_since(t0);
    return bank;
}

FilterBank design_coherent_circular(std::span<const std::vector<cd>> waveforms, std::size_t L_f,
                                    std::optional<std::size_t> peak_index, bool dense)
{
    const auto t0 = Clock::now();
    const std::size_t L = check_waveforms(waveforms);
    if (L_f == 0)
        throw InvalidArgument("design_coherent_circular: L_f must be >= 1");
    const std::size_t K = waveforms.size();
    const std::size_t n = L + L_f - 1;
    const std::size_t peak = resolve_peak(L, L_f, peak_index);

    FilterBank bank;
    bank.flavor = Flavor::circular;
    bank.design = DesignKind::coherent_circular;
    bank.peak_index = peak;
    bank.L = L;
    bank.L_f = L_f;
    bank.constraint_rows = (K - 1) * n;

    // Circulant eigenvalues: DFT of the zero-padded waveforms.
    std::vector<std::vector<cd>> spectra;
    double amax = 0.0, amin = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < K; ++k)
    {
        spectra.push_back(fft::forward(waveforms[k], n));
        double kmax = 0.0;
        for (const auto &a : spectra.back())
            kmax = std::max(kmax, std::abs(a));
        for (std::size_t w = 0; w < n; ++w)
        {
            const double mag = std::abs(spectra.back()[w]);
            const double cond = mag > 0.0 ? (kmax / mag) * (kmax / mag) : std::numeric_limits<double>::infinity();
            if (!(cond < kConditionLimit))
                throw ConditioningError("circulant of waveform " + std::to_string(k) + " is singular at DFT bin " +
                                            std::to_string(w) + " of " + std::to_string(n) + " (|lambda| = " +
                                            sci(mag) + ")",
                                        cond);
        }
        for (const auto &a : spectra.back())
        {
            amax = std::max(amax, std::abs(a));
            amin = std::min(amin, std::abs(a));
        }
    }
    bank.cond_gram = (amax / amin) * (amax / amin);

    if (dense)
    {
        const auto sys = assemble_block_system(waveforms, L_f, peak, Flavor::circular);
        const auto sol = solve_closed_form(sys);
        split_stacked(bank, sol.h, K, n);
        attach_solution_metadata(bank, sol);
        bank.elapsed_s = seconds_since(t0);
        return bank;
    }

    // Per bin: X = diag(a), Xtil rows [.. a_k, -a_{k+1} ..], e = E(w) 1.
    const auto E = fft::forward(std::span<const cd>(impulse(n, peak).data(), n));
    const auto Ki = static_cast<Eigen::Index>(K);
    std::vector<std::vector<cd>> Hf(K, std::vector<cd>(n));
    double cond_D = 1.0;
    std::size_t rank_total = 0;
    for (std::size_t w = 0; w < n; ++w)
    {
        CVector a(Ki);
        for (Eigen::Index k = 0; k < Ki; ++k)
            a(k) = spectra[static_cast<std::size_t>(k)][w];
        const Eigen::VectorXd g = a.cwiseAbs2();
        const CVector h0 = (a.conjugate().array() * E[w] / g.array()).matrix();
        CVector h = h0;
        if (K > 1)
        {
            CMatrix Xt = CMatrix::Zero(Ki - 1, Ki);
            for (Eigen::Index k = 0; k + 1 < Ki; ++k)
            {
                Xt(k, k) = a(k);
                Xt(k, k + 1) = -a(k + 1);
            }
            const CMatrix GinvXth = g.cwiseInverse().asDiagonal() * Xt.adjoint();
            const CMatrix D = Xt * GinvXth;
            Eigen::ColPivHouseholderQR<CMatrix> qr(D);
            qr.setThreshold(kRankThreshold);
            rank_total += static_cast<std::size_t>(qr.rank());
            const auto dg = qr.matrixQR().diagonal().cwiseAbs();
            cond_D = std::max(cond_D, dg.minCoeff() > 0.0 ? dg(0) / dg.minCoeff()
                                                         : std::numeric_limits<double>::infinity());
            const CVector lambda = qr.solve(CVector(Xt * h0));
            h = h0 - GinvXth * lambda;
        }
        for (std::size_t k = 0; k < K; ++k)
            Hf[k][w] = h(static_cast<Eigen::Index>(k));
    }
    bank.cond_D = cond_D;
    bank.constraint_rank = rank_total;

    for (std::size_t k = 0; k < K; ++k)
    {
        const auto taps = fft::inverse(Hf[k]);
        bank.filters.push_back(Eigen::Map<const CVector>(taps.data(), static_cast<Eigen::Index>(n)));
    }
    bank.elapsed_s = seconds_since(t0);
    return bank;
}

FilterBank design_uncoherent_ls_baseline(std::span<const std::vector<cd>> waveforms, std::size_t L_f,
                                         std::optional<std::size_t> peak_index)
{
    const auto t0 = Clock::now();
    const std::size_t L = check_waveforms(waveforms);
    if (L_f == 0)
        throw InvalidArgument("design_uncoherent_ls_baseline: L_f must be >= 1");
    const std::size_t peak = resolve_peak(L, L_f, peak_index);
    const CVector e1 = impulse(L + L_f - 1, peak);

    FilterBank bank;
    bank.flavor = Flavor::linear;
    bank.design = DesignKind::baseline_ls;
    bank.peak_index = peak;
    bank.L = L;
    bank.L_f = L_f;

    std::vector<BlockFactor> fs;
    for (std::size_t k = 0; k < waveforms.size(); ++k)
    {
        fs.push_back(factor_block(build_linear_conv(waveforms[k], L_f, k).entries, k));
        const auto &f = fs.back();
        bank.filters.push_back(f.R.triangularView<Eigen::Upper>().solve(CVector(f.Q.adjoint() * e1)));
    }
    bank.cond_gram = gram_condition(fs);
    bank.elapsed_s = seconds_since(t0);
    return bank;
}

FilterBank design_penalized_iterative_baseline(std::span<const std::vector<cd>> waveforms, double mu,
                                               std::size_t iters, std::size_t L_f,
                                               std::optional<std::size_t> peak_index)
{
    if (!(mu >= 0.0) || !std::isfinite(mu))
        throw InvalidArgument("design_penalized_iterative_baseline: mu must be finite and >= 0");
    if (iters == 0)
        throw InvalidArgument("design_penalized_iterative_baseline: iters must be >= 1");
    const auto t0 = Clock::now();
    const std::size_t L = check_waveforms(waveforms);
    if (L_f == 0)
        throw InvalidArgument("design_penalized_iterative_baseline: L_f must be >= 1");
    const std::size_t K = waveforms.size();
    const std::size_t peak = resolve_peak(L, L_f, peak_index);
    const CVector e1 = impulse(L + L_f - 1, peak);

    FilterBank bank;
    bank.flavor = Flavor::linear;
    bank.design = DesignKind::baseline_penalized;
    bank.peak_index = peak;
    bank.L = L;
    bank.L_f = L_f;
    bank.mu = mu;

    std::vector<BlockFactor> fs;
    std::vector<CVector> y(K);
    for (std::size_t k = 0; k < K; ++k)
    {
        fs.push_back(factor_block(build_linear_conv(waveforms[k], L_f, k).entries, k));
        const CVector qe = fs[k].Q.adjoint() * e1;
        y[k] = fs[k].Q * qe;
    }
    bank.cond_gram = gram_condition(fs);

    auto objective = [&] {
        double J = 0.0;
        for (std::size_t k = 0; k < K; ++k)
        {
            J += (y[k] - e1).squaredNorm();
            if (k + 1 < K)
                J += mu * (y[k] - y[k + 1]).squaredNorm();
        }
        return J;
    };

    bank.objective_history.push_back(objective());
    for (std::size_t it = 0; it < iters; ++it)
    {
        for (std::size_t k = 0; k < K; ++k)
        {
            CVector target = e1;
            double weight = 1.0;
            if (k > 0)
            {
                target += mu * y[k - 1];
                weight += mu;
            }
            if (k + 1 < K)
            {
                target += mu * y[k + 1];
                weight += mu;
            }
            target /= weight;
            y[k] = fs[k].Q * (fs[k].Q.adjoint() * target);
        }
        bank.objective_history.push_back(objective());
    }

    // h_k = R_k^-1 Q_k^H y_k recovers the taps of the final outputs.
    for (std::size_t k = 0; k < K; ++k)
        bank.filters.push_back(fs[k].R.triangularView<Eigen::Upper>().solve(CVector(fs[k].Q.adjoint() * y[k])));
    bank.elapsed_s = seconds_since(t0);
    return bank;
}

FilterBank design_coherent_linear(const WaveformAlphabet &alphabet, std::optional<std::size_t> L_f,
                                  std::optional<std::size_t> peak_index)
{
    alphabet.validate();
    const auto raw = alphabet_samples(alphabet);
    return design_coherent_linear(raw, L_f.value_or(default_filter_length(alphabet.size(), alphabet.length())),
                                  peak_index);
}

FilterBank design_coherent_circular(const WaveformAlphabet &alphabet, std::optional<std::size_t> L_f,
                                    std::optional<std::size_t> peak_index, bool dense)
{
    alphabet.validate();
    const auto raw = alphabet_samples(alphabet);
    return design_coherent_circular(raw, L_f.value_or(default_filter_length(alphabet.size(), alphabet.length())),
                                    peak_index, dense);
}

FilterBank design_uncoherent_ls_baseline(const WaveformAlphabet &alphabet, std::optional<std::size_t> L_f,
                                         std::optional<std::size_t> peak_index)
{
    alphabet.validate();
    const auto raw = alphabet_samples(alphabet);
    return design_uncoherent_ls_baseline(
        raw, L_f.value_or(default_filter_length(alphabet.size(), alphabet.length())), peak_index);
}

FilterBank design_penalized_iterative_baseline(const WaveformAlphabet &alphabet, double mu, std::size_t iters,
                                               std::optional<std::size_t> L_f,
                                               std::optional<std::size_t> peak_index)
{
    alphabet.validate();
    const auto raw = alphabet_samples(alphabet);
    return design_penalized_iterative_baseline(
        raw, mu, iters, L_f.value_or(default_filter_length(alphabet.size(), alphabet.length())), peak_index);
}

// ---- evaluation ---------------------------------------------------------

std::vector<std::vector<cd>> filter_responses(const FilterBank &bank, std::span<const std::vector<cd>> waveforms)
{
    if (waveforms.size() != bank.K())
        throw InvalidArgument("filter_responses: bank has " + std::to_string(bank.K()) + " filters but alphabet has " +
                              std::to_string(waveforms.size()) + " waveforms");
    std::vector<std::vector<cd>> out;
    for (std::size_t k = 0; k < bank.K(); ++k)
    {
        const std::span<const cd> h(bank.filters[k].data(), static_cast<std::size_t>(bank.filters[k].size()));
        if (waveforms[k].size() != bank.L)
            throw InvalidArgument("filter_responses: waveform length differs from the designed L");
        if (bank.flavor == Flavor::linear)
            out.push_back(fft::convolve(waveforms[k], h));
        else
            out.push_back(fft::circular_convolve(waveforms[k], h, bank.L + bank.L_f - 1));
    }
    return out;
}

double coherence_error(const std::vector<std::vector<cd>> &responses, std::size_t reference)
{
    if (responses.empty())
        return 0.0;
    const auto &ref = responses.at(reference);
    double ref_norm = 0.0;
    for (const auto &v : ref)
        ref_norm += std::norm(v);
    ref_norm = std::sqrt(ref_norm);
    double worst = 0.0;
    for (const auto &y : responses)
    {
        double d = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i)
            d += std::norm(y[i] - ref[i]);
        worst = std::max(worst, std::sqrt(d));
    }
    if (worst == 0.0)
        return 0.0;
    return ref_norm > 0.0 ? worst / ref_norm : std::numeric_limits<double>::infinity();
}

namespace
{

bool in_guard(std::size_t i, std::size_t peak, std::size_t n, bool cyclic)
{
    std::size_t d = i > peak ? i - peak : peak - i;
    if (cyclic)
        d = std::min(d, n - d);
    return d <= 1;
}

} // namespace

double peak_sidelobe_db(std::span<const cd> response, std::size_t peak_index, bool cyclic)
{
    if (peak_index >= response.size())
        throw InvalidArgument("peak_sidelobe_db: peak_index outside the response");
    const double main = std::abs(response[peak_index]);
    double side = 0.0;
    for (std::size_t i = 0; i < response.size(); ++i)
        if (!in_guard(i, peak_index, response.size(), cyclic))
            side = std::max(side, std::abs(response[i]));
    if (main == 0.0)
        return std::numeric_limits<double>::quiet_NaN();
    if (side == 0.0)
        return kSidelobeFloorDb;
    return std::max(kSidelobeFloorDb, 20.0 * std::log10(side / main));
}

double integrated_sidelobe_db(std::span<const cd> response, std::size_t peak_index, bool cyclic)
{
    if (peak_index >= response.size())
        throw InvalidArgument("integrated_sidelobe_db: peak_index outside the response");
    const double main = std::norm(response[peak_index]);
    double side = 0.0;
    for (std::size_t i = 0; i < response.size(); ++i)
        if (!in_guard(i, peak_index, response.size(), cyclic))
            side += std::norm(response[i]);
    if (main == 0.0)
        return std::numeric_limits<double>::quiet_NaN();
    if (side == 0.0)
        return kSidelobeFloorDb;
    return std::max(kSidelobeFloorDb, 10.0 * std::log10(side / main));
}

DesignReport evaluate_filterbank(const FilterBank &bank, std::span<const std::vector<cd>> waveforms)
{
    const auto ys = filter_responses(bank, waveforms);
    const bool cyclic = bank.flavor == Flavor::circular;

    DesignReport rep;
    rep.coherence_error = coherence_error(ys);
    rep.cond_gram = bank.cond_gram;
    rep.cond_D = bank.cond_D;
    rep.mainlobe = ys.empty() ? 0.0 : std::abs(ys.front()[bank.peak_index]);

    double obj = 0.0, con = 0.0;
    for (std::size_t k = 0; k < ys.size(); ++k)
    {
        rep.psl_db.push_back(peak_sidelobe_db(ys[k], bank.peak_index, cyclic));
        rep.isl_db.push_back(integrated_sidelobe_db(ys[k], bank.peak_index, cyclic));
        for (std::size_t i = 0; i < ys[k].size(); ++i)
        {
            const cd target = i == bank.peak_index ? cd(1.0) : cd(0.0);
            obj += std::norm(ys[k][i] - target);
            if (k + 1 < ys.size())
                con += std::norm(ys[k][i] - ys[k + 1][i]);
        }
    }
    rep.objective_residual = std::sqrt(obj);
    rep.constraint_residual = std::sqrt(con);
    return rep;
}

DesignReport evaluate_filterbank(const FilterBank &bank, const WaveformAlphabet &alphabet)
{
    return evaluate_filterbank(bank, alphabet_samples(alphabet));
}

} // namespace dfrc
