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

#include "dfrc/selftest.hpp"

#include <algorithm>
#include <chrono>

#include "dfrc/convmat.hpp"
#include "dfrc/filterdesign.hpp"
#include "dfrc/random.hpp"

namespace dfrc
{

bool SelftestReport::passed() const
{
    return !cases.empty() &&
           std::all_of(cases.begin(), cases.end(), [](const SelftestCase &c) { return c.passed; });
}

namespace
{

std::size_t smallest_feasible_L_f(std::size_t K, std::size_t L)
{
    std::size_t L_f = 1;
    while (!check_feasibility(K, L, L_f).feasible)
        ++L_f;
    return L_f;
}

double relative(const CVector &a, const CVector &b)
{
    const double nb = b.norm();
    return nb > 0.0 ? (a - b).norm() / nb : a.norm();
}

} // namespace

SelftestReport run_oracle_selftest(std::size_t instances, std::uint64_t seed, double tolerance)
{
    const auto t0 = std::chrono::steady_clock::now();
    SelftestReport report;
    report.tolerance = tolerance;

    for (std::size_t i = 0; i < instances; ++i)
    {
        auto rng = make_rng(seed, {i});
        SelftestCase c;
        c.K = 2 + rng() % 3;
        c.L = 2 + rng() % 5;
        c.flavor = (i % 2 == 0) ? Flavor::linear : Flavor::circular;
        c.L_f = (c.flavor == Flavor::linear ? smallest_feasible_L_f(c.K, c.L) : 1 + rng() % 6) + rng() % 4;

        std::vector<std::vector<cd>> wf(c.K, std::vector<cd>(c.L));
        for (auto &w : wf)
            for (auto &x : w)
                x = complex_normal(rng, 1.0);

        const auto sys = assemble_block_system(wf, c.L_f, std::nullopt, c.flavor);
        const auto sol = solve_closed_form(sys);
        try
        {
            c.rel_error = relative(sol.h, solve_constrained_ls_oracle(sys.X, sys.Xtil, sys.e));
        }
        catch (const InfeasibleError &)
        {
            // Square full-rank constraint: the only feasible point is h = 0.
            c.trivial = true;
            const CVector h_ls = sys.X.colPivHouseholderQr().solve(sys.e);
            c.rel_error = sol.h.norm() / h_ls.norm();
        }
        if (c.flavor == Flavor::circular)
        {
            const auto bank = design_coherent_circular(wf, c.L_f);
            c.spectral_error = relative(bank.stacked(), sol.h);
        }
        c.passed = c.rel_error <= tolerance && c.spectral_error <= tolerance;
        report.max_rel_error = std::max({report.max_rel_error, c.rel_error, c.spectral_error});
        report.cases.push_back(c);
    }
    report.elapsed_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

} // namespace dfrc
