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

#include <cstdint>
#include <string>
#include <vector>

#include "dfrc/types.hpp"

namespace dfrc
{

struct SelftestCase
{
    std::size_t K = 0;
    std::size_t L = 0;
    std::size_t L_f = 0;
    Flavor flavor = Flavor::linear;
    double rel_error = 0.0;       // closed form vs nullspace oracle
    double spectral_error = 0.0;  // circular only: per-bin solve vs dense closed form
    bool trivial = false;         // oracle found an empty nullspace; h must vanish
    bool passed = false;
};

struct SelftestReport
{
    std::vector<SelftestCase> cases;
    double max_rel_error = 0.0;
    double tolerance = 0.0;
    double elapsed_s = 0.0;
    bool passed() const;
};

/// Random complex-Gaussian instances with K in {2,3,4}, L in [2,6] and L_f
/// from the feasibility bound up to bound + 3. Alternates linear and
/// circular flavors; every instance is compared against
/// solve_constrained_ls_oracle. At the exact linear bound the constraint is
/// square and generically full rank, so the oracle reports an empty
/// nullspace and the closed form must return h = 0 (relative to the
/// unconstrained LS norm).
SelftestReport run_oracle_selftest(std::size_t instances = 100, std::uint64_t seed = 7, double tolerance = 1e-8);

} // namespace dfrc
