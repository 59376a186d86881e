# SPDX-License-Identifier: Apache-2.0
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
# http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
# ------------------------------------------------------------------------
"""Coherent receive filter banks for DFRC waveform alphabets."""

from ._core import (
    ConditioningError,
    DimensionError,
    Error,
    FilterBank,
    InfeasibleError,
    InvalidArgument,
    __version__,
    block_system,
    check_feasibility,
    config_hash,
    default_filter_length,
    design,
    evaluate,
    make_alphabet,
    range_doppler_map,
    responses,
    selftest,
    solve_oracle,
    validate_config,
    wilson_interval,
)

__all__ = [
    "ConditioningError",
    "DimensionError",
    "Error",
    "FilterBank",
    "InfeasibleError",
    "InvalidArgument",
    "__version__",
    "block_system",
    "check_feasibility",
    "config_hash",
    "default_filter_length",
    "design",
    "evaluate",
    "make_alphabet",
    "range_doppler_map",
    "responses",
    "selftest",
    "solve_oracle",
    "validate_config",
    "wilson_interval",
]
