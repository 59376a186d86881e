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

import json

import numpy as np
import pytest

import dfrc


def test_alphabet_is_constant_modulus():
    wfs = dfrc.make_alphabet(K=4, n_chips=30, seed=1)
    assert len(wfs) == 4
    for w in wfs:
        assert w.shape == (90,)
        assert np.allclose(np.abs(w), 1.0, atol=1e-12)


def test_block_system_dimensions():
    wfs = dfrc.make_alphabet(K=4, n_chips=30, seed=1)
    X, Xtil, e, peak = dfrc.block_system(wfs, 270)
    assert X.shape == (4 * 359, 4 * 270)
    assert Xtil.shape == (3 * 359, 4 * 270)
    assert e.shape == (4 * 359,)
    assert peak == 179


def test_coherent_design_matches_numpy_nullspace_solution():
    rng = np.random.default_rng(3)
    wfs = [rng.standard_normal(4) + 1j * rng.standard_normal(4) for _ in range(2)]
    L_f = 6
    bank = dfrc.design("coherent-linear", wfs, L_f)
    X, Xtil, e, _ = dfrc.block_system(wfs, L_f)

    # Independent reference built from numpy's SVD.
    _, s, vh = np.linalg.svd(Xtil)
    rank = int(np.sum(s > 1e-10 * s[0]))
    Z = vh[rank:].conj().T
    w, *_ = np.linalg.lstsq(X @ Z, e, rcond=None)
    ref = Z @ w
    h = bank.stacked()
    assert np.linalg.norm(h - ref) <= 1e-8 * np.linalg.norm(ref)
    assert np.linalg.norm(Xtil @ h) <= 1e-8 * np.linalg.norm(e)


def test_coherent_outputs_overlay_and_baseline_does_not():
    wfs = dfrc.make_alphabet(K=4, n_chips=10, seed=2)
    coh = dfrc.evaluate(dfrc.design("coherent-linear", wfs, 120), wfs)
    base = dfrc.evaluate(dfrc.design("baseline-LS", wfs, 120), wfs)
    assert coh["coherence_error"] <= 1e-6
    assert base["coherence_error"] > 1e-2


def test_infeasible_length_raises_dimension_error():
    wfs = dfrc.make_alphabet(K=4, n_chips=10, seed=2)
    # L = 30: the bound is L_f >= (K-1)(L-1) = 87.
    with pytest.raises(dfrc.DimensionError):
        dfrc.design("coherent-linear", wfs, 86)
    assert not dfrc.check_feasibility(4, 30, 86)["feasible"]
    assert dfrc.check_feasibility(4, 30, 87)["on_lower_bound"]


def test_circular_singular_bin_raises_conditioning_error():
    wfs = [np.array([1.0, -1.0], dtype=complex), np.array([1.0, 1.0], dtype=complex)]
    with pytest.raises(dfrc.ConditioningError):
        dfrc.design("coherent-circular", wfs, 1)


def test_range_doppler_map_axis_and_peak():
    M = 16
    m = np.arange(M)
    data = np.zeros((3, M), dtype=complex)
    data[1] = np.exp(2j * np.pi * 0.25 * m)
    mags, axis = dfrc.range_doppler_map(data, "rectangular")
    assert mags.shape == (3, M)
    assert axis[0] > -0.5 and axis[-1] <= 0.5
    assert axis[int(np.argmax(mags[1]))] == pytest.approx(0.25)


def test_selftest_and_config_helpers():
    assert dfrc.selftest(instances=20)["passed"]
    cfg = {"K": 4, "modulation": {"n_chips": 10}, "alphabet_seed": 2}
    info = dfrc.validate_config(json.dumps(cfg))
    assert info["L"] == 30 and info["L_f"] == 116
    assert dfrc.config_hash(json.dumps(cfg)) == dfrc.config_hash(json.dumps(cfg, indent=4))
    with pytest.raises(ValueError):
        dfrc.validate_config(json.dumps({"K": 4, "unknown_key": 1}))


def test_wilson_interval_brackets_estimate():
    lo, hi = dfrc.wilson_interval(50, 100)
    assert lo < 0.5 < hi
