# Copyright 2026 The minkflow Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.


import json
import math

import numpy as np
import pytest

import minkflow as mf


def test_norm_basics():
    e = mf.Norm.euclidean(2)
    assert e.value(np.array([3.0, 4.0])) == pytest.approx(5.0)
    ball = mf.Norm.shifted_ball(np.array([0.3, 0.0]))
    x = np.array([1.0, 0.5])
    assert ball.value(x) != pytest.approx(ball.value(-x))
    w = ball.legendre(x)
    assert np.allclose(ball.legendre_inverse(w), x, atol=1e-9)
    g = mf.Norm.regularized_p(4.0, 1e-3, 2).metric(x)
    assert np.allclose(g, g.T)


def test_norm_json_round_trip():
    n = mf.Norm.from_json('{"family": "regularized_p", "dim": 2, "params": {"p": 4, "eps": 0.001}}')
    again = mf.Norm.from_json(n.to_json())
    x = np.array([0.7, -0.2])
    assert again.value(x) == pytest.approx(n.value(x), rel=1e-14)


def test_reverse_norm_quotient_is_one():
    n = mf.Norm.regularized_p(4.0, 1e-3, 2)
    pot = mf.Potential.squared_reverse_norm()
    q = mf.skew_quotient(n, pot, np.array([0.3, 1.1]), np.array([-0.8, 0.4]))
    assert q == pytest.approx(1.0, abs=1e-8)


def test_witness_on_sheared_l8():
    shear = np.array([[1.0, 0.9], [0.0, 1.0]])
    n = mf.Norm.regularized_p_sheared(8.0, 1e-3, shear)
    w = mf.witness_search(n, mf.Potential.quadratic(np.eye(2), np.zeros(2)), 0.0)
    assert w is not None and w[2] < -0.01


def test_heat_flow_conserves_mass():
    n = mf.Norm.euclidean(2)
    g = mf.Grid.box(2, 6.0, 32)
    u0 = mf.gaussian_profile(n, np.zeros(2), 0.25, g)
    out = mf.heat_solve(n, g, u0, mf.explicit_dt_limit(n, g), 0.1, stride=1000)
    cell = g.h(0) * g.h(1)
    assert out["frames"][-1].sum() * cell == pytest.approx(1.0, abs=1e-10)
    assert out["entropy"][-1] <= out["entropy"][0]
    assert out["frames"][-1].shape == (32, 32)


def test_w2_translation():
    n = mf.Norm.euclidean(2)
    g = mf.Grid.box(2, 1.0, 16)
    a = np.zeros((16, 16))
    b = np.zeros((16, 16))
    a[4:8, 4:8] = 1.0
    b[6:10, 4:8] = 1.0
    shift = 2 * g.h(0)
    assert mf.w2_squared(n, g, a, b) == pytest.approx(shift * shift, rel=1e-9)


def test_reports_and_errors():
    rep = mf.step0_report()
    assert rep["pass"] is True
    assert rep["experiment"] == "step0"
    q = mf.Norm.quadratic(np.array([[1.0, 0.0], [0.0, 3.0]]))
    assert mf.triangle_search_report(q, 24, False)["pass"] is True
    cfg = json.dumps({"experiment": "step0", "params": {"R": [25, 50, 100]}})
    assert mf.run_config(cfg)["pass"] is True
    with pytest.raises(mf.MinkflowError):
        mf.Norm.shifted_ball(np.array([1.5, 0.0]))
    assert math.isfinite(mf.step0_closed_form(4.0))
