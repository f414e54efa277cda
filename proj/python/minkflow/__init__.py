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


"""Python access to the minkflow core: norms, gradient flows, transport and heat flows."""

import json

from ._minkflow import (
    Grid,
    MinkflowError,
    Norm,
    Potential,
    contraction_fit,
    entropy,
    explicit_dt_limit,
    gaussian_profile,
    heat_solve,
    skew_estimate,
    skew_quotient,
    step0_closed_form,
    tangent_triangle_vector,
    theta,
    w2_squared,
    witness_search,
)
from . import _minkflow as _core


def step0_report(p=4.0, R=(25.0, 50.0, 100.0), eps_norm=0.0):
    return json.loads(_core._step0_report(p, list(R), eps_norm))


def triangle_search_report(norm, angular_grid=48, refine=True):
    return json.loads(_core._triangle_search_report(norm, angular_grid, refine))


def run_config(path_or_inline):
    """Runs an experiment config (file path or inline JSON text) and returns the report dict."""
    return json.loads(_core._run_config(path_or_inline))


__all__ = [
    "Grid",
    "MinkflowError",
    "Norm",
    "Potential",
    "contraction_fit",
    "entropy",
    "explicit_dt_limit",
    "gaussian_profile",
    "heat_solve",
    "run_config",
    "skew_estimate",
    "skew_quotient",
    "step0_closed_form",
    "step0_report",
    "tangent_triangle_vector",
    "theta",
    "triangle_search_report",
    "w2_squared",
    "witness_search",
]
