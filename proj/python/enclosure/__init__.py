"""Acoustic wave scattering and probe-based distance reconstruction.

Thin wrapper over the C++ core: geometry helpers, the probe field, the
free-space oracle, and the full indicator / reconstruction pipelines driven
by JSON-style config dictionaries.
"""

import json as _json

from ._core import (  # noqa: F401
    EnclosureError,
    ProbeBall,
    Shape,
    Vec3,
    box,
    broken_path_length,
    d_point,
    dist_sets,
    free_space_oracle,
    grad_v_closed,
    min_observation_time,
    sphere,
    union_of,
    v_closed,
    v_quadrature,
)
from . import _core


def run_indicator(config):
    """Run one forward solve plus the indicator fit; returns a dict."""
    return _json.loads(_core.run_indicator_json(_json.dumps(config)))


def run_reconstruct(config):
    """Run the multi-probe plan; returns (summary dict, region ndarray)."""
    summary, region = _core.run_reconstruct_json(_json.dumps(config))
    return _json.loads(summary), region


def validate(suite, quick=False, threads=1, seed=1):
    """Run a named validation suite; returns its report as a dict."""
    return _json.loads(_core.run_suite_json(suite, quick, threads, seed))
