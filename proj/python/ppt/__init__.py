"""Point-process transport bounds.

Configurations are lists of coordinate lists, e.g. ``[[0.1], [0.7]]``.
Experiments take and return plain dictionaries with the same layout as the
``ppt`` command-line tool.
"""

import json as _json

from ._core import (
    Error,
    bound_tv_gibbs,
    bound_tv_poisson,
    bound_w2_halfline,
    distance,
    isoperimetric_ratio_exact,
    poisson_tail_exact,
    rho0,
    rho1,
    rho1_normalized,
    rho2,
    stirling_bounds,
    tail_bound_count_sharp,
    tail_bound_lipschitz,
    verify_scenarios,
)
from ._core import run_experiment_json as _run_experiment_json

__version__ = "0.1.0"


def run_experiment(spec, record_timing=True):
    """Run an experiment spec (dict or JSON string) and return the report as a dict."""
    text = spec if isinstance(spec, str) else _json.dumps(spec)
    return _json.loads(_run_experiment_json(text, record_timing))


__all__ = [
    "Error",
    "bound_tv_gibbs",
    "bound_tv_poisson",
    "bound_w2_halfline",
    "distance",
    "isoperimetric_ratio_exact",
    "poisson_tail_exact",
    "rho0",
    "rho1",
    "rho1_normalized",
    "rho2",
    "run_experiment",
    "stirling_bounds",
    "tail_bound_count_sharp",
    "tail_bound_lipschitz",
    "verify_scenarios",
]
