"""Safe online learning under unknown constraints.

Thin wrapper over the C++ core: run the per-round safe protocol or its
long-term variant from a JSON config, and check the logged runs against the
analytical bounds.
"""

import json

from ._core import (
    RunResult,
    run_safe_learning,
    run_long_term,
    run_pessimistic_greedy,
    sweep,
    eluder_dimension_finite,
    linear_eluder_proxy,
    check_violation_count_bound,
    check_width_sum_bound,
    report_directory,
    __version__,
)

__all__ = [
    "RunResult",
    "run_safe_learning",
    "run_long_term",
    "run_pessimistic_greedy",
    "sweep",
    "eluder_dimension_finite",
    "linear_eluder_proxy",
    "check_violation_count_bound",
    "check_width_sum_bound",
    "report_directory",
    "run_config",
    "__version__",
]


def run_config(config, long_term=False, keep_records=True):
    """Run from a dict or a JSON string; returns a RunResult."""
    text = config if isinstance(config, str) else json.dumps(config)
    runner = run_long_term if long_term else run_safe_learning
    return runner(text, keep_records)
