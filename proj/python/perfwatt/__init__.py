"""perfwatt: events/sec vs silicon power benchmarking.

Thin wrapper over the C++ core. `run_sweep` returns the report as a dict
(parsed from the core's canonical JSON form).
"""

import json as _json

from ._core import (
    PerfwattError,
    __version__,
    active_worker_count,
    calibrate_work_scale,
    decode_rapl_energy,
    delta_energy,
    derive_uncore,
    efficiency,
    energy_from_counter,
    event_checksum,
    integrate_power,
    read_trace,
    run_workload,
    subtract_idle,
)
from ._core import run_sweep as _run_sweep_json


def run_sweep(*args, **kwargs):
    """Run a thread-scaling sweep; returns the report as a dict."""
    return _json.loads(_run_sweep_json(*args, **kwargs))


__all__ = [
    "PerfwattError",
    "__version__",
    "active_worker_count",
    "calibrate_work_scale",
    "decode_rapl_energy",
    "delta_energy",
    "derive_uncore",
    "efficiency",
    "energy_from_counter",
    "event_checksum",
    "integrate_power",
    "read_trace",
    "run_sweep",
    "run_workload",
    "subtract_idle",
]
