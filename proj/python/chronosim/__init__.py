"""Discrete-event co-simulator for networked control systems.

Thin wrapper over the C++ core: scenario runs, the DC-servo benchmark,
parameter sweeps, schedulability analysis, and a few pure helpers.
"""

import json as _json

from ._core import (  # noqa: F401
    ConfigError,
    SimulationError,
    __version__,
    quadratic_cost,
    received_power,
    render_plots,
    response_time_fp,
    sweep_csv,
    tx_duration,
    tx_energy,
    validate,
)
from . import _core as _impl


def run(path, out_dir, seed=-1, until=-1.0):
    """Run a scenario file, write traces into out_dir, return the manifest."""
    return _json.loads(_impl.run_json(path, out_dir, seed, until))


def metrics(path, seed=-1, until=-1.0):
    """Run a scenario in memory and return its metrics dict."""
    return _json.loads(_impl.metrics_json(path, seed, until))


def bench_dcservo(policy="edf", loss=0.0, delay="", seed=1):
    """Run the DC-servo-over-WLAN benchmark and return its metrics dict."""
    return _json.loads(_impl.bench_dcservo_json(policy, loss, delay, seed))


def sweep(scenario_json, param, values, seeds=1):
    """Parameter sweep; returns the rows of the metrics table as dicts."""
    lines = sweep_csv(scenario_json, param, [str(v) for v in values], seeds).splitlines()
    header = lines[0].split(",")
    return [dict(zip(header, line.split(","))) for line in lines[1:]]
