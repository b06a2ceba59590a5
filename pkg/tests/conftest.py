"""Shared fixtures: one session-scoped batch of every preset x mode run.

The full batch costs ~30 s; every acceptance criterion that needs simulated
trajectories reuses it instead of re-running scenarios.
"""

import time

import pytest

from pvsg.presets import PRESET_NAMES, _pv_unit, make_preset
from pvsg.sim import run_scenario
from pvsg.vsg import CONTROLLER_MODES


@pytest.fixture(scope="session")
def batch():
    """{(preset, mode): SimResult} for all shipped presets, plus wall time."""
    results = {}
    t0 = time.perf_counter()
    for name in PRESET_NAMES:
        for mode in CONTROLLER_MODES:
            results[(name, mode)] = run_scenario(make_preset(name, mode))
    elapsed = time.perf_counter() - t0
    return results, elapsed


@pytest.fixture(scope="session")
def unit15():
    """The standard 15 kW PV unit configuration (array + fitted curves)."""
    return _pv_unit(15000.0, count=3, mode="none")
