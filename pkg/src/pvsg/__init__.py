"""Deterministic microgrid frequency-response simulator with PV reserve
tracking and virtual-synchronous-generator control."""

from .curves import (DELOADED_D20_TABLE, PMAX_TABLE, PiecewiseLinearCurve,
                     estimate_vmpp, fit_deloaded_curve, fit_pmax_curve)
from .errors import (ConfigError, DomainError, EstimationError,
                     InstabilityError, PvsgError, SolverError)
from .grid import BatteryVsgParams, DieselParams
from .presets import PRESET_NAMES, make_preset
from .pv_model import TABLE_A2, PvArrayParams, find_mpp, pv_current, pv_power
from .sim import (Metrics, Scenario, SimResult, TimeSeries, compute_metrics,
                  run_scenario, steady_state_frequency)
from .vsg import CONTROLLER_MODES, VsgParams

__version__ = "0.1.0"

__all__ = [
    "CONTROLLER_MODES", "ConfigError", "DELOADED_D20_TABLE", "DomainError",
    "BatteryVsgParams", "DieselParams", "EstimationError", "InstabilityError",
    "Metrics", "PMAX_TABLE", "PRESET_NAMES", "PiecewiseLinearCurve",
    "PvArrayParams", "PvsgError", "Scenario", "SimResult", "SolverError",
    "TABLE_A2", "TimeSeries", "VsgParams", "compute_metrics", "estimate_vmpp",
    "find_mpp", "fit_deloaded_curve", "fit_pmax_curve", "make_preset",
    "pv_current", "pv_power", "run_scenario", "steady_state_frequency",
]
