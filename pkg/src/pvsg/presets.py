"""Shipped scenario presets: the five study cases and the penetration sweep.

All dynamic gains here are pinned calibration results: the steady-state
stiffness budget is exact algebra (diesel droop 20 kW/Hz on a 50 kW base,
battery droop ~5 kW/Hz, load relief 15 kW/Hz, PV droop 12 kW/Hz per 15 kW
unit), while inertias and the analogic coefficient were tuned so the Case-1
and Case-2 transients land on the published nadir/peak values.
"""

from __future__ import annotations

import math
from dataclasses import replace
from functools import lru_cache

import numpy as np

from .curves import fit_deloaded_curve, fit_pmax_curve
from .errors import DomainError
from .grid import BatteryVsgParams, DieselParams
from .prc import default_step_gain
from .pv_model import grid_unit_params, _P_STRING_STC
from .sim import PvUnitConfig, Scenario
from .vsg import OMEGA0_50HZ, VsgParams

PRESET_NAMES = ("case1", "case2", "case3", "case4", "case5",
                "pen30", "pen50", "pen70")

# Load damping: 10 kW per Hz of frequency deviation, expressed per rad/s.
D_LOAD = 10000.0 / (2.0 * math.pi)

# Calibrated diesel dynamics shared by every preset (p_rated varies).
_DIESEL_DYN = dict(droop=0.038, t_sm=0.05, t_d=1.0, h=1.5)

@lru_cache(maxsize=None)
def _unit_curves(n_parallel: int, reserve: float):
    arr = grid_unit_params(n_parallel * _P_STRING_STC)
    de = fit_deloaded_curve(arr, reserve)
    pmax = fit_pmax_curve(arr)
    return arr, de, pmax


# Controller gains per strategy, per-unit on the unit rating.  The droop
# (dp = 40) fixes the quasi-steady release; the inertias and the analogic
# coefficient are transient calibration results.
_MODE_GAINS = {
    "none": {"j": 1.0, "a_coeff": 1.0, "d": 0.0},           # never exercised
    "prc_vsg": {"j": 1.06, "a_coeff": 1.0, "d": 0.0},
    "proposed_vsg": {"j": 30.0, "a_coeff": 500.0, "d": 50.0},
}


def _pv_unit(p_rated: float, count: int, mode: str = "proposed_vsg",
             reserve: float = 0.2) -> PvUnitConfig:
    n_par = max(1, round(p_rated / _P_STRING_STC))
    arr, de, pmax = _unit_curves(n_par, reserve)
    g = _MODE_GAINS[mode]
    vsg = VsgParams(j=g["j"], dp=40.0, a_coeff=g["a_coeff"],
                    p_rated=p_rated, d=g["d"], washout_tc=0.1)
    return PvUnitConfig(
        array=arr, count=count, reserve=reserve, de_curve=de, pmax_curve=pmax,
        vsg=vsg, k1=default_step_gain(de))


def _base_case(name: str, mode: str) -> Scenario:
    """Common dispatch of Cases 1-5: 50 kW diesel, 10 kW battery, 3x15 kW PV."""
    return Scenario(
        name=name, mode=mode, t_end=60.0,
        diesel=DieselParams(p_rated=50000.0, **_DIESEL_DYN),
        diesel_p_ref=20000.0,
        battery=BatteryVsgParams(p_rated=10000.0, j_b=0.2, dp_b=25.0,
                                 d_c=2000.0),
        battery_p_ref=5000.0,
        pv=_pv_unit(15000.0, count=3, mode=mode),
        d_load=D_LOAD,
    )


def make_case1(mode: str) -> Scenario:
    return replace(_base_case("case1", mode), load_steps=((30.0, 10000.0),))


def make_case2(mode: str) -> Scenario:
    return replace(_base_case("case2", mode), load_steps=((30.0, -10000.0),))


def make_case3(mode: str) -> Scenario:
    return replace(_base_case("case3", mode),
                   load_steps=((45.0, 8000.0),),
                   irradiance=((0.0, 1000.0), (30.0, 1000.0), (60.0, 850.0)))


def make_case4(mode: str) -> Scenario:
    return replace(_base_case("case4", mode),
                   load_steps=((45.0, -8000.0),),
                   irradiance=((0.0, 1000.0), (30.0, 1000.0), (60.0, 1150.0)))


def _case5_profiles():
    """Deterministic synthetic 160 s irradiance/load traces.

    Substitute for unpublished measured data: a smooth irradiance random
    walk around 850 W/m^2 and a load trace made of random steps, sampled at
    1 s and interpolated linearly.
    """
    rng = np.random.default_rng(20240817)
    t = np.arange(0.0, 161.0, 1.0)
    walk = np.cumsum(rng.normal(0.0, 12.0, len(t)))
    walk -= np.linspace(walk[0], walk[-1], len(t))   # pin both ends
    s = np.clip(850.0 + walk, 400.0, 1000.0)
    s[0] = 850.0
    # load: steps of a few kW every ~12 s, held between events
    load = np.zeros(len(t))
    lvl = 0.0
    for i in range(1, len(t)):
        if rng.random() < 1.0 / 12.0:
            lvl = float(np.clip(lvl + rng.normal(0.0, 2500.0), -6000.0, 6000.0))
        load[i] = lvl
    irr = tuple((float(ti), float(si)) for ti, si in zip(t, s))
    lp = tuple((float(ti), float(li)) for ti, li in zip(t, load))
    return irr, lp


def make_case5(mode: str) -> Scenario:
    irr, lp = _case5_profiles()
    return replace(_base_case("case5", mode), t_end=160.0,
                   irradiance=irr, load_profile=lp)


# Penetration sweep: the diesel machine keeps its 50 kW control base (same
# governor stiffness and inertia) while its clamp follows the installed
# rating; PV unit size grows with the penetration level.

_PEN_TABLE = {
    "pen30": {"pv_rated": 9051.0, "diesel_rated": 45400.0, "diesel_ref": 25000.0},
    "pen50": {"pv_rated": 15085.0, "diesel_rated": 31000.0, "diesel_ref": 15000.0},
    "pen70": {"pv_rated": 21119.0, "diesel_rated": 16600.0, "diesel_ref": 8000.0},
}


def make_penetration(name: str, mode: str) -> Scenario:
    row = _PEN_TABLE[name]
    return Scenario(
        name=name, mode=mode, t_end=60.0,
        diesel=DieselParams(p_rated=row["diesel_rated"], p_base=50000.0,
                            **_DIESEL_DYN),
        diesel_p_ref=row["diesel_ref"],
        battery=BatteryVsgParams(p_rated=5000.0, j_b=0.1, dp_b=25.0,
                                 d_c=2000.0),
        battery_p_ref=2500.0,
        pv=_pv_unit(row["pv_rated"], count=3, mode=mode),
        d_load=D_LOAD,
        load_steps=((40.0, 10000.0),),
    )


def make_preset(name: str, mode: str = "proposed_vsg") -> Scenario:
    """Build a shipped preset by name; raises DomainError on unknown names."""
    makers = {
        "case1": make_case1, "case2": make_case2, "case3": make_case3,
        "case4": make_case4, "case5": make_case5,
    }
    if name in makers:
        return makers[name](mode)
    if name in _PEN_TABLE:
        return make_penetration(name, mode)
    raise DomainError(
        f"unknown preset {name!r}; available: {', '.join(PRESET_NAMES)}")
