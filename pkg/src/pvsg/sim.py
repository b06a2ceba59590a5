"""Scenario engine: fixed-step co-simulation of the microgrid and metrics.

A scenario holds the dispatch, the controller mode of the PV fleet, and the
event schedule (load steps plus piecewise-linear irradiance/load profiles).
All PV units are identical and see the same environment, so one
representative unit is simulated and its power scaled by the unit count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .curves import PiecewiseLinearCurve
from .errors import DomainError, EstimationError
from .grid import (BatteryState, BatteryVsgParams, DieselParams, DieselState,
                   battery_effective_droop, battery_step, coi_step, diesel_step)
from .prc import PrcState, prc_step, prc_step_power
from .pv_model import PvArrayParams, find_mpp, pv_power
from .vsg import OMEGA0_50HZ, CONTROLLER_MODES, Controller, VsgParams
from . import curves as _curves


@dataclass(frozen=True)
class PvUnitConfig:
    """One PV generation unit: array, curves, reserve tracker and VSG gains."""

    array: PvArrayParams
    count: int                      # identical units in the fleet
    reserve: float                  # de-loading ratio d
    de_curve: PiecewiseLinearCurve
    pmax_curve: PiecewiseLinearCurve
    vsg: VsgParams
    k1: float                       # reserve-tracker step gain [V^4/W]
    dv_max: float = 0.5
    v_min: float = 150.0

    def __post_init__(self):
        if self.count < 1:
            raise DomainError("pv unit count must be >= 1")
        if not 0.0 < self.reserve < 1.0:
            raise DomainError(f"reserve ratio must be in (0, 1), got {self.reserve}")


@dataclass(frozen=True)
class Scenario:
    """Complete description of one simulation run."""

    name: str
    mode: str                       # one of CONTROLLER_MODES
    t_end: float
    diesel: DieselParams
    diesel_p_ref: float
    battery: BatteryVsgParams
    battery_p_ref: float
    pv: PvUnitConfig
    d_load: float                   # load frequency damping [W per rad/s]
    dt: float = 1e-3
    dt_control: float = 1e-3        # reserve-tracker update period
    decimate: int = 10              # record every N steps
    pll_tc: float = 0.02            # frequency measurement lag [s]
    temp: float = 25.0
    load_base: float | None = None  # None: balance the initial dispatch
    # (time, delta watts) discontinuous load steps
    load_steps: tuple = ()
    # additive load profile, piecewise linear in (time, watts)
    load_profile: tuple = ()
    # irradiance profile, piecewise linear in (time, W/m^2); at least one point
    irradiance: tuple = ((0.0, 1000.0),)

    def __post_init__(self):
        if self.mode not in CONTROLLER_MODES:
            raise DomainError(
                f"unknown controller mode {self.mode!r}; pick one of {CONTROLLER_MODES}")
        if self.t_end <= 0 or self.dt <= 0:
            raise DomainError("t_end and dt must be positive")
        if self.decimate < 1:
            raise DomainError("decimate must be >= 1")
        if not self.irradiance:
            raise DomainError("irradiance profile needs at least one point")

    def with_mode(self, mode: str) -> "Scenario":
        return replace(self, mode=mode)


def _profile_eval(profile, t: float, hold: float = 0.0) -> float:
    """Piecewise-linear profile lookup; flat extrapolation at both ends."""
    if not profile:
        return hold
    if len(profile) == 1:
        return profile[0][1]
    ts = [p[0] for p in profile]
    vs = [p[1] for p in profile]
    return float(np.interp(t, ts, vs))


TRACE_COLUMNS = ("t", "f_hz", "p_diesel", "p_batt", "p_pv", "p_load",
                 "v_pv", "shift", "vmpp_hat", "irradiance")


@dataclass
class TimeSeries:
    """Recorded trajectory; one numpy array per column of TRACE_COLUMNS."""

    t: np.ndarray
    f_hz: np.ndarray
    p_diesel: np.ndarray
    p_batt: np.ndarray
    p_pv: np.ndarray                # total fleet PV power
    p_load: np.ndarray
    v_pv: np.ndarray
    shift: np.ndarray
    vmpp_hat: np.ndarray
    irradiance: np.ndarray

    def __len__(self):
        return len(self.t)

    def column(self, name: str) -> np.ndarray:
        if name not in TRACE_COLUMNS:
            raise DomainError(f"unknown trace column {name!r}")
        return getattr(self, name)

    def to_csv(self, fileobj) -> None:
        """Write CSV with full-precision decimals (exact float round-trip)."""
        fileobj.write(",".join(TRACE_COLUMNS) + "\n")
        cols = [self.column(c) for c in TRACE_COLUMNS]
        for row in zip(*cols):
            fileobj.write(",".join("%.17g" % x for x in row) + "\n")

    def to_csv_path(self, path) -> None:
        with open(path, "w") as fh:
            self.to_csv(fh)

    @classmethod
    def from_csv(cls, fileobj) -> "TimeSeries":
        header = fileobj.readline().strip().split(",")
        if tuple(header) != TRACE_COLUMNS:
            raise DomainError(f"unexpected trace header {header}")
        data = np.loadtxt(fileobj, delimiter=",", ndmin=2)
        if data.size == 0:
            raise DomainError("empty trace")
        return cls(**{c: np.ascontiguousarray(data[:, i])
                      for i, c in enumerate(TRACE_COLUMNS)})

    @classmethod
    def from_csv_path(cls, path) -> "TimeSeries":
        with open(path) as fh:
            return cls.from_csv(fh)


@dataclass(frozen=True)
class Metrics:
    """Scalar summary of one run; frequencies in Hz about 50 nominal."""

    nadir: float
    peak: float
    t_nadir: float
    steady: float           # mean over the final 5 s
    rms: float
    rmse: float             # about nominal
    p_batt_peak: float      # largest magnitude battery output [W]
    p_diesel_end: float
    p_pv_end: float
    f_end: float

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in (
            "nadir", "peak", "t_nadir", "steady", "rms", "rmse",
            "p_batt_peak", "p_diesel_end", "p_pv_end", "f_end")}


def compute_metrics(ts: TimeSeries, f_nom: float = 50.0,
                    steady_window: float = 5.0) -> Metrics:
    if len(ts) == 0:
        raise DomainError("cannot compute metrics of an empty trace")
    f = ts.f_hz
    i_min = int(np.argmin(f))
    tail = ts.t >= ts.t[-1] - steady_window
    dev = f - f_nom
    return Metrics(
        nadir=float(f.min()),
        peak=float(f.max()),
        t_nadir=float(ts.t[i_min]),
        steady=float(f[tail].mean()),
        rms=float(np.sqrt(np.mean(f ** 2))),
        rmse=float(np.sqrt(np.mean(dev ** 2))),
        p_batt_peak=float(ts.p_batt[int(np.argmax(np.abs(ts.p_batt)))]),
        p_diesel_end=float(ts.p_diesel[-1]),
        p_pv_end=float(ts.p_pv[-1]),
        f_end=float(f[-1]),
    )


@dataclass
class SimResult:
    scenario: Scenario
    ts: TimeSeries
    metrics: Metrics


def initial_operating_point(pv: PvUnitConfig, s0: float, temp: float,
                            tol_v: float = 1e-10):
    """Equilibrium PV voltage/power: intersection of the array curve with the
    de-loaded curve on the up-hill branch.

    The de-loaded curve is much steeper than the array characteristic near
    the crossing, so the difference changes sign exactly once on
    (0, v_mpp]; bisection is reliable.
    """
    arr = pv.array
    v_mpp, p_mpp = find_mpp(s0, temp, arr)
    lo, hi = 1.0, v_mpp

    def gap(v):
        return pv_power(v, s0, temp, arr) - pv.de_curve.eval(v)

    if gap(hi) > 0.0:
        # de-loaded curve never catches the array curve: run at the MPP
        return v_mpp, p_mpp
    while hi - lo > tol_v:
        mid = 0.5 * (lo + hi)
        if gap(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    v0 = 0.5 * (lo + hi)
    return v0, pv_power(v0, s0, temp, arr)


def _curve_inverse(curve: PiecewiseLinearCurve, p: float, v_hint: float,
                   tol_v: float = 1e-10) -> float:
    """Voltage where an increasing piecewise-linear curve reaches power p."""
    lo, hi = 0.0, v_hint
    while curve.eval(hi) < p:
        hi += 10.0
    while hi - lo > tol_v:
        mid = 0.5 * (lo + hi)
        if curve.eval(mid) < p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _power_target_equilibrium(pv: PvUnitConfig, s0: float, temp: float,
                              v0: float, p0: float, iters: int = 8):
    """Fixed point of the estimator-scheduled power target (prc_vsg mode).

    Alternates between estimating the MPP voltage from the operating point
    and moving to the up-hill voltage delivering the implied schedule; the
    map is a near-constant contraction, a few iterations suffice.
    """
    arr = pv.array
    v, p = v0, p0
    for _ in range(iters):
        vhat = estimate_safe(v, p, pv.pmax_curve,
                             fallback=arr.voc_array(s0, temp))
        target = (1.0 - pv.reserve) * pv.pmax_curve.eval(vhat)
        v = _curves.deload_voltage(arr, target, s0, temp, tol_v=1e-10)
        p = pv_power(v, s0, temp, arr)
    return v, p


def run_scenario(scn: Scenario, dt: float | None = None) -> SimResult:
    """Simulate one scenario with explicit-Euler fixed steps.

    The initial state is the exact equilibrium of the dispatch (the base
    load is balanced against the scheduled injections unless pinned), so a
    scenario without events holds its frequency.
    """
    dt = scn.dt if dt is None else dt
    pv = scn.pv
    arr = pv.array
    omega0 = scn.diesel.omega0
    n_steps = round(scn.t_end / dt)

    s0 = _profile_eval(scn.irradiance, 0.0)
    v0, p_pv0 = initial_operating_point(pv, s0, scn.temp)
    shift0 = 0.0
    if scn.mode in ("prc_vsg", "proposed_vsg"):
        # both support modes schedule power from the estimator, which
        # disagrees with the de-loaded curve by its fit error; start on the
        # schedule's own equilibrium (the proposed mode holds it through a
        # pre-solved curve shift)
        v0, p_pv0 = _power_target_equilibrium(pv, s0, scn.temp, v0, p_pv0)
        if scn.mode == "proposed_vsg":
            shift0 = v0 - _curve_inverse(pv.de_curve, p_pv0, v0)
    load_base = scn.load_base
    if load_base is None:
        load_base = scn.diesel_p_ref + scn.battery_p_ref + pv.count * p_pv0

    prc = PrcState(v_ref=v0, k1=pv.k1, dv_max=pv.dv_max, v_min=pv.v_min)
    ctrl = Controller(mode=scn.mode, params=pv.vsg)
    if ctrl.vsg is not None:
        ctrl.vsg.shift = shift0
    dstate = DieselState(valve=scn.diesel_p_ref / scn.diesel.base,
                         engine=scn.diesel_p_ref / scn.diesel.base)
    bstate = BatteryState(omega_s=omega0)
    m_sys = scn.diesel.rotor_inertia()

    omega_g = omega0
    omega_meas = omega0
    shift = 0.0
    vmpp_hat = estimate_safe(v0, p_pv0, pv.pmax_curve, fallback=arr.voc_array(s0, scn.temp))

    load_steps = sorted(scn.load_steps)
    step_idx = 0
    load_step_acc = 0.0
    next_prc_t = 0.0

    n_rec = n_steps // scn.decimate + 1
    rec = {c: np.empty(n_rec) for c in TRACE_COLUMNS}
    i_rec = 0

    # memo for the implicit PV solve: reuse when the operating point is frozen
    last_v = v0
    last_s = s0
    last_p = p_pv0
    i_guess = p_pv0 / v0 if v0 > 0 else None

    for k in range(n_steps + 1):
        t = k * dt
        s = _profile_eval(scn.irradiance, t)
        while step_idx < len(load_steps) and t >= load_steps[step_idx][0]:
            load_step_acc += load_steps[step_idx][1]
            step_idx += 1
        load = load_base + load_step_acc + _profile_eval(scn.load_profile, t)

        v = prc.v_ref
        if v == last_v and s == last_s:
            p_unit = last_p
        else:
            p_unit = pv_power(v, s, scn.temp, arr, guess=i_guess)
            last_v, last_s, last_p = v, s, p_unit
            if v > 0 and p_unit > 0:
                i_guess = p_unit / v
        p_sched = (1.0 - pv.reserve) * pv.pmax_curve.eval(vmpp_hat)
        shift, p_extra = ctrl.step(omega_meas, p_sched, p_unit, dt)
        # the reserve tracker is a sampled controller; its period stays
        # dt_control even when the integration step is refined
        if t + 0.5 * dt >= next_prc_t:
            try:
                vmpp_hat = _curves.estimate_vmpp(v, p_unit, pv.pmax_curve)
            except EstimationError:
                pass    # keep the previous estimate through degenerate points
            if scn.mode == "prc_vsg":
                prc = prc_step_power(prc, v, p_unit, p_sched + p_extra,
                                     vmpp_hat)
            else:
                prc = prc_step(prc, v, p_unit, pv.de_curve, shift, vmpp_hat)
            next_prc_t += scn.dt_control

        dstate, p_d = diesel_step(dstate, omega_g, dt, scn.diesel, scn.diesel_p_ref)
        bstate, p_b = battery_step(bstate, omega_g, dt, scn.battery, scn.battery_p_ref)

        p_pv_total = pv.count * p_unit
        if k % scn.decimate == 0 and i_rec < n_rec:
            rec["t"][i_rec] = t
            rec["f_hz"][i_rec] = omega_g / (2.0 * math.pi)
            rec["p_diesel"][i_rec] = p_d
            rec["p_batt"][i_rec] = p_b
            rec["p_pv"][i_rec] = p_pv_total
            rec["p_load"][i_rec] = load
            rec["v_pv"][i_rec] = v
            rec["shift"][i_rec] = shift
            rec["vmpp_hat"][i_rec] = vmpp_hat
            rec["irradiance"][i_rec] = s
            i_rec += 1

        p_net = p_d + p_b + p_pv_total - load
        omega_g = coi_step(omega_g, p_net, dt, m_sys, scn.d_load,
                           omega0=omega0, t=t)
        omega_meas += dt / scn.pll_tc * (omega_g - omega_meas)

    ts = TimeSeries(**{c: rec[c][:i_rec] for c in TRACE_COLUMNS})
    return SimResult(scenario=scn, ts=ts, metrics=compute_metrics(ts))


def estimate_safe(v, p, pmax_curve, fallback):
    """MPP-voltage estimate with a fallback for degenerate operating points."""
    try:
        return _curves.estimate_vmpp(v, p, pmax_curve)
    except (EstimationError, DomainError):
        return fallback


def steady_state_frequency(scn: Scenario, delta_load: float) -> float:
    """Algebraic post-event frequency [Hz] from the droop stiffness balance.

    Valid for modes whose primary response is a pure droop once transients
    decay: 'none' (PV contributes nothing) and 'prc_vsg' (washout dies out,
    droop remains).  The proposed mode approaches the same balance but keeps
    a slow drift and is excluded on purpose.
    """
    if scn.mode == "proposed_vsg":
        raise DomainError("no algebraic steady state for the proposed mode")
    f0 = scn.diesel.omega0 / (2.0 * math.pi)
    k_d = scn.diesel.base / (scn.diesel.droop * f0)
    k_b = battery_effective_droop(scn.battery) * 2.0 * math.pi
    k_load = scn.d_load * 2.0 * math.pi
    k_pv = 0.0
    if scn.mode == "prc_vsg":
        k_pv = scn.pv.count * scn.pv.vsg.dp * scn.pv.vsg.p_rated / f0
    return f0 - delta_load / (k_d + k_b + k_load + k_pv)
