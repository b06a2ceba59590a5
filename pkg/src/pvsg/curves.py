"""Piecewise-linear power-voltage curves.

Two curves drive the PV controls: the de-loaded curve (target power versus
array voltage at a fixed reserve ratio) and the maximum-power locus (MPP
power versus MPP voltage across irradiance).  Both are four-segment
piecewise-linear approximations; the published coefficient set ships as
pinned constants and a deterministic refit procedure reproduces them from
the array model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, EstimationError, SolverError
from .pv_model import PvArrayParams, find_mpp, pv_power


@dataclass(frozen=True)
class PiecewiseLinearCurve:
    """Four affine segments split by three ascending breakpoints.

    Evaluation is total on [0, inf): voltages below the first breakpoint use
    segment 1, voltages above the last use segment 4.
    """

    breakpoints: tuple[float, float, float]
    slopes: tuple[float, float, float, float]
    intercepts: tuple[float, float, float, float]

    def __post_init__(self):
        if len(self.breakpoints) != 3 or len(self.slopes) != 4 or len(self.intercepts) != 4:
            raise DomainError("curve needs 3 breakpoints, 4 slopes, 4 intercepts")
        b = self.breakpoints
        if not (b[0] < b[1] < b[2]):
            raise DomainError(f"breakpoints must be strictly ascending, got {b}")

    def segment_index(self, v: float) -> int:
        b = self.breakpoints
        if v < b[0]:
            return 0
        if v < b[1]:
            return 1
        if v < b[2]:
            return 2
        return 3

    def eval(self, v: float) -> float:
        """Curve power [W] at voltage v [V]."""
        if v < 0.0:
            raise DomainError(f"negative voltage {v}")
        i = self.segment_index(v)
        return self.slopes[i] * v + self.intercepts[i]

    def max_discontinuity(self) -> float:
        """Largest relative jump across a breakpoint (fit-quality check)."""
        worst = 0.0
        for i, b in enumerate(self.breakpoints):
            left = self.slopes[i] * b + self.intercepts[i]
            right = self.slopes[i + 1] * b + self.intercepts[i + 1]
            if left != 0.0:
                worst = max(worst, abs(right - left) / abs(left))
        return worst

    def to_dict(self) -> dict:
        return {
            "breakpoints": list(self.breakpoints),
            "slopes": list(self.slopes),
            "intercepts": list(self.intercepts),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PiecewiseLinearCurve":
        return cls(tuple(d["breakpoints"]), tuple(d["slopes"]), tuple(d["intercepts"]))


# Published coefficients for the 66x5 array: de-loaded curve at 20% reserve
# and the maximum-power locus.  Pinned bit-exactly for regression tests.

DELOADED_D20_TABLE = PiecewiseLinearCurve(
    breakpoints=(195.0, 204.8, 208.0),
    slopes=(38.6888, 2459.477551, 12688.5, 120668.0),
    intercepts=(0.0, -472053.8024, -2566957.6, -25026693.6),
)

PMAX_TABLE = PiecewiseLinearCurve(
    breakpoints=(256.4229, 269.0229, 273.3229),
    slopes=(36.77674654, 2391.15873, 11803.25581, 75417.5),
    intercepts=(0.0, -603717.4559, -3135787.107, -20523016.81),
)


def deload_voltage(params: PvArrayParams, target_p: float, s: float,
                   temp: float = 25.0, v_mpp: float | None = None,
                   tol_v: float = 1e-3) -> float:
    """Voltage on the up-hill branch where array power equals target_p.

    Bisection on [0, v_mpp]; raises SolverError when the target power is not
    bracketed (e.g. target above the available maximum).
    """
    if v_mpp is None:
        v_mpp, _ = find_mpp(s, temp, params)
    lo, hi = 0.0, v_mpp
    if pv_power(hi, s, temp, params) < target_p:
        raise SolverError(
            f"target power {target_p:.1f} W not reachable at s={s} W/m^2")
    while hi - lo > tol_v:
        mid = 0.5 * (lo + hi)
        if pv_power(mid, s, temp, params) < target_p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


DEFAULT_S_GRID = tuple(float(s) for s in range(100, 1001, 50))


def _fit_locus(points: list[tuple[float, float]]) -> PiecewiseLinearCurve:
    """Fit a 4-segment curve to an ascending (voltage, power) locus.

    Segment 1 passes through the origin and the first locus point.  The two
    interior breakpoints are chosen from the locus voltages by exhaustive
    search minimising the summed squared relative residual; each remaining
    segment is a least-squares line over its points (boundary points shared
    with neighbours, which keeps the segments near-continuous).
    """
    pts = sorted(points)
    v = np.array([p[0] for p in pts])
    p = np.array([p[1] for p in pts])
    n = len(pts)
    if n < 4:
        raise DomainError("need at least 4 locus points to fit 4 segments")

    b1 = v[0]
    a1 = p[0] / v[0]

    def seg_fit(i0, i1):
        # least-squares line over points i0..i1 inclusive
        vv, pp = v[i0:i1 + 1], p[i0:i1 + 1]
        if len(vv) == 2 or np.ptp(vv) < 1e-12:
            slope = (pp[-1] - pp[0]) / max(vv[-1] - vv[0], 1e-12)
            inter = pp[0] - slope * vv[0]
        else:
            slope, inter = np.polyfit(vv, pp, 1)
        return slope, inter

    best = None
    for j in range(1, n - 2):
        for k in range(j + 1, n - 1):
            s2 = seg_fit(0, j)
            s3 = seg_fit(j, k)
            s4 = seg_fit(k, n - 1)
            sse = 0.0
            for (sl, ic), (i0, i1) in zip((s2, s3, s4), ((0, j), (j, k), (k, n - 1))):
                resid = (sl * v[i0:i1 + 1] + ic - p[i0:i1 + 1]) / p[i0:i1 + 1]
                sse += float(np.dot(resid, resid))
            if best is None or sse < best[0]:
                best = (sse, j, k, s2, s3, s4)

    _, j, k, (a2, b2), (a3, b3), (a4, b4) = best
    return PiecewiseLinearCurve(
        breakpoints=(float(b1), float(v[j]), float(v[k])),
        slopes=(float(a1), float(a2), float(a3), float(a4)),
        intercepts=(0.0, float(b2), float(b3), float(b4)),
    )


def fit_pmax_curve(params: PvArrayParams, s_grid=DEFAULT_S_GRID,
                   temp: float = 25.0) -> PiecewiseLinearCurve:
    """Fit the maximum-power locus (v_mpp(s), p_mpp(s)) over an irradiance grid."""
    _check_s_grid(s_grid)
    locus = [find_mpp(s, temp, params) for s in sorted(s_grid)]
    return _fit_locus(locus)


def fit_deloaded_curve(params: PvArrayParams, d: float, s_grid=DEFAULT_S_GRID,
                       temp: float = 25.0) -> PiecewiseLinearCurve:
    """Fit the de-loaded curve for reserve ratio d over an irradiance grid.

    Each locus point sits on the up-hill branch at (1-d) of the available
    maximum power.
    """
    if not 0.0 < d < 1.0:
        raise DomainError(f"reserve ratio d must be in (0, 1), got {d}")
    _check_s_grid(s_grid)
    locus = []
    for s in sorted(s_grid):
        v_mpp, p_mpp = find_mpp(s, temp, params)
        target = (1.0 - d) * p_mpp
        v_de = deload_voltage(params, target, s, temp, v_mpp=v_mpp)
        locus.append((v_de, target))
    return _fit_locus(locus)


def _check_s_grid(s_grid):
    s_grid = list(s_grid)
    if not s_grid or min(s_grid) > 100.0 or max(s_grid) < 1000.0:
        raise DomainError("s_grid must span at least [100, 1000] W/m^2")


def estimate_vmpp(v_pv: float, p_pv: float,
                  pmax_curve: PiecewiseLinearCurve) -> float:
    """Estimate the MPP voltage from one up-hill operating point.

    Intersects the chord P = (p_pv/v_pv) * V with segments 2..4 of the
    maximum-power locus; segment 1 (start-up region) never intersects at
    meaningful power and is skipped.  Of the candidates falling inside their
    own segment's voltage range the largest is returned.
    """
    if v_pv <= 0.0 or p_pv <= 0.0:
        raise DomainError("operating point must have positive voltage and power")
    k = p_pv / v_pv
    b = pmax_curve.breakpoints
    ranges = ((b[0], b[1]), (b[1], b[2]), (b[2], math.inf))
    best = None
    for seg, (lo, hi) in zip((1, 2, 3), ranges):
        c = pmax_curve.slopes[seg]
        dcoef = pmax_curve.intercepts[seg]
        if abs(c - k) < 1e-9 * max(abs(c), 1.0):
            continue    # chord parallel to this segment
        cand = -dcoef / (c - k)
        if lo <= cand < hi and (best is None or cand > best):
            best = cand
    if best is None:
        raise EstimationError(
            f"no segment intersection for operating point ({v_pv:.2f} V, {p_pv:.1f} W)")
    return best
