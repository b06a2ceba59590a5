"""Power-reserve tracking: drive the PV voltage toward the intersection of
the array characteristic and the (possibly shifted) de-loaded curve."""

from __future__ import annotations

from dataclasses import dataclass, replace

from .curves import PiecewiseLinearCurve
from .errors import DomainError


def saturate_vref(v: float, v_min: float, vmpp_hat: float) -> float:
    """Clamp a voltage command to [v_min, vmpp_hat]."""
    if v_min >= vmpp_hat:
        raise DomainError(f"inverted saturation bounds ({v_min}, {vmpp_hat})")
    return min(max(v, v_min), vmpp_hat)


@dataclass(frozen=True)
class PrcState:
    """Voltage command and step-law gains of one reserve tracker."""

    v_ref: float            # current voltage command [V]
    k1: float               # variable-step gain [V^4/W]
    dv_max: float = 0.5     # maximum voltage step per control period [V]
    v_min: float = 150.0    # lower command saturation [V]


def default_step_gain(de_curve: PiecewiseLinearCurve,
                      loop_gain: float = 0.5) -> float:
    """Step gain sized for a stable discrete tracking loop.

    Tracking the de-loaded curve, the per-period loop gain is approximately
    k1 * slope / v^3; the steepest (last) segment at its breakpoint is the
    worst case, and holding the contraction factor near ``loop_gain`` there
    keeps the update from limit-cycling while converging in a few periods.
    """
    v = de_curve.breakpoints[-1]
    return loop_gain * v ** 3 / de_curve.slopes[-1]


def prc_step(state: PrcState, v_pv: float, p_pv: float,
             de_curve: PiecewiseLinearCurve, shift: float,
             vmpp_hat: float, p_extra: float = 0.0) -> PrcState:
    """One control period of the variable-step tracking rule.

    The target power is the de-loaded curve evaluated at (v_pv - shift),
    plus an optional additive command p_extra (used by the washout-based
    controller variant).  The step dv = k1*dP/v^3 already carries the sign
    of the power error; it is clamped to +-dv_max and the updated command is
    saturated to [v_min, vmpp_hat].
    """
    if v_pv <= 0.0:
        raise DomainError(f"non-positive PV voltage {v_pv}")
    target = de_curve.eval(max(v_pv - shift, 0.0)) + p_extra
    dp = p_pv - target
    dv = state.k1 * dp / (v_pv ** 3)
    if dv > state.dv_max:
        dv = state.dv_max
    elif dv < -state.dv_max:
        dv = -state.dv_max
    v_new = saturate_vref(state.v_ref + dv, state.v_min, vmpp_hat)
    return replace(state, v_ref=v_new)


def prc_step_power(state: PrcState, v_pv: float, p_pv: float,
                   p_target: float, vmpp_hat: float) -> PrcState:
    """One control period tracking a constant power target on the up-hill
    branch (used when an additive frequency-support command re-targets the
    operating point off the de-loaded curve).

    On the up-hill branch power rises with voltage, so a positive power
    deficit moves the command up: dv = k1*(p_target - p_pv)/v^3, clamped and
    saturated like the curve-tracking rule.  The MPP saturation bounds the
    release at the available maximum.
    """
    if v_pv <= 0.0:
        raise DomainError(f"non-positive PV voltage {v_pv}")
    dv = state.k1 * (p_target - p_pv) / (v_pv ** 3)
    if dv > state.dv_max:
        dv = state.dv_max
    elif dv < -state.dv_max:
        dv = -state.dv_max
    v_new = saturate_vref(state.v_ref + dv, state.v_min, vmpp_hat)
    return replace(state, v_ref=v_new)
