"""Virtual synchronous generator variants for the PV DC-DC stage.

Three controller modes are supported:

* ``none`` -- plain reserve tracking on the unshifted de-loaded curve;
* ``prc_vsg`` -- an additive power command from a washout-filter frequency
  derivative plus droop (the baseline strategy this work improves on);
* ``proposed_vsg`` -- swing-equation emulation whose rotor-speed slip is
  converted to a voltage shift of the de-loaded curve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, InstabilityError

OMEGA0_50HZ = 2.0 * math.pi * 50.0

CONTROLLER_MODES = ("none", "prc_vsg", "proposed_vsg")


@dataclass(frozen=True)
class VsgParams:
    """Gains of the PV virtual machine.

    ``dp`` is a per-unit droop: the power increment is
    dp * (omega0 - omega_g)/omega0 * p_rated.  ``j`` is the virtual moment
    of inertia in SI torque units at array scale; ``a_coeff`` converts the
    accumulated rotor-angle slip (integral of omega_s - omega_g) to a curve
    shift in volts, so the shift rate is a_coeff * slip [V/s].
    """

    j: float                    # virtual inertia [kg m^2]
    dp: float                   # droop [pu power per pu frequency]
    a_coeff: float              # analogic coefficient [V/rad]
    p_rated: float              # droop power base [W]
    d: float = 0.0              # damping on the slip (omega_s - omega_g) [N m s/rad]
    omega0: float = OMEGA0_50HZ
    washout_tc: float = 0.1     # washout time constant of the baseline [s]

    def __post_init__(self):
        if self.j <= 0 or self.a_coeff <= 0 or self.dp < 0 or self.d < 0:
            raise DomainError("require j > 0, a_coeff > 0, dp >= 0, d >= 0")

    def droop_power(self, omega_g: float) -> float:
        return self.dp * (self.omega0 - omega_g) / self.omega0 * self.p_rated


@dataclass
class VsgState:
    """Rotor speed, accumulated curve shift and last torques of one PV VSG."""

    omega_s: float
    shift: float = 0.0
    t_m: float = 0.0
    t_e: float = 0.0


def vsg_step(state: VsgState, omega_g: float, p_sched: float, p_pv: float,
             dt: float, params: VsgParams):
    """Advance the emulated swing equation by one step.

    ``p_sched`` is the scheduled (de-loaded) power for the present
    environment; the virtual mechanical power is p_sched plus the droop
    increment, and the electrical torque comes from the measured PV power.
    The rotor therefore settles only once the array delivers the full
    droop-augmented schedule, with the accumulated slip held as the curve
    shift that sustains that release.  Returns (new_state, delta_v,
    p_command).
    """
    if dt <= 0.0:
        raise DomainError(f"non-positive dt {dt}")
    dp_power = params.droop_power(omega_g)
    p_command = p_sched + dp_power
    t_m = p_command / state.omega_s
    t_e = p_pv / state.omega_s
    dom = (t_m - t_e - params.d * (state.omega_s - omega_g)) / params.j
    omega_s = state.omega_s + dt * dom
    if omega_s <= 0.0:
        raise InstabilityError(
            f"virtual rotor speed driven non-positive ({omega_s:.3f} rad/s)",
            snapshot=state)
    delta_v = params.a_coeff * (omega_s - omega_g) * dt
    new = VsgState(omega_s=omega_s, shift=state.shift + delta_v, t_m=t_m, t_e=t_e)
    return new, delta_v, p_command


@dataclass
class PrcVsgState:
    """Washout filter state of the baseline controller."""

    washout_state: float = OMEGA0_50HZ      # low-pass companion state [rad/s]
    omega_g_filtered: float = OMEGA0_50HZ


def prc_vsg_power(state: PrcVsgState, omega_g: float, dt: float,
                  params: VsgParams):
    """Additive power command of the washout-based baseline.

    The frequency derivative comes from the washout s/(Tw s + 1) discretised
    by backward Euler; the droop term uses the washout's low-pass companion
    state as its frequency estimate (this strategy works entirely from the
    measured-and-filtered frequency, which is what delays its response
    relative to the swing-emulation variant).  Same per-unit base as the
    proposed controller.
    """
    if dt <= 0.0:
        raise DomainError(f"non-positive dt {dt}")
    tw = params.washout_tc
    x = state.washout_state + dt / (tw + dt) * (omega_g - state.washout_state)
    domega_dt = (omega_g - x) / tw
    p_f = -params.j * omega_g * domega_dt + params.droop_power(x)
    return PrcVsgState(washout_state=x, omega_g_filtered=omega_g), p_f


# -- controller wiring --------------------------------------------------

@dataclass
class Controller:
    """Per-step closure wiring the reserve tracker to a VSG variant.

    ``step(omega_g, p_sched, p_pv, dt)`` returns (shift, p_extra): the
    current curve shift (proposed mode) and the additive power command
    (baseline mode); the reserve tracker consumes one or the other.
    """

    mode: str
    params: VsgParams
    vsg: VsgState | None = None
    washout: PrcVsgState | None = None

    def __post_init__(self):
        if self.mode not in CONTROLLER_MODES:
            raise DomainError(
                f"unknown controller mode {self.mode!r}; pick one of {CONTROLLER_MODES}")
        if self.mode == "proposed_vsg" and self.vsg is None:
            self.vsg = VsgState(omega_s=self.params.omega0)
        if self.mode == "prc_vsg" and self.washout is None:
            self.washout = PrcVsgState(washout_state=self.params.omega0,
                                       omega_g_filtered=self.params.omega0)

    def step(self, omega_g: float, p_sched: float, p_pv: float,
             dt: float) -> tuple[float, float]:
        if self.mode == "none":
            return 0.0, 0.0
        if self.mode == "prc_vsg":
            self.washout, p_f = prc_vsg_power(self.washout, omega_g, dt, self.params)
            return 0.0, p_f
        self.vsg, _, _ = vsg_step(self.vsg, omega_g, p_sched, p_pv,
                                  dt, self.params)
        return self.vsg.shift, 0.0


def controller_select(mode: str, params: VsgParams) -> Controller:
    """Build the controller for one PV unit; raises on unknown mode."""
    return Controller(mode=mode, params=params)
