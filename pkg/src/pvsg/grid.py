"""Reduced-order microgrid frequency dynamics.

The network is collapsed to a single center-of-inertia frequency: diesel
governor/valve/engine lags, a battery VSG with one swing state, and a
frequency-dependent load damping close the power balance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, InstabilityError
from .vsg import OMEGA0_50HZ


@dataclass(frozen=True)
class DieselParams:
    """Diesel unit: droop governor, valve and engine lags, rotor inertia.

    ``p_base`` is the per-unit base of the governor gain and inertia; it
    defaults to ``p_rated`` but can be pinned separately so scenarios that
    resize the machine keep identical dynamics (only the output clamp
    changes).
    """

    p_rated: float          # [W]
    droop: float = 0.05     # per-unit speed droop R
    t_sm: float = 0.05      # valve actuator time constant [s]
    t_d: float = 0.5        # engine time constant [s]
    h: float = 3.0          # inertia constant [s]
    p_base: float | None = None
    omega0: float = OMEGA0_50HZ

    def __post_init__(self):
        if self.t_sm <= 0 or self.t_d <= 0 or self.h <= 0:
            raise DomainError("diesel time constants must be positive")
        if not 0.0 < self.droop < 1.0:
            raise DomainError(f"droop must be in (0, 1), got {self.droop}")

    @property
    def base(self) -> float:
        return self.p_base if self.p_base is not None else self.p_rated

    def rotor_inertia(self) -> float:
        """Center-of-inertia constant M = 2 H P_base / omega0 [W s^2/rad]."""
        return 2.0 * self.h * self.base / self.omega0


@dataclass
class DieselState:
    valve: float        # valve actuator output [pu of base]
    engine: float       # engine mechanical power state [pu of base]


def diesel_step(state: DieselState, omega_g: float, dt: float,
                params: DieselParams, p_ref: float):
    """One step of governor + valve + engine; returns (state, p_mech [W]).

    Governor command is scheduled power plus 1/R times the per-unit
    frequency error; output is clamped to [0, p_rated].
    """
    if dt <= 0.0:
        raise DomainError(f"non-positive dt {dt}")
    err_pu = (params.omega0 - omega_g) / params.omega0
    cmd = p_ref / params.base + err_pu / params.droop
    valve = state.valve + dt / params.t_sm * (cmd - state.valve)
    engine = state.engine + dt / params.t_d * (valve - state.engine)
    p_mech = min(max(engine * params.base, 0.0), params.p_rated)
    return DieselState(valve=valve, engine=engine), p_mech


@dataclass(frozen=True)
class BatteryVsgParams:
    """Battery storage behind a conventional VSG.

    ``dp_b`` is the per-unit governor droop on ``p_rated``; ``d_c`` couples
    the rotor slip (omega_s - omega_g) to electrical output around the
    scheduled set-point, giving the inertial response without a network
    power-angle solve.
    """

    p_rated: float          # [W], output clamped to +-p_rated
    j_b: float              # virtual inertia [kg m^2]
    dp_b: float             # droop [pu power per pu frequency]
    d_c: float              # slip-to-power coupling [W per rad/s]
    omega0: float = OMEGA0_50HZ

    def __post_init__(self):
        if self.p_rated <= 0 or self.j_b <= 0 or self.d_c <= 0:
            raise DomainError("battery p_rated, j_b, d_c must be positive")


@dataclass
class BatteryState:
    omega_s: float      # virtual rotor speed [rad/s]


def battery_step(state: BatteryState, omega_g: float, dt: float,
                 params: BatteryVsgParams, p_ref: float):
    """One swing step of the battery VSG; returns (state, p_out [W]).

    Electrical output is the schedule plus the slip coupling; the governor
    droop acts on the rotor speed, so steady output follows the frequency
    deviation through the series combination of droop and coupling.
    """
    if dt <= 0.0:
        raise DomainError(f"non-positive dt {dt}")
    p_out = p_ref + params.d_c * (state.omega_s - omega_g)
    p_out = min(max(p_out, -params.p_rated), params.p_rated)
    p_m = p_ref + params.dp_b * (params.omega0 - state.omega_s) / params.omega0 * params.p_rated
    dom = (p_m - p_out) / (params.j_b * state.omega_s)
    return BatteryState(omega_s=state.omega_s + dt * dom), p_out


def battery_effective_droop(params: BatteryVsgParams) -> float:
    """Steady-state output sensitivity to grid frequency [W per rad/s]."""
    k_droop = params.dp_b * params.p_rated / params.omega0
    return k_droop * params.d_c / (k_droop + params.d_c)


def coi_step(omega_g: float, p_net: float, dt: float, m_sys: float,
             d_load: float, omega0: float = OMEGA0_50HZ, t: float = 0.0) -> float:
    """Advance the center-of-inertia frequency.

    p_net is total injection minus load [W]; d_load is the frequency
    damping of the load [W per rad/s].  Aborts when the frequency leaves a
    +-10% band around nominal.
    """
    if dt <= 0.0:
        raise DomainError(f"non-positive dt {dt}")
    omega_new = omega_g + dt * (p_net - d_load * (omega_g - omega0)) / m_sys
    if not (0.9 * omega0 <= omega_new <= 1.1 * omega0):
        raise InstabilityError(
            f"grid frequency left the +-10% band ({omega_new / (2 * math.pi):.2f} Hz)",
            t=t, snapshot={"omega_g": omega_new, "p_net": p_net})
    return omega_new
