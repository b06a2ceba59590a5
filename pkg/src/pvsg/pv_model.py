"""Single-diode PV array model: implicit current solve, power, and MPP search.

The array is built from identical modules, ``n_series`` in series and
``n_parallel`` strings in parallel.  All voltages at the array terminal are
divided by ``n_series`` to obtain the module operating point; module current
is multiplied by ``n_parallel`` to obtain array current.

The diode equation is solved per module:

    I = Iph - I0*(exp((V + Rs*I)/Vt) - 1) - (V + Rs*I)/Rsh

with Iph proportional to irradiance, I0 fixed by the open-circuit condition
at reference irradiance, and Rsh scaling inversely with irradiance (the
convention under which the shipped resistance values were originally fitted;
a constant Rsh collapses the fill factor at low irradiance in a way that
contradicts the published power-voltage loci).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .errors import DomainError, SolverError

Q_ELECTRON = 1.602176634e-19
K_BOLTZMANN = 1.380649e-23

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class PvArrayParams:
    """Electrical constants of the single-diode array model.

    Thermal coefficients ``alpha``/``beta`` are fractional per degC (the
    datasheet quotes them in %/degC; divide by 100).
    """

    voc_stc: float          # module open-circuit voltage at STC [V]
    isc_stc: float          # module short-circuit current at STC [A]
    alpha: float            # short-circuit thermal coefficient [1/degC]
    beta: float             # open-circuit thermal coefficient [1/degC]
    a_diode: float          # diode ideality factor (per cell)
    rs: float               # module series resistance [ohm]
    rsh: float              # module shunt resistance at STC [ohm]
    n_series: int           # modules in series
    n_parallel: int         # parallel strings
    cells_per_module: int = 96
    s_stc: float = 1000.0   # [W/m^2]
    t_stc: float = 25.0     # [degC]

    def __post_init__(self):
        if self.rs <= 0 or self.rsh <= 0:
            raise DomainError("Rs and Rsh must be positive")
        if self.n_series < 1 or self.n_parallel < 1:
            raise DomainError("n_series and n_parallel must be >= 1")
        if self.isc_stc <= 0 or self.voc_stc <= 0:
            raise DomainError("isc_stc and voc_stc must be positive")

    # -- derived module-level quantities -------------------------------

    def thermal_voltage(self, temp: float) -> float:
        """Module thermal voltage A*Ncell*k*T/q [V]."""
        tk = temp + 273.15
        return self.a_diode * self.cells_per_module * K_BOLTZMANN * tk / Q_ELECTRON

    def photocurrent(self, s: float, temp: float) -> float:
        """Irradiance- and temperature-corrected photogenerated current [A]."""
        return (s / self.s_stc) * self.isc_stc * (1.0 + self.alpha * (temp - self.t_stc))

    def voc_module(self, s: float, temp: float) -> float:
        """Module open-circuit voltage at (s, temp) [V].

        Temperature correction is linear; the irradiance correction is
        logarithmic for s below STC (a linear reading of the correction term
        produces a near-constant Voc, inconsistent with measured loci).
        """
        voc = self.voc_stc * (1.0 + self.beta * (temp - self.t_stc))
        if 0.0 < s < self.s_stc:
            voc += self.thermal_voltage(temp) * math.log(s / self.s_stc)
        return voc

    def voc_array(self, s: float, temp: float) -> float:
        return self.n_series * self.voc_module(s, temp)

    def saturation_current(self, temp: float) -> float:
        """Diode reverse saturation current [A], fixed by the STC open circuit."""
        vt = self.thermal_voltage(temp)
        voc_t = self.voc_stc * (1.0 + self.beta * (temp - self.t_stc))
        iph_t = self.isc_stc * (1.0 + self.alpha * (temp - self.t_stc))
        return (iph_t - voc_t / self.rsh) / math.expm1(voc_t / vt)

    def shunt_resistance(self, s: float) -> float:
        """Effective shunt resistance, inversely proportional to irradiance."""
        return self.rsh * self.s_stc / max(s, 1e-12)


# Shipped presets.  `table_a2` is the published 66x5 array of SunPower
# SPR-305E-WHT-D modules (~100 kW at STC); `grid_unit` scales the parallel
# string count so one unit rates near a target power for microgrid scenarios.

TABLE_A2 = PvArrayParams(
    voc_stc=64.2,
    isc_stc=5.96,
    alpha=0.061745e-2,
    beta=-0.27269e-2,
    a_diode=0.94504,
    rs=0.37152,
    rsh=269.5934,
    n_series=5,
    n_parallel=66,
)

# One parallel string (Ns=5) rates ~1.51 kW at STC.
_P_STRING_STC = 1508.5


def grid_unit_params(p_rated_w: float = 15000.0) -> PvArrayParams:
    """Array preset with n_parallel chosen so STC maximum power ~= p_rated_w."""
    n_par = max(1, round(p_rated_w / _P_STRING_STC))
    return replace(TABLE_A2, n_parallel=n_par)


def array_presets() -> dict:
    return {
        "tableA2": TABLE_A2,
        "grid15kW": grid_unit_params(15000.0),
    }


def _module_current(vm: float, vt: float, iph: float, i0: float, rs: float,
                    rsh: float, guess: float | None = None):
    """Solve the implicit diode equation for module current.

    Safeguarded Newton iteration with a bisection fallback on [imin, iph];
    the solution near open circuit can be slightly negative, so the lower
    bracket extends below zero.  Returns (current, relative_residual).
    """
    imin = -0.05 * max(iph, 1e-9) - 1e-6
    lo, hi = imin, iph
    arg0 = (vm + rs * imin) / vt
    if arg0 <= 500.0 and iph - i0 * math.expm1(arg0) - (vm + rs * imin) / rsh - imin < 0.0:
        # operating point far beyond open circuit: the true current is even
        # more negative, and the terminal clamps it to zero regardless
        return imin, 0.0
    i = guess if (guess is not None and lo < guess < hi) else 0.5 * (lo + hi)
    scale = max(iph, 1e-9)
    for _ in range(100):
        arg = (vm + rs * i) / vt
        if arg > 500.0:      # voltage far outside the physical branch
            f = -float("inf")
        else:
            e = math.expm1(arg)
            f = iph - i0 * e - (vm + rs * i) / rsh - i
        if f > 0.0:
            lo = i
        else:
            hi = i
        if math.isfinite(f):
            if abs(f) <= 1e-12 * scale:
                return i, abs(f) / scale
            df = -i0 * (e + 1.0) * rs / vt - rs / rsh - 1.0
            inew = i - f / df
        else:
            inew = 0.5 * (lo + hi)
        if not (lo < inew < hi):
            inew = 0.5 * (lo + hi)
        if abs(inew - i) < 1e-15 and abs(f) <= 1e-9 * scale:
            return inew, abs(f) / scale
        i = inew
    arg = (vm + rs * i) / vt
    f = iph - i0 * math.expm1(arg) - (vm + rs * i) / rsh - i
    res = abs(f) / scale
    if res > 1e-9:
        raise SolverError(
            f"diode current solve did not converge (residual {res:.3e})",
            residual=res)
    return i, res


def pv_current(v_pv: float, s: float, temp: float, params: PvArrayParams,
               guess: float | None = None) -> float:
    """Array terminal current [A] at terminal voltage v_pv.

    Clamped to >= 0: the converter stage only draws power, so second-quadrant
    operation is excluded.  `guess` optionally warm-starts the Newton solve
    with a previous array current.
    """
    if s < 0.0:
        raise DomainError(f"negative irradiance {s}")
    if v_pv < 0.0:
        raise DomainError(f"negative array voltage {v_pv}")
    if s == 0.0:
        return 0.0
    if v_pv > 1.2 * params.n_series * params.voc_stc * 1.05:
        raise DomainError(f"array voltage {v_pv} outside the modeled range")
    vm = v_pv / params.n_series
    vt = params.thermal_voltage(temp)
    iph = params.photocurrent(s, temp)
    i0 = params.saturation_current(temp)
    rsh = params.shunt_resistance(s)
    g = guess / params.n_parallel if guess is not None else None
    i, _ = _module_current(vm, vt, iph, i0, params.rs, rsh, guess=g)
    return max(i, 0.0) * params.n_parallel


def pv_power(v_pv: float, s: float, temp: float, params: PvArrayParams,
             guess: float | None = None) -> float:
    """Array power [W] at terminal voltage v_pv."""
    return v_pv * pv_current(v_pv, s, temp, params, guess=guess)


def find_mpp(s: float, temp: float, params: PvArrayParams,
             tol_v: float = 1e-3) -> tuple[float, float]:
    """Locate the maximum power point by golden-section search.

    Returns (v_mpp, p_mpp) at array level.  The power-voltage curve is
    single-peaked on [0, Voc], so the search finds the global maximum.
    """
    if s <= 0.0:
        raise DomainError(f"irradiance must be positive, got {s}")
    hi = params.voc_array(s, temp)
    if hi <= 0.0:
        raise DomainError(f"no positive open-circuit voltage at s={s}, temp={temp}")
    a, b = 0.0, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc = pv_power(c, s, temp, params)
    fd = pv_power(d, s, temp, params)
    while b - a > tol_v:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = pv_power(c, s, temp, params)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = pv_power(d, s, temp, params)
    v = 0.5 * (a + b)
    return v, pv_power(v, s, temp, params)
