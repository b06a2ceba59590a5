"""Reserve-tracker tests: step law, saturation, closed-loop convergence."""

import pytest

from pvsg.curves import estimate_vmpp
from pvsg.errors import DomainError
from pvsg.prc import (PrcState, default_step_gain, prc_step, prc_step_power,
                      saturate_vref)
from pvsg.pv_model import find_mpp, pv_power


def test_saturate_vref():
    assert saturate_vref(100.0, 150.0, 280.0) == 150.0
    assert saturate_vref(300.0, 150.0, 280.0) == 280.0
    assert saturate_vref(200.0, 150.0, 280.0) == 200.0
    with pytest.raises(DomainError):
        saturate_vref(200.0, 280.0, 150.0)


def test_default_step_gain_formula(unit15):
    de = unit15.de_curve
    k1 = default_step_gain(de, loop_gain=0.5)
    v = de.breakpoints[-1]
    # per-period loop gain on the steepest segment equals the requested value
    assert k1 * de.slopes[-1] / v ** 3 == pytest.approx(0.5, rel=1e-12)


def test_prc_step_sign_and_clamp(unit15):
    de = unit15.de_curve
    st = PrcState(v_ref=200.0, k1=unit15.k1, dv_max=0.5)
    # operating far above the curve power -> large positive step, clamped
    up = prc_step(st, 200.0, de.eval(200.0) + 1e6, de, 0.0, vmpp_hat=270.0)
    assert up.v_ref == 200.5
    down = prc_step(st, 200.0, de.eval(200.0) - 1e6, de, 0.0, vmpp_hat=270.0)
    assert down.v_ref == 199.5
    with pytest.raises(DomainError):
        prc_step(st, 0.0, 100.0, de, 0.0, vmpp_hat=270.0)


def test_prc_step_power_tracks_target(unit15):
    st = PrcState(v_ref=200.0, k1=unit15.k1, dv_max=0.5)
    hi = prc_step_power(st, 200.0, 8000.0, 9000.0, vmpp_hat=270.0)
    lo = prc_step_power(st, 200.0, 9000.0, 8000.0, vmpp_hat=270.0)
    assert hi.v_ref > 200.0 > lo.v_ref
    with pytest.raises(DomainError):
        prc_step_power(st, -1.0, 1.0, 1.0, vmpp_hat=270.0)


def test_shift_moves_the_operating_point_up(unit15):
    # a positive curve shift lowers the target power at fixed voltage, so the
    # tracker climbs toward the MPP (reserve release)
    de = unit15.de_curve
    arr = unit15.array
    st = PrcState(v_ref=208.0, k1=unit15.k1)
    p = pv_power(st.v_ref, 1000.0, 25.0, arr)
    shifted = prc_step(st, st.v_ref, p, de, 5.0, vmpp_hat=280.0)
    assert shifted.v_ref > st.v_ref


@pytest.mark.parametrize("s", (400.0, 700.0, 1000.0))
@pytest.mark.parametrize("side", ("left", "right"))
def test_closed_loop_reserve_convergence(unit15, s, side):
    """From either side, the tracker settles at 20% +- 1% reserve in <= 2000
    control periods against the real array model."""
    arr = unit15.array
    v_mpp, p_mpp = find_mpp(s, 25.0, arr, tol_v=1e-6)
    st = PrcState(v_ref=160.0 if side == "left" else 1.05 * v_mpp,
                  k1=unit15.k1)
    vmpp_hat = v_mpp
    for _ in range(2000):
        v = st.v_ref
        p = pv_power(v, s, 25.0, arr)
        try:
            vmpp_hat = estimate_vmpp(v, p, unit15.pmax_curve)
        except Exception:
            pass
        st = prc_step(st, v, p, unit15.de_curve, 0.0, vmpp_hat)
    p_final = pv_power(st.v_ref, s, 25.0, arr)
    reserve = 1.0 - p_final / p_mpp
    assert reserve == pytest.approx(0.20, abs=0.01)
