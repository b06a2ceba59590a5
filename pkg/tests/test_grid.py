"""Grid-side tests: diesel governor algebra, battery droop, COI integration."""

import math

import pytest

from pvsg.errors import DomainError, InstabilityError
from pvsg.grid import (BatteryState, BatteryVsgParams, DieselParams,
                       DieselState, battery_effective_droop, battery_step,
                       coi_step, diesel_step)
from pvsg.vsg import OMEGA0_50HZ


def test_diesel_params_validation_and_base():
    with pytest.raises(DomainError):
        DieselParams(p_rated=50000.0, droop=0.0)
    with pytest.raises(DomainError):
        DieselParams(p_rated=50000.0, t_sm=-1.0)
    d = DieselParams(p_rated=31000.0, p_base=50000.0, h=1.5)
    assert d.base == 50000.0
    assert d.rotor_inertia() == pytest.approx(
        2.0 * 1.5 * 50000.0 / OMEGA0_50HZ, rel=1e-12)


def test_diesel_settles_on_droop_characteristic():
    # hold the frequency off-nominal; the lag chain must settle at
    # p_ref + (base/droop) * per-unit frequency error
    d = DieselParams(p_rated=50000.0, droop=0.038, t_sm=0.05, t_d=1.0, h=1.5)
    omega = OMEGA0_50HZ * (1.0 - 0.001)
    st = DieselState(valve=0.4, engine=0.4)
    for _ in range(20000):
        st, p = diesel_step(st, omega, 1e-3, d, p_ref=20000.0)
    expected = 20000.0 + 0.001 / 0.038 * 50000.0
    assert p == pytest.approx(expected, rel=1e-6)


def test_diesel_output_clamped():
    d = DieselParams(p_rated=50000.0, droop=0.02)
    st = DieselState(valve=2.0, engine=2.0)
    _, p = diesel_step(st, OMEGA0_50HZ, 1e-3, d, p_ref=20000.0)
    assert p == 50000.0
    st = DieselState(valve=-1.0, engine=-1.0)
    _, p = diesel_step(st, OMEGA0_50HZ, 1e-3, d, p_ref=0.0)
    assert p == 0.0


def test_battery_effective_droop_matches_simulation():
    b = BatteryVsgParams(p_rated=10000.0, j_b=0.2, dp_b=25.0, d_c=2000.0)
    omega = OMEGA0_50HZ - 0.1
    st = BatteryState(omega_s=OMEGA0_50HZ)
    for _ in range(200000):
        st, p = battery_step(st, omega, 1e-3, b, p_ref=5000.0)
    expected = 5000.0 + battery_effective_droop(b) * 0.1
    assert p == pytest.approx(expected, rel=1e-4)


def test_battery_output_clamped():
    b = BatteryVsgParams(p_rated=1000.0, j_b=0.2, dp_b=25.0, d_c=2000.0)
    st = BatteryState(omega_s=OMEGA0_50HZ + 10.0)
    _, p = battery_step(st, OMEGA0_50HZ, 1e-3, b, p_ref=0.0)
    assert p == 1000.0
    with pytest.raises(DomainError):
        battery_step(st, OMEGA0_50HZ, 0.0, b, p_ref=0.0)
    with pytest.raises(DomainError):
        BatteryVsgParams(p_rated=-1.0, j_b=0.2, dp_b=25.0, d_c=2000.0)


def test_coi_matches_analytic_first_order_decay():
    # constant injection deficit with load damping is a first-order system;
    # compare explicit Euler against its exact discrete solution
    m, d_load, dt = 400.0, 1500.0, 1e-4
    p_net = -5000.0
    omega = OMEGA0_50HZ
    for k in range(1, 5001):
        omega = coi_step(omega, p_net, dt, m, d_load)
        a = 1.0 - dt * d_load / m
        exact = OMEGA0_50HZ + (p_net / d_load) * (1.0 - a ** k)
        assert omega == pytest.approx(exact, rel=1e-9)


def test_coi_instability_band():
    with pytest.raises(InstabilityError) as exc:
        coi_step(OMEGA0_50HZ, -1e9, 1e-3, 100.0, 0.0, t=1.5)
    assert exc.value.t == 1.5
    assert exc.value.snapshot is not None
    with pytest.raises(DomainError):
        coi_step(OMEGA0_50HZ, 0.0, -1e-3, 100.0, 0.0)
