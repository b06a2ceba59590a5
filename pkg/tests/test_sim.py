"""Scenario engine tests: traces, metrics, equilibrium and the steady-state
frequency oracle."""

import io
import math
from dataclasses import replace

import numpy as np
import pytest

from pvsg.errors import DomainError
from pvsg.presets import make_preset
from pvsg.pv_model import find_mpp, pv_power
from pvsg.sim import (Metrics, Scenario, TimeSeries, _profile_eval,
                      compute_metrics, initial_operating_point, run_scenario,
                      steady_state_frequency)


def short(scn, t_end=2.0):
    return replace(scn, t_end=t_end)


def test_profile_eval():
    prof = ((0.0, 1000.0), (10.0, 1000.0), (20.0, 800.0))
    assert _profile_eval(prof, -5.0) == 1000.0
    assert _profile_eval(prof, 15.0) == 900.0
    assert _profile_eval(prof, 30.0) == 800.0
    assert _profile_eval((), 5.0, hold=42.0) == 42.0
    assert _profile_eval(((0.0, 7.0),), 99.0) == 7.0


def test_timeseries_csv_round_trip_is_bit_exact():
    rng = np.random.default_rng(7)
    n = 50
    ts = TimeSeries(**{c: rng.normal(size=n) for c in TimeSeries.__annotations__})
    buf = io.StringIO()
    ts.to_csv(buf)
    buf.seek(0)
    back = TimeSeries.from_csv(buf)
    for c in TimeSeries.__annotations__:
        assert np.array_equal(getattr(ts, c), getattr(back, c))


def test_timeseries_rejects_bad_header():
    with pytest.raises(DomainError):
        TimeSeries.from_csv(io.StringIO("a,b,c\n1,2,3\n"))


def test_compute_metrics_on_synthetic_trace():
    t = np.arange(0.0, 20.0, 0.1)
    f = np.full_like(t, 50.0)
    f[50] = 49.5    # nadir at t=5
    f[60] = 50.3
    n = len(t)
    z = np.zeros(n)
    ts = TimeSeries(t=t, f_hz=f, p_diesel=z, p_batt=z + 3.0, p_pv=z,
                    p_load=z, v_pv=z, shift=z, vmpp_hat=z, irradiance=z)
    m = compute_metrics(ts)
    assert m.nadir == 49.5
    assert m.peak == 50.3
    assert m.t_nadir == pytest.approx(5.0)
    assert m.steady == pytest.approx(50.0)
    assert m.p_batt_peak == 3.0
    assert m.f_end == 50.0


def test_scenario_validation():
    scn = make_preset("case1", "none")
    with pytest.raises(DomainError):
        replace(scn, mode="bogus")
    with pytest.raises(DomainError):
        replace(scn, t_end=-1.0)
    with pytest.raises(DomainError):
        replace(scn, decimate=0)
    with pytest.raises(DomainError):
        replace(scn, irradiance=())


def test_initial_operating_point_on_both_curves():
    pv = make_preset("case1", "none").pv
    v0, p0 = initial_operating_point(pv, 1000.0, 25.0)
    v_mpp, _ = find_mpp(1000.0, 25.0, pv.array)
    assert v0 < v_mpp
    assert p0 == pytest.approx(pv.de_curve.eval(v0), abs=1.0)
    assert p0 == pytest.approx(pv_power(v0, 1000.0, 25.0, pv.array), abs=1e-6)


def test_eventless_run_holds_frequency_and_trace_shape():
    scn = short(replace(make_preset("case1", "none"), load_steps=()))
    res = run_scenario(scn)
    assert len(res.ts) == round(scn.t_end / scn.dt) // scn.decimate + 1
    assert np.max(np.abs(res.ts.f_hz - 50.0)) <= 1e-9
    assert res.ts.t[0] == 0.0


def test_pinned_load_base_creates_imbalance():
    scn = make_preset("case1", "none")
    res0 = run_scenario(short(replace(scn, load_steps=())))
    balanced = res0.ts.p_load[0]
    res = run_scenario(short(replace(scn, load_steps=(),
                                     load_base=balanced + 5000.0)))
    assert res.metrics.f_end < 50.0 - 0.05


def test_load_step_timing():
    scn = short(replace(make_preset("case1", "none"),
                        load_steps=((1.0, 10000.0),)), t_end=3.0)
    res = run_scenario(scn)
    before = res.ts.p_load[res.ts.t < 1.0]
    after = res.ts.p_load[res.ts.t >= 1.0]
    assert np.all(np.abs(after - before[0] - 10000.0) < 1e-6)


def test_steady_state_frequency_oracle():
    scn = make_preset("case1", "none")
    f0 = 50.0
    k_d = scn.diesel.base / (scn.diesel.droop * f0)
    k_load = scn.d_load * 2.0 * math.pi
    f_none = steady_state_frequency(scn, 10000.0)
    assert f_none < f0
    # with PV droop active the stiffness rises, so the dip must shrink
    f_prc = steady_state_frequency(scn.with_mode("prc_vsg"), 10000.0)
    assert f0 - f_prc < f0 - f_none
    # sanity bound: total stiffness exceeds diesel + load alone
    assert f0 - f_none < 10000.0 / (k_d + k_load)
    with pytest.raises(DomainError):
        steady_state_frequency(scn.with_mode("proposed_vsg"), 10000.0)


def test_metrics_reject_empty_trace():
    z = np.empty(0)
    ts = TimeSeries(t=z, f_hz=z, p_diesel=z, p_batt=z, p_pv=z, p_load=z,
                    v_pv=z, shift=z, vmpp_hat=z, irradiance=z)
    with pytest.raises(DomainError):
        compute_metrics(ts)
