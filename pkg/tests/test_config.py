"""Config parser tests: preset golden equality, overrides, errors, events."""

import pytest

from pvsg.config import parse_config, parse_config_path
from pvsg.errors import ConfigError
from pvsg.presets import make_preset


def test_preset_reference_is_golden():
    for mode in ("none", "prc_vsg", "proposed_vsg"):
        scn = parse_config(f"preset = case1\nmode = {mode}\n")
        assert scn == make_preset("case1", mode)


def test_default_is_eventless_custom_scenario():
    scn = parse_config("")
    assert scn.name == "custom"
    assert scn.load_steps == ()
    assert scn.mode == "proposed_vsg"


def test_section_overrides():
    scn = parse_config(
        "preset = case1\nmode = none\n"
        "[sim]\nt_end = 10\ndt = 0.0005\n"
        "[diesel]\nh = 2.5\np_ref = 22000\n"
        "[battery]\nd_c = 1500\n"
        "[grid]\nd_load = 2000\n")
    assert scn.t_end == 10.0
    assert scn.dt == 0.0005
    assert scn.diesel.h == 2.5
    assert scn.diesel_p_ref == 22000.0
    assert scn.battery.d_c == 1500.0
    assert scn.d_load == 2000.0


def test_pv_overrides_rebuild_unit():
    base = make_preset("case1", "proposed_vsg")
    scn = parse_config("preset = case1\n[pv]\ncount = 4\nj = 25\n")
    assert scn.pv.count == 4
    assert scn.pv.vsg.j == 25.0
    resized = parse_config("preset = case1\n[pv]\np_rated = 9051\n")
    assert resized.pv.vsg.p_rated == 9051.0
    assert resized.pv.de_curve != base.pv.de_curve


def test_events_section():
    scn = parse_config(
        "preset = case1\n[events]\nload_step = 5 4000\nload_step = 8 -1000\n"
        "irradiance = 0:1000, 10:900\n")
    assert scn.load_steps == ((5.0, 4000.0), (8.0, -1000.0))
    assert scn.irradiance == ((0.0, 1000.0), (10.0, 900.0))
    # an events section, even empty, replaces the preset's schedule
    cleared = parse_config("preset = case1\n[events]\n")
    assert cleared.load_steps == ()


def test_error_lines_and_messages():
    with pytest.raises(ConfigError) as exc:
        parse_config("preset = case1\n[diesel]\nbogus = 1\n")
    assert exc.value.line == 3
    assert str(exc.value).startswith("line 3:")
    with pytest.raises(ConfigError):
        parse_config("[nosuch]\n")
    with pytest.raises(ConfigError):
        parse_config("preset = nosuch\n")
    with pytest.raises(ConfigError):
        parse_config("mode = bogus\n")
    with pytest.raises(ConfigError):
        parse_config("justaword\n")
    with pytest.raises(ConfigError):
        parse_config("[diesel]\nh = notanumber\n")
    with pytest.raises(ConfigError):
        parse_config("[events]\nload_step = 5\n")
    with pytest.raises(ConfigError):
        parse_config("[events]\nirradiance = 0-1000\n")


def test_comments_and_blank_lines_ignored():
    scn = parse_config("# a comment\n\npreset = case2   # trailing\n")
    assert scn.name == "case2"


def test_cli_style_overrides():
    scn = parse_config("preset = case1\n", overrides={"diesel.h": "2.0",
                                                      "mode": "none"})
    assert scn.diesel.h == 2.0
    assert scn.mode == "none"
    with pytest.raises(ConfigError):
        parse_config("", overrides={"nope.key": "1"})


def test_parse_config_path(tmp_path):
    p = tmp_path / "scn.cfg"
    p.write_text("preset = case1\nname = renamed\n")
    assert parse_config_path(p).name == "renamed"
