"""Sectioned key=value scenario configs.

A config may name a shipped preset and then override individual fields:

    preset = case1
    mode = proposed_vsg

    [diesel]
    h = 2.0

    [events]
    load_step = 30 10000
    irradiance = 0:1000, 30:1000, 60:850

Sections are [sim], [grid], [diesel], [battery], [pv] and [events]; unknown
sections or keys are rejected with the offending line number.  Without a
``preset`` line the defaults are the standard dispatch shared by the study
cases.
"""

from __future__ import annotations

from dataclasses import replace

from .errors import ConfigError
from .presets import PRESET_NAMES, _pv_unit, make_preset
from .sim import Scenario
from .vsg import CONTROLLER_MODES

_TOP_KEYS = {"preset": str, "mode": str, "name": str}

_SCHEMA = {
    "sim": {"t_end": float, "dt": float, "dt_control": float,
            "decimate": int, "temp": float, "pll_tc": float},
    "grid": {"d_load": float, "load_base": float},
    "diesel": {"p_rated": float, "p_ref": float, "droop": float,
               "t_sm": float, "t_d": float, "h": float, "p_base": float},
    "battery": {"p_rated": float, "p_ref": float, "j_b": float,
                "dp_b": float, "d_c": float},
    "pv": {"p_rated": float, "count": int, "reserve": float, "j": float,
           "dp": float, "a_coeff": float, "d": float, "washout_tc": float,
           "dv_max": float, "v_min": float, "k1": float},
    "events": {"load_step": None, "irradiance": None, "load_profile": None},
}


def _convert(value: str, typ, lineno: int, key: str):
    try:
        if typ is int:
            return int(value)
        if typ is float:
            return float(value)
        return value
    except ValueError:
        raise ConfigError(f"non-numeric value {value!r} for key {key!r}",
                          line=lineno) from None


def _parse_pairs(value: str, lineno: int, key: str):
    """Parse a 't:v, t:v, ...' breakpoint list."""
    points = []
    for chunk in value.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = chunk.split(":")
        if len(parts) != 2:
            raise ConfigError(
                f"expected 't:value' pairs for {key!r}, got {chunk!r}",
                line=lineno)
        t = _convert(parts[0].strip(), float, lineno, key)
        v = _convert(parts[1].strip(), float, lineno, key)
        points.append((t, v))
    if not points:
        raise ConfigError(f"empty breakpoint list for {key!r}", line=lineno)
    return tuple(points)


def _scan(text: str):
    """Tokenize config text into (top, sections, events) value maps."""
    top = {}
    sections = {name: {} for name in _SCHEMA}
    events = {"load_step": [], "irradiance": None, "load_profile": None}
    seen_events = False
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigError(f"malformed section header {line!r}",
                                  line=lineno)
            current = line[1:-1].strip()
            if current not in _SCHEMA:
                raise ConfigError(f"unknown section [{current}]", line=lineno)
            if current == "events":
                seen_events = True
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {line!r}",
                              line=lineno)
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if current is None:
            if key not in _TOP_KEYS:
                raise ConfigError(f"unknown top-level key {key!r}", line=lineno)
            top[key] = (value, lineno)
        elif current == "events":
            if key not in _SCHEMA["events"]:
                raise ConfigError(f"unknown key {key!r} in [events]",
                                  line=lineno)
            if key == "load_step":
                parts = value.split()
                if len(parts) != 2:
                    raise ConfigError(
                        f"load_step wants '<time> <delta_watts>', got {value!r}",
                        line=lineno)
                t = _convert(parts[0], float, lineno, key)
                dw = _convert(parts[1], float, lineno, key)
                events["load_step"].append((t, dw))
            else:
                events[key] = _parse_pairs(value, lineno, key)
        else:
            if key not in _SCHEMA[current]:
                raise ConfigError(f"unknown key {key!r} in [{current}]",
                                  line=lineno)
            sections[current][key] = _convert(value, _SCHEMA[current][key],
                                              lineno, key)
    return top, sections, events, seen_events


def parse_config(text: str, overrides: dict | None = None) -> Scenario:
    """Build a validated Scenario from config text.

    ``overrides`` maps 'section.key' strings to raw string values (the CLI's
    --set flags); they are applied after the file contents.
    """
    top, sections, events, seen_events = _scan(text)
    for path, value in (overrides or {}).items():
        section, _, key = path.partition(".")
        if not key and section in _TOP_KEYS:
            top[section] = (value, None)
            continue
        if section not in _SCHEMA or key not in _SCHEMA[section] \
                or section == "events":
            raise ConfigError(f"unknown override {path!r}")
        sections[section][key] = _convert(value, _SCHEMA[section][key],
                                          None, key)

    mode = top.get("mode", ("proposed_vsg", 0))[0]
    if mode not in CONTROLLER_MODES:
        raise ConfigError(f"unknown mode {mode!r}",
                          line=top.get("mode", ("", 0))[1])
    preset = top.get("preset")
    if preset is not None:
        name, lineno = preset
        if name not in PRESET_NAMES:
            raise ConfigError(f"unknown preset {name!r}", line=lineno)
        scn = make_preset(name, mode)
    else:
        scn = make_preset("case1", mode)
        scn = replace(scn, name="custom", load_steps=())
    if "name" in top:
        scn = replace(scn, name=top["name"][0])

    sim = sections["sim"]
    for key in sim:
        scn = replace(scn, **{key: sim[key]})
    grid = sections["grid"]
    if "d_load" in grid:
        scn = replace(scn, d_load=grid["d_load"])
    if "load_base" in grid:
        scn = replace(scn, load_base=grid["load_base"])

    diesel = dict(sections["diesel"])
    if "p_ref" in diesel:
        scn = replace(scn, diesel_p_ref=diesel.pop("p_ref"))
    if diesel:
        scn = replace(scn, diesel=replace(scn.diesel, **diesel))
    battery = dict(sections["battery"])
    if "p_ref" in battery:
        scn = replace(scn, battery_p_ref=battery.pop("p_ref"))
    if battery:
        scn = replace(scn, battery=replace(scn.battery, **battery))

    pv_keys = dict(sections["pv"])
    unit = scn.pv
    if "p_rated" in pv_keys or "reserve" in pv_keys:
        unit = _pv_unit(pv_keys.pop("p_rated", unit.vsg.p_rated),
                        unit.count, mode=mode,
                        reserve=pv_keys.pop("reserve", unit.reserve))
    unit_fields = {k: pv_keys.pop(k) for k in ("count", "k1", "dv_max", "v_min")
                   if k in pv_keys}
    if unit_fields:
        unit = replace(unit, **unit_fields)
    if pv_keys:    # remaining keys are VSG gains
        unit = replace(unit, vsg=replace(unit.vsg, **pv_keys))
    if unit is not scn.pv:
        scn = replace(scn, pv=unit)

    if seen_events or events["load_step"] or events["irradiance"] \
            or events["load_profile"]:
        scn = replace(
            scn,
            load_steps=tuple(events["load_step"]),
            irradiance=events["irradiance"] or ((0.0, 1000.0),),
            load_profile=events["load_profile"] or ())
    return scn


def parse_config_path(path) -> Scenario:
    with open(path) as fh:
        return parse_config(fh.read())
