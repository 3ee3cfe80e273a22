"""Strict TOML run configuration.

One document describes a whole run (grid, medium, source, stepping,
interrogators, and optionally a dataset spec).  Validation is strict:
unknown keys are rejected, every diagnostic names the offending field
path and the violated constraint, and cross-field constraints (CFL
feasibility, source margins, probe placement) are checked before any
compute starts.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .acquisition import Interrogator
from .core import Grid
from .dataset import (
    DatasetSpec,
    build_grid,
    build_medium,
    build_sim,
    build_wavelet,
)
from .errors import ConfigurationError
from .media import SpeedField
from .solver import SimConfig, cfl_dt, resolve_dt
from .source import SourceSpec

SCHEMA_VERSION = 1


@dataclass
class RunConfig:
    """Parsed, validated configuration plus the raw dicts it came from."""

    schema_version: int
    grid: Grid
    medium: SpeedField
    medium_dict: dict
    source_dict: dict
    source: SourceSpec | None
    sim: SimConfig
    sim_dict: dict
    rate: float
    interrogators: list[Interrogator]
    dataset: DatasetSpec | None


def _fail(path: str, message: str):
    raise ConfigurationError(f"{path}: {message}")


def _check_keys(table: dict, path: str, required: set, optional: set) -> None:
    if not isinstance(table, dict):
        _fail(path, "must be a table")
    for key in table:
        if key not in required and key not in optional:
            _fail(f"{path}.{key}", "unknown key")
    for key in required:
        if key not in table:
            _fail(f"{path}.{key}", "required key is missing")


def _number(table: dict, path: str, key: str, default=None):
    if key not in table:
        return default
    v = table[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        _fail(f"{path}.{key}", f"must be a number, got {type(v).__name__}")
    return float(v)


def _integer(table: dict, path: str, key: str, default=None):
    if key not in table:
        return default
    v = table[key]
    if isinstance(v, bool) or not isinstance(v, int):
        _fail(f"{path}.{key}", f"must be an integer, got {type(v).__name__}")
    return int(v)


def _string(table: dict, path: str, key: str, default=None, choices=None):
    if key not in table:
        return default
    v = table[key]
    if not isinstance(v, str):
        _fail(f"{path}.{key}", f"must be a string, got {type(v).__name__}")
    if choices is not None and v not in choices:
        _fail(f"{path}.{key}", f"must be one of {sorted(choices)}, got {v!r}")
    return v


def _number_list(table: dict, path: str, key: str, length=None):
    if key not in table:
        _fail(f"{path}.{key}", "required key is missing")
    v = table[key]
    if not isinstance(v, list) or any(
        isinstance(x, bool) or not isinstance(x, (int, float)) for x in v
    ):
        _fail(f"{path}.{key}", "must be a list of numbers")
    if length is not None and len(v) != length:
        _fail(f"{path}.{key}", f"must have exactly {length} entries, got {len(v)}")
    return [float(x) for x in v]


def _parse_grid(table: dict) -> dict:
    _check_keys(table, "grid", {"ndim", "points", "extent"}, {})
    ndim = _integer(table, "grid", "ndim")
    if ndim not in (2, 3):
        _fail("grid.ndim", f"must be 2 or 3, got {ndim}")
    points = table["points"]
    if not isinstance(points, list) or any(
        isinstance(p, bool) or not isinstance(p, int) for p in points
    ):
        _fail("grid.points", "must be a list of integers")
    if len(points) != ndim:
        _fail("grid.points", f"must have {ndim} entries, got {len(points)}")
    extent = _number_list(table, "grid", "extent", length=ndim)
    return {"ndim": ndim, "points": list(points), "extent": extent}


def _parse_medium(table: dict, path: str = "medium",
                  allow_modulation: bool = True) -> dict:
    preset_keys = {
        "constant": ({"c"}, {}),
        "gradient": ({"c_top", "c_bottom"}, {}),
        "layered": (
            {"layers"},
            {"tilt", "fold_amplitude", "fold_period", "seed"},
        ),
    }
    if not isinstance(table, dict):
        _fail(path, "must be a table")
    preset = _string(table, path, "preset", choices=set(preset_keys))
    if preset is None:
        _fail(f"{path}.preset", "required key is missing")
    required, optional = preset_keys[preset]
    optional = set(optional)
    if allow_modulation:
        optional.add("modulation")
    _check_keys(table, path, {"preset", *required}, optional)
    out: dict = {"preset": preset}
    if preset == "constant":
        out["c"] = _number(table, path, "c")
    elif preset == "gradient":
        out["c_top"] = _number(table, path, "c_top")
        out["c_bottom"] = _number(table, path, "c_bottom")
    else:
        layers = table["layers"]
        if not isinstance(layers, list) or not layers:
            _fail(f"{path}.layers", "must be a non-empty list of [fraction, speed] pairs")
        parsed = []
        for i, pair in enumerate(layers):
            if (
                not isinstance(pair, list) or len(pair) != 2
                or any(isinstance(x, bool) or not isinstance(x, (int, float))
                       for x in pair)
            ):
                _fail(f"{path}.layers[{i}]", "must be a [fraction, speed] pair")
            parsed.append([float(pair[0]), float(pair[1])])
        out["layers"] = parsed
        out["tilt"] = _number(table, path, "tilt", 0.0)
        out["fold_amplitude"] = _number(table, path, "fold_amplitude", 0.0)
        out["fold_period"] = _number(table, path, "fold_period", 0.0)
        out["seed"] = _integer(table, path, "seed", 0)
    if allow_modulation and "modulation" in table:
        out["modulation"] = _parse_modulation(table["modulation"], f"{path}.modulation")
    return out


def _parse_modulation(table: dict, path: str) -> dict:
    kind = _string(table, path, "kind", choices={"sinusoid", "keyframes"})
    if kind is None:
        _fail(f"{path}.kind", "required key is missing")
    if kind == "sinusoid":
        _check_keys(table, path, {"kind", "amplitude", "period"}, {})
        return {
            "kind": "sinusoid",
            "amplitude": _number(table, path, "amplitude"),
            "period": _number(table, path, "period"),
        }
    _check_keys(table, path, {"kind", "keyframes"}, {})
    frames = table["keyframes"]
    if not isinstance(frames, list) or not frames:
        _fail(f"{path}.keyframes", "must be a non-empty array of tables")
    out = []
    for i, kf in enumerate(frames):
        kf_path = f"{path}.keyframes[{i}]"
        _check_keys(kf, kf_path, {"time", "field"}, {})
        out.append({
            "time": _number(kf, kf_path, "time"),
            "field": _parse_medium(kf["field"], f"{kf_path}.field",
                                   allow_modulation=False),
        })
    return {"kind": "keyframes", "keyframes": out}


def _parse_source(table: dict, ndim: int) -> dict:
    _check_keys(
        table, "source", {"wavelet", "sigma"},
        {"f0", "tau_w", "t0", "amplitude", "epicenter"},
    )
    kind = _string(table, "source", "wavelet",
                   choices={"ricker", "gaussian-pulse"})
    wavelet = {
        "kind": kind,
        "f0": _number(table, "source", "f0", 0.0),
        "tau_w": _number(table, "source", "tau_w", 0.0),
        "t0": _number(table, "source", "t0", 0.0),
    }
    if kind == "ricker" and wavelet["f0"] <= 0.0:
        _fail("source.f0", "ricker wavelet needs f0 > 0")
    if kind == "gaussian-pulse" and wavelet["tau_w"] <= 0.0:
        _fail("source.tau_w", "gaussian-pulse wavelet needs tau_w > 0")
    out = {
        "wavelet": wavelet,
        "sigma": _number(table, "source", "sigma"),
        "amplitude": _number(table, "source", "amplitude", 1.0),
    }
    if "epicenter" in table:
        out["epicenter"] = _number_list(table, "source", "epicenter", length=ndim)
    return out


def _parse_sim(table: dict) -> dict:
    _check_keys(
        table, "sim", {"duration"},
        {"dt", "cfl_safety", "alpha", "boundary",
         "sponge_width", "sponge_strength", "snapshot_every"},
    )
    out = {
        "duration": _number(table, "sim", "duration"),
        "cfl_safety": _number(table, "sim", "cfl_safety", 0.5),
        "alpha": _number(table, "sim", "alpha", 0.0),
        "boundary": _string(table, "sim", "boundary", "sponge",
                            choices={"sponge", "dirichlet"}),
        "sponge_width": _integer(table, "sim", "sponge_width", 16),
        "sponge_strength": _number(table, "sim", "sponge_strength", 3.0),
        "snapshot_every": _integer(table, "sim", "snapshot_every", 0),
    }
    dt = table.get("dt", "auto")
    if isinstance(dt, str):
        if dt != "auto":
            _fail("sim.dt", f"must be a positive number or 'auto', got {dt!r}")
        out["dt"] = "auto"
    elif isinstance(dt, bool) or not isinstance(dt, (int, float)):
        _fail("sim.dt", "must be a positive number or 'auto'")
    else:
        out["dt"] = float(dt)
    return out


def _parse_interrogators(entries, ndim: int) -> list[dict]:
    if not isinstance(entries, list) or not entries:
        _fail("interrogators", "must be a non-empty array of tables")
    seen = set()
    out = []
    for i, e in enumerate(entries):
        path = f"interrogators[{i}]"
        _check_keys(e, path, {"id", "position"}, {})
        gid = _string(e, path, "id")
        if gid in seen:
            _fail(f"{path}.id", f"duplicate interrogator id {gid!r}")
        seen.add(gid)
        out.append({
            "id": gid,
            "position": _number_list(e, path, "position", length=ndim),
        })
    return out


def _parse_dataset(table: dict, ndim: int) -> dict:
    _check_keys(
        table, "dataset", {"count", "master_seed", "ranges"},
        {"split_name", "snapshots", "epicenter_margin"},
    )
    ranges = table["ranges"]
    _check_keys(ranges, "dataset.ranges",
                {"epicenter", "amplitude", "f0"}, {})
    epi = ranges["epicenter"]
    if not isinstance(epi, list) or len(epi) != ndim:
        _fail("dataset.ranges.epicenter", f"must be a list of {ndim} [min, max] pairs")
    pairs = []
    for i, pair in enumerate(epi):
        if not isinstance(pair, list) or len(pair) != 2:
            _fail(f"dataset.ranges.epicenter[{i}]", "must be a [min, max] pair")
        pairs.append([float(pair[0]), float(pair[1])])
    amplitude = _number_list(ranges, "dataset.ranges", "amplitude", length=2)
    f0 = _number_list(ranges, "dataset.ranges", "f0", length=2)
    snapshots = table.get("snapshots", False)
    if not isinstance(snapshots, bool):
        _fail("dataset.snapshots", "must be a boolean")
    return {
        "count": _integer(table, "dataset", "count"),
        "master_seed": _integer(table, "dataset", "master_seed"),
        "split_name": _string(table, "dataset", "split_name", "train"),
        "snapshots": snapshots,
        "epicenter_margin": _number(table, "dataset", "epicenter_margin", 0.0),
        "ranges": {"epicenter": pairs, "amplitude": amplitude, "f0": f0},
    }


def parse_config(path) -> RunConfig:
    """Parse and validate a TOML run configuration."""
    text = Path(path).read_bytes()
    try:
        doc = tomllib.loads(text.decode("utf-8"))
    except tomllib.TOMLDecodeError as exc:
        raise ConfigurationError(f"TOML parse error in {path}: {exc}") from None

    _check_keys(
        doc, "config",
        {"schema_version", "grid", "medium", "source",
         "sim", "acquisition", "interrogators"},
        {"dataset"},
    )
    version = _integer(doc, "config", "schema_version")
    if version != SCHEMA_VERSION:
        _fail("schema_version", f"must be {SCHEMA_VERSION}, got {version}")

    grid_dict = _parse_grid(doc["grid"])
    grid = build_grid(grid_dict)
    medium_dict = _parse_medium(doc["medium"])
    medium = build_medium(grid, medium_dict)
    source_dict = _parse_source(doc["source"], grid.ndim)
    sim_dict = _parse_sim(doc["sim"])
    sim = build_sim(sim_dict)
    sim.boundary.validate_for(grid)

    _check_keys(doc["acquisition"], "acquisition", {"rate"}, {})
    rate = _number(doc["acquisition"], "acquisition", "rate")
    if rate <= 0.0:
        _fail("acquisition.rate", f"must be positive, got {rate}")

    probes_dicts = _parse_interrogators(doc["interrogators"], grid.ndim)
    probes = [Interrogator(position=tuple(p["position"]), id=p["id"])
              for p in probes_dicts]
    for i, g in enumerate(probes):
        if not grid.contains(g.position):
            _fail(f"interrogators[{i}].position",
                  f"{g.position} is outside the domain")

    hard_limit = cfl_dt(grid, medium, safety=1.0)
    if sim_dict["dt"] != "auto" and sim_dict["dt"] > hard_limit:
        _fail("sim.dt",
              f"{sim_dict['dt']} exceeds the CFL bound {hard_limit:.6g} s "
              f"(h_min / (c_sup * sqrt(ndim)))")
    dt_eff = resolve_dt(grid, medium, sim)
    if sim.duration > 0.0 and dt_eff > 1.0 / rate:
        _fail("acquisition.rate",
              f"solver dt {dt_eff:.6g} s exceeds the sample period "
              f"{1.0 / rate:.6g} s; the solver must oversample the output rate")

    source = None
    wavelet = build_wavelet(source_dict["wavelet"])
    if "epicenter" in source_dict:
        source = SourceSpec(
            epicenter=tuple(source_dict["epicenter"]),
            amplitude=source_dict["amplitude"],
            sigma=source_dict["sigma"],
            wavelet=wavelet,
        )
        source.validate(grid)
    elif source_dict["sigma"] < max(grid.spacing):
        _fail("source.sigma",
              f"{source_dict['sigma']} is below one grid spacing "
              f"({max(grid.spacing)} m)")

    dataset_spec = None
    if "dataset" in doc:
        d = _parse_dataset(doc["dataset"], grid.ndim)
        if d["snapshots"] and not sim.snapshot_every:
            _fail("sim.snapshot_every",
                  "must be set when dataset.snapshots is enabled")
        dataset_spec = DatasetSpec(
            count=d["count"],
            master_seed=d["master_seed"],
            split_name=d["split_name"],
            grid=grid_dict,
            medium=medium_dict,
            source={
                "wavelet": source_dict["wavelet"],
                "sigma": source_dict["sigma"],
            },
            sim=sim_dict,
            rate=rate,
            interrogators=tuple(
                {"id": p["id"], "position": tuple(p["position"])}
                for p in probes_dicts
            ),
            epicenter_ranges=tuple(tuple(r) for r in d["ranges"]["epicenter"]),
            amplitude_range=tuple(d["ranges"]["amplitude"]),
            f0_range=tuple(d["ranges"]["f0"]),
            epicenter_margin=d["epicenter_margin"],
            snapshots=d["snapshots"],
        )
        dataset_spec.validate()

    return RunConfig(
        schema_version=version,
        grid=grid,
        medium=medium,
        medium_dict=medium_dict,
        source_dict=source_dict,
        source=source,
        sim=sim,
        sim_dict=sim_dict,
        rate=rate,
        interrogators=probes,
        dataset=dataset_spec,
    )
