"""Reproducible dataset generation and the on-disk interchange format.

A dataset is a directory with one NPY file per record (seismograms,
shape ``(n_interrogators, n_samples)``; optional snapshots, shape
``(n_snapshots, *grid_points)``) plus ``manifest.json`` holding the full
spec echo and per-record parameters, file paths, and CRC-32C checksums.

Every record is a pure function of ``(spec, index)``: its seed comes
from the SplitMix64 derivation, parameter draws consume a documented
stream, and the simulation itself is deterministic.  Records can
therefore be produced by any number of workers, in any order, and the
output bytes never change.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .acquisition import Interrogator
from .core import Grid, ScalarField, make_grid
from .errors import ConfigurationError, IntegrityError
from .media import SpeedField, TimeModulation, constant_medium, gradient_medium, layered_medium
from .npyio import array_bytes, parse_array
from .seeding import SplitMix64, derive_seed
from .solver import Boundary, SimConfig, SimResult, run
from .source import SourceSpec, Wavelet

FORMAT_VERSION = 1

__all__ = [
    "DatasetSpec", "DatasetRecord", "Manifest", "derive_seed", "crc32c",
    "generate", "load_dataset", "load_manifest", "draw_record_params",
    "simulate_record",
]


# ---------------------------------------------------------------------------
# CRC-32C (Castagnoli), table-driven; check value crc32c(b"123456789") is
# 0xE3069283.  Files here are small, so a pure-Python sweep is fine.

def _make_crc_table() -> list[int]:
    poly = 0x82F63B78
    table = []
    for i in range(256):
        c = i
        for _ in range(8):
            c = (c >> 1) ^ poly if c & 1 else c >> 1
        table.append(c)
    return table


_CRC_TABLE = _make_crc_table()


def crc32c(data: bytes) -> int:
    c = 0xFFFFFFFF
    for b in data:
        c = _CRC_TABLE[(c ^ b) & 0xFF] ^ (c >> 8)
    return c ^ 0xFFFFFFFF


def _checksum(data: bytes) -> str:
    return f"{crc32c(data):08x}"


# ---------------------------------------------------------------------------
# Builders: plain-dict descriptions -> domain objects.  The same dicts are
# echoed into the manifest, so a record is reconstructible from the file.

def build_grid(d: dict) -> Grid:
    return make_grid(int(d["ndim"]), d["points"], d["extent"])


def build_medium(grid: Grid, d: dict) -> SpeedField:
    preset = d["preset"]
    if preset == "constant":
        medium = constant_medium(grid, float(d["c"]))
    elif preset == "gradient":
        medium = gradient_medium(grid, float(d["c_top"]), float(d["c_bottom"]))
    elif preset == "layered":
        medium = layered_medium(
            grid,
            [(float(f), float(c)) for f, c in d["layers"]],
            tilt=float(d.get("tilt", 0.0)),
            fold_amplitude=float(d.get("fold_amplitude", 0.0)),
            fold_period=float(d.get("fold_period", 0.0)),
            seed=int(d.get("seed", 0)),
        )
    else:
        raise ConfigurationError(f"medium.preset: unknown preset {preset!r}")
    mod = d.get("modulation")
    if mod is None:
        return medium
    kind = mod["kind"]
    if kind == "sinusoid":
        modulation = TimeModulation(
            kind="sinusoid",
            amplitude=float(mod["amplitude"]),
            period=float(mod["period"]),
        )
    elif kind == "keyframes":
        frames = []
        for kf in mod["keyframes"]:
            frames.append(
                (float(kf["time"]), build_medium(grid, kf["field"]).base)
            )
        modulation = TimeModulation(kind="keyframes", keyframes=tuple(frames))
    else:
        raise ConfigurationError(f"medium.modulation.kind: unknown kind {kind!r}")
    return SpeedField(base=medium.base, modulation=modulation, name=medium.name)


def build_wavelet(d: dict) -> Wavelet:
    return Wavelet(
        kind=d["kind"],
        f0=float(d.get("f0", 0.0)),
        tau_w=float(d.get("tau_w", 0.0)),
        t0=float(d.get("t0", 0.0)),
    )


def build_sim(d: dict) -> SimConfig:
    boundary = d.get("boundary", "sponge")
    if isinstance(boundary, str):
        kind = "dirichlet-zero" if boundary == "dirichlet" else boundary
        b = Boundary(
            kind=kind,
            width=int(d.get("sponge_width", 16)),
            strength=float(d.get("sponge_strength", 3.0)),
        )
    else:
        b = boundary
    dt = d.get("dt", "auto")
    snapshot_every = d.get("snapshot_every")
    if snapshot_every in (0, None):
        snapshot_every = None
    else:
        snapshot_every = int(snapshot_every)
    return SimConfig(
        duration=float(d["duration"]),
        dt=dt if dt == "auto" else float(dt),
        cfl_safety=float(d.get("cfl_safety", 0.5)),
        alpha=float(d.get("alpha", 0.0)),
        boundary=b,
        snapshot_every=snapshot_every,
    )


def build_interrogators(entries) -> list[Interrogator]:
    return [
        Interrogator(position=tuple(e["position"]), id=str(e["id"]))
        for e in entries
    ]


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DatasetSpec:
    """Declarative description of a randomized simulation collection."""

    count: int
    master_seed: int
    grid: dict
    medium: dict
    source: dict          # wavelet kind/t0, sigma; amplitude/f0 are drawn
    sim: dict
    rate: float
    interrogators: tuple
    epicenter_ranges: tuple       # ((lo, hi), ...) one pair per axis
    amplitude_range: tuple
    f0_range: tuple
    epicenter_margin: float
    split_name: str = "train"
    snapshots: bool = False

    def validate(self) -> None:
        if self.count < 1:
            raise ConfigurationError(f"dataset.count must be >= 1, got {self.count}")
        grid = build_grid(self.grid)
        build_medium(grid, self.medium)
        build_sim(self.sim)
        if len(self.epicenter_ranges) != grid.ndim:
            raise ConfigurationError(
                f"dataset.ranges.epicenter needs {grid.ndim} ranges, "
                f"got {len(self.epicenter_ranges)}"
            )
        sigma = float(self.source["sigma"])
        margin = max(float(self.epicenter_margin), 2.0 * sigma)
        for i, (lo, hi) in enumerate(self.epicenter_ranges):
            if lo > hi:
                raise ConfigurationError(
                    f"dataset.ranges.epicenter[{i}]: min {lo} > max {hi}"
                )
            half = grid.extent[i] / 2.0
            if lo < -half + margin or hi > half - margin:
                raise ConfigurationError(
                    f"dataset.ranges.epicenter[{i}] = [{lo}, {hi}] violates the "
                    f"{margin} m boundary margin (domain half-extent {half})"
                )
        for name, (lo, hi) in (
            ("amplitude", self.amplitude_range), ("f0", self.f0_range)
        ):
            if lo > hi:
                raise ConfigurationError(f"dataset.ranges.{name}: min {lo} > max {hi}")
        if self.f0_range[0] <= 0.0 and self.source["wavelet"]["kind"] == "ricker":
            raise ConfigurationError("dataset.ranges.f0 must be positive for ricker")
        if not build_interrogators(self.interrogators):
            raise ConfigurationError("dataset needs at least one interrogator")

    def to_dict(self) -> dict:
        return {
            "count": self.count,
            "master_seed": self.master_seed,
            "split_name": self.split_name,
            "grid": self.grid,
            "medium": self.medium,
            "source": self.source,
            "sim": self.sim,
            "rate": self.rate,
            "interrogators": [
                {"id": g["id"], "position": list(g["position"])}
                for g in self.interrogators
            ],
            "epicenter_margin": self.epicenter_margin,
            "ranges": {
                "epicenter": [list(r) for r in self.epicenter_ranges],
                "amplitude": list(self.amplitude_range),
                "f0": list(self.f0_range),
            },
            "snapshots": self.snapshots,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DatasetSpec":
        return cls(
            count=int(d["count"]),
            master_seed=int(d["master_seed"]),
            split_name=str(d.get("split_name", "train")),
            grid=d["grid"],
            medium=d["medium"],
            source=d["source"],
            sim=d["sim"],
            rate=float(d["rate"]),
            interrogators=tuple(
                {"id": g["id"], "position": tuple(g["position"])}
                for g in d["interrogators"]
            ),
            epicenter_ranges=tuple(tuple(r) for r in d["ranges"]["epicenter"]),
            amplitude_range=tuple(d["ranges"]["amplitude"]),
            f0_range=tuple(d["ranges"]["f0"]),
            epicenter_margin=float(d["epicenter_margin"]),
            snapshots=bool(d.get("snapshots", False)),
        )


@dataclass(frozen=True, eq=False)
class DatasetRecord:
    """One simulation: drawn inputs plus its recorded outputs."""

    index: int
    seed: int
    epicenter: tuple
    params: dict
    seismograms: list
    snapshots: list | None = None


def draw_record_params(spec: DatasetSpec, index: int):
    """Draw (epicenter, amplitude, f0) for a record, bit-reproducibly.

    The stream is SplitMix64 seeded with ``derive_seed(master, index)``;
    draws are consumed in a fixed order: epicenter coordinates in axis
    order, then amplitude, then f0.
    """
    seed = derive_seed(spec.master_seed, index)
    rng = SplitMix64(seed)
    epicenter = tuple(rng.uniform(lo, hi) for lo, hi in spec.epicenter_ranges)
    amplitude = rng.uniform(*spec.amplitude_range)
    f0 = rng.uniform(*spec.f0_range)
    return seed, epicenter, amplitude, f0


def _record_source(spec: DatasetSpec, epicenter, amplitude: float,
                   f0: float) -> SourceSpec:
    wav = dict(spec.source["wavelet"])
    if wav["kind"] == "ricker":
        wav["f0"] = f0
    return SourceSpec(
        epicenter=epicenter,
        amplitude=amplitude,
        sigma=float(spec.source["sigma"]),
        wavelet=build_wavelet(wav),
    )


def simulate_record(spec: DatasetSpec, index: int):
    """Run the simulation for one record; pure in (spec, index)."""
    seed, epicenter, amplitude, f0 = draw_record_params(spec, index)
    grid = build_grid(spec.grid)
    medium = build_medium(grid, spec.medium)
    sim = build_sim(spec.sim)
    if not spec.snapshots:
        sim = SimConfig(
            duration=sim.duration, dt=sim.dt, cfl_safety=sim.cfl_safety,
            alpha=sim.alpha, boundary=sim.boundary, snapshot_every=None,
        )
    source = _record_source(spec, epicenter, amplitude, f0)
    result = run(grid, medium, source, sim,
                 probes=build_interrogators(spec.interrogators), rate=spec.rate)
    params = {"amplitude": amplitude, "f0": f0}
    return seed, epicenter, params, result


def _seismogram_matrix(result: SimResult) -> np.ndarray:
    return np.stack([s.samples for s in result.seismograms])


def _record_paths(index: int) -> tuple[str, str]:
    return (
        f"records/record_{index:05d}.npy",
        f"records/record_{index:05d}_snaps.npy",
    )


def _write_record(spec_dict: dict, index: int, out_dir: str) -> dict:
    """Worker entry: simulate one record, write its files, return its entry."""
    spec = DatasetSpec.from_dict(spec_dict)
    try:
        seed, epicenter, params, result = simulate_record(spec, index)
    except Exception as exc:
        seed = derive_seed(spec.master_seed, index)
        raise RuntimeError(
            f"record {index} (seed {seed}) failed: {exc}"
        ) from exc
    root = Path(out_dir)
    seis_rel, snaps_rel = _record_paths(index)
    entry = {
        "index": index,
        "seed": seed,
        "epicenter": list(epicenter),
        "params": params,
        "files": {"seismograms": seis_rel},
        "checksums": {},
    }
    data = array_bytes(_seismogram_matrix(result))
    (root / seis_rel).write_bytes(data)
    entry["checksums"][seis_rel] = _checksum(data)
    if spec.snapshots and result.snapshots:
        frames = np.stack([f.values for _, f in result.snapshots])
        data = array_bytes(frames)
        (root / snaps_rel).write_bytes(data)
        entry["files"]["snapshots"] = snaps_rel
        entry["checksums"][snaps_rel] = _checksum(data)
        entry["snapshot_times"] = [t for t, _ in result.snapshots]
    return entry


@dataclass(frozen=True)
class Manifest:
    """Index of a generated dataset: spec echo plus per-record entries."""

    format_version: int
    spec: DatasetSpec
    records: list
    root: Path = field(default=Path("."), compare=False)

    def to_json(self) -> str:
        doc = {
            "format_version": self.format_version,
            "spec": self.spec.to_dict(),
            "records": self.records,
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def generate(spec: DatasetSpec, out_dir, workers: int = 1) -> Manifest:
    """Generate all records and write the manifest.

    Output bytes are identical for any ``workers`` value: records are
    independent, and the manifest is assembled in index order after all
    workers finish.  On failure, files written by this invocation are
    removed before the error propagates.
    """
    spec.validate()
    root = Path(out_dir)
    (root / "records").mkdir(parents=True, exist_ok=True)
    spec_dict = spec.to_dict()
    indices = list(range(spec.count))
    try:
        if workers <= 1:
            entries = [_write_record(spec_dict, i, str(root)) for i in indices]
        else:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                entries = list(
                    pool.map(_write_record, [spec_dict] * len(indices),
                             indices, [str(root)] * len(indices))
                )
    except BaseException:
        for i in indices:
            for rel in _record_paths(i):
                try:
                    (root / rel).unlink(missing_ok=True)
                except OSError:
                    pass
        raise
    entries.sort(key=lambda e: e["index"])
    manifest = Manifest(format_version=FORMAT_VERSION, spec=spec,
                        records=entries, root=root)
    (root / "manifest.json").write_text(manifest.to_json(), encoding="utf-8")
    return manifest


def load_manifest(manifest_path) -> Manifest:
    path = Path(manifest_path)
    doc = json.loads(path.read_text(encoding="utf-8"))
    if doc.get("format_version") != FORMAT_VERSION:
        raise ConfigurationError(
            f"unsupported manifest format_version {doc.get('format_version')}"
        )
    return Manifest(
        format_version=doc["format_version"],
        spec=DatasetSpec.from_dict(doc["spec"]),
        records=doc["records"],
        root=path.parent,
    )


def _verified_bytes(root: Path, rel: str, checksum: str) -> bytes:
    path = root / rel
    if not path.exists():
        raise IntegrityError(f"referenced file {rel} is missing")
    data = path.read_bytes()
    actual = _checksum(data)
    if actual != checksum:
        raise IntegrityError(
            f"checksum mismatch for {rel}: manifest says {checksum}, "
            f"file has {actual}"
        )
    return data


def load_dataset(manifest_path):
    """Yield records in index order, verifying checksums lazily per file."""
    manifest = load_manifest(manifest_path)
    spec = manifest.spec
    grid = build_grid(spec.grid)
    probe_ids = [g["id"] for g in spec.interrogators]
    from .acquisition import Seismogram

    for entry in sorted(manifest.records, key=lambda e: e["index"]):
        seis_rel = entry["files"]["seismograms"]
        data = _verified_bytes(manifest.root, seis_rel,
                               entry["checksums"][seis_rel])
        matrix = parse_array(data)
        if matrix.shape[0] != len(probe_ids):
            raise IntegrityError(
                f"{seis_rel}: expected {len(probe_ids)} traces, "
                f"found {matrix.shape[0]}"
            )
        seismograms = [
            Seismogram(interrogator_id=pid, rate=spec.rate, samples=row)
            for pid, row in zip(probe_ids, matrix)
        ]
        snapshots = None
        snaps_rel = entry["files"].get("snapshots")
        if snaps_rel:
            data = _verified_bytes(manifest.root, snaps_rel,
                                   entry["checksums"][snaps_rel])
            frames = parse_array(data)
            times = entry.get("snapshot_times", [])
            snapshots = [
                (float(t), ScalarField(grid, frame))
                for t, frame in zip(times, frames)
            ]
        yield DatasetRecord(
            index=int(entry["index"]),
            seed=int(entry["seed"]),
            epicenter=tuple(entry["epicenter"]),
            params=dict(entry["params"]),
            seismograms=seismograms,
            snapshots=snapshots,
        )
