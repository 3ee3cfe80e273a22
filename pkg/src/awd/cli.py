"""Command-line entry point.

Subcommands: ``simulate``, ``dataset generate``, ``render``, ``eval``.
Exit codes are fixed for scripting: 0 on success, 2 for configuration or
format errors, 3 for runtime/numerical errors (instability, integrity).

``AWD_THREADS`` optionally caps the default worker count for dataset
generation; an explicit ``--workers`` always wins.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from .config import parse_config
from .dataset import generate, load_dataset
from .errors import ConfigurationError, FormatError, InstabilityError, IntegrityError
from .harness import design_matrix, evaluate, fit
from .npyio import load_array, save_array
from .solver import run

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def _default_workers() -> int:
    limit = os.cpu_count() or 1
    env = os.environ.get("AWD_THREADS")
    if env:
        try:
            limit = min(limit, max(1, int(env)))
        except ValueError:
            raise ConfigurationError(
                f"AWD_THREADS must be an integer, got {env!r}"
            ) from None
    return limit


def cmd_simulate(config_path: str, out_dir: str) -> int:
    cfg = parse_config(config_path)
    if cfg.source is None:
        raise ConfigurationError(
            "source.epicenter: required key is missing for simulate"
        )
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    started = time.perf_counter()
    result = run(cfg.grid, cfg.medium, cfg.source, cfg.sim,
                 probes=cfg.interrogators, rate=cfg.rate)
    wall = time.perf_counter() - started

    seis_path = out / "seismograms.npy"
    save_array(seis_path, np.stack([s.samples for s in result.seismograms]))
    outputs = {"seismograms": seis_path.name}
    if result.snapshots:
        snap_path = out / "snapshots.npy"
        save_array(snap_path, np.stack([f.values for _, f in result.snapshots]))
        outputs["snapshots"] = snap_path.name
    summary = {
        "dt": result.dt,
        "n_steps": result.n_steps,
        "duration": cfg.sim.duration,
        "rate": cfg.rate,
        "interrogators": [g.id for g in cfg.interrogators],
        "snapshot_times": [t for t, _ in result.snapshots],
        "wall_time_s": wall,
        "outputs": outputs,
    }
    (out / "summary.json").write_text(
        json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    print(f"simulate: {result.n_steps} steps at dt={result.dt:.6g} s "
          f"in {wall:.2f} s -> {out}")
    return EXIT_OK


def cmd_dataset_generate(config_path: str, out_dir: str, workers: int | None) -> int:
    cfg = parse_config(config_path)
    if cfg.dataset is None:
        raise ConfigurationError("dataset: required table is missing")
    if workers is None:
        workers = min(_default_workers(), cfg.dataset.count)
    manifest = generate(cfg.dataset, out_dir, workers=workers)
    print(f"dataset: wrote {len(manifest.records)} records "
          f"({cfg.dataset.split_name}) -> {out_dir}/manifest.json")
    return EXIT_OK


def _to_pgm(frame: np.ndarray) -> bytes:
    vmin = float(frame.min())
    vmax = float(frame.max())
    if vmax > vmin:
        scaled = np.round((frame - vmin) / (vmax - vmin) * 255.0)
    else:
        scaled = np.full(frame.shape, 128.0)
    body = scaled.astype(np.uint8).tobytes()
    h, w = frame.shape
    return f"P5\n{w} {h}\n255\n".encode("ascii") + body


def cmd_render(snapshot_file: str, fmt: str, out_path: str, frame: int) -> int:
    data = load_array(snapshot_file)
    if data.ndim == 2:
        img = data
    elif data.ndim == 3:
        try:
            img = data[frame]
        except IndexError:
            raise ConfigurationError(
                f"--frame {frame} out of range for {data.shape[0]} frames"
            ) from None
    else:
        raise ConfigurationError(
            f"can only render 2-D frames, got array of shape {data.shape}"
        )
    out = Path(out_path)
    if fmt == "pgm":
        out.write_bytes(_to_pgm(img))
    else:
        with open(out, "w", newline="") as fh:
            for row in img:
                fh.write(",".join(f"{v:.17g}" for v in row))
                fh.write("\n")
    print(f"render: {img.shape[0]}x{img.shape[1]} frame -> {out}")
    return EXIT_OK


def cmd_eval(train_manifest: str, test_manifest: str, model: str,
             input_mode: str, out_report: str, knn_k: int,
             ridge_lambda: float) -> int:
    if model not in ("baseline", "ridge", "knn"):
        raise ConfigurationError(
            f"--model must be baseline|ridge|knn, got {model!r}"
        )
    train = list(load_dataset(train_manifest))
    test = list(load_dataset(test_manifest))
    X, Y = design_matrix(train, input_mode)
    fitted = fit(model, X, Y, k=knn_k, lam=ridge_lambda)
    report = evaluate(fitted, test, input_mode)
    out = Path(out_report)
    if out.parent != Path(""):
        out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(report.to_json(), encoding="utf-8")
    report.write_residuals_csv(out.with_suffix(".residuals.csv"))
    per_coord = ", ".join(f"{v:.6g}" for v in report.per_coordinate_mse)
    print(f"eval: model={model} mode={input_mode} "
          f"total MSE = {report.total_mse:.6g} (per coordinate: {per_coord})")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="awd",
        description="Acoustic wave simulation and dataset generation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run one simulation from a config")
    p_sim.add_argument("-c", "--config", required=True, help="TOML config path")
    p_sim.add_argument("-o", "--out", required=True, help="output directory")

    p_ds = sub.add_parser("dataset", help="dataset operations")
    ds_sub = p_ds.add_subparsers(dest="dataset_command", required=True)
    p_gen = ds_sub.add_parser("generate", help="generate a dataset from a config")
    p_gen.add_argument("-c", "--config", required=True, help="TOML config path")
    p_gen.add_argument("-o", "--out", required=True, help="output directory")
    p_gen.add_argument("--workers", type=int, default=None,
                       help="worker processes (default: machine parallelism, "
                            "capped by AWD_THREADS)")

    p_render = sub.add_parser("render", help="export a snapshot as PGM or CSV")
    p_render.add_argument("snapshot", help="NPY snapshot file")
    p_render.add_argument("--format", choices=("pgm", "csv"), default="pgm")
    p_render.add_argument("-o", "--out", required=True, help="output file")
    p_render.add_argument("--frame", type=int, default=-1,
                          help="frame index for stacked snapshot files")

    p_eval = sub.add_parser("eval", help="fit on a train dataset, report test MSE")
    p_eval.add_argument("--train", required=True, help="training manifest.json")
    p_eval.add_argument("--test", required=True, help="testing manifest.json")
    p_eval.add_argument("--model", required=True,
                        help="baseline | ridge | knn")
    p_eval.add_argument("--input-mode", choices=("raw", "features"),
                        default="features")
    p_eval.add_argument("-o", "--out", required=True, help="report JSON path")
    p_eval.add_argument("--knn-k", type=int, default=5)
    p_eval.add_argument("--ridge-lambda", type=float, default=1.0)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "simulate":
            return cmd_simulate(args.config, args.out)
        if args.command == "dataset":
            return cmd_dataset_generate(args.config, args.out, args.workers)
        if args.command == "render":
            return cmd_render(args.snapshot, args.format, args.out, args.frame)
        return cmd_eval(args.train, args.test, args.model, args.input_mode,
                        args.out, args.knn_k, args.ridge_lambda)
    except (ConfigurationError, FormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (InstabilityError, IntegrityError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
