"""Command-line interface: train / infer / generate-schwinger / metrics / export-plotdata.

Configuration comes from a JSON file with flag overrides on top; the seed
additionally honours the ``QSOM_SEED`` environment variable with precedence
flag > env > file. Exit codes: 0 success, 1 invalid configuration, 2 I/O or
data-format failure.

Labels never reach a trainer: ``load_iris`` hands features and labels back
separately and the training path consumes feature arrays (or raw
statevectors) only.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import metrics as metrics_mod
from . import schwinger as schwinger_mod
from . import som as som_mod
from .featuremap import FeatureMapConfig
from .kernel import KernelEstimator

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_IO = 2

DEFAULT_INIT_LOW = -math.pi / 2
DEFAULT_INIT_HIGH = math.pi / 2


class ConfigError(Exception):
    """Invalid configuration; message carries the offending field."""


class DataError(Exception):
    """Unreadable or malformed input data."""


@dataclass
class LoadedDataset:
    """Feature matrix scaled to [-1, 1] plus labels kept out of the training path."""

    features: np.ndarray
    labels: list | None


def scale_minmax(features: np.ndarray, feature_range=(-1.0, 1.0)) -> np.ndarray:
    """Per-feature min-max scaling onto ``feature_range`` (default [-1, 1]).

    Constant columns map to the range midpoint (0 for the default range).
    """
    lo_out, hi_out = float(feature_range[0]), float(feature_range[1])
    if not lo_out < hi_out:
        raise ValueError(f"invalid feature_range {feature_range}")
    features = np.asarray(features, dtype=np.float64)
    if features.size == 0:
        return features
    lo = features.min(axis=0)
    hi = features.max(axis=0)
    span = hi - lo
    scaled = np.full_like(features, (lo_out + hi_out) / 2.0)
    nonconst = span > 0
    unit = (features[:, nonconst] - lo[nonconst]) / span[nonconst]
    scaled[:, nonconst] = unit * (hi_out - lo_out) + lo_out
    return scaled


def load_iris(path, feature_range=(-1.0, 1.0)) -> LoadedDataset:
    """Load a 4-feature CSV (optional label column, optional header), scaled.

    Malformed rows raise ``DataError`` naming the line number.
    """
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise DataError(f"cannot read dataset {path}: {exc}") from exc

    def parse(cells, lineno):
        if len(cells) not in (4, 5):
            raise DataError(f"{path}:{lineno}: expected 4 features (+ optional label), got {len(cells)} columns")
        try:
            feats = [float(c) for c in cells[:4]]
        except ValueError as exc:
            raise DataError(f"{path}:{lineno}: non-numeric feature: {exc}") from exc
        return feats, cells[4] if len(cells) == 5 else None

    start = 0
    if rows:
        try:
            [float(c) for c in rows[0][:4]]
        except (ValueError, IndexError):
            start = 1  # header row
    features, labels = [], []
    has_labels = None
    for lineno, cells in enumerate(rows[start:], start=start + 1):
        if not cells or all(not c.strip() for c in cells):
            continue
        feats, label = parse(cells, lineno)
        if has_labels is None:
            has_labels = label is not None
        elif has_labels != (label is not None):
            raise DataError(f"{path}:{lineno}: inconsistent label column")
        features.append(feats)
        labels.append(label)
    feats_arr = np.array(features, dtype=np.float64).reshape(-1, 4)
    return LoadedDataset(scale_minmax(feats_arr, feature_range), labels if has_labels else None)


# -- config plumbing ----------------------------------------------------------


def _merge_config(args, keys) -> dict:
    cfg = {}
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                file_cfg = json.load(fh)
        except OSError as exc:
            raise DataError(f"cannot read config {args.config}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {args.config} is not valid JSON: {exc}") from exc
        if not isinstance(file_cfg, dict):
            raise ConfigError(f"config {args.config} must be a JSON object")
        for key, value in file_cfg.items():
            if key not in keys:
                raise ConfigError(f"{key}: unknown config key for this command")
            cfg[key] = value
    if "seed" in keys and os.environ.get("QSOM_SEED"):
        try:
            cfg["seed"] = int(os.environ["QSOM_SEED"])
        except ValueError as exc:
            raise ConfigError(f"QSOM_SEED: not an integer: {os.environ['QSOM_SEED']!r}") from exc
    for key in keys:
        flag = getattr(args, key, None)
        if flag is not None:
            cfg[key] = flag
    return cfg


def _require(cfg, field, kind, *, default=None, positive=False):
    value = cfg.get(field, default)
    if value is None:
        raise ConfigError(f"{field}: required")
    try:
        value = kind(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{field}: expected {kind.__name__}, got {value!r}") from exc
    if positive and value <= 0:
        raise ConfigError(f"{field}: must be positive, got {value}")
    return value


def _choice(cfg, field, options, default):
    value = cfg.get(field, default)
    if value not in options:
        raise ConfigError(f"{field}: must be one of {options}, got {value!r}")
    return value


def _feature_range(cfg):
    value = cfg.get("feature_range", (-1.0, 1.0))
    if isinstance(value, str):
        value = value.split(",")
    try:
        lo, hi = (float(v) for v in value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"feature_range: expected two numbers, got {value!r}") from exc
    if not lo < hi:
        raise ConfigError(f"feature_range: need low < high, got [{lo}, {hi}]")
    return lo, hi


def _load_training_data(cfg):
    """Returns (samples, labels, n_features). Labels stay out of training."""
    path = _require(cfg, "dataset", str)
    kind = _choice(cfg, "data_kind", ("csv", "schwinger"), "csv")
    if kind == "csv":
        data = load_iris(path, _feature_range(cfg))
        return data.features, data.labels, 4
    try:
        states = schwinger_mod.load_dataset(path)
    except OSError as exc:
        raise DataError(f"cannot read dataset {path}: {exc}") from exc
    except (ValueError, KeyError, json.JSONDecodeError) as exc:
        raise DataError(f"dataset {path} is not a valid schwinger file: {exc}") from exc
    from .statevector import Statevector

    samples = [Statevector(st.n_sites, st.amplitudes) for st in states]
    labels = [str(st.label) for st in states]
    return samples, labels, states[0].n_sites


def _build_estimator(cfg, n_features):
    mode = _choice(cfg, "mode", ("exact", "shots"), "exact")
    reps = _require(cfg, "reps", int, default=2, positive=True)
    fmap = FeatureMapConfig(n_features=n_features, reps=reps)
    shots = _require(cfg, "shots", int, default=1024, positive=True)
    seed = _require(cfg, "seed", int, default=0)
    return KernelEstimator(fmap, mode=mode, shots=shots, seed=seed), fmap


# -- commands -----------------------------------------------------------------

TRAIN_KEYS = (
    "dataset", "data_kind", "feature_range", "trainer", "rows", "cols",
    "alpha0", "sigma0", "alpha_decay", "sigma_decay", "iterations",
    "sigma_floor", "reps", "mode", "shots", "seed", "init_low", "init_high",
    "h_cutoff", "rbf_bandwidth", "out_map", "out_record",
)


def cmd_train(cfg: dict) -> int:
    samples, _labels, n_features = _load_training_data(cfg)
    if len(samples) == 0:
        raise DataError("dataset is empty")
    trainer = _choice(cfg, "trainer", som_mod.TRAINER_KINDS, "quantum")
    if cfg.get("data_kind") == "schwinger" and trainer != "quantum":
        raise ConfigError("trainer: statevector datasets require the quantum trainer")
    rows = _require(cfg, "rows", int, default=6, positive=True)
    cols = _require(cfg, "cols", int, default=6, positive=True)
    schedule = som_mod.Schedule(
        alpha0=_require(cfg, "alpha0", float, default=1.0, positive=True),
        sigma0=_require(cfg, "sigma0", float, default=5.0, positive=True),
        total_iters=_require(cfg, "iterations", int, default=500),
        sigma_floor=_require(cfg, "sigma_floor", float, default=0.1, positive=True),
        alpha_decay=_require(cfg, "alpha_decay", float, default=1.0, positive=True),
        sigma_decay=_require(cfg, "sigma_decay", float, default=1.0, positive=True),
    )
    seed = _require(cfg, "seed", int, default=0)
    init_low = _require(cfg, "init_low", float, default=DEFAULT_INIT_LOW)
    init_high = _require(cfg, "init_high", float, default=DEFAULT_INIT_HIGH)
    if init_low >= init_high:
        raise ConfigError(f"init_low/init_high: need low < high, got [{init_low}, {init_high})")
    out_map = _require(cfg, "out_map", str, default="map.json")
    out_record = cfg.get("out_record")

    grid = som_mod.SomGrid.create(rows, cols, n_features)
    som_mod.init_weights(grid, init_low, init_high, seed)

    est = None
    fmap = None
    kernel_spec = None
    if trainer == "quantum":
        est, fmap = _build_estimator(cfg, n_features)
    elif trainer == "kernelized":
        kernel_spec = som_mod.RbfKernel(
            _require(cfg, "rbf_bandwidth", float, default=1.0, positive=True)
        )
    record = som_mod.train(
        grid,
        samples,
        schedule,
        trainer,
        seed,
        est=est,
        kernel_spec=kernel_spec,
        h_cutoff=_require(cfg, "h_cutoff", float, default=1e-3),
    )
    som_mod.save_map(
        out_map, grid, trainer=trainer, feature_config=fmap, schedule=schedule,
        seed=seed, estimator=est,
    )
    if out_record:
        with open(out_record, "w") as fh:
            json.dump(
                {
                    "trainer": record.trainer,
                    "seed": seed,
                    "sample_indices": record.sample_indices.tolist(),
                    "bmu_indices": record.bmu_indices.tolist(),
                    "alphas": record.alphas.tolist(),
                    "sigmas": record.sigmas.tolist(),
                    "quantization_errors": record.quantization_errors.tolist(),
                    "bmu_evals": record.bmu_evals,
                    "gradient_evals": record.gradient_evals,
                },
                fh,
            )
            fh.write("\n")
    print(f"trained {trainer} map {rows}x{cols} on {len(samples)} samples -> {out_map}")
    return EXIT_OK


INFER_KEYS = (
    "map", "dataset", "data_kind", "feature_range", "out", "reps", "mode",
    "shots", "seed", "rbf_bandwidth",
)


def cmd_infer(cfg: dict) -> int:
    map_path = _require(cfg, "map", str)
    try:
        grid, meta = som_mod.load_map(map_path)
    except OSError as exc:
        raise DataError(f"cannot read map {map_path}: {exc}") from exc
    except (ValueError, KeyError, json.JSONDecodeError) as exc:
        raise DataError(f"map {map_path} is not a valid map file: {exc}") from exc
    samples, labels, n_features = _load_training_data(cfg)
    out_path = _require(cfg, "out", str, default="assignments.csv")
    trainer = meta.get("trainer", "quantum")

    est = None
    kernel_spec = None
    if trainer == "quantum":
        est_cfg = dict(cfg)
        saved = meta.get("estimator") or {}
        fm = meta.get("feature_map") or {}
        est_cfg.setdefault("mode", saved.get("mode"))
        est_cfg.setdefault("shots", saved.get("shots"))
        est_cfg.setdefault("seed", saved.get("seed"))
        est_cfg.setdefault("reps", fm.get("reps"))
        est_cfg = {k: v for k, v in est_cfg.items() if v is not None}
        est, _ = _build_estimator(est_cfg, grid.n_features)
    elif trainer == "kernelized":
        kernel_spec = som_mod.RbfKernel(
            _require(cfg, "rbf_bandwidth", float, default=1.0, positive=True)
        )

    bmus = som_mod.infer(grid, samples, trainer, est=est, kernel_spec=kernel_spec) if len(samples) else []
    with open(out_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        header = ["sample", "row", "col"] + (["label"] if labels else [])
        writer.writerow(header)
        for i, bmu in enumerate(bmus):
            r, c = grid.coord_of(int(bmu))
            row = [i, r, c] + ([labels[i]] if labels else [])
            writer.writerow(row)
    print(f"wrote {len(bmus)} assignments -> {out_path}")
    return EXIT_OK


GENERATE_KEYS = (
    "n_sites", "theta", "J", "w", "sweep_start", "sweep_stop", "sweep_points",
    "states_per_point", "label_threshold", "out",
)


def cmd_generate_schwinger(cfg: dict) -> int:
    n_sites = _require(cfg, "n_sites", int, default=4)
    if n_sites > schwinger_mod.MAX_SITES:
        raise ConfigError(
            f"n_sites: {n_sites} exceeds the dense-diagonalization ceiling "
            f"of {schwinger_mod.MAX_SITES} sites"
        )
    start = _require(cfg, "sweep_start", float, default=0.0)
    stop = _require(cfg, "sweep_stop", float, default=1.0)
    points = _require(cfg, "sweep_points", int, default=20, positive=True)
    if not stop > start:
        raise ConfigError(f"sweep_stop: must exceed sweep_start, got [{start}, {stop}]")
    out = _require(cfg, "out", str, default="schwinger.json")
    try:
        config = schwinger_mod.SchwingerConfig(
            n_sites=n_sites,
            J=_require(cfg, "J", float, default=1.0),
            w=_require(cfg, "w", float, default=1.0),
            theta_angle=_require(cfg, "theta", float, default=math.pi),
            mass_sweep=tuple(np.linspace(start, stop, points)),
        )
        states = schwinger_mod.ground_states(
            config,
            states_per_point=_require(cfg, "states_per_point", int, default=2, positive=True),
            label_threshold=_require(cfg, "label_threshold", float, default=0.35),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    schwinger_mod.export_dataset(states, out)
    n_labels = sum(st.label for st in states)
    print(f"wrote {len(states)} states ({n_labels} above-field) -> {out}")
    return EXIT_OK


METRICS_KEYS = ("assignments", "out", "space", "dataset", "data_kind", "feature_range")


def _read_assignments(path):
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            rows = list(reader)
    except OSError as exc:
        raise DataError(f"cannot read assignments {path}: {exc}") from exc
    if not rows:
        raise DataError(f"assignments {path} is empty")
    header = rows[0]
    if header[:3] != ["sample", "row", "col"]:
        raise DataError(f"assignments {path}: expected header sample,row,col[,label]")
    has_labels = len(header) > 3 and header[3] == "label"
    coords, labels = [], []
    for lineno, cells in enumerate(rows[1:], start=2):
        if not cells:
            continue
        try:
            coords.append((int(cells[1]), int(cells[2])))
        except (ValueError, IndexError) as exc:
            raise DataError(f"{path}:{lineno}: bad assignment row: {exc}") from exc
        labels.append(cells[3] if has_labels else None)
    return np.array(coords, dtype=float), (labels if has_labels else None)


def cmd_metrics(cfg: dict) -> int:
    path = _require(cfg, "assignments", str)
    out = _require(cfg, "out", str, default="metrics.json")
    space = _choice(cfg, "space", ("grid", "features"), "grid")
    coords, labels = _read_assignments(path)
    if len(coords) == 0:
        raise DataError(f"assignments {path} has no rows")
    if space == "features":
        samples, _, _ = _load_training_data(cfg)
        points = np.asarray(samples, dtype=float)
        if len(points) != len(coords):
            raise DataError("dataset and assignments disagree on sample count")
    else:
        points = coords

    report: dict = {"n_samples": len(coords), "space": space}

    def attempt(name, fn):
        try:
            report[name] = fn()
        except (ValueError, ZeroDivisionError) as exc:
            report[name] = {"error": str(exc)}

    if labels is not None:
        label_ids = np.unique(labels, return_inverse=True)[1]
        neuron_ids = (coords[:, 0] * (coords[:, 1].max() + 1) + coords[:, 1]).astype(int)
        assignment = metrics_mod.LabeledAssignment(label_ids, neuron_ids, coords)
        predicted = metrics_mod.majority_labels(assignment)
        attempt("fowlkes_mallows", lambda: metrics_mod.fowlkes_mallows(label_ids, predicted))
        attempt("map_purity", lambda: metrics_mod.map_purity(assignment))
        attempt("silhouette", lambda: metrics_mod.silhouette(points, label_ids))
        attempt("davies_bouldin", lambda: metrics_mod.davies_bouldin(points, label_ids))
        attempt("calinski_harabasz", lambda: metrics_mod.calinski_harabasz(points, label_ids))
    else:
        report["note"] = "assignments carry no labels; label-based metrics skipped"
    with open(out, "w") as fh:
        json.dump(report, fh, indent=1)
        fh.write("\n")
    print(f"wrote metrics report -> {out}")
    return EXIT_OK


PLOTDATA_KEYS = ("assignments", "map", "out")


def cmd_export_plotdata(cfg: dict) -> int:
    path = _require(cfg, "assignments", str)
    map_path = _require(cfg, "map", str)
    out = _require(cfg, "out", str, default="plotdata.csv")
    try:
        grid, _meta = som_mod.load_map(map_path)
    except OSError as exc:
        raise DataError(f"cannot read map {map_path}: {exc}") from exc
    coords, labels = _read_assignments(path)
    label_names = sorted(set(labels)) if labels is not None else []
    counts = {}
    for i in range(len(coords)):
        key = (int(coords[i][0]), int(coords[i][1]))
        per = counts.setdefault(key, dict.fromkeys(label_names, 0))
        if labels is not None:
            per[labels[i]] += 1
        per["__total__"] = per.get("__total__", 0) + 1
    with open(out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["row", "col", "total"] + [f"count_{name}" for name in label_names])
        for r in range(grid.rows):
            for c in range(grid.cols):
                per = counts.get((r, c), {})
                writer.writerow(
                    [r, c, per.get("__total__", 0)]
                    + [per.get(name, 0) for name in label_names]
                )
    print(f"wrote occupancy table ({grid.rows * grid.cols} neurons) -> {out}")
    return EXIT_OK


# -- argument parsing -----------------------------------------------------------


def _add_common(sub, keys):
    sub.add_argument("--config", help="JSON config file")
    specs = {
        "dataset": str, "data_kind": str, "feature_range": str, "trainer": str,
        "rows": int, "cols": int, "alpha0": float, "sigma0": float,
        "alpha_decay": float, "sigma_decay": float, "iterations": int,
        "sigma_floor": float, "reps": int, "mode": str, "shots": int,
        "seed": int, "init_low": float, "init_high": float, "h_cutoff": float,
        "rbf_bandwidth": float, "out_map": str, "out_record": str, "map": str,
        "out": str, "n_sites": int, "theta": float, "J": float, "w": float,
        "sweep_start": float, "sweep_stop": float, "sweep_points": int,
        "states_per_point": int, "label_threshold": float, "assignments": str,
        "space": str,
    }
    for key in keys:
        sub.add_argument(f"--{key.replace('_', '-')}", dest=key, type=specs[key], default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qsom",
        description="Variational quantum self-organizing map toolkit",
    )
    subs = parser.add_subparsers(dest="command", required=True)
    for name, keys, fn in (
        ("train", TRAIN_KEYS, cmd_train),
        ("infer", INFER_KEYS, cmd_infer),
        ("generate-schwinger", GENERATE_KEYS, cmd_generate_schwinger),
        ("metrics", METRICS_KEYS, cmd_metrics),
        ("export-plotdata", PLOTDATA_KEYS, cmd_export_plotdata),
    ):
        sub = subs.add_parser(name)
        _add_common(sub, keys)
        sub.set_defaults(func=fn, keys=keys)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _merge_config(args, args.keys)
        return args.func(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
