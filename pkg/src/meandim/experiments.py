"""Config-driven experiment harness.

Each experiment kind reproduces one study from the underlying analysis at
desk scale: a sweep over a single coordinate (width, sample count, ridge
strength, pretraining length, ...) with repeated cells, emitting one CSV
per curve, one SVG per heatmap, and a text summary with peak locations
and correlations. Outputs are deterministic for a fixed config: rerunning
a config produces byte-identical files.

Config files are flat key-value text, one `key = value` per line, with
`#` starting a comment. Repetition seeds are seed + rep_index, so any
single cell can be reproduced in isolation.
"""

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .estimator import (InputSampler, estimate_md, estimate_md_binary_fast,
                        influence_heatmap, write_profile_csv)
from .heatmap_svg import emit_heatmap_svg
from .replica import sweep_curve, write_curve_csv
from .rfm import Activation, analytic_bmd, compute_kappas, random_rfm, score_fn
from .trainer import (Dataset, TeacherTask, TrainConfig, adversarial_init_protocol,
                      flip_labels, gen_multiclass_task, gen_teacher_student,
                      init_mlp, multiclass_bmd, robustness_flip_count, train_gd,
                      train_rfm_ridge)

__all__ = [
    "EXPERIMENT_KINDS",
    "ExperimentConfig",
    "SweepResult",
    "PeakReport",
    "parse_experiment_config",
    "load_experiment_config",
    "run_experiment",
    "summarize_peaks",
    "write_sweep_csv",
]

EXPERIMENT_KINDS = (
    "double-descent-rfm",
    "double-descent-mlp",
    "theory-curve",
    "regularization-sweep",
    "trainset-size-sweep",
    "adversarial-init",
    "robustness-sweep",
    "heatmap",
    "distribution-comparison",
    "normalization-comparison",
)

_TITLES = {
    "double-descent-rfm": "random feature model: error and BMD across width",
    "double-descent-mlp": "two-layer MLP: error and BMD across width",
    "theory-curve": "replica theory curve along 1/alpha",
    "regularization-sweep": "ridge strength and the BMD peak",
    "trainset-size-sweep": "training set size sweep at fixed width",
    "adversarial-init": "corrupted-label pretraining and final complexity",
    "robustness-sweep": "BMD versus flip robustness across width",
    "heatmap": "per-coordinate influence heatmap",
    "distribution-comparison": "MD under different resampling distributions",
    "normalization-comparison": "input normalization ranges and the BMD pattern",
}


# ---------------------------------------------------------------------------
# config schema and parsing


def _parse_int(s: str) -> int:
    return int(s)


def _parse_float(s: str) -> float:
    return float(s)


def _parse_str(s: str) -> str:
    return s


def _parse_bool(s: str) -> bool:
    low = s.lower()
    if low in ("true", "yes", "1"):
        return True
    if low in ("false", "no", "0"):
        return False
    raise ValueError(f"expected a boolean, got {s!r}")


def _parse_int_list(s: str):
    toks = s.replace(",", " ").split()
    if not toks:
        raise ValueError("empty list")
    return tuple(int(t) for t in toks)


def _parse_float_list(s: str):
    toks = s.replace(",", " ").split()
    if not toks:
        raise ValueError("empty list")
    return tuple(float(t) for t in toks)


def _parse_ranges(s: str):
    """Whitespace-separated lo:hi pairs, e.g. '-1:1 -3:3 -5:5'."""
    out = []
    for tok in s.split():
        lo, _, hi = tok.partition(":")
        if not _:
            raise ValueError(f"range {tok!r} is not lo:hi")
        lo_f, hi_f = float(lo), float(hi)
        if not lo_f < hi_f:
            raise ValueError(f"range {tok!r} must have lo < hi")
        out.append((lo_f, hi_f))
    if not out:
        raise ValueError("empty list")
    return tuple(out)


_REQUIRED = object()

_COMMON_SCHEMA = {
    "seed": (_parse_int, 0),
    "reps": (_parse_int, 1),
    "out": (_parse_str, "out"),
    "jobs": (_parse_int, 1),
}

_GRID_SCHEMA = {
    "grid_min": (_parse_float, 0.1),
    "grid_max": (_parse_float, 10.0),
    "grid_points": (_parse_int, 21),
}

_SCHEMAS = {
    "double-descent-rfm": {
        "dim": (_parse_int, _REQUIRED),
        "n_train": (_parse_int, _REQUIRED),
        "n_test": (_parse_int, 2000),
        "widths": (_parse_int_list, _REQUIRED),
        "lam": (_parse_float, 1e-4),
        "label_noise_fraction": (_parse_float, 0.0),
        "delta": (_parse_float, 0.0),
        "input_kind": (_parse_str, "binary"),
        "activation": (_parse_str, "tanh"),
    },
    "double-descent-mlp": {
        "dim": (_parse_int, _REQUIRED),
        "n_train": (_parse_int, _REQUIRED),
        "n_test": (_parse_int, 1000),
        "widths": (_parse_int_list, _REQUIRED),
        "n_classes": (_parse_int, 2),
        "epochs": (_parse_int, 200),
        "lr": (_parse_float, 1e-3),
        "batch_size": (_parse_int, 64),
        "loss": (_parse_str, "ce"),
        "optimizer": (_parse_str, "minibatch-gd"),
        "label_noise_fraction": (_parse_float, 0.0),
        "md_samples": (_parse_int, 4000),
        "input_kind": (_parse_str, "gaussian"),
    },
    "theory-curve": {
        "loss": (_parse_str, "mse"),
        "lam": (_parse_float, 1e-4),
        "alpha_t": (_parse_float, 3.0),
        "delta": (_parse_float, 0.0),
        "activation": (_parse_str, "tanh"),
        **_GRID_SCHEMA,
    },
    "regularization-sweep": {
        "lams": (_parse_float_list, _REQUIRED),
        "loss": (_parse_str, "mse"),
        "alpha_t": (_parse_float, 3.0),
        "delta": (_parse_float, 0.0),
        "activation": (_parse_str, "tanh"),
        **_GRID_SCHEMA,
        "empirical": (_parse_bool, False),
        "dim": (_parse_int, 50),
        "n_train": (_parse_int, 200),
        "n_test": (_parse_int, 2000),
        "widths": (_parse_int_list, ()),
        "label_noise_fraction": (_parse_float, 0.1),
        "input_kind": (_parse_str, "binary"),
    },
    "trainset-size-sweep": {
        "dim": (_parse_int, _REQUIRED),
        "width": (_parse_int, _REQUIRED),
        "n_trains": (_parse_int_list, _REQUIRED),
        "n_test": (_parse_int, 2000),
        "lam": (_parse_float, 1e-4),
        "label_noise_fraction": (_parse_float, 0.0),
        "delta": (_parse_float, 0.0),
        "input_kind": (_parse_str, "binary"),
        "activation": (_parse_str, "tanh"),
    },
    "adversarial-init": {
        "dim": (_parse_int, _REQUIRED),
        "n_train": (_parse_int, _REQUIRED),
        "n_test": (_parse_int, 800),
        "width": (_parse_int, _REQUIRED),
        "n_classes": (_parse_int, 10),
        "pretrain_grid": (_parse_int_list, (0, 5, 20, 50)),
        "epochs": (_parse_int, 60),
        "lr": (_parse_float, 3e-3),
        "batch_size": (_parse_int, 64),
        "loss": (_parse_str, "ce"),
        "md_samples": (_parse_int, 2000),
        "input_kind": (_parse_str, "gaussian"),
    },
    "robustness-sweep": {
        "dim": (_parse_int, _REQUIRED),
        "n_train": (_parse_int, _REQUIRED),
        "n_test": (_parse_int, 500),
        "widths": (_parse_int_list, _REQUIRED),
        "n_classes": (_parse_int, 10),
        "epochs": (_parse_int, 100),
        "lr": (_parse_float, 3e-3),
        "batch_size": (_parse_int, 32),
        "loss": (_parse_str, "ce"),
        "md_samples": (_parse_int, 2000),
        "flip_points": (_parse_int, 200),
        "label_noise_fraction": (_parse_float, 0.0),
        "input_kind": (_parse_str, "gaussian"),
    },
    "heatmap": {
        "grid_height": (_parse_int, _REQUIRED),
        "grid_width": (_parse_int, _REQUIRED),
        "n_feat": (_parse_int, _REQUIRED),
        "n_train": (_parse_int, _REQUIRED),
        "lam": (_parse_float, 1e-4),
        "samples": (_parse_int, 20000),
        "support_fraction": (_parse_float, 0.25),
        "label_noise_fraction": (_parse_float, 0.0),
        "activation": (_parse_str, "tanh"),
    },
    "distribution-comparison": {
        "dim": (_parse_int, _REQUIRED),
        "n_train": (_parse_int, _REQUIRED),
        "n_test": (_parse_int, 1000),
        "widths": (_parse_int_list, _REQUIRED),
        "lam": (_parse_float, 1e-4),
        "samples": (_parse_int, 10000),
        "label_noise_fraction": (_parse_float, 0.0),
        "activation": (_parse_str, "tanh"),
    },
    "normalization-comparison": {
        "dim": (_parse_int, _REQUIRED),
        "n_train": (_parse_int, _REQUIRED),
        "n_test": (_parse_int, 1000),
        "widths": (_parse_int_list, _REQUIRED),
        "lam": (_parse_float, 1e-4),
        "samples": (_parse_int, 10000),
        "ranges": (_parse_ranges, ((-1.0, 1.0), (-3.0, 3.0), (-5.0, 5.0))),
        "label_noise_fraction": (_parse_float, 0.0),
        "activation": (_parse_str, "tanh"),
    },
}


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    seed: int
    reps: int
    out_dir: str
    jobs: int
    params: dict = field(repr=False)

    def __post_init__(self):
        if self.kind not in EXPERIMENT_KINDS:
            raise ValueError(f"unknown experiment kind {self.kind!r}")
        if self.reps < 1:
            raise ValueError("config field 'reps' must be >= 1")
        if self.jobs < 1:
            raise ValueError("config field 'jobs' must be >= 1")


def parse_experiment_config(text: str) -> ExperimentConfig:
    """Parse flat key-value config text into a typed ExperimentConfig."""
    raw = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        key, sep, value = body.partition("=")
        if not sep:
            raise ValueError(f"config line {lineno}: expected 'key = value', got {line!r}")
        key, value = key.strip(), value.strip()
        if key in raw:
            raise ValueError(f"config field {key!r} given twice")
        raw[key] = value
    if "kind" not in raw:
        raise ValueError("config field 'kind' is required")
    kind = raw.pop("kind")
    if kind not in _SCHEMAS:
        raise ValueError(f"unknown experiment kind {kind!r} "
                         f"(expected one of {', '.join(EXPERIMENT_KINDS)})")
    schema = {**_COMMON_SCHEMA, **_SCHEMAS[kind]}
    params = {}
    for key, value in raw.items():
        if key not in schema:
            raise ValueError(f"unknown config field {key!r} for kind {kind!r}")
        parser, _default = schema[key]
        try:
            params[key] = parser(value)
        except ValueError as exc:
            raise ValueError(f"config field {key!r}: {exc}") from exc
    for key, (parser, default) in schema.items():
        if key in params:
            continue
        if default is _REQUIRED:
            raise ValueError(f"config field {key!r} is required for kind {kind!r}")
        params[key] = default
    _validate_params(kind, params)
    return ExperimentConfig(kind=kind, seed=params.pop("seed"),
                            reps=params.pop("reps"), out_dir=params.pop("out"),
                            jobs=params.pop("jobs"), params=params)


def _validate_params(kind: str, params: dict) -> None:
    for key in ("widths", "n_trains", "pretrain_grid", "lams", "ranges"):
        if key == "widths" and kind == "regularization-sweep":
            continue  # optional there: empty means theory-only
        if key in params and len(params[key]) == 0:
            raise ValueError(f"config field {key!r} must be a non-empty list")
    if "grid_points" in params:
        if params["grid_points"] < 2:
            raise ValueError("config field 'grid_points' must be >= 2")
        if not 0 < params["grid_min"] < params["grid_max"]:
            raise ValueError("config fields 'grid_min' < 'grid_max' must be positive")
    if kind == "regularization-sweep" and params["empirical"] and not params["widths"]:
        raise ValueError("config field 'widths' is required when 'empirical = true'")


def load_experiment_config(path) -> ExperimentConfig:
    with open(path, "r", encoding="ascii") as fh:
        return parse_experiment_config(fh.read())


# ---------------------------------------------------------------------------
# sweep results, CSV emission, peak summaries


@dataclass(frozen=True)
class SweepResult:
    """Raw per-cell metric values over a one-dimensional sweep.

    values[name] has shape (n_coords, reps); the CSV and the summary work
    with means, and std columns appear only when reps > 1.
    """

    coordinate: str
    coords: tuple
    values: dict
    reps: int

    def __post_init__(self):
        for name, block in self.values.items():
            if block.shape != (len(self.coords), self.reps):
                raise ValueError(f"metric {name!r} has shape {block.shape}, "
                                 f"expected {(len(self.coords), self.reps)}")

    def mean(self, name: str) -> np.ndarray:
        # like nanmean over reps, but all-NaN rows give NaN without warning
        block = self.values[name]
        counts = np.sum(~np.isnan(block), axis=1)
        totals = np.nansum(block, axis=1)
        return np.where(counts > 0, totals / np.maximum(counts, 1), np.nan)

    def std(self, name: str):
        if self.reps == 1:
            return None
        block = self.values[name]
        counts = np.sum(~np.isnan(block), axis=1)
        centered = block - self.mean(name)[:, None]
        ss = np.nansum(centered ** 2, axis=1)
        return np.where(counts > 1, np.sqrt(ss / np.maximum(counts - 1, 1)), np.nan)


def write_sweep_csv(path, result: SweepResult) -> None:
    names = list(result.values)
    header = [result.coordinate]
    for name in names:
        header.append(f"{name}_mean")
        if result.reps > 1:
            header.append(f"{name}_std")
    lines = [",".join(header)]
    for i, coord in enumerate(result.coords):
        cells = [repr(coord) if not isinstance(coord, str) else coord]
        for name in names:
            cells.append(repr(float(result.mean(name)[i])))
            if result.reps > 1:
                cells.append(repr(float(result.std(name)[i])))
        lines.append(",".join(cells))
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


@dataclass(frozen=True)
class PeakReport:
    coordinate: str
    argmax: dict
    interior: dict
    distance_steps: int | None
    correlations: dict

    def lines(self) -> list:
        out = []
        for name, coord in self.argmax.items():
            note = "interior peak" if self.interior[name] else "boundary, no interior peak"
            out.append(f"argmax {name}: {self.coordinate} = {coord} ({note})")
        if self.distance_steps is not None:
            out.append(f"test_err/bmd peak distance: {self.distance_steps} grid steps")
        for (a, b), r in self.correlations.items():
            out.append(f"corr({a}, {b}) = {r:.4f}")
        return out


def summarize_peaks(result: SweepResult, pairs=None) -> PeakReport:
    """Locate grid argmaxes of the mean curves and correlate metric pairs.

    Peaks are reported on the discrete grid only (no interpolation); a
    metric whose maximum sits on the grid boundary is flagged as having no
    interior peak. Requires at least 5 grid points.
    """
    if len(result.coords) < 5:
        raise ValueError("peak summary needs at least 5 grid points")
    names = list(result.values)
    argmax, interior = {}, {}
    for name in names:
        curve = result.mean(name)
        if np.all(np.isnan(curve)):
            raise ValueError(f"metric {name!r} is all-NaN")
        idx = int(np.nanargmax(curve))
        argmax[name] = result.coords[idx]
        interior[name] = 0 < idx < len(result.coords) - 1
    distance = None
    if "test_err" in argmax and "bmd" in argmax:
        i = result.coords.index(argmax["test_err"])
        j = result.coords.index(argmax["bmd"])
        distance = abs(i - j)
    if pairs is None:
        pairs = (("test_err", "bmd"),) if "test_err" in names and "bmd" in names else ()
    correlations = {}
    for a, b in pairs:
        if a not in names or b not in names:
            raise ValueError(f"correlation pair ({a}, {b}) not in sweep metrics {names}")
        xa, xb = result.mean(a), result.mean(b)
        keep = np.isfinite(xa) & np.isfinite(xb)
        if keep.sum() < 3:
            raise ValueError(f"correlation pair ({a}, {b}) has fewer than 3 finite points")
        correlations[(a, b)] = float(stats.pearsonr(xa[keep], xb[keep])[0])
    return PeakReport(coordinate=result.coordinate, argmax=argmax,
                      interior=interior, distance_steps=distance,
                      correlations=correlations)


# ---------------------------------------------------------------------------
# cell execution


def _run_cells(cell_fn, coords, metric_names, reps: int, jobs: int,
               coordinate: str) -> SweepResult:
    """Run cell_fn(i_coord, rep) over the grid x repetition lattice.

    Cells execute in a thread pool; assembly is keyed by (i, rep) so the
    result does not depend on completion order. Exceptions are re-raised
    with the failing coordinates attached.
    """
    blocks = {name: np.full((len(coords), reps), np.nan) for name in metric_names}

    def wrapped(i, rep):
        try:
            return cell_fn(i, rep)
        except Exception as exc:
            raise RuntimeError(
                f"experiment cell {coordinate}={coords[i]}, rep={rep} failed: {exc}"
            ) from exc

    if jobs == 1:
        for i in range(len(coords)):
            for rep in range(reps):
                out = wrapped(i, rep)
                for name in metric_names:
                    blocks[name][i, rep] = out[name]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            futures = {(i, rep): pool.submit(wrapped, i, rep)
                       for i in range(len(coords)) for rep in range(reps)}
            for (i, rep), fut in futures.items():
                out = fut.result()
                for name in metric_names:
                    blocks[name][i, rep] = out[name]
    return SweepResult(coordinate=coordinate, coords=tuple(coords),
                       values=blocks, reps=reps)


def _trained_rfm_cell(dim, width, n_train, n_test, lam, noise_fraction, delta,
                      input_kind, activation, kappas, seed):
    """One (width, rep) cell of an empirical ridge sweep."""
    task = TeacherTask.random(dim, seed=seed, input_kind=input_kind, delta=delta)
    train, test = gen_teacher_student(dim, n_train, n_test, task, seed=seed)
    train = flip_labels(train, noise_fraction, seed=seed)
    model = random_rfm(dim, width, activation, seed=seed, kappas=kappas)
    fit = train_rfm_ridge(model, train, lam, test_ds=test)
    return fit, train, test


# ---------------------------------------------------------------------------
# experiment kinds


def _run_double_descent_rfm(cfg: ExperimentConfig, out_dir: str) -> list:
    p = cfg.params
    act = Activation.from_tag(p["activation"])
    kappas = compute_kappas(act)
    widths = p["widths"]

    def cell(i, rep):
        fit, _, _ = _trained_rfm_cell(
            p["dim"], widths[i], p["n_train"], p["n_test"], p["lam"],
            p["label_noise_fraction"], p["delta"], p["input_kind"], act,
            kappas, seed=cfg.seed + rep)
        return {"train_err": fit.train_error, "test_err": fit.test_error,
                "bmd": analytic_bmd(fit.model)}

    result = _run_cells(cell, widths, ("train_err", "test_err", "bmd"),
                        cfg.reps, cfg.jobs, coordinate="width")
    csv_path = os.path.join(out_dir, "double-descent-rfm.csv")
    write_sweep_csv(csv_path, result)
    report = summarize_peaks(result) if len(widths) >= 5 else None
    summary = _write_summary(out_dir, cfg, report)
    return [csv_path, summary]


def _run_double_descent_mlp(cfg: ExperimentConfig, out_dir: str) -> list:
    from .trainer import forward_mlp

    p = cfg.params
    widths = p["widths"]
    multi = p["n_classes"] > 2

    def cell(i, rep):
        seed = cfg.seed + rep
        if multi:
            train, test = gen_multiclass_task(p["dim"], p["n_train"], p["n_test"],
                                              p["n_classes"], p["input_kind"], seed=seed)
            n_out = p["n_classes"]
            loss = "ce"
        else:
            task = TeacherTask.random(p["dim"], seed=seed, input_kind=p["input_kind"])
            train, test = gen_teacher_student(p["dim"], p["n_train"], p["n_test"],
                                              task, seed=seed)
            n_out = 1
            loss = p["loss"]
        config = TrainConfig(loss=loss, optimizer=p["optimizer"],
                             batch_size=p["batch_size"], lr=p["lr"],
                             epochs=p["epochs"],
                             label_noise_fraction=p["label_noise_fraction"],
                             seed=seed)
        skeleton = init_mlp(p["dim"], widths[i], n_out, seed=seed)
        fit = train_gd(skeleton, train, config, test_ds=test)
        if multi:
            bmd = multiclass_bmd(fit.model, InputSampler.binary(p["dim"]),
                                 p["md_samples"], seed)
        else:
            net = fit.model
            profile = estimate_md_binary_fast(lambda x: forward_mlp(net, x),
                                              p["dim"], p["md_samples"], seed)
            bmd = profile.md
        return {"train_err": fit.train_error, "test_err": fit.test_error, "bmd": bmd}

    result = _run_cells(cell, widths, ("train_err", "test_err", "bmd"),
                        cfg.reps, cfg.jobs, coordinate="width")
    csv_path = os.path.join(out_dir, "double-descent-mlp.csv")
    write_sweep_csv(csv_path, result)
    report = summarize_peaks(result) if len(widths) >= 5 else None
    summary = _write_summary(out_dir, cfg, report)
    return [csv_path, summary]


def _theory_grid(p) -> np.ndarray:
    return np.logspace(np.log10(p["grid_min"]), np.log10(p["grid_max"]),
                       p["grid_points"])


def _curve_sweep_result(rows) -> SweepResult:
    # eps_g plays the test_err role so the generic peak summary applies
    values = {
        "test_err": np.array([[r.eps_g] for r in rows]),
        "bmd": np.array([[r.bmd] for r in rows]),
    }
    return SweepResult(coordinate="inv_alpha",
                       coords=tuple(float(r.inv_alpha) for r in rows),
                       values=values, reps=1)


def _run_theory_curve(cfg: ExperimentConfig, out_dir: str) -> list:
    p = cfg.params
    kappas = compute_kappas(Activation.from_tag(p["activation"]))
    rows = sweep_curve(kappas, p["loss"], p["lam"], p["alpha_t"],
                       _theory_grid(p), delta=p["delta"])
    csv_path = os.path.join(out_dir, "theory-curve.csv")
    write_curve_csv(csv_path, rows)
    report = summarize_peaks(_curve_sweep_result(rows)) if len(rows) >= 5 else None
    summary = _write_summary(out_dir, cfg, report,
                             extra_lines=("test_err here is the replica eps_g",))
    return [csv_path, summary]


def _run_regularization_sweep(cfg: ExperimentConfig, out_dir: str) -> list:
    p = cfg.params
    act = Activation.from_tag(p["activation"])
    kappas = compute_kappas(act)
    paths = []
    peak_lines = []
    grid = _theory_grid(p)
    for lam in p["lams"]:
        rows = sweep_curve(kappas, p["loss"], lam, p["alpha_t"], grid,
                           delta=p["delta"])
        path = os.path.join(out_dir, f"theory_lam_{lam:g}.csv")
        write_curve_csv(path, rows)
        paths.append(path)
        bmds = np.array([r.bmd for r in rows])
        peak_lines.append(
            f"theory lam={lam:g}: peak bmd = {float(np.nanmax(bmds))!r} "
            f"at inv_alpha = {float(grid[int(np.nanargmax(bmds))])!r}")
    if p["empirical"]:
        for lam in p["lams"]:
            def cell(i, rep, _lam=lam):
                fit, _, _ = _trained_rfm_cell(
                    p["dim"], p["widths"][i], p["n_train"], p["n_test"], _lam,
                    p["label_noise_fraction"], 0.0, p["input_kind"], act,
                    kappas, seed=cfg.seed + rep)
                return {"train_err": fit.train_error, "test_err": fit.test_error,
                        "bmd": analytic_bmd(fit.model)}

            result = _run_cells(cell, p["widths"], ("train_err", "test_err", "bmd"),
                                cfg.reps, cfg.jobs, coordinate="width")
            path = os.path.join(out_dir, f"empirical_lam_{lam:g}.csv")
            write_sweep_csv(path, result)
            paths.append(path)
            curve = result.mean("bmd")
            peak_lines.append(
                f"empirical lam={lam:g}: peak bmd = {float(np.nanmax(curve))!r} "
                f"at width = {p['widths'][int(np.nanargmax(curve))]}")
    summary = _write_summary(out_dir, cfg, None, extra_lines=peak_lines)
    return paths + [summary]


def _run_trainset_size_sweep(cfg: ExperimentConfig, out_dir: str) -> list:
    p = cfg.params
    act = Activation.from_tag(p["activation"])
    kappas = compute_kappas(act)
    n_trains = p["n_trains"]

    def cell(i, rep):
        fit, _, _ = _trained_rfm_cell(
            p["dim"], p["width"], n_trains[i], p["n_test"], p["lam"],
            p["label_noise_fraction"], p["delta"], p["input_kind"], act,
            kappas, seed=cfg.seed + rep)
        return {"train_err": fit.train_error, "test_err": fit.test_error,
                "bmd": analytic_bmd(fit.model)}

    result = _run_cells(cell, n_trains, ("train_err", "test_err", "bmd"),
                        cfg.reps, cfg.jobs, coordinate="n_train")
    csv_path = os.path.join(out_dir, "trainset-size-sweep.csv")
    write_sweep_csv(csv_path, result)
    report = summarize_peaks(result) if len(n_trains) >= 5 else None
    summary = _write_summary(out_dir, cfg, report)
    return [csv_path, summary]


def _run_adversarial_init(cfg: ExperimentConfig, out_dir: str) -> list:
    p = cfg.params
    grid = p["pretrain_grid"]

    def cell(i, rep):
        # a multiclass task is essential here: with binary labels a 100%
        # corrupted pretraining set is just the negated teacher, which is
        # perfectly structured and leaves no adversarial imprint
        seed = cfg.seed + rep
        train, test = gen_multiclass_task(p["dim"], p["n_train"], p["n_test"],
                                          p["n_classes"], p["input_kind"],
                                          seed=seed)
        config = TrainConfig(loss=p["loss"], optimizer="minibatch-gd",
                             batch_size=p["batch_size"], lr=p["lr"], seed=seed)
        skeleton = init_mlp(p["dim"], p["width"], p["n_classes"], seed=seed)
        fit, _ = adversarial_init_protocol(skeleton, train, grid[i], p["epochs"],
                                           config, test_ds=test)
        bmd = multiclass_bmd(fit.model, InputSampler.binary(p["dim"]),
                             p["md_samples"], seed)
        return {"train_err": fit.train_error, "test_err": fit.test_error,
                "bmd": bmd}

    result = _run_cells(cell, grid, ("train_err", "test_err", "bmd"),
                        cfg.reps, cfg.jobs, coordinate="pretrain_epochs")
    csv_path = os.path.join(out_dir, "adversarial-init.csv")
    write_sweep_csv(csv_path, result)
    pre = np.asarray(grid, dtype=float)
    extra = []
    for name in ("bmd", "test_err"):
        curve = result.mean(name)
        if np.all(curve == curve[0]):
            rho = float("nan")  # rank correlation undefined on a flat curve
        else:
            rho = float(stats.spearmanr(pre, curve)[0])
        extra.append(f"spearman(pretrain_epochs, {name}) = {rho:.4f}")
    summary = _write_summary(out_dir, cfg, None, extra_lines=extra)
    return [csv_path, summary]


def _run_robustness_sweep(cfg: ExperimentConfig, out_dir: str) -> list:
    p = cfg.params
    widths = p["widths"]

    def cell(i, rep):
        seed = cfg.seed + rep
        train, test = gen_multiclass_task(p["dim"], p["n_train"], p["n_test"],
                                          p["n_classes"], p["input_kind"], seed=seed)
        config = TrainConfig(loss=p["loss"], optimizer="minibatch-gd",
                             batch_size=p["batch_size"], lr=p["lr"],
                             epochs=p["epochs"],
                             label_noise_fraction=p["label_noise_fraction"],
                             seed=seed)
        skeleton = init_mlp(p["dim"], widths[i], p["n_classes"], seed=seed)
        fit = train_gd(skeleton, train, config, test_ds=test)
        bmd = multiclass_bmd(fit.model, InputSampler.binary(p["dim"]),
                             p["md_samples"], seed)
        flips = robustness_flip_count(fit.model, test, seed=seed,
                                      max_points=p["flip_points"])
        return {"train_err": fit.train_error, "test_err": fit.test_error,
                "bmd": bmd, "flip_count": flips.mean}

    result = _run_cells(cell, widths, ("train_err", "test_err", "bmd", "flip_count"),
                        cfg.reps, cfg.jobs, coordinate="width")
    csv_path = os.path.join(out_dir, "robustness-sweep.csv")
    write_sweep_csv(csv_path, result)
    report = summarize_peaks(result, pairs=(("bmd", "flip_count"),)) \
        if len(widths) >= 5 else None
    summary = _write_summary(out_dir, cfg, report)
    return [csv_path, summary]


def _run_heatmap(cfg: ExperimentConfig, out_dir: str) -> list:
    p = cfg.params
    height, width = p["grid_height"], p["grid_width"]
    dim = height * width
    act = Activation.from_tag(p["activation"])
    kappas = compute_kappas(act)
    # teacher supported on a centered block of the pixel grid, so the
    # influence heatmap of the fitted student should recover the block
    mask2d = np.zeros((height, width), dtype=bool)
    bh = max(1, int(round(height * np.sqrt(p["support_fraction"]))))
    bw = max(1, int(round(width * np.sqrt(p["support_fraction"]))))
    r0, c0 = (height - bh) // 2, (width - bw) // 2
    mask2d[r0:r0 + bh, c0:c0 + bw] = True
    support = mask2d.ravel()
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, 41]))
    w_t = np.zeros(dim)
    w_t[support] = rng.standard_normal(int(support.sum()))
    w_t *= np.sqrt(dim) / np.linalg.norm(w_t)
    task = TeacherTask(w_T=w_t, input_kind="binary", delta=0.0)
    train, _ = gen_teacher_student(dim, p["n_train"], 100, task, seed=cfg.seed)
    train = flip_labels(train, p["label_noise_fraction"], seed=cfg.seed)
    model = random_rfm(dim, p["n_feat"], act, seed=cfg.seed, kappas=kappas)
    fit = train_rfm_ridge(model, train, p["lam"])
    profile = estimate_md_binary_fast(score_fn(fit.model), dim, p["samples"],
                                      seed=cfg.seed)
    grid = influence_heatmap(profile, width, height)
    svg_path = os.path.join(out_dir, "heatmap.svg")
    emit_heatmap_svg(grid, svg_path)
    csv_path = os.path.join(out_dir, "influence.csv")
    write_profile_csv(csv_path, profile)
    inside = float(profile.tau_sq[support].sum() / profile.total_influence)
    extra = [
        f"teacher support cells: {int(support.sum())} of {dim}",
        f"influence mass on the support: {inside:.4f}",
        f"participation ratio: {profile.participation_ratio!r}",
        f"estimated md: {profile.md!r}",
    ]
    summary = _write_summary(out_dir, cfg, None, extra_lines=extra)
    return [svg_path, csv_path, summary]


def _run_distribution_comparison(cfg: ExperimentConfig, out_dir: str) -> list:
    p = cfg.params
    act = Activation.from_tag(p["activation"])
    kappas = compute_kappas(act)
    widths = p["widths"]
    samplers = {
        "md_binary": lambda dim: InputSampler.binary(dim),
        "md_gaussian": lambda dim: InputSampler.gaussian(dim),
        "md_uniform": lambda dim: InputSampler.uniform(dim),
    }

    def cell(i, rep):
        seed = cfg.seed + rep
        fit, _, _ = _trained_rfm_cell(
            p["dim"], widths[i], p["n_train"], p["n_test"], p["lam"],
            p["label_noise_fraction"], 0.0, "binary", act, kappas, seed=seed)
        f = score_fn(fit.model)
        out = {"test_err": fit.test_error}
        for name, make in samplers.items():
            out[name] = estimate_md(f, make(p["dim"]), p["samples"], seed).md
        return out

    result = _run_cells(cell, widths,
                        ("test_err", "md_binary", "md_gaussian", "md_uniform"),
                        cfg.reps, cfg.jobs, coordinate="width")
    csv_path = os.path.join(out_dir, "distribution-comparison.csv")
    write_sweep_csv(csv_path, result)
    extra = []
    for name in ("md_binary", "md_gaussian", "md_uniform"):
        curve = result.mean(name)
        extra.append(f"argmax {name}: width = {widths[int(np.nanargmax(curve))]}")
    summary = _write_summary(out_dir, cfg, None, extra_lines=extra)
    return [csv_path, summary]


def _run_normalization_comparison(cfg: ExperimentConfig, out_dir: str) -> list:
    p = cfg.params
    act = Activation.from_tag(p["activation"])
    kappas = compute_kappas(act)
    widths = p["widths"]
    paths = []
    extra = []
    for lo, hi in p["ranges"]:
        def cell(i, rep, _lo=lo, _hi=hi):
            seed = cfg.seed + rep
            task = TeacherTask.random(p["dim"], seed=seed, input_kind="gaussian")
            train, test = gen_teacher_student(p["dim"], p["n_train"], p["n_test"],
                                              task, seed=seed)
            train = _minmax_dataset(train, _lo, _hi)
            test = _minmax_dataset(test, _lo, _hi)
            train = flip_labels(train, p["label_noise_fraction"], seed=seed)
            model = random_rfm(p["dim"], widths[i], act, seed=seed, kappas=kappas)
            fit = train_rfm_ridge(model, train, p["lam"], test_ds=test)
            profile = estimate_md_binary_fast(score_fn(fit.model), p["dim"],
                                              p["samples"], seed)
            return {"test_err": fit.test_error, "bmd": profile.md}

        result = _run_cells(cell, widths, ("test_err", "bmd"),
                            cfg.reps, cfg.jobs, coordinate="width")
        path = os.path.join(out_dir, f"range_{lo:g}_{hi:g}.csv")
        write_sweep_csv(path, result)
        paths.append(path)
        curve = result.mean("bmd")
        extra.append(f"range [{lo:g}, {hi:g}]: argmax bmd at width = "
                     f"{widths[int(np.nanargmax(curve))]}")
    summary = _write_summary(out_dir, cfg, None, extra_lines=extra)
    return paths + [summary]


def _minmax_dataset(ds: Dataset, lo: float, hi: float) -> Dataset:
    """Rescale each feature column onto [lo, hi] by its observed range."""
    from dataclasses import replace

    X = ds.X
    mn, mx = X.min(axis=0), X.max(axis=0)
    span = mx - mn
    flat = span == 0
    span = np.where(flat, 1.0, span)
    scaled = lo + (X - mn) * (hi - lo) / span
    scaled[:, flat] = 0.5 * (lo + hi)
    return replace(ds, X=scaled, normalization=(lo, hi))


_RUNNERS = {
    "double-descent-rfm": _run_double_descent_rfm,
    "double-descent-mlp": _run_double_descent_mlp,
    "theory-curve": _run_theory_curve,
    "regularization-sweep": _run_regularization_sweep,
    "trainset-size-sweep": _run_trainset_size_sweep,
    "adversarial-init": _run_adversarial_init,
    "robustness-sweep": _run_robustness_sweep,
    "heatmap": _run_heatmap,
    "distribution-comparison": _run_distribution_comparison,
    "normalization-comparison": _run_normalization_comparison,
}


def _write_summary(out_dir: str, cfg: ExperimentConfig, report,
                   extra_lines=()) -> str:
    lines = [f"experiment: {cfg.kind}", f"title: {_TITLES[cfg.kind]}",
             f"seed: {cfg.seed}", f"repetitions: {cfg.reps}"]
    if report is not None:
        lines.extend(report.lines())
    lines.extend(extra_lines)
    path = os.path.join(out_dir, "summary.txt")
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


def run_experiment(config, out_dir=None, jobs=None) -> list:
    """Run one experiment end to end; returns the list of written paths.

    config may be an ExperimentConfig or a path to a config file. out_dir
    and jobs override the config values (the CLI flags map here).
    """
    if not isinstance(config, ExperimentConfig):
        config = load_experiment_config(config)
    if out_dir is not None or jobs is not None:
        config = ExperimentConfig(
            kind=config.kind, seed=config.seed, reps=config.reps,
            out_dir=out_dir if out_dir is not None else config.out_dir,
            jobs=jobs if jobs is not None else config.jobs,
            params=config.params)
    os.makedirs(config.out_dir, exist_ok=True)
    return _RUNNERS[config.kind](config, config.out_dir)
