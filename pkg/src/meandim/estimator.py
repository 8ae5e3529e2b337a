"""Monte Carlo estimation of mean dimension for black-box score functions.

The estimator draws background inputs from a pluggable i.i.d. (or
empirical-resample) distribution, perturbs one coordinate at a time, and
averages squared output changes:

    tau_i^2 = 1/2 E[(f(x) - f(x with coordinate i resampled))^2]
    md      = sum_i tau_i^2 / Var[f]

Every sample probes all coordinates against a single shared background draw,
and Var[f] is estimated from the same stream of background evaluations, so
the ratio is exactly invariant under affine rescaling of f. Standard errors
come from 10 batch means.

Score functions are batched: they receive an (m, n) array of inputs and must
return m finite reals (or an (m, k) block for the multi-output variant).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "InputSampler",
    "InfluenceProfile",
    "ScoreEvaluationError",
    "estimate_md",
    "estimate_md_binary_fast",
    "estimate_md_multioutput",
    "influence_heatmap",
    "write_profile_csv",
    "read_profile_csv",
    "profile_summary",
    "write_profile_summary",
    "read_profile_summary",
]

N_BATCHES = 10
SIGMA_SQ_FLOOR = 1e-12


class ScoreEvaluationError(RuntimeError):
    """Raised when a score function returns a non-finite value."""


@dataclass(frozen=True)
class InputSampler:
    """Input distribution for backgrounds and single-coordinate resampling.

    Kinds:
      binary    i.i.d. uniform +-1 spins (mean 0, second moment 1)
      gaussian  i.i.d. standard normals (mean 0, second moment 1)
      uniform   i.i.d. uniform on [lo, hi]
      empirical backgrounds are whole rows drawn from a stored dataset;
                a resampled coordinate is drawn uniformly from [lo, hi]
    """

    kind: str
    dim: int
    lo: float = -1.0
    hi: float = 1.0
    data: np.ndarray | None = None

    @classmethod
    def binary(cls, dim: int) -> "InputSampler":
        return cls(kind="binary", dim=dim)

    @classmethod
    def gaussian(cls, dim: int) -> "InputSampler":
        return cls(kind="gaussian", dim=dim)

    @classmethod
    def uniform(cls, dim: int, lo: float = -1.0, hi: float = 1.0) -> "InputSampler":
        if not hi > lo:
            raise ValueError("uniform sampler needs hi > lo")
        return cls(kind="uniform", dim=dim, lo=lo, hi=hi)

    @classmethod
    def empirical(cls, data: np.ndarray, lo: float = -1.0, hi: float = 1.0) -> "InputSampler":
        data = np.asarray(data, dtype=float)
        if data.ndim != 2 or data.shape[0] == 0:
            raise ValueError("empirical sampler needs a nonempty (rows, dim) dataset")
        if not hi > lo:
            raise ValueError("empirical sampler needs hi > lo")
        return cls(kind="empirical", dim=data.shape[1], lo=lo, hi=hi, data=data)

    def sample_background(self, rng: np.random.Generator, m: int) -> np.ndarray:
        if self.kind == "binary":
            return rng.integers(0, 2, size=(m, self.dim)).astype(float) * 2.0 - 1.0
        if self.kind == "gaussian":
            return rng.standard_normal((m, self.dim))
        if self.kind == "uniform":
            return rng.uniform(self.lo, self.hi, size=(m, self.dim))
        if self.kind == "empirical":
            rows = rng.integers(0, self.data.shape[0], size=m)
            return self.data[rows].copy()
        raise ValueError(f"unknown sampler kind {self.kind!r}")

    def resample_coordinate(self, rng: np.random.Generator, m: int) -> np.ndarray:
        if self.kind == "binary":
            return rng.integers(0, 2, size=m).astype(float) * 2.0 - 1.0
        if self.kind == "gaussian":
            return rng.standard_normal(m)
        if self.kind in ("uniform", "empirical"):
            return rng.uniform(self.lo, self.hi, size=m)
        raise ValueError(f"unknown sampler kind {self.kind!r}")


@dataclass(frozen=True)
class InfluenceProfile:
    """Per-coordinate influences and the mean dimension built from them.

    ``md`` and ``std_err_md`` are None when the variance estimate falls
    below 1e-12 (constant function on the sampled region);
    ``participation_ratio`` is None when the total influence is zero.
    """

    tau_sq: np.ndarray
    sigma_sq: float
    md: float | None
    participation_ratio: float | None
    n_samples: int
    std_err_md: float | None
    seed: int

    @property
    def dim(self) -> int:
        return self.tau_sq.shape[0]

    @property
    def total_influence(self) -> float:
        return float(self.tau_sq.sum())


def _participation_ratio(tau_sq: np.ndarray) -> float | None:
    total = float(tau_sq.sum())
    if total <= 0.0:
        return None
    tau = np.sqrt(np.maximum(tau_sq, 0.0))
    return float(tau_sq.shape[0] * total / tau.sum() ** 2)


def _check_finite(values: np.ndarray, where: str) -> None:
    if not np.all(np.isfinite(values)):
        bad = int(np.flatnonzero(~np.isfinite(np.atleast_1d(values)))[0])
        raise ScoreEvaluationError(f"score function returned a non-finite value ({where}, flat offset {bad})")


def _chunk_size(dim: int) -> int:
    return max(64, (1 << 21) // max(dim, 1))


def _shard_spans(n_samples: int, n_shards: int) -> list[tuple[int, int]]:
    """Split [0, n_samples) into n_shards contiguous spans of near-equal size."""
    base, extra = divmod(n_samples, n_shards)
    spans, start = [], 0
    for k in range(n_shards):
        count = base + (1 if k < extra else 0)
        spans.append((start, count))
        start += count
    return spans


def _accumulate_shard(f, sampler: InputSampler, n_samples: int, seed: int, shard: int,
                      start: int, count: int, mode: str, n_outputs: int):
    """One shard of the estimation stream, seeded by (seed, shard).

    Returns per-batch accumulators: tau sums (N_BATCHES, dim, n_outputs),
    f sums and square sums (N_BATCHES, n_outputs), and batch sizes. Batch
    membership follows the global sample index, so shard accumulators merge
    by plain addition.
    """
    dim = sampler.dim
    rng = np.random.default_rng(np.random.SeedSequence([seed, shard]))
    tau_sums = np.zeros((N_BATCHES, dim, n_outputs))
    f_sum = np.zeros((N_BATCHES, n_outputs))
    f_sq_sum = np.zeros((N_BATCHES, n_outputs))
    batch_count = np.zeros(N_BATCHES, dtype=np.int64)

    def evaluate(x: np.ndarray, where: str) -> np.ndarray:
        out = np.asarray(f(x), dtype=float)
        expected = (x.shape[0],) if n_outputs == 1 else (x.shape[0], n_outputs)
        if out.shape != expected:
            raise ValueError(f"score function returned shape {out.shape}, expected {expected}")
        _check_finite(out, where)
        return out.reshape(x.shape[0], n_outputs)

    done = start
    chunk = _chunk_size(dim)
    while done < start + count:
        m = min(chunk, start + count - done)
        x = sampler.sample_background(rng, m)
        base = evaluate(x, f"background samples {done}..{done + m - 1}")
        batches = np.arange(done, done + m) * N_BATCHES // n_samples
        np.add.at(f_sum, batches, base)
        np.add.at(f_sq_sum, batches, base**2)
        np.add.at(batch_count, batches, np.ones(m, dtype=np.int64))
        for i in range(dim):
            x_mod = x.copy()
            if mode == "resample":
                x_mod[:, i] = sampler.resample_coordinate(rng, m)
                scale = 0.5
            else:  # flip: compare the two spin states of coordinate i
                x_mod[:, i] = -x_mod[:, i]
                scale = 0.25
            other = evaluate(x_mod, f"coordinate {i}, samples {done}..{done + m - 1}")
            np.add.at(tau_sums, (batches, i), scale * (base - other) ** 2)
        done += m
    return tau_sums, f_sum, f_sq_sum, batch_count


def _accumulate(f, sampler: InputSampler, n_samples: int, seed: int, mode: str,
                n_outputs: int, n_shards: int = 1, workers: int | None = None):
    """Run the sharded estimation stream and merge the accumulators.

    Shard k draws from substream (seed, k), so results are bit-identical
    for fixed (f, sampler, n_samples, seed, n_shards) no matter how many
    workers execute them: merging is a sum of sums, taken in shard order.
    """
    if n_samples < 100:
        raise ValueError("need at least 100 samples")
    if n_shards < 1 or n_shards > n_samples:
        raise ValueError("n_shards must be in [1, n_samples]")
    spans = _shard_spans(n_samples, n_shards)
    if workers is not None and workers > 1 and n_shards > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(
                lambda item: _accumulate_shard(f, sampler, n_samples, seed, item[0],
                                               item[1][0], item[1][1], mode, n_outputs),
                enumerate(spans)))
    else:
        parts = [_accumulate_shard(f, sampler, n_samples, seed, k, s, c, mode, n_outputs)
                 for k, (s, c) in enumerate(spans)]
    merged = [np.zeros_like(a) for a in parts[0]]
    for part in parts:
        for acc, piece in zip(merged, part):
            acc += piece
    return tuple(merged)


def _assemble(tau_sums, f_sum, f_sq_sum, batch_count, n_samples, seed, output: int) -> InfluenceProfile:
    counts = batch_count.astype(float)
    tau_sq = tau_sums[:, :, output].sum(axis=0) / n_samples
    mean = f_sum[:, output].sum() / n_samples
    sigma_sq = float(f_sq_sum[:, output].sum() / n_samples - mean**2)
    md = std_err = None
    if sigma_sq >= SIGMA_SQ_FLOOR:
        md = float(tau_sq.sum() / sigma_sq)
        batch_mean = f_sum[:, output] / counts
        batch_sigma = f_sq_sum[:, output] / counts - batch_mean**2
        batch_tau = tau_sums[:, :, output].sum(axis=1) / counts
        with np.errstate(divide="ignore", invalid="ignore"):
            batch_md = batch_tau / batch_sigma
        if np.all(np.isfinite(batch_md)):
            std_err = float(np.std(batch_md, ddof=1) / np.sqrt(N_BATCHES))
    return InfluenceProfile(
        tau_sq=tau_sq,
        sigma_sq=sigma_sq,
        md=md,
        participation_ratio=_participation_ratio(tau_sq),
        n_samples=n_samples,
        std_err_md=std_err,
        seed=seed,
    )


def estimate_md(f, sampler: InputSampler, n_samples: int, seed: int,
                n_shards: int = 1, workers: int | None = None) -> InfluenceProfile:
    """Estimate influences and mean dimension by coordinate resampling.

    Parameters
    ----------
    f : callable
        Batched score function mapping an (m, n) input array to m reals.
        Must be safe for concurrent read-only evaluation when workers > 1;
        it is never mutated.
    sampler : InputSampler
        Background and resampling distribution; its dim must match f.
    n_samples : int
        Number of background draws (>= 100). Each draw costs n+1
        evaluations of f because every coordinate is probed.
    seed : int
        Results are bit-identical for identical (f, sampler, n_samples,
        seed, n_shards).
    n_shards, workers
        The sample stream splits into n_shards substreams seeded by
        (seed, shard); workers only sets how many run concurrently and
        never changes the result.
    """
    acc = _accumulate(f, sampler, n_samples, seed, mode="resample", n_outputs=1,
                      n_shards=n_shards, workers=workers)
    return _assemble(*acc, n_samples, seed, output=0)


def estimate_md_binary_fast(f, n: int, n_samples: int, seed: int,
                            n_shards: int = 1, workers: int | None = None) -> InfluenceProfile:
    """Estimate mean dimension of f on the spin cube via discrete derivatives.

    For each background the two states of coordinate i are compared
    directly, tau_i^2 = mean of ((f(s_i -> +1) - f(s_i -> -1)) / 2)^2, which
    has the same expectation as ``estimate_md`` with the binary sampler but
    never wastes a draw on an unchanged coordinate. The shared-background
    evaluation makes this n+1 (not 2n) calls per sample.
    """
    acc = _accumulate(f, InputSampler.binary(n), n_samples, seed, mode="flip",
                      n_outputs=1, n_shards=n_shards, workers=workers)
    return _assemble(*acc, n_samples, seed, output=0)


def estimate_md_multioutput(f, n_outputs: int, sampler: InputSampler, n_samples: int, seed: int,
                            mode: str = "resample", n_shards: int = 1,
                            workers: int | None = None) -> list[InfluenceProfile]:
    """Profile several score functions that share one forward pass.

    ``f`` maps (m, n) inputs to an (m, n_outputs) block (for example the
    per-class log-probabilities of a classifier); one profile per column is
    returned, all computed from the same background stream.
    """
    if mode not in ("resample", "flip"):
        raise ValueError("mode must be 'resample' or 'flip'")
    acc = _accumulate(f, sampler, n_samples, seed, mode=mode, n_outputs=n_outputs,
                      n_shards=n_shards, workers=workers)
    return [_assemble(*acc, n_samples, seed, output=k) for k in range(n_outputs)]


def influence_heatmap(profile: InfluenceProfile, width: int, height: int) -> np.ndarray:
    """Min-max normalize tau_i^2 onto a (height, width) grid, row-major.

    A flat profile (all influences equal) maps to a grid of ones.
    """
    if width * height != profile.dim:
        raise ValueError(f"grid {width}x{height} does not cover {profile.dim} coordinates")
    tau_sq = profile.tau_sq
    lo, hi = float(tau_sq.min()), float(tau_sq.max())
    if hi - lo < 1e-300:
        return np.ones((height, width))
    return ((tau_sq - lo) / (hi - lo)).reshape(height, width)


# ---------------------------------------------------------------------------
# serialization: CSV for the influence vector, flat key-value summary text

def write_profile_csv(path, profile: InfluenceProfile) -> None:
    lines = ["i,tau_sq"]
    lines += [f"{i},{v!r}" for i, v in enumerate(profile.tau_sq.tolist())]
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def read_profile_csv(path) -> np.ndarray:
    with open(path, "r", encoding="ascii") as fh:
        lines = [line.strip() for line in fh if line.strip()]
    if not lines or lines[0] != "i,tau_sq":
        raise ValueError(f"{path}: expected header 'i,tau_sq'")
    out = np.empty(len(lines) - 1)
    for row, line in enumerate(lines[1:]):
        i, value = line.split(",")
        if int(i) != row:
            raise ValueError(f"{path}: coordinate indices must be contiguous from 0")
        out[row] = float(value)
    return out


def _format_value(value: float | int | None) -> str:
    return "undefined" if value is None else repr(value)


def profile_summary(profile: InfluenceProfile) -> str:
    pairs = [
        ("md", profile.md),
        ("sigma_sq", profile.sigma_sq),
        ("participation_ratio", profile.participation_ratio),
        ("std_err_md", profile.std_err_md),
        ("n_samples", profile.n_samples),
        ("seed", profile.seed),
    ]
    return "\n".join(f"{key} = {_format_value(value)}" for key, value in pairs) + "\n"


def write_profile_summary(path, profile: InfluenceProfile) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(profile_summary(profile))


def read_profile_summary(path) -> dict:
    out = {}
    with open(path, "r", encoding="ascii") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            key, _, value = line.partition(" = ")
            if value == "undefined":
                out[key] = None
            elif key in ("n_samples", "seed"):
                out[key] = int(value)
            else:
                out[key] = float(value)
    return out
