"""Exact Fourier and ANOVA analysis of functions on the Boolean cube {-1,+1}^n.

A function is represented by its vertex table: a length-2^n array of real
values, one per spin configuration. Vertex index v encodes the configuration
through its bits, bit i set meaning spin i equals -1 (so index 0 is the
all-(+1) corner). Subsets of coordinates are bit masks with the same
convention: bit i set means coordinate i belongs to the subset.

Under the uniform measure on the cube the parity characters
chi_u(s) = prod_{i in u} s_i form an orthonormal basis, so every table has a
unique expansion f = sum_u fhat_u chi_u. The mean dimension of f is the
variance-weighted average interaction order

    MD(f) = sum_{u != 0} |u| fhat_u^2 / sum_{u != 0} fhat_u^2,

which this module computes exactly by two independent routes: the spectrum
(walsh_hadamard + degree_profile) and coordinate-flip averaging
(exact_md_via_anova).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "FourierSpectrum",
    "DegreeProfile",
    "walsh_hadamard",
    "synthesize",
    "degree_profile",
    "anova_component",
    "exact_md_via_anova",
    "vertex_spins",
    "spins_to_index",
    "table_score_fn",
    "dictator_table",
    "linear_table",
    "parity_table",
    "majority_table",
    "write_vertex_table",
    "read_vertex_table",
]


def _check_table(values: np.ndarray) -> tuple[np.ndarray, int]:
    values = np.asarray(values, dtype=float)
    if values.ndim != 1:
        raise ValueError("vertex table must be one-dimensional")
    size = values.shape[0]
    n = size.bit_length() - 1
    if size < 2 or (1 << n) != size:
        raise ValueError(f"vertex table length {size} is not a power of two >= 2")
    if not np.all(np.isfinite(values)):
        raise ValueError("vertex table contains non-finite entries")
    return values, n


@dataclass(frozen=True)
class FourierSpectrum:
    """Parity-basis coefficients of a cube function.

    ``coeffs[u]`` is the coefficient of chi_u, with u read as a coordinate
    bit mask; ``coeffs[0]`` is the mean of the function.
    """

    n: int
    coeffs: np.ndarray

    def coefficient(self, mask: int) -> float:
        if not 0 <= mask < (1 << self.n):
            raise ValueError(f"mask {mask} out of range for n={self.n}")
        return float(self.coeffs[mask])

    @property
    def variance(self) -> float:
        return float(np.sum(self.coeffs[1:] ** 2))


@dataclass(frozen=True)
class DegreeProfile:
    """Variance split by interaction order.

    ``weights[k]`` is the fraction of the (non-constant) variance carried by
    subsets of size k, for k = 1..n; ``weights[0]`` is always 0. For a
    constant function the variance is zero and ``mean_dimension`` is None.
    """

    n: int
    variance: float
    weights: np.ndarray
    mean_dimension: float | None


def walsh_hadamard(values: np.ndarray) -> FourierSpectrum:
    """Expand a vertex table in the parity basis.

    Runs the in-place butterfly transform, O(n 2^n) time, and normalizes by
    2^n so that coeffs[u] = E[f chi_u]. The unnormalized transform is an
    involution, which makes ``synthesize`` its exact inverse.
    """
    values, n = _check_table(values)
    coeffs = values.copy()
    half = 1
    while half < coeffs.shape[0]:
        view = coeffs.reshape(-1, 2 * half)
        top = view[:, :half].copy()
        bot = view[:, half:].copy()
        view[:, :half] = top + bot
        view[:, half:] = top - bot
        half *= 2
    coeffs /= coeffs.shape[0]
    return FourierSpectrum(n=n, coeffs=coeffs)


def synthesize(spectrum: FourierSpectrum) -> np.ndarray:
    """Rebuild the vertex table from its spectrum (inverse transform)."""
    table = spectrum.coeffs.copy()
    half = 1
    while half < table.shape[0]:
        view = table.reshape(-1, 2 * half)
        top = view[:, :half].copy()
        bot = view[:, half:].copy()
        view[:, :half] = top + bot
        view[:, half:] = top - bot
        half *= 2
    return table


def degree_profile(spectrum: FourierSpectrum) -> DegreeProfile:
    """Collapse a spectrum onto interaction orders.

    Returns the normalized per-order variance weights and the mean dimension
    sum_k k * weights[k]. A zero-variance (constant) function has no defined
    mean dimension and is flagged with ``mean_dimension = None`` rather than
    NaN.
    """
    n = spectrum.n
    orders = popcount(np.arange(1 << n))
    energy = spectrum.coeffs**2
    per_order = np.zeros(n + 1)
    np.add.at(per_order, orders, energy)
    per_order[0] = 0.0
    variance = float(per_order.sum())
    if variance <= 0.0:
        return DegreeProfile(n=n, variance=0.0, weights=np.zeros(n + 1), mean_dimension=None)
    weights = per_order / variance
    md = float(np.arange(n + 1) @ weights)
    return DegreeProfile(n=n, variance=variance, weights=weights, mean_dimension=md)


def popcount(masks: np.ndarray) -> np.ndarray:
    """Number of set bits per entry, vectorized."""
    masks = np.asarray(masks, dtype=np.uint64)
    counts = np.zeros(masks.shape, dtype=np.int64)
    while np.any(masks):
        counts += (masks & 1).astype(np.int64)
        masks >>= 1
    return counts


def _conditional_mean(values: np.ndarray, n: int, mask: int, assignment: dict[int, int]) -> float:
    # mean of f over all vertices consistent with the pinned coordinates
    idx = np.arange(values.shape[0])
    keep = np.ones(values.shape[0], dtype=bool)
    for i in range(n):
        if mask >> i & 1:
            bit = 1 if assignment[i] < 0 else 0
            keep &= ((idx >> i) & 1) == bit
    return float(values[keep].mean())


def anova_component(values: np.ndarray, u: int, x_u: dict[int, int]) -> float:
    """Evaluate the ANOVA component f_u at a partial spin assignment.

    ``u`` is a coordinate bit mask and ``x_u`` maps each coordinate in u to
    a spin in {-1, +1}. The components are defined recursively under the
    uniform measure: f_0 is the global mean, and

        f_u(x_u) = E[f | x_u] - sum_{v strictly contained in u} f_v(x_v).

    Each component is centered and components are mutually orthogonal, which
    is what makes the variance split of ``degree_profile`` well defined.
    """
    values, n = _check_table(values)
    if not 0 <= u < (1 << n):
        raise ValueError(f"subset mask {u} out of range for n={n}")
    coords = [i for i in range(n) if u >> i & 1]
    if set(x_u) != set(coords):
        raise ValueError("partial assignment must cover exactly the coordinates in u")
    for i, s in x_u.items():
        if s not in (-1, 1):
            raise ValueError(f"spin for coordinate {i} must be -1 or +1, got {s}")

    memo: dict[int, float] = {}

    def component(v: int) -> float:
        if v in memo:
            return memo[v]
        sub_assignment = {i: x_u[i] for i in x_u if v >> i & 1}
        total = _conditional_mean(values, n, v, sub_assignment)
        if v:
            w = (v - 1) & v
            while True:
                total -= component(w)
                if w == 0:
                    break
                w = (w - 1) & v
        memo[v] = total
        return total

    return component(u)


def exact_md_via_anova(values: np.ndarray) -> float:
    """Exact mean dimension by exhaustive coordinate-flip averaging.

    The total variance of the ANOVA components, weighted by their order,
    equals the summed flip influences: for each coordinate,
    tau_i^2 = E[((f(s) - f(s^(flip i))) / 2)^2] with the expectation over all
    2^n vertices. The mean dimension is sum_i tau_i^2 divided by the
    variance. This route never touches the spectrum, so it serves as an
    independent oracle for the Fourier route.

    Raises ValueError for a constant table (zero variance).
    """
    values, n = _check_table(values)
    idx = np.arange(values.shape[0])
    total_influence = 0.0
    for i in range(n):
        diffs = (values - values[idx ^ (1 << i)]) / 2.0
        total_influence += float(np.mean(diffs**2))
    variance = float(np.mean(values**2) - np.mean(values) ** 2)
    if variance <= 0.0:
        raise ValueError("mean dimension is undefined for a constant table")
    return total_influence / variance


def vertex_spins(n: int) -> np.ndarray:
    """All 2^n spin configurations as a (2^n, n) array of +-1 floats."""
    idx = np.arange(1 << n)
    bits = (idx[:, None] >> np.arange(n)[None, :]) & 1
    return 1.0 - 2.0 * bits


def spins_to_index(spins: np.ndarray) -> np.ndarray:
    """Map rows of +-1 spins back to vertex indices."""
    spins = np.asarray(spins)
    bits = (spins < 0).astype(np.int64)
    return bits @ (1 << np.arange(spins.shape[-1], dtype=np.int64))


def table_score_fn(values: np.ndarray):
    """Wrap a vertex table as a batched score function over spin rows."""
    values, _ = _check_table(values)

    def score(x: np.ndarray) -> np.ndarray:
        return values[spins_to_index(x)]

    return score


def dictator_table(n: int, coordinate: int = 0) -> np.ndarray:
    """f(s) = s_i."""
    return vertex_spins(n)[:, coordinate].copy()


def linear_table(n: int, coeffs: np.ndarray | None = None) -> np.ndarray:
    """f(s) = sum_i a_i s_i, with unit coefficients by default."""
    if coeffs is None:
        coeffs = np.ones(n)
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.shape != (n,):
        raise ValueError("need one coefficient per coordinate")
    return vertex_spins(n) @ coeffs


def parity_table(n: int, mask: int) -> np.ndarray:
    """f(s) = chi_mask(s), the parity of the coordinates in mask."""
    if not 0 < mask < (1 << n):
        raise ValueError("parity mask must be a nonempty subset")
    spins = vertex_spins(n)
    coords = [i for i in range(n) if mask >> i & 1]
    return np.prod(spins[:, coords], axis=1)


def majority_table(n: int) -> np.ndarray:
    """f(s) = sign(sum_i s_i); n must be odd so there are no ties."""
    if n % 2 == 0:
        raise ValueError("majority needs an odd number of coordinates")
    return np.sign(vertex_spins(n).sum(axis=1))


def write_vertex_table(path, values: np.ndarray) -> None:
    """Write rows ``mask,value`` in ascending mask order."""
    values, _ = _check_table(values)
    lines = ["mask,value"]
    lines += [f"{mask},{value!r}" for mask, value in enumerate(values.tolist())]
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def read_vertex_table(path) -> np.ndarray:
    with open(path, "r", encoding="ascii") as fh:
        lines = [line.strip() for line in fh if line.strip()]
    if not lines or lines[0] != "mask,value":
        raise ValueError(f"{path}: expected header 'mask,value'")
    values = np.empty(len(lines) - 1)
    for row, line in enumerate(lines[1:]):
        parts = line.split(",")
        if len(parts) != 2:
            raise ValueError(f"{path}: malformed row {row}: {line!r}")
        mask, value = parts
        if int(mask) != row:
            raise ValueError(f"{path}: masks must be 0..2^n-1 in order, got {mask} at row {row}")
        values[row] = float(value)
    _check_table(values)
    return values
