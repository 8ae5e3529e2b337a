"""Random feature models and their Gaussian-equivalence description.

A model computes y_hat(x) = w^T sigma(F^T x / sqrt(D)) / sqrt(N) with i.i.d.
Gaussian features F. Averaging over binary (or any matching-two-moment)
inputs replaces the activation by its Gaussian moments

    k0 = E[sigma(z)]    k1 = E[z sigma(z)]      k2 = E[sigma(z)^2]
    kb0 = E[sigma'(z)]  kb1 = E[z sigma'(z)]    kb2 = E[sigma'(z)^2]

with z standard normal, plus the residuals k_star_sq = k2 - k1^2 - k0^2 and
kbar_star_sq = kb2 - kb1^2 - kb0^2. Those eight numbers and the feature
overlap Omega = F^T F / D give a closed form for the mean dimension of the
model as a ratio of quadratic forms in w (``analytic_bmd``).

Derivatives are weak derivatives: sign contributes a point mass 2*delta(0)
whose square is not integrable, so its kb2 is +inf and its mean dimension
diverges. Kinked activations are integrated by splitting the Gaussian
integral at the kink so that no quadrature node ever lands on it.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import numpy as np
from scipy.special import roots_hermite

__all__ = [
    "Activation",
    "KappaSet",
    "PsiMatrices",
    "RfmModel",
    "QuadratureError",
    "compute_kappas",
    "random_rfm",
    "with_weights",
    "forward",
    "score_fn",
    "build_psi",
    "analytic_bmd",
    "bmd_from_overlaps",
    "save_rfm",
    "load_rfm",
]

DEFAULT_NODES = 201
TAIL_CUTOFF = 13.0  # Gaussian mass beyond |z| = 13 is ~ 1e-37


class QuadratureError(RuntimeError):
    """Raised when the node-doubling check fails to converge."""


@dataclass(frozen=True)
class Activation:
    """Pointwise nonlinearity with weak first derivative.

    kinds: tanh, sign, linear, leaky-relu (slope 1 for z > 0, ``leak``
    below; leak 0 is the plain relu). ``deriv`` returns the almost-
    everywhere pointwise derivative; point masses (sign's 2*delta at 0)
    are reported separately through ``deriv_atoms``.
    """

    kind: str
    leak: float = 0.0

    @classmethod
    def tanh(cls) -> "Activation":
        return cls(kind="tanh")

    @classmethod
    def sign(cls) -> "Activation":
        return cls(kind="sign")

    @classmethod
    def linear(cls) -> "Activation":
        return cls(kind="linear")

    @classmethod
    def leaky_relu(cls, leak: float = 0.0) -> "Activation":
        return cls(kind="leaky-relu", leak=float(leak))

    def value(self, z: np.ndarray) -> np.ndarray:
        if self.kind == "tanh":
            return np.tanh(z)
        if self.kind == "sign":
            return np.sign(z)
        if self.kind == "linear":
            return np.asarray(z, dtype=float)
        if self.kind == "leaky-relu":
            return np.where(z > 0, z, self.leak * z)
        raise ValueError(f"unknown activation kind {self.kind!r}")

    def deriv(self, z: np.ndarray) -> np.ndarray:
        if self.kind == "tanh":
            return 1.0 - np.tanh(z) ** 2
        if self.kind == "sign":
            return np.zeros_like(z)
        if self.kind == "linear":
            return np.ones_like(z)
        if self.kind == "leaky-relu":
            return np.where(z > 0, 1.0, self.leak)
        raise ValueError(f"unknown activation kind {self.kind!r}")

    @property
    def kink(self) -> float | None:
        return 0.0 if self.kind in ("sign", "leaky-relu") else None

    @property
    def deriv_atoms(self) -> tuple[tuple[float, float], ...]:
        """(location, mass) of delta components of the weak derivative."""
        return ((0.0, 2.0),) if self.kind == "sign" else ()

    @property
    def is_odd(self) -> bool:
        return self.kind in ("tanh", "sign", "linear") or (
            self.kind == "leaky-relu" and self.leak == 1.0)

    @property
    def tag(self) -> str:
        if self.kind == "leaky-relu":
            return f"leaky-relu:{self.leak!r}"
        return self.kind

    @classmethod
    def from_tag(cls, tag: str) -> "Activation":
        name, _, param = tag.partition(":")
        if name == "leaky-relu":
            return cls.leaky_relu(float(param) if param else 0.0)
        if name in ("tanh", "sign", "linear"):
            return cls(kind=name)
        raise ValueError(f"unknown activation tag {tag!r}")


@dataclass(frozen=True)
class KappaSet:
    """Gaussian moments of an activation and its weak derivative."""

    k0: float
    k1: float
    k2: float
    k_star_sq: float
    kbar0: float
    kbar1: float
    kbar2: float
    kbar_star_sq: float


def _gaussian_rule(n_nodes: int, kink: float | None):
    """Nodes and weights for integrals against the standard normal density.

    Smooth integrands use Gauss-Hermite; a kink at 0 switches to
    Gauss-Legendre panels on each half-line, whose open nodes never touch
    the kink.
    """
    if kink is None:
        x, w = roots_hermite(n_nodes)
        return x * np.sqrt(2.0), w / np.sqrt(np.pi)
    x, w = np.polynomial.legendre.leggauss(n_nodes)
    half = 0.5 * (x + 1.0) * TAIL_CUTOFF
    hw = 0.5 * w * TAIL_CUTOFF
    nodes = np.concatenate([-half[::-1], half])
    weights = np.concatenate([hw[::-1], hw])
    weights = weights * np.exp(-(nodes**2) / 2.0) / np.sqrt(2.0 * np.pi)
    return nodes, weights


def _kappas_at(activation: Activation, n_nodes: int) -> KappaSet:
    z, p = _gaussian_rule(n_nodes, activation.kink)
    s = activation.value(z)
    d = activation.deriv(z)
    k0 = float(p @ s)
    k1 = float(p @ (z * s))
    k2 = float(p @ s**2)
    kb0 = float(p @ d)
    kb1 = float(p @ (z * d))
    kb2 = float(p @ d**2)
    for loc, mass in activation.deriv_atoms:
        dens = np.exp(-(loc**2) / 2.0) / np.sqrt(2.0 * np.pi)
        kb0 += mass * dens
        kb1 += mass * loc * dens
        kb2 = np.inf  # the squared point mass is not integrable
    def residual(second, first, zeroth):
        r = second - first**2 - zeroth**2
        return 0.0 if -1e-12 < r < 0.0 else r
    return KappaSet(k0, k1, k2, residual(k2, k1, k0),
                    kb0, kb1, kb2, residual(kb2, kb1, kb0))


def compute_kappas(activation: Activation, n_nodes: int = DEFAULT_NODES) -> KappaSet:
    """All eight Gaussian moments with a node-doubling convergence check.

    Raises QuadratureError if any coefficient moves by more than 1e-8 when
    the node count doubles (infinite coefficients compare equal to
    themselves and are exempt).
    """
    if n_nodes < 100:
        raise ValueError("need at least 100 quadrature nodes")
    if activation.kind == "linear":
        # standard normal moments, exact; keeps the identity map at BMD 1
        return KappaSet(0.0, 1.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0)
    coarse = _kappas_at(activation, n_nodes)
    fine = _kappas_at(activation, 2 * n_nodes)
    for name in ("k0", "k1", "k2", "k_star_sq", "kbar0", "kbar1", "kbar2", "kbar_star_sq"):
        a, b = getattr(coarse, name), getattr(fine, name)
        if np.isinf(a) and np.isinf(b):
            continue
        if abs(a - b) > 1e-8:
            raise QuadratureError(
                f"{name} moved by {abs(a - b):.3g} when doubling nodes for {activation.tag}")
    return coarse


@dataclass(frozen=True)
class PsiMatrices:
    """Feature overlap and the two quadratic-form kernels built on it.

    omega   = F^T F / D
    psi     = k_star_sq I + k1^2 omega           (output variance kernel)
    psi_bar = kbar_star_sq diag(omega_ii) + kbar0^2 omega + kbar1^2 omega*omega
              (flip-sensitivity kernel; omega*omega is elementwise)
    """

    omega: np.ndarray
    psi: np.ndarray
    psi_bar: np.ndarray


@dataclass
class RfmModel:
    """Immutable-by-convention random feature model.

    F has shape (D, N); w has shape (N,). The Psi matrices are built
    lazily on first use and shared when only w changes.
    """

    D: int
    N: int
    F: np.ndarray
    w: np.ndarray
    activation: Activation
    kappas: KappaSet
    _psi: PsiMatrices | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.F.shape != (self.D, self.N):
            raise ValueError(f"F must be (D, N) = ({self.D}, {self.N}), got {self.F.shape}")
        if self.w.shape != (self.N,):
            raise ValueError(f"w must have shape ({self.N},), got {self.w.shape}")


def random_rfm(D: int, N: int, activation: Activation, seed: int,
               kappas: KappaSet | None = None) -> RfmModel:
    """Fresh model with i.i.d. standard normal features and weights."""
    rng = np.random.default_rng(np.random.SeedSequence([seed]))
    F = rng.standard_normal((D, N))
    w = rng.standard_normal(N)
    if kappas is None:
        kappas = compute_kappas(activation)
    return RfmModel(D=D, N=N, F=F, w=w, activation=activation, kappas=kappas)


def with_weights(model: RfmModel, w: np.ndarray) -> RfmModel:
    """Same features and cached matrices, new second-layer weights."""
    return dataclasses.replace(model, w=np.asarray(w, dtype=float))


def forward(model: RfmModel, x: np.ndarray) -> np.ndarray | float:
    """y_hat = w^T sigma(F^T x / sqrt(D)) / sqrt(N), batched over rows."""
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    h = np.atleast_2d(x) @ model.F / np.sqrt(model.D)
    out = model.activation.value(h) @ model.w / np.sqrt(model.N)
    return float(out[0]) if single else out


def score_fn(model: RfmModel):
    """Batched ScoreFunction view of the model for the MD estimator."""
    return lambda x: forward(model, np.atleast_2d(x))


def build_psi(model: RfmModel) -> PsiMatrices:
    if model._psi is None:
        k = model.kappas
        omega = model.F.T @ model.F / model.D
        psi = k.k_star_sq * np.eye(model.N) + k.k1**2 * omega
        psi_bar = (k.kbar_star_sq * np.diag(np.diag(omega))
                   + k.kbar0**2 * omega + k.kbar1**2 * omega**2)
        model._psi = PsiMatrices(omega=omega, psi=psi, psi_bar=psi_bar)
    return model._psi


def analytic_bmd(model: RfmModel) -> float:
    """Closed-form mean dimension w^T psi_bar w / w^T psi w.

    Exact in the wide limit for any input law matching the first two
    binary moments. Raises for sign activation (kbar2 diverges) and for
    zero weights.
    """
    if not np.any(model.w):
        raise ValueError("mean dimension of the zero function is undefined")
    if not np.isfinite(model.kappas.kbar2):
        raise ValueError(
            f"mean dimension diverges for {model.activation.tag}: the squared weak "
            "derivative is not Gaussian integrable")
    mats = build_psi(model)
    num = model.w @ mats.psi_bar @ model.w
    den = model.w @ mats.psi @ model.w
    return float(num / den)


def bmd_from_overlaps(kappas: KappaSet, q_d: float, p_d: float) -> float:
    """Mean dimension from the overlap order parameters of an odd activation.

    Uses 1 + (kbar2 - k2) q_d / Q_d with Q_d = k_star_sq q_d + k1^2 p_d,
    the simplification of the quadratic-form ratio valid when omega_ii = 1
    (exact as D grows; see the matching test on column-normalized F).
    """
    if not np.isfinite(kappas.kbar2):
        raise ValueError("mean dimension diverges: kbar2 is not finite")
    big_q = kappas.k_star_sq * q_d + kappas.k1**2 * p_d
    return 1.0 + (kappas.kbar2 - kappas.k2) * q_d / big_q


# ---------------------------------------------------------------------------
# checkpoint format: versioned text, exact round-trip through float repr

CHECKPOINT_HEADER = "meandim-rfm-v1"


def save_rfm(path, model: RfmModel) -> None:
    lines = [CHECKPOINT_HEADER,
             f"D = {model.D}",
             f"N = {model.N}",
             f"activation = {model.activation.tag}",
             "F ="]
    lines += [" ".join(repr(v) for v in row) for row in model.F.tolist()]
    lines.append("w =")
    lines.append(" ".join(repr(v) for v in model.w.tolist()))
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def load_rfm(path) -> RfmModel:
    with open(path, "r", encoding="ascii") as fh:
        lines = [line.rstrip("\n") for line in fh]
    if not lines or lines[0] != CHECKPOINT_HEADER:
        raise ValueError(f"{path}: not a {CHECKPOINT_HEADER} checkpoint")
    D = int(lines[1].partition(" = ")[2])
    N = int(lines[2].partition(" = ")[2])
    activation = Activation.from_tag(lines[3].partition(" = ")[2])
    if lines[4] != "F =":
        raise ValueError(f"{path}: malformed checkpoint, expected 'F =' on line 5")
    F = np.array([[float(v) for v in lines[5 + i].split()] for i in range(D)])
    if lines[5 + D] != "w =":
        raise ValueError(f"{path}: malformed checkpoint, expected 'w =' after F block")
    w = np.array([float(v) for v in lines[6 + D].split()])
    return RfmModel(D=D, N=N, F=F, w=w, activation=activation,
                    kappas=compute_kappas(activation))
