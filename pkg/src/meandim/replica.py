"""Replica-symmetric zero-temperature theory of ridge-trained RFMs.

The typical-case behavior of the trained model is captured by ten order
parameters (overlaps and their conjugates). Their values extremize a
replica potential built from three pieces: an entropic term, a
student-feature term, and an energetic term

    G_E = 2 Int Dz0 H(-M z0 / sqrt(Q_d - M^2 + delta))
              max_z1 [ -z1^2/2 - loss(sqrt(Q_d) z0 + sqrt(dQ) z1) ]

where M = k1 r, Q_d = k_star_sq q_d + k1^2 p_d and dQ = k_star_sq dq +
k1^2 dp collapse the activation to its Gaussian moments. The inner max is
closed-form for the square loss and a safeguarded Newton solve for
cross-entropy. ``solve_saddle`` iterates the stationarity conditions of
the potential with damping; ``free_energy`` exposes the potential itself
so converged solutions can be audited by finite differences.

Observables: eps_g = arccos(M / sqrt(Q_d)) / pi against the clean teacher,
per-sample train and test losses, and the mean dimension
1 + (kbar2 - k2) q_d / Q_d.

``spectral_ols`` gives the independent eigenvalue-trace route to (q_d,
Q_d) for the ridge case, either from sampled feature spectra or from the
Marchenko-Pastur law, which isolates the secondary mean-dimension peak at
N = D.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import expit, log_ndtr, ndtr

from .rfm import KappaSet, bmd_from_overlaps

__all__ = [
    "ReplicaInput",
    "OrderParams",
    "Observables",
    "CurvePoint",
    "ConvergenceError",
    "solve_saddle",
    "free_energy",
    "observables",
    "generalization_error",
    "sweep_curve",
    "optimal_lambda",
    "spectral_ols",
    "mse_inner_max",
    "ce_inner_max",
    "write_curve_csv",
    "read_curve_csv",
]

Z0_NODES = 400
Z0_CUTOFF = 8.0  # Gaussian tail mass beyond |z| = 8 is ~ 1e-15


class ConvergenceError(RuntimeError):
    """Raised when the damped fixed-point iteration does not settle."""


@dataclass(frozen=True)
class ReplicaInput:
    """Problem definition in the proportional regime.

    alpha = P/N always; the input dimension enters through exactly one of
    alpha_d = D/N or alpha_t = P/D (they are tied by alpha_t =
    alpha/alpha_d). delta is the variance of the pre-sign Gaussian label
    noise.
    """

    alpha: float
    lam: float
    loss: str
    kappas: KappaSet
    delta: float = 0.0
    alpha_d: float | None = None
    alpha_t: float | None = None

    def __post_init__(self):
        if (self.alpha_d is None) == (self.alpha_t is None):
            raise ValueError("give exactly one of alpha_d or alpha_t")
        if self.alpha_d is None:
            object.__setattr__(self, "alpha_d", self.alpha / self.alpha_t)
        else:
            object.__setattr__(self, "alpha_t", self.alpha / self.alpha_d)
        if self.alpha <= 0 or self.alpha_d <= 0:
            raise ValueError("alpha ratios must be positive")
        if self.lam < 0:
            raise ValueError("lam must be >= 0")
        if self.loss not in ("mse", "ce"):
            raise ValueError(f"unknown loss {self.loss!r}")
        if self.delta < 0:
            raise ValueError("delta must be >= 0")
        if self.kappas.k_star_sq <= 0:
            raise ValueError("replica equations need k_star_sq > 0 (nonlinear activation)")


@dataclass(frozen=True)
class OrderParams:
    """The ten order parameters of the zero-temperature RS ansatz."""

    q_d: float
    delta_q: float
    delta_q_hat: float
    delta_Q_hat: float
    p_d: float
    delta_p: float
    delta_p_hat: float
    delta_P_hat: float
    r: float
    r_hat: float

    def overlaps(self, kappas: KappaSet) -> tuple[float, float, float]:
        """(M, Q_d, dQ): teacher overlap, output scale, output fluctuation."""
        M = kappas.k1 * self.r
        Q_d = kappas.k_star_sq * self.q_d + kappas.k1**2 * self.p_d
        dQ = kappas.k_star_sq * self.delta_q + kappas.k1**2 * self.delta_p
        return M, Q_d, dQ

    def as_array(self) -> np.ndarray:
        return np.array([self.q_d, self.delta_q, self.delta_q_hat, self.delta_Q_hat,
                         self.p_d, self.delta_p, self.delta_p_hat, self.delta_P_hat,
                         self.r, self.r_hat])


_FIELDS = ("q_d", "delta_q", "delta_q_hat", "delta_Q_hat", "p_d",
           "delta_p", "delta_p_hat", "delta_P_hat", "r", "r_hat")


@dataclass(frozen=True)
class Observables:
    eps_g: float
    train_loss: float
    test_loss: float
    bmd: float


# ---------------------------------------------------------------------------
# quadrature and the inner maximization of the energetic term

_Z0_RULE: tuple[np.ndarray, np.ndarray] | None = None


def _z0_rule() -> tuple[np.ndarray, np.ndarray]:
    global _Z0_RULE
    if _Z0_RULE is None:
        x, w = np.polynomial.legendre.leggauss(Z0_NODES)
        z = x * Z0_CUTOFF
        weight = w * Z0_CUTOFF * np.exp(-z * z / 2.0) / np.sqrt(2.0 * np.pi)
        _Z0_RULE = (z, weight)
    return _Z0_RULE


def _loss(kind: str, h: np.ndarray) -> np.ndarray:
    if kind == "mse":
        return 0.5 * (1.0 - h) ** 2
    return np.logaddexp(0.0, -h)


def mse_inner_max(h0: np.ndarray, dQ: float):
    """argmax_z1 and max of -z1^2/2 - (1-h0-sqrt(dQ) z1)^2/2, closed form."""
    z1 = np.sqrt(dQ) * (1.0 - h0) / (1.0 + dQ)
    value = -0.5 * (1.0 - h0) ** 2 / (1.0 + dQ)
    return z1, value


def ce_inner_max(h0: np.ndarray, dQ: float, tol: float = 1e-13, max_iter: int = 80):
    """argmax_z1 and max of -z1^2/2 - log(1+e^-(h0+sqrt(dQ) z1)).

    In terms of x = h0 + sqrt(dQ) z1 the stationarity condition is
    (x - h0)/dQ + sigmoid(x) - 1 = 0, strictly monotone with the root
    bracketed in [h0, h0 + dQ]; solved by Newton with a bisection
    safeguard, vectorized over h0.
    """
    lo = np.asarray(h0, dtype=float).copy()
    hi = lo + dQ
    x = lo + dQ * (1.0 - expit(lo))  # one fixed-point pass as the start
    for _ in range(max_iter):
        sig = expit(x)
        g = (x - h0) / dQ + sig - 1.0
        lo = np.where(g < 0, x, lo)
        hi = np.where(g > 0, x, hi)
        step = g / (1.0 / dQ + sig * (1.0 - sig))
        nxt = x - step
        outside = (nxt <= lo) | (nxt >= hi)
        nxt = np.where(outside, 0.5 * (lo + hi), nxt)
        if np.max(np.abs(nxt - x)) < tol:
            x = nxt
            break
        x = nxt
    z1 = (x - h0) / np.sqrt(dQ)
    value = -0.5 * z1**2 - np.logaddexp(0.0, -x)
    return z1, value


def _energetic(loss: str, M: float, Q_d: float, dQ: float, delta: float):
    """Value and partials of G_E w.r.t. (Q_d, M, dQ), plus the train loss.

    Works on the shared z0 grid. The H factor is the probability of the
    teacher label given z0; its own (Q_d, M) dependence enters the partials
    through the normal pdf at the H argument.
    """
    z0, wts = _z0_rule()
    s_sq = max(Q_d - M * M + delta, 1e-300)
    s = np.sqrt(s_sq)
    arg = -M * z0 / s
    Hfac = ndtr(-arg)  # H(x) = 1 - Phi(x) = Phi(-x)
    pdf = np.exp(-arg * arg / 2.0) / np.sqrt(2.0 * np.pi)
    h0 = np.sqrt(Q_d) * z0
    inner = mse_inner_max if loss == "mse" else ce_inner_max
    z1, E = inner(h0, dQ)
    x_star = h0 + np.sqrt(dQ) * z1
    # envelope theorem: d E / d h0 = -loss'(x*) = z1 / sqrt(dQ)
    dE_dQd = (z1 / np.sqrt(dQ)) * z0 / (2.0 * np.sqrt(Q_d))
    dH_dQd = -pdf * M * z0 / (2.0 * s_sq * s)
    dH_dM = -pdf * (-z0 * (Q_d - M * M + delta + M * M) / (s_sq * s))
    value = 2.0 * wts @ (Hfac * E)
    g_Q = 2.0 * wts @ (Hfac * dE_dQd + dH_dQd * E)
    g_M = 2.0 * wts @ (dH_dM * E)
    g_dQ = 2.0 * wts @ (Hfac * (z1**2) / (2.0 * dQ))
    train_loss = 2.0 * wts @ (Hfac * _loss(loss, x_star))
    return value, g_Q, g_M, g_dQ, train_loss


# ---------------------------------------------------------------------------
# the replica potential and its stationarity conditions

def free_energy(params: OrderParams, inp: ReplicaInput) -> float:
    """The extremized potential; its partials vanish at a saddle solution."""
    k = inp.kappas
    a, ad = inp.alpha, inp.alpha_d
    p = params
    M, Q_d, dQ = p.overlaps(k)
    hat_mix = p.delta_p_hat + p.r_hat**2
    denom = 1.0 + p.delta_P_hat * p.delta_q
    g_se = -p.q_d / (2.0 * p.delta_q) \
        + 0.5 * (hat_mix * p.delta_q + p.q_d / p.delta_q) / denom
    g_e = _energetic(inp.loss, M, Q_d, dQ, inp.delta)[0]
    return (0.5 * (p.q_d * p.delta_Q_hat - p.delta_q * p.delta_q_hat)
            + 0.5 * ad * (p.p_d * p.delta_P_hat - p.delta_p * p.delta_p_hat)
            - ad * p.r * p.r_hat
            + p.delta_q_hat / (2.0 * (p.delta_Q_hat + inp.lam))
            + ad * g_se + a * g_e)


def _proposal(p: OrderParams, inp: ReplicaInput) -> OrderParams:
    """One full pass of the stationarity conditions: hats, then overlaps."""
    k = inp.kappas
    a, ad, lam = inp.alpha, inp.alpha_d, inp.lam
    M, Q_d, dQ = p.overlaps(k)
    _, g_Q, g_M, g_dQ, _ = _energetic(inp.loss, M, Q_d, dQ, inp.delta)

    delta_P_hat = -(2.0 * a / ad) * k.k1**2 * g_Q
    delta_p_hat = (2.0 * a / ad) * k.k1**2 * g_dQ
    r_hat = (a / ad) * k.k1 * g_M
    denom = 1.0 + delta_P_hat * p.delta_q
    delta_Q_hat = ad * delta_P_hat / denom - 2.0 * a * k.k_star_sq * g_Q
    hat_mix = delta_p_hat + r_hat**2
    delta_q_hat = 2.0 * ad * (
        p.q_d / (2.0 * p.delta_q**2)
        + 0.5 * (hat_mix - p.q_d / p.delta_q**2) / denom
        - 0.5 * (hat_mix * p.delta_q + p.q_d / p.delta_q) * delta_P_hat / denom**2
    ) + 2.0 * a * k.k_star_sq * g_dQ

    delta_q = 1.0 / max(delta_Q_hat + lam, 1e-12)
    q_d = max(delta_q_hat * delta_q**2, 1e-300)
    shrink = 1.0 + delta_P_hat * delta_q
    delta_p = delta_q / shrink
    p_d = max((hat_mix * delta_q**2 + q_d) / shrink**2, 1e-300)
    r = r_hat * delta_q / shrink
    return OrderParams(q_d=q_d, delta_q=delta_q, delta_q_hat=delta_q_hat,
                       delta_Q_hat=delta_Q_hat, p_d=p_d, delta_p=delta_p,
                       delta_p_hat=delta_p_hat, delta_P_hat=delta_P_hat,
                       r=r, r_hat=r_hat)


_DEFAULT_INIT = OrderParams(q_d=0.5, delta_q=1.0, delta_q_hat=0.5, delta_Q_hat=1.0,
                            p_d=0.5, delta_p=1.0, delta_p_hat=0.5, delta_P_hat=0.5,
                            r=0.3, r_hat=0.3)


def solve_saddle(inp: ReplicaInput, init: OrderParams | None = None,
                 tol: float = 1e-9, max_iter: int = 100_000,
                 damping: float = 0.5) -> OrderParams:
    """Damped fixed-point iteration of the stationarity conditions.

    The residual is the largest change a full (undamped) update pass would
    make; iteration stops when it drops below tol. The default tol 1e-9 on
    this proposal residual leaves finite-difference gradients of the
    potential at the 1e-6 scale or better; drop to 1e-12 when the audit
    needs to be sharper. Damping halves after 25 consecutive residual
    increases (floor 0.05).
    """
    if inp.lam == 0.0 and abs(1.0 / inp.alpha - 1.0) < 0.05:
        warnings.warn("lam = 0 at the interpolation point N = P: "
                      "the saddle is singular there", RuntimeWarning, stacklevel=2)
    p = init if init is not None else _DEFAULT_INIT
    gamma = damping
    prev_resid = np.inf
    rising = 0
    for _ in range(max_iter):
        prop = _proposal(p, inp)
        resid = float(np.max(np.abs(prop.as_array() - p.as_array())))
        if not np.isfinite(resid):
            raise ConvergenceError(f"iteration produced non-finite parameters at {inp}")
        if resid < tol:
            return prop
        if resid > prev_resid:
            rising += 1
            if rising >= 25:
                gamma = max(gamma / 2.0, 0.05)
                rising = 0
        else:
            rising = 0
        prev_resid = resid
        mixed = p.as_array() + gamma * (prop.as_array() - p.as_array())
        p = OrderParams(*mixed)
    raise ConvergenceError(
        f"no convergence after {max_iter} iterations (last residual {prev_resid:.3e}) at {inp}")


def generalization_error(M: float, Q_d: float) -> float:
    """Probability of disagreeing with the clean teacher, arccos(M/sqrt(Q_d))/pi."""
    ratio = M / np.sqrt(Q_d)
    if abs(ratio) > 1.0 + 1e-9:
        raise FloatingPointError(f"overlap invariant violated: M^2/Q_d = {ratio**2:.6f} > 1")
    return float(np.arccos(np.clip(ratio, -1.0, 1.0)) / np.pi)


def _test_loss(loss: str, M: float, Q_d: float, delta: float) -> float:
    """Expected loss on a fresh sample, 2 Int Dv loss(sqrt(Q_d) v) H(-Mv/s)."""
    v, wts = _z0_rule()
    s = np.sqrt(max(Q_d - M * M + delta, 1e-300))
    return float(2.0 * wts @ (_loss(loss, np.sqrt(Q_d) * v) * ndtr(M * v / s)))


def observables(params: OrderParams, inp: ReplicaInput) -> Observables:
    """Theory curves evaluated at a converged saddle.

    bmd is +inf when kbar2 diverges (sign activation); eps_g is always
    measured against the noiseless teacher.
    """
    k = inp.kappas
    M, Q_d, dQ = params.overlaps(k)
    eps = generalization_error(M, Q_d)
    train = _energetic(inp.loss, M, Q_d, dQ, inp.delta)[4]
    test = _test_loss(inp.loss, M, Q_d, inp.delta)
    if np.isfinite(k.kbar2):
        bmd = bmd_from_overlaps(k, params.q_d, params.p_d)
    else:
        bmd = np.inf
    return Observables(eps_g=eps, train_loss=train, test_loss=test, bmd=bmd)


# ---------------------------------------------------------------------------
# sweeps, continuation, optimal regularization

@dataclass(frozen=True)
class CurvePoint:
    inv_alpha: float
    alpha_t: float
    lam: float
    loss: str
    eps_g: float
    train_loss: float
    test_loss: float
    bmd: float
    q_d: float
    p_d: float
    Q_d: float
    converged: bool


def sweep_curve(kappas: KappaSet, loss: str, lam: float, alpha_t: float,
                inv_alphas, delta: float = 0.0, tol: float = 1e-9) -> list[CurvePoint]:
    """Solve along a monotone 1/alpha grid with warm-start continuation.

    A point that fails to converge is kept as a NaN row (converged False)
    and the continuation resumes from the last good solution.
    """
    inv_alphas = np.asarray(inv_alphas, dtype=float)
    if inv_alphas.size == 0:
        raise ValueError("empty 1/alpha grid")
    if not (np.all(np.diff(inv_alphas) > 0) or np.all(np.diff(inv_alphas) < 0)):
        raise ValueError("1/alpha grid must be strictly monotone")
    rows = []
    carry = None
    for inv_alpha in inv_alphas:
        inp = ReplicaInput(alpha=1.0 / inv_alpha, lam=lam, loss=loss,
                           kappas=kappas, delta=delta, alpha_t=alpha_t)
        try:
            params = solve_saddle(inp, init=carry, tol=tol)
            carry = params
            obs = observables(params, inp)
            _, Q_d, _ = params.overlaps(kappas)
            rows.append(CurvePoint(
                inv_alpha=float(inv_alpha), alpha_t=alpha_t, lam=lam, loss=loss,
                eps_g=obs.eps_g, train_loss=obs.train_loss, test_loss=obs.test_loss,
                bmd=obs.bmd, q_d=params.q_d, p_d=params.p_d, Q_d=Q_d, converged=True))
        except ConvergenceError:
            rows.append(CurvePoint(
                inv_alpha=float(inv_alpha), alpha_t=alpha_t, lam=lam, loss=loss,
                eps_g=np.nan, train_loss=np.nan, test_loss=np.nan, bmd=np.nan,
                q_d=np.nan, p_d=np.nan, Q_d=np.nan, converged=False))
    return rows


def optimal_lambda(alpha: float, alpha_t: float, kappas: KappaSet, loss: str,
                   delta: float = 0.0, log_bounds: tuple[float, float] = (-6.0, 1.0),
                   log_tol: float = 1e-3) -> tuple[float, float]:
    """Golden-section search of lam minimizing eps_g, on log10(lam).

    Returns (lam_opt, eps_g at the optimum). Solves warm-start from the
    previous evaluation to keep the search cheap.
    """
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    carry = [None]

    def eps_at(log_lam: float) -> float:
        inp = ReplicaInput(alpha=alpha, lam=10.0**log_lam, loss=loss,
                           kappas=kappas, delta=delta, alpha_t=alpha_t)
        params = solve_saddle(inp, init=carry[0])
        carry[0] = params
        M, Q_d, _ = params.overlaps(kappas)
        return generalization_error(M, Q_d)

    lo, hi = log_bounds
    c = hi - invphi * (hi - lo)
    d = lo + invphi * (hi - lo)
    fc, fd = eps_at(c), eps_at(d)
    while hi - lo > log_tol:
        if fc < fd:
            hi, d, fd = d, c, fc
            c = hi - invphi * (hi - lo)
            fc = eps_at(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + invphi * (hi - lo)
            fd = eps_at(d)
    log_opt = 0.5 * (lo + hi)
    return 10.0**log_opt, eps_at(log_opt)


# ---------------------------------------------------------------------------
# spectral route to the ridge overlaps (secondary-peak analysis)

def _mp_rule(alpha_d: float, n_nodes: int = 400):
    """Marchenko-Pastur quadrature for the spectrum of F^T F / D.

    The aspect ratio of the overlap matrix is gamma = N/D = 1/alpha_d;
    below alpha_d = 1 an atom of mass 1 - alpha_d sits at zero.
    """
    gamma = 1.0 / alpha_d
    lo = (1.0 - np.sqrt(gamma)) ** 2
    hi = (1.0 + np.sqrt(gamma)) ** 2
    x, w = np.polynomial.legendre.leggauss(n_nodes)
    rho = 0.5 * (x + 1.0) * (hi - lo) + lo
    dens = np.sqrt(np.maximum((hi - rho) * (rho - lo), 0.0)) / (2.0 * np.pi * gamma * rho)
    weights = w * 0.5 * (hi - lo) * dens
    atom = max(1.0 - alpha_d, 0.0)
    return rho, weights, atom


def spectral_ols(alpha_d: float, lam: float, kappas: KappaSet, spectrum="mp",
                 alpha: float | None = None, teacher: str = "sign"):
    """Ridge overlaps as traces over the feature spectrum.

    With alpha given, q_d and Q_d are the finite-sample traces

        q_d = (1/N) sum_i num_i / (alpha (k1^2 rho_i + k_star_sq) + lam)^2
        Q_d = same with an extra (k1^2 rho_i + k_star_sq) in the numerator

    where for the sign teacher num_i = (2/pi)(k1^2 (alpha^2/alpha_d) rho_i
    + alpha k_star_sq) + (1 - 2/pi) alpha (k1^2 rho_i + k_star_sq); the
    linear teacher keeps only the first part with the 2/pi factor dropped.
    alpha=None takes the infinite-sample limit where lam counts per sample.
    spectrum is either "mp" (Marchenko-Pastur quadrature) or an eigenvalue
    sample of F^T F / D. Returns (q_d, Q_d, bmd).
    """
    if alpha_d <= 0 or lam < 0:
        raise ValueError("alpha_d must be positive and lam >= 0")
    if teacher not in ("sign", "linear"):
        raise ValueError(f"unknown teacher {teacher!r}")
    if lam == 0.0 and abs(alpha_d - 1.0) < 0.05:
        warnings.warn("lam = 0 with alpha_d near 1: the spectrum touches the "
                      "origin and the traces diverge", RuntimeWarning, stacklevel=2)
    if isinstance(spectrum, str):
        if spectrum != "mp":
            raise ValueError(f"unknown spectrum {spectrum!r}")
        rho, wts, atom = _mp_rule(alpha_d)
    else:
        rho = np.asarray(spectrum, dtype=float)
        wts = np.full(rho.size, 1.0 / rho.size)
        atom = 0.0
    k1sq, ksq = kappas.k1**2, kappas.k_star_sq
    overlap = k1sq * rho + ksq
    teach = 2.0 / np.pi if teacher == "sign" else 1.0
    if alpha is None:
        num = teach * k1sq * rho / alpha_d
        den = (overlap + lam) ** 2
        atom_num, atom_den = 0.0, (ksq + lam) ** 2
    else:
        num = teach * (k1sq * (alpha**2 / alpha_d) * rho + alpha * ksq)
        if teacher == "sign":
            num = num + (1.0 - 2.0 / np.pi) * alpha * overlap
        den = (alpha * overlap + lam) ** 2
        atom_num = teach * alpha * ksq
        if teacher == "sign":
            atom_num += (1.0 - 2.0 / np.pi) * alpha * ksq
        atom_den = (alpha * ksq + lam) ** 2
    q_d = float(wts @ (num / den) + atom * atom_num / atom_den)
    big_q = float(wts @ (num * overlap / den) + atom * atom_num * ksq / atom_den)
    if np.isfinite(kappas.kbar2):
        bmd = 1.0 + (kappas.kbar2 - kappas.k2) * q_d / big_q
    else:
        bmd = np.inf
    return q_d, big_q, bmd


# ---------------------------------------------------------------------------
# curve serialization

CURVE_HEADER = "inv_alpha,alpha_T,lambda,loss,eps_g,train_loss,test_loss,bmd,q_d,p_d,Q_d,converged"


def write_curve_csv(path, rows: list[CurvePoint]) -> None:
    lines = [CURVE_HEADER]
    for r in rows:
        vals = [r.inv_alpha, r.alpha_t, r.lam, r.eps_g, r.train_loss,
                r.test_loss, r.bmd, r.q_d, r.p_d, r.Q_d]
        cells = [repr(float(v)) for v in vals]
        cells.insert(3, r.loss)
        cells.append(str(int(r.converged)))
        lines.append(",".join(cells))
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def read_curve_csv(path) -> list[CurvePoint]:
    with open(path, "r", encoding="ascii") as fh:
        lines = [line.strip() for line in fh if line.strip()]
    if not lines or lines[0] != CURVE_HEADER:
        raise ValueError(f"{path}: expected curve header")
    rows = []
    for line in lines[1:]:
        cells = line.split(",")
        rows.append(CurvePoint(
            inv_alpha=float(cells[0]), alpha_t=float(cells[1]), lam=float(cells[2]),
            loss=cells[3], eps_g=float(cells[4]), train_loss=float(cells[5]),
            test_loss=float(cells[6]), bmd=float(cells[7]), q_d=float(cells[8]),
            p_d=float(cells[9]), Q_d=float(cells[10]), converged=bool(int(cells[11]))))
    return rows
