"""Data generation and training for random feature models and small MLPs.

Supervised tasks come from a linear teacher: y = sign(w_T^T x / sqrt(D)),
optionally corrupted by pre-sign Gaussian noise of variance delta or by
flipping an exact fraction of labels. Students are either an RFM second
layer (closed-form ridge or gradient descent) or a dense two-layer tanh
network trained end to end.

Binary losses act on the margin h = y * y_hat:

    mse: 0.5 (1 - h)^2        ce: log(1 + exp(-h))

which equal the usual 0.5 (y - y_hat)^2 and log(1 + exp(-y y_hat)) for
labels in {-1, +1}. Multi-class training uses cross-entropy on log-softmax
outputs. Reported train/test losses are per-sample means so they compare
directly with the replica predictions.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from scipy.linalg import cho_factor, cho_solve
from scipy.special import expit, log_softmax

from .estimator import InputSampler, estimate_md_multioutput
from .rfm import RfmModel, forward, with_weights

__all__ = [
    "Dataset",
    "TeacherTask",
    "TrainConfig",
    "TrainedModel",
    "Mlp",
    "FlipCountResult",
    "gen_teacher_student",
    "gen_multiclass_task",
    "flip_labels",
    "design_matrix",
    "train_rfm_ridge",
    "train_gd",
    "init_mlp",
    "forward_mlp",
    "log_softmax_mlp",
    "predict_labels",
    "adversarial_init_protocol",
    "robustness_flip_count",
    "multiclass_bmd",
    "load_csv_dataset",
    "write_history_csv",
    "read_history_csv",
    "parse_train_config",
    "format_train_config",
]


@dataclass(frozen=True)
class Dataset:
    """Inputs, observed labels, and bookkeeping about label corruption.

    y holds the labels actually trained on; y_clean keeps the noiseless
    teacher labels so generalization can be scored against the clean rule.
    noise_mask lists the rows whose labels were corrupted.
    """

    X: np.ndarray
    y: np.ndarray
    noise_mask: np.ndarray = field(default_factory=lambda: np.array([], dtype=int))
    normalization: tuple[float, float] = (-1.0, 1.0)
    y_clean: np.ndarray | None = None

    def __post_init__(self):
        if self.X.ndim != 2 or self.y.shape != (self.X.shape[0],):
            raise ValueError("X must be (P, D) with one label per row")

    @property
    def P(self) -> int:
        return self.X.shape[0]

    @property
    def D(self) -> int:
        return self.X.shape[1]

    @property
    def clean_labels(self) -> np.ndarray:
        return self.y if self.y_clean is None else self.y_clean


@dataclass(frozen=True)
class TeacherTask:
    """Linear sign teacher with ||w_T||^2 = D and label-noise variance delta."""

    w_T: np.ndarray
    input_kind: str = "binary"
    delta: float = 0.0

    def __post_init__(self):
        D = self.w_T.shape[0]
        if abs(self.w_T @ self.w_T - D) > 1e-9:
            raise ValueError(f"teacher norm^2 must equal D = {D} (to 1e-9)")
        if self.delta < 0:
            raise ValueError("delta must be >= 0")
        if self.input_kind not in ("binary", "gaussian"):
            raise ValueError(f"unknown input kind {self.input_kind!r}")

    @classmethod
    def random(cls, D: int, seed: int, input_kind: str = "binary",
               delta: float = 0.0) -> "TeacherTask":
        w = np.random.default_rng(np.random.SeedSequence([seed, 17])).standard_normal(D)
        w *= np.sqrt(D) / np.linalg.norm(w)
        return cls(w_T=w, input_kind=input_kind, delta=delta)


def _draw_inputs(rng: np.random.Generator, P: int, D: int, kind: str) -> np.ndarray:
    if kind == "binary":
        return rng.integers(0, 2, size=(P, D)).astype(float) * 2.0 - 1.0
    return rng.standard_normal((P, D))


def _teacher_labels(rng, X: np.ndarray, task: TeacherTask):
    pre = X @ task.w_T / np.sqrt(X.shape[1])
    clean = np.where(pre >= 0, 1.0, -1.0)
    if task.delta == 0.0:
        return clean, clean
    noisy_pre = pre + np.sqrt(task.delta) * rng.standard_normal(X.shape[0])
    return np.where(noisy_pre >= 0, 1.0, -1.0), clean


def gen_teacher_student(D: int, P_train: int, P_test: int, task: TeacherTask,
                        seed: int) -> tuple[Dataset, Dataset]:
    """Draw i.i.d. train and test sets labeled by the sign teacher.

    With delta > 0 the Gaussian noise sqrt(delta)*zeta enters before the
    sign on both splits; the pre-noise labels are kept in y_clean.
    """
    if D < 1 or P_train < 1 or P_test < 1:
        raise ValueError("D and both sample counts must be >= 1")
    rng = np.random.default_rng(np.random.SeedSequence([seed, 23]))
    sets = []
    for P in (P_train, P_test):
        X = _draw_inputs(rng, P, D, task.input_kind)
        y, clean = _teacher_labels(rng, X, task)
        mask = np.flatnonzero(y != clean)
        sets.append(Dataset(X=X, y=y, noise_mask=mask, y_clean=clean))
    return sets[0], sets[1]


def gen_multiclass_task(D: int, P_train: int, P_test: int, n_classes: int,
                        input_kind: str = "gaussian",
                        seed: int = 0) -> tuple[Dataset, Dataset]:
    """Draw train/test sets labeled by nearest of n_classes random prototypes.

    Each class c owns a fixed direction v_c; the label of x is
    argmax_c v_c . x / sqrt(D). Labels are integer class indices, so these
    sets feed the multiclass MLP path (flip_labels reshuffles within the
    other classes).
    """
    if n_classes < 2:
        raise ValueError("n_classes must be >= 2")
    if D < 1 or P_train < 1 or P_test < 1:
        raise ValueError("D and both sample counts must be >= 1")
    rng = np.random.default_rng(np.random.SeedSequence([seed, 37]))
    protos = rng.standard_normal((n_classes, D))
    sets = []
    for P in (P_train, P_test):
        X = _draw_inputs(rng, P, D, input_kind)
        y = np.argmax(X @ protos.T / np.sqrt(D), axis=1).astype(float)
        sets.append(Dataset(X=X, y=y, y_clean=y.copy()))
    return sets[0], sets[1]


def flip_labels(ds: Dataset, fraction: float, seed: int) -> Dataset:
    """Corrupt exactly floor(fraction * P) labels, each to a wrong value.

    Binary labels flip sign; class indices move uniformly among the other
    classes. The returned noise_mask is the union of the previous mask and
    the newly corrupted rows.
    """
    if not 0.0 <= fraction <= 1.0:
        raise ValueError("fraction must be in [0, 1]")
    n_flip = int(fraction * ds.P)
    if n_flip == 0:
        return ds
    rng = np.random.default_rng(np.random.SeedSequence([seed, 29]))
    rows = rng.choice(ds.P, size=n_flip, replace=False)
    y = ds.y.copy()
    if set(np.unique(ds.y)) <= {-1.0, 1.0}:
        y[rows] = -y[rows]
    else:
        n_classes = int(ds.y.max()) + 1
        shift = rng.integers(1, n_classes, size=n_flip)
        y[rows] = (y[rows].astype(int) + shift) % n_classes
    mask = np.union1d(ds.noise_mask, rows)
    return replace(ds, y=y, noise_mask=mask,
                   y_clean=ds.y.copy() if ds.y_clean is None else ds.y_clean)


# ---------------------------------------------------------------------------
# losses and metrics

def _margin_loss(kind: str, h: np.ndarray) -> np.ndarray:
    if kind == "mse":
        return 0.5 * (1.0 - h) ** 2
    if kind == "ce":
        return np.logaddexp(0.0, -h)
    raise ValueError(f"unknown loss {kind!r}")


def _margin_loss_grad(kind: str, y: np.ndarray, yhat: np.ndarray) -> np.ndarray:
    """d loss / d yhat for binary +-1 labels."""
    if kind == "mse":
        return yhat - y
    if kind == "ce":
        return -y * expit(-y * yhat)
    raise ValueError(f"unknown loss {kind!r}")


def _binary_error(yhat: np.ndarray, y: np.ndarray) -> float:
    return float(np.mean(np.where(yhat >= 0, 1.0, -1.0) != y))


@dataclass(frozen=True)
class TrainedModel:
    model: object
    train_error: float
    test_error: float
    train_loss: float
    history: np.ndarray
    converged: bool = True

    def __post_init__(self):
        if not 0.0 <= self.train_error <= 1.0:
            raise ValueError("train_error must lie in [0, 1]")
        if np.isfinite(self.test_error) and not 0.0 <= self.test_error <= 1.0:
            raise ValueError("test_error must lie in [0, 1]")


# ---------------------------------------------------------------------------
# RFM training

def design_matrix(model: RfmModel, X: np.ndarray) -> np.ndarray:
    """Post-activation features sigma(X F / sqrt(D)), shape (P, N)."""
    return model.activation.value(X @ model.F / np.sqrt(model.D))


def train_rfm_ridge(model: RfmModel, ds: Dataset, lam: float,
                    test_ds: Dataset | None = None) -> TrainedModel:
    """Closed-form ridge fit of the second layer under MSE.

    Solves (Xp^T Xp / N + lam I) w = Xp^T y / sqrt(N) with Xp the design
    matrix, then checks the gradient residual of the ridge objective
    0.5 ||y - Xp w / sqrt(N)||^2 + lam ||w||^2 / 2 is below 1e-8
    (iterative refinement pushes it there even near interpolation).
    """
    if lam < 0:
        raise ValueError("lam must be >= 0")
    Xp = design_matrix(model, ds.X)
    N = model.N
    A = Xp.T @ Xp / N + lam * np.eye(N)
    b = Xp.T @ ds.y / np.sqrt(N)
    if lam == 0.0:
        cond = np.linalg.cond(A)
        if cond > 1e12:
            raise np.linalg.LinAlgError(
                f"rank-deficient system at lam=0 (condition number {cond:.2e}); "
                "add ridge regularization")
    factor = cho_factor(A)
    w = cho_solve(factor, b)
    for _ in range(4):  # refinement: drive the stationarity residual down
        residual = b - A @ w
        if np.linalg.norm(residual) < 1e-8:
            break
        w = w + cho_solve(factor, residual)
    grad_norm = float(np.linalg.norm(A @ w - b))
    if grad_norm >= 1e-8:
        raise RuntimeError(f"ridge stationarity check failed: |grad| = {grad_norm:.3e}")
    fitted = with_weights(model, w)
    yhat = Xp @ w / np.sqrt(N)
    test_error = np.nan
    if test_ds is not None:
        test_error = _binary_error(forward(fitted, test_ds.X), test_ds.clean_labels)
    return TrainedModel(
        model=fitted,
        train_error=_binary_error(yhat, ds.y),
        test_error=test_error,
        train_loss=float(_margin_loss("mse", ds.y * yhat).mean()),
        history=np.zeros((0, 4)),
    )


# ---------------------------------------------------------------------------
# gradient training (full-batch GD, or minibatch Adam per the usual recipe)

@dataclass(frozen=True)
class TrainConfig:
    """Knobs for gradient training.

    optimizer "minibatch-gd" uses Adam updates (betas 0.9/0.999,
    epsilon 1e-8); defaults are batch 128 and lr 1e-4.
    "closed-form-ridge" is only legal with the mse loss.
    """

    loss: str = "mse"
    lam: float = 0.0
    optimizer: str = "full-batch-gd"
    batch_size: int = 128
    lr: float = 1e-4
    epochs: int = 100
    label_noise_fraction: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.loss not in ("mse", "ce"):
            raise ValueError(f"unknown loss {self.loss!r}")
        if self.optimizer not in ("closed-form-ridge", "full-batch-gd", "minibatch-gd"):
            raise ValueError(f"unknown optimizer {self.optimizer!r}")
        if self.optimizer == "closed-form-ridge" and self.loss != "mse":
            raise ValueError("closed-form-ridge requires the mse loss")
        if self.lam < 0 or not 0.0 <= self.label_noise_fraction <= 1.0:
            raise ValueError("lam must be >= 0 and label_noise_fraction in [0, 1]")


@dataclass
class Mlp:
    """Dense two-layer tanh network; n_out = 1 gives a scalar margin head."""

    W1: np.ndarray
    b1: np.ndarray
    W2: np.ndarray
    b2: np.ndarray

    @property
    def width(self) -> int:
        return self.W1.shape[1]

    @property
    def n_out(self) -> int:
        return self.W2.shape[1]


def init_mlp(D: int, width: int, n_out: int, seed: int) -> Mlp:
    # Xavier scaling, normal variant, zero biases
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0]))
    return Mlp(
        W1=rng.standard_normal((D, width)) / np.sqrt(D),
        b1=np.zeros(width),
        W2=rng.standard_normal((width, n_out)) / np.sqrt(width),
        b2=np.zeros(n_out),
    )


def forward_mlp(net: Mlp, X: np.ndarray) -> np.ndarray:
    """Logits, shape (m, n_out); squeezed to (m,) when n_out = 1."""
    out = np.tanh(X @ net.W1 + net.b1) @ net.W2 + net.b2
    return out[:, 0] if net.n_out == 1 else out


def log_softmax_mlp(net: Mlp, X: np.ndarray) -> np.ndarray:
    return log_softmax(forward_mlp(net, X), axis=1)


def predict_labels(model, X: np.ndarray) -> np.ndarray:
    """Predicted labels: +-1 for scalar heads and RFMs, argmax otherwise."""
    if isinstance(model, RfmModel):
        return np.where(forward(model, X) >= 0, 1.0, -1.0)
    out = forward_mlp(model, X)
    if out.ndim == 1:
        return np.where(out >= 0, 1.0, -1.0)
    return out.argmax(axis=1).astype(float)


def _mlp_loss_and_grads(net: Mlp, X, y, loss: str, lam: float):
    hidden = np.tanh(X @ net.W1 + net.b1)
    logits = hidden @ net.W2 + net.b2
    P = X.shape[0]
    if net.n_out == 1:
        yhat = logits[:, 0]
        value = _margin_loss(loss, y * yhat).mean()
        d_logits = (_margin_loss_grad(loss, y, yhat) / P)[:, None]
    else:
        logp = log_softmax(logits, axis=1)
        idx = y.astype(int)
        value = -logp[np.arange(P), idx].mean()
        d_logits = np.exp(logp)
        d_logits[np.arange(P), idx] -= 1.0
        d_logits /= P
    gW2 = hidden.T @ d_logits + lam * net.W2
    gb2 = d_logits.sum(axis=0)
    d_hidden = (d_logits @ net.W2.T) * (1.0 - hidden**2)
    gW1 = X.T @ d_hidden + lam * net.W1
    gb1 = d_hidden.sum(axis=0)
    reg = 0.5 * lam * (np.sum(net.W1**2) + np.sum(net.W2**2))
    return value + reg, (gW1, gb1, gW2, gb2)


def _rfm_loss_and_grad(model: RfmModel, Xp, y, loss: str, lam: float):
    yhat = Xp @ model.w / np.sqrt(model.N)
    value = _margin_loss(loss, y * yhat).sum() + 0.5 * lam * model.w @ model.w
    grad = Xp.T @ _margin_loss_grad(loss, y, yhat) / np.sqrt(model.N) + lam * model.w
    return value, grad


class _Adam:
    def __init__(self, shapes, lr):
        self.lr = lr
        self.t = 0
        self.m = [np.zeros(s) for s in shapes]
        self.v = [np.zeros(s) for s in shapes]

    def step(self, params, grads):
        b1, b2, eps = 0.9, 0.999, 1e-8
        self.t += 1
        out = []
        for k, (p, g) in enumerate(zip(params, grads)):
            self.m[k] = b1 * self.m[k] + (1 - b1) * g
            self.v[k] = b2 * self.v[k] + (1 - b2) * g**2
            mhat = self.m[k] / (1 - b1**self.t)
            vhat = self.v[k] / (1 - b2**self.t)
            out.append(p - self.lr * mhat / (np.sqrt(vhat) + eps))
        return out


def _train_metrics(model, ds: Dataset, test_ds: Dataset | None, loss: str):
    if isinstance(model, RfmModel):
        yhat = forward(model, ds.X)
        train_loss = float(_margin_loss(loss, ds.y * yhat).mean())
        train_err = _binary_error(yhat, ds.y)
    else:
        out = forward_mlp(model, ds.X)
        if out.ndim == 1:
            train_loss = float(_margin_loss(loss, ds.y * out).mean())
            train_err = _binary_error(out, ds.y)
        else:
            logp = log_softmax(out, axis=1)
            train_loss = float(-logp[np.arange(ds.P), ds.y.astype(int)].mean())
            train_err = float(np.mean(out.argmax(axis=1) != ds.y.astype(int)))
    if test_ds is None:
        test_err = np.nan
    else:
        test_err = float(np.mean(predict_labels(model, test_ds.X) != test_ds.clean_labels))
    return train_err, test_err, train_loss


def train_gd(skeleton, ds: Dataset, config: TrainConfig,
             test_ds: Dataset | None = None) -> TrainedModel:
    """Gradient training of an RFM second layer or a full MLP.

    Deterministic for a fixed (skeleton, ds, config). History rows are
    (epoch, train_err, test_err, train_loss); the converged flag records
    whether the final loss sits within 1e-6 of its minimum over the last
    10% of epochs.
    """
    if config.optimizer == "closed-form-ridge":
        if not isinstance(skeleton, RfmModel):
            raise ValueError("closed-form-ridge only applies to RFM second layers")
        return train_rfm_ridge(skeleton, ds, config.lam, test_ds)
    train_ds = flip_labels(ds, config.label_noise_fraction, config.seed)
    rng = np.random.default_rng(np.random.SeedSequence([config.seed, 1]))
    is_rfm = isinstance(skeleton, RfmModel)
    if is_rfm:
        Xp_full = design_matrix(skeleton, train_ds.X)
        params = [skeleton.w.copy()]
        current = lambda: with_weights(skeleton, params[0])
    else:
        params = [skeleton.W1.copy(), skeleton.b1.copy(), skeleton.W2.copy(), skeleton.b2.copy()]
        current = lambda: Mlp(*params)

    def batch_grads(rows):
        if is_rfm:
            value, g = _rfm_loss_and_grad(
                with_weights(skeleton, params[0]), Xp_full[rows], train_ds.y[rows],
                config.loss, config.lam)
            return value, [g]
        return _mlp_loss_and_grads(current(), train_ds.X[rows], train_ds.y[rows],
                                   config.loss, config.lam)

    adam = _Adam([p.shape for p in params], config.lr) if config.optimizer == "minibatch-gd" else None
    history, losses = [], []
    initial_loss = None
    all_rows = np.arange(train_ds.P)
    for epoch in range(config.epochs):
        if adam is None:
            value, grads = batch_grads(all_rows)
            params[:] = [p - config.lr * g for p, g in zip(params, grads)]
        else:
            order = rng.permutation(train_ds.P)
            value = None
            for start in range(0, train_ds.P, config.batch_size):
                value, grads = batch_grads(order[start:start + config.batch_size])
                params[:] = adam.step(params, grads)
        if initial_loss is None:
            initial_loss = abs(value) + 1e-12
        if not np.isfinite(value) or abs(value) > 1e3 * initial_loss:
            raise RuntimeError(
                f"training diverged at epoch {epoch} (loss {value!r}); lower the learning rate")
        train_err, test_err, train_loss = _train_metrics(current(), train_ds, test_ds, config.loss)
        history.append((epoch, train_err, test_err, train_loss))
        losses.append(train_loss)
    model = current()
    train_err, test_err, train_loss = _train_metrics(model, train_ds, test_ds, config.loss)
    tail = losses[-max(1, len(losses) // 10):] if losses else [train_loss]
    return TrainedModel(
        model=model,
        train_error=train_err,
        test_error=test_err,
        train_loss=train_loss,
        history=np.array(history).reshape(-1, 4),
        converged=bool(train_loss <= min(tail) + 1e-6),
    )


def adversarial_init_protocol(skeleton: Mlp, ds: Dataset, pretrain_epochs: int,
                              main_epochs: int, config: TrainConfig,
                              test_ds: Dataset | None = None):
    """Memorize fully corrupted labels first, then train on the clean ones.

    With pretrain_epochs = 0 this reproduces plain train_gd bit for bit:
    the corrupt phase draws from its own substream, so skipping it leaves
    the main phase's randomness untouched.
    """
    if not isinstance(skeleton, Mlp):
        raise ValueError("the adversarial protocol is defined for two-layer MLPs")
    phase1_history = np.zeros((0, 4))
    start = skeleton
    if pretrain_epochs > 0:
        corrupted = flip_labels(ds, 1.0, seed=config.seed + 1000)
        phase1 = train_gd(start, corrupted,
                          replace(config, epochs=pretrain_epochs,
                                  label_noise_fraction=0.0,
                                  seed=config.seed + 1000))
        start = phase1.model
        phase1_history = phase1.history
    final = train_gd(start, ds, replace(config, epochs=main_epochs), test_ds)
    return final, phase1_history


@dataclass(frozen=True)
class FlipCountResult:
    mean: float
    counts: np.ndarray
    n_capped: int
    n_evaluated: int
    undefined: bool


def robustness_flip_count(model, ds: Dataset, seed: int,
                          max_points: int | None = None) -> FlipCountResult:
    """Average number of random coordinate negations that change the label.

    For each correctly classified point, coordinates are visited in a
    uniformly random order and negated cumulatively until the prediction
    moves; counts cap at D. With no correctly classified points the result
    is flagged undefined.
    """
    rng = np.random.default_rng(np.random.SeedSequence([seed, 31]))
    predict = model if callable(model) and not isinstance(model, (RfmModel, Mlp)) \
        else (lambda X: predict_labels(model, X))
    labels = predict(ds.X)
    correct = np.flatnonzero(labels == ds.y)
    if correct.size == 0:
        return FlipCountResult(np.nan, np.zeros(0), 0, 0, undefined=True)
    if max_points is not None and correct.size > max_points:
        correct = rng.choice(correct, size=max_points, replace=False)
    D = ds.D
    counts = np.empty(correct.size, dtype=int)
    capped = 0
    for out_idx, row in enumerate(correct):
        order = rng.permutation(D)
        x = np.tile(ds.X[row], (D, 1))
        for k, coord in enumerate(order):  # cumulative flips along the walk
            x[k:, coord] = -x[k:, coord]
        flipped_labels = predict(x)
        moved = np.flatnonzero(flipped_labels != labels[row])
        if moved.size == 0:
            counts[out_idx] = D
            capped += 1
        else:
            counts[out_idx] = moved[0] + 1
    return FlipCountResult(float(counts.mean()), counts, capped, correct.size, undefined=False)


def multiclass_bmd(net: Mlp, sampler: InputSampler, n_samples: int, seed: int) -> float:
    """Mean of the per-class mean dimensions of the log-softmax outputs."""
    profiles = estimate_md_multioutput(
        lambda x: log_softmax_mlp(net, x), net.n_out, sampler, n_samples, seed)
    return float(np.mean([p.md for p in profiles]))


# ---------------------------------------------------------------------------
# dataset and config plumbing

def load_csv_dataset(path, lo: float = -1.0, hi: float = 1.0) -> Dataset:
    """Numeric CSV with the label in the last column.

    Features are mapped per-column onto [lo, hi] by their observed range;
    a constant column lands on the interval midpoint. Labels must be
    either all +-1 or non-negative class indices.
    """
    with open(path, "r", encoding="ascii") as fh:
        lines = [line.strip() for line in fh if line.strip()]
    if not lines:
        raise ValueError(f"{path}: empty file")
    rows = []
    width = None
    for lineno, line in enumerate(lines, start=1):
        cells = line.split(",")
        if width is None:
            width = len(cells)
            if width < 2:
                raise ValueError(f"{path}: need at least one feature column plus a label")
        elif len(cells) != width:
            raise ValueError(f"{path}: row {lineno} has {len(cells)} cells, expected {width}")
        try:
            rows.append([float(c) for c in cells])
        except ValueError:
            raise ValueError(f"{path}: non-numeric cell in row {lineno}") from None
    raw = np.array(rows)
    X, y = raw[:, :-1], raw[:, -1]
    col_lo, col_hi = X.min(axis=0), X.max(axis=0)
    span = col_hi - col_lo
    flat = span == 0
    span[flat] = 1.0
    X = lo + (X - col_lo) * (hi - lo) / span
    X[:, flat] = 0.5 * (lo + hi)
    if set(np.unique(y)) <= {-1.0, 1.0}:
        pass
    elif np.all(y == np.round(y)) and y.min() >= 0:
        y = y.astype(int).astype(float)
    else:
        raise ValueError(f"{path}: labels must be +-1 or non-negative integers")
    return Dataset(X=X, y=y, normalization=(lo, hi))


def write_history_csv(path, history: np.ndarray) -> None:
    lines = ["epoch,train_err,test_err,train_loss"]
    lines += [f"{int(e)},{te!r},{ve!r},{tl!r}"
              for e, te, ve, tl in np.asarray(history, dtype=float).tolist()]
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def read_history_csv(path) -> np.ndarray:
    with open(path, "r", encoding="ascii") as fh:
        lines = [line.strip() for line in fh if line.strip()]
    if not lines or lines[0] != "epoch,train_err,test_err,train_loss":
        raise ValueError(f"{path}: expected history header")
    return np.array([[float(v) for v in line.split(",")] for line in lines[1:]]).reshape(-1, 4)


_CONFIG_FIELDS = {
    "loss": str, "lam": float, "optimizer": str, "batch_size": int,
    "lr": float, "epochs": int, "label_noise_fraction": float, "seed": int,
}


def format_train_config(config: TrainConfig) -> str:
    return "\n".join(f"{name} = {getattr(config, name)}" for name in _CONFIG_FIELDS) + "\n"


def parse_train_config(text: str) -> TrainConfig:
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition(" = ")
        if not sep:
            raise ValueError(f"config line {lineno}: expected 'key = value'")
        if key not in _CONFIG_FIELDS:
            raise ValueError(f"config line {lineno}: unknown field {key!r}")
        values[key] = _CONFIG_FIELDS[key](value)
    return TrainConfig(**values)
