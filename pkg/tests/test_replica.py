"""Tests for the saddle-point solver and the spectral ridge shortcut.

The stationarity checks are the load-bearing ones: every update rule in
_proposal was derived by hand from free_energy, and a finite-difference
audit of the converged point is what certifies the transcription.
"""

import contextlib
import dataclasses

import numpy as np
import pytest
from scipy.optimize import minimize_scalar

from meandim.replica import (
    CURVE_HEADER,
    ConvergenceError,
    CurvePoint,
    OrderParams,
    ReplicaInput,
    _FIELDS,
    _mp_rule,
    ce_inner_max,
    free_energy,
    generalization_error,
    mse_inner_max,
    observables,
    optimal_lambda,
    read_curve_csv,
    solve_saddle,
    spectral_ols,
    sweep_curve,
    write_curve_csv,
)
from meandim.rfm import Activation, bmd_from_overlaps, compute_kappas

KAPPAS = compute_kappas(Activation.tanh())

# frozen quadrature oracle for kbar2/k2 of tanh (see test_rfm.py)
TANH_BMD_ASYMPTOTE = 1.1778072323041795


def _fd_gradients(params, inp, step=1e-6):
    grads = []
    for field in _FIELDS:
        v = getattr(params, field)
        plus = dataclasses.replace(params, **{field: v + step})
        minus = dataclasses.replace(params, **{field: v - step})
        grads.append((free_energy(plus, inp) - free_energy(minus, inp)) / (2 * step))
    return np.array(grads)


# ---------------------------------------------------------------------------
# stationarity: the fixed point must zero every partial of the free energy


def test_fd_stationarity_mse():
    inp = ReplicaInput(alpha=3.0, lam=1e-4, loss="mse", kappas=KAPPAS, alpha_t=3.0)
    params = solve_saddle(inp, tol=1e-12)
    assert np.max(np.abs(_fd_gradients(params, inp))) < 1e-5


def test_fd_stationarity_ce():
    inp = ReplicaInput(alpha=2.0, lam=1e-2, loss="ce", kappas=KAPPAS, alpha_t=3.0)
    params = solve_saddle(inp, tol=1e-12)
    assert np.max(np.abs(_fd_gradients(params, inp))) < 1e-5


def test_fd_stationarity_with_label_noise():
    inp = ReplicaInput(alpha=1.5, lam=1e-3, loss="mse", kappas=KAPPAS,
                       alpha_t=2.0, delta=5.0)
    params = solve_saddle(inp, tol=1e-12)
    assert np.max(np.abs(_fd_gradients(params, inp))) < 1e-5


# ---------------------------------------------------------------------------
# inner single-sample maximizers


def test_mse_inner_matches_scalar_minimizer():
    rng = np.random.default_rng(7)
    for _ in range(30):
        h0 = 2.0 * rng.normal()
        dq = 10.0 ** rng.uniform(-3, 1)

        def neg(z):
            return z * z / 2 + 0.5 * (1.0 - (h0 + np.sqrt(dq) * z)) ** 2

        ref = minimize_scalar(neg, bounds=(-50, 50), method="bounded",
                              options={"xatol": 1e-12})
        _, val = mse_inner_max(np.array([h0]), dq)
        assert abs(val[0] + ref.fun) < 1e-10


def test_ce_inner_matches_scalar_minimizer():
    rng = np.random.default_rng(8)
    for _ in range(30):
        h0 = 2.0 * rng.normal()
        dq = 10.0 ** rng.uniform(-3, 1)

        def neg(z):
            return z * z / 2 + np.logaddexp(0.0, -(h0 + np.sqrt(dq) * z))

        ref = minimize_scalar(neg, bounds=(-60, 60), method="bounded",
                              options={"xatol": 1e-12})
        _, val = ce_inner_max(np.array([h0]), dq)
        assert abs(val[0] + ref.fun) < 1e-10


def test_ce_inner_vectorized_matches_elementwise():
    rng = np.random.default_rng(9)
    h0 = rng.normal(size=40) * 3.0
    z_vec, v_vec = ce_inner_max(h0, 0.7)
    for i in range(h0.size):
        z_i, v_i = ce_inner_max(h0[i:i + 1], 0.7)
        # the batched solve shares a stopping test, so allow Newton-step jitter
        assert abs(z_vec[i] - z_i[0]) < 1e-10
        assert abs(v_vec[i] - v_i[0]) < 1e-12


# ---------------------------------------------------------------------------
# problem definition plumbing


def test_gauge_equivalence():
    a, at = 2.5, 3.0
    p1 = solve_saddle(ReplicaInput(alpha=a, lam=1e-3, loss="mse",
                                   kappas=KAPPAS, alpha_t=at))
    p2 = solve_saddle(ReplicaInput(alpha=a, lam=1e-3, loss="mse",
                                   kappas=KAPPAS, alpha_d=a / at))
    for field in _FIELDS:
        assert getattr(p1, field) == getattr(p2, field)


def test_input_validation():
    with pytest.raises(ValueError, match="exactly one"):
        ReplicaInput(alpha=1.0, lam=0.1, loss="mse", kappas=KAPPAS)
    with pytest.raises(ValueError, match="exactly one"):
        ReplicaInput(alpha=1.0, lam=0.1, loss="mse", kappas=KAPPAS,
                     alpha_d=1.0, alpha_t=1.0)
    with pytest.raises(ValueError, match="lam"):
        ReplicaInput(alpha=1.0, lam=-0.1, loss="mse", kappas=KAPPAS, alpha_t=1.0)
    with pytest.raises(ValueError, match="loss"):
        ReplicaInput(alpha=1.0, lam=0.1, loss="hinge", kappas=KAPPAS, alpha_t=1.0)
    with pytest.raises(ValueError, match="delta"):
        ReplicaInput(alpha=1.0, lam=0.1, loss="mse", kappas=KAPPAS,
                     alpha_t=1.0, delta=-1.0)
    linear = compute_kappas(Activation.linear())
    with pytest.raises(ValueError, match="k_star_sq"):
        ReplicaInput(alpha=1.0, lam=0.1, loss="mse", kappas=linear, alpha_t=1.0)


def test_interpolation_warning_at_zero_lambda():
    inp = ReplicaInput(alpha=1.0, lam=0.0, loss="mse", kappas=KAPPAS, alpha_t=3.0)
    with pytest.warns(RuntimeWarning, match="interpolation"):
        with contextlib.suppress(ConvergenceError):
            solve_saddle(inp, max_iter=2000)


def test_convergence_error_reports_residual():
    inp = ReplicaInput(alpha=2.0, lam=1e-3, loss="mse", kappas=KAPPAS, alpha_t=3.0)
    with pytest.raises(ConvergenceError, match="residual"):
        solve_saddle(inp, max_iter=5)


# ---------------------------------------------------------------------------
# limits with known behavior


def test_heavy_ridge_limit():
    inp = ReplicaInput(alpha=2.0, lam=1e3, loss="mse", kappas=KAPPAS, alpha_t=3.0)
    params = solve_saddle(inp)
    obs = observables(params, inp)
    # weights are crushed to zero, so every margin sits at the loss of a
    # silent student: l(0) = 1/2 for both train and test
    assert params.q_d < 1e-4
    assert abs(obs.train_loss - 0.5) < 1e-2
    assert abs(obs.test_loss - 0.5) < 1e-2


def test_bmd_asymptote_matches_kappa_ratio():
    inp = ReplicaInput(alpha=1e3, lam=1e-4, loss="mse", kappas=KAPPAS, alpha_t=3.0)
    obs = observables(solve_saddle(inp), inp)
    assert abs(obs.bmd - TANH_BMD_ASYMPTOTE) < 1e-3


def test_generalization_error_edges():
    assert generalization_error(0.0, 2.0) == pytest.approx(0.5, abs=1e-15)
    assert generalization_error(2.0, 4.0) == pytest.approx(0.0, abs=1e-15)
    eps_mid = generalization_error(1.0, 4.0)
    assert 0.0 < eps_mid < 0.5
    assert generalization_error(1.5, 4.0) < eps_mid
    with pytest.raises(FloatingPointError):
        generalization_error(2.0 * (1.0 + 1e-8), 4.0)


def test_sign_activation_bmd_diverges():
    ks_sign = compute_kappas(Activation.sign())
    inp = ReplicaInput(alpha=3.0, lam=1e-3, loss="mse", kappas=ks_sign, alpha_t=3.0)
    obs = observables(solve_saddle(inp), inp)
    assert np.isinf(obs.bmd)
    assert 0.0 < obs.eps_g < 0.5
    assert np.isfinite(obs.train_loss)


# ---------------------------------------------------------------------------
# curve sweeps


def test_sweep_peaks_at_interpolation():
    grid = np.linspace(0.2, 3.0, 15)
    rows = sweep_curve(KAPPAS, "mse", 1e-4, 3.0, grid)
    assert all(r.converged for r in rows)
    eps = np.array([r.eps_g for r in rows])
    bmd = np.array([r.bmd for r in rows])
    inv_alpha = np.array([r.inv_alpha for r in rows])
    assert np.all((eps >= 0.0) & (eps <= 0.5))
    assert np.all(bmd >= 1.0 - 1e-12)
    assert inv_alpha[np.argmax(eps)] == pytest.approx(1.0)
    assert inv_alpha[np.argmax(bmd)] == pytest.approx(1.0)


def test_sweep_ce_converges():
    rows = sweep_curve(KAPPAS, "ce", 1e-2, 3.0, np.linspace(0.5, 1.5, 3))
    assert all(r.converged for r in rows)
    assert all(0.0 < r.eps_g < 0.5 for r in rows)


def test_sweep_requires_monotone_grid():
    with pytest.raises(ValueError, match="monotone"):
        sweep_curve(KAPPAS, "mse", 1e-2, 3.0, np.array([0.5, 1.5, 1.0]))
    with pytest.raises(ValueError, match="empty"):
        sweep_curve(KAPPAS, "mse", 1e-2, 3.0, np.array([]))
    # decreasing grids are fine, continuation just runs the other way
    rows = sweep_curve(KAPPAS, "mse", 1e-2, 3.0, np.array([1.5, 1.0, 0.5]))
    assert [r.inv_alpha for r in rows] == [1.5, 1.0, 0.5]


def test_curve_csv_round_trip(tmp_path):
    rows = sweep_curve(KAPPAS, "mse", 1e-2, 3.0, np.linspace(0.5, 1.5, 5))
    rows.append(CurvePoint(inv_alpha=2.0, alpha_t=3.0, lam=1e-2, loss="mse",
                           eps_g=np.nan, train_loss=np.nan, test_loss=np.nan,
                           bmd=np.nan, q_d=np.nan, p_d=np.nan, Q_d=np.nan,
                           converged=False))
    path = tmp_path / "curve.csv"
    write_curve_csv(path, rows)
    assert path.read_text().splitlines()[0] == CURVE_HEADER
    back = read_curve_csv(path)
    assert len(back) == len(rows)
    float_fields = ("inv_alpha", "alpha_t", "lam", "eps_g", "train_loss",
                    "test_loss", "bmd", "q_d", "p_d", "Q_d")
    for r1, r2 in zip(rows, back):
        assert r1.loss == r2.loss
        assert r1.converged == r2.converged
        for field in float_fields:
            v1, v2 = float(getattr(r1, field)), getattr(r2, field)
            assert v1 == v2 or (np.isnan(v1) and np.isnan(v2))


def test_curve_csv_rejects_foreign_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,b,c\n1,2,3\n")
    with pytest.raises(ValueError, match="header"):
        read_curve_csv(path)


def test_optimal_lambda_beats_log_grid():
    for delta in (0.0, 2.0):
        lam_opt, eps_opt = optimal_lambda(1.0, 3.0, KAPPAS, "mse", delta=delta)
        assert 1e-6 <= lam_opt <= 10.0
        for lam in 10.0 ** np.linspace(-4, 1, 11):
            inp = ReplicaInput(alpha=1.0, lam=lam, loss="mse", kappas=KAPPAS,
                               alpha_t=3.0, delta=delta)
            eps_fixed = observables(solve_saddle(inp), inp).eps_g
            assert eps_opt <= eps_fixed + 1e-4


# ---------------------------------------------------------------------------
# spectral shortcut for the ridge student


def test_mp_rule_mass_and_mean():
    for alpha_d in (0.5, 2.0):
        rho, weights, atom = _mp_rule(alpha_d)
        assert np.all(rho > 0.0)
        assert weights.sum() + atom == pytest.approx(1.0, abs=1e-6)
        assert atom == pytest.approx(max(1.0 - alpha_d, 0.0))
        # trace identity: the mean of the full law is tr(F^T F / D) / N = 1,
        # and the zero atom contributes nothing to it
        assert np.sum(weights * rho) == pytest.approx(1.0, abs=1e-6)


def test_spectral_mp_matches_sampled_spectrum():
    rng = np.random.default_rng(0)
    n_feat, alpha_d = 2000, 2.0
    f = rng.standard_normal((int(alpha_d * n_feat), n_feat))
    evs = np.linalg.eigvalsh(f.T @ f / (alpha_d * n_feat))
    q_e, _, b_e = spectral_ols(alpha_d, 1e-3, KAPPAS, spectrum=evs, alpha=200.0)
    q_m, _, b_m = spectral_ols(alpha_d, 1e-3, KAPPAS, spectrum="mp", alpha=200.0)
    assert abs(q_e - q_m) / q_m < 1e-2
    assert abs(b_e - b_m) / b_m < 5e-3


def test_spectral_matches_saddle_at_large_alpha():
    inp = ReplicaInput(alpha=200.0, lam=1e-3, loss="mse", kappas=KAPPAS, alpha_d=2.0)
    params = solve_saddle(inp)
    obs = observables(params, inp)
    q_sp, _, b_sp = spectral_ols(2.0, 1e-3, KAPPAS, alpha=200.0)
    assert abs(q_sp - params.q_d) / params.q_d < 1e-2
    assert abs(b_sp - obs.bmd) / obs.bmd < 1e-3


def test_spectral_infinite_sample_limit():
    lam = 0.3
    big = 1e6
    q1, _, b1 = spectral_ols(2.0, lam, KAPPAS, alpha=None)
    q2, _, b2 = spectral_ols(2.0, lam * big, KAPPAS, alpha=big)
    assert abs(q1 - q2) / q1 < 1e-4
    assert abs(b1 - b2) / b1 < 1e-4


def test_spectral_peak_at_matched_width():
    grid = (0.5, 0.8, 1.0, 1.25, 2.0)
    bmds = [spectral_ols(ad, 1e-6, KAPPAS, alpha=None)[2] for ad in grid]
    assert grid[int(np.argmax(bmds))] == 1.0


def test_spectral_zero_lambda_warns_near_square():
    with pytest.warns(RuntimeWarning, match="origin"):
        spectral_ols(1.0, 0.0, KAPPAS, alpha=None)


def test_spectral_matches_ridge_simulation():
    # direct simulation of the trained ridge student at large sample count,
    # where the annealed resolvent used by spectral_ols becomes exact
    dim, n_feat, n_samp, lam = 400, 200, 20000, 1e-2
    alpha_d, alpha = dim / n_feat, n_samp / n_feat
    rng = np.random.default_rng(11)
    rel_q, rel_b = [], []
    for _ in range(4):
        feat = rng.standard_normal((dim, n_feat))
        omega = feat.T @ feat / dim
        w_t = rng.standard_normal(dim)
        w_t *= np.sqrt(dim) / np.linalg.norm(w_t)
        x = rng.standard_normal((n_samp, dim))
        y = np.sign(x @ w_t / np.sqrt(dim))
        phi = np.tanh(x @ feat / np.sqrt(dim))
        w = np.linalg.solve(phi.T @ phi / n_feat + lam * np.eye(n_feat),
                            phi.T @ y / np.sqrt(n_feat))
        q_sim = w @ w / n_feat
        b_sim = bmd_from_overlaps(KAPPAS, q_sim, w @ omega @ w / n_feat)
        q_sp, _, b_sp = spectral_ols(alpha_d, lam, KAPPAS,
                                     spectrum=np.linalg.eigvalsh(omega), alpha=alpha)
        rel_q.append((q_sim - q_sp) / q_sp)
        rel_b.append((b_sim - b_sp) / b_sp)
    # per-draw scatter is a few percent at this size; gate the mean
    assert abs(np.mean(rel_q)) < 0.05
    assert abs(np.mean(rel_b)) < 0.025


# ---------------------------------------------------------------------------
# order parameter container


def test_overlaps_composition():
    p = OrderParams(q_d=0.7, delta_q=0.2, delta_q_hat=1.0, delta_Q_hat=1.0,
                    p_d=0.9, delta_p=0.1, delta_p_hat=1.0, delta_P_hat=1.0,
                    r=0.5, r_hat=1.0)
    m, big_q, dq = p.overlaps(KAPPAS)
    k = KAPPAS
    assert m == pytest.approx(k.k1 * 0.5)
    assert big_q == pytest.approx(k.k_star_sq * 0.7 + k.k1 ** 2 * 0.9)
    assert dq == pytest.approx(k.k_star_sq * 0.2 + k.k1 ** 2 * 0.1)
