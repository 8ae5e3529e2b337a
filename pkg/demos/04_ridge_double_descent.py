#!/usr/bin/env python3
"""Double descent in ridge-trained random feature models.

Sweep the number of features N through the interpolation point N = P at
fixed data. With weak regularization and noisy labels the test error
spikes there, and the mean dimension of the learned function spikes with
it: the network is at its most oscillatory exactly where it memorizes.
"""

import time

import numpy as np

from meandim.rfm import Activation, analytic_bmd, random_rfm
from meandim.trainer import TeacherTask, flip_labels, gen_teacher_student, train_rfm_ridge

D = 50
P = 200
LAM = 1e-4
NOISE = 0.1
WIDTHS = (50, 100, 150, 180, 200, 220, 260, 340, 450, 600)
REPS = 5


def one_cell(N, rep):
    task = TeacherTask.random(D, seed=rep)
    train, test = gen_teacher_student(D, P, 2000, task, seed=rep)
    train = flip_labels(train, NOISE, seed=rep + 100)
    model = random_rfm(D, N, Activation.tanh(), seed=1000 * rep + N)
    fit = train_rfm_ridge(model, train, LAM, test_ds=test)
    return fit.test_error, analytic_bmd(fit.model)


start = time.time()
print(f"D = {D} inputs, P = {P} training points, {NOISE:.0%} flipped labels, lam = {LAM}")
print(f"interpolation threshold at N = P = {P}")
print()
print("    N   test error   bmd (closed form)")

errs, bmds = [], []
for N in WIDTHS:
    cells = [one_cell(N, rep) for rep in range(REPS)]
    err = float(np.mean([c[0] for c in cells]))
    bmd = float(np.mean([c[1] for c in cells]))
    errs.append(err)
    bmds.append(bmd)
    marker = "  <-- N = P" if N == P else ""
    print(f"{N:5d}   {err:10.4f}   {bmd:8.4f}{marker}")

print()
print(f"test error peaks at N = {WIDTHS[int(np.argmax(errs))]}")
print(f"mean dimension peaks at N = {WIDTHS[int(np.argmax(bmds))]}")
print("both descend again past the threshold: more features, simpler function")
print(f"\n[{time.time() - start:.1f}s]")
