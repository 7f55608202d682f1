"""Dormand-Prince 5(4) integrator for the regularized separable flow.

The right-hand side is fixed (it is compiled together with the stepper), so
the whole integration runs inside numba.  Step control follows Hairer's
dopri5 (PI control, here on the max-norm of the scaled error estimate), and
dense output uses its 5-coefficient continuous extension of order 4.

Two right-hand sides are available:

* ``FULL``: the Hamiltonian field of Q in the doubled chart;
* ``LEAF``: on the singular leaf g = delta^2/c the nu-equation reduces to the
  first-order ODE  nu' = 4 sigma (c cos nu + delta) / sqrt(-2c),  which keeps
  the equilibrium nu* exactly and so does not amplify round-off near it.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

FULL = 0
LEAF = 1

# Butcher tableau
C2, C3, C4, C5 = 0.2, 0.3, 0.8, 8.0 / 9.0
A21 = 0.2
A31, A32 = 3.0 / 40.0, 9.0 / 40.0
A41, A42, A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
A51, A52, A53, A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
A61, A62, A63, A64, A65 = 9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0
A71, A73, A74, A75, A76 = 35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0
E1, E3, E4, E5, E6, E7 = 71.0 / 57600.0, -71.0 / 16695.0, 71.0 / 1920.0, -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0
D1, D3, D4 = -12715105075.0 / 11282082432.0, 87487479700.0 / 32700410799.0, -10690763975.0 / 1880347072.0
D5, D6, D7 = 701980252875.0 / 199316789632.0, -1453857185.0 / 822651844.0, 69997945.0 / 29380423.0


@njit(cache=True)
def rhs(mode, c, delta, sigma, y, out):
    lam, nu, pl, pn = y[0], y[1], y[2], y[3]
    out[0] = 4.0 * pl
    out[2] = 2.0 * np.sinh(lam) * (1.0 + c * np.cosh(lam))
    out[3] = 2.0 * np.sin(nu) * (delta + c * np.cos(nu))
    if mode == LEAF:
        out[1] = 4.0 * sigma * (c * np.cos(nu) + delta) / np.sqrt(-2.0 * c)
    else:
        out[1] = 4.0 * pn


@njit(cache=True)
def _error_norm(y0, y1, err, atol, rtol):
    acc = 0.0
    for i in range(4):
        sk = atol + rtol * max(abs(y0[i]), abs(y1[i]))
        acc = max(acc, abs(err[i]) / sk)
    return acc


@njit(cache=True)
def _initial_step(mode, c, delta, sigma, y0, f0, direction, atol, rtol, hmax):
    dnf = 0.0
    dny = 0.0
    for i in range(4):
        sk = atol + rtol * abs(y0[i])
        dnf += (f0[i] / sk) ** 2
        dny += (y0[i] / sk) ** 2
    if dnf <= 1e-10 or dny <= 1e-10:
        h = 1e-6
    else:
        h = 0.01 * np.sqrt(dny / dnf)
    h = min(h, hmax)
    y1 = y0 + direction * h * f0
    f1 = np.empty(4)
    rhs(mode, c, delta, sigma, y1, f1)
    der2 = 0.0
    for i in range(4):
        sk = atol + rtol * abs(y0[i])
        der2 += ((f1[i] - f0[i]) / sk) ** 2
    der2 = np.sqrt(der2) / h
    der12 = max(abs(der2), np.sqrt(dnf))
    if der12 <= 1e-15:
        h1 = max(1e-6, abs(h) * 1e-3)
    else:
        h1 = (0.01 / der12) ** 0.2
    return min(100.0 * h, h1, hmax)


@njit(cache=True)
def dopri5(mode, c, delta, sigma, y0, s0, s1, rtol, atol, hmax, max_steps):
    """Integrate from s0 to s1 (either direction).

    Returns (status, s, y, cont, n_accepted, n_rejected); status 0 = done,
    1 = step budget exhausted, 2 = step size underflow.  ``cont[i]`` holds
    the dense-output coefficients on [s[i], s[i+1]].
    """
    direction = 1.0 if s1 >= s0 else -1.0
    cap = 1024
    ts = np.empty(cap)
    ys = np.empty((cap, 4))
    cont = np.empty((cap, 5, 4))
    n = 1
    ts[0] = s0
    y = y0.copy()
    ys[0, :] = y

    k1 = np.empty(4)
    k2 = np.empty(4)
    k3 = np.empty(4)
    k4 = np.empty(4)
    k5 = np.empty(4)
    k6 = np.empty(4)
    k7 = np.empty(4)
    yt = np.empty(4)
    y1 = np.empty(4)
    err = np.empty(4)

    rhs(mode, c, delta, sigma, y, k1)
    s = s0
    if s1 == s0:
        return 0, ts[:1].copy(), ys[:1].copy(), cont[:0].copy(), 0, 0
    h = _initial_step(mode, c, delta, sigma, y, k1, direction, atol, rtol, hmax)
    beta = 0.04
    expo1 = 0.2 - beta * 0.75
    facc1 = 5.0
    facc2 = 0.1
    safe = 0.9
    facold = 1e-4
    n_acc = 0
    n_rej = 0
    status = 0
    last = False
    reject = False
    uround = 2.3e-16

    while True:
        if n_acc + n_rej >= max_steps:
            status = 1
            break
        if 0.1 * abs(h) <= abs(s) * uround:
            status = 2
            break
        if (s + 1.01 * direction * h - s1) * direction >= 0.0:
            h = abs(s1 - s)
            last = True
        hs = direction * h

        for i in range(4):
            yt[i] = y[i] + hs * A21 * k1[i]
        rhs(mode, c, delta, sigma, yt, k2)
        for i in range(4):
            yt[i] = y[i] + hs * (A31 * k1[i] + A32 * k2[i])
        rhs(mode, c, delta, sigma, yt, k3)
        for i in range(4):
            yt[i] = y[i] + hs * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i])
        rhs(mode, c, delta, sigma, yt, k4)
        for i in range(4):
            yt[i] = y[i] + hs * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i])
        rhs(mode, c, delta, sigma, yt, k5)
        for i in range(4):
            yt[i] = y[i] + hs * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i])
        rhs(mode, c, delta, sigma, yt, k6)
        for i in range(4):
            y1[i] = y[i] + hs * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i])
        rhs(mode, c, delta, sigma, y1, k7)
        for i in range(4):
            err[i] = hs * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i])
        e = _error_norm(y, y1, err, atol, rtol)

        fac11 = e ** expo1
        fac = fac11 / facold ** beta
        fac = max(1.0 / facc1, min(1.0 / facc2, fac / safe))
        hnew = h / fac
        if e <= 1.0:
            facold = max(e, 1e-4)
            n_acc += 1
            if n >= cap:
                cap *= 2
                ts2 = np.empty(cap)
                ys2 = np.empty((cap, 4))
                cont2 = np.empty((cap, 5, 4))
                ts2[:n] = ts[:n]
                ys2[:n] = ys[:n]
                cont2[:n - 1] = cont[:n - 1]
                ts, ys, cont = ts2, ys2, cont2
            j = n - 1
            for i in range(4):
                ydiff = y1[i] - y[i]
                bspl = hs * k1[i] - ydiff
                cont[j, 0, i] = y[i]
                cont[j, 1, i] = ydiff
                cont[j, 2, i] = bspl
                cont[j, 3, i] = ydiff - hs * k7[i] - bspl
                cont[j, 4, i] = hs * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i]
                                      + D6 * k6[i] + D7 * k7[i])
            s = s1 if last else s + hs
            for i in range(4):
                y[i] = y1[i]
                k1[i] = k7[i]
            ts[n] = s
            ys[n, :] = y
            n += 1
            if last:
                break
            hnew = min(abs(hnew), hmax)
            if reject:
                hnew = min(hnew, h)
            reject = False
        else:
            hnew = h / min(facc1, fac11 / safe)
            reject = True
            last = False
            if n_acc >= 1:
                n_rej += 1
        h = hnew

    return status, ts[:n].copy(), ys[:n].copy(), cont[:n - 1].copy(), n_acc, n_rej


@njit(cache=True)
def dense_eval(ts, cont, s_query):
    """Evaluate the continuous extension at sorted or unsorted query times."""
    m = s_query.shape[0]
    out = np.empty((m, 4))
    nseg = cont.shape[0]
    increasing = ts[-1] >= ts[0]
    for q in range(m):
        sq = s_query[q]
        if increasing:
            j = np.searchsorted(ts, sq, side="right") - 1
        else:
            j = ts.shape[0] - 1 - np.searchsorted(ts[::-1], sq, side="left")
        j = min(max(j, 0), nseg - 1)
        h = ts[j + 1] - ts[j]
        th = (sq - ts[j]) / h
        th1 = 1.0 - th
        for i in range(4):
            out[q, i] = cont[j, 0, i] + th * (cont[j, 1, i] + th1 * (cont[j, 2, i] + th * (
                cont[j, 3, i] + th1 * cont[j, 4, i])))
    return out


@dataclass(frozen=True)
class StepStats:
    accepted: int
    rejected: int


def solve(mode, c, delta, sigma, y0, s0, s1, tol, hmax=0.1, max_steps=50_000_000):
    y0 = np.ascontiguousarray(y0, dtype=float)
    status, s, y, cont, n_acc, n_rej = dopri5(int(mode), float(c), float(delta), float(sigma), y0,
                                              float(s0), float(s1), float(tol), float(tol),
                                              float(hmax), int(max_steps))
    return status, s, y, cont, StepStats(int(n_acc), int(n_rej))
