"""Adaptive embedded Runge-Kutta integration for complex-valued systems.

Dormand-Prince 5(4) pair with FSAL, proportional step control and an
optional fixed-step mode used by convergence-order checks.  State vectors
may be complex; the error norm mixes absolute and relative tolerances
component-wise.
"""

from __future__ import annotations

import numpy as np


class StepSizeUnderflow(RuntimeError):
    """Step size collapsed below machine resolution; carries the location."""

    def __init__(self, t):
        super().__init__(f"step size underflow at t={t!r}")
        self.t = t


# Dormand-Prince coefficients (advancing order 5, embedded order 4).
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200,
                187 / 2100, 1 / 40])
_E = _B5 - _B4


def _step(f, t, y, h, k1):
    """One DP54 step; returns (y5, err_vec, k7)."""
    k = [k1]
    for i in range(1, 7):
        yi = y + h * sum(a * kk for a, kk in zip(_A[i], k))
        k.append(f(t + _C[i] * h, yi))
    y5 = y + h * sum(b * kk for b, kk in zip(_B5, k) if b != 0.0)
    err = h * sum(e * kk for e, kk in zip(_E, k) if e != 0.0)
    return y5, err, k[6]


def _initial_step(f, t0, y0, f0, direction, rtol, atol):
    scale = atol + rtol * np.abs(y0)
    d0 = np.sqrt(np.mean(np.abs(y0 / scale) ** 2))
    d1 = np.sqrt(np.mean(np.abs(f0 / scale) ** 2))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    y1 = y0 + h0 * direction * f0
    f1 = f(t0 + h0 * direction, y1)
    d2 = np.sqrt(np.mean(np.abs((f1 - f0) / scale) ** 2)) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100 * h0, h1)


def integrate(f, t_span, y0, rtol=1e-9, atol=1e-12, t_eval=None,
              max_step=np.inf, first_step=None, fixed_step=None):
    """Integrate y' = f(t, y) over t_span.

    Returns (t_out, y_out, nfev) where t_out are the evaluation points
    (t_eval if given, else just the endpoint) and y_out has one state row
    per evaluation point.
    """
    t0, tf = float(t_span[0]), float(t_span[1])
    y = np.atleast_1d(np.asarray(y0, dtype=complex)).copy()
    direction = 1.0 if tf >= t0 else -1.0

    if t_eval is None:
        boundaries = [tf]
    else:
        boundaries = [float(t) for t in t_eval]
        if any(direction * (b - t0) < -1e-13 or direction * (b - tf) > 1e-13
               for b in boundaries):
            raise ValueError("t_eval must lie within t_span")
        boundaries = sorted(boundaries, key=lambda b: direction * b)
        if not boundaries or abs(boundaries[-1] - tf) > 1e-13:
            boundaries.append(tf)

    out = []
    nfev = 1
    t = t0
    k1 = f(t, y)

    if fixed_step is not None:
        h = abs(fixed_step) * direction
        bi = 0
        while bi < len(boundaries):
            target = boundaries[bi]
            while direction * (target - t) > 1e-13 * max(1.0, abs(t)):
                hs = h
                if direction * (t + hs - target) > 0:
                    hs = target - t
                y, _, k1 = _step(f, t, y, hs, k1)
                nfev += 6
                t = t + hs
            out.append(y.copy())
            bi += 1
        return np.array(boundaries), np.array(out), nfev

    if first_step is None:
        h = _initial_step(f, t0, y, k1, direction, rtol, atol)
        nfev += 2
    else:
        h = abs(first_step)
    h = min(h, max_step)

    bi = 0
    while bi < len(boundaries):
        target = boundaries[bi]
        while direction * (target - t) > 1e-13 * max(1.0, abs(t)):
            if h < 1e-14 * max(1.0, abs(t)):
                raise StepSizeUnderflow(t)
            hs = min(h, abs(target - t))
            y_new, err, k7 = _step(f, t, y, hs * direction, k1)
            nfev += 6
            scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
            err_norm = np.sqrt(np.mean(np.abs(err / scale) ** 2))
            if err_norm <= 1.0:
                t = t + hs * direction
                y = y_new
                k1 = k7
                factor = 5.0 if err_norm == 0 else min(5.0, 0.9 * err_norm ** -0.2)
                h = min(max_step, hs * max(0.2, factor))
            else:
                h = hs * max(0.2, 0.9 * err_norm ** -0.2)
        out.append(y.copy())
        bi += 1

    return np.array(boundaries), np.array(out), nfev
