"""Analytic pulse-geometry tools for the constant-detuning families.

Covers the crossing polynomial whose sign controls the t <-> z bijection,
the double-root conditions producing infinitely narrow pulses, the
Lambert-W description of the pulse edges with their vertical-wall limits,
the width-preserving (a, d3) pairing rule, and numeric peak metrics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class CrossingPolynomial:
    """P(z) = A z^2 - B z + C, the numerator of the detuning factor.

    A = d1 + d2 + d3,  B = d1 + a d1 + a d2 + d3,  C = a d1.
    Identical to d1 (z-1)(z-a) + d2 z(z-a) + d3 z(z-1).
    """

    A: float
    B: float
    C: float

    @classmethod
    def from_params(cls, a, d1, d2, d3) -> "CrossingPolynomial":
        return cls(A=d1 + d2 + d3, B=d1 + a * d1 + a * d2 + d3, C=a * d1)

    def __call__(self, z):
        return self.A * z * z - self.B * z + self.C

    def derivative(self, z):
        return 2 * self.A * z - self.B

    @property
    def discriminant(self) -> float:
        return self.B * self.B - 4 * self.A * self.C

    def roots(self):
        if self.A == 0:
            if self.B == 0:
                raise ValueError("degenerate polynomial: A = B = 0")
            return (self.C / self.B,)
        disc = complex(self.discriminant) ** 0.5
        return ((self.B - disc) / (2 * self.A), (self.B + disc) / (2 * self.A))

    def sign_definite_on_unit_interval(self, tol=1e-12) -> bool:
        """True when P does not change sign on (0, 1)."""
        for r in self.roots():
            r = complex(r)
            if abs(r.imag) < tol and tol < r.real < 1 - tol:
                if self.A == 0 or abs(self.derivative(r.real)) > tol:
                    return False
        return True


@dataclass(frozen=True)
class NarrowPulseRoot:
    """A parameter value with vanishing discriminant, plus its double root."""

    free_parameter: str
    value: float
    z0: float
    admissible: bool
    reason: str = ""


def narrow_pulse_roots(a=None, d1=None, d2=None, d3=None, free="d3"):
    """Solve the zero-discriminant condition for the free parameter.

    The discriminant D = B^2 - 4 A C is quadratic in both a and d3; pass the
    remaining three values and name the free one.  Each root is returned
    with the double root z0 = B / (2A) of the crossing polynomial and an
    admissibility flag (z0 strictly inside (0, 1), and a > 1 when a is the
    free parameter).
    """
    if free not in ("a", "d3"):
        raise ValueError("free parameter must be 'a' or 'd3'")

    if free == "d3":
        if a is None or d1 is None or d2 is None:
            raise ValueError("solving for d3 needs a, d1, d2")
        # D(d3) = (d3 + d1(1+a) + a d2)^2 - 4 a d1 (d1 + d2 + d3)
        b0 = d1 * (1 + a) + a * d2
        quad = np.array([1.0, 2 * b0 - 4 * a * d1,
                         b0 * b0 - 4 * a * d1 * (d1 + d2)])
        values = np.roots(quad)
        fixed = dict(a=a, d1=d1, d2=d2)
    else:
        if d1 is None or d2 is None or d3 is None:
            raise ValueError("solving for a needs d1, d2, d3")
        # D(a) = ((d1+d2) a + (d1+d3))^2 - 4 d1 (d1+d2+d3) a
        s = d1 + d2
        quad = np.array([s * s,
                         2 * s * (d1 + d3) - 4 * d1 * (d1 + d2 + d3),
                         (d1 + d3) ** 2])
        if abs(quad[0]) < 1e-300 and abs(quad[1]) < 1e-300:
            raise ValueError("degenerate condition: no dependence on a")
        values = np.roots(quad)
        fixed = dict(d1=d1, d2=d2, d3=d3)

    out = []
    for v in np.atleast_1d(values):
        if abs(v.imag) > 1e-9 * (1 + abs(v)):
            continue
        v = float(v.real)
        p = dict(fixed)
        p[free] = v
        poly = CrossingPolynomial.from_params(p["a"], p["d1"], p["d2"], p["d3"])
        if poly.A == 0:
            out.append(NarrowPulseRoot(free, v, math.nan, False,
                                       "crossing polynomial degenerates"))
            continue
        z0 = poly.B / (2 * poly.A)
        admissible = True
        reason = ""
        if not (1e-12 < z0 < 1 - 1e-12):
            admissible = False
            reason = f"double root z0={z0:.6g} not strictly inside (0, 1)"
        if free == "a" and v <= 1:
            admissible = False
            reason = (reason + "; " if reason else "") + f"a={v:.6g} <= 1"
        out.append(NarrowPulseRoot(free, v, z0, admissible, reason))
    return out


def pulse_time_origin(a, d1, d2, d3, Delta=1.0) -> float:
    """Shift t0 that pins z(t=0) = 1/2."""
    return ((d1 + d2 + d3) * math.log(2) - d3 * math.log(2 * a - 1)) / Delta


def wall_positions(a, d3, Delta=1.0, d1=0.0, d2=0.0):
    """Limiting vertical-wall edge positions (t1, t2) and the width d.

    Exact in the limit d1 -> +0, d2 -> -0; t0 is evaluated at the supplied
    d1, d2 (commonly zero).
    """
    if a <= 1:
        raise ValueError("a must exceed 1")
    t0 = pulse_time_origin(a, d1, d2, d3, Delta)
    t1 = t0 + d3 * math.log(a) / Delta
    t2 = t0 + d3 * math.log(a - 1) / Delta
    return t1, t2, t2 - t1


def matched_pair(a, d3, a_target) -> float:
    """d3 for a_target that keeps the wall width d3 ln((a-1)/a) unchanged.

    Pulses from (a, d3) and (a_target, returned d3) are nearly
    indistinguishable when the edge parameters stay small.
    """
    if a <= 1 or a_target <= 1:
        raise ValueError("both a values must exceed 1")
    return d3 * math.log((a - 1) / a) / math.log((a_target - 1) / a_target)


# ---------------------------------------------------------------------------
# Lambert W


_INV_E = -math.exp(-1.0)


def lambert_w(branch: int, x: float) -> float:
    """Real branches of the Lambert W function, W e^W = x.

    branch 0 needs x >= -1/e; branch -1 needs -1/e <= x < 0.  Halley
    iteration from a piecewise initial guess (Corless et al., 1996);
    residual is below 1e-13 relative across the domain.
    """
    if branch not in (0, -1):
        raise ValueError("branch must be 0 or -1")
    x = float(x)
    if x < _INV_E:
        if abs(x - _INV_E) <= 4e-16:
            x = _INV_E  # rounding noise at the branch point
        else:
            raise ValueError(f"x={x} is below the branch point -1/e")
    if branch == -1 and x >= 0:
        raise ValueError("branch -1 requires x < 0")

    if branch == 0:
        if x == 0:
            return 0.0
        if abs(x - _INV_E) < 1e-15:
            return -1.0
        if x < 0.5:
            # series about the branch point or about zero, whichever is closer
            if x < -0.25:
                p = math.sqrt(2 * (math.e * x + 1))
                w = -1 + p - p * p / 3 + 11 * p ** 3 / 72
            else:
                w = x * (1 - x + 1.5 * x * x)
        else:
            w = math.log(x)
            if w > 1:
                w -= math.log(w)
    else:
        if abs(x - _INV_E) < 1e-15:
            return -1.0
        if x > -0.183939:  # e^-2 threshold: asymptotic log guess is reliable
            L1 = math.log(-x)
            L2 = math.log(-L1)
            w = L1 - L2 + L2 / L1
        else:
            p = -math.sqrt(2 * (math.e * x + 1))
            w = -1 + p - p * p / 3 + 11 * p ** 3 / 72

    for _ in range(60):
        ew = math.exp(w)
        f = w * ew - x
        if f == 0:
            break
        wp1 = w + 1
        step = f / (ew * wp1 - (w + 2) * f / (2 * wp1))
        w -= step
        if abs(step) < 5e-16 * (1 + abs(w)):
            break
    return w


def edge_approximation(a, d1, d2, d3, Delta, side, t):
    """Lambert-W approximation of z(t) near a pulse edge.

    Left side: expand the map about z = 0 keeping the constant and linear
    terms of ln(1-z) and ln(a-z).  Right side: same about z = 1 with
    ln z and ln(a-z).  The W branch is chosen so that z lands in (0, 1).
    """
    t0 = pulse_time_origin(a, d1, d2, d3, Delta)
    if side == "left":
        c = -(a * d2 + d3) / (a * d1)
        log_expo = (Delta * (t - t0) - d3 * math.log(a)) / d1
        if abs(c) < 1e-12:
            return math.exp(log_expo)
        return _w_of_scaled_exponential(c, log_expo) / c
    if side == "right":
        c = (d3 / (a - 1) - d1) / d2
        log_expo = (Delta * (t - t0) - d3 * math.log(a - 1)) / d2
        if abs(c) < 1e-12:
            return 1.0 - math.exp(log_expo)
        return 1.0 - _w_of_scaled_exponential(c, log_expo) / c
    raise ValueError("side must be 'left' or 'right'")


def _w_in_unit_interval(arg):
    """W(arg) on whichever real branch keeps the edge variable in (0, 1)."""
    last_err = None
    for branch in (0, -1):
        try:
            w = lambert_w(branch, arg)
        except ValueError as err:
            last_err = err
            continue
        if -1e-12 <= w:
            return w
        last_err = ValueError(f"W_{branch}({arg}) = {w} leaves the edge range")
    raise last_err


def _w_of_scaled_exponential(c, log_expo):
    """W(c * e^log_expo), stable when the exponential overflows a float."""
    if c > 0:
        big = math.log(c) + log_expo
        if big > 600.0:
            # asymptotic start, then Newton on w + ln w = big
            w = big - math.log(big)
            for _ in range(50):
                step = (w + math.log(w) - big) / (1 + 1 / w)
                w -= step
                if abs(step) <= 1e-15 * w:
                    break
            return w
        return _w_in_unit_interval(c * math.exp(log_expo))
    return _w_in_unit_interval(c * math.exp(min(log_expo, 600.0)))


def exponential_edge(a, d1, d2, d3, Delta, t):
    """Constant-term-only edge model z(t) = exp((Delta (t-t0) - d3 ln a)/d1).

    The dropped ln(1-z) term vanishes at z = 0, so the full time origin is
    kept.  The model passes through z = 1 exactly at the left wall
    position, which is how the wall is located.
    """
    t0 = pulse_time_origin(a, d1, d2, d3, Delta)
    return np.exp((Delta * (np.asarray(t) - t0) - d3 * math.log(a)) / d1)


# ---------------------------------------------------------------------------
# numeric pulse metrics


@dataclass
class PeakMetrics:
    peak_times: np.ndarray
    peak_heights: np.ndarray
    fwhm: float
    area: float


def peak_metrics(trace) -> PeakMetrics:
    """Local maxima (parabolic refinement), outermost half-maximum width,
    and the trapezoid pulse area of a sampled trace."""
    t = np.asarray(trace.t, dtype=float)
    u = np.asarray(trace.U, dtype=float)
    if t.size == 0:
        raise ValueError("empty trace")
    if t.size == 1:
        return PeakMetrics(peak_times=t.copy(), peak_heights=u.copy(),
                           fwhm=0.0, area=0.0)

    times, heights = [], []
    for i in range(1, t.size - 1):
        if u[i] >= u[i - 1] and u[i] > u[i + 1]:
            denom = u[i - 1] - 2 * u[i] + u[i + 1]
            if abs(denom) > 1e-300:
                shift = 0.5 * (u[i - 1] - u[i + 1]) / denom
                shift = float(np.clip(shift, -0.5, 0.5))
                dt_loc = 0.5 * (t[i + 1] - t[i - 1])
                times.append(t[i] + shift * dt_loc)
                heights.append(u[i] - 0.25 * (u[i - 1] - u[i + 1]) * shift)
            else:
                times.append(t[i])
                heights.append(u[i])
    if not times:
        j = int(np.argmax(u))
        times, heights = [t[j]], [u[j]]

    half = max(heights) / 2.0
    above = u >= half
    idx = np.nonzero(above)[0]
    if idx.size == 0:
        fwhm = 0.0
    else:
        i0, i1 = idx[0], idx[-1]
        t_left = t[i0]
        if i0 > 0 and u[i0] != u[i0 - 1]:
            t_left = t[i0 - 1] + (half - u[i0 - 1]) / (u[i0] - u[i0 - 1]) \
                * (t[i0] - t[i0 - 1])
        t_right = t[i1]
        if i1 < t.size - 1 and u[i1 + 1] != u[i1]:
            t_right = t[i1] + (half - u[i1]) / (u[i1 + 1] - u[i1]) \
                * (t[i1 + 1] - t[i1])
        fwhm = float(t_right - t_left)

    return PeakMetrics(peak_times=np.array(times),
                       peak_heights=np.array(heights),
                       fwhm=fwhm, area=float(np.trapezoid(u, t)))
