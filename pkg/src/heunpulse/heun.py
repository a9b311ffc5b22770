"""Numerical evaluation of the general Heun function.

The general Heun equation has four regular singular points {0, 1, a, inf}:

    u'' + (gamma/z + delta/(z-1) + epsilon/(z-a)) u'
        + (alpha*beta*z - q) / (z (z-1) (z-a)) u = 0,

with the exponent-sum constraint 1 + alpha + beta = gamma + delta + epsilon.
This module provides the Frobenius power series about z = 0 (three-term
recurrence), analytic continuation of the series by integrating the
equation along singularity-avoiding paths, an expansion in Gauss
hypergeometric functions, and termination (closed-form) detection for the
accessory parameter q.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P

from . import rk

_SERIES_CAP = 10_000


class ResonantRecurrenceError(ValueError):
    """The recurrence coefficient R_n vanished; no plain power series exists."""

    def __init__(self, n, detail=""):
        super().__init__(f"recurrence is resonant at n={n}"
                         + (f" ({detail})" if detail else ""))
        self.n = n


class SeriesConvergenceError(RuntimeError):
    pass


class PathError(RuntimeError):
    pass


@dataclass(frozen=True)
class HeunParams:
    """Parameters (a, q; alpha, beta; gamma, delta, epsilon) of the equation."""

    a: complex
    q: complex
    alpha: complex
    beta: complex
    gamma: complex
    delta: complex
    epsilon: complex

    def __post_init__(self):
        for name in ("a", "q", "alpha", "beta", "gamma", "delta", "epsilon"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        if abs(self.a) < 1e-12 or abs(self.a - 1) < 1e-12:
            raise ValueError(f"a={self.a}: singular points must be distinct")
        res = self.fuchsian_residual
        scale = 1 + max(abs(self.alpha) + abs(self.beta),
                        abs(self.gamma) + abs(self.delta) + abs(self.epsilon))
        if res > 1e-12 * scale:
            raise ValueError(
                f"exponent-sum constraint violated: |1+alpha+beta-gamma-delta-"
                f"epsilon| = {res:.3e} (scale {scale:.3e})")

    @property
    def fuchsian_residual(self) -> float:
        return abs(1 + self.alpha + self.beta
                   - self.gamma - self.delta - self.epsilon)

    @property
    def series_radius(self) -> float:
        """Convergence radius of the Frobenius series about z = 0."""
        return min(abs(self.a), 1.0)

    def mu_values(self) -> tuple:
        """The two admissible local exponents at z = 0."""
        return (0.0 + 0.0j, 1 - self.gamma)

    def to_json_dict(self) -> dict:
        return {name: [getattr(self, name).real, getattr(self, name).imag]
                for name in ("a", "q", "alpha", "beta", "gamma", "delta",
                             "epsilon")}

    @classmethod
    def from_json_dict(cls, d: dict) -> "HeunParams":
        return cls(**{k: complex(v[0], v[1]) for k, v in d.items()})


@dataclass
class SeriesSolution:
    """A truncated Frobenius solution z^mu * sum_n c_n z^n with c_0 = 1."""

    mu: complex
    coefficients: np.ndarray
    truncation_error_estimate: float
    max_recurrence_residual: float

    def coefficients_csv(self) -> str:
        lines = ["n,re_c,im_c"]
        for n, c in enumerate(self.coefficients):
            lines.append(f"{n},{c.real:.17g},{c.imag:.17g}")
        return "\n".join(lines) + "\n"


def _validate_mu(hp: HeunParams, mu) -> complex:
    mu = complex(mu)
    for cand in hp.mu_values():
        if abs(mu - cand) <= 1e-9 * (1 + abs(cand)):
            return complex(cand)
    raise ValueError(f"mu={mu} is not a local exponent at z=0; "
                     f"admissible values are 0 and 1-gamma = {1 - hp.gamma}")


def _recurrence_rqp(hp: HeunParams, mu: complex, n: int):
    """Coefficients R_n, Q_n, P_n of R_n c_n + Q_(n-1) c_(n-1) + P_(n-2) c_(n-2) = 0."""
    a, q = hp.a, hp.q
    g, d, e = hp.gamma, hp.delta, hp.epsilon
    s = mu + n
    r = a * s * (s - 1 + g)
    # Standard expanded form; the grouped form below must agree identically.
    q_std = -q - s * ((s - 1 + g) * (1 + a) + a * d + e)
    q_grouped = -q - s * ((s - 1 + g + d + e) * (1 + a) - a * e - d)
    if abs(q_std - q_grouped) > 1e-10 * (1 + abs(q_std)):
        raise AssertionError("recurrence coefficient forms disagree: "
                             f"{q_std} vs {q_grouped} at n={n}")
    p = (s + hp.alpha) * (s + hp.beta)
    return r, q_std, p


def _check_resonance(hp: HeunParams, mu: complex, n: int):
    s = mu + n
    if abs(s) < 1e-10 * (1 + n):
        raise ResonantRecurrenceError(n, "mu + n = 0")
    if abs(s - 1 + hp.gamma) < 1e-10 * (1 + n + abs(hp.gamma)):
        raise ResonantRecurrenceError(n, "mu + n - 1 + gamma = 0")


def _raw_coefficients(hp: HeunParams, mu: complex, N: int) -> np.ndarray:
    c = np.zeros(N + 1, dtype=complex)
    c[0] = 1.0
    c_nm2 = 0.0 + 0.0j
    for n in range(1, N + 1):
        _check_resonance(hp, mu, n)
        r_n, _, _ = _recurrence_rqp(hp, mu, n)
        _, q_nm1, _ = _recurrence_rqp(hp, mu, n - 1)
        _, _, p_nm2 = _recurrence_rqp(hp, mu, n - 2)
        c[n] = -(q_nm1 * c[n - 1] + p_nm2 * c_nm2) / r_n
        c_nm2 = c[n - 1]
    return c


def frobenius_coefficients(hp: HeunParams, mu, N: int) -> SeriesSolution:
    """First N+1 Frobenius coefficients about z = 0 for the exponent mu.

    c_0 = 1 with the convention c_(-1) = c_(-2) = 0; each c_n follows from
    the three-term recurrence by forward recursion.  Raises
    ResonantRecurrenceError when some R_n vanishes (gamma an unsuitable
    integer) and ValueError for a mu that is not a local exponent.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    mu = _validate_mu(hp, mu)
    c = _raw_coefficients(hp, mu, N)

    max_resid = 0.0
    for n in range(1, N + 1):
        r_n, _, _ = _recurrence_rqp(hp, mu, n)
        _, q_nm1, _ = _recurrence_rqp(hp, mu, n - 1)
        _, _, p_nm2 = _recurrence_rqp(hp, mu, n - 2)
        terms = (r_n * c[n], q_nm1 * c[n - 1],
                 p_nm2 * (c[n - 2] if n >= 2 else 0.0))
        resid = abs(sum(terms))
        scale = max(abs(t) for t in terms)
        if scale > 0:
            max_resid = max(max_resid, resid / scale)

    cmax = np.abs(c).max()
    tail = abs(c[-1]) / cmax if cmax > 0 else 0.0
    return SeriesSolution(mu=mu, coefficients=c,
                          truncation_error_estimate=tail,
                          max_recurrence_residual=max_resid)


def _adaptive_coefficients(hp: HeunParams, mu: complex, z_abs: float):
    """Grow the coefficient list until the terms at |z| = z_abs are negligible.

    Stops once three consecutive terms fall below 1e-15 of the partial sum;
    hard cap at 10^4 terms.  Returns (coefficients, relative tail estimate).
    """
    radius = hp.series_radius
    if z_abs >= radius * (1 - 1e-12):
        raise SeriesConvergenceError(
            f"|z| = {z_abs:.6g} is not inside the convergence radius "
            f"{radius:.6g} of the power series")
    c = [1.0 + 0.0j]
    partial = 1.0 + 0.0j
    small_run = 0
    zp = 1.0
    n = 0
    while small_run < 3 and n < _SERIES_CAP:
        n += 1
        _check_resonance(hp, mu, n)
        r_n, _, _ = _recurrence_rqp(hp, mu, n)
        _, q_nm1, _ = _recurrence_rqp(hp, mu, n - 1)
        _, _, p_nm2 = _recurrence_rqp(hp, mu, n - 2)
        cn = -(q_nm1 * c[n - 1] + (p_nm2 * c[n - 2] if n >= 2 else 0.0)) / r_n
        c.append(cn)
        zp *= z_abs
        partial += cn * zp
        if abs(cn) * zp < 1e-15 * max(abs(partial), 1e-300):
            small_run += 1
        else:
            small_run = 0
    rho = z_abs / radius
    tail = (abs(c[-1]) * zp * rho / (1 - rho)) / max(abs(partial), 1e-300)
    if small_run < 3 and tail > 1e-12:
        raise SeriesConvergenceError(
            f"series did not reach the tail target within {_SERIES_CAP} terms "
            f"(estimated relative tail {tail:.3e})")
    return np.array(c), tail


def series_eval(coefficients: np.ndarray, mu: complex, z):
    """Evaluate z^mu * sum c_n z^n and its z-derivative at points z."""
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    s = P.polyval(z, coefficients)
    ds = P.polyval(z, P.polyder(coefficients))
    if mu == 0:
        h, dh = s, ds
    else:
        pref = z ** mu
        h = pref * s
        dh = pref * (ds + mu * s / z)
    return (h[0], dh[0]) if scalar else (h, dh)


def heun_series(hp: HeunParams, mu, z_points):
    """Series values and derivatives at an array of points inside the radius."""
    mu = _validate_mu(hp, mu)
    z = np.atleast_1d(np.asarray(z_points, dtype=complex))
    coeffs, tail = _adaptive_coefficients(hp, mu, float(np.abs(z).max()))
    h, dh = series_eval(coeffs, mu, z)
    return h, dh, tail


# ---------------------------------------------------------------------------
# analytic continuation


def _heun_second_derivative(hp: HeunParams, z, u, uz):
    pz = hp.gamma / z + hp.delta / (z - 1) + hp.epsilon / (z - hp.a)
    qz = (hp.alpha * hp.beta * z - hp.q) / (z * (z - 1) * (z - hp.a))
    return -pz * uz - qz * u


def continue_parametric(hp: HeunParams, u0, uz0, zfun, dzfun, s_span,
                        s_eval=None, rtol=1e-11):
    """Carry (u, du/dz) along the path s -> zfun(s) by integrating the equation.

    Returns (u_values, uz_values) at s_eval (or at the endpoint only).
    """
    def f(s, y):
        z = zfun(s)
        dz = dzfun(s)
        return np.array([y[1] * dz,
                         _heun_second_derivative(hp, z, y[0], y[1]) * dz])

    y0 = np.array([complex(u0), complex(uz0)])
    _, ys, _ = rk.integrate(f, s_span, y0, rtol=rtol, atol=1e-14,
                            t_eval=s_eval)
    return ys[:, 0], ys[:, 1]


def _segment_point_distance(p, z0, z1):
    d = z1 - z0
    L2 = abs(d) ** 2
    if L2 == 0:
        return abs(p - z0)
    t = ((p - z0) * d.conjugate()).real / L2
    t = min(1.0, max(0.0, t))
    return abs(p - (z0 + t * d))


def path_clearance(points, hp: HeunParams) -> float:
    """Smallest distance from the polyline to any finite singular point."""
    sings = (0.0, 1.0, hp.a)
    return min(_segment_point_distance(s, points[i], points[i + 1])
               for i in range(len(points) - 1) for s in sings)


def _min_singularity_gap(hp: HeunParams) -> float:
    return min(1.0, abs(hp.a), abs(hp.a - 1))


def continue_polyline(hp: HeunParams, mu, waypoints, rtol=1e-11,
                      required_clearance=None):
    """Series-seed at waypoints[0] and continue to waypoints[-1].

    The polyline must keep the required clearance from the singular points
    {0, 1, a}; by default one tenth of their smallest pairwise gap, relaxed
    to the endpoint clearances when an endpoint itself sits closer.
    Returns (u, du/dz) at the final waypoint.
    """
    mu = _validate_mu(hp, mu)
    pts = [complex(w) for w in waypoints]
    sings = (0.0, 1.0, hp.a)
    if required_clearance is None:
        required_clearance = min(
            0.1 * _min_singularity_gap(hp),
            0.98 * min(abs(pts[0] - s) for s in sings),
            0.98 * min(abs(pts[-1] - s) for s in sings))
    if path_clearance(pts, hp) < required_clearance:
        raise PathError("continuation path passes too close to a singular point")

    coeffs, _ = _adaptive_coefficients(hp, mu, abs(pts[0]))
    u, uz = series_eval(coeffs, mu, pts[0])
    for z0, z1 in zip(pts[:-1], pts[1:]):
        dz = z1 - z0
        us, uzs = continue_parametric(
            hp, u, uz, lambda s, z0=z0, dz=dz: z0 + s * dz,
            lambda s, dz=dz: dz, (0.0, 1.0), rtol=rtol)
        u, uz = us[-1], uzs[-1]
    return u, uz


def _default_continuation_path(hp: HeunParams, z: complex):
    if min(abs(z), abs(z - 1), abs(z - hp.a)) < 1e-10 * max(1.0, abs(hp.a)):
        raise PathError(f"z={z} is a singular point of the equation")
    radius = hp.series_radius
    direction = z / abs(z) if abs(z) > 0 else 1.0
    seed = 0.45 * radius * direction
    mid = 0.5 * (seed + z)
    span = z - seed
    perp = 1j * span / abs(span) if abs(span) > 0 else 1j
    offset = 0.6 * abs(span) + 0.2 * _min_singularity_gap(hp)
    sings = (0.0, 1.0, hp.a)
    floor = min(0.1 * _min_singularity_gap(hp),
                0.98 * min(abs(z - s) for s in sings),
                0.98 * min(abs(seed - s) for s in sings))
    for pts in ([seed, z],
                [seed, mid + offset * perp, z],
                [seed, mid - offset * perp, z]):
        if path_clearance(pts, hp) >= floor:
            return pts
    raise PathError(f"no singularity-avoiding path from {seed} to {z}")


def heun_value_and_derivative(hp: HeunParams, mu, z, continuation=True,
                              series_fraction=0.9, rtol=1e-11):
    """H and dH/dz at one point; series inside 0.9 of the radius, else
    continuation along a straight or bent path seeded from the series."""
    mu = _validate_mu(hp, mu)
    z = complex(z)
    radius = hp.series_radius
    if abs(z) <= series_fraction * radius:
        coeffs, _ = _adaptive_coefficients(hp, mu, abs(z))
        return series_eval(coeffs, mu, z)
    if not continuation:
        raise SeriesConvergenceError(
            f"|z| = {abs(z):.6g} exceeds {series_fraction:.2f} of the series "
            f"radius {radius:.6g} and continuation is disabled")
    path = _default_continuation_path(hp, z)
    return continue_polyline(hp, mu, path, rtol=rtol)


def heun_value(hp: HeunParams, mu, z, **kwargs) -> complex:
    """The general Heun function H(a, q; alpha, beta; gamma, delta; z)
    normalized to H(0) = 1 on the branch z^mu, mu in {0, 1-gamma}."""
    return heun_value_and_derivative(hp, mu, z, **kwargs)[0]


# ---------------------------------------------------------------------------
# Gauss hypergeometric series


def gauss_2f1(alpha, beta, gamma, z, tail_rel=1e-12, max_terms=100_000) -> complex:
    """2F1(alpha, beta; gamma; z) by direct power series, |z| < 1.

    The running term is bounded by a geometric tail; summation stops once
    the estimated tail drops below tail_rel relative to the partial sum.
    """
    alpha, beta, gamma, z = complex(alpha), complex(beta), complex(gamma), complex(z)
    if abs(gamma.imag) < 1e-13 and abs(gamma.real - round(gamma.real)) < 1e-13 \
            and round(gamma.real) <= 0:
        raise ValueError(f"gamma={gamma} is a nonpositive integer")
    az = abs(z)
    if az >= 1:
        raise ValueError(f"|z| = {az:.6g} is outside the series domain |z| < 1")
    total = 1.0 + 0.0j
    term = 1.0 + 0.0j
    for k in range(max_terms):
        term *= (alpha + k) * (beta + k) / ((gamma + k) * (k + 1)) * z
        total += term
        if term == 0:
            return total
        tail = abs(term) * az / (1 - az)
        if k > 3 and tail < tail_rel * max(abs(total), 1e-300):
            return total
    raise SeriesConvergenceError(
        f"hypergeometric series did not converge within {max_terms} terms")


# ---------------------------------------------------------------------------
# expansion in Gauss hypergeometric functions


def _hyper_rqp(hp: HeunParams, gamma0: complex, n: int):
    a, q = hp.a, hp.q
    g, e = hp.gamma, hp.epsilon
    al, be = hp.alpha, hp.beta
    r = a / (gamma0 - n) * (g - gamma0 + n) * (al - gamma0 + n) * (be - gamma0 + n)
    qq = ((1 - a) * (e + g - gamma0 + n) * (gamma0 - n - 1)
          + a * (g - gamma0 + n) * (al + be - gamma0 + n) + al * be * a - q)
    p = (a - 1) * (e + g - gamma0 + n) * (gamma0 - n - 1)
    return r, qq, p


def _validate_gamma0(hp: HeunParams, gamma0) -> complex:
    gamma0 = complex(gamma0)
    for cand in (hp.gamma, hp.alpha, hp.beta):
        if abs(gamma0 - cand) <= 1e-9 * (1 + abs(cand)):
            return complex(cand)
    raise ValueError(
        "gamma0 must equal gamma, alpha or beta for the expansion in Gauss "
        f"functions to terminate on the left; got {gamma0}")


def hypergeometric_termination_degree(hp: HeunParams, gamma0):
    """Degree N at which the expansion can terminate on the right, or None.

    Termination requires epsilon, epsilon+gamma-alpha or epsilon+gamma-beta
    to equal -N (for gamma0 = gamma, alpha, beta respectively).
    """
    gamma0 = _validate_gamma0(hp, gamma0)
    if abs(gamma0 - hp.gamma) <= 1e-9 * (1 + abs(hp.gamma)):
        probe = hp.epsilon
    elif abs(gamma0 - hp.alpha) <= 1e-9 * (1 + abs(hp.alpha)):
        probe = hp.epsilon + hp.gamma - hp.alpha
    else:
        probe = hp.epsilon + hp.gamma - hp.beta
    if abs(probe.imag) < 1e-9:
        n = -round(probe.real)
        if n >= 0 and abs(probe + n) < 1e-9 * (1 + n):
            return n
    return None


@dataclass
class HypergeometricExpansion:
    gamma0: complex
    coefficients: np.ndarray
    termination_degree: object
    max_recurrence_residual: float


def hypergeometric_expansion_coeffs(hp: HeunParams, gamma0, N: int
                                    ) -> HypergeometricExpansion:
    """Coefficients c_0..c_N of u = sum_n c_n 2F1(alpha, beta; gamma0-n; z)."""
    gamma0 = _validate_gamma0(hp, gamma0)
    for n in range(N + 2):
        g0n = gamma0 - n
        if abs(g0n.imag) < 1e-13 and abs(g0n.real - round(g0n.real)) < 1e-13 \
                and round(g0n.real) <= 0:
            raise ValueError(f"gamma0 - n = {g0n} hits a nonpositive integer "
                             f"at n={n}; the Gauss functions are undefined")
    c = np.zeros(N + 1, dtype=complex)
    c[0] = 1.0
    max_resid = 0.0
    for n in range(1, N + 1):
        r_n, _, _ = _hyper_rqp(hp, gamma0, n)
        if abs(r_n) < 1e-12 * (1 + abs(hp.a)) * (1 + n) ** 2:
            raise ResonantRecurrenceError(n, "expansion recurrence R_n = 0")
        _, q_nm1, _ = _hyper_rqp(hp, gamma0, n - 1)
        _, _, p_nm2 = _hyper_rqp(hp, gamma0, n - 2)
        c[n] = -(q_nm1 * c[n - 1] + (p_nm2 * c[n - 2] if n >= 2 else 0.0)) / r_n
        terms = (r_n * c[n], q_nm1 * c[n - 1],
                 p_nm2 * (c[n - 2] if n >= 2 else 0.0))
        scale = max(abs(t) for t in terms)
        if scale > 0:
            max_resid = max(max_resid, abs(sum(terms)) / scale)
    return HypergeometricExpansion(
        gamma0=gamma0, coefficients=c,
        termination_degree=hypergeometric_termination_degree(hp, gamma0),
        max_recurrence_residual=max_resid)


def hypergeometric_expansion_value(hp: HeunParams, gamma0, z, N: int) -> complex:
    """Partial sum sum_{n<=N} c_n 2F1(alpha, beta; gamma0-n; z)."""
    exp_ = hypergeometric_expansion_coeffs(hp, gamma0, N)
    z = complex(z)
    return sum(cn * gauss_2f1(hp.alpha, hp.beta, exp_.gamma0 - n, z)
               for n, cn in enumerate(exp_.coefficients))


# ---------------------------------------------------------------------------
# termination candidates for the accessory parameter


def polynomial_roots(coeffs, tol=1e-12, max_iter=200) -> np.ndarray:
    """All complex roots of a polynomial (ascending coefficients).

    Simultaneous Aberth-Ehrlich iteration on the monic polynomial followed
    by a Newton polish of each root.
    """
    c = np.asarray(coeffs, dtype=complex)
    cmax = np.abs(c).max()
    if cmax == 0:
        raise ValueError("zero polynomial")
    while len(c) > 1 and abs(c[-1]) < 1e-14 * cmax:
        c = c[:-1]
    deg = len(c) - 1
    if deg == 0:
        return np.array([], dtype=complex)
    if deg == 1:
        return np.array([-c[0] / c[1]])
    c = c / c[-1]
    dc = P.polyder(c)

    bound = 1 + np.abs(c[:-1]).max()
    k = np.arange(deg)
    roots = 0.7 * bound * np.exp(2j * np.pi * (k / deg) + 0.4j)
    for _ in range(max_iter):
        pv = P.polyval(roots, c)
        dv = P.polyval(roots, dc)
        newton = np.where(dv != 0, pv / dv, 0.0)
        corr = np.empty(deg, dtype=complex)
        for i in range(deg):
            others = np.delete(roots, i)
            sigma = np.sum(1.0 / (roots[i] - others))
            denom = 1 - newton[i] * sigma
            corr[i] = newton[i] / denom if denom != 0 else newton[i]
        roots = roots - corr
        if np.all(np.abs(corr) <= tol * (1 + np.abs(roots))):
            break
    for _ in range(3):
        pv = P.polyval(roots, c)
        dv = P.polyval(roots, dc)
        step = np.where(np.abs(dv) > 0, pv / dv, 0.0)
        roots = roots - step
    return roots


def _poly_mul_linear(poly, const):
    """(const - q) * poly(q) in ascending-q coefficients."""
    out = np.zeros(len(poly) + 1, dtype=complex)
    out[:-1] += const * poly
    out[1:] -= poly
    return out


def q_termination_candidates(hp: HeunParams, expansion: str, N: int,
                             mu=0.0, gamma0=None) -> np.ndarray:
    """Accessory-parameter values that terminate the chosen expansion at n = N.

    Running the recurrence with q symbolic makes c_n a degree-n polynomial
    in q; imposing Q_N c_N + P_(N-1) c_(N-1) = 0 yields a polynomial of
    degree N+1 whose roots are returned (the q field of hp is ignored).
    Every root is re-verified by direct recurrence: c_(N+1) and c_(N+2)
    must vanish to 1e-10 of the largest coefficient.
    """
    if N < 0:
        raise ValueError("N must be >= 0")

    if expansion == "power":
        mu = _validate_mu(hp, mu)
        tol = 1e-8 * (1 + abs(hp.alpha) + abs(hp.beta) + N)
        if min(abs(mu + hp.alpha + N), abs(mu + hp.beta + N)) > tol:
            raise ValueError(
                "right-side termination of the power series needs mu+alpha "
                f"or mu+beta equal to -{N}; got alpha={hp.alpha}, beta={hp.beta}")

        def rqp_of(n):
            a = hp.a
            s = mu + n
            r = a * s * (s - 1 + hp.gamma)
            q_const = -s * ((s - 1 + hp.gamma) * (1 + a) + a * hp.delta + hp.epsilon)
            p = (s + hp.alpha) * (s + hp.beta)
            return r, q_const, p
    elif expansion == "hypergeometric":
        gamma0 = _validate_gamma0(hp, gamma0 if gamma0 is not None else hp.gamma)
        nterm = hypergeometric_termination_degree(hp, gamma0)
        if nterm != N:
            raise ValueError(
                "right-side termination of the Gauss-function expansion at "
                f"N={N} requires the matching parameter combination to equal "
                f"-{N}; structural degree is {nterm}")

        def rqp_of(n):
            r, _, p = _hyper_rqp(hp, gamma0, n)
            q_const = ((1 - hp.a) * (hp.epsilon + hp.gamma - gamma0 + n)
                       * (gamma0 - n - 1)
                       + hp.a * (hp.gamma - gamma0 + n)
                       * (hp.alpha + hp.beta - gamma0 + n)
                       + hp.alpha * hp.beta * hp.a)
            return r, q_const, p
    else:
        raise ValueError(f"unknown expansion kind {expansion!r}")

    # c_n(q), ascending powers of q
    polys = [np.array([1.0 + 0.0j])]
    for n in range(1, N + 1):
        r_n, _, _ = rqp_of(n)
        if abs(r_n) < 1e-13 * (1 + abs(hp.a)) * (1 + n) ** 2:
            raise ResonantRecurrenceError(n)
        _, qc_nm1, _ = rqp_of(n - 1)
        _, _, p_nm2 = rqp_of(n - 2)
        term = _poly_mul_linear(polys[n - 1], qc_nm1)
        if n >= 2:
            m = len(polys[n - 2])
            term[:m] += p_nm2 * polys[n - 2]
        polys.append(-term / r_n)

    _, qc_N, _ = rqp_of(N)
    final = _poly_mul_linear(polys[N], qc_N)
    if N >= 1:
        _, _, p_nm1 = rqp_of(N - 1)
        final[:len(polys[N - 1])] += p_nm1 * polys[N - 1]

    roots = polynomial_roots(final)
    roots = np.array(sorted(roots, key=lambda r: (round(r.real, 10),
                                                  round(r.imag, 10))))

    for root in roots:
        hpq = dataclasses.replace(hp, q=root)
        if expansion == "power":
            c = _raw_coefficients(hpq, mu, N + 2)
        else:
            c = np.zeros(N + 3, dtype=complex)
            c[0] = 1.0
            for n in range(1, N + 3):
                r_n, _, _ = _hyper_rqp(hpq, gamma0, n)
                _, qq_nm1, _ = _hyper_rqp(hpq, gamma0, n - 1)
                _, _, p_nm2 = _hyper_rqp(hpq, gamma0, n - 2)
                c[n] = -(qq_nm1 * c[n - 1]
                         + (p_nm2 * c[n - 2] if n >= 2 else 0.0)) / r_n
        scale = np.abs(c[:N + 1]).max()
        if max(abs(c[N + 1]), abs(c[N + 2])) > 1e-10 * scale:
            raise AssertionError(
                f"termination candidate q={root} failed re-verification: "
                f"|c_(N+1)|={abs(c[N+1]):.3e}, |c_(N+2)|={abs(c[N+2]):.3e}")
    return roots
