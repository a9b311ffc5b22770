"""Synthesis of physical field configurations {U(t), detuning(t)}.

Any differentiable transformation z(t) turns a basic model into a field
configuration through U(t) = U*(z) dz/dt and delta_t(t) = dz*(z) dz/dt.
Implemented transformations: the real constant-detuning map of the unit
interval, the complex line z = (1 + i y(t))/2, and the circle
z = sqrt(a) e^(i Delta t) giving periodic amplitude or periodic detuning
models.  Traces are sampled on a caller-supplied time grid and can be
written as CSV with a JSON metadata sidecar.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .classes import ClassId, ModelParams, basic_model, enumerate_classes
from .pulseshape import CrossingPolynomial, pulse_time_origin


class RealnessError(ValueError):
    """The sampled field failed the realness tolerance."""

    def __init__(self, what, max_imag, scale):
        super().__init__(
            f"{what} is not real within tolerance: max |Im| = {max_imag:.3e} "
            f"against scale {scale:.3e}; check the u0star phase")
        self.max_imag = max_imag
        self.scale = scale


class NonMonotoneMapError(ValueError):
    """The crossing polynomial changes sign, so t(z) is not a bijection."""


_COMPLEX_LINE_CLASSES = tuple(c for c in enumerate_classes()
                              if c.two_k1 == c.two_k2)
_PERIODIC_AMPLITUDE_CLASSES = (ClassId(-1, -1, -1), ClassId(0, -2, -2))
_CONSTANT_AMPLITUDE_CLASS = ClassId(-2, 0, 0)


@dataclass
class PulseTrace:
    """Sampled field configuration with its provenance."""

    t: np.ndarray
    z: np.ndarray
    U: np.ndarray
    delta_t: np.ndarray
    metadata: dict = field(default_factory=dict)

    def normalized(self) -> "PulseTrace":
        """Copy with max |U| scaled to 1; the constant goes to metadata."""
        umax = float(np.abs(self.U).max())
        if umax == 0:
            raise ValueError("cannot normalize an identically zero pulse")
        meta = dict(self.metadata)
        meta["normalization"] = umax
        return PulseTrace(t=self.t.copy(), z=self.z.copy(), U=self.U / umax,
                          delta_t=self.delta_t.copy(), metadata=meta)

    def to_csv(self) -> str:
        lines = ["t,Re_z,Im_z,U,delta_t"]
        for k in range(self.t.size):
            lines.append(",".join(f"{v:.17g}" for v in (
                self.t[k], self.z[k].real, self.z[k].imag,
                self.U[k], self.delta_t[k])))
        return "\n".join(lines) + "\n"

    def write(self, csv_path):
        """Write the CSV trace plus a .json metadata sidecar."""
        csv_path = str(csv_path)
        with open(csv_path, "w", newline="") as fh:
            fh.write(self.to_csv())
        side = csv_path[:-4] + ".json" if csv_path.endswith(".csv") \
            else csv_path + ".json"
        meta = dict(self.metadata)
        meta.setdefault("normalization", None)  # raw traces carry no scaling
        with open(side, "w") as fh:
            json.dump(_jsonable(meta), fh, indent=2, sort_keys=True)
            fh.write("\n")
        return side


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, ClassId):
        return list(obj.doubled())
    if isinstance(obj, ModelParams):
        out = {k: _jsonable(complex(getattr(obj, k)))
               for k in ("a", "u0star", "d1", "d2", "d3")}
        out["Delta"] = float(obj.Delta)
        return out
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def _project_real(raw, what, tol=1e-9):
    raw = np.asarray(raw, dtype=complex)
    scale = float(np.abs(raw).max()) if raw.size else 0.0
    max_imag = float(np.abs(raw.imag).max()) if raw.size else 0.0
    if scale > 0 and max_imag > tol * scale:
        raise RealnessError(what, max_imag, scale)
    return raw.real.copy()


# ---------------------------------------------------------------------------
# generic sampler


def sample_generic(class_id: ClassId, params: ModelParams, z_of_t_fun,
                   dz_dt_fun, t_grid, realness_tol=1e-9) -> PulseTrace:
    """Sample U = U*(z(t)) z'(t) and delta_t = dz*(z(t)) z'(t) on a grid.

    Both outputs must be real within realness_tol relative to their peak,
    otherwise a RealnessError reports the worst imaginary residual.
    """
    model = basic_model(class_id, params)
    t = np.asarray(t_grid, dtype=float)
    z = np.array([complex(z_of_t_fun(tk)) for tk in t])
    dz = np.array([complex(dz_dt_fun(tk)) for tk in t])
    u_raw = np.array([model.ustar(zk) if dzk != 0 else 0.0
                      for zk, dzk in zip(z, dz)]) * dz
    dt_raw = np.array([model.delta_z_star(zk) if dzk != 0 else 0.0
                       for zk, dzk in zip(z, dz)]) * dz
    u = _project_real(u_raw, "U(t)", realness_tol)
    d = _project_real(dt_raw, "delta_t(t)", realness_tol)
    return PulseTrace(t=t, z=z, U=u, delta_t=d, metadata={
        "class": class_id, "params": params, "transform": "user_supplied"})


# ---------------------------------------------------------------------------
# real constant-detuning transformation


def _check_real_map(params: ModelParams, Delta):
    params.require_real_constant_detuning()
    if Delta is None:
        Delta = params.Delta
    Delta = float(Delta)
    if Delta == 0:
        raise ValueError("Delta must be nonzero")
    a = float(complex(params.a).real)
    d1, d2, d3 = (float(complex(getattr(params, n)).real)
                  for n in ("d1", "d2", "d3"))
    poly = CrossingPolynomial.from_params(a, d1, d2, d3)
    if not poly.sign_definite_on_unit_interval():
        raise NonMonotoneMapError(
            "the crossing polynomial changes sign on (0, 1); "
            "the time map is not invertible there")
    if poly(0.5) < 0:
        raise NonMonotoneMapError(
            "the crossing polynomial is negative on (0, 1); "
            "only increasing maps z(t) are supported")
    return a, d1, d2, d3, Delta, poly


def t_of_z(params: ModelParams, z, Delta=None):
    """Time at which the constant-detuning map reaches z, with z(0) = 1/2."""
    a, d1, d2, d3, Delta, _ = _check_real_map(params, Delta)
    z = np.asarray(z, dtype=float)
    if np.any(z <= 0) or np.any(z >= 1):
        raise ValueError("z must lie strictly inside (0, 1)")
    t0 = pulse_time_origin(a, d1, d2, d3, Delta)
    return t0 + (d1 * np.log(z) + d2 * np.log(1 - z)
                 + d3 * np.log(a - z)) / Delta


def z_of_t(params: ModelParams, t, Delta=None, eps_z=1e-12):
    """Invert the constant-detuning map by safeguarded bracketing + Newton.

    Times beyond the mapped range yield z clamped to [eps_z, 1-eps_z]; the
    returned mask marks clamped samples.
    """
    a, d1, d2, d3, Delta, poly = _check_real_map(params, Delta)
    t = np.asarray(t, dtype=float)
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    t0 = pulse_time_origin(a, d1, d2, d3, Delta)

    def t_at(z):
        return t0 + (d1 * math.log(z) + d2 * math.log(1 - z)
                     + d3 * math.log(a - z)) / Delta

    def dt_dz(z):
        return poly(z) / (Delta * z * (1 - z) * (a - z))

    lo, hi = eps_z, 1 - eps_z
    t_lo, t_hi = t_at(lo), t_at(hi)
    z_out = np.empty(t.size)
    clamped = np.zeros(t.size, dtype=bool)
    z_guess = 0.5
    for i, ti in enumerate(t):
        if ti <= t_lo:
            z_out[i] = lo
            clamped[i] = ti < t_lo - 1e-12
            continue
        if ti >= t_hi:
            z_out[i] = hi
            clamped[i] = ti > t_hi + 1e-12
            continue
        zl, zh = lo, hi
        z = z_guess if lo < z_guess < hi else 0.5
        for _ in range(100):
            g = t_at(z) - ti
            if g > 0:
                zh = z
            else:
                zl = z
            step = g / dt_dz(z)
            z_new = z - step
            if not (zl < z_new < zh):
                z_new = 0.5 * (zl + zh)
            if abs(z_new - z) < 1e-13:
                z = z_new
                break
            z = z_new
        z_out[i] = z
        z_guess = z
    if scalar:
        return float(z_out[0]), bool(clamped[0])
    return z_out, clamped


def sample_constant_detuning(class_id: ClassId, params: ModelParams, t_grid,
                             Delta=None, realness_tol=1e-9) -> PulseTrace:
    """Constant-detuning pulse of a class on a time grid.

    U(t) = Delta u0star z^(k1+1) (z-1)^(k2+1) (z-a)^(k3+1) / P(z) with the
    crossing polynomial P in the denominator; delta_t(t) = Delta exactly.
    """
    a, d1, d2, d3, Delta, poly = _check_real_map(params, Delta)
    t = np.asarray(t_grid, dtype=float)
    z, clamped = z_of_t(params, t, Delta)
    u0 = complex(params.u0star)
    u_raw = (Delta * u0 * z ** (class_id.k1 + 1)
             * (z - 1 + 0j) ** (class_id.k2 + 1)
             * (z - a + 0j) ** (class_id.k3 + 1) / poly(z))
    u = _project_real(u_raw, "U(t)", realness_tol)
    meta = {
        "class": class_id, "params": replace(params, Delta=Delta),
        "transform": "real_constant_detuning",
        "t0": pulse_time_origin(a, d1, d2, d3, Delta),
        "clamped": bool(clamped.any()),
    }
    return PulseTrace(t=t, z=z.astype(complex), U=u,
                      delta_t=np.full(t.size, Delta), metadata=meta)


# ---------------------------------------------------------------------------
# complex line z = (1 + i y)/2


def complex_line_params(class_id: ClassId, a0, lambda1, lambda2, lambda3, U0,
                        Delta=1.0) -> ModelParams:
    """Model parameters bound to the complex-line transformation."""
    if class_id.two_k1 != class_id.two_k2:
        admissible = ", ".join(c.to_text() for c in _COMPLEX_LINE_CLASSES)
        raise ValueError(
            f"class {class_id} cannot produce a real amplitude on the "
            f"complex line; admissible classes (k1 = k2): {admissible}")
    if a0 == 0:
        raise ValueError("a0 must be nonzero")
    power = 1 + class_id.two_k1 + class_id.k3
    u0star = (-2j) ** power * U0
    return ModelParams(a=(1 + 1j * a0) / 2,
                       u0star=u0star,
                       d1=Delta * (lambda1 - 1j * lambda2),
                       d2=Delta * (lambda1 + 1j * lambda2),
                       d3=Delta * lambda3,
                       Delta=Delta)


def _complex_line_time(a0, lambda1, lambda2, lambda3, y):
    return (lambda1 * np.log1p(np.square(y)) + 2 * lambda2 * np.arctan(y)
            + lambda3 * np.log((a0 - y) / a0))


def _complex_line_denominator(a0, lambda1, lambda2, lambda3, y):
    return 2 * (y - a0) * (lambda2 + lambda1 * y) + lambda3 * (1 + y * y)


def complex_line_inverter(a0, lambda1, lambda2, lambda3, t_min, t_max):
    """Scalar y(t) inverter of the complex-line map for t in [t_min, t_max].

    Works in the distance u = |y - a0| > 0; time grows with u on both
    allowed half-lines (t -> -inf as y -> a0, t -> +inf as |y| -> inf).
    The bracket is established once; each call runs a warm-started,
    bisection-safeguarded Newton iteration.
    """
    sign = 1.0 if a0 < 0 else -1.0  # y runs away from a0 in this direction

    def y_of_u(u):
        return a0 + sign * u

    def t_at(u):
        return float(_complex_line_time(a0, lambda1, lambda2, lambda3,
                                        y_of_u(u)))

    def slope_u(u):
        y = y_of_u(u)
        dt_dy = (_complex_line_denominator(a0, lambda1, lambda2, lambda3, y)
                 / ((1 + y * y) * (y - a0)))
        return sign * dt_dy

    u_far = 2.0 * abs(a0)  # start beyond y = 0, where t = 0
    for _ in range(200):
        if t_at(u_far) >= t_max:
            break
        u_far *= 2.0
        if u_far > 1e15:
            raise ValueError("time grid extends beyond the reachable range "
                             "of the complex-line map (large |y| side)")
    u_near = 0.5 * abs(a0)
    for _ in range(600):
        if t_at(u_near) <= t_min:
            break
        u_near *= 0.25
        if u_near < 1e-280:
            raise ValueError("time grid extends beyond the reachable range "
                             "of the complex-line map (y -> a0 side)")

    probe = np.geomspace(u_near, u_far, 512)
    tp = np.array([t_at(u) for u in probe])
    if np.any(np.diff(tp) <= 0):
        raise NonMonotoneMapError(
            "the complex-line map is not monotone for these parameters")

    state = {"u": abs(a0)}

    def y_at(ti):
        u = state["u"]
        ul, uh = u_near, u_far
        if not (ul < u < uh):
            u = math.sqrt(ul * uh)
        for _ in range(100):
            g = t_at(u) - ti
            if g > 0:
                uh = u
            else:
                ul = u
            u_new = u - g / slope_u(u)
            if not (ul < u_new < uh):
                u_new = 0.5 * (ul + uh)
            if abs(u_new - u) < 1e-14 * max(1.0, abs(u)):
                u = u_new
                break
            u = u_new
        state["u"] = u
        return y_of_u(u)

    return y_at


def _invert_complex_line_time(a0, lambda1, lambda2, lambda3, t):
    t = np.asarray(t, dtype=float)
    y_at = complex_line_inverter(a0, lambda1, lambda2, lambda3,
                                 float(t.min()), float(t.max()))
    return np.array([y_at(ti) for ti in t])


def sample_complex_line(class_id: ClassId, a0, lambda1, lambda2, lambda3, U0,
                        t_grid, Delta=1.0) -> PulseTrace:
    """Constant-detuning pulse from the transformation z = (1 + i y(t))/2.

    Real amplitudes require k1 = k2 (nine classes).  With a0 < 0 the line
    parameter runs over y in (a0, +inf) and y(0) = 0.
    """
    params = complex_line_params(class_id, a0, lambda1, lambda2, lambda3, U0,
                                 Delta)
    t = np.asarray(t_grid, dtype=float)
    y = _invert_complex_line_time(a0, lambda1, lambda2, lambda3, t)
    denom = _complex_line_denominator(a0, lambda1, lambda2, lambda3, y)
    u_raw = (U0 * (1 + y * y) ** (class_id.k1 + 1)
             * (y - a0 + 0j) ** (class_id.k3 + 1) / denom)
    u = _project_real(u_raw, "U(t)")
    meta = {
        "class": class_id, "params": params, "transform": "complex_line",
        "a0": a0, "lambda1": lambda1, "lambda2": lambda2, "lambda3": lambda3,
        "U0": U0,
    }
    return PulseTrace(t=t, z=(1 + 1j * y) / 2, U=u,
                      delta_t=np.full(t.size, float(Delta)), metadata=meta)


def complex_line_limits(class_id: ClassId, a0, lambda1, lambda2, lambda3, U0):
    """Asymptotic amplitude magnitudes (U at t -> -inf, U at t -> +inf).

    For a0 < 0 the map sends t -> -inf to y -> a0 and t -> +inf to
    y -> +inf.  The y -> a0 limit is nonzero only for k3 = -1, the y -> inf
    limit only for 2 k1 + k3 = -1.
    """
    if class_id.two_k1 != class_id.two_k2:
        raise ValueError("limits are defined for k1 = k2 classes only")
    k1 = class_id.k1
    if class_id.two_k3 == -2:
        near = U0 * (1 + a0 * a0) ** k1 / lambda3
    else:
        near = 0.0
    if 2 * class_id.two_k1 + class_id.two_k3 == -2:
        far = U0 / (2 * lambda1 + lambda3)
    else:
        far = 0.0
    return near, far


# ---------------------------------------------------------------------------
# circle transformation z = sqrt(a) exp(i Delta t)


def periodic_params(class_id: ClassId, a, U0, Delta) -> ModelParams:
    if class_id not in _PERIODIC_AMPLITUDE_CLASSES:
        names = ", ".join(c.to_text() for c in _PERIODIC_AMPLITUDE_CLASSES)
        raise ValueError(f"periodic amplitude modulation needs one of: {names}")
    if not 0 < a < 1:
        raise ValueError("the circle transformation needs 0 < a < 1")
    u0star = 1j ** (-1 - class_id.two_k3) * U0 / Delta
    return ModelParams(a=a, u0star=u0star, d1=-1j, d2=0.0, d3=0.0, Delta=Delta)


def sample_periodic(class_id: ClassId, a, U0, Delta, t_grid) -> PulseTrace:
    """Periodic amplitude modulation U = U0 (1 + a - 2 sqrt(a) cos(Delta t))^k3
    with constant detuning Delta, on the circle z = sqrt(a) e^(i Delta t)."""
    params = periodic_params(class_id, a, U0, Delta)
    t = np.asarray(t_grid, dtype=float)
    x = 1 + a - 2 * math.sqrt(a) * np.cos(Delta * t)
    u = U0 * x ** class_id.k3
    meta = {"class": class_id, "params": params,
            "transform": "periodic_exponential", "a": a, "U0": U0,
            "period": 2 * math.pi / Delta}
    return PulseTrace(t=t, z=math.sqrt(a) * np.exp(1j * Delta * t), U=u,
                      delta_t=np.full(t.size, float(Delta)), metadata=meta)


def constant_amplitude_params(class_id: ClassId, a, U0, Delta, Delta1,
                              Delta2) -> ModelParams:
    if class_id != _CONSTANT_AMPLITUDE_CLASS:
        raise ValueError("the constant-amplitude periodic model needs class "
                         + _CONSTANT_AMPLITUDE_CLASS.to_text())
    if not 0 < a < 1:
        raise ValueError("the circle transformation needs 0 < a < 1")
    return ModelParams(a=a, u0star=-1j * U0 / Delta, d1=-1j * Delta1 / Delta,
                       d2=1j * Delta2 / Delta, d3=-1j * Delta2 / Delta,
                       Delta=Delta)


def detuning_extrema(a, Delta1, Delta2):
    """Extremes of Delta1 + (1-a) Delta2 / (1 + a - 2 sqrt(a) cos), reached
    at cos = +1 and cos = -1."""
    at_plus = Delta1 + (1 - a) * Delta2 / (1 - math.sqrt(a)) ** 2
    at_minus = Delta1 + (1 - a) * Delta2 / (1 + math.sqrt(a)) ** 2
    return at_plus, at_minus


def crossing_classification(a, Delta1, Delta2, tol=1e-12) -> str:
    """'crossing', 'glancing' or 'non-crossing' from the detuning extremes."""
    hi, lo = detuning_extrema(a, Delta1, Delta2)
    if hi < lo:
        hi, lo = lo, hi
    scale = max(abs(hi), abs(lo), 1.0)
    if abs(lo) <= tol * scale or abs(hi) <= tol * scale:
        return "glancing"
    if lo < 0 < hi:
        return "crossing"
    return "non-crossing"


def sample_constant_amplitude(class_id: ClassId, a, U0, Delta, Delta1, Delta2,
                              t_grid) -> PulseTrace:
    """Constant amplitude U0 with periodically modulated detuning."""
    params = constant_amplitude_params(class_id, a, U0, Delta, Delta1, Delta2)
    t = np.asarray(t_grid, dtype=float)
    x = 1 + a - 2 * math.sqrt(a) * np.cos(Delta * t)
    dt = Delta1 + (1 - a) * Delta2 / x
    meta = {"class": class_id, "params": params,
            "transform": "periodic_exponential", "a": a, "U0": U0,
            "Delta1": Delta1, "Delta2": Delta2,
            "period": 2 * math.pi / Delta,
            "crossing": crossing_classification(a, Delta1, Delta2),
            "detuning_extrema": detuning_extrema(a, Delta1, Delta2)}
    return PulseTrace(t=t, z=math.sqrt(a) * np.exp(1j * Delta * t),
                      U=np.full(t.size, float(U0)), delta_t=dt, metadata=meta)


# ---------------------------------------------------------------------------
# transform specification (dispatch used by verification and the CLI)


@dataclass
class TransformSpec:
    """Which transformation generates the field, and its parameters."""

    kind: str
    Delta: float = 1.0
    a0: float = None
    lambda1: float = None
    lambda2: float = None
    lambda3: float = None
    U0: float = None
    Delta1: float = None
    Delta2: float = None
    z_of_t: object = None
    dz_dt: object = None
    t_window: tuple = None  # verification window for user_supplied

    _KINDS = ("real_constant_detuning", "complex_line",
              "periodic_exponential", "user_supplied")

    def __post_init__(self):
        if self.kind not in self._KINDS:
            raise ValueError(f"unknown transform kind {self.kind!r}; "
                             f"expected one of {self._KINDS}")
        if self.kind == "complex_line":
            for name in ("a0", "lambda1", "lambda2", "lambda3", "U0"):
                if getattr(self, name) is None:
                    raise ValueError(f"complex_line transform needs {name}")
        if self.kind == "user_supplied" and (self.z_of_t is None
                                             or self.dz_dt is None):
            raise ValueError("user_supplied transform needs z_of_t and dz_dt")

    def model_params(self, class_id: ClassId, params: ModelParams = None
                     ) -> ModelParams:
        """Parameters implied by the transform bindings (or passed through)."""
        if self.kind == "complex_line":
            return complex_line_params(class_id, self.a0, self.lambda1,
                                       self.lambda2, self.lambda3, self.U0,
                                       self.Delta)
        if self.kind == "periodic_exponential":
            if params is None:
                raise ValueError("periodic transforms need params carrying a")
            a = float(complex(params.a).real)
            if class_id == _CONSTANT_AMPLITUDE_CLASS:
                return constant_amplitude_params(
                    class_id, a, self.U0 if self.U0 is not None else 1.0,
                    self.Delta, self.Delta1 or 0.0, self.Delta2 or 0.0)
            return periodic_params(class_id, a,
                                   self.U0 if self.U0 is not None else 1.0,
                                   self.Delta)
        if params is None:
            raise ValueError(f"{self.kind} transform needs explicit params")
        return params

    def sample(self, class_id: ClassId, params: ModelParams, t_grid
               ) -> PulseTrace:
        if self.kind == "real_constant_detuning":
            return sample_constant_detuning(class_id, params, t_grid,
                                            Delta=self.Delta)
        if self.kind == "complex_line":
            return sample_complex_line(class_id, self.a0, self.lambda1,
                                       self.lambda2, self.lambda3, self.U0,
                                       t_grid, Delta=self.Delta)
        if self.kind == "periodic_exponential":
            a = float(complex(params.a).real)
            if class_id == _CONSTANT_AMPLITUDE_CLASS:
                return sample_constant_amplitude(
                    class_id, a, self.U0 if self.U0 is not None else 1.0,
                    self.Delta, self.Delta1 or 0.0, self.Delta2 or 0.0, t_grid)
            return sample_periodic(class_id, a,
                                   self.U0 if self.U0 is not None else 1.0,
                                   self.Delta, t_grid)
        return sample_generic(class_id, params, self.z_of_t, self.dz_dt,
                              t_grid)
