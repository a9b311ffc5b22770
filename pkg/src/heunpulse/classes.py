"""Census of the solvable two-state model classes.

A class is an exponent triple (k1, k2, k3) for the amplitude-modulation
function U*(z) = U0* z^k1 (z-1)^k2 (z-a)^k3.  Admissible triples are those
for which U0*^2 z^(2k1+2) (z-1)^(2k2+2) (z-a)^(2k3+2) is a polynomial of
degree at most four, i.e. every k_i is a half-integer >= -1 and
k1 + k2 + k3 <= -1.  Exactly 35 triples qualify.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


class SingularPointError(ValueError):
    """Raised when a basic-model function is evaluated at z in {0, 1, a}."""


# Doubled exponents 2*k admit exact integer arithmetic; k in {-1,-1/2,0,1/2,1}.
_DOUBLED_RANGE = (-2, -1, 0, 1, 2)


def _half_to_text(two_k: int) -> str:
    return str(Fraction(two_k, 2))


def _parse_half(token: str) -> int:
    token = token.strip()
    value = Fraction(token)
    if value.denominator not in (1, 2):
        raise ValueError(f"not a half-integer: {token!r}")
    return int(value * 2)


@dataclass(frozen=True)
class ClassId:
    """One admissible exponent triple, stored as doubled integers."""

    two_k1: int
    two_k2: int
    two_k3: int

    def __post_init__(self):
        for name in ("two_k1", "two_k2", "two_k3"):
            v = getattr(self, name)
            if not isinstance(v, int) or v not in _DOUBLED_RANGE:
                raise ValueError(f"{name}={v!r}: doubled exponent must be an "
                                 f"integer in {_DOUBLED_RANGE}")
        if self.two_k1 + self.two_k2 + self.two_k3 > -2:
            raise ValueError(f"k1+k2+k3 = {(self.two_k1+self.two_k2+self.two_k3)/2} "
                             "exceeds -1; triple is not solvable")

    # Exact: half-integers are exact binary floats.
    @property
    def k1(self) -> float:
        return self.two_k1 / 2

    @property
    def k2(self) -> float:
        return self.two_k2 / 2

    @property
    def k3(self) -> float:
        return self.two_k3 / 2

    @classmethod
    def from_k(cls, k1, k2, k3) -> "ClassId":
        doubled = []
        for k in (k1, k2, k3):
            two_k = 2 * Fraction(k)
            if two_k.denominator != 1:
                raise ValueError(f"k={k!r} is not a half-integer")
            doubled.append(int(two_k))
        return cls(*doubled)

    @classmethod
    def parse(cls, text: str) -> "ClassId":
        """Parse "k1,k2,k3" with halves as fractions, e.g. "-1/2,0,-1"."""
        parts = text.split(",")
        if len(parts) != 3:
            raise ValueError(f"expected three comma-separated exponents, got {text!r}")
        return cls(*(_parse_half(p) for p in parts))

    def to_text(self) -> str:
        return ",".join(_half_to_text(t) for t in
                        (self.two_k1, self.two_k2, self.two_k3))

    def doubled(self) -> tuple:
        """Doubled-integer triple, the JSON wire form."""
        return (self.two_k1, self.two_k2, self.two_k3)

    def __str__(self):
        return self.to_text()


def enumerate_classes() -> list:
    """All 35 admissible classes in a fixed order.

    Order: descending k3, then ascending (k1, k2) lexicographically.
    """
    out = []
    for two_k3 in sorted(_DOUBLED_RANGE, reverse=True):
        for two_k1 in _DOUBLED_RANGE:
            for two_k2 in _DOUBLED_RANGE:
                if two_k1 + two_k2 + two_k3 <= -2:
                    out.append(ClassId(two_k1, two_k2, two_k3))
    return out


def phi_exponents_trivial(class_id: ClassId) -> bool:
    """True when the pre-factor phi can be taken identically 1.

    The exponent quadratics admit the all-zero root only when no k_i
    equals -1; exactly four classes qualify.
    """
    return (class_id.two_k1 != -2 and class_id.two_k2 != -2
            and class_id.two_k3 != -2)


def finite_pulse_area(class_id: ClassId) -> bool:
    """True when constant-detuning pulses of this class vanish at t -> +-inf.

    Requires k1 != -1 and k2 != -1; ten classes qualify.
    """
    return class_id.two_k1 != -2 and class_id.two_k2 != -2


@dataclass(frozen=True)
class ModelParams:
    """The five free parameters of a class, plus the detuning scale.

    a, u0star and d1..d3 are in general complex; Delta is the real
    constant-detuning scale used by the real transformation of the
    independent variable.
    """

    a: complex
    u0star: complex
    d1: complex = 0.0
    d2: complex = 0.0
    d3: complex = 0.0
    Delta: float = 1.0

    def __post_init__(self):
        a = complex(self.a)
        if abs(a) < 1e-12 or abs(a - 1) < 1e-12:
            raise ValueError(f"a={self.a!r}: singular points must stay distinct "
                             "(a not in {0, 1})")

    def require_real_constant_detuning(self):
        """Check the extra constraints of the real z(t) sampling: a real > 1,
        d1..d3 real."""
        a = complex(self.a)
        if abs(a.imag) > 1e-14 or a.real <= 1:
            raise ValueError(f"a={self.a!r}: real constant-detuning sampling "
                             "needs real a > 1")
        for name in ("d1", "d2", "d3"):
            d = complex(getattr(self, name))
            if abs(d.imag) > 1e-14:
                raise ValueError(f"{name}={d!r} must be real for the real "
                                 "constant-detuning transformation")


class BasicModel:
    """Evaluators for the amplitude- and detuning-modulation pair of a class.

    U*(z)  = u0star * z^k1 (z-1)^k2 (z-a)^k3   (principal branches)
    dz*(z) = d1/z + d2/(z-1) + d3/(z-a)
    """

    def __init__(self, class_id: ClassId, params: ModelParams):
        self.class_id = class_id
        self.params = params
        self._a = complex(params.a)

    def _guard(self, z: complex):
        z = complex(z)
        tol = 1e-14 * max(1.0, abs(self._a))
        if min(abs(z), abs(z - 1), abs(z - self._a)) < tol:
            raise SingularPointError(f"z={z} lies on a singular point of the model")
        return z

    def ustar(self, z) -> complex:
        z = self._guard(z)
        c = self.class_id
        out = complex(self.params.u0star)
        if c.two_k1:
            out *= z ** c.k1
        if c.two_k2:
            out *= (z - 1) ** c.k2
        if c.two_k3:
            out *= (z - self._a) ** c.k3
        return out

    def ustar_squared(self, z) -> complex:
        """U*(z)^2 as an exact rational function (integer exponents only)."""
        z = self._guard(z)
        c = self.class_id
        return (complex(self.params.u0star) ** 2
                * z ** c.two_k1
                * (z - 1) ** c.two_k2
                * (z - self._a) ** c.two_k3)

    def delta_z_star(self, z) -> complex:
        z = self._guard(z)
        p = self.params
        return (complex(p.d1) / z + complex(p.d2) / (z - 1)
                + complex(p.d3) / (z - self._a))

    def ustar_log_derivative(self, z) -> complex:
        """U*'/U* = k1/z + k2/(z-1) + k3/(z-a)."""
        z = self._guard(z)
        c = self.class_id
        return c.k1 / z + c.k2 / (z - 1) + c.k3 / (z - self._a)


def basic_model(class_id: ClassId, params: ModelParams) -> BasicModel:
    return BasicModel(class_id, params)


def real_amplitude_phase(class_id: ClassId) -> complex:
    """Unit u0star that makes the constant-detuning pulse U(t) real positive.

    For z in (0, 1) and a > 1 the product z^(k1+1) (z-1)^(k2+1) (z-a)^(k3+1)
    carries the constant phase exp(i*pi*(k2+k3)); cancel it.
    """
    two = class_id.two_k2 + class_id.two_k3
    # exp(-i*pi*two/2), exact for quarter turns
    return (-1j) ** (two % 4)


def format_ustar(class_id: ClassId) -> str:
    """Canonical text of U*/U0*, e.g. "sqrt(z)/((z-1)*(z-a))"."""
    factors = (("z", class_id.two_k1),
               ("z-1", class_id.two_k2),
               ("z-a", class_id.two_k3))

    def render(expr, two_k):
        mag = abs(two_k)
        if mag == 1:
            return f"sqrt({expr})"
        return expr if expr == "z" else f"({expr})"

    num = [render(e, t) for e, t in factors if t > 0]
    den = [render(e, t) for e, t in factors if t < 0]
    num_s = "*".join(num) if num else "1"
    if not den:
        return num_s
    den_s = "*".join(den)
    if len(den) > 1:
        den_s = f"({den_s})"
    return f"{num_s}/{den_s}"
