"""Mapping from a solvable class to the parameters of the Heun equation.

Writing a2 = phi(z) u(z) with phi = z^a1 (z-1)^a2 (z-a)^a3 turns the
two-state equation in the auxiliary variable into the general Heun equation
provided the pre-factor exponents solve one quadratic per finite singular
point.  The local exponents fix gamma, delta, epsilon; the accessory
parameter q and the product alpha*beta are fixed by matching the residues
of the remaining rational coefficient function at z = 0 and z = 1.

The residue-matched q and alpha*beta are authoritative here; the direct
grouped formulas are evaluated as well and any disagreement is flagged.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .classes import BasicModel, ClassId, ModelParams, basic_model
from .heun import HeunParams, heun_value_and_derivative


@dataclass(frozen=True)
class ExponentChoice:
    """Selected root of each pre-factor quadratic, with branch tags."""

    alpha1: complex
    alpha2: complex
    alpha3: complex
    tags: tuple = ("small", "small", "small")


@dataclass
class ExponentCandidates:
    """Both roots of the exponent quadratic at each finite singular point."""

    roots: tuple          # ((r0, r1), (r0, r1), (r0, r1)) per singularity
    limits: tuple         # the squared-amplitude limits L1, L2, L3
    residuals: tuple      # max quadratic residual per singularity

    def choice(self, i1=None, i2=None, i3=None) -> ExponentChoice:
        idx = []
        for k, sel in enumerate((i1, i2, i3)):
            pair = self.roots[k]
            if sel is None:
                # prefer the regular (zero) root, else the smaller |Re|
                if min(abs(pair[0]), abs(pair[1])) < 1e-12:
                    sel = 0 if abs(pair[0]) <= abs(pair[1]) else 1
                else:
                    sel = 0 if abs(pair[0].real) <= abs(pair[1].real) else 1
            idx.append(sel)
        tags = tuple("small" if i == 0 else "large" for i in idx)
        return ExponentChoice(self.roots[0][idx[0]], self.roots[1][idx[1]],
                              self.roots[2][idx[2]], tags)


def _doubled_exponents(class_id: ClassId):
    return (class_id.two_k1 + 2, class_id.two_k2 + 2, class_id.two_k3 + 2)


def _squared_limits(class_id: ClassId, params: ModelParams):
    """L1, L2, L3: limits of (z-s)^2 U*^2 at each singular point s.

    Exact closed forms; every exponent that appears is an integer, so no
    branch choices are involved.
    """
    m1, m2, m3 = _doubled_exponents(class_id)
    a = complex(params.a)
    u2 = complex(params.u0star) ** 2
    L1 = u2 * (-1.0) ** (m2 - 2) * (-a) ** (m3 - 2) if m1 == 0 else 0.0
    L2 = u2 * (1 - a) ** (m3 - 2) if m2 == 0 else 0.0
    L3 = u2 * a ** (m1 - 2) * (a - 1) ** (m2 - 2) if m3 == 0 else 0.0
    return complex(L1), complex(L2), complex(L3)


def _laurent_const_at_zero(class_id: ClassId, params: ModelParams) -> complex:
    """Constant Laurent coefficient of z U*^2 about z = 0."""
    m1, m2, m3 = _doubled_exponents(class_id)
    a = complex(params.a)
    u2 = complex(params.u0star) ** 2
    if m1 >= 2:
        return 0.0
    base = u2 * (-1.0) ** (m2 - 2) * (-a) ** (m3 - 2)
    if m1 == 1:
        return base
    return base * (-(m2 - 2) - (m3 - 2) / a)


def _laurent_const_at_one(class_id: ClassId, params: ModelParams) -> complex:
    """Constant Laurent coefficient of (z-1) U*^2 about z = 1."""
    m1, m2, m3 = _doubled_exponents(class_id)
    a = complex(params.a)
    u2 = complex(params.u0star) ** 2
    if m2 >= 2:
        return 0.0
    base = u2 * (1 - a) ** (m3 - 2)
    if m2 == 1:
        return base
    return base * ((m1 - 2) + (m3 - 2) / (1 - a))


def exponent_candidates(class_id: ClassId, params: ModelParams
                        ) -> ExponentCandidates:
    """Both roots of alpha^2 - (1 + k + i*d) alpha + L = 0 per singular point."""
    limits = _squared_limits(class_id, params)
    ks = (class_id.k1, class_id.k2, class_id.k3)
    ds = (complex(params.d1), complex(params.d2), complex(params.d3))
    roots = []
    residuals = []
    for k, d, L in zip(ks, ds, limits):
        b = 1 + k + 1j * d
        disc = cmath.sqrt(b * b - 4 * L)
        r_small, r_large = (b - disc) / 2, (b + disc) / 2
        if abs(r_small) > abs(r_large):
            r_small, r_large = r_large, r_small
        # Vieta refinement keeps the small root free of cancellation
        if abs(r_large) > 1e-300:
            r_small = L / r_large
        pair = (r_small, r_large)
        res = max(abs(r * r - b * r + L) for r in pair)
        scale = max(1.0, abs(b) ** 2, abs(L))
        roots.append(pair)
        residuals.append(res / scale)
    return ExponentCandidates(tuple(roots), limits, tuple(residuals))


@dataclass
class HeunMapping:
    """Result of the class -> Heun translation, with cross-check data."""

    class_id: ClassId
    params: ModelParams
    exponents: ExponentChoice
    heun: HeunParams
    q_grouped: complex
    alphabeta_grouped: complex
    grouped_forms_consistent: bool
    q_discrepancy: float
    alphabeta_discrepancy: float

    def to_json_dict(self) -> dict:
        d = {
            "class": list(self.class_id.doubled()),
            "class_text": self.class_id.to_text(),
            "exponents": {
                "alpha1": [self.exponents.alpha1.real, self.exponents.alpha1.imag],
                "alpha2": [self.exponents.alpha2.real, self.exponents.alpha2.imag],
                "alpha3": [self.exponents.alpha3.real, self.exponents.alpha3.imag],
                "tags": list(self.exponents.tags),
            },
            "heun": self.heun.to_json_dict(),
            "grouped_forms_consistent": self.grouped_forms_consistent,
        }
        return d


def heun_params(class_id: ClassId, params: ModelParams,
                choice: ExponentChoice = None) -> HeunMapping:
    """Translate (class, parameters, exponent choice) into HeunParams.

    gamma, delta, epsilon follow from the chosen exponents; q and
    alpha*beta come from residue matching at z = 0 and z = 1, with the
    grouped formulas computed alongside as a transcription cross-check.
    alpha and beta are recovered from their sum (exponent-sum constraint)
    and product.
    """
    if choice is None:
        choice = exponent_candidates(class_id, params).choice()
    a = complex(params.a)
    a1, a2, a3 = choice.alpha1, choice.alpha2, choice.alpha3
    k1, k2, k3 = class_id.k1, class_id.k2, class_id.k3
    d1, d2, d3 = complex(params.d1), complex(params.d2), complex(params.d3)

    gamma = 2 * a1 - 1j * d1 - k1
    delta = 2 * a2 - 1j * d2 - k2
    epsilon = 2 * a3 - 1j * d3 - k3

    e1 = 1j * d1 + k1
    e2 = 1j * d2 + k2
    e3 = 1j * d3 + k3

    A0 = _laurent_const_at_zero(class_id, params)
    B0 = _laurent_const_at_one(class_id, params)

    # residue of the zeroth-order coefficient function at z = 0, times -a
    r0 = (A0 - 2 * a1 * a2 - 2 * a1 * a3 / a
          + e1 * (a2 + a3 / a) + a1 * (e2 + e3 / a))
    q = -a * r0

    # residue at z = 1 fixes alpha*beta
    r1 = (B0 + 2 * a1 * a2 + 2 * a2 * a3 / (1 - a)
          - e2 * (a1 + a3 / (1 - a)) - a2 * (e1 + e3 / (1 - a)))
    ab = q + (1 - a) * r1

    # grouped forms, kept as a cross-check against transcription drift
    q_grouped = ((gamma - 2 * a1) * (a3 + a * a2)
                 + (a * delta + epsilon) * a1 - a * A0)
    ab_grouped = (q_grouped + epsilon * a2 + a3 * (delta - 2 * a2)
                  - (1 - a) * (2 * a1 * a2 - delta * a1 - gamma * a2)
                  + (1 - a) * B0)

    q_disc = abs(q - q_grouped) / max(1.0, abs(q))
    ab_disc = abs(ab - ab_grouped) / max(1.0, abs(ab))
    consistent = q_disc <= 1e-6 and ab_disc <= 1e-6

    s = gamma + delta + epsilon - 1  # alpha + beta
    disc = cmath.sqrt(s * s - 4 * ab)
    alpha = (s + disc) / 2
    beta = s - alpha

    hp = HeunParams(a=a, q=q, alpha=alpha, beta=beta, gamma=gamma,
                    delta=delta, epsilon=epsilon)
    return HeunMapping(class_id=class_id, params=params, exponents=choice,
                       heun=hp, q_grouped=q_grouped,
                       alphabeta_grouped=ab_grouped,
                       grouped_forms_consistent=consistent,
                       q_discrepancy=q_disc, alphabeta_discrepancy=ab_disc)


# ---------------------------------------------------------------------------
# identity checks


def _phi_log_derivative(choice: ExponentChoice, a: complex, z: complex):
    return (choice.alpha1 / z + choice.alpha2 / (z - 1)
            + choice.alpha3 / (z - a))


def _phi_second_over_phi(choice: ExponentChoice, a: complex, z: complex):
    a1, a2, a3 = choice.alpha1, choice.alpha2, choice.alpha3
    return (a1 * (a1 - 1) / z ** 2 + a2 * (a2 - 1) / (z - 1) ** 2
            + a3 * (a3 - 1) / (z - a) ** 2
            + 2 * (a1 * a2 / (z * (z - 1)) + a1 * a3 / (z * (z - a))
                   + a2 * a3 / ((z - 1) * (z - a))))


def first_order_identity_residual(model: BasicModel, choice: ExponentChoice,
                                  hp: HeunParams, z) -> float:
    """Relative mismatch of the first-derivative coefficient identity."""
    z = complex(z)
    a = complex(model.params.a)
    lhs = hp.gamma / z + hp.delta / (z - 1) + hp.epsilon / (z - a)
    rhs = (2 * _phi_log_derivative(choice, a, z)
           - 1j * model.delta_z_star(z) - model.ustar_log_derivative(z))
    return abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-12)


def coefficient_identity_residual(model: BasicModel, choice: ExponentChoice,
                                  hp: HeunParams, z) -> float:
    """Relative mismatch of the zeroth-order coefficient identity."""
    z = complex(z)
    a = complex(model.params.a)
    lhs = (hp.alpha * hp.beta * z - hp.q) / (z * (z - 1) * (z - a))
    p = -1j * model.delta_z_star(z) - model.ustar_log_derivative(z)
    rhs = (_phi_second_over_phi(choice, a, z)
           + p * _phi_log_derivative(choice, a, z)
           + model.ustar_squared(z))
    return abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-12)


# ---------------------------------------------------------------------------
# assembled analytic amplitudes


class AnalyticSolution:
    """The amplitude a2(z) = phi(z) (cA H_0(z) + cB H_1(z)).

    H_0 and H_1 are the two local Heun solutions at z = 0 (exponents 0 and
    1-gamma); cA and cB select the member of the two-dimensional solution
    space.  phi uses principal branches, which is the natural choice on the
    real interval (0, 1).
    """

    def __init__(self, class_id: ClassId, params: ModelParams,
                 choice: ExponentChoice = None, cA=1.0, cB=0.0):
        self.model = basic_model(class_id, params)
        self.mapping = heun_params(class_id, params, choice)
        self.cA = complex(cA)
        self.cB = complex(cB)

    @property
    def heun(self) -> HeunParams:
        return self.mapping.heun

    def phi(self, z) -> complex:
        z = complex(z)
        ch = self.mapping.exponents
        a = complex(self.model.params.a)
        out = 1.0 + 0.0j
        if ch.alpha1 != 0:
            out *= z ** ch.alpha1
        if ch.alpha2 != 0:
            out *= (z - 1) ** ch.alpha2
        if ch.alpha3 != 0:
            out *= (z - a) ** ch.alpha3
        return out

    def branch_value_and_derivative(self, z, branch: int):
        """phi * H and its z-derivative for branch 0 (mu=0) or 1 (mu=1-gamma)."""
        z = complex(z)
        hp = self.heun
        mu = 0.0 if branch == 0 else 1 - hp.gamma
        h, dh = heun_value_and_derivative(hp, mu, z)
        phi = self.phi(z)
        dphi_over_phi = _phi_log_derivative(self.mapping.exponents,
                                            complex(self.model.params.a), z)
        return phi * h, phi * (dphi_over_phi * h + dh)

    def a2(self, z) -> complex:
        v0, _ = self.branch_value_and_derivative(z, 0)
        if self.cB == 0:
            return self.cA * v0
        v1, _ = self.branch_value_and_derivative(z, 1)
        return self.cA * v0 + self.cB * v1

    def da2_dz(self, z) -> complex:
        _, d0 = self.branch_value_and_derivative(z, 0)
        if self.cB == 0:
            return self.cA * d0
        _, d1 = self.branch_value_and_derivative(z, 1)
        return self.cA * d0 + self.cB * d1


def analytic_a2(solution: AnalyticSolution, z) -> complex:
    return solution.a2(z)


def phase_real_interval(params: ModelParams, z) -> complex:
    """Accumulated phase d1 ln z + d2 ln(1-z) + d3 ln(a-z); real on (0, 1)
    for real parameters with a > 1."""
    z = complex(z)
    a = complex(params.a)
    return (complex(params.d1) * cmath.log(z)
            + complex(params.d2) * cmath.log(1 - z)
            + complex(params.d3) * cmath.log(a - z))


def analytic_a1(solution: AnalyticSolution, z, delta_of_z=None) -> complex:
    """Companion amplitude a1 = i (da2/dz) e^(-i delta(z)) / U*(z).

    delta_of_z fixes the integration constant of the accumulated phase; the
    default is the real-interval convention of phase_real_interval.
    """
    z = complex(z)
    ustar = solution.model.ustar(z)
    if abs(ustar) < 1e-150:
        raise ZeroDivisionError(
            "U*(z) vanishes; a1 cannot be recovered from a2 at this point")
    delta = (phase_real_interval(solution.model.params, z)
             if delta_of_z is None else delta_of_z(z))
    return 1j * solution.da2_dz(z) * cmath.exp(-1j * delta) / ustar
