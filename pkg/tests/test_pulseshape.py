import math

import numpy as np
import pytest

from heunpulse.classes import ClassId, ModelParams, real_amplitude_phase
from heunpulse.fields import PulseTrace, sample_constant_detuning, t_of_z, z_of_t
from heunpulse.pulseshape import (
    CrossingPolynomial,
    edge_approximation,
    exponential_edge,
    lambert_w,
    matched_pair,
    narrow_pulse_roots,
    peak_metrics,
    pulse_time_origin,
    wall_positions,
)

SQRT2 = math.sqrt(2.0)


# ---------------------------------------------------------------------------
# crossing polynomial


def test_crossing_polynomial_identity():
    rng = np.random.default_rng(71)
    for _ in range(25):
        a = rng.uniform(1.1, 4.0)
        d1, d2, d3 = rng.uniform(-3, 3, 3)
        poly = CrossingPolynomial.from_params(a, d1, d2, d3)
        zs = rng.uniform(-2, 2, 7)
        direct = (d1 * (zs - 1) * (zs - a) + d2 * zs * (zs - a)
                  + d3 * zs * (zs - 1))
        np.testing.assert_allclose(poly(zs), direct, rtol=1e-14, atol=1e-14)


# ---------------------------------------------------------------------------
# infinitely narrow pulses


def test_narrow_root_documented_case():
    roots = narrow_pulse_roots(a=2.0, d1=0.5, d2=-2.0, free="d3")
    admissible = [r for r in roots if r.admissible]
    assert len(admissible) == 1
    r = admissible[0]
    assert r.value == pytest.approx(4.5 + 2 * SQRT2, rel=1e-12)
    assert r.z0 == pytest.approx(SQRT2 - 1, abs=1e-12)
    poly = CrossingPolynomial.from_params(2.0, 0.5, -2.0, r.value)
    assert abs(poly.discriminant) <= 1e-10
    assert abs(poly(r.z0)) <= 1e-12
    assert abs(poly.derivative(r.z0)) <= 1e-12
    # the other root lands outside (0, 1)
    others = [r for r in roots if not r.admissible]
    assert others and others[0].value == pytest.approx(4.5 - 2 * SQRT2, rel=1e-9)


def test_narrow_root_antisymmetric_edges():
    # d2 = -d1 keeps the condition solvable; re-verify D = 0 directly
    for r in narrow_pulse_roots(a=2.0, d1=0.7, d2=-0.7, free="d3"):
        poly = CrossingPolynomial.from_params(2.0, 0.7, -0.7, r.value)
        assert abs(poly.discriminant) <= 1e-10 * max(1.0, r.value ** 2)


def test_narrow_root_d1_zero_is_inadmissible():
    roots = narrow_pulse_roots(a=2.0, d1=0.0, d2=-2.0, free="d3")
    assert roots and all(not r.admissible for r in roots)


def test_narrow_root_free_a():
    roots = narrow_pulse_roots(d1=0.5, d2=-2.0, d3=4.5 + 2 * SQRT2, free="a")
    good = [r for r in roots if r.admissible]
    assert any(r.value == pytest.approx(2.0, rel=1e-9) for r in good)
    for r in roots:
        if r.admissible:
            assert r.value > 1 and 0 < r.z0 < 1


# ---------------------------------------------------------------------------
# walls and matched pairs


def test_wall_positions_documented_case():
    t1, t2, d = wall_positions(2.0, -2.0, 1.0)
    t0 = pulse_time_origin(2.0, 0.0, 0.0, -2.0, 1.0)
    assert t0 == pytest.approx(math.log(9 / 4), rel=1e-13)
    assert t2 == pytest.approx(t0, rel=1e-13)
    assert t1 == pytest.approx(t0 - 2 * math.log(2), rel=1e-12)
    assert d == pytest.approx(2 * math.log(2), rel=1e-12)
    assert wall_positions(2.0, 0.0, 1.0)[2] == 0.0


def test_wall_width_grows_toward_unit_a():
    widths = [wall_positions(a, -2.0, 1.0)[2] for a in (1.01, 1.1, 1.5, 2.0, 5.0)]
    assert all(w1 > w2 for w1, w2 in zip(widths, widths[1:]))
    assert widths[0] > 9  # diverges as a -> 1+


def test_matched_pair_reproduces_reference_sets():
    # (a=1.2, -10) -> a=2 gives -25.85, close to the reference -26.22
    assert matched_pair(1.2, -10.0, 2.0) == pytest.approx(-25.85, abs=0.01)
    assert abs(matched_pair(1.2, -10.0, 2.0) - (-26.22)) / 26.22 < 0.05
    assert abs(matched_pair(1.05, -10.0, 2.0) - (-44.87)) / 44.87 < 0.05
    assert abs(matched_pair(1.01, -10.0, 2.0) - (-68.85)) / 68.85 < 0.05


def test_matched_pair_involution_and_identity():
    rng = np.random.default_rng(73)
    for _ in range(20):
        a = rng.uniform(1.01, 5.0)
        a2 = rng.uniform(1.01, 5.0)
        d3 = rng.uniform(-30, -0.1)
        there = matched_pair(a, d3, a2)
        back = matched_pair(a2, there, a)
        assert back == pytest.approx(d3, rel=1e-14)
    assert matched_pair(1.7, -3.0, 1.7) == pytest.approx(-3.0, rel=1e-15)


# ---------------------------------------------------------------------------
# Lambert W


def test_lambert_w_fixed_values():
    assert lambert_w(0, 0.0) == 0.0
    assert lambert_w(0, math.e) == pytest.approx(1.0, rel=1e-14)
    # independent fixed-point oracle for W0(1): w = e^-w iterated to converge
    w = 0.5
    for _ in range(200):
        w = (w + math.exp(-w)) / 2
    assert lambert_w(0, 1.0) == pytest.approx(w, rel=1e-12)
    assert lambert_w(0, 1.0) == pytest.approx(0.5671432904097838, rel=1e-13)
    assert lambert_w(0, -1 / math.e) == pytest.approx(-1.0, abs=1e-7)
    assert lambert_w(-1, -1 / math.e) == pytest.approx(-1.0, abs=1e-7)


def test_lambert_w_residual_across_domain():
    xs0 = np.concatenate([
        -np.geomspace(1e-12, 1 / math.e - 1e-12, 200),
        np.geomspace(1e-12, 1e12, 300), [0.0]])
    for x in xs0:
        w = lambert_w(0, float(x))
        assert abs(w * math.exp(w) - x) <= 1e-13 * max(abs(x), 1e-300) + 1e-300
        assert w >= -1 - 1e-12
    xsm = -np.geomspace(1e-300, 1 / math.e - 1e-12, 300)
    for x in xsm:
        w = lambert_w(-1, float(x))
        assert abs(w * math.exp(w) - x) <= 1e-13 * abs(x)
        assert w <= -1 + 1e-12


def test_lambert_w_domain_errors():
    with pytest.raises(ValueError):
        lambert_w(0, -0.5)
    with pytest.raises(ValueError):
        lambert_w(-1, 0.1)
    with pytest.raises(ValueError):
        lambert_w(1, 0.1)


# ---------------------------------------------------------------------------
# edge approximation


STEEP_LEFT_EDGE = dict(a=2.5, d1=0.01, d2=-0.03, d3=-3.0, Delta=1.0)


def test_left_edge_tracks_exact_map():
    p = ModelParams(a=STEEP_LEFT_EDGE["a"], u0star=-1.0, d1=STEEP_LEFT_EDGE["d1"],
                    d2=STEEP_LEFT_EDGE["d2"], d3=STEEP_LEFT_EDGE["d3"])
    zs = np.geomspace(1e-4, 0.3, 120)
    ts = t_of_z(p, zs, 1.0)
    approx = np.array([edge_approximation(side="left", t=tt, **STEEP_LEFT_EDGE)
                       for tt in ts])
    assert np.abs(approx - zs).max() <= 0.021


def test_left_edge_error_vanishes_toward_zero():
    p = ModelParams(a=STEEP_LEFT_EDGE["a"], u0star=-1.0, d1=STEEP_LEFT_EDGE["d1"],
                    d2=STEEP_LEFT_EDGE["d2"], d3=STEEP_LEFT_EDGE["d3"])
    errs = []
    for zhi in (0.3, 0.03, 0.003):
        zs = np.geomspace(zhi / 10, zhi, 40)
        ts = t_of_z(p, zs, 1.0)
        approx = np.array([edge_approximation(side="left", t=tt, **STEEP_LEFT_EDGE)
                           for tt in ts])
        errs.append(np.abs(approx - zs).max())
    assert errs[0] > errs[1] > errs[2]


def test_degenerate_edge_reduces_to_exponential():
    # a d2 + d3 = 0 collapses the left edge to the plain exponential
    a, d1, Delta = 2.0, 0.05, 1.0
    d2 = -1.0
    d3 = -a * d2
    for t in (-1.0, -0.5, 0.0):
        ref = float(exponential_edge(a, d1, d2, d3, Delta, t))
        got = edge_approximation(a, d1, d2, d3, Delta, "left", t)
        assert got == pytest.approx(ref, rel=1e-9)


def test_right_edge_reproduces_wall_position():
    # in the d2 -> -0 limit the right-edge model reaches z = 1 exactly at t2
    a, d1, d3, Delta = 2.0, 0.01, -2.0, 1.0
    from scipy.optimize import brentq

    gaps = []
    offsets = []
    for d2 in (-1e-4, -1e-6):
        _, t2, _ = wall_positions(a, d3, Delta, d1, d2)
        gaps.append(1.0 - edge_approximation(a, d1, d2, d3, Delta, "right", t2))

        def near_wall(t):
            return edge_approximation(a, d1, d2, d3, Delta, "right", t) \
                - (1.0 - 1e-6)
        t_wall = brentq(near_wall, t2 - 0.5, t2 + 0.5, xtol=1e-12)
        offsets.append(abs(t_wall - t2))
    assert gaps[0] > gaps[1] > 0      # approach tightens as d2 -> 0
    assert gaps[1] <= 1e-5
    assert offsets[0] > offsets[1]    # wall location converges to t2
    assert offsets[1] <= 1e-4


def test_exponential_edge_wall():
    a, d1, d2, d3, Delta = 2.5, 0.01, -0.03, -3.0, 1.0
    t1, _, _ = wall_positions(a, d3, Delta, d1, d2)
    from scipy.optimize import brentq
    t_cross = brentq(lambda t: float(exponential_edge(a, d1, d2, d3, Delta, t)) - 1.0,
                     t1 - 2, t1 + 2, xtol=1e-13)
    assert abs(t_cross - t1) <= 1e-12


# ---------------------------------------------------------------------------
# peak metrics


def test_two_peak_heights_for_antisymmetric_detuning():
    c = ClassId(-1, -1, -1)
    p = ModelParams(a=2.0, u0star=real_amplitude_phase(c), d1=0.5, d2=-0.5,
                    d3=-10.0)
    t = np.linspace(-8, 8, 20001)
    tr = sample_constant_detuning(c, p, t).normalized()
    m = peak_metrics(tr)
    assert len(m.peak_heights) == 2
    assert abs(m.peak_heights[0] - m.peak_heights[1]) <= 1e-6


def test_single_sample_trace():
    tr = PulseTrace(t=np.array([1.0]), z=np.array([0.5 + 0j]),
                    U=np.array([2.0]), delta_t=np.array([0.0]))
    m = peak_metrics(tr)
    assert m.peak_times.tolist() == [1.0]
    assert m.peak_heights.tolist() == [2.0]
    assert m.fwhm == 0.0 and m.area == 0.0
    with pytest.raises(ValueError):
        peak_metrics(PulseTrace(t=np.array([]), z=np.array([]),
                                U=np.array([]), delta_t=np.array([])))


def test_box_fwhm_matches_wall_width():
    c = ClassId(0, 0, -2)
    p = ModelParams(a=2.0, u0star=real_amplitude_phase(c), d1=1e-3, d2=-1e-3,
                    d3=-2.0)
    t = np.linspace(-4, 5, 40001)
    tr = sample_constant_detuning(c, p, t).normalized()
    m = peak_metrics(tr)
    _, _, d = wall_positions(2.0, -2.0, 1.0, 1e-3, -1e-3)
    assert abs(m.fwhm - d) / d <= 0.05


def test_peak_refinement_on_smooth_pulse():
    t = np.linspace(-3, 3, 301)
    u = np.exp(-((t - 0.123) ** 2))
    tr = PulseTrace(t=t, z=t.astype(complex), U=u, delta_t=np.zeros_like(t))
    m = peak_metrics(tr)
    assert len(m.peak_times) == 1
    assert m.peak_times[0] == pytest.approx(0.123, abs=1e-3)
    assert m.fwhm == pytest.approx(2 * math.sqrt(math.log(2)), rel=1e-3)
    assert m.area == pytest.approx(math.sqrt(math.pi), rel=1e-4)
