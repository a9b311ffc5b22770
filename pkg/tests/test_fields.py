import json
import math

import numpy as np
import pytest

from heunpulse.classes import (
    ClassId,
    ModelParams,
    basic_model,
    enumerate_classes,
    finite_pulse_area,
    real_amplitude_phase,
)
from heunpulse.fields import (
    NonMonotoneMapError,
    RealnessError,
    TransformSpec,
    complex_line_limits,
    complex_line_params,
    crossing_classification,
    detuning_extrema,
    sample_complex_line,
    sample_constant_amplitude,
    sample_constant_detuning,
    sample_generic,
    sample_periodic,
    t_of_z,
    z_of_t,
)
from heunpulse.mapping import phase_real_interval


def cd_params(a, d1, d2, d3, class_id=None, scale=1.0):
    u0 = real_amplitude_phase(class_id) * scale if class_id is not None else scale
    return ModelParams(a=a, u0star=u0, d1=d1, d2=d2, d3=d3)


# ---------------------------------------------------------------------------
# the real constant-detuning map


def test_time_origin_pins_half():
    p = cd_params(2.0, 1.0, -1.0, -2.0)
    assert t_of_z(p, 0.5, 1.0) == pytest.approx(0.0, abs=1e-14)
    # t0 = ln(2^(d1+d2+d3) (2a-1)^(-d3)) for Delta = 1
    from heunpulse.pulseshape import pulse_time_origin
    assert pulse_time_origin(2.0, 1.0, -1.0, -2.0, 1.0) == pytest.approx(
        math.log(9 / 4), rel=1e-13)


def test_map_round_trip():
    rng = np.random.default_rng(61)
    p = cd_params(2.0, 1.0, -1.0, -2.0)
    zs = rng.uniform(0.01, 0.99, 100)
    ts = t_of_z(p, zs, 1.0)
    back, clamped = z_of_t(p, ts, 1.0)
    assert not clamped.any()
    assert np.abs(back - zs).max() <= 1e-12


def test_map_rejects_sign_change():
    # d1 < 0 puts P(0) = a d1 < 0 while P(1) = d2 (1-a) > 0 for d2 < 0
    p = cd_params(2.0, -1.0, -1.0, 3.0)
    with pytest.raises(NonMonotoneMapError):
        t_of_z(p, 0.5, 1.0)


def test_clamping_beyond_mapped_range():
    # d1 = 0 bounds the reachable times on the left
    c = ClassId(0, 0, -2)
    p = cd_params(2.0, 0.0, -0.01, -2.0, c)
    t_lo = t_of_z(p, 1e-12, 1.0)
    z, clamped = z_of_t(p, np.array([t_lo - 5.0, 0.0]), 1.0)
    assert clamped[0] and not clamped[1]
    assert z[0] == pytest.approx(1e-12, abs=1e-13)
    trace = sample_constant_detuning(c, p, np.array([t_lo - 5.0, 0.0]))
    assert trace.metadata["clamped"]


# ---------------------------------------------------------------------------
# generic sampler


def test_generic_identity_transform():
    c = ClassId(0, 0, -2)
    p = ModelParams(a=2.0, u0star=1.0, d1=0.3, d2=-0.4, d3=-0.8)
    t = np.linspace(0.1, 0.9, 17)
    tr = sample_generic(c, p, lambda tt: tt, lambda tt: 1.0, t)
    np.testing.assert_allclose(tr.U, 1.0 / (t - 2.0), rtol=1e-14)
    np.testing.assert_allclose(
        tr.delta_t, 0.3 / t + 0.4 / (1 - t) + 0.8 / (2 - t), rtol=1e-12)


def test_generic_frozen_transform_gives_zero_field():
    c = ClassId(-1, -1, -1)
    p = ModelParams(a=2.0, u0star=1.0, d1=0.3)
    t = np.linspace(0, 1, 5)
    tr = sample_generic(c, p, lambda tt: 0.5, lambda tt: 0.0, t)
    assert np.all(tr.U == 0) and np.all(tr.delta_t == 0)


def test_generic_phase_quadrature_matches_closed_form():
    c = ClassId(0, 0, -2)
    p = ModelParams(a=2.0, u0star=1.0, d1=0.3, d2=-0.4, d3=-0.8)
    t = np.linspace(-3, 3, 4001)

    def z_fun(tt):
        return (1 + math.tanh(tt)) / 2

    def dz_fun(tt):
        return 0.5 / math.cosh(tt) ** 2

    tr = sample_generic(c, p, z_fun, dz_fun, t)
    accumulated = np.concatenate(
        [[0.0], np.cumsum((tr.delta_t[1:] + tr.delta_t[:-1]) / 2 * np.diff(t))])
    closed = np.array([phase_real_interval(p, z_fun(tt)).real for tt in t])
    closed -= closed[0]
    assert np.abs(accumulated - closed).max() <= 1e-5


def test_generic_realness_guard():
    c = ClassId(-1, 0, -1)  # k2 + k3 half-odd: needs an imaginary u0star
    p = ModelParams(a=2.0, u0star=1.0, d1=0.1, d2=-0.1, d3=-0.5)
    t = np.linspace(-1, 1, 9)
    zf = lambda tt: (1 + math.tanh(tt)) / 2
    dzf = lambda tt: 0.5 / math.cosh(tt) ** 2
    with pytest.raises(RealnessError):
        sample_generic(c, p, zf, dzf, t)
    ok = sample_generic(c, p.__class__(a=2.0, u0star=real_amplitude_phase(c),
                                       d1=0.1, d2=-0.1, d3=-0.5), zf, dzf, t)
    assert np.isfinite(ok.U).all()


# ---------------------------------------------------------------------------
# constant-detuning sampler


def test_constant_detuning_matches_chain_rule():
    c = ClassId(-1, -1, -2)
    p = cd_params(1.2, 0.2, -0.5, -7.0, c)
    t = np.linspace(-6, 6, 501)
    tr = sample_constant_detuning(c, p, t)
    assert np.abs(tr.delta_t - 1.0).max() <= 1e-12

    model = basic_model(c, p)
    z = tr.z.real
    from heunpulse.pulseshape import CrossingPolynomial
    poly = CrossingPolynomial.from_params(1.2, 0.2, -0.5, -7.0)
    dz_dt = 1.0 * z * (1 - z) * (1.2 - z) / poly(z)
    u_alt = np.array([model.ustar(zk) for zk in z]) * dz_dt
    np.testing.assert_allclose(tr.U, u_alt.real, rtol=1e-11, atol=1e-14)
    assert np.abs(u_alt.imag).max() <= 1e-11 * np.abs(tr.U).max()

    # finite-difference z'(t) agrees with the closed form
    h = 1e-2
    zp = lambda ts: z_of_t(p, ts, 1.0)[0]
    dz_fd = (zp(t - 2 * h) - 8 * zp(t - h) + 8 * zp(t + h)
             - zp(t + 2 * h)) / (12 * h)
    np.testing.assert_allclose(dz_fd, dz_dt, rtol=1e-6)


def test_constant_detuning_finite_area_rule():
    t = np.array([-40.0, 0.0, 40.0])
    for c in enumerate_classes():
        p = cd_params(1.75, 0.31, -0.47, -1.13, c)
        tr = sample_constant_detuning(c, p, t)
        peak = np.abs(sample_constant_detuning(
            c, p, np.linspace(-5, 5, 801)).U).max()
        vanishes = max(abs(tr.U[0]), abs(tr.U[2])) <= 1e-3 * peak
        assert vanishes == finite_pulse_area(c), c.to_text()


def test_normalization_records_constant_and_keeps_raw():
    c = ClassId(0, 0, -2)
    p = cd_params(2.0, 0.01, -0.01, -2.0, c)
    t = np.linspace(-3, 4, 2001)
    tr = sample_constant_detuning(c, p, t)
    norm = tr.normalized()
    assert np.abs(norm.U).max() == pytest.approx(1.0, rel=1e-12)
    assert norm.metadata["normalization"] == pytest.approx(
        np.abs(tr.U).max(), rel=1e-14)
    assert "normalization" not in tr.metadata


def test_realness_across_gallery_parameter_sets():
    gallery = [
        (ClassId(0, 0, -2), 2.0, 0.01, -0.01, -2.0),
        (ClassId(0, 0, -2), 2.0, 1.0, -0.01, -2.0),
        (ClassId(0, 0, -2), 1.05, 1.0, -1.0, -10.0),
        (ClassId(0, 0, -2), 2.0, 0.5, -2.0, 5.0),
        (ClassId(-1, -1, -1), 10.0, 0.5, -0.5, -10.0),
        (ClassId(-1, -1, -1), 2.0, 0.5, -0.5, 2.1),
        (ClassId(-1, -1, -2), 1.2, 0.2, -0.5, -14.0),
        (ClassId(0, -1, -2), 2.0, 0.2, -2.0, -7.0),
        (ClassId(-1, -1, -1), 2.0, 1.0, -1.8, -10.0),
        (ClassId(-1, -1, 0), 2.1, 0.1, -0.2, -3.0),
        (ClassId(-1, -1, -1), 2.5, 0.01, -0.03, -3.0),
        (ClassId(0, 0, -2), 2.0, 0.1, -0.02, -2.0),
    ]
    t = np.linspace(-8, 8, 401)
    for c, a, d1, d2, d3 in gallery:
        p = cd_params(a, d1, d2, d3, c)
        tr = sample_constant_detuning(c, p, t)  # RealnessError would raise
        assert np.isfinite(tr.U).all()


def test_auto_phase_matches_known_imaginary_case():
    # the (-1/2,-1/2,0) class needs u0star = i for a real positive pulse
    assert real_amplitude_phase(ClassId(-1, -1, 0)) == 1j


# ---------------------------------------------------------------------------
# complex line


def test_complex_line_class_guard():
    with pytest.raises(ValueError) as err:
        sample_complex_line(ClassId(0, -1, -2), -2.0, 1.0, 0.5, 2.0, 1.0,
                            np.linspace(-1, 1, 5))
    assert "k1 = k2" in str(err.value)
    admissible = [c for c in enumerate_classes() if c.two_k1 == c.two_k2]
    assert len(admissible) == 9


def test_complex_line_passes_through_half_at_t_zero():
    tr = sample_complex_line(ClassId(0, 0, -2), -2.0, 1.0, 0.5, 2.0, 1.0,
                             np.array([-1.0, 0.0, 1.0]))
    assert tr.z[1] == pytest.approx(0.5 + 0j, abs=1e-12)


def test_complex_line_limits_match_samples():
    lam1, lam2, lam3, a0, U0 = 1.0, 0.5, 2.0, -2.0, 1.0
    t_probe = np.linspace(-30, 30, 301)
    for c in enumerate_classes():
        if c.two_k1 != c.two_k2:
            continue
        tr = sample_complex_line(c, a0, lam1, lam2, lam3, U0,
                                 np.array([-50.0, 50.0]))
        near, far = complex_line_limits(c, a0, lam1, lam2, lam3, U0)
        peak = np.abs(sample_complex_line(c, a0, lam1, lam2, lam3, U0,
                                          t_probe).U).max()
        for sampled, limit in ((tr.U[0], near), (tr.U[1], far)):
            if limit == 0:
                assert abs(sampled) <= 0.01 * peak
            else:
                assert abs(sampled) == pytest.approx(abs(limit), rel=0.01)


def test_complex_line_table_values():
    lam1, lam2, lam3, a0, U0 = 1.0, 0.5, 2.0, -2.0, 1.0
    near, far = complex_line_limits(ClassId(0, 0, -2), a0, lam1, lam2, lam3, U0)
    assert near == pytest.approx(U0 / lam3)
    assert far == pytest.approx(U0 / (2 * lam1 + lam3))
    near, far = complex_line_limits(ClassId(-2, -2, -1), a0, lam1, lam2,
                                    lam3, U0)
    assert near == 0.0 and far == 0.0
    near, far = complex_line_limits(ClassId(-2, -2, -2), a0, lam1, lam2,
                                    lam3, U0)
    assert near == pytest.approx(U0 / (lam3 * (1 + a0 * a0)))


def test_complex_line_bell_shape_for_all_half_class():
    tr = sample_complex_line(ClassId(-1, -1, -1), -2.0, 1.0, 0.5, 2.0, 1.0,
                             np.linspace(-50, 50, 2001))
    assert abs(tr.U[0]) < 0.01 * tr.U.max()
    assert abs(tr.U[-1]) < 0.01 * tr.U.max()
    assert tr.U.max() > 0


def test_complex_line_binding_parameters():
    p = complex_line_params(ClassId(0, 0, -2), -2.0, 1.0, 0.5, 2.0, 1.0)
    assert p.a == pytest.approx((1 - 2j) / 2)
    assert p.d1 == pytest.approx(1.0 - 0.5j)
    assert p.d2 == pytest.approx(1.0 + 0.5j)
    assert p.d3 == pytest.approx(2.0)
    assert p.u0star == pytest.approx(1.0)  # (-2i)^0


def test_complex_line_chain_rule_magnitude():
    # |U| re-derived from U*(z(t)) z'(t) with a finite-difference z'
    c = ClassId(-1, -1, -1)
    t = np.linspace(-6, 6, 241)
    args = (-2.0, 1.0, 0.5, 2.0, 1.0)
    tr = sample_complex_line(c, *args, t)
    model = basic_model(c, tr.metadata["params"])
    h = 1e-3
    shifted = [sample_complex_line(c, *args, t + k * h).z
               for k in (-2, -1, 1, 2)]
    dz_fd = (shifted[0] - 8 * shifted[1] + 8 * shifted[2]
             - shifted[3]) / (12 * h)
    u_gen = np.array([model.ustar(zk) for zk in tr.z]) * dz_fd
    np.testing.assert_allclose(np.abs(u_gen), np.abs(tr.U), rtol=1e-6)


def test_periodic_chain_rule_magnitude():
    # the circle has an analytic derivative dz/dt = i Delta z
    c = ClassId(0, -2, -2)
    t = np.linspace(0, 6, 301)
    tr = sample_periodic(c, 0.25, 1.0, 1.0, t)
    model = basic_model(c, tr.metadata["params"])
    u_gen = np.array([model.ustar(zk) for zk in tr.z]) * (1j * tr.z)
    np.testing.assert_allclose(np.abs(u_gen), np.abs(tr.U), rtol=1e-12)


# ---------------------------------------------------------------------------
# circle transformations


def test_periodic_amplitude_range_and_period():
    c = ClassId(0, -2, -2)
    t = np.linspace(0, 4 * np.pi, 4001)
    tr = sample_periodic(c, 0.25, 1.0, 1.0, t)
    assert tr.U.min() == pytest.approx(4 / 9, rel=1e-6)
    assert tr.U.max() == pytest.approx(4.0, rel=1e-6)
    assert np.abs(tr.delta_t - 1.0).max() == 0.0
    period = 2 * np.pi
    u_shift = np.interp(t[:2000] + period, t, tr.U)
    np.testing.assert_allclose(u_shift, tr.U[:2000], rtol=1e-12, atol=1e-12)


def test_periodic_small_a_limit_is_flat():
    c = ClassId(0, -2, -2)
    t = np.linspace(0, 10, 101)
    tr = sample_periodic(c, 1e-10, 1.0, 1.0, t)
    assert np.abs(tr.U - 1.0).max() <= 1e-4


def test_periodic_class_guard():
    with pytest.raises(ValueError):
        sample_periodic(ClassId(0, 0, -2), 0.25, 1.0, 1.0, np.linspace(0, 1, 5))
    with pytest.raises(ValueError):
        sample_periodic(ClassId(0, -2, -2), 1.5, 1.0, 1.0, np.linspace(0, 1, 5))


def test_constant_amplitude_detuning_model():
    c = ClassId(-2, 0, 0)
    a, D1, D2 = 0.25, -1.0, 1.0
    t = np.linspace(0, 2 * np.pi, 1001)
    tr = sample_constant_amplitude(c, a, 1.0, 1.0, D1, D2, t)
    assert np.all(tr.U == 1.0)
    hi, lo = detuning_extrema(a, D1, D2)
    assert tr.delta_t.max() == pytest.approx(hi, rel=1e-9)
    assert tr.delta_t.min() == pytest.approx(lo, rel=1e-9)
    with pytest.raises(ValueError):
        sample_constant_amplitude(ClassId(0, 0, -2), a, 1.0, 1.0, D1, D2, t)


def test_glancing_detuning_touches_zero():
    # Delta1 = -(1-a) Delta2 / (1 + a - 2 sqrt(a)) puts the detuning maximum
    # exactly at zero, reached where cos(Delta t) = 1
    a, D2 = 0.25, 1.0
    D1 = -(1 - a) * D2 / (1 + a - 2 * math.sqrt(a))
    t = np.linspace(0, 2 * np.pi, 1001)
    tr = sample_constant_amplitude(ClassId(-2, 0, 0), a, 1.0, 1.0, D1, D2, t)
    assert tr.delta_t.max() == pytest.approx(0.0, abs=1e-12)
    assert tr.delta_t[0] == pytest.approx(0.0, abs=1e-12)  # cos(0) = 1
    assert crossing_classification(a, D1, D2) == "glancing"


def test_crossing_classification_thresholds():
    a, D2 = 0.25, 1.0
    lo_thr = -(1 - a) * D2 / (1 - math.sqrt(a)) ** 2
    hi_thr = -(1 - a) * D2 / (1 + math.sqrt(a)) ** 2
    eps = 1e-6
    assert crossing_classification(a, lo_thr - eps, D2) == "non-crossing"
    assert crossing_classification(a, lo_thr, D2) == "glancing"
    assert crossing_classification(a, 0.5 * (lo_thr + hi_thr), D2) == "crossing"
    assert crossing_classification(a, hi_thr, D2) == "glancing"
    assert crossing_classification(a, hi_thr + eps, D2) == "non-crossing"


# ---------------------------------------------------------------------------
# trace output


def test_csv_format_and_determinism(tmp_path):
    c = ClassId(0, 0, -2)
    p = cd_params(2.0, 0.01, -0.01, -2.0, c)
    t = np.linspace(-2, 3, 11)
    tr = sample_constant_detuning(c, p, t)
    csv1 = tr.to_csv()
    csv2 = sample_constant_detuning(c, p, t).to_csv()
    assert csv1 == csv2
    lines = csv1.strip().split("\n")
    assert lines[0] == "t,Re_z,Im_z,U,delta_t"
    assert len(lines) == 12
    assert "," in lines[1] and "e" in csv1 or "." in csv1
    assert "\r" not in csv1

    side = tr.write(tmp_path / "trace.csv")
    meta = json.loads(open(side).read())
    assert meta["class"] == [0, 0, -2]
    assert meta["transform"] == "real_constant_detuning"
    assert meta["params"]["a"] == [2.0, 0.0]


def test_transform_spec_dispatch():
    c = ClassId(0, 0, -2)
    p = cd_params(2.0, 1.0, -1.0, -2.0, c)
    t = np.linspace(-2, 2, 21)
    spec = TransformSpec(kind="real_constant_detuning", Delta=1.0)
    tr = spec.sample(c, p, t)
    assert tr.metadata["transform"] == "real_constant_detuning"

    spec2 = TransformSpec(kind="complex_line", Delta=1.0, a0=-2.0,
                          lambda1=1.0, lambda2=0.5, lambda3=2.0, U0=1.0)
    tr2 = spec2.sample(c, None, t)
    assert tr2.metadata["transform"] == "complex_line"
    bound = spec2.model_params(c)
    assert bound.d3 == pytest.approx(2.0)

    with pytest.raises(ValueError):
        TransformSpec(kind="bogus")
    with pytest.raises(ValueError):
        TransformSpec(kind="complex_line", Delta=1.0)
