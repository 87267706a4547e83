import math

import pytest

from torusmicro.profiles import (
    AngularWindowProfile,
    CallableProfile,
    GaussianBumpProfile,
    PolynomialProfile,
    ProductProfile,
    RadialPlateauProfile,
    SerializationError,
    SmoothstepHalflineProfile,
    SumProfile,
    conjugate_profile,
    constant_profile,
    coordinate_profile,
    profile_from_spec,
    scale_profile,
    smoothstep,
    smoothstep_slope,
)


def test_smoothstep_is_exact_outside_the_ramp():
    assert smoothstep(-0.5) == 0.0
    assert smoothstep(0.0) == 0.0
    assert smoothstep(1.0) == 1.0
    assert smoothstep(2.0) == 1.0
    assert smoothstep(0.5) == pytest.approx(0.5)
    assert smoothstep_slope(0.0) == 0.0
    assert smoothstep_slope(1.0) == 0.0


def test_smoothstep_slope_matches_difference_quotient():
    for t in (0.1, 0.35, 0.7, 0.95):
        fd = (smoothstep(t + 1e-6) - smoothstep(t - 1e-6)) / 2e-6
        assert smoothstep_slope(t) == pytest.approx(fd, abs=1e-6)


def test_radial_plateau_exact_support():
    p = RadialPlateauProfile(2, 0.5, 1.5, 0.25)
    assert p.value((1.0, 0.0)) == 1.0
    assert p.value((0.9, 0.0)) == 1.0  # plateau reaches lo+ramp
    assert p.value((0.3, 0.0)) == 0.0
    assert p.value((1.6, 0.0)) == 0.0
    assert 0.0 < abs(p.value((1.4, 0.0))) < 1.0


def test_radial_plateau_center_and_rows():
    ball = RadialPlateauProfile(3, None, 0.2, 0.05, center=(0.0, 0.0, 1.0))
    assert ball.value((0.0, 0.0, 1.0)) == 1.0
    assert ball.value((0.0, 0.0, 0.5)) == 0.0
    collar = RadialPlateauProfile(3, None, 0.5, 0.1, rows=[[1, 0, 0], [0, 1, 0]])
    # Only the projected components matter.
    assert collar.value((0.1, 0.1, 99.0)) == 1.0
    assert collar.value((0.6, 0.0, 0.0)) == 0.0


def test_radial_plateau_validation():
    with pytest.raises(ValueError):
        RadialPlateauProfile(2, 0.5, 1.5, 0.0)
    with pytest.raises(ValueError):
        RadialPlateauProfile(2, None, 1.0, 0.1, rows=[[1.0]])
    with pytest.raises(ValueError):
        RadialPlateauProfile(2, None, 1.0, 0.1, center=(0.0, 0.0, 0.0))
    with pytest.raises(ValueError):
        RadialPlateauProfile(3, None, 1.0, 0.1, rows=[[1, 0, 0]], center=(0.0, 0.0))


def test_angular_window_exact_support():
    w = AngularWindowProfile(
        [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]],
        (1.0, 0.0),
        cos_inner=math.cos(math.pi / 16),
        cos_outer=math.cos(math.pi / 8),
    )
    assert w.value((1.0, 0.0, 5.0)) == 1.0
    assert w.value((-1.0, 0.0, 0.0)) == 0.0
    assert w.value((0.0, 0.0, 3.0)) == 0.0  # direction undefined at the tip
    with pytest.raises(ValueError):
        AngularWindowProfile([[1.0, 0.0]], (2.0,), 0.9, 0.5)


def test_gaussian_bump_value_and_derivative():
    g = GaussianBumpProfile((0.0, 1.0), 0.5)
    assert g.value((0.0, 1.0)) == 1.0
    xi = (0.3, 0.7)
    fd = (g.value((0.3 + 1e-6, 0.7)) - g.value((0.3 - 1e-6, 0.7))) / 2e-6
    assert g.d(0).value(xi).real == pytest.approx(fd.real, abs=1e-6)


def test_halfline_step_exact_values():
    s = SmoothstepHalflineProfile((1.0, 0.0), offset=0.5, scale=0.2)
    assert s.value((0.4, 0.0)) == 0.0
    assert s.value((0.8, 0.0)) == 1.0


def test_polynomial_derivative_is_exact():
    p = PolynomialProfile(2, {(2, 0): 3.0, (0, 1): 1.0 + 1.0j})
    dp = p.d(0)
    assert dp.value((2.0, 5.0)) == 12.0 + 0.0j
    assert p.d(1).value((2.0, 5.0)) == 1.0 + 1.0j


def test_product_short_circuits_on_exact_zero():
    window = RadialPlateauProfile(2, None, 0.2, 0.05)
    poly = PolynomialProfile(2, {(1, 0): 1.0})
    prod = ProductProfile([window, poly])
    assert prod.value((5.0, 0.0)) == 0.0


def test_product_derivative_obeys_leibniz():
    f = PolynomialProfile(1, {(1,): 1.0})
    g = GaussianBumpProfile((0.0,), 1.0)
    prod = ProductProfile([f, g])
    xi = (0.4,)
    expected = f.d(0).value(xi) * g.value(xi) + f.value(xi) * g.d(0).value(xi)
    assert prod.d(0).value(xi) == pytest.approx(expected, abs=1e-12)


def test_scale_profile_folds_into_polynomials():
    p = coordinate_profile(2, 1)
    scaled = scale_profile(2.0j, p)
    assert isinstance(scaled, PolynomialProfile)
    assert scaled.value((0.0, 3.0)) == 6.0j
    generic = scale_profile(0.5, GaussianBumpProfile((0.0, 0.0), 1.0))
    assert generic.value((0.0, 0.0)) == 0.5


def test_conjugate_profile_flips_imaginary_parts():
    p = constant_profile(2, 1.0 - 2.0j)
    assert conjugate_profile(p).value((0.0, 0.0)) == 1.0 + 2.0j


@pytest.mark.parametrize(
    "profile",
    [
        PolynomialProfile(2, {(2, 0): 1.5, (0, 1): -1.0j}),
        GaussianBumpProfile((0.5, -0.5), (1.0, 2.0)),
        SmoothstepHalflineProfile((0.0, 1.0), offset=-0.3, scale=0.4),
        RadialPlateauProfile(2, 0.5, 1.5, 0.25),
        RadialPlateauProfile(2, None, 0.2, 0.05, rows=[[1.0, 1.0]], center=(0.7,)),
        AngularWindowProfile([[1.0, 0.0], [0.0, 1.0]], (0.0, 1.0), 0.9, 0.7),
        ProductProfile(
            [RadialPlateauProfile(2, 0.5, 1.5, 0.25), coordinate_profile(2, 0)]
        ),
    ],
)
def test_spec_round_trip_preserves_values(profile):
    clone = profile_from_spec(profile.spec(), dim=2)
    for xi in ((0.0, 0.0), (0.8, 0.1), (-1.2, 1.4), (0.3, -0.9)):
        assert clone.value(xi) == profile.value(xi)


def test_derived_profiles_refuse_to_serialize():
    with pytest.raises(SerializationError):
        SumProfile([constant_profile(1, 1.0), constant_profile(1, 2.0)]).spec()
    with pytest.raises(SerializationError):
        CallableProfile(1, lambda xi: xi[0]).spec()
    with pytest.raises(SerializationError):
        profile_from_spec({"kind": "no-such-profile"}, dim=1)


def test_numeric_derivative_fallback_is_close():
    c = CallableProfile(1, lambda xi: math.sin(xi[0]))
    assert c.d(0).value((0.7,)).real == pytest.approx(math.cos(0.7), abs=1e-6)
