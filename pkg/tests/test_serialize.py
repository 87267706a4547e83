import numpy as np
import pytest

from torusmicro.fields import TorusFunction, make_uk_family
from torusmicro.profiles import (
    CallableProfile,
    GaussianBumpProfile,
    ProductProfile,
    RadialPlateauProfile,
)
from torusmicro.quantize import Symbol, multiplier
from torusmicro.serialize import (
    SerializationError,
    family_from_dict,
    family_to_dict,
    function_from_dict,
    function_to_dict,
    load_json,
    save_json,
    symbol_from_dict,
    symbol_to_dict,
)


def sample_function() -> TorusFunction:
    rng = np.random.default_rng(42)
    coeffs = {}
    for _ in range(8):
        m = tuple(int(v) for v in rng.integers(-5, 6, 3))
        coeffs[m] = complex(rng.normal(), rng.normal())
    return TorusFunction(3, 5, coeffs)


def test_function_round_trip_is_bit_exact():
    u = sample_function()
    v = function_from_dict(function_to_dict(u))
    assert v.dim == u.dim and v.band == u.band
    assert v.coeffs == u.coeffs


def test_family_round_trip_is_bit_exact():
    fam = make_uk_family(3, [2, 4, 8])
    clone = family_from_dict(family_to_dict(fam))
    assert clone.label == fam.label
    assert clone.scales() == fam.scales()
    for (h1, u1), (h2, u2) in zip(fam, clone):
        assert h1 == h2
        assert u1.coeffs == u2.coeffs


def test_symbol_round_trip_preserves_values():
    window = ProductProfile(
        [
            RadialPlateauProfile(2, None, 0.5, 0.1, center=(1.0, 0.0)),
            GaussianBumpProfile((0.0, 0.0), 2.0),
        ]
    )
    a = Symbol(2, {(1, 0): window, (0, 0): GaussianBumpProfile((0.5, 0.5), 1.0)})
    b = symbol_from_dict(symbol_to_dict(a))
    assert sorted(b.x_modes) == sorted(a.x_modes)
    for xi in ((0.9, 0.1), (1.0, 0.0), (-0.4, 1.3)):
        for x in ((0.0, 0.0), (0.7, -0.2)):
            assert b.value(x, xi) == a.value(x, xi)


def test_symbol_with_callable_profile_refuses_to_serialize():
    a = multiplier(CallableProfile(1, lambda xi: xi[0] ** 2))
    with pytest.raises(SerializationError):
        symbol_to_dict(a)


def test_save_json_is_deterministic(tmp_path):
    obj = function_to_dict(sample_function())
    p1 = tmp_path / "a.json"
    p2 = tmp_path / "b.json"
    save_json(p1, obj)
    save_json(p2, obj)
    b1, b2 = p1.read_bytes(), p2.read_bytes()
    assert b1 == b2
    assert b1.endswith(b"\n")
    assert load_json(p1) == obj


def test_save_load_round_trip_through_disk(tmp_path):
    u = sample_function()
    path = tmp_path / "fn.json"
    save_json(path, function_to_dict(u))
    v = function_from_dict(load_json(path))
    assert v.coeffs == u.coeffs
