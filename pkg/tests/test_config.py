import json

import pytest

from torusmicro.config import (
    ConfigError,
    ExperimentConfig,
    build_coisotropic,
    build_family,
    build_probe_point,
    build_symbol,
    build_thresholds,
    build_widths,
    load_config,
)
from torusmicro.fields import l2_norm
from torusmicro.quantize import QuantizationKind


def test_unknown_top_level_key_is_named():
    with pytest.raises(ConfigError, match="bogus"):
        ExperimentConfig.from_dict({"bogus": 1})


def test_unknown_section_key_is_named():
    with pytest.raises(ConfigError, match="windows"):
        ExperimentConfig.from_dict({"scan": {"mode": "interior", "windows": 3}})


def test_section_must_be_an_object():
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"scan": [1, 2]})


def test_seeds_must_be_a_list():
    with pytest.raises(ConfigError, match="seeds"):
        ExperimentConfig.from_dict({"seeds": {"kind": "interior"}})


def test_missing_required_section():
    cfg = ExperimentConfig.from_dict({})
    with pytest.raises(ConfigError, match="family"):
        cfg.family()


def test_build_family_uk():
    fam = build_family({"kind": "uk", "n": 3, "ks": [2, 4, 8]})
    assert fam.label == "uk-n3"
    assert len(fam) == 3


def test_build_family_plane_wave():
    fam = build_family({"kind": "plane-wave", "m0": [0, 1], "h": [0.125, 0.0625]})
    assert fam.scales() == [0.125, 0.0625]
    h, u = fam.entries[0]
    assert u.amplitude((0, 8)) == 1.0


def test_build_family_wavepacket():
    fam = build_family(
        {
            "kind": "wavepacket",
            "m0": [0, 1],
            "x_center": [0.0, 0.0],
            "h": [0.125],
            "width": 2.0,
            "mode_radius": 2,
        }
    )
    _, u = fam.entries[0]
    assert l2_norm(u) == pytest.approx(1.0, rel=1e-12)


def test_build_family_zero():
    fam = build_family({"kind": "zero", "n": 2, "h": [0.5, 0.25]})
    assert fam.label == "zero"
    assert all(not u.coeffs for _, u in fam)


def test_build_family_rejects_unknown_kind():
    with pytest.raises(ConfigError, match="unknown family kind"):
        build_family({"kind": "soliton"})


def test_build_family_reports_missing_key():
    with pytest.raises(ConfigError, match="ks"):
        build_family({"kind": "uk", "n": 3})


def test_build_family_wraps_value_errors():
    with pytest.raises(ConfigError, match="bad family section"):
        build_family({"kind": "plane-wave", "m0": [0, 1], "h": [0.3]})


def test_build_coisotropic():
    C = build_coisotropic({"dim": 3, "v": [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]})
    assert C.codim == 2
    with pytest.raises(ConfigError, match="bad coisotropic"):
        build_coisotropic({"dim": 3, "v": [[1.0, 0.0, 0.0], [2.0, 0.0, 0.0]]})
    with pytest.raises(ConfigError, match="extra"):
        build_coisotropic({"dim": 3, "v": [[1.0, 0.0, 0.0]], "extra": 1})


def test_build_symbol_kinds():
    assert build_symbol({"kind": "free-particle", "dim": 3}).dim == 3
    assert build_symbol({"kind": "quartic-radial", "dim": 2}).dim == 2
    drift = build_symbol({"kind": "linear-drift", "c": [0.3, -0.2, 0.5]})
    assert drift.dim == 3
    with pytest.raises(ConfigError, match="unknown symbol kind"):
        build_symbol({"kind": "harmonic"})
    with pytest.raises(ConfigError, match="c"):
        build_symbol({"kind": "linear-drift"})


def test_build_widths():
    assert build_widths(None).xi_radius == 0.2
    assert build_widths({"xi_radius": 0.1}).xi_radius == 0.1
    with pytest.raises(ConfigError, match="sigma"):
        build_widths({"sigma": 2.0})


def test_build_thresholds_quantization_names():
    assert build_thresholds(None).quantization is QuantizationKind.RIGHT
    assert build_thresholds({"quantization": "left"}).quantization is QuantizationKind.LEFT
    assert build_thresholds({"quantization": "weyl"}).quantization is QuantizationKind.WEYL
    with pytest.raises(ConfigError, match="middle"):
        build_thresholds({"quantization": "middle"})
    with pytest.raises(ConfigError, match="floor"):
        build_thresholds({"floor": 1e-9})


def test_build_probe_point_interior():
    pt = build_probe_point({"kind": "interior", "x0": [0.0, 0.0], "xi0": [0.0, 1.0]})
    assert pt.kind == "interior"
    assert pt.xi0 == (0.0, 1.0)


def test_build_probe_point_boundary_needs_coisotropic():
    d = {"kind": "boundary", "x0": [0.0] * 3, "gamma0": [1.0, 0.0], "xi_pp0": [1.0]}
    with pytest.raises(ConfigError, match="coisotropic"):
        build_probe_point(d)
    C = build_coisotropic({"dim": 3, "v": [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]})
    pt = build_probe_point(d, C)
    assert pt.kind == "boundary"
    bad = dict(d, gamma0=[2.0, 0.0])
    with pytest.raises(ConfigError, match="bad probe point"):
        build_probe_point(bad, C)
    with pytest.raises(ConfigError, match="unknown probe point kind"):
        build_probe_point({"kind": "corner", "x0": [0.0]})


def test_orders_accessor_defaults_and_override():
    assert ExperimentConfig.from_dict({}).orders() == (0.0, 0.0)
    cfg = ExperimentConfig.from_dict({"orders": {"m": 2, "l": -1}})
    assert cfg.orders() == (2.0, -1.0)


def test_load_config_round_trip(tmp_path):
    path = tmp_path / "exp.json"
    path.write_text(
        json.dumps({"family": {"kind": "uk", "n": 3, "ks": [2, 4]}})
    )
    cfg = load_config(path)
    assert len(cfg.family()) == 2


def test_load_config_rejects_bad_json(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    with pytest.raises(ConfigError, match="not valid JSON"):
        load_config(path)
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(tmp_path / "absent.json")
