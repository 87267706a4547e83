"""Experiment configuration: JSON files in, validated objects out.

Every section rejects unknown keys so a typo fails loudly (exit code 2 at the
command line) instead of silently running defaults.  Builders turn the
validated sections into the package's working objects.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .coisotropic import LinearCoisotropic
from .fields import (
    SemiclassicalFamily,
    make_plane_wave_family,
    make_uk_family,
    make_wavepacket_family,
    make_zero_family,
)
from .hamilton import PrincipalSymbol, free_particle, linear_drift, quartic_radial
from .quantize import QuantizationKind
from .wavefront import ClassifyConfig, ProbePoint, ProbeWidths

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "load_config",
    "build_family",
    "build_coisotropic",
    "build_symbol",
    "build_widths",
    "build_thresholds",
    "build_probe_point",
]


class ConfigError(ValueError):
    """Malformed or contradictory configuration input."""


def _check_keys(d: dict, allowed, where: str) -> None:
    unknown = sorted(set(d) - set(allowed))
    if unknown:
        raise ConfigError(f"unknown key(s) {unknown} in {where}; allowed: {sorted(allowed)}")


def _floats(v, where: str) -> tuple[float, ...]:
    try:
        return tuple(float(c) for c in v)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where} must be a list of numbers") from exc


def _ints(v, where: str) -> tuple[int, ...]:
    try:
        return tuple(int(c) for c in v)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where} must be a list of integers") from exc


_FAMILY_KEYS = {"kind", "n", "ks", "m0", "h", "x_center", "width", "mode_radius", "label"}


def build_family(d: dict) -> SemiclassicalFamily:
    _check_keys(d, _FAMILY_KEYS, "family")
    kind = d.get("kind")
    label = d.get("label")
    try:
        if kind == "uk":
            return make_uk_family(int(d["n"]), _ints(d["ks"], "family.ks"), label=label)
        if kind == "plane-wave":
            return make_plane_wave_family(
                _ints(d["m0"], "family.m0"), _floats(d["h"], "family.h"), label=label
            )
        if kind == "wavepacket":
            return make_wavepacket_family(
                _floats(d["x_center"], "family.x_center"),
                _ints(d["m0"], "family.m0"),
                float(d["width"]),
                _floats(d["h"], "family.h"),
                mode_radius=int(d.get("mode_radius", 6)),
                label=label,
            )
        if kind == "zero":
            return make_zero_family(
                int(d["n"]), _floats(d["h"], "family.h"), label=label or "zero"
            )
    except KeyError as exc:
        raise ConfigError(f"family kind {kind!r} is missing required key {exc}") from exc
    except ValueError as exc:
        raise ConfigError(f"bad family section: {exc}") from exc
    raise ConfigError(f"unknown family kind {kind!r}")


_COISO_KEYS = {"dim", "v", "w", "completion"}


def build_coisotropic(d: dict) -> LinearCoisotropic:
    _check_keys(d, _COISO_KEYS, "coisotropic")
    try:
        return LinearCoisotropic(
            int(d["dim"]),
            d["v"],
            d.get("w"),
            completion=d.get("completion", "standard"),
        )
    except KeyError as exc:
        raise ConfigError(f"coisotropic section is missing {exc}") from exc
    except ValueError as exc:
        raise ConfigError(f"bad coisotropic section: {exc}") from exc


_SYMBOL_KEYS = {"kind", "dim", "c"}


def build_symbol(d: dict) -> PrincipalSymbol:
    _check_keys(d, _SYMBOL_KEYS, "symbol")
    kind = d.get("kind")
    try:
        if kind == "free-particle":
            return free_particle(int(d["dim"]))
        if kind == "quartic-radial":
            return quartic_radial(int(d["dim"]))
        if kind == "linear-drift":
            return linear_drift(_floats(d["c"], "symbol.c"))
    except KeyError as exc:
        raise ConfigError(f"symbol kind {kind!r} is missing required key {exc}") from exc
    raise ConfigError(f"unknown symbol kind {kind!r}")


_WIDTH_KEYS = {
    "x_band",
    "x_sigma",
    "xi_radius",
    "xi_ramp",
    "angular_radius",
    "angular_ramp",
    "xipp_radius",
    "xipp_ramp",
    "rho_max",
    "rho_ramp",
}


def build_widths(d: dict | None) -> ProbeWidths:
    if not d:
        return ProbeWidths()
    _check_keys(d, _WIDTH_KEYS, "probe")
    try:
        return ProbeWidths(**d)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad probe section: {exc}") from exc


_THRESHOLD_KEYS = {
    "eps_slope",
    "norm_floor",
    "residual_tol",
    "min_nonzero",
    "m_max",
    "quantization",
}

_QUANT_NAMES = {k.value: k for k in QuantizationKind}


def build_thresholds(d: dict | None) -> ClassifyConfig:
    if not d:
        return ClassifyConfig()
    _check_keys(d, _THRESHOLD_KEYS, "thresholds")
    kw = dict(d)
    if "quantization" in kw:
        name = kw["quantization"]
        if name not in _QUANT_NAMES:
            raise ConfigError(
                f"unknown quantization {name!r}; choose from {sorted(_QUANT_NAMES)}"
            )
        kw["quantization"] = _QUANT_NAMES[name]
    try:
        return ClassifyConfig(**kw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad thresholds section: {exc}") from exc


_POINT_KEYS = {"kind", "x0", "xi0", "gamma0", "xi_pp0"}


def build_probe_point(
    d: dict,
    C: LinearCoisotropic | None = None,
    widths: ProbeWidths | None = None,
) -> ProbePoint:
    _check_keys(d, _POINT_KEYS, "probe point")
    kind = d.get("kind")
    try:
        if kind == "interior":
            return ProbePoint.interior(
                _floats(d["x0"], "x0"), _floats(d["xi0"], "xi0"), widths
            )
        if kind == "boundary":
            if C is None:
                raise ConfigError("boundary probe point needs a coisotropic section")
            return ProbePoint.boundary(
                _floats(d["x0"], "x0"),
                _floats(d["gamma0"], "gamma0"),
                _floats(d["xi_pp0"], "xi_pp0"),
                C,
                widths,
            )
    except KeyError as exc:
        raise ConfigError(f"probe point is missing required key {exc}") from exc
    except ValueError as exc:
        raise ConfigError(f"bad probe point: {exc}") from exc
    raise ConfigError(f"unknown probe point kind {kind!r}")


_SCAN_KEYS = {"mode", "lo", "hi", "spacing", "n_angles", "x0"}
_ORDERS_KEYS = {"m", "l"}
_REG_KEYS = {"s", "k_max", "exponent_tol", "ratio_tol"}
_FLOW_KEYS = {"t", "dt", "field", "collar", "leading_orders", "first_orders", "energy", "certify_slope"}
_START_KEYS = {"x0", "rho", "gamma", "normal"}
_EXPECT_KEYS = {"verdict", "order", "n_present", "n_absent", "n_inconclusive"}

_TOP_KEYS = {
    "family",
    "coisotropic",
    "symbol",
    "probe",
    "probe_point",
    "thresholds",
    "orders",
    "scan",
    "regularity",
    "flow",
    "start",
    "seeds",
    "expect",
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated top-level configuration; sections stay as checked dicts.

    Builders materialize only the sections a given command needs, so one file
    can drive several commands.
    """

    raw: dict

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        if not isinstance(d, dict):
            raise ConfigError("top-level config must be a JSON object")
        _check_keys(d, _TOP_KEYS, "top level")
        for key, allowed in (
            ("scan", _SCAN_KEYS),
            ("orders", _ORDERS_KEYS),
            ("regularity", _REG_KEYS),
            ("flow", _FLOW_KEYS),
            ("start", _START_KEYS),
            ("expect", _EXPECT_KEYS),
        ):
            if key in d:
                if not isinstance(d[key], dict):
                    raise ConfigError(f"section {key!r} must be an object")
                _check_keys(d[key], allowed, key)
        if "seeds" in d and not isinstance(d["seeds"], list):
            raise ConfigError("section 'seeds' must be a list of probe points")
        return cls(d)

    def section(self, name: str) -> dict | None:
        return self.raw.get(name)

    def require(self, name: str) -> dict:
        got = self.raw.get(name)
        if got is None:
            raise ConfigError(f"config is missing the required section {name!r}")
        return got

    def family(self) -> SemiclassicalFamily:
        return build_family(self.require("family"))

    def coisotropic(self) -> LinearCoisotropic:
        return build_coisotropic(self.require("coisotropic"))

    def symbol(self) -> PrincipalSymbol:
        return build_symbol(self.require("symbol"))

    def widths(self) -> ProbeWidths:
        return build_widths(self.section("probe"))

    def thresholds(self) -> ClassifyConfig:
        return build_thresholds(self.section("thresholds"))

    def orders(self) -> tuple[float, float]:
        d = self.section("orders") or {}
        return float(d.get("m", 0.0)), float(d.get("l", 0.0))


def load_config(path) -> ExperimentConfig:
    """Read and validate a JSON config file."""
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {p}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {p} is not valid JSON: {exc}") from exc
    return ExperimentConfig.from_dict(data)
