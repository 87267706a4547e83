"""JSON round-trip for functions, families, and symbols.

Floats are written with Python's shortest round-trip repr, so save/load is
bit-exact.  Symbols serialize through each profile's closed-form description;
derived profiles (numeric derivatives, Leibniz sums, raw callables) have no
such description and raise SerializationError rather than saving something
that would reload as a different function.
"""

from __future__ import annotations

import json
from pathlib import Path

from .fields import SemiclassicalFamily, TorusFunction
from .profiles import SerializationError, profile_from_spec
from .quantize import Symbol

__all__ = [
    "SerializationError",
    "function_to_dict",
    "function_from_dict",
    "family_to_dict",
    "family_from_dict",
    "symbol_to_dict",
    "symbol_from_dict",
    "save_json",
    "load_json",
]


def function_to_dict(u: TorusFunction) -> dict:
    coeffs = [[list(m), c.real, c.imag] for m, c in sorted(u.coeffs.items())]
    return {"dim": u.dim, "band": u.band, "coeffs": coeffs}


def function_from_dict(d: dict) -> TorusFunction:
    coeffs = {tuple(m): complex(re, im) for m, re, im in d["coeffs"]}
    return TorusFunction(d["dim"], d["band"], coeffs)


def family_to_dict(fam: SemiclassicalFamily) -> dict:
    return {
        "label": fam.label,
        "entries": [{"h": h, "function": function_to_dict(u)} for h, u in fam],
    }


def family_from_dict(d: dict) -> SemiclassicalFamily:
    entries = tuple(
        (e["h"], function_from_dict(e["function"])) for e in d["entries"]
    )
    return SemiclassicalFamily(entries, label=d.get("label", ""))


def symbol_to_dict(a: Symbol) -> dict:
    """Serialized symbol; raises SerializationError for derived profiles."""
    modes = []
    for k, prof in sorted(a.x_modes.items()):
        modes.append([list(k), prof.spec()])
    return {
        "dim": a.dim,
        "orders": [a.orders[0], a.orders[1]],
        "modes": modes,
        "support_hint": a.support_hint,
    }


def symbol_from_dict(d: dict) -> Symbol:
    x_modes = {tuple(k): profile_from_spec(spec, d["dim"]) for k, spec in d["modes"]}
    orders = tuple(float(v) for v in d.get("orders", (0.0, 0.0)))
    return Symbol(d["dim"], x_modes, orders, d.get("support_hint"))


def save_json(path, obj: dict) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def load_json(path) -> dict:
    return json.loads(Path(path).read_text())
