"""Frequency-space profiles: the coefficient functions of operator symbols.

A symbol a(x, xi) = sum_k a_k(xi) e^{i k.x} stores one profile per x-mode k.
Profiles are closed-form objects supporting pointwise evaluation, closed-form
xi-derivatives where available (numeric central differences otherwise), and a
serializable description for the public vocabulary.

The step functions here are C-infinity with *exact* 0/1 values outside their
ramp, so window profiles vanish identically away from their support; frequency
cells far from a family's mass then produce exactly-zero norms instead of
exponentially small tails.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

__all__ = [
    "Profile",
    "PolynomialProfile",
    "GaussianBumpProfile",
    "SmoothstepHalflineProfile",
    "RadialPlateauProfile",
    "AngularWindowProfile",
    "ProductProfile",
    "SumProfile",
    "CallableProfile",
    "smoothstep",
    "smoothstep_slope",
    "constant_profile",
    "coordinate_profile",
    "scale_profile",
    "SerializationError",
    "profile_from_spec",
]


class SerializationError(ValueError):
    """Raised when a profile has no serializable description."""


def smoothstep(t: float) -> float:
    """C-infinity step: exactly 0 for t <= 0, exactly 1 for t >= 1.

    Uses the classic bump quotient f(t) / (f(t) + f(1-t)) with f(t) = e^{-1/t}.
    """
    if t <= 0.0:
        return 0.0
    if t >= 1.0:
        return 1.0
    f = math.exp(-1.0 / t)
    g = math.exp(-1.0 / (1.0 - t))
    return f / (f + g)


def smoothstep_slope(t: float) -> float:
    """Derivative of :func:`smoothstep`; exactly 0 outside (0, 1)."""
    if t <= 0.0 or t >= 1.0:
        return 0.0
    f = math.exp(-1.0 / t)
    g = math.exp(-1.0 / (1.0 - t))
    s = f + g
    return f * g * (1.0 / (t * t) + 1.0 / ((1.0 - t) * (1.0 - t))) / (s * s)


def _dot(a: Sequence[float], b: Sequence[float]) -> float:
    return sum(x * y for x, y in zip(a, b))


class Profile:
    """Base class: a complex-valued function of xi in R^dim."""

    dim: int

    def value(self, xi: Sequence[float]) -> complex:
        raise NotImplementedError

    def d(self, axis: int) -> "Profile":
        """Partial derivative in xi_axis; numeric fallback with a relative step."""
        return _NumericDerivative(self, axis)

    def spec(self) -> dict:
        raise SerializationError(f"{type(self).__name__} has no serialized form")


@dataclass(frozen=True)
class _NumericDerivative(Profile):
    base: Profile
    axis: int
    step_scale: float = 1e-5

    @property
    def dim(self) -> int:  # type: ignore[override]
        return self.base.dim

    def value(self, xi: Sequence[float]) -> complex:
        xi = list(xi)
        h = self.step_scale * (1.0 + math.sqrt(_dot(xi, xi)))
        hi = list(xi)
        lo = list(xi)
        hi[self.axis] += h
        lo[self.axis] -= h
        return (self.base.value(hi) - self.base.value(lo)) / (2.0 * h)


class PolynomialProfile(Profile):
    """Polynomial in xi with complex coefficients, stored term by term."""

    def __init__(self, dim: int, terms: dict[tuple[int, ...], complex]):
        self.dim = dim
        clean: dict[tuple[int, ...], complex] = {}
        for exps, c in terms.items():
            e = tuple(int(v) for v in exps)
            if len(e) != dim or any(v < 0 for v in e):
                raise ValueError(f"bad exponent tuple {e} for dim {dim}")
            c = complex(c)
            if c != 0:
                clean[e] = clean.get(e, 0.0 + 0.0j) + c
        self.terms = clean

    def value(self, xi: Sequence[float]) -> complex:
        total = 0.0 + 0.0j
        for exps, c in self.terms.items():
            prod = 1.0
            for x, e in zip(xi, exps):
                if e:
                    prod *= x**e
            total += c * prod
        return total

    def d(self, axis: int) -> "PolynomialProfile":
        out: dict[tuple[int, ...], complex] = {}
        for exps, c in self.terms.items():
            e = exps[axis]
            if e == 0:
                continue
            new = list(exps)
            new[axis] = e - 1
            key = tuple(new)
            out[key] = out.get(key, 0.0 + 0.0j) + e * c
        return PolynomialProfile(self.dim, out)

    def spec(self) -> dict:
        terms = sorted((list(e), c.real, c.imag) for e, c in self.terms.items())
        return {"kind": "polynomial", "terms": [[e, re, im] for e, re, im in terms]}


def constant_profile(dim: int, c: complex) -> PolynomialProfile:
    return PolynomialProfile(dim, {(0,) * dim: complex(c)})


def coordinate_profile(dim: int, axis: int, power: int = 1) -> PolynomialProfile:
    exps = [0] * dim
    exps[axis] = power
    return PolynomialProfile(dim, {tuple(exps): 1.0 + 0.0j})


class GaussianBumpProfile(Profile):
    """exp(-sum_i (xi_i - c_i)^2 / (2 w_i^2)) with per-axis widths."""

    def __init__(self, center: Sequence[float], width: Sequence[float] | float):
        self.center = tuple(float(c) for c in center)
        self.dim = len(self.center)
        if isinstance(width, (int, float)):
            width = (float(width),) * self.dim
        self.width = tuple(float(w) for w in width)
        if len(self.width) != self.dim or any(w <= 0 for w in self.width):
            raise ValueError("widths must be positive, one per axis")

    def value(self, xi: Sequence[float]) -> complex:
        q = 0.0
        for x, c, w in zip(xi, self.center, self.width):
            t = (x - c) / w
            q += t * t
        return complex(math.exp(-0.5 * q))

    def d(self, axis: int) -> Profile:
        # d/dxi_a exp(...) = -(xi_a - c_a)/w_a^2 * exp(...)
        w2 = self.width[axis] ** 2
        lin = [0] * self.dim
        lin[axis] = 1
        factor = PolynomialProfile(
            self.dim,
            {tuple(lin): -1.0 / w2, (0,) * self.dim: self.center[axis] / w2},
        )
        return ProductProfile([factor, self])

    def spec(self) -> dict:
        return {
            "kind": "gaussian-bump",
            "center": list(self.center),
            "width": list(self.width),
        }


class SmoothstepHalflineProfile(Profile):
    """smoothstep((direction.xi - offset) / scale).

    Exactly 0 where direction.xi <= offset and exactly 1 where
    direction.xi >= offset + scale.
    """

    def __init__(self, direction: Sequence[float], offset: float = 0.0, scale: float = 1.0):
        self.direction = tuple(float(c) for c in direction)
        self.dim = len(self.direction)
        self.offset = float(offset)
        self.scale = float(scale)
        if self.scale <= 0:
            raise ValueError("scale must be positive")

    def _t(self, xi: Sequence[float]) -> float:
        return (_dot(self.direction, xi) - self.offset) / self.scale

    def value(self, xi: Sequence[float]) -> complex:
        return complex(smoothstep(self._t(xi)))

    def d(self, axis: int) -> Profile:
        c = self.direction[axis] / self.scale
        if c == 0.0:
            return constant_profile(self.dim, 0.0)
        return ProductProfile(
            [constant_profile(self.dim, c), _SmoothstepRampSlope(self)]
        )

    def spec(self) -> dict:
        return {
            "kind": "smoothstep-halfline",
            "direction": list(self.direction),
            "offset": self.offset,
            "scale": self.scale,
        }


@dataclass(frozen=True)
class _SmoothstepRampSlope(Profile):
    """smoothstep_slope at the parent halfline's argument (internal)."""

    parent: SmoothstepHalflineProfile

    @property
    def dim(self) -> int:  # type: ignore[override]
        return self.parent.dim

    def value(self, xi: Sequence[float]) -> complex:
        return complex(smoothstep_slope(self.parent._t(xi)))


class RadialPlateauProfile(Profile):
    """Plateau window in r = |A xi - center| (or |xi - center| without rows).

    Value is exactly 1 on [lo+ramp, hi-ramp] and exactly 0 outside [lo, hi];
    either edge may be omitted (None) for one-sided windows.  The optional
    center lives in the projected space, so its length is the number of rows
    (or dim when no rows are given).
    """

    def __init__(
        self,
        dim: int,
        lo: float | None,
        hi: float | None,
        ramp: float,
        rows: Sequence[Sequence[float]] | None = None,
        center: Sequence[float] | None = None,
    ):
        self.dim = dim
        self.lo = None if lo is None else float(lo)
        self.hi = None if hi is None else float(hi)
        self.ramp = float(ramp)
        if self.ramp <= 0:
            raise ValueError("ramp must be positive")
        if rows is None:
            self.rows = None
        else:
            self.rows = tuple(tuple(float(c) for c in row) for row in rows)
            if any(len(row) != dim for row in self.rows):
                raise ValueError("row length must equal dim")
        if center is None:
            self.center = None
        else:
            self.center = tuple(float(c) for c in center)
            want = dim if self.rows is None else len(self.rows)
            if len(self.center) != want:
                raise ValueError(
                    f"center length {len(self.center)} != projected dim {want}"
                )

    def _radius(self, xi: Sequence[float]) -> float:
        if self.rows is None:
            proj = list(xi)
        else:
            proj = [_dot(row, xi) for row in self.rows]
        if self.center is not None:
            proj = [p - c for p, c in zip(proj, self.center)]
        return math.sqrt(_dot(proj, proj))

    def value(self, xi: Sequence[float]) -> complex:
        r = self._radius(xi)
        v = 1.0
        if self.lo is not None:
            v *= smoothstep((r - self.lo) / self.ramp)
        if self.hi is not None and v != 0.0:
            v *= smoothstep((self.hi - r) / self.ramp)
        return complex(v)

    def spec(self) -> dict:
        return {
            "kind": "radial-plateau",
            "lo": self.lo,
            "hi": self.hi,
            "ramp": self.ramp,
            "rows": None if self.rows is None else [list(r) for r in self.rows],
            "center": None if self.center is None else list(self.center),
        }


class AngularWindowProfile(Profile):
    """Window in the direction of xi' = rows.xi around a unit vector `center`.

    With c = <xi'/|xi'|, center>, the value is exactly 1 for c >= cos_inner,
    exactly 0 for c <= cos_outer, and a smoothstep ramp in between.  At
    xi' = 0 the direction is undefined and the window evaluates to 0 (or to 1
    for the trivial full-sphere window cos_outer <= -1).
    """

    def __init__(
        self,
        rows: Sequence[Sequence[float]],
        center: Sequence[float],
        cos_inner: float,
        cos_outer: float,
    ):
        self.rows = tuple(tuple(float(c) for c in row) for row in rows)
        self.dim = len(self.rows[0])
        if any(len(row) != self.dim for row in self.rows):
            raise ValueError("ragged rows")
        self.center = tuple(float(c) for c in center)
        if len(self.center) != len(self.rows):
            raise ValueError("center length must equal the number of rows")
        norm = math.sqrt(_dot(self.center, self.center))
        if abs(norm - 1.0) > 1e-9:
            raise ValueError(f"center must be a unit vector, |center|={norm}")
        self.cos_inner = float(cos_inner)
        self.cos_outer = float(cos_outer)
        if not self.cos_outer < self.cos_inner and not self.cos_outer <= -1.0:
            raise ValueError("need cos_outer < cos_inner (or a full-sphere window)")

    def value(self, xi: Sequence[float]) -> complex:
        if self.cos_outer <= -1.0 and self.cos_inner <= -1.0:
            return 1.0 + 0.0j
        proj = [_dot(row, xi) for row in self.rows]
        rho = math.sqrt(_dot(proj, proj))
        if rho == 0.0:
            return 0.0 + 0.0j
        c = _dot(proj, self.center) / rho
        if c >= self.cos_inner:
            return 1.0 + 0.0j
        if c <= self.cos_outer:
            return 0.0 + 0.0j
        return complex(smoothstep((c - self.cos_outer) / (self.cos_inner - self.cos_outer)))

    def spec(self) -> dict:
        return {
            "kind": "angular-window",
            "rows": [list(r) for r in self.rows],
            "center": list(self.center),
            "cos_inner": self.cos_inner,
            "cos_outer": self.cos_outer,
        }


class ProductProfile(Profile):
    """Pointwise product of factor profiles."""

    def __init__(self, factors: Sequence[Profile]):
        factors = list(factors)
        if not factors:
            raise ValueError("empty product")
        dims = {p.dim for p in factors}
        if len(dims) != 1:
            raise ValueError(f"mixed dims in product: {sorted(dims)}")
        self.factors = factors
        self.dim = factors[0].dim

    def value(self, xi: Sequence[float]) -> complex:
        total = 1.0 + 0.0j
        for p in self.factors:
            total *= p.value(xi)
            if total == 0.0:
                return 0.0 + 0.0j
        return total

    def d(self, axis: int) -> Profile:
        terms = []
        for i, p in enumerate(self.factors):
            rest = self.factors[:i] + self.factors[i + 1 :]
            terms.append(ProductProfile([p.d(axis)] + rest) if rest else p.d(axis))
        return SumProfile(terms)

    def spec(self) -> dict:
        return {"kind": "product", "factors": [p.spec() for p in self.factors]}


class SumProfile(Profile):
    """Pointwise sum; arises from Leibniz terms, not part of the vocabulary."""

    def __init__(self, terms: Sequence[Profile]):
        terms = list(terms)
        if not terms:
            raise ValueError("empty sum")
        dims = {p.dim for p in terms}
        if len(dims) != 1:
            raise ValueError(f"mixed dims in sum: {sorted(dims)}")
        self.terms = terms
        self.dim = terms[0].dim

    def value(self, xi: Sequence[float]) -> complex:
        return sum((p.value(xi) for p in self.terms), 0.0 + 0.0j)

    def d(self, axis: int) -> Profile:
        return SumProfile([p.d(axis) for p in self.terms])


class CallableProfile(Profile):
    """Wrap an arbitrary callable xi -> complex (not serializable)."""

    def __init__(self, dim: int, fn, label: str = "callable"):
        self.dim = dim
        self.fn = fn
        self.label = label

    def value(self, xi: Sequence[float]) -> complex:
        return complex(self.fn(xi))


class _ConjugateProfile(Profile):
    def __init__(self, base: Profile):
        self.base = base
        self.dim = base.dim

    def value(self, xi: Sequence[float]) -> complex:
        return self.base.value(xi).conjugate()

    def d(self, axis: int) -> Profile:
        return _ConjugateProfile(self.base.d(axis))

    def spec(self) -> dict:
        base = self.base.spec()
        return {"kind": "conjugate", "base": base}


def conjugate_profile(p: Profile) -> Profile:
    """Profile whose values are the complex conjugates of p's."""
    if isinstance(p, _ConjugateProfile):
        return p.base
    return _ConjugateProfile(p)


def scale_profile(c: complex, p: Profile) -> Profile:
    """c * p as a profile; folds into polynomials when possible."""
    c = complex(c)
    if isinstance(p, PolynomialProfile):
        return PolynomialProfile(p.dim, {e: c * v for e, v in p.terms.items()})
    return ProductProfile([constant_profile(p.dim, c), p])


def profile_from_spec(spec: dict, dim: int) -> Profile:
    """Rebuild a profile from its serialized description."""
    kind = spec.get("kind")
    if kind == "polynomial":
        terms = {tuple(e): complex(re, im) for e, re, im in spec["terms"]}
        return PolynomialProfile(dim, terms)
    if kind == "gaussian-bump":
        return GaussianBumpProfile(spec["center"], spec["width"])
    if kind == "smoothstep-halfline":
        return SmoothstepHalflineProfile(spec["direction"], spec["offset"], spec["scale"])
    if kind == "radial-plateau":
        return RadialPlateauProfile(
            dim, spec["lo"], spec["hi"], spec["ramp"], spec["rows"], spec.get("center")
        )
    if kind == "angular-window":
        return AngularWindowProfile(
            spec["rows"], spec["center"], spec["cos_inner"], spec["cos_outer"]
        )
    if kind == "product":
        return ProductProfile([profile_from_spec(s, dim) for s in spec["factors"]])
    if kind == "conjugate":
        return conjugate_profile(profile_from_spec(spec["base"], dim))
    raise SerializationError(f"unknown profile kind {kind!r}")
