"""Band-limited functions on the flat torus and semiclassical families.

Functions live on (R/2piZ)^n and are stored by their Fourier coefficients on
the integer lattice, so norms, multipliers and frequency-space windows are all
exact lattice sums.  The semiclassical frequency attached to a mode m at scale
h is xi = h*m.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

Mode = tuple[int, ...]

__all__ = [
    "TorusFunction",
    "SemiclassicalFamily",
    "l2_norm",
    "inner_product",
    "semiclassical_fourier",
    "make_uk",
    "make_uk_family",
    "make_plane_wave_family",
    "make_wavepacket_family",
    "make_zero_family",
]


def _as_mode(m, dim: int) -> Mode:
    mode = tuple(int(c) for c in m)
    if len(mode) != dim:
        raise ValueError(f"mode {mode} has length {len(mode)}, expected {dim}")
    return mode


@dataclass
class TorusFunction:
    """A trigonometric polynomial u(x) = sum_m c_m e^{i m.x} on the n-torus.

    Parameters
    ----------
    dim : int
        Spatial dimension n (>= 1).
    band : int
        Per-axis frequency radius; every stored mode m satisfies |m_i| <= band.
    coeffs : dict
        Sparse map from integer modes (length-`dim` tuples) to complex
        amplitudes.  Modes outside the map are identically zero.
    """

    dim: int
    band: int
    coeffs: dict[Mode, complex] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise ValueError(f"dim must be >= 1, got {self.dim}")
        if self.band < 0:
            raise ValueError(f"band must be >= 0, got {self.band}")
        clean: dict[Mode, complex] = {}
        for m, c in self.coeffs.items():
            mode = _as_mode(m, self.dim)
            if any(abs(c_i) > self.band for c_i in mode):
                raise ValueError(
                    f"mode {mode} exceeds the band box (band={self.band})"
                )
            clean[mode] = complex(c)
        self.coeffs = clean

    def amplitude(self, m) -> complex:
        """Fourier coefficient at mode m (zero when not stored)."""
        return self.coeffs.get(_as_mode(m, self.dim), 0.0 + 0.0j)

    def modes(self) -> list[Mode]:
        """Stored modes in lexicographic order."""
        return sorted(self.coeffs)

    def evaluate(self, x) -> complex:
        """Pointwise value sum_m c_m e^{i m.x} at a point x in R^n."""
        x = np.asarray(x, dtype=float)
        total = 0.0 + 0.0j
        for m, c in self.coeffs.items():
            total += c * complex(math.cos(float(np.dot(m, x))), math.sin(float(np.dot(m, x))))
        return total

    def translate(self, a) -> "TorusFunction":
        """The shifted function u(. - a); coefficients pick up phases e^{-i m.a}."""
        a = np.asarray(a, dtype=float)
        out = {
            m: c * complex(math.cos(-float(np.dot(m, a))), math.sin(-float(np.dot(m, a))))
            for m, c in self.coeffs.items()
        }
        return TorusFunction(self.dim, self.band, out)

    def __add__(self, other: "TorusFunction") -> "TorusFunction":
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        out = dict(self.coeffs)
        for m, c in other.coeffs.items():
            out[m] = out.get(m, 0.0 + 0.0j) + c
        return TorusFunction(self.dim, max(self.band, other.band), out)

    def __sub__(self, other: "TorusFunction") -> "TorusFunction":
        return self + (-1.0) * other

    def __rmul__(self, scalar) -> "TorusFunction":
        return TorusFunction(
            self.dim, self.band, {m: scalar * c for m, c in self.coeffs.items()}
        )


def l2_norm(u: TorusFunction) -> float:
    """L2 norm of u; by orthonormality of e^{i m.x}, the root sum of |c_m|^2."""
    return math.sqrt(sum((c.real * c.real + c.imag * c.imag) for c in u.coeffs.values()))


def inner_product(u: TorusFunction, v: TorusFunction) -> complex:
    """L2 pairing <u, v> = sum_m u_m conj(v_m), linear in the first slot."""
    if u.dim != v.dim:
        raise ValueError("dimension mismatch")
    small, big = (u.coeffs, v.coeffs) if len(u.coeffs) <= len(v.coeffs) else (v.coeffs, u.coeffs)
    total = 0.0 + 0.0j
    for m, c in small.items():
        d = big.get(m)
        if d is not None:
            total += (c * d.conjugate()) if small is u.coeffs else (d * c.conjugate())
    return total


def semiclassical_fourier(u: TorusFunction, h: float) -> dict[tuple[float, ...], complex]:
    """Coefficients indexed by semiclassical frequency xi = h*m."""
    if not 0.0 < h:
        raise ValueError(f"h must be positive, got {h}")
    return {tuple(h * c for c in m): amp for m, amp in u.coeffs.items()}


@dataclass
class SemiclassicalFamily:
    """An h-indexed family of torus functions with strictly decreasing scales.

    Parameters
    ----------
    entries : sequence of (h, TorusFunction)
        Scales must lie in (0, 1), strictly decrease, and share one dimension.
    label : str
        Name used in reports and serialized output.
    """

    entries: tuple[tuple[float, TorusFunction], ...]
    label: str = ""

    def __post_init__(self) -> None:
        entries = tuple((float(h), u) for h, u in self.entries)
        if not entries:
            raise ValueError("a family needs at least one entry")
        dims = {u.dim for _, u in entries}
        if len(dims) != 1:
            raise ValueError(f"mixed dimensions in family: {sorted(dims)}")
        for h, _ in entries:
            if not 0.0 < h < 1.0:
                raise ValueError(f"scale h={h} outside (0, 1)")
        hs = [h for h, _ in entries]
        if any(h2 >= h1 for h1, h2 in zip(hs, hs[1:])):
            raise ValueError("scales must strictly decrease")
        self.entries = entries

    @property
    def dim(self) -> int:
        return self.entries[0][1].dim

    def scales(self) -> list[float]:
        return [h for h, _ in self.entries]

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)


def make_uk(n: int, k: int) -> tuple[float, TorusFunction]:
    """Single-mode quasimode of the unit-sphere dispersion relation.

    Returns the pair (h_k, u_k) where u_k(x) = exp(i(k(x_1+...+x_{n-1}) + k^2 x_n))
    and h_k = ((n-1)k^2 + k^4)^{-1/2}, so the semiclassical frequency h_k*m_k
    sits exactly on the unit sphere.

    Parameters
    ----------
    n : int
        Dimension, at least 2.
    k : int
        Nonzero mode parameter; the sign fixes which diagonal direction the
        tangential frequency approaches.
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if k == 0:
        raise ValueError("k must be nonzero")
    mode = (k,) * (n - 1) + (k * k,)
    h = 1.0 / math.sqrt((n - 1) * k * k + k**4)
    u = TorusFunction(n, max(abs(k), k * k), {mode: 1.0 + 0.0j})
    return h, u


def make_uk_family(n: int, ks, label: str | None = None) -> SemiclassicalFamily:
    """Family of make_uk entries; |k| must strictly increase along `ks`."""
    entries = [make_uk(n, int(k)) for k in ks]
    if label is None:
        label = f"uk-n{n}"
    return SemiclassicalFamily(tuple(entries), label=label)


def _reciprocal_integer(h: float) -> int:
    j = round(1.0 / h)
    if j < 2 or abs(1.0 / h - j) > 1e-9:
        raise ValueError(f"h={h} is not the reciprocal of an integer >= 2")
    return j


def make_plane_wave_family(m0, h_schedule, label: str | None = None) -> SemiclassicalFamily:
    """Plane waves e^{i (m0/h).x} along a reciprocal-integer schedule h = 1/j.

    The frequency h * (j*m0) = m0 is pinned exactly for every scale.
    """
    m0 = tuple(int(c) for c in m0)
    if all(c == 0 for c in m0):
        raise ValueError("m0 must be nonzero")
    dim = len(m0)
    entries = []
    for h in h_schedule:
        j = _reciprocal_integer(float(h))
        mode = tuple(j * c for c in m0)
        band = max(abs(c) for c in mode)
        entries.append((1.0 / j, TorusFunction(dim, band, {mode: 1.0 + 0.0j})))
    if label is None:
        label = "plane-wave-" + ",".join(str(c) for c in m0)
    return SemiclassicalFamily(tuple(entries), label=label)


def make_wavepacket_family(
    x_center,
    m0,
    width: float,
    h_schedule,
    mode_radius: int = 6,
    label: str | None = None,
) -> SemiclassicalFamily:
    """Spatially localized packets with frequency mass near m0.

    Each member concentrates at x = x_center with Gaussian mode weights
    exp(-|delta|^2 / (2 width^2)) around the carrier j*m0 (h = 1/j), normalized
    to unit L2 norm.  Unlike plane waves these are not exact quasimodes of the
    unit-sphere dispersion relation; they serve as counterexample input.
    """
    m0 = tuple(int(c) for c in m0)
    dim = len(m0)
    x_center = np.asarray(x_center, dtype=float)
    if x_center.shape != (dim,):
        raise ValueError("x_center length must match m0")
    if width <= 0:
        raise ValueError("width must be positive")
    deltas = [()]
    for _ in range(dim):
        deltas = [d + (j,) for d in deltas for j in range(-mode_radius, mode_radius + 1)]
    entries = []
    for h in h_schedule:
        j = _reciprocal_integer(float(h))
        carrier = tuple(j * c for c in m0)
        coeffs: dict[Mode, complex] = {}
        for delta in deltas:
            w = math.exp(-sum(d * d for d in delta) / (2.0 * width * width))
            phase = -float(np.dot(delta, x_center))
            coeffs[tuple(c + d for c, d in zip(carrier, delta))] = w * complex(
                math.cos(phase), math.sin(phase)
            )
        band = max(abs(c) for m in coeffs for c in m)
        u = TorusFunction(dim, band, coeffs)
        scale = 1.0 / l2_norm(u)
        entries.append((1.0 / j, scale * u))
    if label is None:
        label = "wavepacket-" + ",".join(str(c) for c in m0)
    return SemiclassicalFamily(tuple(entries), label=label)


def make_zero_family(dim: int, h_schedule, label: str = "zero") -> SemiclassicalFamily:
    """The identically-zero family (every probe should report empty windows)."""
    entries = tuple((float(h), TorusFunction(dim, 0, {})) for h in h_schedule)
    return SemiclassicalFamily(entries, label=label)
