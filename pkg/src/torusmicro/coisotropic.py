"""Linear coisotropic submanifolds and iterated-regularity measurement.

A model coisotropic is cut out of the cotangent fibers by independent linear
constraints v_1.xi = ... = v_d.xi = 0.  The tangential operators B_j = v_j.hD
are exact Fourier multipliers m -> h*(v_j.m), so iterated regularity reduces
to weighted lattice sums:  a family is regular to order k when the rescaled
norms h^{-|beta|-s} ||B^beta u_h|| stay bounded for all |beta| <= k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product as _cartesian

import numpy as np

from .fields import SemiclassicalFamily, TorusFunction, l2_norm
from .fitting import fit_loglog

__all__ = [
    "LinearCoisotropic",
    "RegularityEntry",
    "RegularityReport",
    "characteristic_apply",
    "apply_generator_monomial",
    "regularity_norm",
    "regularity_order",
    "multi_indices",
]

_RANK_TOL = 1e-10


def _greedy_standard_completion(v: np.ndarray) -> np.ndarray:
    """Complete the rows of v to a basis using standard basis vectors.

    Scans e_1, ..., e_n in order and keeps those that enlarge the span; for
    integer v this keeps the stacked matrix integer-valued.
    """
    d, n = v.shape
    rows = [v[i] for i in range(d)]
    picked = []
    for i in range(n):
        e = np.zeros(n)
        e[i] = 1.0
        trial = np.vstack(rows + picked + [e])
        sv = np.linalg.svd(trial, compute_uv=False)
        if sv[-1] > _RANK_TOL * sv[0]:
            picked.append(e)
        if len(picked) == n - d:
            break
    return np.vstack(picked) if picked else np.zeros((0, n))


def _orthonormal_completion(v: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the orthogonal complement of span(v)."""
    d, n = v.shape
    _, _, vt = np.linalg.svd(v, full_matrices=True)
    return vt[d:]


class LinearCoisotropic:
    """Fiber-linear coisotropic data: constraint rows v and a completion w.

    Parameters
    ----------
    dim : int
        Torus dimension n.
    v : array-like, shape (d, n)
        Constraint rows; must have full rank d (relative SVD tolerance 1e-10).
    w : array-like, shape (n-d, n), optional
        Completion rows; the stacked (v; w) matrix must be invertible.  When
        omitted, rows are chosen by greedy standard-basis completion
        (integer-exact for integer v) or orthonormal completion.
    completion : {"standard", "orthonormal"}
        Strategy used when w is None.
    """

    def __init__(self, dim: int, v, w=None, completion: str = "standard"):
        v = np.atleast_2d(np.asarray(v, dtype=float))
        if v.shape[1] != dim:
            raise ValueError(f"v rows have length {v.shape[1]}, expected {dim}")
        d = v.shape[0]
        if not 1 <= d <= dim:
            raise ValueError(f"need 1 <= d <= {dim}, got d={d}")
        sv = np.linalg.svd(v, compute_uv=False)
        if sv[-1] <= _RANK_TOL * sv[0]:
            raise ValueError("constraint rows are numerically dependent")
        if w is None:
            if completion == "standard":
                w = _greedy_standard_completion(v)
            elif completion == "orthonormal":
                w = _orthonormal_completion(v)
            else:
                raise ValueError(f"unknown completion strategy {completion!r}")
        w = np.asarray(w, dtype=float).reshape(dim - d, dim)
        matrix = np.vstack([v, w]) if w.size else v
        sv_all = np.linalg.svd(matrix, compute_uv=False)
        if sv_all[-1] <= _RANK_TOL * sv_all[0]:
            raise ValueError("stacked (v; w) matrix is not invertible")
        self.dim = dim
        self.v = v
        self.w = w
        self.matrix = matrix
        self.inverse = np.linalg.inv(matrix)

    @property
    def codim(self) -> int:
        """Number of constraints d."""
        return self.v.shape[0]

    def xi_split(self, xi) -> tuple[np.ndarray, np.ndarray]:
        """Split a frequency into (v.xi, w.xi): vanishing part and the rest."""
        xi = np.asarray(xi, dtype=float)
        return self.v @ xi, self.w @ xi

    def xi_join(self, xi_tan, xi_norm) -> np.ndarray:
        """Inverse of :meth:`xi_split`."""
        stacked = np.concatenate([np.asarray(xi_tan, float), np.asarray(xi_norm, float)])
        return self.inverse @ stacked

    def __repr__(self) -> str:
        return f"LinearCoisotropic(dim={self.dim}, codim={self.codim})"


def characteristic_apply(
    C: LinearCoisotropic, j: int, u: TorusFunction, h: float
) -> TorusFunction:
    """Apply the tangential generator B_j = v_j . hD (j is 1-based).

    An exact multiplier: the coefficient at mode m scales by h*(v_j . m).
    """
    if not 1 <= j <= C.codim:
        raise ValueError(f"generator index {j} outside 1..{C.codim}")
    if h <= 0:
        raise ValueError(f"h must be positive, got {h}")
    row = C.v[j - 1]
    out = {}
    for m, c in u.coeffs.items():
        factor = h * float(np.dot(row, m))
        if factor != 0.0:
            out[m] = factor * c
    return TorusFunction(u.dim, u.band, out)


def apply_generator_monomial(
    C: LinearCoisotropic, beta, u: TorusFunction, h: float
) -> TorusFunction:
    """Apply B^beta = B_1^{beta_1} ... B_d^{beta_d} in one multiplier pass.

    The generators are commuting Fourier multipliers, so the ordering is
    immaterial and the monomial collapses to one weight per mode.
    """
    beta = tuple(int(b) for b in beta)
    if len(beta) != C.codim or any(b < 0 for b in beta):
        raise ValueError(f"bad multi-index {beta} for codim {C.codim}")
    out = {}
    for m, c in u.coeffs.items():
        weight = 1.0
        for j, b in enumerate(beta):
            if b:
                weight *= (h * float(np.dot(C.v[j], m))) ** b
        if weight != 0.0:
            out[m] = weight * c
    return TorusFunction(u.dim, u.band, out)


def regularity_norm(
    u: TorusFunction, C: LinearCoisotropic, k: float, s: float, h: float
) -> float:
    """Weighted norm h^{-s} || (1 + |v.xi|^2)^{k/2} u || at xi = h*m."""
    if h <= 0:
        raise ValueError(f"h must be positive, got {h}")
    total = 0.0
    for m, c in u.coeffs.items():
        tan = C.v @ np.asarray(m, dtype=float)
        weight = (1.0 + (h * h) * float(tan @ tan)) ** k
        total += weight * (c.real * c.real + c.imag * c.imag)
    return math.sqrt(total) * h ** (-s)


def multi_indices(d: int, k_max: int) -> list[tuple[int, ...]]:
    """All beta in N^d with |beta| <= k_max, graded lexicographic order."""
    out = []
    for total in range(k_max + 1):
        for beta in _cartesian(range(total + 1), repeat=d):
            if sum(beta) == total:
                out.append(beta)
    return out


@dataclass(frozen=True)
class RegularityEntry:
    """Measured data for one generator monomial B^beta."""

    beta: tuple[int, ...]
    values: tuple[tuple[float, float], ...]
    sup: float
    exponent: float
    bounded: bool


@dataclass(frozen=True)
class RegularityReport:
    """Iterated-regularity verdicts for a family against one coisotropic.

    order_verdicts[j] is True when every |beta| <= j stayed bounded; verdicts
    are monotone by construction (adding higher orders never changes lower
    ones).
    """

    family_label: str
    s: float
    k_max: int
    entries: tuple[RegularityEntry, ...]
    order_verdicts: tuple[bool, ...]
    exponent_tol: float
    ratio_tol: float

    def entry(self, beta) -> RegularityEntry:
        beta = tuple(int(b) for b in beta)
        for e in self.entries:
            if e.beta == beta:
                return e
        raise KeyError(f"no entry for beta={beta}")

    def coisotropic_order(self) -> int:
        """Largest j with a True verdict, or -1 when even order 0 fails."""
        best = -1
        for j, ok in enumerate(self.order_verdicts):
            if ok:
                best = j
            else:
                break
        return best

    def to_text(self) -> str:
        lines = [
            f"regularity report: family={self.family_label} s={self.s} k_max={self.k_max}",
            f"thresholds: exponent >= -{self.exponent_tol}, tail ratio <= {self.ratio_tol}",
            "beta | sup | exponent | bounded",
        ]
        for e in self.entries:
            exp = "inf" if math.isinf(e.exponent) else f"{e.exponent:.6f}"
            lines.append(
                f"{','.join(map(str, e.beta))} | {e.sup:.6e} | {exp} | {e.bounded}"
            )
        for j, ok in enumerate(self.order_verdicts):
            lines.append(f"order {j}: {'regular' if ok else 'fails'}")
        lines.append(f"coisotropic order: {self.coisotropic_order()}")
        return "\n".join(lines)

    def to_csv_rows(self) -> list[list[str]]:
        rows = [["beta", "h", "value", "exponent", "bounded"]]
        for e in self.entries:
            exp = "inf" if math.isinf(e.exponent) else repr(e.exponent)
            for h, val in e.values:
                rows.append(
                    ["+".join(map(str, e.beta)), repr(h), repr(val), exp, str(e.bounded)]
                )
        return rows


def regularity_order(
    fam: SemiclassicalFamily,
    C: LinearCoisotropic,
    s: float = 0.0,
    k_max: int = 3,
    exponent_tol: float = 0.1,
    ratio_tol: float = 1.2,
) -> RegularityReport:
    """Measure iterated regularity of a family to order k_max.

    For each multi-index beta the rescaled norms h^{-|beta|-s} ||B^beta u_h||
    are fitted against h; boundedness requires a fitted exponent >= -tol and a
    non-growing tail (consecutive ratios among the last three values <= tol).
    Identically-zero monomials are bounded trivially.

    Raises
    ------
    ValueError
        When the family has fewer than 5 scales (too short to fit).
    """
    if len(fam) < 5:
        raise ValueError(f"family too short for a fit: {len(fam)} < 5 scales")
    if fam.dim != C.dim:
        raise ValueError("family and coisotropic dimensions differ")
    entries = []
    for beta in multi_indices(C.codim, k_max):
        weight = -(sum(beta) + s)
        values = []
        for h, u in fam:
            values.append((h, (h**weight) * l2_norm(apply_generator_monomial(C, beta, u, h))))
        sup = max(v for _, v in values)
        fit = fit_loglog(values)
        if fit.is_sentinel:
            bounded = True
            exponent = math.inf
        else:
            exponent = fit.slope
            tail = [v for _, v in values[-3:]]
            ratios = []
            for prev, nxt in zip(tail, tail[1:]):
                if nxt == 0.0:
                    ratios.append(0.0)
                elif prev == 0.0:
                    ratios.append(math.inf)
                else:
                    ratios.append(nxt / prev)
            bounded = exponent >= -exponent_tol and all(r <= ratio_tol for r in ratios)
        entries.append(RegularityEntry(beta, tuple(values), sup, exponent, bounded))
    verdicts = []
    for j in range(k_max + 1):
        verdicts.append(all(e.bounded for e in entries if sum(e.beta) <= j))
    return RegularityReport(
        fam.label, s, k_max, tuple(entries), tuple(verdicts), exponent_tol, ratio_tol
    )
