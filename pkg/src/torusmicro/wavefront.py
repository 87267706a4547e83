"""Decay-rate detection of semiclassical mass, interior and at the boundary.

A probe is a localized symbol: a short trigonometric bump in x times an
exact-support window in frequency.  Applying its quantization to each member
of a family and fitting log ||Op(a) u_h|| against log h measures how fast the
family's mass leaves the probed cell.  Flat norms mean the cell carries mass
(PRESENT); fast decay, or an identically zero table, means it does not
(ABSENT, with the integer decay order or the +inf sentinel).

Interior probes window a ball in xi.  Boundary probes window an angular
sector of approach directions to the coisotropic, a ball in the conserved
frequencies, and a collar in the approach radius, which is how concentration
*at* the submanifold is separated by direction.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .charts import PolarPoint
from .coisotropic import LinearCoisotropic
from .fields import SemiclassicalFamily, l2_norm
from .fitting import FitResult, fit_loglog
from .hamilton import PrincipalSymbol, flow, taylor_split
from .profiles import (
    AngularWindowProfile,
    CallableProfile,
    ProductProfile,
    RadialPlateauProfile,
    scale_profile,
)
from .quantize import QuantizationKind, Symbol, apply, multiplier

__all__ = [
    "ProbeWidths",
    "ProbePoint",
    "probe_symbol",
    "ClassifyConfig",
    "DecayFit",
    "decay_fit",
    "WavefrontVerdict",
    "classify",
    "wf_scan",
    "interior_grid",
    "boundary_grid",
    "quasimode_defect_symbol",
    "PropagationRow",
    "PropagationReport",
    "verify_propagation",
]


@dataclass(frozen=True)
class ProbeWidths:
    """Geometry of the probe windows.

    The defaults are matched to unit-sphere concentration scanned on a grid of
    spacing 0.5 and eight angular sectors: each window's closed support stays
    clear of every neighboring grid cell for the mode tilts that occur at the
    scales in use, so off-cell probes return exactly zero instead of small
    tails.
    """

    x_band: int = 1
    x_sigma: float = 1.0
    xi_radius: float = 0.2
    xi_ramp: float = 0.05
    angular_radius: float = math.pi / 16
    angular_ramp: float = math.pi / 16
    xipp_radius: float = 0.2
    xipp_ramp: float = 0.05
    rho_max: float = 0.5
    rho_ramp: float = 0.1


def _fmt_vec(vals) -> str:
    return "(" + ", ".join(f"{float(c):.6g}" for c in vals) + ")"


@dataclass(frozen=True)
class ProbePoint:
    """Location of one probe; build via :meth:`interior` or :meth:`boundary`."""

    kind: str
    x0: tuple[float, ...]
    xi0: tuple[float, ...] | None = None
    gamma0: tuple[float, ...] | None = None
    xi_pp0: tuple[float, ...] | None = None
    C: LinearCoisotropic | None = None
    widths: ProbeWidths = ProbeWidths()

    def __post_init__(self) -> None:
        if self.kind == "interior":
            if self.xi0 is None or len(self.xi0) != len(self.x0):
                raise ValueError("interior probe needs xi0 with the x0 length")
        elif self.kind == "boundary":
            if self.C is None or self.gamma0 is None or self.xi_pp0 is None:
                raise ValueError("boundary probe needs C, gamma0, and xi_pp0")
            d = self.C.codim
            if len(self.gamma0) != d or len(self.xi_pp0) != self.C.dim - d:
                raise ValueError("gamma0/xi_pp0 lengths must match the coisotropic")
            if abs(math.sqrt(sum(c * c for c in self.gamma0)) - 1.0) > 1e-9:
                raise ValueError("gamma0 must be a unit vector")
        else:
            raise ValueError(f"unknown probe kind {self.kind!r}")

    @classmethod
    def interior(cls, x0, xi0, widths: ProbeWidths | None = None) -> "ProbePoint":
        return cls(
            "interior",
            tuple(float(c) for c in x0),
            xi0=tuple(float(c) for c in xi0),
            widths=widths or ProbeWidths(),
        )

    @classmethod
    def boundary(
        cls, x0, gamma0, xi_pp0, C: LinearCoisotropic, widths: ProbeWidths | None = None
    ) -> "ProbePoint":
        return cls(
            "boundary",
            tuple(float(c) for c in x0),
            gamma0=tuple(float(c) for c in gamma0),
            xi_pp0=tuple(float(c) for c in xi_pp0),
            C=C,
            widths=widths or ProbeWidths(),
        )

    @property
    def dim(self) -> int:
        return len(self.x0)

    def label(self) -> str:
        if self.kind == "interior":
            return f"interior x0={_fmt_vec(self.x0)} xi0={_fmt_vec(self.xi0)}"
        return (
            f"boundary x0={_fmt_vec(self.x0)} gamma0={_fmt_vec(self.gamma0)} "
            f"xipp0={_fmt_vec(self.xi_pp0)}"
        )


def _x_mode_box(dim: int, band: int) -> list[tuple[int, ...]]:
    modes: list[tuple[int, ...]] = [()]
    for _ in range(dim):
        modes = [m + (j,) for m in modes for j in range(-band, band + 1)]
    return modes


def probe_symbol(point: ProbePoint) -> Symbol:
    """Localized probe symbol at the given point.

    The x-part is a Gaussian-weighted trigonometric bump centered at x0; the
    xi-part is an exact-support plateau window (ball, or sector x ball x
    collar for boundary probes), shared by every x-mode.
    """
    n = point.dim
    w = point.widths
    if point.kind == "interior":
        window = RadialPlateauProfile(
            n, None, w.xi_radius, w.xi_ramp, rows=None, center=point.xi0
        )
    else:
        C = point.C
        assert C is not None
        sector = AngularWindowProfile(
            C.v,
            point.gamma0,
            cos_inner=math.cos(w.angular_radius),
            cos_outer=math.cos(w.angular_radius + w.angular_ramp),
        )
        conserved = RadialPlateauProfile(
            n, None, w.xipp_radius, w.xipp_ramp, rows=C.w, center=point.xi_pp0
        )
        collar = RadialPlateauProfile(n, None, w.rho_max, w.rho_ramp, rows=C.v)
        window = ProductProfile([sector, conserved, collar])
    x_modes = {}
    for j in _x_mode_box(n, w.x_band):
        weight = math.exp(-sum(c * c for c in j) / (2.0 * w.x_sigma**2))
        phase = -sum(jc * xc for jc, xc in zip(j, point.x0))
        x_modes[j] = scale_profile(weight * cmath.exp(1j * phase), window)
    return Symbol(n, x_modes, orders=(0.0, 0.0), support_hint=point.label())


@dataclass(frozen=True)
class ClassifyConfig:
    """Thresholds for turning a decay table into a verdict.

    eps_slope is the margin by which the fitted slope must beat the required
    decay before a cell is called ABSENT; norm_floor is the amplitude below
    which a table counts as identically zero; residual_tol bounds the log-log
    scatter tolerated for PRESENT; min_nonzero is the fewest above-floor
    samples a slope fit may use; slopes past m_max report the +inf order.
    """

    eps_slope: float = 0.5
    norm_floor: float = 1e-10
    residual_tol: float = 1.0
    min_nonzero: int = 3
    m_max: int = 4
    quantization: QuantizationKind = QuantizationKind.RIGHT


@dataclass(frozen=True)
class DecayFit:
    """Norm table ||Op(a) u_h|| per scale, with its log-log fit."""

    table: tuple[tuple[float, float], ...]
    fit: FitResult

    @property
    def max_norm(self) -> float:
        return max(v for _, v in self.table)


def decay_fit(
    fam: SemiclassicalFamily,
    a: Symbol,
    kind: QuantizationKind = QuantizationKind.RIGHT,
    zero_tol: float = 0.0,
    min_points: int = 2,
) -> DecayFit:
    """Apply Op(a) across the family and fit the norm decay.

    Needs at least five scales; two or three points fit a slope but say
    nothing about whether the decay is settling.
    """
    if len(fam) < 5:
        raise ValueError(f"need at least 5 scales for a decay fit, got {len(fam)}")
    if a.dim != fam.dim:
        raise ValueError(f"symbol dim {a.dim} != family dim {fam.dim}")
    rows = []
    for h, u in fam:
        rows.append((h, l2_norm(apply(a, kind, u, h))))
    return DecayFit(tuple(rows), fit_loglog(rows, zero_tol=zero_tol, min_points=min_points))


@dataclass(frozen=True)
class WavefrontVerdict:
    """Outcome of one probe: PRESENT, ABSENT (with order), or INCONCLUSIVE."""

    point: ProbePoint
    m: float
    l: float
    classification: str
    order: float | None
    fit: FitResult
    table: tuple[tuple[float, float], ...]

    def line(self) -> str:
        slope = "inf" if math.isinf(self.fit.slope) else f"{self.fit.slope + 0.0:.4f}"
        if self.classification == "ABSENT":
            order = "inf" if math.isinf(self.order) else f"{self.order:.0f}"
            tail = f"ABSENT order={order}"
        else:
            tail = self.classification
        return f"{self.point.label()} | slope={slope} | {tail}"


def classify(
    fam: SemiclassicalFamily,
    point: ProbePoint,
    m: float = 0.0,
    l: float = 0.0,
    config: ClassifyConfig | None = None,
) -> WavefrontVerdict:
    """Classify one probe cell against the required decay m + l.

    A cell is ABSENT when the table is identically zero (below the floor, or
    too few usable points: the +inf sentinel) or when the fitted slope sigma
    clears sigma - l >= m + eps_slope; the reported order is floor(sigma - l),
    capped to +inf past m_max.  Otherwise a fit with small residual is
    PRESENT, and a noisy one is INCONCLUSIVE.
    """
    config = config or ClassifyConfig()
    a = probe_symbol(point)
    df = decay_fit(
        fam,
        a,
        config.quantization,
        zero_tol=config.norm_floor,
        min_points=config.min_nonzero,
    )
    if df.max_norm < config.norm_floor or df.fit.is_sentinel:
        return WavefrontVerdict(point, m, l, "ABSENT", math.inf, df.fit, df.table)
    sigma = df.fit.slope
    if sigma - l >= m + config.eps_slope:
        raw = math.floor(sigma - l)
        order = math.inf if raw > config.m_max else float(raw)
        return WavefrontVerdict(point, m, l, "ABSENT", order, df.fit, df.table)
    if df.fit.residual_rms <= config.residual_tol:
        return WavefrontVerdict(point, m, l, "PRESENT", None, df.fit, df.table)
    return WavefrontVerdict(point, m, l, "INCONCLUSIVE", None, df.fit, df.table)


def wf_scan(
    fam: SemiclassicalFamily,
    points,
    m: float = 0.0,
    l: float = 0.0,
    config: ClassifyConfig | None = None,
) -> tuple[WavefrontVerdict, ...]:
    """Classify every probe point, in the given order (fully deterministic)."""
    config = config or ClassifyConfig()
    return tuple(classify(fam, pt, m, l, config) for pt in points)


def _axis_values(lo: float, hi: float, spacing: float) -> list[float]:
    count = int(round((hi - lo) / spacing))
    return [lo + i * spacing for i in range(count + 1)]


def interior_grid(
    dim: int,
    x0=None,
    lo: float = -1.5,
    hi: float = 1.5,
    spacing: float = 0.5,
    widths: ProbeWidths | None = None,
) -> tuple[ProbePoint, ...]:
    """Probe points on a cubic frequency grid, lexicographic order."""
    x0 = (0.0,) * dim if x0 is None else tuple(float(c) for c in x0)
    vals = _axis_values(lo, hi, spacing)
    return tuple(
        ProbePoint.interior(x0, center, widths)
        for center in itertools.product(vals, repeat=dim)
    )


def boundary_grid(
    C: LinearCoisotropic,
    x0=None,
    n_angles: int = 8,
    xipp_lo: float = -1.5,
    xipp_hi: float = 1.5,
    xipp_spacing: float = 0.5,
    widths: ProbeWidths | None = None,
) -> tuple[ProbePoint, ...]:
    """Boundary probes over equispaced approach angles times a conserved grid.

    Codimension 2 only, where the approach directions form a circle.
    """
    if C.codim != 2:
        raise ValueError("boundary_grid needs a codimension-2 coisotropic")
    x0 = (0.0,) * C.dim if x0 is None else tuple(float(c) for c in x0)
    vals = _axis_values(xipp_lo, xipp_hi, xipp_spacing)
    out = []
    for i in range(n_angles):
        theta = 2.0 * math.pi * i / n_angles
        gamma = (math.cos(theta), math.sin(theta))
        for xipp in itertools.product(vals, repeat=C.dim - 2):
            out.append(ProbePoint.boundary(x0, gamma, xipp, C, widths))
    return tuple(out)


def quasimode_defect_symbol(
    p: PrincipalSymbol,
    energy: float = 0.5,
    support: tuple[float, float] = (0.5, 1.5),
    ramp: float = 0.25,
) -> Symbol:
    """Multiplier chi(|xi|) (p0(xi) - E) testing the quasimode equation.

    The radial plateau chi is exactly 1 on [lo+ramp, hi-ramp] around the
    energy shell and exactly 0 outside [lo, hi], so families pinned to the
    shell give identically zero defect tables.
    """
    window = RadialPlateauProfile(p.dim, support[0], support[1], ramp)
    off_shell = CallableProfile(
        p.dim, lambda xi: p.value(xi) - energy, label=f"{p.label}-minus-energy"
    )
    return multiplier(ProductProfile([window, off_shell]))


@dataclass(frozen=True)
class PropagationRow:
    """One seed/branch comparison: verdict at the seed vs after the flow."""

    seed: str
    branch: str
    t: float
    seed_verdict: WavefrontVerdict
    flow_verdict: WavefrontVerdict

    @property
    def agree(self) -> bool:
        return self.seed_verdict.classification == self.flow_verdict.classification


@dataclass(frozen=True)
class PropagationReport:
    """Certification plus seed-vs-flowed verdicts; PASS only if both hold."""

    family: str
    symbol: str
    certification: DecayFit
    certified: bool
    rows: tuple[PropagationRow, ...]

    @property
    def verdict(self) -> str:
        ok = self.certified and all(r.agree for r in self.rows)
        return "PASS" if ok else "FAIL"

    def to_text(self) -> str:
        lines = [f"propagation check: family={self.family} symbol={self.symbol}"]
        slope = self.certification.fit.slope
        slope_s = "inf" if math.isinf(slope) else f"{slope:.4f}"
        lines.append(
            f"certification: max_defect={self.certification.max_norm:.6e} "
            f"slope={slope_s} certified={'yes' if self.certified else 'no'}"
        )
        for r in self.rows:
            lines.append(
                f"{r.seed} | branch={r.branch} t={r.t:.6g} | "
                f"{r.seed_verdict.classification} -> {r.flow_verdict.classification} "
                f"agree={'yes' if r.agree else 'no'}"
            )
        lines.append(f"overall: {self.verdict}")
        return "\n".join(lines)


def verify_propagation(
    fam: SemiclassicalFamily,
    p: PrincipalSymbol,
    C: LinearCoisotropic,
    seeds,
    t: float = 0.7,
    config: ClassifyConfig | None = None,
    energy: float = 0.5,
    certify_slope: float = 2.0,
    collar: float = 0.5,
    dt: float = 1e-3,
    leading_orders: tuple[float, float] = (0.0, 0.0),
    first_orders: tuple[float, float] = (2.0, -1.0),
    quasimode_symbol: Symbol | None = None,
) -> PropagationReport:
    """Check that boundary verdicts are transported by the split flows.

    First the family is certified as a quasimode: the defect table for
    chi(|xi|)(p0 - E) must sit below the norm floor or decay with slope at
    least certify_slope.  Then each boundary seed is classified at the
    leading orders and at the first-order orders, its probe is carried for
    time t along the corresponding split field (leading velocity, and the
    collar extension of the first-order velocity), and the verdicts before
    and after are compared.  PASS requires certification and agreement at
    every seed and branch; families that are not quasimodes fail at the
    certification gate.
    """
    config = config or ClassifyConfig()
    split = taylor_split(p, C)
    q = quasimode_symbol if quasimode_symbol is not None else quasimode_defect_symbol(p, energy)
    cert = decay_fit(fam, q, config.quantization, zero_tol=config.norm_floor)
    if cert.max_norm <= config.norm_floor:
        certified = True
    elif cert.fit.is_sentinel:
        certified = False
    else:
        certified = cert.fit.slope >= certify_slope

    branches = (
        ("leading", split.as_h1_field(), leading_orders),
        ("first-order", split.as_h2_field(collar), first_orders),
    )
    rows = []
    for seed in seeds:
        if seed.kind != "boundary":
            raise ValueError("propagation seeds must be boundary probes")
        if seed.C is not C:
            raise ValueError("seed coisotropic differs from the one under test")
        for name, field, (mb, lb) in branches:
            before = classify(fam, seed, mb, lb, config)
            start = PolarPoint(seed.x0, 0.0, seed.gamma0, seed.xi_pp0)
            moved = flow(field, start, t, dt).final()
            x_t = tuple(float(c) % (2.0 * math.pi) for c in moved.x)
            shifted = ProbePoint.boundary(x_t, seed.gamma0, seed.xi_pp0, C, seed.widths)
            after = classify(fam, shifted, mb, lb, config)
            rows.append(PropagationRow(seed.label(), name, float(t), before, after))
    return PropagationReport(fam.label, p.label, cert, certified, tuple(rows))
