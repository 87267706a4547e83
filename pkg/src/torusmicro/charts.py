"""Blowup coordinates near a linear coisotropic: projective and polar charts.

The front face of the blowup is resolved in two ways.  Projective charts pick
a pivot constraint zeta = v_j.xi and use (zeta, H = h/zeta, remaining slopes,
transverse frequencies); the product zeta*H recovers h exactly, which is the
defining relation between the two boundary functions.  Polar charts use the
radius rho = |v.xi| and the unit direction gamma = v.xi / rho.

lift_check verifies, by finite differences, the chart identity expressing
h d/dxi_i in terms of the chart frame; it is the workhorse consistency test
for the projective frame.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .coisotropic import LinearCoisotropic

__all__ = [
    "ChartDomainError",
    "ProjectivePoint",
    "ProjectiveChart",
    "PolarPoint",
    "PolarChart",
    "to_projective",
    "from_projective",
    "to_polar",
    "from_polar",
    "lift_check",
    "LiftCheck",
    "REGISTERED_CHART_FUNCTIONS",
]


class ChartDomainError(ValueError):
    """A point fell outside the chart's validity region."""


@dataclass(frozen=True)
class ProjectivePoint:
    """Coordinates of one phase-space point in a projective chart.

    Attributes
    ----------
    x : tuple of float
        Base point on the torus (ambient coordinates).
    zeta : float
        Pivot constraint value v_j.xi (signed; fixed sign on the chart).
    h_ratio : float
        H = h / zeta, the second boundary coordinate (signed like zeta).
    slopes : tuple of float
        Ratios (v_i.xi)/zeta for the non-pivot constraints, in row order.
    normal : tuple of float
        Transverse frequencies w.xi.
    """

    x: tuple[float, ...]
    zeta: float
    h_ratio: float
    slopes: tuple[float, ...]
    normal: tuple[float, ...]

    @property
    def rho_ff(self) -> float:
        return abs(self.zeta)

    @property
    def rho_sf(self) -> float:
        return abs(self.h_ratio)

    def replace(self, **kw) -> "ProjectivePoint":
        data = {
            "x": self.x,
            "zeta": self.zeta,
            "h_ratio": self.h_ratio,
            "slopes": self.slopes,
            "normal": self.normal,
        }
        data.update(kw)
        return ProjectivePoint(**data)


class ProjectiveChart:
    """Projective chart with a chosen pivot constraint and sign.

    Parameters
    ----------
    C : LinearCoisotropic
    pivot : int
        1-based index of the pivot constraint row (v_pivot.xi is the chart's
        zeta coordinate).
    sign : int
        +1 or -1; the chart covers points with sign * (v_pivot.xi) > 0.
    """

    def __init__(self, C: LinearCoisotropic, pivot: int = 1, sign: int = 1):
        if not 1 <= pivot <= C.codim:
            raise ValueError(f"pivot {pivot} outside 1..{C.codim}")
        if sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        self.C = C
        self.pivot = pivot
        self.sign = sign

    def to_projective(self, x, xi, h: float) -> ProjectivePoint:
        """Chart coordinates of (x, xi) at scale h; errors off the chart."""
        if h <= 0:
            raise ValueError(f"h must be positive, got {h}")
        xi = np.asarray(xi, dtype=float)
        tan, normal = self.C.xi_split(xi)
        zeta = float(tan[self.pivot - 1])
        if zeta == 0.0 or math.copysign(1.0, zeta) != float(self.sign):
            raise ChartDomainError(
                f"pivot value {zeta} not on the sign={self.sign:+d} chart"
            )
        slopes = tuple(
            float(tan[i]) / zeta for i in range(self.C.codim) if i != self.pivot - 1
        )
        return ProjectivePoint(
            x=tuple(float(c) for c in np.asarray(x, dtype=float)),
            zeta=zeta,
            h_ratio=h / zeta,
            slopes=slopes,
            normal=tuple(float(c) for c in normal),
        )

    def from_projective(self, point: ProjectivePoint):
        """Invert the chart: returns (x, xi, h)."""
        d = self.C.codim
        tan = np.empty(d)
        tan[self.pivot - 1] = point.zeta
        others = [i for i in range(d) if i != self.pivot - 1]
        for slot, i in zip(others, range(d - 1)):
            tan[slot] = point.slopes[i] * point.zeta
        xi = self.C.xi_join(tan, point.normal)
        h = point.h_ratio * point.zeta
        if h <= 0:
            raise ChartDomainError(f"recovered h={h} is not positive")
        return np.asarray(point.x, dtype=float), xi, h


def to_projective(chart: ProjectiveChart, x, xi, h: float) -> ProjectivePoint:
    return chart.to_projective(x, xi, h)


def from_projective(chart: ProjectiveChart, point: ProjectivePoint):
    return chart.from_projective(point)


@dataclass(frozen=True)
class PolarPoint:
    """Polar chart coordinates: radius, unit direction, transverse part."""

    x: tuple[float, ...]
    rho: float
    gamma: tuple[float, ...]
    normal: tuple[float, ...]

    @property
    def angle(self) -> float:
        """Direction angle for codimension 2 (atan2 of the two components)."""
        if len(self.gamma) != 2:
            raise ValueError("angle is defined for codimension 2 only")
        return math.atan2(self.gamma[1], self.gamma[0])


class PolarChart:
    """Polar resolution rho = |v.xi|, gamma = v.xi / rho of the front face."""

    def __init__(self, C: LinearCoisotropic):
        self.C = C

    def to_polar(self, x, xi, gamma_hint=None) -> PolarPoint:
        """Polar coordinates of (x, xi).

        On the zero radius set the direction is undefined; a unit gamma_hint
        must then be supplied (boundary points carry their own direction).
        """
        xi = np.asarray(xi, dtype=float)
        tan, normal = self.C.xi_split(xi)
        rho = float(np.sqrt(tan @ tan))
        if rho == 0.0:
            if gamma_hint is None:
                raise ChartDomainError(
                    "zero radius: supply gamma_hint to fix the direction"
                )
            gamma = np.asarray(gamma_hint, dtype=float)
            if abs(float(gamma @ gamma) - 1.0) > 1e-9:
                raise ValueError("gamma_hint must be a unit vector")
        else:
            gamma = tan / rho
        return PolarPoint(
            x=tuple(float(c) for c in np.asarray(x, dtype=float)),
            rho=rho,
            gamma=tuple(float(c) for c in gamma),
            normal=tuple(float(c) for c in normal),
        )

    def from_polar(self, point: PolarPoint):
        """Invert the chart: returns (x, xi)."""
        tan = point.rho * np.asarray(point.gamma, dtype=float)
        xi = self.C.xi_join(tan, point.normal)
        return np.asarray(point.x, dtype=float), xi


def to_polar(C: LinearCoisotropic, x, xi, gamma_hint=None) -> PolarPoint:
    return PolarChart(C).to_polar(x, xi, gamma_hint)


def from_polar(C: LinearCoisotropic, point: PolarPoint):
    return PolarChart(C).from_polar(point)


def _chart_partial(f, point: ProjectivePoint, coord: str, index: int | None, step: float):
    """Central difference of f in one chart coordinate."""

    def shifted(delta: float) -> ProjectivePoint:
        if coord == "zeta":
            return point.replace(zeta=point.zeta + delta)
        if coord == "h_ratio":
            return point.replace(h_ratio=point.h_ratio + delta)
        if coord == "slopes":
            s = list(point.slopes)
            s[index] += delta
            return point.replace(slopes=tuple(s))
        s = list(point.normal)
        s[index] += delta
        return point.replace(normal=tuple(s))

    return (f(shifted(step)) - f(shifted(-step))) / (2.0 * step)


@dataclass(frozen=True)
class LiftCheck:
    """Defects of the frame identity at the sampled points."""

    defects: tuple[float, ...]

    @property
    def max_defect(self) -> float:
        return max(self.defects)


def lift_check(
    chart: ProjectiveChart,
    axis: int,
    f,
    points,
    fd_step: float = 1e-5,
) -> LiftCheck:
    """Check h d/dxi_axis f = H * (frame derivative of f) at chart points.

    The left side differentiates f composed with the chart in the ambient
    frequency; the right side applies the chart frame

        V = v_p[axis] (zeta d_zeta - H d_H) + zeta w^[axis].d_normal
            + v^[axis].d_slopes - v_p[axis] (slopes . d_slopes)

    where v_p is the pivot row and v^, w^ collect the axis-th components of
    the other rows.  Both sides use central differences with the given step.

    Parameters
    ----------
    axis : int
        Ambient frequency coordinate, 0-based.
    f : callable
        Function of a ProjectivePoint (scalar output).
    points : iterable of ProjectivePoint
    """
    if not 0 <= axis < chart.C.dim:
        raise ValueError(f"axis {axis} outside 0..{chart.C.dim - 1}")
    C = chart.C
    piv = chart.pivot - 1
    v_piv = float(C.v[piv, axis])
    other_rows = [i for i in range(C.codim) if i != piv]
    defects = []
    for point in points:
        x, xi, h = chart.from_projective(point)
        step = fd_step * (1.0 + float(np.sqrt(xi @ xi)))

        def through_chart(xi_val) -> float:
            return f(chart.to_projective(x, xi_val, h))

        e = np.zeros(C.dim)
        e[axis] = step
        lhs = h * (through_chart(xi + e) - through_chart(xi - e)) / (2.0 * step)

        d_zeta = _chart_partial(f, point, "zeta", None, fd_step * (1.0 + abs(point.zeta)))
        d_h = _chart_partial(f, point, "h_ratio", None, fd_step * (1.0 + abs(point.h_ratio)))
        frame = v_piv * (point.zeta * d_zeta - point.h_ratio * d_h)
        for r in range(len(point.normal)):
            w_comp = float(C.w[r, axis])
            if w_comp != 0.0:
                d_w = _chart_partial(
                    f, point, "normal", r, fd_step * (1.0 + abs(point.normal[r]))
                )
                frame += w_comp * point.zeta * d_w
        for slot, i in zip(other_rows, range(C.codim - 1)):
            d_s = _chart_partial(
                f, point, "slopes", i, fd_step * (1.0 + abs(point.slopes[i]))
            )
            frame += (float(C.v[slot, axis]) - v_piv * point.slopes[i]) * d_s
        rhs = point.h_ratio * frame
        defects.append(abs(lhs - rhs))
    return LiftCheck(tuple(defects))


def _f_h_ratio(P: ProjectivePoint) -> float:
    return P.h_ratio


def _f_pivot_normal(P: ProjectivePoint) -> float:
    lead = P.normal[0] if P.normal else 1.0
    return math.sin(P.zeta) * lead


def _f_full_mix(P: ProjectivePoint) -> float:
    return (
        P.h_ratio * P.zeta
        + sum(w * w for w in P.normal)
        + sum(s**3 for s in P.slopes)
    )


REGISTERED_CHART_FUNCTIONS = {
    "h-ratio": _f_h_ratio,
    "pivot-normal": _f_pivot_normal,
    "full-mix": _f_full_mix,
}
