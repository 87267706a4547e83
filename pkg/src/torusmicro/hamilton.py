"""Hamiltonian geometry at the coisotropic: splitting, flows, polar fields.

For an x-independent principal symbol p0(xi), the Hamiltonian velocity is
grad p0 and the motion is a straight translation on the torus.  Near the
model coisotropic the velocity splits as

    grad p0(xi) = H1(normal) + rho * H2(gamma, normal) + O(rho^2),

where H1 evaluates the gradient on the coisotropic itself and H2 is the
Hessian contraction against the approach direction gamma.  The exact
first-order remainder quotient (grad p0 - H1)/rho extends H2 into the collar
and is the field whose flow segments the propagation tests use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .charts import PolarPoint
from .coisotropic import LinearCoisotropic

__all__ = [
    "PrincipalSymbol",
    "free_particle",
    "quartic_radial",
    "linear_drift",
    "VectorFieldSplit",
    "taylor_split",
    "Trajectory",
    "flow",
    "commutation_check",
    "CommutationCheck",
    "make_x_perturbation",
    "ChartSymbol",
    "CodimTwoPolarField",
    "rescaled_field",
    "cancellation_check",
    "CancellationCheck",
    "standard_codim2",
]


@dataclass
class PrincipalSymbol:
    """x-independent principal symbol p0(xi) with derivative access.

    Parameters
    ----------
    dim : int
    p0 : callable
        xi (ndarray) -> float.
    grad : callable, optional
        Closed-form gradient; validated against central differences on a few
        deterministic sample points (1e-6 relative) unless validate=False.
    hess : callable, optional
        Closed-form Hessian; finite differences of the gradient otherwise
        (step 1e-4 * (1 + |xi|)).
    """

    dim: int
    p0: Callable
    grad: Callable | None = None
    hess: Callable | None = None
    label: str = "p0"
    validate: bool = True

    def __post_init__(self) -> None:
        if self.grad is not None and self.validate:
            rng = np.random.default_rng(7)
            for _ in range(6):
                xi = rng.uniform(-1.5, 1.5, self.dim)
                fd = self._fd_gradient(xi)
                given = np.asarray(self.grad(xi), dtype=float)
                scale = max(1.0, float(np.max(np.abs(given))))
                if np.max(np.abs(given - fd)) > 1e-6 * scale:
                    raise ValueError(
                        f"closed-form gradient of {self.label} disagrees with "
                        f"finite differences at xi={xi}"
                    )

    def value(self, xi) -> float:
        return float(self.p0(np.asarray(xi, dtype=float)))

    def _fd_gradient(self, xi) -> np.ndarray:
        xi = np.asarray(xi, dtype=float)
        step = 1e-6 * (1.0 + float(np.linalg.norm(xi)))
        out = np.empty(self.dim)
        for i in range(self.dim):
            e = np.zeros(self.dim)
            e[i] = step
            out[i] = (self.p0(xi + e) - self.p0(xi - e)) / (2.0 * step)
        return out

    def gradient(self, xi) -> np.ndarray:
        xi = np.asarray(xi, dtype=float)
        if self.grad is not None:
            return np.asarray(self.grad(xi), dtype=float)
        return self._fd_gradient(xi)

    def hessian(self, xi) -> np.ndarray:
        xi = np.asarray(xi, dtype=float)
        if self.hess is not None:
            return np.asarray(self.hess(xi), dtype=float)
        step = 1e-4 * (1.0 + float(np.linalg.norm(xi)))
        out = np.empty((self.dim, self.dim))
        for i in range(self.dim):
            e = np.zeros(self.dim)
            e[i] = step
            out[:, i] = (self.gradient(xi + e) - self.gradient(xi - e)) / (2.0 * step)
        return out


def free_particle(dim: int) -> PrincipalSymbol:
    """p0 = |xi|^2 / 2 with closed-form derivatives."""
    return PrincipalSymbol(
        dim,
        p0=lambda xi: 0.5 * float(xi @ xi),
        grad=lambda xi: xi,
        hess=lambda xi: np.eye(dim),
        label="free-particle",
    )


def quartic_radial(dim: int) -> PrincipalSymbol:
    """p0 = |xi|^4 / 4; its splitting has a genuinely quadratic remainder."""
    return PrincipalSymbol(
        dim,
        p0=lambda xi: 0.25 * float(xi @ xi) ** 2,
        grad=lambda xi: float(xi @ xi) * xi,
        hess=lambda xi: 2.0 * np.outer(xi, xi) + float(xi @ xi) * np.eye(dim),
        label="quartic-radial",
    )


def linear_drift(c) -> PrincipalSymbol:
    """p0 = c . xi (constant transport)."""
    c = np.asarray(c, dtype=float)
    return PrincipalSymbol(
        len(c),
        p0=lambda xi: float(c @ xi),
        grad=lambda xi: c.copy(),
        hess=lambda xi: np.zeros((len(c), len(c))),
        label="linear-drift",
    )


@dataclass
class VectorFieldSplit:
    """Split Hamiltonian velocity data at a linear coisotropic.

    All velocity methods return ambient dx/dt vectors; there are no fiber
    components because the symbol is x-independent (frequencies are conserved,
    so the flows are straight lines on the torus).
    """

    p: PrincipalSymbol
    C: LinearCoisotropic

    def _xi_on_C(self, normal) -> np.ndarray:
        return self.C.xi_join(np.zeros(self.C.codim), normal)

    def h1_velocity(self, normal) -> np.ndarray:
        """Leading velocity: the gradient evaluated on the coisotropic."""
        return self.p.gradient(self._xi_on_C(normal))

    def h2_velocity(self, gamma, normal) -> np.ndarray:
        """First-order velocity: Hessian on C contracted with the direction."""
        xi0 = self._xi_on_C(normal)
        direction = self.C.xi_join(np.asarray(gamma, dtype=float), np.zeros(self.C.dim - self.C.codim))
        return self.p.hessian(xi0) @ direction

    def full_velocity(self, xi) -> np.ndarray:
        return self.p.gradient(xi)

    def h2_extension_velocity(self, rho: float, gamma, normal) -> np.ndarray:
        """Exact collar quotient (full - H1)/rho; the Hessian term at rho=0."""
        if rho < 0:
            raise ValueError("rho must be nonnegative")
        if rho == 0.0:
            return self.h2_velocity(gamma, normal)
        xi = self.C.xi_join(rho * np.asarray(gamma, dtype=float), normal)
        return (self.full_velocity(xi) - self.h1_velocity(normal)) / rho

    def remainder_velocity(self, rho: float, gamma, normal) -> np.ndarray:
        """full - H1 - rho*H2; vanishes to second order in rho."""
        xi = self.C.xi_join(rho * np.asarray(gamma, dtype=float), normal)
        return (
            self.full_velocity(xi)
            - self.h1_velocity(normal)
            - rho * self.h2_velocity(gamma, normal)
        )

    def h1_tilde_coeffs(self, normal) -> np.ndarray:
        """H1 coefficients on the transformed frame d/dx~ (rows of (v; w))."""
        return self.C.inverse.T @ self.h1_velocity(normal)

    def h2_tilde_coeffs(self, gamma, normal) -> np.ndarray:
        return self.C.inverse.T @ self.h2_velocity(gamma, normal)

    def as_h1_field(self) -> Callable[[PolarPoint], np.ndarray]:
        return lambda point: self.h1_velocity(np.asarray(point.normal))

    def as_h2_field(self, collar: float = 0.5) -> Callable[[PolarPoint], np.ndarray]:
        """The collar extension field; errors outside rho < collar."""

        def field(point: PolarPoint) -> np.ndarray:
            if point.rho >= collar:
                raise ValueError(
                    f"rho={point.rho} outside the collar (< {collar}) where the "
                    "first-order field is defined"
                )
            return self.h2_extension_velocity(
                point.rho, np.asarray(point.gamma), np.asarray(point.normal)
            )

        return field

    def as_full_field(self) -> Callable[[PolarPoint], np.ndarray]:
        def field(point: PolarPoint) -> np.ndarray:
            xi = self.C.xi_join(
                point.rho * np.asarray(point.gamma), np.asarray(point.normal)
            )
            return self.full_velocity(xi)

        return field


def taylor_split(p: PrincipalSymbol, C: LinearCoisotropic) -> VectorFieldSplit:
    """Split the Hamiltonian velocity of p at the coisotropic C."""
    if p.dim != C.dim:
        raise ValueError(f"symbol dim {p.dim} != coisotropic dim {C.dim}")
    return VectorFieldSplit(p, C)


@dataclass(frozen=True)
class Trajectory:
    """Fixed-step integral curve; fiber coordinates ride along unchanged."""

    times: tuple[float, ...]
    points: tuple[PolarPoint, ...]

    def final(self) -> PolarPoint:
        return self.points[-1]

    def to_csv_rows(self) -> list[list[str]]:
        n = len(self.points[0].x)
        d = len(self.points[0].gamma)
        header = (
            ["t"]
            + [f"x{i + 1}" for i in range(n)]
            + ["rho"]
            + [f"gamma{i + 1}" for i in range(d)]
            + [f"normal{i + 1}" for i in range(n - d)]
        )
        rows = [header]
        for t, pt in zip(self.times, self.points):
            rows.append(
                [repr(t)]
                + [repr(c) for c in pt.x]
                + [repr(pt.rho)]
                + [repr(c) for c in pt.gamma]
                + [repr(c) for c in pt.normal]
            )
        return rows


def flow(field, start: PolarPoint, t: float, dt: float = 1e-3) -> Trajectory:
    """Integrate dx/dt = field(point) by classical RK4 with a fixed step.

    The field must return ambient x-velocities only; the fiber data (rho,
    gamma, normal) is conserved and never touched by the integrator.  The
    final partial step lands exactly on t.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    x = np.asarray(start.x, dtype=float)
    times = [0.0]
    points = [start]
    elapsed = 0.0
    sign = 1.0 if t >= 0 else -1.0

    def vel(x_now: np.ndarray) -> np.ndarray:
        probe = PolarPoint(tuple(x_now), start.rho, start.gamma, start.normal)
        return np.asarray(field(probe), dtype=float)

    remaining = abs(t)
    while remaining > 1e-15:
        step = sign * min(dt, remaining)
        k1 = vel(x)
        k2 = vel(x + 0.5 * step * k1)
        k3 = vel(x + 0.5 * step * k2)
        k4 = vel(x + step * k3)
        x = x + (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        elapsed += step
        remaining -= abs(step)
        times.append(elapsed)
        points.append(PolarPoint(tuple(x), start.rho, start.gamma, start.normal))
    return Trajectory(tuple(times), tuple(points))


@dataclass(frozen=True)
class CommutationCheck:
    """Max-norm Lie bracket defects at the sampled collar points."""

    defects: tuple[float, ...]

    @property
    def max_defect(self) -> float:
        return max(self.defects)


def make_x_perturbation(C: LinearCoisotropic, axis: int, amplitude: float):
    """Multiplier 1 + amplitude*sin(x~_axis) in the transformed frame (0-based).

    Injected into commutation_check to emulate an x-dependent first-order
    field; the bracket with H1 then picks up the transported derivative.
    """

    def factor(x: np.ndarray) -> float:
        x_tilde = C.inverse.T @ np.asarray(x, dtype=float)
        return 1.0 + amplitude * math.sin(float(x_tilde[axis]))

    return factor


def commutation_check(
    split: VectorFieldSplit,
    samples: int = 100,
    seed: int = 0,
    fd_step: float = 1e-5,
    perturbation=None,
    collar: float = 0.5,
) -> CommutationCheck:
    """Lie bracket [H1, H2~] sampled over random collar points.

    Both fields are x-translation fields; their bracket is computed from
    finite-difference Jacobians in x, so x-independent coefficients give an
    exactly zero bracket.  An optional `perturbation(x)` factor multiplies the
    first-order field to model a symbol with x-dependence.
    """
    rng = np.random.default_rng(seed)
    C = split.C
    n, d = C.dim, C.codim
    defects = []
    for _ in range(samples):
        x = rng.uniform(0.0, 2.0 * math.pi, n)
        rho = rng.uniform(0.01, 0.9 * collar)
        gamma = rng.normal(size=d)
        gamma /= np.linalg.norm(gamma)
        normal = rng.uniform(0.5, 1.5, n - d)

        def v_field(x_now: np.ndarray) -> np.ndarray:
            return split.h1_velocity(normal)

        def w_field(x_now: np.ndarray) -> np.ndarray:
            w = split.h2_extension_velocity(rho, gamma, normal)
            if perturbation is not None:
                w = perturbation(x_now) * w
            return w

        bracket = _lie_bracket(v_field, w_field, x, fd_step)
        defects.append(float(np.max(np.abs(bracket))))
    return CommutationCheck(tuple(defects))


def _lie_bracket(v_field, w_field, x: np.ndarray, step: float) -> np.ndarray:
    """[V, W](x) = J_W(x) V(x) - J_V(x) W(x) with central-difference Jacobians."""
    n = len(x)
    v0 = v_field(x)
    w0 = w_field(x)
    jac_v = np.empty((n, n))
    jac_w = np.empty((n, n))
    for i in range(n):
        e = np.zeros(n)
        e[i] = step
        jac_v[:, i] = (v_field(x + e) - v_field(x - e)) / (2.0 * step)
        jac_w[:, i] = (w_field(x + e) - w_field(x - e)) / (2.0 * step)
    return jac_w @ v0 - jac_v @ w0


def standard_codim2() -> LinearCoisotropic:
    """The model codimension-2 coisotropic {xi_1 = xi_2 = 0} in T*T^3."""
    return LinearCoisotropic(3, [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]], [[0.0, 0.0, 1.0]])


def _is_standard_codim2(C: LinearCoisotropic) -> bool:
    return (
        C.dim == 3
        and C.codim == 2
        and np.allclose(C.v, np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]))
        and np.allclose(C.w, np.array([[0.0, 0.0, 1.0]]))
    )


_CHART_COORDS = ("x1", "x2", "x3", "rho", "theta", "xi3")


@dataclass
class ChartSymbol:
    """Scalar function on the codim-2 polar chart (x, rho, theta, xi3).

    Partials may be supplied closed-form in the `partials` map (keys from
    x1, x2, x3, rho, theta, xi3); missing ones fall back to central
    differences with a relative step.
    """

    value: Callable
    partials: dict[str, Callable] | None = None
    label: str = "chart-symbol"

    def partial(self, name: str, state: dict[str, float]) -> float:
        if name not in _CHART_COORDS:
            raise ValueError(f"unknown chart coordinate {name!r}")
        if self.partials and name in self.partials:
            return float(self.partials[name](**state))
        step = 1e-6 * (1.0 + abs(state[name]))
        hi = dict(state)
        lo = dict(state)
        hi[name] += step
        lo[name] -= step
        return (self.value(**hi) - self.value(**lo)) / (2.0 * step)


@dataclass
class CodimTwoPolarField:
    """Hamiltonian field of a chart symbol in codim-2 polar coordinates.

    Components are returned in the order (dx1, dx2, dx3, drho, dtheta, dxi3),
    scaled by rho^exponent.  The unrescaled field is exponent = 0.
    """

    symbol: ChartSymbol
    exponent: float

    def _components(self, state: dict[str, float]) -> np.ndarray:
        rho = state["rho"]
        if rho <= 0:
            raise ValueError("polar field needs rho > 0")
        theta = state["theta"]
        cos_t, sin_t = math.cos(theta), math.sin(theta)
        d_rho = self.symbol.partial("rho", state)
        d_theta = self.symbol.partial("theta", state)
        d_xi3 = self.symbol.partial("xi3", state)
        d_x1 = self.symbol.partial("x1", state)
        d_x2 = self.symbol.partial("x2", state)
        d_x3 = self.symbol.partial("x3", state)
        return np.array(
            [
                d_rho * cos_t - d_theta * sin_t / rho,
                d_rho * sin_t + d_theta * cos_t / rho,
                d_xi3,
                -(cos_t * d_x1 + sin_t * d_x2),
                (d_x1 * sin_t - d_x2 * cos_t) / rho,
                -d_x3,
            ]
        )

    def unrescaled_velocity(self, state: dict[str, float]) -> np.ndarray:
        return self._components(state)

    def velocity(self, state: dict[str, float]) -> np.ndarray:
        return (state["rho"] ** self.exponent) * self._components(state)


def rescaled_field(
    symbol: ChartSymbol,
    C: LinearCoisotropic,
    m_order: float = 0.0,
    l_order: float = 0.0,
) -> CodimTwoPolarField:
    """Polar-chart Hamiltonian field rescaled by rho^(l - m + 1).

    Only the model codimension-2 chart in T*T^3 is supported; reduce general
    linear data to it by the (v; w) coordinate change first.
    """
    if not _is_standard_codim2(C):
        raise ValueError(
            "rescaled_field supports the model codim-2 chart in T*T^3 "
            "(v = e1, e2; w = e3); transform general data to it first"
        )
    return CodimTwoPolarField(symbol, float(l_order) - float(m_order) + 1.0)


@dataclass(frozen=True)
class CancellationCheck:
    """Defects of the angular-derivative identity at the sampled points."""

    defects: tuple[float, ...]

    @property
    def max_defect(self) -> float:
        return max(self.defects)


def cancellation_check(
    p: PrincipalSymbol,
    samples: int = 100,
    seed: int = 0,
    fd_step: float = 1e-6,
) -> CancellationCheck:
    """Verify d/dtheta p0 = rho * (cos(theta) d2 p0 - sin(theta) d1 p0).

    The left side differentiates p0(rho cos t, rho sin t, xi3) in the angle by
    central differences; the right side uses the closed-form gradient.  The
    identity is what makes the polar Hamiltonian field's angular terms finite
    at the front face.
    """
    if p.dim != 3:
        raise ValueError("cancellation_check runs on the model 3d chart")
    rng = np.random.default_rng(seed)
    defects = []
    for _ in range(samples):
        rho = rng.uniform(0.05, 1.5)
        theta = rng.uniform(0.0, 2.0 * math.pi)
        xi3 = rng.uniform(-1.5, 1.5)

        def on_circle(t: float) -> float:
            return p.value(np.array([rho * math.cos(t), rho * math.sin(t), xi3]))

        lhs = (on_circle(theta + fd_step) - on_circle(theta - fd_step)) / (2.0 * fd_step)
        g = p.gradient(np.array([rho * math.cos(theta), rho * math.sin(theta), xi3]))
        rhs = rho * (math.cos(theta) * g[1] - math.sin(theta) * g[0])
        defects.append(abs(lhs - rhs))
    return CancellationCheck(tuple(defects))
