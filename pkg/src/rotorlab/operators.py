"""Kinetic operator coefficients and the separated radial problem.

On the 3-DOF configuration space the quantum kinetic operator is
-(hbar^2 / 2M) Lap, with Lap the Laplace-Beltrami operator of the
configuration metric.  Because phi and psi are cyclic, Lap has
theta-dependent coefficients only:

    Lap = a_tt d2/dtheta2 + b_t d/dtheta + a_pp d2/dphi2
        + a_ps d2/dphi dpsi + a_ss d2/dpsi2

and the ansatz  Psi = f(theta) exp(i m phi) exp(i s psi)  with integer
quantum numbers (m, s) reduces the stationary problem to a one-dimensional
Sturm-Liouville equation

    f'' + drift(theta) f' - q(theta) f + eps f = 0,
    drift = h'/h,  eps = (2 M R^2 / hbar^2) E,

where q collects the centrifugal terms and the scaled potential.  The
radial operator is self-adjoint in L^2 with weight h(theta).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np

from . import geometry
from .errors import DomainError, GridTooCoarse
from .geometry import Manifold, ManifoldSpec, RotorParams


@dataclass(frozen=True)
class LaplacianCoefficients:
    """Coefficient functions of the configuration-space Laplacian at one theta.

    a_ps is the full printed coefficient of the mixed d2/dphi dpsi term,
    i.e. twice the off-diagonal inverse-metric entry.
    """

    a_tt: float
    b_t: float
    a_pp: float
    a_ps: float
    a_ss: float


def laplacian_coefficients(spec: ManifoldSpec, rotor: RotorParams, theta: float) -> LaplacianCoefficients:
    """Evaluate the Laplacian coefficients from the metric closed forms.

    a_tt = 1/R^2,  b_t = h'/(h R^2),  a_pp = 1/h^2,  a_ps = -2c/h^2,
    a_ss = sig M/I + c^2/h^2.
    """
    geometry.validate_rotor_for(spec, rotor)
    p = geometry.profile(spec, theta)
    R2 = spec.R * spec.R
    h2 = p.h * p.h
    return LaplacianCoefficients(
        a_tt=1.0 / R2,
        b_t=p.dh / (p.h * R2),
        a_pp=1.0 / h2,
        a_ps=-2.0 * p.c / h2,
        a_ss=rotor.sig * rotor.M / rotor.I + p.c * p.c / h2,
    )


class PotentialKind(Enum):
    ZERO = "zero"
    COSINE_WELL = "cosine_well"
    HARMONIC = "harmonic"
    TABULATED = "tabulated"


@dataclass(frozen=True)
class PotentialSpec:
    """Radial potential V(theta).

    zero         V = 0
    cosine_well  V = V0 (1 - cos theta)      (well at theta = 0, period 2 pi)
    harmonic     V = V0 theta^2              (confining on the pseudosphere)
    tabulated    piecewise-linear interpolation of (theta_grid, values)
    """

    kind: PotentialKind
    V0: float = 0.0
    theta_grid: np.ndarray | None = field(default=None, repr=False)
    values: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind is PotentialKind.TABULATED:
            if self.theta_grid is None or self.values is None:
                raise ValueError("tabulated potential requires theta_grid and values")
            grid = np.asarray(self.theta_grid, dtype=float)
            vals = np.asarray(self.values, dtype=float)
            if grid.ndim != 1 or grid.shape != vals.shape or grid.size < 2:
                raise ValueError("tabulated potential needs matching 1-D arrays of length >= 2")
            if not np.all(np.diff(grid) > 0):
                raise ValueError("tabulated theta_grid must be strictly increasing")
            object.__setattr__(self, "theta_grid", grid)
            object.__setattr__(self, "values", vals)

    @staticmethod
    def zero() -> "PotentialSpec":
        return PotentialSpec(PotentialKind.ZERO)

    @staticmethod
    def cosine_well(V0: float) -> "PotentialSpec":
        return PotentialSpec(PotentialKind.COSINE_WELL, V0=V0)

    @staticmethod
    def harmonic(V0: float) -> "PotentialSpec":
        return PotentialSpec(PotentialKind.HARMONIC, V0=V0)

    @staticmethod
    def tabulated(theta_grid, values) -> "PotentialSpec":
        return PotentialSpec(PotentialKind.TABULATED, theta_grid=theta_grid, values=values)

    def __call__(self, theta):
        theta = np.asarray(theta, dtype=float)
        if self.kind is PotentialKind.ZERO:
            out = np.zeros_like(theta)
        elif self.kind is PotentialKind.COSINE_WELL:
            out = self.V0 * (1.0 - np.cos(theta))
        elif self.kind is PotentialKind.HARMONIC:
            out = self.V0 * theta * theta
        else:
            if np.any(theta < self.theta_grid[0]) or np.any(theta > self.theta_grid[-1]):
                raise DomainError("theta outside the tabulated potential range")
            out = np.interp(theta, self.theta_grid, self.values)
        return out if out.ndim else float(out)

    def derivative(self, theta):
        """dV/dtheta (piecewise-constant for tabulated potentials)."""
        theta = np.asarray(theta, dtype=float)
        if self.kind is PotentialKind.ZERO:
            out = np.zeros_like(theta)
        elif self.kind is PotentialKind.COSINE_WELL:
            out = self.V0 * np.sin(theta)
        elif self.kind is PotentialKind.HARMONIC:
            out = 2.0 * self.V0 * theta
        else:
            slopes = np.diff(self.values) / np.diff(self.theta_grid)
            idx = np.clip(np.searchsorted(self.theta_grid, theta, side="right") - 1, 0, slopes.size - 1)
            out = slopes[idx]
        return out if out.ndim else float(out)


class BoundaryKind(Enum):
    SINGULAR = "singular"                # coordinate pole: zero-flux closure
    TRUNCATED_DIRICHLET = "truncated"    # artificial wall on an infinite domain
    PERIODIC = "periodic"


@dataclass(frozen=True)
class RadialDomain:
    theta_min: float
    theta_max: float  # inf for the pseudosphere; the grid supplies the truncation
    left: BoundaryKind
    right: BoundaryKind


def _domain_for(spec: ManifoldSpec) -> RadialDomain:
    if spec.kind is Manifold.SPHERE:
        return RadialDomain(0.0, math.pi, BoundaryKind.SINGULAR, BoundaryKind.SINGULAR)
    if spec.kind is Manifold.PSEUDOSPHERE:
        return RadialDomain(0.0, math.inf, BoundaryKind.SINGULAR, BoundaryKind.TRUNCATED_DIRICHLET)
    return RadialDomain(0.0, 2.0 * math.pi, BoundaryKind.PERIODIC, BoundaryKind.PERIODIC)


@dataclass(frozen=True)
class RadialProblem:
    """Separated 1-D problem for fixed quantum numbers (m, s) and potential V.

    drift, q and weight are vectorized functions of theta; eigenvalues of
    the dimensionless problem are eps = energy_scale * E.
    """

    m: int
    s: int
    drift: Callable[[np.ndarray], np.ndarray]
    q: Callable[[np.ndarray], np.ndarray]
    weight: Callable[[np.ndarray], np.ndarray]
    energy_scale: float
    domain: RadialDomain
    spec: ManifoldSpec = field(repr=False)
    rotor: RotorParams = field(repr=False)
    potential: PotentialSpec = field(repr=False)


def radial_problem(
    spec: ManifoldSpec, rotor: RotorParams, m: int, s: int, V: PotentialSpec
) -> RadialProblem:
    """Build the radial Sturm-Liouville problem for quantum numbers (m, s).

    q(theta) = [m^2 - 2 m s c + s^2 c^2] R^2/h^2 + sig (M R^2/I) s^2
               + energy_scale * V(theta)

    which, written per geometry, carries the centrifugal 1/h^2 barrier and
    the constant spin term; near a pole q ~ (m - s*c_pole)^2 / dist^2.
    """
    if not isinstance(m, (int, np.integer)) or not isinstance(s, (int, np.integer)):
        raise ValueError(f"quantum numbers must be integers, got m={m!r}, s={s!r}")
    geometry.validate_rotor_for(spec, rotor)
    m = int(m)
    s = int(s)
    R2 = spec.R * spec.R
    energy_scale = 2.0 * rotor.M * R2 / (rotor.hbar * rotor.hbar)
    spin_const = rotor.sig * rotor.M * R2 / rotor.I * s * s

    def drift(theta):
        h, dh, _, _ = geometry.profile_arrays(spec, theta)
        return dh / h

    def q(theta):
        h, _, c, _ = geometry.profile_arrays(spec, theta)
        centrifugal = (m * m - 2.0 * m * s * c + s * s * c * c) * R2 / (h * h)
        return centrifugal + spin_const + energy_scale * V(theta)

    def weight(theta):
        h, _, _, _ = geometry.profile_arrays(spec, theta)
        return h

    return RadialProblem(
        m=m,
        s=s,
        drift=drift,
        q=q,
        weight=weight,
        energy_scale=energy_scale,
        domain=_domain_for(spec),
        spec=spec,
        rotor=rotor,
        potential=V,
    )


def apply_separated(
    spec: ManifoldSpec,
    rotor: RotorParams,
    m: int,
    s: int,
    f: Callable[[float], float],
    theta: float,
    delta: float = 1e-3,
) -> float:
    """Apply the full Laplacian to f(theta) e^{i m phi} e^{i s psi} at theta.

    The angular factors are handled exactly (each phi derivative contributes
    i m, each psi derivative i s, so the result is real); theta derivatives
    use central differences at steps delta, delta/2, delta/4 with a
    quadratic-convergence check.  theta +/- delta must stay inside f's
    domain.  Returns the finest evaluation.
    """
    coeff = laplacian_coefficients(spec, rotor, theta)
    angular = m * m * coeff.a_pp + m * s * coeff.a_ps + s * s * coeff.a_ss

    def evaluate(d: float) -> float:
        fp, f0, fm = f(theta + d), f(theta), f(theta - d)
        return coeff.a_tt * (fp - 2.0 * f0 + fm) / (d * d) + coeff.b_t * (fp - fm) / (2.0 * d) - angular * f0

    v1, v2, v3 = evaluate(delta), evaluate(delta / 2.0), evaluate(delta / 4.0)
    e1, e2 = abs(v1 - v2), abs(v2 - v3)
    tol = 1e-10 * max(1.0, abs(v3))
    if e1 > tol and e2 > tol and e1 / e2 < 2.0:
        raise GridTooCoarse(
            f"refinement ratio {e1 / e2:.2f} < 2 at theta={theta} (delta={delta}); "
            "f is not resolved at this step"
        )
    return v3
