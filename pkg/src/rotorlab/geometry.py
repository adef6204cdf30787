"""Base surfaces and the rotor configuration-space metric.

Three surfaces of revolution are supported: the sphere of radius R, the
upper-sheet hyperboloid ("pseudosphere") of pseudoradius R, and the ring
torus with tube radius R and central radius L.  All three are described by a
common latitude profile

    h(theta)  -- azimuthal metric coefficient (circumferential radius),
    c(theta)  -- frame-rotation coupling: the body rotation rate seen in the
                 co-moving frame is  Omega = dpsi/dt + c(theta) dphi/dt.

    sphere        h = R sin(theta)       c = cos(theta)
    pseudosphere  h = R sinh(theta)      c = cosh(theta)
    torus         h = L + R cos(theta)   c = sin(theta)

A point rotor (mass M, internal moment of inertia I) moving on the surface
has configuration coordinates (theta, phi, psi), where psi is the attitude
of the carried frame.  Its kinetic energy is T = (M/2) G_ij dq^i dq^j with
the 3x3 metric assembled here; the I/M ratio and the signature sign of the
rotational term are absorbed into G.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DomainError, HemisphereError, SingularMetric

# theta counts as interior when farther than this from a singular endpoint
ENDPOINT_TOL = 1e-9


class Manifold(Enum):
    SPHERE = "sphere"
    PSEUDOSPHERE = "pseudosphere"
    TORUS = "torus"


@dataclass(frozen=True)
class ManifoldSpec:
    """Which surface, with its shape parameters.

    L (torus central radius) is required for the torus and must satisfy
    L > R so the tube does not self-intersect; it is forbidden otherwise.
    """

    kind: Manifold
    R: float
    L: float | None = None

    def __post_init__(self):
        if not (self.R > 0):
            raise ValueError(f"R must be positive, got {self.R}")
        if self.kind is Manifold.TORUS:
            if self.L is None:
                raise ValueError("torus requires a central radius L")
            if not (self.L > self.R):
                raise ValueError(f"torus requires L > R, got L={self.L}, R={self.R}")
        elif self.L is not None:
            raise ValueError(f"L is only meaningful for the torus, got L={self.L}")

    @property
    def theta_domain(self) -> tuple[float, float, str]:
        """(theta_min, theta_max, topology) with topology one of
        'singular-both', 'singular-left', 'periodic'."""
        if self.kind is Manifold.SPHERE:
            return (0.0, math.pi, "singular-both")
        if self.kind is Manifold.PSEUDOSPHERE:
            return (0.0, math.inf, "singular-left")
        return (0.0, 2.0 * math.pi, "periodic")


@dataclass(frozen=True)
class RotorParams:
    """Physical constants of the rotor.

    sig = -1 flips the sign of the rotational kinetic term; this variant is
    defined only on the pseudosphere (enforced where spec and rotor meet).
    """

    M: float
    I: float
    hbar: float = 1.0
    sig: int = 1

    def __post_init__(self):
        for name in ("M", "I", "hbar"):
            if not (getattr(self, name) > 0):
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if self.sig not in (1, -1):
            raise ValueError(f"sig must be +1 or -1, got {self.sig}")


@dataclass(frozen=True)
class Profile:
    """Latitude profile values at one theta: h, dh/dtheta, c, dc/dtheta."""

    h: float
    dh: float
    c: float
    dc: float


@dataclass(frozen=True)
class MetricField:
    """Configuration metric at one theta: G, its inverse, and sqrt|det G|.

    Coordinate order is (theta, phi, psi).  G carries the I/M ratio, so
    kinetic energy is T = (M/2) G_ij dq^i dq^j.
    """

    G: np.ndarray
    Ginv: np.ndarray
    sqrt_abs_det: float


def validate_rotor_for(spec: ManifoldSpec, rotor: RotorParams) -> None:
    """Reject parameter combinations that have no model behind them."""
    if rotor.sig == -1 and spec.kind is not Manifold.PSEUDOSPHERE:
        raise ValueError("sig=-1 (negative rotational term) is defined only on the pseudosphere")


def require_interior(spec: ManifoldSpec, theta: float) -> None:
    """Raise DomainError unless theta is strictly inside the latitude domain.

    Torus latitude is periodic, so every finite theta is interior there.
    """
    if not math.isfinite(theta):
        raise DomainError(f"theta must be finite, got {theta}")
    lo, hi, topology = spec.theta_domain
    if topology == "periodic":
        return
    if theta < lo + ENDPOINT_TOL:
        raise DomainError(f"theta={theta} at or beyond the singular endpoint {lo}")
    if topology == "singular-both" and theta > hi - ENDPOINT_TOL:
        raise DomainError(f"theta={theta} at or beyond the singular endpoint {hi}")


def profile(spec: ManifoldSpec, theta: float) -> Profile:
    """Evaluate the latitude profile (h, dh, c, dc) at an interior theta."""
    require_interior(spec, theta)
    R = spec.R
    if spec.kind is Manifold.SPHERE:
        return Profile(R * math.sin(theta), R * math.cos(theta), math.cos(theta), -math.sin(theta))
    if spec.kind is Manifold.PSEUDOSPHERE:
        return Profile(R * math.sinh(theta), R * math.cosh(theta), math.cosh(theta), math.sinh(theta))
    return Profile(spec.L + R * math.cos(theta), -R * math.sin(theta), math.sin(theta), math.cos(theta))


def profile_arrays(spec: ManifoldSpec, theta) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized (h, dh, c, dc) over an array of theta values.

    No interior check: grid builders evaluate h at domain faces where it
    legitimately vanishes.
    """
    theta = np.asarray(theta, dtype=float)
    R = spec.R
    if spec.kind is Manifold.SPHERE:
        return R * np.sin(theta), R * np.cos(theta), np.cos(theta), -np.sin(theta)
    if spec.kind is Manifold.PSEUDOSPHERE:
        return R * np.sinh(theta), R * np.cosh(theta), np.cosh(theta), np.sinh(theta)
    return spec.L + R * np.cos(theta), -R * np.sin(theta), np.sin(theta), np.cos(theta)


def metric_tensor(spec: ManifoldSpec, rotor: RotorParams, theta: float) -> MetricField:
    """Assemble the 3x3 configuration metric, its inverse and sqrt|det G|.

    Closed forms (a = sig * I/M):

        G    = [[R^2, 0,         0],
                [0,   h^2 + a c^2, a c],
                [0,   a c,         a  ]]
        Ginv = [[1/R^2, 0,        0],
                [0,   1/h^2,     -c/h^2],
                [0,  -c/h^2,  sig M/I + c^2/h^2]]

        det G = sig (I/M) R^2 h^2,   sqrt|det G| = sqrt(I/M) R |h|.
    """
    validate_rotor_for(spec, rotor)
    p = profile(spec, theta)
    if p.h == 0.0:
        raise SingularMetric(f"metric is singular at theta={theta} (h=0)")
    R, h, c = spec.R, p.h, p.c
    a = rotor.sig * rotor.I / rotor.M
    G = np.array(
        [
            [R * R, 0.0, 0.0],
            [0.0, h * h + a * c * c, a * c],
            [0.0, a * c, a],
        ]
    )
    Ginv = np.array(
        [
            [1.0 / (R * R), 0.0, 0.0],
            [0.0, 1.0 / (h * h), -c / (h * h)],
            [0.0, -c / (h * h), rotor.sig * rotor.M / rotor.I + c * c / (h * h)],
        ]
    )
    sqrt_abs_det = math.sqrt(rotor.I / rotor.M) * R * abs(h)
    return MetricField(G=G, Ginv=Ginv, sqrt_abs_det=sqrt_abs_det)


def embed(spec: ManifoldSpec, theta: float, phi: float = 0.0) -> np.ndarray:
    """Map surface coordinates to a point of the ambient 3-space.

    Unlike the chart-based operations, the poles themselves are valid here
    (they are points of the surface; only the frame is singular there).
    """
    if not (math.isfinite(theta) and math.isfinite(phi)):
        raise DomainError("theta and phi must be finite")
    lo, hi, topology = spec.theta_domain
    if topology != "periodic" and not (lo <= theta <= hi):
        raise DomainError(f"theta={theta} outside [{lo}, {hi}]")
    R = spec.R
    if spec.kind is Manifold.SPHERE:
        return np.array(
            [R * math.sin(theta) * math.cos(phi), R * math.sin(theta) * math.sin(phi), R * math.cos(theta)]
        )
    if spec.kind is Manifold.PSEUDOSPHERE:
        return np.array(
            [R * math.sinh(theta) * math.cos(phi), R * math.sinh(theta) * math.sin(phi), R * math.cosh(theta)]
        )
    rho = spec.L + R * math.cos(theta)
    return np.array([rho * math.cos(phi), rho * math.sin(phi), R * math.sin(theta)])


def implicit_residual(spec: ManifoldSpec, point) -> float:
    """Evaluate the defining polynomial of the surface at an ambient point.

    Zero iff the point lies on the surface:

        sphere        x^2 + y^2 + z^2 - R^2
        pseudosphere  -x^2 - y^2 + z^2 - R^2   (upper sheet, z > 0)
        torus         (x^2 + y^2 + z^2 + L^2 - R^2)^2 - 4 L^2 (x^2 + y^2)
    """
    x, y, z = (float(v) for v in point)
    R = spec.R
    if spec.kind is Manifold.SPHERE:
        return x * x + y * y + z * z - R * R
    if spec.kind is Manifold.PSEUDOSPHERE:
        res = -x * x - y * y + z * z - R * R
        if z <= 0.0 and abs(res) <= 1e-9 * R * R:
            raise HemisphereError(f"point {(x, y, z)} lies on the lower sheet (z <= 0)")
        return res
    L = spec.L
    s = x * x + y * y + z * z + L * L - R * R
    return s * s - 4.0 * L * L * (x * x + y * y)


def frame_vectors(spec: ManifoldSpec, theta: float) -> np.ndarray:
    """Columns of the reference orthonormal frame in surface coordinates.

    Sphere and pseudosphere use the arc-length radial coordinate r = R theta
    (radial factor 1); the torus uses theta itself (radial factor 1/R).  The
    azimuthal factor is 1/h in all cases.  Singular where h = 0.
    """
    require_interior(spec, theta)
    p = profile(spec, theta)
    if p.h == 0.0:
        raise SingularMetric(f"frame is singular at theta={theta} (h=0)")
    radial = 1.0 if spec.kind is not Manifold.TORUS else 1.0 / spec.R
    return np.array([[radial, 0.0], [0.0, 1.0 / p.h]])


def scalar_curvature(spec: ManifoldSpec, theta: float) -> float:
    """Scalar curvature 2K of the base surface at theta.

    The Gaussian curvature of a surface of revolution with profile h is
    K = -h''(r)/h(r) in arc-length parameterization, i.e. -h''(theta)/(R^2 h)
    here.  Constant for the sphere (2/R^2) and pseudosphere (-2/R^2);
    proportional to cos(theta) on the torus.
    """
    require_interior(spec, theta)
    p = profile(spec, theta)
    R = spec.R
    if spec.kind is Manifold.SPHERE:
        d2h = -R * math.sin(theta)
    elif spec.kind is Manifold.PSEUDOSPHERE:
        d2h = R * math.sinh(theta)
    else:
        d2h = -R * math.cos(theta)
    return 2.0 * (-d2h / (R * R * p.h))


def arc_length(spec: ManifoldSpec, theta: float) -> float:
    """Meridian distance r = R theta (display convenience; theta is canonical)."""
    return spec.R * theta
