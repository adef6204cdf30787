"""Euler-angle kinematics on SO(3) and its hyperbolic analogue on SO(1,2).

The rotor on the sphere is equivalent to a symmetric top: a point of SO(3)
parameterized by z-x-z Euler angles (phi, theta, psi).  On the pseudosphere
the same role is played by SO(1,2), the linear group preserving the ambient
form diag(1, 1, -1), with the nutation factor replaced by a boost of rapidity
chi = r/R.  This module provides the parameterizations, the co-moving
(pseudo-)angular velocity in closed form and extracted from matrix paths,
and the body-frame kinetic energy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

# ambient quadratic form preserved by SO(1,2)
ETA = np.diag([1.0, 1.0, -1.0])


class Flavor(Enum):
    ROTATIONAL = "rotational"
    LORENTZIAN = "lorentzian"


@dataclass(frozen=True)
class EulerAngles:
    """(phi, theta, psi): precession, nutation (or boost rapidity), proper rotation.

    Angles are not range-reduced; periodicity is a property, not a constraint.
    """

    phi: float
    theta: float
    psi: float


@dataclass(frozen=True)
class BodyRates:
    dphi: float
    dtheta: float
    dpsi: float


@dataclass(frozen=True)
class CoMovingVelocity:
    """Components of the body-frame velocity matrix U^-1 dU/dt."""

    w1: float
    w2: float
    w3: float
    flavor: Flavor

    def matrix(self) -> np.ndarray:
        """Reconstruct the velocity matrix: antisymmetric (rotational) or
        eta-antisymmetric (lorentzian)."""
        w1, w2, w3 = self.w1, self.w2, self.w3
        if self.flavor is Flavor.ROTATIONAL:
            return np.array([[0.0, -w3, w2], [w3, 0.0, -w1], [-w2, w1, 0.0]])
        return np.array([[0.0, -w3, w2], [w3, 0.0, w1], [w2, w1, 0.0]])


def _rot_z(a: float) -> np.ndarray:
    c, s = math.cos(a), math.sin(a)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def _rot_z_deriv(a: float) -> np.ndarray:
    c, s = math.cos(a), math.sin(a)
    return np.array([[-s, -c, 0.0], [c, -s, 0.0], [0.0, 0.0, 0.0]])


def _rot_x(a: float) -> np.ndarray:
    c, s = math.cos(a), math.sin(a)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def _rot_x_deriv(a: float) -> np.ndarray:
    c, s = math.cos(a), math.sin(a)
    return np.array([[0.0, 0.0, 0.0], [0.0, -s, -c], [0.0, c, -s]])


def _boost_x(a: float) -> np.ndarray:
    c, s = math.cosh(a), math.sinh(a)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, s], [0.0, s, c]])


def _boost_x_deriv(a: float) -> np.ndarray:
    c, s = math.cosh(a), math.sinh(a)
    return np.array([[0.0, 0.0, 0.0], [0.0, s, c], [0.0, c, s]])


def euler_matrix(angles: EulerAngles) -> np.ndarray:
    """z-x-z product Z(phi) X(theta) Z(psi); orthogonal with det +1."""
    return _rot_z(angles.phi) @ _rot_x(angles.theta) @ _rot_z(angles.psi)


def lorentz_matrix(angles: EulerAngles) -> np.ndarray:
    """Z(phi) B(theta) Z(psi) with B the (y,z) boost; satisfies L^T eta L = eta."""
    return _rot_z(angles.phi) @ _boost_x(angles.theta) @ _rot_z(angles.psi)


def euler_matrix_derivative(angles: EulerAngles, rates: BodyRates) -> np.ndarray:
    """Exact dU/dt along the path with the given instantaneous rates."""
    Z1, X, Z2 = _rot_z(angles.phi), _rot_x(angles.theta), _rot_z(angles.psi)
    return (
        rates.dphi * (_rot_z_deriv(angles.phi) @ X @ Z2)
        + rates.dtheta * (Z1 @ _rot_x_deriv(angles.theta) @ Z2)
        + rates.dpsi * (Z1 @ X @ _rot_z_deriv(angles.psi))
    )


def lorentz_matrix_derivative(angles: EulerAngles, rates: BodyRates) -> np.ndarray:
    """Exact dL/dt along the path with the given instantaneous rates."""
    Z1, B, Z2 = _rot_z(angles.phi), _boost_x(angles.theta), _rot_z(angles.psi)
    return (
        rates.dphi * (_rot_z_deriv(angles.phi) @ B @ Z2)
        + rates.dtheta * (Z1 @ _boost_x_deriv(angles.theta) @ Z2)
        + rates.dpsi * (Z1 @ B @ _rot_z_deriv(angles.psi))
    )


def co_moving_velocity(angles: EulerAngles, rates: BodyRates, flavor: Flavor) -> CoMovingVelocity:
    """Body-frame velocity components in closed form.

    Rotational:
        w1 =  cos(psi) dtheta + sin(theta) sin(psi) dphi
        w2 = -sin(psi) dtheta + sin(theta) cos(psi) dphi
        w3 =  dpsi + cos(theta) dphi
    Lorentzian (theta is the rapidity):
        w1 =  cos(psi) dtheta + sinh(theta) sin(psi) dphi
        w2 =  sin(psi) dtheta - sinh(theta) cos(psi) dphi
        w3 =  dpsi + cosh(theta) dphi
    """
    cps, sps = math.cos(angles.psi), math.sin(angles.psi)
    if flavor is Flavor.ROTATIONAL:
        st, ct = math.sin(angles.theta), math.cos(angles.theta)
        return CoMovingVelocity(
            w1=cps * rates.dtheta + st * sps * rates.dphi,
            w2=-sps * rates.dtheta + st * cps * rates.dphi,
            w3=rates.dpsi + ct * rates.dphi,
            flavor=flavor,
        )
    sh, ch = math.sinh(angles.theta), math.cosh(angles.theta)
    return CoMovingVelocity(
        w1=cps * rates.dtheta + sh * sps * rates.dphi,
        w2=sps * rates.dtheta - sh * cps * rates.dphi,
        w3=rates.dpsi + ch * rates.dphi,
        flavor=flavor,
    )


def velocity_from_matrices(U: np.ndarray, Udot: np.ndarray, flavor: Flavor) -> CoMovingVelocity:
    """Extract co-moving components from a matrix path: U^-1 dU/dt.

    The result is projected onto the Lie algebra (antisymmetric part for
    SO(3), eta-antisymmetric part for SO(1,2)) before reading components,
    which discards numerical round-off outside the algebra.
    """
    if flavor is Flavor.ROTATIONAL:
        A = U.T @ Udot
        A = 0.5 * (A - A.T)
        return CoMovingVelocity(w1=A[2, 1], w2=A[0, 2], w3=A[1, 0], flavor=flavor)
    A = ETA @ U.T @ ETA @ Udot
    A = 0.5 * (A - ETA @ A.T @ ETA)
    return CoMovingVelocity(w1=A[1, 2], w2=A[0, 2], w3=A[1, 0], flavor=flavor)


def kinetic_energy_group(v: CoMovingVelocity, I1: float, I2: float, I3: float) -> float:
    """Body-frame kinetic energy (I1 w1^2 + I2 w2^2 + I3 w3^2) / 2.

    With I1 = I2 = M R^2 and I3 = I this equals the coordinate-form kinetic
    energy of the rotor on the sphere (rotational) or pseudosphere
    (lorentzian); I3 = -I gives the quadratic Casimir of SO(1,2).
    """
    return 0.5 * (I1 * v.w1 * v.w1 + I2 * v.w2 * v.w2 + I3 * v.w3 * v.w3)
