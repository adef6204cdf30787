"""Classical rotor dynamics: Hamiltonian, symplectic integration, quadrature.

The Hamiltonian is H = (1/2M) G^ij p_i p_j + V(theta) with the inverse
configuration metric of `geometry`.  phi and psi are cyclic, so p_phi and
p_psi are constants of motion; their values (mu, sigma) reduce the dynamics
to one theta degree of freedom, and the stationary action separates as

    S = S_theta(theta) + mu phi + sigma psi,
    p_theta(theta)^2 = 2 M R^2 (E - V) - R^2 (G^pp mu^2 + 2 G^ps mu sigma + G^ss sigma^2).

Trajectories are integrated with a fixed-step implicit midpoint scheme
(second order, time-reversible, symplectic); the stepping loop lives in
`rotorlab._kernels` with a compiled backend when available.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.integrate

from . import _kernels, geometry
from .errors import NoAllowedRegion, PoleApproach, StepRejected
from .geometry import Manifold, ManifoldSpec, RotorParams
from .operators import PotentialKind, PotentialSpec

_GEOM_CODE = {
    Manifold.SPHERE: _kernels.GEOM_SPHERE,
    Manifold.PSEUDOSPHERE: _kernels.GEOM_PSEUDOSPHERE,
    Manifold.TORUS: _kernels.GEOM_TORUS,
}
_POT_CODE = {
    PotentialKind.ZERO: _kernels.POT_ZERO,
    PotentialKind.COSINE_WELL: _kernels.POT_COSINE_WELL,
    PotentialKind.HARMONIC: _kernels.POT_HARMONIC,
}


@dataclass(frozen=True)
class State:
    """Phase-space point: coordinates (theta, phi, psi) and conjugate momenta."""

    q: tuple[float, float, float]
    p: tuple[float, float, float]

    @property
    def theta(self) -> float:
        return self.q[0]

    def as_array(self) -> np.ndarray:
        return np.array([*self.q, *self.p], dtype=float)


@dataclass(frozen=True)
class TrajectoryRecord:
    """Sampled trajectory with conservation diagnostics.

    states[i] = (theta, phi, psi, p_theta, p_phi, p_psi) at times[i]; the
    torus latitude is left unwrapped for continuity.  Drift series are
    relative to the initial value when it is nonzero, absolute otherwise.
    """

    times: np.ndarray
    states: np.ndarray
    energy_drift: np.ndarray
    p_phi_drift: np.ndarray
    p_psi_drift: np.ndarray
    steps_done: int
    dt: float
    backend: str = field(default=_kernels.BACKEND)


def momenta_from_rates(spec: ManifoldSpec, rotor: RotorParams, theta: float, rates) -> np.ndarray:
    """Conjugate momenta p = M G(theta) qdot."""
    G = geometry.metric_tensor(spec, rotor, theta).G
    return rotor.M * (G @ np.asarray(rates, dtype=float))


def rates_from_momenta(spec: ManifoldSpec, rotor: RotorParams, theta: float, momenta) -> np.ndarray:
    """Coordinate velocities qdot = G^-1(theta) p / M."""
    Ginv = geometry.metric_tensor(spec, rotor, theta).Ginv
    return (Ginv @ np.asarray(momenta, dtype=float)) / rotor.M


def kinetic_energy(spec: ManifoldSpec, rotor: RotorParams, theta: float, rates) -> float:
    """Coordinate-form kinetic energy T = (M/2) qdot^T G qdot."""
    G = geometry.metric_tensor(spec, rotor, theta).G
    v = np.asarray(rates, dtype=float)
    return 0.5 * rotor.M * float(v @ G @ v)


def hamiltonian(spec: ManifoldSpec, rotor: RotorParams, V: PotentialSpec, state: State) -> float:
    """H = (1/2M) p^T G^-1 p + V(theta)."""
    Ginv = geometry.metric_tensor(spec, rotor, state.theta).Ginv
    p = np.asarray(state.p, dtype=float)
    return float(p @ Ginv @ p) / (2.0 * rotor.M) + float(V(state.theta))


def hamiltonian_values(spec: ManifoldSpec, rotor: RotorParams, V: PotentialSpec, states: np.ndarray) -> np.ndarray:
    """Vectorized H over an (N, 6) state array."""
    theta = states[:, 0]
    pth, pph, pps = states[:, 3], states[:, 4], states[:, 5]
    h, _, c, _ = geometry.profile_arrays(spec, theta)
    h2 = h * h
    Gpp = 1.0 / h2
    Gps = -c / h2
    Gss = rotor.sig * rotor.M / rotor.I + c * c / h2
    T = (pth * pth / (spec.R * spec.R) + Gpp * pph * pph + 2.0 * Gps * pph * pps + Gss * pps * pps) / (
        2.0 * rotor.M
    )
    return T + V(theta)


def _drift(series: np.ndarray) -> np.ndarray:
    x0 = series[0]
    scale = abs(x0) if x0 != 0.0 else 1.0
    return (series - x0) / scale


def _integrate_tabulated(spec, rotor, V, z0, dt, steps, tol, max_iters, h_min, out):
    """Generic-python midpoint loop for tabulated potentials (kernels cover
    only the closed-form catalog).  Same scheme and tolerances as the kernels."""
    th, ph, ps, pth, pph, pps = (float(v) for v in z0)
    R = spec.R
    MR2 = rotor.M * R * R
    sMI = rotor.sig * rotor.M / rotor.I
    half = 0.5 * dt
    torus = spec.kind is Manifold.TORUS
    out[0] = (th, ph, ps, pth, pph, pps)
    for n in range(steps):
        ths, pths = th, pth
        tol_th = tol * (1.0 + abs(th))
        tol_pth = tol * (1.0 + abs(pth))
        converged = False
        h = c = 0.0
        for _ in range(max_iters):
            ths_new = th + half * pths / MR2
            hp = geometry.profile_arrays(spec, ths_new)
            h, dh, c, dc = (float(v) for v in hp)
            if not torus and h < h_min:
                return _kernels.STATUS_POLE, n
            h2, h3 = h * h, h * h * h
            dGpp = -2.0 * dh / h3
            dGps = -dc / h2 + 2.0 * c * dh / h3
            dGss = 2.0 * c * dc / h2 - 2.0 * c * c * dh / h3
            force = -0.5 * (dGpp * pph * pph + 2.0 * dGps * pph * pps + dGss * pps * pps) / rotor.M
            force -= V.derivative(ths_new)
            pths_new = pth + half * force
            dth_it, dpth_it = abs(ths_new - ths), abs(pths_new - pths)
            ths, pths = ths_new, pths_new
            if dth_it <= tol_th and dpth_it <= tol_pth:
                converged = True
                break
        if not converged:
            return _kernels.STATUS_REJECTED, n
        h2 = h * h
        ph += dt * (pph / h2 + (-c / h2) * pps) / rotor.M
        ps += dt * ((-c / h2) * pph + (sMI + c * c / h2) * pps) / rotor.M
        th = 2.0 * ths - th
        pth = 2.0 * pths - pth
        out[n + 1] = (th, ph, ps, pth, pph, pps)
    return _kernels.STATUS_OK, steps


def integrate(
    spec: ManifoldSpec,
    rotor: RotorParams,
    V: PotentialSpec,
    state0: State,
    dt: float,
    steps: int,
    tol: float = 1e-13,
    max_iters: int = 100,
    h_min: float | None = None,
) -> TrajectoryRecord:
    """Integrate Hamilton's equations with fixed-step implicit midpoint.

    The cyclic momenta are invariants of the scheme itself; energy drift is
    second order in dt.  Raises PoleApproach (partial record attached on
    the exception) when the trajectory comes within h_min of a coordinate
    pole, StepRejected if the fixed-point solve stalls.
    """
    geometry.validate_rotor_for(spec, rotor)
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    geometry.require_interior(spec, state0.theta)
    if h_min is None:
        h_min = 1e-6 * spec.R

    z0 = state0.as_array()
    out = np.empty((steps + 1, 6), dtype=float)
    if V.kind is PotentialKind.TABULATED:
        status, done = _integrate_tabulated(spec, rotor, V, z0, dt, steps, tol, max_iters, h_min, out)
    else:
        status, done = _kernels.integrate_midpoint(
            _GEOM_CODE[spec.kind],
            spec.R,
            spec.L if spec.L is not None else 0.0,
            rotor.M,
            rotor.I,
            float(rotor.sig),
            _POT_CODE[V.kind],
            V.V0,
            z0,
            dt,
            steps,
            tol,
            max_iters,
            h_min,
            out,
        )

    states = out[: done + 1]
    times = dt * np.arange(done + 1)
    energy = hamiltonian_values(spec, rotor, V, states)
    record = TrajectoryRecord(
        times=times,
        states=states,
        energy_drift=_drift(energy),
        p_phi_drift=_drift(states[:, 4]),
        p_psi_drift=_drift(states[:, 5]),
        steps_done=done,
        dt=dt,
    )
    if status == _kernels.STATUS_POLE:
        raise PoleApproach(f"h < {h_min} after {done} steps", steps_done=done, record=record)
    if status == _kernels.STATUS_REJECTED:
        raise StepRejected(
            f"fixed point did not converge within {max_iters} iterations at step {done}",
            steps_done=done,
            record=record,
        )
    return record


@dataclass(frozen=True)
class AllowedInterval:
    """One connected component of the classically allowed set {p_theta^2 >= 0}.

    kind is 'libration' (two turning points), 'circulation' (full periodic
    latitude circle, torus only) or 'unbound' (reaches a domain limit).
    period is the theta-oscillation (or circulation) period, None for
    unbound intervals; action is the reduced action over the interval
    (one sweep lo -> hi, or one full circle for circulation).
    """

    theta_lo: float
    theta_hi: float
    lo_is_turning: bool
    hi_is_turning: bool
    kind: str
    action: float
    period: float | None


@dataclass(frozen=True)
class HJRadialSolution:
    """Radial momentum function and its allowed-motion decomposition."""

    energy: float
    mu: float
    sigma: float
    turning_points: np.ndarray
    intervals: tuple[AllowedInterval, ...]
    p_theta_squared: object = field(repr=False)
    p_theta: object = field(repr=False)


def _bisect_root(fn, lo, hi, tol=1e-10):
    """Plain bisection on a bracketed sign change."""
    flo = fn(lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fmid = fn(mid)
        if hi - lo <= tol:
            return mid
        if (flo < 0) == (fmid < 0):
            lo, flo = mid, fmid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def hj_radial_momentum(
    spec: ManifoldSpec,
    rotor: RotorParams,
    V: PotentialSpec,
    E: float,
    mu: float,
    sigma: float,
    theta_max: float = 12.0,
    n_scan: int = 4001,
) -> HJRadialSolution:
    """Radial momentum of the separated stationary action at fixed (E, mu, sigma).

    Turning points are located by bisection (1e-10 in theta) on a uniform
    scan of n_scan points; the pseudosphere scan is truncated at theta_max.
    Actions and periods are adaptive quadratures with the square-root
    turning-point behavior transformed away.
    """
    geometry.validate_rotor_for(spec, rotor)
    R2 = spec.R * spec.R
    M = rotor.M

    def psq(theta):
        theta = np.asarray(theta, dtype=float)
        h, _, c, _ = geometry.profile_arrays(spec, theta)
        h2 = h * h
        Gpp = 1.0 / h2
        Gps = -c / h2
        Gss = rotor.sig * M / rotor.I + c * c / h2
        cent = Gpp * mu * mu + 2.0 * Gps * mu * sigma + Gss * sigma * sigma
        out = 2.0 * M * R2 * (E - V(theta)) - R2 * cent
        return out if out.ndim else float(out)

    def p_theta(theta):
        return np.sqrt(np.maximum(psq(theta), 0.0))

    lo_dom, hi_dom, topology = spec.theta_domain
    periodic = topology == "periodic"
    if periodic:
        scan_lo, scan_hi = 0.0, 2.0 * math.pi
    elif math.isinf(hi_dom):
        scan_lo, scan_hi = 1e-6, theta_max
    else:
        scan_lo, scan_hi = lo_dom + 1e-6, hi_dom - 1e-6

    grid = np.linspace(scan_lo, scan_hi, n_scan)
    vals = psq(grid)
    if np.all(vals < 0):
        raise NoAllowedRegion(f"p_theta^2 < 0 throughout [{scan_lo}, {scan_hi}] for E={E}, mu={mu}, sigma={sigma}")

    sign_change = np.nonzero(np.diff(np.signbit(vals)))[0]
    turning = np.array([_bisect_root(psq, grid[i], grid[i + 1]) for i in sign_change])

    intervals = []
    if periodic:
        if turning.size == 0:
            # full latitude circle: circulation
            period = scipy.integrate.quad(
                lambda t: M * R2 / math.sqrt(psq(t)), 0.0, 2.0 * math.pi, limit=200
            )[0]
            action = scipy.integrate.quad(lambda t: math.sqrt(psq(t)), 0.0, 2.0 * math.pi, limit=200)[0]
            intervals.append(
                AllowedInterval(0.0, 2.0 * math.pi, False, False, "circulation", action, period)
            )
        else:
            # on the circle every allowed component sits between two turning
            # points; pair them cyclically so a component may cross theta = 0
            # (then theta_hi = first turning point + 2 pi)
            pairs = list(zip(turning[:-1], turning[1:])) + [(turning[-1], turning[0] + 2.0 * math.pi)]
            for a, b in pairs:
                if psq(0.5 * (a + b)) <= 0:
                    continue
                action, period = _libration_quadratures(psq, a, b, M * R2)
                intervals.append(AllowedInterval(a, b, True, True, "libration", action, period))
        if not intervals:
            raise NoAllowedRegion(f"no allowed interval found for E={E}, mu={mu}, sigma={sigma}")
        return HJRadialSolution(E, mu, sigma, turning, tuple(intervals), psq, p_theta)

    # decompose the scan into sign-definite segments
    edges = np.concatenate(([scan_lo], turning, [scan_hi]))
    for a, b in zip(edges[:-1], edges[1:]):
        mid_val = psq(0.5 * (a + b))
        if mid_val <= 0:
            continue
        lo_turn = bool(turning.size and np.any(np.isclose(turning, a, atol=1e-9)))
        hi_turn = bool(turning.size and np.any(np.isclose(turning, b, atol=1e-9)))
        if lo_turn and hi_turn:
            action, period = _libration_quadratures(psq, a, b, M * R2)
            intervals.append(AllowedInterval(a, b, True, True, "libration", action, period))
        else:
            action = _action_open(psq, a, b)
            intervals.append(AllowedInterval(a, b, lo_turn, hi_turn, "unbound", action, None))

    if not intervals:
        raise NoAllowedRegion(f"no allowed interval found for E={E}, mu={mu}, sigma={sigma}")
    return HJRadialSolution(E, mu, sigma, turning, tuple(intervals), psq, p_theta)


def _libration_quadratures(psq, lo, hi, mr2) -> tuple[float, float]:
    """(action, period) between two simple turning points.

    Substituting theta = mid + amp sin(u) absorbs the square-root vanishing
    of p_theta at both ends, leaving smooth integrands in u.
    """
    mid = 0.5 * (lo + hi)
    amp = 0.5 * (hi - lo)

    def w_of(u):
        theta = mid + amp * math.sin(u)
        denom = (theta - lo) * (hi - theta)
        if denom <= 0.0:
            return 0.0
        return max(psq(theta) / denom, 1e-300)

    action = scipy.integrate.quad(
        lambda u: amp * amp * math.cos(u) ** 2 * math.sqrt(w_of(u)),
        -0.5 * math.pi,
        0.5 * math.pi,
        limit=200,
    )[0]
    period = 2.0 * mr2 * scipy.integrate.quad(
        lambda u: 1.0 / math.sqrt(w_of(u)), -0.5 * math.pi, 0.5 * math.pi, limit=200
    )[0]
    return action, period


def _action_open(psq, lo, hi) -> float:
    """Action over an interval with at most integrable sqrt endpoints."""
    return scipy.integrate.quad(lambda t: math.sqrt(max(psq(t), 0.0)), lo, hi, limit=200)[0]


def theta_period_from_trajectory(record: TrajectoryRecord) -> float:
    """Measure the theta-oscillation (or circulation) period of a trajectory.

    Librations: average spacing of upward crossings of the mid-range level,
    with linear sub-step refinement (the per-crossing interpolation bias is
    identical at every crossing and cancels in the differences).
    Circulations (monotonic theta): average time to advance by 2 pi.
    """
    t = record.times
    th = record.states[:, 0]
    dth = np.diff(th)
    if np.all(dth > 0) or np.all(dth < 0):
        total_turns = abs(th[-1] - th[0]) / (2.0 * math.pi)
        k = int(total_turns)
        if k < 1:
            raise ValueError("trajectory covers less than one full circulation")
        target = th[0] + math.copysign(2.0 * math.pi * k, th[-1] - th[0])
        idx = np.searchsorted(th if th[-1] > th[0] else -th, target if th[-1] > th[0] else -target)
        # linear interpolation of the k-th full-turn crossing
        t_cross = t[idx - 1] + (t[idx] - t[idx - 1]) * (target - th[idx - 1]) / (th[idx] - th[idx - 1])
        return float(t_cross / k)

    mid = 0.5 * (th.max() + th.min())
    y = th - mid
    up = np.nonzero((y[:-1] < 0) & (y[1:] >= 0))[0]
    if up.size < 2:
        raise ValueError("trajectory contains fewer than two upward mid-level crossings")
    frac = -y[up] / (y[up + 1] - y[up])
    t_cross = t[up] + frac * (t[up + 1] - t[up])
    return float((t_cross[-1] - t_cross[0]) / (t_cross.size - 1))
