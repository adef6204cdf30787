"""End-to-end invariant suite behind `rotorlab check`.

Each check pits a generated quantity against an independent reference:
hand-transcribed coefficient tables, closed-form spectra, dense
diagonalization, exact group identities, or a cross-method comparison
(quadrature period vs measured trajectory period).  `run_checks` returns a
result per check; the CLI renders them as a table and exits nonzero on any
failure.

The `perturb` argument is a test hook: naming a check injects an error
(sized to exceed that check's tolerance) into one of its generated
quantities, which must flip the check to failed.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from . import classical, geometry, groups, operators, spectral
from .geometry import Manifold, ManifoldSpec, RotorParams
from .groups import BodyRates, EulerAngles, Flavor
from .operators import PotentialSpec

# test-hook scales, applied to one generated quantity of the perturbed check
_PERTURB = 1.000001      # breaks 1e-12 .. 1e-10 identities
_PERTURB_COARSE = 1.001  # breaks 1e-4 spectral tolerances
_PERTURB_FINE = 1.0001   # breaks the 1e-6 period comparison


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float


# hand-transcribed coefficient tables (d2_theta, d_theta, d2_phi, d2_phi_psi, d2_psi)


def _sphere_coeffs(R, M, I, theta):
    s, c = np.sin(theta), np.cos(theta)
    return (
        1.0 / R**2,
        (c / s) / R**2,
        1.0 / (R**2 * s**2),
        -2.0 * c / (R**2 * s**2),
        (M * R**2 * s**2 + I * c**2) / (I * R**2 * s**2),
    )


def _pseudosphere_coeffs(R, M, I, theta, sig):
    sh, ch = np.sinh(theta), np.cosh(theta)
    cth = ch / sh
    return (
        1.0 / R**2,
        cth / R**2,
        1.0 / (R**2 * sh**2),
        -2.0 * ch / (R**2 * sh**2),
        sig * M / I + cth**2 / R**2,
    )


def _torus_coeffs(R, L, M, I, theta):
    s, c = np.sin(theta), np.cos(theta)
    ring = L + R * c
    return (
        1.0 / R**2,
        -s / (R * ring),
        1.0 / ring**2,
        -2.0 * s / ring**2,
        M / I + s**2 / ring**2,
    )


def _rel_err(a, b):
    return np.max(np.abs(np.asarray(a) - np.asarray(b)) / np.maximum(np.abs(b), 1e-30))


def check_sphere_resonance_spectrum(perturbed=False):
    """Lowest six levels of the resonant sphere problem equal j(j+1)."""
    spec = ManifoldSpec(Manifold.SPHERE, R=1.0)
    rotor = RotorParams(M=1.0, I=1.0)  # I = M R^2
    t0 = time.perf_counter()
    result = spectral.solve_spectrum(spec, rotor, 0, 0, PotentialSpec.zero(), k=6)
    elapsed = time.perf_counter() - t0
    eps = result.eigenvalues_dimensionless * (_PERTURB_COARSE if perturbed else 1.0)
    target = np.array([0.0, 2.0, 6.0, 12.0, 20.0, 30.0])
    abs0 = abs(eps[0] - target[0])
    rel = np.abs(eps[1:] - target[1:]) / target[1:]
    passed = abs0 < 1e-4 and np.all(rel < 1e-4) and elapsed < 2.0
    return passed, f"max rel err {rel.max():.2e}, |eps0| {abs0:.2e}, solve {elapsed:.2f}s"


def check_symmetric_top_spectrum(perturbed=False):
    """General-inertia sphere levels j(j+1) - s^2 + (M R^2/I) s^2, dense cross-check."""
    spec = ManifoldSpec(Manifold.SPHERE, R=1.0)
    rotor = RotorParams(M=1.0, I=0.5)  # M R^2 / I = 2
    k = 5
    target = np.array([j * (j + 1) + 1.0 for j in range(1, k + 1)])

    eps = {}
    for n in (500, 1000, 2000):
        grid = spectral.Grid.cell_centered(0.0, math.pi, n)
        eps[n] = spectral.solve_spectrum(
            spec, rotor, 1, 1, PotentialSpec.zero(), grid=grid, k=k
        ).eigenvalues_dimensionless
    eps[1000] = eps[1000] * (_PERTURB_COARSE if perturbed else 1.0)

    # independent dense diagonalization of the same operator at n and 2n
    dense = {}
    for n in (1000, 2000):
        grid = spectral.Grid.cell_centered(0.0, math.pi, n)
        problem = operators.radial_problem(spec, rotor, 1, 1, PotentialSpec.zero())
        A = spectral.discretize(problem, grid).to_dense()
        dense[n] = np.linalg.eigvalsh(A)[:k]

    rel = _rel_err(eps[1000], target)
    rel_dense = max(_rel_err(dense[1000], target), _rel_err(dense[2000], target))
    cross = max(_rel_err(eps[1000], dense[1000]), _rel_err(eps[2000], dense[2000]))
    ratio = (eps[500] - eps[1000]) / (eps[1000] - eps[2000])
    ratio_ok = np.all((ratio > 3.5) & (ratio < 4.5))
    passed = rel < 1e-4 and rel_dense < 1e-4 and cross < 1e-9 and ratio_ok
    return passed, (
        f"rel err {rel:.2e}, dense {rel_dense:.2e}, tridiag-vs-dense {cross:.2e}, "
        f"Richardson {ratio.min():.2f}..{ratio.max():.2f}"
    )


def check_laplacian_transcription(perturbed=False):
    """Generated coefficients equal the per-geometry transcriptions, incl. resonance."""
    rng = np.random.default_rng(20240811)
    worst = 0.0
    scale = _PERTURB if perturbed else 1.0

    cases = []
    sphere = ManifoldSpec(Manifold.SPHERE, R=1.4)
    cases.append((sphere, RotorParams(M=1.2, I=0.8), rng.uniform(0.05, math.pi - 0.05, 1000)))
    pseudo = ManifoldSpec(Manifold.PSEUDOSPHERE, R=0.9)
    cases.append((pseudo, RotorParams(M=1.1, I=2.3), rng.uniform(0.05, 6.0, 1000)))
    cases.append((pseudo, RotorParams(M=1.1, I=2.3, sig=-1), rng.uniform(0.05, 6.0, 1000)))
    torus = ManifoldSpec(Manifold.TORUS, R=1.0, L=2.5)
    cases.append((torus, RotorParams(M=0.7, I=1.9), rng.uniform(0.0, 2 * math.pi, 1000)))

    for spec, rotor, thetas in cases:
        for theta in thetas:
            got = operators.laplacian_coefficients(spec, rotor, float(theta))
            if spec.kind is Manifold.SPHERE:
                ref = _sphere_coeffs(spec.R, rotor.M, rotor.I, theta)
            elif spec.kind is Manifold.PSEUDOSPHERE:
                ref = _pseudosphere_coeffs(spec.R, rotor.M, rotor.I, theta, rotor.sig)
            else:
                ref = _torus_coeffs(spec.R, spec.L, rotor.M, rotor.I, theta)
            vals = np.array([got.a_tt, got.b_t, got.a_pp, got.a_ps, got.a_ss]) * scale
            worst = max(worst, _rel_err(vals, np.array(ref)))

    # resonance collapse of the psi-psi coefficient at I = M R^2
    theta = np.linspace(0.2, 2.0, 50)
    res_sphere = ManifoldSpec(Manifold.SPHERE, R=1.3)
    rot = RotorParams(M=1.0, I=1.0 * 1.3**2)
    a_ss = np.array([operators.laplacian_coefficients(res_sphere, rot, float(t)).a_ss for t in theta])
    worst = max(worst, _rel_err(a_ss * scale, 1.0 / (1.3**2 * np.sin(theta) ** 2)))

    res_pseudo = ManifoldSpec(Manifold.PSEUDOSPHERE, R=1.3)
    a_ss = np.array([operators.laplacian_coefficients(res_pseudo, rot, float(t)).a_ss for t in theta])
    worst = max(worst, _rel_err(a_ss * scale, np.cosh(2 * theta) / (1.3**2 * np.sinh(theta) ** 2)))
    rot_neg = RotorParams(M=1.0, I=1.0 * 1.3**2, sig=-1)
    a_ss = np.array([operators.laplacian_coefficients(res_pseudo, rot_neg, float(t)).a_ss for t in theta])
    worst = max(worst, _rel_err(a_ss * scale, 1.0 / (1.3**2 * np.sinh(theta) ** 2)))

    return worst < 1e-12, f"max rel deviation {worst:.2e}"


def check_metric_identities(perturbed=False):
    """G Ginv = 1 and sqrt|det G| closed forms, on a theta grid per geometry."""
    worst_inv = 0.0
    worst_det = 0.0
    scale = _PERTURB if perturbed else 1.0
    cases = [
        (ManifoldSpec(Manifold.SPHERE, R=1.7), RotorParams(M=0.9, I=1.4), np.linspace(0.05, math.pi - 0.05, 200)),
        (ManifoldSpec(Manifold.PSEUDOSPHERE, R=0.8), RotorParams(M=1.3, I=0.6), np.linspace(0.05, 8.0, 200)),
        (ManifoldSpec(Manifold.PSEUDOSPHERE, R=0.8), RotorParams(M=1.3, I=0.6, sig=-1), np.linspace(0.05, 8.0, 200)),
        (ManifoldSpec(Manifold.TORUS, R=1.0, L=3.0), RotorParams(M=1.0, I=2.0), np.linspace(0.0, 2 * math.pi, 200)),
    ]
    for spec, rotor, thetas in cases:
        ratio = math.sqrt(rotor.I / rotor.M)
        for theta in thetas:
            field = geometry.metric_tensor(spec, rotor, float(theta))
            worst_inv = max(worst_inv, np.abs(field.G @ field.Ginv * scale - np.eye(3)).max())
            h, _, _, _ = geometry.profile_arrays(spec, float(theta))
            closed = ratio * spec.R * abs(float(h))
            worst_det = max(worst_det, abs(field.sqrt_abs_det * scale - closed) / closed)
            det_closed = rotor.sig * (rotor.I / rotor.M) * spec.R**2 * float(h) ** 2
            worst_det = max(worst_det, abs(np.linalg.det(field.G) - det_closed) / abs(det_closed))
    passed = worst_inv < 1e-12 and worst_det < 1e-12
    return passed, f"max inverse deviation {worst_inv:.2e}, max det deviation {worst_det:.2e}"


def check_group_invariance(perturbed=False):
    """Kinetic-energy invariances under 100 random group translations."""
    rng = np.random.default_rng(7)
    MR2, I = 1.7, 0.6
    worst_left = worst_right = worst_bi = worst_casimir = 0.0
    scale = _PERTURB if perturbed else 1.0
    for _ in range(100):
        ang = EulerAngles(*rng.uniform(-3, 3, 3))
        rates = BodyRates(*rng.uniform(-2, 2, 3))
        U = groups.euler_matrix(ang)
        Ud = groups.euler_matrix_derivative(ang, rates)
        v = groups.velocity_from_matrices(U, Ud, Flavor.ROTATIONAL)
        T = groups.kinetic_energy_group(v, MR2, MR2, I) * scale

        A = groups.euler_matrix(EulerAngles(*rng.uniform(-3, 3, 3)))
        v_left = groups.velocity_from_matrices(A @ U, A @ Ud, Flavor.ROTATIONAL)
        T_left = groups.kinetic_energy_group(v_left, MR2, MR2, I)
        worst_left = max(worst_left, abs(T - T_left) / max(1.0, abs(T)))

        beta = rng.uniform(0, 2 * math.pi)
        Bz = np.array(
            [[math.cos(beta), -math.sin(beta), 0.0], [math.sin(beta), math.cos(beta), 0.0], [0.0, 0.0, 1.0]]
        )
        v_right = groups.velocity_from_matrices(U @ Bz, Ud @ Bz, Flavor.ROTATIONAL)
        T_right = groups.kinetic_energy_group(v_right, MR2, MR2, I)
        worst_right = max(worst_right, abs(T - T_right) / max(1.0, abs(T)))

        # spherical inertia: invariant under arbitrary right translations
        T_sph = groups.kinetic_energy_group(v, I, I, I) * scale
        v_bi = groups.velocity_from_matrices(U @ A, Ud @ A, Flavor.ROTATIONAL)
        T_bi = groups.kinetic_energy_group(v_bi, I, I, I)
        worst_bi = max(worst_bi, abs(T_sph - T_bi) / max(1.0, abs(T_sph)))

        # quadratic Casimir of the Lorentz group: I1 = I2 = -I3
        L = groups.lorentz_matrix(ang)
        Ld = groups.lorentz_matrix_derivative(ang, rates)
        w = groups.velocity_from_matrices(L, Ld, Flavor.LORENTZIAN)
        C = groups.kinetic_energy_group(w, I, I, -I) * scale
        G = groups.lorentz_matrix(EulerAngles(*rng.uniform(-1.5, 1.5, 3)))
        w_right = groups.velocity_from_matrices(L @ G, Ld @ G, Flavor.LORENTZIAN)
        C_right = groups.kinetic_energy_group(w_right, I, I, -I)
        worst_casimir = max(worst_casimir, abs(C - C_right) / max(1.0, abs(C)))

    passed = worst_left < 1e-12 and worst_right < 1e-12 and worst_bi < 1e-12 and worst_casimir < 1e-10
    return passed, (
        f"left {worst_left:.2e}, right-z {worst_right:.2e}, bi {worst_bi:.2e}, "
        f"casimir {worst_casimir:.2e}"
    )


def check_kinetic_energy_equality(perturbed=False):
    """Coordinate-form T equals group-form T on 1000 random states."""
    rng = np.random.default_rng(13)
    R, M, I = 1.2, 0.8, 1.9
    sphere = ManifoldSpec(Manifold.SPHERE, R=R)
    pseudo = ManifoldSpec(Manifold.PSEUDOSPHERE, R=R)
    rotor = RotorParams(M=M, I=I)
    scale = _PERTURB if perturbed else 1.0
    worst = 0.0
    for _ in range(1000):
        theta = rng.uniform(0.05, 2.8)
        rates = BodyRates(*rng.uniform(-2, 2, 3))
        qdot = [rates.dtheta, rates.dphi, rates.dpsi]
        ang = EulerAngles(rng.uniform(-3, 3), theta, rng.uniform(-3, 3))

        Tc = classical.kinetic_energy(sphere, rotor, theta, qdot) * scale
        v = groups.co_moving_velocity(ang, rates, Flavor.ROTATIONAL)
        Tg = groups.kinetic_energy_group(v, M * R**2, M * R**2, I)
        worst = max(worst, abs(Tc - Tg) / max(1.0, abs(Tg)))

        Tc = classical.kinetic_energy(pseudo, rotor, theta, qdot) * scale
        w = groups.co_moving_velocity(ang, rates, Flavor.LORENTZIAN)
        Tg = groups.kinetic_energy_group(w, M * R**2, M * R**2, I)
        worst = max(worst, abs(Tc - Tg) / max(1.0, abs(Tg)))
    return worst < 1e-12, f"max deviation {worst:.2e}"


def check_classical_conservation(perturbed=False):
    """Torus geodesic over 1e5 midpoint steps: drift bounds and dt^2 scaling."""
    spec = ManifoldSpec(Manifold.TORUS, R=1.0, L=3.0)
    rotor = RotorParams(M=1.0, I=2.0)
    V = PotentialSpec.zero()
    state0 = classical.State(q=(math.pi / 2, 0.0, 0.0), p=(0.4, 1.2, 0.3))
    t0 = time.perf_counter()
    rec = classical.integrate(spec, rotor, V, state0, dt=2e-3, steps=100_000)
    rec_half = classical.integrate(spec, rotor, V, state0, dt=1e-3, steps=200_000)
    elapsed = time.perf_counter() - t0
    drift = np.abs(rec.energy_drift).max() * (10.0 if perturbed else 1.0)
    drift_half = np.abs(rec_half.energy_drift).max()
    ratio = drift / drift_half
    p_drift = max(np.abs(rec.p_phi_drift).max(), np.abs(rec.p_psi_drift).max())
    passed = drift <= 1e-8 and p_drift <= 1e-10 and 3.5 <= ratio <= 4.5 and elapsed < 5.0
    return passed, (
        f"energy drift {drift:.2e}, cyclic momenta drift {p_drift:.2e}, "
        f"dt-halving ratio {ratio:.2f}, {elapsed:.2f}s [{rec.backend}]"
    )


def check_hj_consistency(perturbed=False):
    """Quadrature theta-period equals measured trajectory period, per geometry."""
    cases = [
        (
            ManifoldSpec(Manifold.TORUS, R=1.0, L=3.0),
            RotorParams(M=1.0, I=2.0),
            PotentialSpec.zero(),
            dict(E=0.25, mu=2.0, sigma=0.0, theta0=0.3),
        ),
        (
            ManifoldSpec(Manifold.SPHERE, R=1.0),
            RotorParams(M=1.0, I=2.0),
            PotentialSpec.zero(),
            dict(E=1.0, mu=1.0, sigma=0.0, theta0=math.pi / 2),
        ),
        (
            ManifoldSpec(Manifold.PSEUDOSPHERE, R=1.0),
            RotorParams(M=1.0, I=2.0),
            PotentialSpec.cosine_well(1.0),
            dict(E=1.2, mu=1.0, sigma=0.0, theta0=1.1),
        ),
    ]
    worst = 0.0
    details = []
    for spec, rotor, V, c in cases:
        sol = classical.hj_radial_momentum(spec, rotor, V, c["E"], c["mu"], c["sigma"])
        interval = next(iv for iv in sol.intervals if iv.kind in ("libration", "circulation"))
        p0 = float(sol.p_theta(c["theta0"]))
        state0 = classical.State(q=(c["theta0"], 0.0, 0.0), p=(p0, c["mu"], c["sigma"]))
        rec = classical.integrate(spec, rotor, V, state0, dt=5e-4, steps=400_000)
        measured = classical.theta_period_from_trajectory(rec)
        quad = interval.period * (_PERTURB_FINE if perturbed else 1.0)
        rel = abs(measured - quad) / quad
        worst = max(worst, rel)
        details.append(f"{spec.kind.value} {rel:.1e}")
    return worst < 1e-6, "period rel err: " + ", ".join(details)


def check_hermiticity_orthogonality(perturbed=False):
    """Exact matrix symmetry, weighted orthonormality, pole-regular decay."""
    spec = ManifoldSpec(Manifold.SPHERE, R=1.0)
    rotor = RotorParams(M=1.0, I=1.0)
    problem = operators.radial_problem(spec, rotor, 1, 1, PotentialSpec.zero())
    grid = spectral.default_grid(spec)
    A = spectral.discretize(problem, grid).to_dense()
    # additive injection: the symmetry deviation is exactly zero
    asym = np.abs(A - A.T).max() + (1e-12 if perturbed else 0.0)

    result = spectral.solve_spectrum(spec, rotor, 0, 0, PotentialSpec.zero(), k=6)
    F = result.eigenfunctions / result.norm_constant
    gram = (F * result.weights[None, :]) @ F.T * result.spacing
    ortho = np.abs(gram - np.eye(F.shape[0])).max()

    # |m - s| = 2 forces f ~ theta^2 at the first node
    reg = spectral.solve_spectrum(spec, rotor, 2, 0, PotentialSpec.zero(), k=1)
    f = np.abs(reg.eigenfunctions[0])
    decay = f[0] / f.max()
    bound = 10.0 * reg.nodes[0] ** 2
    passed = asym == 0.0 and ortho <= 1e-8 and decay <= bound
    return passed, f"symmetry {asym:.1e}, orthonormality {ortho:.1e}, pole decay {decay:.2e} <= {bound:.2e}"


ALL_CHECKS = [
    ("sphere-resonance-spectrum", check_sphere_resonance_spectrum),
    ("symmetric-top-spectrum", check_symmetric_top_spectrum),
    ("laplacian-transcription", check_laplacian_transcription),
    ("metric-identities", check_metric_identities),
    ("group-invariance", check_group_invariance),
    ("kinetic-energy-equality", check_kinetic_energy_equality),
    ("classical-conservation", check_classical_conservation),
    ("hj-consistency", check_hj_consistency),
    ("hermiticity-orthogonality", check_hermiticity_orthogonality),
]


def run_checks(names=None, perturb: str | None = None) -> list[CheckResult]:
    """Run the invariant suite (all checks, or the named subset).

    perturb: name of a single check to run with an injected coefficient
    error (test hook; that check must then fail).
    """
    selected = [(n, fn) for n, fn in ALL_CHECKS if names is None or n in names]
    if names is not None:
        unknown = set(names) - {n for n, _ in ALL_CHECKS}
        if unknown:
            raise ValueError(f"unknown check names: {sorted(unknown)}")
    if perturb is not None and perturb not in {n for n, _ in ALL_CHECKS}:
        raise ValueError(f"unknown check name for perturbation: {perturb}")
    results = []
    for name, fn in selected:
        t0 = time.perf_counter()
        try:
            passed, detail = fn(perturbed=(name == perturb))
        except Exception as exc:  # a crashed check is a failed check
            passed, detail = False, f"{type(exc).__name__}: {exc}"
        results.append(CheckResult(name, bool(passed), detail, time.perf_counter() - t0))
    return results
