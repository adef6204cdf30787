import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from rotorlab import (
    Grid,
    Manifold,
    ManifoldSpec,
    NormConvention,
    PotentialSpec,
    RotorParams,
    discretize,
    eigen_symmetric,
    radial_problem,
    solve_spectrum,
    spectrum_scan,
)
from rotorlab.errors import IncompatibleLayout, NonFiniteCoefficient
from rotorlab.operators import BoundaryKind, RadialDomain, RadialProblem
from rotorlab.spectral import SymmetricTridiagonal, default_grid

SPHERE = ManifoldSpec(Manifold.SPHERE, R=1.0)
PSEUDO = ManifoldSpec(Manifold.PSEUDOSPHERE, R=1.0)
TORUS = ManifoldSpec(Manifold.TORUS, R=1.0, L=3.0)
ROTOR = RotorParams(M=1.0, I=1.0)


def synthetic_problem(weight, q, domain):
    """Direct construction for free-operator oracles (unit weight etc.)."""
    return RadialProblem(
        m=0,
        s=0,
        drift=lambda t: np.zeros_like(np.asarray(t, dtype=float)),
        q=q,
        weight=weight,
        energy_scale=1.0,
        domain=domain,
        spec=TORUS,
        rotor=ROTOR,
        potential=PotentialSpec.zero(),
    )


class TestGrid:
    def test_minimum_size(self):
        with pytest.raises(ValueError):
            Grid.periodic(8)

    def test_cell_centered_nodes_interior(self):
        g = Grid.cell_centered(0.0, math.pi, 100)
        assert g.nodes[0] == pytest.approx(g.spacing / 2)
        assert g.nodes[-1] == pytest.approx(math.pi - g.spacing / 2)

    def test_defaults_per_manifold(self):
        assert default_grid(SPHERE).n == 2000
        assert default_grid(TORUS).n == 1024
        g = default_grid(PSEUDO, theta_max=10.0)
        assert g.theta_max == 10.0


class TestDiscretize:
    def test_periodic_circulant_spectrum(self):
        # unit weight, zero q: the periodic flux matrix is the circulant
        # second difference with eigenvalues 2(1 - cos(2 pi k / n))/dth^2
        n = 16
        grid = Grid.periodic(n)
        ones = lambda t: np.ones_like(np.asarray(t, dtype=float))
        zero = lambda t: np.zeros_like(np.asarray(t, dtype=float))
        problem = synthetic_problem(ones, zero, RadialDomain(0, 2 * math.pi, BoundaryKind.PERIODIC, BoundaryKind.PERIODIC))
        A = discretize(problem, grid)
        expected = np.sort(2.0 * (1.0 - np.cos(2.0 * math.pi * np.arange(n) / n)) / grid.spacing**2)
        assert_allclose(np.linalg.eigvalsh(A.to_dense()), expected, rtol=1e-12, atol=1e-9)

    def test_ex925_exact_symmetry(self):
        for spec, rotor in ((SPHERE, ROTOR), (TORUS, RotorParams(M=1.0, I=2.0))):
            problem = radial_problem(spec, rotor, 1, 1, PotentialSpec.zero())
            A = discretize(problem, default_grid(spec)).to_dense()
            assert np.abs(A - A.T).max() == 0.0

    def test_weighted_constant_in_kernel(self):
        # f = 1 is annihilated: A sqrt(h) vanishes to rounding in matrix scale
        problem = radial_problem(SPHERE, ROTOR, 0, 0, PotentialSpec.zero())
        grid = default_grid(SPHERE)
        A = discretize(problem, grid)
        residual = A.matvec(np.sqrt(problem.weight(grid.nodes)))
        assert np.abs(residual).max() < 1e-12 * np.abs(A.diag).max()

    def test_layout_mismatch_rejected(self):
        problem = radial_problem(TORUS, ROTOR, 0, 0, PotentialSpec.zero())
        with pytest.raises(IncompatibleLayout):
            discretize(problem, Grid.cell_centered(0.0, 2 * math.pi, 64))
        problem = radial_problem(SPHERE, ROTOR, 0, 0, PotentialSpec.zero())
        with pytest.raises(IncompatibleLayout):
            discretize(problem, Grid.periodic(64))

    def test_non_finite_q_rejected(self):
        ones = lambda t: np.ones_like(np.asarray(t, dtype=float))

        def bad_q(t):
            t = np.asarray(t, dtype=float)
            return np.where(t > 3.0, np.inf, 0.0)

        problem = synthetic_problem(ones, bad_q, RadialDomain(0, 2 * math.pi, BoundaryKind.PERIODIC, BoundaryKind.PERIODIC))
        with pytest.raises(NonFiniteCoefficient):
            discretize(problem, Grid.periodic(64))


class TestEigenSymmetric:
    def test_diagonal_matrix(self):
        A = SymmetricTridiagonal(diag=np.array([1.0, 2.0, 3.0]), off=np.zeros(2))
        vals, vecs = eigen_symmetric(A, 3)
        assert_allclose(vals, [1.0, 2.0, 3.0])

    def test_dirichlet_second_difference_closed_form(self):
        n, dth = 40, 0.1
        A = SymmetricTridiagonal(diag=np.full(n, 2.0 / dth**2), off=np.full(n - 1, -1.0 / dth**2))
        vals, _ = eigen_symmetric(A, 10)
        k = np.arange(1, 11)
        expected = (2.0 / dth**2) * (1.0 - np.cos(k * math.pi / (n + 1)))
        assert_allclose(vals, expected, rtol=1e-12)

    def test_random_tridiagonal_vs_dense_oracle(self):
        rng = np.random.default_rng(17)
        for _ in range(10):
            n = 60
            A = SymmetricTridiagonal(diag=rng.normal(size=n), off=rng.normal(size=n - 1))
            vals, _ = eigen_symmetric(A, n)
            assert_allclose(vals, np.linalg.eigvalsh(A.to_dense()), atol=1e-10)

    def test_periodic_corner_matrix_vs_dense(self):
        rng = np.random.default_rng(18)
        n = 50
        A = SymmetricTridiagonal(diag=rng.normal(size=n), off=rng.normal(size=n - 1), corner=0.7)
        vals, vecs = eigen_symmetric(A, 5)
        assert_allclose(vals, np.linalg.eigvalsh(A.to_dense())[:5], atol=1e-10)
        assert np.linalg.norm(A.matvec(vecs) - vecs * vals[None, :]) < 1e-9

    def test_k_out_of_range(self):
        A = SymmetricTridiagonal(diag=np.ones(3), off=np.zeros(2))
        with pytest.raises(ValueError):
            eigen_symmetric(A, 4)


class TestSolveSpectrum:
    def test_legendre_spectrum(self):
        result = solve_spectrum(SPHERE, ROTOR, 0, 0, PotentialSpec.zero(), k=6)
        target = np.array([0.0, 2.0, 6.0, 12.0, 20.0, 30.0])
        assert abs(result.eigenvalues_dimensionless[0]) < 1e-8
        assert_allclose(result.eigenvalues_dimensionless[1:], target[1:], rtol=1e-4)

    def test_symmetric_top_spectrum_with_dense_oracle(self):
        rotor = RotorParams(M=1.0, I=0.5)  # M R^2 / I = 2
        grid = Grid.cell_centered(0.0, math.pi, 1200)
        result = solve_spectrum(SPHERE, rotor, 1, 1, PotentialSpec.zero(), grid=grid, k=5)
        target = np.array([j * (j + 1) + 1.0 for j in range(1, 6)])
        assert_allclose(result.eigenvalues_dimensionless, target, rtol=1e-4)
        problem = radial_problem(SPHERE, rotor, 1, 1, PotentialSpec.zero())
        dense = np.linalg.eigvalsh(discretize(problem, grid).to_dense())[:5]
        assert_allclose(result.eigenvalues_dimensionless, dense, atol=1e-9)

    def test_physical_eigenvalues_scaling(self):
        rotor = RotorParams(M=2.0, I=2.0 * 1.5**2, hbar=0.7)
        spec = ManifoldSpec(Manifold.SPHERE, R=1.5)
        result = solve_spectrum(spec, rotor, 0, 0, PotentialSpec.zero(), k=3)
        scale = 2 * 2.0 * 1.5**2 / 0.7**2
        assert_allclose(result.eigenvalues_physical, result.eigenvalues_dimensionless / scale, rtol=1e-14)

    def test_torus_constant_ground_state(self):
        result = solve_spectrum(TORUS, RotorParams(M=1.0, I=2.0), 0, 0, PotentialSpec.zero(), k=2)
        assert abs(result.eigenvalues_dimensionless[0]) < 1e-8
        f0 = result.eigenfunctions[0]
        assert np.ptp(f0) < 1e-8 * np.abs(f0).max()

    def test_richardson_ratio_every_geometry(self):
        # second-order convergence for smooth potentials, all geometries
        cases = [
            (SPHERE, ROTOR, PotentialSpec.cosine_well(0.5), (500, 1000, 2000), None),
            (PSEUDO, ROTOR, PotentialSpec.harmonic(1.0), (500, 1000, 2000), 12.0),
            (TORUS, RotorParams(M=1.0, I=2.0), PotentialSpec.cosine_well(0.5), (256, 512, 1024), None),
        ]
        for spec, rotor, V, sizes, theta_max in cases:
            eps = {}
            for n in sizes:
                grid = default_grid(spec, n=n) if theta_max is None else Grid.cell_centered(0.0, theta_max, n)
                eps[n] = solve_spectrum(spec, rotor, 1, 1, V, grid=grid, k=5).eigenvalues_dimensionless
            ratio = (eps[sizes[0]] - eps[sizes[1]]) / (eps[sizes[1]] - eps[sizes[2]])
            assert np.all((ratio > 3.5) & (ratio < 4.5)), (spec.kind, ratio)

    def test_convergence_estimate_tracks_error(self):
        grid = Grid.cell_centered(0.0, math.pi, 500)
        result = solve_spectrum(SPHERE, ROTOR, 0, 0, PotentialSpec.zero(), grid=grid, k=4)
        true_err = result.eigenvalues_dimensionless - np.array([0.0, 2.0, 6.0, 12.0])
        # Richardson estimate approximates the signed discretization error
        for est, err in zip(result.convergence[1:], true_err[1:]):
            assert est == pytest.approx(err, rel=0.2)

    def test_w_orthonormality(self):
        result = solve_spectrum(SPHERE, ROTOR, 1, 0, PotentialSpec.zero(), k=6)
        F = result.eigenfunctions / result.norm_constant
        gram = (F * result.weights[None, :]) @ F.T * result.spacing
        assert np.abs(gram - np.eye(6)).max() < 1e-8

    def test_pole_regularity(self):
        result = solve_spectrum(SPHERE, ROTOR, 2, 0, PotentialSpec.zero(), k=1)
        f = np.abs(result.eigenfunctions[0])
        theta0, theta1 = result.nodes[0], result.nodes[1]
        assert f[0] / f.max() <= 10.0 * theta0**2
        assert f[0] / f[1] == pytest.approx((theta0 / theta1) ** 2, rel=0.05)

    def test_norm_conventions_differ_by_constant(self):
        a = solve_spectrum(TORUS, RotorParams(M=1.0, I=2.0), 1, 0, PotentialSpec.zero(), k=3,
                           norm_convention=NormConvention.UNIT_VOLUME)
        b = solve_spectrum(TORUS, RotorParams(M=1.0, I=2.0), 1, 0, PotentialSpec.zero(), k=3,
                           norm_convention=NormConvention.GEOMETRIC_VOLUME)
        assert_allclose(a.eigenvalues_dimensionless, b.eigenvalues_dimensionless, rtol=1e-14)
        # same solve, different global scaling constant
        scale = a.norm_constant / b.norm_constant
        assert_allclose(a.eigenfunctions, b.eigenfunctions * scale, rtol=1e-12, atol=1e-12)

    def test_ground_state_above_potential_floor(self):
        result = solve_spectrum(SPHERE, ROTOR, 0, 0, PotentialSpec.cosine_well(1.0), k=1)
        # eps_0 >= energy_scale * min V (= 0) up to discretization slack
        assert result.eigenvalues_dimensionless[0] >= -1e-8

    def test_negative_signature_real_spectrum(self):
        rotor = RotorParams(M=1.0, I=1.0, sig=-1)
        result = solve_spectrum(PSEUDO, rotor, 1, 1, PotentialSpec.harmonic(1.0), k=4)
        assert np.all(np.isreal(result.eigenvalues_dimensionless))
        assert np.all(np.diff(result.eigenvalues_dimensionless) > 0)

    def test_truncation_warning_for_box_states(self):
        grid = Grid.cell_centered(0.0, 4.0, 400)
        box = solve_spectrum(PSEUDO, ROTOR, 0, 0, PotentialSpec.zero(), grid=grid, k=1)
        assert box.scattering is True
        assert box.truncation_warning is True
        confined = solve_spectrum(PSEUDO, ROTOR, 0, 0, PotentialSpec.harmonic(2.0), k=1)
        assert confined.scattering is False
        assert confined.truncation_warning is False


class TestScan:
    def test_resonance_degeneracy_structure(self):
        results, errors = spectrum_scan(SPHERE, ROTOR, range(-1, 2), range(-1, 2), PotentialSpec.zero(), k=4)
        assert not errors
        for (m, s), res in results.items():
            j0 = max(abs(m), abs(s))
            expected = [j * (j + 1) for j in range(j0, j0 + 4)]
            assert_allclose(res.eigenvalues_dimensionless, expected, rtol=1e-4, atol=1e-6)

    def test_empty_range(self):
        results, errors = spectrum_scan(SPHERE, ROTOR, range(0), range(0, 2), PotentialSpec.zero())
        assert results == {} and errors == {}

    def test_quantum_number_negation_symmetry(self):
        results, _ = spectrum_scan(TORUS, RotorParams(M=1.0, I=2.0), range(-2, 3), range(-1, 2),
                                   PotentialSpec.zero(), grid=Grid.periodic(256), k=3)
        for (m, s), res in results.items():
            twin = results[(-m, -s)]
            assert_allclose(res.eigenvalues_dimensionless, twin.eigenvalues_dimensionless, rtol=1e-12, atol=1e-12)

    def test_cell_errors_collected(self):
        results, errors = spectrum_scan(SPHERE, ROTOR, range(0, 2), range(0, 1), PotentialSpec.zero(),
                                        k=50000)  # k > n fails per cell
        assert not results
        assert len(errors) == 2
