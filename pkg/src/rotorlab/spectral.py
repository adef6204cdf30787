"""Discretization and eigen-solution of the radial problem.

The radial equation  -(1/h)(h f')' + q f = eps f  is discretized in
conservative (flux) form on a uniform grid and symmetrized by the similarity
transform g = sqrt(h) f, giving a real symmetric tridiagonal matrix (plus
two corner entries on the periodic torus grid):

    A_ii      = (h_{i-1/2} + h_{i+1/2}) / (h_i dth^2) + q_i
    A_i,i+1   = -h_{i+1/2} / (dth^2 sqrt(h_i h_{i+1}))

Boundary closures per endpoint classification:

    singular pole      zero flux through the pole face (h -> 0 there, so the
                       conservative flux vanishes; it is zeroed exactly),
    truncated wall     Dirichlet via a mirrored ghost cell (f = 0 on the face),
    periodic           wrap-around face coupling the last and first nodes.

Eigenfunctions are recovered as f = g / sqrt(h) and normalized against the
weight h; eigenvalues are dimensionless (eps = 2 M R^2 E / hbar^2).
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
import scipy.linalg

from .errors import ConvergenceFailure, IncompatibleLayout, NonFiniteCoefficient
from .geometry import Manifold, ManifoldSpec, RotorParams
from .operators import BoundaryKind, PotentialKind, PotentialSpec, RadialProblem, radial_problem

DEFAULT_N_CELL = 2000
DEFAULT_N_PERIODIC = 1024
DEFAULT_THETA_MAX = 12.0


class GridLayout(Enum):
    CELL_CENTERED = "cell-centered"
    PERIODIC = "periodic"


class NormConvention(Enum):
    UNIT_VOLUME = "unit_volume"          # total configuration volume scaled to 1
    GEOMETRIC_VOLUME = "geometric_volume"  # genuine geometric volume element


@dataclass(frozen=True)
class Grid:
    """Uniform theta grid.

    Cell-centered grids place nodes at theta_min + (i + 1/2) dth so no node
    touches a singular endpoint; periodic grids place nodes at i dth over
    [0, 2 pi).
    """

    n: int
    nodes: np.ndarray
    spacing: float
    layout: GridLayout
    theta_min: float
    theta_max: float

    def __post_init__(self):
        if self.n < 16:
            raise ValueError(f"grid needs at least 16 nodes, got {self.n}")

    @staticmethod
    def cell_centered(theta_min: float, theta_max: float, n: int) -> "Grid":
        spacing = (theta_max - theta_min) / n
        nodes = theta_min + (np.arange(n) + 0.5) * spacing
        return Grid(n, nodes, spacing, GridLayout.CELL_CENTERED, theta_min, theta_max)

    @staticmethod
    def periodic(n: int) -> "Grid":
        spacing = 2.0 * math.pi / n
        nodes = np.arange(n) * spacing
        return Grid(n, nodes, spacing, GridLayout.PERIODIC, 0.0, 2.0 * math.pi)

    def half_resolution(self) -> "Grid":
        m = max(16, self.n // 2)
        if self.layout is GridLayout.PERIODIC:
            return Grid.periodic(m)
        return Grid.cell_centered(self.theta_min, self.theta_max, m)


def default_grid(spec: ManifoldSpec, n: int | None = None, theta_max: float = DEFAULT_THETA_MAX) -> Grid:
    """Grid matching the manifold's boundary structure.

    theta_max is the truncation bound, used only for the pseudosphere.
    """
    if spec.kind is Manifold.TORUS:
        return Grid.periodic(n or DEFAULT_N_PERIODIC)
    if spec.kind is Manifold.SPHERE:
        return Grid.cell_centered(0.0, math.pi, n or DEFAULT_N_CELL)
    return Grid.cell_centered(0.0, theta_max, n or DEFAULT_N_CELL)


@dataclass(frozen=True)
class SymmetricTridiagonal:
    """Symmetric tridiagonal matrix, optionally with periodic corner entries."""

    diag: np.ndarray
    off: np.ndarray
    corner: float | None = None

    @property
    def n(self) -> int:
        return self.diag.size

    def to_dense(self) -> np.ndarray:
        A = np.diag(self.diag) + np.diag(self.off, 1) + np.diag(self.off, -1)
        if self.corner is not None:
            A[0, -1] = self.corner
            A[-1, 0] = self.corner
        return A

    def matvec(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        single = v.ndim == 1
        if single:
            v = v[:, None]
        out = self.diag[:, None] * v
        out[:-1] += self.off[:, None] * v[1:]
        out[1:] += self.off[:, None] * v[:-1]
        if self.corner is not None:
            out[0] += self.corner * v[-1]
            out[-1] += self.corner * v[0]
        return out[:, 0] if single else out

    def norm_bound(self) -> float:
        """Infinity-norm upper bound."""
        b = np.abs(self.diag).max() + 2.0 * (np.abs(self.off).max() if self.off.size else 0.0)
        if self.corner is not None:
            b += 2.0 * abs(self.corner)
        return b


def discretize(problem: RadialProblem, grid: Grid) -> SymmetricTridiagonal:
    """Assemble the symmetric matrix of the radial problem on the grid."""
    periodic_problem = problem.domain.left is BoundaryKind.PERIODIC
    if periodic_problem != (grid.layout is GridLayout.PERIODIC):
        raise IncompatibleLayout(
            f"domain boundaries ({problem.domain.left.value}, {problem.domain.right.value}) "
            f"need a different layout than {grid.layout.value}"
        )

    dth = grid.spacing
    h_nodes = np.asarray(problem.weight(grid.nodes), dtype=float)
    q_nodes = np.asarray(problem.q(grid.nodes), dtype=float)
    if not np.all(np.isfinite(q_nodes)):
        bad = grid.nodes[~np.isfinite(q_nodes)][0]
        raise NonFiniteCoefficient(f"q overflowed at theta={bad}")

    if grid.layout is GridLayout.PERIODIC:
        faces = grid.nodes + 0.5 * dth          # face i+1/2; face n-1/2 wraps to -1/2
        h_faces = np.asarray(problem.weight(faces), dtype=float)
        h_left = np.roll(h_faces, 1)            # face i-1/2
        diag = (h_left + h_faces) / (h_nodes * dth * dth) + q_nodes
        off = -h_faces[:-1] / (dth * dth * np.sqrt(h_nodes[:-1] * h_nodes[1:]))
        corner = -h_faces[-1] / (dth * dth * math.sqrt(h_nodes[-1] * h_nodes[0]))
        return SymmetricTridiagonal(diag=diag, off=off, corner=corner)

    faces = grid.theta_min + np.arange(grid.n + 1) * dth
    h_faces = np.asarray(problem.weight(faces), dtype=float)
    # boundary closures: zero flux through a pole face, mirrored ghost at a wall
    if problem.domain.left is BoundaryKind.SINGULAR:
        h_faces[0] = 0.0
    if problem.domain.right is BoundaryKind.SINGULAR:
        h_faces[-1] = 0.0
    diag = (h_faces[:-1] + h_faces[1:]) / (h_nodes * dth * dth) + q_nodes
    if problem.domain.left is BoundaryKind.TRUNCATED_DIRICHLET:
        diag[0] += h_faces[0] / (h_nodes[0] * dth * dth)
    if problem.domain.right is BoundaryKind.TRUNCATED_DIRICHLET:
        diag[-1] += h_faces[-1] / (h_nodes[-1] * dth * dth)
    off = -h_faces[1:-1] / (dth * dth * np.sqrt(h_nodes[:-1] * h_nodes[1:]))
    return SymmetricTridiagonal(diag=diag, off=off, corner=None)


def eigen_symmetric(matrix: SymmetricTridiagonal, k: int) -> tuple[np.ndarray, np.ndarray]:
    """k smallest eigenpairs, ascending; vectors are columns, l2-normalized.

    Pure tridiagonal matrices go through the LAPACK tridiagonal driver;
    periodic (corner) matrices fall back to a dense solve.  Every returned
    pair is residual-checked against ||A v - lam v|| <= 1e-10 ||A||.
    """
    n = matrix.n
    if not (1 <= k <= n):
        raise ValueError(f"need 1 <= k <= {n}, got k={k}")
    if matrix.corner is None:
        vals, vecs = scipy.linalg.eigh_tridiagonal(
            matrix.diag, matrix.off, select="i", select_range=(0, k - 1)
        )
    else:
        vals, vecs = np.linalg.eigh(matrix.to_dense())
        vals, vecs = vals[:k], vecs[:, :k]
    residual = np.linalg.norm(matrix.matvec(vecs) - vecs * vals[None, :], axis=0)
    bound = 1e-10 * matrix.norm_bound()
    if np.any(residual > bound):
        worst = int(np.argmax(residual))
        raise ConvergenceFailure(
            f"eigenpair {worst}: residual {residual[worst]:.3e} exceeds {bound:.3e} "
            f"(n={n}, k={k})"
        )
    return vals, vecs


@dataclass(frozen=True)
class SpectrumResult:
    """Eigenvalues, eigenfunctions on the grid, and solve metadata.

    eigenfunctions[k] is f_k at grid.nodes, normalized per norm_convention;
    convergence[k] estimates the signed discretization error of
    eigenvalues_dimensionless[k] (Richardson, from a half-resolution
    solve).  scattering marks box states of an unconfined pseudosphere
    problem; truncation_warning marks visible ground-state weight in the
    outer 5% of a truncated domain.
    """

    m: int
    s: int
    eigenvalues_dimensionless: np.ndarray
    eigenvalues_physical: np.ndarray
    eigenfunctions: np.ndarray
    nodes: np.ndarray
    weights: np.ndarray
    spacing: float
    norm_convention: NormConvention
    norm_constant: float
    convergence: np.ndarray
    scattering: bool
    truncation_warning: bool
    grid: Grid = field(repr=False)


def _solve_raw(problem: RadialProblem, grid: Grid, k: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(eigenvalues, base-normalized eigenfunctions f, node weights h)."""
    matrix = discretize(problem, grid)
    vals, vecs = eigen_symmetric(matrix, k)
    h_nodes = np.asarray(problem.weight(grid.nodes), dtype=float)
    # columns g are l2-normalized; f = g/sqrt(h) then has int |f|^2 h dth = dth * 1
    funcs = (vecs / np.sqrt(h_nodes)[:, None] / math.sqrt(grid.spacing)).T
    return vals, funcs, h_nodes


def solve_spectrum(
    spec: ManifoldSpec,
    rotor: RotorParams,
    m: int,
    s: int,
    V: PotentialSpec,
    grid: Grid | None = None,
    k: int = 6,
    norm_convention: NormConvention = NormConvention.UNIT_VOLUME,
) -> SpectrumResult:
    """Solve the radial eigenproblem for quantum numbers (m, s).

    Composes radial_problem -> discretize -> eigen_symmetric, undoes the
    sqrt(h) similarity transform, normalizes per convention and attaches a
    Richardson convergence estimate from a half-resolution solve.
    """
    problem = radial_problem(spec, rotor, m, s, V)
    if grid is None:
        grid = default_grid(spec)
    vals, funcs, h_nodes = _solve_raw(problem, grid, k)
    half_grid = grid.half_resolution()
    half_vals, _, _ = _solve_raw(problem, half_grid, min(k, half_grid.n))
    convergence = (half_vals[: vals.size] - vals) / 3.0

    if norm_convention is NormConvention.UNIT_VOLUME:
        norm_constant = math.sqrt(float(np.sum(h_nodes) * grid.spacing))
    else:
        norm_constant = 1.0 / math.sqrt(
            (2.0 * math.pi) ** 2 * math.sqrt(rotor.I / rotor.M) * spec.R
        )
    funcs = funcs * norm_constant

    scattering = spec.kind is Manifold.PSEUDOSPHERE and V.kind is PotentialKind.ZERO
    truncation_warning = False
    if problem.domain.right is BoundaryKind.TRUNCATED_DIRICHLET:
        outer = grid.nodes > grid.theta_max - 0.05 * (grid.theta_max - grid.theta_min)
        ground = funcs[0]
        frac = float(
            np.sum(ground[outer] ** 2 * h_nodes[outer]) / np.sum(ground**2 * h_nodes)
        )
        truncation_warning = frac > 1e-6

    return SpectrumResult(
        m=problem.m,
        s=problem.s,
        eigenvalues_dimensionless=vals,
        eigenvalues_physical=vals / problem.energy_scale,
        eigenfunctions=funcs,
        nodes=grid.nodes,
        weights=h_nodes,
        spacing=grid.spacing,
        norm_convention=norm_convention,
        norm_constant=norm_constant,
        convergence=convergence,
        scattering=scattering,
        truncation_warning=truncation_warning,
        grid=grid,
    )


def spectrum_scan(
    spec: ManifoldSpec,
    rotor: RotorParams,
    m_range,
    s_range,
    V: PotentialSpec,
    grid: Grid | None = None,
    k: int = 6,
    norm_convention: NormConvention = NormConvention.UNIT_VOLUME,
    max_workers: int | None = None,
) -> tuple[dict[tuple[int, int], SpectrumResult], dict[tuple[int, int], str]]:
    """Independent solves over a rectangle of quantum numbers.

    Cells run concurrently (bounded by max_workers or ROTORLAB_THREADS);
    per-cell failures are collected into the error table instead of
    aborting the scan.  Returns (results, errors) keyed by (m, s).
    """
    cells = [(int(m), int(s)) for m in m_range for s in s_range]
    results: dict[tuple[int, int], SpectrumResult] = {}
    errors: dict[tuple[int, int], str] = {}
    if not cells:
        return results, errors
    if max_workers is None:
        max_workers = int(os.environ.get("ROTORLAB_THREADS", "0")) or min(4, len(cells))
    max_workers = max(1, min(max_workers, len(cells)))

    def solve_cell(cell):
        m, s = cell
        return solve_spectrum(spec, rotor, m, s, V, grid=grid, k=k, norm_convention=norm_convention)

    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        futures = {cell: pool.submit(solve_cell, cell) for cell in cells}
    for cell, future in futures.items():
        exc = future.exception()
        if exc is not None:
            errors[cell] = f"{type(exc).__name__}: {exc}"
        else:
            results[cell] = future.result()
    return results, errors
