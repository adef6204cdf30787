"""rotorlab: a point rotor on the sphere, pseudosphere and ring torus.

Classical dynamics and quantum spectra of a point mass carrying an internal
moment of inertia on three surfaces of revolution: configuration metric,
kinetic-operator coefficients, separated radial eigenproblems, group-form
kinematics, symplectic trajectories and stationary-action quadratures.
"""

from ._kernels import BACKEND as KERNEL_BACKEND
from .classical import (
    AllowedInterval,
    HJRadialSolution,
    State,
    TrajectoryRecord,
    hamiltonian,
    hj_radial_momentum,
    integrate,
    kinetic_energy,
    momenta_from_rates,
    rates_from_momenta,
    theta_period_from_trajectory,
)
from .geometry import (
    Manifold,
    ManifoldSpec,
    MetricField,
    Profile,
    RotorParams,
    arc_length,
    embed,
    frame_vectors,
    implicit_residual,
    metric_tensor,
    profile,
    scalar_curvature,
)
from .groups import (
    BodyRates,
    CoMovingVelocity,
    EulerAngles,
    Flavor,
    co_moving_velocity,
    euler_matrix,
    kinetic_energy_group,
    lorentz_matrix,
    velocity_from_matrices,
)
from .operators import (
    LaplacianCoefficients,
    PotentialKind,
    PotentialSpec,
    RadialProblem,
    apply_separated,
    laplacian_coefficients,
    radial_problem,
)
from .spectral import (
    Grid,
    NormConvention,
    SpectrumResult,
    default_grid,
    discretize,
    eigen_symmetric,
    solve_spectrum,
    spectrum_scan,
)

__version__ = "0.1.0"

__all__ = [
    "AllowedInterval",
    "BodyRates",
    "CoMovingVelocity",
    "EulerAngles",
    "Flavor",
    "Grid",
    "HJRadialSolution",
    "KERNEL_BACKEND",
    "LaplacianCoefficients",
    "Manifold",
    "ManifoldSpec",
    "MetricField",
    "NormConvention",
    "PotentialKind",
    "PotentialSpec",
    "Profile",
    "RadialProblem",
    "RotorParams",
    "SpectrumResult",
    "State",
    "TrajectoryRecord",
    "apply_separated",
    "arc_length",
    "co_moving_velocity",
    "default_grid",
    "discretize",
    "eigen_symmetric",
    "embed",
    "euler_matrix",
    "frame_vectors",
    "hamiltonian",
    "hj_radial_momentum",
    "implicit_residual",
    "integrate",
    "kinetic_energy",
    "kinetic_energy_group",
    "laplacian_coefficients",
    "lorentz_matrix",
    "metric_tensor",
    "momenta_from_rates",
    "profile",
    "radial_problem",
    "rates_from_momenta",
    "scalar_curvature",
    "solve_spectrum",
    "spectrum_scan",
    "theta_period_from_trajectory",
    "velocity_from_matrices",
]
