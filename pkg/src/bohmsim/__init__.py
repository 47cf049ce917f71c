"""Pilot-wave dynamics on periodic grids.

Split-step spectral evolution of one- and two-dimensional wavefunctions,
trajectory transport along the guidance field or the equivalent Newton
form with the quantum force, ensemble equivariance checks, and many-body
center-of-mass experiments built from factorized product states.
"""

from .wavefield import (
    Grid,
    PhysicalParams,
    ScalarField,
    Wavefunction,
    init_gaussian,
    init_plane_wave,
    make_grid,
    modulus_field,
    node_mask,
    norm,
    normalize,
    position_moments,
    probability_density,
    spectral_derivative,
    velocity_field,
)
from .propagator import (
    AccuracyWarning,
    Barrier,
    EvolutionRecord,
    Free,
    Harmonic,
    Linear,
    PairwiseHarmonic,
    PotentialSpec,
    SumPotential,
    classical_force_at,
    continuity_residual,
    evaluate_potential,
    evolve,
    probability_current,
    step,
)
from .quantum_potential import (
    QFields,
    averaged_quantum_force,
    compute_qfields,
    hamilton_jacobi_energy,
)
from .trajectories import (
    BohmianState,
    Trajectory,
    TrajectoryAbort,
    crosscheck,
    integrate_guidance,
    integrate_guidance_batch,
    integrate_newton,
    integrate_newton_batch,
)
from .ensemble import (
    EnsembleSpec,
    EnsembleTrajectory,
    equivariance_distance,
    evolve_ensemble,
    mean_quantum_force,
    sample_equilibrium,
)
from .manybody import (
    CMResult,
    FactorizedNBody,
    SubsystemType,
    SymmetrizedTwoBody,
    build_symmetrized,
    no_tunneling_check,
    run_bec_experiment,
    run_cm_experiment,
)

__version__ = "0.1.0"

__all__ = [
    "AccuracyWarning",
    "Barrier",
    "BohmianState",
    "CMResult",
    "EnsembleSpec",
    "EnsembleTrajectory",
    "EvolutionRecord",
    "FactorizedNBody",
    "Free",
    "Grid",
    "Harmonic",
    "Linear",
    "PairwiseHarmonic",
    "PhysicalParams",
    "PotentialSpec",
    "QFields",
    "ScalarField",
    "SubsystemType",
    "SumPotential",
    "SymmetrizedTwoBody",
    "Trajectory",
    "TrajectoryAbort",
    "Wavefunction",
    "averaged_quantum_force",
    "build_symmetrized",
    "classical_force_at",
    "compute_qfields",
    "continuity_residual",
    "crosscheck",
    "equivariance_distance",
    "evaluate_potential",
    "evolve",
    "evolve_ensemble",
    "hamilton_jacobi_energy",
    "init_gaussian",
    "init_plane_wave",
    "integrate_guidance",
    "integrate_guidance_batch",
    "integrate_newton",
    "integrate_newton_batch",
    "make_grid",
    "mean_quantum_force",
    "modulus_field",
    "no_tunneling_check",
    "node_mask",
    "norm",
    "normalize",
    "position_moments",
    "probability_current",
    "probability_density",
    "run_bec_experiment",
    "run_cm_experiment",
    "sample_equilibrium",
    "spectral_derivative",
    "step",
    "velocity_field",
]
