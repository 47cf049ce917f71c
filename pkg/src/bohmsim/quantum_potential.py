"""Quantum potential, quantum force, and related pointwise diagnostics.

For psi = R exp(iS/hbar) the quantum potential is

    Q = - sum_d (hbar^2 / 2 m_d) (d_d^2 R) / R

and the quantum force is F_Q = -grad Q.  Derivatives of R are spectral.
F_Q is assembled with the quotient rule on derivatives of R,

    -d_e Q = sum_d c_d (d_e d_d^2 R * R - d_d^2 R * d_e R) / R^2,

so the only division happens pointwise at the end; differentiating the
masked Q field directly would smear node-region garbage across the grid.
Both fields are masked where |psi|^2 falls below the node threshold.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import _interp
from .propagator import PotentialSpec, potential_value_at
from .wavefield import (
    NODE_THRESHOLD,
    ScalarField,
    Wavefunction,
    spectral_derivative,
    velocity_field,
)


@dataclass(frozen=True)
class QFields:
    """Quantum potential Q, force components F_Q, and their validity mask."""

    q: ScalarField
    force: tuple[ScalarField, ...]
    valid: np.ndarray
    f_q_max: float


def compute_qfields(wf: Wavefunction) -> QFields:
    """Quantum potential and force of a wavefunction snapshot.

    ``f_q_max`` is the largest force magnitude over valid points, the scale
    against which the averaging identity is judged.
    """
    grid = wf.grid
    r = np.abs(wf.amplitudes)
    rho = r * r
    valid = rho >= NODE_THRESHOLD * rho.max()
    coeffs = [wf.params.hbar**2 / (2.0 * m) for m in wf.params.masses_for(grid.dims)]

    first = [spectral_derivative(r, grid, axis=d) for d in range(grid.dims)]
    second = [spectral_derivative(r, grid, axis=d, order=2) for d in range(grid.dims)]

    q = np.zeros(grid.shape)
    for d in range(grid.dims):
        term = np.zeros(grid.shape)
        np.divide(second[d], r, out=term, where=valid)
        q -= coeffs[d] * term
    q[~valid] = 0.0

    force = []
    for e in range(grid.dims):
        numerator = np.zeros(grid.shape)
        for d in range(grid.dims):
            mixed = spectral_derivative(second[d], grid, axis=e)
            numerator += coeffs[d] * (mixed * r - second[d] * first[e])
        f = np.zeros(grid.shape)
        np.divide(numerator, rho, out=f, where=valid)
        f[~valid] = 0.0
        force.append(ScalarField(grid, f, label=f"quantum-force[{e}]", valid=valid))

    magnitude = np.zeros(grid.shape)
    for f in force:
        magnitude += f.values**2
    f_q_max = float(np.sqrt(magnitude[valid].max())) if valid.any() else 0.0

    return QFields(
        q=ScalarField(grid, q, label="quantum-potential", valid=valid),
        force=tuple(force),
        valid=valid,
        f_q_max=f_q_max,
    )


def averaged_quantum_force(wf: Wavefunction) -> np.ndarray:
    """Quadrature of integral |psi|^2 d_d Q dx per dimension, shape (dims,).

    For localized states with the boundary margin this vanishes (two partial
    integrations move both derivatives onto R, leaving an exact derivative).
    A warning is issued when the state touches the periodic boundary, in
    which case the identity legitimately fails.
    """
    qf = compute_qfields(wf)
    rho = np.abs(wf.amplitudes) ** 2
    _warn_if_boundary_touched(rho)
    cell = wf.grid.cell_volume
    out = np.empty(wf.grid.dims)
    for d in range(wf.grid.dims):
        integrand = -rho * qf.force[d].values  # rho * d_d Q on the valid mask
        out[d] = float(integrand[qf.valid].sum() * cell)
    return out


def _warn_if_boundary_touched(rho: np.ndarray) -> None:
    threshold = NODE_THRESHOLD * rho.max()
    edge = np.zeros(rho.shape, dtype=bool)
    for d in range(rho.ndim):
        sl = [slice(None)] * rho.ndim
        sl[d] = 0
        edge[tuple(sl)] = True
        sl[d] = -1
        edge[tuple(sl)] = True
    if (rho[edge] >= threshold).any():
        warnings.warn(
            "state touches the periodic boundary; the quantum-force averaging "
            "identity may fail",
            stacklevel=3,
        )


def hamilton_jacobi_energy(wf: Wavefunction, potential: PotentialSpec, x) -> float:
    """Pointwise energy E = sum_d (1/2) m_d v_d^2 + V + Q at position ``x``.

    ``x`` is interpolated off-grid (cubic).  Raises ``ValueError`` when the
    interpolation stencil touches the node region.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if x.shape != (1, wf.grid.dims):
        raise ValueError(f"x must be a single point with {wf.grid.dims} coordinates")
    qf = compute_qfields(wf)
    if not bool(_interp.stencil_valid(qf.valid, wf.grid, x)[0]):
        raise ValueError(f"position {x[0]} lies in a node region")
    masses = wf.params.masses_for(wf.grid.dims)
    vel = velocity_field(wf)
    kinetic = 0.0
    for d in range(wf.grid.dims):
        v = float(_interp.interpolate(vel[d].values, wf.grid, x)[0])
        kinetic += 0.5 * masses[d] * v * v
    q = float(_interp.interpolate(qf.q.values, wf.grid, x)[0])
    v_cl = float(potential_value_at(potential, x[0], wf.params))
    return kinetic + v_cl + q
