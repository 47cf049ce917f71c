"""Bohmian trajectories from evolution records.

Two routes to the same path:

* ``integrate_guidance``: first-order guidance law dx/dt = v(x, t) with
  classic RK4 on the recorded velocity fields.
* ``integrate_newton``: second-order form m dv/dt = -grad(V + Q) with
  kick-drift-kick leapfrog, seeded with p0 = m v(x0, t0).

Fields are interpolated cubically in space and linearly in time between
snapshots.  RK4 needs field values at half-step times, so the trajectory
step must be commensurate with the snapshot spacing; when the spacing is
half the step, every RK4 stage lands exactly on a snapshot and temporal
interpolation drops out of the error budget entirely.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _interp
from .propagator import EvolutionRecord, PotentialSpec, classical_force_at
from .quantum_potential import compute_qfields
from .wavefield import velocity_field


class TrajectoryAbort(RuntimeError):
    """Raised when a trajectory leaves the grid or enters a node region.

    Carries the last valid time and positions as ``time`` and ``positions``.
    """

    def __init__(self, message: str, time: float, positions: np.ndarray):
        super().__init__(message)
        self.time = time
        self.positions = positions


@dataclass(frozen=True)
class BohmianState:
    """Position (and momentum, when tracked) of one particle at one time."""

    position: np.ndarray
    time: float
    momentum: np.ndarray | None = None


@dataclass(frozen=True)
class Trajectory:
    """Time series of one integrated configuration-space path."""

    times: np.ndarray
    positions: np.ndarray  # (n_times, dims)
    mode: str  # "guidance" or "newton"
    dt: float
    momenta: np.ndarray | None = None  # (n_times, dims)

    def states(self) -> list[BohmianState]:
        return [
            BohmianState(
                position=self.positions[i],
                time=float(self.times[i]),
                momentum=None if self.momenta is None else self.momenta[i],
            )
            for i in range(len(self.times))
        ]

    @property
    def final(self) -> BohmianState:
        return self.states()[-1]


class _FieldCache:
    """Lazy per-snapshot fields with eviction behind the integration front."""

    def __init__(self, record: EvolutionRecord, kind: str):
        self.record = record
        self.kind = kind  # "velocity" or "qforce"
        self._cache: dict[int, tuple[list[np.ndarray], np.ndarray]] = {}

    def fields(self, i: int) -> tuple[list[np.ndarray], np.ndarray]:
        if i not in self._cache:
            wf = self.record.snapshots[i]
            if self.kind == "velocity":
                fs = velocity_field(wf)
                self._cache[i] = ([f.values for f in fs], fs[0].valid_mask)
            else:
                qf = compute_qfields(wf)
                self._cache[i] = ([f.values for f in qf.force], qf.valid)
            for stale in [k for k in self._cache if k < i - 1]:
                del self._cache[stale]
        return self._cache[i]


def _bracket(record: EvolutionRecord, t: float) -> tuple[int, float]:
    """Snapshot index i and fraction theta with t = t_i + theta * spacing."""
    spacing = record.snapshot_spacing
    pos = (t - float(record.times[0])) / spacing
    i = int(np.floor(pos + 1e-9))
    i = min(max(i, 0), len(record) - 2)
    theta = pos - i
    if abs(theta) < 1e-9:
        theta = 0.0
    elif abs(theta - 1.0) < 1e-9:
        theta = 1.0
    return i, theta


def _eval_fields(cache: _FieldCache, t: float, x: np.ndarray) -> np.ndarray:
    """Interpolate the cached fields at positions x (M, dims), time t."""
    record = cache.record
    grid = record.grid
    inside = record.grid.contains(x)
    if not inside.all():
        bad = np.flatnonzero(~inside)
        raise TrajectoryAbort(
            f"{bad.size} trajectory position(s) left the grid at t={t:.6g}", t, x
        )
    i, theta = _bracket(record, t)
    out = np.empty_like(x)
    if theta == 0.0 or theta == 1.0:
        values, valid = cache.fields(i + int(theta))
        if not _interp.stencil_valid(valid, grid, x).all():
            raise TrajectoryAbort(f"trajectory entered a node region at t={t:.6g}", t, x)
        for d in range(grid.dims):
            out[:, d] = _interp.interpolate(values[d], grid, x)
        return out
    va, valid_a = cache.fields(i)
    vb, valid_b = cache.fields(i + 1)
    ok = _interp.stencil_valid(valid_a & valid_b, grid, x)
    if not ok.all():
        raise TrajectoryAbort(f"trajectory entered a node region at t={t:.6g}", t, x)
    for d in range(grid.dims):
        out[:, d] = (1.0 - theta) * _interp.interpolate(va[d], grid, x) + theta * _interp.interpolate(vb[d], grid, x)
    return out


def _check_commensurate(record: EvolutionRecord, dt: float) -> None:
    spacing = record.snapshot_spacing
    ratio = spacing / dt if spacing >= dt else dt / spacing
    if abs(ratio - round(ratio)) > 1e-9 * ratio:
        raise ValueError(
            f"trajectory dt={dt} is not commensurate with the snapshot spacing {spacing}"
        )


def _step_count(record: EvolutionRecord, dt: float) -> int:
    span = float(record.times[-1] - record.times[0])
    n = int(round(span / dt))
    if n < 1 or abs(n * dt - span) > 1e-9 * span:
        raise ValueError(f"record span {span} is not an integer number of steps of dt={dt}")
    return n


def integrate_guidance_batch(
    record: EvolutionRecord, x0: np.ndarray, dt: float
) -> tuple[np.ndarray, np.ndarray]:
    """RK4 guidance integration of many particles at once.

    Parameters
    ----------
    record : EvolutionRecord
        Snapshots covering the integration window.
    x0 : ndarray, shape (M, dims)
        Initial positions.
    dt : float
        Step, commensurate with the snapshot spacing.

    Returns
    -------
    times : ndarray, shape (n+1,)
    positions : ndarray, shape (n+1, M, dims)
    """
    _check_commensurate(record, dt)
    n = _step_count(record, dt)
    x = np.array(np.atleast_2d(x0), dtype=float)
    cache = _FieldCache(record, "velocity")
    t0 = float(record.times[0])
    times = t0 + dt * np.arange(n + 1)
    positions = np.empty((n + 1,) + x.shape)
    positions[0] = x
    for step_index in range(n):
        t = float(times[step_index])
        k1 = _eval_fields(cache, t, x)
        k2 = _eval_fields(cache, t + 0.5 * dt, x + 0.5 * dt * k1)
        k3 = _eval_fields(cache, t + 0.5 * dt, x + 0.5 * dt * k2)
        k4 = _eval_fields(cache, t + dt, x + dt * k3)
        x = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        positions[step_index + 1] = x
    return times, positions


def integrate_guidance(record: EvolutionRecord, x0, dt: float) -> Trajectory:
    """Integrate the guidance equation for a single initial position."""
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    times, positions = integrate_guidance_batch(record, x0[None, :], dt)
    cache = _FieldCache(record, "velocity")
    masses = np.asarray(record.params.masses_for(record.grid.dims))
    momenta = np.empty((len(times), record.grid.dims))
    for i in (0, len(times) - 1):
        momenta[i] = masses * _eval_fields(cache, float(times[i]), positions[i])[0]
    for i in range(1, len(times) - 1):
        momenta[i] = masses * _eval_fields(cache, float(times[i]), positions[i])[0]
    return Trajectory(times=times, positions=positions[:, 0, :], mode="guidance", dt=dt, momenta=momenta)


def integrate_newton_batch(
    record: EvolutionRecord, x0: np.ndarray, potential: PotentialSpec, dt: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Leapfrog integration of m dv/dt = F_classical + F_Q for many particles.

    The classical force comes from the potential spec analytically; the
    quantum force is interpolated from the record snapshots.  Initial
    momenta follow the guidance value p0 = m v(x0, t0).

    Returns ``(times, positions, momenta)``.
    """
    _check_commensurate(record, dt)
    n = _step_count(record, dt)
    x = np.array(np.atleast_2d(x0), dtype=float)
    params = record.params
    masses = np.asarray(params.masses_for(record.grid.dims))
    vel_cache = _FieldCache(record, "velocity")
    force_cache = _FieldCache(record, "qforce")
    t0 = float(record.times[0])
    times = t0 + dt * np.arange(n + 1)
    p = masses * _eval_fields(vel_cache, t0, x)

    def total_force(t: float, pos: np.ndarray) -> np.ndarray:
        return classical_force_at(potential, pos, params) + _eval_fields(force_cache, t, pos)

    positions = np.empty((n + 1,) + x.shape)
    momenta = np.empty_like(positions)
    positions[0] = x
    momenta[0] = p
    for step_index in range(n):
        t = float(times[step_index])
        p = p + 0.5 * dt * total_force(t, x)
        x = x + dt * p / masses
        p = p + 0.5 * dt * total_force(t + dt, x)
        positions[step_index + 1] = x
        momenta[step_index + 1] = p
    return times, positions, momenta


def integrate_newton(record: EvolutionRecord, x0, potential: PotentialSpec, dt: float) -> Trajectory:
    """Integrate the Newton form for a single initial position."""
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    times, positions, momenta = integrate_newton_batch(record, x0[None, :], potential, dt)
    return Trajectory(
        times=times,
        positions=positions[:, 0, :],
        mode="newton",
        dt=dt,
        momenta=momenta[:, 0, :],
    )


def crosscheck(record: EvolutionRecord, x0, potential: PotentialSpec, dt: float) -> float:
    """Largest position gap between the guidance and Newton routes."""
    guided = integrate_guidance(record, x0, dt)
    newton = integrate_newton(record, x0, potential, dt)
    gap = np.linalg.norm(guided.positions - newton.positions, axis=-1)
    return float(gap.max())
