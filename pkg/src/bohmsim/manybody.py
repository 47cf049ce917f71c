"""Many-body pilot-wave models built from localized one-body packets.

Three experiments live here:

* ``build_symmetrized`` / ``no_tunneling_check``: a two-body wavefunction
  symmetrized over two well-separated packets splits configuration space
  into two disjoint sectors; trajectories started in one sector stay there.

* ``run_cm_experiment``: N subsystems, each carried by a localized packet
  around a classically moving frame.  Pairwise classical forces cancel in
  the center-of-mass sum exactly, and the summed quantum force shrinks as
  the per-packet samples average out, so the center of mass obeys Newton's
  law under the external force alone.

* ``run_bec_experiment``: the contrasting case of one broad modulus shared
  by all subsystems with a coherent phase.  Every subsystem moves with the
  same velocity, the center of mass is exactly linear, and the quantum
  force does not average away relative to the (vanishing) classical force.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _interp
from .ensemble import sample_density
from .propagator import (
    EvolutionRecord,
    Free,
    PairwiseHarmonic,
    PotentialSpec,
    classical_force_at,
    evolve,
)
from .quantum_potential import compute_qfields
from .trajectories import _FieldCache, integrate_guidance_batch
from .wavefield import (
    Grid,
    PhysicalParams,
    Wavefunction,
    init_gaussian,
    make_grid,
    normalize,
    position_moments,
    velocity_field,
)

# Packets must sit at least this many widths apart for the factorized /
# symmetrized constructions to make sense.
LOCALITY_SEPARATION_SIGMAS = 8.0

# Mutual overlap allowed between symmetrization terms.
OVERLAP_BOUND = 1e-8

# Internal pairwise forces must cancel to this relative level per step.
CANCELLATION_BOUND = 1e-12

# Fraction of subsystems allowed to need resampling before aborting.
RESAMPLE_ABORT_FRACTION = 1e-3


# --------------------------------------------------------------------------
# symmetrized two-body states
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SymmetrizedTwoBody:
    """c1 psi_a(x1) psi_b(x2) + c2 psi_b(x1) psi_a(x2) on a 2D grid."""

    psi_a: Wavefunction
    psi_b: Wavefunction
    coefficients: tuple[complex, complex]
    wavefunction: Wavefunction
    centers: tuple[float, float]
    widths: tuple[float, float]
    separation: float
    term_overlap: float  # |<psi_a|psi_b>|^2, the overlap of the two terms

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.centers[0] + self.centers[1])

    @property
    def sector_boxes(self) -> tuple[tuple[tuple[float, float], ...], ...]:
        """Axis-aligned boxes for sector 1 (around (xa, xb)) and sector 2."""
        (lo, hi) = self.psi_a.grid.extents[0]
        m = self.midpoint
        below, above = (lo, m), (m, hi)
        if self.centers[0] < self.centers[1]:
            return ((below, above), (above, below))
        return ((above, below), (below, above))

    def sector_of(self, position: np.ndarray) -> np.ndarray:
        """1 or 2 for points inside a sector box, 0 elsewhere; shape (...,)."""
        x = np.atleast_2d(np.asarray(position, dtype=float))
        m = self.midpoint
        side_a = np.sign(self.centers[0] - m)
        in_one = ((x[:, 0] - m) * side_a > 0) & ((x[:, 1] - m) * side_a < 0)
        in_two = ((x[:, 0] - m) * side_a < 0) & ((x[:, 1] - m) * side_a > 0)
        return np.where(in_one, 1, np.where(in_two, 2, 0))


def build_symmetrized(
    psi_a: Wavefunction, psi_b: Wavefunction, coefficients=(2**-0.5, 2**-0.5)
) -> SymmetrizedTwoBody:
    """Symmetrize two separated one-dimensional packets over two bodies.

    Raises
    ------
    ValueError
        If the packets share no grid, sit closer than 8 widths apart
        ("locality assumption violated"), or their symmetrization terms
        overlap by more than 1e-8.
    """
    if psi_a.grid != psi_b.grid:
        raise ValueError("both packets must live on the same 1D grid")
    if psi_a.grid.dims != 1:
        raise ValueError("symmetrization takes one-dimensional packets")
    if psi_a.params != psi_b.params:
        raise ValueError("both packets must share physical parameters")
    c1, c2 = complex(coefficients[0]), complex(coefficients[1])
    if c1 == 0 and c2 == 0:
        raise ValueError("at least one coefficient must be nonzero")

    mean_a, var_a = position_moments(psi_a)
    mean_b, var_b = position_moments(psi_b)
    widths = (float(np.sqrt(var_a[0])), float(np.sqrt(var_b[0])))
    separation = float(abs(mean_b[0] - mean_a[0]))
    if separation < LOCALITY_SEPARATION_SIGMAS * max(widths):
        raise ValueError(
            f"locality assumption violated: separation {separation:.3g} is below "
            f"{LOCALITY_SEPARATION_SIGMAS} x max width {max(widths):.3g}"
        )
    cell = psi_a.grid.cell_volume
    single_overlap = abs(np.sum(np.conj(psi_a.amplitudes) * psi_b.amplitudes) * cell)
    term_overlap = float(single_overlap**2)
    if term_overlap >= OVERLAP_BOUND:
        raise ValueError(
            f"symmetrization terms overlap by {term_overlap:.3e} "
            f"(bound {OVERLAP_BOUND:.0e}); separate the packets further"
        )

    lo, hi = psi_a.grid.extents[0]
    n = psi_a.grid.points[0]
    grid2 = make_grid(2, lo, hi, n)
    params2 = PhysicalParams(
        hbar=psi_a.params.hbar, masses=(psi_a.params.masses[0], psi_a.params.masses[0])
    )
    amps = c1 * np.outer(psi_a.amplitudes, psi_b.amplitudes) + c2 * np.outer(
        psi_b.amplitudes, psi_a.amplitudes
    )
    wf2 = normalize(Wavefunction(grid2, params2, amps, time=0.0))
    return SymmetrizedTwoBody(
        psi_a=psi_a,
        psi_b=psi_b,
        coefficients=(c1, c2),
        wavefunction=wf2,
        centers=(float(mean_a[0]), float(mean_b[0])),
        widths=widths,
        separation=separation,
        term_overlap=term_overlap,
    )


@dataclass(frozen=True)
class SectorReport:
    """Sector residency of trajectories under a symmetrized two-body state."""

    times: np.ndarray
    positions: np.ndarray  # (n_times, n_traj, 2)
    sectors: np.ndarray  # (n_times, n_traj) of 1/2/0 labels
    initial_sector: np.ndarray  # (n_traj,)
    residency: np.ndarray  # (n_traj,) fraction of recorded times in the initial sector


def no_tunneling_check(
    sym: SymmetrizedTwoBody,
    x0,
    t_final: float,
    dt: float = 0.01,
    potential: PotentialSpec = Free(),
) -> SectorReport:
    """Evolve the symmetrized state and report per-trajectory sector residency.

    ``x0`` is one point (2,) or a batch (k, 2); every start must lie inside
    a sector box.  Snapshots are spaced at dt/2 so all RK4 stages land on
    recorded times.
    """
    x0 = np.atleast_2d(np.asarray(x0, dtype=float))
    initial = sym.sector_of(x0)
    if (initial == 0).any():
        raise ValueError("every initial condition must lie inside a sector box")
    record = evolve(sym.wavefunction, potential, t_final, 0.5 * dt, snapshot_stride=1)
    times, positions = integrate_guidance_batch(record, x0, dt)
    sectors = np.stack([sym.sector_of(positions[i]) for i in range(len(times))])
    residency = (sectors == initial[None, :]).mean(axis=0)
    return SectorReport(
        times=times,
        positions=positions,
        sectors=sectors,
        initial_sector=initial,
        residency=residency,
    )


# --------------------------------------------------------------------------
# factorized N-body center-of-mass dynamics
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SubsystemType:
    """A species of subsystem: packet width, mass, and its offset grid."""

    sigma: float
    mass: float = 1.0
    points: int = 256
    half_width: float = 10.0

    def packet(self, hbar: float) -> Wavefunction:
        grid = make_grid(1, -self.half_width, self.half_width, self.points)
        return init_gaussian(grid, PhysicalParams(hbar, (self.mass,)), 0.0, self.sigma)


@dataclass(frozen=True)
class FactorizedNBody:
    """N localized packets riding classical frames, factorized modulus.

    ``type_of[i]`` selects the ``SubsystemType`` of subsystem i; frames are
    classical positions/velocities advanced by the external force and the
    optional nearest-neighbour pairwise coupling.
    """

    types: tuple[SubsystemType, ...]
    type_of: np.ndarray
    frame_positions: np.ndarray
    frame_velocities: np.ndarray
    external: PotentialSpec = Free()
    coupling: PairwiseHarmonic | None = None
    hbar: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "type_of", np.asarray(self.type_of, dtype=int))
        object.__setattr__(self, "frame_positions", np.asarray(self.frame_positions, dtype=float))
        object.__setattr__(self, "frame_velocities", np.asarray(self.frame_velocities, dtype=float))
        if self.coupling is not None and not isinstance(self.coupling, PairwiseHarmonic):
            raise TypeError("coupling must be a PairwiseHarmonic (or None)")
        n = len(self.frame_positions)
        if n < 10:
            raise ValueError(f"need at least 10 subsystems, got {n}")
        if len(self.type_of) != n or len(self.frame_velocities) != n:
            raise ValueError("type_of, frame_positions, frame_velocities must share length")
        if self.type_of.min() < 0 or self.type_of.max() >= len(self.types):
            raise ValueError("type_of entries must index into types")
        spacing = np.diff(np.sort(self.frame_positions)).min()
        widest = max(t.sigma for t in self.types)
        if spacing < LOCALITY_SEPARATION_SIGMAS * widest:
            raise ValueError(
                f"locality assumption violated: frame spacing {spacing:.3g} is below "
                f"{LOCALITY_SEPARATION_SIGMAS} x max packet width {widest:.3g}"
            )

    @property
    def n_subsystems(self) -> int:
        return len(self.frame_positions)

    @property
    def masses(self) -> np.ndarray:
        return np.array([self.types[l].mass for l in self.type_of])

    @property
    def total_mass(self) -> float:
        return float(self.masses.sum())

    @classmethod
    def homogeneous(
        cls,
        n: int,
        sigma: float = 1.0,
        mass: float = 1.0,
        spacing: float | None = None,
        external: PotentialSpec = Free(),
        coupling: PairwiseHarmonic | float | None = None,
        hbar: float = 1.0,
        points: int = 256,
        half_width: float = 10.0,
    ) -> "FactorizedNBody":
        """Equal-mass subsystems of one type on a centered lattice of frames.

        A bare number for ``coupling`` means nearest-neighbour springs with
        that constant and rest length equal to the lattice spacing.
        """
        if spacing is None:
            spacing = 10.0 * sigma
        if coupling is not None and not isinstance(coupling, PairwiseHarmonic):
            coupling = PairwiseHarmonic(coupling=float(coupling), rest_length=spacing)
        frames = (np.arange(n) - 0.5 * (n - 1)) * spacing
        return cls(
            types=(SubsystemType(sigma=sigma, mass=mass, points=points, half_width=half_width),),
            type_of=np.zeros(n, dtype=int),
            frame_positions=frames,
            frame_velocities=np.zeros(n),
            external=external,
            coupling=coupling,
            hbar=hbar,
        )


@dataclass(frozen=True)
class CMResult:
    """Center-of-mass time series and force bookkeeping of one run."""

    label: str
    times: np.ndarray
    x_cm: np.ndarray
    classical_force: np.ndarray  # total external + pairwise force each step
    quantum_force: np.ndarray  # raw sum of per-subsystem quantum forces
    quantum_force_per_particle: np.ndarray
    f_q_max: float  # largest single quantum force available to one packet
    cancellation_residual: np.ndarray  # |sum of internal pairwise forces| each step
    resample_count: int
    n_subsystems: int
    total_mass: float
    contrast_ratio: float  # rms|F_Q| / (rms|F_Q| + rms|F_classical|)
    velocity_spread: float | None = None  # coherent-phase runs only

    def fit_acceleration(self) -> float:
        """Least-squares quadratic fit of x_cm(t); returns the acceleration."""
        coeffs = np.polyfit(self.times, self.x_cm, 2)
        return float(2.0 * coeffs[0])

    def fit_velocity(self) -> float:
        """Least-squares linear fit of x_cm(t); returns the slope."""
        coeffs = np.polyfit(self.times, self.x_cm, 1)
        return float(coeffs[0])


def _chain_forces(coupling: PairwiseHarmonic, x: np.ndarray) -> np.ndarray:
    """Nearest-neighbour spring forces; equal and opposite by construction."""
    stretch = coupling.coupling * (x[1:] - x[:-1] - coupling.rest_length)
    forces = np.zeros_like(x)
    forces[:-1] += stretch
    forces[1:] -= stretch
    return forces


def _sample_from_snapshot(
    wf: Wavefunction, valid: np.ndarray, count: int, rng: np.random.Generator
) -> tuple[np.ndarray, int]:
    """Equilibrium samples whose stencils avoid node regions; counts redraws."""
    rho = np.abs(wf.amplitudes) ** 2
    x = sample_density(rho, wf.grid, count, rng)
    resamples = 0
    for _ in range(100):
        ok = _interp.stencil_valid(valid, wf.grid, x)
        if ok.all():
            break
        bad = np.flatnonzero(~ok)
        resamples += bad.size
        x[bad] = sample_density(rho, wf.grid, bad.size, rng)
    return x, resamples


def _stratified_offsets(wf: Wavefunction, count: int) -> np.ndarray:
    """Offsets at the (i - 1/2)/count quantiles of |psi|^2 (1D)."""
    rho = np.abs(wf.amplitudes) ** 2
    lo, _ = wf.grid.extents[0]
    nodes = lo + (np.arange(wf.grid.points[0] + 1) - 0.5) * wf.grid.dx[0]
    cdf = np.concatenate([[0.0], np.cumsum(rho)])
    cdf /= cdf[-1]
    levels = (np.arange(count) + 0.5) / count
    return np.interp(levels, cdf, nodes)[:, None]


def run_cm_experiment(
    spec: FactorizedNBody,
    t_final: float,
    dt: float,
    sampling: str = "random",
    seed: int = 0,
) -> CMResult:
    """Transport a factorized N-body configuration and record the CM forces.

    Each subsystem's offset from its frame follows the guidance flow of its
    type's packet (evolved freely in the co-moving frame, which is exact for
    uniform external forces); frames follow classical dynamics.  The
    recorded classical force is evaluated at the actual subsystem positions,
    and the quantum force is the raw sum over subsystems, also reported per
    particle.
    """
    if sampling not in ("random", "stratified"):
        raise ValueError(f"sampling must be 'random' or 'stratified', got {sampling!r}")
    n_steps = int(round(t_final / dt))
    if n_steps < 1 or abs(n_steps * dt - t_final) > 1e-9 * t_final:
        raise ValueError(f"t_final={t_final} is not an integer number of steps of dt={dt}")

    rng = np.random.Generator(np.random.Philox(key=int(seed)))
    n = spec.n_subsystems
    masses = spec.masses
    total_mass = spec.total_mass

    # One packet record per type, snapshots at dt/2 so RK4 stages align.
    groups = [np.flatnonzero(spec.type_of == l) for l in range(len(spec.types))]
    records: list[EvolutionRecord | None] = []
    vel_caches: list[_FieldCache | None] = []
    force_caches: list[_FieldCache | None] = []
    f_q_max = 0.0
    for l, group in enumerate(groups):
        if group.size == 0:
            records.append(None)
            vel_caches.append(None)
            force_caches.append(None)
            continue
        packet = spec.types[l].packet(spec.hbar)
        record = evolve(packet, Free(), t_final, 0.5 * dt, snapshot_stride=1)
        records.append(record)
        vel_caches.append(_FieldCache(record, "velocity"))
        force_caches.append(_FieldCache(record, "qforce"))
        f_q_max = max(f_q_max, compute_qfields(packet).f_q_max)

    # Initial offsets per type.
    offsets = np.zeros((n, 1))
    resample_count = 0
    for l, group in enumerate(groups):
        if group.size == 0:
            continue
        packet = records[l].snapshots[0]
        valid = compute_qfields(packet).valid
        if sampling == "stratified":
            offsets[group] = _stratified_offsets(packet, group.size)
        else:
            drawn, redraws = _sample_from_snapshot(packet, valid, group.size, rng)
            offsets[group] = drawn
            resample_count += redraws
    if resample_count > RESAMPLE_ABORT_FRACTION * n:
        raise RuntimeError(
            f"{resample_count} of {n} offsets needed resampling; sampling is unreliable"
        )

    frames = spec.frame_positions.copy()
    frame_velocities = spec.frame_velocities.copy()
    type_params = [PhysicalParams(spec.hbar, (t.mass,)) for t in spec.types]

    def frame_force(positions: np.ndarray) -> np.ndarray:
        out = np.zeros_like(positions)
        for l, group in enumerate(groups):
            if group.size:
                out[group] = classical_force_at(
                    spec.external, positions[group, None], type_params[l]
                )[:, 0]
        if spec.coupling is not None:
            out += _chain_forces(spec.coupling, positions)
        return out

    times = dt * np.arange(n_steps + 1)
    x_cm = np.empty(n_steps + 1)
    classical_force = np.empty(n_steps + 1)
    quantum_force = np.empty(n_steps + 1)
    cancellation = np.empty(n_steps + 1)

    def interp_type_fields(caches, t: float, u: np.ndarray, l: int) -> tuple[np.ndarray, np.ndarray]:
        """Values and stencil validity of a per-type field at offsets u."""
        record = records[l]
        spacing = record.snapshot_spacing
        pos = (t - float(record.times[0])) / spacing
        i = int(np.floor(pos + 1e-9))
        i = min(max(i, 0), len(record) - 2)
        theta = pos - i
        if abs(theta) < 1e-9:
            theta = 0.0
        elif abs(theta - 1.0) < 1e-9:
            theta = 1.0
        if theta in (0.0, 1.0):
            values, valid = caches[l].fields(i + int(theta))
            ok = _interp.stencil_valid(valid, record.grid, u)
            return _interp.interpolate(values[0], record.grid, u), ok
        va, valid_a = caches[l].fields(i)
        vb, valid_b = caches[l].fields(i + 1)
        ok = _interp.stencil_valid(valid_a & valid_b, record.grid, u)
        blended = (1.0 - theta) * _interp.interpolate(va[0], record.grid, u) + theta * _interp.interpolate(vb[0], record.grid, u)
        return blended, ok

    def resample_invalid(t: float, l: int, group: np.ndarray, ok: np.ndarray) -> None:
        nonlocal resample_count
        if ok.all():
            return
        record = records[l]
        i = min(int(np.floor((t - float(record.times[0])) / record.snapshot_spacing + 1e-9)), len(record) - 1)
        snapshot = record.snapshots[i]
        valid = compute_qfields(snapshot).valid
        bad = group[~ok]
        drawn, redraws = _sample_from_snapshot(snapshot, valid, bad.size, rng)
        offsets[bad] = drawn
        resample_count += bad.size + redraws
        if resample_count > RESAMPLE_ABORT_FRACTION * max(n, n * n_steps // 100):
            raise RuntimeError("too many offsets entered node regions; model assumptions broken")

    def record_row(row: int, t: float) -> None:
        positions = frames + offsets[:, 0]
        external_total = 0.0
        for l, group in enumerate(groups):
            if group.size:
                external_total += math.fsum(
                    classical_force_at(spec.external, positions[group, None], type_params[l])[:, 0]
                )
        pairwise = _chain_forces(spec.coupling, positions) if spec.coupling is not None else np.zeros(n)
        pairwise_total = math.fsum(pairwise)
        limit = CANCELLATION_BOUND * n * max(np.abs(pairwise).max(), 1e-300)
        if spec.coupling is not None and abs(pairwise_total) > limit:
            raise RuntimeError(
                f"internal pairwise forces failed to cancel: {pairwise_total:.3e} > {limit:.3e}"
            )
        cancellation[row] = abs(pairwise_total)
        classical_force[row] = external_total + pairwise_total
        fq = 0.0
        for l, group in enumerate(groups):
            if group.size:
                values, ok = interp_type_fields(force_caches, t, offsets[group], l)
                if not ok.all():
                    resample_invalid(t, l, group, ok)
                    values, _ = interp_type_fields(force_caches, t, offsets[group], l)
                fq += math.fsum(values)
        quantum_force[row] = fq
        x_cm[row] = math.fsum(masses * positions) / total_mass

    for step_index in range(n_steps + 1):
        t = float(times[step_index])
        record_row(step_index, t)
        if step_index == n_steps:
            break
        # Offsets: RK4 along each type's packet guidance flow.
        for l, group in enumerate(groups):
            if not group.size:
                continue
            u = offsets[group]
            k1, ok = interp_type_fields(vel_caches, t, u, l)
            if not ok.all():
                resample_invalid(t, l, group, ok)
                u = offsets[group]
                k1, _ = interp_type_fields(vel_caches, t, u, l)
            k2, _ = interp_type_fields(vel_caches, t + 0.5 * dt, u + 0.5 * dt * k1[:, None], l)
            k3, _ = interp_type_fields(vel_caches, t + 0.5 * dt, u + 0.5 * dt * k2[:, None], l)
            k4, _ = interp_type_fields(vel_caches, t + dt, u + dt * k3[:, None], l)
            offsets[group] = u + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)[:, None]
        # Frames: kick-drift-kick under the classical forces.
        half_kick = frame_velocities + 0.5 * dt * frame_force(frames) / masses
        frames = frames + dt * half_kick
        frame_velocities = half_kick + 0.5 * dt * frame_force(frames) / masses

    rms_q = float(np.sqrt(np.mean(quantum_force**2)))
    rms_cl = float(np.sqrt(np.mean(classical_force**2)))
    contrast = rms_q / (rms_q + rms_cl) if (rms_q + rms_cl) > 0 else float("nan")
    return CMResult(
        label="cm-newton",
        times=times,
        x_cm=x_cm,
        classical_force=classical_force,
        quantum_force=quantum_force,
        quantum_force_per_particle=quantum_force / n,
        f_q_max=f_q_max,
        cancellation_residual=cancellation,
        resample_count=resample_count,
        n_subsystems=n,
        total_mass=total_mass,
        contrast_ratio=contrast,
    )


def run_bec_experiment(
    velocity: float,
    n_subsystems: int,
    packet_width: float,
    t_final: float,
    dt: float = 0.01,
    seed: int = 0,
    hbar: float = 1.0,
    mass: float = 1.0,
    points: int = 512,
) -> CMResult:
    """Coherent-phase contrast run: one broad modulus, phase m v x per body.

    The phase gradient gives every subsystem exactly the velocity ``v``, so
    the center of mass moves on a straight line regardless of any quantum
    force budget.  Because all subsystems share one delocalized modulus, the
    summed quantum force does *not* average out against the classical force
    (both are essentially zero here; the contrast ratio stays of order 1),
    unlike the factorized case.
    """
    if n_subsystems < 10:
        raise ValueError(f"need at least 10 subsystems, got {n_subsystems}")
    n_steps = int(round(t_final / dt))
    if n_steps < 1 or abs(n_steps * dt - t_final) > 1e-9 * t_final:
        raise ValueError(f"t_final={t_final} is not an integer number of steps of dt={dt}")
    half = 8.0 * packet_width
    grid = make_grid(1, -half, half, points)
    params = PhysicalParams(hbar, (mass,))
    wf = init_gaussian(grid, params, 0.0, packet_width, wavenumber=mass * velocity / hbar)

    rng = np.random.Generator(np.random.Philox(key=int(seed)))
    qf = compute_qfields(wf)
    x0, resamples = _sample_from_snapshot(wf, qf.valid, n_subsystems, rng)

    vel = velocity_field(wf)[0]
    v_i = _interp.interpolate(vel.values, grid, x0)
    spread = float(v_i.max() - v_i.min())
    fq_i = _interp.interpolate(qf.force[0].values, grid, x0)
    fq_total = math.fsum(fq_i)

    # The common modulus co-moves with the coherent flow, so offsets from the
    # cloud are constant and each subsystem keeps its phase-gradient velocity.
    times = dt * np.arange(n_steps + 1)
    x_cm0 = math.fsum(x0[:, 0]) / n_subsystems
    v_cm = math.fsum(v_i) / n_subsystems
    x_cm = x_cm0 + v_cm * times
    quantum_force = np.full(n_steps + 1, fq_total)
    classical_force = np.zeros(n_steps + 1)

    rms_q = float(np.sqrt(np.mean(quantum_force**2)))
    contrast = rms_q / (rms_q + 0.0) if rms_q > 0 else float("nan")
    return CMResult(
        label="bec",
        times=times,
        x_cm=x_cm,
        classical_force=classical_force,
        quantum_force=quantum_force,
        quantum_force_per_particle=quantum_force / n_subsystems,
        f_q_max=qf.f_q_max,
        cancellation_residual=np.zeros(n_steps + 1),
        resample_count=resamples,
        n_subsystems=n_subsystems,
        total_mass=mass * n_subsystems,
        contrast_ratio=contrast,
        velocity_spread=spread,
    )
