"""Lie splitting for d_t Y + f_v Y_x in -dK(Y): upwind transport, then column-wise PAVA."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .cone import centered_dx, interaction_field, project_monotone_rows
from .errors import DomainError, ShapeError
from .flux import FluxModel
from .kinetic import DefectMeasure, KineticField, defect_measure
from .transport import TransportOperator, advect, cfl_dt

DIAGNOSTIC_COLUMNS = ("t", "l2_squared", "mass", "interaction_total",
                      "grad_x_norm", "dt_velocity_norm", "defect_min")


def grad_x_norm(Y: KineticField) -> float:
    """Discrete L2 norm of the forward x-difference of Y."""
    g = Y.grid
    d = (np.roll(Y.values, -1, axis=0) - Y.values) / g.dx
    return float(np.sqrt(np.sum(d**2) * g.dx * g.dv))


def l2_norm(values: np.ndarray, grid) -> float:
    return float(np.sqrt(np.sum(values**2) * grid.dx * grid.dv))


@dataclass
class Diagnostics:
    """Per-step scalar records. Row 0 is the initial state (velocity/defect are NaN there)."""

    t: list = field(default_factory=list)
    l2_squared: list = field(default_factory=list)
    mass: list = field(default_factory=list)
    interaction_total: list = field(default_factory=list)
    grad_x_norm: list = field(default_factory=list)
    dt_velocity_norm: list = field(default_factory=list)
    defect_min: list = field(default_factory=list)
    # not serialized: max |m| at the top v-cell, per step
    defect_top: list = field(default_factory=list)

    def record(self, Y: KineticField, flux: FluxModel, tau, velocity_norm=math.nan,
               m: DefectMeasure | None = None, interaction: bool = True) -> None:
        self.t.append(Y.time)
        self.l2_squared.append(Y.l2_squared())
        self.mass.append(Y.mass())
        self.interaction_total.append(interaction_field(Y, flux, tau)[1] if interaction else math.nan)
        self.grad_x_norm.append(grad_x_norm(Y))
        self.dt_velocity_norm.append(velocity_norm)
        self.defect_min.append(math.nan if m is None else m.min)
        self.defect_top.append(math.nan if m is None else m.top_max_abs)

    def as_arrays(self) -> dict[str, np.ndarray]:
        return {k: np.asarray(getattr(self, k)) for k in DIAGNOSTIC_COLUMNS + ("defect_top",)}

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(DIAGNOSTIC_COLUMNS)
            for row in zip(*(getattr(self, k) for k in DIAGNOSTIC_COLUMNS)):
                w.writerow([format(float(a), ".17g") for a in row])

    @classmethod
    def from_csv(cls, path) -> "Diagnostics":
        d = cls()
        with open(path, newline="") as fh:
            r = csv.reader(fh)
            header = next(r)
            if tuple(header) != DIAGNOSTIC_COLUMNS:
                raise ShapeError(f"unexpected diagnostics header {header}")
            for row in r:
                for k, a in zip(DIAGNOSTIC_COLUMNS, row):
                    getattr(d, k).append(float(a))
        return d


@dataclass(frozen=True)
class StepRecord:
    """One solver step: ``residual`` is the discrete Y_t + f_v Y_x over the step."""

    t: float
    dt: float
    Y_next: np.ndarray = field(repr=False)
    residual: np.ndarray = field(repr=False)


@dataclass
class Trajectory:
    snapshots: list[tuple[float, KineticField]]
    diagnostics: Diagnostics
    steps: list[StepRecord] | None = None

    @property
    def final(self) -> KineticField:
        return self.snapshots[-1][1]


def step(Y: KineticField, flux: FluxModel, dt: float,
         op: TransportOperator | None = None) -> tuple[KineticField, DefectMeasure]:
    """Transport for ``dt`` then project every column onto the monotone cone."""
    _, Yn, m = _split_step(Y, flux, dt, op)
    return Yn, m


def _split_step(Y, flux, dt, op=None):
    op = op or TransportOperator.from_flux(flux, Y.grid)
    Yt = advect(Y, op, dt)
    Yn = Yt.with_values(project_monotone_rows(Yt.values))
    return Yt, Yn, defect_measure(Yt, Yn, dt)


def evolve(Y0: KineticField, flux: FluxModel, T: float, cfl: float = 0.5,
           output_times: Sequence[float] | None = None, tau_flat=None,
           every_step: bool = False, keep_steps: bool = False,
           diagnostics: bool | str = True) -> Trajectory:
    """Integrate to ``T`` with a fixed CFL step and a shortened final step.

    Snapshots are taken at the step times nearest to ``output_times``
    (default: the final time only); ``every_step`` snapshots all steps.
    ``keep_steps`` retains per-step residuals for :func:`variational_residual`.
    ``diagnostics=False`` skips the per-step records (only the initial row is
    kept) and ``diagnostics="light"`` records everything but the interaction
    functional, which dominates the cost on fine grids.
    """
    if not T > 0:
        raise DomainError("T must be positive")
    op = TransportOperator.from_flux(flux, Y0.grid)
    dt0 = cfl_dt(op, cfl)
    wanted = sorted(set(output_times)) if output_times is not None else [T]
    full = diagnostics is True
    diag = Diagnostics()
    diag.record(Y0, flux, tau_flat, interaction=full)
    snaps: list[tuple[float, KineticField]] = []
    steps: list[StepRecord] | None = [] if keep_steps else None
    pending = list(wanted)

    def take(prev: KineticField, cur: KineticField):
        while pending and pending[0] <= cur.time + 1e-14 * max(1.0, T):
            target = pending.pop(0)
            best = prev if abs(prev.time - target) < abs(cur.time - target) else cur
            if not snaps or snaps[-1][1] is not best:
                snaps.append((best.time, best))

    if every_step:
        snaps.append((Y0.time, Y0))
    else:
        take(Y0, Y0)
    Y = Y0
    t_end = Y0.time + T
    while t_end - Y.time > 1e-14 * max(1.0, T):
        dt = min(dt0, t_end - Y.time)
        Yt, Yn, m = _split_step(Y, flux, dt, op)
        if Yn.time > t_end or t_end - Yn.time < 1e-14 * max(1.0, T):
            Yn = Yn.with_values(Yn.values, time=t_end)
        if diagnostics:
            vel = l2_norm(Yn.values - Y.values, Y.grid) / dt
            diag.record(Yn, flux, tau_flat, vel, m, interaction=full)
        if keep_steps:
            steps.append(StepRecord(Yn.time, dt, Yn.values, (Yn.values - Yt.values) / dt))
        if every_step:
            snaps.append((Yn.time, Yn))
        else:
            take(Y, Yn)
        Y = Yn
    if not every_step:
        take(Y, Y)
        pending.clear()
    return Trajectory(snaps, diag, steps)


def contraction_gap(traj1: Trajectory, traj2: Trajectory) -> np.ndarray:
    """Discrete L2 distance between matching snapshots of two trajectories."""
    if len(traj1.snapshots) != len(traj2.snapshots):
        raise ShapeError("trajectories have different numbers of snapshots")
    out = []
    for (t1, Y1), (t2, Y2) in zip(traj1.snapshots, traj2.snapshots):
        if Y1.grid != Y2.grid or abs(t1 - t2) > 1e-12 * max(1.0, abs(t1)):
            raise ShapeError(f"snapshot mismatch at t={t1} vs t={t2}")
        out.append(l2_norm(Y1.values - Y2.values, Y1.grid))
    return np.asarray(out)


def variational_residual(traj: Trajectory, testfield: KineticField) -> np.ndarray:
    """dxdv * sum (testfield - Y) R per recorded step, Y the post-step state.

    Non-negative for every monotone ``testfield`` up to rounding.
    """
    if traj.steps is None:
        raise DomainError("trajectory was evolved without keep_steps=True")
    if not testfield.is_monotone():
        raise DomainError("testfield columns must be non-decreasing in v")
    g = testfield.grid
    if g != traj.snapshots[0][1].grid:
        raise ShapeError("testfield grid differs from trajectory grid")
    w = g.dx * g.dv
    return np.array([w * np.sum((testfield.values - s.Y_next) * s.residual) for s in traj.steps])


def minimal_selection_gap(Y: KineticField, Y_next: KineticField, flux: FluxModel,
                          dt: float, tau=None) -> float:
    """||dY/dt + f_v D_x Y|| minus the square root of the interaction minimum at Y."""
    if Y.grid != Y_next.grid:
        raise ShapeError("states on different grids")
    g = Y.grid
    G = flux.deriv(g.v)[None, :] * centered_dx(Y.values, g.dx)
    lhs = l2_norm((Y_next.values - Y.values) / dt + G, g)
    return lhs - math.sqrt(max(interaction_field(Y, flux, tau)[1], 0.0))
