"""Free streaming Y_t + f_v(v) Y_x = 0, first-order upwind per v-slice, periodic in x."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, StabilityError
from .flux import FluxModel
from .grid import Grid
from .kinetic import KineticField

_CFL_SLACK = 1e-12


@dataclass(frozen=True)
class TransportOperator:
    """Signed slice speeds f_v(v_j), frozen at the v cell centres."""

    slice_speeds: np.ndarray = field(repr=False)
    grid: Grid
    cfl_limit: float = 1.0

    @classmethod
    def from_flux(cls, flux: FluxModel, grid: Grid) -> "TransportOperator":
        return cls(np.asarray(flux.deriv(grid.v), dtype=np.float64), grid)

    @property
    def max_speed(self) -> float:
        return float(np.max(np.abs(self.slice_speeds)))


def cfl_dt(op: TransportOperator, cfl: float, fallback: float | None = None) -> float:
    """dt = cfl * dx / max|speed|; ``fallback`` (default dx) when all speeds vanish."""
    if not 0.0 < cfl <= 1.0:
        raise DomainError(f"cfl must lie in (0, 1], got {cfl}")
    s = op.max_speed
    if s == 0.0:
        return op.grid.dx if fallback is None else fallback
    return cfl * op.grid.dx / s


def advect(Y: KineticField, op: TransportOperator, dt: float) -> KineticField:
    """One upwind step of length ``dt`` in flux form; conserves every slice's mass."""
    g = Y.grid
    nu = op.slice_speeds * dt / g.dx
    if np.max(np.abs(nu)) > op.cfl_limit * (1.0 + _CFL_SLACK):
        raise StabilityError(f"CFL number {np.max(np.abs(nu)):.6g} exceeds {op.cfl_limit}")
    nu_p = np.maximum(nu, 0.0)[None, :]
    nu_m = np.minimum(nu, 0.0)[None, :]
    y = Y.values
    # numerical flux (times dt/dx) through the right face of each cell
    flux_r = nu_p * y + nu_m * np.roll(y, -1, axis=0)
    out = y - (flux_r - np.roll(flux_r, 1, axis=0))
    return KineticField(out, g, Y.time + dt)
