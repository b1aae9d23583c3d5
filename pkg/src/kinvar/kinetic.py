"""Kinetic densities: lifts of profiles and measures, level sets, mollification, defect measures."""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DomainError, ResolutionError, ShapeError
from .grid import Grid


@dataclass(frozen=True)
class KineticField:
    """Y(x_i, v_j) on ``grid``; rows are x, columns are v."""

    values: np.ndarray = field(repr=False)
    grid: Grid
    time: float = 0.0

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.shape != (self.grid.nx, self.grid.nv):
            raise ShapeError(f"values shape {vals.shape} does not match grid "
                             f"({self.grid.nx}, {self.grid.nv})")
        object.__setattr__(self, "values", vals)

    def with_values(self, values, time=None) -> "KineticField":
        return KineticField(values, self.grid, self.time if time is None else time)

    def l2_squared(self) -> float:
        return float(np.sum(self.values**2) * self.grid.dx * self.grid.dv)

    def mass(self) -> float:
        return float(np.sum(self.values) * self.grid.dx * self.grid.dv)

    def is_monotone(self, tol: float = 0.0) -> bool:
        return bool(np.all(np.diff(self.values, axis=1) >= -tol))


@dataclass(frozen=True)
class DefectMeasure:
    """Nonnegative density m(x_i, v_j) with Y_t + f_v Y_x = -d_v m."""

    values: np.ndarray = field(repr=False)
    time: float = 0.0

    @property
    def min(self) -> float:
        return float(np.min(self.values))

    @property
    def top_max_abs(self) -> float:
        return float(np.max(np.abs(self.values[:, -1])))


def lift_function(u0, grid: Grid, time: float = 0.0) -> KineticField:
    """Indicator Y = 1{v_j >= u0(x_i)}."""
    u = np.asarray(u0, dtype=np.float64)
    if u.shape != (grid.nx,):
        raise ShapeError(f"u0 has shape {u.shape}, expected ({grid.nx},)")
    if np.any(u < 0.0) or np.any(u > 1.0) or not np.all(np.isfinite(u)):
        raise DomainError("lift_function needs values in [0, 1]")
    return KineticField((grid.v[None, :] >= u[:, None]).astype(np.float64), grid, time)


def lift_measure(mixtures: Sequence[Sequence[tuple[float, float]]], grid: Grid,
                 time: float = 0.0) -> KineticField:
    """Right-continuous CDFs of finite atomic measures, one mixture per x cell.

    Each mixture is a list of ``(weight, value)`` pairs with nonnegative
    weights summing to one and values in [0, 1].
    """
    if len(mixtures) != grid.nx:
        raise ShapeError(f"need {grid.nx} mixtures, got {len(mixtures)}")
    v = grid.v
    Y = np.zeros((grid.nx, grid.nv))
    for i, mix in enumerate(mixtures):
        w = np.array([a[0] for a in mix], dtype=np.float64)
        s = np.array([a[1] for a in mix], dtype=np.float64)
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-9:
            raise DomainError(f"mixture at x index {i}: weights must be >= 0 and sum to 1")
        if np.any(s < 0) or np.any(s > 1):
            raise DomainError(f"mixture at x index {i}: atoms must lie in [0, 1]")
        Y[i] = ((s[None, :] <= v[:, None]) * w[None, :]).sum(axis=1)
    return KineticField(Y, grid, time)


def extract_level(Y: KineticField, lam: float) -> np.ndarray:
    """u(x_i) = sup{v_j : Y(x_i, v_j) <= lam} over the v-grid.

    Returns 0 where already Y(x_i, v_0) > lam and 1 where the whole column
    is <= lam.
    """
    if not 0.0 < lam < 1.0:
        raise DomainError(f"level must lie in (0, 1), got {lam}")
    g = Y.grid
    k = np.count_nonzero(Y.values <= lam, axis=1)
    u = np.where(k > 0, g.v[np.maximum(k - 1, 0)], 0.0)
    return np.where(k == g.nv, 1.0, u)


def _plateau_profile(r):
    # smooth step: 1 on |r| <= 1, 0 on |r| >= 2, C-infinity in between
    s = np.clip(np.abs(r) - 1.0, 0.0, 1.0)

    def g(t):
        return np.where(t > 0, np.exp(-1.0 / np.where(t > 0, t, 1.0)), 0.0)

    return g(1.0 - s) / (g(1.0 - s) + g(s))


def mollifier_weights(eps: float, dx: float, kernel: str = "cosine_bump") -> np.ndarray:
    """Discrete unit-mass kernel on offsets -K..K (in cells)."""
    if kernel == "cosine_bump":
        half = eps
    elif kernel == "plateau":
        half = 2.0 * eps
    else:
        raise DomainError(f"unknown kernel {kernel!r}")
    K = int(np.floor(half / dx))
    r = np.arange(-K, K + 1) * dx / eps
    if kernel == "cosine_bump":
        w = np.where(np.abs(r) < 1.0, 1.0 + np.cos(np.pi * r), 0.0)
    else:
        w = _plateau_profile(r)
    return w / w.sum()


def mollify_x(Y: KineticField, eps: float, kernel: str = "cosine_bump") -> KineticField:
    """Periodic convolution of every v-slice with a unit-mass kernel of width ``eps``.

    ``cosine_bump`` is proportional to 1 + cos(pi x / eps) on [-eps, eps];
    ``plateau`` equals 1 on [-eps, eps] and decays smoothly to 0 at 2 eps,
    normalized to unit mass.
    """
    g = Y.grid
    if not eps < g.L / 8:
        raise DomainError(f"mollification width {eps} must be < L/8 = {g.L / 8}")
    if eps < 2 * g.dx:
        raise ResolutionError(f"eps={eps} under-resolved: needs eps >= 2 dx = {2 * g.dx}")
    w = mollifier_weights(eps, g.dx, kernel)
    K = (w.size - 1) // 2
    out = np.zeros_like(Y.values)
    for k, wk in zip(range(-K, K + 1), w):
        if wk != 0.0:
            out += wk * np.roll(Y.values, k, axis=0)
    return Y.with_values(out)


def defect_measure(Y_transported: KineticField, Y_projected: KineticField,
                   dt: float) -> DefectMeasure:
    """m = -dv * cumsum_v R with R = (Y_projected - Y_transported) / dt."""
    if Y_transported.grid != Y_projected.grid:
        raise ShapeError("defect_measure needs fields on the same grid")
    if not dt > 0:
        raise DomainError("dt must be positive")
    R = (Y_projected.values - Y_transported.values) / dt
    return DefectMeasure(-Y_projected.grid.dv * np.cumsum(R, axis=1), Y_projected.time)


def piecewise_profile(grid: Grid, breakpoints: Sequence[float], values: Sequence[float]) -> np.ndarray:
    """Piecewise-constant u on the x-grid: ``values[k]`` on [b_{k-1}, b_k)."""
    b = np.asarray(breakpoints, dtype=np.float64)
    vals = np.asarray(values, dtype=np.float64)
    if vals.size != b.size + 1:
        raise DomainError("need one more value than breakpoints")
    return vals[np.searchsorted(b, grid.x, side="right")]


def write_field_csv(path, Y: KineticField) -> None:
    """Write ``x,v,Y`` rows (x-major) with 17 significant digits."""
    g = Y.grid
    x, v = g.x, g.v
    with open(path, "w", newline="") as fh:
        fh.write("x,v,Y\n")
        for i in range(g.nx):
            xi = format(x[i], ".17g")
            row = Y.values[i]
            fh.write("".join(f"{xi},{format(v[j], '.17g')},{format(row[j], '.17g')}\n"
                             for j in range(g.nv)))


def read_field_csv(path, L: float | None = None, time: float = 0.0) -> KineticField:
    """Inverse of :func:`write_field_csv`; values round-trip bit for bit."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["x", "v", "Y"]:
            raise ShapeError(f"unexpected header {header}")
        rows = np.array([[float(a) for a in r] for r in reader])
    xs = np.unique(rows[:, 0])
    nx = xs.size
    nv = rows.shape[0] // nx
    if nx * nv != rows.shape[0]:
        raise ShapeError("field CSV is not a full x-by-v table")
    if L is None:
        L = -(xs[0] - 0.5 * (xs[-1] - xs[0]) / (nx - 1))
    return KineticField(rows[:, 2].reshape(nx, nv), Grid(float(L), nx, nv), time)
