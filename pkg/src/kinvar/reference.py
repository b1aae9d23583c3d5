"""Entropy-solution references: Godunov finite volumes and exact convex Riemann fans."""
from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import DomainError, ShapeError, StabilityError
from .flux import FluxModel, is_convex, shock_speed
from .grid import Grid


@dataclass(frozen=True)
class ScalarProfile:
    """Cell values u(x_i) on the x-part of ``grid``."""

    u: np.ndarray = field(repr=False)
    grid: Grid
    time: float = 0.0

    def __post_init__(self):
        u = np.asarray(self.u, dtype=np.float64)
        if u.shape != (self.grid.nx,):
            raise ShapeError(f"profile shape {u.shape} does not match nx={self.grid.nx}")
        object.__setattr__(self, "u", u)


def flux_samples(flux: FluxModel, n: int = 256) -> tuple[np.ndarray, np.ndarray]:
    """Nodes j/n, j = 0..n, and f at them (includes 0, 1/2 and 1 for even n)."""
    s = np.linspace(0.0, 1.0, n + 1)
    return s, np.asarray(flux.eval(s), dtype=np.float64)


def godunov_step(u: ScalarProfile, flux: FluxModel, dt: float, samples=None) -> ScalarProfile:
    """Conservative periodic update with the sampled Godunov flux."""
    g = u.grid
    if dt * flux.lipschitz_bound > g.dx * (1.0 + 1e-12):
        raise StabilityError(f"dt={dt} violates CFL for dx={g.dx}")
    sv, sf = samples if samples is not None else flux_samples(flux)
    ul = u.u
    ur = np.roll(ul, -1)
    fu = np.asarray(flux.eval(ul), dtype=np.float64)
    F = kernels.godunov_flux(ul, ur, fu, np.roll(fu, -1), sv, sf)
    return ScalarProfile(ul - dt / g.dx * (F - np.roll(F, 1)), g, u.time + dt)


def godunov_evolve(u0: ScalarProfile, flux: FluxModel, T: float, cfl: float = 0.5,
                   n_samples: int = 256) -> ScalarProfile:
    samples = flux_samples(flux, n_samples)
    s = flux.lipschitz_bound
    dt0 = cfl * u0.grid.dx / s if s > 0 else T
    u = u0
    t_end = u0.time + T
    while t_end - u.time > 1e-14 * max(1.0, T):
        u = godunov_step(u, flux, min(dt0, t_end - u.time), samples)
    return ScalarProfile(u.u, u.grid, t_end)


def _invert_speed(flux: FluxModel, xi: np.ndarray, lo: float, hi: float) -> np.ndarray:
    a = np.full_like(xi, lo)
    b = np.full_like(xi, hi)
    while np.max(b - a, initial=0.0) > 1e-12:
        mid = 0.5 * (a + b)
        right = flux.deriv(mid) < xi
        a = np.where(right, mid, a)
        b = np.where(right, b, mid)
    return 0.5 * (a + b)


def exact_riemann_convex(flux: FluxModel, uL: float, uR: float, xi):
    """Self-similar entropy solution u(x/t) of the Riemann problem for convex f."""
    if not is_convex(flux):
        raise DomainError(f"flux {flux.name!r} is not convex on [0, 1]")
    xi_arr = np.asarray(xi, dtype=np.float64)
    if uL == uR:
        out = np.full_like(xi_arr, uL)
    elif uL > uR:
        out = np.where(xi_arr < shock_speed(flux, uR, uL), uL, uR)
    else:
        sl, sr = float(flux.deriv(uL)), float(flux.deriv(uR))
        out = _invert_speed(flux, np.clip(xi_arr, sl, sr), uL, uR)
        out = np.where(xi_arr <= sl, uL, np.where(xi_arr >= sr, uR, out))
    return out if out.ndim else float(out)


def composite_exact_scl1(t: float, grid: Grid, flux: FluxModel | None = None) -> ScalarProfile:
    """Exact solution of u_t + ((u - 1/2)^2)_x = 0 from the periodic square wave.

    u0 = 1 on [-L, 0], 0 on (0, 1), 1 on [1, L]. Valid until t = 1, when the
    fan's left edge reaches the stationary shock at 0.
    """
    from .flux import make_flux

    if t < 0 or t > 1:
        raise DomainError(f"composite solution only valid for t in [0, 1], got {t}")
    if grid.L < 2:
        raise DomainError("composite solution needs L >= 2 to hold the fan")
    flux = flux or make_flux("shifted_square")
    x = grid.x
    u = np.where((x > 0) & (x < 1), 0.0, 1.0)
    if t > 0:
        fan = (x > 0) & (x >= 1 - t) & (x <= 1 + t)
        u = np.where(fan, exact_riemann_convex(flux, 0.0, 1.0, (x - 1) / t), u)
    return ScalarProfile(u, grid, t)


def write_profile_csv(path, p: ScalarProfile) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("x,u\n")
        for xi, ui in zip(p.grid.x, p.u):
            fh.write(f"{format(xi, '.17g')},{format(ui, '.17g')}\n")


def read_profile_csv(path, grid: Grid, time: float = 0.0) -> ScalarProfile:
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        if next(r) != ["x", "u"]:
            raise ShapeError("expected header x,u")
        u = [float(row[1]) for row in r]
    return ScalarProfile(np.array(u), grid, time)


def restrict(fine: np.ndarray, factor: int) -> np.ndarray:
    """Average consecutive blocks of ``factor`` cells."""
    return fine.reshape(-1, factor).mean(axis=1)
