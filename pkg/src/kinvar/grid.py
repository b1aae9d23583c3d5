"""Periodic (x, v) grid shared by kinetic fields and scalar profiles."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError


@dataclass(frozen=True)
class Grid:
    """Cell-centred grid on [-L, L) x [0, 1], periodic in x.

    Centres are x_i = -L + (i + 1/2) dx and v_j = (j + 1/2) dv, so v never
    hits 0 or 1.
    """

    L: float
    nx: int
    nv: int

    def __post_init__(self):
        if not self.L > 0:
            raise ConfigurationError(f"grid.L must be positive, got {self.L}")
        if self.nx < 4 or self.nv < 4:
            raise ConfigurationError(f"grid needs nx, nv >= 4, got nx={self.nx}, nv={self.nv}")

    @property
    def dx(self) -> float:
        return 2.0 * self.L / self.nx

    @property
    def dv(self) -> float:
        return 1.0 / self.nv

    @property
    def x(self) -> np.ndarray:
        return -self.L + (np.arange(self.nx) + 0.5) * self.dx

    @property
    def v(self) -> np.ndarray:
        return (np.arange(self.nv) + 0.5) * self.dv

    def refined(self, factor: int = 2) -> "Grid":
        return Grid(self.L, self.nx * factor, self.nv * factor)
