"""Geometry of the cone K of columns non-decreasing in v.

Columns are plain 1-D arrays; the ``*_rows`` helpers act on every row of a
2-D array at once and are what the solver uses.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import InvalidStateError

REL_TAU = 1e-10


@dataclass(frozen=True)
class FlatBlockPartition:
    """Maximal runs [start, end] (inclusive) where a column is flat up to ``tau``."""

    blocks: tuple[tuple[int, int], ...]
    tau: float


def default_tau(y) -> np.ndarray | float:
    """Scale-relative flatness tolerance, per row for 2-D input."""
    y = np.asarray(y, dtype=np.float64)
    scale = np.maximum(np.ptp(y, axis=-1), np.max(np.abs(y), axis=-1))
    return REL_TAU * scale


def _tau_rows(state: np.ndarray, tau) -> np.ndarray:
    if tau is None:
        return np.atleast_1d(default_tau(state))
    return np.broadcast_to(np.asarray(tau, dtype=np.float64), (state.shape[0],)).copy()


def project_monotone(y) -> np.ndarray:
    """Euclidean projection of ``y`` onto non-decreasing vectors (PAVA)."""
    y = np.asarray(y, dtype=np.float64)
    return kernels.pava_rows(y[None, :])[0]


def project_monotone_rows(Y) -> np.ndarray:
    return kernels.pava_rows(Y)


def moreau_split(y) -> tuple[np.ndarray, np.ndarray]:
    """Split ``y = yK + yN`` into its projections on K and on the polar cone."""
    y = np.asarray(y, dtype=np.float64)
    yK = project_monotone(y)
    return yK, y - yK


def flat_blocks(y, tau: float | None = None, include_singletons: bool = False) -> FlatBlockPartition:
    y = np.asarray(y, dtype=np.float64)
    if tau is None:
        tau = float(default_tau(y))
    flat = np.diff(y) <= tau
    blocks = []
    j, n = 0, y.size
    while j < n:
        a = j
        while j < n - 1 and flat[j]:
            j += 1
        if j > a or include_singletons:
            blocks.append((a, j))
        j += 1
    return FlatBlockPartition(tuple(blocks), float(tau))


def _check_state(state: np.ndarray, tau: np.ndarray) -> None:
    worst = np.min(np.diff(state, axis=1) + tau[:, None], initial=0.0)
    if worst < 0:
        raise InvalidStateError("state is not non-decreasing in v within tolerance "
                                f"(violation {-worst:.3e})")


def project_tangent_rows(state, g, tau=None) -> np.ndarray:
    state = np.asarray(state, dtype=np.float64)
    t = _tau_rows(state, tau)
    _check_state(state, t)
    return kernels.tangent_rows(state, g, t)


def project_tangent(y_state, g, tau: float | None = None) -> np.ndarray:
    """Projection of ``g`` onto the tangent cone T_K(y_state).

    On each flat block of length >= 2 this is the isotonic regression of
    ``g`` restricted to the block; elsewhere ``g`` is unchanged.
    """
    y_state = np.asarray(y_state, dtype=np.float64)
    return project_tangent_rows(y_state[None, :], np.asarray(g, dtype=np.float64)[None, :],
                                None if tau is None else [tau])[0]


def interaction_column(y_state, transport, dv: float, tau: float | None = None):
    """Minimize ||V + transport||^2 over V in T_K(y_state).

    Returns ``(minimizer, value)`` with ``value = dv * sum((minimizer + transport)**2)``.
    """
    transport = np.asarray(transport, dtype=np.float64)
    V = project_tangent(y_state, -transport, tau)
    return V, float(dv * np.sum((V + transport) ** 2))


def centered_dx(values: np.ndarray, dx: float) -> np.ndarray:
    """Periodic centred difference along axis 0."""
    return (np.roll(values, -1, axis=0) - np.roll(values, 1, axis=0)) / (2.0 * dx)


def interaction_field(Y, flux, tau=None, return_minimizer: bool = False):
    """Per-x minimal value of the interaction functional and its x-integral.

    The transport term is f_v(v_j) times the centred x-difference of Y.
    """
    g = Y.grid
    G = flux.deriv(g.v)[None, :] * centered_dx(Y.values, g.dx)
    V = project_tangent_rows(Y.values, -G, tau)
    profile = g.dv * np.sum((V + G) ** 2, axis=1)
    total = float(g.dx * profile.sum())
    if return_minimizer:
        return profile, total, V
    return profile, total
