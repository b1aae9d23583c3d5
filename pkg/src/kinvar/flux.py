"""Flux models f : [0, 1] -> R for one-dimensional scalar conservation laws."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import ConfigurationError, DegenerateInputError, DomainError

# dense sampling used for speed bounds and convexity checks of non-polynomial fluxes
_N_SAMPLES = 4097


@dataclass(frozen=True)
class FluxModel:
    """Flux f with derivative f_v on the state interval [0, 1].

    ``eval`` and ``deriv`` accept scalars or arrays. ``lipschitz_bound`` is
    sup |f_v| on [0, 1] (exact for polynomials, sampled otherwise).
    """

    name: str
    eval: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    deriv: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    lipschitz_bound: float
    coeffs: tuple[float, ...] | None = None

    def __call__(self, v):
        return self.eval(v)


def _poly_sup_abs_deriv(coeffs: np.ndarray) -> float:
    dp = np.polynomial.Polynomial(coeffs).deriv()
    cands = [0.0, 1.0]
    if dp.degree() >= 1:
        for r in dp.deriv().roots():
            if abs(r.imag) < 1e-12 and 0.0 <= r.real <= 1.0:
                cands.append(float(r.real))
    return float(np.max(np.abs(dp(np.asarray(cands)))))


def polynomial_flux(coeffs: Sequence[float], name: str = "polynomial") -> FluxModel:
    """Polynomial flux with coefficients in ascending powers of v."""
    c = np.asarray(coeffs, dtype=float)
    if c.ndim != 1 or c.size == 0:
        raise ConfigurationError("flux.coeffs must be a non-empty list of reals")
    if not np.all(np.isfinite(c)):
        raise ConfigurationError("flux.coeffs must be finite")
    p = np.polynomial.Polynomial(c)
    dp = p.deriv()

    def f(v):
        return p(np.asarray(v, dtype=float))

    def fv(v):
        return dp(np.asarray(v, dtype=float))

    return FluxModel(name, f, fv, _poly_sup_abs_deriv(c), tuple(float(x) for x in c))


def tabulated_flux(v_nodes: Sequence[float], f_values: Sequence[float],
                   name: str = "tabulated") -> FluxModel:
    """Piecewise-linear flux through ``(v_nodes, f_values)``.

    The derivative is the centered difference of the table at the nodes
    (one-sided at the ends), linearly interpolated in between.
    """
    vn = np.asarray(v_nodes, dtype=float)
    fn = np.asarray(f_values, dtype=float)
    if vn.shape != fn.shape or vn.ndim != 1 or vn.size < 2:
        raise ConfigurationError("tabulated flux needs matching 1-D node and value arrays")
    if np.any(np.diff(vn) <= 0):
        raise ConfigurationError("tabulated flux nodes must be strictly increasing")
    dfn = np.gradient(fn, vn)

    def f(v):
        return np.interp(v, vn, fn)

    def fv(v):
        return np.interp(v, vn, dfn)

    return FluxModel(name, f, fv, float(np.max(np.abs(dfn))))


_BUILTIN = {
    "burgers": (0.0, 0.0, 0.5),
    "shifted_square": (0.25, -1.0, 1.0),
}


def make_flux(kind: str, coeffs: Sequence[float] | None = None) -> FluxModel:
    """Build one of the built-in fluxes.

    ``burgers`` is v^2/2, ``shifted_square`` is (v - 1/2)^2 and ``polynomial``
    takes ``coeffs`` in ascending powers.
    """
    if kind in _BUILTIN:
        return polynomial_flux(_BUILTIN[kind], name=kind)
    if kind == "polynomial":
        if coeffs is None:
            raise ConfigurationError("flux.kind=polynomial requires flux.coeffs")
        return polynomial_flux(coeffs)
    raise ConfigurationError(f"unknown flux.kind {kind!r}")


def max_speed(flux: FluxModel, v: np.ndarray | None = None) -> float:
    """Largest |f_v| over the samples ``v`` (default: the whole interval [0, 1])."""
    if v is None:
        return flux.lipschitz_bound
    return float(np.max(np.abs(flux.deriv(np.asarray(v, dtype=float)))))


def shock_speed(flux: FluxModel, u_minus: float, u_plus: float) -> float:
    """Rankine-Hugoniot speed (f(u+) - f(u-)) / (u+ - u-)."""
    for s in (u_minus, u_plus):
        if not 0.0 <= s <= 1.0:
            raise DomainError(f"state {s} outside [0, 1]")
    if u_minus == u_plus:
        raise DegenerateInputError("shock speed undefined for equal states")
    return float((flux.eval(u_plus) - flux.eval(u_minus)) / (u_plus - u_minus))


def is_convex(flux: FluxModel, tol: float = 1e-9) -> bool:
    """Sampled (undivided) second differences of f are all >= -tol."""
    f = flux.eval(np.linspace(0.0, 1.0, _N_SAMPLES))
    return bool(np.all(f[2:] - 2 * f[1:-1] + f[:-2] >= -tol))
