"""Pure-Python reference versions of the hot kernels.

Used when the compiled ``_ckernels`` extension is unavailable, or when
``KINVAR_BACKEND=python`` is set. Semantics match ``_ckernels.pyx`` bit for
bit on the PAVA paths (same merge rule, same arithmetic).
"""
import numpy as np


def _pava_list(y):
    # block sums carry a Neumaier compensation term so pooled means keep the
    # column sum to within a few ulps regardless of block length
    means = []
    counts = []
    sums = []
    comps = []
    for val in y:
        s = val
        e = 0.0
        c = 1
        m = val
        while means and means[-1] > m:
            b = sums.pop()
            t = s + b
            if abs(s) >= abs(b):
                e += (s - t) + b
            else:
                e += (b - t) + s
            e += comps.pop()
            s = t
            c += counts.pop()
            means.pop()
            m = (s + e) / c
        sums.append(s)
        comps.append(e)
        counts.append(c)
        means.append(m)
    out = []
    for m, c in zip(means, counts):
        out.extend([m] * c)
    return out


def pava_rows(y):
    """Project every row of the 2-D array ``y`` onto non-decreasing vectors."""
    y = np.ascontiguousarray(y, dtype=np.float64)
    out = y.copy()
    if y.shape[1] < 2:
        return out
    bad = np.flatnonzero(np.any(np.diff(y, axis=1) < 0, axis=1))
    for i in bad:
        out[i] = _pava_list(y[i].tolist())
    return out


def tangent_rows(state, g, tau):
    """Project each row of ``g`` onto the tangent cone of the monotone cone at ``state``.

    Inside every maximal run where consecutive ``state`` entries differ by at
    most ``tau[row]`` the row of ``g`` is replaced by its isotonic regression.
    """
    state = np.ascontiguousarray(state, dtype=np.float64)
    g = np.ascontiguousarray(g, dtype=np.float64)
    out = g.copy()
    nx, nv = state.shape
    flat = np.diff(state, axis=1) <= np.asarray(tau, dtype=np.float64)[:, None]
    for i in np.flatnonzero(np.any(flat, axis=1)):
        fi = flat[i]
        j = 0
        while j < nv - 1:
            if not fi[j]:
                j += 1
                continue
            a = j
            while j < nv - 1 and fi[j]:
                j += 1
            seg = g[i, a:j + 1]
            if np.any(np.diff(seg) < 0):
                out[i, a:j + 1] = _pava_list(seg.tolist())
    return out


def godunov_flux(ul, ur, fl, fr, sv, sf):
    """Godunov flux at each interface from sampled flux values.

    ``sv`` must be sorted; ``sf`` holds f at ``sv``; ``fl``/``fr`` hold f at
    the interface states.
    """
    lo = np.minimum(ul, ur)
    hi = np.maximum(ul, ur)
    inside = (sv[None, :] >= lo[:, None]) & (sv[None, :] <= hi[:, None])
    smin = np.where(inside, sf[None, :], np.inf).min(axis=1)
    smax = np.where(inside, sf[None, :], -np.inf).max(axis=1)
    fmin = np.minimum(np.minimum(fl, fr), smin)
    fmax = np.maximum(np.maximum(fl, fr), smax)
    return np.where(ul <= ur, fmin, fmax)
