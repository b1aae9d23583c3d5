"""The compiled and pure-Python kernels must agree bit for bit."""
import os
import subprocess
import sys

import numpy as np
import pytest

from kinvar import kernels
from kinvar.flux import make_flux
from kinvar.reference import flux_samples

backends = kernels.available_backends()
needs_both = pytest.mark.skipif("cython" not in backends, reason="compiled extension not built")


def test_python_backend_always_available():
    assert "python" in backends
    assert kernels.BACKEND in backends


@needs_both
@pytest.mark.parametrize("seed", range(5))
def test_pava_parity(seed):
    rng = np.random.default_rng(seed)
    Y = rng.normal(size=(64, 33))
    Y[::3] = np.round(Y[::3], 1)  # ties
    Y[1::7] = np.sort(Y[1::7], axis=1)  # already monotone rows
    a = backends["python"].pava_rows(Y)
    b = backends["cython"].pava_rows(Y)
    np.testing.assert_array_equal(a, b)


@needs_both
@pytest.mark.parametrize("seed", range(5))
def test_tangent_parity(seed):
    rng = np.random.default_rng(seed)
    state = np.sort(rng.choice([0.0, 0.3, 0.5, 1.0], size=(40, 24)), axis=1)
    g = rng.normal(size=(40, 24))
    tau = np.full(40, 1e-12)
    np.testing.assert_array_equal(backends["python"].tangent_rows(state, g, tau),
                                  backends["cython"].tangent_rows(state, g, tau))


@needs_both
@pytest.mark.parametrize("kind", ["burgers", "shifted_square"])
def test_godunov_flux_parity(kind):
    f = make_flux(kind)
    rng = np.random.default_rng(9)
    ul, ur = rng.random(500), rng.random(500)
    ur[:50] = ul[:50]
    sv, sf = flux_samples(f)
    args = (ul, ur, f.eval(ul), f.eval(ur), sv, sf)
    np.testing.assert_array_equal(backends["python"].godunov_flux(*args),
                                  backends["cython"].godunov_flux(*args))


@pytest.mark.parametrize("name", sorted(backends))
def test_godunov_flux_definition(name):
    f = make_flux("shifted_square")
    sv, sf = flux_samples(f)
    ul = np.array([0.2, 0.8, 0.0, 1.0, 0.4])
    ur = np.array([0.8, 0.2, 1.0, 0.0, 0.4])
    F = backends[name].godunov_flux(ul, ur, f.eval(ul), f.eval(ur), sv, sf)
    # min over [uL, uR] when uL <= uR, max over [uR, uL] otherwise
    np.testing.assert_allclose(F, [0.0, 0.09, 0.0, 0.25, 0.01], atol=1e-15)


@pytest.mark.parametrize("name", sorted(backends))
def test_pava_compensated_sum_keeps_means_exact(name):
    # long pooled block of values that do not sum exactly in floating point
    y = np.concatenate([np.full(500, 0.1), np.full(500, 0.1 - 1e-3)])[None, :]
    out = backends[name].pava_rows(y)
    assert abs(out.sum() - y.sum()) <= 1e-13


def test_environment_forces_python_fallback(tmp_path):
    code = ("import numpy as np, kinvar\n"
            "from kinvar.experiments import square_wave_field\n"
            "g = kinvar.Grid(2.0, 64, 32)\n"
            "Y = square_wave_field(g, 0.0, 1.0, 0.2)\n"
            "out = kinvar.evolve(Y, kinvar.make_flux('burgers'), 0.3).final.values\n"
            f"np.save(r'{tmp_path}/' + kinvar.BACKEND + '.npy', out)\n"
            "print(kinvar.BACKEND)\n")
    env = dict(os.environ, KINVAR_BACKEND="python")
    res = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert res.returncode == 0, res.stderr
    assert res.stdout.strip() == "python"
    if "cython" in backends:
        env.pop("KINVAR_BACKEND")
        subprocess.run([sys.executable, "-c", code], env=env, check=True, capture_output=True)
        np.testing.assert_array_equal(np.load(tmp_path / "python.npy"),
                                      np.load(tmp_path / "cython.npy"))
