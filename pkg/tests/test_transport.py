import numpy as np
import pytest

from kinvar.errors import DomainError, StabilityError
from kinvar.flux import make_flux
from kinvar.grid import Grid
from kinvar.kinetic import KineticField
from kinvar.transport import TransportOperator, advect, cfl_dt


def _op(speeds, nx=8, L=1.0):
    speeds = np.asarray(speeds, dtype=float)
    return TransportOperator(speeds, Grid(L, nx, speeds.size))


def test_cfl_dt_examples():
    op = _op([0.5, -1.0, 0.2, 0.0], nx=200)  # dx = 0.01
    assert cfl_dt(op, 0.5) == pytest.approx(0.005)
    op2 = _op([2.0, 0.0, 0.0, 0.0], nx=20)  # dx = 0.1
    assert cfl_dt(op2, 1.0) == pytest.approx(0.05)
    assert cfl_dt(_op(np.zeros(4)), 0.5, fallback=0.3) == 0.3
    with pytest.raises(DomainError):
        cfl_dt(op, 1.5)


def test_zero_speed_and_constant_slices_unchanged():
    rng = np.random.default_rng(3)
    g = Grid(1.0, 16, 4)
    vals = rng.random((16, 4))
    vals[:, 1] = 0.7  # constant in x
    op = TransportOperator(np.array([0.0, 0.9, 0.0, -0.4]), g)
    out = advect(KineticField(vals, g), op, 0.1)
    np.testing.assert_array_equal(out.values[:, [0, 2]], vals[:, [0, 2]])
    np.testing.assert_allclose(out.values[:, 1], 0.7, atol=1e-15)


def test_unit_cfl_is_exact_shift():
    g = Grid(1.0, 16, 4)
    rng = np.random.default_rng(4)
    vals = rng.random((16, 4))
    op = TransportOperator(np.array([1.0, -1.0, 1.0, -1.0]), g)
    out = advect(KineticField(vals, g), op, g.dx)
    np.testing.assert_allclose(out.values[:, 0], np.roll(vals[:, 0], 1), atol=1e-15)
    np.testing.assert_allclose(out.values[:, 1], np.roll(vals[:, 1], -1), atol=1e-15)


def test_slice_mass_conserved_and_time_advanced():
    g = Grid(2.0, 32, 8)
    op = TransportOperator.from_flux(make_flux("shifted_square"), g)
    vals = np.random.default_rng(5).random((32, 8))
    dt = cfl_dt(op, 0.9)
    out = advect(KineticField(vals, g, 0.25), op, dt)
    np.testing.assert_allclose(out.values.sum(axis=0), vals.sum(axis=0), rtol=1e-13)
    assert out.time == pytest.approx(0.25 + dt)


def test_cfl_violation_raises():
    g = Grid(1.0, 8, 4)
    op = TransportOperator(np.full(4, 1.0), g)
    with pytest.raises(StabilityError):
        advect(KineticField(np.zeros((8, 4)), g), op, 1.01 * g.dx)
