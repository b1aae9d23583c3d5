import numpy as np
import pytest

from kinvar.errors import ConfigurationError, DegenerateInputError, DomainError
from kinvar.flux import is_convex, make_flux, max_speed, polynomial_flux, shock_speed, tabulated_flux


@pytest.fixture
def burgers():
    return make_flux("burgers")


@pytest.fixture
def shifted():
    return make_flux("shifted_square")


def test_builtin_values(burgers, shifted):
    assert shifted(0.5) == pytest.approx(0.0)
    assert shifted.deriv(0.0) == pytest.approx(-1.0)
    assert burgers(1.0) == pytest.approx(0.5)


def test_derivative_matches_finite_difference(shifted):
    v = np.linspace(0.1, 0.9, 9)
    h = 1e-6
    fd = (shifted(v + h) - shifted(v - h)) / (2 * h)
    np.testing.assert_allclose(shifted.deriv(v), fd, atol=1e-8)


def test_max_speed(burgers, shifted):
    assert max_speed(burgers) == pytest.approx(1.0)
    assert max_speed(shifted) == pytest.approx(1.0)
    assert max_speed(polynomial_flux([0.7])) == 0.0
    assert max_speed(burgers, np.array([0.25, 0.5])) == pytest.approx(0.5)


def test_lipschitz_uses_interior_extrema():
    # f = v^3 - v^2 + v/4 has f' = 3v^2 - 2v + 1/4 with minimum at v = 1/3
    f = polynomial_flux([0.0, 0.25, -1.0, 1.0])
    v = np.linspace(0, 1, 100001)
    assert f.lipschitz_bound == pytest.approx(np.max(np.abs(f.deriv(v))), rel=1e-9)


def test_shock_speed_examples(burgers, shifted):
    assert shock_speed(shifted, 0.0, 1.0) == pytest.approx(0.0)
    assert shock_speed(burgers, 0.0, 1.0) == pytest.approx(0.5)


@pytest.mark.parametrize("u", [0.0, 0.3, 0.8])
def test_shock_speed_small_jump_tends_to_characteristic(burgers, shifted, u):
    for f in (burgers, shifted):
        assert shock_speed(f, u, u + 1e-7) == pytest.approx(float(f.deriv(u)), abs=1e-6)


def test_shock_speed_errors(burgers):
    with pytest.raises(DegenerateInputError):
        shock_speed(burgers, 0.4, 0.4)
    with pytest.raises(DomainError):
        shock_speed(burgers, -0.1, 0.4)


def test_convexity(burgers, shifted):
    assert is_convex(burgers) and is_convex(shifted)
    assert not is_convex(polynomial_flux([0.0, 0.0, -1.0]))


def test_make_flux_errors():
    with pytest.raises(ConfigurationError):
        make_flux("nope")
    with pytest.raises(ConfigurationError):
        make_flux("polynomial")
    assert make_flux("polynomial", [0.0, 1.0]).deriv(0.3) == pytest.approx(1.0)


def test_tabulated_flux_reproduces_quadratic():
    v = np.linspace(0.0, 1.0, 201)
    f = tabulated_flux(v, 0.5 * v**2)
    assert f(0.5) == pytest.approx(0.125, abs=1e-4)
    assert f.deriv(0.5) == pytest.approx(0.5, abs=1e-3)
    assert f.lipschitz_bound == pytest.approx(1.0, abs=1e-2)
    with pytest.raises(ConfigurationError):
        tabulated_flux([0.0, 0.0], [1.0, 2.0])
