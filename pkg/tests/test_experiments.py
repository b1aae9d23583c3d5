import numpy as np
import pytest

from kinvar.config import build_config
from kinvar.experiments import (compare_with_reference, counterexample, initial_level, l2_gain,
                                level_crossings, shock_rarefaction)
from kinvar.grid import Grid
from kinvar.kinetic import extract_level
from kinvar.solver import evolve


def _by_name(report):
    return {a["name"]: a for a in report["assertions"]}


@pytest.mark.parametrize("kind", ["burgers", "shifted_square"])
def test_interaction_is_local_to_the_shock(kind):
    cfg = build_config({"flux.kind": kind, "grid.L": 2.0, "grid.nx": 256, "grid.nv": 256})
    rep = shock_rarefaction(cfg)
    a = _by_name(rep)
    for name in ("interaction_zero_outside_shock", "interaction_zero_in_rarefaction",
                 "minimizer_constant_on_block", "block_speed_matches_sigma", "shock_speed"):
        assert a[name]["pass"], name
    m = rep["measurements"]
    assert m["shock_row_value"] > 1e-3
    assert abs(m["shock_row_x"]) < 4 * m["eps"]


def test_shock_block_value_scales_with_cube_of_jump():
    # dv * sum over the jump block of (f_v - sigma)^2 equals jump^3 / 12 for Burgers
    cfg = build_config({"grid.L": 2.0, "grid.nx": 256, "grid.nv": 256})
    m = shock_rarefaction(cfg)["measurements"]
    assert m["normalized_value_full"] == pytest.approx(1 / 12, rel=2 / 256)
    assert m["strength_ratio"] == pytest.approx(1 / 8, rel=0.05)
    assert m["strength_exponent"] == pytest.approx(3.0, abs=0.1)


def test_l2_gain_zero_for_equal_times():
    assert l2_gain(Grid(4.0, 256, 64), 0.1, t0=0.0, t1=0.0) == 0.0


def test_counterexample_trend():
    cfg = build_config({"flux.kind": "shifted_square", "grid.L": 4.0, "grid.nx": 512,
                        "grid.nv": 128, "mollify.eps": 0.1, "mollify.kernel": "plateau",
                        "experiment.trend": True})
    rep = counterexample(cfg)
    assert _by_name(rep)["delta_decreases_with_eps"]["pass"]
    d = rep["measurements"]["trend_delta"]
    # the gain is quadratic in eps
    assert d[0] / d[1] == pytest.approx(4.0, rel=0.05)


def test_initial_level_matches_extraction_of_initial_field():
    cfg = build_config({"grid.L": 2.0, "grid.nx": 128, "grid.nv": 512, "mollify.eps": 0.2,
                        "init.breakpoints": [-1.0, 0.5],
                        "init.values": [0.2, [(0.5, 0.1), (0.5, 0.7)], 0.9]})
    g = cfg.grid
    Y = cfg.initial_field()
    for lam in (0.25, 0.5, 0.75):
        np.testing.assert_allclose(extract_level(Y, lam), initial_level(cfg, g, lam), atol=g.dv)


def test_indicator_levels_agree_away_from_waves():
    cfg = build_config({"grid.L": 2.0, "grid.nx": 128, "grid.nv": 128})
    g = cfg.grid
    Y0 = cfg.initial_field()
    u = [extract_level(Y0, lam) for lam in (0.25, 0.5, 0.75)]
    assert np.array_equal(u[0], u[1]) and np.array_equal(u[1], u[2])
    ref = [initial_level(cfg, g, lam) for lam in (0.25, 0.5, 0.75)]
    assert np.array_equal(ref[0], ref[2])
    YT = evolve(Y0, cfg.flux, 0.5, diagnostics=False).final
    uT = [extract_level(YT, lam) for lam in (0.25, 0.5, 0.75)]
    # constant states far from the shock (x = 0.25) and the fan (1 <= x <= 1.5)
    far = (np.abs(g.x - 0.25) > 0.3) & ((g.x < 0.7) | (g.x > 1.8))
    for a in uT[1:]:
        assert np.max(np.abs(a - uT[0])[far]) <= g.dv


def test_compare_rates_on_mollified_shock():
    cfg = build_config({"grid.L": 2.0, "grid.nx": 64, "grid.nv": 64, "mollify.eps": 0.25 - 1e-9,
                        "compare.refinements": 3, "compare.window": [-1.0, 1.0],
                        "compare.levels": [0.5]})
    rep = compare_with_reference(cfg)
    assert all(a["pass"] for a in rep["assertions"])
    assert len(rep["measurements"]["table"]) == 3


def test_level_crossings_periodic():
    g = Grid(1.0, 8, 4)
    u = np.array([1, 1, 0, 0, 0, 0, 1, 1.0])
    np.testing.assert_allclose(level_crossings(u, g, 0.5), [-0.5])
    np.testing.assert_allclose(level_crossings(u, g, 0.5, downward=False), [0.5])
