import json

import numpy as np
import pytest

from kinvar import cli
from kinvar.errors import StabilityError
from kinvar.solver import Diagnostics


@pytest.fixture
def run(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)

    def _run(*args, cfg_text=None):
        argv = list(args)
        if cfg_text is not None:
            (tmp_path / "run.cfg").write_text(cfg_text)
            argv.insert(1, "run.cfg")
        return cli.main(argv)

    return _run


def _report(path):
    return json.loads(path.read_text())


def test_simulate_constant_data(run, tmp_path):
    text = "grid.L = 1\ngrid.nx = 16\ngrid.nv = 8\ninit.breakpoints = 0\ninit.values = 0.4, 0.4\n" \
           "time.T = 0.1\ntime.outputs = 0, 0.05, 0.1\noutput.dir = res\n"
    assert run("simulate", cfg_text=text) == 0
    out = tmp_path / "res"
    rep = _report(out / "report.json")
    assert set(rep) == {"config", "measurements", "assertions"}
    assert rep["config"]["grid.nx"] == 16
    assert all(a["pass"] for a in rep["assertions"])
    assert set(rep["assertions"][0]) == {"name", "expected", "measured", "tol", "pass"}
    d = Diagnostics.from_csv(out / "diagnostics.csv").as_arrays()
    assert np.all(d["interaction_total"] == 0.0)
    assert np.all(d["l2_squared"] == d["l2_squared"][0])
    assert len(list((out / "snapshots").glob("*.csv"))) == 3


def test_simulate_is_deterministic(run, tmp_path):
    text = "grid.L = 2\ngrid.nx = 64\ngrid.nv = 16\nmollify.eps = 0.2\ntime.T = 0.2\n"
    assert run("simulate", "--output.dir=a", cfg_text=text) == 0
    assert run("simulate", "--output.dir=b", cfg_text=text) == 0
    for name in ("diagnostics.csv", "interaction_t0.csv", "interaction_final.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    snaps_a = sorted((tmp_path / "a" / "snapshots").iterdir())
    snaps_b = sorted((tmp_path / "b" / "snapshots").iterdir())
    assert [p.read_bytes() for p in snaps_a] == [p.read_bytes() for p in snaps_b]
    ra, rb = _report(tmp_path / "a" / "report.json"), _report(tmp_path / "b" / "report.json")
    ra["config"].pop("output.dir")
    rb["config"].pop("output.dir")
    assert ra == rb


def test_malformed_key_exit_2(run, capsys):
    assert run("simulate", cfg_text="grid.nxx = 3\n") == cli.EXIT_CONFIG
    assert "grid.nxx" in capsys.readouterr().err


def test_bad_flag_and_missing_file(run):
    assert run("shock-rarefaction", "--grid.nx") == cli.EXIT_CONFIG
    assert run("shock-rarefaction", "--grid.bogus=3") == cli.EXIT_CONFIG
    assert run("simulate", "missing.cfg") == cli.EXIT_CONFIG


def test_underresolved_eps_is_config_error(run):
    assert run("simulate", cfg_text="grid.L = 2\ngrid.nx = 16\nmollify.eps = 0.2\n") == cli.EXIT_CONFIG


def test_runtime_error_exit_3(run, monkeypatch):
    def boom(*a, **k):
        raise StabilityError("forced")

    monkeypatch.setattr(cli, "evolve", boom)
    assert run("simulate", cfg_text="grid.L = 1\ngrid.nx = 16\ngrid.nv = 8\n") == cli.EXIT_RUNTIME


def test_shock_rarefaction_subcommand(run, tmp_path):
    code = run("shock-rarefaction", "--grid.L=2", "--grid.nx=128", "--grid.nv=64",
               "--flux.kind=shifted_square", "--output.dir=sr")
    rep = _report(tmp_path / "sr" / "report.json")
    failed = [a["name"] for a in rep["assertions"] if not a["pass"]]
    # the only contradicted check is the linear strength scaling (see the notes in README)
    assert failed == ["strength_scaling_half"]
    assert code == cli.EXIT_ASSERT
    assert abs(rep["measurements"]["sigma_measured"]) <= 2 * (4 / 128) / 0.5


def test_shock_rarefaction_rejects_interacting_horizon(run):
    assert run("shock-rarefaction", "--grid.L=2", "--grid.nx=64", "--grid.nv=32",
               "--experiment.horizon=1.5") == cli.EXIT_CONFIG


def test_counterexample_subcommand(run, tmp_path):
    assert run("counterexample", "--output.dir=ce") == cli.EXIT_OK
    m = _report(tmp_path / "ce" / "report.json")["measurements"]
    assert m["delta"] > 10 * m["noise_floor"]
    assert m["kernel"] == "plateau" and m["eps"] == 0.1


def test_counterexample_requires_wide_domain(run):
    assert run("counterexample", "--grid.L=2", "--grid.nx=256", "--mollify.eps=0.05") == cli.EXIT_CONFIG


def test_compare_constant_data_has_zero_error(run, tmp_path):
    text = ("grid.L = 1\ngrid.nx = 16\ngrid.nv = 16\ninit.breakpoints = 0\ninit.values = 0.37, 0.37\n"
            "time.T = 0.2\ncompare.refinements = 2\noutput.dir = cmp\n")
    assert run("compare", cfg_text=text) == cli.EXIT_OK
    lines = (tmp_path / "cmp" / "compare.csv").read_text().splitlines()
    assert lines[0] == "nx,nv,level,t,l1_error"
    assert all(float(r.split(",")[-1]) == 0.0 for r in lines[1:])
