"""Flat ``key = value`` run configuration with dotted keys."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import ConfigurationError
from .flux import FluxModel, make_flux
from .grid import Grid
from .kinetic import KineticField, lift_function, lift_measure, mollify_x, piecewise_profile


def _floats(text: str) -> list[float]:
    return [float(a) for a in text.replace(",", " ").split()]


def _values(text: str) -> list:
    # each entry is a number or an atomic mixture "w:v+w:v"
    out = []
    for item in text.split(","):
        item = item.strip()
        if ":" in item:
            out.append([tuple(float(p) for p in atom.split(":")) for atom in item.split("+")])
        else:
            out.append(float(item))
    return out


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(text)


def _opt_float(text: str):
    return None if text.strip().lower() in ("", "none", "auto") else float(text)


# key -> (parser, default)
SCHEMA: dict[str, tuple[Any, Any]] = {
    "flux.kind": (str, "burgers"),
    "flux.coeffs": (_floats, None),
    "grid.L": (float, 4.0),
    "grid.nx": (int, 256),
    "grid.nv": (int, 256),
    "init.breakpoints": (_floats, None),
    "init.values": (_values, None),
    "mollify.eps": (_opt_float, None),
    "mollify.kernel": (str, "cosine_bump"),
    "time.T": (float, 0.5),
    "time.cfl": (float, 0.5),
    "time.outputs": (_floats, None),
    "solver.tau_flat": (_opt_float, None),
    "output.dir": (str, "out"),
    "experiment.u_minus": (float, 0.0),
    "experiment.u_plus": (float, 1.0),
    "experiment.horizon": (float, 0.5),
    "experiment.trend": (_bool, False),
    "compare.levels": (_floats, [0.25, 0.5, 0.75]),
    "compare.refinements": (int, 3),
    "compare.window": (_floats, None),
}


@dataclass
class RunConfig:
    """Resolved configuration: every schema key present, typed."""

    values: dict = field(default_factory=dict)
    raw: dict = field(default_factory=dict)

    def __getitem__(self, key):
        return self.values[key]

    @property
    def grid(self) -> Grid:
        try:
            return Grid(self["grid.L"], self["grid.nx"], self["grid.nv"])
        except ConfigurationError as exc:
            raise ConfigurationError(f"grid: {exc}") from None

    @property
    def flux(self) -> FluxModel:
        return make_flux(self["flux.kind"], self["flux.coeffs"])

    def echo(self) -> dict:
        return {k: self.values[k] for k in sorted(self.values)}

    def replace(self, **updates) -> "RunConfig":
        vals = dict(self.values)
        for k, v in updates.items():
            vals[k.replace("__", ".")] = v
        out = RunConfig(vals, dict(self.raw))
        out.validate()
        return out

    def pieces(self):
        """Breakpoints and per-piece values; default is the square wave u+ | u- | u+."""
        L = self["grid.L"]
        b = self["init.breakpoints"]
        v = self["init.values"]
        if b is None and v is None:
            up, um = self["experiment.u_plus"], self["experiment.u_minus"]
            return [0.0, L / 2], [up, um, up]
        if b is None or v is None:
            raise ConfigurationError("init.breakpoints and init.values must be given together")
        return b, v

    def eps(self, default_fraction: float | None = None) -> float | None:
        e = self["mollify.eps"]
        if e is None and default_fraction is not None:
            return self["grid.L"] * default_fraction
        return e if e else None

    def initial_field(self, grid: Grid | None = None, eps=None) -> KineticField:
        grid = grid or self.grid
        b, vals = self.pieces()
        idx = np.searchsorted(np.asarray(b, dtype=float), grid.x, side="right")
        if any(isinstance(a, list) for a in vals):
            mixes = [vals[k] if isinstance(vals[k], list) else [(1.0, vals[k])] for k in idx]
            Y = lift_measure(mixes, grid)
        else:
            Y = lift_function(piecewise_profile(grid, b, vals), grid)
        eps = self.eps() if eps is None else eps
        if eps:
            Y = mollify_x(Y, eps, self["mollify.kernel"])
        return Y

    def validate(self) -> None:
        L = self["grid.L"]
        _ = self.grid
        _ = self.flux
        b, vals = self.pieces()
        if len(vals) != len(b) + 1:
            raise ConfigurationError("init.values needs one more entry than init.breakpoints")
        if any(not -L <= x <= L for x in b) or any(np.diff(b) <= 0):
            raise ConfigurationError("init.breakpoints must be strictly increasing within [-L, L]")
        for a in vals:
            atoms = a if isinstance(a, list) else [(1.0, a)]
            for atom in atoms:
                if len(atom) != 2 or not 0.0 <= atom[1] <= 1.0 or atom[0] < 0:
                    raise ConfigurationError(f"init.values entry {a!r} must be in [0, 1]")
            if abs(sum(w for w, _ in atoms) - 1.0) > 1e-9:
                raise ConfigurationError(f"init.values mixture {a!r}: weights must sum to 1")
        eps = self["mollify.eps"]
        if eps is not None and eps != 0 and not 0 < eps < L / 8:
            raise ConfigurationError(f"mollify.eps={eps} must satisfy 0 < eps < L/8 = {L / 8}")
        if self["mollify.kernel"] not in ("cosine_bump", "plateau"):
            raise ConfigurationError(f"mollify.kernel: unknown kernel {self['mollify.kernel']!r}")
        if not 0 < self["time.cfl"] <= 1:
            raise ConfigurationError("time.cfl must lie in (0, 1]")
        if not self["time.T"] > 0:
            raise ConfigurationError("time.T must be positive")
        for lam in self["compare.levels"]:
            if not 0 < lam < 1:
                raise ConfigurationError("compare.levels entries must lie in (0, 1)")
        if self["compare.refinements"] < 1:
            raise ConfigurationError("compare.refinements must be at least 1")
        w = self["compare.window"]
        if w is not None and (len(w) != 2 or not w[0] < w[1]):
            raise ConfigurationError("compare.window must be two increasing x values")
        outs = self["time.outputs"]
        if outs is not None and any(not 0 <= t <= self["time.T"] for t in outs):
            raise ConfigurationError("time.outputs must lie in [0, time.T]")


def parse_pairs(pairs, source: str = "<args>", lines=None) -> dict:
    """Turn ``(key, text)`` pairs into typed values, naming the offender on error."""
    out = {}
    for n, (key, text) in enumerate(pairs):
        where = f"{source}:{lines[n]}" if lines else source
        if key not in SCHEMA:
            raise ConfigurationError(f"{where}: unknown key {key!r}")
        parser = SCHEMA[key][0]
        try:
            out[key] = parser(text)
        except (ValueError, TypeError):
            raise ConfigurationError(f"{where}: bad value {text!r} for key {key!r}") from None
    return out


def read_config_text(text: str, source: str = "<config>") -> dict:
    pairs, lines = [], []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"{source}:{lineno}: expected 'key = value', got {line!r}")
        k, v = line.split("=", 1)
        pairs.append((k.strip(), v.strip()))
        lines.append(lineno)
    return parse_pairs(pairs, source, lines)


def build_config(file_values: dict | None = None, overrides: dict | None = None) -> RunConfig:
    vals = {k: d for k, (_, d) in SCHEMA.items()}
    raw = {}
    for src in (file_values or {}, overrides or {}):
        vals.update(src)
        raw.update(src)
    cfg = RunConfig(vals, raw)
    cfg.validate()
    return cfg


def load_config(path, overrides: dict | None = None) -> RunConfig:
    with open(path) as fh:
        text = fh.read()
    return build_config(read_config_text(text, str(path)), overrides)


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=_jsonable)


def _jsonable(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, tuple):
        return list(o)
    raise TypeError(f"not JSON serializable: {type(o)}")
