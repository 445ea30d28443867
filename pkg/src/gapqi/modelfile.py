"""JSON model files.

Schema (all keys except ``points`` optional)::

    {
      "points": ["0", "1", ...],                # ids, strings or integers
      "sigma": {"1": "0", ...},                 # partial map id -> id
      "potential_h": {"1": "0.69314...", ...},  # reals as numbers or strings
      "explicit_gap": [[["0", "1"], ["2"]], ...],   # blocks of R_1, R_2, ...
      "explicit_potential": {"1": {"0": 0.5, ...}, ...},  # k_n on U_n
      "zeta_overrides": [{"level": 1, "points": ["1", "2"]}],
      "measures": {"mu1": {"1": 2, "2": 1}},
      "depth": 3
    }

Without ``explicit_gap`` the structure is derived from ``sigma``; without
``explicit_potential`` the potential is derived from ``potential_h``
(missing values default to zero).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ModelError, NonInvariantOverride, ParseError, UnknownId
from .gap import GapStructure, gap_from_partitions, gap_from_sigma
from .measures import Measure
from .operators import close_overrides, zeta_profile
from .potential import Potential, build_cocycle, h_array, potential_from_h
from .space import SpaceModel

__all__ = ["ModelFile", "load_model", "parse_model", "DEFAULT_DEPTH"]

DEFAULT_DEPTH = 3
_KEYS = {"points", "sigma", "potential_h", "explicit_gap", "explicit_potential",
         "zeta_overrides", "measures", "depth", "description"}


def _real(value, where):
    if isinstance(value, bool):
        raise ParseError(f"{where}: expected a real, got a boolean")
    try:
        out = float(value)
    except (TypeError, ValueError):
        raise ParseError(f"{where}: cannot read {value!r} as a real") from None
    if np.isnan(out):
        raise ParseError(f"{where}: nan is not allowed")
    return out


@dataclass(frozen=True, eq=False)
class ModelFile:
    model: SpaceModel
    h: np.ndarray
    depth: int
    explicit_gap: tuple | None = None
    explicit_potential: dict | None = None
    zeta_overrides: dict = field(default_factory=dict)
    measures: dict = field(default_factory=dict)
    description: str = ""

    @property
    def points(self):
        return self.model.points

    def gap(self, depth: int | None = None) -> GapStructure:
        depth = self.depth if depth is None else depth
        if self.explicit_gap is not None:
            return gap_from_partitions(self.model.points, self.explicit_gap[:depth])
        return gap_from_sigma(self.model, depth)

    def potential(self, g: GapStructure) -> Potential:
        if self.explicit_potential is not None:
            return Potential({n: v for n, v in self.explicit_potential.items() if n <= g.depth})
        return potential_from_h(self.model, self.h, g.depth)

    def overrides_for(self, g: GapStructure) -> dict:
        return {n: m for n, m in self.zeta_overrides.items() if n <= g.depth}

    def build(self, depth: int | None = None, budget: int | None = None):
        """``(gap, potential, cocycle table, zeta profile)``."""
        g = self.gap(depth)
        p = self.potential(g)
        ct = build_cocycle(g, p)
        zp = zeta_profile(g, ct, self.overrides_for(g), budget)
        return g, p, ct, zp

    def measure(self, name: str) -> Measure:
        try:
            return self.measures[name]
        except KeyError:
            raise UnknownId(f"no measure named {name!r}") from None


def _resolve(model, key, where):
    try:
        return model.idx(str(key))
    except UnknownId:
        raise UnknownId(f"{where}: unknown point {key!r}") from None


def parse_model(data) -> ModelFile:
    """Validate a decoded JSON document and resolve every reference."""
    if not isinstance(data, dict):
        raise ParseError("model file must be a JSON object")
    extra = set(data) - _KEYS
    if extra:
        raise ParseError(f"unknown keys: {sorted(extra)}")
    if "points" not in data or not isinstance(data["points"], list):
        raise ParseError("'points' must be a list")
    pts = [str(p) for p in data["points"]]
    if len(set(pts)) != len(pts):
        raise ParseError("duplicate point ids")
    sigma = data.get("sigma", {})
    if not isinstance(sigma, dict):
        raise ParseError("'sigma' must be an object")
    try:
        model = SpaceModel.from_mapping(pts, sigma)
    except UnknownId as exc:
        raise UnknownId(f"sigma: {exc}") from None

    h = np.zeros(model.n_points)
    for key, val in (data.get("potential_h") or {}).items():
        i = _resolve(model, key, "potential_h")
        if not model.domain[i]:
            raise ModelError(f"potential_h: {key!r} is outside dom(sigma)")
        h[i] = _real(val, f"potential_h[{key!r}]")
    h = h_array(model, h)

    depth = data.get("depth", DEFAULT_DEPTH)
    if not isinstance(depth, int) or isinstance(depth, bool) or depth < 0:
        raise ParseError("'depth' must be a nonnegative integer")

    gap_blocks = None
    if data.get("explicit_gap") is not None:
        levels = data["explicit_gap"]
        if not isinstance(levels, list):
            raise ParseError("'explicit_gap' must be a list of levels")
        gap_blocks = tuple(
            tuple(tuple(_resolve(model, p, f"explicit_gap[{n}]") for p in block)
                  for block in level)
            for n, level in enumerate(levels, start=1))

    pot = None
    if data.get("explicit_potential") is not None:
        pot = {}
        for lvl, table in data["explicit_potential"].items():
            try:
                n = int(lvl)
            except ValueError:
                raise ParseError(f"explicit_potential: bad level {lvl!r}") from None
            arr = np.full(model.n_points, np.nan)
            for key, val in table.items():
                arr[_resolve(model, key, f"explicit_potential[{n}]")] = \
                    _real(val, f"explicit_potential[{n}][{key!r}]")
            arr.setflags(write=False)
            pot[n] = arr

    measures = {}
    for name, weights in (data.get("measures") or {}).items():
        w = np.zeros(model.n_points)
        for key, val in weights.items():
            v = _real(val, f"measures[{name!r}]")
            if v < 0 or not np.isfinite(v):
                raise ModelError(f"measures[{name!r}]: weights must be finite and >= 0")
            w[_resolve(model, key, f"measures[{name!r}]")] += v
        measures[name] = Measure(w)

    overrides = {}
    for entry in data.get("zeta_overrides") or []:
        if not isinstance(entry, dict) or "level" not in entry or "points" not in entry:
            raise ParseError("each zeta override needs 'level' and 'points'")
        n = entry["level"]
        if not isinstance(n, int) or n < 0:
            raise ParseError("override level must be a nonnegative integer")
        mask = overrides.get(n, np.zeros(model.n_points, bool))
        for p in entry["points"]:
            mask[_resolve(model, p, "zeta_overrides")] = True
        overrides[n] = mask

    mf = ModelFile(model, h, depth, gap_blocks, pot, overrides, measures,
                   str(data.get("description", "")))
    if overrides:
        g = mf.gap(max(max(overrides), depth))
        if max(overrides) > g.depth:
            raise NonInvariantOverride("override level beyond the domain chain")
        close_overrides(g, overrides)
    return mf


def load_model(path) -> ModelFile:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None
    return parse_model(data)
