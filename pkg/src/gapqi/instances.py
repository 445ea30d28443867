"""Small named models and a random model generator.

``build_instance`` bundles everything derived from ``(model, h, depth)``:
the GAP structure, potential, cocycle table, partition functions and level
sets.
"""

from __future__ import annotations

from itertools import product
from typing import NamedTuple

import numpy as np

from .gap import GapStructure, gap_from_sigma
from .operators import LevelSets, ZetaProfile, level_sets, zeta_profile
from .potential import CocycleTable, Potential, build_cocycle, h_array, potential_from_h
from .space import SpaceModel

__all__ = ["Instance", "build_instance", "m0", "two_shift", "fixed_point",
           "random_model", "random_overrides", "EMPTY_WORD"]

EMPTY_WORD = "e"


class Instance(NamedTuple):
    model: SpaceModel
    h: np.ndarray
    depth: int
    gap: GapStructure
    potential: Potential
    ct: CocycleTable
    zp: ZetaProfile
    ls: LevelSets


def build_instance(model: SpaceModel, h, depth: int, overrides=None,
                   budget: int | None = None) -> Instance:
    harr = h_array(model, h)
    g = gap_from_sigma(model, depth)
    p = potential_from_h(model, harr, g.depth)
    ct = build_cocycle(g, p)
    zp = zeta_profile(g, ct, overrides, budget)
    ls = level_sets(zp, g, ct)
    return Instance(model, harr, depth, g, p, ct, zp, ls)


def m0():
    """Four points, ``sigma(1) = sigma(2) = 0``, ``sigma(3) = 1``,
    ``h(1) = ln 2``, ``h(2) = h(3) = 0``."""
    model = SpaceModel.from_mapping([0, 1, 2, 3], {1: 0, 2: 0, 3: 1})
    h = {1: np.log(2.0), 2: 0.0, 3: 0.0}
    return model, h_array(model, h)


def two_shift(m: int, h: float = 0.0):
    """Words of length ``<= m`` over ``{a, b}``; ``sigma`` drops the first
    letter and is undefined on the empty word (id ``"e"``)."""
    words = [EMPTY_WORD]
    for k in range(1, m + 1):
        words += ["".join(w) for w in product("ab", repeat=k)]
    sigma = {w: (w[1:] or EMPTY_WORD) for w in words if w != EMPTY_WORD}
    model = SpaceModel.from_mapping(words, sigma)
    return model, h_array(model, np.full(len(words), float(h)))


def fixed_point(beta: float = 0.0, tail: int = 0):
    """A fixed point ``x`` with ``h(x) = beta``, plus an optional chain of
    ``tail`` points falling into it (``h = 0`` there)."""
    pts = ["x"] + [f"t{i}" for i in range(tail)]
    sigma = {"x": "x"}
    for i in range(tail):
        sigma[f"t{i}"] = "x" if i == 0 else f"t{i - 1}"
    model = SpaceModel.from_mapping(pts, sigma)
    h = np.zeros(len(pts))
    h[0] = beta
    return model, h_array(model, h)


def random_model(rng: np.random.Generator, n_points: int, density: float,
                 h_range=(-2.0, 2.0)):
    """Partial map with each point in the domain with probability
    ``density`` and images uniform over all points; ``h`` uniform on the
    domain."""
    defined = rng.random(n_points) < density
    targets = rng.integers(0, n_points, size=n_points)
    sigma = np.where(defined, targets, -1)
    model = SpaceModel.from_array(sigma)
    h = rng.uniform(*h_range, size=n_points)
    return model, h_array(model, h)


def random_overrides(rng: np.random.Generator, g: GapStructure, p: float = 0.3) -> dict:
    """Pin a random selection of classes at one random positive level."""
    levels = [n for n in range(1, g.depth + 1) if g.mask(n).any()]
    if not levels:
        return {}
    n = int(rng.choice(levels))
    mask = np.zeros(g.n_points, bool)
    for cls in g.classes(n):
        if rng.random() < p:
            mask[cls] = True
    return {n: mask} if mask.any() else {}
