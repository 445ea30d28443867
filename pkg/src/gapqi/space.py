"""Finite state spaces with a partial self-map and its domain chain."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import OutsideDomain, UnknownId

__all__ = ["SpaceModel", "DomainChain", "build_domain_chain", "iterate",
           "iterate_all"]


@dataclass(frozen=True, eq=False)
class SpaceModel:
    """A finite point set with a partial map ``sigma``.

    Points are interned to dense indices in the order given.  ``sigma`` is an
    integer array with ``-1`` where the map is undefined.
    """

    points: tuple
    sigma: np.ndarray
    index: dict = field(repr=False)

    @classmethod
    def from_mapping(cls, points: Sequence, sigma: Mapping):
        points = tuple(str(p) for p in points)
        if len(set(points)) != len(points):
            raise ValueError("point identifiers must be unique")
        index = {p: i for i, p in enumerate(points)}
        arr = np.full(len(points), -1, dtype=np.int64)
        for src, dst in sigma.items():
            src, dst = str(src), str(dst)
            if src not in index:
                raise UnknownId(f"sigma source {src!r} is not a point")
            if dst not in index:
                raise UnknownId(f"sigma target {dst!r} is not a point")
            arr[index[src]] = index[dst]
        arr.setflags(write=False)
        return cls(points, arr, index)

    @classmethod
    def from_array(cls, sigma, points=None):
        sigma = np.asarray(sigma, dtype=np.int64).copy()
        n = len(sigma)
        if points is None:
            points = tuple(str(i) for i in range(n))
        points = tuple(str(p) for p in points)
        if ((sigma < -1) | (sigma >= n)).any():
            raise ValueError("sigma entries must be -1 or valid indices")
        sigma.setflags(write=False)
        return cls(points, sigma, {p: i for i, p in enumerate(points)})

    @property
    def n_points(self):
        return len(self.points)

    @property
    def domain(self):
        """Boolean mask of ``dom(sigma)``."""
        return self.sigma >= 0

    def idx(self, point):
        """Index of a point identifier (ints are accepted as indices)."""
        if isinstance(point, (int, np.integer)) and not isinstance(point, bool):
            if not 0 <= point < self.n_points:
                raise UnknownId(f"point index {point} out of range")
            return int(point)
        try:
            return self.index[str(point)]
        except KeyError:
            raise UnknownId(f"unknown point {point!r}") from None

    def ids(self, indices):
        return [self.points[i] for i in np.asarray(indices, dtype=np.int64).ravel()]

    def mask(self, points):
        m = np.zeros(self.n_points, dtype=bool)
        for p in points:
            m[self.idx(p)] = True
        return m


@dataclass(frozen=True, eq=False)
class DomainChain:
    """Decreasing masks ``U_0 >= U_1 >= ...``; levels past the end are empty."""

    levels: tuple

    @property
    def depth(self):
        return len(self.levels) - 1

    def mask(self, n):
        if n < 0:
            raise ValueError("levels are nonnegative")
        if n < len(self.levels):
            return self.levels[n]
        return np.zeros_like(self.levels[0])

    def members(self, n):
        return np.flatnonzero(self.mask(n))


def iterate_all(model: SpaceModel, n: int) -> np.ndarray:
    """``sigma^n`` on every point, ``-1`` where undefined."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    cur = np.arange(model.n_points, dtype=np.int64)
    sig = model.sigma
    for _ in range(n):
        ok = cur >= 0
        nxt = np.full_like(cur, -1)
        nxt[ok] = sig[cur[ok]]
        cur = nxt
    return cur


def build_domain_chain(model: SpaceModel, depth: int) -> DomainChain:
    """Masks of ``U_n = {x in U : sigma(x) in U_{n-1}}`` for ``n <= depth``.

    The chain stops at the first empty level.
    """
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    levels = [np.ones(model.n_points, dtype=bool)]
    dom = model.domain
    for _ in range(depth):
        prev = levels[-1]
        if not prev.any():
            break
        cur = np.zeros_like(prev)
        cur[dom] = prev[model.sigma[dom]]
        levels.append(cur)
    for lv in levels:
        lv.setflags(write=False)
    return DomainChain(tuple(levels))


def iterate(model: SpaceModel, x, n: int):
    """Return ``sigma^n(x)`` as a point identifier."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    i = model.idx(x)
    cur = i
    for _ in range(n):
        cur = int(model.sigma[cur])
        if cur < 0:
            raise OutsideDomain(f"{model.points[i]!r} is not in U_{n}")
    return model.points[cur]
