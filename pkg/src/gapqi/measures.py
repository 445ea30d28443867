"""Finite measures on a finite point set.

A :class:`Measure` keeps one weight per point of the ambient space.  An
optional ``domain`` mask marks a measure that lives on a subspace (the
result of domain restriction); points off the domain carry weight zero but
are not part of the measure space.  Zero-weight points are never pruned.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import ZeroMass

__all__ = ["Measure", "restrict", "total_variation", "INDICATOR", "DOMAIN"]

INDICATOR = "indicator-multiply"
DOMAIN = "domain-restrict"


@dataclass(frozen=True, eq=False)
class Measure:
    weights: np.ndarray
    domain: np.ndarray | None = None

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        if w.ndim != 1:
            raise ValueError("weights must be one-dimensional")
        if not np.isfinite(w).all() or (w < 0).any():
            raise ValueError("measure weights must be finite and nonnegative")
        if self.domain is not None:
            d = np.array(self.domain, dtype=bool)
            if d.shape != w.shape:
                raise ValueError("domain mask must match the weights")
            if (w[~d] != 0).any():
                raise ValueError("weights off the domain must vanish")
            d.setflags(write=False)
            object.__setattr__(self, "domain", d)
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    # constructors
    @classmethod
    def zero(cls, n_points):
        return cls(np.zeros(n_points))

    @classmethod
    def dirac(cls, n_points, i, mass=1.0):
        w = np.zeros(n_points)
        w[i] = mass
        return cls(w)

    @classmethod
    def from_mapping(cls, model, mapping: Mapping):
        w = np.zeros(model.n_points)
        for key, val in mapping.items():
            w[model.idx(key)] += float(val)
        return cls(w)

    @property
    def n_points(self):
        return len(self.weights)

    @property
    def full_domain(self):
        return self.domain is None

    def mass(self, mask=None):
        if mask is None:
            return float(self.weights.sum())
        return float(self.weights[np.asarray(mask, bool)].sum())

    def lives_in(self, mask):
        return not (self.weights[~np.asarray(mask, bool)] > 0).any()

    def support(self):
        return np.flatnonzero(self.weights > 0)

    def normalized(self):
        m = self.mass()
        if m <= 0:
            raise ZeroMass("cannot normalize a measure of zero mass")
        return Measure(self.weights / m, self.domain)

    def scaled(self, factor):
        return Measure(self.weights * float(factor), self.domain)

    def times(self, g):
        """The measure ``g * mu`` for a finite nonnegative function ``g``."""
        return Measure(np.asarray(g, float) * self.weights, self.domain)

    def extended(self):
        """Zero extension of a domain-restricted measure to the whole space."""
        return Measure(self.weights)

    def __add__(self, other):
        if not isinstance(other, Measure):
            return NotImplemented
        dom = None
        if self.domain is not None and other.domain is not None:
            dom = self.domain | other.domain
        return Measure(self.weights + other.weights, dom)

    def as_dict(self, model):
        dom = np.ones(self.n_points, bool) if self.domain is None else self.domain
        return {model.points[i]: float(self.weights[i]) for i in np.flatnonzero(dom)}


def restrict(mu: Measure, mask, mode: str = INDICATOR) -> Measure:
    """Restrict ``mu`` to the points in ``mask``.

    ``indicator-multiply`` keeps the ambient space and zeroes weights off the
    set; ``domain-restrict`` changes the measure space to the set itself.
    """
    mask = np.asarray(mask, dtype=bool)
    w = np.where(mask, mu.weights, 0.0)
    if mode == INDICATOR:
        return Measure(w, mu.domain)
    if mode == DOMAIN:
        dom = mask if mu.domain is None else (mask & mu.domain)
        return Measure(w, dom)
    raise ValueError(f"unknown restriction mode {mode!r}")


def total_variation(a: Measure, b: Measure) -> float:
    """Total-variation norm ``|a - b|(X)``, i.e. the l1 distance of weights."""
    return float(np.abs(np.asarray(a.weights) - np.asarray(b.weights)).sum())
