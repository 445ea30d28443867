"""Potentials ``{k_n}``, accumulated potentials ``h_n`` and the cocycles.

Per-level arrays have one entry per point and hold ``nan`` off ``U_n``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import CocycleMismatch, InvalidWitness, MissingPotentialValue, OutsideDomain
from .gap import GapStructure, GroupoidElement
from .reports import ValidationReport
from .space import SpaceModel, build_domain_chain, iterate_all

__all__ = ["Potential", "CocycleTable", "h_array", "potential_from_h",
           "validate_potential", "build_cocycle", "birkhoff_sums",
           "rd_cocycle_value", "GLUE_TOL"]

GLUE_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class Potential:
    """``k[n]`` for ``n = 1..depth``; ``k[0]`` is unused and absent."""

    k: dict

    @property
    def depth(self):
        return max(self.k, default=0)

    def level(self, n, n_points):
        if n in self.k:
            return self.k[n]
        return np.full(n_points, np.nan)


def h_array(model: SpaceModel, h, beta: float = 1.0) -> np.ndarray:
    """Normalize a function on ``dom(sigma)`` to an array (nan elsewhere)."""
    if isinstance(h, Mapping):
        arr = np.full(model.n_points, np.nan)
        for key, val in h.items():
            arr[model.idx(key)] = float(val)
    else:
        arr = np.asarray(h, dtype=float).copy()
        if arr.shape != (model.n_points,):
            raise ValueError("h array must have one entry per point")
    arr[~model.domain] = np.nan
    return beta * arr


def potential_from_h(model: SpaceModel, h, depth: int, beta: float = 1.0) -> Potential:
    """``k_n(x) = h(sigma^{n-1}(x))`` on ``U_n`` for ``1 <= n <= depth``."""
    harr = h_array(model, h, beta)
    chain = build_domain_chain(model, depth)
    k = {}
    for n in range(1, depth + 1):
        mask = chain.mask(n)
        img = iterate_all(model, n - 1)
        kn = np.full(model.n_points, np.nan)
        kn[mask] = harr[img[mask]]
        missing = mask & np.isnan(kn)
        if missing.any():
            x = int(np.argmax(missing))
            raise MissingPotentialValue(
                f"h undefined at {model.points[img[x]]!r} (needed for k_{n} at {model.points[x]!r})")
        kn.setflags(write=False)
        k[n] = kn
    return Potential(k)


def validate_potential(g: GapStructure, p: Potential) -> ValidationReport:
    """Check ``k_n(x) = k_n(y)`` on ``R_{n-1} & (U_n x U_n)``.

    Also checks that ``k_n`` is defined on all of ``U_n`` and the identity
    ``R_{n-1} & (U_n x U_n) = R_{n-1} & R_n``.
    """
    rep = ValidationReport("validate_potential")
    N = g.n_points
    for n in range(1, g.depth + 1):
        un = g.mask(n)
        kn = p.level(n, N)
        undefined = un & ~np.isfinite(kn)
        rep.record("defined_on_U", not undefined.any(),
                   {"level": n, "point": g.points[int(np.argmax(undefined))]} if undefined.any() else None)
        prev = g.same_class(n - 1)
        restricted = prev & un[:, None] & un[None, :]
        kk = np.where(un, kn, 0.0)
        viol = restricted & (kk[:, None] != kk[None, :])
        if viol.any():
            x, y = np.argwhere(viol)[0]
            rep.record("potential_invariance", False,
                       {"level": n, "pair": [g.points[x], g.points[y]],
                        "values": [float(kn[x]), float(kn[y])]})
        else:
            rep.record("potential_invariance", True)
        viol = restricted != (prev & g.same_class(n))
        if viol.any():
            x, y = np.argwhere(viol)[0]
            rep.record("restriction_identity", False,
                       {"level": n, "pair": [g.points[x], g.points[y]]})
        else:
            rep.record("restriction_identity", True)
    for name in ("defined_on_U", "potential_invariance", "restriction_identity"):
        rep.checks.setdefault(name, True)
    return rep


@dataclass(frozen=True, eq=False)
class CocycleTable:
    """``h_n``, ``rho_n = exp(h_n)`` and the pair cocycles ``c_n``."""

    gap: GapStructure
    h: tuple
    rho: tuple

    @property
    def depth(self):
        return len(self.h) - 1

    def h_level(self, n):
        if n < len(self.h):
            return self.h[n]
        return np.full(self.gap.n_points, np.nan)

    def rho_level(self, n):
        """``rho_n`` on ``U_n`` and zero elsewhere (the zero extension)."""
        if n < len(self.rho):
            return np.where(self.gap.mask(n), self.rho[n], 0.0)
        return np.zeros(self.gap.n_points)

    def c(self, n, x, y):
        lab = self.gap.label(n)
        if lab[x] < 0 or lab[x] != lab[y]:
            raise OutsideDomain(f"pair ({x}, {y}) is not in R_{n}")
        return float(self.h[n][x] - self.h[n][y])

    def D(self, n, x, y):
        return float(np.exp(self.c(n, x, y)))

    def c_matrix(self, n):
        """``c_n`` as an ``N x N`` array, nan off ``R_n``."""
        hn = self.h_level(n)
        out = hn[:, None] - hn[None, :]
        return np.where(self.gap.same_class(n), out, np.nan)

    def glued(self, x, y):
        """The cocycle on ``R = union R_n`` (lowest level containing the pair)."""
        for n in range(self.depth + 1):
            lab = self.gap.label(n)
            if lab[x] >= 0 and lab[x] == lab[y]:
                return self.c(n, x, y)
        raise OutsideDomain(f"pair ({x}, {y}) is not in R")


def build_cocycle(g: GapStructure, p: Potential) -> CocycleTable:
    """Accumulate ``h_n = h_{n-1}|U_n + k_n`` and check the glued cocycle.

    Raises :class:`CocycleMismatch` if some pair lies in ``R_n`` and ``R_m``
    with ``c_n != c_m``.
    """
    N = g.n_points
    h = [np.where(g.mask(0), 0.0, np.nan)]
    for n in range(1, g.depth + 1):
        un = g.mask(n)
        hn = np.full(N, np.nan)
        hn[un] = h[-1][un] + p.level(n, N)[un]
        if np.isnan(hn[un]).any():
            x = int(np.argmax(un & np.isnan(hn)))
            raise MissingPotentialValue(f"k_{n} undefined at {g.points[x]!r}")
        h.append(hn)
    rho = []
    for n, hn in enumerate(h):
        r = np.where(g.mask(n), np.exp(np.where(g.mask(n), hn, 0.0)), np.nan)
        hn.setflags(write=False)
        r.setflags(write=False)
        rho.append(r)
    ct = CocycleTable(g, tuple(h), tuple(rho))

    cs = [ct.c_matrix(n) for n in range(g.depth + 1)]
    for n in range(g.depth + 1):
        for m in range(n + 1, g.depth + 1):
            both = ~np.isnan(cs[n]) & ~np.isnan(cs[m])
            if not both.any():
                continue
            scale = 1.0 + np.nanmax(np.abs(h[m]))
            diff = np.abs(np.where(both, cs[n] - cs[m], 0.0))
            if (diff > GLUE_TOL * scale).any():
                x, y = np.argwhere(diff > GLUE_TOL * scale)[0]
                raise CocycleMismatch(
                    f"c_{n} != c_{m} at ({g.points[x]!r}, {g.points[y]!r})",
                    witness={"n": n, "m": m, "pair": [g.points[x], g.points[y]],
                             "values": [float(cs[n][x, y]), float(cs[m][x, y])]})
    return ct


def birkhoff_sums(model: SpaceModel, h, depth: int) -> np.ndarray:
    """``S[k, x] = sum_{i<k} h(sigma^i x)`` for ``x in U_k`` (nan elsewhere)."""
    harr = h_array(model, h)
    N = model.n_points
    S = np.full((depth + 1, N), np.nan)
    S[0] = 0.0
    cur = np.arange(N)
    alive = np.ones(N, dtype=bool)
    acc = np.zeros(N)
    for k in range(1, depth + 1):
        step = np.where(alive, cur, 0)
        ok = alive & (model.sigma[step] >= 0)
        vals = harr[step]
        missing = ok & np.isnan(vals)
        if missing.any():
            raise MissingPotentialValue(f"h undefined at {model.points[step[np.argmax(missing)]]!r}")
        acc = np.where(ok, acc + np.where(ok, vals, 0.0), np.nan)
        cur = np.where(ok, model.sigma[step], -1)
        alive = ok
        S[k] = np.where(alive, acc, np.nan)
    return S


def _birkhoff(model, harr, x, k):
    total = 0.0
    cur = x
    for _ in range(k):
        if model.sigma[cur] < 0:
            raise InvalidWitness(f"{model.points[x]!r} is not in U_{k}")
        val = harr[cur]
        if np.isnan(val):
            raise MissingPotentialValue(f"h undefined at {model.points[cur]!r}")
        total += val
        cur = int(model.sigma[cur])
    return total, cur


def rd_cocycle_value(model: SpaceModel, h, elem: GroupoidElement, k: int, l: int,
                     depth: int | None = None, tol: float = 1e-12) -> float:
    """Birkhoff difference ``b(x, k-l, y)`` for a witness ``(k, l)``.

    Every other witness ``(k', l')`` with ``k', l' <= max(k, l, depth)`` is
    evaluated as well and must give the same value.
    """
    harr = h_array(model, h)
    x, n, y = elem
    if k < 0 or l < 0 or k - l != n:
        raise InvalidWitness(f"({k}, {l}) does not give lag {n}")
    sx, ex = _birkhoff(model, harr, x, k)
    sy, ey = _birkhoff(model, harr, y, l)
    if ex != ey:
        raise InvalidWitness(f"sigma^{k}(x) != sigma^{l}(y)")
    value = sx - sy
    top = max(k, l, depth or 0)
    for k2 in range(max(0, n), top + 1):
        l2 = k2 - n
        if l2 > top or (k2, l2) == (k, l):
            continue
        try:
            ax, ex2 = _birkhoff(model, harr, x, k2)
            ay, ey2 = _birkhoff(model, harr, y, l2)
        except InvalidWitness:
            continue
        if ex2 != ey2:
            continue
        other = ax - ay
        if abs(other - value) > tol * (1.0 + abs(ax) + abs(ay) + abs(sx) + abs(sy)):
            raise CocycleMismatch(
                f"b depends on the witness: ({k},{l}) -> {value!r}, ({k2},{l2}) -> {other!r}",
                witness={"element": list(elem), "witnesses": [[k, l], [k2, l2]]})
    return float(value)
