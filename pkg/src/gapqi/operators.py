"""Conditional-expectation operators of a GAP relation and their duals.

Functions on the space are float arrays with one entry per point, values in
``[0, inf]`` (``np.inf`` is infinity).  They are implicitly zero-extended:
an operator at level ``n`` only looks at ``U_n``.

Partition functions may be pinned to infinity through *overrides*: a
mapping ``level -> point mask`` of ``R_n``-invariant sets.  This stands in
for infinite classes, which a finite model cannot produce.  Pinned sets are
carried upward, since ``zeta_m >= exp(k_m) zeta_{m-1}`` forces
``Z_{m-1} & U_m`` into ``Z_m``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import islice
from typing import Callable, Iterable, Mapping, NamedTuple

import numpy as np

from .errors import InvariantViolation, NonInvariantOverride, UnresolvedZeta
from .extreal import as_array, ext_inv, ext_mul
from .gap import GapStructure
from .measures import Measure
from .potential import CocycleTable

__all__ = ["FINITE", "INFINITE", "UNKNOWN", "ZetaValue", "ZetaProfile",
           "LevelSets", "expectation", "class_sum", "zeta", "zeta_profile",
           "zeta_budgeted", "close_overrides", "level_sets", "zeta_inverse",
           "projector", "LevelOperator", "dual_apply", "export_matrix",
           "is_invariant_function"]

FINITE, INFINITE, UNKNOWN = 0, 1, 2
_OFF = -1


class ZetaValue(NamedTuple):
    """One partition-function entry: status plus value (a lower bound when
    the status is UNKNOWN)."""

    status: int
    value: float

    @property
    def is_finite(self):
        return self.status == FINITE


@dataclass(frozen=True, eq=False)
class ZetaProfile:
    """Per level arrays ``values[n]`` and ``status[n]`` (``-1`` off ``U_n``)."""

    values: tuple
    status: tuple

    @property
    def depth(self):
        return len(self.values) - 1

    def at(self, n, x):
        return ZetaValue(int(self.status[n][x]), float(self.values[n][x]))

    @property
    def resolved(self):
        return not any((s == UNKNOWN).any() for s in self.status)


def expectation(g: GapStructure, n: int, f) -> np.ndarray:
    """``F_n(f)``: class sums of ``f`` over ``R_n`` on ``U_n``, zero elsewhere."""
    f = as_array(f)
    lab = g.label(n)
    inside = lab >= 0
    sums = np.zeros(g.n_points)
    np.add.at(sums, lab[inside], f[inside])
    out = np.zeros(g.n_points)
    out[inside] = sums[lab[inside]]
    return out


def is_invariant_function(g: GapStructure, n: int, f, tol=0.0) -> bool:
    """Whether ``f`` is constant on every ``R_n``-class."""
    f = np.asarray(f, float)
    for cls in g.classes(n):
        vals = f[cls]
        if np.isinf(vals).any():
            if not np.isinf(vals).all():
                return False
            continue
        if vals.max() - vals.min() > tol * max(1.0, np.abs(vals).max()):
            return False
    return True


def class_sum(values: Iterable[float], budget: int | None = None) -> ZetaValue:
    """Sum a (possibly infinite) stream of positive class weights.

    Consumes at most ``budget`` items; if more remain the result is UNKNOWN
    with the partial sum as a lower bound.
    """
    it = iter(values)
    total = 0.0
    if budget is None:
        for v in it:
            total += v
        return ZetaValue(INFINITE if np.isinf(total) else FINITE, total)
    for v in islice(it, budget):
        total += v
    sentinel = object()
    if next(it, sentinel) is not sentinel:
        return ZetaValue(UNKNOWN, total)
    return ZetaValue(INFINITE if np.isinf(total) else FINITE, total)


def close_overrides(g: GapStructure, overrides: Mapping | None) -> dict:
    """Propagate pinned sets upward to full level masks ``Z_n``.

    Validates that every declared set is inside ``U_n`` and ``R_n``-invariant.
    """
    N = g.n_points
    declared = {}
    for n, pts in (overrides or {}).items():
        n = int(n)
        arr = np.asarray(pts)
        if arr.dtype == bool:
            if arr.shape != (N,):
                raise NonInvariantOverride("override mask has the wrong length")
            mask = arr.copy()
        else:
            mask = _points_to_mask(arr.ravel(), N)
        if n == 0 and mask.any():
            raise NonInvariantOverride("level 0 cannot be pinned: zeta_0 = 1")
        if (mask & ~g.mask(n)).any():
            raise NonInvariantOverride(f"override at level {n} leaves U_{n}")
        if not g.is_invariant(n, mask):
            raise NonInvariantOverride(f"override at level {n} is not R_{n}-invariant")
        declared[n] = declared.get(n, np.zeros(N, bool)) | mask
    Z = {0: np.zeros(N, bool)}
    for n in range(1, g.depth + 1):
        carried = Z[n - 1] & g.mask(n)
        z = declared.get(n, np.zeros(N, bool)) | carried
        if z.any():
            lab = g.label(n)
            hit = np.zeros(N, bool)
            hit[lab[z]] = True
            z = (lab >= 0) & hit[np.where(lab >= 0, lab, 0)]
        Z[n] = z
    return Z


def _points_to_mask(pts, N):
    mask = np.zeros(N, bool)
    for i in pts:
        mask[int(i)] = True
    return mask


def zeta(g: GapStructure, ct: CocycleTable, n: int, overrides=None,
         budget: int | None = None):
    """``zeta_n`` on ``U_n`` as ``(values, status)`` arrays.

    Finite classes are summed in ascending index order.  With ``budget``,
    a class with more members than the budget gives UNKNOWN and the partial
    sum over its first ``budget`` members.  Pinned points are INFINITE.
    """
    N = g.n_points
    values = np.full(N, np.nan)
    status = np.full(N, _OFF, dtype=np.int8)
    rho = ct.rho_level(n)
    pinned = close_overrides(g, overrides).get(n, np.zeros(N, bool)) if overrides else np.zeros(N, bool)
    for cls in g.classes(n):
        if pinned[cls[0]]:
            val = ZetaValue(INFINITE, np.inf)
        else:
            val = class_sum((rho[i] for i in cls), budget)
        values[cls] = val.value
        status[cls] = val.status
    values.setflags(write=False)
    status.setflags(write=False)
    return values, status


def zeta_profile(g: GapStructure, ct: CocycleTable, overrides=None,
                 budget: int | None = None) -> ZetaProfile:
    vals, stats = [], []
    for n in range(g.depth + 1):
        v, s = zeta(g, ct, n, overrides, budget)
        vals.append(v)
        stats.append(s)
    return ZetaProfile(tuple(vals), tuple(stats))


def zeta_budgeted(source: Callable[[int, int], Iterable[float]], g: GapStructure,
                  n: int, budget: int):
    """Partition function from a lazily enumerated class presentation.

    ``source(n, x)`` yields the weights ``rho_n(y)`` of the members of the
    class of ``x``, possibly without end.  One evaluation per class
    representative.  No divergence is ever inferred: an exhausted budget
    yields UNKNOWN with a certified lower bound.
    """
    N = g.n_points
    values = np.full(N, np.nan)
    status = np.full(N, _OFF, dtype=np.int8)
    for cls in g.classes(n):
        val = class_sum(source(n, int(cls[0])), budget)
        values[cls] = val.value
        status[cls] = val.status
    return values, status


@dataclass(frozen=True, eq=False)
class LevelSets:
    """``Z_n`` (infinite partition function) and ``Y_n = U_n - Z_n``."""

    Z: tuple
    Y: tuple
    zeta: ZetaProfile

    @property
    def depth(self):
        return len(self.Z) - 1

    def z(self, n):
        return self.Z[n] if n < len(self.Z) else np.zeros_like(self.Z[0])

    def y(self, n):
        return self.Y[n] if n < len(self.Y) else np.zeros_like(self.Y[0])

    def Zunion(self):
        out = np.zeros_like(self.Z[0])
        for z in self.Z:
            out |= z
        return out


def level_sets(zp: ZetaProfile, g: GapStructure | None = None,
               ct: CocycleTable | None = None) -> LevelSets:
    """Split each ``U_n`` into ``Z_n`` and ``Y_n``.

    Re-verifies ``Z_0 = {}``, ``Z_n & U_m <= Z_m`` and ``Y_m <= Y_n`` for
    ``n <= m``; with ``g`` and ``ct`` also ``zeta_n >= rho_n`` and
    class-constancy of ``zeta_n``.
    """
    if not zp.resolved:
        raise UnresolvedZeta("partition function has UNKNOWN entries; raise the budget")
    Z, Y = [], []
    for n in range(zp.depth + 1):
        st = zp.status[n]
        Z.append(st == INFINITE)
        Y.append(st == FINITE)
    if Z[0].any():
        raise InvariantViolation("Z_0 must be empty")
    for n in range(len(Z)):
        un = Z[n] | Y[n]
        for m in range(n, len(Z)):
            um = Z[m] | Y[m]
            if (Z[n] & um & ~Z[m]).any():
                raise InvariantViolation(f"Z_{n} & U_{m} is not inside Z_{m}")
            if (Y[m] & ~Y[n]).any():
                raise InvariantViolation(f"Y_{m} is not inside Y_{n}")
        if g is not None and ct is not None:
            vals = zp.values[n]
            rho = ct.rho_level(n)
            if (vals[un] < rho[un] * (1 - 1e-12)).any():
                raise InvariantViolation(f"zeta_{n} < rho_{n} somewhere")
            if not is_invariant_function(g, n, np.where(un, vals, 0.0), tol=1e-12):
                raise InvariantViolation(f"zeta_{n} is not R_{n}-invariant")
    return LevelSets(tuple(Z), tuple(Y), zp)


def zeta_inverse(ls: LevelSets, n: int) -> np.ndarray:
    """``zeta_n^{-1}`` zero-extended, with ``1/inf = 0`` on ``Z_n``."""
    if n > ls.depth:
        return np.zeros(len(ls.Z[0]))
    vals = ls.zeta.values[n]
    inside = ls.Z[n] | ls.Y[n]
    return ext_inv(np.where(inside, vals, 0.0), where=inside)


def projector(g: GapStructure, ct: CocycleTable, ls: LevelSets, n: int, f) -> np.ndarray:
    """``Q_n(f) = F_n(f rho_n zeta_n^{-1})`` with ``0 * inf = 0``."""
    return expectation(g, n, ext_mul(as_array(f), ct.rho_level(n), zeta_inverse(ls, n)))


@dataclass(frozen=True, eq=False)
class LevelOperator:
    """A level-indexed operator descriptor.

    ``kind`` is one of ``"F"`` (class sums), ``"E_rho"`` (``f -> F_n(rho_n f)``),
    ``"Q"`` (the extended projector) or ``"P"`` (the projector ``P_{rho_n}``
    acting on functions and measures living on ``U_n``).
    """

    kind: str
    level: int
    gap: GapStructure
    ct: CocycleTable | None = None
    ls: LevelSets | None = None

    def __post_init__(self):
        if self.kind not in ("F", "E_rho", "Q", "P"):
            raise ValueError(f"unknown operator kind {self.kind!r}")
        if self.kind != "F" and self.ct is None:
            raise ValueError(f"{self.kind} needs a cocycle table")
        if self.kind in ("Q", "P") and self.ls is None:
            raise ValueError(f"{self.kind} needs level sets")

    @property
    def domain(self):
        """Mask of the source/target space (``U_n`` for ``P``, else everything)."""
        if self.kind == "P":
            return self.gap.mask(self.level)
        return np.ones(self.gap.n_points, bool)

    def weight(self):
        n = self.level
        if self.kind == "F":
            return self.gap.mask(n).astype(float)
        if self.kind == "E_rho":
            return self.ct.rho_level(n)
        return ext_mul(self.ct.rho_level(n), zeta_inverse(self.ls, n))

    def apply(self, f):
        f = as_array(f)
        if self.kind == "P":
            f = np.where(self.domain, f, 0.0)
        return expectation(self.gap, self.level, ext_mul(f, self.weight()))

    def dual(self, nu: Measure) -> Measure:
        """Adjoint on finite measures: ``T*(nu)(x) = w(x) nu(R_n(x))``."""
        w = np.asarray(nu.weights, float)
        if self.kind == "P":
            if nu.domain is not None and (nu.domain != self.domain).any():
                raise ValueError("P* acts on measures living on U_n")
            w = np.where(self.domain, w, 0.0)
        class_mass = expectation(self.gap, self.level, w)
        out = ext_mul(self.weight(), class_mass)
        return Measure(out, self.domain if self.kind == "P" else None)

    def matrix(self):
        """Dense matrix ``M`` with ``T(f)(x) = sum_t M[x, t] f(t)``.

        Rows and columns are indexed by the points of :attr:`domain`.
        Returns ``(M, index)``.
        """
        idx = np.flatnonzero(self.domain)
        same = self.gap.same_class(self.level)
        M = np.where(same, self.weight()[None, :], 0.0)
        return M[np.ix_(idx, idx)], idx


def dual_apply(T, nu: Measure) -> Measure:
    """``T*(nu)``, characterized by ``<f, T*(nu)> = <T(f), nu>``."""
    return T.dual(nu)


def export_matrix(T, points) -> dict:
    """Dense-matrix export: rows are targets, columns sources, entries as
    shortest round-trip decimal strings."""
    M, idx = T.matrix()
    labels = [points[i] for i in idx]
    return {"operator": T.kind, "level": T.level, "rows": labels, "cols": labels,
            "entries": [[repr(float(v)) for v in row] for row in M]}
