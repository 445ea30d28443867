"""GAP relations: decreasing domains ``U_n`` with partitions ``R_n``.

Each ``R_n`` is stored as a label array: ``labels[n][x]`` is the least index
in the ``R_n``-class of ``x`` and ``-1`` when ``x`` is outside ``U_n``.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .errors import BadLevels, GapAxiomError, OutsideDomain
from .reports import ValidationReport
from .space import DomainChain, SpaceModel, build_domain_chain, iterate_all

__all__ = ["GapStructure", "GroupoidElement", "gap_from_sigma",
           "gap_from_partitions", "validate_gap", "class_of", "union_class",
           "union_labels", "decompose_class", "enumerate_groupoid",
           "groupoid_witnesses"]


def _canonical_labels(keys, mask):
    """Label each masked point by the least index sharing its key."""
    labels = np.full(len(mask), -1, dtype=np.int64)
    first = {}
    for i in np.flatnonzero(mask):
        k = keys[i]
        labels[i] = first.setdefault(k, i)
    return labels


@dataclass(frozen=True, eq=False)
class GapStructure:
    points: tuple
    chain: DomainChain
    labels: tuple

    @property
    def n_points(self):
        return len(self.points)

    @property
    def depth(self):
        return len(self.labels) - 1

    def mask(self, n):
        if n < len(self.labels):
            return self.labels[n] >= 0
        return np.zeros(self.n_points, dtype=bool)

    def label(self, n):
        if n < len(self.labels):
            return self.labels[n]
        return np.full(self.n_points, -1, dtype=np.int64)

    def same_class(self, n):
        """``N x N`` boolean matrix of ``R_n``."""
        lab = self.label(n)
        return (lab[:, None] == lab[None, :]) & (lab[:, None] >= 0)

    def classes(self, n):
        """``R_n``-classes as index arrays, ordered by representative."""
        lab = self.label(n)
        groups = defaultdict(list)
        for i in np.flatnonzero(lab >= 0):
            groups[int(lab[i])].append(i)
        return [np.asarray(groups[r], dtype=np.int64) for r in sorted(groups)]

    def members(self, n, i):
        lab = self.label(n)
        if lab[i] < 0:
            raise OutsideDomain(f"{self.points[i]!r} is not in U_{n}")
        return np.flatnonzero(lab == lab[i])

    def is_invariant(self, n, mask):
        """Whether a point mask is a union of ``R_n``-classes (within ``U_n``)."""
        lab = self.label(n)
        inside = lab >= 0
        hit = np.zeros(self.n_points, dtype=bool)
        hit[lab[inside & mask]] = True
        return not (inside & ~mask & hit[np.where(inside, lab, 0)]).any()


def gap_from_sigma(model: SpaceModel, depth: int) -> GapStructure:
    """``R_n`` = fibers of ``sigma^n`` on ``U_n``."""
    chain = build_domain_chain(model, depth)
    labels = []
    for n in range(len(chain.levels)):
        img = iterate_all(model, n)
        lab = _canonical_labels(img, chain.levels[n])
        lab.setflags(write=False)
        labels.append(lab)
    return GapStructure(model.points, chain, tuple(labels))


def gap_from_partitions(points: Sequence, partitions: Sequence) -> GapStructure:
    """Build a structure from explicit partitions.

    ``partitions[j]`` lists the blocks (index sequences) of ``R_{j+1}``;
    ``R_0`` is always the identity on all points.  The blocks at one level
    must be disjoint.  Nothing else is checked here, see :func:`validate_gap`.
    """
    points = tuple(str(p) for p in points)
    n = len(points)
    ident = np.arange(n, dtype=np.int64)
    ident.setflags(write=False)
    labels = [ident]
    for level, blocks in enumerate(partitions, start=1):
        lab = np.full(n, -1, dtype=np.int64)
        for block in blocks:
            block = sorted(int(i) for i in block)
            if not block:
                continue
            if (lab[block] >= 0).any() or len(set(block)) != len(block):
                raise GapAxiomError(f"blocks of R_{level} overlap")
            lab[block] = block[0]
        lab.setflags(write=False)
        labels.append(lab)
    chain = DomainChain(tuple(lab >= 0 for lab in labels))
    return GapStructure(points, chain, tuple(labels))


def _first_pair(viol, g):
    idx = np.argwhere(viol)
    if len(idx) == 0:
        return None
    x, y = idx[0]
    return [g.points[x], g.points[y]]


def validate_gap(g: GapStructure) -> ValidationReport:
    """Exhaustive pair scan of the GAP axioms and their consequences.

    Checks: decreasing chain, ``R_0`` identity, axiom (iii)
    ``R_n & (U_n x U_m) <= R_m``, its two consequences (restriction to
    ``U_m`` contained in ``R_m``; ``U_m`` is ``R_n``-invariant), and the
    chain identity ``R_n & R_m = R_n & R_{n+1} & ... & R_m``.
    """
    rep = ValidationReport("validate_gap")
    depth = g.depth
    masks = [g.mask(n) for n in range(depth + 1)]
    same = [g.same_class(n) for n in range(depth + 1)]

    for n in range(1, depth + 1):
        bad = masks[n] & ~masks[n - 1]
        rep.record("chain_decreasing", not bad.any(),
                   {"level": n, "point": g.points[int(np.argmax(bad))]} if bad.any() else None)
    ident = np.eye(g.n_points, dtype=bool)
    rep.record("identity_R0", masks[0].all() and (same[0] == ident).all(),
               {"level": 0})

    for n in range(depth + 1):
        for m in range(n, depth + 1):
            um = masks[m]
            viol = same[n] & um[None, :] & ~same[m]
            rep.record("axiom_iii", not viol.any(),
                       {"n": n, "m": m, "pair": _first_pair(viol, g)})
            viol = same[n] & um[:, None] & um[None, :] & ~same[m]
            rep.record("restriction_contained", not viol.any(),
                       {"n": n, "m": m, "pair": _first_pair(viol, g)})
            viol = same[n] & um[None, :] & ~um[:, None]
            rep.record("U_invariant", not viol.any(),
                       {"n": n, "m": m, "pair": _first_pair(viol, g)})
            if m - n >= 2:
                both = same[n] & same[m]
                for k in range(n + 1, m):
                    viol = both & ~same[k]
                    rep.record("rchain", not viol.any(),
                               {"n": n, "m": m, "k": k, "pair": _first_pair(viol, g)})
    for name in ("axiom_iii", "restriction_contained", "U_invariant", "rchain"):
        rep.checks.setdefault(name, True)
    rep.checks.setdefault("chain_decreasing", True)
    return rep


def class_of(g: GapStructure, n: int, x: int) -> np.ndarray:
    """Indices of ``R_n(x)``."""
    return g.members(n, x)


def union_labels(g: GapStructure) -> np.ndarray:
    """Component label of every point under ``R = union R_n``."""
    rows, cols = [], []
    for n in range(g.depth + 1):
        lab = g.label(n)
        inside = np.flatnonzero(lab >= 0)
        rows.append(inside)
        cols.append(lab[inside])
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    graph = coo_matrix((np.ones(len(rows)), (rows, cols)),
                       shape=(g.n_points, g.n_points))
    _, comp = connected_components(graph, directed=False)
    # relabel by least member for determinism
    least = {}
    for i, c in enumerate(comp):
        least.setdefault(c, i)
    return np.array([least[c] for c in comp], dtype=np.int64)


def union_class(g: GapStructure, x: int) -> np.ndarray:
    lab = union_labels(g)
    return np.flatnonzero(lab == lab[x])


def decompose_class(g: GapStructure, n: int, m: int, x: int):
    """Split ``R_m(x)`` into ``R_n``-classes.

    Returns a list of ``(representative, members)`` ordered by least member.
    The block containing ``x`` is represented by ``x``; other blocks by their
    least member.
    """
    if n > m:
        raise BadLevels(f"need n <= m, got n={n}, m={m}")
    big = g.members(m, x)
    lab_n = g.label(n)
    blocks = []
    seen = set()
    inside = set(big.tolist())
    for y in big:
        r = int(lab_n[y])
        if r < 0:
            raise GapAxiomError(f"{g.points[y]!r} in R_{m}-class but not in U_{n}")
        if r in seen:
            continue
        seen.add(r)
        block = np.flatnonzero(lab_n == r)
        if not inside.issuperset(block.tolist()):
            raise GapAxiomError(f"R_{n}-class of {g.points[y]!r} leaves R_{m}({g.points[x]!r})")
        rep = x if x in block else int(block[0])
        blocks.append((rep, block))
    blocks.sort(key=lambda b: int(b[1][0]))
    return blocks


class GroupoidElement(NamedTuple):
    """Triple ``(x, n, y)`` of point indices and a signed lag."""

    x: int
    n: int
    y: int


def groupoid_witnesses(model: SpaceModel, depth: int) -> dict:
    """Map each element of the truncated groupoid to its ``(k, l)`` witnesses."""
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    its = [iterate_all(model, k) for k in range(depth + 1)]
    table = defaultdict(list)
    for k in range(depth + 1):
        a = its[k]
        for l in range(depth + 1):
            b = its[l]
            by_value = defaultdict(list)
            for y in np.flatnonzero(b >= 0):
                by_value[int(b[y])].append(int(y))
            for x in np.flatnonzero(a >= 0):
                for y in by_value.get(int(a[x]), ()):
                    table[GroupoidElement(int(x), k - l, y)].append((k, l))
    return dict(table)


def enumerate_groupoid(model: SpaceModel, depth: int) -> list:
    """Sorted, deduplicated triples with witnesses ``k, l <= depth``."""
    return sorted(groupoid_witnesses(model, depth))
