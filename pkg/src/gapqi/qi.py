"""Quasi-invariance checks, the V/W/Z decomposition and constructions.

Integral identities quantified over all test functions are reduced to the
spanning family of point (or pair) indicators, which is exact on finite
relations.  Measure equalities use a relative tolerance on total variation;
pointwise scalar identities use a relative tolerance per entry.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (BadLevels, EmptyWinf, EmptyWn, InconsistentVerdicts,
                     NoConvergence, NotInvariantK, ZetaNotIntegrable)
from .extreal import ext_mul
from .gap import GapStructure, groupoid_witnesses
from .measures import DOMAIN, INDICATOR, Measure, restrict, total_variation
from .operators import LevelOperator, LevelSets, zeta_inverse
from .potential import CocycleTable, birkhoff_sums, h_array
from .reports import QiReport, ValidationReport
from .space import SpaceModel

__all__ = ["DEFAULT_TOL", "check_qi_direct", "check_main_result",
           "construct_qi_from_nu", "check_main_for_q", "PartitionXWZ",
           "partition_xwz", "check_charac_dlr", "construct_qi_on_wn",
           "construct_qi_on_winf", "check_conformal", "p_star",
           "measures_close"]

DEFAULT_TOL = 1e-9


def _close(a, b, tol):
    """Elementwise relative closeness on [0, inf] (inf only equals inf)."""
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    both_inf = np.isinf(a) & np.isinf(b)
    with np.errstate(invalid="ignore"):
        diff = np.abs(a - b)
        ok = diff <= tol * np.maximum(np.abs(a), np.abs(b))
    ok |= (a == b)
    ok |= both_inf
    ok &= ~(np.isinf(a) ^ np.isinf(b))
    return ok


def measures_close(a: Measure, b: Measure, tol=DEFAULT_TOL) -> bool:
    scale = max(a.mass(), b.mass())
    return total_variation(a, b) <= tol * scale


def _worst_point(a: Measure, b: Measure, points):
    d = np.abs(np.asarray(a.weights) - np.asarray(b.weights))
    i = int(np.argmax(d))
    return {"point": points[i], "values": [float(a.weights[i]), float(b.weights[i])]}


# -- single level -----------------------------------------------------------

def check_qi_direct(g: GapStructure, ct: CocycleTable, mu: Measure, n: int,
                    ls: LevelSets | None = None, tol=DEFAULT_TOL) -> QiReport:
    """Pairwise form of quasi-invariance of ``mu|U_n`` for ``D_n``.

    Checks ``mu(x) = D_n(x, y) mu(y)`` for every ``(x, y)`` in ``R_n``.
    When level sets are given, pinned (infinite) classes must also be null:
    along an infinite class the pair identities force zero mass.
    """
    rep = QiReport("qi_direct", level=n, tolerance=tol)
    w = restrict(mu, g.mask(n), DOMAIN).weights
    same = g.same_class(n)
    hn = np.where(g.mask(n), ct.h_level(n), 0.0)
    D = np.exp(hn[:, None] - hn[None, :])
    lhs = np.broadcast_to(w[:, None], same.shape)
    rhs = D * w[None, :]
    ok = _close(lhs, rhs, tol) | ~same
    if ok.all():
        rep.record("pair_identity", True)
    else:
        x, y = np.argwhere(~ok)[0]
        rep.record("pair_identity", False,
                   {"pair": [g.points[x], g.points[y]],
                    "values": [float(lhs[x, y]), float(rhs[x, y])]})
    if ls is not None:
        zmass = w[ls.z(n)]
        if (zmass > 0).any():
            i = int(np.flatnonzero(ls.z(n) & (w > 0))[0])
            rep.record("null_on_Z", False, {"point": g.points[i], "mass": float(w[i])})
        else:
            rep.record("null_on_Z", True)
    return rep


def _embed(M, idx, N):
    out = np.zeros((N, N))
    out[np.ix_(idx, idx)] = M
    return out


def _class_feasible_nu(g, ct, ls, w, n, tol):
    """Decide whether some nu reproduces ``w`` as ``E_rho^*(nu)`` at level n.

    On each class ``C`` this needs ``w/rho_n`` constant on ``C``; on a pinned
    class the constant must be zero for ``zeta_n`` to be nu-integrable.
    Returns ``(ok, witness)``.
    """
    rho = ct.rho_level(n)
    z = ls.z(n)
    for cls in g.classes(n):
        ratio = w[cls] / rho[cls]
        if not _close(ratio, np.full(len(ratio), ratio[0]), tol).all():
            j = int(np.argmax(np.abs(ratio - ratio[0])))
            return False, {"class": g.points[cls[0]], "point": g.points[cls[j]]}
        if z[cls[0]] and ratio[0] > 0:
            return False, {"class": g.points[cls[0]], "reason": "pinned class with mass"}
    return True, None


def check_main_result(g: GapStructure, ct: CocycleTable, ls: LevelSets,
                      mu: Measure, n: int, tol=DEFAULT_TOL) -> QiReport:
    """Evaluate the five equivalent quasi-invariance conditions at level ``n``.

    (i) pairwise quasi-invariance; (ii) symmetry
    ``int f E(rho g) dmu = int E(rho f) g dmu``; (iii) ``int f zeta dmu =
    int E(rho f) dmu``; (iv) ``int f dmu = int E(f rho / zeta) dmu``;
    (v) some nu with finite ``int zeta dnu`` and ``mu = E_rho^*(nu)``.
    All five must agree, and a passing measure must vanish on ``Z_n``;
    anything else raises :class:`InconsistentVerdicts`.
    """
    rep = QiReport("main_result", level=n, tolerance=tol)
    N = g.n_points
    un = g.mask(n)
    w = restrict(mu, un, DOMAIN).weights
    # past the end of the domain chain U_n is empty and every condition is vacuous
    zeta_n = np.where(un, ls.zeta.values[n], 0.0) if n <= ls.depth else np.zeros(N)

    # (i)
    direct = check_qi_direct(g, ct, mu, n, ls, tol)
    rep.record("i_quasi_invariant", direct.verdict,
               direct.witnesses[0] if direct.witnesses else None)

    # K[:, b] = E(rho * 1_b), the E_rho kernel
    K, kidx = LevelOperator("E_rho", n, g, ct).matrix()
    K = _embed(K, kidx, N)

    # (ii) f = 1_a, g = 1_b; a pinned class stands in for an infinite one,
    # on which the symmetric identity only holds for the zero measure
    lhs = w[:, None] * K
    rhs = K.T * w[None, :]
    ok = _close(lhs, rhs, tol)
    charged = ls.z(n) & (w > 0)
    if charged.any():
        a = int(np.flatnonzero(charged)[0])
        rep.record("ii_symmetry", False, {"point": g.points[a], "reason": "mass on Z"})
    elif ok.all():
        rep.record("ii_symmetry", True)
    else:
        a, b = np.argwhere(~ok)[0]
        rep.record("ii_symmetry", False, {"pair": [g.points[a], g.points[b]],
                                          "values": [float(lhs[a, b]), float(rhs[a, b])]})

    # (iii) f = 1_a
    lhs = ext_mul(zeta_n, w)
    rhs = K.T @ w
    ok = _close(lhs, rhs, tol) | ~un
    if ok.all():
        rep.record("iii_harmonic", True)
    else:
        a = int(np.argwhere(~ok)[0][0])
        rep.record("iii_harmonic", False, {"point": g.points[a],
                                           "values": [float(lhs[a]), float(rhs[a])]})

    # (iv) f = 1_a
    # rhs[a] = int Q(1_a) dmu
    M, midx = LevelOperator("Q", n, g, ct, ls).matrix()
    rhs = _embed(M, midx, N).T @ w
    ok = _close(w, rhs, tol) | ~un
    if ok.all():
        rep.record("iv_fixed_point", True)
    else:
        a = int(np.argwhere(~ok)[0][0])
        rep.record("iv_fixed_point", False, {"point": g.points[a],
                                             "values": [float(w[a]), float(rhs[a])]})

    # (v)
    feasible, wit = _class_feasible_nu(g, ct, ls, w, n, tol)
    nu = Measure(ext_mul(zeta_inverse(ls, n), w))
    integral = float(ext_mul(zeta_n, nu.weights).sum())
    rebuilt = LevelOperator("E_rho", n, g, ct).dual(nu).weights
    built_ok = np.isfinite(integral) and bool((_close(rebuilt, w, tol) | ~un).all())
    if feasible != built_ok:
        raise InconsistentVerdicts(
            f"level {n}: class feasibility says {feasible} but nu = mu/zeta gives {built_ok}")
    rep.record("v_built", feasible, wit)
    rep.details["nu_from_mu"] = nu.weights
    rep.details["int_zeta_dnu"] = integral

    values = [rep.verdicts[k] for k in ("i_quasi_invariant", "ii_symmetry",
                                        "iii_harmonic", "iv_fixed_point", "v_built")]
    if len(set(values)) != 1:
        raise InconsistentVerdicts(f"level {n}: verdicts disagree {rep.verdicts}")
    mass_z = float(w[ls.z(n)].sum())
    rep.details["mu_Z"] = mass_z
    if values[0] and mass_z > 0:
        raise InconsistentVerdicts(f"level {n}: quasi-invariant measure charges Z_{n}")
    return rep


def construct_qi_from_nu(g: GapStructure, ct: CocycleTable, nu: Measure, n: int,
                         ls: LevelSets | None = None) -> Measure:
    """``mu = E_{rho_n}^*(nu)``, quasi-invariant at level ``n``.

    Its mass is ``int zeta_n dnu``.  ``nu`` charging a pinned set makes
    ``zeta_n`` non-integrable and raises :class:`ZetaNotIntegrable`.
    """
    if ls is not None and (np.asarray(nu.weights)[ls.z(n)] > 0).any():
        raise ZetaNotIntegrable(f"nu charges Z_{n}, where zeta_{n} is infinite")
    return LevelOperator("E_rho", n, g, ct).dual(Measure(nu.weights))


def p_star(g: GapStructure, ct: CocycleTable, ls: LevelSets, n: int,
           nu: Measure) -> Measure:
    """``P_{rho_n}^*`` on a measure living on ``U_n`` (domain-restricted first)."""
    return LevelOperator("P", n, g, ct, ls).dual(restrict(nu, g.mask(n), DOMAIN))


# -- all levels ---------------------------------------------------------------

def check_main_for_q(g: GapStructure, ct: CocycleTable, ls: LevelSets,
                     mu: Measure, depth: int | None = None,
                     tol=DEFAULT_TOL) -> QiReport:
    """``Q_n^*(mu) = 1_{U_n} mu`` for every ``n <= depth``.

    Each level is cross-checked against ``P_{rho_n}^*(mu|U_n) = mu|U_n``
    through ``Q_n^*(mu)|U_n = P_{rho_n}^*(mu|U_n)``.
    """
    depth = g.depth if depth is None else depth
    rep = QiReport("main_for_q", level="all", tolerance=tol, truncation_depth=depth)
    mu = Measure(mu.weights)
    for n in range(depth + 1):
        un = g.mask(n)
        q = LevelOperator("Q", n, g, ct, ls).dual(mu)
        target = restrict(mu, un, INDICATOR)
        ok_q = measures_close(q, target, tol)
        rep.record(f"level_{n}", ok_q, None if ok_q else
                   {"level": n, **_worst_point(q, target, g.points)})
        p = p_star(g, ct, ls, n, mu)
        same = measures_close(restrict(q, un, DOMAIN), p, tol)
        if not same:
            raise InconsistentVerdicts(f"Q_{n}^*(mu)|U_{n} differs from P^*(mu|U_{n})")
        ok_p = measures_close(p, restrict(mu, un, DOMAIN), tol)
        if ok_p != ok_q:
            raise InconsistentVerdicts(f"level {n}: projector forms disagree")
    return rep


@dataclass(frozen=True, eq=False)
class PartitionXWZ:
    """``V_n = U_n - U_{n+1}`` (``n < depth``), ``V_inf = U_depth``,
    ``Z = union Z_n`` and ``W_k = V_k - Z``."""

    depth: int
    V: tuple
    Vinf: np.ndarray
    Z: np.ndarray
    W: tuple
    Winf: np.ndarray
    report: ValidationReport

    def w(self, k):
        if k == "inf":
            return self.Winf
        return self.W[k]


def _is_R_invariant(g, mask, depth):
    for n in range(depth + 1):
        same = g.same_class(n)
        viol = same & (mask[:, None] != mask[None, :])
        if viol.any():
            x, y = np.argwhere(viol)[0]
            return False, {"level": n, "pair": [g.points[x], g.points[y]]}
    return True, None


def partition_xwz(g: GapStructure, ls: LevelSets, depth: int | None = None) -> PartitionXWZ:
    depth = g.depth if depth is None else depth
    N = g.n_points
    V = tuple(g.mask(n) & ~g.mask(n + 1) for n in range(depth))
    Vinf = g.mask(depth).copy()
    Z = np.zeros(N, bool)
    for n in range(min(depth, ls.depth) + 1):
        Z |= ls.z(n)
    W = tuple(v & ~Z for v in V)
    Winf = Vinf & ~Z

    rep = ValidationReport("partition_xwz")
    pieces = [Z, *W, Winf]
    count = np.sum(pieces, axis=0)
    bad = count != 1
    rep.record("disjoint_cover", not bad.any(),
               {"point": g.points[int(np.argmax(bad))]} if bad.any() else None)
    named = [(f"U_{n}", g.mask(n)) for n in range(depth + 1)]
    named += [(f"V_{n}", v) for n, v in enumerate(V)] + [("V_inf", Vinf)]
    named += [(f"W_{n}", w) for n, w in enumerate(W)] + [("W_inf", Winf), ("Z", Z)]
    for name, mask in named:
        ok, wit = _is_R_invariant(g, mask, depth)
        rep.record("R_invariant", ok, {"set": name, **(wit or {})})
    rep.notes.append(f"V_inf and W_inf are taken at truncation depth {depth}")
    return PartitionXWZ(depth, V, Vinf, Z, W, Winf, rep)


def check_charac_dlr(g: GapStructure, ct: CocycleTable, ls: LevelSets,
                     mu: Measure, depth: int | None = None,
                     tol=DEFAULT_TOL) -> QiReport:
    """(i) ``mu(Z) = 0``; (ii) ``Q_k^*(mu_k) = mu_k`` for ``1 <= k < depth``;
    (iii) ``Q_i^*(mu_inf) = mu_inf`` for ``1 <= i <= depth``.

    The verdict must match :func:`check_main_for_q`.
    """
    depth = g.depth if depth is None else depth
    part = partition_xwz(g, ls, depth)
    rep = QiReport("charac_dlr", level="all", tolerance=tol, truncation_depth=depth)
    mu = Measure(mu.weights)
    total = mu.mass()
    zmass = mu.mass(part.Z)
    rep.record("i_null_on_Z", zmass <= tol * total,
               {"mass": zmass, "points": [g.points[i] for i in np.flatnonzero(part.Z & (mu.weights > 0))]})
    for k in range(1, depth):
        mk = restrict(mu, part.W[k], INDICATOR)
        q = LevelOperator("Q", k, g, ct, ls).dual(mk)
        ok = measures_close(q, mk, tol)
        rep.record("ii_finite_pieces", ok, None if ok else
                   {"k": k, **_worst_point(q, mk, g.points)})
    rep.verdicts.setdefault("ii_finite_pieces", True)
    minf = restrict(mu, part.Winf, INDICATOR)
    for i in range(1, depth + 1):
        q = LevelOperator("Q", i, g, ct, ls).dual(minf)
        ok = measures_close(q, minf, tol)
        rep.record("iii_infinite_piece", ok, None if ok else
                   {"i": i, **_worst_point(q, minf, g.points)})
    rep.verdicts.setdefault("iii_infinite_piece", True)
    other = check_main_for_q(g, ct, ls, mu, depth, tol)
    if other.verdict != rep.verdict:
        raise InconsistentVerdicts(
            f"charac_dlr says {rep.verdict} but main_for_q says {other.verdict}")
    return rep


def _as_probability(seed: Measure) -> Measure:
    return Measure(seed.weights).normalized()


def construct_qi_on_wn(g: GapStructure, ct: CocycleTable, ls: LevelSets, n: int,
                       seed: Measure | None = None, depth: int | None = None) -> Measure:
    """Quasi-invariant probability measure living in ``W_n``: ``Q_n^*(seed)``."""
    depth = g.depth if depth is None else depth
    if not 0 <= n < depth:
        raise BadLevels(f"finite pieces are W_0..W_{depth - 1}, got {n}")
    part = partition_xwz(g, ls, depth)
    wn = part.W[n]
    if not wn.any():
        raise EmptyWn(f"W_{n} is empty")
    if seed is None:
        seed = Measure.dirac(g.n_points, int(np.flatnonzero(wn)[0]))
    if not seed.lives_in(wn):
        raise NotInvariantK(f"seed does not live in W_{n}")
    seed = _as_probability(seed)
    return LevelOperator("Q", n, g, ct, ls).dual(seed)


def construct_qi_on_winf(g: GapStructure, ct: CocycleTable, ls: LevelSets,
                         seed: Measure | None = None, tol=DEFAULT_TOL,
                         depth: int | None = None) -> Measure:
    """Iterate ``mu_n = Q_n^*(seed)`` up to the truncation depth.

    Returns ``mu_depth``.  If the last step still moves by more than ``tol``
    in total variation, :class:`NoConvergence` is raised with
    ``result = (mu_depth, distances)``.  The limit-point argument of the
    infinite case has no finite analogue, so only this is certified.
    """
    depth = g.depth if depth is None else depth
    part = partition_xwz(g, ls, depth)
    K = part.Winf
    if not K.any():
        raise EmptyWinf("W_inf is empty at this depth")
    ok, _ = _is_R_invariant(g, K, depth)
    if not ok:
        raise NotInvariantK("W_inf is not R-invariant")
    if seed is None:
        seed = Measure.dirac(g.n_points, int(np.flatnonzero(K)[0]))
    if not seed.lives_in(K):
        raise NotInvariantK("seed does not live in W_inf")
    seed = _as_probability(seed)
    current = seed
    distances = []
    for n in range(1, depth + 1):
        nxt = LevelOperator("Q", n, g, ct, ls).dual(seed)
        distances.append(total_variation(nxt, current))
        current = nxt
    if distances and distances[-1] >= tol:
        raise NoConvergence(
            f"Q_n^*(seed) still moves by {distances[-1]:.3g} at depth {depth}",
            result=(current, distances))
    return current


def check_conformal(model: SpaceModel, h, mu: Measure, depth: int,
                    ls: LevelSets | None = None, tol=DEFAULT_TOL) -> QiReport:
    """Pairwise quasi-invariance for ``exp(b)`` on the truncated groupoid.

    Every triple ``(x, n, y)`` with witnesses ``k, l <= depth`` must satisfy
    ``mu(x) = exp(b(x, n, y)) mu(y)``.  The value of ``b`` is required to
    agree across all witnesses of a triple.
    """
    rep = QiReport("conformal", level="all", tolerance=tol, truncation_depth=depth)
    rep.notes.append(f"groupoid truncated to witnesses k, l <= {depth}")
    S = birkhoff_sums(model, h_array(model, h), depth)
    w = np.asarray(mu.weights, float)
    table = groupoid_witnesses(model, depth)
    for elem in sorted(table):
        x, lag, y = elem
        vals = [S[k, x] - S[l, y] for k, l in table[elem]]
        b = vals[0]
        spread = max(vals) - min(vals)
        rep.record("witness_independent", spread <= 1e-10 * (1 + abs(b)),
                   {"element": [model.points[x], lag, model.points[y]], "spread": spread})
        lhs, rhs = w[x], np.exp(b) * w[y]
        ok = bool(_close(lhs, rhs, tol))
        rep.record("pair_identity", ok,
                   {"element": [model.points[x], lag, model.points[y]],
                    "values": [float(lhs), float(rhs)]})
    rep.verdicts.setdefault("pair_identity", True)
    rep.details["n_elements"] = len(table)
    if ls is not None:
        zm = np.zeros(model.n_points, bool)
        for n in range(ls.depth + 1):
            zm |= ls.z(n)
        bad = zm & (w > 0)
        rep.record("null_on_Z", not bad.any(),
                   {"point": model.points[int(np.argmax(bad))]} if bad.any() else None)
    return rep
