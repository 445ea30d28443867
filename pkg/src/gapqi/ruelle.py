"""Transfer operators of a partial map and conformal eigenmeasures.

``L_n(f)(x) = sum_{sigma^n t = x} f(t)``, ``alpha_n(g) = g o sigma^n`` on
``U_n``, and the weighted ``L_{rho,n}(f) = L_n(rho_n f)`` whose dual is
``nu -> rho_n(t) nu(sigma^n t)`` on ``U_n``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BadLevels, NoConvergence, ZeroStartMass
from .gap import GapStructure
from .measures import Measure, restrict, INDICATOR, total_variation
from .operators import expectation, level_sets, zeta_profile
from .potential import CocycleTable, h_array
from .qi import DEFAULT_TOL, check_main_for_q, measures_close
from .reports import QiReport
from .space import SpaceModel, iterate_all

__all__ = ["transfer_apply", "compose_alpha", "rho_product", "TransferOperator",
           "EigenResult", "solve_eigenmeasure", "probe_reducibility",
           "propagate_eigenmeasure", "check_class_balance", "verify_eigen_dlr"]


def transfer_apply(model: SpaceModel, n: int, f) -> np.ndarray:
    """``L_n(f)``: push ``f`` forward along ``sigma^n`` (finite fibers)."""
    f = np.asarray(f, float)
    img = iterate_all(model, n)
    ok = img >= 0
    out = np.zeros(model.n_points)
    np.add.at(out, img[ok], f[ok])
    return out


def compose_alpha(model: SpaceModel, n: int, g) -> np.ndarray:
    """``alpha_n(g) = g o sigma^n`` on ``U_n``, zero elsewhere."""
    g = np.asarray(g, float)
    img = iterate_all(model, n)
    ok = img >= 0
    return np.where(ok, g[np.where(ok, img, 0)], 0.0)


def rho_product(model: SpaceModel, h, n: int) -> np.ndarray:
    """``rho alpha(rho) ... alpha_{n-1}(rho)`` on ``U_n`` with ``rho = exp(h)``.

    Computed multiplicatively, independent of the additive accumulation used
    by :class:`CocycleTable`, against which it is cross-checked.
    """
    rho = np.nan_to_num(np.exp(h_array(model, h)), nan=0.0)
    out = np.ones(model.n_points)
    for j in range(n):
        out = out * compose_alpha(model, j, rho)
    return np.where(iterate_all(model, n) >= 0, out, 0.0)


@dataclass(frozen=True, eq=False)
class TransferOperator:
    """``kind`` is ``"L"``, ``"L_rho"`` or ``"alpha"`` at power ``level``."""

    kind: str
    level: int
    model: SpaceModel
    ct: CocycleTable | None = None

    def __post_init__(self):
        if self.kind not in ("L", "L_rho", "alpha"):
            raise ValueError(f"unknown transfer operator {self.kind!r}")
        if self.kind == "L_rho" and self.ct is None:
            raise ValueError("L_rho needs a cocycle table")
        if self.kind == "L_rho" and self.level > self.ct.depth:
            raise BadLevels(f"cocycle table only reaches level {self.ct.depth}")

    def _weight(self):
        if self.kind == "L_rho":
            return self.ct.rho_level(self.level)
        return (iterate_all(self.model, self.level) >= 0).astype(float)

    def apply(self, f):
        if self.kind == "alpha":
            return compose_alpha(self.model, self.level, f)
        return transfer_apply(self.model, self.level, self._weight() * np.asarray(f, float))

    def dual(self, nu: Measure) -> Measure:
        """``L^*(nu)(t) = w(t) nu(sigma^n t)``; ``alpha^*`` is the pushforward."""
        w = np.asarray(nu.weights, float)
        if self.kind == "alpha":
            return Measure(transfer_apply(self.model, self.level, w))
        return Measure(compose_alpha(self.model, self.level, w) * self._weight())

    def matrix(self):
        """``M`` with ``T(f)(x) = sum_t M[x, t] f(t)``; returns ``(M, index)``."""
        N = self.model.n_points
        img = iterate_all(self.model, self.level)
        M = np.zeros((N, N))
        t = np.flatnonzero(img >= 0)
        if self.kind == "alpha":
            M[t, img[t]] = 1.0
        else:
            M[img[t], t] = self._weight()[t]
        return M, np.arange(N)


@dataclass
class EigenResult:
    lam: float
    mu: Measure
    residual: float
    iterations: int
    converged: bool
    shift: float = 0.0
    history: list = field(default_factory=list, repr=False)

    def to_dict(self, model):
        return {"lambda": self.lam, "mu": self.mu.as_dict(model),
                "residual": self.residual, "iterations": self.iterations,
                "converged": self.converged, "shift": self.shift}


def solve_eigenmeasure(model: SpaceModel, ct: CocycleTable, start: Measure | None = None,
                       tol: float = 1e-10, max_iter: int = 100_000,
                       shift: float = 0.0) -> EigenResult:
    """Power iteration for ``L_rho^* mu = lambda mu`` on ``U``.

    Iterates ``nu <- (L_rho^* nu + shift nu) / mass`` from ``start`` (uniform
    by default) until successive iterates are within ``tol`` in total
    variation.  ``lambda`` is the mass of ``L_rho^* mu`` for the normalized
    limit ``mu``.  A positive ``shift`` damps periodic oscillation without
    changing eigenvectors.  Mass running out (an acyclic map, whose transfer
    operator is nilpotent) or the iteration cap raise :class:`NoConvergence`
    with the partial :class:`EigenResult` attached.
    """
    if ct.depth < 1:
        raise BadLevels("the cocycle table must reach level 1")
    L = TransferOperator("L_rho", 1, model, ct)
    N = model.n_points
    nu = Measure(np.full(N, 1.0 / N)) if start is None else Measure(start.weights)
    if nu.mass() <= 0:
        raise ZeroStartMass("the starting measure has zero mass")
    nu = nu.normalized()

    def result(nu, it, converged):
        lnu = L.dual(nu)
        lam = lnu.mass()
        res = total_variation(lnu, nu.scaled(lam))
        return EigenResult(lam, nu, res, it, converged, shift)

    rho = ct.rho_level(1)
    dom = model.domain
    src = np.where(dom, model.sigma, 0)
    cur = nu.weights.copy()
    for it in range(1, max_iter + 1):
        w = np.where(dom, rho * cur[src], 0.0) + shift * cur
        mass = w.sum()
        if not mass > 1e-300:
            raise NoConvergence("iterates lost all mass: the weighted transfer "
                                "operator has no positive eigenvalue here",
                                result=result(Measure(cur), it, False))
        w /= mass
        step = np.abs(w - cur).sum()
        cur = w
        if step < tol:
            return result(Measure(cur), it, True)
    raise NoConvergence(f"no convergence after {max_iter} iterations",
                        result=result(Measure(cur), max_iter, False))


def probe_reducibility(model: SpaceModel, ct: CocycleTable, tol: float = 1e-10,
                       max_iter: int = 100_000, shift: float = 1.0) -> dict:
    """Restart the iteration from every Dirac mass and compare the limits.

    Distinct limits mean the eigenmeasure is not unique (the map is
    reducible).  Starts that fail to converge are listed separately.
    """
    limits, failed = [], []
    for i in range(model.n_points):
        try:
            r = solve_eigenmeasure(model, ct, Measure.dirac(model.n_points, i),
                                   tol, max_iter, shift)
        except NoConvergence:
            failed.append(model.points[i])
            continue
        limits.append((model.points[i], r))
    distinct = []
    for p, r in limits:
        if not any(measures_close(r.mu, q.mu, max(np.sqrt(tol), 1e-6)) for _, q in distinct):
            distinct.append((p, r))
    return {"n_limits": len(distinct), "reducible": len(distinct) > 1,
            "starts": [p for p, _ in distinct], "failed": failed,
            "eigenvalues": [r.lam for _, r in distinct]}


def propagate_eigenmeasure(model: SpaceModel, h, lam: float, base) -> Measure:
    """Solve ``rho(t) mu(sigma t) = lam mu(t)`` on ``U`` from free boundary mass.

    ``base`` gives the weights on ``X - U`` (array or point mapping); every
    point of ``U`` then gets ``mu(t) = rho(t) mu(sigma t) / lam``.  Requires
    every orbit to leave ``U`` (no periodic points); otherwise raises
    ``ValueError``.  With ``lam = 0`` only the zero extension is possible.
    """
    if lam <= 0:
        raise ValueError("lambda must be positive")
    N = model.n_points
    rho = np.nan_to_num(np.exp(h_array(model, h)), nan=0.0)
    if isinstance(base, dict):
        b = Measure.from_mapping(model, base).weights.copy()
    else:
        b = np.asarray(base, float).copy()
    b[model.domain] = 0.0
    mu = np.full(N, np.nan)
    mu[~model.domain] = b[~model.domain]
    for _ in range(N + 1):
        todo = np.isnan(mu)
        if not todo.any():
            return Measure(mu)
        nxt = np.where(todo, model.sigma, 0)
        ready = todo & ~np.isnan(mu[nxt])
        if not ready.any():
            break
        mu[ready] = rho[ready] * mu[nxt[ready]] / lam
    raise ValueError("sigma has periodic points: the boundary does not determine mu")


def check_class_balance(g: GapStructure, ct: CocycleTable, mu: Measure, n: int,
                        tol: float = DEFAULT_TOL) -> bool:
    """``int_{U_n} E_n(rho_n) f dmu = int_{U_n} E_n(rho_n f) dmu`` for all ``f``.

    On point indicators this reads ``zeta_n(t) mu(t) = rho_n(t) mu(R_n(t))``,
    compared as measures.  Only finite measures are handled.
    """
    rho = ct.rho_level(n)
    w = np.where(g.mask(n), np.asarray(mu.weights, float), 0.0)
    left = expectation(g, n, rho) * w
    right = rho * expectation(g, n, w)
    return measures_close(Measure(left), Measure(right), tol)


def verify_eigen_dlr(model: SpaceModel, ct: CocycleTable, g: GapStructure,
                     mu: Measure, lam: float, depth: int | None = None,
                     tol: float = DEFAULT_TOL) -> QiReport:
    """Layered check of an eigenmeasure of ``L_rho^*`` with eigenvalue ``lam``.

    (a) ``L_{rho,n}^* mu = lam^n 1_{U_n} mu``; (b) ``zeta_n(t) mu(t) =
    rho_n(t) mu(R_n(t))``; (c) the quasi-invariance criterion of
    :func:`check_main_for_q`.  Each layer implies the next, and the report
    fails if that chain is broken.
    """
    top = min(ct.depth, g.depth)
    depth = top if depth is None else depth
    rep = QiReport("eigen_dlr", level="all", tolerance=tol, truncation_depth=depth)
    if depth > top:
        # U_n is empty past the end of the chain, so every layer is vacuous there
        rep.notes.append(f"levels {top + 1}..{depth} have empty U_n")
        depth = top
    mu = Measure(mu.weights)
    ok_a, ok_b = True, True
    for n in range(depth + 1):
        lhs = TransferOperator("L_rho", n, model, ct).dual(mu) if n else mu
        rhs = restrict(mu, g.mask(n), INDICATOR).scaled(lam ** n)
        good = measures_close(lhs, rhs, tol)
        ok_a &= good
        rep.record("a_half_step", good, None if good else {"level": n})

        good = check_class_balance(g, ct, mu, n, tol)
        ok_b &= good
        rep.record("b_class_identity", good, None if good else {"level": n})
    ls = level_sets(zeta_profile(g, ct), g, ct)
    c = check_main_for_q(g, ct, ls, mu, depth, tol)
    rep.record("c_main_for_q", c.verdict, c.witnesses[0] if c.witnesses else None)
    chain = (not ok_a or ok_b) and (not ok_b or c.verdict)
    rep.record("implication_chain", chain, None if chain else
               {"a": ok_a, "b": ok_b, "c": c.verdict})
    rep.details["lambda"] = lam
    return rep
