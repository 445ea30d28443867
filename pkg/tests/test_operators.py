import math

import numpy as np
import pytest
from hypothesis import given, settings

from gapqi import build_instance, m0
from gapqi.extreal import ext_mul
from gapqi.errors import NonInvariantOverride, UnresolvedZeta
from gapqi.measures import Measure
from gapqi.operators import (FINITE, INFINITE, UNKNOWN, LevelOperator, class_sum,
                             expectation, export_matrix, is_invariant_function,
                             level_sets, projector, zeta_budgeted, zeta_profile)

from conftest import small_instances
import oracles


def override_inst():
    model, h = m0()
    return build_instance(model, h, 3, {1: [1, 2]})


def test_expectation_examples(m0_inst):
    g = m0_inst.gap
    np.testing.assert_array_equal(expectation(g, 1, [0, 1, 0, 0]), [0, 1, 1, 0])
    f = np.array([3.0, 1.0, 4.0, 1.5])
    np.testing.assert_array_equal(expectation(g, 0, f), f)
    assert expectation(g, 1, [0, np.inf, 0, 0]).tolist() == [0, np.inf, np.inf, 0]


def test_zeta_examples(m0_inst):
    zp = m0_inst.zp
    assert zp.at(1, 1).value == pytest.approx(3.0) and zp.at(1, 2).value == pytest.approx(3.0)
    assert zp.at(1, 3).value == 1.0
    assert (zp.values[0] == 1.0).all()
    assert zp.at(1, 0).status == -1


def test_level_sets_examples(m0_inst):
    ls = m0_inst.ls
    for n in range(4):
        assert not ls.z(n).any()
        np.testing.assert_array_equal(ls.y(n), m0_inst.gap.mask(n))
    ov = override_inst().ls
    assert np.flatnonzero(ov.z(1)).tolist() == [1, 2]
    assert np.flatnonzero(ov.y(1)).tolist() == [3]
    assert not ov.z(0).any()


def test_overrides_validated(m0_inst):
    model, h = m0()
    with pytest.raises(NonInvariantOverride):
        build_instance(model, h, 3, {1: [1]})
    with pytest.raises(NonInvariantOverride):
        build_instance(model, h, 3, {0: [0]})
    with pytest.raises(NonInvariantOverride):
        build_instance(model, h, 3, {1: [0]})


def test_projector_examples(m0_inst):
    g, ct, ls = m0_inst.gap, m0_inst.ct, m0_inst.ls
    q = projector(g, ct, ls, 1, np.ones(4))
    assert q[1] == pytest.approx(1.0) and q[0] == 0.0
    ov = override_inst()
    q = projector(ov.gap, ov.ct, ov.ls, 1, np.ones(4))
    assert q[1] == 0.0 and q[3] == 1.0


def test_dual_examples(m0_inst):
    g, ct, ls = m0_inst.gap, m0_inst.ct, m0_inst.ls
    nu = Measure(np.array([0.3, 0.1, 0.5, 0.1]))
    np.testing.assert_array_equal(LevelOperator("Q", 0, g, ct, ls).dual(nu).weights, nu.weights)
    e = LevelOperator("E_rho", 1, g, ct).dual(Measure.dirac(4, 1)).weights
    np.testing.assert_allclose(e, [0, 2, 1, 0], rtol=1e-15)
    assert LevelOperator("Q", 2, g, ct, ls).dual(Measure.zero(4)).mass() == 0


def test_budgeted_zeta():
    assert class_sum(iter([1.0, 2.0]), budget=5) == (FINITE, 3.0)
    assert class_sum((1.0 for _ in iter(int, 1)), budget=10) == (UNKNOWN, 10.0)
    assert class_sum([1.0, np.inf]).status == INFINITE
    model, h = m0()
    inst = build_instance(model, h, 2)
    vals, st_ = zeta_budgeted(lambda n, x: (1.0 for _ in iter(int, 1)), inst.gap, 1, 4)
    assert (st_[1:] == UNKNOWN).all() and vals[1] == 4.0
    with pytest.raises(UnresolvedZeta):
        level_sets(zeta_profile(inst.gap, inst.ct, budget=1))
    assert zeta_profile(inst.gap, inst.ct, budget=2).resolved


def test_export_matrix_format(m0_inst):
    T = LevelOperator("E_rho", 1, m0_inst.gap, m0_inst.ct)
    out = export_matrix(T, m0_inst.model.points)
    assert out["rows"] == ["0", "1", "2", "3"]
    assert out["entries"][1] == ["0.0", "2.0", "1.0", "0.0"]


RTOL = 1e-9


def close(a, b, rtol=RTOL):
    a, b = np.asarray(a, float), np.asarray(b, float)
    inf = np.isinf(a) | np.isinf(b)
    assert (a[inf] == b[inf]).all()
    np.testing.assert_allclose(a[~inf], b[~inf], rtol=rtol, atol=1e-300)


def rand_f(rng, N, with_inf=False):
    f = rng.exponential(size=N) * (rng.random(N) < 0.8)
    if with_inf and N:
        f[rng.integers(N)] = np.inf
    return f


@settings(max_examples=60)
@given(small_instances(overrides=True))
def test_zeta_and_kernels_match_oracle(case):
    inst, rng = case
    g, ct, ls = inst.gap, inst.ct, inst.ls
    N = g.n_points
    sig = oracles.sigma_dict(inst.model)
    pinned = frozenset(np.flatnonzero(ls.Zunion()).tolist())
    for n in range(g.depth + 1):
        z_or = oracles.zeta(sig, inst.h, N, n, pinned & set(np.flatnonzero(ls.z(n)).tolist()))
        for x, v in z_or.items():
            close([inst.zp.values[n][x]], [v])
        Zn = frozenset(np.flatnonzero(ls.z(n)).tolist())
        for kind in ("F", "E_rho", "Q"):
            T = LevelOperator(kind, n, g, ct, ls)
            M, idx = T.matrix()
            K = oracles.kernel(sig, inst.h, N, n, kind, Zn)
            np.testing.assert_allclose(M, K[np.ix_(idx, idx)], rtol=1e-12)
            f = rand_f(rng, N)
            close(T.apply(f), K @ f)
            nu = Measure(rng.exponential(size=N))
            close(T.dual(nu).weights, K.T @ nu.weights)


@settings(max_examples=60)
@given(small_instances(overrides=True))
def test_operator_laws(case):
    inst, rng = case
    g, ct, ls = inst.gap, inst.ct, inst.ls
    N = g.n_points
    D = g.depth
    for n in range(D + 1):
        un = g.mask(n)
        f, f2 = rand_f(rng, N, with_inf=True), rand_f(rng, N)
        # additivity with infinite entries, invariance, vanishing off U_n
        close(expectation(g, n, f + f2), expectation(g, n, f) + expectation(g, n, f2))
        for out in (expectation(g, n, f), projector(g, ct, ls, n, f)):
            assert is_invariant_function(g, n, out, tol=1e-12)
            assert (out[~un] == 0).all()
        # conditional-expectation law for invariant g
        inv = expectation(g, n, rng.exponential(size=N))
        close(expectation(g, n, inv * f2), inv * expectation(g, n, f2))
        close(projector(g, ct, ls, n, inv * f2), inv * projector(g, ct, ls, n, f2))
        # projector: idempotent, Q(1) = 1_Y, range vanishes on Z
        q = projector(g, ct, ls, n, f2)
        close(projector(g, ct, ls, n, q), q)
        close(projector(g, ct, ls, n, np.ones(N)), ls.y(n).astype(float))
        assert (q[ls.z(n)] == 0).all()
        # duals: Q* = 1_Y Q* = Q*(1_Y .), Q*(nu)(A) = nu(A & Y) for invariant A
        nu = Measure(rng.exponential(size=N))
        Q = LevelOperator("Q", n, g, ct, ls)
        qn = Q.dual(nu).weights
        close(qn, np.where(ls.y(n), qn, 0))
        close(qn, Q.dual(Measure(np.where(ls.y(n), nu.weights, 0))).weights)
        for cls in g.classes(n):
            A = np.zeros(N, bool)
            A[cls] = True
            assert qn[A].sum() == pytest.approx(nu.weights[A & ls.y(n)].sum(), rel=RTOL)
        for m in range(n, D + 1):
            Qm = LevelOperator("Q", m, g, ct, ls)
            qm = projector(g, ct, ls, m, f2)
            close(projector(g, ct, ls, m, projector(g, ct, ls, n, f2)), qm)
            close(projector(g, ct, ls, n, qm), qm)
            close(expectation(g, m, ext_mul(f2, expectation(g, n, f))),
                  expectation(g, m, ext_mul(expectation(g, n, f2), f)))
            qmd = Qm.dual(nu).weights
            close(Qm.dual(Q.dual(nu)).weights, qmd)
            close(Q.dual(Qm.dual(nu)).weights, qmd)
            # Y_m <= Y_n, Z_n & U_m <= Z_m
            assert not (ls.y(m) & ~ls.y(n)).any()
            assert not (ls.z(n) & g.mask(m) & ~ls.z(m)).any()
        # zeta growth
        if n >= 1:
            k = inst.potential.k[n]
            z, zprev = inst.zp.values[n], inst.zp.values[n - 1]
            for x in np.flatnonzero(un):
                assert z[x] >= math.exp(k[x]) * zprev[x] * (1 - RTOL)
