import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from gapqi.errors import CocycleMismatch, InvalidWitness, MissingPotentialValue
from gapqi.gap import GroupoidElement, gap_from_partitions, gap_from_sigma, groupoid_witnesses
from gapqi.instances import m0, random_model
from gapqi.potential import (Potential, birkhoff_sums, build_cocycle, potential_from_h,
                             rd_cocycle_value, validate_potential)
from gapqi.space import SpaceModel

import oracles

LN2 = math.log(2)


def test_potential_from_h_m0():
    model, h = m0()
    p = potential_from_h(model, h, 2)
    assert p.k[1][1] == LN2 and p.k[1][2] == 0 and p.k[1][3] == 0
    assert p.k[2][3] == LN2
    assert potential_from_h(model, h, 0).k == {}


def test_missing_h():
    model = SpaceModel.from_mapping(["a", "b"], {"a": "b"})
    with pytest.raises(MissingPotentialValue):
        potential_from_h(model, {}, 1)


def test_cocycle_m0():
    model, h = m0()
    g = gap_from_sigma(model, 3)
    p = potential_from_h(model, h, 3)
    assert validate_potential(g, p).ok
    ct = build_cocycle(g, p)
    assert ct.h_level(1)[1] == LN2
    assert ct.rho_level(1)[1] == pytest.approx(2.0, rel=1e-15)
    assert ct.rho_level(1)[2] == 1.0
    assert ct.c(1, 1, 2) == LN2 and ct.D(1, 1, 2) == pytest.approx(2.0)
    assert all(ct.c(n, x, x) == 0 for n in range(3) for x in np.flatnonzero(g.mask(n)))


def test_bad_potential_fails_with_witness():
    # R_1 = {0,1,2} on U_1; U_2 = {0,1}; k_2 differs on the R_1 pair (0, 1)
    g = gap_from_partitions(range(3), [[[0, 1, 2]], [[0], [1]]])
    k1 = np.zeros(3)
    k2 = np.array([0.0, 1.0, np.nan])
    rep = validate_potential(g, Potential({1: k1, 2: k2}))
    assert not rep.checks["potential_invariance"]
    assert rep.witnesses["potential_invariance"]["pair"] == ["0", "1"]


def test_level_one_potential_always_passes():
    g = gap_from_partitions(range(3), [[[0, 1, 2]]])
    assert validate_potential(g, Potential({1: np.array([0.0, 5.0, -1.0])})).ok


def test_gluing_mismatch():
    # a pair in R_1 and R_2 whose cocycles disagree
    g = gap_from_partitions(range(2), [[[0, 1]], [[0, 1]]])
    p = Potential({1: np.array([0.0, 0.0]), 2: np.array([1.0, 0.0])})
    with pytest.raises(CocycleMismatch) as exc:
        build_cocycle(g, p)
    assert exc.value.witness["pair"] == ["0", "1"]


def test_rd_cocycle_examples():
    model, h = m0()
    assert rd_cocycle_value(model, h, GroupoidElement(2, 0, 2), 0, 0) == 0.0
    assert rd_cocycle_value(model, h, GroupoidElement(1, 0, 2), 1, 1) == LN2
    assert rd_cocycle_value(model, h, GroupoidElement(3, 1, 1), 1, 0) == 0.0
    with pytest.raises(InvalidWitness):
        rd_cocycle_value(model, h, GroupoidElement(1, 0, 3), 1, 1)


@given(st.integers(0, 10**6), st.integers(1, 25), st.sampled_from([0.3, 0.6, 0.9]),
       st.integers(0, 6))
def test_h_levels_match_birkhoff_oracle(seed, n, density, depth):
    model, h = random_model(np.random.default_rng(seed), n, density)
    sig = oracles.sigma_dict(model)
    g = gap_from_sigma(model, depth)
    p = potential_from_h(model, h, g.depth)
    assert validate_potential(g, p).ok
    ct = build_cocycle(g, p)
    S = birkhoff_sums(model, h, g.depth)
    for k in range(g.depth + 1):
        for x in np.flatnonzero(g.mask(k)):
            want = oracles.hn(sig, h, x, k)
            assert ct.h_level(k)[x] == pytest.approx(want, rel=1e-12, abs=1e-12)
            assert S[k, x] == pytest.approx(want, rel=1e-12, abs=1e-12)


@given(st.integers(0, 10**6), st.integers(1, 12), st.integers(0, 4))
def test_rd_cocycle_witness_independent(seed, n, depth):
    model, h = random_model(np.random.default_rng(seed), n, 0.9)
    sig = oracles.sigma_dict(model)
    for elem, wits in groupoid_witnesses(model, depth).items():
        x, lag, y = elem
        vals = [rd_cocycle_value(model, h, elem, k, l, depth) for k, l in wits]
        ref = oracles.hn(sig, h, x, wits[0][0]) - oracles.hn(sig, h, y, wits[0][1])
        assert max(vals) - min(vals) <= 1e-10
        assert vals[0] == pytest.approx(ref, abs=1e-12)
