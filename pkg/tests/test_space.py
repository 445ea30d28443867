import numpy as np
import pytest
from hypothesis import given, strategies as st

from gapqi.errors import OutsideDomain, UnknownId
from gapqi.instances import m0, random_model
from gapqi.space import SpaceModel, build_domain_chain, iterate, iterate_all

import oracles


def test_m0_chain():
    model, _ = m0()
    chain = build_domain_chain(model, 2)
    assert [chain.members(n).tolist() for n in range(3)] == [[0, 1, 2, 3], [1, 2, 3], [3]]
    chain = build_domain_chain(model, 3)
    assert chain.members(3).tolist() == []
    assert build_domain_chain(model, 0).members(0).tolist() == [0, 1, 2, 3]


def test_iterate_examples():
    model, _ = m0()
    assert iterate(model, "3", 2) == "0"
    assert iterate(model, "2", 0) == "2"
    with pytest.raises(OutsideDomain):
        iterate(model, "0", 1)


def test_unknown_ids():
    with pytest.raises(UnknownId):
        SpaceModel.from_mapping(["a"], {"a": "b"})
    model, _ = m0()
    with pytest.raises(UnknownId):
        model.idx("nope")


@given(st.integers(0, 10**6), st.integers(1, 40), st.sampled_from([0.3, 0.6, 0.9]),
       st.integers(0, 8))
def test_chain_matches_orbit_oracle(seed, n, density, depth):
    model, _ = random_model(np.random.default_rng(seed), n, density)
    sig = oracles.sigma_dict(model)
    chain = build_domain_chain(model, depth)
    for k in range(depth + 1):
        want = oracles.U(sig, n, k)
        assert set(chain.members(k).tolist()) == want
        img = iterate_all(model, k)
        for x in range(n):
            assert (img[x] if img[x] >= 0 else None) == oracles.power(sig, x, k)
        if k:
            assert not (chain.mask(k) & ~chain.mask(k - 1)).any()
