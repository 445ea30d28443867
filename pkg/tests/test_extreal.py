import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from gapqi.errors import InverseOfZero
from gapqi.extreal import INF, ZERO, ExtReal, add, ext_inv, ext_mul, ext_sum, inv, mul

ext = st.one_of(st.just(math.inf), st.just(0.0),
                st.floats(min_value=0, max_value=1e12, allow_nan=False))


def test_add_examples():
    assert add(2, 3) == ExtReal(5)
    assert add(INF, 0) == INF
    assert add(0, 0) == ZERO


def test_mul_examples():
    assert mul(0, INF) == ZERO
    assert mul(INF, 0) == ZERO
    assert mul(INF, 2) == INF
    assert mul(3, 4) == ExtReal(12)


def test_inv_examples():
    assert inv(INF) == ZERO
    assert inv(2) == ExtReal(0.5)
    with pytest.raises(InverseOfZero):
        inv(0)


def test_rejects_negative_and_nan():
    with pytest.raises(ValueError):
        ExtReal(-1)
    with pytest.raises(ValueError):
        ExtReal(float("nan"))


def test_ordering_and_str():
    assert ExtReal(1) < INF and not INF < INF
    assert str(INF) == "inf" and float(INF) == math.inf


@given(ext, ext)
def test_scalar_commutes(a, b):
    assert add(a, b) == add(b, a)
    assert mul(a, b) == mul(b, a)


@given(ext, ext, ext)
def test_mul_distributes_over_add(a, b, c):
    lhs = float(mul(a, add(b, c)))
    rhs = float(add(mul(a, b), mul(a, c)))
    assert lhs == pytest.approx(rhs, rel=1e-12) or lhs == rhs


@given(st.lists(ext, min_size=1, max_size=8), st.lists(ext, min_size=1, max_size=8))
def test_array_mul_matches_scalar(xs, ys):
    n = min(len(xs), len(ys))
    got = ext_mul(xs[:n], ys[:n])
    want = [float(mul(a, b)) for a, b in zip(xs[:n], ys[:n])]
    assert not np.isnan(got).any()
    np.testing.assert_array_equal(got, want)


def test_array_inv_and_sum():
    a = np.array([2.0, np.inf, 0.0])
    np.testing.assert_array_equal(ext_inv(a, where=[True, True, False]), [0.5, 0.0, 0.0])
    with pytest.raises(InverseOfZero):
        ext_inv(a)
    assert ext_sum([1.0, np.inf]) == np.inf
