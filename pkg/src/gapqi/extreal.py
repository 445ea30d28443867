"""Arithmetic on the extended half-line [0, +inf].

Multiplication follows the measure-theoretic convention ``0 * inf = 0``.
The scalar type :class:`ExtReal` keeps infinity as a separate tag, so no
IEEE ``nan`` can appear.  The array helpers (``ext_mul``, ``ext_inv``,
``ext_sum``) work on float arrays where ``np.inf`` plays the role of the
tag; every product in the operator code goes through ``ext_mul``.
"""

from __future__ import annotations

import math
from functools import total_ordering

import numpy as np

from .errors import InverseOfZero

__all__ = ["ExtReal", "INF", "ZERO", "add", "mul", "inv",
           "ext_mul", "ext_inv", "ext_sum", "as_array"]


@total_ordering
class ExtReal:
    """A value in [0, +inf].

    Parameters
    ----------
    value : float or ExtReal
        A nonnegative float.  ``math.inf`` is accepted and converted to the
        infinity tag.
    """

    __slots__ = ("_value", "_inf")

    def __init__(self, value=0.0):
        if isinstance(value, ExtReal):
            self._value, self._inf = value._value, value._inf
            return
        value = float(value)
        if math.isnan(value):
            raise ValueError("ExtReal cannot hold nan")
        if value < 0:
            raise ValueError(f"ExtReal must be nonnegative, got {value!r}")
        if math.isinf(value):
            self._value, self._inf = 0.0, True
        else:
            self._value, self._inf = value, False

    @classmethod
    def infinity(cls):
        obj = cls.__new__(cls)
        obj._value, obj._inf = 0.0, True
        return obj

    @property
    def is_inf(self):
        return self._inf

    @property
    def value(self):
        """The finite value; raises for infinity."""
        if self._inf:
            raise ValueError("infinite ExtReal has no finite value")
        return self._value

    def __float__(self):
        return math.inf if self._inf else self._value

    def __add__(self, other):
        return add(self, other)

    __radd__ = __add__

    def __mul__(self, other):
        return mul(self, other)

    __rmul__ = __mul__

    def __eq__(self, other):
        try:
            other = _coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        if self._inf or other._inf:
            return self._inf and other._inf
        return self._value == other._value

    def __lt__(self, other):
        other = _coerce(other)
        if self._inf:
            return False
        if other._inf:
            return True
        return self._value < other._value

    def __hash__(self):
        return hash(math.inf) if self._inf else hash(self._value)

    def __repr__(self):
        return "ExtReal(inf)" if self._inf else f"ExtReal({self._value!r})"

    def __str__(self):
        return "inf" if self._inf else repr(self._value)


def _coerce(x):
    return x if isinstance(x, ExtReal) else ExtReal(x)


INF = ExtReal.infinity()
ZERO = ExtReal(0.0)


def add(a, b):
    a, b = _coerce(a), _coerce(b)
    if a._inf or b._inf:
        return INF
    return ExtReal(a._value + b._value)


def mul(a, b):
    """Product with ``0 * inf = inf * 0 = 0``."""
    a, b = _coerce(a), _coerce(b)
    if (not a._inf and a._value == 0.0) or (not b._inf and b._value == 0.0):
        return ZERO
    if a._inf or b._inf:
        return INF
    return ExtReal(a._value * b._value)


def inv(a):
    """Reciprocal with ``1/inf = 0``; the reciprocal of zero is an error."""
    a = _coerce(a)
    if a._inf:
        return ZERO
    if a._value == 0.0:
        raise InverseOfZero("cannot invert zero in [0, inf]")
    return ExtReal(1.0 / a._value)


# -- vectorized helpers ------------------------------------------------------

def as_array(values):
    arr = np.asarray(values, dtype=float)
    if np.isnan(arr).any():
        raise ValueError("extended-real arrays cannot contain nan")
    if (arr < 0).any():
        raise ValueError("extended-real arrays must be nonnegative")
    return arr


def ext_mul(*factors):
    """Elementwise product of arrays where any zero factor forces zero."""
    arrays = np.broadcast_arrays(*[np.asarray(f, dtype=float) for f in factors])
    zero = np.zeros(arrays[0].shape, dtype=bool)
    out = np.ones(arrays[0].shape, dtype=float)
    for a in arrays:
        zero |= (a == 0.0)
    with np.errstate(invalid="ignore"):
        for a in arrays:
            out = out * a
    out[zero] = 0.0
    return out


def ext_inv(a, where=None):
    """Elementwise reciprocal; ``inf -> 0``.

    Entries outside the boolean mask ``where`` are set to zero without being
    inverted.  Zero entries inside the mask raise :class:`InverseOfZero`.
    """
    a = np.asarray(a, dtype=float)
    mask = np.ones(a.shape, dtype=bool) if where is None else np.asarray(where, bool)
    if (a[mask] == 0.0).any():
        raise InverseOfZero("cannot invert zero in [0, inf]")
    out = np.zeros(a.shape, dtype=float)
    with np.errstate(divide="ignore"):
        out[mask] = 1.0 / a[mask]
    return out


def ext_sum(values):
    """Sum in index order, absorbing at infinity."""
    total = 0.0
    for v in np.asarray(values, dtype=float).ravel():
        total += v
    return total
