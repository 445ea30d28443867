"""
Eigenmeasures of the transfer operator
======================================

The weighted transfer operator ``L_rho f(x) = sum_{sigma t = x} rho(t) f(t)``
has a dual acting on measures.  Its eigenmeasures are DLR, and the solver
verifies that in three layers.
"""

import numpy as np

from gapqi import (SpaceModel, build_instance, solve_eigenmeasure, two_shift,
                   verify_eigen_dlr)
from gapqi.errors import NoConvergence

# %%
# A 3-cycle with two extra points feeding into it.  The cycle carries the
# eigenmeasure; ``shift=1`` damps the period-3 oscillation of plain power
# iteration without changing eigenvectors.
model = SpaceModel.from_mapping(list("abcde"), {"a": "b", "b": "c", "c": "a",
                                                "d": "a", "e": "d"})
h = np.log([2.0, 1.0, 0.5, 1.0, 1.0])
inst = build_instance(model, h, depth=4)
res = solve_eigenmeasure(model, inst.ct, tol=1e-13, shift=1.0)
print("lambda:", res.lam, "| mu:", np.round(res.mu.weights, 6), "| residual:", res.residual)

# %%
# Half-step identity with ``lambda^n``, the class balance and the full DLR
# criterion are each checked up to the truncation depth.
rep = verify_eigen_dlr(model, inst.ct, inst.gap, res.mu, res.lam, 4, 1e-8)
print(rep.verdicts)

# %%
# Words of bounded length over two letters, with ``sigma`` dropping the
# first letter, form a tree with no cycles.  Its transfer matrix is
# nilpotent, so the iteration runs out of mass instead of converging.
model, h = two_shift(4)
inst = build_instance(model, h, depth=1)
try:
    solve_eigenmeasure(model, inst.ct)
except NoConvergence as exc:
    print("two-letter words:", exc)
