"""
Partition functions and projectors
==================================

A potential ``h`` on the domain accumulates along orbits into ``h_n``.  The
partition function ``zeta_n`` sums ``exp(h_n)`` over a class, and the
projector ``Q_n`` averages a function over each class with those weights.
"""

import numpy as np

from gapqi import LevelOperator, build_instance, m0, projector

# %%
# The four-point model from the first demo, with ``h(1) = ln 2``.
model, h = m0()
inst = build_instance(model, h, depth=3)
g, ct, ls, zp = inst.gap, inst.ct, inst.ls, inst.zp
print("rho_1 :", ct.rho_level(1))
print("zeta_1:", zp.values[1])

# %%
# ``Q_1`` maps the constant function to the indicator of the finite part
# ``Y_1`` and is idempotent.
one = np.ones(4)
print("Q_1(1):", projector(g, ct, ls, 1, one))
f = np.array([0.0, 3.0, 6.0, 1.0])
q = projector(g, ct, ls, 1, f)
print("Q_1(f):", q, "| Q_1(Q_1(f)):", projector(g, ct, ls, 1, q))

# %%
# Finite models only have finite class sums, so infinite ones are simulated
# by pinning invariant sets.  Pinning the class ``{1, 2}`` at level 1 makes
# ``zeta_1`` infinite there, and ``0 * inf = 0`` keeps the projector finite.
pinned = build_instance(model, h, depth=3, overrides={1: [1, 2]})
print("Z_1:", np.flatnonzero(pinned.ls.z(1)), "| Y_1:", np.flatnonzero(pinned.ls.y(1)))
print("Q_1(1) with pinning:", projector(pinned.gap, pinned.ct, pinned.ls, 1, one))

# %%
# Every operator also exists as a dense matrix, which is what the
# ``export-matrix`` command prints.
M, idx = LevelOperator("E_rho", 1, g, ct).matrix()
print(M)
