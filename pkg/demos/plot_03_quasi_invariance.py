"""
Quasi-invariant measures at one level
=====================================

A measure is quasi-invariant at level ``n`` when moving mass along a class
rescales it by ``exp(h_n(x) - h_n(y))``.  There are five equivalent ways to
phrase this: pairwise, a symmetry of the weighted expectation, a balance
with ``zeta_n``, a projector fixed point, and a construction from an
arbitrary measure.  The checker evaluates all five and insists they agree.
"""

import numpy as np

from gapqi import Measure, build_instance, check_main_result, construct_qi_from_nu, m0

model, h = m0()
inst = build_instance(model, h, depth=3)
g, ct, ls = inst.gap, inst.ct, inst.ls

# %%
# Mass 2 at point 1 and mass 1 at point 2 matches ``rho_1 = (2, 1)`` on the
# class ``{1, 2}``, so all five conditions hold.  Equal masses break all of
# them.
for weights in ([0, 2, 1, 0], [0, 1, 1, 0]):
    rep = check_main_result(g, ct, ls, Measure(np.array(weights, float)), 1)
    print(weights, rep.verdicts)

# %%
# Any measure ``nu`` produces a quasi-invariant one by spreading its class
# mass according to ``rho_n``.  Its total mass is ``int zeta_n dnu``.
nu = Measure(np.array([0.0, 0.25, 0.0, 0.5]))
mu = construct_qi_from_nu(g, ct, nu, 1, ls)
print("mu:", mu.weights, "| mass:", mu.mass())
print("all five hold:", check_main_result(g, ct, ls, mu, 1).verdict)

# %%
# With the class ``{1, 2}`` pinned, no measure charging it can be
# quasi-invariant, and the report says which condition failed first.
pinned = build_instance(model, h, depth=3, overrides={1: [1, 2]})
rep = check_main_result(pinned.gap, pinned.ct, pinned.ls,
                        Measure(np.array([0, 2, 1, 0], float)), 1)
print("pinned:", rep.verdict, rep.witnesses[0])
