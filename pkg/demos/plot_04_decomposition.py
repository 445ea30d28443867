"""
Decomposing quasi-invariant measures
====================================

Across all levels the space splits into ``Z`` (where some partition
function is infinite), the layers ``W_n = (U_n - U_{n+1}) - Z`` and the tail
``W_inf``.  A measure is quasi-invariant for the whole chain exactly when it
ignores ``Z`` and each piece is fixed by the matching projector, and pieces
can be built independently.
"""

import numpy as np

from gapqi import (Measure, build_instance, check_charac_dlr, check_main_for_q,
                   construct_qi_on_winf, construct_qi_on_wn, fixed_point, m0, partition_xwz)

model, h = m0()
inst = build_instance(model, h, depth=3, overrides={1: [1, 2]})
g, ct, ls = inst.gap, inst.ct, inst.ls

# %%
# The pieces, by point.
part = partition_xwz(g, ls)
print("Z    :", np.flatnonzero(part.Z))
for n, w in enumerate(part.W):
    print(f"W_{n}  :", np.flatnonzero(w))
print("W_inf:", np.flatnonzero(part.Winf))

# %%
# On the finite layers, ``Q_n^*`` of any probability measure living there is
# quasi-invariant.  Sums of such pieces stay quasi-invariant.
mu0 = construct_qi_on_wn(g, ct, ls, 0)
mu2 = construct_qi_on_wn(g, ct, ls, 2)
total = mu0 + mu2.scaled(3.0)
print("pieces:", mu0.weights, mu2.weights)
print("whole chain:", check_main_for_q(g, ct, ls, total).verdict,
      "| by pieces:", check_charac_dlr(g, ct, ls, total).verdict)

# %%
# Charging ``Z`` is the one thing no quasi-invariant measure may do.
bad = total + Measure.dirac(4, 1)
print("with mass on Z:", check_charac_dlr(g, ct, ls, bad).verdict)

# %%
# The tail piece needs an iteration.  On a fixed point with ``h = 0`` the
# Dirac mass is already stationary.
fp_model, fp_h = fixed_point(0.0)
fp = build_instance(fp_model, fp_h, depth=5)
print("W_inf measure:", construct_qi_on_winf(fp.gap, fp.ct, fp.ls).weights)
