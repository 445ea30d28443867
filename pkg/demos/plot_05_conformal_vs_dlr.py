"""
Conformal measures and DLR measures
===================================

DLR measures are quasi-invariant for pairs that meet after the same number
of steps.  Conformal measures must also respect pairs that meet after
different numbers of steps, so they are DLR, but not the other way around.
"""

import numpy as np

from gapqi import Measure, build_instance, check_charac_dlr, check_conformal, m0

model, h = m0()
inst = build_instance(model, h, depth=3)
g, ct, ls = inst.gap, inst.ct, inst.ls

# %%
# Mass 2 at point 1 and mass 1 at point 2 is DLR.  Point 1 is also one step
# from 0, and conformality would need ``mu(1) = 2 mu(0)``, which fails.
mu = Measure(np.array([0.0, 2.0, 1.0, 0.0]))
print("DLR:", check_charac_dlr(g, ct, ls, mu).verdict,
      "| conformal:", check_conformal(model, h, mu, 3, ls).verdict)

# %%
# Propagating mass from the boundary point 0 through
# ``mu(t) = exp(h(t)) mu(sigma t)`` gives a conformal measure, which is
# then DLR as well.
conf = Measure(np.array([1.0, 2.0, 1.0, 2.0]))
rep = check_conformal(model, h, conf, 3, ls)
print("conformal:", rep.verdict, "| groupoid elements checked:", rep.details["n_elements"])
print("DLR:", check_charac_dlr(g, ct, ls, conf).verdict)
